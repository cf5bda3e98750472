use std::fmt;
use std::str::FromStr;

use pendular::grid;

/// Grid given on the command line as `start:stop:step`, `lo:hi:logN` or a
/// comma-separated list.
#[derive(Clone, Debug, PartialEq)]
pub enum GridArg {
    Uniform { start: f64, stop: f64, step: f64 },
    Log { lo: f64, hi: f64, n: usize },
    List(Vec<f64>),
}

impl GridArg {
    pub fn values(&self) -> pendular::Result<Vec<f64>> {
        let v = match *self {
            GridArg::Uniform { start, stop, step } => grid::uniform(start, stop, step)?,
            GridArg::Log { lo, hi, n } => grid::logarithmic(lo, hi, n)?,
            GridArg::List(ref v) => v.clone(),
        };
        grid::validate_scan_grid(&v)?;
        Ok(v)
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, c] => {
                let (start, stop) = (number(a)?, number(b)?);
                if let Some(n) = c.trim().strip_prefix("log") {
                    let n: usize = n.parse().map_err(|_| format!("bad point count in '{c}'"))?;
                    return Ok(GridArg::Log { lo: start, hi: stop, n });
                }
                let step = number(c)?;
                if step <= 0.0 {
                    return Err(format!("grid step must be positive, got {step}"));
                }
                if stop < start {
                    return Err(format!("grid stop {stop} is below start {start}"));
                }
                Ok(GridArg::Uniform { start, stop, step })
            }
            [single] => single.split(',').map(number).collect::<Result<Vec<_>, _>>().map(GridArg::List),
            _ => Err(format!("expected start:stop:step, lo:hi:logN or a list, got '{s}'")),
        }
    }
}

impl fmt::Display for GridArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridArg::Uniform { start, stop, step } => write!(f, "{start}:{stop}:{step}"),
            GridArg::Log { lo, hi, n } => write!(f, "{lo}:{hi}:log{n}"),
            GridArg::List(v) => {
                let s: Vec<String> = v.iter().map(f64::to_string).collect();
                write!(f, "{}", s.join(","))
            }
        }
    }
}

impl serde::Serialize for GridArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
