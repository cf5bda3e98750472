//! Closed-form approximations of the pseudo-spin ingredients: a quintic
//! without constant term for the gap and a double sigmoid for the dipole
//! matrix elements.
//!
//! ```text
//! ΔE/B ≈ a1 x + a2 x² + a3 x³ + a4 x⁴ + a5 x⁵
//! C(x) ≈ A0 + A1 / (1 + exp((x − x1)/k1)) + A2 / (1 + exp(−(x − x2)/k2))
//! ```
//!
//! The published parameter sets are kept here for comparison. Fits are
//! compared in function space only: the double sigmoid is over-parameterised,
//! so different parameter vectors can describe the same curve.

use crate::error::{invalid, Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::pendular_moments::MomentSet;
use crate::scalar::Real;

/// Quantities with a published approximation formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FitQuantity {
    Gap,
    C0,
    C1,
    Cx,
}

impl FitQuantity {
    pub const ALL: [FitQuantity; 4] = [FitQuantity::Gap, FitQuantity::C0, FitQuantity::C1, FitQuantity::Cx];

    pub fn name(self) -> &'static str {
        match self {
            FitQuantity::Gap => "gap",
            FitQuantity::C0 => "c0",
            FitQuantity::C1 => "c1",
            FitQuantity::Cx => "cx",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    /// Pick this quantity out of a moment set.
    pub fn sample<T: Real>(self, m: &MomentSet<T>) -> T {
        match self {
            FitQuantity::Gap => m.delta_e,
            FitQuantity::C0 => m.c0,
            FitQuantity::C1 => m.c1,
            FitQuantity::Cx => m.cx,
        }
    }
}

/// `1 − SS_res / SS_tot`.
pub fn r_squared<T: Real>(ys: &[T], fitted: &[T]) -> T {
    let n = T::from_usize_lossy(ys.len());
    let mean = ys.iter().copied().sum::<T>() / n;
    let ss_tot: T = ys.iter().map(|&y| (y - mean) * (y - mean)).sum();
    let ss_res: T = ys.iter().zip(fitted).map(|(&y, &f)| (y - f) * (y - f)).sum();
    if ss_tot == T::zero() {
        return if ss_res == T::zero() { T::one() } else { T::neg_infinity() };
    }
    T::one() - ss_res / ss_tot
}

/// Largest `|y − f(x)|` over the samples.
pub fn max_deviation<T: Real>(samples: &[(T, T)], f: impl Fn(T) -> T) -> T {
    samples.iter().fold(T::zero(), |m, &(x, y)| m.max((f(x) - y).abs()))
}

/// Quintic without constant term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyFit<T> {
    /// `a1 … a5`.
    pub coefficients: [T; 5],
    pub r_squared: T,
}

impl<T: Real> PolyFit<T> {
    pub fn eval(&self, x: T) -> T {
        // Horner on x (a1 + x (a2 + …))
        let c = &self.coefficients;
        x * (c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4]))))
    }
}

/// Published gap polynomial.
pub fn published_gap_poly<T: Real>() -> PolyFit<T> {
    PolyFit { coefficients: [0.00794, 0.16531, -0.02838, 0.00206, -5.55762e-5].map(T::lit), r_squared: T::lit(0.9999) }
}

/// Linear least squares on `x … x⁵`.
pub fn fit_gap<T: Real>(samples: &[(T, T)]) -> Result<PolyFit<T>> {
    if samples.len() < 20 {
        return invalid(format!("gap fit needs at least 20 samples, got {}", samples.len()));
    }
    let design = Matrix::from_fn(samples.len(), 5, |i, j| samples[i].0.powi(j as i32 + 1));
    let ys: Vec<T> = samples.iter().map(|s| s.1).collect();
    let c = least_squares(&design, &ys)?;
    let mut fit = PolyFit { coefficients: [c[0], c[1], c[2], c[3], c[4]], r_squared: T::zero() };
    let fitted: Vec<T> = samples.iter().map(|s| fit.eval(s.0)).collect();
    fit.r_squared = r_squared(&ys, &fitted);
    Ok(fit)
}

/// Parameters of the double sigmoid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmoidParams<T> {
    pub a0: T,
    pub a1: T,
    pub a2: T,
    pub x1: T,
    pub x2: T,
    pub k1: T,
    pub k2: T,
}

/// `1 / (1 + e^u)` without overflow.
fn logistic_neg<T: Real>(u: T) -> T {
    if u > T::zero() {
        let e = (-u).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + u.exp())
    }
}

impl<T: Real> SigmoidParams<T> {
    pub fn eval(&self, x: T) -> T {
        let s1 = logistic_neg((x - self.x1) / self.k1);
        let s2 = logistic_neg(-(x - self.x2) / self.k2);
        self.a0 + self.a1 * s1 + self.a2 * s2
    }

    fn to_vec(self) -> [T; 7] {
        [self.a0, self.a1, self.a2, self.x1, self.x2, self.k1, self.k2]
    }

    fn from_slice(p: &[T]) -> Self {
        Self { a0: p[0], a1: p[1], a2: p[2], x1: p[3], x2: p[4], k1: p[5], k2: p[6] }
    }

    /// Value and gradient with respect to `(a0, a1, a2, x1, x2, k1, k2)`.
    fn eval_with_gradient(&self, x: T) -> (T, [T; 7]) {
        let one = T::one();
        let d1 = x - self.x1;
        let d2 = x - self.x2;
        let s1 = logistic_neg(d1 / self.k1);
        let s2 = logistic_neg(-d2 / self.k2);
        let g1 = self.a1 * s1 * (one - s1);
        let g2 = self.a2 * s2 * (one - s2);
        let value = self.a0 + self.a1 * s1 + self.a2 * s2;
        let grad =
            [one, s1, s2, g1 / self.k1, -g2 / self.k2, g1 * d1 / (self.k1 * self.k1), -g2 * d2 / (self.k2 * self.k2)];
        (value, grad)
    }
}

/// How to read the ambiguous published `x1` entry of the `C_X` column,
/// printed as "−04403".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CxOffsetReading {
    /// `x1 = −0.4403`.
    Decimal,
    /// `x1 = −4403`, the literal digits.
    Literal,
}

/// Published double-sigmoid parameters. `reading` only matters for `Cx`.
pub fn published_sigmoid<T: Real>(q: FitQuantity, reading: CxOffsetReading) -> Option<SigmoidParams<T>> {
    let p = match q {
        FitQuantity::Gap => return None,
        FitQuantity::C0 => [-0.24612, -0.56893, 0.95967, -0.09066, -1.25815, 2.17868, 6.7313],
        FitQuantity::C1 => [-0.91801, 0.9, 1.36773, 0.09317, 2.52364, 0.80729, 3.38213],
        FitQuantity::Cx => {
            let x1 = match reading {
                CxOffsetReading::Decimal => -0.4403,
                CxOffsetReading::Literal => -4403.0,
            };
            [0.21844, -0.53637, 0.02855, x1, 4.28747, 1.18595, 0.94214]
        }
    };
    Some(SigmoidParams::from_slice(&p.map(T::lit)))
}

/// Result of a double-sigmoid fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmoidFit<T> {
    pub params: SigmoidParams<T>,
    pub r_squared: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Levenberg–Marquardt settings.
#[derive(Clone, Copy, Debug)]
pub struct LmOptions<T> {
    pub max_iterations: usize,
    /// Stop when the relative cost decrease falls below this.
    pub cost_tolerance: T,
    /// Stop when the relative step size falls below this.
    pub step_tolerance: T,
    pub initial_damping: T,
}

impl<T: Real> Default for LmOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            cost_tolerance: T::lit(1e-12),
            step_tolerance: T::lit(1e-13),
            initial_damping: T::lit(1e-3),
        }
    }
}

/// Nonlinear least squares fit of the double sigmoid.
///
/// Each damped step solves `[J; √λ·D] δ = [−r; 0]` by QR, with `D` the
/// column norms of `J`. Steps that would make a width non-positive are
/// rejected like any other cost increase. When the iteration budget runs
/// out, the best parameters seen are returned with `converged = false`.
pub fn fit_moment<T: Real>(
    samples: &[(T, T)],
    initial: SigmoidParams<T>,
    opts: &LmOptions<T>,
) -> Result<SigmoidFit<T>> {
    if samples.len() < 50 {
        return invalid(format!("sigmoid fit needs at least 50 samples, got {}", samples.len()));
    }
    if !(initial.k1 > T::zero() && initial.k2 > T::zero()) {
        return invalid("initial sigmoid widths must be positive");
    }
    let m = samples.len();
    let residuals = |p: &SigmoidParams<T>| -> Vec<T> { samples.iter().map(|&(x, y)| p.eval(x) - y).collect() };
    let cost = |r: &[T]| -> T { r.iter().map(|&v| v * v).sum() };

    let mut params = initial;
    let mut r = residuals(&params);
    let mut c = cost(&r);
    let mut lambda = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    let ten = T::lit(10.0);

    while iterations < opts.max_iterations {
        iterations += 1;
        let jac = Matrix::from_fn(m, 7, |i, j| params.eval_with_gradient(samples[i].0).1[j]);
        let scale: Vec<T> =
            (0..7).map(|j| (0..m).map(|i| jac[(i, j)] * jac[(i, j)]).sum::<T>().sqrt().max(T::epsilon())).collect();

        let mut improved = false;
        let mut small_step = false;
        for _ in 0..60 {
            let sl = lambda.sqrt();
            let aug = Matrix::from_fn(m + 7, 7, |i, j| {
                if i < m {
                    jac[(i, j)]
                } else if i - m == j {
                    sl * scale[j]
                } else {
                    T::zero()
                }
            });
            let mut rhs: Vec<T> = r.iter().map(|&v| -v).collect();
            rhs.extend(std::iter::repeat_n(T::zero(), 7));
            let step = match least_squares(&aug, &rhs) {
                Ok(s) => s,
                Err(Error::RankDeficient { .. }) => {
                    lambda = lambda * ten;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let p = params.to_vec();
            let trial: Vec<T> = p.iter().zip(&step).map(|(&a, &d)| a + d).collect();
            let trial = SigmoidParams::from_slice(&trial);
            let step_norm = step.iter().map(|&d| d * d).sum::<T>().sqrt();
            let p_norm = p.iter().map(|&v| v * v).sum::<T>().sqrt();
            small_step = step_norm <= opts.step_tolerance * (p_norm + opts.step_tolerance);
            if trial.k1 > T::zero() && trial.k2 > T::zero() {
                let tr = residuals(&trial);
                let tc = cost(&tr);
                if tc.is_finite() && tc <= c {
                    let rel = (c - tc) / c.max(T::min_positive_value());
                    params = trial;
                    r = tr;
                    c = tc;
                    lambda = (lambda / ten).max(T::lit(1e-15));
                    improved = true;
                    if rel <= opts.cost_tolerance || small_step {
                        converged = true;
                    }
                    break;
                }
            }
            if small_step {
                break;
            }
            lambda = lambda * ten;
        }
        if converged || (!improved && small_step) {
            converged = true;
            break;
        }
        if !improved {
            break;
        }
        if c == T::zero() {
            converged = true;
            break;
        }
    }
    let ys: Vec<T> = samples.iter().map(|s| s.1).collect();
    let fitted: Vec<T> = samples.iter().map(|s| params.eval(s.0)).collect();
    Ok(SigmoidFit { params, r_squared: r_squared(&ys, &fitted), converged, iterations })
}

/// Either kind of fitted curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FittedCurve<T> {
    Poly(PolyFit<T>),
    Sigmoid(SigmoidFit<T>),
}

impl<T: Real> FittedCurve<T> {
    pub fn eval(&self, x: T) -> T {
        match self {
            FittedCurve::Poly(p) => p.eval(x),
            FittedCurve::Sigmoid(s) => s.params.eval(x),
        }
    }

    pub fn r_squared(&self) -> T {
        match self {
            FittedCurve::Poly(p) => p.r_squared,
            FittedCurve::Sigmoid(s) => s.r_squared,
        }
    }
}

/// One row of the computed / published / refit comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow<T> {
    pub x: T,
    pub computed: T,
    pub published: T,
    /// Published `C_X` curve with the literal `x1 = −4403` reading.
    pub published_literal: Option<T>,
    pub refit: T,
}

/// Refit of one quantity and its comparison against the published formula.
#[derive(Clone, Debug)]
pub struct FitReport<T> {
    pub quantity: FitQuantity,
    pub refit: FittedCurve<T>,
    pub max_dev_refit: T,
    pub max_dev_published: T,
    /// Only for `C_X`: deviation of the literal-digit reading.
    pub max_dev_published_literal: Option<T>,
    pub rows: Vec<ComparisonRow<T>>,
}

impl<T: Real> FitReport<T> {
    /// Smallest deviation among the published readings.
    pub fn best_published_deviation(&self) -> T {
        match self.max_dev_published_literal {
            Some(l) => self.max_dev_published.min(l),
            None => self.max_dev_published,
        }
    }
}

type Curve<T> = Box<dyn Fn(T) -> T>;

/// Refit `quantity` on pre-computed moments and compare with the published
/// formula. Sigmoid fits start from the published parameters.
pub fn fit_report<T: Real>(quantity: FitQuantity, data: &[MomentSet<T>]) -> Result<FitReport<T>> {
    let samples: Vec<(T, T)> = data.iter().map(|m| (m.x, quantity.sample(m))).collect();
    let (refit, published, literal): (FittedCurve<T>, Curve<T>, Option<Curve<T>>) = match quantity {
        FitQuantity::Gap => {
            let reference = published_gap_poly::<T>();
            (FittedCurve::Poly(fit_gap(&samples)?), Box::new(move |x| reference.eval(x)), None)
        }
        q => {
            let reference = published_sigmoid::<T>(q, CxOffsetReading::Decimal).unwrap();
            let fit = fit_moment(&samples, reference, &LmOptions::default())?;
            let literal: Option<Curve<T>> = if q == FitQuantity::Cx {
                let lit = published_sigmoid::<T>(q, CxOffsetReading::Literal).unwrap();
                Some(Box::new(move |x| lit.eval(x)))
            } else {
                None
            };
            (FittedCurve::Sigmoid(fit), Box::new(move |x| reference.eval(x)), literal)
        }
    };
    let rows: Vec<ComparisonRow<T>> = samples
        .iter()
        .map(|&(x, y)| ComparisonRow {
            x,
            computed: y,
            published: published(x),
            published_literal: literal.as_ref().map(|f| f(x)),
            refit: refit.eval(x),
        })
        .collect();
    Ok(FitReport {
        quantity,
        refit,
        max_dev_refit: max_deviation(&samples, |x| refit.eval(x)),
        max_dev_published: max_deviation(&samples, &published),
        max_dev_published_literal: literal.as_ref().map(|f| max_deviation(&samples, f)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform;

    #[test]
    fn exact_polynomial_is_recovered() {
        let xs = uniform(0.0, 12.0, 0.25).unwrap();
        let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, x + x * x)).collect();
        let fit = fit_gap(&samples).unwrap();
        let expected = [1.0, 1.0, 0.0, 0.0, 0.0];
        for (c, e) in fit.coefficients.iter().zip(expected) {
            assert!((c - e).abs() < 1e-10, "{:?}", fit.coefficients);
        }
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
        assert_eq!(fit.eval(0.0), 0.0);
    }

    #[test]
    fn degenerate_grid_is_rank_deficient() {
        let samples = vec![(2.0, 1.0); 30];
        assert!(matches!(fit_gap(&samples), Err(Error::RankDeficient { .. })));
        assert!(fit_gap(&samples[..5]).is_err());
    }

    #[test]
    fn sigmoid_gradient_matches_finite_differences() {
        let p = published_sigmoid::<f64>(FitQuantity::C1, CxOffsetReading::Decimal).unwrap();
        let (_, g) = p.eval_with_gradient(3.3);
        let base = p.to_vec();
        for j in 0..7 {
            let h = 1e-6;
            let mut a = base;
            let mut b = base;
            a[j] += h;
            b[j] -= h;
            let fd = (SigmoidParams::from_slice(&a).eval(3.3) - SigmoidParams::from_slice(&b).eval(3.3)) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-8, "param {j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn sigmoid_round_trip() {
        let truth = SigmoidParams { a0: 0.1, a1: -0.4, a2: 0.7, x1: 1.5, x2: 6.0, k1: 1.2, k2: 2.5 };
        let xs = uniform(0.0, 12.0, 0.05).unwrap();
        let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, truth.eval(x))).collect();
        let start = SigmoidParams { a0: 0.0, a1: -0.3, a2: 0.6, x1: 1.0, x2: 5.0, k1: 1.0, k2: 2.0 };
        let fit = fit_moment(&samples, start, &LmOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(max_deviation(&samples, |x| fit.params.eval(x)) < 1e-8);
        assert!(fit.params.k1 > 0.0 && fit.params.k2 > 0.0);
    }

    #[test]
    fn sigmoid_input_validation() {
        let p = published_sigmoid::<f64>(FitQuantity::C0, CxOffsetReading::Decimal).unwrap();
        assert!(fit_moment(&[(0.0, 0.0); 10], p, &LmOptions::default()).is_err());
        let bad = SigmoidParams { k1: -1.0, ..p };
        assert!(fit_moment(&[(0.0, 0.0); 60], bad, &LmOptions::default()).is_err());
    }

    #[test]
    fn unconverged_fit_is_flagged() {
        let xs = uniform(0.0f64, 12.0, 0.1).unwrap();
        let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, (x * 1.7).sin())).collect();
        let start = published_sigmoid::<f64>(FitQuantity::C0, CxOffsetReading::Decimal).unwrap();
        let opts = LmOptions { max_iterations: 2, ..LmOptions::default() };
        let fit = fit_moment(&samples, start, &opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 2);
    }

    #[test]
    fn literal_cx_reading_does_not_vanish_at_zero_field() {
        let dec = published_sigmoid::<f64>(FitQuantity::Cx, CxOffsetReading::Decimal).unwrap();
        let lit = published_sigmoid::<f64>(FitQuantity::Cx, CxOffsetReading::Literal).unwrap();
        assert!(dec.eval(0.0).abs() < 0.01);
        assert!(lit.eval(0.0) > 0.2);
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in FitQuantity::ALL {
            assert_eq!(FitQuantity::parse(q.name()), Some(q));
        }
        assert_eq!(FitQuantity::parse("nope"), None);
    }
}
