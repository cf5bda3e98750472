//! Pseudo-spin ingredients of the pair Hamiltonian.
//!
//! `|↓⟩` is the lowest `m = 1` pendular state (correlating with `|1,1⟩`) and
//! `|↑⟩` the second `m = 0` state (correlating with `|1,0⟩`). Same-`m` levels
//! never cross, so adiabatic ordering identifies them at every field.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::validate_scan_grid;
use crate::linalg::dot;
use crate::rotor_basis::{operator_matrix, solve_pendular, AngularOperator, BasisSpec, PendularSolution};
use crate::scalar::Real;

/// Which pseudo-spin level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PseudoSpin {
    Down,
    Up,
}

impl PseudoSpin {
    /// Azimuthal quantum number of the underlying pendular state.
    pub fn m(self) -> i32 {
        match self {
            PseudoSpin::Down => 1,
            PseudoSpin::Up => 0,
        }
    }

    /// Position of the state in ascending order within its `m` block.
    pub fn index(self) -> usize {
        match self {
            PseudoSpin::Down => 0,
            PseudoSpin::Up => 1,
        }
    }
}

/// The two pseudo-spin states at one field, as coefficient vectors.
#[derive(Clone, Debug)]
pub struct PseudoSpinStates<T> {
    pub x: T,
    pub down: PendularSolution<T>,
    pub up: PendularSolution<T>,
}

impl<T: Real> PseudoSpinStates<T> {
    /// Solve both `m` blocks at `x`. Using `m = −1` for `|↓⟩` gives the
    /// degenerate partner state.
    pub fn solve(x: T, j_max: u32, down_m: i32) -> Result<Self> {
        if down_m.abs() != 1 {
            return invalid(format!("|↓⟩ must have m = ±1, got {down_m}"));
        }
        let down = solve_pendular(x, &BasisSpec::new(down_m, j_max)?)?;
        let up = solve_pendular(x, &BasisSpec::new(0, j_max)?)?;
        Ok(Self { x, down, up })
    }

    pub fn vector(&self, s: PseudoSpin) -> Vec<T> {
        match s {
            PseudoSpin::Down => self.down.state(0),
            PseudoSpin::Up => self.up.state(1),
        }
    }

    fn block(&self, s: PseudoSpin) -> (&BasisSpec, Vec<T>) {
        match s {
            PseudoSpin::Down => (&self.down.spec, self.down.state(0)),
            PseudoSpin::Up => (&self.up.spec, self.up.state(1)),
        }
    }

    /// `⟨bra| op |ket⟩` between pseudo-spin states. For
    /// [`AngularOperator::SinThetaSinPhi`] the value is the element divided
    /// by `i`. Elements forbidden by the `Δm` selection rule are zero.
    pub fn element(&self, op: AngularOperator, bra: PseudoSpin, ket: PseudoSpin) -> Result<T> {
        let (sb, vb) = self.block(bra);
        let (sk, vk) = self.block(ket);
        let dm = (sb.m() - sk.m()).abs();
        let allowed = match op {
            AngularOperator::CosTheta => dm == 0,
            _ => dm == 1,
        };
        if !allowed {
            return Ok(T::zero());
        }
        let mat = operator_matrix::<T>(op, sb, sk)?;
        Ok(mat.sandwich(&vb, &vk))
    }

    pub fn moments(&self) -> Result<MomentSet<T>> {
        let e0 = self.down.energies[0];
        let e1 = self.up.energies[1];
        let c0 = self.down.orientation(0);
        let c1 = self.up.orientation(1);
        let cx = self.element(AngularOperator::SinThetaCosPhi, PseudoSpin::Down, PseudoSpin::Up)?;
        Ok(MomentSet { x: self.x, e0, e1, c0, c1, cx, delta_e: e1 - e0 })
    }
}

/// Energies and dipole matrix elements of the pseudo-spin pair at one field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet<T> {
    pub x: T,
    /// Energy of `|↓⟩` (units of `B`).
    pub e0: T,
    /// Energy of `|↑⟩` (units of `B`).
    pub e1: T,
    /// `⟨↓| cos θ |↓⟩`.
    pub c0: T,
    /// `⟨↑| cos θ |↑⟩`.
    pub c1: T,
    /// `⟨↓| sin θ cos φ |↑⟩`.
    pub cx: T,
    pub delta_e: T,
}

/// Pseudo-spin moments at reduced field `x`.
pub fn moments<T: Real>(x: T, j_max: u32) -> Result<MomentSet<T>> {
    PseudoSpinStates::solve(x, j_max, 1)?.moments()
}

/// Moments over a grid, evaluated in parallel, returned in grid order.
pub fn moment_scan<T: Real>(x_grid: &[T], j_max: u32) -> Result<Vec<MomentSet<T>>> {
    validate_scan_grid(x_grid)?;
    x_grid.par_iter().map(|&x| moments(x, j_max)).collect()
}

/// One row of a Stark map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarkRow<T> {
    pub x: T,
    pub m: i32,
    /// Adiabatic label `J̃`.
    pub label: u32,
    /// Energy in units of `B`.
    pub energy: T,
}

/// Lowest `n_states` energies per `m` over the grid, ordered by `x`, `m`, `J̃`.
pub fn stark_map<T: Real>(x_grid: &[T], m_values: &[i32], n_states: usize, j_max: u32) -> Result<Vec<StarkRow<T>>> {
    validate_scan_grid(x_grid)?;
    if m_values.is_empty() || n_states == 0 {
        return invalid("stark map needs at least one m value and one state");
    }
    let mut ms = m_values.to_vec();
    ms.sort_unstable();
    ms.dedup();
    let per_x: Vec<Vec<StarkRow<T>>> = x_grid
        .par_iter()
        .map(|&x| {
            let mut rows = Vec::new();
            for &m in &ms {
                let spec = BasisSpec::new(m, j_max)?;
                let sol = solve_pendular(x, &spec)?;
                for k in 0..n_states.min(spec.dim()) {
                    rows.push(StarkRow { x, m, label: sol.label(k), energy: sol.energies[k] });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_x.into_iter().flatten().collect())
}

/// One row of a coefficient map: weight of `Y_J^m` in a pseudo-spin state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientRow<T> {
    pub x: T,
    pub j: u32,
    pub coefficient: T,
}

/// Spherical-harmonic coefficients of `|↓⟩` or `|↑⟩` over the grid.
pub fn coefficient_map<T: Real>(x_grid: &[T], state: PseudoSpin, j_max: u32) -> Result<Vec<CoefficientRow<T>>> {
    validate_scan_grid(x_grid)?;
    let spec = BasisSpec::new(state.m(), j_max)?;
    let per_x: Vec<Vec<CoefficientRow<T>>> = x_grid
        .par_iter()
        .map(|&x| {
            let sol = solve_pendular(x, &spec)?;
            let v = sol.state(state.index());
            Ok(v.iter().enumerate().map(|(i, &c)| CoefficientRow { x, j: spec.j_at(i), coefficient: c }).collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_x.into_iter().flatten().collect())
}

/// First sign change of sampled `ys`, located by bisection on the cubic
/// through the four samples surrounding the bracketing interval.
pub fn zero_crossing<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let i = (0..n.saturating_sub(1))
        .find(|&i| ys[i] != T::zero() && ys[i + 1] != T::zero() && (ys[i] < T::zero()) != (ys[i + 1] < T::zero()));
    let i = match i {
        Some(i) => i,
        None => return (0..n).find(|&i| ys[i] == T::zero() && i > 0).map(|i| xs[i]),
    };
    if n < 4 {
        return Some(linear_root(xs[i], xs[i + 1], ys[i], ys[i + 1]));
    }
    let lo = i.saturating_sub(1).min(n - 4);
    let (px, py) = (&xs[lo..lo + 4], &ys[lo..lo + 4]);
    let cubic = |x: T| -> T {
        (0..4)
            .map(|a| {
                let mut w = py[a];
                for b in 0..4 {
                    if a != b {
                        w = w * (x - px[b]) / (px[a] - px[b]);
                    }
                }
                w
            })
            .sum()
    };
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    let mut fa = cubic(a);
    for _ in 0..200 {
        let mid = (a + b) / T::lit(2.0);
        let fm = cubic(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if b - a <= T::epsilon() * (a.abs() + b.abs()) {
            break;
        }
    }
    Some((a + b) / T::lit(2.0))
}

fn linear_root<T: Real>(x0: T, x1: T, y0: T, y1: T) -> T {
    x0 - y0 * (x1 - x0) / (y1 - y0)
}

/// Sum of squared coefficients, useful as a normalisation check.
pub fn norm_squared<T: Real>(v: &[T]) -> T {
    dot(v, v)
}
