//! Truncated spherical-harmonic basis of a linear rotor, angular operator
//! matrices and the single-molecule Stark (pendular) eigenproblem.
//!
//! All energies are in units of the rotational constant `B`. The reduced
//! field is `x = μ ε / B`, so the Hamiltonian reads `J² − x cos θ`.
//!
//! Matrix elements follow the Condon–Shortley phase convention:
//!
//! ```text
//! cos θ Y_J^M      = c(J,M) Y_{J+1}^M + c(J−1,M) Y_{J−1}^M
//!                    c(J,M) = sqrt(((J+1)² − M²) / ((2J+1)(2J+3)))
//! sin θ e^{iφ} Y_J^M = −sqrt((J+M+1)(J+M+2) / ((2J+1)(2J+3))) Y_{J+1}^{M+1}
//!                    + sqrt((J−M)(J−M−1) / ((2J−1)(2J+1))) Y_{J−1}^{M+1}
//! ```
//!
//! The lowering combination `sin θ e^{−iφ}` is taken as the adjoint of the
//! raising one.

use crate::error::{invalid, Error, Result};
use crate::linalg::{tridiagonal_eigen, Matrix, SymTridiagonal};
use crate::scalar::Real;

/// Default basis truncation.
pub const DEFAULT_J_MAX: u32 = 30;

/// The ordered basis `{|J, m⟩ : J = |m| … j_max}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    m: i32,
    j_max: u32,
}

impl BasisSpec {
    pub fn new(m: i32, j_max: u32) -> Result<Self> {
        if j_max < m.unsigned_abs() {
            return invalid(format!("j_max = {j_max} is below |m| = {}", m.unsigned_abs()));
        }
        Ok(Self { m, j_max })
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn j_min(&self) -> u32 {
        self.m.unsigned_abs()
    }

    pub fn dim(&self) -> usize {
        (self.j_max - self.j_min() + 1) as usize
    }

    /// `J` of the basis function at position `index`.
    pub fn j_at(&self, index: usize) -> u32 {
        self.j_min() + index as u32
    }

    pub fn j_values(&self) -> impl Iterator<Item = u32> {
        self.j_min()..=self.j_max
    }
}

/// Angular operators available through [`operator_matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngularOperator {
    CosTheta,
    SinThetaCosPhi,
    /// `sin θ sin φ` divided by `i`; its matrix elements are purely imaginary.
    SinThetaSinPhi,
}

impl AngularOperator {
    fn name(self) -> &'static str {
        match self {
            AngularOperator::CosTheta => "cos_theta",
            AngularOperator::SinThetaCosPhi => "sin_theta_cos_phi",
            AngularOperator::SinThetaSinPhi => "sin_theta_sin_phi",
        }
    }
}

/// `⟨J+1, m| cos θ |J, m⟩`.
pub fn cos_theta_coupling<T: Real>(j: u32, m: i32) -> T {
    let (j, m) = (j as f64, m as f64);
    let num = (j + 1.0) * (j + 1.0) - m * m;
    if num <= 0.0 {
        return T::zero();
    }
    T::lit((num / ((2.0 * j + 1.0) * (2.0 * j + 3.0))).sqrt())
}

/// `⟨j_bra, m+1| sin θ e^{iφ} |j_ket, m⟩`.
fn raising_element(j_bra: u32, j_ket: u32, m: i32) -> f64 {
    let (j, m) = (j_ket as f64, m as f64);
    if j_bra == j_ket + 1 {
        -((j + m + 1.0) * (j + m + 2.0) / ((2.0 * j + 1.0) * (2.0 * j + 3.0))).sqrt()
    } else if j_ket >= 1 && j_bra + 1 == j_ket {
        let num = (j - m) * (j - m - 1.0);
        if num <= 0.0 {
            0.0
        } else {
            (num / ((2.0 * j - 1.0) * (2.0 * j + 1.0))).sqrt()
        }
    } else {
        0.0
    }
}

/// `⟨j_bra, m−1| sin θ e^{−iφ} |j_ket, m⟩`, the adjoint of the raising element.
fn lowering_element(j_bra: u32, j_ket: u32, m: i32) -> f64 {
    raising_element(j_ket, j_bra, m - 1)
}

/// Matrix `⟨J', m'| op |J, m⟩` over two truncated bases (rows: bra).
pub fn operator_matrix<T: Real>(kind: AngularOperator, bra: &BasisSpec, ket: &BasisSpec) -> Result<Matrix<T>> {
    let (mb, mk) = (bra.m(), ket.m());
    let compatible = match kind {
        AngularOperator::CosTheta => mb == mk,
        _ => (mb - mk).abs() == 1,
    };
    if !compatible {
        return Err(Error::IncompatibleM { kind: kind.name(), bra: mb, ket: mk });
    }
    let m = Matrix::from_fn(bra.dim(), ket.dim(), |r, c| {
        let (jb, jk) = (bra.j_at(r), ket.j_at(c));
        match kind {
            AngularOperator::CosTheta => {
                if jb == jk + 1 {
                    cos_theta_coupling(jk, mk)
                } else if jk == jb + 1 {
                    cos_theta_coupling(jb, mk)
                } else {
                    T::zero()
                }
            }
            AngularOperator::SinThetaCosPhi | AngularOperator::SinThetaSinPhi => {
                let (up, down) =
                    if mb == mk + 1 { (raising_element(jb, jk, mk), 0.0) } else { (0.0, lowering_element(jb, jk, mk)) };
                let v = if kind == AngularOperator::SinThetaCosPhi { 0.5 * (up + down) } else { -0.5 * (up - down) };
                T::lit(v)
            }
        }
    });
    Ok(m)
}

/// Stark Hamiltonian `J² − x cos θ` within one `m` block (units of `B`).
pub fn build_stark_hamiltonian<T: Real>(x: T, spec: &BasisSpec) -> Result<SymTridiagonal<T>> {
    if !(x >= T::zero()) {
        return invalid(format!("reduced field must be non-negative, got {x}"));
    }
    let diag = spec.j_values().map(|j| T::from_u32(j * (j + 1)).unwrap()).collect();
    let off = spec.j_values().take(spec.dim() - 1).map(|j| -x * cos_theta_coupling::<T>(j, spec.m())).collect();
    Ok(SymTridiagonal { diag, off })
}

/// Pendular eigenstates at one reduced field within one `m` block.
#[derive(Clone, Debug)]
pub struct PendularSolution<T> {
    pub x: T,
    pub spec: BasisSpec,
    /// Ascending energies in units of `B`.
    pub energies: Vec<T>,
    /// Column `k` expands the `k`-th pendular state over `|J, m⟩`.
    pub coefficients: Matrix<T>,
}

impl<T: Real> PendularSolution<T> {
    /// Expansion coefficients of the `k`-th state.
    pub fn state(&self, k: usize) -> Vec<T> {
        self.coefficients.column(k)
    }

    /// Adiabatic label `J̃` of the `k`-th state.
    pub fn label(&self, k: usize) -> u32 {
        self.spec.j_at(k)
    }

    /// `⟨k| cos θ |k⟩`, the orientation cosine.
    pub fn orientation(&self, k: usize) -> T {
        let v = self.state(k);
        let n = v.len();
        let two = T::lit(2.0);
        (0..n.saturating_sub(1))
            .map(|i| two * v[i] * v[i + 1] * cos_theta_coupling::<T>(self.spec.j_at(i), self.spec.m()))
            .sum()
    }
}

/// Diagonalise the Stark Hamiltonian.
///
/// Each column is sign-fixed so the state's amplitude at the field-aligned
/// pole is positive: `lim_{θ→0} ψ(θ, 0) / sin^{|m|}θ > 0`. This gauge is
/// continuous in `x`, unlike fixing the sign of the largest coefficient,
/// which flips whenever the dominant harmonic changes.
pub fn solve_pendular<T: Real>(x: T, spec: &BasisSpec) -> Result<PendularSolution<T>> {
    let h = build_stark_hamiltonian(x, spec)?;
    let eig = tridiagonal_eigen(&h).map_err(|e| match e {
        Error::NoConvergence { context } => {
            Error::NoConvergence { context: format!("{context}; x = {x}, m = {}, j_max = {}", spec.m(), spec.j_max()) }
        }
        other => other,
    })?;
    let mut coefficients = eig.vectors;
    let n = spec.dim();
    let weights = pole_weights::<T>(spec);
    for k in 0..n {
        let pole: T = (0..n).map(|i| weights[i] * coefficients[(i, k)]).sum();
        if pole < T::zero() {
            for i in 0..n {
                coefficients[(i, k)] = -coefficients[(i, k)];
            }
        }
    }
    Ok(PendularSolution { x, spec: *spec, energies: eig.values, coefficients })
}

/// `Y_J^m / sin^{|m|}θ` at `θ = 0` up to a `J`-independent factor:
/// `sqrt((2J+1) (J+|m|)! / (J−|m|)!)`, scaled by its first entry.
fn pole_weights<T: Real>(spec: &BasisSpec) -> Vec<T> {
    let m = spec.j_min();
    let raw: Vec<f64> = spec
        .j_values()
        .map(|j| {
            let ratio: f64 = ((j - m + 1)..=(j + m)).map(|k| k as f64).product();
            ((2 * j + 1) as f64 * ratio).sqrt()
        })
        .collect();
    raw.iter().map(|&w| T::lit(w / raw[0])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: i32, j_max: u32) -> BasisSpec {
        BasisSpec::new(m, j_max).unwrap()
    }

    #[test]
    fn basis_dimension_and_rejection() {
        assert_eq!(spec(0, 2).dim(), 3);
        assert_eq!(spec(-2, 5).dim(), 4);
        assert!(BasisSpec::new(3, 2).is_err());
    }

    #[test]
    fn field_free_hamiltonian() {
        let h = build_stark_hamiltonian(0.0, &spec(0, 2)).unwrap();
        assert_eq!(h.diag, vec![0.0, 2.0, 6.0]);
        assert!(h.off.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn stark_off_diagonals() {
        let h = build_stark_hamiltonian(1.0, &spec(0, 1)).unwrap();
        assert!((h.off[0] + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let h = build_stark_hamiltonian(1.0, &spec(1, 2)).unwrap();
        assert!((h.off[0] + (3.0f64 / 15.0).sqrt()).abs() < 1e-15);
        assert!(h.to_dense().is_symmetric());
    }

    #[test]
    fn negative_field_rejected() {
        assert!(build_stark_hamiltonian(-0.1, &spec(0, 3)).is_err());
        assert!(solve_pendular(-1.0, &spec(0, 3)).is_err());
    }

    #[test]
    fn field_free_solution_is_rigid_rotor() {
        let s = solve_pendular(0.0, &spec(1, 6)).unwrap();
        assert_eq!(s.energies[0], 2.0);
        assert_eq!(s.label(0), 1);
        let v = s.state(0);
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn second_order_stark_shifts() {
        let x: f64 = 0.1;
        let up = solve_pendular(x, &spec(0, DEFAULT_J_MAX)).unwrap();
        assert!((up.energies[1] - (2.0 + x * x / 10.0)).abs() < 1e-4);
        let down = solve_pendular(x, &spec(1, DEFAULT_J_MAX)).unwrap();
        assert!((down.energies[0] - (2.0 - x * x / 20.0)).abs() < 1e-4);
    }

    #[test]
    fn operator_selection_rules() {
        let b0 = spec(0, 4);
        let b1 = spec(1, 4);
        let c: Matrix<f64> = operator_matrix(AngularOperator::CosTheta, &b0, &b0).unwrap();
        assert!((c[(1, 0)] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        for i in 0..b0.dim() {
            assert_eq!(c[(i, i)], 0.0);
        }
        let sx: Matrix<f64> = operator_matrix(AngularOperator::SinThetaCosPhi, &b1, &b0).unwrap();
        assert!((sx[(0, 0)] + 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!(operator_matrix::<f64>(AngularOperator::CosTheta, &b0, &b1).is_err());
        assert!(operator_matrix::<f64>(AngularOperator::SinThetaCosPhi, &b0, &b0).is_err());
        assert!(operator_matrix::<f64>(AngularOperator::SinThetaSinPhi, &spec(2, 4), &b0).is_err());
    }

    #[test]
    fn hermiticity_of_transverse_operators() {
        let b0 = spec(0, 6);
        let b1 = spec(1, 6);
        let up: Matrix<f64> = operator_matrix(AngularOperator::SinThetaCosPhi, &b1, &b0).unwrap();
        let down: Matrix<f64> = operator_matrix(AngularOperator::SinThetaCosPhi, &b0, &b1).unwrap();
        assert!(up.transpose().max_abs_diff(&down) < 1e-15);
        // sin θ sin φ is Hermitian, so its i-stripped matrix is antisymmetric.
        let up: Matrix<f64> = operator_matrix(AngularOperator::SinThetaSinPhi, &b1, &b0).unwrap();
        let down: Matrix<f64> = operator_matrix(AngularOperator::SinThetaSinPhi, &b0, &b1).unwrap();
        assert!(up.transpose().max_abs_diff(&Matrix::from_fn(7, 6, |i, j| -down[(i, j)])) < 1e-15);
    }

    #[test]
    fn orientation_matches_operator_sandwich() {
        let b = spec(0, 20);
        let s = solve_pendular(3.0, &b).unwrap();
        let c: Matrix<f64> = operator_matrix(AngularOperator::CosTheta, &b, &b).unwrap();
        for k in 0..3 {
            let v = s.state(k);
            assert!((c.sandwich(&v, &v) - s.orientation(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn f32_instantiation() {
        let s = solve_pendular(2.0f32, &spec(0, 15)).unwrap();
        let d = solve_pendular(2.0f64, &spec(0, 15)).unwrap();
        assert!((s.energies[0] as f64 - d.energies[0]).abs() < 1e-5);
    }
}
