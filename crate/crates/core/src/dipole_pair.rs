//! Two molecules in the pseudo-spin product basis and their exact mapping
//! onto a two-site Heisenberg XYZ Hamiltonian.
//!
//! Basis order is `{|↓↓⟩, |↓↑⟩, |↑↓⟩, |↑↑⟩}` (molecule 1 first). The Pauli
//! operators act with `σᶻ|↓⟩ = +|↓⟩` and `σᶻ|↑⟩ = −|↑⟩`: the lower pseudo-spin
//! level carries `σᶻ = +1`, which is what makes the field term read
//! `−γ(σᶻ₁ + σᶻ₂)` with `γ > 0`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::validate_scan_grid;
use crate::linalg::Matrix;
use crate::pendular_moments::{moments, MomentSet, PseudoSpin, PseudoSpinStates};
use crate::rotor_basis::AngularOperator;
use crate::scalar::Real;

/// Angle between the array axis and the field at which `3 cos²α = 1`.
pub fn magic_angle<T: Real>() -> T {
    (T::one() / T::lit(3.0).sqrt()).acos()
}

/// Dipole-dipole scale `Ω = μ²/r³` (units of `B`) and orientation `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingGeometry<T> {
    omega: T,
    alpha: T,
}

impl<T: Real> CouplingGeometry<T> {
    pub fn new(omega: T, alpha: T) -> Result<Self> {
        if !(omega >= T::zero()) {
            return invalid(format!("Ω/B must be non-negative, got {omega}"));
        }
        let tol = T::lit(1e-12);
        if !(alpha >= -tol && alpha <= T::FRAC_PI_2() + tol) {
            return invalid(format!("α must lie in [0, π/2], got {alpha}"));
        }
        let alpha = alpha.max(T::zero()).min(T::FRAC_PI_2());
        Ok(Self { omega, alpha })
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `1 − 3 cos²α`.
    pub fn p_alpha(&self) -> T {
        let c = self.alpha.cos();
        T::one() - T::lit(3.0) * c * c
    }

    /// `−3 sin²α`.
    pub fn q_alpha(&self) -> T {
        let s = self.alpha.sin();
        -T::lit(3.0) * s * s
    }
}

/// Heisenberg XYZ constants plus the identity offset, all in units of `B`.
///
/// `H = jx σˣσˣ + jy σʸσʸ + jz σᶻσᶻ − γ (σᶻ₁ + σᶻ₂) + shift·I`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergConstants<T> {
    pub jx: T,
    pub jy: T,
    pub jz: T,
    pub gamma: T,
    pub shift: T,
}

/// `γ` split into its gap part `ΔE/2` and its `Ω`-proportional part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaParts<T> {
    pub gap: T,
    pub dipolar: T,
}

pub fn gamma_parts<T: Real>(m: &MomentSet<T>, g: &CouplingGeometry<T>) -> GammaParts<T> {
    let four = T::lit(4.0);
    GammaParts { gap: m.delta_e / T::lit(2.0), dipolar: -g.omega * g.p_alpha() * (m.c0 * m.c0 - m.c1 * m.c1) / four }
}

pub fn heisenberg_constants<T: Real>(m: &MomentSet<T>, g: &CouplingGeometry<T>) -> HeisenbergConstants<T> {
    let four = T::lit(4.0);
    let p = g.p_alpha();
    let w = g.omega;
    let cx2 = m.cx * m.cx;
    let dc = m.c0 - m.c1;
    let sc = m.c0 + m.c1;
    let parts = gamma_parts(m, g);
    HeisenbergConstants {
        // 3cos²α − 2 = −(1 + P_α)
        jx: -w * (T::one() + p) * cx2,
        jy: w * cx2,
        jz: w * p * dc * dc / four,
        gamma: parts.gap + parts.dipolar,
        shift: m.e0 + m.e1 + w * p * sc * sc / four,
    }
}

/// Single-molecule energies plus the dipole-dipole coupling in the
/// pseudo-spin product basis.
pub fn pair_hamiltonian<T: Real>(m: &MomentSet<T>, g: &CouplingGeometry<T>) -> Matrix<T> {
    let mut h = single_molecule_part(m);
    let v = pair_coupling(m, g);
    for i in 0..4 {
        for j in 0..4 {
            h[(i, j)] = h[(i, j)] + v[(i, j)];
        }
    }
    h
}

/// `diag(2E₀, E₀+E₁, E₁+E₀, 2E₁)`.
pub fn single_molecule_part<T: Real>(m: &MomentSet<T>) -> Matrix<T> {
    let d = [m.e0 + m.e0, m.e0 + m.e1, m.e1 + m.e0, m.e1 + m.e1];
    Matrix::from_fn(4, 4, |i, j| if i == j { d[i] } else { T::zero() })
}

/// The dipole-dipole block in closed form (no total-`m`-changing terms).
pub fn pair_coupling<T: Real>(m: &MomentSet<T>, g: &CouplingGeometry<T>) -> Matrix<T> {
    let w = g.omega;
    let p = g.p_alpha();
    let cx2 = m.cx * m.cx;
    let mut v = Matrix::zeros(4, 4);
    v[(0, 0)] = w * p * m.c0 * m.c0;
    v[(1, 1)] = w * p * m.c0 * m.c1;
    v[(2, 2)] = w * p * m.c1 * m.c0;
    v[(3, 3)] = w * p * m.c1 * m.c1;
    v[(0, 3)] = w * g.q_alpha() * cx2;
    v[(3, 0)] = v[(0, 3)];
    v[(1, 2)] = -w * p * cx2;
    v[(2, 1)] = v[(1, 2)];
    v
}

/// Terms of the dipole-dipole interaction that change total `m` by one:
/// `−3Ω sinα cosα (sin θ₁cos φ₁ cos θ₂ + cos θ₁ sin θ₂cos φ₂)`.
///
/// They vanish only for `α ∈ {0, π/2}`; the closed form in
/// [`pair_coupling`] leaves them out.
pub fn m_changing_coupling<T: Real>(m: &MomentSet<T>, g: &CouplingGeometry<T>) -> Matrix<T> {
    let k = -T::lit(3.0) * g.omega * g.alpha.sin() * g.alpha.cos();
    // single-molecule matrices indexed (↓, ↑)
    let c = [[m.c0, T::zero()], [T::zero(), m.c1]];
    let sx = [[T::zero(), m.cx], [m.cx, T::zero()]];
    Matrix::from_fn(4, 4, |r, s| {
        let (a, b) = (r / 2, r % 2);
        let (cc, d) = (s / 2, s % 2);
        k * (sx[a][cc] * c[b][d] + c[a][cc] * sx[b][d])
    })
}

/// Complex 4×4 matrix produced by the first-principles assembly.
#[derive(Clone, Debug)]
pub struct ComplexPairMatrix<T> {
    pub re: Matrix<T>,
    pub im: Matrix<T>,
}

impl<T: Real> ComplexPairMatrix<T> {
    pub fn max_imag(&self) -> T {
        self.im.max_abs()
    }
}

/// 2×2 single-molecule operator in the `{|↓⟩, |↑⟩}` basis.
type Block<T> = [[Complex<T>; 2]; 2];

/// Dipole-dipole interaction assembled term by term from single-molecule
/// angular matrix elements between the pendular pseudo-spin states.
///
/// Nothing about the structure of the result is assumed: every operator
/// product is evaluated on all sixteen basis pairs.
pub fn vdd_from_first_principles<T: Real>(x: T, g: &CouplingGeometry<T>, j_max: u32) -> Result<ComplexPairMatrix<T>> {
    let states = PseudoSpinStates::solve(x, j_max, 1)?;
    vdd_from_states(&states, g)
}

pub fn vdd_from_states<T: Real>(states: &PseudoSpinStates<T>, g: &CouplingGeometry<T>) -> Result<ComplexPairMatrix<T>> {
    let levels = [PseudoSpin::Down, PseudoSpin::Up];
    let single = |op: AngularOperator, imaginary: bool| -> Result<Block<T>> {
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for (a, &bra) in levels.iter().enumerate() {
            for (b, &ket) in levels.iter().enumerate() {
                let v = states.element(op, bra, ket)?;
                out[a][b] = if imaginary { Complex::new(T::zero(), v) } else { Complex::new(v, T::zero()) };
            }
        }
        Ok(out)
    };
    let cos = single(AngularOperator::CosTheta, false)?;
    let sx = single(AngularOperator::SinThetaCosPhi, false)?;
    let sy = single(AngularOperator::SinThetaSinPhi, true)?;

    let (sa, ca) = (g.alpha.sin(), g.alpha.cos());
    let scale = |m: &Block<T>, f: T| m.map(|row| row.map(|z| z * f));
    let add = |p: &Block<T>, q: &Block<T>| {
        let mut out = *p;
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] = p[a][b] + q[a][b];
            }
        }
        out
    };
    // projection of each dipole onto the array axis
    let axial = add(&scale(&sx, sa), &scale(&cos, ca));
    let terms: [(&Block<T>, &Block<T>, T); 4] =
        [(&cos, &cos, T::one()), (&sx, &sx, T::one()), (&sy, &sy, T::one()), (&axial, &axial, -T::lit(3.0))];
    let mut re = Matrix::zeros(4, 4);
    let mut im = Matrix::zeros(4, 4);
    for r in 0..4 {
        for s in 0..4 {
            let (a, b) = (r / 2, r % 2);
            let (c, d) = (s / 2, s % 2);
            let mut acc = Complex::new(T::zero(), T::zero());
            for (o1, o2, w) in terms.iter() {
                acc = acc + o1[a][c] * o2[b][d] * *w;
            }
            acc = acc * g.omega;
            re[(r, s)] = acc.re;
            im[(r, s)] = acc.im;
        }
    }
    Ok(ComplexPairMatrix { re, im })
}

/// `jx σˣσˣ + jy σʸσʸ + jz σᶻσᶻ − γ(σᶻ₁ + σᶻ₂) + shift·I`, built from
/// Kronecker products of the Pauli matrices.
pub fn xyz_matrix<T: Real>(h: &HeisenbergConstants<T>) -> ComplexPairMatrix<T> {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    // basis (↓, ↑) with σᶻ|↓⟩ = +|↓⟩
    let id = [[one, z], [z, one]];
    let sx = [[z, one], [one, z]];
    let sy = [[z, -i], [i, z]];
    let sz = [[one, z], [z, -one]];
    let kron = |p: &Block<T>, q: &Block<T>| {
        let mut out = [[z; 4]; 4];
        for r in 0..4 {
            for s in 0..4 {
                out[r][s] = p[r / 2][s / 2] * q[r % 2][s % 2];
            }
        }
        out
    };
    let parts = [
        (kron(&sx, &sx), h.jx),
        (kron(&sy, &sy), h.jy),
        (kron(&sz, &sz), h.jz),
        (kron(&sz, &id), -h.gamma),
        (kron(&id, &sz), -h.gamma),
        (kron(&id, &id), h.shift),
    ];
    let mut re = Matrix::zeros(4, 4);
    let mut im = Matrix::zeros(4, 4);
    for (m, w) in parts.iter() {
        for r in 0..4 {
            for s in 0..4 {
                let v = m[r][s] * *w;
                re[(r, s)] = re[(r, s)] + v.re;
                im[(r, s)] = im[(r, s)] + v.im;
            }
        }
    }
    ComplexPairMatrix { re, im }
}

/// One row of the `(x, α)` coupling map, every constant divided by `Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourRow<T> {
    pub x: T,
    pub alpha: T,
    pub jx: T,
    pub jy: T,
    pub jz: T,
    /// `Ω`-proportional part of `γ`, divided by `Ω`.
    pub gamma_dipolar: T,
}

/// Coupling constants per unit `Ω` over an `(x, α)` grid, `x` major.
pub fn coupling_contour<T: Real>(x_grid: &[T], alpha_grid: &[T], j_max: u32) -> Result<Vec<ContourRow<T>>> {
    validate_scan_grid(x_grid)?;
    validate_scan_grid(alpha_grid)?;
    let geoms = alpha_grid.iter().map(|&a| CouplingGeometry::new(T::one(), a)).collect::<Result<Vec<_>>>()?;
    let per_x: Vec<Vec<ContourRow<T>>> = x_grid
        .par_iter()
        .map(|&x| {
            let ms = moments(x, j_max)?;
            Ok(geoms
                .iter()
                .map(|g| {
                    let h = heisenberg_constants(&ms, g);
                    ContourRow {
                        x,
                        alpha: g.alpha(),
                        jx: h.jx,
                        jy: h.jy,
                        jz: h.jz,
                        gamma_dipolar: gamma_parts(&ms, g).dipolar,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_x.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotor_basis::DEFAULT_J_MAX;

    fn sample(x: f64) -> MomentSet<f64> {
        moments(x, DEFAULT_J_MAX).unwrap()
    }

    #[test]
    fn geometry_validation() {
        assert!(CouplingGeometry::new(-1.0, 0.0).is_err());
        assert!(CouplingGeometry::new(1.0, 2.0).is_err());
        let g = CouplingGeometry::new(1.0, 0.0).unwrap();
        assert_eq!((g.p_alpha(), g.q_alpha()), (-2.0, 0.0));
        let g = CouplingGeometry::new(1.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((g.p_alpha() - 1.0).abs() < 1e-15 && (g.q_alpha() + 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_interacting_limit() {
        let m = sample(3.0);
        let g = CouplingGeometry::new(0.0, 0.3).unwrap();
        let h = pair_hamiltonian(&m, &g);
        assert_eq!(h, single_molecule_part(&m));
        assert_eq!(h[(1, 1)], m.e0 + m.e1);
    }

    #[test]
    fn magic_angle_kills_flip_flop_and_ising() {
        let m = sample(5.0);
        let w = 1e-3;
        let g = CouplingGeometry::new(w, magic_angle()).unwrap();
        let v = pair_coupling(&m, &g);
        assert!(v[(1, 2)].abs() < 1e-15);
        assert!((v[(0, 3)] + 2.0 * w * m.cx * m.cx).abs() < 1e-15);
        let h = heisenberg_constants(&m, &g);
        assert!(h.jz.abs() <= 1e-12 * w);
        assert!((h.jx + h.jy).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_is_exact() {
        for &(x, w, a) in
            &[(0.0, 0.1, 0.2), (2.5, 1e-4, 0.0), (7.0, 3e-2, 1.1), (12.0, 1e-6, std::f64::consts::FRAC_PI_2)]
        {
            let m = sample(x);
            let g = CouplingGeometry::new(w, a).unwrap();
            let xyz = xyz_matrix(&heisenberg_constants(&m, &g));
            let h = pair_hamiltonian(&m, &g);
            assert!(xyz.max_imag() == 0.0);
            assert!(xyz.re.max_abs_diff(&h) <= 1e-12 * h.frobenius_norm());
        }
    }

    #[test]
    fn first_principles_agrees_with_closed_form_plus_m_changing_terms() {
        for &(x, a) in &[(1.0, 0.0), (4.0, 0.6), (9.0, 1.2), (6.0, std::f64::consts::FRAC_PI_2)] {
            let w = 1e-2;
            let g = CouplingGeometry::new(w, a).unwrap();
            let m = sample(x);
            let fp = vdd_from_first_principles(x, &g, DEFAULT_J_MAX).unwrap();
            assert!(fp.max_imag() <= 1e-14);
            let mut closed = pair_coupling(&m, &g);
            let extra = m_changing_coupling(&m, &g);
            for i in 0..4 {
                for j in 0..4 {
                    closed[(i, j)] += extra[(i, j)];
                }
            }
            assert!(fp.re.max_abs_diff(&closed) < 1e-15, "x={x} α={a}");
        }
    }

    #[test]
    fn field_free_vdd_vanishes() {
        let g = CouplingGeometry::new(0.05, 0.4).unwrap();
        let fp = vdd_from_first_principles(0.0, &g, DEFAULT_J_MAX).unwrap();
        assert_eq!(fp.re.max_abs(), 0.0);
        assert_eq!(fp.max_imag(), 0.0);
    }

    #[test]
    fn contour_rows_are_per_unit_omega() {
        let rows = coupling_contour(&[2.0f64, 4.0], &[0.0, 0.5], 20).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].x, rows[1].alpha), (2.0, 0.5));
        let m = moments(4.0f64, 20).unwrap();
        assert!((rows[2].jy - m.cx * m.cx).abs() < 1e-15);
        assert!((rows[2].jx - rows[2].jy).abs() < 1e-15);
    }
}
