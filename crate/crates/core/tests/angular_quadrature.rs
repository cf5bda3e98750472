//! Angular matrix elements checked against direct integration of
//! spherical harmonics on a product quadrature grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use pendular::rotor_basis::{operator_matrix, AngularOperator, BasisSpec};

const J_MAX: u32 = 5;

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Associated Legendre function with the Condon-Shortley phase, m ≥ 0.
fn assoc_legendre(l: u32, m: u32, u: f64) -> f64 {
    let s = (1.0 - u * u).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = u * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut p = 0.0;
    for ll in m + 2..=l {
        p = ((2 * ll - 1) as f64 * u * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = p;
    }
    p
}

fn ylm(l: u32, m: i32, u: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
    let y = Complex64::from_polar(norm * assoc_legendre(l, am, u), am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

fn integrate(l1: u32, m1: i32, l2: u32, m2: i32, op: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let nodes = gauss_legendre(24);
    let n_phi = 32;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(u, w) in &nodes {
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            acc += ylm(l1, m1, u, phi).conj() * op(u, phi) * ylm(l2, m2, u, phi) * w * (2.0 * PI / n_phi as f64);
        }
    }
    acc
}

#[test]
fn harmonics_are_orthonormal_on_the_grid() {
    for (l1, m1, l2, m2) in [(0, 0, 0, 0), (3, 1, 3, 1), (4, -2, 4, -2), (2, 1, 3, 1), (5, 0, 1, 0)] {
        let v = integrate(l1, m1, l2, m2, |_, _| Complex64::new(1.0, 0.0));
        let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
        assert!((v - want).norm() < 1e-13, "({l1},{m1}|{l2},{m2}) = {v}");
    }
}

#[test]
fn operator_matrices_match_quadrature() {
    type Integrand = fn(f64, f64) -> Complex64;
    let ops: [(AngularOperator, Integrand); 3] = [
        (AngularOperator::CosTheta, |u, _| Complex64::new(u, 0.0)),
        (AngularOperator::SinThetaCosPhi, |u, p| Complex64::new((1.0 - u * u).sqrt() * p.cos(), 0.0)),
        // sin θ sin φ divided by i
        (AngularOperator::SinThetaSinPhi, |u, p| Complex64::new(0.0, -(1.0 - u * u).sqrt() * p.sin())),
    ];
    let mut checked = 0;
    for (op, f) in ops {
        for mb in -2..=2 {
            for mk in -2..=2 {
                let bra = BasisSpec::new(mb, J_MAX).unwrap();
                let ket = BasisSpec::new(mk, J_MAX).unwrap();
                let mat = match operator_matrix::<f64>(op, &bra, &ket) {
                    Ok(m) => m,
                    Err(_) => {
                        let expect_allowed =
                            if op == AngularOperator::CosTheta { mb == mk } else { (mb - mk).abs() == 1 };
                        assert!(!expect_allowed, "{op:?} refused m {mb} <- {mk}");
                        continue;
                    }
                };
                for r in 0..bra.dim() {
                    for c in 0..ket.dim() {
                        let q = integrate(bra.j_at(r), mb, ket.j_at(c), mk, f);
                        assert!(q.im.abs() < 1e-12, "{op:?}: imaginary residue {q}");
                        assert!(
                            (mat[(r, c)] - q.re).abs() < 1e-10,
                            "{op:?} <{},{mb}|{},{mk}>: {} vs {}",
                            bra.j_at(r),
                            ket.j_at(c),
                            mat[(r, c)],
                            q.re
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 300);
}
