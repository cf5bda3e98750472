//! Lanczos iteration with full reorthogonalisation for the lowest eigenpairs
//! of a real symmetric operator given only through its action on vectors.
//!
//! Excited states are obtained by deflation: each further run is kept
//! orthogonal to the eigenvectors already found, so degenerate levels are
//! resolved one by one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, tridiagonal_eigen, SymTridiagonal};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions<T> {
    pub max_krylov: usize,
    /// Converged when the Ritz residual is below `tolerance · scale`.
    pub tolerance: T,
    pub seed: u64,
}

impl<T: Real> Default for LanczosOptions<T> {
    fn default() -> Self {
        Self { max_krylov: 400, tolerance: T::epsilon() * T::lit(1e3), seed: 0x5eed }
    }
}

/// An eigenpair from [`lowest_eigenpairs`].
#[derive(Clone, Debug)]
pub struct EigenPair<T> {
    pub value: T,
    pub vector: Vec<T>,
}

/// Lowest `count` eigenpairs of the operator `apply` (which writes `H v`
/// into its second argument). `scale` is an estimate of `‖H‖`, used only to
/// set the convergence threshold.
pub fn lowest_eigenpairs<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    dim: usize,
    count: usize,
    scale: T,
    opts: &LanczosOptions<T>,
) -> Result<Vec<EigenPair<T>>> {
    let mut found: Vec<EigenPair<T>> = Vec::with_capacity(count);
    for level in 0..count.min(dim) {
        let locked: Vec<&[T]> = found.iter().map(|p| p.vector.as_slice()).collect();
        let pair = single_run(&apply, dim, &locked, scale, opts, opts.seed.wrapping_add(level as u64))?;
        found.push(pair);
    }
    found.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal));
    Ok(found)
}

/// The small tridiagonal problem is only solved every few steps.
const CHECK_EVERY: usize = 8;

fn orthogonalize<T: Real>(w: &mut [T], against: &[&[T]]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let c = dot(q, w);
            for (wi, &qi) in w.iter_mut().zip(q.iter()) {
                *wi = *wi - c * qi;
            }
        }
    }
}

fn single_run<T: Real>(
    apply: &impl Fn(&[T], &mut [T]),
    dim: usize,
    locked: &[&[T]],
    scale: T,
    opts: &LanczosOptions<T>,
    seed: u64,
) -> Result<EigenPair<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = (0..dim).map(|_| T::lit(rng.gen::<f64>() - 0.5)).collect();
    orthogonalize(&mut v, locked);
    let nv = norm(&v);
    if nv == T::zero() {
        return Err(Error::NoConvergence { context: "Lanczos start vector lies in the locked subspace".into() });
    }
    v.iter_mut().for_each(|x| *x = *x / nv);

    let limit = opts.max_krylov.min(dim - locked.len()).max(1);
    let threshold = opts.tolerance * scale.max(T::min_positive_value());
    let mut basis: Vec<Vec<T>> = vec![v];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![T::zero(); dim];

    loop {
        let k = basis.len() - 1;
        apply(&basis[k], &mut w);
        let a = dot(&basis[k], &w);
        alpha.push(a);
        for (wi, &qi) in w.iter_mut().zip(&basis[k]) {
            *wi = *wi - a * qi;
        }
        if k > 0 {
            let b = beta[k - 1];
            for (wi, &qi) in w.iter_mut().zip(&basis[k - 1]) {
                *wi = *wi - b * qi;
            }
        }
        {
            let mut all: Vec<&[T]> = locked.to_vec();
            all.extend(basis.iter().map(Vec::as_slice));
            orthogonalize(&mut w, &all);
        }
        let b = norm(&w);

        let steps = basis.len();
        let exhausted = steps >= limit || b <= threshold * T::epsilon();
        if !exhausted && !steps.is_multiple_of(CHECK_EVERY) {
            beta.push(b);
            basis.push(w.iter().map(|&x| x / b).collect());
            continue;
        }
        let t = SymTridiagonal { diag: alpha.clone(), off: beta.clone() };
        let eig = tridiagonal_eigen(&t)?;
        let y = eig.vectors.column(0);
        let residual = b * y[y.len() - 1].abs();
        if residual <= threshold || exhausted {
            if residual > threshold && basis.len() < dim - locked.len() && b > threshold * T::epsilon() {
                return Err(Error::NoConvergence {
                    context: format!("Lanczos: residual {residual} after {} steps (dim {dim})", basis.len()),
                });
            }
            let mut vec = vec![T::zero(); dim];
            for (coef, q) in y.iter().zip(&basis) {
                for (vi, &qi) in vec.iter_mut().zip(q) {
                    *vi = *vi + *coef * qi;
                }
            }
            orthogonalize(&mut vec, locked);
            let nv = norm(&vec);
            vec.iter_mut().for_each(|x| *x = *x / nv);
            return Ok(EigenPair { value: eig.values[0], vector: vec });
        }
        beta.push(b);
        basis.push(w.iter().map(|&x| x / b).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{symmetric_eigen, Matrix};

    #[test]
    fn matches_dense_spectrum_with_degeneracy() {
        let n = 60;
        // block structure with an exactly degenerate ground level
        let a = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                if i < 2 {
                    -3.0
                } else {
                    (i as f64 * 0.37).sin() + 2.0
                }
            } else if i >= 2 && j >= 2 && (i as i64 - j as i64).abs() == 1 {
                0.3
            } else {
                0.0
            }
        });
        let dense = symmetric_eigen(&a).unwrap();
        let pairs = lowest_eigenpairs(
            |v: &[f64], out: &mut [f64]| out.copy_from_slice(&a.matvec(v)),
            n,
            3,
            4.0,
            &LanczosOptions::default(),
        )
        .unwrap();
        for (p, &e) in pairs.iter().zip(&dense.values) {
            assert!((p.value - e).abs() < 1e-10, "{} vs {}", p.value, e);
            let av = a.matvec(&p.vector);
            let res: f64 = av.iter().zip(&p.vector).map(|(x, y)| (x - p.value * y).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-8);
        }
    }

    #[test]
    fn zero_operator() {
        let pairs =
            lowest_eigenpairs(|_: &[f64], out: &mut [f64]| out.fill(0.0), 5, 2, 0.0, &LanczosOptions::default())
                .unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs.iter().all(|p| p.value == 0.0));
    }
}
