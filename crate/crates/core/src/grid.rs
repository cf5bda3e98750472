//! Parameter grids for scans.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// `start, start + step, …` up to and including `stop` (within `step / 1000`).
///
/// Points are computed as `start + i·step` so there is no drift.
pub fn uniform<T: Real>(start: T, stop: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) {
        return invalid(format!("grid step must be positive, got {step}"));
    }
    if !(stop >= start) {
        return invalid(format!("grid stop {stop} precedes start {start}"));
    }
    let count = ((stop - start) / step + T::lit(1e-3)).floor().to_usize().unwrap_or(0);
    Ok((0..=count).map(|i| start + T::from_usize_lossy(i) * step).collect())
}

/// `n` points spaced evenly in `log10` between `lo` and `hi` inclusive.
pub fn logarithmic<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo) || n == 0 {
        return invalid("logarithmic grid needs 0 < lo <= hi and at least one point");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let last = T::from_usize_lossy(n - 1);
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { T::lit(10.0).powf(a + (b - a) * T::from_usize_lossy(i) / last) })
        .collect())
}

/// Checks a scan grid is non-empty, ascending and non-negative.
pub fn validate_scan_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return invalid("grid is empty");
    }
    if grid.iter().any(|&x| !(x >= T::zero())) {
        return invalid("grid values must be non-negative");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("grid must be strictly ascending");
    }
    Ok(())
}
