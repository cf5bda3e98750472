//! Chains of pseudo-spins with XXZ coupling in a longitudinal field,
//!
//! `H = Σ_⟨ik⟩ w_ik [ J (σˣᵢσˣₖ + σʸᵢσʸₖ) + J_z σᶻᵢσᶻₖ ] − γ Σᵢ σᶻᵢ`,
//!
//! solved by exact diagonalisation in the bitstring basis. Bit `i` set means
//! `σᶻᵢ = +1`, i.e. molecule `i` in the lower pseudo-spin level `|↓⟩`.
//! Total `σᶻ` is conserved, so every solve runs sector by sector.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::validate_scan_grid;
use crate::lanczos::{lowest_eigenpairs, LanczosOptions};
use crate::linalg::{least_squares, symmetric_eigen, Matrix};
use crate::pendular_moments::{moment_scan, MomentSet};
use crate::scalar::Real;

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 16;
/// Chain length used by phase scans unless overridden.
pub const DEFAULT_SCAN_SITES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

/// Which pairs interact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Range {
    #[default]
    NearestNeighbour,
    /// Every pair, weighted by `1/d³` (minimum-image distance on a ring).
    Dipolar,
}

/// XXZ constants `(J, J_z, γ)` in units of `B`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct XxzConstants<T> {
    pub j: T,
    pub jz: T,
    pub gamma: T,
}

impl<T: Real> XxzConstants<T> {
    /// Coupling scale used to make gaps and fields dimensionless.
    pub fn scale(&self) -> T {
        let s = self.j.abs();
        if s > T::zero() {
            s
        } else {
            self.jz.abs()
        }
    }
}

/// Chain constants realised by a line of molecules along the field (`α = 0`)
/// with dipolar scale `omega = Ω/B`.
pub fn chain_constants<T: Real>(mset: &MomentSet<T>, omega: T) -> XxzConstants<T> {
    let two = T::lit(2.0);
    let d = mset.c0 - mset.c1;
    XxzConstants {
        j: omega * mset.cx * mset.cx,
        jz: -omega * d * d / two,
        gamma: (mset.delta_e + omega * (mset.c0 * mset.c0 - mset.c1 * mset.c1)) / two,
    }
}

/// Field at which a single flipped spin on a ring of polarised spins
/// becomes degenerate with the polarised state, `γ_c = 2(|J| + J_z)`.
pub fn one_magnon_saturation<T: Real>(j: T, jz: T) -> T {
    T::lit(2.0) * (j.abs() + jz)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec<T> {
    pub n: usize,
    pub boundary: Boundary,
    pub j: T,
    pub jz: T,
    pub gamma: T,
    pub range: Range,
}

impl<T: Real> ChainSpec<T> {
    pub fn new(n: usize, boundary: Boundary, constants: XxzConstants<T>) -> Result<Self> {
        let spec = Self {
            n,
            boundary,
            j: constants.j,
            jz: constants.jz,
            gamma: constants.gamma,
            range: Range::NearestNeighbour,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_range(mut self, range: Range) -> Self {
        self.range = range;
        self
    }

    pub fn constants(&self) -> XxzConstants<T> {
        XxzConstants { j: self.j, jz: self.jz, gamma: self.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_SITES..=MAX_SITES).contains(&self.n) {
            return invalid(format!("chain length must be in {MIN_SITES}..={MAX_SITES}, got {}", self.n));
        }
        if self.boundary == Boundary::Periodic && self.n < 3 {
            return invalid("a periodic chain needs at least 3 sites");
        }
        if !(self.j.is_finite() && self.jz.is_finite() && self.gamma.is_finite()) {
            return invalid(format!("non-finite chain constants J={} Jz={} γ={}", self.j, self.jz, self.gamma));
        }
        Ok(())
    }

    pub fn hilbert_dim(&self) -> usize {
        1 << self.n
    }

    /// Nearest-neighbour pairs of the geometry, independent of [`Range`].
    pub fn neighbour_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = (0..self.n - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            pairs.push((self.n - 1, 0));
        }
        pairs
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Bond<T> {
    a: usize,
    b: usize,
    weight: T,
}

/// Matrix-free chain Hamiltonian.
#[derive(Clone, Debug)]
pub struct ChainHamiltonian<T> {
    spec: ChainSpec<T>,
    bonds: Vec<Bond<T>>,
}

pub fn build_chain_hamiltonian<T: Real>(spec: &ChainSpec<T>) -> Result<ChainHamiltonian<T>> {
    spec.validate()?;
    let n = spec.n;
    let bonds = match spec.range {
        Range::NearestNeighbour => {
            spec.neighbour_pairs().into_iter().map(|(a, b)| Bond { a, b, weight: T::one() }).collect()
        }
        Range::Dipolar => {
            let mut out = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let mut d = b - a;
                    if spec.boundary == Boundary::Periodic {
                        d = d.min(n - d);
                    }
                    let d = T::from_usize_lossy(d);
                    out.push(Bond { a, b, weight: T::one() / (d * d * d) });
                }
            }
            out
        }
    };
    Ok(ChainHamiltonian { spec: *spec, bonds })
}

#[inline]
fn spin(state: u32, site: usize) -> i32 {
    if state >> site & 1 == 1 {
        1
    } else {
        -1
    }
}

/// Total `σᶻ` of a bitstring.
pub fn total_sz(state: u32, n: usize) -> i32 {
    2 * state.count_ones() as i32 - n as i32
}

impl<T: Real> ChainHamiltonian<T> {
    pub fn spec(&self) -> &ChainSpec<T> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.hilbert_dim()
    }

    /// Diagonal of the coupling part (`J_z` terms only, no field).
    fn coupling_diagonal(&self, state: u32) -> T {
        self.bonds.iter().fold(T::zero(), |acc, b| {
            acc + b.weight * self.spec.jz * T::from_i32(spin(state, b.a) * spin(state, b.b)).unwrap()
        })
    }

    /// Full diagonal element including the field.
    pub fn diagonal(&self, state: u32) -> T {
        self.coupling_diagonal(state) - self.spec.gamma * T::from_i32(total_sz(state, self.spec.n)).unwrap()
    }

    /// Off-diagonal images `(state', amplitude)` of `state`: anti-aligned bonds flip-flop with amplitude `2J`.
    pub fn flip_flops(&self, state: u32) -> impl Iterator<Item = (u32, T)> + '_ {
        let two_j = T::lit(2.0) * self.spec.j;
        self.bonds.iter().filter_map(move |b| {
            let mask = (1u32 << b.a) | (1u32 << b.b);
            let pair = state & mask;
            (pair != 0 && pair != mask).then(|| (state ^ mask, b.weight * two_j))
        })
    }

    /// `out = H v` on the full `2ⁿ` space.
    pub fn apply(&self, v: &[T], out: &mut [T]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        for (s, o) in out.iter_mut().enumerate() {
            let s32 = s as u32;
            let mut acc = self.diagonal(s32) * v[s];
            for (t, amp) in self.flip_flops(s32) {
                acc = acc + amp * v[t as usize];
            }
            *o = acc;
        }
    }

    /// Dense `2ⁿ × 2ⁿ` matrix; intended for small chains and tests.
    pub fn to_dense(&self) -> Result<Matrix<T>> {
        if self.spec.n > 12 {
            return invalid(format!("dense chain matrix refused for n = {} > 12", self.spec.n));
        }
        let dim = self.dim();
        let mut m = Matrix::zeros(dim, dim);
        for s in 0..dim as u32 {
            m[(s as usize, s as usize)] = self.diagonal(s);
            for (t, amp) in self.flip_flops(s) {
                m[(t as usize, s as usize)] = m[(t as usize, s as usize)] + amp;
            }
        }
        Ok(m)
    }

    /// Gershgorin bound on the coupling part.
    pub fn coupling_scale(&self) -> T {
        let two = T::lit(2.0);
        self.bonds.iter().fold(T::zero(), |acc, b| acc + b.weight * (self.spec.jz.abs() + two * self.spec.j.abs()))
    }

    /// Block with `ups` sites at `σᶻ = +1`.
    pub fn sector(&self, ups: usize) -> Sector<'_, T> {
        let n = self.spec.n;
        let states: Vec<u32> = (0..1u32 << n).filter(|s| s.count_ones() as usize == ups).collect();
        Sector { h: self, ups, states }
    }
}

/// A fixed-magnetisation block of the chain Hamiltonian.
pub struct Sector<'a, T> {
    h: &'a ChainHamiltonian<T>,
    ups: usize,
    states: Vec<u32>,
}

impl<T: Real> Sector<'_, T> {
    pub fn total_sz(&self) -> i32 {
        2 * self.ups as i32 - self.h.spec.n as i32
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Constant field contribution `−γ·M` shared by every state in the block.
    pub fn field_energy(&self) -> T {
        -self.h.spec.gamma * T::from_i32(self.total_sz()).unwrap()
    }

    fn index(&self, state: u32) -> usize {
        self.states.binary_search(&state).expect("flip-flop leaves the sector")
    }

    /// `out = (H − field_energy) v` within the block.
    pub fn apply_coupling(&self, v: &[T], out: &mut [T]) {
        for (i, (&s, o)) in self.states.iter().zip(out.iter_mut()).enumerate() {
            let mut acc = self.h.coupling_diagonal(s) * v[i];
            for (t, amp) in self.h.flip_flops(s) {
                acc = acc + amp * v[self.index(t)];
            }
            *o = acc;
        }
    }

    pub fn coupling_dense(&self) -> Matrix<T> {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for (i, &s) in self.states.iter().enumerate() {
            m[(i, i)] = self.h.coupling_diagonal(s);
            for (t, amp) in self.h.flip_flops(s) {
                let k = self.index(t);
                m[(k, i)] = m[(k, i)] + amp;
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Dense for blocks up to [`AUTO_DENSE_LIMIT`] states, Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

pub const AUTO_DENSE_LIMIT: usize = 64;

/// Lowest one or two levels of one sector, field included.
#[derive(Clone, Debug)]
pub struct SectorLevels<T> {
    pub total_sz: i32,
    pub energies: Vec<T>,
    pub ground_vector: Vec<T>,
}

pub fn sector_levels<T: Real>(
    h: &ChainHamiltonian<T>,
    ups: usize,
    count: usize,
    solver: Solver,
) -> Result<SectorLevels<T>> {
    let sector = h.sector(ups);
    let dim = sector.dim();
    let count = count.min(dim);
    let use_dense = match solver {
        Solver::Dense => true,
        Solver::Lanczos => false,
        Solver::Auto => dim <= AUTO_DENSE_LIMIT,
    };
    let shift = sector.field_energy();
    let (energies, ground_vector) = if use_dense {
        let eig = symmetric_eigen(&sector.coupling_dense())?;
        (eig.values[..count].iter().map(|&e| e + shift).collect(), eig.vectors.column(0))
    } else {
        let opts = LanczosOptions::default();
        let pairs = lowest_eigenpairs(|v, out| sector.apply_coupling(v, out), dim, count, h.coupling_scale(), &opts)
            .map_err(|e| match e {
                Error::NoConvergence { context } => {
                    Error::NoConvergence { context: format!("sector total σᶻ = {}: {context}", sector.total_sz()) }
                }
                other => other,
            })?;
        let vector = pairs[0].vector.clone();
        (pairs.into_iter().map(|p| p.value + shift).collect(), vector)
    };
    Ok(SectorLevels { total_sz: sector.total_sz(), energies, ground_vector })
}

/// Ground-state observables of a chain.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ChainResult<T> {
    pub ground_energy: T,
    /// Total `σᶻ` of the selected ground state.
    pub total_sz: i32,
    pub magnetization_per_site: T,
    /// `⟨σᶻᵢσᶻᵢ₊₁⟩` averaged over neighbour pairs.
    pub nn_zz_correlation: T,
    /// `⟨(Σᵢ (−1)ⁱ σᶻᵢ)²⟩ / n²`; 1 for a Néel state.
    pub staggered_zz_correlation: T,
    /// `E₁ − E₀` of the full spectrum.
    pub gap: T,
    /// Lowest level in a neighbouring magnetisation sector minus `E₀`.
    pub spin_gap: T,
    /// Weight of the saturated bitstring with the sign of the magnetisation.
    pub ground_overlap_polarized: T,
    /// Total `σᶻ` of another sector degenerate with the ground state, if any.
    pub degenerate_partner: Option<i32>,
    /// `(total σᶻ, lowest energy)` for every sector, ascending in `σᶻ`.
    pub sector_ground_energies: Vec<(i32, T)>,
    /// Spin gap extrapolated linearly in `1/n`, filled by [`analyze_chain`].
    pub spin_gap_extrapolated: Option<T>,
}

fn tie_tolerance<T: Real>(h: &ChainHamiltonian<T>) -> T {
    let scale = h.coupling_scale() + h.spec.gamma.abs() * T::from_usize_lossy(h.spec.n);
    T::lit(1e3) * T::epsilon() * scale.max(T::min_positive_value())
}

/// Global ground state over all magnetisation sectors. Degenerate sector
/// ground states are resolved toward positive magnetisation.
pub fn ground_state<T: Real>(spec: &ChainSpec<T>) -> Result<ChainResult<T>> {
    ground_state_with(spec, Solver::Auto)
}

pub fn ground_state_with<T: Real>(spec: &ChainSpec<T>, solver: Solver) -> Result<ChainResult<T>> {
    let h = build_chain_hamiltonian(spec)?;
    let n = spec.n;
    let levels: Vec<SectorLevels<T>> = (0..=n).map(|ups| sector_levels(&h, ups, 2, solver)).collect::<Result<_>>()?;
    let tol = tie_tolerance(&h);

    let e_min = levels.iter().map(|l| l.energies[0]).fold(T::infinity(), T::min);
    // highest magnetisation among the (near-)degenerate minima
    let g = (0..=n).rev().find(|&k| levels[k].energies[0] - e_min <= tol).expect("some sector attains the minimum");
    let e0 = levels[g].energies[0];
    let partner = (0..=n).rev().find(|&k| k != g && levels[k].energies[0] - e0 <= tol).map(|k| levels[k].total_sz);

    let mut others: Vec<T> = Vec::new();
    for (k, l) in levels.iter().enumerate() {
        let skip = usize::from(k == g);
        others.extend(l.energies.iter().skip(skip).copied());
    }
    let e1 = others.iter().copied().fold(T::infinity(), T::min);
    let gap = if e1.is_finite() { (e1 - e0).max(T::zero()) } else { T::zero() };

    let mut spin_gap = T::infinity();
    if g > 0 {
        spin_gap = spin_gap.min(levels[g - 1].energies[0] - e0);
    }
    if g < n {
        spin_gap = spin_gap.min(levels[g + 1].energies[0] - e0);
    }
    let spin_gap = spin_gap.max(T::zero());

    let sector = h.sector(g);
    let psi = &levels[g].ground_vector;
    let nf = T::from_usize_lossy(n);
    let pairs = spec.neighbour_pairs();
    let mut nn = T::zero();
    let mut stag = T::zero();
    let mut overlap = T::zero();
    let saturated = if levels[g].total_sz >= 0 { (1u32 << n) - 1 } else { 0 };
    for (&s, &a) in sector.states().iter().zip(psi) {
        let w = a * a;
        let zz: i32 = pairs.iter().map(|&(p, q)| spin(s, p) * spin(s, q)).sum();
        nn = nn + w * T::from_i32(zz).unwrap();
        let st: i32 = (0..n).map(|i| if i % 2 == 0 { spin(s, i) } else { -spin(s, i) }).sum();
        stag = stag + w * T::from_i32(st * st).unwrap();
        if s == saturated {
            overlap = overlap + w;
        }
    }

    Ok(ChainResult {
        ground_energy: e0,
        total_sz: levels[g].total_sz,
        magnetization_per_site: T::from_i32(levels[g].total_sz).unwrap() / nf,
        nn_zz_correlation: nn / T::from_usize_lossy(pairs.len()),
        staggered_zz_correlation: stag / (nf * nf),
        gap,
        spin_gap,
        ground_overlap_polarized: overlap.min(T::one()),
        degenerate_partner: partner,
        sector_ground_energies: levels.iter().map(|l| (l.total_sz, l.energies[0])).collect(),
        spin_gap_extrapolated: None,
    })
}

/// Smallest field `γ` at which the saturated state is a ground state, from
/// the zero-field sector energies: `E_M(γ) = E_M(0) − γM`.
pub fn saturation_onset<T: Real>(spec: &ChainSpec<T>) -> Result<T> {
    let zero_field = ChainSpec { gamma: T::zero(), ..*spec };
    let h = build_chain_hamiltonian(&zero_field)?;
    let n = spec.n;
    let e: Vec<T> =
        (0..=n).map(|k| sector_levels(&h, k, 1, Solver::Auto).map(|l| l.energies[0])).collect::<Result<_>>()?;
    let mut onset = T::neg_infinity();
    for k in 0..n {
        onset = onset.max((e[n] - e[k]) / (T::lit(2.0) * T::from_usize_lossy(n - k)));
    }
    Ok(onset)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    Ferromagnetic,
    LuttingerLiquid,
    Antiferromagnetic,
}

impl PhaseLabel {
    pub fn name(self) -> &'static str {
        match self {
            PhaseLabel::Ferromagnetic => "ferromagnetic",
            PhaseLabel::LuttingerLiquid => "luttinger_liquid",
            PhaseLabel::Antiferromagnetic => "antiferromagnetic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PhaseThresholds<T> {
    /// `|m| ≥` this counts as ferromagnetic (default 0.99).
    pub ferro_magnetization: T,
    /// Staggered correlation above which antiferromagnetic order is
    /// considered (default 0.5).
    pub afm_staggered: T,
    /// Minimum extrapolated spin gap in units of `|J|` (default 0.1).
    pub afm_spin_gap: T,
}

impl<T: Real> Default for PhaseThresholds<T> {
    fn default() -> Self {
        Self { ferro_magnetization: T::lit(0.99), afm_staggered: T::lit(0.5), afm_spin_gap: T::lit(0.1) }
    }
}

/// Deterministic phase label from ground-state observables. The spin gap
/// used is the extrapolated one when present.
pub fn classify_phase<T: Real>(
    result: &ChainResult<T>,
    constants: &XxzConstants<T>,
    thresholds: &PhaseThresholds<T>,
) -> PhaseLabel {
    if result.magnetization_per_site.abs() >= thresholds.ferro_magnetization {
        return PhaseLabel::Ferromagnetic;
    }
    let scale = constants.scale();
    let gap = result.spin_gap_extrapolated.unwrap_or(result.spin_gap);
    if result.staggered_zz_correlation >= thresholds.afm_staggered
        && scale > T::zero()
        && gap / scale >= thresholds.afm_spin_gap
    {
        PhaseLabel::Antiferromagnetic
    } else {
        PhaseLabel::LuttingerLiquid
    }
}

/// Linear extrapolation of the spin gap in `1/n` over `n, n−2, n−4`.
pub fn extrapolate_spin_gap<T: Real>(spec: &ChainSpec<T>) -> Result<T> {
    let sizes: Vec<usize> =
        [spec.n, spec.n.saturating_sub(2), spec.n.saturating_sub(4)].into_iter().filter(|&m| m >= 4).collect();
    if sizes.len() < 2 {
        return invalid(format!("spin-gap extrapolation needs n ≥ 6, got {}", spec.n));
    }
    let mut inv = Vec::new();
    let mut gaps = Vec::new();
    for &m in &sizes {
        let r = ground_state(&ChainSpec { n: m, ..*spec })?;
        inv.push(T::one() / T::from_usize_lossy(m));
        gaps.push(r.spin_gap);
    }
    let a = Matrix::from_fn(sizes.len(), 2, |i, c| if c == 0 { T::one() } else { inv[i] });
    let coef = least_squares(&a, &gaps)?;
    Ok(coef[0])
}

/// Ground state plus label. The finite-size extrapolation is only run when
/// the state is a candidate for antiferromagnetic order.
pub fn analyze_chain<T: Real>(
    spec: &ChainSpec<T>,
    thresholds: &PhaseThresholds<T>,
) -> Result<(ChainResult<T>, PhaseLabel)> {
    let mut result = ground_state(spec)?;
    let constants = spec.constants();
    if result.magnetization_per_site.abs() < thresholds.ferro_magnetization
        && result.staggered_zz_correlation >= thresholds.afm_staggered
        && spec.n >= 6
    {
        result.spin_gap_extrapolated = Some(extrapolate_spin_gap(spec)?);
    }
    let label = classify_phase(&result, &constants, thresholds);
    Ok((result, label))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseScanOptions<T> {
    pub n: usize,
    pub boundary: Boundary,
    pub thresholds: PhaseThresholds<T>,
    pub j_max: u32,
}

impl<T: Real> Default for PhaseScanOptions<T> {
    fn default() -> Self {
        Self {
            n: DEFAULT_SCAN_SITES,
            boundary: Boundary::Open,
            thresholds: PhaseThresholds::default(),
            j_max: crate::rotor_basis::DEFAULT_J_MAX,
        }
    }
}

/// One point of the molecular phase diagram.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PhaseRow<T> {
    pub x: T,
    pub omega_over_b: T,
    pub constants: XxzConstants<T>,
    pub jz_over_j: T,
    pub gamma_over_j: T,
    pub magnetization_per_site: T,
    pub phase: PhaseLabel,
}

/// Phase labels over `x_grid × omega_grid`, rows ordered by `x` then `Ω/B`.
pub fn phase_diagram<T: Real>(x_grid: &[T], omega_grid: &[T], opts: &PhaseScanOptions<T>) -> Result<Vec<PhaseRow<T>>> {
    validate_scan_grid(x_grid)?;
    validate_scan_grid(omega_grid)?;
    if x_grid[0] <= T::zero() {
        return invalid("phase diagram needs x > 0 (the transverse coupling vanishes at zero field)");
    }
    if omega_grid[0] <= T::zero() {
        return invalid("phase diagram needs Ω/B > 0");
    }
    if opts.n > 12 {
        return invalid(format!("phase scans are limited to n ≤ 12, got {}", opts.n));
    }
    let msets = moment_scan(x_grid, opts.j_max)?;
    let points: Vec<(usize, T)> = (0..msets.len()).flat_map(|i| omega_grid.iter().map(move |&w| (i, w))).collect();
    points
        .par_iter()
        .map(|&(i, omega)| {
            let mset = &msets[i];
            let c = chain_constants(mset, omega);
            let spec = ChainSpec::new(opts.n, opts.boundary, c)?;
            let (r, phase) = analyze_chain(&spec, &opts.thresholds)?;
            Ok(PhaseRow {
                x: mset.x,
                omega_over_b: omega,
                constants: c,
                jz_over_j: c.jz / c.j,
                gamma_over_j: c.gamma / c.j,
                magnetization_per_site: r.magnetization_per_site,
                phase,
            })
        })
        .collect()
}
