use std::fmt;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pendular::dipole_pair::{coupling_contour, gamma_parts, heisenberg_constants, CouplingGeometry};
use pendular::model_fit::{fit_report, FitQuantity, FittedCurve};
use pendular::pendular_moments::{
    coefficient_map, moment_scan, moments as moments_at, stark_map as stark_rows, PseudoSpin,
};
use pendular::rotor_basis::DEFAULT_J_MAX;
use pendular::units::{self, MoleculePreset, PresetRegistry};
use pendular::xxz_chain::{
    analyze_chain, chain_constants, phase_diagram as phase_rows, Boundary, ChainSpec, PhaseScanOptions,
    PhaseThresholds, XxzConstants, DEFAULT_SCAN_SITES,
};

use crate::grid_arg::GridArg;
use crate::output::{emit, Document};
use crate::GlobalArgs;

/// Invalid combination of otherwise well-formed flags.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {s}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {s}"))
    }
}

fn registry(g: &GlobalArgs) -> Result<PresetRegistry> {
    Ok(match &g.presets {
        Some(p) => PresetRegistry::from_path(p)?,
        None => PresetRegistry::builtin(),
    })
}

fn molecule(g: &GlobalArgs) -> Result<Option<MoleculePreset>> {
    match &g.molecule {
        Some(name) => Ok(Some(registry(g)?.get(name)?.clone())),
        None => Ok(None),
    }
}

fn units_block(p: &MoleculePreset) -> Value {
    let (_, b_mhz) = units::energy_in_lab_units(p, 1.0);
    json!({
        "molecule": p.name,
        "mu_debye": p.mu_debye,
        "b_cm1": p.b_cm1,
        "b_mhz": b_mhz,
        "kv_per_cm_per_unit_x": units::epsilon_for_x(p, 1.0),
        "nm_at_unit_omega": units::r_for_omega(p, 1.0).ok(),
    })
}

fn finish(g: &GlobalArgs, mut doc: Document) -> Result<()> {
    let extra = doc.units.take();
    if let Some(p) = molecule(g)? {
        let mut block = units_block(&p);
        if let (Value::Object(map), Some(Value::Object(e))) = (&mut block, extra) {
            map.extend(e);
        }
        doc.units = Some(block);
    }
    emit(&doc, g.format, g.out.as_deref())
}

fn params(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("arguments serialise")
}

#[derive(Args, Debug, Serialize)]
pub struct StarkMapArgs {
    #[arg(long, default_value_t = 12.0, value_parser = non_negative)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    pub x_step: f64,
    /// m values, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1], allow_negative_numbers = true)]
    pub m: Vec<i32>,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub n_states: u32,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn stark_map(g: &GlobalArgs, a: &StarkMapArgs) -> Result<()> {
    let grid = pendular::grid::uniform(0.0, a.x_max, a.x_step)?;
    let rows = stark_rows(&grid, &a.m, a.n_states as usize, a.j_max)?;
    let gaps = moment_scan(&grid, a.j_max)?;
    let mut doc = Document::new("stark-map", params(a), vec!["x", "m", "label", "energy", "delta_e"]);
    let mut gi = 0;
    for r in rows {
        while gaps[gi].x != r.x {
            gi += 1;
        }
        doc.push(vec![
            r.x.into(),
            i64::from(r.m).into(),
            i64::from(r.label).into(),
            r.energy.into(),
            gaps[gi].delta_e.into(),
        ]);
    }
    finish(g, doc)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateArg {
    Down,
    Up,
}

#[derive(Args, Debug, Serialize)]
pub struct CoefficientsArgs {
    #[arg(long, value_enum, default_value_t = StateArg::Down)]
    pub state: StateArg,
    #[arg(long, default_value_t = 12.0, value_parser = non_negative)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    pub x_step: f64,
    /// Highest J reported.
    #[arg(long, default_value_t = 6)]
    pub j_report: u32,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn coefficients(g: &GlobalArgs, a: &CoefficientsArgs) -> Result<()> {
    let grid = pendular::grid::uniform(0.0, a.x_max, a.x_step)?;
    let state = match a.state {
        StateArg::Down => PseudoSpin::Down,
        StateArg::Up => PseudoSpin::Up,
    };
    let mut doc = Document::new("coefficients", params(a), vec!["x", "j", "m", "coefficient"]);
    for r in coefficient_map(&grid, state, a.j_max)?.into_iter().filter(|r| r.j <= a.j_report) {
        doc.push(vec![r.x.into(), i64::from(r.j).into(), i64::from(state.m()).into(), r.coefficient.into()]);
    }
    finish(g, doc)
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long, default_value = "0:12:0.1")]
    pub x_grid: GridArg,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn moments(g: &GlobalArgs, a: &MomentsArgs) -> Result<()> {
    let grid = a.x_grid.values()?;
    let mut doc = Document::new("moments", params(a), vec!["x", "e0", "e1", "delta_e", "c0", "c1", "cx"]);
    for m in moment_scan(&grid, a.j_max)? {
        doc.push(vec![m.x.into(), m.e0.into(), m.e1.into(), m.delta_e.into(), m.c0.into(), m.c1.into(), m.cx.into()]);
    }
    finish(g, doc)
}

#[derive(Args, Debug, Serialize)]
pub struct CouplingsArgs {
    #[arg(long, value_parser = non_negative)]
    pub x: f64,
    /// Ω/B; 1 gives constants per unit Ω.
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    pub omega: f64,
    /// Angle between the molecule axis and the field, degrees.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn couplings(g: &GlobalArgs, a: &CouplingsArgs) -> Result<()> {
    let m = moments_at(a.x, a.j_max)?;
    let geom = CouplingGeometry::new(a.omega, a.alpha.to_radians())?;
    let h = heisenberg_constants(&m, &geom);
    let parts = gamma_parts(&m, &geom);
    let mut doc = Document::new(
        "couplings",
        params(a),
        vec![
            "x",
            "omega_over_b",
            "alpha_deg",
            "jx",
            "jy",
            "jz",
            "gamma",
            "gamma_gap",
            "gamma_dipolar",
            "shift",
            "jz_over_j",
        ],
    );
    // j is the α-independent transverse constant jy
    let ratio = if h.jy != 0.0 { Some(h.jz / h.jy) } else { None };
    doc.push(vec![
        a.x.into(),
        a.omega.into(),
        a.alpha.into(),
        h.jx.into(),
        h.jy.into(),
        h.jz.into(),
        h.gamma.into(),
        parts.gap.into(),
        parts.dipolar.into(),
        h.shift.into(),
        ratio.into(),
    ]);
    if let Some(p) = molecule(g)? {
        doc.units = Some(json!({
            "epsilon_kv_cm": units::epsilon_for_x(&p, a.x),
            "r_nm": units::r_for_omega(&p, a.omega).ok(),
        }));
    }
    finish(g, doc)
}

#[derive(Args, Debug, Serialize)]
pub struct ContourArgs {
    #[arg(long, default_value = "0:12:0.25")]
    pub x_grid: GridArg,
    /// Degrees.
    #[arg(long, default_value = "0:90:2.5")]
    pub alpha_grid: GridArg,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn contour(g: &GlobalArgs, a: &ContourArgs) -> Result<()> {
    let xs = a.x_grid.values()?;
    let alphas: Vec<f64> = a.alpha_grid.values()?.into_iter().map(f64::to_radians).collect();
    let mut doc = Document::new(
        "contour",
        params(a),
        vec!["x", "alpha_deg", "jx_over_omega", "jy_over_omega", "jz_over_omega", "gamma_dipolar_over_omega"],
    );
    for r in coupling_contour(&xs, &alphas, a.j_max)? {
        doc.push(vec![
            r.x.into(),
            r.alpha.to_degrees().into(),
            r.jx.into(),
            r.jy.into(),
            r.jz.into(),
            r.gamma_dipolar.into(),
        ]);
    }
    finish(g, doc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantityArg {
    Gap,
    C0,
    C1,
    Cx,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    #[arg(long, value_enum, default_value_t = QuantityArg::All)]
    pub quantity: QuantityArg,
    #[arg(long, default_value_t = 12.0, value_parser = positive)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.01, value_parser = positive)]
    pub x_step: f64,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn fit(g: &GlobalArgs, a: &FitArgs) -> Result<()> {
    let quantities: Vec<FitQuantity> = match a.quantity {
        QuantityArg::All => FitQuantity::ALL.to_vec(),
        QuantityArg::Gap => vec![FitQuantity::Gap],
        QuantityArg::C0 => vec![FitQuantity::C0],
        QuantityArg::C1 => vec![FitQuantity::C1],
        QuantityArg::Cx => vec![FitQuantity::Cx],
    };
    let grid = pendular::grid::uniform(0.0, a.x_max, a.x_step)?;
    let data = moment_scan(&grid, a.j_max)?;
    let mut doc =
        Document::new("fit", params(a), vec!["quantity", "x", "computed", "published", "published_literal", "refit"]);
    let mut summary = serde_json::Map::new();
    for q in quantities {
        let report = fit_report(q, &data)?;
        for r in &report.rows {
            doc.push(vec![
                q.name().into(),
                r.x.into(),
                r.computed.into(),
                r.published.into(),
                r.published_literal.into(),
                r.refit.into(),
            ]);
        }
        let curve = match report.refit {
            FittedCurve::Poly(p) => json!({ "kind": "polynomial", "coefficients": p.coefficients }),
            FittedCurve::Sigmoid(s) => json!({
                "kind": "double_sigmoid",
                "converged": s.converged,
                "iterations": s.iterations,
                "a0": s.params.a0, "a1": s.params.a1, "a2": s.params.a2,
                "x1": s.params.x1, "x2": s.params.x2, "k1": s.params.k1, "k2": s.params.k2,
            }),
        };
        summary.insert(
            q.name().to_owned(),
            json!({
                "r_squared": report.refit.r_squared(),
                "max_dev_refit": report.max_dev_refit,
                "max_dev_published": report.max_dev_published,
                "max_dev_published_literal": report.max_dev_published_literal,
                "refit": curve,
            }),
        );
    }
    doc.summary = Some(Value::Object(summary));
    finish(g, doc)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    /// |m| at or above which a state counts as ferromagnetic.
    #[arg(long, default_value_t = 0.99)]
    pub ferro_threshold: f64,
    /// Staggered correlation required for antiferromagnetic order.
    #[arg(long, default_value_t = 0.5)]
    pub afm_staggered: f64,
    /// Extrapolated spin gap (units of |J|) required for antiferromagnetic order.
    #[arg(long, default_value_t = 0.1)]
    pub afm_gap: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> PhaseThresholds<f64> {
        PhaseThresholds {
            ferro_magnetization: self.ferro_threshold,
            afm_staggered: self.afm_staggered,
            afm_spin_gap: self.afm_gap,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ChainEdArgs {
    #[arg(long, default_value_t = DEFAULT_SCAN_SITES)]
    pub n: usize,
    /// Reduced field; with --omega sets the constants from molecular moments.
    #[arg(long, value_parser = non_negative, requires = "omega", conflicts_with = "constants")]
    pub x: Option<f64>,
    #[arg(long, value_parser = non_negative, requires = "x")]
    pub omega: Option<f64>,
    /// Explicit `J,Jz,γ` in units of B.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub constants: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn chain_ed(g: &GlobalArgs, a: &ChainEdArgs) -> Result<()> {
    let c = match (&a.x, &a.omega, &a.constants) {
        (Some(x), Some(omega), None) => chain_constants(&moments_at(*x, a.j_max)?, *omega),
        (None, None, Some(c)) if c.len() == 3 => XxzConstants { j: c[0], jz: c[1], gamma: c[2] },
        _ => return usage("give either --x with --omega, or --constants J,Jz,gamma"),
    };
    let spec = ChainSpec::new(a.n, a.boundary.into(), c)?;
    let (r, phase) = analyze_chain(&spec, &a.thresholds.thresholds())?;
    let mut doc = Document::new(
        "chain-ed",
        params(a),
        vec![
            "n",
            "boundary",
            "j",
            "jz",
            "gamma",
            "ground_energy",
            "magnetization_per_site",
            "nn_zz_correlation",
            "staggered_zz_correlation",
            "gap",
            "spin_gap",
            "ground_overlap_polarized",
            "phase",
        ],
    );
    doc.push(vec![
        (a.n as i64).into(),
        spec.boundary.name().into(),
        c.j.into(),
        c.jz.into(),
        c.gamma.into(),
        r.ground_energy.into(),
        r.magnetization_per_site.into(),
        r.nn_zz_correlation.into(),
        r.staggered_zz_correlation.into(),
        r.gap.into(),
        r.spin_gap.into(),
        r.ground_overlap_polarized.into(),
        phase.name().into(),
    ]);
    doc.summary = Some(json!({
        "sector_ground_energies": r.sector_ground_energies,
        "degenerate_partner_total_sz": r.degenerate_partner,
        "spin_gap_extrapolated": r.spin_gap_extrapolated,
    }));
    finish(g, doc)
}

#[derive(Args, Debug, Serialize)]
pub struct PhaseDiagramArgs {
    #[arg(long, default_value = "1:12:1")]
    pub x_grid: GridArg,
    #[arg(long, default_value = "1e-6:1e-4:log5")]
    pub omega_grid: GridArg,
    #[arg(long, default_value_t = DEFAULT_SCAN_SITES)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn phase_diagram(g: &GlobalArgs, a: &PhaseDiagramArgs) -> Result<()> {
    let xs = a.x_grid.values()?;
    let omegas = a.omega_grid.values()?;
    let opts =
        PhaseScanOptions { n: a.n, boundary: a.boundary.into(), thresholds: a.thresholds.thresholds(), j_max: a.j_max };
    let mut doc =
        Document::new("phase-diagram", params(a), vec!["x", "omega_over_b", "jz_over_j", "gamma_over_j", "phase"]);
    for r in phase_rows(&xs, &omegas, &opts)? {
        doc.push(vec![
            r.x.into(),
            r.omega_over_b.into(),
            r.jz_over_j.into(),
            r.gamma_over_j.into(),
            r.phase.name().into(),
        ]);
    }
    finish(g, doc)
}

#[derive(Args, Debug, Serialize)]
pub struct ConvertArgs {
    /// Field strength, kV/cm.
    #[arg(long, value_parser = non_negative, conflicts_with = "x")]
    pub epsilon: Option<f64>,
    /// Reduced field x = με/B.
    #[arg(long, value_parser = non_negative)]
    pub x: Option<f64>,
    /// Intermolecular distance, nm.
    #[arg(long, value_parser = positive, conflicts_with = "omega")]
    pub r: Option<f64>,
    /// Ω/B.
    #[arg(long, value_parser = positive)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    pub j_max: u32,
}

pub fn convert(g: &GlobalArgs, a: &ConvertArgs) -> Result<()> {
    let Some(p) = molecule(g)? else {
        return usage("convert needs --molecule");
    };
    if a.epsilon.is_none() && a.x.is_none() && a.r.is_none() && a.omega.is_none() {
        return usage("convert needs at least one of --epsilon, --x, --r, --omega");
    }
    let x = a.x.or(a.epsilon.map(|e| units::reduced_field(&p, e)));
    let epsilon = a.epsilon.or(a.x.map(|x| units::epsilon_for_x(&p, x)));
    let omega = match (a.omega, a.r) {
        (Some(w), _) => Some(w),
        (None, Some(r)) => Some(units::omega_over_b(&p, r)?),
        _ => None,
    };
    let r = match (a.r, omega) {
        (Some(r), _) => Some(r),
        (None, Some(w)) => Some(units::r_for_omega(&p, w)?),
        _ => None,
    };
    let gap_mhz = match x {
        Some(x) => Some(units::energy_in_lab_units(&p, moments_at(x, a.j_max)?.delta_e).1),
        None => None,
    };
    let mut doc = Document::new(
        "convert",
        params(a),
        vec!["molecule", "mu_debye", "b_cm1", "epsilon_kv_cm", "x", "r_nm", "omega_over_b", "delta_e_mhz"],
    );
    doc.push(vec![
        p.name.as_str().into(),
        p.mu_debye.into(),
        p.b_cm1.into(),
        epsilon.into(),
        x.into(),
        r.into(),
        omega.into(),
        gap_mhz.into(),
    ]);
    finish(g, doc)
}

pub fn presets(g: &GlobalArgs) -> Result<()> {
    let reg = registry(g)?;
    let mut doc = Document::new("presets", json!({}), vec!["name", "mu_debye", "b_cm1", "mu_over_b"]);
    for name in reg.list() {
        let p = reg.get(name)?;
        doc.push(vec![p.name.as_str().into(), p.mu_debye.into(), p.b_cm1.into(), (p.mu_debye / p.b_cm1).into()]);
    }
    emit(&doc, g.format, g.out.as_deref())
}
