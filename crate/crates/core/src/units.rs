//! Laboratory units ↔ reduced variables, and the molecule preset registry.
//!
//! Conversion constants are derived from SI definitions:
//!
//! * `1 D = 10⁻²¹ / c  C·m` (10⁻¹⁸ statC·cm)
//! * `1 kV/cm = 10⁵ V/m`
//! * `1 cm⁻¹ ≙ h c · 100 J`
//! * Gaussian `μ²/r³` corresponds to SI `μ² / (4π ε₀ r³)`
//!
//! giving `x = K_FIELD · μ[D] · ε[kV/cm] / B[cm⁻¹]` and
//! `Ω[cm⁻¹] = K_DIPOLAR · μ[D]² / r[nm]³`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Vacuum permittivity, F/m (CODATA 2018).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// One Debye in C·m.
pub const DEBYE: f64 = 1e-21 / SPEED_OF_LIGHT;
/// Energy of one cm⁻¹ in J.
pub const WAVENUMBER_ENERGY: f64 = PLANCK * SPEED_OF_LIGHT * 100.0;
/// One kV/cm in V/m.
pub const KV_PER_CM: f64 = 1e5;
/// One nm in m.
pub const NANOMETRE: f64 = 1e-9;

/// `μ ε` in cm⁻¹ for `μ = 1 D`, `ε = 1 kV/cm` (≈ 1.6793 × 10⁻²).
pub const K_FIELD: f64 = DEBYE * KV_PER_CM / WAVENUMBER_ENERGY;

/// `μ²/r³` in cm⁻¹ for `μ = 1 D`, `r = 1 nm` (≈ 5.034).
pub const K_DIPOLAR: f64 = DEBYE * DEBYE
    / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * NANOMETRE * NANOMETRE * NANOMETRE)
    / WAVENUMBER_ENERGY;

/// Energy of one cm⁻¹ in MHz.
pub const WAVENUMBER_MHZ: f64 = SPEED_OF_LIGHT * 100.0 / 1e6;

/// A molecule's dipole moment and rotational constant.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculePreset {
    pub name: String,
    /// Permanent dipole moment, Debye.
    pub mu_debye: f64,
    /// Rotational constant, cm⁻¹.
    pub b_cm1: f64,
}

impl MoleculePreset {
    pub fn new(name: impl Into<String>, mu_debye: f64, b_cm1: f64) -> Result<Self> {
        let p = Self { name: name.into(), mu_debye, b_cm1 };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::MalformedPresets("empty molecule name".into()));
        }
        if !(self.mu_debye > 0.0 && self.mu_debye.is_finite()) {
            return Err(Error::MalformedPresets(format!(
                "molecule `{}`: field `mu_debye` must be positive, got {}",
                self.name, self.mu_debye
            )));
        }
        if !(self.b_cm1 > 0.0 && self.b_cm1.is_finite()) {
            return Err(Error::MalformedPresets(format!(
                "molecule `{}`: field `b_cm1` must be positive, got {}",
                self.name, self.b_cm1
            )));
        }
        Ok(())
    }
}

/// Field strength, intermolecular distance and array orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabGeometry<T> {
    /// kV/cm.
    pub epsilon: T,
    /// nm.
    pub r: T,
    /// radians.
    pub alpha: T,
}

impl<T: Real> LabGeometry<T> {
    pub fn new(epsilon: T, r: T, alpha: T) -> Result<Self> {
        if !(epsilon >= T::zero()) {
            return invalid(format!("field strength must be non-negative, got {epsilon}"));
        }
        if !(r > T::zero()) {
            return invalid(format!("distance must be positive, got {r}"));
        }
        Ok(Self { epsilon, r, alpha })
    }
}

/// `x = μ ε / B` for a field in kV/cm.
pub fn reduced_field<T: Real>(p: &MoleculePreset, epsilon_kv_cm: T) -> T {
    T::lit(K_FIELD * p.mu_debye / p.b_cm1) * epsilon_kv_cm
}

/// Field in kV/cm that produces reduced field `x`.
pub fn epsilon_for_x<T: Real>(p: &MoleculePreset, x: T) -> T {
    x / T::lit(K_FIELD * p.mu_debye / p.b_cm1)
}

/// `Ω / B` at separation `r` (nm).
pub fn omega_over_b<T: Real>(p: &MoleculePreset, r_nm: T) -> Result<T> {
    if !(r_nm > T::zero()) {
        return invalid(format!("distance must be positive, got {r_nm}"));
    }
    Ok(T::lit(K_DIPOLAR * p.mu_debye * p.mu_debye / p.b_cm1) / (r_nm * r_nm * r_nm))
}

/// Separation (nm) at which `Ω / B` takes the given value.
pub fn r_for_omega<T: Real>(p: &MoleculePreset, omega_over_b: T) -> Result<T> {
    if !(omega_over_b > T::zero()) {
        return invalid(format!("Ω/B must be positive, got {omega_over_b}"));
    }
    Ok((T::lit(K_DIPOLAR * p.mu_debye * p.mu_debye / p.b_cm1) / omega_over_b).cbrt())
}

/// Reduced-unit energy (units of `B`) expressed in cm⁻¹ and MHz.
pub fn energy_in_lab_units(p: &MoleculePreset, reduced: f64) -> (f64, f64) {
    let cm1 = reduced * p.b_cm1;
    (cm1, cm1 * WAVENUMBER_MHZ)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetFile {
    #[serde(default)]
    molecule: Vec<MoleculePreset>,
}

/// Immutable name → preset map.
#[derive(Clone, Debug, Default)]
pub struct PresetRegistry {
    presets: BTreeMap<String, MoleculePreset>,
}

const BUILTIN_PRESETS: &str = include_str!("../data/presets.toml");

impl PresetRegistry {
    /// Presets shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN_PRESETS).expect("bundled presets are valid")
    }

    /// Parse `[[molecule]]` records with `name`, `mu_debye` and `b_cm1`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: PresetFile = toml::from_str(text).map_err(|e| Error::MalformedPresets(e.to_string()))?;
        let mut presets = BTreeMap::new();
        for (i, p) in file.molecule.into_iter().enumerate() {
            p.validate().map_err(|e| Error::MalformedPresets(format!("record {}: {e}", i + 1)))?;
            if presets.contains_key(&p.name) {
                return Err(Error::DuplicateMolecule(p.name));
            }
            presets.insert(p.name.clone(), p);
        }
        Ok(Self { presets })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::MalformedPresets(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::MalformedPresets(msg) => Error::MalformedPresets(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Names in alphabetical order.
    pub fn list(&self) -> Vec<&str> {
        self.presets.keys().map(String::as_str).collect()
    }

    /// Exact lookup, falling back to a case-insensitive match.
    pub fn get(&self, name: &str) -> Result<&MoleculePreset> {
        self.presets
            .get(name)
            .or_else(|| self.presets.values().find(|p| p.name.eq_ignore_ascii_case(name)))
            .ok_or_else(|| Error::UnknownMolecule { name: name.to_string(), available: self.list().join(", ") })
    }

    pub fn len(&self) -> usize {
        self.presets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.presets.is_empty()
    }
}
