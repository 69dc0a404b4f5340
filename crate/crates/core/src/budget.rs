//! Spontaneous-emission budget for running a cloner on trapped ions: gate
//! and run times, emission probabilities, the laser-intensity optimum and
//! the resulting limit on the number of copies.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cloner::CloneSpec;
use crate::error::{Error, Result};

pub const SPECIES_SCHEMA: &str = "uqcm.species/v1";
pub const SPECIES_DB_ENV: &str = "UQCM_SPECIES_DB";
pub const DEFAULT_THRESHOLD: f64 = 0.1;
const EMBEDDED_DB: &str = include_str!("../data/species.json");

/// Three-level ion: qubit levels 0 and 1, auxiliary level 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IonSpecies {
    pub name: String,
    pub level0: String,
    pub level1: String,
    pub level2: String,
    /// 0-1 transition angular frequency, 1/s.
    pub omega1_per_s: f64,
    /// 0-2 transition angular frequency, 1/s.
    pub omega2_per_s: f64,
    /// Decay rate of level 2, 1/s.
    pub gamma2_per_s: f64,
}

impl IonSpecies {
    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("omega1", self.omega1_per_s),
            ("omega2", self.omega2_per_s),
            ("gamma2", self.gamma2_per_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{}: {label} must be positive, got {v}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// `(omega1 / omega2)^(3/2)`.
    fn frequency_factor(&self) -> f64 {
        (self.omega1_per_s / self.omega2_per_s).powf(1.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesDb {
    pub schema: String,
    pub version: u32,
    pub species: Vec<IonSpecies>,
}

impl SpeciesDb {
    pub fn parse(text: &str) -> Result<Self> {
        let db: SpeciesDb = serde_json::from_str(text)?;
        if db.schema != SPECIES_SCHEMA {
            return Err(Error::InvalidParameter(format!(
                "unsupported species schema '{}'",
                db.schema
            )));
        }
        for s in &db.species {
            s.validate()?;
        }
        Ok(db)
    }

    /// The database shipped with the crate.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_DB).expect("embedded species database is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `path`, else the file named by `UQCM_SPECIES_DB`, else the embedded
    /// database.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::from_path(p),
            None => match std::env::var_os(SPECIES_DB_ENV) {
                Some(p) => Self::from_path(Path::new(&p)),
                None => Ok(Self::embedded()),
            },
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.species.iter().map(|s| s.name.as_str()).collect()
    }

    /// Case-insensitive lookup; a trailing `+` is optional.
    pub fn find(&self, name: &str) -> Result<&IonSpecies> {
        let key = |s: &str| s.trim().trim_end_matches('+').to_ascii_lowercase();
        self.species
            .iter()
            .find(|s| key(&s.name) == key(name))
            .ok_or_else(|| Error::UnknownSpecies {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    /// `"all"` selects every species; otherwise a comma-separated list.
    pub fn select(&self, names: &str) -> Result<Vec<IonSpecies>> {
        if names.trim().eq_ignore_ascii_case("all") {
            return Ok(self.species.clone());
        }
        names
            .split(',')
            .map(|n| self.find(n).cloned())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    /// Lamb-Dicke parameter.
    pub eta: f64,
    /// Proportionality factor between the asymptotic and actual gate count.
    pub epsilon: f64,
    /// Laser detuning from the 0-2 transition, 1/s.
    pub delta2: f64,
    /// Decay rate of level 1, 1/s; only needed for x-resolved quantities.
    pub gamma1: Option<f64>,
    /// Operating point `x = Omega1 / sqrt(Gamma1)`.
    pub omega_rabi_x: Option<f64>,
}

impl Default for TrapParams {
    fn default() -> Self {
        Self {
            eta: 0.01,
            epsilon: 100.0,
            delta2: 1e13,
            gamma1: None,
            omega_rabi_x: None,
        }
    }
}

impl TrapParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.delta2 > 0.0 && self.delta2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta2 must be positive, got {}",
                self.delta2
            )));
        }
        if let Some(g) = self.gamma1 {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "gamma1 must be positive, got {g}"
                )));
            }
        }
        Ok(())
    }

    fn gamma1(&self) -> Result<f64> {
        self.gamma1
            .ok_or_else(|| Error::InvalidParameter("gamma1 is required here".into()))
    }
}

fn width(spec: &CloneSpec) -> f64 {
    spec.total_qubits() as f64
}

/// `2^(2M)(M-N)^2(2^(-2N) + 1/sqrt(pi M))`, the shape shared by the run
/// time and the copy limit.
fn count_shape(spec: &CloneSpec) -> f64 {
    let (n, m) = (spec.n_in() as f64, spec.m_out() as f64);
    let r = m - n;
    2f64.powf(2.0 * m) * r * r * (2f64.powf(-2.0 * n) + 1.0 / (PI * m).sqrt())
}

/// Gate count `epsilon 2^(2M+2)(M-N)^2(2^(-2N) + 1/sqrt(pi M))`.
pub fn formula_gate_count(spec: &CloneSpec, params: &TrapParams) -> f64 {
    params.epsilon * 4.0 * count_shape(spec)
}

/// `tau = 4 pi sqrt(2M-N) / (eta Omega1)` in seconds.
pub fn elementary_gate_time(spec: &CloneSpec, params: &TrapParams, omega1_rabi: f64) -> f64 {
    4.0 * PI * width(spec).sqrt() / (params.eta * omega1_rabi)
}

/// Total run time `tau * G`, with `G` the formula count unless overridden.
pub fn cloning_time(
    spec: &CloneSpec,
    params: &TrapParams,
    omega1_rabi: f64,
    gate_count_override: Option<f64>,
) -> f64 {
    let gates = gate_count_override.unwrap_or_else(|| formula_gate_count(spec, params));
    elementary_gate_time(spec, params, omega1_rabi) * gates
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionProbability {
    pub p1: f64,
    pub p2: f64,
    pub p_total: f64,
}

/// Emission probabilities at operating point `x = Omega1 / sqrt(Gamma1)`.
/// `Omega2` follows from `Omega1^2/Gamma1 = (omega2/omega1)^3 Omega2^2/Gamma2`.
pub fn emission_probability(
    spec: &CloneSpec,
    species: &IonSpecies,
    params: &TrapParams,
    x: f64,
    gate_count_override: Option<f64>,
) -> Result<EmissionProbability> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
    }
    let gamma1 = params.gamma1()?;
    let omega1_rabi = x * gamma1.sqrt();
    let t = cloning_time(spec, params, omega1_rabi, gate_count_override);
    let omega2_sq = omega1_rabi * omega1_rabi / gamma1
        * (species.omega1_per_s / species.omega2_per_s).powi(3)
        * species.gamma2_per_s;
    let p1 = 0.5 * 2.0 * gamma1 * width(spec) * t;
    let p2 = omega2_sq / (8.0 * params.delta2 * params.delta2) * 2.0 * species.gamma2_per_s * t;
    Ok(EmissionProbability {
        p1,
        p2,
        p_total: p1 + p2,
    })
}

/// The `x` minimizing `p_total`: `1/x + c x` is smallest at `x = 1/sqrt(c)`.
pub fn optimal_x(spec: &CloneSpec, species: &IonSpecies, params: &TrapParams) -> Result<f64> {
    let gamma1 = params.gamma1()?;
    let ratio = (species.omega1_per_s / species.omega2_per_s).powi(3);
    let c = ratio * species.gamma2_per_s.powi(2)
        / (4.0 * params.delta2.powi(2) * gamma1 * width(spec));
    Ok(1.0 / c.sqrt())
}

/// Intensity-optimal emission probability; independent of `Gamma1`.
pub fn min_emission_probability(
    spec: &CloneSpec,
    species: &IonSpecies,
    params: &TrapParams,
    gate_count_override: Option<f64>,
) -> f64 {
    let gates = gate_count_override.unwrap_or_else(|| formula_gate_count(spec, params));
    4.0 * PI / params.eta
        * gates
        * width(spec)
        * species.frequency_factor()
        * species.gamma2_per_s
        / params.delta2
}

/// Right-hand side of the copy-limit condition,
/// `eta / (16 pi epsilon) (omega2/omega1)^(3/2) Delta2 / Gamma2`.
pub fn feasibility_threshold(species: &IonSpecies, params: &TrapParams) -> f64 {
    params.eta / (16.0 * PI * params.epsilon) / species.frequency_factor() * params.delta2
        / species.gamma2_per_s
}

/// Left-hand side of the copy-limit condition,
/// `2^(2M)(2M-N)(M-N)^2(2^(-2N) + 1/sqrt(pi M))`.
pub fn lhs_mmax(spec: &CloneSpec) -> f64 {
    width(spec) * count_shape(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub species: String,
    pub n_in: u32,
    pub m_out: u32,
    pub eta: f64,
    pub aux: bool,
    pub threshold_rhs: f64,
    pub lhs: f64,
    pub p_min_formula: f64,
    pub feasible_formula: bool,
    pub measured_gates: Option<u64>,
    pub p_min_measured: Option<f64>,
    pub feasible_measured: Option<bool>,
}

/// One row per (species, spec, eta). `measured` supplies an explicit gate
/// count (charged with the linear multi-control cost when `aux` is set)
/// where one exists.
pub fn feasibility_scan(
    species: &[IonSpecies],
    params: &TrapParams,
    specs: &[CloneSpec],
    aux: bool,
    etas: &[f64],
    threshold: f64,
    measured: &dyn Fn(&CloneSpec, bool) -> Option<u64>,
) -> Result<Vec<ScanRow>> {
    let counts: Vec<Option<u64>> = specs.iter().map(|s| measured(s, aux)).collect();
    let mut rows = Vec::new();
    for sp in species {
        for &eta in etas {
            let p = TrapParams { eta, ..*params };
            p.validate()?;
            for (spec, count) in specs.iter().zip(&counts) {
                let p_formula = min_emission_probability(spec, sp, &p, None);
                let p_measured = count.map(|g| min_emission_probability(spec, sp, &p, Some(g as f64)));
                rows.push(ScanRow {
                    species: sp.name.clone(),
                    n_in: spec.n_in(),
                    m_out: spec.m_out(),
                    eta,
                    aux,
                    threshold_rhs: feasibility_threshold(sp, &p),
                    lhs: lhs_mmax(spec),
                    p_min_formula: p_formula,
                    feasible_formula: p_formula < threshold,
                    measured_gates: *count,
                    p_min_measured: p_measured,
                    feasible_measured: p_measured.map(|v| v < threshold),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, m: u32) -> CloneSpec {
        CloneSpec::new(n, m).unwrap()
    }

    #[test]
    fn embedded_db_has_three_species() {
        let db = SpeciesDb::embedded();
        assert_eq!(db.names(), vec!["Ca+", "Hg+", "Ba+"]);
        assert_eq!(db.find("ca").unwrap().name, "Ca+");
        assert_eq!(db.find("BA+").unwrap().gamma2_per_s, 58.8e6);
        let err = db.find("Yb+").unwrap_err().to_string();
        assert!(err.contains("Ca+, Hg+, Ba+"));
        assert_eq!(db.select("all").unwrap().len(), 3);
        assert_eq!(db.select("Hg+,Ba+").unwrap()[1].name, "Ba+");
    }

    #[test]
    fn db_rejects_bad_values() {
        let text = EMBEDDED_DB.replace("6.75e7", "-1");
        assert!(SpeciesDb::parse(&text).is_err());
        let text = EMBEDDED_DB.replace("uqcm.species/v1", "other");
        assert!(SpeciesDb::parse(&text).is_err());
    }

    #[test]
    fn gate_time_by_hand() {
        let p = TrapParams::default();
        let tau = elementary_gate_time(&spec(1, 2), &p, 1e6);
        assert!((tau - 4.0 * PI * 3f64.sqrt() / 1e4).abs() < 1e-18);
        assert!((tau - 2.177e-3).abs() < 1e-6);
        let half = elementary_gate_time(&spec(1, 2), &p, 2e6);
        assert!((tau / half - 2.0).abs() < 1e-12);
        // width 4 against width 3
        let wide = elementary_gate_time(&spec(2, 3), &p, 1e6);
        assert!((wide / tau - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cloning_time_cases() {
        let p = TrapParams::default();
        let s = spec(1, 2);
        let tau = elementary_gate_time(&s, &p, 1e6);
        assert_eq!(cloning_time(&s, &p, 1e6, Some(6.0)), 6.0 * tau);
        assert_eq!(cloning_time(&s, &p, 1e6, Some(0.0)), 0.0);
        let want = tau * 100.0 * 64.0 * (0.25 + 1.0 / (2.0 * PI).sqrt());
        assert!((cloning_time(&s, &p, 1e6, None) / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn threshold_and_lhs() {
        let db = SpeciesDb::embedded();
        let p = TrapParams::default();
        let rhs: Vec<f64> = db
            .species
            .iter()
            .map(|s| feasibility_threshold(s, &p))
            .collect();
        assert!((rhs[0] / 0.72 - 1.0).abs() < 0.01);
        assert!((rhs[1] / 0.084 - 1.0).abs() < 0.01);
        assert!((rhs[2] / 2.58 - 1.0).abs() < 0.01);
        assert!((lhs_mmax(&spec(1, 2)) / 31.15 - 1.0).abs() < 0.002);
    }

    #[test]
    fn p_min_equals_lhs_over_rhs() {
        let db = SpeciesDb::embedded();
        let p = TrapParams::default();
        for sp in &db.species {
            for (n, m) in [(1, 2), (2, 3), (2, 5)] {
                let s = spec(n, m);
                let ratio = lhs_mmax(&s) / feasibility_threshold(sp, &p);
                let pm = min_emission_probability(&s, sp, &p, None);
                assert!((pm / ratio - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn emission_needs_gamma1_and_positive_x() {
        let db = SpeciesDb::embedded();
        let p = TrapParams::default();
        let s = spec(1, 2);
        assert!(emission_probability(&s, &db.species[0], &p, 1.0, None).is_err());
        let p = TrapParams {
            gamma1: Some(1.0),
            ..p
        };
        assert!(emission_probability(&s, &db.species[0], &p, 0.0, None).is_err());
        let e = emission_probability(&s, &db.species[0], &p, 1e4, Some(6.0)).unwrap();
        assert_eq!(e.p_total, e.p1 + e.p2);
    }

    #[test]
    fn zero_gamma2_removes_p2() {
        let mut sp = SpeciesDb::embedded().species[0].clone();
        sp.gamma2_per_s = 0.0;
        let p = TrapParams {
            gamma1: Some(1.0),
            ..TrapParams::default()
        };
        let e = emission_probability(&spec(1, 2), &sp, &p, 10.0, None).unwrap();
        assert_eq!(e.p2, 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(TrapParams::default().validate().is_ok());
        for bad in [
            TrapParams { eta: 0.0, ..TrapParams::default() },
            TrapParams { eta: 1.5, ..TrapParams::default() },
            TrapParams { epsilon: -1.0, ..TrapParams::default() },
            TrapParams { delta2: 0.0, ..TrapParams::default() },
            TrapParams { gamma1: Some(0.0), ..TrapParams::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn empty_scan() {
        let db = SpeciesDb::embedded();
        let rows = feasibility_scan(
            &db.species,
            &TrapParams::default(),
            &[],
            false,
            &[0.01],
            DEFAULT_THRESHOLD,
            &|_, _| None,
        )
        .unwrap();
        assert!(rows.is_empty());
    }
}
