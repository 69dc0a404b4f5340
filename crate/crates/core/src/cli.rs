//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::budget::{
    cloning_time, elementary_gate_time, emission_probability, feasibility_scan,
    feasibility_threshold, formula_gate_count, lhs_mmax, min_emission_probability, optimal_x,
    IonSpecies, SpeciesDb, TrapParams, DEFAULT_THRESHOLD,
};
use crate::circuit::Circuit;
use crate::cloner::{feasibility, gate_count_bound, CloneSpec, MachineConvention};
use crate::error::{Error, Result};
use crate::synth::{synthesize, ClonerCircuit, SynthOptions};
use crate::verify::verify_with_cost;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

const DEFAULT_SCAN_SPECS: [(u32, u32); 8] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 5),
];

#[derive(Debug, Parser)]
#[command(name = "uqcm", version, about = "Universal quantum cloning circuit toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a cloner circuit and store it as JSON.
    Synth(SynthArgs),
    /// Simulate a cloner circuit against the ideal transformation.
    Verify(VerifyArgs),
    /// Report gate counts of the synthesized circuit and the bound.
    Count(SpecArgs),
    /// Emission budget for one spec.
    Budget(BudgetArgs),
    /// Feasibility table over species, specs and eta values.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Literal,
    Complemented,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Number of input copies.
    #[arg(short = 'N')]
    n: u32,
    /// Number of output copies.
    #[arg(short = 'M')]
    m: u32,
    /// Allow auxiliary qubits and charge linear multi-control cost.
    #[arg(long)]
    aux: bool,
    #[arg(long, value_enum, default_value = "literal")]
    convention: ConventionArg,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Circuit output path; defaults to the artifact directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "uqcm-artifacts")]
    artifact_dir: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Circuit to verify; defaults to the stored artifact, else synthesizes.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, default_value = "uqcm-artifacts")]
    artifact_dir: PathBuf,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PhysicsArgs {
    /// Lamb-Dicke parameter(s), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    eta: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    epsilon: f64,
    /// Detuning, 1/s.
    #[arg(long, default_value_t = 1e13)]
    delta2: f64,
    /// Species name(s), comma separated, or "all".
    #[arg(long, default_value = "all")]
    species: String,
    /// Species database; overrides UQCM_SPECIES_DB.
    #[arg(long)]
    species_db: Option<PathBuf>,
    /// Explicit gate count replacing the formula count.
    #[arg(long)]
    gates: Option<u64>,
    /// Feasibility threshold on p_min.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Decay rate of level 1, 1/s, for operating-point quantities.
    #[arg(long)]
    gamma1: Option<f64>,
    /// Operating point x = Omega1/sqrt(Gamma1); defaults to the optimum.
    #[arg(long)]
    x: Option<f64>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(short = 'N')]
    n: Option<u32>,
    #[arg(short = 'M')]
    m: Option<u32>,
    #[arg(long)]
    aux: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    physics: PhysicsArgs,
}

/// Validated inputs shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub specs: Vec<CloneSpec>,
    pub aux: bool,
    pub convention: MachineConvention,
    pub params: TrapParams,
    pub etas: Vec<f64>,
    pub species: Vec<IonSpecies>,
    pub gates: Option<u64>,
    pub threshold: f64,
    pub json: bool,
}

impl RunConfig {
    fn base(spec: &SpecArgs) -> Result<Self> {
        Ok(Self {
            specs: vec![CloneSpec::new(spec.n, spec.m)?],
            aux: spec.aux,
            convention: match spec.convention {
                ConventionArg::Literal => MachineConvention::Literal,
                ConventionArg::Complemented => MachineConvention::Complemented,
            },
            params: TrapParams::default(),
            etas: vec![TrapParams::default().eta],
            species: Vec::new(),
            gates: None,
            threshold: DEFAULT_THRESHOLD,
            json: spec.json,
        })
    }

    fn with_physics(mut self, p: &PhysicsArgs) -> Result<Self> {
        if p.eta.is_empty() {
            return Err(Error::InvalidParameter("at least one eta is required".into()));
        }
        self.params = TrapParams {
            eta: p.eta[0],
            epsilon: p.epsilon,
            delta2: p.delta2,
            ..TrapParams::default()
        };
        for &eta in &p.eta {
            TrapParams { eta, ..self.params }.validate()?;
        }
        if p.threshold.is_nan() || p.threshold <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "threshold must be positive, got {}",
                p.threshold
            )));
        }
        self.etas = p.eta.clone();
        let db = SpeciesDb::load(p.species_db.as_deref())?;
        self.species = db.select(&p.species)?;
        self.gates = p.gates;
        self.threshold = p.threshold;
        Ok(self)
    }

    fn spec(&self) -> CloneSpec {
        self.specs[0]
    }

    fn synth_options(&self) -> SynthOptions {
        SynthOptions {
            aux: self.aux,
            convention: self.convention,
            ..SynthOptions::default()
        }
    }
}

/// Path of the stored circuit for a spec.
pub fn artifact_path(dir: &Path, spec: &CloneSpec, aux: bool) -> PathBuf {
    let aux = if aux { "aux" } else { "noaux" };
    dir.join(format!(
        "uqcm-{}-{}-{aux}-v{VERSION}.circuit.json",
        spec.n_in(),
        spec.m_out()
    ))
}

/// At least six significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor();
    if (-3.0..6.0).contains(&mag) {
        let decimals = (5.0 - mag).max(0.0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

fn physics_header(params: &TrapParams, etas: &[f64]) -> String {
    let etas: Vec<String> = etas.iter().map(|e| fmt_num(*e)).collect();
    format!(
        "# epsilon = {}, delta2 = {} 1/s, eta = {}\n",
        fmt_num(params.epsilon),
        fmt_num(params.delta2),
        etas.join(", ")
    )
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&RunConfig::base(&a.spec)?, &a, out),
        Command::Verify(a) => cmd_verify(&RunConfig::base(&a.spec)?, &a, out),
        Command::Count(a) => cmd_count(&RunConfig::base(&a)?, out),
        Command::Budget(a) => {
            let mut cfg = RunConfig::base(&a.spec)?.with_physics(&a.physics)?;
            cfg.params.gamma1 = a.gamma1;
            cfg.params.omega_rabi_x = a.x;
            cfg.params.validate()?;
            cmd_budget(&cfg, out)
        }
        Command::Scan(a) => {
            let specs = match (a.n, a.m) {
                (Some(n), Some(m)) => vec![CloneSpec::new(n, m)?],
                (None, None) => DEFAULT_SCAN_SPECS
                    .iter()
                    .map(|&(n, m)| CloneSpec::new(n, m))
                    .collect::<Result<_>>()?,
                _ => {
                    return Err(Error::InvalidSpec(
                        "give both -N and -M, or neither".into(),
                    ))
                }
            };
            let cfg = RunConfig {
                specs,
                aux: a.aux,
                convention: MachineConvention::Literal,
                params: TrapParams::default(),
                etas: Vec::new(),
                species: Vec::new(),
                gates: None,
                threshold: DEFAULT_THRESHOLD,
                json: a.json,
            }
            .with_physics(&a.physics)?;
            cmd_scan(&cfg, out)
        }
    }
}

fn synth_or_explain(cfg: &RunConfig) -> Result<ClonerCircuit> {
    synthesize(&cfg.spec(), &cfg.synth_options()).map_err(|e| match e {
        Error::Infeasible { lhs, rhs, .. } => Error::InvalidSpec(format!(
            "{} requires --aux ({lhs} > {rhs})",
            cfg.spec()
        )),
        other => other,
    })
}

fn feasibility_line(spec: &CloneSpec) -> String {
    let f = feasibility(spec);
    if f.feasible_without_aux {
        format!("feasible: {} <= {}", f.lhs, f.rhs)
    } else {
        format!("infeasible without aux: {} > {}", f.lhs, f.rhs)
    }
}

fn cmd_synth(cfg: &RunConfig, args: &SynthArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.spec();
    let cloner = synth_or_explain(cfg)?;
    let path = match &args.out {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(&args.artifact_dir)?;
            artifact_path(&args.artifact_dir, &spec, cfg.aux)
        }
    };
    std::fs::write(&path, cloner.circuit.to_json()?)?;
    let counts = cloner.gate_counts()?;
    if cfg.json {
        let summary = json!({
            "schema": "uqcm.synth/v1",
            "spec": spec,
            "aux": cfg.aux,
            "feasibility": feasibility(&spec),
            "route": cloner.route(),
            "aux_qubits": cloner.aux_qubits(),
            "n_qubits": cloner.circuit.n_qubits(),
            "gates": cloner.circuit.len(),
            "moves": cloner.plan.len(),
            "gate_counts": counts,
            "circuit": path,
        });
        writeln!(out, "{}", to_json(&summary)?)?;
    } else {
        writeln!(out, "spec: {spec}")?;
        writeln!(out, "{}", feasibility_line(&spec))?;
        writeln!(
            out,
            "route: {:?}, aux qubits: {}, qubits: {}, gates: {}, moves: {}",
            cloner.route(),
            cloner.aux_qubits(),
            cloner.circuit.n_qubits(),
            cloner.circuit.len(),
            cloner.plan.len()
        )?;
        writeln!(
            out,
            "cnot cost: prep {} clone {} total {} (bound {})",
            counts.prep,
            counts.clone,
            counts.total,
            fmt_num(counts.bound)
        )?;
        writeln!(out, "circuit: {}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn load_circuit(cfg: &RunConfig, args: &VerifyArgs) -> Result<Circuit> {
    if let Some(p) = &args.circuit {
        return Circuit::from_json(&std::fs::read_to_string(p)?);
    }
    let stored = artifact_path(&args.artifact_dir, &cfg.spec(), cfg.aux);
    if stored.exists() {
        return Circuit::from_json(&std::fs::read_to_string(stored)?);
    }
    Ok(synth_or_explain(cfg)?.circuit)
}

fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let circuit = load_circuit(cfg, args)?;
    let report = verify_with_cost(&cfg.spec(), &circuit, args.samples, args.seed, cfg.aux)?;
    let text = to_json(&report)?;
    if let Some(p) = &args.out {
        std::fs::write(p, &text)?;
    }
    if cfg.json {
        writeln!(out, "{text}")?;
    } else {
        write!(out, "{}", report.to_table())?;
    }
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn cmd_count(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.spec();
    let cloner = synth_or_explain(cfg)?;
    let counts = cloner.gate_counts()?;
    let bound = gate_count_bound(&spec, cfg.aux as u32)?;
    if cfg.json {
        let v = json!({
            "schema": "uqcm.count/v1",
            "spec": spec,
            "aux": cfg.aux,
            "measured": counts,
            "bound": bound,
        });
        writeln!(out, "{}", to_json(&v)?)?;
    } else {
        writeln!(out, "spec: {spec}")?;
        writeln!(out, "{}", feasibility_line(&spec))?;
        writeln!(out, "{:<10}{:>14}{:>16}", "stage", "measured", "bound")?;
        for (name, m, b) in [
            ("prep", counts.prep, bound.prep),
            ("clone", counts.clone, bound.clone),
            ("total", counts.total, bound.total),
        ] {
            writeln!(out, "{name:<10}{m:>14}{:>16}", fmt_num(b))?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BudgetRow {
    species: String,
    eta: f64,
    threshold_rhs: f64,
    lhs: f64,
    gate_count: f64,
    gate_count_source: &'static str,
    p_min: f64,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    operating_point: Option<OperatingPoint>,
}

#[derive(Serialize)]
struct OperatingPoint {
    x: f64,
    omega1_rabi: f64,
    gate_time_s: f64,
    cloning_time_s: f64,
    p1: f64,
    p2: f64,
    p_total: f64,
}

fn cmd_budget(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg.spec();
    let override_gates = cfg.gates.map(|g| g as f64);
    let mut rows = Vec::new();
    for &eta in &cfg.etas {
        let params = TrapParams { eta, ..cfg.params };
        for sp in &cfg.species {
            let p_min = min_emission_probability(&spec, sp, &params, override_gates);
            let operating_point = match params.gamma1 {
                Some(g1) => {
                    let x = match params.omega_rabi_x {
                        Some(x) => x,
                        None => optimal_x(&spec, sp, &params)?,
                    };
                    let omega1 = x * g1.sqrt();
                    let e = emission_probability(&spec, sp, &params, x, override_gates)?;
                    Some(OperatingPoint {
                        x,
                        omega1_rabi: omega1,
                        gate_time_s: elementary_gate_time(&spec, &params, omega1),
                        cloning_time_s: cloning_time(&spec, &params, omega1, override_gates),
                        p1: e.p1,
                        p2: e.p2,
                        p_total: e.p_total,
                    })
                }
                None => None,
            };
            rows.push(BudgetRow {
                species: sp.name.clone(),
                eta,
                threshold_rhs: feasibility_threshold(sp, &params),
                lhs: lhs_mmax(&spec),
                gate_count: override_gates.unwrap_or_else(|| formula_gate_count(&spec, &params)),
                gate_count_source: if override_gates.is_some() {
                    "explicit"
                } else {
                    "formula"
                },
                p_min,
                feasible: p_min < cfg.threshold,
                operating_point,
            });
        }
    }
    if cfg.json {
        let v = json!({
            "schema": "uqcm.budget/v1",
            "spec": spec,
            "epsilon": cfg.params.epsilon,
            "delta2": cfg.params.delta2,
            "threshold": cfg.threshold,
            "rows": rows,
        });
        writeln!(out, "{}", to_json(&v)?)?;
        return Ok(EXIT_OK);
    }
    write!(out, "{}", physics_header(&cfg.params, &cfg.etas))?;
    writeln!(out, "# spec {spec}, threshold {}", fmt_num(cfg.threshold))?;
    writeln!(
        out,
        "{:<8}{:>10}{:>14}{:>14}{:>14}{:>14}  feasible",
        "species", "eta", "RHS", "LHS", "gates", "p_min"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{:<8}{:>10}{:>14}{:>14}{:>14}{:>14}  {}",
            r.species,
            fmt_num(r.eta),
            fmt_num(r.threshold_rhs),
            fmt_num(r.lhs),
            fmt_num(r.gate_count),
            fmt_num(r.p_min),
            r.feasible
        )?;
        if let Some(op) = &r.operating_point {
            writeln!(
                out,
                "    x {}  Omega1 {} 1/s  tau {} s  T {} s  p1 {}  p2 {}  p_total {}",
                fmt_num(op.x),
                fmt_num(op.omega1_rabi),
                fmt_num(op.gate_time_s),
                fmt_num(op.cloning_time_s),
                fmt_num(op.p1),
                fmt_num(op.p2),
                fmt_num(op.p_total)
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn measured_count(spec: &CloneSpec, aux: bool) -> Option<u64> {
    let cloner = synthesize(spec, &SynthOptions::with_aux(aux)).ok()?;
    cloner.gate_counts().ok().map(|c| c.total)
}

fn cmd_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let fixed = cfg.gates;
    let measured = move |spec: &CloneSpec, aux: bool| fixed.or_else(|| measured_count(spec, aux));
    let rows = feasibility_scan(
        &cfg.species,
        &cfg.params,
        &cfg.specs,
        cfg.aux,
        &cfg.etas,
        cfg.threshold,
        &measured,
    )?;
    if cfg.json {
        let v = json!({
            "schema": "uqcm.scan/v1",
            "epsilon": cfg.params.epsilon,
            "delta2": cfg.params.delta2,
            "etas": cfg.etas,
            "threshold": cfg.threshold,
            "aux": cfg.aux,
            "rows": rows,
        });
        writeln!(out, "{}", to_json(&v)?)?;
        return Ok(EXIT_OK);
    }
    write!(out, "{}", physics_header(&cfg.params, &cfg.etas))?;
    writeln!(
        out,
        "# threshold {}, aux {}, gate counts {}",
        fmt_num(cfg.threshold),
        cfg.aux,
        if fixed.is_some() { "explicit" } else { "synthesized" }
    )?;
    writeln!(out, "{:<8}{:>10}{:>14}", "species", "eta", "RHS")?;
    for &eta in &cfg.etas {
        for sp in &cfg.species {
            let p = TrapParams { eta, ..cfg.params };
            writeln!(
                out,
                "{:<8}{:>10}{:>14}",
                sp.name,
                fmt_num(eta),
                fmt_num(feasibility_threshold(sp, &p))
            )?;
        }
    }
    writeln!(out)?;
    writeln!(
        out,
        "{:<8}{:>10}{:>7}{:>14}{:>14}{:>6}{:>10}{:>14}{:>6}",
        "species", "eta", "spec", "LHS", "p_min", "ok", "gates", "p_min(G)", "ok"
    )?;
    for r in &rows {
        let spec = format!("{}->{}", r.n_in, r.m_out);
        writeln!(
            out,
            "{:<8}{:>10}{:>7}{:>14}{:>14}{:>6}{:>10}{:>14}{:>6}",
            r.species,
            fmt_num(r.eta),
            spec,
            fmt_num(r.lhs),
            fmt_num(r.p_min_formula),
            yes_no(r.feasible_formula),
            r.measured_gates.map_or("-".into(), |g| g.to_string()),
            r.p_min_measured.map_or("-".into(), fmt_num),
            r.feasible_measured.map_or("-", yes_no)
        )?;
    }
    Ok(EXIT_OK)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("uqcm").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn number_format_keeps_six_digits() {
        assert_eq!(fmt_num(0.721587), "0.721587");
        assert_eq!(fmt_num(31.14922), "31.1492");
        assert_eq!(fmt_num(1e13), "1.00000e13");
        assert_eq!(fmt_num(0.0000123456), "1.23456e-5");
        assert_eq!(fmt_num(100.0), "100.000");
    }

    #[test]
    fn bad_args_exit_one() {
        assert_eq!(run_capture(&["synth", "-N", "x", "-M", "2"]).0, EXIT_INVALID);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_INVALID);
        let (code, _, err) = run_capture(&["count", "-N", "2", "-M", "2"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("M must exceed N"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("synth"));
    }

    #[test]
    fn count_reports_feasibility() {
        let (code, out, _) = run_capture(&["count", "-N", "1", "-M", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("feasible: 3 <= 4"));
        let (code, _, err) = run_capture(&["count", "-N", "3", "-M", "6"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("requires --aux (84 > 64)"));
    }

    #[test]
    fn unknown_species_lists_names() {
        let (code, _, err) = run_capture(&["scan", "--species", "Yb+"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("Ca+, Hg+, Ba+"));
    }

    #[test]
    fn artifact_names_are_stable() {
        let spec = CloneSpec::new(2, 4).unwrap();
        let p = artifact_path(Path::new("/a"), &spec, true);
        assert_eq!(
            p,
            PathBuf::from(format!("/a/uqcm-2-4-aux-v{VERSION}.circuit.json"))
        );
    }
}
