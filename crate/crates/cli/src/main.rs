//! `harperlab`: command-line front end.
//!
//! Every subcommand writes its outputs plus a `<stem>.config.json` sidecar
//! holding the resolved arguments, seed and tool version. Exit status is 2 on
//! a usage error, 1 on a computation error and 0 otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use harperlab::cocycles::{complexified_le_seeded, rotation_number};
use harperlab::contfrac::{counterexample_alpha, expand, parity_subsequence, Alpha, ContinuedFraction};
use harperlab::esproducts::{growth_ratios, liminf_track_capped, Q_CAP};
use harperlab::fourier::limsup_lower_bound_test;
use harperlab::model::{classify, criticality, SNAP_TOL};
use harperlab::spectra::density_of_states;
use harperlab::verify::{run_all, Budget};
use harperlab::Coupling;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "harperlab", version, about = "Numerical workbench for the extended Harper's model")]
struct Cli {
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "HARPERLAB_THREADS", default_value_t = 0)]
    threads: usize,
    /// Perturbs the phase-lattice offset where sampling is involved.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continued-fraction expansion and convergents.
    Cf(CfArgs),
    /// `sup_z S(q_n, z)` along the convergent denominators.
    Esprod(EsprodArgs),
    /// Region and expected spectral class on a coupling plane.
    PhaseDiagram(PhaseArgs),
    /// Complexified Lyapunov exponent `L(E; ε)`.
    Lyapunov(LyapunovArgs),
    /// Eigenvalues, histogram and counting function of finite windows.
    Dos(DosArgs),
    /// Normalized boundary Fourier coefficients along convergents.
    Fourier(FourierArgs),
    /// Fibered rotation number on an energy grid.
    Rotation(RotationArgs),
    /// Runs the acceptance suite and prints a pass/fail table.
    Verify(VerifyArgs),
}

/// Frequency: `golden`, `silver`, `sqrt:D:a:b:c` for `(a + b sqrt D)/c`,
/// `p/q`, `counterexample:C:levels`, or a decimal string.
#[derive(Debug, Clone, Serialize)]
#[serde(into = "String")]
struct AlphaArg {
    text: String,
    kind: AlphaKind,
}

#[derive(Debug, Clone)]
enum AlphaKind {
    Plain(Alpha),
    Counterexample { c: f64, levels: usize },
}

impl From<AlphaArg> for String {
    fn from(a: AlphaArg) -> String {
        a.text
    }
}

fn parse_alpha(s: &str) -> Result<AlphaArg, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t}: {e}"));
    let kind = match parts.as_slice() {
        ["golden"] => AlphaKind::Plain(Alpha::golden()),
        ["silver"] => AlphaKind::Plain(Alpha::silver()),
        ["sqrt", d, a, b, c] => {
            AlphaKind::Plain(Alpha::surd(num(d)?, num(a)?, num(b)?, num(c)?).map_err(|e| e.to_string())?)
        }
        ["counterexample", c, levels] => AlphaKind::Counterexample {
            c: c.parse().map_err(|e| format!("{c}: {e}"))?,
            levels: levels.parse().map_err(|e| format!("{levels}: {e}"))?,
        },
        [one] if one.contains('/') => {
            let (p, q) = one.split_once('/').unwrap();
            AlphaKind::Plain(Alpha::rational(num(p)?, num(q)?).map_err(|e| e.to_string())?)
        }
        [one] => AlphaKind::Plain(Alpha::decimal(one).map_err(|e| e.to_string())?),
        _ => return Err(format!("unrecognized frequency `{s}`")),
    };
    Ok(AlphaArg { text: s.to_string(), kind })
}

impl AlphaArg {
    /// Expansion with at least `terms` partial quotients where the input allows.
    fn expand(&self, terms: usize) -> harperlab::Result<ContinuedFraction> {
        match &self.kind {
            AlphaKind::Plain(a) => expand(a, terms),
            AlphaKind::Counterexample { c, levels } => Ok(counterexample_alpha(*c, *levels)?.cf),
        }
    }
}

/// `l1,l2,l3`.
fn parse_coupling(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> =
        s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected three comma-separated couplings, got `{s}`"))
}

/// Inclusive grid `lo:hi:step`, or a single value.
#[derive(Debug, Clone, Serialize)]
struct Grid {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Grid {
    fn values(&self) -> Vec<f64> {
        if self.step == 0.0 || self.hi == self.lo {
            return vec![self.lo];
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let v: Vec<f64> =
        s.split(':').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"))).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x] => Ok(Grid { lo: *x, hi: *x, step: 0.0 }),
        [lo, hi, step] if step > &0.0 && hi >= lo => Ok(Grid { lo: *lo, hi: *hi, step: *step }),
        _ => Err(format!("expected `lo:hi:step` with step > 0 and hi >= lo, got `{s}`")),
    }
}

/// `l1=v`, `l2=v` or `l3=v`; only the `l2` plane is tabulated.
fn parse_plane(s: &str) -> Result<f64, String> {
    match s.split_once('=') {
        Some(("l2", v)) => v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}")),
        _ => Err(format!("expected `l2=<value>`, got `{s}`")),
    }
}

#[derive(Args, Debug, Serialize)]
struct CfArgs {
    #[arg(long, value_parser = parse_alpha, default_value = "golden")]
    alpha: AlphaArg,
    #[arg(long, default_value_t = 30)]
    terms: usize,
    #[arg(long, default_value = "cf.json")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EsprodArgs {
    #[arg(long, value_parser = parse_alpha, default_value = "golden")]
    alpha: AlphaArg,
    /// Last convergent index.
    #[arg(long, default_value_t = 10)]
    nmax: usize,
    /// Largest admissible `q_n`.
    #[arg(long, default_value_t = Q_CAP)]
    cap: u64,
    #[arg(long, default_value = "esprod.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct PhaseArgs {
    /// Points per axis.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, value_parser = parse_plane, default_value = "l2=1")]
    plane: f64,
    /// Upper end of the `λ₁` and `λ₃` axes.
    #[arg(long, default_value_t = 2.0)]
    range: f64,
    #[arg(long, default_value = "phase_diagram.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct LyapunovArgs {
    #[arg(long, value_parser = parse_coupling)]
    coupling: [f64; 3],
    #[arg(long, value_parser = parse_alpha, default_value = "golden")]
    alpha: AlphaArg,
    #[arg(long = "E", value_parser = parse_grid, allow_hyphen_values = true)]
    energy: Grid,
    /// Must be symmetric about zero.
    #[arg(long, value_parser = parse_grid, default_value = "-1:1:0.025", allow_hyphen_values = true)]
    eps: Grid,
    #[arg(long, default_value_t = 200_000)]
    n_iter: usize,
    #[arg(long, default_value_t = 64)]
    phases: usize,
    #[arg(long, default_value = "lyapunov.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct DosArgs {
    #[arg(long, value_parser = parse_coupling)]
    coupling: [f64; 3],
    #[arg(long, value_parser = parse_alpha, default_value = "golden")]
    alpha: AlphaArg,
    /// Window size.
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    phases: usize,
    #[arg(long, default_value_t = 200)]
    bins: usize,
    /// Points of the counting-function table.
    #[arg(long, default_value_t = 512)]
    ids_points: usize,
    /// Prefix for `<out>_eigs.csv`, `<out>_hist.csv` and `<out>_ids.csv`.
    #[arg(long, default_value = "dos")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct FourierArgs {
    #[arg(long, value_parser = parse_coupling)]
    coupling: [f64; 3],
    #[arg(long, value_parser = parse_alpha, default_value = "golden")]
    alpha: AlphaArg,
    #[arg(long, default_value_t = 0.123456)]
    theta: f64,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    #[arg(long, default_value_t = 40)]
    terms: usize,
    #[arg(long, default_value = "fourier.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct RotationArgs {
    #[arg(long, value_parser = parse_coupling)]
    coupling: [f64; 3],
    #[arg(long, value_parser = parse_alpha, default_value = "golden")]
    alpha: AlphaArg,
    #[arg(long = "E", value_parser = parse_grid, allow_hyphen_values = true)]
    energy: Grid,
    #[arg(long, default_value_t = 200_000)]
    n_iter: usize,
    #[arg(long, default_value = "rotation.csv")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Reduced budgets, no runtime limits.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value = "verify.json")]
    out: PathBuf,
}

/// Sidecar path: `dir/stem.config.json`.
fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.config.json"))
}

fn write_sidecar<A: Serialize>(
    out: &Path,
    cli: &Cli,
    name: &str,
    args: &A,
    outputs: &[PathBuf],
    extra: Value,
) -> anyhow::Result<()> {
    let doc = json!({
        "tool": "harperlab",
        "version": VERSION,
        "subcommand": name,
        "seed": cli.seed,
        "threads": cli.threads,
        "config": args,
        "outputs": outputs,
        "results": extra,
    });
    let path = sidecar_path(out);
    std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: &Path, header: &[&str]) -> anyhow::Result<csv::Writer<std::fs::File>> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    Ok(w)
}

/// Shortest round-trip form; scientific for very small or large magnitudes.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn coupling_of(v: [f64; 3]) -> harperlab::Result<Coupling> {
    Coupling::new(v[0], v[1], v[2])
}

/// Integer as a JSON number when it fits in `i64`, otherwise as a string.
fn big_json(x: &impl ToString) -> Value {
    let s = x.to_string();
    s.parse::<i64>().map_or(Value::String(s), Value::from)
}

fn run_cf(cli: &Cli, a: &CfArgs) -> anyhow::Result<()> {
    let cf = a.alpha.expand(a.terms)?;
    let parity = parity_subsequence(&cf).ok().map(|p| p.label.label());
    let doc = json!({
        "alpha_repr": cf.alpha_repr,
        "alpha": cf.alpha,
        "terms": cf.terms,
        "convergents": cf.convergents.iter().map(|(p, q)| json!([big_json(p), big_json(q)])).collect::<Vec<_>>(),
        "parity_label": parity,
    });
    std::fs::write(&a.out, serde_json::to_string_pretty(&doc)? + "\n")?;
    write_sidecar(&a.out, cli, "cf", a, std::slice::from_ref(&a.out), json!({}))
}

fn run_esprod(cli: &Cli, a: &EsprodArgs) -> anyhow::Result<()> {
    let cf = a.alpha.expand(a.nmax + 2)?;
    let series = liminf_track_capped(&cf, a.nmax, a.cap)?;
    let mut w = csv_writer(&a.out, &["n", "q_n", "sup_value", "argmax_angle", "running_min"])?;
    for e in &series.entries {
        w.write_record([e.n.to_string(), e.q.to_string(), fmt(e.sup_value), fmt(e.argmax_angle), fmt(e.running_min)])?;
    }
    w.flush()?;
    let mut extra = json!({ "running_min": series.running_min });
    if let AlphaKind::Counterexample { .. } = a.alpha.kind {
        let ratios: Vec<Value> = growth_ratios(&cf, &series).iter().map(|(n, r)| json!({"n": n, "ratio": r})).collect();
        extra["growth_ratios"] = Value::from(ratios);
    }
    write_sidecar(&a.out, cli, "esprod", a, std::slice::from_ref(&a.out), extra)
}

fn run_phase(cli: &Cli, a: &PhaseArgs) -> anyhow::Result<()> {
    if a.grid < 2 || !(a.range > 0.0) || !(a.plane >= 0.0) {
        bail!(harperlab::Error::InvalidInput("need grid >= 2, range > 0 and l2 >= 0".into()));
    }
    let axis: Vec<f64> = (0..a.grid).map(|i| a.range * i as f64 / (a.grid - 1) as f64).collect();
    let mut w = csv_writer(&a.out, &["l1", "l3", "region", "criticality"])?;
    for &l1 in &axis {
        for &l3 in &axis {
            let (region, crit) = match Coupling::new(l1, a.plane, l3) {
                Ok(c) => (classify(&c, SNAP_TOL)?.region.name(), criticality(&c)?.name()),
                Err(_) => ("undefined", "undefined"),
            };
            w.write_record([fmt(l1), fmt(l3), region.into(), crit.into()])?;
        }
    }
    w.flush()?;
    write_sidecar(&a.out, cli, "phase-diagram", a, std::slice::from_ref(&a.out), json!({}))
}

fn run_lyapunov(cli: &Cli, a: &LyapunovArgs) -> anyhow::Result<()> {
    let coupling = coupling_of(a.coupling)?;
    let alpha = a.alpha.expand(2)?.alpha;
    let eps = a.eps.values();
    let profiles = a
        .energy
        .values()
        .par_iter()
        .map(|&e| complexified_le_seeded(&coupling, alpha, e, &eps, a.n_iter, a.phases, cli.seed))
        .collect::<harperlab::Result<Vec<_>>>()?;
    let mut w = csv_writer(&a.out, &["E", "eps", "L", "slope"])?;
    for p in &profiles {
        for j in 0..p.eps_grid.len() {
            w.write_record([fmt(p.energy), fmt(p.eps_grid[j]), fmt(p.l_values[j]), fmt(p.slopes[j])])?;
        }
    }
    w.flush()?;
    write_sidecar(&a.out, cli, "lyapunov", a, std::slice::from_ref(&a.out), json!({ "alpha": alpha }))
}

fn run_dos(cli: &Cli, a: &DosArgs) -> anyhow::Result<()> {
    let coupling = coupling_of(a.coupling)?;
    let alpha = a.alpha.expand(2)?.alpha;
    let sample = density_of_states(&coupling, alpha, a.n, a.phases, a.bins)?;
    let prefix = a.out.to_string_lossy().into_owned();
    let paths: Vec<PathBuf> =
        ["eigs", "hist", "ids"].iter().map(|s| PathBuf::from(format!("{prefix}_{s}.csv"))).collect();

    let mut w = csv_writer(&paths[0], &["phase", "index", "E"])?;
    for (phase, eigs) in sample.phases.iter().zip(&sample.per_phase) {
        for (i, e) in eigs.iter().enumerate() {
            w.write_record([fmt(*phase), i.to_string(), fmt(*e)])?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&paths[1], &["bin_lo", "bin_hi", "mass"])?;
    for (lo, hi, m) in &sample.histogram {
        w.write_record([fmt(*lo), fmt(*hi), fmt(*m)])?;
    }
    w.flush()?;

    let mut w = csv_writer(&paths[2], &["E", "N"])?;
    let (lo, hi) = (sample.min(), sample.max());
    let k = a.ids_points.max(2);
    for i in 0..k {
        let e = lo + (hi - lo) * i as f64 / (k - 1) as f64;
        w.write_record([fmt(e), fmt(sample.ids(e))])?;
    }
    w.flush()?;

    let extra = json!({ "alpha": alpha, "min": lo, "max": hi, "total_mass": sample.total_mass() });
    write_sidecar(&a.out, cli, "dos", a, &paths, extra)
}

fn run_fourier(cli: &Cli, a: &FourierArgs) -> anyhow::Result<()> {
    let coupling = coupling_of(a.coupling)?;
    let cf = a.alpha.expand(a.terms)?;
    let series = limsup_lower_bound_test(&coupling, &cf, a.theta, a.levels)?;
    let mut w = csv_writer(&a.out, &["l", "m_l", "re", "im", "normalized", "upper_proxy"])?;
    for e in &series.entries {
        w.write_record([
            e.level.to_string(),
            e.m.to_string(),
            fmt(e.coeff.re),
            fmt(e.coeff.im),
            fmt(e.normalized),
            fmt(e.upper_proxy),
        ])?;
    }
    w.flush()?;
    let extra = json!({
        "alpha": cf.alpha,
        "i_dual": series.i_dual,
        "parity": series.parity.label(),
        "max_normalized": series.max_normalized,
        "positive": series.positive,
    });
    write_sidecar(&a.out, cli, "fourier", a, std::slice::from_ref(&a.out), extra)
}

fn run_rotation(cli: &Cli, a: &RotationArgs) -> anyhow::Result<()> {
    let coupling = coupling_of(a.coupling)?;
    let alpha = a.alpha.expand(2)?.alpha;
    let energies = a.energy.values();
    let rows = energies
        .par_iter()
        .map(|&e| rotation_number(&coupling, alpha, e, a.n_iter))
        .collect::<harperlab::Result<Vec<_>>>()?;
    let mut w = csv_writer(&a.out, &["E", "rho", "drift"])?;
    for (e, r) in energies.iter().zip(&rows) {
        w.write_record([fmt(*e), fmt(r.rho), fmt(r.drift)])?;
    }
    w.flush()?;
    write_sidecar(&a.out, cli, "rotation", a, std::slice::from_ref(&a.out), json!({ "alpha": alpha }))
}

/// Returns whether every criterion passed.
fn run_verify(cli: &Cli, a: &VerifyArgs) -> anyhow::Result<bool> {
    let budget = if a.quick { Budget::quick() } else { Budget::full() };
    let results = run_all(&budget);
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria passed", results.len());
    let doc: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "pass": r.pass,
                "detail": r.detail,
                "seconds": r.elapsed.as_secs_f64(),
                "metrics": r.metrics.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
            })
        })
        .collect();
    std::fs::write(&a.out, serde_json::to_string_pretty(&doc)? + "\n")?;
    write_sidecar(
        &a.out,
        cli,
        "verify",
        a,
        std::slice::from_ref(&a.out),
        json!({ "passed": passed, "total": results.len() }),
    )?;
    Ok(passed == results.len())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    match &cli.command {
        Command::Cf(a) => run_cf(cli, a)?,
        Command::Esprod(a) => run_esprod(cli, a)?,
        Command::PhaseDiagram(a) => run_phase(cli, a)?,
        Command::Lyapunov(a) => run_lyapunov(cli, a)?,
        Command::Dos(a) => run_dos(cli, a)?,
        Command::Fourier(a) => run_fourier(cli, a)?,
        Command::Rotation(a) => run_rotation(cli, a)?,
        Command::Verify(a) => return run_verify(cli, a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let name = err.downcast_ref::<harperlab::Error>().map_or("IoError", |e| e.name());
            eprintln!("error: {name}: {err:#}");
            ExitCode::from(1)
        }
    }
}
