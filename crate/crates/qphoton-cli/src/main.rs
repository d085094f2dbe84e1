//! Command-line front end: configures an experiment, runs it
//! deterministically from a seed, and writes tables and a manifest into an
//! output directory.
//!
//! Every run is fully determined by (configuration, seed); re-running with
//! the same inputs reproduces the output files byte for byte, except for the
//! `timing` object of the manifest, which is kept in a single isolated field.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-guard failure,
//! 4 `--check` failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qphoton::error::Error as LibError;
use qphoton::fisher::{fisher_total, min_trace_search, mle_estimate, trace_inverse_local};
use qphoton::qfi::{classification_row, optimal_bound, qfi_total, ClassificationRow};
use qphoton::qumode::{
    estimate_trace, factor, sample_momentum, trace_shots_for_error, EigenphaseSpectrum,
    QumodeProbe,
};
use qphoton::states::{named_state, EulerAngles, StateKind};
use qphoton::thermo::{
    entropy_distributions, fluctuation_report, r_from_blackhole, r_from_cosmology, r_from_unruh,
    work_distribution, CosmologyParams, SqueezeQuench,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Photonic-probe metrology and qumode trace-estimation experiments.
#[derive(Parser, Debug)]
#[command(name = "qphoton", version, about)]
struct Cli {
    /// RNG seed; together with the configuration it determines the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for tables and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker thread count (informational; output ordering is canonical
    /// regardless). The QPHOTON_THREADS environment variable overrides it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Plain-text key=value configuration file; flags override file entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Verify the run's documented targets; failures exit with code 4.
    #[arg(long, global = true)]
    check: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Minimize the local precision trace over processes for a probe state.
    FisherMin {
        /// Probe state: noon|hb|yurke-a|yurke-b|fock|symmetric-pair.
        #[arg(long)]
        state: Option<String>,
        /// Total photon number N.
        #[arg(long)]
        n: Option<usize>,
        /// Occupation M (fock / symmetric-pair only).
        #[arg(long)]
        m: Option<usize>,
        /// Grid points per angle for the coarse search.
        #[arg(long)]
        grid: Option<usize>,
        /// Nelder-Mead refinement iterations.
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Tabulate bound-saturation and optimality for the named states.
    QfiTable {
        /// Largest photon number to classify.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Simulate maximum-likelihood estimation of a process.
    Mle {
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// True process angles (radians).
        #[arg(long)]
        psi1: Option<f64>,
        #[arg(long)]
        psi2: Option<f64>,
        #[arg(long)]
        psi3: Option<f64>,
        /// Detection events per measurement basis.
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Estimate a normalized unitary trace from momentum samples.
    QumodeTrace {
        /// Probe squeezing s0.
        #[arg(long)]
        s0: Option<f64>,
        /// Additive error target δ (sets the shot budget).
        #[arg(long)]
        delta: Option<f64>,
        /// Spectrum dimension (random eigenphases, unit weights).
        #[arg(long)]
        dim: Option<u64>,
        /// Histogram bins for the sampled-momentum CSV.
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Factor an odd composite via order finding on sampled eigenphases.
    QumodeFactor {
        /// Composite to factor.
        #[arg(long)]
        n: Option<u64>,
        /// Probe resolution s0·τ (default N²).
        #[arg(long)]
        s0tau: Option<f64>,
        /// Register qubits of the probe.
        #[arg(long)]
        qubits: Option<u32>,
        /// Maximum order-finding rounds.
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Work and entropy-production statistics of a squeezing quench.
    ThermoReport {
        /// Scenario: manual|cosmology|unruh|blackhole.
        #[arg(long)]
        scenario: Option<String>,
        /// Pre-quench frequency ω (manual).
        #[arg(long)]
        omega: Option<f64>,
        /// Post-quench frequency ω̃ (manual; defaults to ω).
        #[arg(long)]
        omega_out: Option<f64>,
        /// Squeezing parameter r (manual).
        #[arg(long)]
        r: Option<f64>,
        /// Initial temperature (manual and cosmology).
        #[arg(long)]
        temp: Option<f64>,
        /// Expansion volume ε (cosmology).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Expansion rate σ (cosmology).
        #[arg(long)]
        sigma: Option<f64>,
        /// Mode momentum k (cosmology).
        #[arg(long)]
        k: Option<f64>,
        /// Field mass m (cosmology).
        #[arg(long)]
        mass: Option<f64>,
        /// Proper acceleration a (unruh).
        #[arg(long)]
        accel: Option<f64>,
        /// Black-hole mass M (blackhole).
        #[arg(long)]
        mass_bh: Option<f64>,
    },
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum RunError {
    /// Invalid configuration → exit 2.
    Config(String),
    /// Numerical guard or search failure surfaced from the library → exit 3.
    Numerical(String),
    /// A --check assertion failed → exit 4.
    Check(String),
}

impl From<LibError> for RunError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Domain(m) => RunError::Config(format!("domain error: {m}")),
            LibError::Numerical(m) => RunError::Numerical(format!("numerical guard: {m}")),
            LibError::Search(m) => RunError::Numerical(format!("search failure: {m}")),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Config(format!("i/o error: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            let (kind, msg, code) = match e {
                RunError::Config(m) => ("config", m, 2),
                RunError::Numerical(m) => ("numerical", m, 3),
                RunError::Check(m) => ("check", m, 4),
            };
            eprintln!("{}", json!({ "error": msg, "kind": kind }));
            code
        }
    };
    std::process::exit(code);
}

// ---------------------------------------------------------------------------
// Configuration plumbing
// ---------------------------------------------------------------------------

/// key=value file contents; '#' starts a comment, blank lines are ignored.
struct FileCfg(BTreeMap<String, String>);

impl FileCfg {
    fn load(path: Option<&Path>) -> Result<Self, RunError> {
        let mut map = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", p.display())))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    RunError::Config(format!(
                        "{}:{}: expected key=value, got {line:?}",
                        p.display(),
                        lineno + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(FileCfg(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, RunError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                RunError::Config(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }
}

/// Resolution order: command-line flag, then config file, then default.
fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    file: &FileCfg,
    key: &str,
    default: T,
) -> Result<T, RunError> {
    Ok(flag.or(file.get(key)?).unwrap_or(default))
}

fn resolve_opt<T: FromStr>(
    flag: Option<T>,
    file: &FileCfg,
    key: &str,
) -> Result<Option<T>, RunError> {
    Ok(match flag {
        Some(v) => Some(v),
        None => file.get(key)?,
    })
}

fn parse_state(name: &str) -> Result<StateKind, RunError> {
    Ok(match name {
        "noon" => StateKind::Noon,
        "hb" => StateKind::Hb,
        "yurke-a" => StateKind::YurkeA,
        "yurke-b" => StateKind::YurkeB,
        "fock" => StateKind::Fock,
        "symmetric-pair" => StateKind::SymmetricPair,
        other => {
            return Err(RunError::Config(format!(
                "unknown state {other:?}; expected noon|hb|yurke-a|yurke-b|fock|symmetric-pair"
            )))
        }
    })
}

/// 17 significant digits, '.' decimal, no separators.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), RunError> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| RunError::Config(format!("serialization: {e}")))?;
    text.push('\n');
    write_file(dir, name, &text)
}

// ---------------------------------------------------------------------------
// Run driver
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), RunError> {
    let started = Instant::now();
    let file = FileCfg::load(cli.config.as_deref())?;

    let seed = resolve(cli.seed, &file, "seed", 0u64)?;
    let out = match cli.out {
        Some(p) => p,
        None => PathBuf::from(file.0.get("out").map(String::as_str).unwrap_or("out")),
    };
    let threads = match std::env::var("QPHOTON_THREADS") {
        Ok(raw) => raw
            .parse::<usize>()
            .map_err(|_| RunError::Config(format!("QPHOTON_THREADS: cannot parse {raw:?}")))?,
        Err(_) => resolve(cli.threads, &file, "threads", 1usize)?,
    };
    std::fs::create_dir_all(&out)?;

    // Resolved configuration, echoed into the manifest.
    let mut echo: BTreeMap<String, String> = BTreeMap::new();
    echo.insert("seed".into(), seed.to_string());
    echo.insert("out".into(), out.display().to_string());
    echo.insert("threads".into(), threads.to_string());

    let subcommand = match &cli.cmd {
        Cmd::FisherMin { .. } => "fisher-min",
        Cmd::QfiTable { .. } => "qfi-table",
        Cmd::Mle { .. } => "mle",
        Cmd::QumodeTrace { .. } => "qumode-trace",
        Cmd::QumodeFactor { .. } => "qumode-factor",
        Cmd::ThermoReport { .. } => "thermo-report",
    };
    echo.insert("subcommand".into(), subcommand.to_string());

    match &cli.cmd {
        Cmd::FisherMin { state, n, m, grid, refine } => run_fisher_min(
            &out, &file, &mut echo, cli.check, seed,
            state.clone(), *n, *m, *grid, *refine,
        )?,
        Cmd::QfiTable { n_max } => run_qfi_table(&out, &file, &mut echo, cli.check, *n_max)?,
        Cmd::Mle { state, n, m, psi1, psi2, psi3, shots } => run_mle(
            &out, &file, &mut echo, cli.check, seed,
            state.clone(), *n, *m, *psi1, *psi2, *psi3, *shots,
        )?,
        Cmd::QumodeTrace { s0, delta, dim, bins } => run_qumode_trace(
            &out, &file, &mut echo, cli.check, seed, *s0, *delta, *dim, *bins,
        )?,
        Cmd::QumodeFactor { n, s0tau, qubits, max_rounds } => run_qumode_factor(
            &out, &file, &mut echo, cli.check, seed, *n, *s0tau, *qubits, *max_rounds,
        )?,
        Cmd::ThermoReport {
            scenario, omega, omega_out, r, temp, epsilon, sigma, k, mass, accel, mass_bh,
        } => run_thermo_report(
            &out, &file, &mut echo, cli.check,
            scenario.clone(), *omega, *omega_out, *r, *temp,
            *epsilon, *sigma, *k, *mass, *accel, *mass_bh,
        )?,
    }

    // The timing object is the only non-reproducible part of the output.
    let manifest = json!({
        "config": echo,
        "seed": seed,
        "versions": {
            "qphoton": qphoton_version(),
            "qphoton-cli": env!("CARGO_PKG_VERSION"),
        },
        "timing": {
            "unix_time_s": std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            "wall_ms": started.elapsed().as_millis() as u64,
        },
    });
    write_json(&out, "manifest.json", &manifest)
}

fn qphoton_version() -> &'static str {
    // The library crate is path-pinned, so its version matches the binary's.
    env!("CARGO_PKG_VERSION")
}

// ---------------------------------------------------------------------------
// fisher-min
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn run_fisher_min(
    out: &Path,
    file: &FileCfg,
    echo: &mut BTreeMap<String, String>,
    check: bool,
    seed: u64,
    state_flag: Option<String>,
    n_flag: Option<usize>,
    m_flag: Option<usize>,
    grid_flag: Option<usize>,
    refine_flag: Option<usize>,
) -> Result<(), RunError> {
    let state_name = resolve(state_flag, file, "state", "hb".to_string())?;
    let kind = parse_state(&state_name)?;
    let n = resolve(n_flag, file, "n", 4usize)?;
    let m = resolve_opt(m_flag, file, "m")?;
    let grid = resolve(grid_flag, file, "grid", 24usize)?;
    let refine = resolve(refine_flag, file, "refine", 300usize)?;
    echo.insert("state".into(), state_name);
    echo.insert("n".into(), n.to_string());
    if let Some(m) = m {
        echo.insert("m".into(), m.to_string());
    }
    echo.insert("grid".into(), grid.to_string());
    echo.insert("refine".into(), refine.to_string());

    let probe = named_state(kind, n, m)?;
    let result = min_trace_search(&probe, grid, refine, seed)?;

    let mut csv = String::from("psi1 (rad),psi2 (rad),psi3 (rad),trace_inv (dimensionless)\n");
    for s in &result.landscape {
        let _ = writeln!(csv, "{},{},{},{}", num(s.psi1), num(s.psi2), num(s.psi3), num(s.trace_inv));
    }
    write_file(out, "landscape.csv", &csv)?;

    let quantum_bound = {
        let qfi = qfi_total(&probe)?;
        qfi.entries
            .try_inverse()
            .map(|inv| inv.trace())
            .ok_or_else(|| RunError::Numerical("quantum information matrix is singular".into()))?
    };
    write_json(
        out,
        "minimum.json",
        &json!({
            "psi1_rad": result.psi_star.psi1,
            "psi2_rad": result.psi_star.psi2,
            "psi3_rad": result.psi_star.psi3,
            "value": result.value,
            "quantum_trace_inverse": quantum_bound,
        }),
    )?;

    if check {
        if result.value < quantum_bound - 1e-9 {
            return Err(RunError::Check(format!(
                "minimum {} undercuts the quantum bound {}",
                result.value, quantum_bound
            )));
        }
        if kind == StateKind::Hb {
            let target = 3.0 / (n as f64 * (n as f64 + 2.0));
            if (result.value - target).abs() > 1e-3 {
                return Err(RunError::Check(format!(
                    "twin-Fock minimum {} differs from 3/(N(N+2)) = {target} by more than 1e-3",
                    result.value
                )));
            }
        }
        let _ = optimal_bound(n); // bound is also recorded via minimum.json
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// qfi-table
// ---------------------------------------------------------------------------

fn classification_rows(n_max: usize) -> Result<Vec<ClassificationRow>, LibError> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        rows.push(classification_row(StateKind::Noon, n, None)?);
        if n >= 2 && n % 2 == 0 {
            rows.push(classification_row(StateKind::Hb, n, None)?);
            rows.push(classification_row(StateKind::YurkeA, n, None)?);
            rows.push(classification_row(StateKind::YurkeB, n, None)?);
        }
        for m in 0..=n {
            rows.push(classification_row(StateKind::Fock, n, Some(m))?);
        }
        for m in 0..=n / 2 {
            rows.push(classification_row(StateKind::SymmetricPair, n, Some(m))?);
        }
    }
    Ok(rows)
}

fn run_qfi_table(
    out: &Path,
    file: &FileCfg,
    echo: &mut BTreeMap<String, String>,
    check: bool,
    n_max_flag: Option<usize>,
) -> Result<(), RunError> {
    let n_max = resolve(n_max_flag, file, "n_max", 10usize)?;
    echo.insert("n_max".into(), n_max.to_string());

    let rows = classification_rows(n_max).map_err(RunError::from)?;
    let mut csv = String::from(
        "state,n (photons),m (photons),saturates,optimal,trace_inv_qfi (dimensionless)\n",
    );
    for row in &rows {
        let name = match row.kind {
            StateKind::Noon => "noon",
            StateKind::Hb => "hb",
            StateKind::YurkeA => "yurke-a",
            StateKind::YurkeB => "yurke-b",
            StateKind::Fock => "fock",
            StateKind::SymmetricPair => "symmetric-pair",
        };
        let _ = writeln!(
            csv,
            "{name},{},{},{},{},{}",
            row.n,
            row.m.map(|m| m.to_string()).unwrap_or_default(),
            row.saturates,
            row.optimal,
            row.trace_inv_qfi.map(num).unwrap_or_default(),
        );
    }
    write_file(out, "classification.csv", &csv)?;

    if check {
        for row in &rows {
            let expect = match row.kind {
                StateKind::Fock => Some(2 * row.m.unwrap() == row.n),
                StateKind::SymmetricPair => Some(2 * row.m.unwrap() != row.n.wrapping_sub(1)),
                _ => None,
            };
            if let Some(want) = expect {
                if row.saturates != want {
                    return Err(RunError::Check(format!(
                        "{:?} N={} M={:?}: saturation {} contradicts the closed-form rule",
                        row.kind, row.n, row.m, row.saturates
                    )));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// mle
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn run_mle(
    out: &Path,
    file: &FileCfg,
    echo: &mut BTreeMap<String, String>,
    check: bool,
    seed: u64,
    state_flag: Option<String>,
    n_flag: Option<usize>,
    m_flag: Option<usize>,
    psi1_flag: Option<f64>,
    psi2_flag: Option<f64>,
    psi3_flag: Option<f64>,
    shots_flag: Option<usize>,
) -> Result<(), RunError> {
    let state_name = resolve(state_flag, file, "state", "hb".to_string())?;
    let kind = parse_state(&state_name)?;
    let n = resolve(n_flag, file, "n", 4usize)?;
    let m = resolve_opt(m_flag, file, "m")?;
    let psi1 = resolve(psi1_flag, file, "psi1", 0.7f64)?;
    let psi2 = resolve(psi2_flag, file, "psi2", 1.2f64)?;
    let psi3 = resolve(psi3_flag, file, "psi3", 0.4f64)?;
    let shots = resolve(shots_flag, file, "shots", 1000usize)?;
    echo.insert("state".into(), state_name);
    echo.insert("n".into(), n.to_string());
    if let Some(m) = m {
        echo.insert("m".into(), m.to_string());
    }
    for (key, v) in [("psi1", psi1), ("psi2", psi2), ("psi3", psi3)] {
        echo.insert(key.into(), num(v));
    }
    echo.insert("shots".into(), shots.to_string());

    let probe = named_state(kind, n, m)?;
    let psi_true = EulerAngles::new(psi1, psi2, psi3)?;
    let result = mle_estimate(&probe, psi_true, shots, seed)?;

    // Cramér-Rao reference: trace of the inverse per-shot Fisher matrix,
    // scaled by the shot count.
    let crlb_trace =
        trace_inverse_local(&fisher_total(&probe, psi_true)?, psi_true)? / shots as f64;

    let cov: Vec<Vec<f64>> = (0..3)
        .map(|i| (0..3).map(|j| result.emp_cov[(i, j)]).collect())
        .collect();
    write_json(
        out,
        "mle.json",
        &json!({
            "psi_true_rad": [psi1, psi2, psi3],
            "psi_hat_rad": [result.psi_hat.psi1, result.psi_hat.psi2, result.psi_hat.psi3],
            "empirical_covariance_rad2": cov,
            "repetitions": result.reps,
            "crlb_trace_local_rad2": crlb_trace,
        }),
    )?;

    if check {
        let wrap = |d: f64| (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
            - std::f64::consts::PI;
        let devs = [
            wrap(result.psi_hat.psi1 - psi1),
            wrap(result.psi_hat.psi2 - psi2),
            wrap(result.psi_hat.psi3 - psi3),
        ];
        if devs.iter().any(|d| d.abs() > 0.2) {
            return Err(RunError::Check(format!(
                "estimate deviates from the truth by {devs:?} rad (tolerance 0.2)"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// qumode-trace
// ---------------------------------------------------------------------------

fn random_spectrum(rng: &mut ChaCha8Rng, dim: u64) -> Result<EigenphaseSpectrum, LibError> {
    let entries: Vec<(f64, u64)> = (0..dim)
        .map(|_| (rng.gen_range(0.0..std::f64::consts::TAU), 1u64))
        .collect();
    EigenphaseSpectrum::new(entries, dim)
}

#[allow(clippy::too_many_arguments)]
fn run_qumode_trace(
    out: &Path,
    file: &FileCfg,
    echo: &mut BTreeMap<String, String>,
    check: bool,
    seed: u64,
    s0_flag: Option<f64>,
    delta_flag: Option<f64>,
    dim_flag: Option<u64>,
    bins_flag: Option<usize>,
) -> Result<(), RunError> {
    let s0 = resolve(s0_flag, file, "s0", 1.0f64)?;
    let delta = resolve(delta_flag, file, "delta", 0.05f64)?;
    let dim = resolve(dim_flag, file, "dim", 16u64)?;
    let bins = resolve(bins_flag, file, "bins", 80usize)?;
    echo.insert("s0".into(), num(s0));
    echo.insert("delta".into(), num(delta));
    echo.insert("dim".into(), dim.to_string());
    echo.insert("bins".into(), bins.to_string());
    if !(delta > 0.0) {
        return Err(RunError::Config(format!("delta = {delta} must be positive")));
    }
    if bins == 0 {
        return Err(RunError::Config("bins must be positive".into()));
    }

    let probe = QumodeProbe::new(s0, 1.0, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spectrum(&mut rng, dim)?;
    let shots = trace_shots_for_error(s0, delta);
    let est = estimate_trace(&spec, &probe, shots, seed)?;

    // Histogram of the same momentum batch for figure-style output.
    let batch = sample_momentum(&spec, &probe, shots, seed)?;
    let (lo, hi) = batch
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let mut counts = vec![0usize; bins];
    for &v in &batch.values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let mut csv = String::from("bin_center (rad),density (1/rad)\n");
    for (i, &c) in counts.iter().enumerate() {
        let center = lo + (i as f64 + 0.5) * width;
        let density = c as f64 / (shots as f64 * width);
        let _ = writeln!(csv, "{},{}", num(center), num(density));
    }
    write_file(out, "momentum_histogram.csv", &csv)?;

    let err = (est.estimate - est.analytic).norm();
    write_json(
        out,
        "trace.json",
        &json!({
            "estimate": { "re": est.estimate.re, "im": est.estimate.im },
            "analytic": { "re": est.analytic.re, "im": est.analytic.im },
            "abs_error": err,
            "shots": est.shots,
            "delta": delta,
        }),
    )?;

    if check && err > 3.0 * delta {
        return Err(RunError::Check(format!(
            "trace error {err} exceeds 3δ = {} at the prescribed shot budget",
            3.0 * delta
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// qumode-factor
// ---------------------------------------------------------------------------

fn run_qumode_factor(
    out: &Path,
    file: &FileCfg,
    echo: &mut BTreeMap<String, String>,
    check: bool,
    seed: u64,
    n_flag: Option<u64>,
    s0tau_flag: Option<f64>,
    qubits_flag: Option<u32>,
    max_rounds_flag: Option<usize>,
) -> Result<(), RunError> {
    let n = resolve(n_flag, file, "n", 15u64)?;
    let s0tau = resolve(s0tau_flag, file, "s0tau", (n * n) as f64)?;
    let qubits = resolve(qubits_flag, file, "qubits", 8u32)?;
    let max_rounds = resolve(max_rounds_flag, file, "max_rounds", 64usize)?;
    echo.insert("n".into(), n.to_string());
    echo.insert("s0tau".into(), num(s0tau));
    echo.insert("qubits".into(), qubits.to_string());
    echo.insert("max_rounds".into(), max_rounds.to_string());

    let probe = QumodeProbe::new(1.0, s0tau, qubits)?;
    let outcome = factor(n, &probe, seed, max_rounds)?;

    let rounds: Vec<serde_json::Value> = outcome
        .transcript
        .iter()
        .map(|r| {
            json!({
                "round": r.round,
                "base_q": r.q,
                "momentum_sample_rad": r.p_e,
                "continued_fraction": { "numerator": r.cf.0, "denominator": r.cf.1 },
                "note": r.note,
                "factor": r.factor,
            })
        })
        .collect();
    write_json(
        out,
        "transcript.json",
        &json!({
            "composite": n,
            "factor": outcome.factor,
            "rounds_used": outcome.rounds_used,
            "rounds": rounds,
        }),
    )?;

    if check {
        match outcome.factor {
            Some(f) if f > 1 && f < n && n % f == 0 => {}
            Some(f) => {
                return Err(RunError::Check(format!("{f} is not a nontrivial factor of {n}")))
            }
            None => {
                return Err(RunError::Check(format!(
                    "no factor of {n} found in {max_rounds} rounds"
                )))
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// thermo-report
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn run_thermo_report(
    out: &Path,
    file: &FileCfg,
    echo: &mut BTreeMap<String, String>,
    check: bool,
    scenario_flag: Option<String>,
    omega_flag: Option<f64>,
    omega_out_flag: Option<f64>,
    r_flag: Option<f64>,
    temp_flag: Option<f64>,
    epsilon_flag: Option<f64>,
    sigma_flag: Option<f64>,
    k_flag: Option<f64>,
    mass_flag: Option<f64>,
    accel_flag: Option<f64>,
    mass_bh_flag: Option<f64>,
) -> Result<(), RunError> {
    let scenario = resolve(scenario_flag, file, "scenario", "manual".to_string())?;
    echo.insert("scenario".into(), scenario.clone());

    let quench = match scenario.as_str() {
        "manual" => {
            let omega = resolve(omega_flag, file, "omega", 1.0f64)?;
            let omega_out = resolve(omega_out_flag, file, "omega_out", omega)?;
            let r = resolve(r_flag, file, "r", 0.5f64)?;
            let temp = resolve(temp_flag, file, "temp", 1.0f64)?;
            echo.insert("omega".into(), num(omega));
            echo.insert("omega_out".into(), num(omega_out));
            echo.insert("r".into(), num(r));
            echo.insert("temp".into(), num(temp));
            SqueezeQuench::new(omega, omega_out, r, temp)?
        }
        "cosmology" => {
            let epsilon = resolve(epsilon_flag, file, "epsilon", 1.0f64)?;
            let sigma = resolve(sigma_flag, file, "sigma", 1.0f64)?;
            let k = resolve(k_flag, file, "k", 1.0f64)?;
            let mass = resolve(mass_flag, file, "mass", 1.0f64)?;
            let temp = resolve(temp_flag, file, "temp", 1.0f64)?;
            for (key, v) in [
                ("epsilon", epsilon),
                ("sigma", sigma),
                ("k", k),
                ("mass", mass),
                ("temp", temp),
            ] {
                echo.insert(key.into(), num(v));
            }
            let sf = r_from_cosmology(&CosmologyParams { epsilon, sigma, k, mass })?;
            SqueezeQuench::new(sf.omega_in, sf.omega_out, sf.r, temp)?
        }
        "unruh" => {
            let accel = resolve(accel_flag, file, "accel", 10.0f64)?;
            let omega = resolve(omega_flag, file, "omega", 1.0f64)?;
            echo.insert("accel".into(), num(accel));
            echo.insert("omega".into(), num(omega));
            let h = r_from_unruh(accel, omega)?;
            SqueezeQuench::new(omega, omega, h.r, h.temperature)?
        }
        "blackhole" => {
            let mass_bh = resolve(mass_bh_flag, file, "mass_bh", 0.02f64)?;
            let omega = resolve(omega_flag, file, "omega", 1.0f64)?;
            echo.insert("mass_bh".into(), num(mass_bh));
            echo.insert("omega".into(), num(omega));
            let h = r_from_blackhole(mass_bh, omega)?;
            SqueezeQuench::new(omega, omega, h.r, h.temperature)?
        }
        other => {
            return Err(RunError::Config(format!(
                "unknown scenario {other:?}; expected manual|cosmology|unruh|blackhole"
            )))
        }
    };

    let (expansion, contraction) = entropy_distributions(&quench)?;
    let (forward, _reverse) = work_distribution(&quench)?;
    let report = fluctuation_report(&quench)?;

    // Entropy table: row per expansion atom, paired with the contraction
    // atom at the mirrored value (the detailed fluctuation relation predicts
    // P_E(s) = e^s · P_C(−s)).
    let con: BTreeMap<i64, f64> = contraction.atoms.iter().map(|a| (a.delta, a.p)).collect();
    let mut csv =
        String::from("s (dimensionless),p_expansion (probability),p_contraction_mirror (probability),exp_s_times_p_contraction (probability)\n");
    let mut crooks_defect: f64 = 0.0;
    for atom in &expansion.atoms {
        let partner = con.get(&(-atom.delta)).copied().unwrap_or(0.0);
        let restored = atom.s.exp() * partner;
        if atom.p > 1e-12 && partner > 0.0 {
            crooks_defect = crooks_defect.max((restored / atom.p - 1.0).abs());
        }
        let _ = writeln!(csv, "{},{},{},{}", num(atom.s), num(atom.p), num(partner), num(restored));
    }
    write_file(out, "entropy.csv", &csv)?;

    let mut wcsv = String::from(
        "m_tot (quanta),n_tot (quanta),w (energy units),p_forward (probability)\n",
    );
    let mut atoms = forward.atoms.clone();
    atoms.sort_by_key(|a| (a.n_tot, a.m_tot));
    for a in &atoms {
        let _ = writeln!(wcsv, "{},{},{},{}", a.m_tot, a.n_tot, num(a.w), num(a.p));
    }
    write_file(out, "work.csv", &wcsv)?;

    let jarzynski_ok = (report.jarzynski - 1.0).abs() < 1e-6;
    let entropy_identity_ok = (report.avg_s - report.w_fric_over_t).abs() < 1e-6
        && (report.avg_s - report.n_cr_identity).abs() < 1e-6;
    let friction_nonnegative = report.w_fric_over_t >= -1e-8;
    let crooks_ok = crooks_defect < 1e-8;
    write_json(
        out,
        "identities.json",
        &json!({
            "omega_in": quench.omega_in,
            "omega_out": quench.omega_out,
            "r": quench.r,
            "temp": quench.temp,
            "avg_entropy_production": report.avg_s,
            "w_fric_over_t_out": report.w_fric_over_t,
            "n_created_identity": report.n_cr_identity,
            "relative_entropy": report.rel_entropy,
            "jarzynski_average": report.jarzynski,
            "checks": {
                "jarzynski_equals_one": jarzynski_ok,
                "entropy_identities_agree": entropy_identity_ok,
                "friction_nonnegative": friction_nonnegative,
                "detailed_balance_pointwise": crooks_ok,
            },
        }),
    )?;

    if check && !(jarzynski_ok && entropy_identity_ok && friction_nonnegative && crooks_ok) {
        return Err(RunError::Check(format!(
            "identity checks failed: jarzynski={jarzynski_ok} entropy={entropy_identity_ok} \
             friction={friction_nonnegative} detailed_balance={crooks_ok}"
        )));
    }
    Ok(())
}
