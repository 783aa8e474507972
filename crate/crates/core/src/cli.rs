// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line experiment runner.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classical::{canonicalize_to_reset, ladder_clock, random_clock, ClassicalClock};
use crate::delay::{erlang_cdf, DelayConfig};
use crate::experiments::{self as ex, line_chart_svg, ExperimentError, Fig2bConfig, Table};
use crate::numfmt::fmt12;
use crate::quantum::{
    optimize_potential, quantum_accuracy, survival, AccuracyConfig, Evolution, InitialState, OptimizeConfig,
    OptimizeError, Optimum, PotentialFamily, PotentialJson, QuantumError, QuantumResetClockSpec, QuantumSpecJson,
    StateJson,
};
use crate::sim::{ks_critical_001, ks_statistic, sample_classical, sample_quantum, SimConfig, SimResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tickbench", version, about = "Accuracy experiments for classical and quantum clocks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "TICKBENCH_THREADS")]
    pub threads: Option<usize>,
    /// Output directory; CSV goes to stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// JSON file with default parameters; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Verify the expected relations and exit with 1 if any fails.
    #[arg(long, global = true)]
    pub check: bool,
    /// Also write an SVG line chart next to each CSV.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Fill the runtime_ms column.
    #[arg(long, global = true)]
    pub timing: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockKind {
    Ladder,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sinc,
    Diag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    QuasiIdeal,
    Swp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvolutionArg {
    Free,
    Conditional,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// R_j/j of Ladder Clocks for j = 1, 2, 3.
    Ladder {
        /// Dimensions: `1..8`, `2,4,8` or a single value.
        #[arg(long)]
        d: Option<String>,
        /// Relative tolerance of the check.
        #[arg(long)]
        tol: Option<f64>,
        /// Add this to every R1 before checking.
        #[arg(long, hide = true)]
        perturb: Option<f64>,
    },
    /// R1 of random classical clocks and of their canonical reset forms.
    ClassicalSweep {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Fraction of nonzero generator entries.
        #[arg(long)]
        density: Option<f64>,
    },
    /// Canonical reset form of a classical clock.
    Canonicalize {
        /// Clock JSON `{d, N, T, initial}`; a random clock when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        density: Option<f64>,
    },
    /// R1 of Quasi-Ideal clocks with the derived potential.
    QuantumR {
        #[arg(long)]
        d: Option<String>,
        /// Widths, as a comma-separated list.
        #[arg(long)]
        sigma0: Option<String>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        steps_per_site: Option<usize>,
    },
    /// Time-basis spread of clock states over one period.
    Fig2a {
        #[arg(long)]
        d: Option<usize>,
        /// Width of the narrow Quasi-Ideal state.
        #[arg(long)]
        sigma0: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, value_enum)]
        evolution: Option<EvolutionArg>,
    },
    /// Optimised R1 of Quasi-Ideal and SWP clocks against d.
    Fig2b {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Monte-Carlo tick times against the analytic delay.
    McCheck {
        #[arg(long, value_enum, default_value = "ladder")]
        clock: ClockKind,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        ticks: Option<usize>,
        /// Quantum clock JSON; an optimised SWP clock when absent.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Optimise the tick potential of a quantum clock.
    Optimize {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value = "sinc")]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "quasi-ideal")]
        state: StateArg,
        #[arg(long)]
        sigma0: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Sinc powers, comma-separated.
        #[arg(long)]
        powers: Option<String>,
        #[arg(long)]
        vary_sigma: bool,
    },
}

/// A number or a list of numbers in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(x) => vec![x.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

/// Defaults read from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub d: Option<OneOrMany<usize>>,
    pub sigma0: Option<OneOrMany<f64>>,
    pub eta: Option<f64>,
    pub trials: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub budget: Option<usize>,
    pub points: Option<usize>,
    pub density: Option<f64>,
    pub ticks: Option<usize>,
    pub tol: Option<f64>,
    pub check: Option<bool>,
    pub svg: Option<bool>,
}

/// Input or usage problem, reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Parses `a..b`, `a..=b` (both inclusive), `a,b,c` or `a`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| usage(format!("bad dimension '{x}'")));
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (num(a)?, num(b.trim_start_matches('='))?);
        (lo..=hi).collect()
    } else if s.is_empty() {
        Vec::new()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if out.is_empty() {
        return Err(usage(format!("empty dimension range '{s}'")));
    }
    if out.contains(&0) {
        return Err(usage("dimensions must be at least 1"));
    }
    Ok(out)
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{x}'"))))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(usage("empty list"));
    }
    Ok(v)
}

struct Ctx {
    cfg: ExperimentConfig,
    out: Option<PathBuf>,
    check: bool,
    svg: bool,
    timing: bool,
    seed: u64,
}

impl Ctx {
    fn dims(&self, flag: &Option<String>, default: &[usize]) -> Result<Vec<usize>> {
        match (flag, &self.cfg.d) {
            (Some(s), _) => parse_dims(s),
            (None, Some(d)) => {
                let v = d.to_vec();
                if v.is_empty() || v.contains(&0) {
                    return Err(usage("config d must be a non-empty list of positive integers"));
                }
                Ok(v)
            }
            (None, None) => Ok(default.to_vec()),
        }
    }

    fn dim(&self, flag: Option<usize>, default: usize) -> Result<usize> {
        let d = flag
            .or_else(|| self.cfg.d.as_ref().and_then(|d| d.to_vec().first().copied()))
            .unwrap_or(default);
        if d == 0 {
            return Err(usage("d must be at least 1"));
        }
        Ok(d)
    }

    fn sigma(&self, flag: Option<f64>, default: f64) -> f64 {
        flag.or_else(|| self.cfg.sigma0.as_ref().and_then(|s| s.to_vec().first().copied()))
            .unwrap_or(default)
    }

    /// Writes `name.csv` (and `name.svg`), or prints the CSV.
    fn emit(&self, name: &str, table: &Table, x: &str, log: bool) -> Result<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(format!("{name}.csv"));
                table
                    .write_csv(fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?)?;
                if self.svg {
                    if let Some(svg) = line_chart_svg(table, x, name, log) {
                        fs::write(dir.join(format!("{name}.svg")), svg)?;
                    }
                }
            }
            None => {
                let stdout = std::io::stdout();
                table.write_csv(stdout.lock())?;
                if self.svg {
                    eprintln!("note: --svg needs --out");
                }
            }
        }
        Ok(())
    }

    fn emit_json(&self, name: &str, value: &serde_json::Value) -> Result<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("{name}.json")), text)?;
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Outcome of one named check.
fn report(ok: bool, what: &str) -> bool {
    eprintln!("{} {what}", if ok { "PASS" } else { "FAIL" });
    ok
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_CHECK_FAILED
            }
        }
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<UsageError>()
            || matches!(c.downcast_ref::<ExperimentError>(), Some(ExperimentError::Invalid(_)))
            || matches!(c.downcast_ref::<QuantumError>(), Some(QuantumError::Invalid(_)))
            || c.is::<serde_json::Error>()
    })
}

fn load_config(path: &Option<PathBuf>) -> Result<ExperimentConfig> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<bool> {
    let cfg = load_config(&cli.common.config)?;
    let threads = cli.common.threads.or(cfg.threads);
    let ctx = Ctx {
        out: cli.common.out.clone().or_else(|| cfg.out.clone()),
        check: cli.common.check || cfg.check.unwrap_or(false),
        svg: cli.common.svg || cfg.svg.unwrap_or(false),
        timing: cli.common.timing,
        seed: cli.common.seed.or(cfg.seed).unwrap_or(0),
        cfg,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| anyhow!("thread pool: {e}"))?;
    pool.install(|| dispatch(&cli.command, &ctx))
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<bool> {
    match cmd {
        Command::Ladder { d, tol, perturb } => {
            let ds = ctx.dims(d, &(1..=8).collect::<Vec<_>>())?;
            let mut rows = ex::ladder_table(&ds, &DelayConfig::default())?;
            if let Some(p) = perturb {
                for r in &mut rows {
                    r.per_tick[0] += p;
                }
            }
            ctx.emit("ladder", &ex::ladder_csv(&rows), "d", false)?;
            let dev = ex::ladder_max_deviation(&rows);
            let tol = tol.or(ctx.cfg.tol).unwrap_or(1e-4);
            eprintln!("max relative deviation from d: {}", fmt12(dev));
            Ok(!ctx.check || report(dev <= tol, &format!("ladder R_j/j = d within {tol}")))
        }
        Command::ClassicalSweep { d, samples, density } => {
            let d = ctx.dim(*d, 6)?;
            let samples = samples.or(ctx.cfg.samples).unwrap_or(1000);
            let density = density.or(ctx.cfg.density).unwrap_or(0.6);
            let rows = ex::classical_sweep(d, samples, ctx.seed, density)?;
            ctx.emit("classical_sweep", &ex::sweep_csv(&rows), "sample", false)?;
            let max_raw = rows.iter().map(|r| r.r1).fold(f64::NEG_INFINITY, f64::max);
            let max_canon = rows.iter().map(|r| r.r1_canonical).fold(f64::NEG_INFINITY, f64::max);
            if !rows.is_empty() {
                eprintln!("max R1 {} (canonical {}) for d = {d}", fmt12(max_raw), fmt12(max_canon));
            }
            if !ctx.check {
                return Ok(true);
            }
            let bound = rows.iter().all(|r| r.r1 <= d as f64 + 1e-3 && r.r1_canonical <= d as f64 + 1e-3);
            let dominates = rows.iter().all(|r| r.r1_canonical >= r.r1 * (1.0 - 1e-9));
            Ok(report(bound, &format!("R1 <= {d}")) & report(dominates, "canonical R1 >= original R1"))
        }
        Command::Canonicalize { input, d, density } => {
            let clock = match input {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| usage(format!("reading {}: {e}", p.display())))?;
                    let value: serde_json::Value =
                        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                    ClassicalClock::from_json(value).map_err(|e| usage(e.to_string()))?
                }
                None => random_clock(ctx.dim(*d, 6)?, ctx.seed, density.or(ctx.cfg.density).unwrap_or(0.6))?,
            };
            let canon = canonicalize_to_reset(&clock)?;
            let (r0, r1) = (clock.exact_moments()?.accuracy, canon.exact_moments()?.accuracy);
            eprintln!("R1 original {} canonical {}", fmt12(r0), fmt12(r1));
            ctx.emit_json("canonical", &canon.to_json())?;
            Ok(!ctx.check
                || report(canon.is_reset(), "canonical clock is a reset clock")
                    & report(r1 >= r0 * (1.0 - 1e-9), "canonical R1 >= original R1"))
        }
        Command::QuantumR {
            d,
            sigma0,
            eta,
            steps_per_site,
        } => {
            let ds = ctx.dims(d, &[8, 16, 32])?;
            let sigmas = match (sigma0, &ctx.cfg.sigma0) {
                (Some(s), _) => parse_floats(s)?,
                (None, Some(s)) => s.to_vec(),
                (None, None) => vec![2.0],
            };
            let eta = eta.or(ctx.cfg.eta).unwrap_or(0.25);
            let acc = AccuracyConfig {
                steps_per_site: steps_per_site.unwrap_or(AccuracyConfig::default().steps_per_site),
                ..AccuracyConfig::default()
            };
            let rows = ex::quantum_r_sweep(&ds, &sigmas, eta, &acc)?;
            ctx.emit("quantum_r", &ex::quantum_csv(&rows, ctx.timing), "d", true)?;
            Ok(!ctx.check || report(rows.iter().all(|r| r.r1.is_finite() && r.r1 > 0.0), "R1 finite and positive"))
        }
        Command::Fig2a {
            d,
            sigma0,
            points,
            evolution,
        } => {
            let d = ctx.dim(*d, 13)?;
            let small = ctx.sigma(*sigma0, 1.8);
            let points = points.or(ctx.cfg.points).unwrap_or(201);
            let evolution = match evolution.unwrap_or(EvolutionArg::Free) {
                EvolutionArg::Free => Evolution::Free,
                EvolutionArg::Conditional => Evolution::Conditional,
            };
            let rows = ex::fig2a(d, small, points, evolution)?;
            ctx.emit("fig2a", &ex::fig2a_csv(&rows), "t", false)?;
            if !ctx.check {
                return Ok(true);
            }
            let mid = rows.iter().min_by(|a, b| (a.t - 0.5).abs().total_cmp(&(b.t - 0.5).abs())).expect("rows");
            let early: Vec<_> = rows.iter().filter(|r| r.t > 0.0 && r.t <= 0.25).collect();
            Ok(report(
                mid.swp > mid.quasi_sqrt_d && mid.quasi_sqrt_d > 0.0,
                "mid-period DeltaC(SWP) > DeltaC(sqrt d) > 0",
            ) & report(
                !early.is_empty() && early.iter().all(|r| r.quasi_1p8 < r.quasi_sqrt_d),
                "early DeltaC(narrow) < DeltaC(sqrt d)",
            ))
        }
        Command::Fig2b { d, eta, budget } => {
            let ds = ctx.dims(d, &[2, 4, 8, 16, 32])?;
            let fc = Fig2bConfig {
                eta: eta.or(ctx.cfg.eta).unwrap_or(0.25),
                budget: budget.or(ctx.cfg.budget).unwrap_or(150),
                seed: ctx.seed,
                ..Fig2bConfig::default()
            };
            let rows = ex::fig2b(&ds, &fc)?;
            ctx.emit("fig2b", &ex::fig2b_csv(&rows), "d", true)?;
            if !ctx.check {
                return Ok(true);
            }
            let small = rows
                .iter()
                .filter(|r| r.d == 2)
                .all(|r| r.r1_quasi_ideal >= 3.8 && r.r1_swp >= 3.8);
            let large = rows.iter().filter(|r| r.d >= 16).all(|r| r.r1_quasi_ideal > r.r1_swp);
            Ok(report(small, "d = 2 reaches R1 >= 3.8") & report(large, "Quasi-Ideal beats SWP for d >= 16"))
        }
        Command::McCheck {
            clock,
            d,
            trials,
            dt,
            ticks,
            spec,
        } => mc_check(ctx, *clock, *d, *trials, *dt, *ticks, spec.as_deref()),
        Command::Optimize {
            d,
            family,
            state,
            sigma0,
            eta,
            budget,
            powers,
            vary_sigma,
        } => {
            let d = ctx.dim(*d, 8)?;
            let eta = eta.or(ctx.cfg.eta).unwrap_or(0.25);
            let init = match state {
                StateArg::QuasiIdeal => InitialState::QuasiIdeal {
                    sigma0: ctx.sigma(*sigma0, ex::fig2b_sigma(d, eta)),
                    n0: None,
                    k0: 0.0,
                },
                StateArg::Swp => InitialState::Swp { k: 0 },
            };
            let fam = match family {
                FamilyArg::Diag => PotentialFamily::Diag {
                    vary_sigma: *vary_sigma,
                },
                FamilyArg::Sinc => PotentialFamily::Sinc {
                    powers: match powers {
                        Some(p) => parse_floats(p)?.into_iter().map(|x| x as u32).collect(),
                        None => vec![1, 2, 4],
                    },
                    vary_sigma: *vary_sigma,
                },
            };
            let mut oc = OptimizeConfig::new(fam, init, budget.or(ctx.cfg.budget).unwrap_or(300));
            oc.seed = ctx.seed;
            let (opt, converged) = match optimize_potential(d, &oc) {
                Ok(o) => (o, true),
                Err(OptimizeError::BudgetExhausted(o)) => (*o, false),
                Err(e) => return Err(e.into()),
            };
            eprintln!(
                "R1 {} after {} evaluations{}",
                fmt12(opt.r1),
                opt.evaluations,
                if converged { "" } else { " (budget exhausted)" }
            );
            let spec = optimum_spec(d, &oc, &opt);
            ctx.emit_json("optimum", &serde_json::json!({ "optimum": opt, "spec": spec }))?;
            if ctx.out.is_some() {
                ctx.emit_json("clock", &serde_json::to_value(&spec)?)?;
            }
            Ok(!ctx.check || report(opt.r1.is_finite() && opt.r1 > 0.0, "optimised R1 finite"))
        }
    }
}

/// Spec JSON that reproduces an optimum.
pub fn optimum_spec(d: usize, oc: &OptimizeConfig, opt: &Optimum) -> QuantumSpecJson {
    let (state, sigma0, n0, k0) = match oc.state {
        InitialState::QuasiIdeal { sigma0, n0, k0 } => (StateJson::QuasiIdeal, Some(opt.sigma0.unwrap_or(sigma0)), n0, k0),
        InitialState::Swp { k } => (StateJson::Swp, None, None, k as f64),
    };
    QuantumSpecJson {
        d,
        omega: oc.omega,
        sigma0,
        n0,
        k0,
        eta: 1.0,
        state,
        potential: PotentialJson::Diag {
            values: opt.v_diag.iter().map(|v| v / oc.omega).collect(),
        },
    }
}

/// The SWP clock with the best free potential for `d`.
fn default_quantum_clock(d: usize, seed: u64) -> Result<QuantumResetClockSpec> {
    let mut oc = OptimizeConfig::new(
        PotentialFamily::Diag { vary_sigma: false },
        InitialState::Swp { k: 0 },
        200 * d,
    );
    oc.seed = seed;
    let opt = match optimize_potential(d, &oc) {
        Ok(o) => o,
        Err(OptimizeError::BudgetExhausted(o)) => *o,
        Err(e) => return Err(e.into()),
    };
    Ok(optimum_spec(d, &oc, &opt).build()?)
}

fn mc_check(
    ctx: &Ctx,
    kind: ClockKind,
    d: Option<usize>,
    trials: Option<usize>,
    dt: Option<f64>,
    ticks: Option<usize>,
    spec: Option<&Path>,
) -> Result<bool> {
    let trials = trials.or(ctx.cfg.trials).unwrap_or(100_000);
    let dt = dt.or(ctx.cfg.dt).unwrap_or(1e-3);
    let ticks = ticks.or(ctx.cfg.ticks).unwrap_or(3);
    if trials < 100 {
        return Err(usage("mc-check needs at least 100 trials"));
    }
    let sc = SimConfig::new(ticks, trials, dt, ctx.seed);
    // Analytic mean, standard deviation and CDF of the first tick, and the
    // mean of tick j.
    let (result, mean1, sd1, cdf, mean_j): (SimResult, f64, f64, Box<dyn Fn(f64) -> f64>, Vec<f64>) = match kind {
        ClockKind::Ladder => {
            let d = ctx.dim(d, 4)?;
            let clock = ladder_clock(d)?;
            let exact: Vec<_> = clock
                .sequence_phase_types(ticks)?
                .iter()
                .map(|p| p.moments())
                .collect::<Result<_, _>>()?;
            let shape = d as u32;
            (
                sample_classical(&clock, &sc)?,
                exact[0].mean,
                exact[0].std_dev,
                Box::new(move |t| erlang_cdf(shape, t)),
                exact.iter().map(|m| m.mean).collect(),
            )
        }
        ClockKind::Quantum => {
            let spec = match spec {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| usage(format!("reading {}: {e}", p.display())))?;
                    let j: QuantumSpecJson =
                        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                    j.build()?
                }
                None => default_quantum_clock(ctx.dim(d, 2)?, ctx.seed)?,
            };
            let m = quantum_accuracy(&spec, &AccuracyConfig::default())?;
            let s2 = spec.clone();
            (
                sample_quantum(&spec, &sc)?,
                m.mean,
                m.std_dev,
                Box::new(move |t| 1.0 - survival(&s2, t).1),
                (1..=ticks).map(|j| j as f64 * m.mean).collect(),
            )
        }
    };
    if let Some(dir) = &ctx.out {
        fs::create_dir_all(dir)?;
        let mut f = std::io::BufWriter::new(fs::File::create(dir.join("mc.csv"))?);
        result.write_csv(&mut f)?;
        f.flush()?;
        result.write_summary_json(fs::File::create(dir.join("mc_summary.json"))?)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&result.summary())?);
    }
    let s = &result.stats[0];
    let ks = ks_statistic(&result.tick_times(1), cdf);
    let crit = ks_critical_001(result.tick_times(1).len());
    eprintln!(
        "tick 1: mean {} ± {} (exact {}), sd {} ± {} (exact {}), R {} ± {}, KS {} (critical {})",
        fmt12(s.mean),
        fmt12(s.se_mean),
        fmt12(mean1),
        fmt12(s.std_dev),
        fmt12(s.se_std_dev),
        fmt12(sd1),
        fmt12(s.accuracy),
        fmt12(s.se_accuracy),
        fmt12(ks),
        fmt12(crit)
    );
    if !ctx.check {
        return Ok(true);
    }
    let mut ok = report((s.mean - mean1).abs() <= 3.0 * s.se_mean, "mean within 3 SE");
    ok &= report((s.std_dev - sd1).abs() <= 3.0 * s.se_std_dev, "standard deviation within 3 SE");
    ok &= report(ks < crit, "KS test at alpha = 0.01");
    for (st, m) in result.stats.iter().zip(&mean_j).skip(1) {
        ok &= report((st.mean - m).abs() <= 3.0 * st.se_mean, &format!("tick {} mean within 3 SE", st.tick));
    }
    if result.samples.iter().any(|s| s.truncated) {
        bail!("some trials were truncated");
    }
    Ok(ok)
}
