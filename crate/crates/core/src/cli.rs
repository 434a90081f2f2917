//! The `efcp` command line: one subcommand per experiment, JSON configs,
//! JSON or CSV outputs.
//!
//! Exit codes: 0 success, 1 runtime error, 2 invalid configuration, 3 a
//! precondition refused the run, 4 a certification was inconclusive.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chains::{
    run_efcp_coordinate_with, run_efcp_matrix_with, Construction, EhrenfestParams, RunOptions,
};
use crate::error::Error;
use crate::paintbox::PaintboxLaw;
use crate::partitions::Coloring;
use crate::products::{
    collapse_diagnostic, estimate_lyapunov_with, Averaging, CollapseVerdict, LyapunovOptions,
    DEFAULT_M_MAX,
};
use crate::projections::{project_run, projected_mixing_equivalence};
use crate::tvlab::{
    cutoff_experiment, ehrenfest_bounds, ehrenfest_tv_curve, ehrenfest_upper_bound,
    ehrenfest_upper_time, mixing_profile, tv_exact_atomic, tv_lower_mc_profile,
    tv_upper_mc_profile, BlockDesign, CutoffOptions, MixingMethod, MixingOptions, TvEstimate,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// Environment variable for the worker count. Results never depend on it.
pub const THREADS_ENV: &str = "EFCP_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "efcp",
    version,
    about = "Exchangeable cut-and-paste chains: simulation, TV distances, mixing and cutoff"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Simulate an EFCP chain.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        thin: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Estimate Lyapunov exponents of the paintbox products.
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Look for simplex collapse along sampled products.
    Collapse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Distance between the chains started from two states, per step.
    Tv {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Mixing times on the block design.
    MixingTime {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Cutoff experiment over a grid of sizes.
    Cutoff {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Ehrenfest(alpha) distances and bounds.
    Ehrenfest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// Refresh fraction; the single-site chain when absent.
        #[arg(long)]
        alpha: Option<f64>,
        /// Exact distances instead of the closed-form bound.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Projected chains: exact mixing-time transfer, or a projected run.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        /// Simulate and project a trajectory instead.
        #[arg(long)]
        trajectory: bool,
        #[arg(long)]
        steps: Option<usize>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Simulate { .. } => "simulate",
            Cmd::Lyapunov { .. } => "lyapunov",
            Cmd::Collapse { .. } => "collapse",
            Cmd::Tv { .. } => "tv",
            Cmd::MixingTime { .. } => "mixing-time",
            Cmd::Cutoff { .. } => "cutoff",
            Cmd::Ehrenfest { .. } => "ehrenfest",
            Cmd::Project { .. } => "project",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Cmd::Simulate { common, .. }
            | Cmd::Lyapunov { common, .. }
            | Cmd::Collapse { common, .. }
            | Cmd::Tv { common, .. }
            | Cmd::MixingTime { common, .. }
            | Cmd::Cutoff { common, .. }
            | Cmd::Ehrenfest { common, .. }
            | Cmd::Project { common, .. } => common,
        }
    }
}

/// Which estimator `tv` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvMethod {
    ExactAtomic,
    UpperMc,
    LowerMc,
}

/// Every knob of every subcommand; each subcommand reads what it needs.
/// Flags override fields.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<PaintboxLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Color words such as `"1122"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0_tilde: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub averaging: Option<Averaging>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_method: Option<TvMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixing_method: Option<MixingMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov_replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_cap: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    reason: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid(_) | Error::Dimension(_) => EXIT_INVALID,
            Error::Refused(_) | Error::Budget { .. } => EXIT_REFUSED,
        };
        Failure {
            code,
            reason: e.to_string(),
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INVALID,
        reason: format!("field `{}`: {}", field, msg),
    }
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| invalid(field, "required"))
}

struct Output {
    body: String,
    code: i32,
}

/// Run the command line and return the exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second initialisation in the same process is harmless to ignore
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let name = cli.cmd.name();
    let result = load_config(cli.cmd.common()).and_then(|cfg| dispatch(&cli.cmd, cfg));
    match result {
        Ok(out) => match write_out(cli.cmd.common(), &out.body) {
            Ok(()) => out.code,
            Err(f) => report_failure(name, &f),
        },
        Err(f) => report_failure(name, &f),
    }
}

fn report_failure(command: &str, f: &Failure) -> i32 {
    let status = match f.code {
        EXIT_INVALID => "invalid_config",
        EXIT_REFUSED => "refused",
        EXIT_INCONCLUSIVE => "inconclusive",
        _ => "error",
    };
    let v = json!({"schema_version": SCHEMA_VERSION, "command": command, "status": status, "reason": f.reason});
    eprintln!("{}", v);
    f.code
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        None => ExperimentConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid("config", format!("cannot read {}: {}", path.display(), e)))?;
            serde_json::from_str(&text).map_err(|e| invalid("config", e))?
        }
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    Ok(cfg)
}

fn write_out(common: &Common, body: &str) -> Result<(), Failure> {
    match &common.out {
        None => {
            print!("{}", body);
            Ok(())
        }
        Some(p) => std::fs::write(p, body).map_err(|e| Failure {
            code: EXIT_ERROR,
            reason: format!("cannot write {}: {}", p.display(), e),
        }),
    }
}

fn report(command: &str, cfg: &ExperimentConfig, result: Value) -> String {
    let v = json!({"schema_version": SCHEMA_VERSION, "command": command, "config": cfg, "result": result});
    serde_json::to_string_pretty(&v).expect("reports serialize") + "\n"
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("results serialize")
}

fn law_of(cfg: &ExperimentConfig) -> Result<PaintboxLaw, Failure> {
    need(&cfg.law, "law")?
        .validated()
        .map_err(|e| invalid("law", e))
}

fn coloring(field: &str, word: &str, k: usize) -> Result<Coloring, Failure> {
    Coloring::parse(word, k).map_err(|e| invalid(field, e))
}

fn positive(field: &str, v: usize) -> Result<usize, Failure> {
    if v == 0 {
        return Err(invalid(field, "must be positive"));
    }
    Ok(v)
}

const CSV_HEADER: &str = "n,m,tv_value,kind,std_error,replicates,seed\n";

fn csv_row(out: &mut String, n: usize, m: usize, tv: &TvEstimate, seed: u64) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        n,
        m,
        tv.value,
        tv.kind.as_str(),
        tv.mc_std_error,
        tv.replicates,
        seed
    );
}

fn dispatch(cmd: &Cmd, mut cfg: ExperimentConfig) -> Result<Output, Failure> {
    let name = cmd.name();
    let seed = cfg.seed.unwrap_or(0);
    cfg.seed = Some(seed);
    let ok = |body: String| {
        Ok(Output {
            body,
            code: EXIT_OK,
        })
    };
    match cmd {
        Cmd::Simulate {
            n,
            steps,
            thin,
            format,
            ..
        } => {
            override_opt(&mut cfg.n, n);
            override_opt(&mut cfg.steps, steps);
            override_opt(&mut cfg.thin, thin);
            let law = law_of(&cfg)?;
            let k = law.k();
            let x0 = match &cfg.x0 {
                Some(w) => coloring("x0", w, k)?,
                None => Coloring::constant(positive("n", need(&cfg.n, "n")?)?, k, 0)
                    .map_err(|e| invalid("n", e))?,
            };
            if let Some(n) = cfg.n {
                if n != x0.n() {
                    return Err(invalid(
                        "x0",
                        format!("has length {} but n = {}", x0.n(), n),
                    ));
                }
            }
            let steps = need(&cfg.steps, "steps")?;
            let opts = RunOptions {
                thin: Some(cfg.thin.unwrap_or(1)),
                record_paintbox: false,
            };
            let run = match cfg.construction.unwrap_or(Construction::Matrix) {
                Construction::Matrix => run_efcp_matrix_with(&law, &x0, steps, seed, &opts)?,
                Construction::Coordinate => {
                    run_efcp_coordinate_with(&law, &x0, steps, seed, &opts)?
                }
            };
            match format {
                Format::Csv => {
                    let mut s = String::from("step,coloring\n");
                    for (t, x) in run.steps.iter().zip(&run.trajectory) {
                        let _ = writeln!(s, "{},{}", t, x);
                    }
                    ok(s)
                }
                Format::Json => {
                    let rows: Vec<Value> = run
                        .steps
                        .iter()
                        .zip(&run.trajectory)
                        .map(|(t, x)| json!({"step": t, "counts": x.counts()}))
                        .collect();
                    ok(report(
                        name,
                        &cfg,
                        json!({"k": k, "n": x0.n(), "trajectory": rows}),
                    ))
                }
            }
        }
        Cmd::Lyapunov {
            steps, replicates, ..
        } => {
            override_opt(&mut cfg.steps, steps);
            override_opt(&mut cfg.replicates, replicates);
            let law = law_of(&cfg)?;
            let steps = positive("steps", cfg.steps.unwrap_or(10_000))?;
            let reps = positive("replicates", cfg.replicates.unwrap_or(16))?;
            cfg.steps = Some(steps);
            cfg.replicates = Some(reps);
            let opts = LyapunovOptions {
                averaging: cfg.averaging,
                ..LyapunovOptions::default()
            };
            let est = estimate_lyapunov_with(&law, steps, reps, seed, &opts)?;
            ok(report(name, &cfg, to_value(&est)))
        }
        Cmd::Collapse {
            m_max, replicates, ..
        } => {
            override_opt(&mut cfg.m_max, m_max);
            override_opt(&mut cfg.replicates, replicates);
            let law = law_of(&cfg)?;
            let m_max = positive("m_max", cfg.m_max.unwrap_or(DEFAULT_M_MAX))?;
            let reps = positive("replicates", cfg.replicates.unwrap_or(1000))?;
            cfg.m_max = Some(m_max);
            cfg.replicates = Some(reps);
            let r = collapse_diagnostic(&law, m_max, reps, seed);
            let code = if r.verdict == CollapseVerdict::Yes {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            };
            Ok(Output {
                body: report(name, &cfg, to_value(&r)),
                code,
            })
        }
        Cmd::Tv {
            n,
            m,
            replicates,
            format,
            ..
        } => {
            override_opt(&mut cfg.n, n);
            override_opt(&mut cfg.m, m);
            override_opt(&mut cfg.replicates, replicates);
            let law = law_of(&cfg)?;
            let k = law.k();
            let (x0, x1) = match (&cfg.x0, &cfg.x0_tilde) {
                (Some(a), Some(b)) => (coloring("x0", a, k)?, coloring("x0_tilde", b, k)?),
                (None, None) => {
                    let d = BlockDesign::new(need(&cfg.n, "n")?, k).map_err(|e| invalid("n", e))?;
                    (d.x0, d.x0_tilde)
                }
                _ => {
                    return Err(invalid(
                        "x0_tilde",
                        "x0 and x0_tilde must be given together",
                    ))
                }
            };
            let m = need(&cfg.m, "m")?;
            let reps = positive("replicates", cfg.replicates.unwrap_or(10_000))?;
            let method = cfg.tv_method.unwrap_or(if law.atoms().is_some() {
                TvMethod::ExactAtomic
            } else {
                TvMethod::UpperMc
            });
            cfg.tv_method = Some(method);
            let values: Vec<TvEstimate> = match method {
                TvMethod::ExactAtomic => (0..=m)
                    .map(|t| tv_exact_atomic(&law, &x0, &x1, t))
                    .collect::<Result<_, _>>()?,
                TvMethod::UpperMc => {
                    cfg.replicates = Some(reps);
                    tv_upper_mc_profile(&law, &x0, &x1, m, reps, seed)?
                }
                TvMethod::LowerMc => {
                    cfg.replicates = Some(reps);
                    tv_lower_mc_profile(&law, &x0, &x1, m, reps, seed)?
                        .into_iter()
                        .map(|p| p.0)
                        .collect()
                }
            };
            match format {
                Format::Csv => {
                    let mut s = String::from(CSV_HEADER);
                    for (t, v) in values.iter().enumerate() {
                        csv_row(&mut s, x0.n(), t, v, seed);
                    }
                    ok(s)
                }
                Format::Json => ok(report(
                    name,
                    &cfg,
                    json!({"x0": x0.to_string(), "x0_tilde": x1.to_string(), "values": values}),
                )),
            }
        }
        Cmd::MixingTime { n, replicates, .. } => {
            override_opt(&mut cfg.n, n);
            override_opt(&mut cfg.replicates, replicates);
            let law = law_of(&cfg)?;
            let n = need(&cfg.n, "n")?;
            let defaults = MixingOptions::default();
            let method = match cfg.mixing_method {
                Some(m) => m,
                None => MixingMethod::MonteCarlo {
                    replicates: positive("replicates", cfg.replicates.unwrap_or(10_000))?,
                },
            };
            let epsilons = cfg.epsilons.clone().unwrap_or(defaults.epsilons.clone());
            cfg.mixing_method = Some(method);
            cfg.epsilons = Some(epsilons.clone());
            let opts = MixingOptions {
                epsilons,
                method,
                seed,
                m_cap: cfg.m_cap.unwrap_or(defaults.m_cap),
                ..defaults
            };
            let profile = mixing_profile(&law, n, &opts)?;
            let code = if profile.entries.iter().any(|e| e.inconclusive) {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(Output {
                body: report(name, &cfg, to_value(&profile)),
                code,
            })
        }
        Cmd::Cutoff { replicates, .. } => {
            override_opt(&mut cfg.replicates, replicates);
            let law = law_of(&cfg)?;
            let d = CutoffOptions::default();
            let opts = CutoffOptions {
                n_grid: cfg.n_grid.clone().unwrap_or(d.n_grid),
                epsilon: cfg.epsilon.unwrap_or(d.epsilon),
                replicates: cfg.replicates.unwrap_or(d.replicates),
                lyapunov_steps: cfg.lyapunov_steps.unwrap_or(d.lyapunov_steps),
                lyapunov_replicates: cfg.lyapunov_replicates.unwrap_or(d.lyapunov_replicates),
                slope_tolerance: cfg.slope_tolerance.unwrap_or(d.slope_tolerance),
                m_cap: cfg.m_cap.unwrap_or(d.m_cap),
                seed,
            };
            let r = cutoff_experiment(&law, &opts)?;
            let inconclusive = r
                .rows
                .iter()
                .any(|row| row.t_eps.is_none() || row.t_one_minus_eps.is_none());
            let mut v = to_value(&r);
            v["options"] = to_value(&opts);
            Ok(Output {
                body: report(name, &cfg, v),
                code: if inconclusive {
                    EXIT_INCONCLUSIVE
                } else {
                    EXIT_OK
                },
            })
        }
        Cmd::Ehrenfest {
            n,
            alpha,
            exact,
            t_max,
            beta,
            format,
            ..
        } => {
            override_opt(&mut cfg.n, n);
            override_opt(&mut cfg.alpha, alpha);
            override_opt(&mut cfg.t_max, t_max);
            override_opt(&mut cfg.beta, beta);
            let n = positive("n", need(&cfg.n, "n")?)?;
            let params = match cfg.alpha {
                None => EhrenfestParams::standard(n),
                Some(a) => EhrenfestParams::general(n, a),
            }
            .map_err(|e| invalid("alpha", e))?;
            let t_max = cfg
                .t_max
                .unwrap_or_else(|| (2.0 * ehrenfest_upper_time(&params, 0.0)).ceil() as usize);
            cfg.t_max = Some(t_max);
            let values: Vec<TvEstimate> = if *exact {
                ehrenfest_tv_curve(&params, t_max)?
            } else {
                (0..=t_max)
                    .map(|t| TvEstimate {
                        kind: crate::tvlab::TvKind::UpperBound,
                        ..TvEstimate::exact(ehrenfest_upper_bound(&params, t as f64).min(1.0))
                    })
                    .collect()
            };
            match format {
                Format::Csv => {
                    let mut s = String::from(CSV_HEADER);
                    for (t, v) in values.iter().enumerate() {
                        csv_row(&mut s, n, t, v, seed);
                    }
                    ok(s)
                }
                Format::Json => {
                    let beta = cfg.beta.unwrap_or(1.0);
                    let t = ehrenfest_upper_time(&params, beta);
                    let bounds = match ehrenfest_bounds(&params, t, beta) {
                        Ok(b) => to_value(&b),
                        Err(e) => {
                            json!({"t": t, "beta": beta, "upper": ehrenfest_upper_bound(&params, t), "lower": Value::Null, "lower_refused": e.to_string()})
                        }
                    };
                    ok(report(
                        name,
                        &cfg,
                        json!({"params": params, "exact": exact, "values": values, "bounds": bounds}),
                    ))
                }
            }
        }
        Cmd::Project {
            n,
            trajectory,
            steps,
            ..
        } => {
            override_opt(&mut cfg.n, n);
            override_opt(&mut cfg.steps, steps);
            let law = law_of(&cfg)?;
            let k = law.k();
            if *trajectory {
                let x0 = match &cfg.x0 {
                    Some(w) => coloring("x0", w, k)?,
                    None => Coloring::constant(positive("n", need(&cfg.n, "n")?)?, k, 0)
                        .map_err(|e| invalid("n", e))?,
                };
                let steps = need(&cfg.steps, "steps")?;
                let run = run_efcp_matrix_with(&law, &x0, steps, seed, &RunOptions::every_step())?;
                let pr = project_run(&run);
                let rows: Vec<Value> = pr
                    .trajectory
                    .iter()
                    .enumerate()
                    .map(|(t, y)| json!({"step": t, "blocks": y}))
                    .collect();
                return ok(report(
                    name,
                    &cfg,
                    json!({"markov": pr.markov, "note": pr.note, "trajectory": rows}),
                ));
            }
            let n = positive("n", need(&cfg.n, "n")?)?;
            let eps = cfg.epsilons.clone().unwrap_or(vec![0.5, 0.25]);
            cfg.epsilons = Some(eps.clone());
            let r = projected_mixing_equivalence(&law, n, k, &eps)?;
            let code = if r.entries.iter().any(|e| e.t_labeled.is_none()) {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(Output {
                body: report(name, &cfg, to_value(&r)),
                code,
            })
        }
    }
}

fn override_opt<T: Clone>(field: &mut Option<T>, flag: &Option<T>) {
    if flag.is_some() {
        *field = flag.clone();
    }
}
