//! Command-line front end: flat `key=value` configuration files with flag
//! overrides, dispatch to the experiment drivers, CSV artifacts and a
//! summary record.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::adaptive::AdaptiveConfig;
use crate::harness::{
    run_coarsening, run_convergence, CoarseningConfig, ConvergenceConfig, InitialData, StepMode,
};
use crate::io;
use crate::linsolve::{LinearSolverConfig, SolveMethod};
use crate::model::FlowType;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: expected `key=value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Run,
    Converge,
    Adapt,
}

impl CommandKind {
    fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Run => "run",
            CommandKind::Converge => "converge",
            CommandKind::Adapt => "adapt",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "savbcfd", version, about = "Energy-stable phase-field solver on staggered grids")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Fixed-step (or, with --adaptive, adaptive) simulation
    Run(CommonArgs),
    /// Cauchy-error convergence study over grid halvings
    Converge(CommonArgs),
    /// Adaptive coarsening run with spinodal-decomposition defaults
    Adapt(CommonArgs),
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Flat key=value configuration file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// ac (Allen-Cahn, L2) or ch (Cahn-Hilliard, H^-1)
    #[arg(long)]
    flow: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Final time
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Fixed step size
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    mobility: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the adaptive controller instead of fixed steps
    #[arg(long)]
    adaptive: bool,
    #[arg(long = "dt-min")]
    dt_min: Option<f64>,
    #[arg(long = "dt-max")]
    dt_max: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "max-retries")]
    max_retries: Option<usize>,
    /// cg | dense | fastdiag
    #[arg(long)]
    solver: Option<String>,
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated snapshot times
    #[arg(long)]
    snapshots: Option<String>,
    /// Comma-separated cell counts for the convergence study
    #[arg(long)]
    grids: Option<String>,
    /// random | cosine
    #[arg(long)]
    initial: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y1: Option<f64>,
}

const KNOWN_KEYS: [&str; 27] = [
    "flow", "nx", "ny", "x0", "x1", "y0", "y1", "T", "dt", "epsilon", "beta", "c0", "mobility",
    "seed", "adaptive", "dt_min", "dt_max", "tol", "rho", "max_retries", "solver", "rel_tol",
    "max_iters", "out", "snapshots", "grids", "initial",
];

/// Parse a flat `key=value` file. Blank lines and `#` comments are skipped;
/// unknown keys are rejected.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: lineno + 1, text: raw.trim().to_string() });
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub flow: FlowType,
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub t_final: f64,
    pub dt: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub c0: f64,
    pub mobility: f64,
    pub seed: u64,
    pub adaptive: bool,
    pub dt_min: f64,
    pub dt_max: f64,
    pub tol: f64,
    pub rho: f64,
    pub max_retries: usize,
    pub solver: SolveMethod,
    pub rel_tol: f64,
    pub max_iters: Option<usize>,
    pub out_dir: PathBuf,
    pub snapshots: Vec<f64>,
    pub grids: Vec<usize>,
    pub initial: InitialData,
}

struct Raw {
    file: BTreeMap<String, String>,
}

impl Raw {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| ConfigError::Invalid {
                key: key.to_string(),
                message: format!("cannot parse `{v}`"),
            }),
        }
    }
}

fn parse_list_f64(key: &str, text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| ConfigError::Invalid {
                key: key.to_string(),
                message: format!("cannot parse `{s}` as a number"),
            })
        })
        .collect()
}

fn parse_list_usize(key: &str, text: &str) -> Result<Vec<usize>, ConfigError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<usize>().map_err(|_| ConfigError::Invalid {
                key: key.to_string(),
                message: format!("cannot parse `{s}` as an integer"),
            })
        })
        .collect()
}

fn parse_flow(text: &str) -> Result<FlowType, ConfigError> {
    match text {
        "ac" => Ok(FlowType::L2),
        "ch" => Ok(FlowType::Hm1),
        other => Err(ConfigError::Invalid {
            key: "flow".into(),
            message: format!("expected `ac` or `ch`, got `{other}`"),
        }),
    }
}

fn parse_solver(text: &str) -> Result<SolveMethod, ConfigError> {
    match text {
        "cg" => Ok(SolveMethod::Cg),
        "dense" => Ok(SolveMethod::Dense),
        "fastdiag" => Ok(SolveMethod::FastDiag),
        other => Err(ConfigError::Invalid {
            key: "solver".into(),
            message: format!("expected `cg`, `dense` or `fastdiag`, got `{other}`"),
        }),
    }
}

fn parse_initial(text: &str) -> Result<InitialData, ConfigError> {
    match text {
        "random" => Ok(InitialData::Random { lo: -0.05, hi: 0.05 }),
        "cosine" => Ok(InitialData::Cosine),
        other => Err(ConfigError::Invalid {
            key: "initial".into(),
            message: format!("expected `random` or `cosine`, got `{other}`"),
        }),
    }
}

impl RunConfig {
    /// Merge the command defaults, an optional config file, and flag
    /// overrides (highest precedence), then validate.
    fn resolve(command: CommandKind, args: &CommonArgs) -> Result<RunConfig, ConfigError> {
        let file = match &args.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        let raw = Raw { file };

        let flow = match args.flow.as_deref() {
            Some(f) => parse_flow(f)?,
            None => match raw.file.get("flow") {
                Some(f) => parse_flow(f)?,
                None => match command {
                    CommandKind::Adapt => FlowType::Hm1,
                    CommandKind::Converge => FlowType::L2,
                    CommandKind::Run => return Err(ConfigError::Missing("flow")),
                },
            },
        };

        // accuracy-test defaults per flow; the coarsening preset overrides below
        let (def_eps, def_mob, def_t, def_dt) = match flow {
            FlowType::L2 => (0.08, 0.01, 0.5, 5e-4),
            FlowType::Hm1 => (0.2, 0.01, 0.5, 5e-4),
        };

        let adaptive = args.adaptive
            || raw.get::<bool>("adaptive")?.unwrap_or(false)
            || command == CommandKind::Adapt;

        let preset_adapt = command == CommandKind::Adapt;
        let epsilon = args
            .epsilon
            .or(raw.get("epsilon")?)
            .unwrap_or(if preset_adapt { 0.01 } else { def_eps });
        let beta = args.beta.or(raw.get("beta")?).unwrap_or(if preset_adapt { 6.0 } else { 0.0 });
        let mobility = args
            .mobility
            .or(raw.get("mobility")?)
            .unwrap_or(if preset_adapt { 0.002 } else { def_mob });
        let t_final = args
            .t_final
            .or(raw.get("T")?)
            .or(match command {
                CommandKind::Run => None,
                CommandKind::Converge => Some(def_t),
                CommandKind::Adapt => Some(1.0),
            })
            .ok_or(ConfigError::Missing("T"))?;
        let dt = match command {
            CommandKind::Run if !adaptive => {
                args.dt.or(raw.get("dt")?).ok_or(ConfigError::Missing("dt"))?
            }
            _ => args.dt.or(raw.get("dt")?).unwrap_or(def_dt),
        };

        let (def_nx, def_ny) = match command {
            CommandKind::Adapt => (128usize, 128usize),
            _ => (64, 64),
        };
        let nx = match command {
            CommandKind::Run => {
                args.nx.or(raw.get("nx")?).ok_or(ConfigError::Missing("nx"))?
            }
            _ => args.nx.or(raw.get("nx")?).unwrap_or(def_nx),
        };
        let ny = match command {
            CommandKind::Run => {
                args.ny.or(raw.get("ny")?).ok_or(ConfigError::Missing("ny"))?
            }
            _ => args.ny.or(raw.get("ny")?).unwrap_or(def_ny),
        };

        let snapshots = match (&args.snapshots, raw.file.get("snapshots")) {
            (Some(s), _) => parse_list_f64("snapshots", s)?,
            (None, Some(s)) => parse_list_f64("snapshots", s)?,
            (None, None) => match command {
                CommandKind::Adapt => vec![0.02, 0.1, 1.0],
                _ => vec![],
            },
        };
        let grids = match (&args.grids, raw.file.get("grids")) {
            (Some(s), _) => parse_list_usize("grids", s)?,
            (None, Some(s)) => parse_list_usize("grids", s)?,
            (None, None) => vec![10, 20, 40, 80],
        };

        let solver = match args.solver.as_deref() {
            Some(s) => parse_solver(s)?,
            None => match raw.file.get("solver") {
                Some(s) => parse_solver(s)?,
                // the spinodal preset is infeasible with unpreconditioned CG
                None if command == CommandKind::Adapt => SolveMethod::FastDiag,
                None => SolveMethod::Cg,
            },
        };
        let initial = match args.initial.as_deref() {
            Some(s) => parse_initial(s)?,
            None => match raw.file.get("initial") {
                Some(s) => parse_initial(s)?,
                None => InitialData::Random { lo: -0.05, hi: 0.05 },
            },
        };

        let cfg = RunConfig {
            command,
            flow,
            nx,
            ny,
            x0: args.x0.or(raw.get("x0")?).unwrap_or(0.0),
            x1: args.x1.or(raw.get("x1")?).unwrap_or(1.0),
            y0: args.y0.or(raw.get("y0")?).unwrap_or(0.0),
            y1: args.y1.or(raw.get("y1")?).unwrap_or(1.0),
            t_final,
            dt,
            epsilon,
            beta,
            c0: args.c0.or(raw.get("c0")?).unwrap_or(0.0),
            mobility,
            seed: args.seed.or(raw.get("seed")?).unwrap_or(0),
            adaptive,
            dt_min: args.dt_min.or(raw.get("dt_min")?).unwrap_or(1e-5),
            dt_max: args.dt_max.or(raw.get("dt_max")?).unwrap_or(1e-2),
            tol: args.tol.or(raw.get("tol")?).unwrap_or(1e-3),
            rho: args.rho.or(raw.get("rho")?).unwrap_or(0.9),
            max_retries: args.max_retries.or(raw.get("max_retries")?).unwrap_or(50),
            solver,
            rel_tol: args.rel_tol.or(raw.get("rel_tol")?).unwrap_or(1e-11),
            max_iters: args.max_iters.or(raw.get("max_iters")?),
            out_dir: args
                .out
                .clone()
                .or_else(|| raw.file.get("out").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out")),
            snapshots,
            grids,
            initial,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid { key: key.into(), message: format!("must be positive, got {v}") })
            }
        }
        positive("T", self.t_final)?;
        positive("dt", self.dt)?;
        positive("epsilon", self.epsilon)?;
        positive("mobility", self.mobility)?;
        positive("rel_tol", self.rel_tol)?;
        positive("dt_min", self.dt_min)?;
        positive("dt_max", self.dt_max)?;
        positive("tol", self.tol)?;
        if self.beta < 0.0 {
            return Err(ConfigError::Invalid { key: "beta".into(), message: "must be nonnegative".into() });
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(ConfigError::Invalid {
                key: "nx".into(),
                message: format!("need at least 2 cells per axis, got {}x{}", self.nx, self.ny),
            });
        }
        if self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(ConfigError::Invalid { key: "x1".into(), message: "domain bounds must increase".into() });
        }
        if self.dt_min > self.dt_max {
            return Err(ConfigError::Invalid {
                key: "dt_min".into(),
                message: format!("dt_min={} exceeds dt_max={}", self.dt_min, self.dt_max),
            });
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(ConfigError::Invalid { key: "rho".into(), message: "need 0 < rho <= 1".into() });
        }
        if self.max_retries == 0 {
            return Err(ConfigError::Invalid { key: "max_retries".into(), message: "must be >= 1".into() });
        }
        if self.command == CommandKind::Converge {
            if self.grids.is_empty() {
                return Err(ConfigError::Invalid { key: "grids".into(), message: "need at least one resolution".into() });
            }
            for w in self.grids.windows(2) {
                if w[1] != 2 * w[0] {
                    return Err(ConfigError::Invalid {
                        key: "grids".into(),
                        message: format!("resolutions must halve h consecutively, got {} then {}", w[0], w[1]),
                    });
                }
            }
        }
        Ok(())
    }

    fn solver_config(&self) -> LinearSolverConfig {
        LinearSolverConfig { method: self.solver, rel_tol: self.rel_tol, max_iters: self.max_iters }
    }

    /// Effective configuration as sorted key=value pairs.
    pub fn echo_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![
            ("command".into(), self.command.as_str().into()),
            ("flow".into(), self.flow.as_str().into()),
            ("nx".into(), self.nx.to_string()),
            ("ny".into(), self.ny.to_string()),
            ("x0".into(), io::fmt_g17(self.x0)),
            ("x1".into(), io::fmt_g17(self.x1)),
            ("y0".into(), io::fmt_g17(self.y0)),
            ("y1".into(), io::fmt_g17(self.y1)),
            ("T".into(), io::fmt_g17(self.t_final)),
            ("dt".into(), io::fmt_g17(self.dt)),
            ("epsilon".into(), io::fmt_g17(self.epsilon)),
            ("beta".into(), io::fmt_g17(self.beta)),
            ("c0".into(), io::fmt_g17(self.c0)),
            ("mobility".into(), io::fmt_g17(self.mobility)),
            ("seed".into(), self.seed.to_string()),
            ("adaptive".into(), self.adaptive.to_string()),
            ("dt_min".into(), io::fmt_g17(self.dt_min)),
            ("dt_max".into(), io::fmt_g17(self.dt_max)),
            ("tol".into(), io::fmt_g17(self.tol)),
            ("rho".into(), io::fmt_g17(self.rho)),
            ("max_retries".into(), self.max_retries.to_string()),
            ("solver".into(), self.solver.as_str().into()),
            ("rel_tol".into(), io::fmt_g17(self.rel_tol)),
            ("out".into(), self.out_dir.display().to_string()),
            (
                "snapshots".into(),
                self.snapshots.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
            ),
            (
                "initial".into(),
                match self.initial {
                    InitialData::Random { .. } => "random".into(),
                    InitialData::Cosine => "cosine".to_string(),
                },
            ),
        ];
        if let Some(mi) = self.max_iters {
            pairs.push(("max_iters".into(), mi.to_string()));
        }
        if self.command == CommandKind::Converge {
            pairs.push((
                "grids".into(),
                self.grids.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
            ));
        }
        pairs.sort();
        pairs
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = match &cli.command {
        CliCommand::Run(a) => (CommandKind::Run, a),
        CliCommand::Converge(a) => (CommandKind::Converge, a),
        CliCommand::Adapt(a) => (CommandKind::Adapt, a),
    };
    let cfg = match RunConfig::resolve(kind, args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return 1;
        }
    };
    match execute(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cfg: &RunConfig) -> crate::Result<()> {
    let started = Instant::now();
    io::write_config_echo(&cfg.out_dir.join("config_effective.txt"), &cfg.echo_pairs())?;
    match cfg.command {
        CommandKind::Converge => execute_converge(cfg, started),
        CommandKind::Run | CommandKind::Adapt => execute_run(cfg, started),
    }
}

fn execute_converge(cfg: &RunConfig, started: Instant) -> crate::Result<()> {
    let conv = ConvergenceConfig {
        flow: cfg.flow,
        grids: cfg.grids.clone(),
        dt: cfg.dt,
        t_final: cfg.t_final,
        epsilon: cfg.epsilon,
        beta: cfg.beta,
        mobility: cfg.mobility,
        solver: cfg.solver_config(),
    };
    let rows = run_convergence(&conv)?;
    let path = cfg.out_dir.join("convergence.csv");
    io::write_convergence_csv(&path, &rows)?;

    println!("{:>10} {:>12} {:>6}   (per quantity)", "h", "error", "rate");
    for row in &rows {
        for name in crate::harness::QUANTITIES {
            let rate = row.rates.get(name).map(|r| format!("{r:.2}")).unwrap_or_default();
            println!("{:>10.5} {:>12.4e} {:>6}  {}", row.h, row.errors[name], rate, name);
        }
    }
    let steps = (cfg.t_final / cfg.dt).round() as usize * (cfg.grids.len() + 1);
    let summary = serde_json::json!({
        "final_time": cfg.t_final,
        "final_energy": serde_json::Value::Null,
        "final_mass": serde_json::Value::Null,
        "mass_drift": serde_json::Value::Null,
        "min_dt": cfg.dt,
        "max_dt": cfg.dt,
        "total_steps": steps,
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    std::fs::write(cfg.out_dir.join("summary.json"), format!("{:#}\n", summary))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn execute_run(cfg: &RunConfig, started: Instant) -> crate::Result<()> {
    let mode = if cfg.adaptive {
        StepMode::Adaptive(AdaptiveConfig::new(
            cfg.dt_min,
            cfg.dt_max,
            cfg.tol,
            cfg.rho,
            cfg.max_retries,
        ))
    } else {
        StepMode::Fixed(cfg.dt)
    };
    let run_cfg = CoarseningConfig {
        flow: cfg.flow,
        nx: cfg.nx,
        ny: cfg.ny,
        bounds: (cfg.x0, cfg.x1, cfg.y0, cfg.y1),
        epsilon: cfg.epsilon,
        beta: cfg.beta,
        mobility: cfg.mobility,
        c0: cfg.c0,
        t_final: cfg.t_final,
        mode,
        seed: cfg.seed,
        init: cfg.initial,
        snapshot_times: cfg.snapshots.clone(),
        solver: cfg.solver_config(),
    };
    let (history, snapshots) = run_coarsening(&run_cfg)?;
    let grid = crate::grid::Grid::new(cfg.nx, cfg.ny, cfg.x0, cfg.x1, cfg.y0, cfg.y1);

    io::write_history_csv(&cfg.out_dir.join("history.csv"), &history)?;
    for snap in &snapshots {
        io::write_snapshot_csv(&cfg.out_dir, snap, &grid)?;
    }
    let (min_dt, max_dt) = history.dt_range().unwrap_or((cfg.dt, cfg.dt));
    io::write_summary_json(
        &cfg.out_dir.join("summary.json"),
        *history.times.last().unwrap(),
        *history.energies.last().unwrap(),
        *history.masses.last().unwrap(),
        history.mass_drift(),
        min_dt,
        max_dt,
        history.times.len() - 1,
        started.elapsed().as_secs_f64(),
    )?;
    println!(
        "advanced to t = {} in {} steps (dt in [{:.3e}, {:.3e}]); wrote {}",
        history.times.last().unwrap(),
        history.times.len() - 1,
        min_dt,
        max_dt,
        cfg.out_dir.join("history.csv").display()
    );
    Ok(())
}
