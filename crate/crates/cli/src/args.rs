use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use wgeig::eigsolve::{EigenOptions, ShiftedBackend};
use wgeig::sipg::NearSingularPolicy;
use wgeig::wg::{ElementSize, ProblemKind, DEFAULT_EPSILON};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "wgeig", version, about = "Weak Galerkin eigenvalue lower bounds and two-grid studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Sipg,
    Study,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Direct weak Galerkin eigensolve on one mesh level.
    Solve(RunArgs),
    /// Two-grid shifted-inverse power: coarse eigensolve, one fine solve per eigenvalue.
    Sipg(RunArgs),
    /// Sweep fine levels (direct, or two-grid with --coarse-level) and fit orders.
    Study(RunArgs),
    /// Paper-style error table: fixed fine level(s), sweep over coarse levels.
    Table(RunArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::Sipg(a) => (CommandKind::Sipg, a),
            Command::Study(a) => (CommandKind::Study, a),
            Command::Table(a) => (CommandKind::Table, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Csv,
    Json,
}

/// Every option is optional here so that a config file can fill the gaps;
/// flags given on the command line win.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// laplacian or biharmonic [default: laplacian]
    #[arg(long)]
    pub problem: Option<String>,
    /// Polynomial degree k of the interior unknowns [default: 1 (laplacian), 2 (biharmonic)]
    #[arg(long)]
    pub degree: Option<usize>,
    /// Stabilizer exponent shift, 0 < epsilon < 1 [default: 0.1]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// h_T in the stabilizer weights: side or diameter [default: side]
    #[arg(long)]
    pub element_size: Option<String>,
    /// Mesh level L (h = 2^-L) for `solve` [default: 4]
    #[arg(long)]
    pub level: Option<u32>,
    /// Fine levels for `study`, e.g. 3..6 or 3,4,5 [default: 3..6]
    #[arg(long)]
    pub levels: Option<String>,
    /// Coarse level for `sipg` [default: 3]; turns `study` into a two-grid sweep
    #[arg(long)]
    pub coarse_level: Option<u32>,
    /// Coarse levels for `table` [default: 3 up to min(6, fine - 1)]
    #[arg(long)]
    pub coarse_levels: Option<String>,
    /// Fine level for `sipg` [default: 6]
    #[arg(long)]
    pub fine_level: Option<u32>,
    /// Fine levels for `table`, one block each [default: 6]
    #[arg(long)]
    pub fine_levels: Option<String>,
    /// Number of smallest eigenpairs [default: 6 (laplacian), 1 (biharmonic)]
    #[arg(long)]
    pub num_eigs: Option<usize>,
    /// Eigen residual tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative gap for grouping eigenvalues into clusters [default: 1e-6]
    #[arg(long)]
    pub cluster_tol: Option<f64>,
    /// Krylov block size [default: 4]
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Factorization for the shifted fine systems: lblt or lu [default: lblt]
    #[arg(long)]
    pub shifted_solver: Option<String>,
    /// Near-singular shifts: warn (keep the row, flag it) or fail [default: warn]
    #[arg(long)]
    pub on_near_singular: Option<String>,
    /// Skip the direct fine-level eigensolve in `sipg` and `table`
    #[arg(long)]
    pub skip_direct: bool,
    /// Output format [default: human]
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock seconds per row (output is then not reproducible)
    #[arg(long)]
    pub timings: bool,
    /// Worker threads for assembly and projection
    #[arg(long, env = "WGEIG_THREADS")]
    pub threads: Option<usize>,
    /// Config file with `key = value` lines (keys as the long flags)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the (finest) mesh as JSON
    #[arg(long)]
    pub dump_mesh: Option<PathBuf>,
    /// Write the (finest) pencil as A.mtx and B.mtx into this directory
    #[arg(long)]
    pub export_matrices: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| config_err(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_err(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read config file {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("{}:{}: expected `key = value`", path.display(), n + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

impl RunArgs {
    /// Fills unset options from a config file.
    pub fn merge_file(&mut self, entries: &BTreeMap<String, String>) -> Result<(), CliError> {
        fn fill<T>(slot: &mut Option<T>, v: T) {
            if slot.is_none() {
                *slot = Some(v);
            }
        }
        for (key, value) in entries {
            let k = key.as_str();
            match k {
                "problem" => fill(&mut self.problem, value.clone()),
                "degree" => fill(&mut self.degree, parse_value(k, value)?),
                "epsilon" => fill(&mut self.epsilon, parse_value(k, value)?),
                "element-size" => fill(&mut self.element_size, value.clone()),
                "level" => fill(&mut self.level, parse_value(k, value)?),
                "levels" => fill(&mut self.levels, value.clone()),
                "coarse-level" => fill(&mut self.coarse_level, parse_value(k, value)?),
                "coarse-levels" => fill(&mut self.coarse_levels, value.clone()),
                "fine-level" => fill(&mut self.fine_level, parse_value(k, value)?),
                "fine-levels" => fill(&mut self.fine_levels, value.clone()),
                "num-eigs" => fill(&mut self.num_eigs, parse_value(k, value)?),
                "tol" => fill(&mut self.tol, parse_value(k, value)?),
                "cluster-tol" => fill(&mut self.cluster_tol, parse_value(k, value)?),
                "block-size" => fill(&mut self.block_size, parse_value(k, value)?),
                "shifted-solver" => fill(&mut self.shifted_solver, value.clone()),
                "on-near-singular" => fill(&mut self.on_near_singular, value.clone()),
                "skip-direct" => self.skip_direct |= parse_bool(k, value)?,
                "timings" => self.timings |= parse_bool(k, value)?,
                "output" => {
                    let f = OutputFormat::from_str(value, true)
                        .map_err(|_| config_err(format!("invalid output format `{value}`")))?;
                    fill(&mut self.output, f)
                }
                "out" => fill(&mut self.out, PathBuf::from(value)),
                "threads" => fill(&mut self.threads, parse_value(k, value)?),
                "dump-mesh" => fill(&mut self.dump_mesh, PathBuf::from(value)),
                "export-matrices" => fill(&mut self.export_matrices, PathBuf::from(value)),
                _ => return Err(config_err(format!("unknown config key `{key}`"))),
            }
        }
        Ok(())
    }
}

/// `3..6` and `3..=6` (both inclusive), `3,4,5` or a single level.
pub fn parse_levels(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || config_err(format!("invalid level list `{text}` (use 3..6 or 3,4,5)"));
    let t = text.trim();
    let levels: Vec<u32> = if let Some((a, b)) = t.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        t.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_err(format!("level list `{text}` must be strictly increasing")));
    }
    Ok(levels)
}

/// Fully resolved and validated run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: CommandKind,
    pub kind: ProblemKind,
    pub degree: usize,
    pub epsilon: f64,
    pub element_size: ElementSize,
    pub num_eigs: usize,
    pub eig: EigenOptions,
    pub backend: ShiftedBackend,
    pub near_singular: NearSingularPolicy,
    pub skip_direct: bool,
    /// `(coarse, fine)` pairs to run, in output order; `coarse` is `None`
    /// for direct solves.
    pub runs: Vec<(Option<u32>, u32)>,
    pub output: OutputFormat,
    pub out: Option<PathBuf>,
    pub timings: bool,
    pub threads: Option<usize>,
    pub dump_mesh: Option<PathBuf>,
    pub export_matrices: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(command: CommandKind, mut args: RunArgs) -> Result<Self, CliError> {
        if let Some(path) = args.config.clone() {
            args.merge_file(&read_config_file(&path)?)?;
        }
        let kind: ProblemKind = match &args.problem {
            Some(p) => p.parse().map_err(|e: wgeig::WgError| config_err(e.to_string()))?,
            None => ProblemKind::Laplacian,
        };
        let degree = args.degree.unwrap_or(kind.min_degree());
        if degree == 0 {
            return Err(config_err("degree must be at least 1"));
        }
        if degree < kind.min_degree() {
            return Err(CliError::from(wgeig::WgError::DegreeTooLow {
                problem: kind.name(),
                degree,
                minimum: kind.min_degree(),
            }));
        }
        let epsilon = args.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(CliError::from(wgeig::WgError::InvalidEpsilon(epsilon)));
        }
        let parse_with = |v: &Option<String>| -> Result<Option<ElementSize>, CliError> {
            v.as_deref()
                .map(|s| s.parse().map_err(|e: wgeig::WgError| config_err(e.to_string())))
                .transpose()
        };
        let element_size = parse_with(&args.element_size)?.unwrap_or_default();
        let num_eigs = args.num_eigs.unwrap_or(match kind {
            ProblemKind::Laplacian => 6,
            ProblemKind::Biharmonic => 1,
        });
        if num_eigs == 0 {
            return Err(config_err("num-eigs must be at least 1"));
        }
        let mut eig = EigenOptions::default();
        if let Some(t) = args.tol {
            if !(t > 0.0) {
                return Err(config_err("tol must be positive"));
            }
            eig.tol = t;
        }
        if let Some(t) = args.cluster_tol {
            if !(t >= 0.0) {
                return Err(config_err("cluster-tol must be non-negative"));
            }
            eig.cluster_tol = t;
        }
        if let Some(b) = args.block_size {
            if b == 0 {
                return Err(config_err("block-size must be at least 1"));
            }
            eig.block_size = b;
        }
        let backend = match &args.shifted_solver {
            Some(s) => s.parse().map_err(|e: wgeig::WgError| config_err(e.to_string()))?,
            None => ShiftedBackend::default(),
        };
        let near_singular = match args.on_near_singular.as_deref().map(str::trim) {
            None | Some("warn") => NearSingularPolicy::Warn,
            Some("fail") => NearSingularPolicy::Fail,
            Some(other) => return Err(config_err(format!("unknown near-singular policy `{other}` (warn or fail)"))),
        };
        if args.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }

        let runs = plan_runs(command, &args)?;
        for &(coarse, fine) in &runs {
            if fine > wgeig::mesh::MAX_LEVEL {
                return Err(CliError::from(wgeig::WgError::Capacity {
                    level: fine,
                    max: wgeig::mesh::MAX_LEVEL,
                }));
            }
            if let Some(c) = coarse {
                if c >= fine {
                    return Err(CliError::from(wgeig::WgError::LevelOrder { coarse: c, fine }));
                }
            }
        }

        Ok(Self {
            command,
            kind,
            degree,
            epsilon,
            element_size,
            num_eigs,
            eig,
            backend,
            near_singular,
            skip_direct: args.skip_direct,
            runs,
            output: args.output.unwrap_or(OutputFormat::Human),
            out: args.out,
            timings: args.timings,
            threads: args.threads,
            dump_mesh: args.dump_mesh,
            export_matrices: args.export_matrices,
        })
    }
}

fn plan_runs(command: CommandKind, args: &RunArgs) -> Result<Vec<(Option<u32>, u32)>, CliError> {
    Ok(match command {
        CommandKind::Solve => vec![(None, args.level.unwrap_or(4))],
        CommandKind::Sipg => vec![(Some(args.coarse_level.unwrap_or(3)), args.fine_level.unwrap_or(6))],
        CommandKind::Study => {
            let levels = parse_levels(args.levels.as_deref().unwrap_or("3..6"))?;
            levels.into_iter().map(|l| (args.coarse_level, l)).collect()
        }
        CommandKind::Table => {
            let fines = match (&args.fine_levels, args.fine_level) {
                (Some(list), _) => parse_levels(list)?,
                (None, Some(l)) => vec![l],
                (None, None) => vec![6],
            };
            let mut runs = Vec::new();
            for fine in fines {
                let coarse = match &args.coarse_levels {
                    Some(list) => parse_levels(list)?,
                    None => {
                        let top = fine.saturating_sub(1).min(6);
                        if top < 3 {
                            return Err(config_err(format!(
                                "fine level {fine} leaves no default coarse level; pass --coarse-levels"
                            )));
                        }
                        (3..=top).collect()
                    }
                };
                runs.extend(coarse.into_iter().map(|c| (Some(c), fine)));
            }
            runs
        }
    })
}
