//! Batch front end for the `wgeig` library: argument and config-file
//! handling, experiment orchestration and CSV/JSON/table output.

pub mod args;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use wgeig::analysis::{direct_rows, fit_orders, sipg_rows, StudyResult, StudyRow};
use wgeig::eigsolve::EigenPair;
use wgeig::sipg::{run_direct, run_sipg_on, SipgConfig};
use wgeig::wg::{Discretization, WgSpace};
use wgeig::WgError;

use args::{Cli, CommandKind, OutputFormat, Settings};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 1;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<WgError> for CliError {
    fn from(e: WgError) -> Self {
        match e {
            WgError::Capacity { .. }
            | WgError::LevelOrder { .. }
            | WgError::DegreeTooLow { .. }
            | WgError::InvalidEpsilon(_)
            | WgError::InvalidConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let (kind, run_args) = cli.command.split();
    match Settings::resolve(kind, run_args).and_then(|s| execute(&s)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wgeig: {e}");
            e.exit_code()
        }
    }
}

fn space_for(s: &Settings, level: u32) -> Result<WgSpace, CliError> {
    Ok(WgSpace::uniform(level, s.kind, s.degree, s.epsilon)?.with_element_size(s.element_size))
}

fn sipg_config(s: &Settings, coarse: u32, fine: u32) -> SipgConfig {
    SipgConfig {
        epsilon: s.epsilon,
        element_size: s.element_size,
        eig: s.eig,
        near_singular: s.near_singular,
        backend: s.backend,
        ..SipgConfig::new(s.kind, s.degree, coarse, fine, s.num_eigs)
    }
}

/// Runs every planned `(coarse, fine)` pair and collects the rows.
pub fn compute(s: &Settings) -> Result<StudyResult, CliError> {
    let mut rows: Vec<StudyRow> = Vec::new();
    let mut cached: Option<(Discretization, Option<Vec<EigenPair>>, f64)> = None;
    let finest = s.runs.iter().map(|r| r.1).max();
    for &(coarse, fine) in &s.runs {
        let reuse = cached.as_ref().is_some_and(|(d, _, _)| d.space.level() == fine);
        if !reuse {
            let t = Instant::now();
            let disc = Discretization::from_space(space_for(s, fine)?);
            let direct = if coarse.is_none() || !s.skip_direct {
                Some(run_direct(&disc, s.num_eigs, &s.eig)?)
            } else {
                None
            };
            if Some(fine) == finest {
                export(s, &disc)?;
            }
            cached = Some((disc, direct, t.elapsed().as_secs_f64()));
        }
        let (disc, direct, base_seconds) = cached.as_ref().expect("fine level prepared above");
        let t = Instant::now();
        let mut new_rows = match coarse {
            None => direct_rows(disc, direct.as_deref().expect("direct solve ran"))?,
            Some(c) => {
                let result = run_sipg_on(&sipg_config(s, c, fine), disc)?;
                sipg_rows(disc, &result, direct.as_deref())?
            }
        };
        let seconds = base_seconds + t.elapsed().as_secs_f64();
        for r in &mut new_rows {
            r.seconds = s.timings.then_some(seconds);
        }
        rows.extend(new_rows);
    }
    let orders = if s.command == CommandKind::Study { fit_orders(&rows) } else { Vec::new() };
    Ok(StudyResult { rows, orders })
}

fn export(s: &Settings, disc: &Discretization) -> Result<(), CliError> {
    if let Some(path) = &s.dump_mesh {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        serde_json::to_writer(BufWriter::new(file), disc.space.mesh())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(dir) = &s.export_matrices {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for (name, m) in [("A.mtx", &disc.forms.stiffness), ("B.mtx", &disc.forms.mass)] {
            let path = dir.join(name);
            let file = File::create(&path).map_err(|e| io_err(&path, e))?;
            let mut w = BufWriter::new(file);
            m.write_matrix_market(&mut w).map_err(|e| io_err(&path, e))?;
            w.flush().map_err(|e| io_err(&path, e))?;
        }
    }
    Ok(())
}

pub fn render(s: &Settings, result: &StudyResult) -> String {
    match s.output {
        OutputFormat::Human => output::to_human(s.command, result),
        OutputFormat::Csv => output::to_csv(result),
        OutputFormat::Json => output::to_json(result),
    }
}

fn execute(s: &Settings) -> Result<(), CliError> {
    if let Some(n) = s.threads {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = compute(s)?;
    if s.output == OutputFormat::Csv {
        for r in result.rows.iter().filter(|r| r.warning.is_some()) {
            eprintln!("warning: j={}: {}", r.index, r.warning.as_deref().unwrap_or(""));
        }
    }
    let text = render(s, &result);
    match &s.out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
