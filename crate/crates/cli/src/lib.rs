//! Configuration-driven front end for the `qsweep_core` experiments.
//!
//! A run reads one JSON document, executes one experiment and writes its
//! result tables as CSV (one file per table) or as a single JSON document.
//! Data sections are deterministic for a fixed configuration at any thread
//! count; only the `#` metadata block (version, timestamp) varies.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{ExperimentConfig, Format, Report, DEFAULT_SEED};
pub use error::CliError;
pub use experiments::Experiment;
pub use table::{Cell, Metadata, Table};

/// Tables produced by a run together with their metadata block.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metadata: Metadata,
    pub tables: Vec<Table>,
}

/// Runs an experiment, on a dedicated pool of `threads` workers if given.
pub fn execute(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput, CliError> {
    let tables = with_threads(threads, || cfg.experiment.run(&cfg.parameters, cfg.seed))??;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let metadata = vec![
        ("qsweep".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("experiment".to_string(), cfg.experiment.name().to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("timestamp".to_string(), timestamp.to_string()),
    ];
    Ok(RunOutput { metadata, tables })
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Invalid {
            key: "threads".into(),
            message: "need at least one thread".into(),
        }),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::module("threads", e)),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(0) => Err(CliError::Invalid {
            key: "threads".into(),
            message: "need at least one thread".into(),
        }),
        _ => Ok(f()),
    }
}

/// File names for the tables of a run: the path itself for one CSV table or
/// any JSON artifact, `<stem>_<table>.<ext>` for several CSV tables.
pub fn artifact_paths(out: &Path, format: Format, tables: &[Table]) -> Vec<PathBuf> {
    if format == Format::Json || tables.len() == 1 {
        return vec![out.to_path_buf()];
    }
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| format.extension().to_string());
    tables
        .iter()
        .map(|t| out.with_file_name(format!("{stem}_{}.{ext}", t.name)))
        .collect()
}

/// Writes a run to `out`, or to stdout when `out` is `None`. Returns the
/// files written.
pub fn emit(run: &RunOutput, format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let Some(out) = out else {
        let stdout = std::io::stdout();
        let mut w = stdout.lock();
        write_all(&mut w, run, format).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        return Ok(Vec::new());
    };
    let paths = artifact_paths(out, format, &run.tables);
    match format {
        Format::Json => {
            let mut w = create(&paths[0])?;
            table::write_json(&mut w, &run.metadata, &run.tables)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(&paths[0], e))?;
        }
        Format::Csv => {
            for (path, t) in paths.iter().zip(&run.tables) {
                let mut w = create(path)?;
                table::write_csv(&mut w, &run.metadata, t)
                    .and_then(|_| w.flush())
                    .map_err(|e| CliError::io(path, e))?;
            }
        }
    }
    Ok(paths)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_all<W: Write>(w: &mut W, run: &RunOutput, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => table::write_json(w, &run.metadata, &run.tables),
        Format::Csv => {
            for (i, t) in run.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(w)?;
                }
                table::write_csv(&mut *w, &run.metadata, t)?;
            }
            Ok(())
        }
    }
}

/// Reads back the tables of an artifact written by [`emit`].
pub fn read_artifacts(paths: &[PathBuf], format: Format) -> Result<RunOutput, CliError> {
    let open = |p: &PathBuf| File::open(p).map(std::io::BufReader::new).map_err(|e| CliError::io(p, e));
    let bad = |p: &PathBuf, m: String| CliError::Io {
        path: p.display().to_string(),
        message: m,
    };
    match format {
        Format::Json => {
            let p = &paths[0];
            let a = table::read_json(open(p)?).map_err(|m| bad(p, m))?;
            let metadata = a
                .metadata
                .into_iter()
                .map(|(k, v)| (k, v.as_str().map(String::from).unwrap_or_else(|| v.to_string())))
                .collect();
            Ok(RunOutput {
                metadata,
                tables: a.tables,
            })
        }
        Format::Csv => {
            let mut metadata = Metadata::new();
            let mut tables = Vec::new();
            for p in paths {
                let (m, t) = table::read_csv(open(p)?).map_err(|m| bad(p, m))?;
                metadata = m;
                tables.push(t);
            }
            Ok(RunOutput { metadata, tables })
        }
    }
}

/// Human-readable catalogue of experiments and their parameters.
pub fn describe_experiments() -> String {
    let mut s = String::new();
    for e in Experiment::ALL {
        s.push_str(&format!("{}: {}\n", e.name(), e.summary()));
        for p in e.params() {
            let presence = match p.default {
                config::Presence::Required => "required".to_string(),
                config::Presence::Optional => "optional".to_string(),
                config::Presence::Default(v) => format!("default {v}"),
            };
            s.push_str(&format!("    {:<18} {:<28} {:<22} {}\n", p.key, p.kind.describe(), presence, p.doc));
        }
    }
    s
}
