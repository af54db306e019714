//! File formats, commands and reports for `idealspace-core`.
//!
//! [`run`] executes one command against a spec file and returns its
//! records; the `idealspace` binary is a thin shell around it. See
//! [`spec`] for the file format.

pub mod commands;
pub mod report;
pub mod spec;

use std::path::PathBuf;

use idealspace_core::engine::EngineConfig;

pub use report::{Format, Outcome, Status};
use spec::{build, parse_document, BuildOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Show,
    Classify,
    Ideals,
    Closure,
    Strictify,
    Extend,
    Interpolate,
    Morcheck,
    Antichains,
    Fixture,
    Audit,
}

impl Command {
    /// Whether `--bound` is read.
    pub fn uses_bound(self) -> bool {
        matches!(self, Command::Interpolate | Command::Morcheck | Command::Audit)
    }
}

pub const DEFAULT_STAGE: u64 = 100;
pub const DEFAULT_BOUND: u64 = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub command: Command,
    pub stage: Option<u64>,
    pub bound: Option<u64>,
    pub format: Format,
    pub seed: u64,
    pub empty_segment_ok: bool,
}

impl RunConfig {
    pub fn new(spec_path: impl Into<PathBuf>, command: Command) -> Self {
        RunConfig {
            spec_path: spec_path.into(),
            command,
            stage: None,
            bound: None,
            format: Format::Human,
            seed: 0,
            empty_segment_ok: false,
        }
    }
}

/// Bounds and options after defaults are settled.
#[derive(Clone, Debug)]
pub struct Settings {
    pub stage: u64,
    pub bound: u64,
    pub seed: u64,
    pub build: BuildOptions,
    /// Pointer to the relation node, for error records.
    pub relation_pointer: String,
}

fn settle(config: &RunConfig, text: &str) -> Result<Settings, Outcome> {
    let machine = config.format == Format::Machine;
    let stage = match (config.stage, machine) {
        (Some(s), _) => s,
        (None, false) => DEFAULT_STAGE,
        (None, true) => return Err(Outcome::usage("", "--stage is required with --format machine")),
    };
    let bound = match (config.bound, machine && config.command.uses_bound()) {
        (Some(b), _) => b,
        (None, false) => DEFAULT_BOUND,
        (None, true) => return Err(Outcome::usage("", "--bound is required with --format machine")),
    };
    let relation_pointer = match serde_json::from_str::<serde_json::Value>(text) {
        Ok(v) if v.get("relation").is_some() => "/relation".to_string(),
        _ => String::new(),
    };
    Ok(Settings {
        stage,
        bound,
        seed: config.seed,
        build: BuildOptions {
            engine: EngineConfig {
                empty_segment_ok: config.empty_segment_ok,
            },
            stage,
        },
        relation_pointer,
    })
}

/// Run a command on spec text.
pub fn run_text(config: &RunConfig, text: &str) -> Outcome {
    let settings = match settle(config, text) {
        Ok(s) => s,
        Err(out) => return out,
    };
    let doc = match parse_document(text) {
        Ok(doc) => doc,
        Err(e) => return Outcome::usage(&e.pointer, &e.message),
    };
    let opts = settings.build;
    let relation = || build(&doc.relation, &opts).map_err(|e| Outcome::usage(&settings.relation_pointer, &e.message));
    let with_relation = |f: fn(&idealspace_core::RelationSource, &Settings) -> Outcome| match relation() {
        Ok(r) => f(&r, &settings),
        Err(out) => out,
    };
    match config.command {
        Command::Show => with_relation(commands::show),
        Command::Classify => with_relation(commands::classify_cmd),
        Command::Ideals => with_relation(commands::ideals),
        Command::Closure => with_relation(commands::closure),
        Command::Strictify => with_relation(commands::strictify_cmd),
        Command::Interpolate => with_relation(commands::interpolate),
        Command::Antichains => with_relation(commands::antichains),
        Command::Audit => with_relation(commands::audit),
        Command::Extend => commands::extend(&doc, &opts, &settings),
        Command::Morcheck => commands::morcheck(&doc, &opts, &settings),
        Command::Fixture => commands::fixture(&doc, &settings),
    }
}

/// Run a command on the spec file named in `config`.
pub fn run(config: &RunConfig) -> Outcome {
    match std::fs::read_to_string(&config.spec_path) {
        Ok(text) => run_text(config, &text),
        Err(e) => Outcome::usage("", &format!("cannot read {}: {e}", config.spec_path.display())),
    }
}
