use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use idealspace::{run, Command, Format, RunConfig, Status};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
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

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Human,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Flag {
    EmptySegmentOk,
}

/// Explore spaces of ideals of enumerable transitive relations.
///
/// Exit status: 0 when every check holds, 1 on a refutation (the witness is
/// printed), 2 when the bounds are inconclusive, 3 on a usage or spec error.
#[derive(Debug, Parser)]
#[command(name = "idealspace", version)]
struct Args {
    command: Cmd,
    /// Relation-spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Stage to read relations at.
    #[arg(long)]
    stage: Option<u64>,
    /// Element bound for interpolate and morcheck; sample count for audit.
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long, value_enum, default_value = "human")]
    format: OutputFormat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "flag", value_enum)]
    flags: Vec<Flag>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { Status::Usage.code() as u8 } else { 0 });
        }
    };
    let command = match args.command {
        Cmd::Show => Command::Show,
        Cmd::Classify => Command::Classify,
        Cmd::Ideals => Command::Ideals,
        Cmd::Closure => Command::Closure,
        Cmd::Strictify => Command::Strictify,
        Cmd::Extend => Command::Extend,
        Cmd::Interpolate => Command::Interpolate,
        Cmd::Morcheck => Command::Morcheck,
        Cmd::Antichains => Command::Antichains,
        Cmd::Fixture => Command::Fixture,
        Cmd::Audit => Command::Audit,
    };
    let format = match args.format {
        OutputFormat::Human => Format::Human,
        OutputFormat::Machine => Format::Machine,
    };
    let config = RunConfig {
        spec_path: args.spec,
        command,
        stage: args.stage,
        bound: args.bound,
        format,
        seed: args.seed,
        empty_segment_ok: args.flags.contains(&Flag::EmptySegmentOk),
    };
    let outcome = run(&config);
    let text = outcome.render(format);
    if outcome.status == Status::Usage && format == Format::Human {
        let _ = std::io::stderr().write_all(text.as_bytes());
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    ExitCode::from(outcome.status.code() as u8)
}
