//! `psmaps`: decide, construct, verify and compare proper maps between
//! pseudoellipsoid models from the command line.

mod batch;
mod request;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use request::{execute, CliError};

#[derive(Parser)]
#[command(name = "psmaps", version, about = "Proper maps between pseudoellipsoid models")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for sampled numeric checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Args)]
struct InstanceArgs {
    /// Source exponents, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<i64>>,
    /// Target exponents, comma separated, in your own order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    q: Option<Vec<i64>>,
    /// JSON payload file (`-` for stdin); fields override nothing, flags are ignored.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a proper map exists.
    Decide(InstanceArgs),
    /// List admissible patterns.
    Enumerate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Build a classified map (default witness unless a coefficient matrix is given).
    Construct {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Pattern as JSON text, e.g. '{"sigma":{"4":1,"5":2}}'.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        print_radical: bool,
    },
    /// Check that a map sends the source model into the target model.
    Verify {
        /// Map document (classified or candidate).
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Multiplicity of a classified map at the origin.
    Mult {
        #[arg(long)]
        map: PathBuf,
    },
    /// Essential type of the source model.
    Esstype {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        p: Vec<i64>,
    },
    /// Target automorphisms.
    #[command(subcommand)]
    Aut(AutCommand),
    /// Decide whether two classified maps differ by a target automorphism.
    Equivalent(PairArgs),
    /// Run newline-delimited JSON requests; one result line per request.
    Batch {
        /// Request file (`-` for stdin).
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum AutCommand {
    /// Normal form of a generator word or a list of automorphisms.
    Compose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Inverse of an automorphism.
    Invert {
        #[arg(long)]
        input: PathBuf,
    },
    /// Same as the top-level `equivalent`.
    Equivalent(PairArgs),
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

/// Resolves a file argument, falling back to the fixture directory for
/// relative paths that do not exist.
fn resolve(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os("PSMAPS_FIXTURES") {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(e.to_string()))?;
        return Ok(s);
    }
    let path = resolve(path);
    std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn parse_json_arg(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("{what}: {e}")))
}

fn instance_payload(args: &InstanceArgs) -> Result<Value, CliError> {
    if let Some(path) = &args.input {
        return read_json(path);
    }
    match (&args.p, &args.q) {
        (Some(p), Some(q)) => Ok(json!({ "p": p, "q": q })),
        _ => Err(CliError::Schema("give --p and --q, or --input".into())),
    }
}

fn request(cmd: &Command) -> Result<(&'static str, Value), CliError> {
    Ok(match cmd {
        Command::Decide(inst) => ("decide", instance_payload(inst)?),
        Command::Enumerate { inst, limit } => {
            let mut v = instance_payload(inst)?;
            if let (Some(l), Some(obj)) = (limit, v.as_object_mut()) {
                obj.insert("limit".into(), json!(l));
            }
            ("enumerate", v)
        }
        Command::Construct { inst, pattern, print_radical } => {
            let mut v = instance_payload(inst)?;
            if let Some(obj) = v.as_object_mut() {
                if let Some(text) = pattern {
                    obj.insert("pattern".into(), parse_json_arg(text, "--pattern")?);
                }
                if *print_radical {
                    obj.insert("print_radical".into(), json!(true));
                }
            }
            ("construct", v)
        }
        Command::Verify { map, samples } => {
            let mut v = json!({ "map": read_json(map)? });
            if let Some(n) = samples {
                v["samples"] = json!(n);
            }
            ("verify", v)
        }
        Command::Mult { map } => ("mult", json!({ "map": read_json(map)? })),
        Command::Esstype { p } => ("esstype", json!({ "p": p })),
        Command::Aut(AutCommand::Compose { input }) => ("aut-compose", read_json(input)?),
        Command::Aut(AutCommand::Invert { input }) => ("aut-invert", read_json(input)?),
        Command::Aut(AutCommand::Equivalent(pair)) | Command::Equivalent(pair) => {
            ("equivalent", json!({ "a": read_json(&pair.a)?, "b": read_json(&pair.b)? }))
        }
        Command::Batch { .. } => unreachable!("batch is handled separately"),
    })
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(v),
        Format::Pretty => serde_json::to_string_pretty(v),
    }
    .expect("JSON values serialize")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Batch { file } = &cli.command {
        return match read_text(file) {
            Ok(text) => {
                for line in batch::run(&text, cli.seed) {
                    println!("{line}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                println!("{}", render(&json!({ "error": e.to_json() }), cli.format));
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }
    let result = request(&cli.command).and_then(|(name, payload)| execute(name, payload, cli.seed));
    match result {
        Ok(v) => {
            println!("{}", render(&v, cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", render(&json!({ "error": e.to_json() }), cli.format));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
