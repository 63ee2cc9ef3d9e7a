//! horolab: build Cayley balls from group spec files, run the named
//! experiments, and write JSON/CSV/DOT artifacts with a content manifest.
//!
//! Exit codes: 0 ok, 2 config error, 3 precondition failure, 4 resource cap,
//! 5 internal invariant breach (which also writes a diagnostic dump).

mod commands;

use clap::{Args, Parser, Subcommand};
use horolab::error::{Error, ErrorClass};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "horolab", version, about = "Exact-integer Cayley graph experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Group spec file (JSON with a `factors` array).
    #[arg(long)]
    group: PathBuf,
    /// Ball radius around the identity.
    #[arg(long)]
    radius: u32,
    /// Output directory for artifacts and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Restrict artifact formats (json, csv, dot); repeatable. Default: all.
    #[arg(long, value_parser = ["json", "csv", "dot"])]
    format: Vec<String>,
    /// Vertex cap for ball construction.
    #[arg(long, default_value_t = horolab::ball::DEFAULT_VERTEX_CAP)]
    cap: usize,
}

#[derive(Args, Clone)]
struct RayArg {
    /// Ray spec file (JSON {"prefix": "...", "period": "..."}); an empty
    /// period declares a finite ray.
    #[arg(long)]
    ray: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a ball: DOT graph and the distance table.
    Ball {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Busemann field of a ray with the Lipschitz and distance-like reports.
    Busemann {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ray: RayArg,
        /// Boundary margin for the distance-like check.
        #[arg(long, default_value_t = 2)]
        margin: u32,
    },
    /// Gradient successor tree from a start vertex; optionally the
    /// fellow-travel profile against a second start.
    Gradient {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ray: RayArg,
        /// Start vertex as a word (e.g. "a b'").
        #[arg(long)]
        start: String,
        /// Second start for the level-aligned fellow-travel profile.
        #[arg(long)]
        other: Option<String>,
        /// first | all | random
        #[arg(long, default_value = "first")]
        policy: String,
        /// Seed, required when --policy random.
        #[arg(long)]
        seed: Option<u64>,
        /// Leaf cap for the all-policy tree.
        #[arg(long, default_value_t = horolab::gradient::DEFAULT_LEAF_CAP)]
        budget_leaves: usize,
    },
    /// Quasi-geodesic excursion search against a gauge list.
    MorseTest {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ray: RayArg,
        /// Gauge pairs "lambda:epsilon", comma separated; lambda may be a
        /// fraction like 3/2.
        #[arg(long)]
        gauge: String,
        /// Max endpoint distance along the geodesic.
        #[arg(long, default_value_t = 4)]
        budget_dist: u32,
        /// DFS node cap per endpoint pair.
        #[arg(long, default_value_t = horolab::morse::DEFAULT_QG_NODE_CAP)]
        budget_nodes: u64,
    },
    /// Projection diameters of sample balls along a ray.
    ContractionTest {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ray: RayArg,
        /// Ray times for sample centers, comma separated.
        #[arg(long)]
        at: String,
        /// Sample ball radii, comma separated (same length as --at).
        #[arg(long)]
        radii: String,
        /// Offset generator: the center at time t with radius r is
        /// gamma(t) * offset^(r+1).
        #[arg(long, default_value = "b")]
        offset: String,
        /// Length of the geodesic segment taken from the ray.
        #[arg(long)]
        length: Option<u32>,
    },
    /// Symbolic derivative of a Busemann field (or a field CSV).
    Derivative {
        #[command(flatten)]
        common: CommonArgs,
        /// Ray spec; mutually exclusive with --field.
        #[arg(long)]
        ray: Option<PathBuf>,
        /// Field CSV to differentiate instead of a ray.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Forbidden-pattern JSON to scan the derivative against.
        #[arg(long)]
        forbidden: Option<PathBuf>,
    },
    /// Integrate a derivative CSV back to a field.
    Integrate {
        #[command(flatten)]
        common: CommonArgs,
        /// Derivative CSV produced by `derivative`.
        #[arg(long)]
        deriv: PathBuf,
        /// Base vertex word.
        #[arg(long, default_value = "e")]
        base: String,
        /// Field value at the base vertex.
        #[arg(long, default_value_t = 0)]
        base_value: i64,
    },
    /// Shift-action law and derivative equivariance checks.
    ShiftCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ray: RayArg,
        /// Shift element as a word.
        #[arg(long)]
        by: String,
    },
    /// Horosphere convergence experiment with CSV rows and a DOT overlay.
    Horosphere {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ray: RayArg,
        /// Largest horosphere index to test.
        #[arg(long)]
        horizon: u32,
        /// Convergence threshold constant.
        #[arg(long, default_value_t = 0)]
        threshold: i64,
    },
    /// Run the four shipped experiment suites end to end.
    Figures {
        /// Output directory.
        #[arg(long, default_value = "out/figures")]
        out: PathBuf,
        /// Seed recorded in the manifest (the suites are deterministic).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    let result = commands::dispatch(cli.command);
    match result {
        Ok(summary) => {
            eprintln!("horolab: {summary} ({} ms)", start.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("horolab: error: {err}");
            let code = match err.class() {
                ErrorClass::Config => 2,
                ErrorClass::Precondition => 3,
                ErrorClass::ResourceCap => 4,
                ErrorClass::Invariant => {
                    write_diagnostic(&err);
                    5
                }
            };
            ExitCode::from(code)
        }
    }
}

fn write_diagnostic(err: &Error) {
    let dump = serde_json::json!({
        "tool": "horolab",
        "kind": "invariant-breach",
        "message": err.to_string(),
    });
    let path = std::path::Path::new("horolab-diagnostic.json");
    if std::fs::write(path, format!("{dump:#}")).is_ok() {
        eprintln!("horolab: diagnostic dump written to {}", path.display());
    }
}
