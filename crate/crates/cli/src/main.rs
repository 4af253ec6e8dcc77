use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pretree_lab::parse::parse_rational;
use pretree_lab::report::Report;
use pretree_lab::Rational;

mod commands;
mod suites;

const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Parser, Debug)]
#[command(name = "pretree-lab", version, about = "Checks for pretrees, median algebras, Z-trees and cover entropy")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Master seed, or `random` for a time-derived one.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Number of random trials for sampled checks.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Which outcome counts as success for the exit status.
    #[arg(long, global = true, value_enum, default_value_t = Expect::Pass)]
    expect: Expect,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timing: bool,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Pass,
    Fail,
    Independent,
    Tame,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    if s == "random" {
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_err(|e| e.to_string())?.as_nanos();
        return Ok(nanos as u64);
    }
    s.parse().map_err(|_| format!("expected an integer or `random`, got `{s}`"))
}

pub fn parse_epsilon(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("expected a rational `p/q`, got `{s}`"))
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the betweenness and median axioms of a structure.
    Axioms {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Median of three points.
    Median {
        #[arg(long = "in")]
        input: PathBuf,
        a: String,
        b: String,
        c: String,
    },
    /// Shadow `S^light_base`.
    Shadow {
        #[arg(long = "in")]
        input: PathBuf,
        base: String,
        light: String,
    },
    /// Shadow topology: closed sets, Hausdorff property, stability.
    Topology {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Median retraction onto `[u,v]`; all pairs when none is given.
    Retract {
        #[arg(long = "in")]
        input: PathBuf,
        u: Option<String>,
        v: Option<String>,
    },
    /// Shadow separation of every strict triple.
    Separate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Whether a function family is independent.
    Independence {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Bounded-length tameness of a function family.
    Tame {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Helly-type selection of a nearly convergent subsequence.
    Helly {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_epsilon, default_value = "1/10")]
        epsilon: Rational,
        #[arg(long, default_value_t = 2)]
        target: usize,
        /// Structure on which the limit must be monotone.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// B- and C-monotonicity of a map; all maps when `--map` is absent.
    Monotone {
        #[arg(long = "in")]
        input: PathBuf,
        /// Target structure (defaults to the source).
        #[arg(long)]
        to: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Operations on a rule tree with an automorphism action.
    Ztree {
        /// Action description file.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(subcommand)]
        op: ZtreeOp,
    },
    /// Minimum-subcover table of an automorphism sequence on a cover.
    Entropy {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        /// `identity`, `reflect`, `swap:<a>:<b>` or an automorphism file; its powers are used.
        #[arg(long, default_value = "identity")]
        autoseq: String,
        #[arg(long, default_value_t = 12)]
        nmax: usize,
    },
    /// Run a named property suite.
    Suite {
        #[arg(value_enum)]
        name: suites::SuiteName,
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, value_parser = parse_epsilon, default_value = "1/8")]
        epsilon: Rational,
    },
}

#[derive(Subcommand, Debug)]
pub enum ZtreeOp {
    /// Print the parsed action.
    Describe,
    /// Image of a point under a group word.
    Act { word: String, point: String },
    /// Sampled median and betweenness preservation of each generator.
    Monotone,
    /// Search for group elements pushing two points together.
    Proximal {
        x: String,
        y: String,
        #[arg(long, default_value_t = 20)]
        target: usize,
        /// Longest group word tried (default: target + 4).
        #[arg(long)]
        search: Option<usize>,
    },
    /// Cycle structure on depth-k cylinders.
    Cylinders {
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
    /// Depth-k cylinders visited by an orbit.
    Omega {
        x: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Search `g` with `g·(Ends ∖ [w]) ⊆ [w']`.
    Ep {
        w: String,
        w_prime: String,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Sampled closedness of the betweenness relation.
    Closedness,
    /// Sampled stabilization of shadow membership along approximants.
    Stabilization,
    /// Scan the built-in fragmentability fixtures.
    Fragment {
        #[arg(long, value_parser = parse_epsilon, default_value = "1/8")]
        epsilon: Rational,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
}

pub fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn command_echo() -> String {
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with("--seed=")).collect();
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--seed" {
            skip = true;
            continue;
        }
        out.push(a);
    }
    out.join(" ")
}

fn run(cli: &Cli) -> Result<Report, String> {
    let c = &cli.common;
    let mut report = Report::new(command_echo(), Some(c.seed()));
    match &cli.command {
        Command::Axioms { input } => commands::axioms(&mut report, input)?,
        Command::Median { input, a, b, c } => commands::median(&mut report, input, [a, b, c])?,
        Command::Shadow { input, base, light } => commands::shadow_cmd(&mut report, input, base, light)?,
        Command::Topology { input } => commands::topology(&mut report, input)?,
        Command::Retract { input, u, v } => commands::retract(&mut report, input, u.as_deref(), v.as_deref())?,
        Command::Separate { input } => commands::separate(&mut report, input)?,
        Command::Independence { input } => commands::independence(&mut report, input)?,
        Command::Tame { input, max_len } => commands::tame(&mut report, input, *max_len)?,
        Command::Helly {
            input,
            epsilon,
            target,
            tree,
        } => commands::helly(&mut report, input, epsilon, *target, tree.as_deref())?,
        Command::Monotone { input, to, map } => commands::monotone(&mut report, input, to.as_deref(), map.as_deref())?,
        Command::Ztree { input, op } => commands::ztree(&mut report, c, input.as_deref(), op)?,
        Command::Entropy {
            complex,
            cover,
            autoseq,
            nmax,
        } => commands::entropy(&mut report, complex, cover, autoseq, *nmax)?,
        Command::Suite {
            name,
            nmax,
            radius,
            epsilon,
        } => suites::run(
            &mut report,
            *name,
            &suites::SuiteOptions {
                seed: c.seed(),
                trials: c.trials,
                nmax: *nmax,
                radius: *radius,
                epsilon: epsilon.clone(),
            },
        )?,
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match cli.common.format {
        Format::Text => print!("{}", report.to_text(cli.common.timing)),
        Format::Json => println!("{}", report.to_json(cli.common.timing)),
    }
    let success = match cli.common.expect {
        Expect::Pass | Expect::Tame => report.all_passed(),
        Expect::Fail | Expect::Independent => !report.all_passed(),
    };
    if success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
