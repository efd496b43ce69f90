//! Command-line front end.
//!
//! Exit codes: 0 success, 1 improper (or otherwise invalid) model, 2 parse
//! error, 3 missing initial state, 4 bad arguments.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::boundedness::ExplorationCaps;
use crate::dsl::parse_network;
use crate::network::{check_nonnegativity, check_regularity, ReactionNetwork, RegularityVerdict};
use crate::report::{access, analyze, properness_entries, DEFAULT_BOX};
use crate::simulation::{estimate_moments, DEFAULT_EVENT_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IMPROPER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MISSING_INIT: i32 = 3;
pub const EXIT_BAD_ARGS: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "momentcert",
    version,
    about = "Certified boundedness and moment analysis of reaction networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a network and check properness and regularity.
    Validate {
        file: PathBuf,
        /// Regularity/nonnegativity box bound.
        #[arg(long = "box", default_value_t = DEFAULT_BOX)]
        box_bound: i64,
    },
    /// Boundedness, critical partition and moment certificates.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Ensemble moment estimates by exact stochastic simulation.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_end: f64,
        /// Number of grid times, evenly spaced in (0, t_end].
        #[arg(long, default_value_t = 10)]
        grid: usize,
        /// Comma-separated moment orders.
        #[arg(long, default_value = "1,2")]
        orders: String,
        #[arg(long, default_value_t = 1000)]
        n_traj: usize,
        /// Master seed; drawn at random and recorded when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_EVENT_CAP)]
        event_cap: u64,
        /// Write the moment table here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Breadth-first exploration of the accessible set.
    Access {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = ExplorationCaps::default().max_states)]
        max_states: usize,
        #[arg(long, default_value_t = ExplorationCaps::default().max_coord)]
        max_coord: i64,
        /// Print a firing path to each state.
        #[arg(long)]
        witness: bool,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Initial state "a,b,...", overriding the file's init line.
    #[arg(long)]
    init: Option<String>,
    #[arg(long = "box", default_value_t = DEFAULT_BOX)]
    box_bound: i64,
    /// Also write the JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail<T>(code: i32, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure {
        code,
        message: message.into(),
    })
}

fn load(path: &Path) -> Result<ReactionNetwork, Failure> {
    let src = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_BAD_ARGS, format!("cannot read {}: {e}", path.display())),
    };
    parse_network(&src).or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<T>())
        .collect::<Result<Vec<_>, _>>()
        .or_else(|_| fail(EXIT_BAD_ARGS, format!("invalid {what} '{s}'")))
}

fn resolve_init(net: &ReactionNetwork, flag: Option<&str>) -> Result<Option<Vec<i64>>, Failure> {
    let Some(s) = flag else {
        return Ok(net.init.clone());
    };
    let x: Vec<i64> = parse_list(s, "initial state")?;
    if x.len() != net.n_species() {
        return fail(
            EXIT_BAD_ARGS,
            format!(
                "--init has {} values, the network has {} species",
                x.len(),
                net.n_species()
            ),
        );
    }
    if x.iter().any(|&v| v < 0) {
        return fail(EXIT_BAD_ARGS, "--init values must be nonnegative");
    }
    Ok(Some(x))
}

fn require_init(net: &ReactionNetwork, flag: Option<&str>) -> Result<Vec<i64>, Failure> {
    resolve_init(net, flag)?.map_or_else(
        || fail(EXIT_MISSING_INIT, "no initial state: pass --init or add an init line"),
        Ok,
    )
}

fn check_box(b: i64) -> Result<(), Failure> {
    if b < 0 {
        return fail(EXIT_BAD_ARGS, "--box must be >= 0");
    }
    Ok(())
}

/// Properness diagnostics; `Err` with exit code 1 if any reaction is improper.
fn require_proper(net: &ReactionNetwork, out: &mut dyn Write) -> Result<(), Failure> {
    let improper: Vec<_> = properness_entries(net)
        .into_iter()
        .filter(|p| p.witness.is_some())
        .collect();
    if improper.is_empty() {
        return Ok(());
    }
    for p in &improper {
        let w: Vec<String> = p
            .witness
            .as_ref()
            .expect("improper")
            .iter()
            .map(i64::to_string)
            .collect();
        let _ = writeln!(
            out,
            "reaction {}: IMPROPER (species {}, positive propensity at x = ({}) where the jump leaves the lattice)",
            p.reaction,
            p.species.as_deref().unwrap_or("?"),
            w.join(", ")
        );
    }
    fail(EXIT_IMPROPER, format!("{} improper reaction(s)", improper.len()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).or_else(|e| fail(EXIT_BAD_ARGS, format!("cannot write {}: {e}", path.display())))
}

fn validate(file: &Path, box_bound: i64, out: &mut dyn Write) -> Result<(), Failure> {
    check_box(box_bound)?;
    let net = load(file)?;
    require_proper(&net, out)?;
    let _ = writeln!(
        out,
        "{} species, {} reactions, all proper",
        net.n_species(),
        net.n_reactions()
    );
    for (r, v) in net.reactions().iter().zip(check_regularity(&net, box_bound)) {
        if let RegularityVerdict::Violation { count, examples, .. } = v {
            let x: Vec<String> = examples[0].state.iter().map(i64::to_string).collect();
            let _ = writeln!(
                out,
                "warning: reaction {} is not regular on box 0..={box_bound} ({count} states, e.g. ({}))",
                r.name,
                x.join(", ")
            );
        }
    }
    for (r, neg) in net.reactions().iter().zip(check_nonnegativity(&net, box_bound)) {
        if let Some(x) = neg {
            let x: Vec<String> = x.iter().map(i64::to_string).collect();
            let _ = writeln!(
                out,
                "warning: reaction {} has a negative propensity at ({})",
                r.name,
                x.join(", ")
            );
        }
    }
    Ok(())
}

fn run_analyze(file: &Path, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    check_box(common.box_bound)?;
    let net = load(file)?;
    let init = resolve_init(&net, common.init.as_deref())?;
    require_proper(&net, out)?;
    let report = analyze(&net, init.as_deref(), common.box_bound);
    let _ = out.write_all(report.to_text().as_bytes());
    if let Some(p) = &common.json {
        write_file(p, &report.to_json())?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    file: &Path,
    common: &Common,
    t_end: f64,
    grid: usize,
    orders: &str,
    n_traj: usize,
    seed: Option<u64>,
    event_cap: u64,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    check_box(common.box_bound)?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return fail(EXIT_BAD_ARGS, "--t-end must be finite and > 0");
    }
    if grid == 0 {
        return fail(EXIT_BAD_ARGS, "--grid must be >= 1");
    }
    if n_traj < 2 {
        return fail(EXIT_BAD_ARGS, format!("--n-traj must be >= 2, got {n_traj}"));
    }
    if event_cap == 0 {
        return fail(EXIT_BAD_ARGS, "--event-cap must be >= 1");
    }
    let orders: Vec<u32> = parse_list(orders, "moment orders")?;
    if orders.is_empty() || orders.contains(&0) {
        return fail(EXIT_BAD_ARGS, "moment orders must be >= 1");
    }
    let net = load(file)?;
    let x0 = require_init(&net, common.init.as_deref())?;
    require_proper(&net, out)?;
    let seed = seed.unwrap_or_else(rand::random);
    let times: Vec<f64> = (1..=grid).map(|k| t_end * k as f64 / grid as f64).collect();
    let stats = estimate_moments(&net, &x0, &times, &orders, n_traj, seed, event_cap)
        .or_else(|e| fail(EXIT_IMPROPER, format!("simulation aborted: {e}")))?;
    let table = stats.to_csv_string();
    let mut report = analyze(&net, Some(&x0), common.box_bound);
    report.master_seed = Some(seed);
    report.simulation = Some(stats);
    match csv {
        Some(p) => {
            write_file(p, &table)?;
            let _ = out.write_all(report.to_text().as_bytes());
        }
        None => {
            let _ = out.write_all(table.as_bytes());
        }
    }
    if let Some(p) = &common.json {
        write_file(p, &report.to_json())?;
    }
    Ok(())
}

fn run_access(
    file: &Path,
    common: &Common,
    caps: ExplorationCaps,
    witness: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    check_box(common.box_bound)?;
    if caps.max_states == 0 || caps.max_coord < 0 {
        return fail(EXIT_BAD_ARGS, "--max-states must be >= 1 and --max-coord >= 0");
    }
    let net = load(file)?;
    let x0 = require_init(&net, common.init.as_deref())?;
    require_proper(&net, out)?;
    let report = access(&net, &x0, caps, witness, common.box_bound);
    let _ = out.write_all(report.to_text().as_bytes());
    if let Some(p) = &common.json {
        write_file(p, &report.to_json())?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_BAD_ARGS,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate { file, box_bound } => validate(file, *box_bound, out),
        Command::Analyze { file, common } => run_analyze(file, common, out),
        Command::Simulate {
            file,
            common,
            t_end,
            grid,
            orders,
            n_traj,
            seed,
            event_cap,
            csv,
        } => run_simulate(
            file,
            common,
            *t_end,
            *grid,
            orders,
            *n_traj,
            *seed,
            *event_cap,
            csv.as_deref(),
            out,
        ),
        Command::Access {
            file,
            common,
            max_states,
            max_coord,
            witness,
        } => run_access(
            file,
            common,
            ExplorationCaps {
                max_states: *max_states,
                max_coord: *max_coord,
            },
            *witness,
            out,
        ),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
