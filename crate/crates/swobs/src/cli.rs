//! Command-line interface.
//!
//! Exit codes: `0` for success (observable / placement found / probe
//! agreement), `1` for semantically negative answers (not observable,
//! no feasible placement, probe disagreement), `2` for usage, parse,
//! validation, and wrong-class errors.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{
    document_from_placement, export_dot, read_placement, read_system, to_pretty_json,
    write_placement, PlacementDocument,
};
use crate::placement::{place, AlgorithmChoice, PlacementOptions};
use crate::sysmodel::{vertex_name, SensorPlacement, SwitchedSystem};
use crate::verify::{
    brute_force_min_placement, check_structural_observability, numeric_rank_probe, ProbeReport,
    Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Auto,
    General,
    Class1,
    Nodal,
}

impl From<AlgorithmArg> for AlgorithmChoice {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Auto => AlgorithmChoice::Auto,
            AlgorithmArg::General => AlgorithmChoice::General,
            AlgorithmArg::Class1 => AlgorithmChoice::Class1,
            AlgorithmArg::Nodal => AlgorithmChoice::Nodal,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "swobs",
    version,
    about = "Structural observability and sensor placement for switched systems with unknown inputs"
)]
struct Cli {
    /// Report format for analysis results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Accept disturbances whose F column is zero in every mode.
    #[arg(long, global = true)]
    allow_zero_f_columns: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SystemArg {
    /// System description (JSON).
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide structural observability of a system under a placement.
    Check {
        #[command(flatten)]
        system: SystemArg,
        /// Placement document (JSON).
        #[arg(long, value_name = "FILE")]
        placement: PathBuf,
    },
    /// Compute a minimum dedicated-sensor placement.
    Place {
        #[command(flatten)]
        system: SystemArg,
        /// Construction to use; `auto` dispatches on the system class.
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
        algorithm: AlgorithmArg,
        /// Prefer state sensors where the optimum allows a choice.
        #[arg(long)]
        avoid_input_sensors: bool,
        /// Write the placement document here (JSON).
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Exhaustive minimum placement (small systems only).
    Oracle {
        #[command(flatten)]
        system: SystemArg,
        /// Largest cardinality to try (default: all vertices).
        #[arg(long, value_name = "K")]
        max_size: Option<usize>,
        /// Refuse systems with more than this many vertices.
        #[arg(long, value_name = "N", default_value_t = 12)]
        cap: usize,
    },
    /// Compare generic rank against the numeric rank of random
    /// realizations.
    Probe {
        #[command(flatten)]
        system: SystemArg,
        /// Placement document (JSON).
        #[arg(long, value_name = "FILE")]
        placement: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, value_name = "SEED", default_value_t = 0)]
        seed: u64,
        /// Relative singular-value threshold.
        #[arg(long, value_name = "TOL", default_value_t = 1e-9)]
        tol: f64,
    },
    /// Render the union digraph (and optionally a placement) as DOT.
    Dot {
        #[command(flatten)]
        system: SystemArg,
        /// Placement document (JSON) to draw as output boxes.
        #[arg(long, value_name = "FILE")]
        placement: Option<PathBuf>,
        /// Write DOT here instead of stdout.
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_system(cli: &Cli, arg: &SystemArg) -> Result<SwitchedSystem> {
    let sys = read_system(&arg.input)?;
    sys.validate(cli.allow_zero_f_columns)?;
    Ok(sys)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Check { system, placement } => {
            let sys = load_system(cli, system)?;
            let pl = read_placement(placement)?;
            let verdict = check_structural_observability(&sys, &pl)?;
            match cli.format {
                Format::Human => print_verdict(&verdict),
                Format::Json => print!("{}", to_pretty_json(&verdict)?),
            }
            Ok(if verdict.observable { 0 } else { 1 })
        }
        Command::Place {
            system,
            algorithm,
            avoid_input_sensors,
            output,
        } => {
            let sys = load_system(cli, system)?;
            let opts = PlacementOptions {
                avoid_input_sensors: *avoid_input_sensors,
                algorithm: (*algorithm).into(),
            };
            let pl = place(&sys, &opts)?;
            if let Some(path) = output {
                write_placement(path, &pl)?;
            }
            match cli.format {
                Format::Human => print_placement(&pl),
                Format::Json => print!("{}", to_pretty_json(&document_from_placement(&pl))?),
            }
            Ok(0)
        }
        Command::Oracle {
            system,
            max_size,
            cap,
        } => {
            let sys = load_system(cli, system)?;
            let max_size = max_size.unwrap_or_else(|| sys.num_vertices());
            let found = brute_force_min_placement(&sys, max_size, *cap)?;
            match cli.format {
                Format::Human => match &found {
                    Some(pl) => print_placement(pl),
                    None => println!("no feasible placement of size <= {max_size}"),
                },
                Format::Json => {
                    let out = OracleOutput {
                        feasible: found.is_some(),
                        max_size,
                        placement: found.as_ref().map(document_from_placement),
                    };
                    print!("{}", to_pretty_json(&out)?);
                }
            }
            Ok(if found.is_some() { 0 } else { 1 })
        }
        Command::Probe {
            system,
            placement,
            trials,
            seed,
            tol,
        } => {
            if !tol.is_finite() || *tol <= 0.0 {
                return Err(Error::InvalidDocument(format!(
                    "tolerance must be positive and finite, got {tol}"
                )));
            }
            let sys = load_system(cli, system)?;
            let pl = read_placement(placement)?;
            let report = numeric_rank_probe(&sys, &pl, *trials as usize, *seed, *tol)?;
            match cli.format {
                Format::Human => print_probe(&report),
                Format::Json => print!("{}", to_pretty_json(&report)?),
            }
            Ok(if report.agrees { 0 } else { 1 })
        }
        Command::Dot {
            system,
            placement,
            output,
        } => {
            let sys = load_system(cli, system)?;
            let pl = placement.as_ref().map(|p| read_placement(p)).transpose()?;
            let dot = export_dot(&sys, pl.as_ref())?;
            match output {
                Some(path) => fs::write(path, dot)?,
                None => print!("{dot}"),
            }
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct OracleOutput {
    feasible: bool,
    max_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    placement: Option<PlacementDocument>,
}

fn names(vertices: impl IntoIterator<Item = usize>, p: usize) -> String {
    let list: Vec<String> = vertices.into_iter().map(|v| vertex_name(v, p)).collect();
    if list.is_empty() {
        "(none)".into()
    } else {
        list.join(", ")
    }
}

fn print_verdict(v: &Verdict) {
    println!("observable: {}", if v.observable { "yes" } else { "no" });
    if v.condition_i {
        println!("output access: every vertex reaches a sensor");
    } else {
        println!(
            "output access: no path to any sensor from {}",
            names(v.non_accessible.iter().copied(), v.p)
        );
    }
    println!("generic rank: {} of {}", v.rank_achieved, v.rank_required);
}

fn print_placement(pl: &SensorPlacement) {
    println!("algorithm: {}", pl.algorithm.as_str());
    println!(
        "sensors ({}): {}",
        pl.cardinality(),
        names(pl.sensors.iter().copied(), pl.p)
    );
    println!(
        "disturbance sensors: {}",
        names(pl.input_sensors(), pl.p)
    );
    println!(
        "state sensors: {}",
        names(pl.state_sensors_aug(), pl.p)
    );
    let stages: [(&str, &std::collections::BTreeSet<usize>); 4] = [
        ("matching", &pl.provenance.from_matching),
        ("unmatched columns", &pl.provenance.from_unmatched_columns),
        ("uncovered sinks", &pl.provenance.from_uncovered_targets),
        ("class rule", &pl.provenance.from_class_rule),
    ];
    for (label, set) in stages {
        if !set.is_empty() {
            println!("  from {label}: {}", names(set.iter().copied(), pl.p));
        }
    }
    for w in &pl.warnings {
        println!("warning: {w}");
    }
}

fn print_probe(r: &ProbeReport) {
    println!(
        "structural generic rank: {} (full rank is {})",
        r.structural_rank, r.rank_required
    );
    let min = r.per_trial.iter().copied().min().unwrap_or(0);
    println!(
        "numeric rank over {} trials: max {}, min {}",
        r.trials, r.max_numeric_rank, min
    );
    println!("agreement: {}", if r.agrees { "yes" } else { "no" });
}
