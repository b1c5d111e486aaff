use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lrp_radar::ambiguity::{brute_force_scan, four_lrp_condition, generate_layout, write_pairs_csv, SearchConfig};
use lrp_radar::geometry::{LayoutFile, Room};
use lrp_radar::positioning::build_lut;
use lrp_radar::scenario::{emit_report, run_scenario, Method, Scenario};
use lrp_radar::{Error, Result};

#[derive(Parser)]
#[command(name = "lrp", version, about = "Reflector-assisted radar indoor positioning")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a reflector layout with few fingerprint ambiguities.
    PlanLayout {
        /// Room as WIDTHxDEPTHxHEIGHT in meters.
        #[arg(long, value_parser = parse_room)]
        room: Room,
        #[arg(long, default_value_t = 4)]
        lrps: usize,
        #[arg(long, default_value_t = 1)]
        types: usize,
        #[arg(long, default_value_t = 500)]
        candidates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        lrp_height: f64,
        #[arg(long, default_value_t = 0.0)]
        radar_height: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a layout for ambiguous positions on a grid.
    CheckLayout {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
        #[arg(long, default_value_t = 0.0375)]
        tol: f64,
        /// CSV of ambiguous pairs.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build the fingerprint lookup table of a layout.
    BuildLut {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, default_value_t = 0.075)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        fine: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario and write steps.csv and summary.json.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        warmup: Option<usize>,
    },
}

fn parse_room(s: &str) -> std::result::Result<Room, String> {
    Room::parse_dims(s).map_err(|e| e.to_string())
}

fn read_layout(path: &PathBuf) -> Result<(Room, lrp_radar::geometry::LrpLayout)> {
    LayoutFile::read(path)?
        .into_parts()
        .map_err(|e| Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::PlanLayout {
            room,
            lrps,
            types,
            candidates,
            seed,
            lrp_height,
            radar_height,
            out,
        } => {
            let cfg = SearchConfig {
                n_lrps: lrps,
                n_types: types,
                n_candidates: candidates,
                lrp_height,
                radar_height,
                ..SearchConfig::default()
            };
            let (layout, report) = generate_layout(&room, &cfg, seed)?;
            LayoutFile::new(room, &layout).write(&out)?;
            println!(
                "selected candidate {} of {} ({} feasible): {} ambiguous pairs, clearance {:.3} m",
                report.selected, report.candidates, report.feasible, report.ambiguity_pairs, report.clearance
            );
        }
        Cmd::CheckLayout {
            layout,
            grid,
            tol,
            report,
        } => {
            let (room, layout) = read_layout(&layout)?;
            let condition = if layout.num_types_used() == 1 && layout.len() == 4 {
                Some(four_lrp_condition(&layout)?)
            } else {
                None
            };
            let pairs = brute_force_scan(&layout, &room, grid, tol)?;
            if let Some(path) = report {
                write_pairs_csv(&pairs, std::fs::File::create(path)?)?;
            }
            match condition {
                Some(c) => println!("four-reflector condition: {c}"),
                None => println!("four-reflector condition: not applicable"),
            }
            println!("ambiguous pairs: {}", pairs.len());
        }
        Cmd::BuildLut {
            layout,
            delta,
            fine,
            out,
        } => {
            let (room, layout) = read_layout(&layout)?;
            let table = build_lut(&layout, &room, delta, fine)?;
            table.write(&out)?;
            println!("{} entries", table.len());
        }
        Cmd::Simulate {
            scenario,
            runs,
            seed,
            out,
            method,
            warmup,
        } => {
            let mut s = Scenario::from_file(&scenario)?;
            if let Some(r) = runs {
                s.runs = r;
            }
            if let Some(v) = seed {
                s.seed = v;
            }
            if let Some(m) = method {
                s.method = m;
            }
            if let Some(w) = warmup {
                s.warmup_steps = w;
            }
            let report = run_scenario(&s)?;
            emit_report(&report, &out)?;
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4} m"));
            let sm = &report.summary;
            println!("runs {} steps {}", sm.runs, sm.steps);
            println!("lut  mean error {} (steps >= {}: {})", fmt(sm.lut_mean_error), sm.converged_from_step, fmt(sm.lut_mean_error_converged));
            println!("amcl mean error {} (steps >= {}: {})", fmt(sm.amcl_mean_error), sm.converged_from_step, fmt(sm.amcl_mean_error_converged));
            if let Some(k) = sm.amcl_convergence_step {
                println!("amcl converged at step {k}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. }
                | Error::InvalidArgument(_)
                | Error::InvalidRoom(_)
                | Error::InvalidLayout(_)
                | Error::InvalidParameterization(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
