//! `zarank`: construct extremal rectangle-free grids from projective and
//! affine planes, verify them, evaluate bounds on f(m, n), and solve small
//! instances exactly.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 domain errors or failed verification, 2 usage errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use zarank::bounds::{bound_report, plane_order_status, BoundReport};
use zarank::grid::{read_gridset, write_gridset};
use zarank::plane::{affine_from_projective, grid_axiom_report, AxiomReport, ProjectivePlane};
use zarank::solver::{max_rectfree, verify_extremal, SearchConfig, SolveStatus};

/// Cells above which `bounds` and `bounds-table` leave the exact value to
/// the dedicated `solve` command unless --solve-hard is given.
const TABLE_SOLVER_CELLS: u64 = 64;

#[derive(Parser)]
#[command(name = "zarank", version, about = "Rectangle-free grid subsets: constructions, bounds, exact solves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the projective plane of a prime-power order
    PlaneBuild {
        /// Plane order q (a prime power)
        q: u64,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit the JSON descriptor instead of the incidence grid
        #[arg(long)]
        json: bool,
    },
    /// Check the four plane axioms on an incidence grid file
    PlaneVerify {
        file: PathBuf,
    },
    /// Write an extremal rectangle-free grid built from a plane
    Extremal {
        kind: ExtremalKind,
        /// Plane order q (a prime power)
        q: u64,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Line to delete for the affine construction
        #[arg(long, default_value_t = 0)]
        line_index: usize,
    },
    /// Check that a grid file is rectangle-free with claimed_f - 1 points
    Verify {
        file: PathBuf,
        claimed_f: u64,
    },
    /// Report lower/upper/exact values of f(m, n)
    Bounds {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        json: bool,
        /// Run the exact solver even above 64 cells (may be slow)
        #[arg(long)]
        solve_hard: bool,
    },
    /// Compute f(m, n) exactly by branch and bound
    Solve {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Give up after this many seconds and report the best lower bound
        #[arg(long)]
        time_limit: Option<u64>,
        /// Worker threads
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        #[arg(long)]
        json: bool,
        /// Write the witness grid to a file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Existence status of a projective plane of the given order
    Status {
        #[arg(value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
    },
    /// One bounds row per k in [k_min, k_max]
    BoundsTable {
        #[arg(value_parser = clap::value_parser!(u64).range(3..))]
        k_min: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(3..))]
        k_max: u64,
        /// Run the exact solver even above 64 cells (may be slow)
        #[arg(long)]
        solve_hard: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtremalKind {
    Projective,
    Affine,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn run(command: Command) -> CliResult {
    match command {
        Command::PlaneBuild { q, out, json } => plane_build(q, out, json),
        Command::PlaneVerify { file } => plane_verify(&file),
        Command::Extremal { kind, q, out, line_index } => extremal(kind, q, out, line_index),
        Command::Verify { file, claimed_f } => verify(&file, claimed_f),
        Command::Bounds { m, n, json, solve_hard } => bounds(m, n, json, solve_hard),
        Command::Solve { m, n, time_limit, workers, json, out } => {
            solve(m, n, time_limit, workers, json, out)
        }
        Command::Status { n } => {
            println!("{}", plane_order_status(n)?.as_str());
            Ok(ExitCode::SUCCESS)
        }
        Command::BoundsTable { k_min, k_max, solve_hard } => bounds_table(k_min, k_max, solve_hard),
    }
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().write_all(bytes),
    }
}

fn plane_build(q: u64, out: Option<PathBuf>, json: bool) -> CliResult {
    let plane = ProjectivePlane::of_order(q)?;
    let bytes = if json {
        let mut s = plane.descriptor_json().into_bytes();
        s.push(b'\n');
        s
    } else {
        write_gridset(&plane.incidence_matrix())
    };
    emit(out.as_ref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn plane_verify(file: &PathBuf) -> CliResult {
    let grid = read_gridset(&fs::read(file)?)?;
    let report = grid_axiom_report(&grid)?;
    print_axiom_report(&report);
    Ok(exit_for(report.all_hold()))
}

fn print_axiom_report(report: &AxiomReport) {
    let describe = |i: usize| match i {
        1 => report
            .point_pair
            .map(|v| format!("points {} and {} share {} lines", v.a, v.b, v.count)),
        2 => report
            .line_pair
            .map(|v| format!("lines {} and {} share {} points", v.a, v.b, v.count)),
        3 => report
            .line_size
            .map(|v| format!("line {} has {} points", v.index, v.count)),
        4 => (!report.axiom_holds(4)).then(|| "no quadrangle of points exists".to_string()),
        _ => unreachable!(),
    };
    let names = [
        "two points lie on exactly one line",
        "two lines meet in exactly one point",
        "every line has order + 1 points",
        "four points with no three collinear",
    ];
    for i in 1..=4 {
        match describe(i) {
            None => println!("axiom {i} ({}): pass", names[i - 1]),
            Some(detail) => println!("axiom {i} ({}): FAIL: {detail}", names[i - 1]),
        }
    }
    let verdict = if report.all_hold() { "PASS" } else { "FAIL" };
    println!(
        "verdict: {verdict} (order {}, {} points)",
        report.order,
        report.order * report.order + report.order + 1
    );
}

fn extremal(kind: ExtremalKind, q: u64, out: Option<PathBuf>, line_index: usize) -> CliResult {
    let incidence = ProjectivePlane::of_order(q)?.incidence_matrix();
    let grid = match kind {
        ExtremalKind::Projective => incidence,
        ExtremalKind::Affine => affine_from_projective(&incidence, line_index)?,
    };
    emit(out.as_ref(), &write_gridset(&grid))?;
    Ok(ExitCode::SUCCESS)
}

fn verify(file: &PathBuf, claimed_f: u64) -> CliResult {
    let grid = read_gridset(&fs::read(file)?)?;
    let check = verify_extremal(&grid, claimed_f);
    let ok = |b: bool| if b { "ok" } else { "FAIL" };
    println!(
        "points: {} (need {} for claimed f = {}): {}",
        check.actual_size,
        claimed_f.saturating_sub(1),
        claimed_f,
        ok(check.size_matches)
    );
    match check.rectangle {
        None => println!("rectangle-free: ok"),
        Some(w) => println!(
            "rectangle-free: FAIL: rectangle at (x={}, y={}, d1={}, d2={})",
            w.x, w.y, w.d1, w.d2
        ),
    }
    println!("verdict: {}", if check.passes() { "PASS" } else { "FAIL" });
    Ok(exit_for(check.passes()))
}

fn allow_solver(m: u64, n: u64, solve_hard: bool) -> bool {
    solve_hard || m.saturating_mul(n) <= TABLE_SOLVER_CELLS
}

fn bounds(m: u64, n: u64, json: bool, solve_hard: bool) -> CliResult {
    let report = bound_report(m, n, allow_solver(m, n, solve_hard))?;
    if json {
        println!("{}", report.to_json());
    } else {
        print_bounds_text(&report);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_bounds_text(report: &BoundReport) {
    println!("f({},{})", report.m, report.n);
    println!("  lower: {} ({})", report.lower.value, report.lower.source);
    println!("  upper: {} ({})", report.upper.value, report.upper.source);
    match report.exact {
        Some(exact) => println!("  exact: {} ({})", exact.value, exact.source),
        None => println!("  exact: unknown"),
    }
}

fn solve(
    m: u64,
    n: u64,
    time_limit: Option<u64>,
    workers: u64,
    json: bool,
    out: Option<PathBuf>,
) -> CliResult {
    let cfg = SearchConfig {
        time_limit: time_limit.map(Duration::from_secs),
        worker_count: workers as usize,
        ..SearchConfig::default()
    };
    let result = max_rectfree(m as usize, n as usize, &cfg)?;
    if let (Some(path), Some(witness)) = (out.as_ref(), result.witness.as_ref()) {
        fs::write(path, write_gridset(witness))?;
    }
    if json {
        println!("{}", result.to_json());
    } else {
        match result.status {
            SolveStatus::Optimal => println!("f({},{}) = {}  [optimal]", m, n, result.f_value),
            SolveStatus::TimedOut => {
                println!("f({},{}) >= {}  [timed-out]", m, n, result.f_value)
            }
        }
        println!("max rectangle-free size: {}", result.max_size);
        println!("nodes expanded: {}", result.nodes_expanded);
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds_table(k_min: u64, k_max: u64, solve_hard: bool) -> CliResult {
    if k_min > k_max {
        eprintln!("error: k_min ({k_min}) exceeds k_max ({k_max})");
        return Ok(ExitCode::from(2));
    }
    let header = ["k", "lower", "upper", "exact", "source"];
    let mut rows: Vec<[String; 5]> = Vec::new();
    for k in k_min..=k_max {
        let report = bound_report(k, k, allow_solver(k, k, solve_hard))?;
        let (exact, source) = match report.exact {
            Some(e) => (e.value.to_string(), e.source.to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        rows.push([
            k.to_string(),
            report.lower.value.to_string(),
            report.upper.value.to_string(),
            exact,
            source,
        ]);
    }
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let render = |cells: [&str; 5]| {
        let mut line = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                line.push_str(" | ");
            }
            if i == 4 {
                line.push_str(cell); // last column unpadded
            } else {
                line.push_str(&format!("{cell:>w$}"));
            }
        }
        line
    };
    println!("{}", render(header));
    for row in &rows {
        println!("{}", render([&row[0], &row[1], &row[2], &row[3], &row[4]]));
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_for(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
