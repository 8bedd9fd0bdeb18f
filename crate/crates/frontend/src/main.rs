use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqcad::projection::Operator;
use eqcad_frontend::bench::{bench, render_json, render_text, BenchOptions, Family};
use eqcad_frontend::run::{run, Mode, RunOptions, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "eqcad", version, about = "Exact CAD solver for polynomial constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a script.
    Solve(SolveArgs),
    /// Compare projection operators on a random instance family.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Collins,
    Mccallum,
    #[value(name = "ec-reduced")]
    EcReduced,
}

impl From<OpArg> for Operator {
    fn from(o: OpArg) -> Self {
        match o {
            OpArg::Collins => Operator::Collins,
            OpArg::Mccallum => Operator::McCallum,
            OpArg::EcReduced => Operator::Reduced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Sat,
    Decide,
}

#[derive(Args)]
struct SolveArgs {
    /// Script file; stdin when omitted or `-`.
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ec-reduced")]
    operator: OpArg,
    /// Variable order, lowest first, e.g. `x,y,z`.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Print a statistics document after each verdict.
    #[arg(long)]
    stats: bool,
    /// One JSON document per command.
    #[arg(long)]
    json: bool,
    /// Include wall-clock times in statistics.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = 1_000_000)]
    cell_cap: usize,
    /// Seconds.
    #[arg(long)]
    time_cap: Option<f64>,
    /// Take equational constraints from disjunctions of equations.
    #[arg(long)]
    product_ec: bool,
    /// Decimal places of model enclosures.
    #[arg(long, default_value_t = 6)]
    model_digits: u32,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    vars: usize,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Constraint counts: `4`, `3,4,5` or `3..10`.
    #[arg(long, default_value = "4")]
    constraints: String,
    #[arg(long, default_value_t = 1)]
    ecs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances per constraint count.
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, default_value_t = 9)]
    coeff_bound: i64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mccallum,ec-reduced")]
    operators: Vec<OpArg>,
    /// Projection counts only.
    #[arg(long)]
    no_lift: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = 1_000_000)]
    cell_cap: usize,
    /// Seconds per instance and operator.
    #[arg(long)]
    time_cap: Option<f64>,
}

fn parse_counts(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.parse().map_err(|_| format!("bad range start '{a}'"))?;
        let b: usize = b.parse().map_err(|_| format!("bad range end '{b}'"))?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| format!("bad count '{p}'"))).collect()
}

fn solve(a: SolveArgs) -> ExitCode {
    let mut text = String::new();
    let read = match &a.file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map(|t| text = t),
        _ => io::stdin().read_to_string(&mut text).map(|_| ()),
    };
    if let Err(e) = read {
        eprintln!("error: cannot read input: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let script = match eqcad_frontend::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let opts = RunOptions {
        operator: a.operator.into(),
        order: a.order,
        mode: match a.mode {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Sat => Mode::Sat,
            ModeArg::Decide => Mode::Decide,
        },
        stats: a.stats,
        json: a.json,
        timing: a.timing,
        cell_cap: a.cell_cap,
        time_cap: a.time_cap.map(Duration::from_secs_f64),
        product_ec: a.product_ec,
        model_digits: a.model_digits,
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(&script, &opts, &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}

fn bench_cmd(a: BenchArgs) -> ExitCode {
    let constraints = match parse_counts(&a.constraints) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    if a.vars == 0 || a.degree == 0 {
        eprintln!("error: --vars and --degree must be positive");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let family = Family {
        vars: a.vars,
        degree: a.degree,
        constraints,
        ecs: a.ecs,
        seed: a.seed,
        instances: a.instances,
        coeff_bound: a.coeff_bound.max(1),
    };
    let opts = BenchOptions {
        operators: a.operators.into_iter().map(Operator::from).collect(),
        lift: !a.no_lift,
        timing: a.timing,
        cell_cap: a.cell_cap,
        time_cap: a.time_cap.map(Duration::from_secs_f64),
    };
    let table = bench(&family, &opts);
    let text = if a.json { render_json(&table) + "\n" } else { render_text(&table, a.timing) };
    let _ = io::stdout().write_all(text.as_bytes());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Bench(a) => bench_cmd(a),
    }
}
