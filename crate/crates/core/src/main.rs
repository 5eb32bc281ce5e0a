//! Command-line front end: execute circuit files, sweep the benchmark tasks,
//! generate random circuits, and run parameter-shift gradient descent.
//!
//! Exit codes: 0 success, 1 usage or internal failure, 2 circuit parse
//! error, 3 capacity violation (qubit cap or context-memory overflow).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qwave_core::circuit_file::{self, ParseError};
use qwave_core::circuits::{build_qft, build_rqc, build_zxz, random_thetas, CircuitError};
use qwave_core::costmodel::{self, CostReport, PowerProfile, TimingProfile};
use qwave_core::gates::{Circuit, GateError};
use qwave_core::kernel::{run_program_with_cap, KernelError};
use qwave_core::metrics::{AccuracyReport, MetricsError};
use qwave_core::numerics::{NumberFormat, Rounding};
use qwave_core::psr::{self, PsrError, ShiftScale};
use qwave_core::qstate::{QstateError, StateVector};

#[derive(Parser)]
#[command(
    name = "qwave",
    version,
    about = "Wave-function quantum accelerator emulator with per-format rounding and a cycle-accurate cost model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a circuit file; write amplitudes plus accuracy and cost reports
    Run {
        /// Circuit file (`qubits N` header, one gate per line)
        circuit: PathBuf,
        /// Number format the session runs at
        #[arg(long, env = "QWAVE_FORMAT", default_value = "fx32", value_parser = parse_format)]
        format: NumberFormat,
        /// Rounding applied by every arithmetic primitive
        #[arg(long, value_enum, default_value_t = RoundingArg::Rne)]
        rounding: RoundingArg,
        /// Lift the per-format qubit caps (17/18) up to the absolute limit
        #[arg(long)]
        lift_caps: bool,
        /// Accelerator power draw used for the PDP column
        #[arg(long, default_value_t = costmodel::DEFAULT_WATTS)]
        watts: f64,
        /// Directory the report files are written into
        #[arg(long, env = "QWAVE_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Sweep a benchmark task over qubit counts and formats; emit report rows
    Bench {
        /// Benchmark task
        #[arg(value_enum)]
        task: TaskArg,
        /// Qubit counts, inclusive on both ends (e.g. `3..17`, or a single `9`)
        #[arg(long, value_parser = parse_range, default_value = "3..17")]
        n: (u32, u32),
        /// Comma-separated formats to run
        #[arg(long, value_delimiter = ',', value_parser = parse_format,
              default_value = "fp16,fp32,fx16,fx24,fx32")]
        formats: Vec<NumberFormat>,
        /// Layers per qubit (rqc only)
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Circuit seed (rqc) or ansatz parameter seed (psr)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RoundingArg::Rne)]
        rounding: RoundingArg,
        #[arg(long)]
        lift_caps: bool,
        #[arg(long, default_value_t = costmodel::DEFAULT_WATTS)]
        watts: f64,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a markdown table to stdout instead of CSV
        #[arg(long)]
        markdown: bool,
    },
    /// Generate a seeded random circuit and write it as circuit text
    Rqc {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gradient descent on the ZXZ ansatz via the two-term parameter shift
    Psr {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, env = "QWAVE_FORMAT", default_value = "fx32", value_parser = parse_format)]
        format: NumberFormat,
        #[arg(long, value_enum, default_value_t = RoundingArg::Rne)]
        rounding: RoundingArg,
        /// Seed for the initial parameter draw (ignored when --theta0 is given)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Explicit initial parameters, comma-separated, length 3n
        #[arg(long, value_delimiter = ',')]
        theta0: Option<Vec<f64>>,
        /// Scale of the two-term shift difference
        #[arg(long, value_enum, default_value_t = ShiftArg::Half)]
        psr_constant: ShiftArg,
        /// Trace CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Rne,
    Truncate,
}

impl From<RoundingArg> for Rounding {
    fn from(arg: RoundingArg) -> Rounding {
        match arg {
            RoundingArg::Rne => Rounding::NearestEven,
            RoundingArg::Truncate => Rounding::Truncate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Qft,
    Rqc,
    Psr,
}

impl TaskArg {
    fn label(self) -> &'static str {
        match self {
            TaskArg::Qft => "qft",
            TaskArg::Rqc => "rqc",
            TaskArg::Psr => "psr",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShiftArg {
    /// The exact two-term gradient scale, 1/2
    Half,
    /// Alternate 1/sqrt(2) scaling
    #[value(alias = "paper")]
    Sqrt2,
}

impl From<ShiftArg> for ShiftScale {
    fn from(arg: ShiftArg) -> ShiftScale {
        match arg {
            ShiftArg::Half => ShiftScale::Half,
            ShiftArg::Sqrt2 => ShiftScale::InvSqrt2,
        }
    }
}

fn parse_format(s: &str) -> Result<NumberFormat, String> {
    s.parse()
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let parse_end = |t: &str| {
        t.parse::<u32>()
            .map_err(|_| format!("invalid qubit count `{t}`"))
    };
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (parse_end(lo)?, parse_end(hi)?);
        if lo < 1 || hi < lo {
            return Err(format!("invalid range `{s}`"));
        }
        Ok((lo, hi))
    } else {
        let n = parse_end(s)?;
        Ok((n, n))
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    CircuitParse { path: String, source: ParseError },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Psr(#[from] PsrError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        fn gate_code(e: &GateError) -> i32 {
            match e {
                GateError::ContextOverflow => 3,
                _ => 2,
            }
        }
        match self {
            CliError::CircuitParse { source, .. } => match source {
                ParseError::Gate { source, .. } => gate_code(source),
                _ => 2,
            },
            CliError::Gate(e) => gate_code(e),
            CliError::Circuit(CircuitError::Gate(e)) => gate_code(e),
            CliError::Kernel(KernelError::State(
                QstateError::QubitCapExceeded { .. } | QstateError::AboveAbsoluteLimit(_),
            )) => 3,
            CliError::Psr(PsrError::Kernel(KernelError::State(_))) => 3,
            CliError::Psr(PsrError::Circuit(CircuitError::Gate(GateError::ContextOverflow))) => 3,
            _ => 1,
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { circuit, format, rounding, lift_caps, watts, out_dir } => {
            cmd_run(&circuit, format, rounding.into(), lift_caps, watts, &out_dir)
        }
        Command::Bench {
            task,
            n,
            formats,
            depth,
            seed,
            rounding,
            lift_caps,
            watts,
            out,
            markdown,
        } => cmd_bench(
            task,
            n,
            &formats,
            depth,
            seed,
            rounding.into(),
            lift_caps,
            watts,
            out.as_deref(),
            markdown,
        ),
        Command::Rqc { n, depth, seed, out } => cmd_rqc(n, depth, seed, out.as_deref()),
        Command::Psr {
            n,
            iters,
            gamma,
            format,
            rounding,
            seed,
            theta0,
            psr_constant,
            out,
        } => cmd_psr(
            n,
            iters,
            gamma,
            format,
            rounding.into(),
            seed,
            theta0,
            psr_constant.into(),
            out.as_deref(),
        ),
    }
}

/// The Reference baseline is host software, not the accelerator, so it
/// always runs with the hardware qubit cap lifted.
fn reference_run(circuit: &Circuit, rounding: Rounding) -> Result<StateVector, CliError> {
    let program = circuit.lower(NumberFormat::Reference, rounding)?;
    Ok(run_program_with_cap(&program, NumberFormat::Reference, rounding, true)?)
}

fn cmd_run(
    path: &Path,
    format: NumberFormat,
    rounding: Rounding,
    lift_caps: bool,
    watts: f64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let text = read_file(path)?;
    let circuit = circuit_file::parse(&text).map_err(|source| CliError::CircuitParse {
        path: path.display().to_string(),
        source,
    })?;
    let program = circuit.lower(format, rounding)?;
    let state = run_program_with_cap(&program, format, rounding, lift_caps)?;
    let reference = reference_run(&circuit, rounding)?;
    let task = task_label_from_path(path);
    let accuracy = AccuracyReport::from_states(&task, format, &state, &reference)?;

    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let amps_path = out_dir.join(format!("{task}.amps.csv"));
    let mut amps = Vec::new();
    state.write_csv(&mut amps).expect("vec write");
    write_file(&amps_path, &String::from_utf8(amps).expect("utf8"))?;

    let accuracy_path = out_dir.join(format!("{task}.accuracy.csv"));
    let mut acc = Vec::new();
    writeln!(acc, "{}", AccuracyReport::csv_header()).expect("vec write");
    accuracy.write_csv_row(&mut acc).expect("vec write");
    write_file(&accuracy_path, &String::from_utf8(acc).expect("utf8"))?;

    println!(
        "{}: {} qubits, {} gates, format {format}",
        path.display(),
        circuit.n(),
        program.len()
    );
    println!("norm^2   {:.12}", state.norm_sq());
    println!("fidelity {:.12}", accuracy.fidelity);
    println!("mse      {:.6e}", accuracy.mse);

    let mut written = vec![amps_path, accuracy_path];
    if let Some(timing) = TimingProfile::built_in(format) {
        let report = costmodel::predict(&program, &timing, &PowerProfile { watts });
        let cost_path = out_dir.join(format!("{task}.cost.csv"));
        let mut cost = Vec::new();
        writeln!(cost, "{}", CostReport::csv_header()).expect("vec write");
        report.write_csv_row(&mut cost, &task, format).expect("vec write");
        write_file(&cost_path, &String::from_utf8(cost).expect("utf8"))?;
        println!(
            "time     {:.6e} s  (ngs {:.6e}, pdp {:.6e} J)",
            report.time_s, report.ngs, report.pdp_joules
        );
        written.push(cost_path);
    } else {
        println!("time     n/a (no hardware timing profile for {format})");
    }
    let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    println!("wrote    {}", names.join(", "));
    Ok(())
}

fn task_label_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "circuit".to_string())
}

struct BenchRow {
    task: &'static str,
    n: u32,
    format: NumberFormat,
    gates: usize,
    fidelity: f64,
    mse: f64,
    cost: Option<CostReport>,
}

impl BenchRow {
    fn csv(&self) -> String {
        let (time_s, ngs, pdp) = match &self.cost {
            Some(c) => (
                format!("{:.6e}", c.time_s),
                format!("{:.6e}", c.ngs),
                format!("{:.6e}", c.pdp_joules),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{:.6e},{:.6e},{},{},{}",
            self.task, self.n, self.format, self.gates, self.fidelity, self.mse, time_s, ngs, pdp
        )
    }
}

const BENCH_HEADER: &str = "task,n,format,gates,fidelity,mse,time_s,ngs,pdp_j";

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    task: TaskArg,
    (n_lo, n_hi): (u32, u32),
    formats: &[NumberFormat],
    depth: u32,
    seed: u64,
    rounding: Rounding,
    lift_caps: bool,
    watts: f64,
    out: Option<&Path>,
    markdown: bool,
) -> Result<(), CliError> {
    let power = PowerProfile { watts };
    let ns: Vec<u32> = (n_lo..=n_hi).collect();
    // Cells are independent; parallelize per qubit count and merge in
    // (n, format) order.
    let rows: Vec<Vec<BenchRow>> = ns
        .par_iter()
        .map(|&n| -> Result<Vec<BenchRow>, CliError> {
            let circuit = match task {
                TaskArg::Qft => build_qft(n)?,
                TaskArg::Rqc => build_rqc(n, depth, seed)?,
                TaskArg::Psr => build_zxz(n, &random_thetas(n, seed))?,
            };
            let reference = reference_run(&circuit, rounding)?;
            let mut rows = Vec::with_capacity(formats.len());
            for &format in formats {
                let program = circuit.lower(format, rounding)?;
                let state = run_program_with_cap(&program, format, rounding, lift_caps)?;
                let report = AccuracyReport::from_states(task.label(), format, &state, &reference)?;
                let cost = TimingProfile::built_in(format)
                    .map(|timing| costmodel::predict(&program, &timing, &power));
                rows.push(BenchRow {
                    task: task.label(),
                    n,
                    format,
                    gates: program.len(),
                    fidelity: report.fidelity,
                    mse: report.mse,
                    cost,
                });
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<BenchRow> = rows.into_iter().flatten().collect();

    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv());
        csv.push('\n');
    }
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    if markdown {
        let header: Vec<&str> = BENCH_HEADER.split(',').collect();
        println!("| {} |", header.join(" | "));
        println!("|{}|", header.iter().map(|_| " --- ").collect::<Vec<_>>().join("|"));
        for row in &rows {
            println!("| {} |", row.csv().replace(',', " | "));
        }
    } else if out.is_none() {
        print!("{csv}");
    }
    Ok(())
}

fn cmd_rqc(n: u32, depth: u32, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let circuit = build_rqc(n, depth, seed)?;
    let text = circuit_file::print(&circuit);
    match out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_psr(
    n: u32,
    iters: usize,
    gamma: f64,
    format: NumberFormat,
    rounding: Rounding,
    seed: u64,
    theta0: Option<Vec<f64>>,
    scale: ShiftScale,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let theta0 = theta0.unwrap_or_else(|| random_thetas(n, seed));
    let optimizer = psr::optimize(n, &theta0, gamma, iters, format, rounding, scale)?;
    let mut trace = Vec::new();
    psr::write_trace_csv(&mut trace, &optimizer).expect("vec write");
    let trace = String::from_utf8(trace).expect("utf8");
    match out {
        Some(path) => write_file(path, &trace)?,
        None => print!("{trace}"),
    }
    if let Some(last) = optimizer.history.last() {
        eprintln!(
            "final cost {:.6e} after {} iterations",
            last.cost, optimizer.iterations
        );
    }
    eprintln!("sessions: {}", optimizer.sessions_run);
    Ok(())
}
