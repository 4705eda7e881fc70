//! `qsl`: compute orbit-metric quantities and evolution-time bounds, simulate
//! the two-arm fringe experiment, audit the worked examples, and sweep random
//! instances for bound-tightness statistics.

mod input;
mod report_out;
mod reproduce;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsl_core::bounds::{combined_bound, mt_bound, BoundReport};
use qsl_core::cptp::apply_channel;
use qsl_core::eig::propagator;
use qsl_core::interferometer::{
    default_settings, fit_fringe, measure_speed, sample_scan, Shots,
};
use qsl_core::matrix::ComplexMatrix;
use qsl_core::orbit::{bargmann_angle, orbit_distance, quantum_speed, visibility_phase};
use qsl_core::states::DensityMatrix;
use qsl_core::tolerance::Tolerances;

use input::{BoundInput, ChannelInput, InterfereInput, MetricInput};
use report_out::{report_csv_row, report_table, REPORT_CSV_HEADER};

#[derive(Parser)]
#[command(
    name = "qsl",
    version,
    about = "Orbit-metric toolkit: visibility, speed-limit bounds, channel dilations, \
             and fringe-counting estimation for mixed-state evolutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every evolution-time bound for (rho, H, T) instances
    Bound(BoundArgs),
    /// Visibility, phase, orbit distance, Bargmann angle, quantum speed
    Metric(CommonArgs),
    /// Apply a Kraus channel, or dilate a joint generator and bound it
    Channel(CommonArgs),
    /// Simulate the fringe scan and estimate V, phase, s0 (and v with --tau)
    Interfere(InterfereArgs),
    /// Recompute the worked examples and audit their reference values
    Reproduce(ReproduceArgs),
    /// Random-instance bound comparison, one row per instance
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct CommonArgs {
    /// Input JSON file (defaults to stdin)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file (defaults to stdout)
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Top-level seed for anything stochastic
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Planck constant scale used when the input does not fix one
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Suppress the timestamp so identical runs are byte-identical
    #[arg(long)]
    deterministic: bool,
    /// Override the Hermiticity tolerance
    #[arg(long)]
    tol_herm: Option<f64>,
    /// Override the unitarity tolerance
    #[arg(long)]
    tol_unit: Option<f64>,
    /// Override the positivity tolerance
    #[arg(long)]
    tol_psd: Option<f64>,
    /// Override the trace-one tolerance
    #[arg(long)]
    tol_trace: Option<f64>,
}

impl CommonArgs {
    fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(x) = self.tol_herm {
            tol.herm = x;
        }
        if let Some(x) = self.tol_unit {
            tol.unit = x;
        }
        if let Some(x) = self.tol_psd {
            tol.psd = x;
        }
        if let Some(x) = self.tol_trace {
            tol.trace = x;
        }
        tol
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct InterfereArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Shots per phase setting, or "exact" for the infinite-shot mode
    #[arg(long, default_value = "1000000")]
    shots: String,
    /// Arm delay for the speed measurement; omit to skip it
    #[arg(long)]
    tau: Option<f64>,
    /// Number of equally spaced phase settings over [0, 2pi)
    #[arg(long, default_value_t = 12)]
    settings: usize,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which worked example: qubit-example | cptp-example | saturation-family
    which: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated dimensions from {2, 3, 4}
    #[arg(long, default_value = "2,3,4")]
    dims: String,
    /// Number of instances
    #[arg(long, default_value_t = 200)]
    instances: usize,
    /// Evolution times drawn uniformly from (0, t-max]
    #[arg(long, default_value_t = 4.0 * std::f64::consts::PI)]
    t_max: f64,
}

enum CliError {
    /// Unreadable or malformed input: exit code 2.
    Parse(String),
    /// Validation or computation failure: exit code 1.
    Run(&'static str, String),
}

impl From<qsl_core::Error> for CliError {
    fn from(e: qsl_core::Error) -> Self {
        CliError::Run(e.kind(), e.to_string())
    }
}

impl CliError {
    fn emit_and_code(&self) -> i32 {
        let (kind, message, code) = match self {
            CliError::Parse(m) => ("ParseError", m.as_str(), 2),
            CliError::Run(kind, m) => (*kind, m.as_str(), 1),
        };
        let payload = json!({ "error": { "kind": kind, "message": message } });
        eprintln!("{payload}");
        code
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => e.emit_and_code(),
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Metric(args) => cmd_metric(args),
        Command::Channel(args) => cmd_channel(args),
        Command::Interfere(args) => cmd_interfere(args),
        Command::Reproduce(args) => cmd_reproduce(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut text = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut text)
                .map_err(|e| CliError::Parse(format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("malformed input: {e}")))
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Run("Io", format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Run("Io", format!("cannot write stdout: {e}")))
        }
    }
}

fn stamp(value: &mut Value, deterministic: bool) {
    if !deterministic {
        if let Value::Object(map) = value {
            let ms = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0);
            map.insert("generated_at_unix_ms".into(), json!(ms as u64));
        }
    }
}

fn to_pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn cmd_bound(args: BoundArgs) -> Result<(), CliError> {
    let common = args.common;
    let tol = common.tolerances();
    let text = read_input(&common.input)?;
    let instances = parse_json::<BoundInput>(&text)?.into_instances();

    let mut reports: Vec<BoundReport> = Vec::with_capacity(instances.len());
    for inst in &instances {
        let rho = inst.rho.build(&tol)?;
        let hbar = inst.hbar.unwrap_or(common.hbar);
        let report = match (&inst.h, &inst.schedule) {
            (Some(h), None) => combined_bound(&rho, h, inst.t, hbar)?,
            (None, Some(spec)) => {
                // Sampled generator: only the uncertainty-type bound applies;
                // spectral statistics need a time-independent generator.
                let sched = spec.build()?;
                let mt = mt_bound(&rho, &sched, inst.t)?;
                schedule_only_report(&rho, &sched, inst.t, mt)?
            }
            _ => {
                return Err(CliError::Parse(
                    "each instance needs exactly one of `H` or `schedule`".into(),
                ))
            }
        };
        reports.push(report);
    }

    match common.format {
        Format::Json => {
            let mut value = json!({ "reports": reports });
            stamp(&mut value, common.deterministic);
            write_output(&common.output, &to_pretty(&value))
        }
        Format::Csv => {
            let mut out = String::from(REPORT_CSV_HEADER);
            out.push('\n');
            for r in &reports {
                out.push_str(&report_csv_row(r));
                out.push('\n');
            }
            write_output(&common.output, &out)
        }
        Format::Table => {
            let mut out = String::new();
            for r in &reports {
                out.push_str(&report_table(r));
                out.push('\n');
            }
            write_output(&common.output, &out)
        }
    }
}

fn schedule_only_report(
    rho: &DensityMatrix,
    sched: &qsl_core::states::HamiltonianSchedule,
    t: f64,
    mt: f64,
) -> Result<BoundReport, CliError> {
    use qsl_core::bounds::{bures_angle, BoundValue};
    let ev = qsl_core::orbit::evolve_schedule(rho, sched, 0.0, t)?;
    let pv = visibility_phase(rho, &ev.u_total)?;
    let s0 = 2.0 * pv.visibility.acos();
    let evolved = rho.evolved(&ev.u_total);
    let theta_b = bures_angle(rho, &evolved)?;
    let z = rho.matrix().trace_mul(&ev.u_total);
    let absent = |why: &str| BoundValue::absent(why);
    Ok(BoundReport {
        t_total: t,
        hbar: sched.hbar(),
        dim: rho.dim(),
        visibility: pv.visibility,
        phase: pv.phase,
        bargmann_angle: s0,
        bures_angle: theta_b,
        delta_h: ev.avg_delta_h,
        mean_h: f64::NAN,
        re_part: z.re,
        im_part: z.im,
        e_de: f64::NAN,
        h_psd: false,
        mt_bound: BoundValue::from_value(mt, "zero average uncertainty with nonzero angle"),
        ml_bound: absent("sampled schedule: spectral statistics undefined"),
        combined_bound: BoundValue::from_value(mt, "zero average uncertainty with nonzero angle"),
        chau_bound: absent("sampled schedule: spectral statistics undefined"),
        improved_chau_bound: absent("sampled schedule: spectral statistics undefined"),
        bures_baseline_bound: BoundValue::Finite(if ev.avg_delta_h > 1e-14 {
            sched.hbar() * theta_b / (2.0 * ev.avg_delta_h)
        } else {
            0.0
        }),
        measured: None,
    })
}

fn cmd_metric(common: CommonArgs) -> Result<(), CliError> {
    let tol = common.tolerances();
    let text = read_input(&common.input)?;
    let input: MetricInput = parse_json(&text)?;
    let rho = input.rho.build(&tol)?;
    let hbar = input.hbar.unwrap_or(common.hbar);

    let (u, speed) = match (&input.u, &input.h, input.t) {
        (Some(u), None, None) => (u.clone(), None),
        (None, Some(h), Some(t)) => (
            propagator(h, t, hbar)?,
            Some(quantum_speed(&rho, h, hbar)?),
        ),
        _ => {
            return Err(CliError::Parse(
                "metric input needs either `U`, or `H` with `t`".into(),
            ))
        }
    };
    let pv = visibility_phase(&rho, &u)?;
    let mut value = json!({
        "visibility": pv.visibility,
        "phase": pv.phase,
        "orbit_distance": orbit_distance(&rho, &u)?,
        "bargmann_angle": bargmann_angle(&rho, &u)?,
    });
    if let Some(v) = speed {
        value["quantum_speed"] = json!(v);
    }
    stamp(&mut value, common.deterministic);
    match common.format {
        Format::Json => write_output(&common.output, &to_pretty(&value)),
        _ => {
            let mut out = String::new();
            for key in [
                "visibility",
                "phase",
                "orbit_distance",
                "bargmann_angle",
                "quantum_speed",
            ] {
                if let Some(x) = value.get(key).and_then(Value::as_f64) {
                    out.push_str(&format!("{key} = {}\n", report_out::sig6(x)));
                }
            }
            write_output(&common.output, &out)
        }
    }
}

fn cmd_channel(common: CommonArgs) -> Result<(), CliError> {
    let tol = common.tolerances();
    let text = read_input(&common.input)?;
    let input: ChannelInput = parse_json(&text)?;
    let rho = input.rho.build(&tol)?;

    let mut value = match (&input.kraus, &input.dilation) {
        (Some(kraus), None) => {
            let ch = qsl_core::cptp::KrausChannel::new(kraus.clone())?;
            let out = apply_channel(&rho, &ch)?;
            json!({ "output_state": out.matrix() })
        }
        (None, Some(spec)) => {
            let t = input.t.ok_or_else(|| {
                CliError::Parse("dilation analysis needs an evolution time `T`".into())
            })?;
            let sys = spec.build()?;
            let ch = qsl_core::cptp::dilate(&sys, t)?;
            let out = apply_channel(&rho, &ch)?;
            let e_eff = sys.effective_operator(t)?;
            let amp = rho.matrix().trace_mul(&e_eff);
            let v_nu = amp.norm().clamp(0.0, 1.0);
            let speed = qsl_core::cptp::effective_speed(&rho, &sys)?;
            let bound = qsl_core::cptp::cptp_bound(&rho, &sys, t)?;
            json!({
                "kraus": ch.operators(),
                "output_state": out.matrix(),
                "visibility": v_nu,
                "phase": if v_nu < 1e-14 { 0.0 } else { amp.arg() },
                "bargmann_angle": 2.0 * v_nu.acos(),
                "effective_speed": speed,
                "cptp_bound": if bound.is_finite() { json!(bound) } else { Value::Null },
                "t": t,
            })
        }
        _ => {
            return Err(CliError::Parse(
                "channel input needs exactly one of `kraus` or `dilation`".into(),
            ))
        }
    };
    stamp(&mut value, common.deterministic);
    write_output(&common.output, &to_pretty(&value))
}

fn cmd_interfere(args: InterfereArgs) -> Result<(), CliError> {
    let common = args.common;
    let tol = common.tolerances();
    let text = read_input(&common.input)?;
    let input: InterfereInput = parse_json(&text)?;
    let rho = input.rho.build(&tol)?;
    let hbar = input.hbar.unwrap_or(common.hbar);
    let settings = default_settings(args.settings);

    let shots = match args.shots.as_str() {
        "exact" => Shots::Exact,
        other => Shots::Finite(other.parse::<u64>().map_err(|_| {
            CliError::Parse(format!("--shots must be a count or \"exact\", got {other}"))
        })?),
    };

    let u = propagator(&input.h, input.t, hbar)?;
    let identity = ComplexMatrix::identity(rho.dim());

    let (scan_json, fit) = match shots {
        Shots::Finite(n) => {
            let scan = sample_scan(&rho, &u, &identity, &settings, n, common.seed)?;
            if common.format == Format::Csv {
                return write_output(&common.output, &scan.to_csv());
            }
            let fit = fit_fringe(&scan)?;
            (json!(scan), fit)
        }
        Shots::Exact => {
            let fit =
                qsl_core::interferometer::fit_fringe_exact(&rho, &u, &identity, &settings)?;
            (Value::Null, fit)
        }
    };

    let s0_hat = 2.0 * fit.visibility.clamp(0.0, 1.0).acos();
    let pv = visibility_phase(&rho, &u)?;
    let mut value = json!({
        "scan": scan_json,
        "fit": fit,
        "bargmann_angle_estimate": s0_hat,
        "true": {
            "visibility": pv.visibility,
            "phase": pv.phase,
            "bargmann_angle": bargmann_angle(&rho, &u)?,
        },
    });
    if let Some(tau) = args.tau {
        let est = measure_speed(
            &rho,
            &input.h,
            input.t,
            tau,
            &settings,
            shots,
            qsl_core::seeding::derive(common.seed, "speed-scan", 0),
            hbar,
        )?;
        value["speed"] = json!(est);
    }
    stamp(&mut value, common.deterministic);
    write_output(&common.output, &to_pretty(&value))
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<(), CliError> {
    let common = args.common;
    let report = reproduce::run(&args.which, common.seed).ok_or_else(|| {
        CliError::Parse(format!(
            "unknown example {:?}; expected qubit-example, cptp-example, or saturation-family",
            args.which
        ))
    })?;
    match common.format {
        Format::Json => {
            let mut value = serde_json::to_value(&report).expect("serializable");
            stamp(&mut value, common.deterministic);
            write_output(&common.output, &to_pretty(&value))
        }
        _ => write_output(&common.output, &report.to_table()),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let common = args.common;
    let mut dims = [false; 5];
    for part in args.dims.split(',') {
        match part.trim().parse::<usize>() {
            Ok(d @ 2..=4) => dims[d] = true,
            _ => {
                return Err(CliError::Parse(format!(
                    "--dims takes values in 2..=4, got {part:?}"
                )))
            }
        }
    }
    if args.instances == 0 {
        return Err(CliError::Parse("--instances must be positive".into()));
    }
    let config = sweep::SweepConfig {
        dims,
        instances: args.instances,
        t_max: args.t_max,
        seed: common.seed,
        hbar: common.hbar,
    };
    let rows = sweep::run(&config);
    match common.format {
        Format::Json => {
            let mut value = json!({ "rows": rows });
            stamp(&mut value, common.deterministic);
            write_output(&common.output, &to_pretty(&value))
        }
        _ => write_output(&common.output, &sweep::to_csv(&rows)),
    }
}
