//! Subcommand runners.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use coherent_transport::frame::Schedule;
use coherent_transport::oracle::{
    cross_validate, gaussian_schedule_fidelity, grid_run, write_snapshot_dump, FidelityResult, GridConfig,
    CROSS_ORACLE_TOL,
};
use coherent_transport::protocols::{
    bb_report, bbb_report, dsbbb_report, dsbbb_schedule_with_placement, dsbbb_time, forward_only_search, sbbb_report,
    BbbParams, DsbbbParams, DsbbbTiming, ForwardSearch, Placement, ProtocolReport,
};
use coherent_transport::GaussianState;
use serde_json::{json, Value};

use crate::cli::{
    Cli, Command, CommonArgs, ConvertArgs, Kind, OracleChoice, OutputFormat, ProtocolArgs, ProtocolParams, QslArgs,
    ScanArgs, SimulateArgs,
};
use crate::config::{pick, RunConfig};
use crate::convert::{convert, ConvertInput, DistanceUnit, FreqUnit, MassUnit};
use crate::error::CliError;
use crate::format::{csv_row, fmt_g};
use crate::qsl_table::{qsl_table, QslSettings};
use crate::scan::{gnuplot_script, run_scan, ScanSettings};

/// Result of a command before it is written anywhere.
struct Outcome {
    summary: String,
    csv: String,
    json: Value,
    /// Tabular commands print their CSV on standard output by default.
    tabular: bool,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (common, outcome) = match cli.command {
        Command::Protocol(a) => (a.common.clone(), cmd_protocol(&a)?),
        Command::Simulate(a) => (a.common.clone(), cmd_simulate(&a)?),
        Command::Scan(a) => (a.common.clone(), cmd_scan(&a)?),
        Command::Qsl(a) => (a.common.clone(), cmd_qsl(&a)?),
        Command::Convert(a) => (a.common.clone(), cmd_convert(&a)?),
    };
    emit(&common, outcome, stdout)
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    match &common.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, CliError> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::Invalid(format!(
            "unknown format '{other}', expected csv or json"
        ))),
    }
}

fn emit(common: &CommonArgs, outcome: Outcome, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_config(common)?;
    let format = match (common.format, file.format.as_deref()) {
        (Some(f), _) => Some(f),
        (None, Some(s)) => Some(parse_format(s)?),
        (None, None) => None,
    };
    let quiet = common.quiet || file.quiet.unwrap_or(false);
    let out = common.out.clone().or(file.out);
    let structured = |f: OutputFormat| match f {
        OutputFormat::Csv => outcome.csv.clone(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("json value serializes");
            s.push('\n');
            s
        }
    };
    let default_format = if outcome.tabular {
        OutputFormat::Csv
    } else {
        OutputFormat::Json
    };

    match out {
        Some(path) => {
            write_file(&path, structured(format.unwrap_or(default_format)).as_bytes())?;
            if !quiet {
                stdout.write_all(outcome.summary.as_bytes())?;
            }
        }
        None if outcome.tabular || format.is_some() => {
            stdout.write_all(structured(format.unwrap_or(default_format)).as_bytes())?;
        }
        None => {
            if !quiet {
                stdout.write_all(outcome.summary.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

/// Protocol flags resolved against the config file and defaults.
#[derive(Debug, Clone, Copy)]
struct Resolved {
    kind: Kind,
    d: f64,
    r: f64,
    omega: f64,
    omega0: f64,
    omega1: f64,
    omega2: f64,
    t2: f64,
    offset: f64,
    samples: usize,
    seed: u64,
}

fn parse_kind(s: &str) -> Result<Kind, CliError> {
    match s {
        "bb" => Ok(Kind::Bb),
        "bbb" => Ok(Kind::Bbb),
        "sbbb" => Ok(Kind::Sbbb),
        "dsbbb" => Ok(Kind::Dsbbb),
        "forward-search" => Ok(Kind::ForwardSearch),
        other => Err(CliError::Invalid(format!("unknown protocol kind '{other}'"))),
    }
}

fn resolve(p: &ProtocolParams, common: &CommonArgs, file: &RunConfig) -> Result<Resolved, CliError> {
    let kind = match (p.kind, file.kind.as_deref()) {
        (Some(k), _) => k,
        (None, Some(s)) => parse_kind(s)?,
        (None, None) => return Err(CliError::Invalid("--kind is required".into())),
    };
    let d = pick(p.d, file.d, 6.0);
    let omega1 = pick(p.omega1, file.omega1, 2.0);
    Ok(Resolved {
        kind,
        d,
        r: pick(p.r, file.r, d),
        omega: pick(p.omega, file.omega, 1.0),
        omega0: pick(p.omega0, file.omega0, 1.0),
        omega1,
        omega2: pick(p.omega2, file.omega2, 1.0),
        t2: pick(p.t2, file.t2, PI / (4.0 * omega1)),
        offset: pick(p.offset, file.offset, 0.0),
        samples: pick(p.samples, file.samples, 1000),
        seed: pick(common.seed, file.seed, 0),
    })
}

fn dsbbb_params(r: &Resolved) -> Result<DsbbbParams, CliError> {
    let p = DsbbbParams {
        omega0: r.omega0,
        omega1: r.omega1,
        omega2: r.omega2,
        t2: r.t2,
        r: r.r,
        d: r.d,
        offset: r.offset,
    };
    p.validate()?;
    Ok(p)
}

struct Built {
    report: ProtocolReport,
    dsbbb: Option<(DsbbbTiming, Placement)>,
}

fn build(r: &Resolved) -> Result<Built, CliError> {
    let report = match r.kind {
        Kind::Bb => bb_report(r.d, r.omega)?,
        Kind::Bbb => bbb_report(&BbbParams::new(r.d, r.r, r.omega)?)?,
        Kind::Sbbb => sbbb_report(r.omega1, r.r, r.d)?,
        Kind::Dsbbb => {
            let p = dsbbb_params(r)?;
            let timing = dsbbb_time(&p)?;
            let (_, placement) = dsbbb_schedule_with_placement(&p)?;
            return Ok(Built {
                report: dsbbb_report(&p)?,
                dsbbb: Some((timing, placement)),
            });
        }
        Kind::ForwardSearch => {
            return Err(CliError::Invalid(
                "forward-search has no single schedule to simulate".into(),
            ))
        }
    };
    Ok(Built { report, dsbbb: None })
}

fn schedule_csv(schedule: &Schedule) -> String {
    let mut s = String::from("segment,start,duration,center,omega\n");
    let centers = schedule.reference_centers();
    let times = schedule.event_times();
    for (i, seg) in schedule.segments.iter().enumerate() {
        let row = csv_row(&[times[i], seg.duration, centers[i], seg.frame.omega]);
        let _ = writeln!(s, "{i},{row}");
    }
    s
}

fn schedule_table(schedule: &Schedule) -> String {
    let mut s = format!(
        "{:>7} {:>16} {:>16} {:>16} {:>10}\n",
        "segment", "start", "duration", "center", "omega"
    );
    let centers = schedule.reference_centers();
    let times = schedule.event_times();
    for (i, seg) in schedule.segments.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i:>7} {:>16} {:>16} {:>16} {:>10}",
            fmt_g(times[i]),
            fmt_g(seg.duration),
            fmt_g(centers[i]),
            fmt_g(seg.frame.omega)
        );
    }
    let _ = writeln!(
        s,
        "{:>7} {:>16} {:>16} {:>16} {:>10}",
        "hold",
        fmt_g(times[times.len() - 1]),
        "-",
        fmt_g(schedule.final_center),
        fmt_g(schedule.final_frame.omega)
    );
    s
}

fn forward_search_outcome(r: &Resolved) -> Result<Outcome, CliError> {
    let search: ForwardSearch = forward_only_search(r.d, r.omega, r.samples, r.seed)?;
    let limit = PI / r.omega;
    let summary = format!(
        "forward-only search: D = {}, omega = {}, seed = {}\n\
         accepted {} of {} attempts\n\
         shortest schedule: {} (forward limit pi/omega = {})\n\
         largest endpoint error: {}\n",
        fmt_g(r.d),
        fmt_g(r.omega),
        r.seed,
        search.accepted,
        search.attempts,
        fmt_g(search.min_time),
        fmt_g(limit),
        fmt_g(search.max_endpoint_error)
    );
    if search.min_time < limit * (1.0 - 1e-9) {
        return Err(CliError::Internal(format!(
            "forward-only schedule of duration {} beats the forward limit {limit}",
            search.min_time
        )));
    }
    Ok(Outcome {
        summary,
        csv: format!(
            "accepted,attempts,min_time,max_endpoint_error\n{},{},{},{}\n",
            search.accepted,
            search.attempts,
            fmt_g(search.min_time),
            fmt_g(search.max_endpoint_error)
        ),
        json: json!({ "kind": "forward_search", "D": r.d, "omega": r.omega, "seed": r.seed, "result": search }),
        tabular: false,
    })
}

fn cmd_protocol(a: &ProtocolArgs) -> Result<Outcome, CliError> {
    let file = load_config(&a.common)?;
    let r = resolve(&a.params, &a.common, &file)?;
    if r.kind == Kind::ForwardSearch {
        return forward_search_outcome(&r);
    }
    let Built { report, dsbbb } = build(&r)?;

    let mut summary = format!("protocol: {:?}\n", r.kind).to_lowercase();
    summary.push_str(&schedule_table(&report.schedule));
    let unit = match r.kind {
        Kind::Bb | Kind::Bbb => PI / r.omega,
        _ => PI / r.omega1,
    };
    let _ = writeln!(
        summary,
        "total time: {} ({} x {})",
        fmt_g(report.total_time),
        fmt_g(report.total_time / unit),
        if matches!(r.kind, Kind::Bb | Kind::Bbb) {
            "pi/omega"
        } else {
            "pi/omega1"
        }
    );
    if let Some((timing, placement)) = &dsbbb {
        let _ = writeln!(
            summary,
            "theta1 = {}, theta2 = {}, orientation window = {}, BBB time = {}",
            fmt_g(timing.theta1),
            fmt_g(timing.theta2),
            fmt_g(timing.tau_ori),
            fmt_g(timing.tau_bbb)
        );
        let _ = writeln!(summary, "placement: {placement:?}");
    }
    for (k, v) in &report.constraint_flags {
        let _ = writeln!(summary, "{k}: {v}");
    }
    let _ = writeln!(
        summary,
        "final state: X = {}, P = {}",
        fmt_g(report.final_state.x()),
        fmt_g(report.final_state.p())
    );

    let mut json = json!({ "report": report });
    if let Some((timing, placement)) = dsbbb {
        json["dsbbb_timing"] = json!(timing);
        json["placement"] = json!(placement);
    }
    Ok(Outcome {
        summary,
        csv: schedule_csv(&report.schedule),
        json,
        tabular: false,
    })
}

fn grid_config(a: &SimulateArgs, file: &RunConfig, schedule: &Schedule) -> Result<GridConfig, CliError> {
    let base = GridConfig::default_for(schedule)?;
    let grid = GridConfig {
        x_min: pick(a.x_min, file.x_min, base.x_min),
        x_max: pick(a.x_max, file.x_max, base.x_max),
        n_points: pick(a.n_points, file.n_points, base.n_points),
        dt: pick(a.dt, file.dt, base.dt),
    };
    grid.validate(schedule)?;
    Ok(grid)
}

fn fidelity_line(label: &str, f: &FidelityResult) -> String {
    format!(
        "{label}: fidelity = {}, infidelity = {}, residual <P> = {}, final <X> = {}, energy drift = {}, norm drift = {}\n",
        fmt_g(f.fidelity),
        fmt_g(1.0 - f.fidelity),
        fmt_g(f.residual_momentum),
        fmt_g(f.final_mean_x),
        fmt_g(f.energy_drift),
        fmt_g(f.norm_drift)
    )
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let file = load_config(&a.common)?;
    let r = resolve(&a.params, &a.common, &file)?;
    let mut schedule = build(&r)?.report.schedule;
    if let Some(t) = a.truncate_at.or(file.truncate_at) {
        schedule = schedule.truncated(t)?;
    }
    let oracle = match (a.oracle, file.oracle.as_deref()) {
        (Some(o), _) => o,
        (None, Some("gaussian")) => OracleChoice::Gaussian,
        (None, Some("grid")) => OracleChoice::Grid,
        (None, Some("both")) | (None, None) => OracleChoice::Both,
        (None, Some(other)) => return Err(CliError::Invalid(format!("unknown oracle '{other}'"))),
    };
    let dump: Option<PathBuf> = a.dump.clone().or(file.dump.clone());

    let gaussian = match oracle {
        OracleChoice::Grid => None,
        _ => Some(gaussian_schedule_fidelity(&schedule)?),
    };
    let mut grid_cfg = None;
    let grid = match oracle {
        OracleChoice::Gaussian => None,
        _ => {
            let cfg = grid_config(a, &file, &schedule)?;
            let initial = GaussianState::ground(schedule.final_frame, 0.0);
            let run = grid_run(&initial, &schedule, &cfg, dump.is_some())?;
            if let Some(path) = &dump {
                let f = File::create(path)
                    .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
                write_snapshot_dump(BufWriter::new(f), &run.x, &run.waves)?;
            }
            grid_cfg = Some(cfg);
            Some(run.result)
        }
    };
    if dump.is_some() && grid.is_none() {
        return Err(CliError::Invalid("--dump needs the grid oracle".into()));
    }

    let mut summary = format!(
        "{} schedule, {} segments, duration {}\n",
        format!("{:?}", r.kind).to_lowercase(),
        schedule.segments.len(),
        fmt_g(schedule.total_duration())
    );
    let mut csv = String::from("method,fidelity,residual_momentum,energy_drift,norm_drift,final_mean_x\n");
    for (label, f) in [("gaussian", &gaussian), ("grid", &grid)] {
        if let Some(f) = f {
            summary.push_str(&fidelity_line(label, f));
            let row = csv_row(&[
                f.fidelity,
                f.residual_momentum,
                f.energy_drift,
                f.norm_drift,
                f.final_mean_x,
            ]);
            let _ = writeln!(csv, "{label},{row}");
        }
    }
    let mut json = json!({ "gaussian": gaussian, "grid": grid, "grid_config": grid_cfg });
    if let (Some(g), Some(n), Some(cfg)) = (gaussian, grid, grid_cfg) {
        let gap = (g.fidelity - n.fidelity).abs();
        if gap >= CROSS_ORACLE_TOL {
            // Reruns at a finer step to name the suspect.
            cross_validate(&schedule, &cfg)?;
        }
        let _ = writeln!(summary, "cross-oracle gap: {}", fmt_g(gap));
        json["gap"] = json!(gap);
    }
    Ok(Outcome {
        summary,
        csv,
        json,
        tabular: false,
    })
}

fn cmd_scan(a: &ScanArgs) -> Result<Outcome, CliError> {
    let file = load_config(&a.common)?;
    let defaults = ScanSettings::default();
    let d = pick(a.d, file.d, defaults.d);
    let settings = ScanSettings {
        omega1: pick(a.omega1, file.omega1, defaults.omega1),
        n_omega2: pick(a.n_omega2, file.n_omega2, defaults.n_omega2),
        n_t2: pick(a.n_t2, file.n_t2, defaults.n_t2),
        d,
        r: pick(a.r, file.r, d),
    };
    let result = run_scan(&settings)?;
    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;

    if let Some(script) = a.gnuplot.clone().or(file.gnuplot) {
        let data = a
            .common
            .out
            .clone()
            .or(file.out.clone())
            .ok_or_else(|| CliError::Invalid("--gnuplot needs --out so the script can reference the CSV".into()))?;
        write_file(&script, gnuplot_script(&data.display().to_string(), &result).as_bytes())?;
    }

    let faster = result.cells.iter().filter(|c| c.advantage < 0.0).count();
    let best = result
        .cells
        .iter()
        .min_by(|x, y| x.advantage.total_cmp(&y.advantage))
        .expect("nonempty scan");
    let summary = format!(
        "scan omega1 = {}, {} x {} cells\n\
         DSBBB faster than pi/omega1 in {} cells\n\
         best advantage {} at omega2 = {}, t2 = {}\n",
        fmt_g(result.omega1),
        settings.n_omega2,
        settings.n_t2,
        faster,
        fmt_g(best.advantage),
        fmt_g(best.omega2),
        fmt_g(best.t2)
    );
    Ok(Outcome {
        summary,
        csv: String::from_utf8(csv).expect("ascii csv"),
        json: json!({ "settings": settings, "result": result }),
        tabular: true,
    })
}

fn cmd_qsl(a: &QslArgs) -> Result<Outcome, CliError> {
    let file = load_config(&a.common)?;
    let d = pick(a.d, file.d, 3.0);
    let defaults = QslSettings::for_distance(d);
    let settings = QslSettings {
        d,
        omega: pick(a.omega, file.omega, defaults.omega),
        points: pick(a.points, file.points, defaults.points),
        r_min: pick(a.r_min, file.r_min, defaults.r_min),
        r_max: pick(a.r_max, file.r_max, defaults.r_max),
    };
    let table = qsl_table(&settings)?;
    let quiet = a.common.quiet || file.quiet.unwrap_or(false);
    if !quiet {
        for (r, reason) in &table.skipped {
            eprintln!("warning: skipped R = {}: {reason}", fmt_g(*r));
        }
        if !table.approximation_warnings.is_empty() {
            eprintln!(
                "warning: the pi/2 approximation of the bounds exceeds the BBB time on {} rows (D = {} is too small for orthogonal endpoints)",
                table.approximation_warnings.len(),
                fmt_g(d)
            );
        }
    }
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let summary = format!(
        "QSL table: D = {}, omega = {}, {} rows over R in [{}, {}], {} skipped\n",
        fmt_g(d),
        fmt_g(settings.omega),
        table.rows.len(),
        fmt_g(settings.r_min),
        fmt_g(settings.r_max),
        table.skipped.len()
    );
    Ok(Outcome {
        summary,
        csv: String::from_utf8(csv).expect("ascii csv"),
        json: json!(table),
        tabular: true,
    })
}

fn require<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Invalid(format!("--{what} is required")))
}

fn cmd_convert(a: &ConvertArgs) -> Result<Outcome, CliError> {
    let file = load_config(&a.common)?;
    let mass = require(a.mass.or(file.mass), "mass")?;
    let mass_unit = MassUnit::parse(&require(a.mass_unit.clone().or(file.mass_unit.clone()), "mass-unit")?)?;
    let freq = require(a.freq.or(file.freq), "freq")?;
    let freq_unit = FreqUnit::parse(&require(a.freq_unit.clone().or(file.freq_unit.clone()), "freq-unit")?)?;
    let distance = match a.distance.or(file.distance) {
        Some(x) => {
            let unit = require(a.distance_unit.clone().or(file.distance_unit.clone()), "distance-unit")?;
            Some((x, DistanceUnit::parse(&unit)?))
        }
        None => None,
    };
    let input = ConvertInput {
        mass,
        mass_unit,
        freq,
        freq_unit,
        angular: a.angular || file.angular.unwrap_or(false),
        distance,
        target_d: a.target_d.or(file.target_d),
    };
    let rep = convert(&input)?;

    let mut rows: Vec<(&str, f64)> = vec![
        ("mass_kg", rep.mass_kg),
        ("omega_rad_s", rep.omega_rad_s),
        ("frequency_hz", rep.frequency_hz),
        ("length_unit_m", rep.length_unit_m),
    ];
    if let (Some(x), Some(d)) = (rep.distance_m, rep.d) {
        rows.extend([("distance_m", x), ("D", d), ("alpha_xp", d), ("alpha_width", d / 2.0)]);
    }
    rows.extend([("tau_bb_s", rep.tau_bb_s), ("tau_bbb_r_eq_d_s", rep.tau_bbb_r_eq_d_s)]);
    if let (Some(t), Some(x)) = (rep.target_d, rep.target_distance_m) {
        rows.extend([("target_D", t), ("target_distance_m", x)]);
    }

    let mut summary = format!("convention: {}\n", rep.frequency_convention);
    let mut csv = String::from("quantity,value\n");
    for (k, v) in &rows {
        let _ = writeln!(summary, "{k:>18} = {}", fmt_g(*v));
        let _ = writeln!(csv, "{k},{}", fmt_g(*v));
    }
    summary.push_str("alpha_xp: |alpha| with alpha = X + iP (equals D); alpha_width: D/2 in ground-state widths\n");
    Ok(Outcome {
        summary,
        csv,
        json: json!(rep),
        tabular: false,
    })
}
