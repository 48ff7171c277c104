//! `gpa` — design, simulate, calibrate, and export geometry-based
//! pneumatic actuators from the command line.

mod chart;
mod haptics_net;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gpa_core::actuator::InflationState;
use gpa_core::angle::AngleRad;
use gpa_core::calibrate;
use gpa_core::chain::BasePose;
use gpa_core::config::{parse_config, ProjectConfig};
use gpa_core::control;
use gpa_core::fabricate::{self, gcode::MachineConfig, svg as pattern_svg};
use gpa_core::gait;
use gpa_core::kinematics;
use gpa_core::moment;

use io::{fmt_num, read_csv_columns, write_file, UNCALIBRATED_WATERMARK};

#[derive(Parser)]
#[command(
    name = "gpa",
    version,
    about = "Geometry-based pneumatic actuator toolkit",
    propagate_version = true
)]
struct Cli {
    /// Project config file; $GPA_CONFIG is used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the effective config with all defaults filled, then continue
    #[arg(long, global = true)]
    explain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the inflated pose for a chamber pressure state
    Pose(PoseArgs),
    /// Sweep the quasi-static torque curve at fixed pressure
    Torque(TorqueArgs),
    /// Inverse design: target inflated angles → deflated spec + pattern
    Design(DesignArgs),
    /// Fit calibrations from CSV datasets
    Calibrate {
        #[command(subcommand)]
        what: CalibrateCmd,
    },
    /// Export fabrication files
    Export {
        #[command(subcommand)]
        what: ExportCmd,
    },
    /// Gait programs: valve schedules and crawl simulation
    Gait {
        #[command(subcommand)]
        what: GaitCmd,
    },
    /// Haptic force mapping and the UDP force-feedback link
    Haptics {
        #[command(subcommand)]
        what: HapticsCmd,
    },
    /// Pressure control profiles
    Control {
        #[command(subcommand)]
        what: ControlCmd,
    },
}

#[derive(Args)]
struct PoseArgs {
    /// Chamber pressures, e.g. "c1=50,c2=0" (kPa); omitted chambers are 0
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Args)]
struct TorqueArgs {
    /// Chamber pressure in kPa
    #[arg(long)]
    pressure: f64,
    /// Sweep range in degrees, "start:end"
    #[arg(long, default_value = "180:95")]
    sweep: String,
    /// Joint to sweep; defaults to the only driven joint
    #[arg(long)]
    joint: Option<String>,
    /// Rotation rate in deg/s
    #[arg(long, default_value_t = 3.0)]
    rate: f64,
    /// Sample interval in seconds
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Args)]
struct DesignArgs {
    /// Target inflated joint angles in degrees, comma separated, one per
    /// driven joint
    #[arg(long)]
    targets: String,
    /// Write the deflated spec as a config document
    #[arg(long)]
    out_config: Option<PathBuf>,
    /// Write the seal pattern of the deflated spec
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CalibrateCmd {
    /// Fit the affine angle map from (alpha0_deg, alpha1_deg) data
    Angle {
        #[arg(long)]
        data: PathBuf,
        /// Update the config's angle_map block in place
        #[arg(long)]
        write: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the exponential FSR curve from (force_n, resistance_kohm) data
    Fsr {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        write: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the one-parameter torque scale from measured moments
    Torque {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        write: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExportCmd {
    /// Seal pattern as an SVG drawing (1 unit = 1 mm)
    Svg {
        #[arg(long)]
        out: PathBuf,
    },
    /// Heat-sealer toolpath program
    Gcode {
        #[arg(long)]
        out: PathBuf,
        /// Config file whose machine block overrides the project's
        #[arg(long)]
        machine: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GaitCmd {
    /// Print a canonical gait's 4-channel valve schedule as CSV
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a canonical gait and report trajectory + metrics
    Run {
        name: String,
        #[arg(long, default_value_t = 10)]
        cycles: usize,
        /// Config file whose crawler block overrides the project's
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        #[arg(long)]
        out_metrics: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HapticsCmd {
    /// Map fingertip force to valve pressure
    Map {
        #[arg(long)]
        fmax: f64,
        #[arg(long)]
        pmax: f64,
        /// Map a single force instead of printing the whole table
        #[arg(long)]
        force: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Send force datagrams over UDP
    Send {
        #[arg(long)]
        addr: String,
        #[arg(long, default_value_t = 0)]
        seq: u32,
        #[arg(long)]
        index: f32,
        #[arg(long)]
        thumb: f32,
        #[arg(long, default_value_t = 1)]
        count: u32,
        #[arg(long, default_value_t = 0)]
        interval_ms: u64,
    },
    /// Receive force datagrams and print them as CSV
    Recv {
        #[arg(long)]
        bind: String,
        #[arg(long, default_value_t = 1)]
        count: u32,
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
    },
}

#[derive(Subcommand)]
enum ControlCmd {
    /// Piecewise-linear pressure ramp profile as CSV
    Ramp {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = control::DEFAULT_RAMP_RATE_KPA_S)]
        rate: f64,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn config_path(cli: &Cli) -> PathBuf {
    if let Some(p) = &cli.config {
        return p.clone();
    }
    if let Ok(env) = std::env::var("GPA_CONFIG") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    // Missing required input is a usage error: report and exit 2.
    eprintln!("error: no config given; pass --config <file> or set GPA_CONFIG");
    std::process::exit(2);
}

fn load_config(cli: &Cli) -> Result<(ProjectConfig, PathBuf)> {
    let path = config_path(cli);
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg = parse_config(&text)?;
    if cli.explain {
        println!("{}", serde_json::to_string_pretty(&cfg.to_document())?);
    }
    Ok((cfg, path))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Pose(args) => cmd_pose(&cli, args),
        Command::Torque(args) => cmd_torque(&cli, args),
        Command::Design(args) => cmd_design(&cli, args),
        Command::Calibrate { what } => cmd_calibrate(&cli, what),
        Command::Export { what } => cmd_export(&cli, what),
        Command::Gait { what } => cmd_gait(&cli, what),
        Command::Haptics { what } => cmd_haptics(what),
        Command::Control { what } => cmd_control(what),
    }
}

fn parse_state(spec: Option<&str>) -> Result<InflationState> {
    let mut state = InflationState::new();
    let Some(spec) = spec else { return Ok(state) };
    for part in spec.split(',').filter(|s| !s.is_empty()) {
        let (chamber, kpa) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("bad --state entry `{part}`, expected chamber=kPa"))?;
        let p: f64 = kpa
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad pressure `{kpa}` for chamber `{chamber}`"))?;
        state = state.with(chamber.trim(), p);
    }
    Ok(state)
}

fn watermark(cfg: &ProjectConfig) -> Option<&'static str> {
    if cfg.angle_map.calibrated {
        None
    } else {
        Some(UNCALIBRATED_WATERMARK)
    }
}

fn cmd_pose(cli: &Cli, args: &PoseArgs) -> Result<()> {
    let (cfg, _) = load_config(cli)?;
    let state = parse_state(args.state.as_deref())?;
    let report = gpa_core::actuator::validate_state(&cfg.actuator, &state, cfg.max_pressure_kpa);
    if let Some(v) = report.violations.first() {
        bail!("{}: {}", v.path, v.message);
    }
    let inflated =
        kinematics::inflate_pose(&cfg.actuator, &state, &cfg.angle_map, BasePose::default())?;
    for d in &inflated.diagnostics {
        eprintln!("diagnostic: {d}");
    }

    let mut csv = String::new();
    if let Some(w) = watermark(&cfg) {
        csv.push_str(w);
        csv.push('\n');
    }
    csv.push_str("vertex,x_mm,y_mm\n");
    for (i, v) in inflated.pose.vertices.iter().enumerate() {
        csv.push_str(&format!("{i},{},{}\n", fmt_num(v.x), fmt_num(v.y)));
    }
    emit(args.out_csv.as_deref(), &csv)?;

    if let Some(svg_path) = &args.out_svg {
        let pts: Vec<(f64, f64)> = inflated.pose.vertices.iter().map(|v| (v.x, v.y)).collect();
        let svg = chart::render_polyline_mm(&pts, "inflated pose", watermark(&cfg));
        write_file(svg_path, &svg)?;
    }
    Ok(())
}

fn parse_sweep(s: &str) -> Result<(AngleRad, AngleRad)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("bad --sweep `{s}`, expected start:end in degrees"))?;
    let parse = |v: &str| -> Result<AngleRad> {
        let deg: f64 = v.parse().map_err(|_| anyhow!("bad sweep angle `{v}`"))?;
        AngleRad::from_degrees(deg).map_err(|e| anyhow!("{e}"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn pick_joint<'a>(cfg: &'a ProjectConfig, requested: Option<&String>) -> Result<&'a str> {
    if let Some(j) = requested {
        return Ok(cfg
            .actuator
            .joint(j)
            .ok_or_else(|| anyhow!("unknown joint `{j}`"))?
            .id
            .as_str());
    }
    let driven = cfg.actuator.driven_joints();
    match driven.as_slice() {
        [only] => Ok(only.id.as_str()),
        [] => bail!("no chamber drives any joint; nothing to sweep"),
        many => bail!(
            "several joints are driven ({}); pick one with --joint",
            many.iter().map(|j| j.id.as_str()).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn cmd_torque(cli: &Cli, args: &TorqueArgs) -> Result<()> {
    let (cfg, _) = load_config(cli)?;
    let (start, end) = parse_sweep(&args.sweep)?;
    let joint = pick_joint(&cfg, args.joint.as_ref())?;
    let curve = moment::torque_sweep(
        &cfg.actuator,
        joint,
        args.pressure,
        start,
        end,
        args.rate,
        args.dt,
        cfg.torque_scale,
    )?;

    let mut csv = String::from("theta_deg,moment_nmm\n");
    let series: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .map(|s| (s.theta.degrees(), s.moment_nmm))
        .collect();
    for (theta, m) in &series {
        csv.push_str(&format!("{},{}\n", fmt_num(*theta), fmt_num(*m)));
    }
    emit(args.out_csv.as_deref(), &csv)?;

    if let Some(svg_path) = &args.out_svg {
        let title = format!(
            "torque at {} kPa (scale {})",
            fmt_num(curve.pressure_kpa),
            fmt_num(curve.scale)
        );
        let svg = chart::line_chart(&series, "theta_deg", "moment_nmm", &title, None);
        write_file(svg_path, &svg)?;
    }
    Ok(())
}

fn cmd_design(cli: &Cli, args: &DesignArgs) -> Result<()> {
    let (cfg, _) = load_config(cli)?;
    let mut targets = Vec::new();
    for part in args.targets.split(',').filter(|s| !s.is_empty()) {
        let deg: f64 = part
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad --targets angle `{part}`"))?;
        targets.push(AngleRad::from_degrees(deg)?);
    }
    let deflated = fabricate::inverse_design(&targets, &cfg.angle_map, &cfg.actuator)?;

    let mut out_cfg = cfg.clone();
    out_cfg.actuator = deflated.clone();
    let mut doc = serde_json::to_string_pretty(&out_cfg.to_document())?;
    doc.push('\n');
    if let Some(w) = watermark(&cfg) {
        doc = format!("{}\n{doc}", w.replace('#', "//"));
    }
    match &args.out_config {
        Some(p) => write_file(p, &doc)?,
        None => print!("{doc}"),
    }

    if let Some(svg_path) = &args.out_svg {
        let pattern = fabricate::layout_pattern(&deflated)?;
        let mut svg = pattern_svg::export_svg(&pattern)?;
        if let Some(w) = watermark(&cfg) {
            svg = svg.replacen(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                &format!(
                    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- {} -->\n",
                    w.trim_start_matches("# ")
                ),
                1,
            );
        }
        write_file(svg_path, &svg)?;
    }
    Ok(())
}

fn fit_report_json(report: &calibrate::FitReport, extra: serde_json::Value) -> serde_json::Value {
    let params: serde_json::Map<String, serde_json::Value> = report
        .params
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::json!(v)))
        .collect();
    let mut value = serde_json::json!({
        "family": format!("{:?}", report.family).to_lowercase(),
        "params": params,
        "rmse": report.rmse,
        "aic": report.aic,
        "n": report.n,
        "converged": report.converged,
        "warnings": report.warnings,
    });
    if let serde_json::Value::Object(ref mut map) = value {
        if let serde_json::Value::Object(extra) = extra {
            map.extend(extra);
        }
    }
    value
}

/// Rewrite one top-level block of the config file in place.
fn update_config_file(path: &Path, key: &str, block: serde_json::Value) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut doc: serde_json::Value = serde_json::from_str(&text)?;
    doc.as_object_mut()
        .ok_or_else(|| anyhow!("config root must be an object"))?
        .insert(key.to_string(), block);
    let mut pretty = serde_json::to_string_pretty(&doc)?;
    pretty.push('\n');
    parse_config(&pretty).context("updated config would not validate; not writing")?;
    write_file(path, &pretty)?;
    Ok(())
}

fn family_names(reports: &[calibrate::FitReport]) -> Vec<String> {
    reports
        .iter()
        .map(|r| format!("{:?}", r.family).to_lowercase())
        .collect()
}

fn cmd_calibrate(cli: &Cli, what: &CalibrateCmd) -> Result<()> {
    match what {
        CalibrateCmd::Angle { data, write, out } => {
            let (_, cfg_path) = load_config(cli)?;
            let rows = read_csv_columns(data, "alpha0_deg,alpha1_deg")?;
            let points: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| (r[0].to_radians(), r[1].to_radians()))
                .collect();
            let fit = calibrate::fit_affine(&points)?;

            // The characterization data supports two linear readings:
            // α1 vs α0 (the canonical map) and the contraction factor λ
            // vs α0. Both residuals are reported so they can be compared;
            // the kinematics always consume the α-map.
            let lambda_fit = {
                let lambda_points: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| {
                        let (a0, a1) = (r[0].to_radians(), r[1].to_radians());
                        (a0, (std::f64::consts::PI - a0) / (std::f64::consts::PI - a1))
                    })
                    .collect();
                calibrate::compare_fits(&lambda_points, &[calibrate::FitFamily::Affine])
                    .into_iter()
                    .next()
            };
            let report = fit_report_json(
                &fit.report,
                serde_json::json!({
                    "slope": fit.map.slope(),
                    "intercept_deg": fit.map.intercept_rad().to_degrees(),
                    "domain_deg": [fit.map.domain().0.degrees(), fit.map.domain().1.degrees()],
                    "lambda_vs_alpha0": lambda_fit.map(|r| serde_json::json!({
                        "slope_per_rad": r.params.iter().find(|p| p.0 == "slope").map(|p| p.1),
                        "intercept": r.params.iter().find(|p| p.0 == "intercept").map(|p| p.1),
                        "rmse": r.rmse,
                        "converged": r.converged,
                    })),
                }),
            );
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(out.as_deref(), &text)?;
            if *write {
                update_config_file(
                    &cfg_path,
                    "angle_map",
                    serde_json::json!({
                        "slope": fit.map.slope(),
                        "intercept_deg": fit.map.intercept_rad().to_degrees(),
                        "domain_deg": [fit.map.domain().0.degrees(), fit.map.domain().1.degrees()],
                        "calibrated": true,
                    }),
                )?;
                eprintln!("updated angle_map in {}", cfg_path.display());
            }
            Ok(())
        }
        CalibrateCmd::Fsr { data, write, out } => {
            let rows = read_csv_columns(data, "force_n,resistance_kohm")?;
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
            let (cal, fit) = calibrate::fit_exponential(&points)?;
            let ranked = calibrate::compare_fits(
                &points,
                &[
                    calibrate::FitFamily::Affine,
                    calibrate::FitFamily::Exponential,
                    calibrate::FitFamily::Power,
                ],
            );
            let report = fit_report_json(
                &fit,
                serde_json::json!({
                    "fsr": {
                        "a_kohm": cal.a_kohm,
                        "b_per_n": cal.b_per_n,
                        "c_kohm": cal.c_kohm,
                        "force_range_n": [cal.force_range_n.0, cal.force_range_n.1],
                    },
                    "family_ranking": family_names(&ranked),
                }),
            );
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(out.as_deref(), &text)?;
            if *write {
                let (cfg, cfg_path) = load_config(cli)?;
                update_config_file(
                    &cfg_path,
                    "haptics",
                    serde_json::json!({
                        "f_max_n": cfg.haptics.f_max_n,
                        "p_max_kpa": cfg.haptics.p_max_kpa,
                        "p_base_kpa": cfg.haptics.p_base_kpa,
                        "fsr": {
                            "a_kohm": cal.a_kohm,
                            "b_per_n": cal.b_per_n,
                            "c_kohm": cal.c_kohm,
                            "force_range_n": [cal.force_range_n.0, cal.force_range_n.1],
                        },
                    }),
                )?;
                eprintln!("updated haptics.fsr in {}", cfg_path.display());
            }
            Ok(())
        }
        CalibrateCmd::Torque { data, write, out } => {
            let (cfg, cfg_path) = load_config(cli)?;
            let rows = read_csv_columns(data, "theta_deg,pressure_kpa,moment_nmm")?;
            let joint = pick_joint(&cfg, None)?;
            let chambers: Vec<&gpa_core::actuator::ChamberSpec> = cfg
                .actuator
                .chambers
                .iter()
                .filter(|c| c.drives.iter().any(|d| d.joint == joint))
                .collect();
            let mut model = Vec::new();
            let mut measured = Vec::new();
            for r in &rows {
                let theta = AngleRad::from_degrees(r[0])?;
                let mut m = 0.0;
                for chamber in &chambers {
                    m += moment::moment(theta, r[1], chamber, 1.0)?;
                }
                model.push(m);
                measured.push(r[2]);
            }
            let scale = moment::fit_torque_scale(&model, &measured)
                .ok_or_else(|| anyhow!("degenerate torque data: model moments are all zero"))?;
            let rmse = {
                let ss: f64 = model
                    .iter()
                    .zip(&measured)
                    .map(|(m, y)| (scale * m - y).powi(2))
                    .sum();
                (ss / model.len() as f64).sqrt()
            };
            let report = serde_json::json!({
                "torque_scale": scale,
                "rmse_nmm": rmse,
                "n": model.len(),
                "joint": joint,
            });
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(out.as_deref(), &text)?;
            if *write {
                update_config_file(&cfg_path, "torque_scale", serde_json::json!(scale))?;
                eprintln!("updated torque_scale in {}", cfg_path.display());
            }
            Ok(())
        }
    }
}

fn cmd_export(cli: &Cli, what: &ExportCmd) -> Result<()> {
    let (cfg, _) = load_config(cli)?;
    let pattern = fabricate::layout_pattern(&cfg.actuator)?;
    match what {
        ExportCmd::Svg { out } => {
            let svg = pattern_svg::export_svg(&pattern)?;
            write_file(out, &svg)
        }
        ExportCmd::Gcode { out, machine } => {
            let machine_cfg: MachineConfig = match machine {
                None => cfg.machine,
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading machine config {}", path.display()))?;
                    parse_config(&text)?.machine
                }
            };
            let program = fabricate::gcode::export_gcode(&pattern, &machine_cfg)?;
            write_file(out, &program.to_text())
        }
    }
}

fn cmd_gait(cli: &Cli, what: &GaitCmd) -> Result<()> {
    match what {
        GaitCmd::Emit { name, out } => {
            let program = control::gait_by_name(name).ok_or_else(|| {
                anyhow!("unknown gait `{name}`; canonical gaits: forward, retrograde, turn_left, turn_right")
            })?;
            let schedule = control::leg_valve_schedule(&program)?;
            let mut csv = String::from("t_s,duration_s,l_flex,l_ext,r_flex,r_ext\n");
            for phase in schedule {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_num(phase.t_start_s),
                    fmt_num(phase.duration_s),
                    phase.channels[0] as u8,
                    phase.channels[1] as u8,
                    phase.channels[2] as u8,
                    phase.channels[3] as u8,
                ));
            }
            emit(out.as_deref(), &csv)
        }
        GaitCmd::Run { name, cycles, model, out_csv, out_svg, out_metrics } => {
            let program = control::gait_by_name(name).ok_or_else(|| {
                anyhow!("unknown gait `{name}`; canonical gaits: forward, retrograde, turn_left, turn_right")
            })?;
            let crawler = match model {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading model config {}", path.display()))?;
                    parse_config(&text)?.crawler
                }
                None => load_config(cli)?.0.crawler,
            };
            let traj = gait::simulate(&crawler, &program, *cycles)?;
            let m = gait::metrics(&traj)?;

            let mut csv = String::from("t_s,x_mm,y_mm,heading_rad\n");
            for s in &traj.samples {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_num(s.t_s),
                    fmt_num(s.x_mm),
                    fmt_num(s.y_mm),
                    fmt_num(s.heading_rad)
                ));
            }
            emit(out_csv.as_deref(), &csv)?;

            if let Some(svg_path) = out_svg {
                let pts: Vec<(f64, f64)> = traj.samples.iter().map(|s| (s.x_mm, s.y_mm)).collect();
                let svg = chart::render_polyline_mm(&pts, &format!("{name} trajectory"), None);
                write_file(svg_path, &svg)?;
            }

            let metrics_json = serde_json::json!({
                "gait": name,
                "cycles": cycles,
                "mean_speed_mm_s": m.mean_speed_mm_s,
                "turning_radius_cm": if m.turning_radius_cm.is_finite() {
                    serde_json::json!(m.turning_radius_cm)
                } else {
                    serde_json::json!("straight")
                },
                "net_heading_rad": m.net_heading_rad,
            });
            let mut text = serde_json::to_string_pretty(&metrics_json)?;
            text.push('\n');
            match out_metrics {
                Some(p) => write_file(p, &text)?,
                None => eprint!("{text}"),
            }
            Ok(())
        }
    }
}

fn cmd_haptics(what: &HapticsCmd) -> Result<()> {
    match what {
        HapticsCmd::Map { fmax, pmax, force, out } => {
            let mut csv = String::from("force_n,pressure_kpa\n");
            match force {
                Some(f) => {
                    let p =
                        control::force_to_pressure(*f, *fmax, *pmax, control::HAPTIC_BASELINE_KPA)?;
                    csv.push_str(&format!("{},{}\n", fmt_num(*f), fmt_num(p)));
                }
                None => {
                    for i in 0..=20 {
                        let f = fmax * i as f64 / 20.0;
                        let p = control::force_to_pressure(
                            f,
                            *fmax,
                            *pmax,
                            control::HAPTIC_BASELINE_KPA,
                        )?;
                        csv.push_str(&format!("{},{}\n", fmt_num(f), fmt_num(p)));
                    }
                }
            }
            emit(out.as_deref(), &csv)
        }
        HapticsCmd::Send { addr, seq, index, thumb, count, interval_ms } => {
            haptics_net::send(addr, *seq, *index, *thumb, *count, *interval_ms)
        }
        HapticsCmd::Recv { bind, count, timeout_ms } => {
            let datagrams = haptics_net::recv(bind, *count, *timeout_ms)?;
            let mut csv = String::from("seq,index_force_n,thumb_force_n\n");
            for d in &datagrams {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    d.seq,
                    fmt_num(d.index_force_n as f64),
                    fmt_num(d.thumb_force_n as f64)
                ));
            }
            print!("{csv}");
            if datagrams.len() < *count as usize {
                bail!("timed out after {} of {count} datagrams", datagrams.len());
            }
            Ok(())
        }
    }
}

fn cmd_control(what: &ControlCmd) -> Result<()> {
    match what {
        ControlCmd::Ramp { from, to, rate, dt, out } => {
            let profile = control::ramp_profile(*from, *to, *rate, *dt)?;
            let mut csv = String::from("t_s,p_kpa\n");
            for (t, p) in &profile.samples {
                csv.push_str(&format!("{},{}\n", fmt_num(*t), fmt_num(*p)));
            }
            emit(out.as_deref(), &csv)
        }
    }
}
