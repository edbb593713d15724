//! The five subcommands. Per-image failures are recorded in the report and
//! do not abort the batch; only configuration and output I/O problems are
//! fatal.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use uaqa_core::image::RasterImage;
use uaqa_core::probe::GateCandidate;
use uaqa_core::synth::{self, SpectrumSpec, WedgeSpec};
use uaqa_core::{annotations, batch, eval, probe, spectrum};

use crate::config::RunConfig;
use crate::{imgio, report, CliError};

/// Resolved per-invocation settings after merging config file and flags.
pub struct RunContext {
    pub cfg: RunConfig,
    pub out: Option<PathBuf>,
    pub overlay: bool,
    pub jobs: usize,
}

impl RunContext {
    pub fn new(
        config: Option<&Path>,
        out: Option<PathBuf>,
        overlay: bool,
        jobs: Option<usize>,
    ) -> Result<Self, CliError> {
        let cfg = RunConfig::load(config).map_err(CliError::Config)?;
        let ctx = Self {
            out,
            overlay: overlay || cfg.overlay,
            jobs: jobs.unwrap_or(cfg.jobs),
            cfg,
        };
        if ctx.overlay && ctx.out.is_none() {
            return Err(CliError::Config(
                "--overlay requires --out to place the images".into(),
            ));
        }
        if let Some(dir) = &ctx.out {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        }
        Ok(ctx)
    }

    /// Per-image report path `<out>/<stem>.<kind>.json`.
    fn report_path(&self, image: &Path, kind: &str) -> Option<PathBuf> {
        self.out.as_ref().map(|dir| {
            let stem = image.file_stem().unwrap_or_default().to_string_lossy();
            dir.join(format!("{stem}.{kind}.json"))
        })
    }

    fn overlay_path(&self, image: &Path, kind: &str) -> PathBuf {
        let stem = image.file_stem().unwrap_or_default().to_string_lossy();
        self.out
            .as_ref()
            .expect("overlay implies out")
            .join(format!("{stem}.{kind}.png"))
    }
}

fn error_entry(file: &Path, msg: &str) -> Value {
    json!({ "file": file.to_string_lossy(), "error": msg })
}

fn emit_stdout(value: &Value) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(&report::to_json_bytes(value))
        .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
}

/// Write per-image reports into the output directory, or the whole batch as
/// one JSON array on stdout.
fn emit_batch(ctx: &RunContext, images: &[PathBuf], kind: &str, values: Vec<Value>) -> Result<(), CliError> {
    if ctx.out.is_some() {
        for (image, value) in images.iter().zip(&values) {
            let path = ctx.report_path(image, kind).expect("out is set");
            report::write_json(&path, value).map_err(CliError::Io)?;
        }
        Ok(())
    } else {
        emit_stdout(&Value::Array(values))
    }
}

pub fn probe_cmd(ctx: &RunContext, images: Vec<PathBuf>) -> Result<(), CliError> {
    let cfg = ctx.cfg.probe.clone();
    let overlay = ctx.overlay;
    let results = batch::map_ordered(images.clone(), ctx.jobs, move |path| {
        let raster = match imgio::read_rgb(&path) {
            Ok(r) => r,
            Err(e) => return (error_entry(&path, &e), None),
        };
        match probe::locate_probe(&raster, &cfg) {
            Ok(loc) => {
                let mut value = serde_json::to_value(&loc).expect("serializable");
                value["file"] = Value::from(path.to_string_lossy().into_owned());
                let img = overlay.then(|| imgio::draw_probe_overlay(&raster, &loc));
                (value, img)
            }
            Err(e) => (error_entry(&path, &e.to_string()), None),
        }
    });
    let mut values = Vec::with_capacity(results.len());
    for ((value, overlay_img), image) in results.into_iter().zip(&images) {
        if let Some(img) = overlay_img {
            imgio::write_png(&ctx.overlay_path(image, "probe"), &img).map_err(CliError::Io)?;
        }
        values.push(value);
    }
    emit_batch(ctx, &images, "probe", values)
}

pub fn angle_cmd(ctx: &RunContext, image: PathBuf, annotations_path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(annotations_path).map_err(|e| {
        CliError::Config(format!(
            "cannot read annotations {}: {e}",
            annotations_path.display()
        ))
    })?;
    let gates = annotations::read_annotations(&text).map_err(|e| {
        CliError::Config(format!("annotations {}: {e}", annotations_path.display()))
    })?;

    let value = match imgio::read_rgb(&image) {
        Err(e) => error_entry(&image, &e),
        Ok(raster) => match probe::locate_probe(&raster, &ctx.cfg.probe) {
            Err(e) => error_entry(&image, &e.to_string()),
            Ok(loc) => {
                let gate_values: Vec<Value> = gates
                    .iter()
                    .map(|gate| {
                        let mut v = serde_json::to_value(gate).expect("serializable");
                        match probe::insonation_angle(&loc, gate) {
                            Ok(res) => {
                                v["insonation"] =
                                    serde_json::to_value(res).expect("serializable");
                            }
                            Err(e) => v["error"] = Value::from(e.to_string()),
                        }
                        v
                    })
                    .collect();
                json!({
                    "file": image.to_string_lossy(),
                    "apex": [loc.apex.x, loc.apex.y],
                    "verified": loc.verified,
                    "gates": gate_values,
                })
            }
        },
    };
    match ctx.report_path(&image, "angle") {
        Some(path) => report::write_json(&path, &value).map_err(CliError::Io),
        None => emit_stdout(&value),
    }
}

pub fn spectrum_cmd(ctx: &RunContext, images: Vec<PathBuf>) -> Result<(), CliError> {
    let cfg = ctx.cfg.spectrum.clone();
    let overlay = ctx.overlay;
    let results = batch::map_ordered(images.clone(), ctx.jobs, move |path| {
        let raster = match imgio::read_rgb(&path) {
            Ok(r) => r,
            Err(e) => return (error_entry(&path, &e), None),
        };
        match spectrum::assess(&raster, &cfg) {
            Ok(analysis) => {
                let value = json!({
                    "file": path.to_string_lossy(),
                    "axis_y": analysis.axis_y,
                    "peaks": analysis.peaks,
                    "valleys": analysis.valleys,
                    "verdict": serde_json::to_value(&analysis.verdict).expect("serializable"),
                });
                let img = overlay.then(|| spectrum::render_overlay(&raster, &analysis));
                (value, img)
            }
            Err(e) => (error_entry(&path, &e.to_string()), None),
        }
    });
    let mut values = Vec::with_capacity(results.len());
    for ((value, overlay_img), image) in results.into_iter().zip(&images) {
        if let Some(img) = overlay_img {
            imgio::write_png(&ctx.overlay_path(image, "spectrum"), &img).map_err(CliError::Io)?;
        }
        values.push(value);
    }
    emit_batch(ctx, &images, "spectrum", values)
}

pub const GATE_CSV_HEADER: &str = "x_center,y_center,angle_deg,score";

fn read_gates_csv(path: &Path) -> Result<Vec<GateCandidate>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == GATE_CSV_HEADER => {}
        other => {
            return Err(CliError::Config(format!(
                "{}: expected header '{GATE_CSV_HEADER}', found {:?}",
                path.display(),
                other.unwrap_or("")
            )))
        }
    }
    let mut gates = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| {
                CliError::Config(format!("{} line {}: {e}", path.display(), i + 2))
            })?;
        if fields.len() != 4 {
            return Err(CliError::Config(format!(
                "{} line {}: expected 4 fields, found {}",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        gates.push(gate_from_center(fields[0], fields[1], fields[2], fields[3]));
    }
    Ok(gates)
}

fn gate_from_center(x: f64, y: f64, angle: f64, score: f64) -> GateCandidate {
    use uaqa_core::image::Point;
    GateCandidate {
        box_min: Point::new(x - 1.0, y - 1.0),
        box_max: Point::new(x + 1.0, y + 1.0),
        vessel_angle_deg: angle,
        score,
    }
}

fn write_gates_csv(path: &Path, gates: &[GateCandidate]) -> Result<(), CliError> {
    let mut text = String::from(GATE_CSV_HEADER);
    text.push('\n');
    for g in gates {
        let c = g.centroid();
        text.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6}\n",
            c.x, c.y, g.vessel_angle_deg, g.score
        ));
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub struct EvalArgs {
    pub gt: PathBuf,
    pub pred: PathBuf,
    pub n_min: u32,
    pub n_max: u32,
    pub n_step: u32,
    pub plot: bool,
}

pub fn eval_cmd(ctx: &RunContext, args: &EvalArgs) -> Result<(), CliError> {
    if args.n_step == 0 || args.n_max < args.n_min {
        return Err(CliError::Config(format!(
            "invalid threshold sweep: n_min {} n_max {} n_step {}",
            args.n_min, args.n_max, args.n_step
        )));
    }
    if args.plot && ctx.out.is_none() {
        return Err(CliError::Config("--plot requires --out".into()));
    }
    let gts = read_gates_csv(&args.gt)?;
    let preds = read_gates_csv(&args.pred)?;
    let thresholds: Vec<u32> = (args.n_min..=args.n_max).step_by(args.n_step as usize).collect();
    let n_range: Vec<f64> = thresholds.iter().map(|&n| n as f64).collect();
    let curve = eval::sweep(&gts, &preds, &n_range, ctx.cfg.eval.fold)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.gt.display())))?;

    let mut csv = String::from("n,sensitivity_pct,mean_angle_err_deg\n");
    for (i, &n) in thresholds.iter().enumerate() {
        let err = match curve.mean_angle_err[i] {
            Some(e) => format!("{e:.6}"),
            None => String::new(),
        };
        csv.push_str(&format!("{n},{:.6},{err}\n", curve.sensitivity[i]));
    }
    match &ctx.out {
        Some(dir) => {
            let path = dir.join("eval.csv");
            std::fs::write(&path, &csv)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    if args.plot {
        let img = render_eval_plot(&curve);
        let path = ctx.out.as_ref().expect("checked above").join("eval.png");
        imgio::write_png(&path, &img).map_err(CliError::Io)?;
    }
    Ok(())
}

/// Sensitivity (blue, 0–100%) and mean angle error (red, 0–90°) against the
/// match threshold, on a plain white canvas with a black frame.
fn render_eval_plot(curve: &eval::EvalCurve) -> RasterImage {
    let (w, h, margin) = (640usize, 480usize, 40.0f64);
    let mut img = RasterImage::new(w, h, 3, vec![255; w * h * 3]).expect("sized buffer");
    let plot_w = w as f64 - 2.0 * margin;
    let plot_h = h as f64 - 2.0 * margin;
    let n_lo = curve.n_values.first().copied().unwrap_or(0.0);
    let n_hi = curve.n_values.last().copied().unwrap_or(1.0).max(n_lo + 1.0);
    let to_x = |n: f64| margin + (n - n_lo) / (n_hi - n_lo) * plot_w;
    let to_y = |frac: f64| h as f64 - margin - frac.clamp(0.0, 1.0) * plot_h;

    let frame = [
        ((margin, margin), (w as f64 - margin, margin)),
        ((margin, h as f64 - margin), (w as f64 - margin, h as f64 - margin)),
        ((margin, margin), (margin, h as f64 - margin)),
        ((w as f64 - margin, margin), (w as f64 - margin, h as f64 - margin)),
    ];
    for (a, b) in frame {
        imgio::draw_segment(&mut img, a, b, [0, 0, 0]);
    }
    for win in curve.n_values.windows(2).enumerate() {
        let (i, pair) = win;
        let a = (to_x(pair[0]), to_y(curve.sensitivity[i] / 100.0));
        let b = (to_x(pair[1]), to_y(curve.sensitivity[i + 1] / 100.0));
        imgio::draw_segment(&mut img, a, b, [0, 0, 255]);
        if let (Some(e0), Some(e1)) = (curve.mean_angle_err[i], curve.mean_angle_err[i + 1]) {
            let a = (to_x(pair[0]), to_y(e0 / 90.0));
            let b = (to_x(pair[1]), to_y(e1 / 90.0));
            imgio::draw_segment(&mut img, a, b, [255, 0, 0]);
        }
    }
    img
}

/// One entry in a synthetic-fixture spec file: a name plus exactly one of
/// the generator kinds.
#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthEntry {
    name: String,
    #[serde(default)]
    wedge: Option<WedgeSpec>,
    #[serde(default)]
    spectrum: Option<SpectrumSpec>,
    #[serde(default)]
    detection: Option<DetectionSpec>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionSpec {
    n_gt: usize,
    jitter_radius: f64,
    angle_noise_deg: f64,
    seed: u64,
}

pub fn synth_cmd(ctx: &RunContext, spec_path: &Path) -> Result<(), CliError> {
    let out = ctx.out.as_ref().ok_or_else(|| {
        CliError::Config("synth requires --out for the generated files".into())
    })?;
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec_path.display())))?;
    let entries: Vec<SynthEntry> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid spec {}: {e}", spec_path.display())))?;

    for entry in &entries {
        let kinds =
            entry.wedge.is_some() as u8 + entry.spectrum.is_some() as u8 + entry.detection.is_some() as u8;
        if kinds != 1 {
            return Err(CliError::Config(format!(
                "entry '{}' must set exactly one of wedge, spectrum, detection",
                entry.name
            )));
        }
        if entry.name.is_empty()
            || entry.name.contains(['/', '\\'])
            || entry.name.starts_with('.')
        {
            return Err(CliError::Config(format!(
                "entry name '{}' is not a plain file stem",
                entry.name
            )));
        }
    }

    for entry in entries {
        let name = &entry.name;
        if let Some(spec) = &entry.wedge {
            let (img, truth) = synth::gen_wedge(spec)
                .map_err(|e| CliError::Config(format!("entry '{name}': {e}")))?;
            imgio::write_png(&out.join(format!("{name}.png")), &img).map_err(CliError::Io)?;
            let value = serde_json::to_value(&truth).expect("serializable");
            report::write_json(&out.join(format!("{name}.truth.json")), &value)
                .map_err(CliError::Io)?;
        } else if let Some(spec) = &entry.spectrum {
            let (img, truth) = synth::gen_spectrum(spec)
                .map_err(|e| CliError::Config(format!("entry '{name}': {e}")))?;
            imgio::write_png(&out.join(format!("{name}.png")), &img).map_err(CliError::Io)?;
            let value = serde_json::to_value(&truth).expect("serializable");
            report::write_json(&out.join(format!("{name}.truth.json")), &value)
                .map_err(CliError::Io)?;
        } else if let Some(det) = &entry.detection {
            if det.n_gt == 0 {
                return Err(CliError::Config(format!(
                    "entry '{name}': detection n_gt must be at least 1"
                )));
            }
            let (gts, preds) =
                synth::gen_detection_scene(det.n_gt, det.jitter_radius, det.angle_noise_deg, det.seed);
            write_gates_csv(&out.join(format!("{name}.gt.csv")), &gts)?;
            write_gates_csv(&out.join(format!("{name}.pred.csv")), &preds)?;
        }
    }
    Ok(())
}
