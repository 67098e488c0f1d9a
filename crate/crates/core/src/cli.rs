//! File-in/file-out command-line frontend.
//!
//! Every subcommand reads the `*.txt` files of an input directory in sorted
//! order and writes one output file per input. Image ids are file stems with
//! a leading `gt_` or `res_` removed; detection files are written as
//! `res_<id>.txt` and `eval` pairs files by id.
//!
//! Target files hold one region per line: `4 + 4n` space-separated decimals,
//! optionally followed by a score. Lines starting with `#` are ignored.
//!
//! Exit status is 0 on success, 1 on a data error and 2 on a usage error.
//! `SLPR_THREADS` caps the worker pool (`0` or unset: one per core).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::codec::{decode, encode, param_count, PointChains, SlprTarget, TextAxis, DEFAULT_LINES};
use crate::dataio::{
    format_annotation, read_annotations, read_detections, resample_to_ctw, write_detections,
    AnnotationRecord, Format,
};
use crate::error::{Error, Result};
use crate::eval::{aggregate, match_image, GroundTruth, ImageStats, DEFAULT_IOU};
use crate::loss::{gradient_check, LossConfig};
use crate::restore::{restore, RestoreConfig, RestoreMethod};
use crate::suppress::{nms, pnms, Detection};
use crate::synth::{generate, ShapeSpec};

#[derive(Debug, Parser)]
#[command(
    name = "slpr",
    version,
    about = "Sliding-line text region encoding, restoration, suppression and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode annotation polygons as sliding-line targets.
    Encode(EncodeArgs),
    /// Decode targets into their boundary point chains (JSON lines).
    Decode(DecodeArgs),
    /// Restore polygons from targets.
    Restore(RestoreArgs),
    /// Suppress overlapping detections.
    Nms(NmsArgs),
    /// Score detections against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic annotation corpus.
    Synth(SynthArgs),
    /// Check analytic loss gradients against finite differences.
    LossCheck(LossCheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Icdar15,
    Ctw1500,
    PolygonJson,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Icdar15 => Format::Icdar15,
            FormatArg::Ctw1500 => Format::Ctw1500,
            FormatArg::PolygonJson => Format::PolygonJson,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Pls,
    Bhvp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NmsMode {
    Nms,
    Pnms,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long, value_enum)]
    format: FormatArg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LINES)]
    n: usize,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RestoreArgs {
    #[arg(long, value_enum, default_value = "pls")]
    method: MethodArg,
    #[arg(long, default_value_t = 0.8)]
    k: f64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Output format; ctw1500 resamples each polygon to 14 vertices.
    #[arg(long, value_enum, default_value = "polygon-json")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct NmsArgs {
    #[arg(long, value_enum, default_value = "pnms")]
    mode: NmsMode,
    #[arg(long)]
    threshold: f64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "polygon-json")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    det: PathBuf,
    #[arg(long, value_enum, default_value = "icdar15")]
    gt_format: FormatArg,
    #[arg(long, default_value_t = DEFAULT_IOU)]
    iou: f64,
    /// Also write the report, with per-match details, as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Shape templates, one `key=value` record per line, used round-robin.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "polygon-json")]
    format: FormatArg,
    /// Shape `i` is drawn with seed `seed + i` unless its template fixes one.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct LossCheckArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SLPR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("SLPR_THREADS={raw:?} is not a count")))?;
    if n > 0 {
        // A pool may already exist when `run` is called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Encode(a) => cmd_encode(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Restore(a) => cmd_restore(&a),
        Command::Nms(a) => cmd_nms(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::LossCheck(a) => cmd_loss_check(&a),
    }
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => Error::Parse(format!("{}: {other}", path.display())),
    })
}

fn read_text(path: &Path) -> Result<String> {
    with_path(path, fs::read_to_string(path).map_err(Error::from))
}

/// Sorted `*.txt` files of `dir`.
fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = with_path(dir, fs::read_dir(dir).map_err(Error::from))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Image id of an annotation or detection file.
pub fn image_id(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    for prefix in ["gt_", "res_"] {
        if let Some(rest) = stem.strip_prefix(prefix) {
            return rest.to_string();
        }
    }
    stem
}

/// Applies `f` to every input file in parallel, then writes the outputs in
/// input order.
fn map_files<F>(input: &Path, out: &Path, name: impl Fn(&Path) -> String, f: F) -> Result<usize>
where
    F: Fn(&Path, &str) -> Result<String> + Sync,
{
    let files = list_inputs(input)?;
    let outputs: Vec<String> = files
        .par_iter()
        .map(|p| read_text(p).and_then(|text| with_path(p, f(p, &text))))
        .collect::<Result<_>>()?;
    fs::create_dir_all(out)?;
    for (p, body) in files.iter().zip(outputs) {
        let dest = out.join(name(p));
        with_path(&dest, fs::write(&dest, body).map_err(Error::from))?;
    }
    Ok(files.len())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Formats a target as one line; `{}` keeps every `f64` round-trippable.
pub fn format_target(t: &SlprTarget, score: Option<f64>) -> String {
    let mut fields: Vec<String> = t.to_params().iter().map(|v| v.to_string()).collect();
    if let Some(s) = score {
        fields.push(s.to_string());
    }
    fields.join(" ")
}

/// Parses a target line, inferring `n` from the field count. A field count
/// of `4 + 4n + 1` means the last value is a score.
pub fn parse_target(line: &str) -> Result<(SlprTarget, Option<f64>)> {
    let values = line
        .split_whitespace()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {f:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let len = values.len();
    let (params, score) = if len >= param_count(1) && len % 4 == 0 {
        (&values[..], None)
    } else if len > param_count(1) && len % 4 == 1 {
        (&values[..len - 1], Some(values[len - 1]))
    } else {
        return Err(Error::Parse(format!(
            "target line has {len} values, expected 4 + 4n (+ score)"
        )));
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite target value".into()));
    }
    let t = SlprTarget::from_params(params).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((t, score))
}

fn read_targets(text: &str) -> Result<Vec<(SlprTarget, Option<f64>)>> {
    content_lines(text)
        .map(|(no, l)| parse_target(l).map_err(|e| Error::Parse(format!("line {no}: {e}"))))
        .collect()
}

fn cmd_encode(a: &EncodeArgs) -> Result<i32> {
    if a.n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    let format = Format::from(a.format);
    let n = a.n;
    let count = map_files(
        &a.input,
        &a.out,
        |p| format!("{}.txt", image_id(p)),
        |_, text| {
            let mut out = String::new();
            for rec in read_annotations(text, format)? {
                out.push_str(&format_target(&encode(&rec.polygon, n)?, None));
                out.push('\n');
            }
            Ok(out)
        },
    )?;
    eprintln!("encoded {count} files");
    Ok(0)
}

fn chains_json(c: &PointChains) -> serde_json::Value {
    let pts = |v: &[crate::geom::Point]| v.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>();
    let axis = match c.axis {
        TextAxis::Horizontal => "horizontal",
        TextAxis::Vertical => "vertical",
    };
    serde_json::json!({ "axis": axis, "first": pts(&c.first), "second": pts(&c.second) })
}

fn cmd_decode(a: &DecodeArgs) -> Result<i32> {
    map_files(
        &a.input,
        &a.out,
        |p| format!("{}.txt", image_id(p)),
        |_, text| {
            let mut out = String::new();
            for (id, (t, _)) in read_targets(text)?.iter().enumerate() {
                let (lr, tb) = decode(t);
                let v = serde_json::json!({ "id": id, "left_right": chains_json(&lr), "top_bottom": chains_json(&tb) });
                out.push_str(&v.to_string());
                out.push('\n');
            }
            Ok(out)
        },
    )?;
    Ok(0)
}

fn to_output_polygons(dets: Vec<Detection>, format: Format) -> Result<Vec<Detection>> {
    if format != Format::Ctw1500 {
        return Ok(dets);
    }
    dets.into_iter()
        .map(|d| Detection::new(resample_to_ctw(&d.polygon)?, d.score, d.id))
        .collect()
}

fn cmd_restore(a: &RestoreArgs) -> Result<i32> {
    let method = match a.method {
        MethodArg::Pls => RestoreMethod::Pls,
        MethodArg::Bhvp => RestoreMethod::Bhvp,
    };
    let cfg = RestoreConfig::new(method, a.k).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let format = Format::from(a.format);
    map_files(
        &a.input,
        &a.out,
        |p| format!("res_{}.txt", image_id(p)),
        |path, text| {
            let mut dets = Vec::new();
            for (id, (t, score)) in read_targets(text)?.into_iter().enumerate() {
                match restore(&t, &cfg) {
                    Ok(p) => dets.push(Detection::new(p, score.unwrap_or(1.0), id as u64)?),
                    Err(e) => eprintln!("warning: {}: region {id} dropped: {e}", path.display()),
                }
            }
            write_detections(&to_output_polygons(dets, format)?, format)
        },
    )?;
    Ok(0)
}

fn cmd_nms(a: &NmsArgs) -> Result<i32> {
    if !(a.threshold > 0.0 && a.threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "--threshold {} outside (0, 1)",
            a.threshold
        )));
    }
    let format = Format::from(a.format);
    map_files(
        &a.input,
        &a.out,
        |p| format!("res_{}.txt", image_id(p)),
        |_, text| {
            let dets = read_detections(text)?;
            let kept = match a.mode {
                NmsMode::Nms => nms(&dets, a.threshold)?,
                NmsMode::Pnms => pnms(&dets, a.threshold)?,
            };
            write_detections(&to_output_polygons(kept, format)?, format)
        },
    )?;
    Ok(0)
}

fn cmd_eval(a: &EvalArgs) -> Result<i32> {
    if !(a.iou > 0.0 && a.iou < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "--iou {} outside (0, 1)",
            a.iou
        )));
    }
    let gt_format = Format::from(a.gt_format);
    let mut ids: Vec<String> = Vec::new();
    let mut gt_files = std::collections::BTreeMap::new();
    for p in list_inputs(&a.gt)? {
        gt_files.insert(image_id(&p), p);
    }
    let mut det_files = std::collections::BTreeMap::new();
    for p in list_inputs(&a.det)? {
        det_files.insert(image_id(&p), p);
    }
    ids.extend(gt_files.keys().cloned());
    ids.extend(
        det_files
            .keys()
            .filter(|k| !gt_files.contains_key(*k))
            .cloned(),
    );
    ids.sort();

    let stats: Vec<ImageStats> = ids
        .par_iter()
        .map(|id| -> Result<ImageStats> {
            let gts: Vec<GroundTruth> = match gt_files.get(id) {
                Some(p) => with_path(p, read_annotations(&read_text(p)?, gt_format))?
                    .into_iter()
                    .map(|r: AnnotationRecord| GroundTruth {
                        polygon: r.polygon,
                        dont_care: r.dont_care,
                    })
                    .collect(),
                None => Vec::new(),
            };
            let dets = match det_files.get(id) {
                Some(p) => with_path(p, read_detections(&read_text(p)?))?,
                None => Vec::new(),
            };
            match_image(&dets, &gts, a.iou)
        })
        .collect::<Result<_>>()?;
    let report = aggregate(&stats);
    print!("{}", report.to_text());
    if let Some(path) = &a.report {
        with_path(
            path,
            fs::write(path, report.to_json() + "\n").map_err(Error::from),
        )?;
    }
    Ok(0)
}

fn cmd_synth(a: &SynthArgs) -> Result<i32> {
    let text = read_text(&a.spec)?;
    let templates: Vec<&str> = content_lines(&text).map(|(_, l)| l).collect();
    if templates.is_empty() {
        return Err(Error::InvalidSpec(format!(
            "{}: no shape templates",
            a.spec.display()
        )));
    }
    let format = Format::from(a.format);
    let width = a.count.saturating_sub(1).to_string().len().max(4);
    let shapes: Vec<(ShapeSpec, String)> = (0..a.count)
        .into_par_iter()
        .map(|i| -> Result<(ShapeSpec, String)> {
            let spec = ShapeSpec::parse_with_seed(
                templates[i % templates.len()],
                a.seed.wrapping_add(i as u64),
            )?;
            let mut polygon = generate(&spec)?;
            if format == Format::Ctw1500 {
                polygon = resample_to_ctw(&polygon)?;
            }
            let rec = AnnotationRecord {
                polygon,
                dont_care: false,
                transcription: None,
            };
            let line = format_annotation(&rec, format)
                .map_err(|e| Error::InvalidSpec(format!("shape {i}: {e}")))?;
            Ok((spec, line))
        })
        .collect::<Result<_>>()?;
    fs::create_dir_all(&a.out)?;
    let mut manifest = String::new();
    for (i, (spec, line)) in shapes.iter().enumerate() {
        fs::write(
            a.out.join(format!("gt_{i:0width$}.txt")),
            format!("{line}\n"),
        )?;
        manifest.push_str(&format!("{spec}\n"));
    }
    fs::write(a.out.join("manifest.spec"), manifest)?;
    eprintln!("generated {} shapes", a.count);
    Ok(0)
}

fn cmd_loss_check(a: &LossCheckArgs) -> Result<i32> {
    let report = gradient_check(&LossConfig::default(), a.samples, a.seed)?;
    println!(
        "checked: {}\nskipped: {}\nmax_abs_error: {:e}\ntolerance: {:e}\nresult: {}",
        report.checked,
        report.skipped,
        report.max_abs_error,
        report.tolerance,
        if report.passed() { "pass" } else { "fail" }
    );
    Ok(if report.passed() { 0 } else { 1 })
}
