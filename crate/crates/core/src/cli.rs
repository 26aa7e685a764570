//! The `firepx` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O, decode or
//! input-data failure, 3 fire detected (only with `--fail-on-fire`).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::calibrate::{self, pick_threshold, sweep_roc, RocCurve, ThresholdChoice};
use crate::error::{Error, Result};
use crate::evaluate::{evaluate_corpus, kappa_quality, CorpusEvaluation, EvalReport};
use crate::fixtures;
use crate::io::{
    self, load_image, load_manifest, load_manifest_corpus, render_overlay, write_mask,
    write_rgb_png, Label,
};
use crate::rules::{segment, ClassifierConfig, Detection, RuleSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_FIRE: i32 = 3;

pub const THREADS_ENV: &str = "FIREPX_THREADS";
pub const ROC_TSV: &str = "roc.tsv";
pub const ROC_JSON: &str = "roc.json";
pub const REPORT_TEXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";

#[derive(Debug, Parser)]
#[command(name = "firepx", version, about = "Rule-based fire pixel segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a FIRE/NOFIRE verdict per image
    Detect(DetectArgs),
    /// Write the fire mask and green overlay for one image
    Segment(SegmentArgs),
    /// Sweep the chroma-gap threshold and pick an operating point
    Calibrate(CalibrateArgs),
    /// Build the error matrix and accuracy report over labeled manifests
    Evaluate(EvaluateArgs),
    /// Generate the synthetic fixture corpus and its manifests
    MakeFixtures(FixtureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args, Default)]
struct ClassifierArgs {
    /// Flat key=value file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chroma gap threshold |Cb - Cr| >= th
    #[arg(long)]
    th: Option<f64>,
    /// Red lower bound (strict)
    #[arg(long)]
    r_min: Option<u8>,
    /// Green lower bound (strict)
    #[arg(long)]
    g_min: Option<u8>,
    /// Blue upper bound (strict)
    #[arg(long)]
    b_max: Option<u8>,
    /// Cb upper bound (inclusive)
    #[arg(long)]
    cb_max: Option<f64>,
    /// Cr lower bound (inclusive)
    #[arg(long)]
    cr_min: Option<f64>,
    /// Fire pixels needed to call an image fire
    #[arg(long)]
    min_fire_pixels: Option<usize>,
    /// Comma-separated rule numbers to enable, e.g. 1,2,6
    #[arg(long)]
    rules: Option<String>,
}

impl ClassifierArgs {
    /// Defaults, then the config file, then flags.
    fn resolve(&self) -> Result<ClassifierConfig> {
        let mut cfg = ClassifierConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!("{}:{}: expected key=value", path.display(), i + 1))
                })?;
                cfg.set(k, v)?;
            }
        }
        if let Some(v) = self.th {
            cfg.rule6_th = v;
        }
        if let Some(v) = self.r_min {
            cfg.rule2_r_min = v;
        }
        if let Some(v) = self.g_min {
            cfg.rule2_g_min = v;
        }
        if let Some(v) = self.b_max {
            cfg.rule2_b_max = v;
        }
        if let Some(v) = self.cb_max {
            cfg.rule7_cb_max = v;
        }
        if let Some(v) = self.cr_min {
            cfg.rule7_cr_min = v;
        }
        if let Some(v) = self.min_fire_pixels {
            cfg.min_fire_pixels = v;
        }
        if let Some(v) = &self.rules {
            cfg.enabled_rules = v.parse::<RuleSet>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Image files
    images: Vec<PathBuf>,
    /// Every PNG/JPEG in a directory
    #[arg(long, conflicts_with_all = ["images", "manifest"])]
    dir: Option<PathBuf>,
    /// Images listed in a manifest
    #[arg(long, conflicts_with = "images")]
    manifest: Option<PathBuf>,
    /// Exit with status 3 if any image is FIRE
    #[arg(long)]
    fail_on_fire: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    image: PathBuf,
    /// Also write one mask per rule
    #[arg(long)]
    per_rule: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Labeled manifests (fire and no-fire entries)
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    /// Inclusive integer threshold range, e.g. 1-100
    #[arg(long, default_value = "1-100", value_parser = parse_range)]
    range: RangeInclusive<u32>,
    #[arg(long, default_value_t = calibrate::DEFAULT_TPR_MIN)]
    tpr_min: f64,
    #[arg(long, default_value_t = calibrate::DEFAULT_FPR_MAX)]
    fpr_max: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Labeled manifests (fire and no-fire entries)
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, default_value = "fixtures")]
    out: PathBuf,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once('-')
        .or_else(|| s.split_once("..="))
        .ok_or_else(|| format!("expected LO-HI, got '{s}'"))?;
    let lo: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi || hi > 255 {
        return Err(format!(
            "range {lo}-{hi} must be ascending and within 0-255"
        ));
    }
    Ok(lo..=hi)
}

struct Io<'a> {
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

/// Runs the command line with explicit output streams and returns the exit
/// status. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut io)),
            Err(e) => Err(Error::Config(format!("{THREADS_ENV}: {e}"))),
        },
        None => dispatch(cli.command, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Result<i32> {
    match cmd {
        Command::Detect(a) => cmd_detect(a, io),
        Command::Segment(a) => cmd_segment(a, io),
        Command::Calibrate(a) => cmd_calibrate(a, io),
        Command::Evaluate(a) => cmd_evaluate(a, io),
        Command::MakeFixtures(a) => cmd_make_fixtures(a, io),
    }
}

fn write_out(io: &mut Io<'_>, text: &str) -> Result<()> {
    io.out
        .write_all(text.as_bytes())
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

fn verdict(d: &Detection) -> &'static str {
    if d.is_fire_image {
        "FIRE"
    } else {
        "NOFIRE"
    }
}

fn list_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.into(),
        source,
    })?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_detect(a: DetectArgs, io: &mut Io<'_>) -> Result<i32> {
    let cfg = a.classifier.resolve()?;
    let paths = match (&a.dir, &a.manifest) {
        (Some(dir), _) => list_dir(dir)?,
        (None, Some(m)) => {
            let manifest = load_manifest(m)?;
            manifest
                .entries
                .iter()
                .map(|e| manifest.resolve(&e.path))
                .collect()
        }
        (None, None) => a.images.clone(),
    };
    if paths.is_empty() {
        return Err(Error::Config("no input images".into()));
    }

    let results: Vec<Result<Detection>> = paths
        .par_iter()
        .map(|p| load_image(p).and_then(|img| segment(&img, &cfg, false)))
        .collect();

    let mut any_fire = false;
    let mut failed = 0;
    let mut json_rows = Vec::new();
    let mut text = String::new();
    for (path, r) in paths.iter().zip(results) {
        match r {
            Ok(d) => {
                any_fire |= d.is_fire_image;
                let _ = writeln!(
                    text,
                    "{} {} {}",
                    path.display(),
                    d.fire_pixel_count,
                    verdict(&d)
                );
                json_rows.push(json!({
                    "path": path.display().to_string(),
                    "fire_pixel_count": d.fire_pixel_count,
                    "verdict": verdict(&d),
                }));
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(io.err, "{} ERROR {e}", path.display());
            }
        }
    }
    match a.format {
        Format::Text => write_out(io, &text)?,
        Format::Json => write_out(io, &format!("{}\n", Value::Array(json_rows)))?,
    }
    Ok(if failed == paths.len() {
        EXIT_IO
    } else if a.fail_on_fire && any_fire {
        EXIT_FIRE
    } else {
        EXIT_OK
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn cmd_segment(a: SegmentArgs, io: &mut Io<'_>) -> Result<i32> {
    let cfg = a.classifier.resolve()?;
    let img = load_image(&a.image)?;
    let det = segment(&img, &cfg, a.per_rule)?;
    ensure_dir(&a.out)?;
    let stem = file_stem(&a.image);

    let mask_path = a.out.join(format!("{stem}.mask.png"));
    let overlay_path = a.out.join(format!("{stem}.overlay.png"));
    write_mask(&det.fire_mask, &mask_path)?;
    write_rgb_png(&render_overlay(&img, &det.fire_mask)?, &overlay_path)?;
    let mut written = vec![mask_path, overlay_path];
    if let Some(per_rule) = &det.per_rule_masks {
        for (rule, mask) in per_rule {
            let p = a.out.join(format!("{stem}.{rule}.mask.png"));
            write_mask(mask, &p)?;
            written.push(p);
        }
    }

    let mut text = format!(
        "{} {} {}\n",
        a.image.display(),
        det.fire_pixel_count,
        verdict(&det)
    );
    for p in &written {
        let _ = writeln!(text, "wrote {}", p.display());
    }
    write_out(io, &text)?;
    Ok(EXIT_OK)
}

fn load_manifests(paths: &[PathBuf], io: &mut Io<'_>) -> Result<io::Corpus> {
    let corpus = load_manifest_corpus(paths)?;
    for (path, e) in &corpus.failures {
        let _ = writeln!(io.err, "{} ERROR {e} (excluded)", path.display());
    }
    Ok(corpus)
}

fn choice_json(c: &ThresholdChoice) -> Value {
    json!({
        "th": c.th,
        "tpr": c.point.tpr,
        "fpr": c.point.fpr,
        "meets_targets": c.meets_targets,
    })
}

fn cmd_calibrate(a: CalibrateArgs, io: &mut Io<'_>) -> Result<i32> {
    let cfg = a.classifier.resolve()?;
    let corpus = load_manifests(&a.manifests, io)?;
    let fire = corpus.images(Label::Fire);
    let nofire = corpus.images(Label::NoFire);
    let curve: RocCurve = sweep_roc(&fire, &nofire, &cfg, a.range.clone())?;
    let choice = pick_threshold(&curve, a.tpr_min, a.fpr_max)?;

    ensure_dir(&a.out)?;
    write_file(&a.out.join(ROC_TSV), &curve.to_tsv())?;
    let status = if choice.meets_targets { "OK" } else { "WARN" };
    let doc = json!({
        "th_range": [a.range.start(), a.range.end()],
        "tpr_min": a.tpr_min,
        "fpr_max": a.fpr_max,
        "fire_images": fire.len(),
        "nofire_images": nofire.len(),
        "excluded_images": corpus.failures.len(),
        "points": curve.points(),
        "choice": choice_json(&choice),
        "status": status,
    });
    write_file(&a.out.join(ROC_JSON), &format!("{doc:#}\n"))?;

    if !choice.meets_targets {
        let _ = writeln!(
            io.err,
            "WARN: no threshold reaches tpr >= {} with fpr < {}; using max(tpr - fpr)",
            a.tpr_min, a.fpr_max
        );
    }
    let summary = match a.format {
        Format::Text => format!(
            "th={}\ntpr={}\nfpr={}\nstatus={status}\nfire_images={}\nnofire_images={}\nexcluded_images={}\n",
            choice.th,
            choice.point.tpr,
            choice.point.fpr,
            fire.len(),
            nofire.len(),
            corpus.failures.len()
        ),
        Format::Json => format!("{doc}\n"),
    };
    write_out(io, &summary)?;
    Ok(EXIT_OK)
}

/// One report field; `None` numbers are undefined statistics.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Count(u64),
    Number(Option<f64>),
    Text(String),
}

impl FieldValue {
    fn text(&self) -> String {
        match self {
            FieldValue::Count(n) => n.to_string(),
            FieldValue::Number(Some(v)) => v.to_string(),
            FieldValue::Number(None) => "undefined".into(),
            FieldValue::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            FieldValue::Count(n) => json!(n),
            FieldValue::Number(v) => json!(v),
            FieldValue::Text(s) => json!(s),
        }
    }
}

/// Ordered report fields shared by the text and JSON renderings. Percentages
/// are full precision; `extra.*` fields are outside the image-level method.
pub fn report_fields(
    r: &EvalReport,
    excluded: usize,
    pixel_iou: Option<f64>,
) -> Vec<(String, FieldValue)> {
    use FieldValue::*;
    let m = &r.matrix;
    let mut f: Vec<(String, FieldValue)> = vec![
        ("matrix.a".into(), Count(m.a)),
        ("matrix.b".into(), Count(m.b)),
        ("matrix.c".into(), Count(m.c)),
        ("matrix.d".into(), Count(m.d)),
        ("matrix.r1".into(), Count(m.r1())),
        ("matrix.r2".into(), Count(m.r2())),
        ("matrix.c1".into(), Count(m.c1())),
        ("matrix.c2".into(), Count(m.c2())),
        ("matrix.total".into(), Count(m.total())),
    ];
    for (class, s) in [("fire", &r.fire), ("nofire", &r.nofire)] {
        f.push((
            format!("{class}.omission_error_pct"),
            Number(s.omission_error),
        ));
        f.push((
            format!("{class}.commission_error_pct"),
            Number(s.commission_error),
        ));
        f.push((
            format!("{class}.user_accuracy_pct"),
            Number(s.user_accuracy),
        ));
        f.push((
            format!("{class}.producer_accuracy_pct"),
            Number(s.producer_accuracy),
        ));
    }
    f.push(("overall_accuracy_pct".into(), Number(r.overall_accuracy)));
    f.push(("kappa".into(), Number(r.kappa)));
    let grade = r.kappa.map_or("undefined", |k| kappa_quality(k).as_str());
    f.push(("kappa_quality".into(), Text(grade.into())));
    f.push(("excluded_images".into(), Count(excluded as u64)));
    f.push(("extra.pixel_iou_mean".into(), Number(pixel_iou)));
    f
}

pub fn render_text(fields: &[(String, FieldValue)]) -> String {
    fields
        .iter()
        .map(|(k, v)| format!("{k}={}\n", v.text()))
        .collect()
}

pub fn render_json(fields: &[(String, FieldValue)]) -> String {
    let map: Map<String, Value> = fields.iter().map(|(k, v)| (k.clone(), v.json())).collect();
    format!("{:#}\n", Value::Object(map))
}

fn pct2(v: Option<f64>) -> String {
    v.map_or_else(|| "undef".into(), |v| format!("{v:.2}"))
}

/// Human-readable summary with two-decimal percentages.
pub fn render_summary(r: &EvalReport) -> String {
    let m = &r.matrix;
    let mut s = String::new();
    let _ = writeln!(s, "error matrix (rows: classified, columns: actual)");
    let _ = writeln!(s, "{:<10}{:>8}{:>8}{:>8}", "", "fire", "nofire", "total");
    let _ = writeln!(s, "{:<10}{:>8}{:>8}{:>8}", "fire", m.a, m.b, m.r1());
    let _ = writeln!(s, "{:<10}{:>8}{:>8}{:>8}", "nofire", m.c, m.d, m.r2());
    let _ = writeln!(
        s,
        "{:<10}{:>8}{:>8}{:>8}",
        "total",
        m.c1(),
        m.c2(),
        m.total()
    );
    let _ = writeln!(
        s,
        "{:<10}{:>10}{:>12}{:>8}{:>8}",
        "class", "omission%", "commission%", "UA%", "PA%"
    );
    for (name, c) in [("fire", &r.fire), ("nofire", &r.nofire)] {
        let _ = writeln!(
            s,
            "{:<10}{:>10}{:>12}{:>8}{:>8}",
            name,
            pct2(c.omission_error),
            pct2(c.commission_error),
            pct2(c.user_accuracy),
            pct2(c.producer_accuracy)
        );
    }
    let grade = r.kappa.map_or("undefined", |k| kappa_quality(k).as_str());
    let kappa = r
        .kappa
        .map_or_else(|| "undefined".into(), |k| format!("{k:.2}"));
    let _ = writeln!(
        s,
        "overall accuracy {}%  kappa {kappa} ({grade})",
        pct2(r.overall_accuracy)
    );
    s
}

fn cmd_evaluate(a: EvaluateArgs, io: &mut Io<'_>) -> Result<i32> {
    let cfg = a.classifier.resolve()?;
    let corpus = load_manifests(&a.manifests, io)?;
    let CorpusEvaluation {
        report, pixel_iou, ..
    } = evaluate_corpus(&corpus, &cfg)?;

    let fields = report_fields(&report, corpus.failures.len(), pixel_iou);
    ensure_dir(&a.out)?;
    let (name, body) = match a.format {
        Format::Text => (REPORT_TEXT, render_text(&fields)),
        Format::Json => (REPORT_JSON, render_json(&fields)),
    };
    let path = a.out.join(name);
    write_file(&path, &body)?;
    write_out(
        io,
        &format!("{}report: {}\n", render_summary(&report), path.display()),
    )?;
    Ok(EXIT_OK)
}

fn cmd_make_fixtures(a: FixtureArgs, io: &mut Io<'_>) -> Result<i32> {
    let corpus = fixtures::generate(&a.out)?;
    write_out(
        io,
        &format!(
            "wrote {} files\nfire manifest: {}\nnofire manifest: {}\n",
            corpus.files.len(),
            corpus.fire_manifest.display(),
            corpus.nofire_manifest.display()
        ),
    )?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::{derive_report, ErrorMatrix};

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("1-100").unwrap(), 1..=100);
        assert_eq!(parse_range("5..=9").unwrap(), 5..=9);
        assert!(parse_range("9-5").is_err());
        assert!(parse_range("1-300").is_err());
        assert!(parse_range("abc").is_err());
    }

    #[test]
    fn text_and_json_reports_agree() {
        let r = derive_report(&ErrorMatrix::new(198, 28, 2, 172)).unwrap();
        let fields = report_fields(&r, 0, None);
        let text = render_text(&fields);
        let json: Map<String, Value> = serde_json::from_str(&render_json(&fields)).unwrap();
        assert_eq!(json.len(), fields.len());
        for line in text.lines() {
            let (k, v) = line.split_once('=').unwrap();
            let j = &json[k];
            match j {
                Value::Null => assert_eq!(v, "undefined"),
                Value::String(s) => assert_eq!(v, s),
                Value::Number(n) => {
                    assert_eq!(v.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{k}")
                }
                other => panic!("{other:?}"),
            }
        }
        assert!(text.contains("kappa_quality=good\n"));
        assert!(text.contains("extra.pixel_iou_mean=undefined\n"));
    }

    #[test]
    fn summary_rounds_to_two_decimals() {
        let r = derive_report(&ErrorMatrix::new(198, 28, 2, 172)).unwrap();
        let s = render_summary(&r);
        assert!(s.contains("12.39"), "{s}");
        assert!(
            s.contains("overall accuracy 92.50%  kappa 0.85 (good)"),
            "{s}"
        );
    }

    #[test]
    fn config_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "# tuned\nth = 55\nmin_fire_pixels=4\nrules=1,2,6\n").unwrap();
        let args = ClassifierArgs {
            config: Some(path),
            th: Some(60.0),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.rule6_th, 60.0);
        assert_eq!(cfg.min_fire_pixels, 4);
        assert_eq!(cfg.enabled_rules.to_string(), "1,2,6");
        assert_eq!(cfg.rule2_r_min, 190);
    }
}
