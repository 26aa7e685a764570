use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use firepx::cli::{self, EXIT_FIRE, EXIT_IO, EXIT_OK, EXIT_USAGE};
use firepx::color::{ImageBuffer, PixelRgb};
use firepx::fixtures::{self, blob_fixture};
use firepx::io::{load_image, load_mask, write_rgb_png};
use firepx::rules::RuleMask;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("firepx").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_png(dir: &Path, name: &str, img: &ImageBuffer<PixelRgb>) -> PathBuf {
    let p = dir.join(name);
    write_rgb_png(img, &p).unwrap();
    p
}

fn black(dir: &Path) -> PathBuf {
    write_png(
        dir,
        "black.png",
        &ImageBuffer::filled(16, 16, PixelRgb::new(0, 0, 0)).unwrap(),
    )
}

fn fixture_dir() -> (TempDir, PathBuf, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let c = fixtures::generate(dir.path().join("fx")).unwrap();
    (dir, c.fire_manifest, c.nofire_manifest)
}

fn parse_kv(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn detect_reports_counts_and_verdicts_in_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let blk = black(dir.path());
    let blob = write_png(dir.path(), "blob.png", &blob_fixture(100));
    let r = run(&["detect", s(&blob), s(&blk)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(
        lines,
        [
            format!("{} 100 FIRE", blob.display()),
            format!("{} 0 NOFIRE", blk.display())
        ]
    );
}

#[test]
fn detect_continues_past_unreadable_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let blk = black(dir.path());
    let missing = dir.path().join("missing.png");
    let text = dir.path().join("notes.png");
    fs::write(&text, "not an image").unwrap();

    let r = run(&["detect", s(&missing), s(&blk), s(&text)]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.trim(), format!("{} 0 NOFIRE", blk.display()));
    assert!(
        r.err.contains(&format!("{} ERROR", missing.display())),
        "{}",
        r.err
    );
    assert!(
        r.err.contains(&format!("{} ERROR", text.display())),
        "{}",
        r.err
    );

    let r = run(&["detect", s(&missing)]);
    assert_eq!(r.code, EXIT_IO);
}

#[test]
fn detect_json_matches_text() {
    let dir = tempfile::tempdir().unwrap();
    let blk = black(dir.path());
    let blob = write_png(dir.path(), "blob.png", &blob_fixture(9));
    let text = run(&["detect", s(&blk), s(&blob)]);
    let json = run(&["detect", s(&blk), s(&blob), "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&json.out).unwrap();
    let rendered: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{} {} {}",
                r["path"].as_str().unwrap(),
                r["fire_pixel_count"],
                r["verdict"].as_str().unwrap()
            )
        })
        .collect();
    assert_eq!(rendered, text.out.lines().collect::<Vec<_>>());
}

#[test]
fn detect_from_dir_and_manifest() {
    let (_dir, fire, nofire) = fixture_dir();
    let r = run(&["detect", "--manifest", s(&fire)]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.lines().count(), fixtures::FIRE_SCENES);
    assert!(r.out.lines().all(|l| l.ends_with(" FIRE")));

    let r = run(&[
        "detect",
        "--dir",
        s(&nofire.parent().unwrap().join("nofire")),
    ]);
    assert_eq!(r.out.lines().count(), fixtures::DISTRACTOR_SCENES);
    assert!(r.out.lines().all(|l| l.ends_with(" 0 NOFIRE")), "{}", r.out);
}

#[test]
fn flags_and_config_file_change_the_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let blob = write_png(dir.path(), "blob.png", &blob_fixture(10));
    assert!(run(&["detect", s(&blob), "--min-fire-pixels", "11"])
        .out
        .ends_with(" 10 NOFIRE\n"));

    let cfg = dir.path().join("firepx.conf");
    fs::write(&cfg, "# stricter\nmin_fire_pixels=50\n").unwrap();
    assert!(run(&["detect", s(&blob), "--config", s(&cfg)])
        .out
        .ends_with(" 10 NOFIRE\n"));
    let r = run(&[
        "detect",
        s(&blob),
        "--config",
        s(&cfg),
        "--min-fire-pixels",
        "5",
    ]);
    assert!(r.out.ends_with(" 10 FIRE\n"), "{}", r.out);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let blk = black(dir.path());
    for args in [
        vec!["detect", s(&blk), "--th", "300"],
        vec!["detect", s(&blk), "--rules", "1,9"],
        vec!["detect", s(&blk), "--min-fire-pixels", "0"],
        vec!["detect", s(&blk), "--bogus"],
        vec!["detect"],
        vec!["calibrate", "x.manifest", "--range", "50-10"],
        vec![],
    ] {
        let r = run(&args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.err);
    }
}

#[test]
fn segment_writes_masks_and_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let blob = write_png(dir.path(), "blob.png", &blob_fixture(40));
    let out = dir.path().join("seg");
    let r = run(&["segment", s(&blob), "--per-rule", "--out", s(&out)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.starts_with(&format!("{} 40 FIRE", blob.display())));

    let mask = load_mask(out.join("blob.mask.png"), (32, 32)).unwrap();
    assert_eq!(mask.count(), 40);
    let mut acc = RuleMask::full(32, 32);
    for n in 1..=7 {
        let m = load_mask(out.join(format!("blob.rule{n}.mask.png")), (32, 32)).unwrap();
        acc = acc.and(&m).unwrap();
    }
    assert_eq!(acc, mask);

    let input = load_image(&blob).unwrap();
    let overlay = load_image(out.join("blob.overlay.png")).unwrap();
    for y in 0..32 {
        for x in 0..32 {
            let want = if mask.get(x, y) {
                PixelRgb::new(0, 255, 0)
            } else {
                *input.get(x, y)
            };
            assert_eq!(*overlay.get(x, y), want, "({x}, {y})");
        }
    }
}

#[test]
fn segment_without_fire_leaves_overlay_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let blk = black(dir.path());
    let out = dir.path().join("seg");
    assert_eq!(run(&["segment", s(&blk), "--out", s(&out)]).code, EXIT_OK);
    assert_eq!(
        load_image(out.join("black.overlay.png")).unwrap(),
        load_image(&blk).unwrap()
    );
    assert!(!out.join("black.rule1.mask.png").exists());
}

#[test]
fn calibrate_writes_curve_and_picks_threshold() {
    let (dir, fire, nofire) = fixture_dir();
    let out = dir.path().join("cal");
    let r = run(&["calibrate", s(&fire), s(&nofire), "--out", s(&out)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let kv = parse_kv(&r.out);
    assert_eq!(kv["status"], "OK");

    let tsv = fs::read_to_string(out.join(cli::ROC_TSV)).unwrap();
    let mut lines = tsv.lines();
    assert_eq!(lines.next(), Some("th\ttpr\tfpr"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split('\t').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    let best = rows
        .iter()
        .filter(|r| r[1] >= 0.95 && r[2] < 0.30)
        .map(|r| r[0])
        .fold(f64::NAN, f64::max);
    assert_eq!(kv["th"].parse::<f64>().unwrap(), best);

    let doc: Value =
        serde_json::from_str(&fs::read_to_string(out.join(cli::ROC_JSON)).unwrap()).unwrap();
    assert_eq!(doc["choice"]["th"].as_f64(), Some(best));
    assert_eq!(doc["points"].as_array().unwrap().len(), 100);
}

#[test]
fn calibrate_warns_when_targets_are_unreachable() {
    let (dir, fire, nofire) = fixture_dir();
    let out = dir.path().join("cal");
    let r = run(&[
        "calibrate",
        s(&fire),
        s(&nofire),
        "--out",
        s(&out),
        "--range",
        "10-60",
        "--fpr-max",
        "0.1",
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(parse_kv(&r.out)["status"], "WARN");
    assert!(r.err.contains("WARN"), "{}", r.err);
}

#[test]
fn calibrate_needs_both_classes() {
    let (dir, fire, _) = fixture_dir();
    let r = run(&["calibrate", s(&fire), "--out", s(&dir.path().join("cal"))]);
    assert_eq!(r.code, EXIT_IO);
    assert!(r.err.contains("no-fire"), "{}", r.err);
}

#[test]
fn evaluate_text_and_json_reports_agree() {
    let (dir, fire, nofire) = fixture_dir();
    let text_dir = dir.path().join("t");
    let json_dir = dir.path().join("j");
    let t = run(&["evaluate", s(&fire), s(&nofire), "--out", s(&text_dir)]);
    let j = run(&[
        "evaluate",
        s(&fire),
        s(&nofire),
        "--out",
        s(&json_dir),
        "--format",
        "json",
    ]);
    assert_eq!(t.code, EXIT_OK, "{}", t.err);
    assert_eq!(j.code, EXIT_OK, "{}", j.err);
    assert!(t.out.contains("kappa 1.00 (good)"), "{}", t.out);

    let kv = parse_kv(&fs::read_to_string(text_dir.join(cli::REPORT_TEXT)).unwrap());
    let doc: Value =
        serde_json::from_str(&fs::read_to_string(json_dir.join(cli::REPORT_JSON)).unwrap())
            .unwrap();
    let obj = doc.as_object().unwrap();
    assert_eq!(kv.len(), obj.len());
    for (k, v) in obj {
        let text = &kv[k];
        match v {
            Value::Null => assert_eq!(text, "undefined", "{k}"),
            Value::String(s) => assert_eq!(text, s, "{k}"),
            Value::Number(n) => {
                assert_eq!(text.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{k}")
            }
            other => panic!("{k}: unexpected {other}"),
        }
    }
    assert_eq!(kv["kappa"], "1");
    assert_eq!(kv["matrix.a"], fixtures::FIRE_SCENES.to_string());
    assert_eq!(kv["matrix.d"], fixtures::DISTRACTOR_SCENES.to_string());
    assert_eq!(kv["extra.pixel_iou_mean"], "1");
}

#[test]
fn evaluate_with_strict_threshold_misses_fire() {
    let (dir, fire, nofire) = fixture_dir();
    let out = dir.path().join("e");
    let r = run(&[
        "evaluate",
        s(&fire),
        s(&nofire),
        "--out",
        s(&out),
        "--th",
        "200",
    ]);
    assert_eq!(r.code, EXIT_OK);
    let kv = parse_kv(&fs::read_to_string(out.join(cli::REPORT_TEXT)).unwrap());
    assert_eq!(kv["matrix.a"], "0");
    assert_eq!(kv["matrix.r1"], "0");
    assert_eq!(kv["fire.user_accuracy_pct"], "undefined");
    assert_eq!(kv["kappa"], "0");
}

#[test]
fn make_fixtures_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["make-fixtures", "--out", s(&a)]).code, EXIT_OK);
    assert_eq!(run(&["make-fixtures", "--out", s(&b)]).code, EXIT_OK);
    let list = |root: &Path| -> Vec<PathBuf> {
        let mut v = Vec::new();
        for sub in ["", "fire", "nofire"] {
            for e in fs::read_dir(root.join(sub)).unwrap() {
                let p = e.unwrap().path();
                if p.is_file() {
                    v.push(p.strip_prefix(root).unwrap().to_path_buf());
                }
            }
        }
        v.sort();
        v
    };
    let files = list(&a);
    assert_eq!(files, list(&b));
    assert_eq!(
        files.len(),
        fixtures::FIRE_SCENES * 2 + fixtures::DISTRACTOR_SCENES + 2
    );
    for f in &files {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{}",
            f.display()
        );
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_firepx"))
}

#[test]
fn process_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let blob = write_png(dir.path(), "blob.png", &blob_fixture(20));
    let blk = black(dir.path());
    let status = |args: &[&str]| binary().args(args).output().unwrap().status.code();

    assert_eq!(status(&["detect", s(&blk), s(&blob)]), Some(EXIT_OK));
    assert_eq!(
        status(&["detect", s(&blk), "--fail-on-fire"]),
        Some(EXIT_OK)
    );
    assert_eq!(
        status(&["detect", s(&blk), s(&blob), "--fail-on-fire"]),
        Some(EXIT_FIRE)
    );
    assert_eq!(
        status(&["detect", s(&dir.path().join("nope.png"))]),
        Some(EXIT_IO)
    );
    assert_eq!(status(&["detect", s(&blk), "--th", "-1"]), Some(EXIT_USAGE));
    assert_eq!(status(&["--help"]), Some(EXIT_OK));
}

#[test]
fn thread_count_does_not_change_output() {
    let (dir, fire, nofire) = fixture_dir();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("cal{threads}"));
        let o = binary()
            .env(cli::THREADS_ENV, threads)
            .args([
                "calibrate",
                s(&fire),
                s(&nofire),
                "--out",
                s(&out),
                "--format",
                "json",
            ])
            .output()
            .unwrap();
        assert!(o.status.success());
        outputs.push((o.stdout, fs::read(out.join(cli::ROC_TSV)).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}
