use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eventaug::{parse_binary_stream, parse_text_stream, read_frame_tensor, PolarityEncoding};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eventaug"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn augment_matches_golden_files() {
    let out = tempfile::tempdir().unwrap();
    let status = run(&[
        "augment",
        "--input",
        path_str(&fixture("dataset")),
        "--output",
        path_str(out.path()),
        "--config",
        path_str(&fixture("golden.cfg")),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    assert_eq!(tree(out.path()), tree(&golden));
}

#[test]
fn augment_without_input_is_usage_error() {
    let o = run(&["augment", "--output", "x", "--config", "y"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--input"));
}

#[test]
fn augment_unknown_flag_and_bad_config() {
    assert_eq!(run(&["augment", "--bogus"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "ssem.r = 2\nssem.enabled = true\n").unwrap();
    let o = run(&[
        "augment",
        "--input",
        path_str(&fixture("dataset")),
        "--output",
        path_str(&dir.path().join("out")),
        "--config",
        path_str(&cfg),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_flag_overrides_config() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "augment",
        "--input",
        path_str(&fixture("dataset")),
        "--output",
        path_str(out.path()),
        "--config",
        path_str(&fixture("golden.cfg")),
        "--seed",
        "99",
    ]);
    assert!(o.status.success());
    let manifest = fs::read_to_string(out.path().join("manifest.jsonl")).unwrap();
    let header: serde_json::Value = serde_json::from_str(manifest.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed_override"], 99);
    assert_eq!(header["config"]["seed"], 99);
}

#[test]
fn partial_failures_exit_zero() {
    let input = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    fs::copy(fixture("dataset/session_b/wave_01.evt"), input.path().join("ok.evt")).unwrap();
    fs::write(input.path().join("bad.evt"), "# 2 2\n1 0 0 0\n").unwrap();
    let o = run(&[
        "augment",
        "--input",
        path_str(input.path()),
        "--output",
        path_str(out.path()),
        "--config",
        path_str(&fixture("golden.cfg")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let manifest = fs::read_to_string(out.path().join("manifest.jsonl")).unwrap();
    assert!(manifest.contains("invalid polarity at line 2"));
}

#[test]
fn integrate_ten_events_two_slices() {
    let out = tempfile::tempdir().unwrap();
    let frames = out.path().join("f.evfr");
    let o = run(&[
        "integrate",
        "--input",
        path_str(&fixture("ten_events.evt")),
        "--output",
        path_str(&frames),
        "--slices",
        "2",
    ]);
    assert!(o.status.success());
    let f = read_frame_tensor(&fs::read(&frames).unwrap()).unwrap();
    assert_eq!(f.num_slices(), 2);
    assert_eq!((f.slice_sum(0), f.slice_sum(1)), (5, 5));
}

#[test]
fn integrate_error_codes() {
    let out = tempfile::tempdir().unwrap();
    let frames = out.path().join("f.evfr");
    let ten = fixture("ten_events.evt");
    let o = run(&["integrate", "--input", path_str(&ten), "--output", path_str(&frames), "--slices", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["integrate", "--input", path_str(&ten), "--output", path_str(&frames), "--slices", "11"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("T exceeds event count"));
    let o = run(&["integrate", "--input", "/nonexistent.evt", "--output", path_str(&frames), "--slices", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn integrate_empty_stream() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.evt");
    fs::write(&input, "# 3 2\n").unwrap();
    let frames = dir.path().join("f.evfr");
    let o = run(&["integrate", "--input", path_str(&input), "--output", path_str(&frames), "--slices", "1"]);
    assert!(o.status.success());
    let bytes = fs::read(&frames).unwrap();
    assert_eq!(bytes.len(), 22 + 4 * 2 * 3 * 2);
    assert_eq!(read_frame_tensor(&bytes).unwrap().total(), 0);
}

#[test]
fn integrate_with_frame_mask() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("f.evfr");
    let o = run(&[
        "integrate",
        "--input",
        path_str(&fixture("four_patch.evt")),
        "--output",
        path_str(&frames),
        "--slices",
        "1",
        "--mask-rate",
        "0.5",
        "--patch-size",
        "2",
    ]);
    assert!(o.status.success());
    let f = read_frame_tensor(&fs::read(&frames).unwrap()).unwrap();
    // patch 0 (5 events) is masked, patch 3 (3 events) survives
    assert_eq!(f.total(), 3);
    assert_eq!(f.get(0, 1, 0, 0), 0);
}

#[test]
fn spatial_saliency_report() {
    let o = run(&[
        "saliency",
        "--input",
        path_str(&fixture("four_patch.evt")),
        "--mode",
        "spatial",
        "--patch-size",
        "2",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "0 0 0 5 0\n1 0 1 0 2\n2 1 0 0 3\n3 1 1 3 1\n");
}

#[test]
fn temporal_saliency_report() {
    let four = fixture("four_patch.evt");
    let o = run(&["saliency", "--input", path_str(&four), "--mode", "temporal", "--slices", "1"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "0 0 8 8 0\n");

    let o = run(&["saliency", "--input", path_str(&four), "--mode", "histogram"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["saliency", "--input", path_str(&four), "--mode", "temporal", "--slices", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convert_round_trip_through_stdio() {
    let dir = tempfile::tempdir().unwrap();
    let bin_path = dir.path().join("s.evst");
    let src = fixture("dataset/session_a/walk_01.evt");
    let o = run(&["convert", "--input", path_str(&src), "--output", path_str(&bin_path)]);
    assert!(o.status.success());
    let original = parse_text_stream(&fs::read(&src).unwrap(), PolarityEncoding::NegOneOne).unwrap();
    assert_eq!(parse_binary_stream(&fs::read(&bin_path).unwrap()).unwrap(), original);

    // binary in via stdin, text out via stdout
    let o = bin()
        .args(["convert", "--input", "-", "--output", "-", "--to", "text"])
        .stdin(fs::File::open(&bin_path).unwrap())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(parse_text_stream(&o.stdout, PolarityEncoding::NegOneOne).unwrap(), original);

    let o = run(&["convert", "--input", path_str(&src), "--output", "-"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn convert_zero_one_polarity() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("zo.txt");
    fs::write(&src, "# 2 1\n1 0 0 0\n2 1 0 1\n").unwrap();
    let dst = dir.path().join("zo.evt");
    let o = run(&[
        "convert",
        "--input",
        path_str(&src),
        "--output",
        path_str(&dst),
        "--polarity-encoding",
        "zero-one",
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&dst).unwrap(), "# 2 1\n1 0 0 -1\n2 1 0 1\n");
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["augment", "integrate", "saliency", "convert", "bench"] {
        let o = run(&[sub, "--help"]);
        assert!(o.status.success(), "{sub}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"), "{sub}");
    }
}

#[test]
fn bench_report_shape() {
    let o = run(&["bench", "--events", "20000", "--repeat", "3", "--ops", "all"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["kind"], "input");
    assert_eq!(lines.len(), 1 + 8);
    for rec in &lines[1..] {
        assert_eq!(rec["runs_s"].as_array().unwrap().len(), 3);
        assert!(rec["median_s"].is_number());
    }
    assert_eq!(run(&["bench", "--ops", "warp"]).status.code(), Some(1));
}
