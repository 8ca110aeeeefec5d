use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ils_summ::features::encode_ppm;
use ils_summ::{save_instance, FrameImage, Instance, InstanceFamily, MetricKind, Shot};
use ils_summ_cli::report::SolveReport;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ils-summ"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn instance_a(dir: &Path) -> PathBuf {
    let shots = [(2.0, 0.0), (3.0, 1.0), (2.0, 4.0), (3.0, 5.0)]
        .iter()
        .enumerate()
        .map(|(i, &(d, x))| Shot::new(format!("s{i}"), d, vec![x]))
        .collect();
    let inst = Instance::new("A", shots, 5.0, MetricKind::Euclidean).unwrap();
    let path = dir.join("A.json");
    save_instance(&inst, &path).unwrap();
    path
}

fn report(out: &Output) -> SolveReport {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_instance_a() {
    let dir = tempfile::tempdir().unwrap();
    let a = instance_a(dir.path());
    let a = a.to_str().unwrap();
    for method in ["ils", "local", "restart", "exact"] {
        let r = report(&run(&["solve", "--instance", a, "--method", method]));
        assert_eq!(r.total_distance, 2.0, "{method}");
        assert_eq!(r.selected_ids.len(), 2, "{method}");
        assert!(r.duration_used_seconds <= r.budget_seconds);
        assert_eq!(r.metric, "euclidean");
    }
    let r = report(&run(&["solve", "--instance", a, "--method", "local", "--with-optimum"]));
    assert_eq!(r.optimality_percent, Some(100.0));
}

#[test]
fn solve_reports_failures_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = instance_a(dir.path());
    let a = a.to_str().unwrap();

    let missing = run(&["solve", "--instance", "missing.x", "--method", "ils"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.x"));

    assert_eq!(run(&["solve", "--instance", a, "--method", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--method", "ils"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--instance", a, "--m-max", "0"]).status.code(), Some(2));
    assert_eq!(
        run(&["solve", "--instance", a, "--budget-seconds", "1"]).status.code(),
        Some(4)
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["solve", "--instance", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn budget_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = instance_a(dir.path());
    let a = a.to_str().unwrap();
    let roomy = report(&run(&["solve", "--instance", a, "--budget-seconds", "10"]));
    assert_eq!(roomy.total_distance, 0.0);
    assert_eq!(roomy.budget_seconds, 10.0);
    // 50% of 10 s of shots
    let half = report(&run(&["solve", "--instance", a, "--budget-ratio", "0.5"]));
    assert_eq!(half.budget_seconds, 5.0);
    let capped = report(&run(&[
        "solve", "--instance", a, "--budget-ratio", "0.9", "--budget-cap-seconds", "4",
    ]));
    assert_eq!(capped.budget_seconds, 4.0);
    let video = report(&run(&[
        "solve", "--instance", a, "--budget-ratio", "0.1", "--video-duration-seconds", "40",
    ]));
    assert_eq!(video.budget_seconds, 4.0);
    assert!(video.runtime_pct_of_video.is_some());
}

#[test]
fn csv_instance_needs_budget() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    fs::write(&path, "id,duration_seconds,f0\ns0,2,0\ns1,3,1\ns2,2,4\ns3,3,5\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["solve", "--instance", p]).status.code(), Some(2));
    let r = report(&run(&["solve", "--instance", p, "--budget-seconds", "5"]));
    assert_eq!(r.total_distance, 2.0);
    assert_eq!(r.instance, "a");
}

#[test]
fn exact_command_and_cap() {
    let dir = tempfile::tempdir().unwrap();
    let a = instance_a(dir.path());
    let r = report(&run(&["exact", "--instance", a.to_str().unwrap()]));
    assert_eq!(r.total_distance, 2.0);
    assert_eq!(r.proved_optimal, Some(true));

    let full = report(&run(&["exact", "--instance", a.to_str().unwrap(), "--budget-seconds", "10"]));
    assert_eq!(full.total_distance, 0.0);

    let shots = (0..30).map(|i| Shot::new(format!("s{i}"), 1.0, vec![i as f64])).collect();
    let big = Instance::new("big", shots, 3.0, MetricKind::Euclidean).unwrap();
    let big_path = dir.path().join("big.json");
    save_instance(&big, &big_path).unwrap();
    let refused = run(&["exact", "--instance", big_path.to_str().unwrap()]);
    assert_eq!(refused.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    let limited = report(&run(&[
        "exact", "--instance", big_path.to_str().unwrap(), "--force", "--node-limit", "50",
    ]));
    assert_eq!(limited.proved_optimal, Some(false));
}

fn write_family(dir: &Path, count: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let inst = InstanceFamily::small().sample(&mut rng, format!("inst{k}")).unwrap();
        save_instance(&inst, dir.join(format!("inst{k}.json"))).unwrap();
    }
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ils_summ_cli::report::BENCH_COLUMNS
    );
    reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn bench_three_instances() {
    let dir = tempfile::tempdir().unwrap();
    write_family(dir.path(), 3, 11);
    let out = dir.path().join("table.csv");
    let status = run(&[
        "bench",
        "--dir",
        dir.path().to_str().unwrap(),
        "--methods",
        "ils,local,exact",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 3 * 3 + 3);
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(&names[..9], &["inst0", "inst0", "inst0", "inst1", "inst1", "inst1", "inst2", "inst2", "inst2"]);
    let mean = |m: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == "mean" && r[1] == m)
            .map(|r| r[3].parse().unwrap())
            .unwrap()
    };
    assert!(mean("ils") >= mean("local"));
    assert_eq!(mean("exact"), 100.0);
}

#[test]
fn bench_empty_and_corrupt() {
    let empty = tempfile::tempdir().unwrap();
    let out = empty.path().join("t.csv");
    let res = run(&["bench", "--dir", empty.path().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("warning"));
    assert!(read_rows(&out).is_empty());

    let dir = tempfile::tempdir().unwrap();
    write_family(dir.path(), 2, 5);
    fs::write(dir.path().join("broken.json"), "{\"name\": 3").unwrap();
    let res = run(&["bench", "--dir", dir.path().to_str().unwrap(), "--methods", "ils"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("broken,error,"));
    assert!(lines[1].starts_with("inst0,ils,"));
    assert!(lines[2].starts_with("inst1,ils,"));
    assert!(lines[3].starts_with("mean,ils,"));
}

fn write_frames(dir: &Path) -> PathBuf {
    let colors = [[0u8, 0, 0], [120, 60, 30], [255, 255, 255]];
    for (i, c) in colors.iter().enumerate() {
        let frame = FrameImage::new(3, 2, vec![*c; 6]).unwrap();
        fs::write(dir.join(format!("f{i}.ppm")), encode_ppm(&frame)).unwrap();
    }
    let manifest = dir.join("video.csv");
    fs::write(&manifest, "f0.ppm,2\nf1.ppm,3\nf2.ppm,2\n").unwrap();
    manifest
}

#[test]
fn features_command() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_frames(dir.path());
    let out = dir.path().join("inst.json");
    let d = dir.path().to_str().unwrap();
    let m = manifest.to_str().unwrap();
    let o = out.to_str().unwrap();
    let res = run(&["features", "--frames-dir", d, "--manifest", m, "--budget-seconds", "5", "--out", o]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let inst = ils_summ::load_instance(&out).unwrap();
    assert_eq!((inst.len(), inst.dim()), (3, 96));

    run(&["features", "--frames-dir", d, "--manifest", m, "--budget-ratio", "0.5", "--bins", "16", "--out", o]);
    let inst = ils_summ::load_instance(&out).unwrap();
    assert_eq!(inst.dim(), 48);
    assert_eq!(inst.budget_s(), 3.5);

    let absent = dir.path().join("absent.csv");
    let res = run(&["features", "--frames-dir", d, "--manifest", absent.to_str().unwrap(), "--budget-seconds", "5", "--out", o]);
    assert_eq!(res.status.code(), Some(3));
    let res = run(&["features", "--frames-dir", d, "--manifest", m, "--budget-seconds", "5", "--bins", "7", "--out", o]);
    assert_eq!(res.status.code(), Some(2));
}
