use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectra-evolve"));
    c.env_remove("SPECTRA_EVOLVE_SEED");
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn small_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("exp.cfg");
    let text = format!(
        "population_size = 8\ngenerations = 3\ntournament_size = 2\nmutation_rate = 0.75\n\
         mutation_strength = 4\nlambda2_threshold = 0.001\nmin_subgraph_size = 3\ncrossover = sc2\n\
         graph_size = 12\ntarget = star\ninit = er\nseed = 5\nruns = 3\noutput_dir = {}\n{extra}",
        dir.join("out").display()
    );
    fs::write(&path, text).unwrap();
    path
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn evolve_writes_traces_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "emit_density_svg = true\n");
    let out = run(bin().args(["evolve", "--config"]).arg(&cfg).args(["--jobs", "2"]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("out");
    for i in 0..3 {
        let rows = csv_rows(&fs::read_to_string(o.join(format!("run_{i}_trace.csv"))).unwrap());
        assert_eq!(rows[0], ["generation", "best_d", "mean_d"]);
        assert_eq!(rows.len(), 4);
        for r in &rows[1..] {
            let best: f64 = r[1].parse().unwrap();
            let mean: f64 = r[2].parse().unwrap();
            assert!(best <= mean + 1e-12);
        }
        assert!(o.join(format!("run_{i}/final_0.txt")).exists());
        assert!(o.join(format!("run_{i}/final_7.txt")).exists());
        assert!(o.join(format!("run_{i}/record.json")).exists());
        assert!(o.join(format!("run_{i}_density.svg")).exists());
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(o.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seeds"], serde_json::json!([5, 6, 7]));
    assert_eq!(summary["final_best"].as_array().unwrap().len(), 3);
    let stats = &summary["stats"];
    assert!(stats["q1"].as_f64().unwrap() <= stats["median"].as_f64().unwrap());
    assert!(stats["median"].as_f64().unwrap() <= stats["q3"].as_f64().unwrap());
    let metrics = csv_rows(&fs::read_to_string(o.join("metrics.csv")).unwrap());
    assert_eq!(metrics.len(), 4);
    let diversity = csv_rows(&fs::read_to_string(o.join("diversity.csv")).unwrap());
    assert_eq!(diversity.len(), 1 + 4 * 3);
    assert!(!o.join("errors.json").exists());
}

#[test]
fn echoed_config_reproduces_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    assert!(run(bin().args(["evolve", "--config"]).arg(&cfg)).status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    let echo = dir.path().join("echo.cfg");
    fs::write(&echo, summary["config"].as_str().unwrap()).unwrap();
    let again = dir.path().join("again");
    let out = run(bin().args(["evolve", "--config"]).arg(&echo).arg("--output-dir").arg(&again));
    assert!(out.status.success());
    for i in 0..3 {
        let name = format!("run_{i}_trace.csv");
        assert_eq!(
            fs::read(dir.path().join("out").join(&name)).unwrap(),
            fs::read(again.join(&name)).unwrap()
        );
    }
}

#[test]
fn seed_env_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = run(bin().args(["evolve", "--config"]).arg(&cfg).env("SPECTRA_EVOLVE_SEED", "40"));
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seeds"], serde_json::json!([40, 41, 42]));
}

#[test]
fn single_generation_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.cfg");
    fs::write(
        &path,
        format!(
            "population_size = 40\ngenerations = 1\ntournament_size = 2\nmutation_rate = 0.75\n\
             mutation_strength = 4\nlambda2_threshold = 0.001\nmin_subgraph_size = 3\ncrossover = sc2\n\
             graph_size = 24\ntarget = star\ninit = regular:6\nseed = 1\nruns = 1\noutput_dir = {}\n",
            dir.path().join("o").display()
        ),
    )
    .unwrap();
    assert!(run(bin().args(["evolve", "--config"]).arg(&path)).status.success());
    let trace = fs::read_to_string(dir.path().join("o/run_0_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn invalid_crossover_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "crossover = zz\n");
    let out = run(bin().args(["evolve", "--config"]).arg(&cfg));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zz"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_fails() {
    let out = run(bin().args(["evolve", "--config", "/nonexistent/x.cfg"]));
    assert!(!out.status.success());
}

#[test]
fn target_exports() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], usize, usize); 3] = [
        (&["star", "12"], 11, 1),
        (&["circulant", "12", "1,2,3,4"], 48, 8),
        (&["circulant", "12", "1,2,3"], 36, 6),
    ];
    for (i, (args, edges, degree)) in cases.into_iter().enumerate() {
        let prefix = dir.path().join(format!("t{i}"));
        let out = run(bin().arg("target").args(args).arg("--out").arg(&prefix).arg("--svg"));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let g = spectra_evolve_graph(&dir.path().join(format!("t{i}.txt")));
        assert_eq!(g.0, 12);
        assert_eq!(g.1.len(), edges);
        let deg_last = g.1.iter().filter(|&&(a, b)| a == 11 || b == 11).count();
        assert_eq!(deg_last, degree);
        let density = fs::read_to_string(dir.path().join(format!("t{i}_density.csv"))).unwrap();
        assert!(density.starts_with("x,phi\n"));
        assert!(dir.path().join(format!("t{i}_density.svg")).exists());
    }
    assert!(!run(bin().args(["target", "circulant", "12"])).status.success());
    assert!(!run(bin().args(["target", "wheel", "12"])).status.success());
}

/// Minimal independent edge-list reader: header `n m`, then `m` pairs.
fn spectra_evolve_graph(path: &Path) -> (usize, Vec<(usize, usize)>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let edges: Vec<(usize, usize)> = lines
        .map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    assert_eq!(edges.len(), header[1]);
    (header[0], edges)
}

fn write_graph(path: &Path, n: usize, edges: &[(usize, usize)]) {
    let mut s = format!("{n} {}\n", edges.len());
    for (a, b) in edges {
        s.push_str(&format!("{a} {b}\n"));
    }
    fs::write(path, s).unwrap();
}

fn k5() -> Vec<(usize, usize)> {
    (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect()
}

#[test]
fn metrics_for_complete_graph() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k5.txt");
    write_graph(&f, 5, &k5());
    let out = run(bin().arg("metrics").arg(&f).arg("--out").arg(dir.path()));
    assert!(out.status.success());
    let rows = csv_rows(&fs::read_to_string(dir.path().join("metrics.csv")).unwrap());
    assert_eq!(rows[0], ["graph_id", "ac", "pl", "cc", "bc"]);
    assert_eq!(&rows[1][2..], ["1", "1", "0"]);
    let ac: f64 = rows[1][1].parse().unwrap();
    assert!((ac - 1.25).abs() < 1e-9);
}

#[test]
fn metrics_diversity_needs_three_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    write_graph(&a, 5, &k5());
    write_graph(&b, 4, &[(0, 1), (1, 2), (2, 3)]);
    let out = run(bin().arg("metrics").args([&a, &b]).arg("--diversity").arg("--out").arg(dir.path()));
    assert!(!out.status.success());

    let c = dir.path().join("c.txt");
    write_graph(&c, 4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let out = run(bin().arg("metrics").args([&a, &b, &c]).arg("--diversity").arg("--out").arg(dir.path()));
    assert!(out.status.success());
    let rows = csv_rows(&fs::read_to_string(dir.path().join("diversity.csv")).unwrap());
    assert_eq!(rows[0], ["metric", "graph_id", "h_normalized", "div"]);
    assert_eq!(rows.len(), 1 + 4 * 3);
    assert_eq!(rows.iter().filter(|r| r[3] == "inf").count(), 8);
}

#[test]
fn metrics_disconnected_row_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let split = dir.path().join("split.txt");
    write_graph(&a, 5, &k5());
    write_graph(&split, 4, &[(0, 1), (2, 3)]);
    let out = run(bin().arg("metrics").args([&a, &split]).arg("--out").arg(dir.path()));
    assert!(!out.status.success());
    let rows = csv_rows(&fs::read_to_string(dir.path().join("metrics.csv")).unwrap());
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][1], "nan");
}

#[test]
fn density_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k5.txt");
    write_graph(&f, 5, &k5());
    let out = run(bin().arg("density").arg(&f));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["x", "phi"]);
    assert_eq!(rows.len(), 1 + 2049);
    assert!(!run(bin().args(["density", "/nonexistent.txt"])).status.success());
}
