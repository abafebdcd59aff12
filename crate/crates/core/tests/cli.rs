use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn hetg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetg"))
        .args(args)
        .env("HETG_THREADS", "2")
        .output()
        .expect("run hetg")
}

fn ok(args: &[&str]) -> Output {
    let out = hetg(args);
    assert!(
        out.status.success(),
        "hetg {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn measured(dir: &Path) -> Value {
    json(&dir.join("report.json"))["measured"].clone()
}

fn gen_small(root: &Path, preset: &str) -> PathBuf {
    let dir = root.join(format!("{preset}-graph"));
    ok(&["gen", "--preset", preset, "--scale", "0.02", "--seed", "42", "--out", p(&dir)]);
    dir
}

fn output_digests(dir: &Path) -> BTreeMap<String, String> {
    let m = json(&dir.join("manifest.json"));
    m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["path"].as_str().unwrap().to_string(), o["sha256"].as_str().unwrap().to_string()))
        .collect()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn gen_writes_one_file_per_relation() {
    let tmp = tempfile::tempdir().unwrap();
    let acm = gen_small(tmp.path(), "acm");
    let imdb = gen_small(tmp.path(), "imdb");
    let count = |d: &Path| {
        fs::read_dir(d)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "edges"))
            .count()
    };
    assert_eq!(count(&acm), 8);
    assert_eq!(count(&imdb), 6);
    assert!(acm.join("PP_rev.edges").exists());
    let m = json(&acm.join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["command"], "gen");
    assert!(m["steps"].as_array().unwrap().iter().all(|s| s["wall_ms"].is_number()));
}

#[test]
fn gen_rerun_gives_identical_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        ok(&["gen", "--preset", "dblp", "--scale", "0.05", "--seed", "9", "--out", p(d)]);
    }
    assert_eq!(output_digests(&a), output_digests(&b));
    let c = tmp.path().join("c");
    ok(&["gen", "--preset", "dblp", "--scale", "0.05", "--seed", "10", "--out", p(&c)]);
    assert_ne!(output_digests(&a), output_digests(&c));
}

#[test]
fn gen_rejects_bad_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"vertex_types":[{"name":"A","count":2},{"name":"B","count":2}],
            "relations":[{"name":"AB","src":"A","dst":"B","edges":9,"degree_model":"uniform"}]}"#,
    )
    .unwrap();
    let out = hetg(&["gen", "--config", p(&cfg), "--out", p(&tmp.path().join("g"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    let out = hetg(&["gen", "--preset", "nope", "--out", p(&tmp.path().join("g2"))]);
    assert_eq!(out.status.code(), Some(1));
    let out = hetg(&["gen", "--out", p(&tmp.path().join("g3"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_both_reports_reduction() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let run = tmp.path().join("b");
    ok(&["build", "--graph", p(&g), "--metapaths", "APA,APS,APSPA", "--mode", "both", "--out", p(&run)]);
    let m = measured(&run);
    assert!(m["reduction"]["macs_pct"].as_f64().unwrap() > 0.0);
    let targets = m["targets"].as_array().unwrap();
    assert_eq!(targets.len(), 3);
    let last = &targets[2];
    assert_eq!(last["metapath"], "APSPA");
    assert!(last["ctt"]["macs"].as_u64().unwrap() < last["naive"]["macs"].as_u64().unwrap());

    let one = tmp.path().join("one");
    ok(&["build", "--graph", p(&g), "--metapaths", "AP", "--mode", "both", "--out", p(&one)]);
    let m = measured(&one);
    assert_eq!(m["reduction"]["macs_pct"].as_f64(), Some(0.0));
    assert_eq!(m["reduction"]["edges_read_pct"].as_f64(), Some(0.0));
}

#[test]
fn build_names_the_bad_metapath() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let run = tmp.path().join("b");
    let out = hetg(&["build", "--graph", p(&g), "--metapaths", "APA,ASA", "--out", p(&run)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ASA"));
    assert_eq!(json(&run.join("manifest.json"))["status"], "failed");
}

#[test]
fn build_sweep_writes_one_row_per_length() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "imdb");
    let run = tmp.path().join("s");
    ok(&["build", "--graph", p(&g), "--sweep-hops", "3:6", "--out", p(&run)]);
    let text = fs::read_to_string(run.join("sweep.csv")).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(header[0], "hops");
    let hops: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(hops, ["3", "4", "5", "6"]);
    let col = header.iter().position(|h| h == "macs_reduction_pct").unwrap();
    let pct: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
    assert!(pct.windows(2).all(|w| w[0] <= w[1]), "{pct:?}");
}

#[test]
fn restructure_relation_writes_partition() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let run = tmp.path().join("r");
    ok(&["restructure", "--graph", p(&g), "--relation", "AP", "--out", p(&run)]);
    for f in ["gs1.edges", "gs2.edges", "gs3.edges", "partition.json", "diagnostics.json"] {
        assert!(run.join(f).exists(), "{f}");
    }
    let diag = json(&run.join("diagnostics.json"));
    assert!(diag["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    let m = measured(&run);
    let sum = ["gs1_edges", "gs2_edges", "gs3_edges"].iter().map(|k| m[k].as_u64().unwrap()).sum::<u64>();
    assert_eq!(sum, m["edges"].as_u64().unwrap());
}

#[test]
fn restructure_built_edge_file() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let b = tmp.path().join("b");
    ok(&["build", "--graph", p(&g), "--metapaths", "APA", "--save-graphs", "--out", p(&b)]);
    let edges = b.join("semantic/APA.edges");
    assert!(edges.exists());
    let r = tmp.path().join("r");
    ok(&["restructure", "--graph", p(&g), "--edges", p(&edges), "--src", "A", "--dst", "A", "--out", p(&r)]);
    let r2 = tmp.path().join("r2");
    ok(&["restructure", "--graph", p(&g), "--metapath", "APA", "--out", p(&r2)]);
    assert_eq!(measured(&r)["edges"], measured(&r2)["edges"]);
}

#[test]
fn restructure_empty_relation_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"vertex_types":[{"name":"A","count":3},{"name":"B","count":4}],
            "relations":[{"name":"AB","src":"A","dst":"B","edges":0,"degree_model":"uniform"},
                         {"name":"BA","src":"B","dst":"A","edges":5,"degree_model":"uniform"}],
            "seed": 1}"#,
    )
    .unwrap();
    let g = tmp.path().join("g");
    ok(&["gen", "--config", p(&cfg), "--out", p(&g)]);
    let r = tmp.path().join("r");
    ok(&["restructure", "--graph", p(&g), "--relation", "AB", "--out", p(&r)]);
    let m = measured(&r);
    assert_eq!(m["edges"], 0);
    assert_eq!(m["matching_size"], 0);
    assert_eq!(fs::read_to_string(r.join("gs3.edges")).unwrap(), "");
}

#[test]
fn restructure_fuzz_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let r = tmp.path().join("f");
    ok(&["restructure", "--fuzz", "200", "--seed", "3", "--max-side", "60", "--out", p(&r)]);
    let m = measured(&r);
    assert_eq!(m["graphs"], 200);
    assert_eq!(m["failed"], 0);
}

#[test]
fn simulate_defaults_to_original_order() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let s = tmp.path().join("s");
    ok(&["simulate", "--graph", p(&g), "--relation", "AP", "--capacity-features", "16", "--out", p(&s)]);
    assert!(s.join("sim_original.json").exists());
    assert!(!s.join("sim_restructured.json").exists());
    assert!(!s.join("comparison.json").exists());
    let hist = fs::read_to_string(s.join("hist_original.csv")).unwrap();
    assert!(hist.starts_with("replacements,ratio_vertex,ratio_access\n"));
}

#[test]
fn simulate_both_with_saved_partition() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let r = tmp.path().join("r");
    ok(&["restructure", "--graph", p(&g), "--relation", "AP", "--out", p(&r)]);
    let s = tmp.path().join("s");
    ok(&[
        "simulate", "--graph", p(&g), "--relation", "AP", "--partition", p(&r), "--capacity-features", "8",
        "--order", "both", "--out", p(&s),
    ]);
    let cmp = json(&s.join("comparison.json"));
    let o = &cmp["original"];
    let x = &cmp["restructured"];
    assert_eq!(o["total_accesses"], x["total_accesses"]);
    assert_eq!(o["cold_misses"], x["cold_misses"]);
    let delta = o["replacements"].as_i64().unwrap() - x["replacements"].as_i64().unwrap();
    assert_eq!(cmp["replacement_delta"].as_i64().unwrap(), delta);

    let huge = tmp.path().join("huge");
    ok(&[
        "simulate", "--graph", p(&g), "--relation", "AP", "--capacity-features", "1000000000", "--order", "both",
        "--out", p(&huge),
    ]);
    let m = measured(&huge);
    assert_eq!(m["original"]["replacements"], 0);
    assert_eq!(m["restructured"]["replacements"], 0);
    assert_eq!(m["original"]["dram_accesses"], m["restructured"]["dram_accesses"]);
}

#[test]
fn simulate_rejects_bad_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let r = tmp.path().join("r");
    ok(&["restructure", "--graph", p(&g), "--relation", "AP", "--out", p(&r)]);
    let run = |extra: &[&str], name: &str| {
        let out_dir = tmp.path().join(name);
        let mut args = vec!["simulate", "--graph", p(&g), "--out"];
        args.push(out_dir.to_str().unwrap());
        args.extend_from_slice(extra);
        let o = hetg(&args);
        (o.status.code(), String::from_utf8_lossy(&o.stderr).into_owned())
    };
    let (code, _) = run(&["--relation", "AP", "--capacity-features", "0"], "zero");
    assert_eq!(code, Some(1));
    let (code, err) = run(
        &["--relation", "PA", "--partition", p(&r), "--capacity-features", "4", "--order", "both"],
        "mismatch",
    );
    assert_eq!(code, Some(1));
    assert!(err.contains("partition"), "{err}");
    let (code, _) = run(&["--relation", "AP", "--capacity-bytes", "10", "--feature-bytes", "64"], "tiny");
    assert_eq!(code, Some(1));
    let (code, _) = run(
        &["--relation", "AP", "--capacity-features", "4", "--order", "both", "--schedule", "gs1,gs1"],
        "dup",
    );
    assert_eq!(code, Some(1));
}

#[test]
fn json_flag_prints_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "imdb");
    let s = tmp.path().join("s");
    let out = ok(&["--json", "simulate", "--graph", p(&g), "--relation", "MA", "--capacity-features", "32", "--out", p(&s)]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "simulate");
    assert_eq!(v, json(&s.join("report.json")));
    assert_eq!(v["config"]["capacity_features"], 32);
}

#[test]
fn report_aggregates_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "acm");
    let b1 = tmp.path().join("b1");
    let b2 = tmp.path().join("b2");
    let s = tmp.path().join("s");
    ok(&["build", "--graph", p(&g), "--metapaths", "APA", "--mode", "both", "--out", p(&b1)]);
    ok(&["build", "--graph", p(&g), "--metapaths", "APSPA", "--mode", "both", "--out", p(&b2)]);
    ok(&["simulate", "--graph", p(&g), "--relation", "AP", "--capacity-features", "8", "--out", p(&s)]);

    let out = ok(&["report", p(&b1), p(&b2)]);
    let (header, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!(&header[..3], ["run", "command", "status"]);
    assert!(header.contains(&"reduction.macs_pct".to_string()));

    let csv_path = tmp.path().join("all.csv");
    ok(&["report", p(&b1), p(&s), "--out", p(&csv_path)]);
    let (header, rows) = parse_csv(&fs::read_to_string(&csv_path).unwrap());
    let col = |name: &str| header.iter().position(|h| h == name).unwrap_or_else(|| panic!("{name}"));
    let macs = col("ctt.macs");
    let repl = col("original.replacements");
    assert!(!rows[0][macs].is_empty() && rows[0][repl].is_empty());
    assert!(rows[1][macs].is_empty() && !rows[1][repl].is_empty());

    let out = hetg(&["report", p(&tmp.path().join("missing"))]);
    assert_eq!(out.status.code(), Some(1));
    fs::write(b1.join("manifest.json"), "{not json").unwrap();
    let out = hetg(&["report", p(&b1)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn every_command_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let g = gen_small(tmp.path(), "imdb");
    let runs: Vec<Vec<String>> = vec![
        vec!["build".into(), "--graph".into(), p(&g).into(), "--metapaths".into(), "MAM,MDMAM".into(), "--mode".into(), "both".into()],
        vec!["build".into(), "--graph".into(), p(&g).into(), "--sweep-hops".into(), "2:4".into()],
        vec!["restructure".into(), "--graph".into(), p(&g).into(), "--relation".into(), "AM".into()],
        vec!["restructure".into(), "--fuzz".into(), "20".into(), "--seed".into(), "5".into()],
        vec![
            "simulate".into(), "--graph".into(), p(&g).into(), "--metapath".into(), "MAM".into(),
            "--capacity-features".into(), "16".into(), "--order".into(), "both".into(),
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut digests = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("run{i}-{rep}"));
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            a.extend(["--out", p(&out)]);
            ok(&a);
            digests.push(output_digests(&out));
        }
        assert_eq!(digests[0], digests[1], "{args:?}");
    }
}
