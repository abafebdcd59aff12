use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::manifest::{RunContext, RunReport, REPORT_FILE};
use super::{BuildArgs, GenArgs, GraphInput, ModeArg, OrderArg, RestructureArgs, SimulateArgs};
use crate::builder::{hop_sweep, reduction_pct, BuildMode, CostReport, SemanticBuilder, SWEEP_CSV_HEADER};
use crate::error::{Error, Result};
use crate::model::io::{load_graph, read_typed_edges, save_graph, write_edge_file};
use crate::model::synth::{generate_synthetic, Preset, SynthConfig};
use crate::model::{HetGraph, Metapath, SemanticGraph};
use crate::restructure::{
    decouple, read_partition, recouple, verify_partition, write_partition, BackbonePartition, PartitionStats,
    SubgraphKind,
};
use crate::sim::{compare_layouts_with_order, schedule_with_order, simulate_na, SimConfig, SimReport, Unit};

/// Feature size used when the source type declares no dimension.
const FALLBACK_FEATURE_BYTES: u64 = 256;
const BYTES_PER_DIM: u64 = 4;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

/// Writes `report.json` and the manifest, and prints the outcome.
fn finish(
    mut ctx: RunContext,
    command: &str,
    config: Value,
    result: Result<(Value, String)>,
    json_stdout: bool,
) -> Result<()> {
    match result {
        Ok((measured, summary)) => {
            let report = RunReport {
                command: command.to_string(),
                config: config.clone(),
                measured,
            };
            ctx.write_json(REPORT_FILE, &report)?;
            ctx.finish(config, true)?;
            if json_stdout {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{summary}");
            }
            Ok(())
        }
        Err(e) => {
            if let Err(me) = ctx.finish(config, false) {
                log::error!("could not write manifest: {me}");
            }
            Err(e)
        }
    }
}

pub(super) fn gen(a: &GenArgs, json_stdout: bool) -> Result<()> {
    let mut ctx = RunContext::new("gen", &a.out)?;
    let (config, echo) = match gen_config(a, &mut ctx) {
        Ok(c) => c,
        Err(e) => {
            let _ = ctx.finish(json!({}), false);
            return Err(e);
        }
    };
    let result = (|| {
        let graph = ctx.step("generate", || generate_synthetic(&config))?;
        let out = ctx.out.clone();
        ctx.step("write_graph", || save_graph(&graph, &out))?;
        ctx.output(crate::model::io::SCHEMA_FILE);
        let mut edges = serde_json::Map::new();
        for (i, rel) in graph.relations().iter().enumerate() {
            let name = format!("{}.{}", rel.name, crate::model::io::EDGES_EXT);
            ctx.output(&name);
            edges.insert(rel.name.clone(), json!(graph.adjacency(i).nnz()));
        }
        let measured = json!({
            "relations": graph.relations().len(),
            "total_vertices": graph.vertex_types().iter().map(|t| u64::from(t.count)).sum::<u64>(),
            "total_edges": graph.edge_count(),
            "edges": edges,
        });
        let summary = format!(
            "generated {} relations, {} edges in {}\n",
            graph.relations().len(),
            graph.edge_count(),
            ctx.out.display()
        );
        Ok((measured, summary))
    })();
    finish(ctx, "gen", echo, result, json_stdout)
}

fn gen_config(a: &GenArgs, ctx: &mut RunContext) -> Result<(SynthConfig, Value)> {
    match (&a.preset, &a.config) {
        (Some(name), None) => {
            let preset: Preset = name.parse()?;
            let cfg = preset.config(a.scale, a.seed.unwrap_or(0))?;
            let echo = json!({"preset": preset.name(), "scale": a.scale, "seed": cfg.seed, "synth": to_value(&cfg)});
            Ok((cfg, echo))
        }
        (None, Some(path)) => {
            if !path.exists() {
                return Err(Error::MissingFile(path.clone()));
            }
            ctx.input(path);
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let mut cfg: SynthConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.clone(),
                source,
            })?;
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            cfg.validate()?;
            let echo = json!({"config_file": path.display().to_string(), "seed": cfg.seed, "synth": to_value(&cfg)});
            Ok((cfg, echo))
        }
        _ => Err(Error::InvalidConfig("give exactly one of --preset or --config".into())),
    }
}

#[derive(Serialize)]
struct TargetRow {
    metapath: Metapath,
    edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ctt: Option<CostReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    naive: Option<CostReport>,
}

pub(super) fn build(a: &BuildArgs, json_stdout: bool) -> Result<()> {
    let mut ctx = RunContext::new("build", &a.out)?;
    let mode = match a.mode {
        ModeArg::Ctt => "ctt",
        ModeArg::Naive => "naive",
        ModeArg::Both => "both",
    };
    let config = json!({
        "graph": a.graph.display().to_string(),
        "metapaths": a.metapaths.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "mode": mode,
        "sweep_hops": a.sweep_hops.map(|(lo, hi)| json!([lo, hi])),
        "insert_intermediates": a.insert_intermediates,
        "save_graphs": a.save_graphs,
    });
    let result = build_inner(a, &mut ctx);
    finish(ctx, "build", config, result, json_stdout)
}

fn build_inner(a: &BuildArgs, ctx: &mut RunContext) -> Result<(Value, String)> {
    let graph = ctx.step("load_graph", || load_graph(&a.graph))?;
    ctx.input_dir(&a.graph)?;
    for m in &a.metapaths {
        graph.validate_metapath(m)?;
    }
    let run_ctt = matches!(a.mode, ModeArg::Ctt | ModeArg::Both);
    let run_naive = matches!(a.mode, ModeArg::Naive | ModeArg::Both);

    let mut rows = Vec::with_capacity(a.metapaths.len());
    let mut ctt_total = CostReport::default();
    let mut naive_total = CostReport::default();
    if !a.metapaths.is_empty() {
        let (r, ct, nt) = ctx.step("build_targets", || build_targets(&graph, a, run_ctt, run_naive))?;
        rows = r;
        ctt_total = ct;
        naive_total = nt;
    }
    if a.save_graphs && !a.metapaths.is_empty() {
        let dir = ctx.out.join("semantic");
        ctx.step("save_graphs", || save_semantic_graphs(&graph, &a.metapaths, &dir))?;
        for m in &a.metapaths {
            ctx.output(&format!("semantic/{m}.edges"));
        }
    }

    let mut measured = serde_json::Map::new();
    let mut summary = String::new();
    if !a.metapaths.is_empty() {
        measured.insert("targets".into(), to_value(&rows));
        if run_ctt {
            measured.insert("ctt".into(), to_value(&ctt_total));
            summary.push_str(&format!("ctt:   macs {} edges_read {}\n", ctt_total.macs, ctt_total.edges_read));
        }
        if run_naive {
            measured.insert("naive".into(), to_value(&naive_total));
            summary.push_str(&format!("naive: macs {} edges_read {}\n", naive_total.macs, naive_total.edges_read));
        }
        if run_ctt && run_naive {
            let macs = reduction_pct(naive_total.macs, ctt_total.macs);
            let read = reduction_pct(naive_total.edges_read, ctt_total.edges_read);
            measured.insert("reduction".into(), json!({"macs_pct": macs, "edges_read_pct": read}));
            summary.push_str(&format!("reduction: macs {macs:.2}% edges_read {read:.2}%\n"));
        }
    }
    if let Some((lo, hi)) = a.sweep_hops {
        let sweep = ctx.step("sweep", || hop_sweep(&graph, lo, hi, a.insert_intermediates))?;
        let mut csv = String::from(SWEEP_CSV_HEADER);
        csv.push('\n');
        for r in &sweep {
            csv.push_str(&r.csv_line());
            csv.push('\n');
            summary.push_str(&format!(
                "sweep {} hops: {} targets, cumulative macs reduction {:.2}%\n",
                r.hops, r.targets, r.macs_reduction_pct
            ));
        }
        ctx.write_text("sweep.csv", &csv)?;
        if let Some(last) = sweep.last() {
            measured.insert(
                "sweep_final".into(),
                json!({
                    "hops": last.hops,
                    "ctt_cum_macs": last.ctt_cumulative.macs,
                    "naive_cum_macs": last.naive_cumulative.macs,
                    "macs_reduction_pct": last.macs_reduction_pct,
                    "edges_read_reduction_pct": last.edges_read_reduction_pct,
                }),
            );
        }
        measured.insert("sweep".into(), to_value(&sweep));
    }
    Ok((Value::Object(measured), summary))
}

type TargetBuild = (Vec<TargetRow>, CostReport, CostReport);

fn build_targets(graph: &HetGraph, a: &BuildArgs, run_ctt: bool, run_naive: bool) -> Result<TargetBuild> {
    let mut ctt_builder = SemanticBuilder::new(graph)?;
    ctt_builder.set_insert_intermediates(a.insert_intermediates);
    let naive_builder = SemanticBuilder::new(graph)?;
    let mut rows = Vec::with_capacity(a.metapaths.len());
    let mut ctt_total = CostReport::default();
    let mut naive_total = CostReport::default();
    for m in &a.metapaths {
        let ctt = run_ctt.then(|| ctt_builder.build(m, BuildMode::Ctt)).transpose()?;
        let naive = run_naive.then(|| naive_builder.build_naive(m)).transpose()?;
        if let (Some((cg, _)), Some(n)) = (&ctt, &naive) {
            if cg.forward() != n.graph.forward() || cg.n_dst() != n.graph.n_dst() {
                return Err(Error::Internal(format!("ctt and naive builds of {m} differ")));
            }
        }
        let edges = ctt
            .as_ref()
            .map(|(g, _)| g.edge_count())
            .or_else(|| naive.as_ref().map(|n| n.graph.edge_count()))
            .unwrap_or(0);
        if let Some((_, c)) = &ctt {
            ctt_total += c;
        }
        if let Some(n) = &naive {
            naive_total += &n.cost;
        }
        rows.push(TargetRow {
            metapath: m.clone(),
            edges,
            ctt: ctt.map(|(_, c)| c),
            naive: naive.map(|n| n.cost),
        });
    }
    Ok((rows, ctt_total, naive_total))
}

fn save_semantic_graphs(graph: &HetGraph, metapaths: &[Metapath], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut builder = SemanticBuilder::new(graph)?;
    for m in metapaths {
        let (sg, _) = builder.build(m, BuildMode::Ctt)?;
        write_edge_file(&dir.join(format!("{m}.edges")), sg.edges())?;
    }
    Ok(())
}

/// The semantic graph selected by a [`GraphInput`] together with its host
/// graph.
struct Loaded {
    graph: HetGraph,
    sg: SemanticGraph,
    echo: Value,
}

fn load_input(input: &GraphInput, ctx: &mut RunContext) -> Result<Loaded> {
    let dir = input
        .graph
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("--graph is required".into()))?;
    let graph = ctx.step("load_graph", || load_graph(dir))?;
    ctx.input_dir(dir)?;
    let mut echo = json!({"graph": dir.display().to_string()});
    let sg = match (&input.relation, &input.metapath, &input.edges) {
        (Some(rel), None, None) => {
            echo["relation"] = json!(rel);
            graph.relation_adjacency(rel)?
        }
        (None, Some(m), None) => {
            echo["metapath"] = json!(m.to_string());
            let mut builder = SemanticBuilder::new(&graph)?;
            let (sg, _) = ctx.step("build_metapath", || builder.build(m, BuildMode::Ctt))?;
            Arc::unwrap_or_clone(sg)
        }
        (None, None, Some(path)) => {
            let (src, dst) = match (&input.src, &input.dst) {
                (Some(s), Some(d)) => (s, d),
                _ => return Err(Error::InvalidConfig("--edges needs --src and --dst".into())),
            };
            echo["edges"] = json!(path.display().to_string());
            echo["src"] = json!(src);
            echo["dst"] = json!(dst);
            if !path.exists() {
                return Err(Error::MissingFile(path.clone()));
            }
            ctx.input(path);
            let (ts, td) = (graph.vertex_type(src)?, graph.vertex_type(dst)?);
            let edges = read_typed_edges(path, src, ts.count, dst, td.count)?;
            SemanticGraph::from_edges(
                Metapath::new([src.as_str(), dst.as_str()])?,
                ts.count as usize,
                td.count as usize,
                edges,
            )
        }
        _ => {
            return Err(Error::InvalidConfig(
                "select the input with exactly one of --relation, --metapath or --edges".into(),
            ))
        }
    };
    Ok(Loaded { graph, sg, echo })
}

pub(super) fn restructure(a: &RestructureArgs, json_stdout: bool) -> Result<()> {
    let mut ctx = RunContext::new("restructure", &a.out)?;
    if let Some(n) = a.fuzz {
        let config = json!({"fuzz": n, "seed": a.seed, "max_side": a.max_side});
        let result = fuzz_inner(n, a.seed, a.max_side, &mut ctx);
        return finish(ctx, "restructure", config, result, json_stdout);
    }
    let loaded = match load_input(&a.input, &mut ctx) {
        Ok(l) => l,
        Err(e) => {
            let _ = ctx.finish(json!({}), false);
            return Err(e);
        }
    };
    let config = loaded.echo.clone();
    let result = restructure_inner(&loaded.sg, &mut ctx);
    finish(ctx, "restructure", config, result, json_stdout)
}

fn restructure_inner(sg: &SemanticGraph, ctx: &mut RunContext) -> Result<(Value, String)> {
    let m = ctx.step("decouple", || Ok(decouple(sg)))?;
    let p = ctx.step("recouple", || recouple(sg, &m))?;
    let diag = ctx.step("verify", || Ok(verify_partition(sg, &p)))?;
    ctx.write_json("diagnostics.json", &diag)?;
    if !diag.passed() {
        let names: Vec<&str> = diag.failures().map(|c| c.name.as_str()).collect();
        return Err(Error::Internal(format!(
            "partition of {} failed verification: {}",
            sg.label(),
            names.join(", ")
        )));
    }
    let out = ctx.out.clone();
    ctx.step("write_partition", || write_partition(&out, sg.label(), &m, &p))?;
    ctx.output(crate::restructure::PARTITION_FILE);
    for k in SubgraphKind::ALL {
        ctx.output(&format!("{}.edges", k.name()));
    }
    let stats = PartitionStats::new(&m, &p);
    let summary = format!(
        "{}: {} edges, matching {}, gs1 {} gs2 {} gs3 {} edges\n",
        sg.label(),
        stats.edges,
        stats.matching_size,
        stats.gs1_edges,
        stats.gs2_edges,
        stats.gs3_edges
    );
    Ok((to_value(&stats), summary))
}

#[derive(Debug, Serialize)]
struct FuzzFailure {
    index: u64,
    n_src: usize,
    n_dst: usize,
    edges: usize,
    reason: String,
}

/// Random bipartite graph for fuzz case `index`; every case has its own
/// stream of the seeded generator.
fn fuzz_graph(seed: u64, index: u64, max_side: usize) -> SemanticGraph {
    const DENSITIES: [f64; 5] = [0.02, 0.05, 0.1, 0.3, 0.5];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n_src = rng.gen_range(0..=max_side);
    let n_dst = rng.gen_range(0..=max_side);
    let p = DENSITIES[rng.gen_range(0..DENSITIES.len())];
    let mut edges = Vec::new();
    for u in 0..n_src as u32 {
        for v in 0..n_dst as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let label = Metapath::new(["S", "D"]).expect("two types");
    SemanticGraph::from_edges(label, n_src, n_dst, edges)
}

fn fuzz_case(seed: u64, index: u64, max_side: usize) -> (usize, usize, Option<FuzzFailure>) {
    let sg = fuzz_graph(seed, index, max_side);
    let m = decouple(&sg);
    let fail = |reason: String| FuzzFailure {
        index,
        n_src: sg.n_src(),
        n_dst: sg.n_dst(),
        edges: sg.edge_count(),
        reason,
    };
    let failure = match recouple(&sg, &m) {
        Err(e) => Some(fail(e.to_string())),
        Ok(p) => {
            let d = verify_partition(&sg, &p);
            (!d.passed()).then(|| fail(d.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ")))
        }
    };
    (sg.edge_count(), m.size(), failure)
}

fn fuzz_inner(n: u64, seed: u64, max_side: usize, ctx: &mut RunContext) -> Result<(Value, String)> {
    let cases = ctx.step("fuzz", || {
        Ok((0..n)
            .into_par_iter()
            .map(|i| fuzz_case(seed, i, max_side))
            .collect::<Vec<_>>())
    })?;
    let total_edges: usize = cases.iter().map(|c| c.0).sum();
    let total_matching: usize = cases.iter().map(|c| c.1).sum();
    let failures: Vec<FuzzFailure> = cases.into_iter().filter_map(|c| c.2).collect();
    ctx.write_json("diagnostics.json", &json!({ "failures": failures }))?;
    if !failures.is_empty() {
        return Err(Error::Internal(format!("{} of {n} fuzz partitions failed verification", failures.len())));
    }
    let measured = json!({
        "graphs": n,
        "passed": n,
        "failed": 0,
        "total_edges": total_edges,
        "total_matching": total_matching,
    });
    Ok((measured, format!("fuzz: {n} graphs, all partitions verified\n")))
}

pub(super) fn simulate(a: &SimulateArgs, json_stdout: bool) -> Result<()> {
    let mut ctx = RunContext::new("simulate", &a.out)?;
    let loaded = match load_input(&a.input, &mut ctx) {
        Ok(l) => l,
        Err(e) => {
            let _ = ctx.finish(json!({}), false);
            return Err(e);
        }
    };
    let feature_bytes = a.feature_bytes.unwrap_or_else(|| {
        loaded
            .graph
            .vertex_type(loaded.sg.src_type())
            .ok()
            .filter(|t| t.feature_dim > 0)
            .map_or(FALLBACK_FEATURE_BYTES, |t| u64::from(t.feature_dim) * BYTES_PER_DIM)
    });
    let sim_config = match (a.capacity_features, a.capacity_bytes) {
        (Some(n), None) => Ok(SimConfig::new(n, feature_bytes)),
        (None, Some(b)) => SimConfig::from_bytes(b, feature_bytes),
        _ => Err(Error::InvalidConfig(
            "give exactly one of --capacity-features or --capacity-bytes".into(),
        )),
    };
    let order = match a.order {
        OrderArg::Original => "original",
        OrderArg::Restructured => "restructured",
        OrderArg::Both => "both",
    };
    let mut config = loaded.echo.clone();
    config["capacity_features"] = json!(sim_config.as_ref().ok().map(|c| c.capacity));
    config["capacity_bytes"] = json!(a.capacity_bytes);
    config["feature_bytes"] = json!(feature_bytes);
    config["order"] = json!(order);
    config["schedule"] = json!(a.schedule.iter().map(|k| k.name()).collect::<Vec<_>>());
    config["partition"] = json!(a.partition.as_ref().map(|p| p.display().to_string()));
    let result = sim_config.and_then(|c| simulate_inner(a, &loaded.sg, &c, &mut ctx));
    finish(ctx, "simulate", config, result, json_stdout)
}

fn load_partition(a: &SimulateArgs, sg: &SemanticGraph, ctx: &mut RunContext) -> Result<BackbonePartition> {
    match &a.partition {
        None => ctx.step("restructure", || crate::restructure::restructure(sg).map(|(_, p)| p)),
        Some(dir) => {
            let (label, _, p) = ctx.step("read_partition", || read_partition(dir))?;
            ctx.input_dir(dir)?;
            if &label != sg.label() {
                return Err(Error::InvalidConfig(format!(
                    "partition is for {label}, simulated graph is {}",
                    sg.label()
                )));
            }
            let diag = verify_partition(sg, &p);
            if !diag.passed() {
                let names: Vec<&str> = diag.failures().map(|c| c.name.as_str()).collect();
                return Err(Error::InvalidConfig(format!(
                    "partition does not match graph {}: {}",
                    sg.label(),
                    names.join(", ")
                )));
            }
            Ok(p)
        }
    }
}

fn write_sim(ctx: &mut RunContext, tag: &str, r: &SimReport) -> Result<()> {
    ctx.write_json(&format!("sim_{tag}.json"), r)?;
    ctx.write_text(&format!("hist_{tag}.csv"), &r.histogram_csv())
}

fn sim_line(tag: &str, r: &SimReport) -> String {
    format!(
        "{tag}: accesses {} hits {} dram {} replacements {}\n",
        r.total_accesses, r.hits, r.dram_accesses, r.replacements
    )
}

fn simulate_inner(
    a: &SimulateArgs,
    sg: &SemanticGraph,
    config: &SimConfig,
    ctx: &mut RunContext,
) -> Result<(Value, String)> {
    config.validate()?;
    let mut measured = serde_json::Map::new();
    let mut summary = String::new();
    match a.order {
        OrderArg::Original => {
            let r = ctx.step("simulate_original", || simulate_na(&[Unit::Whole(sg)], config))?;
            write_sim(ctx, "original", &r)?;
            measured.insert("original".into(), to_value(&r.summary()));
            summary.push_str(&sim_line("original", &r));
        }
        OrderArg::Restructured => {
            let p = load_partition(a, sg, ctx)?;
            let units: Vec<Unit> = schedule_with_order(&p, &a.schedule)?.into_iter().map(Unit::Sub).collect();
            let r = ctx.step("simulate_restructured", || simulate_na(&units, config))?;
            write_sim(ctx, "restructured", &r)?;
            measured.insert("restructured".into(), to_value(&r.summary()));
            summary.push_str(&sim_line("restructured", &r));
        }
        OrderArg::Both => {
            let p = load_partition(a, sg, ctx)?;
            let cmp = ctx.step("compare", || compare_layouts_with_order(sg, &p, config, &a.schedule))?;
            write_sim(ctx, "original", &cmp.original)?;
            write_sim(ctx, "restructured", &cmp.restructured)?;
            let record = json!({
                "original": to_value(&cmp.original.summary()),
                "restructured": to_value(&cmp.restructured.summary()),
                "replacement_reduction": cmp.replacement_reduction,
                "dram_bytes_ratio": cmp.dram_bytes_ratio,
                "replacement_delta": cmp.original.replacements as i64 - cmp.restructured.replacements as i64,
            });
            ctx.write_json("comparison.json", &record)?;
            summary.push_str(&sim_line("original", &cmp.original));
            summary.push_str(&sim_line("restructured", &cmp.restructured));
            summary.push_str(&format!(
                "replacement reduction {:.2}%, dram bytes ratio {:.4}\n",
                cmp.replacement_reduction * 100.0,
                cmp.dram_bytes_ratio
            ));
            if let Value::Object(obj) = record {
                measured.extend(obj);
            }
        }
    }
    Ok((Value::Object(measured), summary))
}
