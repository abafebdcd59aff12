//! Property tests against independent reference implementations.

use std::collections::{BTreeSet, HashSet, VecDeque};

use hetg_core::builder::{compose, BuildMode, CostReport, SemanticBuilder};
use hetg_core::model::io::{load_graph, save_graph};
use hetg_core::model::{RelationSpec, Schema, VertexType};
use hetg_core::restructure::{decouple, recouple, verify_partition, SubgraphKind};
use hetg_core::sim::{schedule_restructured, simulate_na, SimConfig, Unit};
use hetg_core::{Csr, HetGraph, Metapath, SemanticGraph};
use proptest::prelude::*;

fn mp(s: &str) -> Metapath {
    Metapath::parse(s).unwrap()
}

fn bipartite(max_side: usize) -> impl Strategy<Value = (usize, usize, Vec<(u32, u32)>)> {
    (0..=max_side, 0..=max_side).prop_flat_map(|(n, m)| {
        let pairs = if n == 0 || m == 0 {
            Just(Vec::new()).boxed()
        } else {
            prop::collection::vec((0..n as u32, 0..m as u32), 0..=(n * m).min(400)).boxed()
        };
        (Just(n), Just(m), pairs)
    })
}

fn sg(label: &str, n: usize, m: usize, edges: Vec<(u32, u32)>) -> SemanticGraph {
    SemanticGraph::from_edges(mp(label), n, m, edges)
}

fn edge_set(g: &SemanticGraph) -> BTreeSet<(u32, u32)> {
    g.edges().collect()
}

/// Two-hop reachability and probe count by enumerating every path.
fn brute_join(l: &[(u32, u32)], r: &[(u32, u32)]) -> (BTreeSet<(u32, u32)>, u64) {
    let l: BTreeSet<_> = l.iter().copied().collect();
    let r: BTreeSet<_> = r.iter().copied().collect();
    let mut out = BTreeSet::new();
    let mut probes = 0;
    for &(u, v) in &l {
        for &(v2, w) in &r {
            if v == v2 {
                probes += 1;
                out.insert((u, w));
            }
        }
    }
    (out, probes)
}

/// Textbook Hopcroft-Karp.
fn hopcroft_karp(n: usize, m: usize, edges: &[(u32, u32)]) -> usize {
    const NIL: usize = usize::MAX;
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
    }
    let mut mate_u = vec![NIL; n];
    let mut mate_v = vec![NIL; m];
    let mut dist = vec![0usize; n];
    let mut size = 0;
    loop {
        let mut queue = VecDeque::new();
        for u in 0..n {
            if mate_u[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match mate_v[v] {
                    NIL => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return size;
        }
        fn dfs(u: usize, adj: &[Vec<usize>], mu: &mut [usize], mv: &mut [usize], dist: &mut [usize]) -> bool {
            for i in 0..adj[u].len() {
                let v = adj[u][i];
                let w = mv[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && dfs(w, adj, mu, mv, dist)) {
                    mu[u] = v;
                    mv[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..n {
            if mate_u[u] == NIL && dfs(u, &adj, &mut mate_u, &mut mate_v, &mut dist) {
                size += 1;
            }
        }
    }
}

/// Exhaustive maximum matching over subsets of destinations.
fn brute_matching(n: usize, m: usize, edges: &[(u32, u32)]) -> usize {
    assert!(m <= 16);
    let mut adj = vec![0u32; n];
    for &(u, v) in edges {
        adj[u as usize] |= 1 << v;
    }
    let mut memo = vec![vec![u8::MAX; 1 << m]; n + 1];
    fn go(i: usize, used: u32, adj: &[u32], memo: &mut [Vec<u8>]) -> u8 {
        if i == adj.len() {
            return 0;
        }
        if memo[i][used as usize] != u8::MAX {
            return memo[i][used as usize];
        }
        let mut best = go(i + 1, used, adj, memo);
        let mut free = adj[i] & !used;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            best = best.max(1 + go(i + 1, used | bit, adj, memo));
            free &= free - 1;
        }
        memo[i][used as usize] = best;
        best
    }
    go(0, 0, &adj, &mut memo) as usize
}

/// Reference LRU: most recent at the front.
fn lru_misses(capacity: usize, trace: &[u32]) -> u64 {
    let mut q: VecDeque<u32> = VecDeque::new();
    let mut misses = 0;
    for &x in trace {
        if let Some(pos) = q.iter().position(|&y| y == x) {
            q.remove(pos);
        } else {
            misses += 1;
            if q.len() == capacity {
                q.pop_back();
            }
        }
        q.push_front(x);
    }
    misses
}

/// Access trace of a whole graph: destinations ascending, sources ascending.
fn trace_of(g: &SemanticGraph) -> Vec<u32> {
    let mut by_dst: Vec<Vec<u32>> = vec![Vec::new(); g.n_dst()];
    for (u, v) in g.edges() {
        by_dst[v as usize].push(u);
    }
    by_dst.into_iter().flat_map(|mut s| {
        s.sort_unstable();
        s
    }).collect()
}

/// Three types A, B, C with every directed relation present.
fn random_hetgraph() -> impl Strategy<Value = HetGraph> {
    let pairs = [("A", "B"), ("B", "A"), ("B", "C"), ("C", "B"), ("A", "A")];
    (1..6usize, 1..6usize, 1..6usize).prop_flat_map(move |(a, b, c)| {
        let count = |t: &str| match t {
            "A" => a,
            "B" => b,
            _ => c,
        };
        let lists: Vec<_> = pairs
            .iter()
            .map(|&(s, d)| prop::collection::vec((0..count(s) as u32, 0..count(d) as u32), 0..12))
            .collect();
        lists.prop_map(move |lists| {
            let schema = Schema {
                vertex_types: [("A", a), ("B", b), ("C", c)]
                    .iter()
                    .map(|&(n, k)| VertexType {
                        name: n.into(),
                        count: k as u32,
                        feature_dim: 0,
                    })
                    .collect(),
                relations: pairs
                    .iter()
                    .map(|&(s, d)| RelationSpec {
                        name: format!("{s}{d}"),
                        src: s.into(),
                        dst: d.into(),
                    })
                    .collect(),
            };
            HetGraph::from_edge_lists(&schema, lists).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compose_matches_path_enumeration((n, k, l) in bipartite(12), m in 0..12usize, seed in any::<u64>()) {
        let mut rng_edges = Vec::new();
        let mut s = seed;
        for v in 0..k as u32 {
            for w in 0..m as u32 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (s >> 33) % 3 == 0 {
                    rng_edges.push((v, w));
                }
            }
        }
        let left = sg("AB", n, k, l.clone());
        let right = sg("BC", k, m, rng_edges.clone());
        let mut cost = CostReport::default();
        let out = compose(&left, &right, &mut cost).unwrap();
        let (expect, probes) = brute_join(&l, &rng_edges);
        prop_assert_eq!(edge_set(&out), expect);
        prop_assert_eq!(cost.macs, probes);
        prop_assert_eq!(cost.edges_written, out.edge_count() as u64);
        prop_assert_eq!(cost.edges_read, (left.edge_count() + right.edge_count()) as u64);
        prop_assert_eq!(out.label(), &mp("ABC"));
    }

    #[test]
    fn compose_is_associative((n1, n2, e1) in bipartite(8), (_, n3, e2) in bipartite(8), (_, n4, e3) in bipartite(8)) {
        let clamp = |e: Vec<(u32, u32)>, a: usize, b: usize| -> Vec<(u32, u32)> {
            e.into_iter().filter(|&(u, v)| (u as usize) < a && (v as usize) < b).collect()
        };
        let g1 = sg("AB", n1, n2, clamp(e1, n1, n2));
        let g2 = sg("BC", n2, n3, clamp(e2, n2, n3));
        let g3 = sg("CD", n3, n4, clamp(e3, n3, n4));
        let mut c = CostReport::default();
        let left = compose(&compose(&g1, &g2, &mut c).unwrap(), &g3, &mut c).unwrap();
        let right = compose(&g1, &compose(&g2, &g3, &mut c).unwrap(), &mut c).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn matching_is_maximum((n, m, e) in bipartite(10)) {
        let g = sg("AB", n, m, e);
        let edges: Vec<_> = g.edges().collect();
        let matching = decouple(&g);
        prop_assert!(matching.validate(&g).is_ok());
        prop_assert_eq!(matching.size(), brute_matching(n, m, &edges));
        prop_assert_eq!(matching.size(), hopcroft_karp(n, m, &edges));
    }

    #[test]
    fn matching_matches_hopcroft_karp_on_larger_graphs((n, m, e) in bipartite(60)) {
        let g = sg("AB", n, m, e);
        let edges: Vec<_> = g.edges().collect();
        prop_assert_eq!(decouple(&g).size(), hopcroft_karp(n, m, &edges));
    }

    #[test]
    fn partition_invariants_hold((n, m, e) in bipartite(40)) {
        let g = sg("AB", n, m, e);
        let matching = decouple(&g);
        let p = recouple(&g, &matching).unwrap();
        let d = verify_partition(&g, &p);
        prop_assert!(d.passed(), "{:?}", d);

        // Independent restatement of the invariants.
        let src_in: HashSet<u32> = p.src_in.iter().copied().collect();
        let dst_in: HashSet<u32> = p.dst_in.iter().copied().collect();
        prop_assert_eq!(p.src_in.len() + p.src_out.len(), n);
        prop_assert_eq!(p.dst_in.len() + p.dst_out.len(), m);
        let mut seen = BTreeSet::new();
        for kind in SubgraphKind::ALL {
            for (u, v) in p.subgraph(kind).parent_edges() {
                let (a, b) = (src_in.contains(&u), dst_in.contains(&v));
                let ok = match kind {
                    SubgraphKind::S1 => !a && b,
                    SubgraphKind::S2 => a && !b,
                    SubgraphKind::S3 => a && b,
                };
                prop_assert!(ok);
                prop_assert!(seen.insert((u, v)));
            }
        }
        prop_assert_eq!(seen, edge_set(&g));
        // The backbone is exactly the matched vertex set.
        prop_assert_eq!(p.src_in.len() + p.dst_in.len(), 2 * matching.size());
    }

    #[test]
    fn lru_agrees_with_reference((n, m, e) in bipartite(20), capacity in 1..24usize) {
        let g = sg("AB", n, m, e);
        let r = simulate_na(&[Unit::Whole(&g)], &SimConfig::new(capacity, 4)).unwrap();
        let trace = trace_of(&g);
        prop_assert_eq!(r.total_accesses, trace.len() as u64);
        prop_assert_eq!(r.dram_accesses, lru_misses(capacity, &trace));
        prop_assert_eq!(r.hits + r.dram_accesses, r.total_accesses);
        prop_assert_eq!(r.replacements, r.dram_accesses - r.cold_misses);
        let distinct: HashSet<u32> = trace.iter().copied().collect();
        prop_assert_eq!(r.cold_misses, distinct.len() as u64);
        let replaced: u64 = r.per_vertex_replacements.values().sum();
        prop_assert_eq!(replaced, r.replacements);
        if !r.histogram.is_empty() {
            let v: f64 = r.histogram.iter().map(|b| b.ratio_vertex).sum();
            let a: f64 = r.histogram.iter().map(|b| b.ratio_access).sum();
            prop_assert!((v - 1.0).abs() < 1e-9 && (a - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lru_misses_shrink_with_capacity((n, m, e) in bipartite(20)) {
        let g = sg("AB", n, m, e);
        let mut last = u64::MAX;
        for cap in 1..=32 {
            let r = simulate_na(&[Unit::Whole(&g)], &SimConfig::new(cap, 4)).unwrap();
            prop_assert!(r.dram_accesses <= last);
            last = r.dram_accesses;
        }
    }

    #[test]
    fn restructured_schedule_replays_every_edge_once((n, m, e) in bipartite(30), capacity in 1..8usize) {
        let g = sg("AB", n, m, e);
        let p = recouple(&g, &decouple(&g)).unwrap();
        let units: Vec<Unit> = schedule_restructured(&p).into_iter().map(Unit::Sub).collect();
        let mut replayed: Vec<(u32, u32)> = schedule_restructured(&p).iter().flat_map(|s| s.parent_edges()).collect();
        replayed.sort_unstable();
        prop_assert_eq!(replayed, g.edges().collect::<Vec<_>>());
        let r = simulate_na(&units, &SimConfig::new(capacity, 4)).unwrap();
        prop_assert_eq!(r.total_accesses, g.edge_count() as u64);
        let big = simulate_na(&units, &SimConfig::new(1 << 20, 4)).unwrap();
        let orig = simulate_na(&[Unit::Whole(&g)], &SimConfig::new(1 << 20, 4)).unwrap();
        prop_assert_eq!(big.dram_accesses, orig.dram_accesses);
        prop_assert_eq!(big.replacements, 0);
    }

    #[test]
    fn build_modes_agree(g in random_hetgraph(), hops in 1..5usize) {
        let targets = g.metapaths_with_hops(hops);
        let mut ctt = SemanticBuilder::new(&g).unwrap();
        let naive = SemanticBuilder::new(&g).unwrap();
        let mut ctt_total = CostReport::default();
        let mut naive_total = CostReport::default();
        for t in &targets {
            let (a, ca) = ctt.build(t, BuildMode::Ctt).unwrap();
            let b = naive.build_naive(t).unwrap();
            prop_assert_eq!(a.forward(), b.graph.forward());
            prop_assert_eq!(a.label(), t);
            ctt_total += &ca;
            naive_total += &b.cost;
            let plan = ctt.plan(t).unwrap();
            prop_assert_eq!(&plan.concatenation().unwrap(), t);
        }
        prop_assert!(ctt_total.macs <= naive_total.macs);
        prop_assert!(ctt.ctt().callbacks_consistent());
    }

    #[test]
    fn graph_files_round_trip(g in random_hetgraph()) {
        let tmp = tempfile::tempdir().unwrap();
        save_graph(&g, tmp.path()).unwrap();
        let back = load_graph(tmp.path()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn transpose_is_an_involution((n, m, e) in bipartite(20)) {
        let mut pairs = e.clone();
        let csr = Csr::from_pairs(n, &mut pairs);
        let t = csr.transpose(m);
        prop_assert_eq!(t.nnz(), csr.nnz());
        prop_assert_eq!(t.transpose(n), csr);
    }

    #[test]
    fn metapath_text_round_trips(types in prop::collection::vec("[A-Z][a-z]{0,3}", 2..7)) {
        let p = Metapath::new(types.clone()).unwrap();
        let back: Metapath = p.to_string().parse().unwrap();
        prop_assert_eq!(back.types(), &types[..]);
    }
}
