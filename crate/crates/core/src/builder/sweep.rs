use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BuildMode, CostReport, SemanticBuilder};
use crate::error::{Error, Result};
use crate::model::{HetGraph, Metapath};

/// Costs for one hop length of a sweep. Cumulative fields sum every length
/// built so far, and the reductions compare the cumulative totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub hops: usize,
    pub targets: usize,
    pub ctt: CostReport,
    pub naive: CostReport,
    pub ctt_cumulative: CostReport,
    pub naive_cumulative: CostReport,
    pub macs_reduction_pct: f64,
    pub edges_read_reduction_pct: f64,
}

pub const SWEEP_CSV_HEADER: &str = "hops,targets,ctt_macs,naive_macs,ctt_cum_macs,naive_cum_macs,\
macs_reduction_pct,ctt_cum_edges_read,naive_cum_edges_read,edges_read_reduction_pct";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.hops,
            self.targets,
            self.ctt.macs,
            self.naive.macs,
            self.ctt_cumulative.macs,
            self.naive_cumulative.macs,
            self.macs_reduction_pct,
            self.ctt_cumulative.edges_read,
            self.naive_cumulative.edges_read,
            self.edges_read_reduction_pct
        )
    }
}

/// `(naive - ctt) / naive` in percent; 0 when the naive cost is 0.
pub fn reduction_pct(naive: u64, ctt: u64) -> f64 {
    if naive == 0 {
        0.0
    } else {
        (naive as f64 - ctt as f64) / naive as f64 * 100.0
    }
}

/// Builds every valid metapath of each length in `min_hops..=max_hops`,
/// shortest first, once with a single trie-backed builder and once naively.
pub fn hop_sweep(graph: &HetGraph, min_hops: usize, max_hops: usize, insert_intermediates: bool) -> Result<Vec<SweepRow>> {
    if min_hops < 1 || min_hops > max_hops {
        return Err(Error::InvalidConfig(format!("bad hop range {min_hops}:{max_hops}")));
    }
    let mut ctt_builder = SemanticBuilder::new(graph)?;
    ctt_builder.set_insert_intermediates(insert_intermediates);
    let naive_builder = SemanticBuilder::new(graph)?;
    let mut rows = Vec::new();
    let mut ctt_cum = CostReport::default();
    let mut naive_cum = CostReport::default();
    for hops in min_hops..=max_hops {
        let targets: Vec<Metapath> = graph.metapaths_with_hops(hops);
        let (ctt, naive) = rayon::join(
            || ctt_builder.batch_build(&targets, BuildMode::Ctt).map(|(total, _)| total),
            || naive_total(&naive_builder, &targets),
        );
        let (ctt, naive) = (ctt?, naive?);
        ctt_cum += &ctt;
        naive_cum += &naive;
        log::info!("sweep: {hops} hops, {} targets, ctt macs {}, naive macs {}", targets.len(), ctt.macs, naive.macs);
        rows.push(SweepRow {
            hops,
            targets: targets.len(),
            ctt,
            naive,
            ctt_cumulative: ctt_cum,
            naive_cumulative: naive_cum,
            macs_reduction_pct: reduction_pct(naive_cum.macs, ctt_cum.macs),
            edges_read_reduction_pct: reduction_pct(naive_cum.edges_read, ctt_cum.edges_read),
        });
    }
    Ok(rows)
}

fn naive_total(builder: &SemanticBuilder<'_>, targets: &[Metapath]) -> Result<CostReport> {
    let costs: Vec<CostReport> = targets
        .par_iter()
        .map(|t| builder.build_naive(t).map(|o| o.cost))
        .collect::<Result<_>>()?;
    let mut total = CostReport::default();
    for c in &costs {
        total += c;
    }
    Ok(total)
}
