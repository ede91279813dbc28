//! Two-level map equation with teleportation recorded in the exit flows.
//!
//! For modules i with visit rate P_i, teleport outflow T_i, member count n_i
//! and exit link flow E_i (out of N nodes):
//!
//!   q_i  = T_i · (N − n_i)/N + E_i
//!   L(M) = plogp(Σq_i) − 2 Σ plogp(q_i) − Σ_α plogp(p_α) + Σ plogp(q_i + P_i)

use super::flow::FlowDistribution;
use crate::error::{Error, Result};

#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModuleFlow {
    pub members: usize,
    pub rate: f64,
    pub teleport: f64,
    pub exit_links: f64,
}

impl ModuleFlow {
    pub fn exit(&self, total_nodes: usize) -> f64 {
        let n = total_nodes as f64;
        self.teleport * (n - self.members as f64) / n + self.exit_links
    }
}

/// Per-module aggregates for the given labels (label values need not be dense).
pub fn module_flows(flow: &FlowDistribution, labels: &[u32]) -> Result<Vec<ModuleFlow>> {
    if labels.len() != flow.node_count() {
        return Err(Error::PartitionMismatch(format!(
            "{} labels for {} nodes",
            labels.len(),
            flow.node_count()
        )));
    }
    let k = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut mods = vec![ModuleFlow::default(); k];
    for (u, &l) in labels.iter().enumerate() {
        let m = &mut mods[l as usize];
        m.members += 1;
        m.rate += flow.rates[u];
        m.teleport += flow.teleport[u];
    }
    for &(u, v, f) in &flow.links {
        let (a, b) = (labels[u as usize], labels[v as usize]);
        if a != b {
            mods[a as usize].exit_links += f;
        }
    }
    Ok(mods.into_iter().filter(|m| m.members > 0).collect())
}

/// Codelength in bits from module aggregates plus the node-level term Σ plogp(p_α).
pub fn codelength(mods: &[ModuleFlow], total_nodes: usize, node_plogp: f64) -> f64 {
    let mut sum_exit = 0.0;
    let mut exit_term = 0.0;
    let mut module_term = 0.0;
    for m in mods {
        let q = m.exit(total_nodes);
        sum_exit += q;
        exit_term += plogp(q);
        module_term += plogp(q + m.rate);
    }
    plogp(sum_exit) - 2.0 * exit_term - node_plogp + module_term
}

/// L(M) of a labelling in bits.
pub fn map_equation(flow: &FlowDistribution, labels: &[u32]) -> Result<f64> {
    let mods = module_flows(flow, labels)?;
    let node_plogp: f64 = flow.rates.iter().map(|&p| plogp(p)).sum();
    Ok(codelength(&mods, flow.node_count(), node_plogp))
}

/// Shannon entropy (bits) of the visit rates: the one-module codelength.
pub fn entropy(flow: &FlowDistribution) -> f64 {
    -flow.rates.iter().map(|&p| plogp(p)).sum::<f64>()
}
