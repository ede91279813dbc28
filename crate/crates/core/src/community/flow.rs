use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, NodeIx, OwnershipGraph};

pub const DEFAULT_DAMPING: f64 = 0.85;

/// Visit rates of a random walker that follows links with probability
/// `damping` and otherwise teleports to a uniformly chosen node. Dangling
/// nodes always teleport.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDistribution {
    pub damping: f64,
    pub rates: Vec<f64>,
    /// Part of each node's rate that leaves by teleportation.
    pub teleport: Vec<f64>,
    /// `(from, to, flow)` per link, flow = damping · rate(from) / out_degree(from).
    pub links: Vec<(NodeIx, NodeIx, f64)>,
    pub iterations: usize,
}

impl FlowDistribution {
    pub fn node_count(&self) -> usize {
        self.rates.len()
    }
}

pub fn stationary_flow(g: &OwnershipGraph, damping: f64, tolerance: f64) -> Result<FlowDistribution> {
    stationary_flow_with(g, damping, tolerance, 10_000)
}

pub fn stationary_flow_with(
    g: &OwnershipGraph,
    damping: f64,
    tolerance: f64,
    max_iterations: usize,
) -> Result<FlowDistribution> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidParameter(format!("damping must lie in (0, 1), got {damping}")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(FlowDistribution {
            damping,
            rates: Vec::new(),
            teleport: Vec::new(),
            links: Vec::new(),
            iterations: 0,
        });
    }
    let out_deg: Vec<f64> = (0..n as NodeIx).map(|u| g.out_degree(u) as f64).collect();
    let uniform = 1.0 / n as f64;
    let mut rates = vec![uniform; n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        // mass leaving by teleportation, redistributed uniformly
        let teleported: f64 = rates
            .iter()
            .zip(&out_deg)
            .map(|(&p, &k)| if k == 0.0 { p } else { (1.0 - damping) * p })
            .sum();
        let base = teleported / n as f64;
        let next: Vec<f64> = (0..n as NodeIx)
            .into_par_iter()
            .map(|v| {
                base + g
                    .in_slice(v)
                    .iter()
                    .map(|&u| damping * rates[u as usize] / out_deg[u as usize])
                    .sum::<f64>()
            })
            .collect();
        let total: f64 = next.iter().sum();
        let next: Vec<f64> = next.into_iter().map(|p| p / total).collect();
        let residual: f64 = next.iter().zip(&rates).map(|(a, b)| (a - b).abs()).sum();
        rates = next;
        if residual < tolerance {
            break;
        }
        if iterations >= max_iterations {
            return Err(Error::NonConvergence { iterations, residual });
        }
    }
    let teleport = rates
        .iter()
        .zip(&out_deg)
        .map(|(&p, &k)| if k == 0.0 { p } else { (1.0 - damping) * p })
        .collect();
    let links = g
        .edges()
        .map(|(u, v, _)| (u, v, damping * rates[u as usize] / out_deg[u as usize]))
        .collect();
    Ok(FlowDistribution {
        damping,
        rates,
        teleport,
        links,
        iterations,
    })
}
