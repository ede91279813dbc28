//! Flow-based community detection by greedy minimisation of the two-level
//! map equation, with repeated aggregation of modules into super-nodes.

mod flow;
mod mapeq;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{Adjacency, OwnershipGraph};
use crate::netstats::{fit_power_law, log_binned, LogBin, PowerLawFit, XMinStrategy};

pub use flow::{stationary_flow, stationary_flow_with, FlowDistribution, DEFAULT_DAMPING};
pub use mapeq::{codelength, entropy, map_equation, module_flows, ModuleFlow};

use mapeq::plogp;

/// Smallest codelength decrease (bits) that counts as an improvement.
const MIN_IMPROVEMENT: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CommunityConfig {
    pub damping: f64,
    pub flow_tolerance: f64,
    pub seed: u64,
    /// Cap on local-moving sweeps per aggregation level.
    pub max_sweeps: usize,
    /// Independent restarts; the lowest codelength wins.
    pub trials: usize,
    /// Keep the codelength after every accepted move.
    pub record_trace: bool,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        CommunityConfig {
            damping: DEFAULT_DAMPING,
            flow_tolerance: 1e-12,
            seed: 0,
            max_sweeps: 200,
            trials: 4,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Module of each node; ids ordered by the smallest node they contain.
    pub labels: Vec<u32>,
    /// Aggregates per module id.
    pub modules: Vec<ModuleFlow>,
    pub codelength: f64,
    /// Codelength of the single-module partition (entropy of the visit rates).
    pub one_module_codelength: f64,
    pub trace: Vec<f64>,
}

impl Partition {
    pub fn module_count(&self) -> usize {
        self.modules.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.modules.iter().map(|m| m.members).collect()
    }
}

/// One aggregation level: super-nodes with their flow and inter-node link flows.
struct Level {
    members: Vec<usize>,
    rate: Vec<f64>,
    teleport: Vec<f64>,
    out: Vec<Vec<(u32, f64)>>,
    inn: Vec<Vec<(u32, f64)>>,
}

impl Level {
    fn from_flow(flow: &FlowDistribution) -> Self {
        let n = flow.node_count();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v, f) in &flow.links {
            out[u as usize].push((v, f));
            inn[v as usize].push((u, f));
        }
        Level {
            members: vec![1; n],
            rate: flow.rates.clone(),
            teleport: flow.teleport.clone(),
            out,
            inn,
        }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    /// Collapses modules (dense ids `0..k`) into super-nodes.
    fn aggregate(&self, module: &[u32], k: usize) -> Level {
        let mut members = vec![0; k];
        let mut rate = vec![0.0; k];
        let mut teleport = vec![0.0; k];
        for u in 0..self.len() {
            let m = module[u] as usize;
            members[m] += self.members[u];
            rate[m] += self.rate[u];
            teleport[m] += self.teleport[u];
        }
        let mut links: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for u in 0..self.len() {
            for &(v, f) in &self.out[u] {
                let (a, b) = (module[u], module[v as usize]);
                if a != b {
                    *links.entry((a, b)).or_insert(0.0) += f;
                }
            }
        }
        let mut out = vec![Vec::new(); k];
        let mut inn = vec![Vec::new(); k];
        for ((a, b), f) in links {
            out[a as usize].push((b, f));
            inn[b as usize].push((a, f));
        }
        Level {
            members,
            rate,
            teleport,
            out,
            inn,
        }
    }
}

struct Mover<'a> {
    level: &'a Level,
    total_nodes: usize,
    module: Vec<u32>,
    mods: Vec<ModuleFlow>,
    module_size: Vec<usize>,
    free: Vec<u32>,
    sum_exit: f64,
    exit_term: f64,
    module_term: f64,
    node_plogp: f64,
    out_to: Vec<f64>,
    in_from: Vec<f64>,
    touched: Vec<u32>,
}

impl<'a> Mover<'a> {
    /// Starts from `init`, dense module ids `0..k` over the level's nodes.
    fn new(level: &'a Level, init: &[u32], total_nodes: usize, node_plogp: f64) -> Self {
        let n = level.len();
        let mut mods = vec![ModuleFlow::default(); n];
        let mut module_size = vec![0; n];
        for u in 0..n {
            let m = &mut mods[init[u] as usize];
            m.members += level.members[u];
            m.rate += level.rate[u];
            m.teleport += level.teleport[u];
            m.exit_links += level.out[u].iter().filter(|l| init[l.0 as usize] != init[u]).map(|l| l.1).sum::<f64>();
            module_size[init[u] as usize] += 1;
        }
        let free = (0..n as u32).rev().filter(|&m| module_size[m as usize] == 0).collect();
        let mut m = Mover {
            level,
            total_nodes,
            module: init.to_vec(),
            mods,
            module_size,
            free,
            sum_exit: 0.0,
            exit_term: 0.0,
            module_term: 0.0,
            node_plogp,
            out_to: vec![0.0; n],
            in_from: vec![0.0; n],
            touched: Vec::new(),
        };
        for (md, &size) in m.mods.iter().zip(&m.module_size) {
            if size == 0 {
                continue;
            }
            let q = md.exit(total_nodes);
            m.sum_exit += q;
            m.exit_term += plogp(q);
            m.module_term += plogp(q + md.rate);
        }
        m
    }

    fn codelength(&self) -> f64 {
        plogp(self.sum_exit) - 2.0 * self.exit_term - self.node_plogp + self.module_term
    }

    /// Module aggregates after removing (`sign = -1`) or adding (`+1`) node `u`.
    fn shifted(&self, target: &ModuleFlow, u: usize, out_to: f64, in_from: f64, out_total: f64, sign: f64) -> ModuleFlow {
        let lv = self.level;
        let members = if sign > 0.0 {
            target.members + lv.members[u]
        } else {
            target.members - lv.members[u]
        };
        ModuleFlow {
            members,
            rate: target.rate + sign * lv.rate[u],
            teleport: target.teleport + sign * lv.teleport[u],
            exit_links: target.exit_links + sign * (out_total - out_to) - sign * in_from,
        }
    }

    fn terms(&self, m: &ModuleFlow) -> (f64, f64, f64) {
        let q = m.exit(self.total_nodes);
        (q, plogp(q), plogp(q + m.rate))
    }

    /// Tries to move `u`; returns the codelength change if a move happened.
    fn try_move(&mut self, u: usize) -> Option<f64> {
        let lv = self.level;
        let from = self.module[u];
        for &(v, f) in &lv.out[u] {
            let m = self.module[v as usize];
            if self.out_to[m as usize] == 0.0 && self.in_from[m as usize] == 0.0 {
                self.touched.push(m);
            }
            self.out_to[m as usize] += f;
        }
        for &(v, f) in &lv.inn[u] {
            let m = self.module[v as usize];
            if self.out_to[m as usize] == 0.0 && self.in_from[m as usize] == 0.0 {
                self.touched.push(m);
            }
            self.in_from[m as usize] += f;
        }
        let out_total: f64 = lv.out[u].iter().map(|l| l.1).sum();
        let (a_out, a_in) = (self.out_to[from as usize], self.in_from[from as usize]);

        let old_a = self.mods[from as usize];
        let new_a = self.shifted(&old_a, u, a_out, a_in, out_total, -1.0);
        let (qa, xa, ma) = self.terms(&old_a);
        let (qa2, xa2, ma2) = self.terms(&new_a);

        let mut candidates: Vec<u32> = self.touched.iter().copied().filter(|&m| m != from).collect();
        candidates.sort_unstable();
        if self.module_size[from as usize] > 1 {
            if let Some(&empty) = self.free.last() {
                candidates.push(empty);
            }
        }

        let mut best: Option<(f64, u32, ModuleFlow)> = None;
        for &b in &candidates {
            let old_b = self.mods[b as usize];
            let new_b = self.shifted(&old_b, u, self.out_to[b as usize], self.in_from[b as usize], out_total, 1.0);
            let (qb, xb, mb) = if self.module_size[b as usize] == 0 { (0.0, 0.0, 0.0) } else { self.terms(&old_b) };
            let (qb2, xb2, mb2) = self.terms(&new_b);
            let sum_exit = self.sum_exit - qa - qb + qa2 + qb2;
            let delta = plogp(sum_exit) - plogp(self.sum_exit) - 2.0 * (xa2 + xb2 - xa - xb) + (ma2 + mb2 - ma - mb);
            if delta < -MIN_IMPROVEMENT * 1e-2 && best.as_ref().is_none_or(|(d, _, _)| delta < *d) {
                best = Some((delta, b, new_b));
            }
        }

        for &m in &self.touched {
            self.out_to[m as usize] = 0.0;
            self.in_from[m as usize] = 0.0;
        }
        self.touched.clear();

        let (delta, to, new_b) = best?;
        let old_b = self.mods[to as usize];
        let (qb, xb, mb) = if self.module_size[to as usize] == 0 { (0.0, 0.0, 0.0) } else { self.terms(&old_b) };
        let (qb2, xb2, mb2) = self.terms(&new_b);
        self.sum_exit += qa2 + qb2 - qa - qb;
        self.exit_term += xa2 + xb2 - xa - xb;
        self.module_term += ma2 + mb2 - ma - mb;
        if self.module_size[to as usize] == 0 {
            self.free.pop();
        }
        self.mods[from as usize] = new_a;
        self.mods[to as usize] = new_b;
        self.module_size[from as usize] -= 1;
        self.module_size[to as usize] += 1;
        if self.module_size[from as usize] == 0 {
            self.mods[from as usize] = ModuleFlow::default();
            self.free.push(from);
        }
        self.module[u] = to;
        Some(delta)
    }

    /// Dense module ids in order of first appearance.
    fn dense_modules(&self) -> (Vec<u32>, usize) {
        let mut remap = vec![u32::MAX; self.level.len()];
        let mut next = 0u32;
        let dense = self
            .module
            .iter()
            .map(|&m| {
                if remap[m as usize] == u32::MAX {
                    remap[m as usize] = next;
                    next += 1;
                }
                remap[m as usize]
            })
            .collect();
        (dense, next as usize)
    }
}

/// Local moving sweeps on one level until a sweep stops paying off.
/// Returns the dense module of each level node and whether anything moved.
fn sweep(level: &Level, init: &[u32], n: usize, node_plogp: f64, config: &CommunityConfig, rng: &mut ChaCha8Rng, trace: &mut Vec<f64>) -> (Vec<u32>, usize, bool) {
    let mut mover = Mover::new(level, init, n, node_plogp);
    let mut order: Vec<usize> = (0..level.len()).collect();
    let mut current = mover.codelength();
    let mut moved_any = false;
    for _ in 0..config.max_sweeps {
        order.shuffle(rng);
        let start = current;
        let mut moves = 0;
        for &u in &order {
            if let Some(delta) = mover.try_move(u) {
                current += delta;
                moves += 1;
                if config.record_trace {
                    trace.push(current);
                }
            }
        }
        moved_any |= moves > 0;
        if moves == 0 || start - current < MIN_IMPROVEMENT {
            break;
        }
    }
    let (dense, k) = mover.dense_modules();
    (dense, k, moved_any)
}

/// Node-level moves from `labels`, then repeated aggregation and module moves.
fn descend(base: &Level, labels: &[u32], n: usize, node_plogp: f64, config: &CommunityConfig, rng: &mut ChaCha8Rng, trace: &mut Vec<f64>) -> Vec<u32> {
    let (dense, mut k, _) = sweep(base, labels, n, node_plogp, config, rng, trace);
    let mut labels = dense;
    let mut level = base.aggregate(&labels, k);
    while k > 1 {
        let identity: Vec<u32> = (0..k as u32).collect();
        let (dense, k2, moved) = sweep(&level, &identity, n, node_plogp, config, rng, trace);
        if !moved || k2 == k {
            break;
        }
        for l in labels.iter_mut() {
            *l = dense[*l as usize];
        }
        level = level.aggregate(&dense, k2);
        k = k2;
    }
    labels
}

/// Greedy map-equation optimisation on a precomputed flow. Each trial starts
/// from singletons and alternates node-level fine-tuning with aggregation until
/// the codelength stops improving; the best trial is kept, and the one-module
/// partition wins if nothing beats it.
pub fn optimize(flow: &FlowDistribution, config: &CommunityConfig) -> Result<Partition> {
    let n = flow.node_count();
    let one = entropy(flow);
    if n == 0 {
        return Ok(Partition {
            labels: Vec::new(),
            modules: Vec::new(),
            codelength: 0.0,
            one_module_codelength: 0.0,
            trace: Vec::new(),
        });
    }
    let node_plogp: f64 = flow.rates.iter().map(|&p| plogp(p)).sum();
    let base = Level::from_flow(flow);
    let mut best: Option<(f64, Vec<u32>, Vec<f64>)> = None;
    for trial in 0..config.trials.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(trial as u64));
        let mut trace = Vec::new();
        let mut labels: Vec<u32> = (0..n as u32).collect();
        let mut current = f64::INFINITY;
        loop {
            let next = canonical_labels(&descend(&base, &labels, n, node_plogp, config, &mut rng, &mut trace));
            let l = codelength(&module_flows(flow, &next)?, n, node_plogp);
            if l < current - MIN_IMPROVEMENT {
                labels = next;
                current = l;
            } else {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| current < b.0 - MIN_IMPROVEMENT) {
            best = Some((current, labels, trace));
        }
    }
    let (mut codelength_best, mut labels, trace) = best.expect("at least one trial");
    if one <= codelength_best + MIN_IMPROVEMENT {
        labels = vec![0; n];
        codelength_best = one;
    }
    let labels = canonical_labels(&labels);
    let modules = module_flows(flow, &labels)?;
    let codelength = if modules.len() == 1 { codelength_best } else { codelength(&modules, n, node_plogp) };
    Ok(Partition {
        labels,
        modules,
        codelength,
        one_module_codelength: one,
        trace,
    })
}

fn canonical_labels(labels: &[u32]) -> Vec<u32> {
    let mut remap = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = remap.len() as u32;
            *remap.entry(l).or_insert(next)
        })
        .collect()
}

pub fn detect_communities(g: &OwnershipGraph, config: &CommunityConfig) -> Result<Partition> {
    let flow = stationary_flow(g, config.damping, config.flow_tolerance)?;
    debug_assert_eq!(flow.node_count(), g.node_count());
    optimize(&flow, config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeHistogram {
    pub counts: BTreeMap<usize, usize>,
    pub bins: Vec<LogBin>,
}

pub fn community_size_histogram(partition: &Partition, bin_ratio: f64) -> Result<SizeHistogram> {
    let (counts, bins) = log_binned(&partition.sizes(), bin_ratio)?;
    Ok(SizeHistogram { counts, bins })
}

/// Power-law fit of the community sizes.
pub fn fit_size_exponent(sizes: &[usize], strategy: XMinStrategy) -> Result<PowerLawFit> {
    let s: Vec<u64> = sizes.iter().map(|&x| x as u64).collect();
    fit_power_law(&s, strategy)
}

/// The GWCC and, per node of `g`, its index inside it (if any).
pub fn restrict_to_gwcc(g: &OwnershipGraph) -> Result<(OwnershipGraph, Vec<Option<u32>>)> {
    let weak = crate::components::weak_components(g);
    let Some(giant) = weak.largest() else {
        return Ok((g.clone(), Vec::new()));
    };
    let members = weak.members(giant);
    let mut local = vec![None; g.node_count()];
    for (i, &u) in members.iter().enumerate() {
        local[u as usize] = Some(i as u32);
    }
    Ok((g.induced_subgraph(&members)?, local))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeIx;

    fn two_cliques() -> OwnershipGraph {
        let mut pairs = Vec::new();
        for base in [0u32, 10] {
            for u in base..base + 10 {
                for v in base..base + 10 {
                    if u != v {
                        pairs.push((u, v));
                    }
                }
            }
        }
        pairs.push((9, 10));
        OwnershipGraph::from_pairs(20, &pairs)
    }

    #[test]
    fn planted_cliques_recovered() {
        let g = two_cliques();
        let planted: Vec<u32> = (0..20).map(|u| (u >= 10) as u32).collect();
        let mut hits = 0;
        for seed in 0..20 {
            let p = detect_communities(&g, &CommunityConfig { seed, ..Default::default() }).unwrap();
            if p.labels == planted {
                hits += 1;
            }
        }
        assert!(hits >= 19, "{hits}/20");
    }

    fn cycle(n: usize) -> OwnershipGraph {
        let pairs: Vec<(NodeIx, NodeIx)> = (0..n as NodeIx).map(|u| (u, (u + 1) % n as NodeIx)).collect();
        OwnershipGraph::from_pairs(n, &pairs)
    }

    /// Smallest codelength over partitions of the cycle into k near-equal arcs.
    fn best_arc_codelength(g: &OwnershipGraph) -> (f64, usize) {
        let n = g.node_count();
        let flow = stationary_flow(g, DEFAULT_DAMPING, 1e-13).unwrap();
        (1..=n)
            .map(|k| {
                let labels: Vec<u32> = (0..n).map(|u| (u * k / n) as u32).collect();
                (map_equation(&flow, &labels).unwrap(), k)
            })
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 - 1e-12 { b } else { a })
    }

    #[test]
    fn short_directed_cycle_is_one_module() {
        for n in 3..=11 {
            let g = cycle(n);
            assert_eq!(best_arc_codelength(&g).1, 1);
            let p = detect_communities(&g, &CommunityConfig::default()).unwrap();
            assert_eq!(p.module_count(), 1, "n={n}");
        }
    }

    #[test]
    fn long_directed_cycle_matches_arc_oracle() {
        for n in [12usize, 20, 30] {
            let g = cycle(n);
            let (oracle, k) = best_arc_codelength(&g);
            assert!(k > 1);
            let p = detect_communities(&g, &CommunityConfig::default()).unwrap();
            // greedy search: close to the best arc split, and better than one module
            assert!(p.codelength <= oracle * 1.005, "n={n}: {} vs arcs {oracle}", p.codelength);
            assert!(p.codelength < p.one_module_codelength);
        }
    }

    #[test]
    fn empty_graph() {
        let p = detect_communities(&OwnershipGraph::from_pairs(0, &[]), &CommunityConfig::default()).unwrap();
        assert!(p.labels.is_empty());
    }

    #[test]
    fn trace_is_monotone_and_consistent() {
        let g = two_cliques();
        let cfg = CommunityConfig {
            seed: 3,
            record_trace: true,
            ..Default::default()
        };
        let p = detect_communities(&g, &cfg).unwrap();
        assert!(!p.trace.is_empty());
        assert!(p.trace.windows(2).all(|w| w[1] < w[0]));
        assert!((p.trace.last().unwrap() - p.codelength).abs() < 1e-9);
        assert!(p.codelength <= p.one_module_codelength);
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = two_cliques();
        let cfg = CommunityConfig { seed: 42, ..Default::default() };
        assert_eq!(detect_communities(&g, &cfg).unwrap(), detect_communities(&g, &cfg).unwrap());
    }

    #[test]
    fn size_histogram_counts() {
        let p = Partition {
            labels: vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 2],
            modules: [3, 3, 4]
                .iter()
                .map(|&m| ModuleFlow {
                    members: m,
                    ..Default::default()
                })
                .collect(),
            codelength: 0.0,
            one_module_codelength: 0.0,
            trace: Vec::new(),
        };
        let h = community_size_histogram(&p, 2.0).unwrap();
        assert_eq!(h.counts, BTreeMap::from([(3, 2), (4, 1)]));
    }

    #[test]
    fn size_exponent_recovered_from_sampled_partition() {
        use rand_distr::{Distribution, Zeta};
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let zeta = Zeta::<f64>::new(2.60).unwrap();
        let sizes: Vec<usize> = (0..20_000).map(|_| zeta.sample(&mut rng).min(1e9) as usize).collect();
        let p = Partition {
            modules: sizes.iter().map(|&k| ModuleFlow { members: k, ..Default::default() }).collect(),
            labels: Vec::new(),
            codelength: 0.0,
            one_module_codelength: 0.0,
            trace: Vec::new(),
        };
        let fit = fit_size_exponent(&p.sizes(), XMinStrategy::Fixed(1)).unwrap();
        assert!((fit.gamma - 2.60).abs() < 0.1, "{}", fit.gamma);
        let single = Partition { modules: vec![ModuleFlow { members: 7, ..Default::default() }], ..p };
        assert_eq!(community_size_histogram(&single, 2.0).unwrap().counts, BTreeMap::from([(7, 1)]));
    }
}
