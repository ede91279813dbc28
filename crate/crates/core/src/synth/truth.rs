//! Direct evaluation of a planted MNC: affiliates, layers, degrees, the two
//! centralities as exact fractions, and roles as the least fixed point of the
//! identification rules. Shares no code with the key-firm module on purpose.

use std::collections::{BTreeMap, BTreeSet};

use crate::keyfirms::Role;

/// Exact fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

impl Ratio {
    pub fn positive(self) -> bool {
        self.num > 0
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub layer: BTreeMap<String, u32>,
    pub degree: BTreeMap<String, (i128, i128)>,
    pub h: BTreeMap<String, Option<Ratio>>,
    pub t: BTreeMap<String, Option<Ratio>>,
    pub third_country: BTreeMap<String, bool>,
    pub role: BTreeMap<String, Role>,
}

/// `jur` maps every node (headquarters included) to its code; `links` are
/// substantial `(subsidiary, shareholder)` pairs.
pub fn evaluate(hq: &str, jur: &BTreeMap<String, String>, links: &[(String, String)]) -> Evaluation {
    // affiliates: grow the set of nodes owning something already inside
    let mut inside: BTreeSet<&str> = BTreeSet::from([hq]);
    loop {
        let before = inside.len();
        for (s, h) in links {
            if inside.contains(h.as_str()) {
                inside.insert(s.as_str());
            }
        }
        if inside.len() == before {
            break;
        }
    }
    let internal: Vec<(&str, &str)> = links
        .iter()
        .map(|(s, h)| (s.as_str(), h.as_str()))
        .filter(|(s, h)| inside.contains(s) && inside.contains(h))
        .collect();

    // layers by relaxation
    let mut dist: BTreeMap<&str, u32> = BTreeMap::from([(hq, 0)]);
    loop {
        let mut changed = false;
        for &(s, h) in &internal {
            if let Some(&dh) = dist.get(h) {
                if dist.get(s).is_none_or(|&ds| ds > dh + 1) {
                    dist.insert(s, dh + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let affiliates: Vec<&str> = inside.iter().copied().filter(|&a| a != hq).collect();

    let mut degree = BTreeMap::new();
    for &a in &affiliates {
        let kin = internal.iter().filter(|l| l.1 == a).count() as i128;
        let kout = internal.iter().filter(|l| l.0 == a).count() as i128;
        degree.insert(a, (kin, kout));
    }
    let sum_in: i128 = degree.values().map(|d| d.0).sum();
    let sum_tot: i128 = degree.values().map(|d| d.0 + d.1).sum();
    let sum_prod: i128 = degree.values().map(|d| d.0 * d.1).sum();
    let frac = |num: i128, den: i128| if den > 0 { Some(Ratio { num, den }) } else { None };
    let h: BTreeMap<&str, Option<Ratio>> = degree
        .iter()
        .map(|(&a, &(i, o))| (a, frac((i - o) * sum_tot, if sum_in > 0 { sum_in * (i + o) } else { 0 })))
        .collect();
    let t_all: BTreeMap<&str, Option<Ratio>> = degree
        .iter()
        .map(|(&a, &(i, o))| (a, frac(i * sum_tot, if sum_prod > 0 { sum_prod * (i + o) } else { 0 })))
        .collect();

    let code = |x: &str| jur.get(x).map(String::as_str).unwrap_or("n.a.");
    let differs = |x: &str, y: &str| code(x) == "n.a." || code(x) != code(y);
    let children = |p: &str| -> Vec<&str> { internal.iter().filter(|l| l.1 == p && l.0 != hq).map(|l| l.0).collect() };
    let third: BTreeMap<&str, bool> = affiliates
        .iter()
        .map(|&a| (a, differs(a, hq) && children(a).iter().any(|&c| differs(a, c))))
        .collect();
    let h_pos = |a: &str| h[a].is_some_and(Ratio::positive);
    let t_pos = |a: &str| t_all[a].is_some_and(Ratio::positive);

    // least fixed point of: candidates expand, conduits under candidates, conduits that hold become candidates
    let mut conduit: BTreeSet<&str> = BTreeSet::new();
    loop {
        let candidates: BTreeSet<&str> = affiliates
            .iter()
            .copied()
            .filter(|&a| (dist[a] == 1 || conduit.contains(a)) && h_pos(a) && third[a])
            .collect();
        let next: BTreeSet<&str> = candidates
            .iter()
            .flat_map(|&p| children(p))
            .filter(|&c| t_pos(c) && third[c])
            .collect();
        if next == conduit {
            break;
        }
        conduit = next;
    }
    let candidates: BTreeSet<&str> = affiliates
        .iter()
        .copied()
        .filter(|&a| (dist[a] == 1 || conduit.contains(a)) && h_pos(a) && third[a])
        .collect();
    let evaluated: BTreeSet<&str> = affiliates
        .iter()
        .copied()
        .filter(|&a| dist[a] == 1)
        .chain(candidates.iter().flat_map(|&p| children(p)))
        .collect();

    let mut role = BTreeMap::new();
    for &a in &affiliates {
        let parent_of_conduit = candidates.contains(a) && children(a).iter().any(|c| conduit.contains(c));
        let holding = parent_of_conduit || (conduit.contains(a) && h_pos(a) && third[a]);
        let r = match (holding, conduit.contains(a)) {
            (true, true) => Role::HoldingAndConduit,
            (true, false) => Role::Holding,
            (false, true) => Role::Conduit,
            (false, false) => Role::None,
        };
        role.insert(a.to_string(), r);
    }
    let own = |m: BTreeMap<&str, Option<Ratio>>| m.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Evaluation {
        layer: affiliates.iter().map(|&a| (a.to_string(), dist[a])).collect(),
        degree: degree.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        h: own(h),
        t: own(t_all.into_iter().filter(|(k, _)| evaluated.contains(k)).collect()),
        third_country: third.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        role,
    }
}
