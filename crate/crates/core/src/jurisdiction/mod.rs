//! Jurisdiction-level analytics: sink and conduit centralities, key-firm
//! tallies, ownership-chain and headquarters tables, and regressions of
//! key-firm counts on the withholding-tax centrality.

mod flows;
mod ols;
mod profiles;
mod tallies;

pub use flows::{
    border_flows, conduit_outward_centrality, jurisdiction_flows, pass_through, sink_centrality, CentralityRow, EdgeValues,
    FlowAggregate, CONDUIT_THRESHOLD, SINK_THRESHOLD,
};
pub use ols::{ols_regression, RegressionResult};
pub use profiles::{gdp, load_profiles, total_gdp, write_profiles, JurisdictionProfile, Profiles, PROFILE_HEADER};
pub use tallies::{
    chain_keys, chain_tables, hq_tables, load_tally, ranked, tally_by_bowtie, tally_by_jurisdiction, write_bowtie_tally,
    write_chain, write_hq_tables, write_tally, ChainTable, Corpus, Dimension, HqTables, TallyRow,
};

use std::collections::BTreeMap;

use crate::keyfirms::Role;

/// Per role, (wtc, key-firm count) over jurisdictions that carry a wtc score.
/// Jurisdictions without key firms of that role enter with count 0.
pub fn regression_inputs(corpus: &Corpus<'_>, profiles: &Profiles) -> BTreeMap<Role, (Vec<f64>, Vec<f64>)> {
    Role::KEY
        .into_iter()
        .map(|role| {
            let dim = match role {
                Role::Holding => Dimension::Holding,
                Role::HoldingAndConduit => Dimension::Hc,
                _ => Dimension::Conduit,
            };
            let counts: BTreeMap<String, usize> =
                tally_by_jurisdiction(corpus, dim).into_iter().map(|r| (r.code, r.count)).collect();
            let (x, y) = profiles
                .values()
                .filter_map(|p| p.wtc.map(|w| (w, counts.get(p.code.as_str()).copied().unwrap_or(0) as f64)))
                .unzip();
            (role, (x, y))
        })
        .collect()
}
