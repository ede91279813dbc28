//! Per-jurisdiction inputs: GDP, statutory rate and withholding-tax centrality.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Jurisdiction;

pub const PROFILE_HEADER: [&str; 5] = ["code", "gdp", "gdp_year", "statutory_rate", "wtc"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JurisdictionProfile {
    pub code: Jurisdiction,
    pub gdp: Option<f64>,
    pub gdp_year: Option<i32>,
    /// Fraction, e.g. 0.25.
    pub statutory_rate: Option<f64>,
    pub wtc: Option<f64>,
}

pub type Profiles = BTreeMap<Jurisdiction, JurisdictionProfile>;

/// GDP of `code`, if known.
pub fn gdp(profiles: &Profiles, code: &Jurisdiction) -> Option<f64> {
    profiles.get(code).and_then(|p| p.gdp)
}

/// Σ GDP over every profile that carries one.
pub fn total_gdp(profiles: &Profiles) -> f64 {
    profiles.values().filter_map(|p| p.gdp).sum()
}

pub fn load_profiles(path: impl AsRef<Path>) -> Result<Profiles> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    if rdr.headers()?.iter().ne(PROFILE_HEADER) {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header `{}`", PROFILE_HEADER.join(",")),
        });
    }
    let mut out = Profiles::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        if rec.len() != PROFILE_HEADER.len() {
            return Err(bad(format!("expected {} fields", PROFILE_HEADER.len())));
        }
        let num = |i: usize| -> Result<Option<f64>> {
            if rec[i].is_empty() {
                return Ok(None);
            }
            rec[i]
                .parse::<f64>()
                .map(Some)
                .map_err(|_| bad(format!("invalid {} `{}`", PROFILE_HEADER[i], &rec[i])))
        };
        let code = Jurisdiction::parse(&rec[0])
            .filter(|c| !c.is_na())
            .ok_or_else(|| bad(format!("invalid code `{}`", &rec[0])))?;
        let gdp = num(1)?;
        if gdp.is_some_and(|g| !(g > 0.0)) {
            return Err(bad("gdp must be positive".into()));
        }
        let gdp_year = if rec[2].is_empty() {
            None
        } else {
            Some(rec[2].parse().map_err(|_| bad(format!("invalid gdp_year `{}`", &rec[2])))?)
        };
        let wtc = num(4)?;
        if wtc.is_some_and(|w| !(w >= 0.0)) {
            return Err(bad("wtc must be non-negative".into()));
        }
        let profile = JurisdictionProfile {
            code: code.clone(),
            gdp,
            gdp_year,
            statutory_rate: num(3)?,
            wtc,
        };
        if out.insert(code.clone(), profile).is_some() {
            return Err(bad(format!("duplicate code `{code}`")));
        }
    }
    Ok(out)
}

pub fn write_profiles(path: impl AsRef<Path>, profiles: &Profiles) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(PROFILE_HEADER)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for p in profiles.values() {
        w.write_record([
            p.code.to_string(),
            opt(p.gdp),
            p.gdp_year.map(|y| y.to_string()).unwrap_or_default(),
            opt(p.statutory_rate),
            opt(p.wtc),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
