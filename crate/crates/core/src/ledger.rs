//! Cusp counts, Eisenstein ranks and oldform bookkeeping for levels whose
//! total cohomology dimension is known.
//!
//! The input format for [`ingest_dims`] is one level per line,
//! `generator<TAB>norm<TAB>total_dim`; blank lines and lines starting with
//! `#` are skipped.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ideal::{divisors, factor_ideal, phi_u, IdealHNF};

/// c(n) = Σ_{d | n} φ_u(d + n/d).
pub fn cusp_count(n: &IdealHNF) -> u64 {
    divisors(n)
        .iter()
        .map(|d| {
            let co = n.quotient(d).expect("divisor");
            phi_u(&d.add(&co))
        })
        .sum()
}

/// Number of ideal divisors.
pub fn sigma0(n: &IdealHNF) -> u64 {
    factor_ideal(n).iter().map(|(_, e)| *e as u64 + 1).product()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: IdealHNF,
    pub total_dim: Option<i64>,
    pub c: u64,
    pub eis_rank: i64,
    pub cusp_dim: Option<i64>,
    pub new_dim: Option<i64>,
    pub curve_classes_found: usize,
}

impl LevelRecord {
    pub fn new(level: IdealHNF, total_dim: Option<i64>) -> Self {
        let c = cusp_count(&level);
        eisenstein_and_cuspidal(LevelRecord {
            level,
            total_dim,
            c,
            eis_rank: 0,
            cusp_dim: None,
            new_dim: None,
            curve_classes_found: 0,
        })
    }

    pub fn require_cusp_dim(&self) -> Result<i64> {
        self.cusp_dim.ok_or(Error::MissingTotalDim)
    }
}

/// Fills eis_rank = 2c - 1 and, when the total dimension is known, the cuspidal part.
pub fn eisenstein_and_cuspidal(mut rec: LevelRecord) -> LevelRecord {
    rec.eis_rank = 2 * rec.c as i64 - 1;
    rec.cusp_dim = rec.total_dim.map(|t| t - rec.eis_rank);
    rec
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NewspaceLedger {
    pub new_dim: BTreeMap<IdealHNF, i64>,
    /// Levels where the old contributions exceed the cuspidal dimension.
    pub negative: Vec<IdealHNF>,
    /// Old contribution subtracted at each level.
    pub old_dim: BTreeMap<IdealHNF, i64>,
}

/// new(N) = cusp(N) - Σ_{n | N, n ≠ N} new(n)·σ₀(N/n), by increasing norm.
/// Levels without a cuspidal dimension are skipped, and divisors missing from
/// the input contribute nothing.
pub fn newspace_ledger(records: &BTreeMap<IdealHNF, LevelRecord>) -> NewspaceLedger {
    let mut levels: Vec<&LevelRecord> = records.values().filter(|r| r.cusp_dim.is_some()).collect();
    levels.sort_by(|x, y| (x.level.norm(), &x.level).cmp(&(y.level.norm(), &y.level)));
    let mut out = NewspaceLedger::default();
    for rec in levels {
        let big = &rec.level;
        let mut old = 0i64;
        for (n, k) in &out.new_dim {
            if n != big && n.divides(big) {
                old += k * sigma0(&big.quotient(n).expect("divisor")) as i64;
            }
        }
        let new = rec.cusp_dim.unwrap() - old;
        if new < 0 {
            out.negative.push(big.clone());
        }
        out.old_dim.insert(big.clone(), old);
        out.new_dim.insert(big.clone(), new);
    }
    out
}

/// Copies the ledger's new dimensions back into the records.
pub fn annotate(records: &mut BTreeMap<IdealHNF, LevelRecord>, ledger: &NewspaceLedger) {
    for (n, rec) in records.iter_mut() {
        rec.new_dim = ledger.new_dim.get(n).copied();
    }
}

pub fn ingest_dims(text: &str) -> Result<BTreeMap<IdealHNF, LevelRecord>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = format!("line {}", i + 1);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(at, "expected generator, norm and total_dim"));
        }
        let level: IdealHNF = cols[0].parse().map_err(|_| Error::parse(at.clone(), "bad generator"))?;
        let norm: BigInt = cols[1].trim().parse().map_err(|_| Error::parse(at.clone(), "bad norm"))?;
        if level.norm() != norm {
            return Err(Error::parse(at, format!("norm {} does not match generator", norm)));
        }
        let total: i64 = cols[2].trim().parse().map_err(|_| Error::parse(at.clone(), "bad dimension"))?;
        if out.contains_key(&level) {
            return Err(Error::DuplicateLevel(level.generator_string()));
        }
        out.insert(level.clone(), LevelRecord::new(level, Some(total)));
    }
    Ok(out)
}

pub fn ingest_dims_file(path: &Path) -> Result<BTreeMap<IdealHNF, LevelRecord>> {
    ingest_dims(&std::fs::read_to_string(path)?)
}
