//! Curve datasets: labels, TSV persistence, CM lookup and summary tables.
//!
//! Record lines are
//! `label<TAB>conductor_gen<TAB>norm<TAB>[a1;a2;a3;a4;a6]<TAB>torsion<TAB>rank<TAB>class_id`
//! with an empty rank column when unknown. Isogeny edges are stored as
//! `#edge<TAB>label<TAB>label<TAB>degree` and cross-references to other
//! labelings as `#xref<TAB>class_id<TAB>text`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ideal::{count_ideals_of_norm, ideals_of_norm, primes_up_to_norm, IdealHNF};
use crate::isogeny::{isogeny_class, IsogenyClassGraph};
use crate::residue::count_points;
use crate::tate::conductor_and_minimal_model;
use crate::torsion::{label as torsion_label, parse_label, torsion_subgroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub conductor: IdealHNF,
    pub norm: BigInt,
    pub curve: Curve,
    /// (m, n) for Z/m × Z/n.
    pub torsion: (u64, u64),
    pub rank: Option<u32>,
    pub class_id: String,
    pub cm: Option<(i64, u64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<CurveRecord>,
    pub edges: Vec<(String, String, u64)>,
    pub xrefs: BTreeMap<String, String>,
}

/// 1-based position of the ideal in the enumeration by (norm, HNF).
pub fn level_index(n: &IdealHNF) -> u64 {
    let norm = n.norm().to_u64().expect("norm fits in u64");
    let below: u64 = (1..norm).map(count_ideals_of_norm).sum();
    let pos = ideals_of_norm(norm).iter().position(|x| x == n).expect("ideal of its own norm");
    below + pos as u64 + 1
}

/// a, b, ..., z, ba, bb, ...
pub fn class_letters(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (i % 26) as u8);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

impl Dataset {
    /// Dataset holding the full isogeny classes of the given curves.
    pub fn from_curves(curves: &[Curve]) -> Result<Dataset> {
        let mut graphs: Vec<IsogenyClassGraph> = Vec::new();
        for c in curves {
            let known = graphs.iter().any(|g| g.curves.iter().any(|d| d.is_isomorphic(c).is_some()));
            if !known {
                graphs.push(isogeny_class(c)?);
            }
        }
        let mut ds = Dataset::default();
        for (k, g) in graphs.iter().enumerate() {
            let id = format!("tmp{k}");
            for (i, c) in g.curves.iter().enumerate() {
                let gd = conductor_and_minimal_model(c)?;
                let t = torsion_subgroup(&gd.minimal)?;
                ds.records.push(CurveRecord {
                    label: format!("{id}.{i}"),
                    norm: gd.conductor.norm(),
                    conductor: gd.conductor,
                    cm: cm_check(&gd.minimal.j_invariant()?),
                    curve: gd.minimal,
                    torsion: (t.m, t.n),
                    rank: None,
                    class_id: id.clone(),
                });
            }
            for &(i, j, l) in &g.edges {
                ds.edges.push((format!("{id}.{i}"), format!("{id}.{j}"), l));
            }
        }
        Ok(ds.assign_labels())
    }

    /// Levels by (norm, HNF), classes lettered by their smallest curve, curves
    /// numbered in sorted order.
    pub fn assign_labels(self) -> Dataset {
        let mut classes: BTreeMap<String, Vec<CurveRecord>> = BTreeMap::new();
        for r in self.records {
            classes.entry(r.class_id.clone()).or_default().push(r);
        }
        for v in classes.values_mut() {
            v.sort_by(|x, y| x.curve.cmp(&y.curve));
        }
        let mut by_level: BTreeMap<(BigInt, IdealHNF), Vec<Vec<CurveRecord>>> = BTreeMap::new();
        for (_, v) in classes {
            by_level.entry((v[0].norm.clone(), v[0].conductor.clone())).or_default().push(v);
        }
        let mut rename: BTreeMap<String, String> = BTreeMap::new();
        let mut class_rename: BTreeMap<String, String> = BTreeMap::new();
        let mut records = Vec::new();
        for ((_, level), mut cls) in by_level {
            cls.sort_by(|x, y| x[0].curve.cmp(&y[0].curve));
            let idx = level_index(&level);
            for (k, cl) in cls.into_iter().enumerate() {
                let id = format!("{idx}{}", class_letters(k));
                if let Some(old) = cl.first() {
                    class_rename.insert(old.class_id.clone(), id.clone());
                }
                for (i, mut r) in cl.into_iter().enumerate() {
                    let label = format!("{id}{}", i + 1);
                    rename.insert(r.label.clone(), label.clone());
                    r.label = label;
                    r.class_id = id.clone();
                    records.push(r);
                }
            }
        }
        let mut edges: Vec<(String, String, u64)> = self
            .edges
            .iter()
            .map(|(x, y, l)| {
                let (x, y) = (rename[x].clone(), rename[y].clone());
                if label_key(&x) <= label_key(&y) {
                    (x, y, *l)
                } else {
                    (y, x, *l)
                }
            })
            .collect();
        edges.sort_by_key(|a| (label_key(&a.0), label_key(&a.1), a.2));
        let xrefs = self.xrefs.into_iter().map(|(k, v)| (class_rename.get(&k).cloned().unwrap_or(k), v)).collect();
        Dataset { records, edges, xrefs }
    }

    pub fn class(&self, class_id: &str) -> Vec<&CurveRecord> {
        self.records.iter().filter(|r| r.class_id == class_id).collect()
    }

    pub fn class_ids(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.records.iter().filter(|r| seen.insert(r.class_id.clone())).map(|r| r.class_id.clone()).collect()
    }

    /// Isogeny graph of one class, from the stored edges.
    pub fn class_graph(&self, class_id: &str) -> Option<IsogenyClassGraph> {
        let members = self.class(class_id);
        if members.is_empty() {
            return None;
        }
        let pos: BTreeMap<&str, usize> = members.iter().enumerate().map(|(i, r)| (r.label.as_str(), i)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|(x, y, l)| Some((*pos.get(x.as_str())?, *pos.get(y.as_str())?, *l)))
            .collect();
        Some(IsogenyClassGraph {
            curves: members.iter().map(|r| r.curve.clone()).collect(),
            edges,
            label: Some(class_id.to_string()),
        })
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let rank = r.rank.map(|k| k.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.label,
                r.conductor.generator_string(),
                r.norm,
                r.curve.to_string_with(";"),
                torsion_label(r.torsion.0, r.torsion.1),
                rank,
                r.class_id
            );
        }
        for (x, y, l) in &self.edges {
            let _ = writeln!(s, "#edge\t{x}\t{y}\t{l}");
        }
        for (k, v) in &self.xrefs {
            let _ = writeln!(s, "#xref\t{k}\t{v}");
        }
        s
    }

    pub fn from_tsv(text: &str) -> Result<Dataset> {
        let mut ds = Dataset::default();
        for (i, line) in text.lines().enumerate() {
            let at = || format!("line {}", i + 1);
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            match cols[0] {
                "#edge" => {
                    if cols.len() != 4 {
                        return Err(Error::parse(at(), "edge needs two labels and a degree"));
                    }
                    let l = cols[3].parse().map_err(|_| Error::parse(at(), "bad degree"))?;
                    ds.edges.push((cols[1].to_string(), cols[2].to_string(), l));
                }
                "#xref" => {
                    if cols.len() != 3 {
                        return Err(Error::parse(at(), "xref needs a class and a text"));
                    }
                    ds.xrefs.insert(cols[1].to_string(), cols[2].to_string());
                }
                c if c.starts_with('#') => {}
                _ => ds.records.push(parse_record(&cols).map_err(|e| match e {
                    Error::Parse { message, .. } => Error::parse(at(), message),
                    e => Error::parse(at(), e.to_string()),
                })?),
            }
        }
        Ok(ds)
    }

    pub fn read(path: &Path) -> Result<Dataset> {
        Dataset::from_tsv(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_tsv())?;
        Ok(())
    }

    /// Labels whose stored conductor does not match the one computed from the
    /// curve, and classes whose members disagree at one of the first five good primes.
    pub fn verify(&self) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for r in &self.records {
            let g = conductor_and_minimal_model(&r.curve)?;
            if g.conductor != r.conductor || g.conductor.norm() != r.norm {
                bad.push(r.label.clone());
            }
        }
        for id in self.class_ids() {
            let members = self.class(&id);
            let primes: Vec<_> = primes_up_to_norm(200)
                .into_iter()
                .filter(|p| !p.ideal.divides(&members[0].conductor))
                .take(5)
                .collect();
            let aps = |c: &Curve| -> Vec<Option<i64>> { primes.iter().map(|p| count_points(c, p).ok().map(|r| r.a_p)).collect() };
            let first = aps(&members[0].curve);
            for m in &members {
                let a = aps(&m.curve);
                if a != first || a.contains(&None) {
                    bad.push(id.clone());
                    break;
                }
            }
        }
        Ok(bad)
    }
}

/// Sort key that orders "12a3" by (12, "a", 3).
fn label_key(s: &str) -> (u64, String, u64) {
    let d: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
    let rest = &s[d.len()..];
    let l: String = rest.chars().take_while(|c| c.is_ascii_lowercase()).collect();
    let n: String = rest[l.len()..].to_string();
    (d.parse().unwrap_or(0), l, n.parse().unwrap_or(0))
}

fn parse_record(cols: &[&str]) -> Result<CurveRecord> {
    if cols.len() != 7 {
        return Err(Error::parse("", format!("expected 7 columns, found {}", cols.len())));
    }
    let conductor: IdealHNF = cols[1].parse()?;
    let norm: BigInt = cols[2].parse().map_err(|_| Error::parse("", "bad norm"))?;
    if conductor.norm() != norm {
        return Err(Error::parse("", "norm does not match conductor"));
    }
    let curve: Curve = cols[3].parse()?;
    let torsion = parse_label(cols[4])?;
    let rank = match cols[5].trim() {
        "" => None,
        s => Some(s.parse().map_err(|_| Error::parse("", "bad rank"))?),
    };
    Ok(CurveRecord {
        label: cols[0].to_string(),
        conductor,
        norm,
        cm: curve.j_invariant().ok().and_then(|j| cm_check(&j)),
        curve,
        torsion,
        rank,
        class_id: cols[6].to_string(),
    })
}

const CM_TABLE: [(i64, u64, &str); 15] = [
    (-3, 3, "-12288000"),
    (-3, 2, "54000"),
    (-3, 1, "0"),
    (-4, 2, "287496"),
    (-4, 1, "1728"),
    (-7, 2, "16581375"),
    (-7, 1, "-3375"),
    (-8, 1, "8000"),
    (-11, 1, "-32768"),
    (-19, 1, "-884736"),
    (-43, 1, "-884736000"),
    (-67, 1, "-147197952000"),
    (-163, 1, "-262537412640768000"),
    (-23, 2, "3792102031375a^2 - 6654675189750a + 5023465669375"),
    (-23, 1, "-1084125a^2 + 1904875a - 1437500"),
];

/// CM j-invariants lying in F, with discriminant D and conductor f.
pub fn cm_table() -> &'static [(i64, u64, FieldElement)] {
    static T: OnceLock<Vec<(i64, u64, FieldElement)>> = OnceLock::new();
    T.get_or_init(|| CM_TABLE.iter().map(|(d, f, j)| (*d, *f, j.parse().expect("table entry"))).collect())
}

pub fn cm_check(j: &FieldElement) -> Option<(i64, u64)> {
    cm_table().iter().find(|(_, _, x)| x == j).map(|(d, f, _)| (*d, *f))
}

pub fn export_graph(g: &IsogenyClassGraph, path: &Path) -> Result<()> {
    std::fs::write(path, g.to_dot())?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankRow {
    pub rank: Option<u32>,
    pub isog: usize,
    pub isom: usize,
    pub smallest_norm: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleRow {
    /// Isogeny degree, or None for classes without isogenies.
    pub key: Option<u64>,
    pub isog: usize,
    pub isom: usize,
    pub example: String,
    pub curve: Curve,
    pub norm: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionRow {
    pub torsion: (u64, u64),
    pub isom: usize,
    pub example: String,
    pub curve: Curve,
    pub norm: BigInt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tables {
    pub ranks: Vec<RankRow>,
    pub class_sizes: BTreeMap<usize, usize>,
    pub degrees: Vec<ExampleRow>,
    pub torsion: Vec<TorsionRow>,
}

/// Tables of counts by rank, class size, isogeny degree and torsion structure.
/// Example columns use the record with the smallest label.
pub fn emit_tables(ds: &Dataset) -> Tables {
    let mut t = Tables::default();
    let first = |rs: &mut dyn Iterator<Item = &CurveRecord>| rs.min_by_key(|r| label_key(&r.label)).cloned();
    let ids = ds.class_ids();

    let mut rank_rows: BTreeMap<Option<u32>, (usize, usize, BigInt)> = BTreeMap::new();
    for id in &ids {
        let m = ds.class(id);
        let rank = m.iter().find_map(|r| r.rank);
        let e = rank_rows.entry(rank).or_insert((0, 0, m[0].norm.clone()));
        e.0 += 1;
        e.1 += m.len();
        e.2 = e.2.clone().min(m[0].norm.clone());
        *t.class_sizes.entry(m.len()).or_default() += 1;
    }
    t.ranks = rank_rows.into_iter().map(|(rank, (isog, isom, n))| RankRow { rank, isog, isom, smallest_norm: n }).collect();

    let class_degrees = |id: &str| -> BTreeSet<u64> {
        let labels: BTreeSet<&str> = ds.class(id).iter().map(|r| r.label.as_str()).collect();
        ds.edges.iter().filter(|e| labels.contains(e.0.as_str())).map(|e| e.2).collect()
    };
    let mut keys: BTreeMap<Option<u64>, Vec<&String>> = BTreeMap::new();
    for id in &ids {
        let d = class_degrees(id);
        if d.is_empty() {
            keys.entry(None).or_default().push(id);
        }
        for l in d {
            keys.entry(Some(l)).or_default().push(id);
        }
    }
    for (key, cls) in keys {
        let members: Vec<&CurveRecord> = cls.iter().flat_map(|id| ds.class(id)).collect();
        let ex = match key {
            None => first(&mut members.iter().copied()),
            Some(l) => {
                let with_edge: BTreeSet<&str> =
                    ds.edges.iter().filter(|e| e.2 == l).flat_map(|e| [e.0.as_str(), e.1.as_str()]).collect();
                first(&mut members.iter().copied().filter(|r| with_edge.contains(r.label.as_str())))
            }
        }
        .expect("nonempty");
        t.degrees.push(ExampleRow { key, isog: cls.len(), isom: members.len(), example: ex.label, curve: ex.curve, norm: ex.norm });
    }

    let mut tors: BTreeMap<(u64, u64), Vec<&CurveRecord>> = BTreeMap::new();
    for r in &ds.records {
        tors.entry(r.torsion).or_default().push(r);
    }
    let mut rows: Vec<TorsionRow> = tors
        .into_iter()
        .map(|(k, v)| {
            let ex = first(&mut v.iter().copied()).expect("nonempty");
            TorsionRow { torsion: k, isom: v.len(), example: ex.label, curve: ex.curve, norm: ex.norm }
        })
        .collect();
    rows.sort_by_key(|r| (r.torsion.0 * r.torsion.1, r.torsion.1));
    t.torsion = rows;
    t
}

impl fmt::Display for Tables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Table 1: curves by rank")?;
        writeln!(f, "rank\t#isog\t#isom\tsmallest norm")?;
        let (mut gi, mut gm) = (0, 0);
        for r in &self.ranks {
            let rank = r.rank.map(|k| k.to_string()).unwrap_or_else(|| "n/a".to_string());
            writeln!(f, "{rank}\t{}\t{}\t{}", r.isog, r.isom, r.smallest_norm)?;
            gi += r.isog;
            gm += r.isom;
        }
        writeln!(f, "total\t{gi}\t{gm}")?;
        writeln!(f)?;
        writeln!(f, "Table 2: isogeny class sizes")?;
        writeln!(f, "size\tnumber")?;
        for (s, n) in &self.class_sizes {
            writeln!(f, "{s}\t{n}")?;
        }
        writeln!(f)?;
        writeln!(f, "Table 3: prime isogeny degrees")?;
        writeln!(f, "degree\t#isog\t#isom\texample\tcurve\tnorm")?;
        for r in &self.degrees {
            let k = r.key.map(|l| l.to_string()).unwrap_or_else(|| "None".to_string());
            writeln!(f, "{k}\t{}\t{}\t{}\t{}\t{}", r.isog, r.isom, r.example, r.curve, r.norm)?;
        }
        writeln!(f)?;
        writeln!(f, "Table 4: torsion subgroups")?;
        writeln!(f, "torsion\t#isom\texample\tcurve\tnorm")?;
        for r in &self.torsion {
            writeln!(f, "{}\t{}\t{}\t{}\t{}", torsion_label(r.torsion.0, r.torsion.1), r.isom, r.example, r.curve, r.norm)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters() {
        assert_eq!(class_letters(0), "a");
        assert_eq!(class_letters(25), "z");
        assert_eq!(class_letters(26), "ba");
        assert_eq!(label_key("140ab12"), (140, "ab".to_string(), 12));
    }

    #[test]
    fn cm_lookup() {
        assert_eq!(cm_check(&FieldElement::zero()), Some((-3, 1)));
        let j: FieldElement = "-1084125a^2 + 1904875a - 1437500".parse().unwrap();
        assert_eq!(cm_check(&j), Some((-23, 1)));
        assert_eq!(cm_check(&FieldElement::one()), None);
        assert_eq!(cm_table().len(), 15);
    }

    #[test]
    fn empty_dataset() {
        let ds = Dataset::default();
        assert_eq!(Dataset::from_tsv(&ds.to_tsv()).unwrap(), ds);
        let t = emit_tables(&ds);
        assert!(t.ranks.is_empty() && t.class_sizes.is_empty() && t.degrees.is_empty() && t.torsion.is_empty());
    }

    #[test]
    fn level_indices_start_at_one() {
        assert_eq!(level_index(&IdealHNF::unit()), 1);
        let n: IdealHNF = "a^2-9".parse().unwrap();
        let below: u64 = (1..665).map(count_ideals_of_norm).sum();
        assert!(level_index(&n) > below);
    }

    #[test]
    fn missing_rank_and_bad_lines() {
        let line = "1a1\t(1)\t1\t[0;0;0;0;1]\tZ6\t\t1a";
        let ds = Dataset::from_tsv(line).unwrap();
        assert_eq!(ds.records[0].rank, None);
        assert_eq!(ds.records[0].cm, Some((-3, 1)));
        assert!(matches!(Dataset::from_tsv("1a1\t(1)\t2\t[0;0;0;0;1]\tZ6\t\t1a"), Err(Error::Parse { .. })));
        assert!(matches!(Dataset::from_tsv("\n#edge\tx\ty"), Err(Error::Parse { location, .. }) if location == "line 2"));
    }
}
