use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ec23::curve::Curve;
use ec23::dataset::{emit_tables, export_graph, Dataset};
use ec23::error::{Error, Result};
use ec23::ideal::IdealHNF;
use ec23::isogeny::isogeny_class;
use ec23::ledger::{annotate, ingest_dims_file, newspace_ledger};
use ec23::residue::ap_list;
use ec23::search::{
    naive_search, prescribed_reduction_search_logged, quadratic_twist, torsion_family_search, twist_candidates, SearchBox,
    DEFAULT_EFFORT, FAMILIES,
};
use ec23::tate::{conductor_and_minimal_model, kodaira_summary};
use ec23::torsion::torsion_subgroup;

/// Elliptic curves over Q(a), a^3 - a^2 + 1 = 0.
#[derive(Parser)]
#[command(name = "ec23", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Naive,
    Family,
    Twist,
    Prescribed,
}

#[derive(Subcommand)]
enum Cmd {
    /// a_p at good primes of norm up to the bound.
    Ap {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, default_value_t = 100)]
        bound: u64,
    },
    /// Conductor, minimal model and local reduction types.
    Conductor {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
    /// Torsion subgroup with generators.
    Torsion {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
    /// Look for curves with the given conductor.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        conductor: String,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// Box bound for naive and family searches, number of rounds for prescribed.
        #[arg(long)]
        effort: Option<u32>,
        /// Per-candidate effort records as CSV (prescribed strategy).
        #[arg(long)]
        log: Option<PathBuf>,
        /// Torsion family, e.g. "Z6" or "Z2 x Z4"; all families when omitted.
        #[arg(long)]
        family: Option<String>,
        /// Curve to twist (twist strategy).
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        /// Add the curves found and their isogeny classes to this dataset file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isogeny class of a curve.
    IsogenyClass {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        /// Write a DOT graph here ("-" for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Cusp counts and predicted new dimensions from ingested cohomology dimensions.
    Ledger {
        #[arg(long)]
        dims: PathBuf,
        /// Dataset used to count curve classes found at each level.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Summary tables of a dataset.
    Tables {
        #[arg(long)]
        data: PathBuf,
    },
    /// DOT graph of one isogeny class in a dataset.
    Graph {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        class: String,
        #[arg(long)]
        dot: PathBuf,
    },
}

fn curve(s: &str) -> Result<Curve> {
    s.parse()
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Ap { curve: c, bound } => {
            let e = curve(&c)?;
            for r in ap_list(&e, bound) {
                println!("{}\t{}\t{}", r.prime.norm(), r.prime, r.a_p);
            }
        }
        Cmd::Conductor { curve: c } => {
            let g = conductor_and_minimal_model(&curve(&c)?)?;
            println!("conductor\t{}", g.conductor.generator_string());
            println!("norm\t{}", g.conductor.norm());
            println!("minimal\t{}", g.minimal);
            for (p, v, f, k) in kodaira_summary(&g) {
                println!("{p}\tv(disc)={v}\tf={f}\t{k}");
            }
        }
        Cmd::Torsion { curve: c } => {
            let t = torsion_subgroup(&curve(&c)?)?;
            println!("{}", t.label());
            for p in &t.generators {
                println!("{p}");
            }
        }
        Cmd::Search { conductor, strategy, effort, log, family, base, out } => {
            let n: IdealHNF = conductor.parse()?;
            let found = match strategy {
                Strategy::Naive => naive_search(&n, &SearchBox::new(effort.unwrap_or(1) as i64)),
                Strategy::Family => {
                    let bx = SearchBox::new(effort.unwrap_or(2) as i64);
                    let fams: Vec<&str> = match &family {
                        Some(f) => vec![f.as_str()],
                        None => FAMILIES.to_vec(),
                    };
                    let mut out: Vec<Curve> = Vec::new();
                    for f in fams {
                        for c in torsion_family_search(&n, f, &bx)? {
                            if !out.iter().any(|d| d.is_isomorphic(&c).is_some()) {
                                out.push(c);
                            }
                        }
                    }
                    out
                }
                Strategy::Twist => {
                    let b = base.ok_or_else(|| Error::parse("--base", "the twist strategy needs a base curve"))?;
                    let e = curve(&b)?;
                    let bound = n.norm().try_into().map_err(|_| Error::parse("--conductor", "norm too large"))?;
                    let mut out: Vec<Curve> = Vec::new();
                    for d in twist_candidates(&e, bound)? {
                        let t = quadratic_twist(&e, &d)?;
                        if conductor_and_minimal_model(&t)?.conductor == n && !out.iter().any(|x| x.is_isomorphic(&t).is_some()) {
                            out.push(t);
                        }
                    }
                    out
                }
                Strategy::Prescribed => {
                    let o = prescribed_reduction_search_logged(&n, effort.unwrap_or(DEFAULT_EFFORT))?;
                    if let Some(path) = &log {
                        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
                        w.write_record(["candidate", "w", "round", "height", "points_tested", "points_found", "curves_found", "millis"])
                            .map_err(|e| Error::Io(e.to_string()))?;
                        for r in &o.log {
                            w.write_record([
                                r.candidate.to_string(),
                                r.w.clone(),
                                r.round.to_string(),
                                format!("{:.3}", r.height),
                                r.points_tested.to_string(),
                                r.points_found.to_string(),
                                r.curves_found.to_string(),
                                r.millis.to_string(),
                            ])
                            .map_err(|e| Error::Io(e.to_string()))?;
                        }
                        w.flush()?;
                    }
                    o.curves
                }
            };
            for c in &found {
                println!("{c}");
            }
            if let Some(path) = out {
                let old = if path.exists() { Dataset::read(&path)? } else { Dataset::default() };
                let mut all: Vec<Curve> = old.records.iter().map(|r| r.curve.clone()).collect();
                all.extend(found);
                let mut ds = Dataset::from_curves(&all)?;
                // ranks and external labels follow the curve, not the label
                for r in &mut ds.records {
                    if let Some(o) = old.records.iter().find(|o| o.curve == r.curve) {
                        r.rank = o.rank;
                        if let Some(x) = old.xrefs.get(&o.label) {
                            ds.xrefs.insert(r.label.clone(), x.clone());
                        }
                    }
                }
                ds.write(&path)?;
            }
        }
        Cmd::IsogenyClass { curve: c, dot } => {
            let g = isogeny_class(&curve(&c)?)?;
            for (i, c) in g.curves.iter().enumerate() {
                println!("{}\t{}", i + 1, c);
            }
            for (i, j, l) in &g.edges {
                println!("{}\t{}\t{}", i + 1, j + 1, l);
            }
            match dot {
                Some(p) if p.as_os_str() == "-" => print!("{}", g.to_dot()),
                Some(p) => export_graph(&g, &p)?,
                None => {}
            }
        }
        Cmd::Ledger { dims, data } => {
            let mut recs = ingest_dims_file(&dims)?;
            if let Some(path) = data {
                let ds = Dataset::read(&path)?;
                let mut found: BTreeMap<IdealHNF, usize> = BTreeMap::new();
                for id in ds.class_ids() {
                    *found.entry(ds.class(&id)[0].conductor.clone()).or_default() += 1;
                }
                for (n, r) in recs.iter_mut() {
                    r.curve_classes_found = found.get(n).copied().unwrap_or(0);
                }
            }
            let ledger = newspace_ledger(&recs);
            annotate(&mut recs, &ledger);
            let mut rows: Vec<_> = recs.values().collect();
            rows.sort_by_key(|r| (r.level.norm(), r.level.clone()));
            println!("level\tnorm\tc\teis_rank\tcusp_dim\tnew_dim\tclasses");
            let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".to_string());
            let mut unexplained = 0;
            for r in &rows {
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.level.generator_string(),
                    r.level.norm(),
                    r.c,
                    r.eis_rank,
                    opt(r.cusp_dim),
                    opt(r.new_dim),
                    r.curve_classes_found
                );
                if r.new_dim.unwrap_or(0) > r.curve_classes_found as i64 {
                    unexplained += 1;
                }
            }
            println!("# levels with unexplained new_dim > 0: {unexplained}");
            for n in &ledger.negative {
                println!("# negative new_dim at {}", n.generator_string());
            }
        }
        Cmd::Tables { data } => {
            print!("{}", emit_tables(&Dataset::read(&data)?));
        }
        Cmd::Graph { data, class, dot } => {
            let ds = Dataset::read(&data)?;
            let g = ds.class_graph(&class).ok_or_else(|| Error::parse("--class", format!("no class {class}")))?;
            export_graph(&g, &dot)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
