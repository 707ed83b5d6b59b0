use std::path::PathBuf;
use std::process::Command;

fn ec23(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ec23")).args(args).output().unwrap();
    (out.status.success(), String::from_utf8(out.stdout).unwrap())
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ec23-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const E385: &str = "[a^2+1, -a^2+a-1, 0, 1, 0]";

#[test]
fn conductor_and_torsion() {
    let (ok, out) = ec23(&["conductor", "--curve", E385]);
    assert!(ok);
    assert!(out.lines().any(|l| l == "norm\t385"), "{out}");
    assert_eq!(out.lines().filter(|l| l.contains("v(disc)")).count(), 3);

    let (ok, out) = ec23(&["torsion", "--curve", "[a^2, -a^2-a-1, a^2+1, -4a^2+11a-5, 6a^2-15a+11]"]);
    assert!(ok);
    assert_eq!(out.lines().next(), Some("Z2 x Z12"));
}

#[test]
fn ap_rows_respect_bound_and_hasse() {
    let (ok, out) = ec23(&["ap", "--curve", E385, "--bound", "30"]);
    assert!(ok);
    let rows: Vec<(u64, i64)> = out
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(!rows.is_empty());
    for (q, ap) in rows {
        assert!(q <= 30 && ![5, 7, 11].contains(&q));
        assert!(ap * ap <= 4 * q as i64);
    }
}

#[test]
fn family_search_prints_curves() {
    let (ok, out) = ec23(&["search", "--conductor", "a^2-9", "--strategy", "family", "--family", "Z6", "--effort", "1"]);
    assert!(ok);
    assert!(!out.trim().is_empty());
}

#[test]
fn isogeny_class_and_dataset_commands() {
    let dot = tmp("class.dot");
    let (ok, out) = ec23(&["isogeny-class", "--curve", E385, "--dot", dot.to_str().unwrap()]);
    assert!(ok);
    assert!(out.lines().count() >= 12);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));

    let bad = ec23(&["tables", "--data", tmp("missing.tsv").to_str().unwrap()]);
    assert!(!bad.0);
    let bad = ec23(&["conductor", "--curve", "[0, 0, 0, 0, 0]"]);
    assert!(!bad.0);
}

#[test]
fn ledger_reads_dimension_file() {
    let dims = tmp("dims.tsv");
    std::fs::write(&dims, "# gen\tnorm\ttotal_dim\n1\t1\t1\n").unwrap();
    let (ok, out) = ec23(&["ledger", "--dims", dims.to_str().unwrap()]);
    assert!(ok, "{out}");
    assert!(out.contains("unexplained"));
}

#[test]
fn search_output_feeds_tables_and_graph() {
    let data = tmp("curves.tsv");
    let args = ["search", "--conductor", "a^2-9", "--strategy", "family", "--family", "Z6", "--effort", "1"];
    let (ok, _) = ec23(&[&args[..], &["--out", data.to_str().unwrap()]].concat());
    assert!(ok);
    let text = std::fs::read_to_string(&data).unwrap();
    let first = text.lines().next().unwrap();
    let class = first.split('\t').next_back().unwrap().to_string();
    assert!(first.split('\t').nth(2) == Some("665"), "{first}");

    // writing again merges instead of duplicating
    let (ok, _) = ec23(&[&args[..], &["--out", data.to_str().unwrap()]].concat());
    assert!(ok);
    assert_eq!(std::fs::read_to_string(&data).unwrap(), text);

    let (ok, out) = ec23(&["tables", "--data", data.to_str().unwrap()]);
    assert!(ok);
    assert!(out.contains("665"), "{out}");
    let dot = tmp("one.dot");
    let (ok, _) = ec23(&["graph", "--data", data.to_str().unwrap(), "--class", &class, "--dot", dot.to_str().unwrap()]);
    assert!(ok);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));
}
