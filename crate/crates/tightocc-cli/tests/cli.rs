use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn tightocc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tightocc")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(dir: &Path, args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let out = tightocc(dir, &all);
    let doc = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (doc, out.status.code().unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn graph_text(n: usize, edges: &[(usize, usize)]) -> String {
    let mut text = format!("p {n} {}\n", edges.len());
    for (u, v) in edges {
        text.push_str(&format!("e {u} {v}\n"));
    }
    text
}

fn k5(dir: &Path) {
    let edges: Vec<_> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    write(dir, "k5.gr", &graph_text(5, &edges));
}

fn tri_c4(dir: &Path) {
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (5, 6), (3, 6)];
    write(dir, "tri_c4.gr", &graph_text(7, &edges));
}

#[test]
fn oct_of_k5() {
    let dir = TempDir::new().unwrap();
    k5(dir.path());
    for method in ["brute", "compress"] {
        let (doc, code) = json(dir.path(), &["oct", "k5.gr", "--method", method]);
        assert_eq!(code, 0);
        assert_eq!(doc["result"]["size"], 3);
        assert_eq!(doc["result"]["solution"].as_array().unwrap().len(), 3);
    }
    let (doc, code) = json(dir.path(), &["oct", "k5.gr", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["size"], Value::Null);
    let table = stdout(&tightocc(dir.path(), &["oct", "k5.gr"]));
    assert!(table.starts_with("oct       3\n"), "{table}");
}

#[test]
fn pipeline_on_triangle_and_square() {
    let dir = TempDir::new().unwrap();
    tri_c4(dir.path());
    let (doc, code) = json(dir.path(), &["pipeline", "tri_c4.gr", "--k", "1", "--z", "1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["outcome"], "found");
    let selected = doc["result"]["selected"].as_array().unwrap();
    // the only odd cycle is the triangle, so any one of its vertices is optimal
    assert_eq!(selected.len(), 1);
    assert!(selected[0].as_u64().unwrap() < 3);
    assert!(doc.get("timings").is_none());
    let (doc, _) = json(dir.path(), &["pipeline", "tri_c4.gr", "--k", "1", "--z", "1", "--with-timings"]);
    assert!(doc["timings"]["elapsed_ms"].is_number());
}

#[test]
fn bad_occ_is_a_contract_failure() {
    let dir = TempDir::new().unwrap();
    tri_c4(dir.path());
    write(dir.path(), "bad.occ", "occ B: 0 1 2 / C: / R: 3 4 5 6\n");
    let out = tightocc(dir.path(), &["validate", "tri_c4.gr", "--occ", "bad.occ"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("odd cycle"), "{}", stdout(&out));
    // a head that misses part of the boundary
    write(dir.path(), "open.occ", "occ B: 3 4 / C: 5 / R: 0 1 2 6\n");
    let (doc, code) = json(dir.path(), &["validate", "tri_c4.gr", "--occ", "open.occ"]);
    assert_eq!(code, 1);
    assert_eq!(doc["result"]["valid"], false);
    // valid but not tight at the requested order
    write(dir.path(), "loose.occ", "occ B: 3 4 5 / C: 6 / R: 0 1 2\n");
    let (doc, code) = json(dir.path(), &["validate", "tri_c4.gr", "--occ", "loose.occ", "--z", "1"]);
    assert_eq!(code, 1);
    assert_eq!(doc["result"]["verdict"], "not_tight");
    let (_, code) = json(dir.path(), &["validate", "tri_c4.gr", "--occ", "loose.occ"]);
    assert_eq!(code, 0);
}

#[test]
fn io_and_parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "broken.gr", "p 3 1\ne 0 7\n");
    assert_eq!(tightocc(dir.path(), &["oct", "broken.gr"]).status.code(), Some(2));
    assert_eq!(tightocc(dir.path(), &["oct", "missing.gr"]).status.code(), Some(2));
    tri_c4(dir.path());
    write(dir.path(), "garbled.occ", "occ B: 0 / X: 1\n");
    assert_eq!(tightocc(dir.path(), &["validate", "tri_c4.gr", "--occ", "garbled.occ"]).status.code(), Some(2));
}

#[test]
fn contract_violations_exit_with_one() {
    let dir = TempDir::new().unwrap();
    tri_c4(dir.path());
    let z_above_k = tightocc(dir.path(), &["pipeline", "tri_c4.gr", "--k", "1", "--z", "2"]);
    assert_eq!(z_above_k.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&z_above_k.stderr).contains("exceeds"));
    let bad_gr = tightocc(dir.path(), &["find-occ", "tri_c4.gr", "--k", "1", "--gr", "cubic"]);
    assert_eq!(bad_gr.status.code(), Some(1));
}

#[test]
fn generated_instances_validate() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for seed in ["1", "2", "3"] {
        let runs: [&[&str]; 5] = [
            &["gen", "planted", "--k", "2", "--z", "2", "--cycle-max", "5", "--rest-n", "4", "--rest-p", "0.4"],
            &["gen", "planted", "--k", "3", "--z", "1", "--rest-n", "6", "--attach-p", "0.3", "--noise", "2"],
            &["gen", "sat", "--vars", "3", "--clauses", "2"],
            &["gen", "mcc", "--n", "6", "--k", "3", "--p", "0.5"],
            &["gen", "random", "--n", "10", "--p", "0.3"],
        ];
        for (i, args) in runs.iter().enumerate() {
            let prefix = format!("g{i}_{seed}");
            let mut all = args.to_vec();
            all.extend(["--seed", seed, "-o", &prefix]);
            let out = tightocc(d, &all);
            assert_eq!(out.status.code(), Some(0), "{all:?}");
            let graph = format!("{prefix}.gr");
            let occ = format!("{prefix}.occ");
            let check = tightocc(d, &["validate", &graph, "--occ", &occ]);
            assert_eq!(check.status.code(), Some(0), "{all:?}: {}", stdout(&check));
        }
    }
    // planted cuts come with a certificate of the requested order
    let (doc, code) = json(d, &["validate", "g0_1.gr", "--occ", "g0_1.occ"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["verdict"], "certified");
    assert!(std::fs::read_to_string(d.join("g2_1.cnf")).unwrap().contains("p cnf 3 2"));
    let header = std::fs::read_to_string(d.join("g4_1.gr")).unwrap();
    assert!(header.starts_with("# generator: random\n# seed: 1\n"), "{header}");
}

#[test]
fn output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let gen = |prefix: &str| {
        let args = ["gen", "planted", "--k", "2", "--z", "1", "--rest-n", "5", "--rest-p", "0.5", "--seed", "9", "-o", prefix];
        assert!(tightocc(d, &args).status.success());
        (std::fs::read(d.join(format!("{prefix}.gr"))).unwrap(), std::fs::read(d.join(format!("{prefix}.occ"))).unwrap())
    };
    let first = gen("a");
    assert_eq!(first, gen("b"));
    let run = |name: &str| {
        let args = ["pipeline", "a.gr", "--k", "2", "--z", "1", "--json", name];
        let out = tightocc(d, &args);
        assert!(out.status.success());
        (out.stdout, std::fs::read(d.join(name)).unwrap())
    };
    assert_eq!(run("one.json"), run("two.json"));
}

#[test]
fn hinted_pipeline_and_extraction() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let args = ["gen", "planted", "--k", "2", "--z", "1", "--rest-n", "4", "--rest-p", "0.5", "--seed", "5", "-o", "p"];
    assert!(tightocc(d, &args).status.success());
    let occ_text = std::fs::read_to_string(d.join("p.occ")).unwrap();
    let head_line = occ_text.lines().find(|l| l.starts_with("occ ")).unwrap();
    let head: Vec<u64> = head_line.split("C:").nth(1).unwrap().split('/').next().unwrap()
        .split_whitespace().map(|t| t.parse().unwrap()).collect();
    let (doc, code) = json(d, &["pipeline", "p.gr", "--k", "2", "--z", "1", "--hint", "p.occ"]);
    assert_eq!(code, 0);
    let selected: Vec<u64> = doc["result"]["selected"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(head.iter().all(|h| selected.contains(h)), "{selected:?} misses {head:?}");

    // a coloring that marks one head of the planted cut and its cycle
    let cert = occ_text.lines().find_map(|l| l.strip_prefix("cert-e: ")).unwrap();
    let mut coloring = String::new();
    let bipartite = head_line.split("B:").nth(1).unwrap().split('/').next().unwrap();
    for v in bipartite.split_whitespace() {
        coloring.push_str(&format!("v {v} B\n"));
    }
    for h in &head {
        coloring.push_str(&format!("v {h} C\n"));
    }
    for e in cert.split_whitespace() {
        let (u, v) = e.split_once('-').unwrap();
        let touches = head.iter().any(|h| h.to_string() == u || h.to_string() == v);
        coloring.push_str(&format!("e {u} {v} {}\n", if touches { "C" } else { "B" }));
    }
    write(d, "p.col", &coloring);
    let out = tightocc(d, &["extract", "p.gr", "--z", "1", "--coloring", "p.col"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let block: String = text.lines().skip_while(|l| !l.starts_with("occ ")).map(|l| format!("{l}\n")).collect();
    write(d, "found.occ", &block);
    let (doc, code) = json(d, &["validate", "p.gr", "--occ", "found.occ"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["verdict"], "certified");
    assert_eq!(doc["result"]["width"], 2);
}

#[test]
fn reduce_writes_graph_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    // a head vertex 0 on a long odd cycle 0-1-..-10
    let mut edges: Vec<(usize, usize)> = (0..10).map(|v| (v, v + 1)).collect();
    edges.push((0, 10));
    write(d, "long.gr", &graph_text(11, &edges));
    write(d, "long.occ", "occ B: 1 2 3 4 5 6 7 8 9 10 / C: 0 / R:\n");
    let (doc, code) = json(d, &["reduce", "long.gr", "--occ", "long.occ", "-o", "small"]);
    assert_eq!(code, 0);
    assert!(doc["counters"]["vertices_after"].as_u64() < doc["counters"]["vertices_before"].as_u64());
    let reduced = std::fs::read_to_string(d.join("small.gr")).unwrap();
    assert!(reduced.starts_with("p "));
    let sidecar = std::fs::read_to_string(d.join("small.map")).unwrap();
    assert!(sidecar.starts_with("# b_star:"));
    // the reduced graph keeps a single odd cycle
    let (doc, _) = json(d, &["oct", "small.gr"]);
    assert_eq!(doc["result"]["size"], 1);
}

#[test]
fn bench_lists_every_instance() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    k5(&corpus);
    tri_c4(&corpus);
    std::fs::write(corpus.join("notes.txt"), "ignored").unwrap();
    let out = tightocc(dir.path(), &["bench", "corpus", "--k", "1", "--z", "1", "--max-colorings", "200"]);
    assert!(out.status.success());
    let table = stdout(&out);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3, "{table}");
    assert!(lines[0].starts_with("instance"));
    assert!(lines[1].starts_with("k5"));
    assert!(lines[2].starts_with("tri_c4"));
    let (doc, _) = json(dir.path(), &["bench", "corpus", "--k", "1", "--z", "1", "--max-colorings", "200"]);
    let entries = doc["result"]["instances"].as_array().unwrap();
    assert_eq!(entries[1]["oct_before"], 1);
    assert_eq!(entries[1]["oct_after"], 0);
}
