//! The `gen` subcommand.

use std::path::Path;

use serde_json::{json, Value};
use tightocc::graph::{is_bipartite, Graph, Partition3, Vertex, VertexSet};
use tightocc::instances::{
    gen_mcc_reduction, gen_planted, gen_random, gen_random_3cnf, gen_sat_reduction, Formula, PlantedSpec,
    SatReduction,
};
use tightocc::occ::{validate_occ, Certificate, OccFile, TightOcc};

use crate::commands::{greedy_occ, read_text};
use crate::output::{instance_id, with_suffix, Classify, Failure, Run};
use crate::GenKind;

/// Largest number of triangle transversals tried when looking for a
/// small odd cycle transversal of a SAT gadget graph.
const TRANSVERSAL_LIMIT: u64 = 3u64.pow(10);

struct Generated {
    kind: &'static str,
    params: Value,
    graph: Graph,
    occ: Option<OccFile>,
    /// What the OCC block is, for the header comment.
    occ_note: &'static str,
    cnf: Option<Formula>,
}

fn header(g: &Generated, seed: u64) -> Vec<String> {
    let mut lines = vec![format!("generator: {}", g.kind), format!("seed: {seed}")];
    if let Value::Object(map) = &g.params {
        lines.extend(map.iter().map(|(k, v)| format!("{k}: {v}")));
    }
    lines
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).input(format!("writing {}", path.display()))
}

pub fn run(kind: &GenKind) -> Result<Run, Failure> {
    let (generated, out) = match kind {
        GenKind::Planted { k, z, cycle_min, cycle_max, rest_n, rest_p, attach_p, noise, out } => {
            let spec = PlantedSpec {
                cycle_len: (*cycle_min, *cycle_max),
                rest_n: *rest_n,
                rest_p: *rest_p,
                attach_p: *attach_p,
                noise_edges: *noise,
                ..PlantedSpec::new(*k, *z)
            };
            (planted(&spec, out.seed)?, out)
        }
        GenKind::Sat { cnf, vars, clauses, out } => {
            let formula = match cnf {
                Some(path) => Formula::parse_dimacs(&read_text(path)?).input(format!("parsing {}", path.display()))?,
                None => gen_random_3cnf(*vars, *clauses, out.seed).contract("random formula")?,
            };
            (sat(formula)?, out)
        }
        GenKind::Mcc { n, k, p, out } => (mcc(*n, *k, *p, out.seed)?, out),
        GenKind::Random { n, p, out } => {
            let graph = gen_random(*n, *p, out.seed);
            let occ = greedy_occ(&graph).map(|o| OccFile { partition: o.partition(), order: None, certificate: None });
            let g = Generated {
                kind: "random",
                params: json!({ "n": n, "p": p }),
                graph,
                occ,
                occ_note: "greedy odd cycle cut, not necessarily tight",
                cnf: None,
            };
            (g, out)
        }
    };
    let comments = header(&generated, out.seed);
    let graph_path = with_suffix(&out.out, ".gr");
    write(&graph_path, &generated.graph.to_text_with_header(&comments))?;
    let mut files = vec![graph_path.display().to_string()];
    if let Some(occ) = &generated.occ {
        let occ_path = with_suffix(&out.out, ".occ");
        let mut text: String = comments.iter().map(|c| format!("# {c}\n")).collect();
        text.push_str(&format!("# {}\n", generated.occ_note));
        text.push_str(&occ.to_text());
        write(&occ_path, &text)?;
        files.push(occ_path.display().to_string());
    }
    if let Some(formula) = &generated.cnf {
        let cnf_path = with_suffix(&out.out, ".cnf");
        let mut text: String = comments.iter().map(|c| format!("c {c}\n")).collect();
        text.push_str(&formula.to_dimacs());
        write(&cnf_path, &text)?;
        files.push(cnf_path.display().to_string());
    }
    let mut params = generated.params.clone();
    params["seed"] = json!(out.seed);
    let mut run = Run::new("gen", instance_id(&graph_path), json!({ "kind": generated.kind, "settings": params }));
    let occ_summary = generated.occ.as_ref().map(|o| {
        json!({ "width": o.partition.cut.len(), "order": o.order, "certified": o.certificate.is_some() })
    });
    run.doc.result = json!({
        "files": files,
        "n": generated.graph.n(),
        "m": generated.graph.m(),
        "occ": occ_summary,
    });
    run.table.row("generator", generated.kind);
    run.table.row("vertices", generated.graph.n());
    run.table.row("edges", generated.graph.m());
    if let Some(occ) = &generated.occ {
        run.table.row("occ width", occ.partition.cut.len());
    }
    for f in &files {
        run.table.row("wrote", f);
    }
    Ok(run)
}

fn planted(spec: &PlantedSpec, seed: u64) -> Result<Generated, Failure> {
    let inst = gen_planted(spec, seed).contract("planted instance")?;
    Ok(Generated {
        kind: "planted",
        params: json!({
            "k": spec.k,
            "z": spec.z,
            "cycle_len": [spec.cycle_len.0, spec.cycle_len.1],
            "rest_n": spec.rest_n,
            "rest_p": spec.rest_p,
            "attach_p": spec.attach_p,
            "noise_edges": spec.noise_edges,
        }),
        occ: Some(OccFile::from(&inst.tight)),
        graph: inst.graph,
        occ_note: "planted tight odd cycle cut with certificate",
        cnf: None,
    })
}

/// One vertex from each of the `k` disjoint triangles whose removal leaves a
/// bipartite graph, if one exists within the search limit.
fn triangle_transversal(red: &SatReduction) -> Option<VertexSet> {
    if red.triangles.len() as u32 > TRANSVERSAL_LIMIT.ilog(3) {
        return None;
    }
    let total = 3u64.pow(red.triangles.len() as u32);
    let everything = red.graph.all_vertices();
    (0..total).find_map(|code| {
        let pick: VertexSet = red
            .triangles
            .iter()
            .enumerate()
            .map(|(i, t)| t[(code / 3u64.pow(i as u32) % 3) as usize])
            .collect();
        is_bipartite(&red.graph, &everything.difference(&pick)).then_some(pick)
    })
}

fn sat(formula: Formula) -> Result<Generated, Failure> {
    let red = gen_sat_reduction(&formula).contract("formula")?;
    let params = json!({ "vars": formula.vars, "clauses": formula.clauses.len(), "k": red.k });
    let (occ, occ_note) = match triangle_transversal(&red) {
        Some(head) => {
            // the triangles certify the head at order one
            let bipartite = red.graph.all_vertices().difference(&head);
            let occ = validate_occ(&red.graph, &Partition3::new(bipartite, head, VertexSet::new()))
                .expect("the transversal leaves a bipartite graph");
            let vertices: VertexSet = red.triangles.iter().flatten().copied().collect();
            let edges = red.triangles.iter().flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]);
            let edges: Vec<(Vertex, Vertex)> = edges.map(|(u, v)| (u.min(v), u.max(v))).collect();
            let tight = TightOcc { occ, order: 1, certificate: Some(Certificate::new(vertices, edges)) };
            (Some(OccFile::from(&tight)), "odd cycle transversal of size k certified by the triangles")
        }
        None => (
            greedy_occ(&red.graph).map(|o| OccFile { partition: o.partition(), order: None, certificate: None }),
            "greedy odd cycle cut, not necessarily tight",
        ),
    };
    Ok(Generated { kind: "sat", params, graph: red.graph, occ, occ_note, cnf: Some(formula) })
}

/// Vertices `v` get color `v mod k`; returns a clique with one vertex per color.
fn multicolored_clique(g: &Graph, k: usize) -> Option<VertexSet> {
    fn extend(g: &Graph, k: usize, color: usize, chosen: &mut Vec<Vertex>) -> bool {
        if color == k {
            return true;
        }
        for v in (color..g.n()).step_by(k) {
            if chosen.iter().all(|&u| g.has_edge(u, v)) {
                chosen.push(v);
                if extend(g, k, color + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    extend(g, k, 0, &mut chosen).then(|| chosen.into_iter().collect())
}

fn mcc(n: usize, k: usize, p: f64, seed: u64) -> Result<Generated, Failure> {
    let base = gen_random(n, p, seed);
    let colors: Vec<usize> = (0..n).map(|v| v % k.max(1)).collect();
    let red = gen_mcc_reduction(&base, &colors, k).contract("multicolored clique instance")?;
    let clique = multicolored_clique(&base, k);
    let params = json!({
        "n": n,
        "k": k,
        "p": p,
        "k_prime": red.k_prime,
        "clique": clique,
        "equivalence_guaranteed": red.equivalence_guaranteed,
    });
    let (occ, occ_note) = match &clique {
        Some(c) => (
            Some(OccFile { partition: red.occ_for_clique(c), order: None, certificate: None }),
            "odd cycle cut built from the multicolored clique",
        ),
        None => (
            greedy_occ(&red.graph).map(|o| OccFile { partition: o.partition(), order: None, certificate: None }),
            "greedy odd cycle cut, not necessarily tight",
        ),
    };
    Ok(Generated { kind: "mcc", params, graph: red.graph, occ, occ_note, cnf: None })
}
