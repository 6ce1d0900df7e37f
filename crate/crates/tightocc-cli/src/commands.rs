//! Subcommands that read a graph.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use tightocc::discovery::find_reducible_occ;
use tightocc::extraction::{
    extract_tight_occ_traced, pipeline as run_pipeline, pipeline_hinted, PipelineError, PipelineHint,
    PipelineOptions, PipelineReport, TriColoring,
};
use tightocc::graph::{Graph, VertexSet};
use tightocc::occ::{validate_occ, validate_tight_occ, Occ, OccFile, TightOcc, TightnessVerdict};
use tightocc::oct::{oct_brute, oct_compress, oct_exact, OctError};
use tightocc::reduction::{live_vertex_count, reduce_occ, GrMode, ReductionConfig};

use crate::output::{contract_error, instance_id, with_suffix, Classify, Failure, Run, Table, Timings};
use crate::{OctMethod, Search, Threshold};

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).input(format!("reading {}", path.display()))
}

pub fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Graph::parse(&read_text(path)?).input(format!("parsing {}", path.display()))
}

fn read_occ_file(path: &Path) -> Result<OccFile, Failure> {
    OccFile::parse(&read_text(path)?).input(format!("parsing {}", path.display()))
}

fn config(threshold: &Threshold) -> Result<ReductionConfig, Failure> {
    match &threshold.gr {
        None => Ok(ReductionConfig::default()),
        Some(text) => Ok(ReductionConfig::with_threshold(GrMode::parse(text).contract("--gr")?)),
    }
}

fn occ_json(occ: &Occ) -> Value {
    json!({
        "bipartite": occ.bipartite(),
        "head": occ.head(),
        "rest": occ.rest(),
        "width": occ.width(),
    })
}

fn pipeline_error(e: PipelineError) -> Failure {
    Failure::Contract(e.into())
}

pub fn oct(path: &Path, k: Option<usize>, method: OctMethod) -> Result<Run, Failure> {
    let g = read_graph(path)?;
    let method_name = match method {
        OctMethod::Brute => "brute",
        OctMethod::Compress => "compress",
    };
    let mut run = Run::new("oct", instance_id(path), json!({ "k": k, "method": method_name }));
    let start = Instant::now();
    let solution = match method {
        OctMethod::Brute => match oct_brute(&g, k) {
            Ok(s) => Some(s),
            Err(OctError::BudgetExceeded(_)) => None,
            Err(e) => return Err(Failure::Contract(e.into())),
        },
        OctMethod::Compress => match k {
            Some(k) => oct_compress(&g, k),
            None => Some(oct_exact(&g)),
        },
    };
    run.doc.timings = Some(Timings::from(start.elapsed()));
    run.doc.result = json!({
        "size": solution.as_ref().map(|s| s.size),
        "solution": solution.as_ref().map(|s| &s.solution),
    });
    match &solution {
        Some(s) => {
            run.table.row("oct", s.size);
            run.table.row("solution", &s.solution);
        }
        None => run.table.row("oct", format!("none of size at most {}", k.unwrap_or(0))),
    }
    Ok(run)
}

pub fn find_occ(path: &Path, k: usize, threshold: &Threshold) -> Result<Run, Failure> {
    let g = read_graph(path)?;
    let cfg = config(threshold)?;
    let mut run = Run::new("find-occ", instance_id(path), json!({ "k": k, "gr": threshold.gr }));
    let start = Instant::now();
    let found = find_reducible_occ(&g, k, &cfg);
    run.doc.timings = Some(Timings::from(start.elapsed()));
    run.doc.result = json!({ "found": found.is_some(), "occ": found.as_ref().map(occ_json) });
    match &found {
        Some(occ) => {
            run.table.row("width", occ.width());
            run.table.row("bipartite part", occ.bipartite().len());
            run.trailer = occ.to_line() + "\n";
        }
        None => run.table.row("occ", "none"),
    }
    Ok(run)
}

pub fn reduce(path: &Path, occ_path: &Path, out: Option<&Path>) -> Result<Run, Failure> {
    let g = read_graph(path)?;
    let file = read_occ_file(occ_path)?;
    let occ = validate_occ(&g, &file.partition).contract(format!("{} is not an odd cycle cut", occ_path.display()))?;
    let mut run = Run::new("reduce", instance_id(path), json!({ "occ": instance_id(occ_path) }));
    let start = Instant::now();
    let outcome = reduce_occ(&g, &occ).contract("reduction")?;
    run.doc.timings = Some(Timings::from(start.elapsed()));
    let paths: Vec<Value> = outcome
        .replacement_paths
        .iter()
        .map(|((u, v, p), ids)| json!({ "u": u, "v": v, "parity": p.code(), "path": ids }))
        .collect();
    let (before, after) = (live_vertex_count(&g), live_vertex_count(&outcome.reduced));
    run.doc.result = json!({
        "b_star": outcome.b_star,
        "removed": outcome.removed,
        "replacement_paths": paths,
        "reduced": { "n": outcome.reduced.n(), "m": outcome.reduced.m() },
    });
    run.counter("vertices_before", before);
    run.counter("vertices_after", after);
    run.table.row("kept in bipartite part", outcome.b_star.len());
    run.table.row("removed", outcome.removed.len());
    run.table.row("replacement paths", outcome.replacement_paths.len());
    run.table.row("live vertices", format!("{before} -> {after}"));
    if let Some(prefix) = out {
        let graph_path = with_suffix(prefix, ".gr");
        let map_path = with_suffix(prefix, ".map");
        std::fs::write(&graph_path, outcome.reduced.to_text()).input(format!("writing {}", graph_path.display()))?;
        std::fs::write(&map_path, outcome.sidecar()).input(format!("writing {}", map_path.display()))?;
        run.table.row("wrote", format!("{} {}", graph_path.display(), map_path.display()));
    }
    Ok(run)
}

pub fn extract(path: &Path, z: usize, coloring: &Path) -> Result<Run, Failure> {
    let g = read_graph(path)?;
    let chi = TriColoring::parse(&g, &read_text(coloring)?).input(format!("parsing {}", coloring.display()))?;
    let mut run = Run::new("extract", instance_id(path), json!({ "z": z, "coloring": instance_id(coloring) }));
    let start = Instant::now();
    let trace = extract_tight_occ_traced(&g, z, &chi);
    run.doc.timings = Some(Timings::from(start.elapsed()));
    run.counter("restarts", trace.restarts);
    run.doc.result = json!({
        "found": trace.tight.is_some(),
        "occ": trace.tight.as_ref().map(|t| occ_json(&t.occ)),
        "certificate": trace.tight.as_ref().and_then(|t| t.certificate.as_ref()),
    });
    run.table.row("restarts", trace.restarts);
    match &trace.tight {
        Some(t) => {
            run.table.row("width", t.occ.width());
            run.table.row("bipartite part", t.occ.bipartite().len());
            run.trailer = OccFile::from(t).to_text();
        }
        None => run.table.row("occ", "none"),
    }
    Ok(run)
}

/// An OCC file when some line starts with `occ`, a coloring otherwise.
fn read_hint(g: &Graph, path: &Path, z: usize) -> Result<PipelineHint, Failure> {
    let text = read_text(path)?;
    let context = || format!("parsing {}", path.display());
    if text.lines().any(|l| l.trim_start().starts_with("occ ")) {
        let file = OccFile::parse(&text).input(context())?;
        let occ = validate_occ(g, &file.partition).contract(format!("hint {}", path.display()))?;
        let tight = TightOcc { occ, order: file.order.unwrap_or(z), certificate: file.certificate };
        Ok(PipelineHint::Occ(tight))
    } else {
        Ok(PipelineHint::Coloring(TriColoring::parse(g, &text).input(context())?))
    }
}

fn options(threshold: &Threshold, search: &Search) -> Result<PipelineOptions, Failure> {
    if search.jobs == 0 {
        return Err(contract_error("--jobs must be at least 1"));
    }
    Ok(PipelineOptions {
        config: config(threshold)?,
        max_rounds: None,
        max_colorings: search.max_colorings,
        jobs: search.jobs,
    })
}

fn report_json(report: &PipelineReport) -> Value {
    json!({
        "outcome": report.outcome,
        "selected": report.selected,
        "width_found": report.width_found,
    })
}

fn report_counters(run: &mut Run, report: &PipelineReport) {
    run.counter("reduction_rounds", report.reduction_rounds);
    run.counter("colorings_tried", report.colorings_tried as u64);
    run.counter("vertices_before", report.vertices_before);
    run.counter("vertices_after", report.vertices_after);
}

pub fn pipeline(
    path: &Path,
    k: usize,
    z: usize,
    threshold: &Threshold,
    hint: Option<&Path>,
    search: &Search,
    timings: bool,
) -> Result<Run, Failure> {
    let g = read_graph(path)?;
    let opts = options(threshold, search)?;
    let params = json!({
        "k": k,
        "z": z,
        "gr": threshold.gr,
        "hint": hint.map(instance_id),
        "jobs": search.jobs,
        "max_colorings": search.max_colorings.map(|c| c as u64),
    });
    let mut run = Run::new("pipeline", instance_id(path), params);
    let report = match hint {
        Some(h) => pipeline_hinted(&g, k, z, &read_hint(&g, h, z)?),
        None => run_pipeline(&g, k, z, &opts),
    }
    .map_err(pipeline_error)?;
    run.doc.timings = Some(Timings::from(report.elapsed));
    run.doc.result = report_json(&report);
    report_counters(&mut run, &report);
    let outcome = serde_json::to_value(report.outcome).expect("outcome serializes");
    run.table.row("outcome", outcome.as_str().unwrap_or_default());
    run.table.row("selected", &report.selected);
    run.table.row("reduction rounds", report.reduction_rounds);
    run.table.row("colorings tried", report.colorings_tried);
    run.table.row("live vertices", format!("{} -> {}", report.vertices_before, report.vertices_after));
    if timings {
        run.table.row("elapsed ms", format!("{:.1}", report.elapsed.as_secs_f64() * 1000.0));
    }
    Ok(run)
}

pub fn validate(path: &Path, occ_path: &Path, z: Option<usize>) -> Result<Run, Failure> {
    let g = read_graph(path)?;
    let file = read_occ_file(occ_path)?;
    let order = z.or(file.order);
    let mut run = Run::new("validate", instance_id(path), json!({ "occ": instance_id(occ_path), "z": order }));
    let occ = match validate_occ(&g, &file.partition) {
        Ok(occ) => occ,
        Err(violation) => {
            run.doc.result = json!({ "valid": false, "violation": violation.to_string() });
            run.table.row("verdict", "invalid");
            run.table.row("violation", violation);
            run.exit_code = 1;
            return Ok(run);
        }
    };
    run.table.row("width", occ.width());
    let Some(order) = order else {
        run.doc.result = json!({ "valid": true, "width": occ.width() });
        run.table.row("verdict", "valid");
        return Ok(run);
    };
    let tight = TightOcc { occ, order, certificate: file.certificate };
    let verdict = validate_tight_occ(&g, &tight).contract("tightness check")?;
    let (label, detail) = match &verdict {
        TightnessVerdict::Certified => ("certified", None),
        TightnessVerdict::Tight => ("tight", None),
        TightnessVerdict::NotTight { oct } => ("not_tight", Some(format!("oct of the cut is {oct}"))),
        TightnessVerdict::BadCertificate(why) => ("bad_certificate", Some(why.clone())),
    };
    run.doc.result = json!({ "valid": true, "width": tight.occ.width(), "verdict": label, "violation": detail });
    run.table.row("verdict", label);
    if let Some(detail) = detail {
        run.table.row("violation", detail);
    }
    if !verdict.is_tight() || matches!(verdict, TightnessVerdict::BadCertificate(_)) {
        run.exit_code = 1;
    }
    Ok(run)
}

pub fn bench(
    corpus: &Path,
    k: usize,
    z: usize,
    threshold: &Threshold,
    search: &Search,
    timings: bool,
) -> Result<Run, Failure> {
    let opts = options(threshold, search)?;
    let mut files: Vec<_> = std::fs::read_dir(corpus)
        .input(format!("reading {}", corpus.display()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "gr"))
        .collect();
    files.sort();
    let params = json!({
        "k": k,
        "z": z,
        "gr": threshold.gr,
        "jobs": search.jobs,
        "max_colorings": search.max_colorings.map(|c| c as u64),
    });
    let mut run = Run::new("bench", instance_id(corpus), params);
    let mut header = vec!["instance", "outcome", "width", "oct before", "oct after", "saved"];
    if timings {
        header.push("ms");
    }
    run.table = Table { header: Some(header.into_iter().map(String::from).collect()), rows: Vec::new() };
    let start = Instant::now();
    let mut entries = Vec::new();
    for file in &files {
        let g = read_graph(file)?;
        let report = run_pipeline(&g, k, z, &opts).map_err(pipeline_error)?;
        let before = oct_exact(&g).size;
        let after = oct_exact(&g.without(&report.selected)).size;
        let saved = report.vertices_before - report.vertices_after;
        let outcome = serde_json::to_value(report.outcome).expect("outcome serializes");
        let mut entry = json!({
            "instance": instance_id(file),
            "outcome": outcome,
            "selected": report.selected,
            "width_found": report.width_found,
            "oct_before": before,
            "oct_after": after,
            "vertices_saved": saved,
        });
        let mut row = vec![
            instance_id(file),
            outcome.as_str().unwrap_or_default().to_string(),
            report.width_found.to_string(),
            before.to_string(),
            after.to_string(),
            saved.to_string(),
        ];
        if timings {
            let ms = report.elapsed.as_secs_f64() * 1000.0;
            entry["elapsed_ms"] = json!(ms);
            row.push(format!("{ms:.1}"));
        }
        entries.push(entry);
        run.table.rows.push(row);
    }
    run.doc.timings = Some(Timings::from(start.elapsed()));
    run.counter("instances", files.len());
    run.doc.result = json!({ "instances": entries });
    Ok(run)
}

/// Odd cycle cut with an empty rest: vertices join the bipartite part in id
/// order while it stays bipartite, the others form the head. `None` for the
/// empty graph.
pub fn greedy_occ(g: &Graph) -> Option<Occ> {
    let mut bipartite = VertexSet::new();
    for v in g.vertices() {
        bipartite.insert(v);
        if !tightocc::graph::is_bipartite(g, &bipartite) {
            bipartite.remove(v);
        }
    }
    let head = g.all_vertices().difference(&bipartite);
    let partition = tightocc::graph::Partition3::new(bipartite, head, VertexSet::new());
    validate_occ(g, &partition).ok()
}
