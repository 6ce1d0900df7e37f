//! Instance generators: planted tight odd cycle cuts, the two hardness
//! gadgets and random graphs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::io::{parse_number, ParseError};
use crate::graph::{Edge, Graph, Partition3, Vertex, VertexSet};
use crate::occ::{validate_occ, Certificate, TightOcc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("clause {clause} has {len} literals, expected 3")]
    ClauseWidth { clause: usize, len: usize },
    #[error("literal {literal} in clause {clause} names no variable of 1..={vars}")]
    LiteralRange { clause: usize, literal: i64, vars: usize },
    #[error("vertex {vertex} has color {color}, expected a color below {k}")]
    ColorRange { vertex: Vertex, color: usize, k: usize },
}

pub fn gen_random(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = p.clamp(0.0, 1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_sorted_edges(n, edges)
}

/// Parameters of [`gen_planted`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub k: usize,
    pub z: usize,
    /// Odd cycle lengths are drawn uniformly from the odd values in this range.
    pub cycle_len: (usize, usize),
    pub rest_n: usize,
    pub rest_p: f64,
    /// Probability of an edge between a head vertex and a rest vertex.
    pub attach_p: f64,
    /// Extra random edges added inside the rest.
    pub noise_edges: usize,
}

impl PlantedSpec {
    pub fn new(k: usize, z: usize) -> Self {
        Self { k, z, cycle_len: (3, 3), rest_n: 0, rest_p: 0.0, attach_p: 0.0, noise_edges: 0 }
    }

    pub fn with_rest(mut self, n: usize, p: f64) -> Self {
        self.rest_n = n;
        self.rest_p = p;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub tight: TightOcc,
    pub spec: PlantedSpec,
    pub seed: u64,
}

/// Graph with `k` head vertices, each on `z` vertex-disjoint odd cycles.
/// Heads are grouped into blocks of `z` whose cycles are tied together by
/// single edges so certificate components carry up to `z` heads. The rest
/// is a random graph attached to the heads only. Vertex ids are shuffled.
pub fn gen_planted(spec: &PlantedSpec, seed: u64) -> Result<PlantedInstance, InstanceError> {
    if spec.z == 0 || spec.k < spec.z {
        return Err(InstanceError::Infeasible(format!("need k ≥ z ≥ 1, got k={} z={}", spec.k, spec.z)));
    }
    let (lo, hi) = spec.cycle_len;
    let odd_lengths: Vec<usize> = (lo.max(3)..=hi).filter(|l| l % 2 == 1).collect();
    if odd_lengths.is_empty() {
        return Err(InstanceError::Infeasible(format!("no odd cycle length in {lo}..={hi}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Edge> = Vec::new();
    let mut next = 0;
    let heads: Vec<Vertex> = (0..spec.k).collect();
    next += spec.k;
    let mut bipartite = Vec::new();
    // first path vertex of the first cycle of each head
    let mut anchors = Vec::new();
    for &h in &heads {
        for c in 0..spec.z {
            let len = *odd_lengths.choose(&mut rng).expect("non-empty");
            let path: Vec<Vertex> = (next..next + len - 1).collect();
            next += len - 1;
            edges.push((h, path[0]));
            edges.extend(path.windows(2).map(|w| (w[0], w[1])));
            edges.push((path[len - 2], h));
            if c == 0 {
                anchors.push(path[0]);
            }
            bipartite.extend(path);
        }
    }
    for block in anchors.chunks(spec.z) {
        edges.extend(block.windows(2).map(|w| (w[0], w[1])));
    }
    let certificate_edges = edges.clone();
    let rest: Vec<Vertex> = (next..next + spec.rest_n).collect();
    next += spec.rest_n;
    for (i, &u) in rest.iter().enumerate() {
        for &v in &rest[i + 1..] {
            if rng.gen_bool(spec.rest_p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
        for &h in &heads {
            if rng.gen_bool(spec.attach_p.clamp(0.0, 1.0)) {
                edges.push((h, u));
            }
        }
    }
    if rest.len() >= 2 {
        for _ in 0..spec.noise_edges {
            let pair: Vec<&Vertex> = rest.choose_multiple(&mut rng, 2).collect();
            edges.push((*pair[0], *pair[1]));
        }
    }
    let n = next;
    let mut relabel: Vec<Vertex> = (0..n).collect();
    relabel.shuffle(&mut rng);
    let map_edge = |&(u, v): &Edge| {
        let (a, b) = (relabel[u], relabel[v]);
        (a.min(b), a.max(b))
    };
    let graph = Graph::from_edges(n, edges.iter().map(map_edge)).expect("generated ids are in range");
    let map_set = |s: &[Vertex]| -> VertexSet { s.iter().map(|&v| relabel[v]).collect() };
    let partition = Partition3::new(map_set(&bipartite), map_set(&heads), map_set(&rest));
    let occ = validate_occ(&graph, &partition).expect("planted cut is valid");
    let cert_edges: BTreeSet<Edge> = certificate_edges.iter().map(map_edge).collect();
    let cert_vertices = occ.bipartite().union(occ.head());
    let tight = TightOcc { occ, order: spec.z, certificate: Some(Certificate::new(cert_vertices, cert_edges)) };
    Ok(PlantedInstance { graph, tight, spec: spec.clone(), seed })
}

/// A 3-CNF formula with literals `±v` for variables `1..=vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Formula {
    /// DIMACS CNF: `c` comment lines, header `p cnf <vars> <clauses>`, then
    /// literals with every clause terminated by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Formula, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
                continue;
            }
            if trimmed.starts_with('p') {
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                if tokens.len() != 4 || tokens[1] != "cnf" || header.is_some() {
                    return Err(ParseError::syntax(line, "expected a single `p cnf <vars> <clauses>`"));
                }
                header = Some((parse_number(tokens[2], line)?, parse_number(tokens[3], line)?));
                continue;
            }
            let Some((vars, _)) = header else { return Err(ParseError::MissingHeader) };
            for token in trimmed.split_whitespace() {
                let lit: i64 = parse_number(token, line)?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > vars {
                    return Err(ParseError::syntax(line, format!("literal {lit} exceeds {vars} variables")));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((vars, count)) = header else { return Err(ParseError::MissingHeader) };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != count {
            return Err(ParseError::EdgeCount { expected: count, found: clauses.len() });
        }
        Ok(Formula { vars, clauses })
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for clause in &self.clauses {
            let lits: Vec<String> = clause.iter().map(|l| l.to_string()).collect();
            out.push_str(&format!("{} 0\n", lits.join(" ")));
        }
        out
    }

    pub fn evaluate(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = assignment >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    }

    /// Truth-table satisfiability for at most 63 variables.
    pub fn is_satisfiable(&self) -> bool {
        assert!(self.vars < 64, "truth table too large");
        (0..1u64 << self.vars).any(|a| self.evaluate(a))
    }
}

/// Random 3-CNF formula. Variables within a clause are distinct when
/// there are at least three of them.
pub fn gen_random_3cnf(vars: usize, clauses: usize, seed: u64) -> Result<Formula, InstanceError> {
    if vars == 0 && clauses > 0 {
        return Err(InstanceError::Infeasible("clauses need at least one variable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<i64> = (1..=vars as i64).collect();
    let clauses = (0..clauses)
        .map(|_| {
            let picked: Vec<i64> = if vars >= 3 {
                ids.choose_multiple(&mut rng, 3).copied().collect()
            } else {
                (0..3).map(|_| *ids.choose(&mut rng).expect("non-empty")).collect()
            };
            picked.into_iter().map(|v| if rng.gen_bool(0.5) { -v } else { v }).collect()
        })
        .collect();
    Ok(Formula { vars, clauses })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatReduction {
    pub graph: Graph,
    pub k: usize,
    /// The `n + 2m` vertex-disjoint triangles.
    pub triangles: Vec<[Vertex; 3]>,
    /// Vertex of the positive and negative literal of each variable.
    pub literals: Vec<(Vertex, Vertex)>,
}

/// Variable `i` becomes the triangle `3i, 3i+1, 3i+2` with `3i` for `x_i`
/// and `3i+1` for its negation. Clause `j` adds the path `a1..a6` on ids
/// `3n + 8j ..`, followed by `b1, b2`.
pub fn gen_sat_reduction(formula: &Formula) -> Result<SatReduction, InstanceError> {
    let n = formula.vars;
    for (j, clause) in formula.clauses.iter().enumerate() {
        if clause.len() != 3 {
            return Err(InstanceError::ClauseWidth { clause: j, len: clause.len() });
        }
        if let Some(&lit) = clause.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > n) {
            return Err(InstanceError::LiteralRange { clause: j, literal: lit, vars: n });
        }
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut triangles = Vec::new();
    let mut literals = Vec::new();
    for i in 0..n {
        let (p, q, r) = (3 * i, 3 * i + 1, 3 * i + 2);
        edges.extend([(p, q), (q, r), (p, r)]);
        triangles.push([p, q, r]);
        literals.push((p, q));
    }
    let literal_vertex = |lit: i64| {
        let (pos, neg) = literals[lit.unsigned_abs() as usize - 1];
        if lit > 0 {
            pos
        } else {
            neg
        }
    };
    for (j, clause) in formula.clauses.iter().enumerate() {
        let base = 3 * n + 8 * j;
        let a: Vec<Vertex> = (base..base + 6).collect();
        let (b1, b2) = (base + 6, base + 7);
        let s: Vec<Vertex> = clause.iter().map(|&l| literal_vertex(l)).collect();
        edges.extend(a.windows(2).map(|w| (w[0], w[1])));
        edges.extend([(a[0], s[0]), (s[0], a[1])]);
        edges.extend([(a[2], s[1]), (s[1], a[3])]);
        edges.extend([(a[4], s[2]), (s[2], a[5])]);
        edges.extend([(a[1], b1), (b1, a[2]), (a[3], b2), (b2, a[4])]);
        triangles.push([a[1], a[2], b1]);
        triangles.push([a[3], a[4], b2]);
    }
    let total = 3 * n + 8 * formula.clauses.len();
    let graph = Graph::from_edges(total, edges).expect("gadget ids are in range");
    Ok(SatReduction { graph, k: n + 2 * formula.clauses.len(), triangles, literals })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MccReduction {
    pub graph: Graph,
    pub k_prime: usize,
    /// `U_i` as a map from color to vertex, `None` at the vertex's own color.
    pub u: Vec<Vec<Option<Vertex>>>,
    /// `(i, j, [x, x', y, y'])` per edge `ij` with `i < j` and distinct colors.
    pub edge_gadgets: Vec<(Vertex, Vertex, [Vertex; 4])>,
    /// False when `n ≤ k + 2`, where the backward direction is not guaranteed.
    pub equivalence_guaranteed: bool,
}

impl MccReduction {
    pub fn u_set(&self, i: Vertex) -> VertexSet {
        self.u[i].iter().flatten().copied().collect()
    }

    /// The odd cycle cut built from a multicolored clique.
    pub fn occ_for_clique(&self, clique: &VertexSet) -> Partition3 {
        let head: VertexSet = clique.iter().flat_map(|&i| self.u_set(i).to_vec()).collect();
        let bipartite: VertexSet = self
            .edge_gadgets
            .iter()
            .filter(|(i, j, _)| clique.contains(i) && clique.contains(j))
            .flat_map(|(_, _, ids)| ids.iter().copied())
            .collect();
        let rest = self.graph.all_vertices().difference(&head).difference(&bipartite);
        Partition3::new(bipartite, head, rest)
    }
}

/// Gadget graph for multicolored clique with colors `0..k`. Edges between
/// equally colored vertices are skipped since no multicolored clique uses
/// them.
pub fn gen_mcc_reduction(g: &Graph, color: &[usize], k: usize) -> Result<MccReduction, InstanceError> {
    if k < 2 {
        return Err(InstanceError::Infeasible(format!("need k ≥ 2, got {k}")));
    }
    if color.len() != g.n() {
        return Err(InstanceError::Infeasible(format!(
            "{} colors for {} vertices",
            color.len(),
            g.n()
        )));
    }
    if let Some((v, &c)) = color.iter().enumerate().find(|(_, &c)| c >= k) {
        return Err(InstanceError::ColorRange { vertex: v, color: c, k });
    }
    let mut next = 0;
    let mut u = Vec::with_capacity(g.n());
    for &ci in color {
        let row: Vec<Option<Vertex>> = (0..k)
            .map(|l| {
                (l != ci).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        u.push(row);
    }
    let mut edges: Vec<Edge> = Vec::new();
    for a in 0..next {
        for b in a + 1..next {
            edges.push((a, b));
        }
    }
    let mut edge_gadgets = Vec::new();
    for &(i, j) in g.edges() {
        if color[i] == color[j] {
            continue;
        }
        let ids = [next, next + 1, next + 2, next + 3];
        next += 4;
        let [x, x2, y, y2] = ids;
        let around: Vec<Vertex> = u[i].iter().chain(&u[j]).flatten().copied().collect();
        for &w in &around {
            edges.push((w, x));
            edges.push((w, y));
        }
        let u_i_cj = u[i][color[j]].expect("colors differ");
        let u_j_ci = u[j][color[i]].expect("colors differ");
        edges.extend([(x, x2), (x2, u_i_cj), (y, y2), (y2, u_j_ci)]);
        edge_gadgets.push((i, j, ids));
    }
    let graph = Graph::from_edges(next, edges).expect("gadget ids are in range");
    Ok(MccReduction {
        graph,
        k_prime: k * (k - 1),
        u,
        edge_gadgets,
        equivalence_guaranteed: g.n() > k + 2,
    })
}
