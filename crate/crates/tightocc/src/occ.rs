//! Odd cycle cuts, tightness certificates and their validation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::io::parse_number;
use crate::graph::{
    components, parse_vertex_list, two_coloring, Edge, Graph, GraphError, OddCycle, ParseError,
    Partition3, TwoColoring, Vertex, VertexSet,
};
use crate::oct::{oct_compress, oct_exact};

/// Reason why a partition is not an odd cycle cut.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OccViolation {
    #[error("not a partition of the vertex set: {0}")]
    NotAPartition(GraphError),
    #[error("the bipartite part contains the odd cycle {0:?}")]
    NotBipartite(Vec<Vertex>),
    #[error("edge {0}-{1} joins the bipartite part and the rest")]
    CrossingEdge(Vertex, Vertex),
    #[error("bipartite part and head are both empty")]
    Empty,
}

/// Reason why a subgraph is not a valid certificate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateViolation {
    #[error("certificate edge {0}-{1} is not an edge of the graph")]
    ForeignEdge(Vertex, Vertex),
    #[error("certificate edge {0}-{1} has an endpoint outside the certificate vertices")]
    DanglingEdge(Vertex, Vertex),
    #[error("certificate vertex {0} lies outside the bipartite part and head")]
    OutsideCut(Vertex),
    #[error("head vertex {0} is missing from the certificate")]
    HeadMissing(Vertex),
    #[error("certificate component containing {component} has {heads} head vertices, order allows {order}")]
    TooManyHeads { component: Vertex, heads: usize, order: usize },
    #[error("removing the head leaves the odd cycle {0:?}")]
    HeadNotTransversal(Vec<Vertex>),
    #[error("certificate component containing {component} has odd cycle transversal number {oct} but {heads} heads")]
    HeadNotOptimal { component: Vertex, oct: usize, heads: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OccError {
    #[error("invalid odd cycle cut: {0}")]
    Invalid(#[from] OccViolation),
    #[error("invalid certificate: {0}")]
    Certificate(#[from] CertificateViolation),
    #[error("imposed separation input: {0}")]
    ImposedInput(String),
    #[error("a certificate is required")]
    MissingCertificate,
}

/// Validated odd cycle cut `(X_B, X_C, X_R)`: `G[X_B]` is bipartite, no
/// edge joins `X_B` and `X_R`, and `X_B ∪ X_C` is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occ {
    bipartite: VertexSet,
    head: VertexSet,
    rest: VertexSet,
}

impl Occ {
    pub fn bipartite(&self) -> &VertexSet {
        &self.bipartite
    }

    pub fn head(&self) -> &VertexSet {
        &self.head
    }

    pub fn rest(&self) -> &VertexSet {
        &self.rest
    }

    pub fn width(&self) -> usize {
        self.head.len()
    }

    pub fn partition(&self) -> Partition3 {
        Partition3::new(self.bipartite.clone(), self.head.clone(), self.rest.clone())
    }

    /// Text block `occ B: .. / C: .. / R: ..`.
    pub fn to_line(&self) -> String {
        format!("occ B: {} / C: {} / R: {}", self.bipartite, self.head, self.rest)
    }
}

/// Validates `p` as an odd cycle cut of `g`.
pub fn validate_occ(g: &Graph, p: &Partition3) -> Result<Occ, OccViolation> {
    p.check_covers(g.n()).map_err(OccViolation::NotAPartition)?;
    if let Err(OddCycle(cycle)) = two_coloring(g, &p.bipartite) {
        return Err(OccViolation::NotBipartite(cycle));
    }
    for &(u, v) in g.edges() {
        let crossing = (p.bipartite.contains(&u) && p.rest.contains(&v))
            || (p.bipartite.contains(&v) && p.rest.contains(&u));
        if crossing {
            return Err(OccViolation::CrossingEdge(u, v));
        }
    }
    if p.bipartite.is_empty() && p.cut.is_empty() {
        return Err(OccViolation::Empty);
    }
    Ok(Occ { bipartite: p.bipartite.clone(), head: p.cut.clone(), rest: p.rest.clone() })
}

/// Subgraph given by explicit vertices and edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub vertices: VertexSet,
    pub edges: BTreeSet<Edge>,
}

impl Certificate {
    pub fn new(vertices: VertexSet, edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Self { vertices, edges }
    }

    /// The certificate as a graph on `0..n`; vertices outside it are isolated.
    pub fn as_graph(&self, n: usize) -> Graph {
        Graph::from_sorted_edges(n, self.edges.iter().copied().collect())
    }

    fn check_subgraph(&self, g: &Graph) -> Result<(), CertificateViolation> {
        for &(u, v) in &self.edges {
            if !g.has_edge(u, v) {
                return Err(CertificateViolation::ForeignEdge(u, v));
            }
            if !self.vertices.contains(&u) || !self.vertices.contains(&v) {
                return Err(CertificateViolation::DanglingEdge(u, v));
            }
        }
        if let Some(&v) = self.vertices.iter().find(|&&v| v >= g.n()) {
            return Err(CertificateViolation::OutsideCut(v));
        }
        Ok(())
    }
}

/// Checks that `h` is an order-`z` certificate for `head`: a subgraph of
/// `g` containing `head` in which `head` is a minimum OCT and every
/// component holds at most `z` head vertices.
pub fn validate_certificate(
    g: &Graph,
    head: &VertexSet,
    h: &Certificate,
    z: usize,
) -> Result<(), CertificateViolation> {
    h.check_subgraph(g)?;
    if let Some(&v) = head.iter().find(|v| !h.vertices.contains(v)) {
        return Err(CertificateViolation::HeadMissing(v));
    }
    let hg = h.as_graph(g.n());
    let rest = h.vertices.difference(head);
    if let Err(OddCycle(cycle)) = two_coloring(&hg, &rest) {
        return Err(CertificateViolation::HeadNotTransversal(cycle));
    }
    for comp in components(&hg, &h.vertices) {
        let heads = comp.intersection(head).len();
        let component = comp.first().copied().unwrap_or_default();
        if heads > z {
            return Err(CertificateViolation::TooManyHeads { component, heads, order: z });
        }
        if heads == 0 {
            continue;
        }
        let oct = oct_exact(&hg.induced(&comp)).size;
        if oct != heads {
            return Err(CertificateViolation::HeadNotOptimal { component, oct, heads });
        }
    }
    Ok(())
}

/// Odd cycle cut claimed to be tight, optionally with a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightOcc {
    pub occ: Occ,
    pub order: usize,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TightnessVerdict {
    /// Tight and the supplied certificate checks out.
    Certified,
    /// Tight, no certificate supplied.
    Tight,
    /// `oct(G[X_B ∪ X_C])` is smaller than the head.
    NotTight { oct: usize },
    /// Tight, but the certificate is invalid.
    BadCertificate(String),
}

impl TightnessVerdict {
    pub fn is_tight(&self) -> bool {
        !matches!(self, TightnessVerdict::NotTight { .. })
    }
}

/// Checks `|X_C| = oct(G[X_B ∪ X_C])` and, if present, the certificate.
pub fn validate_tight_occ(g: &Graph, t: &TightOcc) -> Result<TightnessVerdict, OccError> {
    let occ = validate_occ(g, &t.occ.partition())?;
    let width = occ.width();
    let scope = occ.bipartite.union(&occ.head);
    if width > 0 {
        if let Some(better) = oct_compress(&g.induced(&scope), width - 1) {
            return Ok(TightnessVerdict::NotTight { oct: better.size });
        }
    }
    let Some(cert) = &t.certificate else {
        return Ok(TightnessVerdict::Tight);
    };
    if let Some(&v) = cert.vertices.iter().find(|v| !scope.contains(v)) {
        let why = CertificateViolation::OutsideCut(v);
        return Ok(TightnessVerdict::BadCertificate(why.to_string()));
    }
    Ok(match validate_certificate(g, &occ.head, cert, t.order) {
        Ok(()) => TightnessVerdict::Certified,
        Err(why) => TightnessVerdict::BadCertificate(why.to_string()),
    })
}

/// Input for [`imposed_separation`]: a 2-coloring `f_B` of the bipartite
/// part, head vertices `C1` with colors `f_C`, and head vertices `C2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImposedSeparationInput {
    pub f_b: TwoColoring,
    pub c1: VertexSet,
    pub f_c: TwoColoring,
    pub c2: VertexSet,
}

/// The sets `A` (neighbors of `C1` with equal color), `R` (neighbors of
/// `C1` with the other color) and `N` (neighbors of `C2`) inside `X_B`.
pub fn imposed_separation(
    g: &Graph,
    occ: &Occ,
    inp: &ImposedSeparationInput,
) -> Result<(VertexSet, VertexSet, VertexSet), OccError> {
    let bad = |msg: &str| Err(OccError::ImposedInput(msg.to_string()));
    if !inp.c1.is_subset(&occ.head) || !inp.c2.is_subset(&occ.head) {
        return bad("C1 and C2 must lie in the head");
    }
    if !inp.c1.is_disjoint(&inp.c2) {
        return bad("C1 and C2 must be disjoint");
    }
    if inp.c1.iter().any(|&v| inp.f_c.get(v).is_none()) {
        return bad("f_C must color every vertex of C1");
    }
    if !inp.f_b.is_proper_on(g, &occ.bipartite) {
        return bad("f_B must be a proper coloring of the bipartite part");
    }
    let mut a = VertexSet::new();
    let mut r = VertexSet::new();
    let mut n_set = VertexSet::new();
    for &u in &occ.bipartite {
        let fu = inp.f_b.get(u);
        for &x in g.neighbors(u) {
            if inp.c1.contains(&x) {
                if inp.f_c.get(x) == fu {
                    a.insert(u);
                } else {
                    r.insert(u);
                }
            }
            if inp.c2.contains(&x) {
                n_set.insert(u);
            }
        }
    }
    Ok((a, r, n_set))
}

/// Per component `D` of `H - X_C`: its proper 2-coloring and, for every head
/// vertex, the bitmask of sides it sees in `D`.
struct ComponentSides {
    vertices: VertexSet,
    sides: Vec<(Vertex, u8)>,
}

impl ComponentSides {
    fn seen(&self, x: Vertex) -> u8 {
        self.sides.iter().find(|(h, _)| *h == x).map_or(0, |&(_, s)| s)
    }

    fn odd_cycle_with(&self, x: Vertex) -> bool {
        self.seen(x) == 0b11
    }

    fn path_between(&self, x: Vertex, y: Vertex, odd: bool) -> bool {
        let (sx, sy) = (self.seen(x), self.seen(y));
        if odd {
            (sx & 1 != 0 && sy & 2 != 0) || (sx & 2 != 0 && sy & 1 != 0)
        } else {
            sx & sy != 0
        }
    }
}

fn component_sides(hg: &Graph, head: &VertexSet, rest: &VertexSet) -> Vec<ComponentSides> {
    let coloring = two_coloring(hg, rest).expect("head is an OCT of the certificate");
    components(hg, rest)
        .into_iter()
        .map(|comp| {
            let mut sides: Vec<(Vertex, u8)> = Vec::new();
            for &x in head {
                let mut seen = 0u8;
                for &u in hg.neighbors(x) {
                    if comp.contains(&u) {
                        seen |= 1 << coloring.get(u).unwrap_or(0);
                    }
                }
                if seen != 0 {
                    sides.push((x, seen));
                }
            }
            ComponentSides { vertices: comp, sides }
        })
        .collect()
}

/// Removes redundant components of `H - X_C` from the certificate until at
/// most `z²|X_C|` remain. A component is redundant when each odd cycle and
/// each head-to-head path of a given parity through it has at least `z`
/// alternatives through other components.
pub fn prune_certificate(
    g: &Graph,
    head: &VertexSet,
    h: &Certificate,
    z: usize,
) -> Result<Certificate, OccError> {
    validate_certificate(g, head, h, z)?;
    let mut cert = h.clone();
    'restart: loop {
        let hg = cert.as_graph(g.n());
        let rest = cert.vertices.difference(head);
        let parts = component_sides(&hg, head, &rest);
        let h_components = components(&hg, &cert.vertices);
        for (i, d) in parts.iter().enumerate() {
            let anchor = d.vertices.first().copied().expect("components are non-empty");
            let local_heads: Vec<Vertex> = h_components
                .iter()
                .find(|c| c.contains(&anchor))
                .map(|c| c.intersection(head).to_vec())
                .unwrap_or_default();
            let alternatives = |pred: &dyn Fn(&ComponentSides) -> bool| {
                parts.iter().enumerate().filter(|(j, other)| *j != i && pred(other)).count()
            };
            let odd_ok = local_heads.iter().all(|&x| {
                !d.odd_cycle_with(x) || alternatives(&|o: &ComponentSides| o.odd_cycle_with(x)) >= z
            });
            if !odd_ok {
                continue;
            }
            let mut path_ok = true;
            'pairs: for (a, &x) in local_heads.iter().enumerate() {
                for &y in &local_heads[a + 1..] {
                    for odd in [false, true] {
                        if d.path_between(x, y, odd)
                            && alternatives(&|o: &ComponentSides| o.path_between(x, y, odd)) < z
                        {
                            path_ok = false;
                            break 'pairs;
                        }
                    }
                }
            }
            if !path_ok {
                continue;
            }
            cert.vertices = cert.vertices.difference(&d.vertices);
            cert.edges.retain(|(u, v)| !d.vertices.contains(u) && !d.vertices.contains(v));
            continue 'restart;
        }
        return Ok(cert);
    }
}

/// Keeps exactly the components of `G[A_B]` that meet the pruned
/// certificate and moves the others into the rest.
pub fn shrink_bipartite_part(g: &Graph, t: &TightOcc) -> Result<TightOcc, OccError> {
    let cert = t.certificate.as_ref().ok_or(OccError::MissingCertificate)?;
    let occ = validate_occ(g, &t.occ.partition())?;
    let pruned = prune_certificate(g, &occ.head, cert, t.order)?;
    let mut kept = VertexSet::new();
    for comp in components(g, &occ.bipartite) {
        if !comp.is_disjoint(&pruned.vertices) {
            kept.extend_from(&comp);
        }
    }
    let dropped = occ.bipartite.difference(&kept);
    let shrunk = Occ { bipartite: kept, head: occ.head.clone(), rest: occ.rest.union(&dropped) };
    Ok(TightOcc { occ: shrunk, order: t.order, certificate: Some(pruned) })
}

/// Contents of an OCC file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccFile {
    pub partition: Partition3,
    pub order: Option<usize>,
    pub certificate: Option<Certificate>,
}

impl OccFile {
    /// Parses
    ///
    /// ```text
    /// occ B: <ids> / C: <ids> / R: <ids>
    /// z: <order>
    /// cert-v: <ids>
    /// cert-e: <u>-<v> ...
    /// ```
    ///
    /// where all lines but the first are optional and `#` starts a comment.
    pub fn parse(text: &str) -> Result<OccFile, ParseError> {
        let mut partition = None;
        let mut order = None;
        let mut cert_v: Option<VertexSet> = None;
        let mut cert_e: Option<Vec<Edge>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(body) = content.strip_prefix("occ ") {
                partition = Some(parse_partition_body(body, line)?);
            } else if let Some(body) = content.strip_prefix("z:") {
                order = Some(parse_number(body.trim(), line)?);
            } else if let Some(body) = content.strip_prefix("cert-v:") {
                cert_v = Some(parse_vertex_list(body, line)?);
            } else if let Some(body) = content.strip_prefix("cert-e:") {
                let mut edges = Vec::new();
                for token in body.split_whitespace() {
                    let (u, v) = token
                        .split_once('-')
                        .ok_or_else(|| ParseError::syntax(line, format!("bad edge `{token}`")))?;
                    edges.push((parse_number(u, line)?, parse_number(v, line)?));
                }
                cert_e = Some(edges);
            } else {
                return Err(ParseError::syntax(line, format!("unknown line `{content}`")));
            }
        }
        let partition = partition.ok_or_else(|| ParseError::syntax(0, "missing `occ` line"))?;
        let certificate = match (cert_v, cert_e) {
            (None, None) => None,
            (v, e) => Some(Certificate::new(v.unwrap_or_default(), e.unwrap_or_default())),
        };
        Ok(OccFile { partition, order, certificate })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "occ B: {} / C: {} / R: {}\n",
            self.partition.bipartite, self.partition.cut, self.partition.rest
        );
        if let Some(z) = self.order {
            let _ = writeln!(out, "z: {z}");
        }
        if let Some(cert) = &self.certificate {
            let _ = writeln!(out, "cert-v: {}", cert.vertices);
            let edges: Vec<String> = cert.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
            let _ = writeln!(out, "cert-e: {}", edges.join(" "));
        }
        out
    }
}

impl From<&TightOcc> for OccFile {
    fn from(t: &TightOcc) -> Self {
        OccFile {
            partition: t.occ.partition(),
            order: Some(t.order),
            certificate: t.certificate.clone(),
        }
    }
}

fn parse_partition_body(body: &str, line: usize) -> Result<Partition3, ParseError> {
    let pieces: Vec<&str> = body.split('/').map(str::trim).collect();
    if pieces.len() != 3 {
        return Err(ParseError::syntax(line, "expected `B: .. / C: .. / R: ..`"));
    }
    let mut sets = Vec::new();
    for (piece, tag) in pieces.iter().zip(["B:", "C:", "R:"]) {
        let list = piece
            .strip_prefix(tag)
            .ok_or_else(|| ParseError::syntax(line, format!("expected `{tag}`")))?;
        sets.push(parse_vertex_list(list, line)?);
    }
    let rest = sets.pop().unwrap_or_default();
    let cut = sets.pop().unwrap_or_default();
    let bipartite = sets.pop().unwrap_or_default();
    Ok(Partition3::new(bipartite, cut, rest))
}
