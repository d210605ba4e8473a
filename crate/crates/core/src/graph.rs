//! Graphs with boundary, matchings and edge weights.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
    Plain,
}

impl Color {
    pub fn as_str(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::White => "white",
            Color::Plain => "plain",
        }
    }
}

/// Which family of results a graph is treated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Black/white coloring, boundary vertices all white.
    Bipartite,
    /// Uncolored vertices.
    General,
}

/// Unordered vertex pair, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(pub VertexId, pub VertexId);

impl Edge {
    pub fn new(u: VertexId, v: VertexId) -> Self {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

/// Positive rational weight per edge, aligned with the graph's edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeights(pub Vec<BigRational>);

impl EdgeWeights {
    pub fn uniform(edges: usize) -> Self {
        EdgeWeights(vec![BigRational::one(); edges])
    }

    pub fn get(&self, e: EdgeId) -> &BigRational {
        &self.0[e]
    }

    pub fn matching_weight(&self, m: &Matching) -> BigRational {
        m.edges.iter().map(|&e| self.0[e].clone()).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("edge {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("edges {0} and {1} share a vertex")]
    NotAMatching(EdgeId, EdgeId),
    #[error("weight vector has {got} entries, graph has {expected} edges")]
    WeightCount { expected: usize, got: usize },
}

/// A finite simple graph with a circularly ordered (counterclockwise) list of
/// boundary vertices.
///
/// The structure admits graphs that break the invariants (self-loops, parallel
/// edges, bad colorings) so that [`validate`] can report them; the algorithms
/// downstream expect a clean report.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphWithBoundary {
    labels: Vec<String>,
    colors: Vec<Color>,
    edges: Vec<Edge>,
    boundary: Vec<VertexId>,
    weights: Option<EdgeWeights>,
}

impl GraphWithBoundary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>, color: Color) -> VertexId {
        self.labels.push(label.into());
        self.colors.push(color);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        for w in [u, v] {
            if w >= self.labels.len() {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        self.edges.push(Edge::new(u, v));
        if let Some(w) = &mut self.weights {
            w.0.push(BigRational::one());
        }
        Ok(self.edges.len() - 1)
    }

    pub fn set_boundary(&mut self, boundary: Vec<VertexId>) -> Result<(), GraphError> {
        if let Some(&v) = boundary.iter().find(|&&v| v >= self.labels.len()) {
            return Err(GraphError::UnknownVertex(v));
        }
        self.boundary = boundary;
        Ok(())
    }

    pub fn set_weights(&mut self, weights: Option<EdgeWeights>) -> Result<(), GraphError> {
        if let Some(w) = &weights {
            if w.0.len() != self.edges.len() {
                return Err(GraphError::WeightCount {
                    expected: self.edges.len(),
                    got: w.0.len(),
                });
            }
        }
        self.weights = weights;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn color(&self, v: VertexId) -> Color {
        self.colors[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    pub fn weights(&self) -> Option<&EdgeWeights> {
        self.weights.as_ref()
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.contains(&v)
    }

    /// Position of `v` in the boundary list.
    pub fn boundary_position(&self, v: VertexId) -> Option<usize> {
        self.boundary.iter().position(|&b| b == v)
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.contains(v))
            .map(|(i, _)| i)
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let target = Edge::new(u, v);
        self.edges.iter().position(|&e| e == target)
    }

    /// The mode implied by the coloring: all plain is general, all colored is
    /// bipartite, anything else has no natural mode.
    pub fn natural_mode(&self) -> Option<Mode> {
        if self.colors.iter().all(|&c| c == Color::Plain) {
            Some(Mode::General)
        } else if self.colors.iter().all(|&c| c != Color::Plain) {
            Some(Mode::Bipartite)
        } else {
            None
        }
    }

    /// Black vertices in declaration order; these index Kasteleyn rows.
    pub fn blacks(&self) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.colors[v] == Color::Black)
            .collect()
    }

    /// Internal vertices of the given color (or all internal vertices for
    /// `Color::Plain` in general mode), in declaration order.
    pub fn internal_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| !self.is_boundary(v))
            .collect()
    }

    /// Column order for Kasteleyn matrices: internal whites in declaration
    /// order, then the boundary in its circular order.
    pub fn white_order(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = (0..self.vertex_count())
            .filter(|&v| self.colors[v] == Color::White && !self.is_boundary(v))
            .collect();
        out.extend_from_slice(&self.boundary);
        out
    }

    /// Row/column order for skew Kasteleyn matrices: internal vertices in
    /// declaration order, then the boundary in its circular order.
    pub fn general_order(&self) -> Vec<VertexId> {
        let mut out = self.internal_vertices();
        out.extend_from_slice(&self.boundary);
        out
    }
}

/// Derived sizes: `internal` is N (internal whites in bipartite mode, internal
/// vertices in general mode), `excess` is k = #blacks - N (bipartite only),
/// `boundary` is n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub internal: usize,
    pub excess: Option<usize>,
    pub boundary: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop {
        edge: EdgeId,
    },
    ParallelEdge {
        first: EdgeId,
        second: EdgeId,
    },
    DuplicateBoundary {
        vertex: VertexId,
    },
    UncoloredVertex {
        vertex: VertexId,
    },
    ColoredVertex {
        vertex: VertexId,
    },
    NonBipartiteEdge {
        edge: EdgeId,
    },
    BlackBoundary {
        vertex: VertexId,
    },
    NonPositiveWeight {
        edge: EdgeId,
    },
    /// More internal whites than blacks, or more excess blacks than boundary
    /// vertices.
    Unbalanced {
        blacks: usize,
        internal_whites: usize,
        boundary: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { edge } => write!(f, "self-loop at edge {edge}"),
            Violation::ParallelEdge { first, second } => {
                write!(f, "parallel edges {first} and {second}")
            }
            Violation::DuplicateBoundary { vertex } => {
                write!(f, "vertex {vertex} repeated in boundary")
            }
            Violation::UncoloredVertex { vertex } => {
                write!(f, "vertex {vertex} is uncolored in bipartite mode")
            }
            Violation::ColoredVertex { vertex } => {
                write!(f, "vertex {vertex} is colored in general mode")
            }
            Violation::NonBipartiteEdge { edge } => write!(f, "non-bipartite edge {edge}"),
            Violation::BlackBoundary { vertex } => write!(f, "boundary vertex {vertex} is black"),
            Violation::NonPositiveWeight { edge } => {
                write!(f, "edge {edge} has a non-positive weight")
            }
            Violation::Unbalanced {
                blacks,
                internal_whites,
                boundary,
            } => write!(
                f,
                "unbalanced coloring: {blacks} blacks, {internal_whites} internal whites, {boundary} boundary whites"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub mode: Mode,
    pub violations: Vec<Violation>,
    pub counts: Counts,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural hypothesis for `mode` and derives (N, k, n).
pub fn validate(g: &GraphWithBoundary, mode: Mode) -> ValidationReport {
    let mut violations = Vec::new();

    let mut seen: HashMap<Edge, EdgeId> = HashMap::new();
    for (i, &e) in g.edges.iter().enumerate() {
        if e.0 == e.1 {
            violations.push(Violation::SelfLoop { edge: i });
        }
        if let Some(&first) = seen.get(&e) {
            violations.push(Violation::ParallelEdge { first, second: i });
        } else {
            seen.insert(e, i);
        }
    }

    let mut in_boundary = BTreeSet::new();
    for &v in &g.boundary {
        if !in_boundary.insert(v) {
            violations.push(Violation::DuplicateBoundary { vertex: v });
        }
    }

    if let Some(w) = &g.weights {
        for (i, x) in w.0.iter().enumerate() {
            if !x.is_positive() {
                violations.push(Violation::NonPositiveWeight { edge: i });
            }
        }
    }

    let n = in_boundary.len();
    let counts = match mode {
        Mode::General => {
            for v in 0..g.vertex_count() {
                if g.colors[v] != Color::Plain {
                    violations.push(Violation::ColoredVertex { vertex: v });
                }
            }
            Counts {
                internal: g.vertex_count() - n,
                excess: None,
                boundary: n,
            }
        }
        Mode::Bipartite => {
            for v in 0..g.vertex_count() {
                if g.colors[v] == Color::Plain {
                    violations.push(Violation::UncoloredVertex { vertex: v });
                }
            }
            for (i, e) in g.edges.iter().enumerate() {
                if e.0 != e.1 && g.colors[e.0] == g.colors[e.1] {
                    violations.push(Violation::NonBipartiteEdge { edge: i });
                }
            }
            for &v in &in_boundary {
                if g.colors[v] == Color::Black {
                    violations.push(Violation::BlackBoundary { vertex: v });
                }
            }
            let blacks = g.colors.iter().filter(|&&c| c == Color::Black).count();
            let internal_whites = (0..g.vertex_count())
                .filter(|&v| g.colors[v] == Color::White && !in_boundary.contains(&v))
                .count();
            let excess = blacks.checked_sub(internal_whites);
            match excess {
                Some(k) if k <= n => {}
                _ => violations.push(Violation::Unbalanced {
                    blacks,
                    internal_whites,
                    boundary: n,
                }),
            }
            Counts {
                internal: internal_whites,
                excess: Some(excess.unwrap_or(0)),
                boundary: n,
            }
        }
    };

    ValidationReport {
        mode,
        violations,
        counts,
    }
}

/// A set of edges, kept sorted by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pub edges: Vec<EdgeId>,
}

impl Matching {
    pub fn new(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Matching { edges }
    }

    pub fn empty() -> Self {
        Matching { edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks that the edges exist and are pairwise vertex-disjoint.
    pub fn check(&self, g: &GraphWithBoundary) -> Result<(), GraphError> {
        let mut owner: HashMap<VertexId, EdgeId> = HashMap::new();
        for &e in &self.edges {
            if e >= g.edge_count() {
                return Err(GraphError::UnknownEdge(e));
            }
            let Edge(u, v) = g.edge(e);
            for w in [u, v] {
                if let Some(&f) = owner.get(&w) {
                    return Err(GraphError::NotAMatching(f, e));
                }
                owner.insert(w, e);
            }
        }
        Ok(())
    }

    /// True when every internal vertex is covered (boundary vertices at most
    /// once, which [`Matching::check`] already guarantees).
    pub fn is_perfect(&self, g: &GraphWithBoundary) -> bool {
        let covered: BTreeSet<VertexId> = self
            .edges
            .iter()
            .flat_map(|&e| {
                let Edge(u, v) = g.edge(e);
                [u, v]
            })
            .collect();
        g.internal_vertices().iter().all(|v| covered.contains(v))
    }
}

/// The boundary vertices covered by `m`.
pub fn boundary_of(m: &Matching, g: &GraphWithBoundary) -> Result<BTreeSet<VertexId>, GraphError> {
    m.check(g)?;
    Ok(m.edges
        .iter()
        .flat_map(|&e| {
            let Edge(u, v) = g.edge(e);
            [u, v]
        })
        .filter(|&v| g.is_boundary(v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::frac;

    fn four_cycle() -> GraphWithBoundary {
        let mut g = GraphWithBoundary::new();
        let b1 = g.add_vertex("b1", Color::Black);
        let w1 = g.add_vertex("w1", Color::White);
        let b2 = g.add_vertex("b2", Color::Black);
        let w2 = g.add_vertex("w2", Color::White);
        for (u, v) in [(b1, w1), (w1, b2), (b2, w2), (w2, b1)] {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    #[test]
    fn four_cycle_is_valid_bipartite() {
        let r = validate(&four_cycle(), Mode::Bipartite);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(
            r.counts,
            Counts {
                internal: 2,
                excess: Some(0),
                boundary: 0
            }
        );
    }

    #[test]
    fn white_white_edge_is_flagged() {
        let mut g = four_cycle();
        g.add_edge(1, 3).unwrap();
        let r = validate(&g, Mode::Bipartite);
        assert_eq!(r.violations, vec![Violation::NonBipartiteEdge { edge: 4 }]);
        assert_eq!(r.violations[0].to_string(), "non-bipartite edge 4");
    }

    #[test]
    fn star_with_boundary_counts() {
        let mut g = GraphWithBoundary::new();
        let b = g.add_vertex("b1", Color::Black);
        let w1 = g.add_vertex("w1", Color::White);
        let w2 = g.add_vertex("w2", Color::White);
        g.add_edge(b, w1).unwrap();
        g.add_edge(b, w2).unwrap();
        g.set_boundary(vec![w1, w2]).unwrap();
        let r = validate(&g, Mode::Bipartite);
        assert!(r.is_valid());
        assert_eq!(
            r.counts,
            Counts {
                internal: 0,
                excess: Some(1),
                boundary: 2
            }
        );

        let m = Matching::new(vec![0]);
        assert_eq!(boundary_of(&m, &g).unwrap(), BTreeSet::from([w1]));
    }

    #[test]
    fn structural_violations() {
        let mut g = GraphWithBoundary::new();
        let a = g.add_vertex("a", Color::Plain);
        let b = g.add_vertex("b", Color::Black);
        g.add_edge(a, a).unwrap();
        g.add_edge(a, b).unwrap();
        g.add_edge(b, a).unwrap();
        g.set_boundary(vec![a, a]).unwrap();
        g.set_weights(Some(EdgeWeights(vec![frac(1, 2), frac(0, 1), frac(-1, 3)])))
            .unwrap();
        let r = validate(&g, Mode::General);
        assert!(r.violations.contains(&Violation::SelfLoop { edge: 0 }));
        assert!(r.violations.contains(&Violation::ParallelEdge {
            first: 1,
            second: 2
        }));
        assert!(r
            .violations
            .contains(&Violation::DuplicateBoundary { vertex: a }));
        assert!(r
            .violations
            .contains(&Violation::ColoredVertex { vertex: b }));
        assert!(r
            .violations
            .contains(&Violation::NonPositiveWeight { edge: 1 }));
        assert!(r
            .violations
            .contains(&Violation::NonPositiveWeight { edge: 2 }));
    }

    #[test]
    fn black_boundary_and_imbalance() {
        let mut g = GraphWithBoundary::new();
        let b = g.add_vertex("b", Color::Black);
        let w = g.add_vertex("w", Color::White);
        let w2 = g.add_vertex("w2", Color::White);
        g.add_edge(b, w).unwrap();
        g.set_boundary(vec![b]).unwrap();
        let r = validate(&g, Mode::Bipartite);
        assert!(r
            .violations
            .contains(&Violation::BlackBoundary { vertex: b }));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Unbalanced { .. })));
        let _ = w2;
    }

    #[test]
    fn boundary_of_examples() {
        let mut g = GraphWithBoundary::new();
        let vs: Vec<_> = (1..=4)
            .map(|i| g.add_vertex(format!("v{i}"), Color::Plain))
            .collect();
        for i in 0..4 {
            g.add_edge(vs[i], vs[(i + 1) % 4]).unwrap();
        }
        g.set_boundary(vs.clone()).unwrap();
        assert!(boundary_of(&Matching::empty(), &g).unwrap().is_empty());
        assert_eq!(
            boundary_of(&Matching::new(vec![0]), &g).unwrap(),
            BTreeSet::from([vs[0], vs[1]])
        );
        assert_eq!(
            boundary_of(&Matching::new(vec![0, 1]), &g),
            Err(GraphError::NotAMatching(0, 1))
        );
        assert_eq!(
            boundary_of(&Matching::new(vec![9]), &g),
            Err(GraphError::UnknownEdge(9))
        );
    }

    #[test]
    fn label_orders() {
        let mut g = GraphWithBoundary::new();
        let w_b = g.add_vertex("wb", Color::White);
        let b = g.add_vertex("b", Color::Black);
        let w_i = g.add_vertex("wi", Color::White);
        g.set_boundary(vec![w_b]).unwrap();
        assert_eq!(g.white_order(), vec![w_i, w_b]);
        assert_eq!(g.blacks(), vec![b]);
        assert_eq!(g.general_order(), vec![b, w_i, w_b]);
    }
}
