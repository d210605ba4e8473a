//! Straight-line drawings of graphs: immersion and genericity predicates,
//! crossing counts of matchings, and the canonical starting drawings from
//! which Kasteleyn signs are transported.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{frac, orient, rat, segment_relation, Point, SegmentRelation, Sign};
use crate::graph::{Edge, GraphWithBoundary, Matching, Mode, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImmersionError {
    #[error("configuration has {got} points, graph has {expected} vertices")]
    Size { expected: usize, got: usize },
    #[error("edges {0} and {1} overlap or meet at a vertex")]
    DegeneratePair(usize, usize),
    #[error("boundary vertex {0} is not on the unit circle")]
    BoundaryOffCircle(VertexId),
    #[error("setting {0:?} requires an empty boundary")]
    BoundaryNotAllowed(Setting),
}

/// Position of every vertex, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration(Vec<Point>);

impl Configuration {
    pub fn new(points: Vec<Point>) -> Self {
        Configuration(points)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn set(&mut self, v: VertexId, p: Point) {
        self.0[v] = p;
    }

    /// Pointwise linear interpolation toward `other`.
    pub fn lerp(&self, other: &Configuration, t: &BigRational) -> Configuration {
        Configuration(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.lerp(b, t))
                .collect(),
        )
    }

    pub fn check_size(&self, g: &GraphWithBoundary) -> Result<(), ImmersionError> {
        if self.len() != g.vertex_count() {
            return Err(ImmersionError::Size {
                expected: g.vertex_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<VertexId> for Configuration {
    type Output = Point;
    fn index(&self, v: VertexId) -> &Point {
        &self.0[v]
    }
}

/// Which family of signed matrices is being built; decides the canonical
/// start and whether boundary vertices are pinned to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    /// Bipartite, no boundary; square Kasteleyn matrix.
    ClosedBipartite,
    /// Bipartite with white boundary on the unit circle.
    BipartiteWithBoundary,
    /// Uncolored, no boundary; skew matrix.
    ClosedGeneral,
    /// Uncolored with boundary on the unit circle.
    GeneralWithBoundary,
}

impl Setting {
    pub fn mode(self) -> Mode {
        match self {
            Setting::ClosedBipartite | Setting::BipartiteWithBoundary => Mode::Bipartite,
            Setting::ClosedGeneral | Setting::GeneralWithBoundary => Mode::General,
        }
    }

    pub fn uses_disc(self) -> bool {
        matches!(
            self,
            Setting::BipartiteWithBoundary | Setting::GeneralWithBoundary
        )
    }

    /// The default setting for a graph in `mode`: closed when the boundary is
    /// empty.
    pub fn for_graph(g: &GraphWithBoundary, mode: Mode) -> Setting {
        match (mode, g.boundary().is_empty()) {
            (Mode::Bipartite, true) => Setting::ClosedBipartite,
            (Mode::Bipartite, false) => Setting::BipartiteWithBoundary,
            (Mode::General, true) => Setting::ClosedGeneral,
            (Mode::General, false) => Setting::GeneralWithBoundary,
        }
    }
}

fn edge_points<'a>(c: &'a Configuration, e: &Edge) -> (&'a Point, &'a Point) {
    (&c[e.0], &c[e.1])
}

/// Membership in the space of planar immersions: vertex positions are
/// distinct and no vertex lies on the closed segment of a non-incident edge.
pub fn is_immersion(g: &GraphWithBoundary, c: &Configuration) -> bool {
    if !distinct_positions(g, c) {
        return false;
    }
    for e in g.edges() {
        let (a, b) = edge_points(c, e);
        for v in 0..g.vertex_count() {
            if e.contains(v) {
                continue;
            }
            if crate::geometry::on_closed_segment(a, b, &c[v]) {
                return false;
            }
        }
    }
    true
}

fn distinct_positions(g: &GraphWithBoundary, c: &Configuration) -> bool {
    c.len() == g.vertex_count() && (0..c.len()).all(|i| (i + 1..c.len()).all(|j| c[i] != c[j]))
}

fn collinear_overlap(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    orient(p1, p2, q1) == Sign::Zero
        && orient(p1, p2, q2) == Sign::Zero
        && matches!(
            segment_relation(p1, p2, q1, q2),
            Ok(SegmentRelation::Degenerate)
        )
}

/// Membership in the larger generic space: distinct vertex positions and no
/// two distinct edges overlapping along a segment. Crossings and vertices on
/// edges are allowed.
pub fn is_generic(g: &GraphWithBoundary, c: &Configuration) -> bool {
    if !distinct_positions(g, c) {
        return false;
    }
    let edges = g.edges();
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = edge_points(c, e);
        for f in &edges[i + 1..] {
            let (p, q) = edge_points(c, f);
            if collinear_overlap(a, b, p, q) {
                return false;
            }
        }
    }
    true
}

/// Immersion with no crossings: non-adjacent edges are disjoint and adjacent
/// edges meet only at their shared endpoint.
pub fn is_embedding(g: &GraphWithBoundary, c: &Configuration) -> bool {
    if !is_immersion(g, c) {
        return false;
    }
    let edges = g.edges();
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = edge_points(c, e);
        for f in &edges[i + 1..] {
            let (p, q) = edge_points(c, f);
            let adjacent = e.contains(f.0) || e.contains(f.1);
            let expected = if adjacent {
                SegmentRelation::SharedEndpointOnly
            } else {
                SegmentRelation::Disjoint
            };
            if segment_relation(a, b, p, q) != Ok(expected) {
                return false;
            }
        }
    }
    true
}

fn angle_half(p: &Point) -> u8 {
    if p.y.is_positive() || (p.y.is_zero() && p.x.is_positive()) {
        0
    } else {
        1
    }
}

/// Counterclockwise angular order around the origin, starting at the
/// positive x-axis.
fn angle_cmp(p: &Point, q: &Point) -> Ordering {
    let origin = Point::from_ints(0, 0);
    angle_half(p)
        .cmp(&angle_half(q))
        .then_with(|| match orient(&origin, p, q) {
            Sign::Positive => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Negative => Ordering::Greater,
        })
}

/// True when the points are distinct and appear in counterclockwise cyclic
/// order around the origin.
pub fn is_counterclockwise_cycle(points: &[&Point]) -> bool {
    let n = points.len();
    if n < 2 {
        return true;
    }
    let descents = (0..n)
        .filter(|&i| angle_cmp(points[(i + 1) % n], points[i]) != Ordering::Greater)
        .count();
    descents == 1
}

fn boundary_on_circle(g: &GraphWithBoundary, c: &Configuration) -> Result<(), ImmersionError> {
    for &v in g.boundary() {
        if c[v].norm_squared() != BigRational::one() {
            return Err(ImmersionError::BoundaryOffCircle(v));
        }
    }
    Ok(())
}

/// Disc-shaped immersion: boundary vertices on the unit circle in their
/// counterclockwise order, internal vertices strictly inside, and an
/// immersion overall. Crossings are allowed.
pub fn is_disc_immersion(g: &GraphWithBoundary, c: &Configuration) -> bool {
    if c.check_size(g).is_err() || boundary_on_circle(g, c).is_err() {
        return false;
    }
    let one = BigRational::one();
    if g.internal_vertices()
        .iter()
        .any(|&v| c[v].norm_squared() >= one)
    {
        return false;
    }
    let pts: Vec<&Point> = g.boundary().iter().map(|&v| &c[v]).collect();
    is_counterclockwise_cycle(&pts) && is_immersion(g, c)
}

/// Crossing-free disc immersion.
pub fn is_disc_embedding(g: &GraphWithBoundary, c: &Configuration) -> bool {
    is_disc_immersion(g, c) && is_embedding(g, c)
}

/// Number of unordered pairs of edges of `m` whose segments intersect.
pub fn crossing_number(
    g: &GraphWithBoundary,
    c: &Configuration,
    m: &Matching,
) -> Result<usize, ImmersionError> {
    c.check_size(g)?;
    let mut count = 0;
    for (i, &e) in m.edges.iter().enumerate() {
        let (a, b) = edge_points(c, &g.edge(e));
        for &f in &m.edges[i + 1..] {
            let (p, q) = edge_points(c, &g.edge(f));
            match segment_relation(a, b, p, q) {
                Ok(SegmentRelation::Disjoint) => {}
                Ok(SegmentRelation::TransversalCross) => count += 1,
                Ok(SegmentRelation::Degenerate) if !collinear_overlap(a, b, p, q) => count += 1,
                _ => return Err(ImmersionError::DegeneratePair(e, f)),
            }
        }
    }
    Ok(count)
}

/// `(-1)^cross(M)`.
pub fn matching_sign(
    g: &GraphWithBoundary,
    c: &Configuration,
    m: &Matching,
) -> Result<i8, ImmersionError> {
    Ok(if crossing_number(g, c, m)? % 2 == 0 {
        1
    } else {
        -1
    })
}

/// Affine copy of `c` inside the disc of radius 1/sqrt(2).
pub fn scale_into_disc(c: &Configuration) -> Configuration {
    let pts = c.points();
    if pts.is_empty() {
        return c.clone();
    }
    let min_max = |f: fn(&Point) -> &BigRational| {
        let lo = pts.iter().map(f).min().unwrap().clone();
        let hi = pts.iter().map(f).max().unwrap().clone();
        (lo, hi)
    };
    let (x0, x1) = min_max(|p| &p.x);
    let (y0, y1) = min_max(|p| &p.y);
    let cx = (&x0 + &x1) / rat(2);
    let cy = (&y0 + &y1) / rat(2);
    let extent = std::cmp::max(&x1 - &x0, &y1 - &y0);
    let scale = if extent.is_zero() {
        BigRational::one()
    } else {
        BigRational::one() / extent
    };
    Configuration(
        pts.iter()
            .map(|p| Point::new((&p.x - &cx) * &scale, (&p.y - &cy) * &scale))
            .collect(),
    )
}

/// SplitMix64 finalizer over `seed ^ salt`, for deriving independent streams.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z =
        (seed ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Offsets in `[-1/4, 1/4]` on a 1/256 lattice; all zero for seed 0.
fn jitter(seed: u64, count: usize) -> Vec<BigRational> {
    if seed == 0 {
        return vec![BigRational::zero(); count];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| frac(rng.gen_range(-64..=64), 256))
        .collect()
}

/// `count` increasing parameters strictly inside `(lo, hi)`.
fn spread(lo: &BigRational, hi: &BigRational, count: usize, seed: u64) -> Vec<BigRational> {
    let step = (hi - lo) / rat(count as i64 + 1);
    jitter(seed, count)
        .into_iter()
        .enumerate()
        .map(|(j, d)| lo + &step * (rat(j as i64 + 1) + d))
        .collect()
}

/// Rational points on the open arc running counterclockwise from `last`
/// toward `first` (both on the unit circle, possibly equal), in
/// counterclockwise order.
fn arc_points(last: Option<&Point>, first: Option<&Point>, count: usize, seed: u64) -> Vec<Point> {
    let Some(last) = last else {
        // Whole circle free: use the right half.
        return spread(&rat(-1), &rat(1), count, seed)
            .iter()
            .map(Point::on_unit_circle)
            .collect();
    };
    // Work in the stereographic chart where `last` is finite. The second chart
    // is the first one rotated by a half turn.
    let rotated = last.circle_parameter().is_none();
    let chart = |p: &Point| -> Option<BigRational> {
        if rotated {
            Point::new(-p.x.clone(), -p.y.clone()).circle_parameter()
        } else {
            p.circle_parameter()
        }
    };
    let lo = chart(last).expect("last point is finite in its chart");
    let hi = match first.and_then(chart) {
        Some(h) if h > lo => h,
        _ => &lo + rat(1),
    };
    spread(&lo, &hi, count, seed)
        .iter()
        .map(|t| {
            let p = Point::on_unit_circle(t);
            if rotated {
                Point::new(-p.x, -p.y)
            } else {
                p
            }
        })
        .collect()
}

/// A drawing at which the all-plus-ones matrix already has the right signs.
///
/// * closed bipartite: blacks on the line `y = 1`, whites on `y = 0`, both in
///   index order by `x`;
/// * bipartite with boundary: boundary pinned at the target, then reading
///   counterclockwise from the last boundary vertex: blacks in reverse index
///   order followed by internal whites in index order;
/// * general: internal vertices in index order on the free arc after the last
///   boundary vertex (the whole circle when the boundary is empty).
///
/// Nonzero seeds perturb the free positions without changing their order.
pub fn canonical_start(
    g: &GraphWithBoundary,
    setting: Setting,
    target: &Configuration,
    seed: u64,
) -> Result<Configuration, ImmersionError> {
    target.check_size(g)?;
    let mut c = Configuration(vec![Point::from_ints(0, 0); g.vertex_count()]);
    match setting {
        Setting::ClosedBipartite => {
            if !g.boundary().is_empty() {
                return Err(ImmersionError::BoundaryNotAllowed(setting));
            }
            let blacks = g.blacks();
            let whites = g.white_order();
            let jb = jitter(seed, blacks.len());
            let jw = jitter(if seed == 0 { 0 } else { mix_seed(seed, 1) }, whites.len());
            for (i, (&v, d)) in blacks.iter().zip(jb).enumerate() {
                c.set(v, Point::new(rat(i as i64 + 1) + d, rat(1)));
            }
            for (i, (&v, d)) in whites.iter().zip(jw).enumerate() {
                c.set(v, Point::new(rat(i as i64 + 1) + d, rat(0)));
            }
        }
        Setting::ClosedGeneral | Setting::GeneralWithBoundary | Setting::BipartiteWithBoundary => {
            if setting == Setting::ClosedGeneral && !g.boundary().is_empty() {
                return Err(ImmersionError::BoundaryNotAllowed(setting));
            }
            boundary_on_circle(g, target)?;
            for &v in g.boundary() {
                c.set(v, target[v].clone());
            }
            let free: Vec<VertexId> = if setting == Setting::BipartiteWithBoundary {
                let mut order: Vec<VertexId> = g.blacks().into_iter().rev().collect();
                order.extend(g.white_order().into_iter().filter(|&w| !g.is_boundary(w)));
                order
            } else {
                g.internal_vertices()
            };
            let last = g.boundary().last().map(|&v| &target[v]);
            let first = g.boundary().first().map(|&v| &target[v]);
            for (&v, p) in free.iter().zip(arc_points(last, first, free.len(), seed)) {
                c.set(v, p);
            }
        }
    }
    Ok(c)
}
