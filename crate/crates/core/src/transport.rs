//! Kasteleyn signs by deformation.
//!
//! A straight-line path is drawn from a canonical start, where the all-plus
//! matrix is already correct, to the target drawing. Each time a vertex
//! passes transversally through the interior of a non-incident edge, that
//! edge's sign flips. Only per-edge parity matters, so events on different
//! (vertex, edge) pairs are never ordered against each other.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{
    frac, motion_collinearity_poly, motion_projection_poly, roots_in_open_unit_interval, Point,
    QuadNum, Sign,
};
use crate::graph::{EdgeId, GraphWithBoundary, VertexId};
use crate::immersion::{
    canonical_start, is_counterclockwise_cycle, is_immersion, mix_seed, Configuration,
    ImmersionError, Setting,
};

/// Waypoints of a piecewise-linear path. `pinned[v]` marks vertices that
/// never move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPlan {
    pub waypoints: Vec<Configuration>,
    pub pinned: Vec<bool>,
}

impl PathPlan {
    pub fn segment_count(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> PathPlan {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        PathPlan {
            waypoints,
            pinned: self.pinned.clone(),
        }
    }
}

/// Random interior waypoints are drawn on this lattice.
const LATTICE_BITS: u32 = 16;

/// Path from the canonical start to `target`, through `extra_waypoints`
/// random configurations. Pinned (boundary) vertices stay at their target
/// positions throughout. Consecutive equal waypoints are merged.
pub fn build_path(
    g: &GraphWithBoundary,
    setting: Setting,
    target: &Configuration,
    seed: u64,
    extra_waypoints: usize,
) -> Result<PathPlan, ImmersionError> {
    let start = canonical_start(g, setting, target, seed)?;
    let pinned: Vec<bool> = (0..g.vertex_count())
        .map(|v| setting.uses_disc() && g.is_boundary(v))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x5EED));
    let mut waypoints = vec![start.clone()];
    for _ in 0..extra_waypoints {
        let mut w = target.clone();
        for v in 0..g.vertex_count() {
            if pinned[v] {
                continue;
            }
            let p = if setting.uses_disc() {
                random_disc_point(&mut rng)
            } else {
                random_box_point(&mut rng, &start, target)
            };
            w.set(v, p);
        }
        waypoints.push(w);
    }
    waypoints.push(target.clone());
    waypoints.dedup();
    Ok(PathPlan { waypoints, pinned })
}

fn lattice(rng: &mut ChaCha8Rng, lo: &BigRational, hi: &BigRational) -> BigRational {
    let steps = 1i64 << LATTICE_BITS;
    lo + (hi - lo) * frac(rng.gen_range(0..=steps), steps)
}

/// Uniform lattice point of the open disc of radius 15/16.
fn random_disc_point(rng: &mut ChaCha8Rng) -> Point {
    let r = frac(15, 16);
    let limit = &r * &r;
    loop {
        let p = Point::new(lattice(rng, &-r.clone(), &r), lattice(rng, &-r.clone(), &r));
        if p.norm_squared() < limit {
            return p;
        }
    }
}

fn random_box_point(rng: &mut ChaCha8Rng, a: &Configuration, b: &Configuration) -> Point {
    let all = || a.points().iter().chain(b.points());
    let x0 = all().map(|p| &p.x).min().expect("nonempty").clone();
    let x1 = all().map(|p| &p.x).max().expect("nonempty").clone();
    let y0 = all().map(|p| &p.y).min().expect("nonempty").clone();
    let y1 = all().map(|p| &p.y).max().expect("nonempty").clone();
    Point::new(lattice(rng, &x0, &x1), lattice(rng, &y0, &y1))
}

/// A vertex passing through the interior of an edge at time `time` of a
/// path segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub segment: usize,
    pub time: QuadNum,
    pub vertex: VertexId,
    pub edge: EdgeId,
    /// Always true for recorded events; non-transversal contacts abort.
    pub transversal: bool,
}

/// Why a path segment left the space of immersions or met it non-generically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degeneracy {
    WaypointNotImmersion {
        waypoint: usize,
    },
    IdenticallyCollinear {
        segment: usize,
        vertex: VertexId,
        edge: EdgeId,
    },
    Tangency {
        segment: usize,
        vertex: VertexId,
        edge: EdgeId,
    },
    EndpointContact {
        segment: usize,
        vertex: VertexId,
        edge: EdgeId,
    },
    EdgeCollapse {
        segment: usize,
        edge: EdgeId,
    },
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::WaypointNotImmersion { waypoint } => {
                write!(f, "waypoint {waypoint} is not a planar immersion")
            }
            Degeneracy::IdenticallyCollinear {
                segment,
                vertex,
                edge,
            } => write!(
                f,
                "vertex {vertex} stays collinear with edge {edge} along segment {segment}"
            ),
            Degeneracy::Tangency {
                segment,
                vertex,
                edge,
            } => {
                write!(
                    f,
                    "vertex {vertex} touches edge {edge} tangentially on segment {segment}"
                )
            }
            Degeneracy::EndpointContact {
                segment,
                vertex,
                edge,
            } => {
                write!(
                    f,
                    "vertex {vertex} meets an endpoint of edge {edge} on segment {segment}"
                )
            }
            Degeneracy::EdgeCollapse { segment, edge } => {
                write!(f, "edge {edge} shrinks to a point on segment {segment}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("degenerate path: {0}")]
    Degenerate(Degeneracy),
    #[error("pinned boundary vertex {vertex} passes through edge {edge}")]
    PinnedVertexEvent { vertex: VertexId, edge: EdgeId },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("degenerate after {attempts} attempts; last: {last}")]
    RetriesExhausted { attempts: usize, last: Degeneracy },
    #[error(transparent)]
    Start(#[from] ImmersionError),
}

/// Per-edge signs in `{+1, -1}` and the events that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignAssignment {
    pub signs: Vec<i8>,
    pub events: Vec<EventRecord>,
    pub seed: u64,
    /// Paths tried, including the successful one.
    pub attempts: usize,
}

impl SignAssignment {
    pub fn sign(&self, e: EdgeId) -> i8 {
        self.signs[e]
    }

    /// SHA-256 over the canonical text form of the event log.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for ev in &self.events {
            h.update(format!(
                "{} {} {} {} {}\n",
                ev.segment, ev.vertex, ev.edge, ev.time, ev.transversal
            ));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Follow `path`, recording every transversal vertex-through-edge event and
/// flipping the sign of the edge involved.
pub fn transport_signs(
    g: &GraphWithBoundary,
    path: &PathPlan,
) -> Result<SignAssignment, TransportError> {
    for (i, w) in path.waypoints.iter().enumerate() {
        if !is_immersion(g, w) {
            return Err(TransportError::Degenerate(
                Degeneracy::WaypointNotImmersion { waypoint: i },
            ));
        }
    }
    let mut signs = vec![1i8; g.edge_count()];
    let mut events = Vec::new();
    for (s, pair) in path.waypoints.windows(2).enumerate() {
        let (c0, c1) = (&pair[0], &pair[1]);
        let moves: Vec<bool> = (0..g.vertex_count()).map(|v| c0[v] != c1[v]).collect();
        for (e, edge) in g.edges().iter().enumerate() {
            if (moves[edge.0] || moves[edge.1])
                && collapses(&c0[edge.0], &c0[edge.1], &c1[edge.0], &c1[edge.1])
            {
                return Err(TransportError::Degenerate(Degeneracy::EdgeCollapse {
                    segment: s,
                    edge: e,
                }));
            }
        }
        for v in 0..g.vertex_count() {
            for (e, edge) in g.edges().iter().enumerate() {
                let (a, b) = (edge.0, edge.1);
                if edge.contains(v) || !(moves[v] || moves[a] || moves[b]) {
                    continue;
                }
                for time in pair_events(s, v, e, [&c0[v], &c1[v], &c0[a], &c1[a], &c0[b], &c1[b]])?
                {
                    if path.pinned[v] {
                        return Err(TransportError::PinnedVertexEvent { vertex: v, edge: e });
                    }
                    signs[e] = -signs[e];
                    events.push(EventRecord {
                        segment: s,
                        time,
                        vertex: v,
                        edge: e,
                        transversal: true,
                    });
                }
            }
        }
    }
    Ok(SignAssignment {
        signs,
        events,
        seed: 0,
        attempts: 1,
    })
}

/// Whether `b - a` passes through zero strictly inside the segment.
fn collapses(a0: &Point, b0: &Point, a1: &Point, b1: &Point) -> bool {
    let d0 = b0.sub(a0);
    let d1 = b1.sub(a1);
    let cross = &d0.x * &d1.y - &d0.y * &d1.x;
    let dot = &d0.x * &d1.x + &d0.y * &d1.y;
    cross.is_zero() && dot < BigRational::zero()
}

/// Times in `(0, 1)` at which `v` crosses the interior of edge `(a, b)`.
/// Points are `[v0, v1, a0, a1, b0, b1]`.
fn pair_events(
    s: usize,
    v: VertexId,
    e: EdgeId,
    p: [&Point; 6],
) -> Result<Vec<QuadNum>, TransportError> {
    let [v0, v1, a0, a1, b0, b1] = p;
    let f = motion_collinearity_poly(v0, v1, a0, a1, b0, b1);
    if f.is_zero() {
        return Err(TransportError::Degenerate(
            Degeneracy::IdenticallyCollinear {
                segment: s,
                vertex: v,
                edge: e,
            },
        ));
    }
    let roots = roots_in_open_unit_interval(&f).expect("nonzero polynomial");
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    let g = motion_projection_poly(v0, v1, a0, a1, b0, b1);
    let h = motion_projection_poly(v0, v1, b0, b1, a0, a1);
    let mut out = Vec::new();
    for r in roots {
        let (sg, sh) = (g.sign_at(&r.value), h.sign_at(&r.value));
        if sg == Sign::Negative || sh == Sign::Negative {
            continue;
        }
        if sg == Sign::Zero || sh == Sign::Zero {
            return Err(TransportError::Degenerate(Degeneracy::EndpointContact {
                segment: s,
                vertex: v,
                edge: e,
            }));
        }
        if r.multiplicity > 1 {
            return Err(TransportError::Degenerate(Degeneracy::Tangency {
                segment: s,
                vertex: v,
                edge: e,
            }));
        }
        out.push(r.value);
    }
    Ok(out)
}

/// Checks that `target` is a valid endpoint for `setting`: an immersion, and
/// for disc settings also boundary on the unit circle in counterclockwise
/// order with internal vertices strictly inside.
pub fn check_target(
    g: &GraphWithBoundary,
    setting: Setting,
    target: &Configuration,
) -> Result<(), TransportError> {
    target.check_size(g)?;
    if !is_immersion(g, target) {
        return Err(TransportError::InvalidTarget(
            "not a planar immersion".into(),
        ));
    }
    if setting.uses_disc() {
        let one = BigRational::from_integer(1.into());
        for &v in g.boundary() {
            if target[v].norm_squared() != one {
                return Err(TransportError::Start(ImmersionError::BoundaryOffCircle(v)));
            }
        }
        if g.internal_vertices()
            .iter()
            .any(|&v| target[v].norm_squared() >= one)
        {
            return Err(TransportError::InvalidTarget(
                "internal vertex outside the open unit disc".into(),
            ));
        }
        let pts: Vec<&Point> = g.boundary().iter().map(|&v| &target[v]).collect();
        if !is_counterclockwise_cycle(&pts) {
            return Err(TransportError::InvalidTarget(
                "boundary is not in counterclockwise order".into(),
            ));
        }
    }
    Ok(())
}

pub const DEFAULT_MAX_RETRIES: usize = 32;

/// Signs for `g` at `target`. With seed 0 the first attempt is the direct
/// path; otherwise it passes through one waypoint drawn from `seed`. Retry
/// `r > 0` draws its waypoint from a seed derived from `(seed, r)`.
pub fn compute_signed_structure(
    g: &GraphWithBoundary,
    setting: Setting,
    target: &Configuration,
    seed: u64,
    max_retries: usize,
) -> Result<SignAssignment, TransportError> {
    check_target(g, setting, target)?;
    let mut last = None;
    for attempt in 0..=max_retries {
        let (s, extra) = match (attempt, seed) {
            (0, 0) => (0, 0),
            (0, _) => (seed, 1),
            _ => (mix_seed(seed, attempt as u64), 1),
        };
        let path = build_path(g, setting, target, s, extra)?;
        match transport_signs(g, &path) {
            Ok(mut a) => {
                a.seed = seed;
                a.attempts = attempt + 1;
                return Ok(a);
            }
            Err(TransportError::Degenerate(d)) => last = Some(d),
            Err(e) => return Err(e),
        }
    }
    Err(TransportError::RetriesExhausted {
        attempts: max_retries + 1,
        last: last.expect("at least one attempt"),
    })
}
