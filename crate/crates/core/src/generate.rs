//! Deterministic fixture generators with straight-line coordinates.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{frac, orient, segment_relation, Point, SegmentRelation, Sign};
use crate::graph::{validate, Color, GraphWithBoundary, Mode, VertexId};
use crate::immersion::{is_disc_embedding, Configuration};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("no k-subset can be matched: k = {excess} exceeds boundary size {boundary}")]
    ExcessTooLarge { excess: usize, boundary: usize },
    #[error("no realizable instance after {0} attempts")]
    Unrealizable(usize),
}

/// `rows x cols` grid with checkerboard coloring, integer coordinates and no
/// boundary. Vertex `(r, c)` is black when `r + c` is even.
pub fn generate_grid(rows: usize, cols: usize) -> (GraphWithBoundary, Configuration) {
    assert!(
        rows >= 1 && cols >= 1,
        "grid needs at least one row and column"
    );
    let mut g = GraphWithBoundary::new();
    let mut pts = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let color = if (r + c) % 2 == 0 {
                Color::Black
            } else {
                Color::White
            };
            g.add_vertex(format!("r{r}c{c}"), color);
            pts.push(Point::from_ints(c as i64, r as i64));
        }
    }
    let id = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_edge(id(r, c), id(r, c + 1))
                    .expect("grid vertex exists");
            }
            if r + 1 < rows {
                g.add_edge(id(r, c), id(r + 1, c))
                    .expect("grid vertex exists");
            }
        }
    }
    (g, Configuration::new(pts))
}

/// Dual graph of the Aztec diamond of the given order: one vertex per unit
/// cell `[x, x+1] x [y, y+1]` with `|x + 1/2| + |y + 1/2| <= order`, placed at
/// the doubled cell centre `(2x + 1, 2y + 1)`.
pub fn generate_aztec(order: usize) -> (GraphWithBoundary, Configuration) {
    assert!(order >= 1, "Aztec diamond order must be positive");
    let n = order as i64;
    let mut cells = Vec::new();
    for y in -n..n {
        for x in -n..n {
            if (2 * x + 1).abs() + (2 * y + 1).abs() <= 2 * n {
                cells.push((x, y));
            }
        }
    }
    let mut g = GraphWithBoundary::new();
    let mut pts = Vec::new();
    for &(x, y) in &cells {
        let color = if (x + y).rem_euclid(2) == 0 {
            Color::Black
        } else {
            Color::White
        };
        g.add_vertex(format!("x{x}y{y}"), color);
        pts.push(Point::from_ints(2 * x + 1, 2 * y + 1));
    }
    let index = |x: i64, y: i64| cells.iter().position(|&c| c == (x, y));
    for (i, &(x, y)) in cells.iter().enumerate() {
        for (dx, dy) in [(1, 0), (0, 1)] {
            if let Some(j) = index(x + dx, y + dy) {
                g.add_edge(i, j).expect("cell exists");
            }
        }
    }
    (g, Configuration::new(pts))
}

/// Parameters for [`generate_random_disc_graph`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomGraphParams {
    pub mode: Mode,
    /// Internal whites (bipartite) or internal vertices (general).
    pub internal: usize,
    /// Blacks beyond `internal`; ignored in general mode.
    pub excess: usize,
    pub boundary: usize,
    /// Probability of keeping each edge of the maximal planar drawing.
    pub keep_probability: f64,
}

const SAMPLE_ATTEMPTS: usize = 200;

/// Random graph with boundary, embedded in the unit disc.
///
/// Boundary vertices are rational points of the unit circle in
/// counterclockwise order; internal vertices are lattice points strictly
/// inside, in general position. Edges are added greedily in random order while
/// the drawing stays crossing-free, then thinned by `keep_probability`.
/// With no boundary the result is a random subgraph of a triangulation.
pub fn generate_random_disc_graph(
    params: &RandomGraphParams,
    seed: u64,
) -> Result<(GraphWithBoundary, Configuration), GenerateError> {
    if params.mode == Mode::Bipartite && params.excess > params.boundary {
        return Err(GenerateError::ExcessTooLarge {
            excess: params.excess,
            boundary: params.boundary,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GraphWithBoundary::new();
    let mut boundary = Vec::new();
    match params.mode {
        Mode::Bipartite => {
            let blacks = params.internal + params.excess;
            for i in 1..=blacks {
                g.add_vertex(format!("b{i}"), Color::Black);
            }
            for i in 1..=params.internal + params.boundary {
                let v = g.add_vertex(format!("w{i}"), Color::White);
                if i > params.internal {
                    boundary.push(v);
                }
            }
        }
        Mode::General => {
            for i in 1..=params.internal + params.boundary {
                let v = g.add_vertex(format!("v{i}"), Color::Plain);
                if i > params.internal {
                    boundary.push(v);
                }
            }
        }
    }
    g.set_boundary(boundary.clone())
        .expect("boundary vertices exist");

    let pts = sample_positions(&g, &mut rng)?;
    let c = Configuration::new(pts);

    let mut candidates: Vec<(VertexId, VertexId)> = Vec::new();
    for u in 0..g.vertex_count() {
        for v in u + 1..g.vertex_count() {
            let allowed = match params.mode {
                Mode::Bipartite => g.color(u) != g.color(v),
                Mode::General => true,
            };
            if allowed {
                candidates.push((u, v));
            }
        }
    }
    candidates.shuffle(&mut rng);

    let mut chosen: Vec<(VertexId, VertexId)> = Vec::new();
    for (u, v) in candidates {
        let fits = chosen.iter().all(|&(a, b)| {
            let adjacent = a == u || a == v || b == u || b == v;
            let rel = segment_relation(&c[u], &c[v], &c[a], &c[b]);
            if adjacent {
                rel == Ok(SegmentRelation::SharedEndpointOnly)
            } else {
                rel == Ok(SegmentRelation::Disjoint)
            }
        });
        if fits {
            chosen.push((u, v));
        }
    }
    for (u, v) in chosen {
        if rng.gen_bool(params.keep_probability.clamp(0.0, 1.0)) {
            g.add_edge(u, v).expect("vertices exist");
        }
    }

    let report = validate(&g, params.mode);
    if !report.is_valid() || !is_disc_embedding(&g, &c) {
        return Err(GenerateError::Unrealizable(1));
    }
    Ok((g, c))
}

fn sample_positions(
    g: &GraphWithBoundary,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>, GenerateError> {
    let limit = frac(4, 5);
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut pts = vec![Point::from_ints(0, 0); g.vertex_count()];
        let mut params: Vec<BigRational> = Vec::new();
        while params.len() < g.boundary().len() {
            let t = frac(rng.gen_range(-96..=96), 16);
            if !params.contains(&t) {
                params.push(t);
            }
        }
        params.sort();
        for (&v, t) in g.boundary().iter().zip(&params) {
            pts[v] = Point::on_unit_circle(t);
        }
        for v in g.internal_vertices() {
            pts[v] = loop {
                let p = Point::from_fracs(rng.gen_range(-60..=60), 64, rng.gen_range(-60..=60), 64);
                if p.norm_squared() < limit {
                    break p;
                }
            };
        }
        if general_position(&pts) {
            return Ok(pts);
        }
    }
    Err(GenerateError::Unrealizable(SAMPLE_ATTEMPTS))
}

/// Distinct points with no three collinear.
fn general_position(pts: &[Point]) -> bool {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                return false;
            }
            for k in j + 1..pts.len() {
                if orient(&pts[i], &pts[j], &pts[k]) == Sign::Zero {
                    return false;
                }
            }
        }
    }
    true
}

/// Uniformly random positive weights `p/q` with `1 <= p, q <= 9`.
pub fn random_weights(edges: usize, seed: u64) -> crate::graph::EdgeWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    crate::graph::EdgeWeights(
        (0..edges)
            .map(|_| frac(rng.gen_range(1..=9), rng.gen_range(1..=9)))
            .collect(),
    )
}

/// Random configuration for `g` in general position, with boundary vertices
/// kept where `base` has them. Edges may cross. Internal vertices land
/// strictly inside the unit disc.
pub fn random_immersion(g: &GraphWithBoundary, base: &Configuration, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = frac(4, 5);
    loop {
        let mut pts = base.points().to_vec();
        for v in g.internal_vertices() {
            pts[v] = loop {
                let p = Point::from_fracs(rng.gen_range(-60..=60), 64, rng.gen_range(-60..=60), 64);
                if p.norm_squared() < limit {
                    break p;
                }
            };
        }
        if general_position(&pts) {
            return Configuration::new(pts);
        }
    }
}

/// Unit-circle point with stereographic parameter `num / den`.
pub fn circle_point(num: i64, den: i64) -> Point {
    Point::on_unit_circle(&frac(num, den))
}
