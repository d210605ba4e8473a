//! Brute-force ground truth: explicit matching enumeration.
//!
//! Kept deliberately naive so that it can referee the linear-algebra route.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{EdgeWeights, GraphWithBoundary, Matching, VertexId};
use crate::immersion::{matching_sign, Configuration, ImmersionError};

pub const DEFAULT_VERTEX_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {vertices} vertices; enumeration is capped at {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("vertex {0} is not a boundary vertex")]
    NotBoundary(VertexId),
    #[error(transparent)]
    Immersion(#[from] ImmersionError),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cover {
    Must,
    May,
    Never,
}

/// Every matching covering all internal vertices, in a fixed order. With
/// `subset` given, exactly the boundary vertices in `subset` are covered.
pub fn enumerate_matchings(
    g: &GraphWithBoundary,
    subset: Option<&[VertexId]>,
    cap: usize,
) -> Result<Vec<Matching>, OracleError> {
    if g.vertex_count() > cap {
        return Err(OracleError::TooLarge {
            vertices: g.vertex_count(),
            cap,
        });
    }
    let chosen: Option<BTreeSet<VertexId>> = match subset {
        Some(s) => {
            if let Some(&v) = s.iter().find(|&&v| !g.is_boundary(v)) {
                return Err(OracleError::NotBoundary(v));
            }
            Some(s.iter().copied().collect())
        }
        None => None,
    };
    let cover: Vec<Cover> = (0..g.vertex_count())
        .map(|v| match (&chosen, g.is_boundary(v)) {
            (_, false) => Cover::Must,
            (None, true) => Cover::May,
            (Some(s), true) if s.contains(&v) => Cover::Must,
            (Some(_), true) => Cover::Never,
        })
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    let mut stack = Vec::new();
    extend(g, &cover, 0, &mut used, &mut stack, &mut out);
    Ok(out)
}

fn extend(
    g: &GraphWithBoundary,
    cover: &[Cover],
    from: VertexId,
    used: &mut [bool],
    stack: &mut Vec<usize>,
    out: &mut Vec<Matching>,
) {
    let Some(v) = (from..g.vertex_count()).find(|&v| !used[v] && cover[v] != Cover::Never) else {
        out.push(Matching::new(stack.clone()));
        return;
    };
    if cover[v] == Cover::May {
        used[v] = true;
        extend(g, cover, v + 1, used, stack, out);
        used[v] = false;
    }
    for e in g.incident_edges(v) {
        let u = g.edge(e).other(v);
        if u == v || used[u] || cover[u] == Cover::Never {
            continue;
        }
        used[v] = true;
        used[u] = true;
        stack.push(e);
        extend(g, cover, v + 1, used, stack, out);
        stack.pop();
        used[u] = false;
        used[v] = false;
    }
}

fn weight_of(weights: Option<&EdgeWeights>, m: &Matching) -> BigRational {
    weights.map_or_else(BigRational::one, |w| w.matching_weight(m))
}

/// `D(G, I)`, or the weighted sum when `weights` is given.
pub fn oracle_measurement(
    g: &GraphWithBoundary,
    subset: &[VertexId],
    weights: Option<&EdgeWeights>,
) -> Result<BigRational, OracleError> {
    Ok(enumerate_matchings(g, Some(subset), DEFAULT_VERTEX_CAP)?
        .iter()
        .map(|m| weight_of(weights, m))
        .sum())
}

/// `D(G, I)` for every boundary subset, indexed by the bitmask of boundary
/// positions.
pub fn oracle_table(
    g: &GraphWithBoundary,
    weights: Option<&EdgeWeights>,
    cap: usize,
) -> Result<Vec<BigRational>, OracleError> {
    let n = g.boundary().len();
    let mut table = vec![BigRational::zero(); 1usize << n];
    for m in enumerate_matchings(g, None, cap)? {
        table[boundary_mask(g, &m)] += weight_of(weights, &m);
    }
    Ok(table)
}

fn boundary_mask(g: &GraphWithBoundary, m: &Matching) -> usize {
    m.edges
        .iter()
        .flat_map(|&e| {
            let ed = g.edge(e);
            [ed.0, ed.1]
        })
        .filter_map(|v| g.boundary_position(v))
        .fold(0, |acc, p| acc | (1 << p))
}

/// Boundary vertices at the set bits of `mask`.
pub fn subset_of_mask(g: &GraphWithBoundary, mask: usize) -> Vec<VertexId> {
    g.boundary()
        .iter()
        .enumerate()
        .filter(|(p, _)| mask >> p & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

/// `sum over matchings M with boundary I of (-1)^cross(M) w(M)`, with
/// crossings counted in the drawing `c`.
pub fn signed_sum(
    g: &GraphWithBoundary,
    c: &Configuration,
    subset: &[VertexId],
    weights: Option<&EdgeWeights>,
) -> Result<BigRational, OracleError> {
    let mut total = BigRational::zero();
    for m in enumerate_matchings(g, Some(subset), DEFAULT_VERTEX_CAP)? {
        let w = weight_of(weights, &m);
        if matching_sign(g, c, &m)? > 0 {
            total += w;
        } else {
            total -= w;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_grid;
    use crate::geometry::{frac, rat, Point};
    use crate::graph::Color;

    fn boundary_cycle() -> GraphWithBoundary {
        let mut g = GraphWithBoundary::new();
        for i in 1..=4 {
            g.add_vertex(format!("v{i}"), Color::Plain);
        }
        for i in 0..4 {
            g.add_edge(i, (i + 1) % 4).unwrap();
        }
        g.set_boundary(vec![0, 1, 2, 3]).unwrap();
        g
    }

    #[test]
    fn single_edge() {
        let mut g = GraphWithBoundary::new();
        g.add_vertex("a", Color::Black);
        g.add_vertex("b", Color::White);
        g.add_edge(0, 1).unwrap();
        assert_eq!(enumerate_matchings(&g, None, 24).unwrap().len(), 1);
    }

    #[test]
    fn cycle_full_subset_has_two() {
        let g = boundary_cycle();
        assert_eq!(
            enumerate_matchings(&g, Some(&[0, 1, 2, 3]), 24)
                .unwrap()
                .len(),
            2
        );
        // Unconstrained: empty, four single edges, two perfect matchings.
        assert_eq!(enumerate_matchings(&g, None, 24).unwrap().len(), 7);
    }

    #[test]
    fn grid_two_by_three() {
        let (g, _) = generate_grid(2, 3);
        let ms = enumerate_matchings(&g, None, 24).unwrap();
        assert_eq!(ms.len(), 3);
        let unique: BTreeSet<_> = ms.iter().cloned().collect();
        assert_eq!(unique.len(), 3);
        assert!(ms.iter().all(|m| m.is_perfect(&g) && m.check(&g).is_ok()));
    }

    #[test]
    fn weighted_single_matching() {
        let mut g = boundary_cycle();
        let mut w = vec![rat(1); 4];
        w[0] = frac(3, 2);
        g.set_weights(Some(EdgeWeights(w.clone()))).unwrap();
        let w = EdgeWeights(w);
        assert_eq!(
            oracle_measurement(&g, &[0, 1], Some(&w)).unwrap(),
            frac(3, 2)
        );
        assert_eq!(oracle_measurement(&g, &[0, 2], Some(&w)).unwrap(), rat(0));
        assert_eq!(
            oracle_measurement(&g, &[0, 1], None).unwrap(),
            oracle_measurement(&g, &[0, 1], Some(&EdgeWeights::uniform(4))).unwrap()
        );
    }

    #[test]
    fn table_matches_per_subset_queries() {
        let g = boundary_cycle();
        let t = oracle_table(&g, None, 24).unwrap();
        for mask in 0..16 {
            let s = subset_of_mask(&g, mask);
            assert_eq!(
                t[mask],
                oracle_measurement(&g, &s, None).unwrap(),
                "mask {mask}"
            );
        }
        assert_eq!(t[0b1111], rat(2));
        assert_eq!(t[0b0101], rat(0));
        assert_eq!(t[0], rat(1));
    }

    #[test]
    fn cap_refuses() {
        let (g, _) = generate_grid(5, 5);
        assert_eq!(
            enumerate_matchings(&g, None, 24),
            Err(OracleError::TooLarge {
                vertices: 25,
                cap: 24
            })
        );
    }

    #[test]
    fn bowtie_signed_sum_vanishes() {
        let mut g = GraphWithBoundary::new();
        g.add_vertex("b1", Color::Black);
        g.add_vertex("b2", Color::Black);
        g.add_vertex("w1", Color::White);
        g.add_vertex("w2", Color::White);
        for (u, v) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            g.add_edge(u, v).unwrap();
        }
        let c = Configuration::new(vec![
            Point::from_ints(0, 0),
            Point::from_ints(1, 0),
            Point::from_ints(0, 1),
            Point::from_ints(1, 1),
        ]);
        assert_eq!(signed_sum(&g, &c, &[], None).unwrap(), rat(0));
        assert_eq!(oracle_measurement(&g, &[], None).unwrap(), rat(2));
    }
}
