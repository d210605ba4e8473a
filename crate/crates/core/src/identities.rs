//! Quadratic identities among boundary measurements.
//!
//! Checkers take tables and points rather than graphs, so they can referee
//! any producer of those values, the oracle included.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Mode;
use crate::linalg::{pfaffian_minor, LinalgError};
use crate::measure::{
    mask_positions, GrassmannPoint, MeasureError, MeasurementTable, PfaffianPoint,
    SkewKasteleynMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("identity needs k = 2, table has k = {0:?}")]
    WrongExcess(Option<usize>),
    #[error("identity needs a {0:?}-mode table")]
    WrongMode(Mode),
    #[error("identity needs an even number of internal vertices, got {0}")]
    OddInternal(usize),
    #[error("boundary position {0} repeated or out of range")]
    BadPosition(usize),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Both sides of one instance of an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity: &'static str,
    /// Boundary labels (or column indices) the identity was applied to.
    pub labels: Vec<String>,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
    /// Whether the four positions are in counterclockwise order; the
    /// identities are only claimed when they are.
    pub in_circular_order: bool,
}

/// Whether `p` is a rotation of a strictly increasing sequence.
pub fn is_circular(p: &[usize]) -> bool {
    let descents = (0..p.len())
        .filter(|&i| p[(i + 1) % p.len()] <= p[i])
        .count();
    descents <= 1
}

fn check_quad(quad: [usize; 4], n: usize) -> Result<(), IdentityError> {
    for (i, &p) in quad.iter().enumerate() {
        if p >= n || quad[..i].contains(&p) {
            return Err(IdentityError::BadPosition(p));
        }
    }
    Ok(())
}

fn mask(ps: &[usize]) -> usize {
    ps.iter().fold(0, |m, p| m | (1 << p))
}

fn report(
    identity: &'static str,
    labels: Vec<String>,
    lhs: BigRational,
    rhs: BigRational,
    circular: bool,
) -> IdentityReport {
    IdentityReport {
        identity,
        labels,
        holds: lhs == rhs,
        lhs,
        rhs,
        in_circular_order: circular,
    }
}

/// `D(ac) D(bd) = D(ab) D(cd) + D(ad) D(bc)` for a bipartite table with
/// `k = 2`; `a, b, c, d` are boundary positions.
pub fn check_kuo_bipartite(
    t: &MeasurementTable,
    quad: [usize; 4],
) -> Result<IdentityReport, IdentityError> {
    if t.mode != Mode::Bipartite {
        return Err(IdentityError::WrongMode(Mode::Bipartite));
    }
    if t.excess != Some(2) {
        return Err(IdentityError::WrongExcess(t.excess));
    }
    check_quad(quad, t.boundary_size())?;
    let [a, b, c, d] = quad;
    let v = |x: usize, y: usize| t.get(mask(&[x, y])).clone();
    let lhs = v(a, c) * v(b, d);
    let rhs = v(a, b) * v(c, d) + v(a, d) * v(b, c);
    let labels = quad.iter().map(|&p| t.boundary_labels[p].clone()).collect();
    Ok(report(
        "kuo-bipartite",
        labels,
        lhs,
        rhs,
        is_circular(&quad),
    ))
}

/// `D(ac) D(bd) + D() D(abcd) = D(ab) D(cd) + D(ad) D(bc)` for a general
/// table with an even number of internal vertices.
pub fn check_kuo_general(
    t: &MeasurementTable,
    quad: [usize; 4],
) -> Result<IdentityReport, IdentityError> {
    if t.mode != Mode::General {
        return Err(IdentityError::WrongMode(Mode::General));
    }
    if t.internal % 2 == 1 {
        return Err(IdentityError::OddInternal(t.internal));
    }
    check_quad(quad, t.boundary_size())?;
    let [a, b, c, d] = quad;
    let v = |ps: &[usize]| t.get(mask(ps)).clone();
    let lhs = v(&[a, c]) * v(&[b, d]) + v(&[]) * v(&[a, b, c, d]);
    let rhs = v(&[a, b]) * v(&[c, d]) + v(&[a, d]) * v(&[b, c]);
    let labels = quad.iter().map(|&p| t.boundary_labels[p].clone()).collect();
    Ok(report("kuo-general", labels, lhs, rhs, is_circular(&quad)))
}

/// `D13 D24 = D12 D34 + D14 D23` for the 2 x 2 minors of a point in
/// `G(2, n)`, each minor taken with columns in the listed order.
pub fn check_plucker_three_term(
    p: &GrassmannPoint,
    cols: [usize; 4],
) -> Result<IdentityReport, IdentityError> {
    if p.k != 2 {
        return Err(IdentityError::WrongExcess(Some(p.k)));
    }
    check_quad(cols, p.n)?;
    let delta = |i: usize, j: usize| -> BigRational {
        let (x, y) = (cols[i], cols[j]);
        let v = p.coordinate(&[x, y]).expect("2-subset present").clone();
        if x < y {
            v
        } else {
            -v
        }
    };
    let lhs = delta(0, 2) * delta(1, 3);
    let rhs = delta(0, 1) * delta(2, 3) + delta(0, 3) * delta(1, 2);
    let labels = cols.iter().map(|c| c.to_string()).collect();
    Ok(report("plucker", labels, lhs, rhs, is_circular(&cols)))
}

/// Outcome of checking `Pf(X_I) = Pf(Y_I) Pf(X_empty)` over many `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub checked: usize,
    /// Boundary positions with both sides, for every failing subset.
    pub failures: Vec<(Vec<usize>, BigRational, BigRational)>,
    pub exhaustive: bool,
}

impl ConsistencyReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Number of subsets sampled when the boundary is too large to sweep.
pub const CONSISTENCY_SAMPLES: usize = 4096;
const EXHAUSTIVE_BOUNDARY: usize = 12;

pub fn check_pfaffian_consistency(
    x: &SkewKasteleynMatrix,
    y: &PfaffianPoint,
    seed: u64,
) -> Result<ConsistencyReport, IdentityError> {
    let n = x.boundary_size();
    let exhaustive = n <= EXHAUSTIVE_BOUNDARY;
    let subsets: Vec<Vec<usize>> = if exhaustive {
        (0..1usize << n).map(|m| mask_positions(m, n)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..CONSISTENCY_SAMPLES)
            .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
            .collect()
    };
    let mut failures = Vec::new();
    for s in &subsets {
        let lhs = x.measure(s)?;
        let rhs = if y.base.is_zero() {
            BigRational::zero()
        } else {
            pfaffian_minor(&y.y, 0, s)? * &y.base
        };
        if lhs != rhs {
            failures.push((s.clone(), lhs, rhs));
        }
    }
    Ok(ConsistencyReport {
        checked: subsets.len(),
        failures,
        exhaustive,
    })
}

/// Every circularly ordered quadruple of `0..n`, as increasing positions.
pub fn quadruples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    crate::linalg::k_subsets(n, 4).map(|s| [s[0], s[1], s[2], s[3]])
}
