//! Signed Kasteleyn matrices and the quantities read off their minors.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{validate, Color, EdgeWeights, GraphWithBoundary, Mode, Violation};
use crate::immersion::{is_disc_embedding, is_embedding, Configuration, Setting};
use crate::linalg::{
    det, k_subsets, minor, pfaffian, pfaffian_minor, reduce_left_block, skew_congruence_reduce,
    LinalgError, RatMatrix, SkewMatrix,
};
use crate::transport::{compute_signed_structure, SignAssignment, TransportError};

/// Largest boundary for which whole tables are built.
pub const MAX_TABLE_BOUNDARY: usize = 16;
/// Largest boundary for which the Pfaffian point is checked on every subset.
pub const FULL_CHECK_BOUNDARY: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("graph is not valid in {mode:?} mode: {}", list(.violations))]
    Invalid {
        mode: Mode,
        violations: Vec<Violation>,
    },
    #[error("target drawing is not an embedding")]
    NotEmbedded,
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("boundary of size {0} is too large for a full table")]
    TableTooLarge(usize),
    #[error("D(G, empty) = 0 while some D(G, I) is nonzero")]
    BaseCaseZero,
    #[error("boundary subset position {0} out of range")]
    BadSubset(usize),
    #[error("Pfaffian point fails on subset {0:?}")]
    PointMismatch(Vec<usize>),
}

fn list(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn require_valid(g: &GraphWithBoundary, mode: Mode) -> Result<(), MeasureError> {
    let report = validate(g, mode);
    if report.is_valid() {
        Ok(())
    } else {
        Err(MeasureError::Invalid {
            mode,
            violations: report.violations,
        })
    }
}

fn require_embedded(g: &GraphWithBoundary, target: &Configuration) -> Result<(), MeasureError> {
    let ok = if g.boundary().is_empty() {
        is_embedding(g, target)
    } else {
        is_disc_embedding(g, target)
    };
    ok.then_some(()).ok_or(MeasureError::NotEmbedded)
}

fn entry(signs: &SignAssignment, weights: Option<&EdgeWeights>, e: usize) -> BigRational {
    let s = BigRational::from_integer(signs.sign(e).into());
    match weights {
        Some(w) => s * w.get(e),
        None => s,
    }
}

fn check_positions(subset: &[usize], n: usize) -> Result<Vec<usize>, MeasureError> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    if let Some(&p) = s.iter().find(|&&p| p >= n) {
        return Err(MeasureError::BadSubset(p));
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(MeasureError::BadSubset(s[0]));
    }
    Ok(s)
}

/// Rows: blacks in declaration order. Columns: internal whites in
/// declaration order, then the boundary counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KasteleynMatrix {
    pub matrix: RatMatrix,
    /// N, the number of internal whites.
    pub internal: usize,
    /// k = #blacks - N.
    pub excess: usize,
    pub boundary_labels: Vec<String>,
    pub signs: SignAssignment,
    pub weighted: bool,
}

impl KasteleynMatrix {
    /// Matrix with the given edge signs; no geometric check.
    pub fn from_signs(
        g: &GraphWithBoundary,
        signs: SignAssignment,
        weights: Option<&EdgeWeights>,
    ) -> Result<Self, MeasureError> {
        require_valid(g, Mode::Bipartite)?;
        let rows = g.blacks();
        let cols = g.white_order();
        let internal = cols.len() - g.boundary().len();
        let mut m = RatMatrix::zeros(rows.len(), cols.len());
        for (e, edge) in g.edges().iter().enumerate() {
            let (b, w) = if g.color(edge.0) == Color::Black {
                (edge.0, edge.1)
            } else {
                (edge.1, edge.0)
            };
            let i = rows.iter().position(|&v| v == b).expect("black row");
            let j = cols.iter().position(|&v| v == w).expect("white column");
            m[(i, j)] = entry(&signs, weights, e);
        }
        let label = |v: &usize| g.label(*v).to_string();
        let matrix = m.with_labels(
            rows.iter().map(label).collect(),
            cols.iter().map(label).collect(),
        )?;
        Ok(KasteleynMatrix {
            matrix,
            internal,
            excess: rows.len() - internal,
            boundary_labels: g.boundary().iter().map(label).collect(),
            signs,
            weighted: weights.is_some(),
        })
    }

    pub fn boundary_size(&self) -> usize {
        self.boundary_labels.len()
    }

    /// `det K_I` for boundary positions `I`; zero unless `|I| = k`.
    pub fn measure(&self, subset: &[usize]) -> Result<BigRational, MeasureError> {
        let s = check_positions(subset, self.boundary_size())?;
        if s.len() != self.excess {
            return Ok(BigRational::zero());
        }
        let rows: Vec<usize> = (0..self.matrix.rows()).collect();
        let mut cols: Vec<usize> = (0..self.internal).collect();
        cols.extend(s.iter().map(|p| self.internal + p));
        Ok(minor(&self.matrix, &rows, &cols)?)
    }
}

/// Signed bipartite matrix for `g` drawn at `target`, which must be an
/// embedding (a disc embedding when the boundary is nonempty).
pub fn kasteleyn_matrix(
    g: &GraphWithBoundary,
    target: &Configuration,
    weights: Option<&EdgeWeights>,
    seed: u64,
    max_retries: usize,
) -> Result<KasteleynMatrix, MeasureError> {
    require_valid(g, Mode::Bipartite)?;
    require_embedded(g, target)?;
    let setting = Setting::for_graph(g, Mode::Bipartite);
    let signs = compute_signed_structure(g, setting, target, seed, max_retries)?;
    KasteleynMatrix::from_signs(g, signs, weights)
}

/// Rows and columns: internal vertices in declaration order, then the
/// boundary counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewKasteleynMatrix {
    pub matrix: SkewMatrix,
    /// N, the number of internal vertices.
    pub internal: usize,
    pub boundary_labels: Vec<String>,
    pub signs: SignAssignment,
    pub weighted: bool,
}

impl SkewKasteleynMatrix {
    pub fn from_signs(
        g: &GraphWithBoundary,
        signs: SignAssignment,
        weights: Option<&EdgeWeights>,
    ) -> Result<Self, MeasureError> {
        require_valid(g, Mode::General)?;
        let order = g.general_order();
        let pos = |v: usize| order.iter().position(|&u| u == v).expect("vertex in order");
        let entries = g.edges().iter().enumerate().map(|(e, edge)| {
            let (i, j) = (pos(edge.0), pos(edge.1));
            ((i.min(j), i.max(j)), entry(&signs, weights, e))
        });
        let x = SkewMatrix::from_upper(order.len(), entries);
        let label = |v: &usize| g.label(*v).to_string();
        Ok(SkewKasteleynMatrix {
            matrix: x.with_labels(order.iter().map(label).collect())?,
            internal: order.len() - g.boundary().len(),
            boundary_labels: g.boundary().iter().map(label).collect(),
            signs,
            weighted: weights.is_some(),
        })
    }

    pub fn boundary_size(&self) -> usize {
        self.boundary_labels.len()
    }

    /// `Pf X_I` for boundary positions `I`; zero when `N + |I|` is odd.
    pub fn measure(&self, subset: &[usize]) -> Result<BigRational, MeasureError> {
        let s = check_positions(subset, self.boundary_size())?;
        if (self.internal + s.len()) % 2 == 1 {
            return Ok(BigRational::zero());
        }
        let keep: Vec<usize> = s.iter().map(|p| self.internal + p).collect();
        Ok(pfaffian_minor(&self.matrix, self.internal, &keep)?)
    }
}

/// Signed skew matrix for `g` drawn at `target`; same hypotheses as
/// [`kasteleyn_matrix`].
pub fn skew_kasteleyn_matrix(
    g: &GraphWithBoundary,
    target: &Configuration,
    weights: Option<&EdgeWeights>,
    seed: u64,
    max_retries: usize,
) -> Result<SkewKasteleynMatrix, MeasureError> {
    require_valid(g, Mode::General)?;
    require_embedded(g, target)?;
    let setting = Setting::for_graph(g, Mode::General);
    let signs = compute_signed_structure(g, setting, target, seed, max_retries)?;
    SkewKasteleynMatrix::from_signs(g, signs, weights)
}

/// `D(G, I)` for every boundary subset, indexed by the bitmask of boundary
/// positions (bit `p` set when the `p`-th boundary vertex is in `I`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementTable {
    pub mode: Mode,
    pub internal: usize,
    /// k in bipartite mode.
    pub excess: Option<usize>,
    pub boundary_labels: Vec<String>,
    pub weighted: bool,
    pub values: Vec<BigRational>,
}

impl MeasurementTable {
    pub fn boundary_size(&self) -> usize {
        self.boundary_labels.len()
    }

    /// Whether the counting constraint allows a nonzero value at `mask`.
    pub fn admissible(&self, mask: usize) -> bool {
        let size = mask.count_ones() as usize;
        match self.excess {
            Some(k) => size == k,
            None => (self.internal + size).is_multiple_of(2),
        }
    }

    pub fn get(&self, mask: usize) -> &BigRational {
        &self.values[mask]
    }

    /// Value at a list of boundary positions.
    pub fn value(&self, subset: &[usize]) -> &BigRational {
        &self.values[subset.iter().fold(0, |m, p| m | (1 << p))]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    fn build(
        mode: Mode,
        internal: usize,
        excess: Option<usize>,
        boundary_labels: Vec<String>,
        weighted: bool,
        eval: impl Fn(&[usize]) -> Result<BigRational, MeasureError>,
    ) -> Result<Self, MeasureError> {
        let n = boundary_labels.len();
        if n > MAX_TABLE_BOUNDARY {
            return Err(MeasureError::TableTooLarge(n));
        }
        let mut t = MeasurementTable {
            mode,
            internal,
            excess,
            boundary_labels,
            weighted,
            values: Vec::with_capacity(1 << n),
        };
        for mask in 0..1usize << n {
            let v = if t.admissible(mask) {
                eval(&mask_positions(mask, n))?
            } else {
                BigRational::zero()
            };
            t.values.push(v);
        }
        Ok(t)
    }

    pub fn from_kasteleyn(k: &KasteleynMatrix) -> Result<Self, MeasureError> {
        Self::build(
            Mode::Bipartite,
            k.internal,
            Some(k.excess),
            k.boundary_labels.clone(),
            k.weighted,
            |s| k.measure(s),
        )
    }

    pub fn from_skew(x: &SkewKasteleynMatrix) -> Result<Self, MeasureError> {
        Self::build(
            Mode::General,
            x.internal,
            None,
            x.boundary_labels.clone(),
            x.weighted,
            |s| x.measure(s),
        )
    }
}

/// Positions of the set bits of `mask` below `n`, ascending.
pub fn mask_positions(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|p| mask >> p & 1 == 1).collect()
}

/// A `k x n` matrix whose maximal minors are the boundary measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannPoint {
    pub k: usize,
    pub n: usize,
    pub l: RatMatrix,
    /// Minors of `l` over all `k`-subsets of columns, in colex order.
    pub plucker: Vec<BigRational>,
}

impl GrassmannPoint {
    /// Reduces `K` to `L` by row operations; `L = 0` when the internal block
    /// has no full-rank choice of rows. With `k = 0` the single coordinate is
    /// `det K`.
    pub fn from_matrix(km: &KasteleynMatrix) -> Result<Self, MeasureError> {
        let (k, n) = (km.excess, km.boundary_size());
        let l = match reduce_left_block(&km.matrix, km.internal) {
            Ok(l) => l,
            Err(LinalgError::SingularLeftBlock) => RatMatrix::zeros(k, n),
            Err(e) => return Err(e.into()),
        };
        let plucker = if k == 0 {
            vec![det(&km.matrix)?]
        } else {
            let rows: Vec<usize> = (0..k).collect();
            k_subsets(n, k)
                .map(|cols| minor(&l, &rows, &cols))
                .collect::<Result<_, _>>()?
        };
        Ok(GrassmannPoint { k, n, l, plucker })
    }

    /// Column subsets in the order of [`GrassmannPoint::plucker`].
    pub fn subsets(&self) -> Vec<Vec<usize>> {
        k_subsets(self.n, self.k).collect()
    }

    pub fn coordinate(&self, cols: &[usize]) -> Option<&BigRational> {
        let mut s = cols.to_vec();
        s.sort_unstable();
        self.subsets()
            .iter()
            .position(|c| *c == s)
            .map(|i| &self.plucker[i])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.plucker.iter().all(|v| !v.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.plucker.iter().all(Zero::is_zero)
    }

    /// All-zero coordinates, or `L` of full rank `k`.
    pub fn is_consistent(&self) -> bool {
        self.is_zero() || self.l.rank() == self.k
    }
}

/// `Y` with `D(G, I) = Pf(Y_I) D(G, empty)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfaffianPoint {
    pub y: SkewMatrix,
    pub base: BigRational,
    /// Set when every measurement vanishes and `Y` is taken to be zero.
    pub degenerate: bool,
}

impl PfaffianPoint {
    pub fn from_matrix(x: &SkewKasteleynMatrix) -> Result<Self, MeasureError> {
        let n = x.boundary_size();
        let lead: Vec<usize> = (0..x.internal).collect();
        let base = pfaffian(&x.matrix.principal(&lead)?);
        if base.is_zero() {
            let all_zero = (0..1usize << n.min(MAX_TABLE_BOUNDARY))
                .map(|m| x.measure(&mask_positions(m, n)))
                .try_fold(true, |acc, v| v.map(|v| acc && v.is_zero()))?;
            if !all_zero {
                return Err(MeasureError::BaseCaseZero);
            }
            let labels = x.boundary_labels.clone();
            return Ok(PfaffianPoint {
                y: SkewMatrix::from_upper(n, []).with_labels(labels)?,
                base,
                degenerate: true,
            });
        }
        let y = skew_congruence_reduce(&x.matrix, x.internal)?;
        let point = PfaffianPoint {
            y,
            base,
            degenerate: false,
        };
        if n <= FULL_CHECK_BOUNDARY {
            for mask in 0..1usize << n {
                let s = mask_positions(mask, n);
                if point.predict(&s)? != x.measure(&s)? {
                    return Err(MeasureError::PointMismatch(s));
                }
            }
        }
        Ok(point)
    }

    /// `Pf(Y_I) * D(G, empty)`.
    pub fn predict(&self, subset: &[usize]) -> Result<BigRational, MeasureError> {
        let s = check_positions(subset, self.y.dim())?;
        Ok(pfaffian_minor(&self.y, 0, &s)? * &self.base)
    }
}
