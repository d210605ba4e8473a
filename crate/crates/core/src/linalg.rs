//! Exact rational matrices: determinants, minors, Pfaffians and the two block
//! reductions used to pass from Kasteleyn matrices to boundary data.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index {0} selected twice")]
    DuplicateIndex(usize),
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("leading columns are linearly dependent")]
    SingularLeftBlock,
    #[error("leading principal block is singular")]
    SingularLeadingBlock,
    #[error("leading block has odd size {0}")]
    OddLeadingBlock(usize),
    #[error("reduced matrix disagrees with the original on columns {0:?}")]
    ReductionMismatch(Vec<usize>),
}

/// Dense rational matrix with row and column labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
            row_labels: index_labels(rows),
            col_labels: index_labels(cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        let mut m = Self::zeros(r, c);
        m.data = rows.into_iter().flatten().collect();
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&x| BigRational::from_integer(BigInt::from(x)))
                        .collect()
                })
                .collect(),
        )
        .expect("rows of equal length")
    }

    pub fn with_labels(
        mut self,
        rows: Vec<String>,
        cols: Vec<String>,
    ) -> Result<Self, LinalgError> {
        if rows.len() != self.rows || cols.len() != self.cols {
            return Err(LinalgError::Shape(
                "label count does not match dimensions".into(),
            ));
        }
        self.row_labels = rows;
        self.col_labels = cols;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out.row_labels = self.row_labels.clone();
        out.col_labels = other.col_labels.clone();
        Ok(out)
    }

    /// Submatrix with rows and columns in the listed order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<RatMatrix, LinalgError> {
        check_indices(rows, self.rows)?;
        check_indices(cols, self.cols)?;
        let mut out = RatMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out.row_labels = rows.iter().map(|&i| self.row_labels[i].clone()).collect();
        out.col_labels = cols.iter().map(|&j| self.col_labels[j].clone()).collect();
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let pivot = m[(rank, col)].clone();
            for r in rank + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] / &pivot;
                for j in col..m.cols {
                    let delta = &factor * &m[(rank, j)];
                    m[(r, j)] -= delta;
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn check_indices(idx: &[usize], dim: usize) -> Result<(), LinalgError> {
    let mut seen = BTreeSet::new();
    for &i in idx {
        if i >= dim {
            return Err(LinalgError::IndexOutOfRange { index: i, dim });
        }
        if !seen.insert(i) {
            return Err(LinalgError::DuplicateIndex(i));
        }
    }
    Ok(())
}

/// Exact determinant by fraction-free (Bareiss) elimination. Intermediate
/// entries stay integral when the input is integral.
pub fn det(m: &RatMatrix) -> Result<BigRational, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigRational::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = BigRational::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                return Ok(BigRational::zero());
            };
            a.swap_rows(k, p);
            negate = !negate;
        }
        let pivot = a[(k, k)].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &pivot - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
            a[(i, k)] = BigRational::zero();
        }
        prev = pivot;
    }
    let d = a[(n - 1, n - 1)].clone();
    Ok(if negate { -d } else { d })
}

/// Determinant of the submatrix on `rows` x `cols`, taken in the listed order.
pub fn minor(m: &RatMatrix, rows: &[usize], cols: &[usize]) -> Result<BigRational, LinalgError> {
    if rows.len() != cols.len() {
        return Err(LinalgError::Shape(format!(
            "{} rows but {} columns selected",
            rows.len(),
            cols.len()
        )));
    }
    det(&m.select(rows, cols)?)
}

/// Given `K` with `N + k` rows and `N + n` columns whose first `N` columns are
/// independent, returns the `k x n` matrix `L` with
/// `minor(K, all rows, 0..N ++ I) == minor(L, all rows, I)` for every
/// `k`-subset `I` of the trailing columns.
///
/// Only row additions and swaps are used on `K`; the determinant of the
/// resulting upper-left block (with the swap sign) is folded into the first
/// row of `L`. When `k == 0` the result is `0 x n` and the identity holds only
/// up to the scalar `det K`.
pub fn reduce_left_block(k: &RatMatrix, leading: usize) -> Result<RatMatrix, LinalgError> {
    if k.cols < leading || k.rows < leading {
        return Err(LinalgError::Shape(format!(
            "{}x{} matrix cannot have a {leading}-column leading block",
            k.rows, k.cols
        )));
    }
    let excess = k.rows - leading;
    let trailing = k.cols - leading;
    let mut a = k.clone();
    let mut scale = BigRational::one();
    for c in 0..leading {
        let Some(p) = (c..a.rows).find(|&r| !a[(r, c)].is_zero()) else {
            return Err(LinalgError::SingularLeftBlock);
        };
        if p != c {
            a.swap_rows(c, p);
            scale = -scale;
        }
        let pivot = a[(c, c)].clone();
        scale *= &pivot;
        for r in c + 1..a.rows {
            if a[(r, c)].is_zero() {
                continue;
            }
            let factor = &a[(r, c)] / &pivot;
            for j in c..a.cols {
                let delta = &factor * &a[(c, j)];
                a[(r, j)] -= delta;
            }
        }
    }
    let rows: Vec<usize> = (leading..a.rows).collect();
    let cols: Vec<usize> = (leading..a.cols).collect();
    let mut l = a.select(&rows, &cols)?;
    if excess > 0 {
        for j in 0..trailing {
            l[(0, j)] *= &scale;
        }
    }
    verify_reduction(k, &l, leading)?;
    Ok(l)
}

/// Spot-checks the minor identity on up to 16 column subsets.
fn verify_reduction(k: &RatMatrix, l: &RatMatrix, leading: usize) -> Result<(), LinalgError> {
    let excess = l.rows;
    if excess == 0 {
        return Ok(());
    }
    let all_rows: Vec<usize> = (0..k.rows).collect();
    let l_rows: Vec<usize> = (0..excess).collect();
    for subset in k_subsets(l.cols, excess).take(16) {
        let mut cols: Vec<usize> = (0..leading).collect();
        cols.extend(subset.iter().map(|&j| leading + j));
        if minor(k, &all_rows, &cols)? != minor(l, &l_rows, &subset)? {
            return Err(LinalgError::ReductionMismatch(subset));
        }
    }
    Ok(())
}

/// All `k`-subsets of `0..n` as ascending index lists, in colex order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        // Advance: find the lowest position that can be incremented without
        // colliding with the next entry.
        let mut next = out.clone();
        let mut advanced = false;
        for i in 0..k {
            let limit = if i + 1 < k { next[i + 1] } else { n };
            if next[i] + 1 < limit {
                next[i] += 1;
                for (j, slot) in next.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                advanced = true;
                break;
            }
        }
        current = advanced.then_some(next);
        Some(out)
    })
}

/// A square matrix with `X^T = -X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewMatrix(RatMatrix);

impl SkewMatrix {
    pub fn new(m: RatMatrix) -> Result<Self, LinalgError> {
        if m.rows != m.cols {
            return Err(LinalgError::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        for i in 0..m.rows {
            for j in i..m.cols {
                if m[(i, j)] != -m[(j, i)].clone() {
                    return Err(LinalgError::NotSkew(i, j));
                }
            }
        }
        Ok(SkewMatrix(m))
    }

    /// Builds a skew matrix from its strict upper triangle.
    pub fn from_upper(
        n: usize,
        entries: impl IntoIterator<Item = ((usize, usize), BigRational)>,
    ) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for ((i, j), v) in entries {
            assert!(i < j && j < n, "entry ({i}, {j}) is not strictly upper");
            m[(j, i)] = -v.clone();
            m[(i, j)] = v;
        }
        SkewMatrix(m)
    }

    /// The canonical form `J_N`: diagonal blocks `[[0, 1], [-1, 0]]`.
    pub fn canonical(n: usize) -> Self {
        assert!(n.is_multiple_of(2), "canonical skew form needs even size");
        Self::from_upper(
            n,
            (0..n / 2).map(|p| ((2 * p, 2 * p + 1), BigRational::one())),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RatMatrix {
        self.0
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self, LinalgError> {
        Ok(SkewMatrix(self.0.with_labels(labels.clone(), labels)?))
    }

    /// Principal submatrix on `idx`, in the listed order.
    pub fn principal(&self, idx: &[usize]) -> Result<SkewMatrix, LinalgError> {
        Ok(SkewMatrix(self.0.select(idx, idx)?))
    }

    /// `A X A^T`.
    pub fn congruence(&self, a: &RatMatrix) -> Result<SkewMatrix, LinalgError> {
        let m = a.mul(&self.0)?.mul(&a.transpose())?;
        SkewMatrix::new(m)
    }
}

impl std::ops::Index<(usize, usize)> for SkewMatrix {
    type Output = BigRational;
    fn index(&self, idx: (usize, usize)) -> &BigRational {
        &self.0[idx]
    }
}

/// Exact Pfaffian by skew elimination with symmetric pivoting. Odd dimension
/// gives zero, the empty matrix gives one.
pub fn pfaffian(x: &SkewMatrix) -> BigRational {
    let n = x.dim();
    if n % 2 == 1 {
        return BigRational::zero();
    }
    let mut a = x.0.clone();
    let mut result = BigRational::one();
    let mut k = 0;
    while k < n {
        // Bring a nonzero entry of row k to column k + 1.
        let Some(p) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) else {
            return BigRational::zero();
        };
        if p != k + 1 {
            swap_symmetric(&mut a, k + 1, p);
            result = -result;
        }
        let pivot = a[(k, k + 1)].clone();
        result *= &pivot;
        // Schur complement on the trailing block.
        for i in k + 2..n {
            for j in i + 1..n {
                let v = &a[(i, j)]
                    - (&a[(k, i)] * &a[(k + 1, j)] - &a[(k, j)] * &a[(k + 1, i)]) / &pivot;
                a[(j, i)] = -v.clone();
                a[(i, j)] = v;
            }
        }
        k += 2;
    }
    result
}

fn swap_symmetric(a: &mut RatMatrix, i: usize, j: usize) {
    a.swap_rows(i, j);
    for r in 0..a.rows {
        a.data.swap(r * a.cols + i, r * a.cols + j);
    }
}

/// Pfaffian of the principal submatrix on `0..leading` together with `keep`,
/// rows and columns in ascending order.
pub fn pfaffian_minor(
    x: &SkewMatrix,
    leading: usize,
    keep: &[usize],
) -> Result<BigRational, LinalgError> {
    let mut idx: Vec<usize> = (0..leading).collect();
    for &j in keep {
        if j < leading {
            return Err(LinalgError::DuplicateIndex(j));
        }
        idx.push(j);
    }
    idx[leading..].sort_unstable();
    check_indices(&idx, x.dim())?;
    Ok(pfaffian(&x.principal(&idx)?))
}

/// Result of the skew congruence reduction: `transform * X * transform^T`
/// equals `J_N` direct sum `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewReduction {
    pub y: SkewMatrix,
    pub transform: RatMatrix,
}

/// Brings the leading `N x N` block of `x` to `J_N` by congruence and clears
/// the off-diagonal blocks, returning the trailing `n x n` block `Y`. Then
/// `Pf(X_I) = Pf(X_lead) * Pf(Y_I)` for every subset `I` of the trailing
/// indices.
pub fn skew_congruence_reduce(x: &SkewMatrix, leading: usize) -> Result<SkewMatrix, LinalgError> {
    Ok(skew_congruence_reduce_with_transform(x, leading)?.y)
}

pub fn skew_congruence_reduce_with_transform(
    x: &SkewMatrix,
    leading: usize,
) -> Result<SkewReduction, LinalgError> {
    let dim = x.dim();
    if leading > dim {
        return Err(LinalgError::Shape(format!(
            "leading block {leading} exceeds dimension {dim}"
        )));
    }
    if leading % 2 == 1 {
        return Err(LinalgError::OddLeadingBlock(leading));
    }
    let mut a = x.0.clone();
    let mut s = RatMatrix::identity(dim);

    for pair in 0..leading / 2 {
        let e = 2 * pair;
        let f = e + 1;
        // Pivot search inside the still-unreduced leading block.
        let pivot = (e..leading)
            .flat_map(|i| (i + 1..leading).map(move |j| (i, j)))
            .find(|&(i, j)| !a[(i, j)].is_zero());
        let Some((i, j)) = pivot else {
            return Err(LinalgError::SingularLeadingBlock);
        };
        congruence_swap(&mut a, &mut s, e, i);
        congruence_swap(&mut a, &mut s, f, j);

        let inv = BigRational::one() / &a[(e, f)];
        congruence_scale(&mut a, &mut s, f, &inv);

        for r in 0..dim {
            if r == e || r == f {
                continue;
            }
            // row_r += alpha row_e + beta row_f zeroes entries (r, e), (r, f).
            let beta = a[(r, e)].clone();
            let alpha = -a[(r, f)].clone();
            if alpha.is_zero() && beta.is_zero() {
                continue;
            }
            congruence_add(&mut a, &mut s, r, e, &alpha);
            congruence_add(&mut a, &mut s, r, f, &beta);
        }
    }

    let tail: Vec<usize> = (leading..dim).collect();
    let y = SkewMatrix::new(a.select(&tail, &tail)?)?;
    let labels = tail.iter().map(|&i| x.0.col_labels[i].clone()).collect();
    Ok(SkewReduction {
        y: y.with_labels(labels)?,
        transform: s,
    })
}

fn congruence_swap(a: &mut RatMatrix, s: &mut RatMatrix, i: usize, j: usize) {
    if i != j {
        swap_symmetric(a, i, j);
        s.swap_rows(i, j);
    }
}

fn congruence_scale(a: &mut RatMatrix, s: &mut RatMatrix, i: usize, c: &BigRational) {
    for j in 0..a.cols {
        a[(i, j)] *= c;
    }
    for r in 0..a.rows {
        a[(r, i)] *= c;
    }
    for j in 0..s.cols {
        s[(i, j)] *= c;
    }
}

/// `row_r += c * row_src` and the matching column operation.
fn congruence_add(a: &mut RatMatrix, s: &mut RatMatrix, r: usize, src: usize, c: &BigRational) {
    if c.is_zero() {
        return;
    }
    for j in 0..a.cols {
        let delta = c * &a[(src, j)];
        a[(r, j)] += delta;
    }
    for i in 0..a.rows {
        let delta = c * &a[(i, src)];
        a[(i, r)] += delta;
    }
    for j in 0..s.cols {
        let delta = c * &s[(src, j)];
        s[(r, j)] += delta;
    }
}
