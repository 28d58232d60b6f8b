//! Set matching in the style of a modified Hausdorff distance, restated for
//! similarities: each element is paired with its best match on the other
//! side, the per-element maxima are averaged per direction, and the weaker
//! direction wins.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("set similarity is undefined for empty sets")]
pub struct EmptySetError;

/// Directed average-of-best-matches from `from` into `to`:
/// `(1/|from|) * sum over x of max over y of sim(x, y)`.
///
/// The outer sum walks `from` in slice order so repeated runs accumulate in
/// the same order and reproduce bitwise.
pub fn directed_similarity<T, F, S>(from: &[T], to: &[T], sim: &mut S) -> Result<F, EmptySetError>
where
    F: Scalar,
    S: FnMut(&T, &T) -> F,
{
    if from.is_empty() || to.is_empty() {
        return Err(EmptySetError);
    }
    let mut total = F::zero();
    for x in from {
        let mut best = F::zero();
        for y in to {
            best = best.max(sim(x, y));
        }
        total = total + best;
    }
    Ok(total / F::from_usize(from.len()).expect("set size"))
}

/// Symmetric set similarity: the minimum of the two directed averages.
///
/// Taking the weaker direction means a set cannot score well by matching
/// only a subset of the other side. When `sim` is symmetric in its
/// arguments, the result is bitwise identical under argument swap.
pub fn set_similarity<T, F, S>(a: &[T], b: &[T], sim: &mut S) -> Result<F, EmptySetError>
where
    F: Scalar,
    S: FnMut(&T, &T) -> F,
{
    let ab = directed_similarity(a, b, sim)?;
    let ba = directed_similarity(b, a, &mut |y, x| sim(x, y))?;
    Ok(ab.min(ba))
}

/// Precomputed pairwise scores between two element lists.
///
/// Useful when the per-pair scorer is expensive and the caller wants the
/// matrix as well as the aggregate (for reporting or ranking).
#[derive(Debug, Clone, PartialEq)]
pub struct SimMatrix<F> {
    rows: usize,
    cols: usize,
    values: Vec<F>,
}

impl<F: Scalar> SimMatrix<F> {
    /// Scores every `(row, col)` pair once, in row-major order.
    pub fn build<T, S>(rows: &[T], cols: &[T], sim: &mut S) -> Self
    where
        S: FnMut(&T, &T) -> F,
    {
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for r in rows {
            for c in cols {
                values.push(sim(r, c));
            }
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        self.values[row * self.cols + col]
    }

    /// Set similarity over the precomputed scores.
    pub fn hausdorff_similarity(&self) -> Result<F, EmptySetError> {
        let row_ids: Vec<usize> = (0..self.rows).collect();
        let col_ids: Vec<usize> = (0..self.cols).collect();
        let ab = directed_similarity(&row_ids, &col_ids, &mut |&i, &j| self.get(i, j))?;
        let ba = directed_similarity(&col_ids, &row_ids, &mut |&j, &i| self.get(i, j))?;
        Ok(ab.min(ba))
    }
}
