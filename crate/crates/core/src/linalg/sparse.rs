//! Compressed sparse row matrices with a shared, fixed pattern.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::band::SymBand;

/// Column indices of a square CSR matrix; rows are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrPattern {
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
}

impl CsrPattern {
    /// Builds a pattern from per-row sorted, deduplicated column lists.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            col_idx.extend_from_slice(&r);
            row_ptr.push(col_idx.len());
        }
        Self { row_ptr, col_idx }
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Storage slot of `(i, j)`, if present.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.dim())
            .flat_map(|i| {
                self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(move |&j| i.abs_diff(j))
            })
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pattern: Arc<CsrPattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<CsrPattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        Self { pattern, values }
    }

    pub fn pattern(&self) -> &Arc<CsrPattern> {
        &self.pattern
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn dim(&self) -> usize {
        self.pattern.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.find(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds to an existing entry; entries outside the pattern are an error.
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        match self.pattern.find(i, j) {
            Some(k) => {
                self.values[k] += v;
                Ok(())
            }
            None => Err(Error::invalid(format!("entry ({i}, {j}) not in sparsity pattern"))),
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let p = &self.pattern;
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (p.row_ptr[i], p.row_ptr[i + 1]);
            *yi = p.col_idx[lo..hi]
                .iter()
                .zip(&self.values[lo..hi])
                .map(|(&j, &a)| a * x[j])
                .sum();
        }
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim()];
        self.mul_vec(x, &mut y);
        crate::linalg::band::dot(x, &y)
    }

    /// Linear combination of matrices sharing one pattern.
    pub fn combine(terms: &[(f64, &CsrMatrix)]) -> Result<CsrMatrix> {
        let first = terms
            .first()
            .ok_or_else(|| Error::invalid("empty linear combination"))?
            .1;
        let mut out = CsrMatrix::zeros(first.pattern.clone());
        for (a, m) in terms {
            if !Arc::ptr_eq(&m.pattern, &first.pattern) && m.pattern != first.pattern {
                return Err(Error::invalid("matrices do not share a sparsity pattern"));
            }
            for (o, v) in out.values.iter_mut().zip(&m.values) {
                *o += a * v;
            }
        }
        Ok(out)
    }

    /// Largest asymmetry `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let p = &self.pattern;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                let j = p.col_idx[k];
                worst = worst.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub fn norm_inf(&self) -> f64 {
        let p = &self.pattern;
        (0..self.dim())
            .map(|i| self.values[p.row_ptr[i]..p.row_ptr[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Copies the lower triangle into band storage.
    pub fn to_band(&self) -> SymBand {
        let p = &self.pattern;
        let mut band = SymBand::zeros(self.dim(), p.bandwidth());
        for i in 0..self.dim() {
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                let j = p.col_idx[k];
                if j <= i {
                    band.set(i, j, self.values[k]);
                }
            }
        }
        band
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let rows = (0..n)
            .map(|i| (i.saturating_sub(1)..(i + 2).min(n)).collect())
            .collect();
        let mut m = CsrMatrix::zeros(Arc::new(CsrPattern::from_rows(rows)));
        for i in 0..n {
            m.add(i, i, 2.0).unwrap();
            if i > 0 {
                m.add(i, i - 1, -1.0).unwrap();
                m.add(i - 1, i, -1.0).unwrap();
            }
        }
        m
    }

    #[test]
    fn matvec_and_band() {
        let m = tridiag(5);
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut y = [0.0; 5];
        m.mul_vec(&x, &mut y);
        assert_eq!(y, [0.0, 0.0, 0.0, 0.0, 6.0]);
        let b = m.to_band();
        assert_eq!(b.bandwidth(), 1);
        let mut yb = [0.0; 5];
        b.mul_vec(&x, &mut yb);
        assert_eq!(y, yb);
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(m.norm_inf(), 4.0);
    }

    #[test]
    fn entries_outside_pattern_rejected() {
        let mut m = tridiag(4);
        assert!(m.add(0, 3, 1.0).is_err());
        assert_eq!(m.get(0, 3), 0.0);
    }

    #[test]
    fn combine_shared_pattern() {
        let a = tridiag(4);
        let c = CsrMatrix::combine(&[(2.0, &a), (-1.0, &a)]).unwrap();
        assert_eq!(c, a);
    }
}
