//! Symmetric band matrices stored as rows of the lower band.
//!
//! Row `i` holds columns `i - kd ..= i` contiguously, so the inner loops of
//! the factorizations are plain dot products over two rows.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    kd: usize,
    data: Vec<f64>,
}

impl SymBand {
    /// An `n x n` zero matrix with `kd` sub-diagonals.
    pub fn zeros(n: usize, kd: usize) -> Self {
        let kd = kd.min(n.saturating_sub(1));
        Self {
            n,
            kd,
            data: vec![0.0; n * (kd + 1)],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), 0);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Copies the band of a dense symmetric matrix, ignoring entries outside it.
    pub fn from_dense(a: &DMatrix<f64>, kd: usize) -> Self {
        let n = a.nrows();
        let mut m = Self::zeros(n, kd);
        for i in 0..n {
            for j in i.saturating_sub(m.kd)..=i {
                m.set(i, j, a[(i, j)]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of sub-diagonals.
    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * (self.kd + 1) + (j + self.kd - i)
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * (self.kd + 1)..(i + 1) * (self.kd + 1)]
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) <= self.kd
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.kd {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Sets `(i, j)` and, implicitly, `(j, i)`.
    ///
    /// # Panics
    /// If the entry lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.kd, "entry ({i}, {j}) outside band {}", self.kd);
        let o = self.offset(i, j);
        self.data[o] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.kd, "entry ({i}, {j}) outside band {}", self.kd);
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    /// `self += alpha * other`; `other` must fit inside this band.
    pub fn axpy(&mut self, alpha: f64, other: &SymBand) -> Result<()> {
        if other.n != self.n || other.kd > self.kd {
            return Err(Error::invalid("band shapes do not match"));
        }
        for i in 0..self.n {
            for j in i.saturating_sub(other.kd)..=i {
                let v = other.data[other.offset(i, j)];
                if v != 0.0 {
                    let o = self.offset(i, j);
                    self.data[o] += alpha * v;
                }
            }
        }
        Ok(())
    }

    /// `a * self + b * other` for matrices of equal shape.
    pub fn combine(&self, a: f64, other: &SymBand, b: f64) -> Result<SymBand> {
        let kd = self.kd.max(other.kd);
        let mut out = SymBand::zeros(self.n, kd);
        out.axpy(a, self)?;
        out.axpy(b, other)?;
        Ok(out)
    }

    /// Drops row and column `k`.
    pub fn remove(&self, k: usize) -> SymBand {
        let mut out = SymBand::zeros(self.n - 1, self.kd);
        let map = |i: usize| if i < k { i } else { i - 1 };
        for i in (0..self.n).filter(|&i| i != k) {
            for j in (i.saturating_sub(self.kd)..=i).filter(|&j| j != k) {
                if out.in_band(map(i), map(j)) {
                    out.set(map(i), map(j), self.get(i, j));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kd);
            let row = &self.row(i)[lo + self.kd - i..];
            let mut acc = 0.0;
            for (t, &a) in row[..i - lo].iter().enumerate() {
                acc += a * x[lo + t];
                y[lo + t] += a * x[i];
            }
            y[i] += acc + row[i - lo] * x[i];
        }
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        dot(x, &y)
    }

    /// Bilinear form `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut ay = vec![0.0; self.n];
        self.mul_vec(y, &mut ay);
        dot(x, &ay)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Infinity norm, used as the scale for residual checks.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0f64; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.kd)..=i {
                let a = self.data[self.offset(i, j)].abs();
                sums[i] += a;
                if j != i {
                    sums[j] += a;
                }
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Cholesky factor `A = L Lᵀ`; a non-positive pivot is reported by row.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, kd) = (self.n, self.kd);
        let mut l = self.data.clone();
        let w = kd + 1;
        for i in 0..n {
            let lo = i.saturating_sub(kd);
            for j in lo..=i {
                let jlo = j.saturating_sub(kd).max(lo);
                let ri = i * w + kd - i;
                let rj = j * w + kd - j;
                let acc = l[ri + j] - dot(&l[ri + jlo..ri + j], &l[rj + jlo..rj + j]);
                if j == i {
                    if !(acc > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: acc });
                    }
                    l[ri + i] = acc.sqrt();
                } else {
                    l[ri + j] = acc / l[rj + j];
                }
            }
        }
        Ok(BandCholesky {
            factor: SymBand { n, kd, data: l },
        })
    }

    /// `A = L D Lᵀ` without pivoting. A pivot smaller than `tiny` times the
    /// magnitude of its own diagonal entry is rejected.
    pub fn ldlt(&self, tiny: f64) -> Result<BandLdlt> {
        let (n, kd) = (self.n, self.kd);
        let w = kd + 1;
        let mut l = self.data.clone();
        let mut d = vec![0.0; n];
        // scratch row holding L[i][k] * D[k]
        let mut ld = vec![0.0; w];
        for i in 0..n {
            let lo = i.saturating_sub(kd);
            let ri = i * w + kd - i;
            for j in lo..i {
                let jlo = j.saturating_sub(kd).max(lo);
                let rj = j * w + kd - j;
                let acc = l[ri + j] - dot(&ld[jlo - lo..j - lo], &l[rj + jlo..rj + j]);
                ld[j - lo] = acc;
                l[ri + j] = acc / d[j];
            }
            let di = l[ri + i] - dot(&ld[..i - lo], &l[ri + lo..ri + i]);
            if !(di.abs() > tiny * l[ri + i].abs()) || di == 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: i, value: di });
            }
            d[i] = di;
            l[ri + i] = 1.0;
        }
        Ok(BandLdlt {
            factor: SymBand { n, kd, data: l },
            d,
        })
    }
}

/// Dot product with four independent accumulators so the compiler can
/// vectorize the reduction.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Lower-triangular band Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    factor: SymBand,
}

impl BandCholesky {
    pub fn dim(&self) -> usize {
        self.factor.n
    }

    /// Entry `L[i][j]` for `j <= i`.
    pub fn l(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.factor.get(i, j)
        }
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        let f = &self.factor;
        for i in 0..f.n {
            let lo = i.saturating_sub(f.kd);
            let row = f.row(i);
            let acc = b[i] - dot(&row[lo + f.kd - i..f.kd], &b[lo..i]);
            b[i] = acc / row[f.kd];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward(&self, y: &mut [f64]) {
        let f = &self.factor;
        for i in (0..f.n).rev() {
            let lo = i.saturating_sub(f.kd);
            let row = f.row(i);
            y[i] /= row[f.kd];
            let yi = y[i];
            for k in lo..i {
                y[k] -= row[k + f.kd - i] * yi;
            }
        }
    }

    pub fn solve(&self, b: &mut [f64]) {
        self.forward(b);
        self.backward(b);
    }

    pub fn to_dense_lower(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.l(i, j))
    }
}

/// Unit lower band factor with diagonal `D`.
#[derive(Debug, Clone)]
pub struct BandLdlt {
    factor: SymBand,
    d: Vec<f64>,
}

impl BandLdlt {
    pub fn dim(&self) -> usize {
        self.factor.n
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }

    /// Number of negative pivots, i.e. the number of eigenvalues of the
    /// factored matrix below zero (Sylvester's law of inertia).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve(&self, b: &mut [f64]) {
        let f = &self.factor;
        for i in 0..f.n {
            let lo = i.saturating_sub(f.kd);
            let row = f.row(i);
            b[i] -= dot(&row[lo + f.kd - i..f.kd], &b[lo..i]);
        }
        for (bi, di) in b.iter_mut().zip(&self.d) {
            *bi /= di;
        }
        for i in (0..f.n).rev() {
            let lo = i.saturating_sub(f.kd);
            let row = f.row(i);
            let yi = b[i];
            for k in lo..i {
                b[k] -= row[k + f.kd - i] * yi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(n: usize, kd: usize) -> SymBand {
        let mut a = SymBand::zeros(n, kd);
        for i in 0..n {
            for j in i.saturating_sub(kd)..i {
                a.set(i, j, ((i * 7 + j * 3) % 5) as f64 * 0.1 - 0.2);
            }
            a.set(i, i, 2.0 + kd as f64 + (i % 3) as f64);
        }
        a
    }

    #[test]
    fn matvec_matches_dense() {
        let a = sample(9, 3);
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; 9];
        a.mul_vec(&x, &mut y);
        let yd = a.to_dense() * nalgebra::DVector::from_vec(x);
        for i in 0..9 {
            assert_relative_eq!(y[i], yd[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = sample(12, 2);
        let c = a.cholesky().unwrap();
        let l = c.to_dense_lower();
        let diff = &l * l.transpose() - a.to_dense();
        assert!(diff.amax() < 1e-13);
    }

    #[test]
    fn cholesky_names_failing_pivot() {
        let a = SymBand::from_diagonal(&[1.0, 2.0, -1.0, 4.0]);
        match a.cholesky() {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ldlt_solves_indefinite() {
        let mut a = sample(10, 2);
        for i in 0..10 {
            let v = a.get(i, i) - 4.5;
            a.set(i, i, v);
        }
        let f = a.ldlt(1e-14).unwrap();
        let b: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
        let mut x = b.clone();
        f.solve(&mut x);
        let mut ax = vec![0.0; 10];
        a.mul_vec(&x, &mut ax);
        for i in 0..10 {
            assert_relative_eq!(ax[i], b[i], epsilon = 1e-11);
        }
        let eig = a.to_dense().symmetric_eigenvalues();
        assert_eq!(f.negative_pivots(), eig.iter().filter(|&&e| e < 0.0).count());
    }

    #[test]
    fn cholesky_solve() {
        let a = sample(15, 4);
        let c = a.cholesky().unwrap();
        let b: Vec<f64> = (0..15).map(|i| (i as f64 * 0.3).cos()).collect();
        let mut x = b.clone();
        c.solve(&mut x);
        let mut ax = vec![0.0; 15];
        a.mul_vec(&x, &mut ax);
        for i in 0..15 {
            assert_relative_eq!(ax[i], b[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn remove_row_and_column() {
        let a = sample(6, 2);
        let r = a.remove(5);
        assert_eq!(r.dim(), 5);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(r.get(i, j), a.get(i, j));
            }
        }
        let m = a.remove(2);
        assert_eq!(m.get(2, 1), a.get(3, 1));
        assert_eq!(m.get(3, 2), a.get(4, 3));
    }

    #[test]
    fn norm_inf_matches_dense() {
        let a = sample(8, 3);
        let d = a.to_dense();
        let expected = (0..8)
            .map(|i| (0..8).map(|j| d[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        assert_relative_eq!(a.norm_inf(), expected, epsilon = 1e-14);
    }
}
