//! Band and sparse storage used by the assemblers and eigensolvers.

pub mod band;
pub mod sparse;

pub use band::{BandCholesky, BandLdlt, SymBand};
pub use sparse::{CsrMatrix, CsrPattern};

/// A symmetric matrix that can be applied to vectors and copied into band form.
pub trait SymOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn band(&self) -> SymBand;
    fn norm_inf(&self) -> f64;
}

impl SymOperator for SymBand {
    fn dim(&self) -> usize {
        SymBand::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }
    fn band(&self) -> SymBand {
        self.clone()
    }
    fn norm_inf(&self) -> f64 {
        SymBand::norm_inf(self)
    }
}

impl SymOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }
    fn band(&self) -> SymBand {
        self.to_band()
    }
    fn norm_inf(&self) -> f64 {
        CsrMatrix::norm_inf(self)
    }
}
