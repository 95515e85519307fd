//! Element shape functions on the reference interval `x ∈ [0, 1]`.
//!
//! Local ordering: C0 uses `[left, right]`; C1 uses
//! `[left value, left slope, right value, right slope]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuity {
    /// Piecewise-linear, continuous values.
    C0,
    /// Cubic Hermite, continuous values and first derivatives.
    C1,
}

impl std::fmt::Display for Continuity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Continuity::C0 => write!(f, "c0"),
            Continuity::C1 => write!(f, "c1"),
        }
    }
}

impl std::str::FromStr for Continuity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c0" => Ok(Continuity::C0),
            "c1" => Ok(Continuity::C1),
            other => Err(Error::invalid(format!("unknown basis continuity `{other}`"))),
        }
    }
}

/// Local shape values and physical derivatives at one reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeValues {
    pub values: [f64; 4],
    pub derivatives: [f64; 4],
    pub len: usize,
}

impl ShapeValues {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives[..self.len]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeSet {
    pub continuity: Continuity,
}

impl ShapeSet {
    pub const C0: ShapeSet = ShapeSet {
        continuity: Continuity::C0,
    };
    pub const C1: ShapeSet = ShapeSet {
        continuity: Continuity::C1,
    };

    pub fn new(continuity: Continuity) -> Self {
        Self { continuity }
    }

    pub fn dofs_per_node(&self) -> usize {
        match self.continuity {
            Continuity::C0 => 1,
            Continuity::C1 => 2,
        }
    }

    /// Number of local functions on one element.
    pub fn n_local(&self) -> usize {
        2 * self.dofs_per_node()
    }

    /// Evaluates every local function and its `d/dr` at reference point `x`
    /// of an element of width `h`.
    pub fn eval(&self, x: f64, h: f64) -> Result<ShapeValues> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("reference coordinate {x} outside [0, 1]")));
        }
        if !(h > 0.0) {
            return Err(Error::invalid(format!("element width {h} must be positive")));
        }
        Ok(self.eval_unchecked(x, h))
    }

    pub(crate) fn eval_unchecked(&self, x: f64, h: f64) -> ShapeValues {
        match self.continuity {
            Continuity::C0 => ShapeValues {
                values: [1.0 - x, x, 0.0, 0.0],
                derivatives: [-1.0 / h, 1.0 / h, 0.0, 0.0],
                len: 2,
            },
            Continuity::C1 => {
                let x2 = x * x;
                let x3 = x2 * x;
                ShapeValues {
                    values: [
                        1.0 - 3.0 * x2 + 2.0 * x3,
                        h * (x - 2.0 * x2 + x3),
                        3.0 * x2 - 2.0 * x3,
                        h * (x3 - x2),
                    ],
                    derivatives: [
                        (-6.0 * x + 6.0 * x2) / h,
                        1.0 - 4.0 * x + 3.0 * x2,
                        (6.0 * x - 6.0 * x2) / h,
                        3.0 * x2 - 2.0 * x,
                    ],
                    len: 4,
                }
            }
        }
    }

    /// Local indices of the value (not slope) functions.
    pub fn value_slots(&self) -> &'static [usize] {
        match self.continuity {
            Continuity::C0 => &[0, 1],
            Continuity::C1 => &[0, 2],
        }
    }
}

/// Free-function form of [`ShapeSet::eval`].
pub fn shape_eval(shapes: ShapeSet, x: f64, h: f64) -> Result<ShapeValues> {
    shapes.eval(x, h)
}
