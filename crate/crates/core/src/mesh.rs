//! One-dimensional element meshes and their tensor product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How element widths vary along a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "growth")]
pub enum Grading {
    Uniform,
    /// Each element is `growth` times wider than the previous one.
    Geometric(f64),
}

/// Ordered element nodes on an interval.
///
/// Radial meshes start at 0 and end at the cutoff radius; the angular axis
/// of the three-variable problem uses the same type on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh1d {
    nodes: Vec<f64>,
    grading: Grading,
}

pub type RadialMesh = Mesh1d;

impl Mesh1d {
    /// `n_elements` equal elements on `[0, r_cut]`.
    pub fn uniform(n_elements: usize, r_cut: f64) -> Result<Self> {
        Self::uniform_on(n_elements, 0.0, r_cut)
    }

    /// `n_elements` equal elements on `[start, end]`.
    pub fn uniform_on(n_elements: usize, start: f64, end: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::invalid("mesh needs at least one element"));
        }
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::invalid(format!("empty mesh interval [{start}, {end}]")));
        }
        let h = (end - start) / n_elements as f64;
        let mut nodes: Vec<f64> = (0..=n_elements).map(|i| start + h * i as f64).collect();
        nodes[n_elements] = end;
        Ok(Self {
            nodes,
            grading: Grading::Uniform,
        })
    }

    /// Geometrically graded elements on `[0, r_cut]` with `h[e+1] = growth * h[e]`.
    pub fn graded(n_elements: usize, r_cut: f64, growth: f64) -> Result<Self> {
        if !(growth >= 1.0) || !growth.is_finite() {
            return Err(Error::invalid(format!("growth factor {growth} must be >= 1")));
        }
        if growth == 1.0 {
            return Self::uniform(n_elements, r_cut);
        }
        if n_elements == 0 {
            return Err(Error::invalid("mesh needs at least one element"));
        }
        if !(r_cut > 0.0) || !r_cut.is_finite() {
            return Err(Error::invalid(format!("cutoff radius {r_cut} must be positive")));
        }
        let first = r_cut * (growth - 1.0) / (growth.powi(n_elements as i32) - 1.0);
        let mut nodes = Vec::with_capacity(n_elements + 1);
        nodes.push(0.0);
        let mut h = first;
        let mut r = 0.0;
        for _ in 0..n_elements {
            r += h;
            nodes.push(r);
            h *= growth;
        }
        nodes[n_elements] = r_cut;
        Ok(Self {
            nodes,
            grading: Grading::Geometric(growth),
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Cutoff radius of a radial mesh.
    pub fn r_cut(&self) -> f64 {
        self.end()
    }

    pub fn width(&self, element: usize) -> f64 {
        self.nodes[element + 1] - self.nodes[element]
    }

    pub fn widths(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Left node of `element`.
    pub fn left(&self, element: usize) -> f64 {
        self.nodes[element]
    }

    /// Physical coordinate of reference point `x` in `element`.
    pub fn map(&self, element: usize, x: f64) -> f64 {
        self.nodes[element] + x * self.width(element)
    }

    /// Element containing `r` and the reference coordinate inside it.
    /// Points exactly on an interior node belong to the element on the right.
    pub fn locate(&self, r: f64) -> Option<(usize, f64)> {
        if !(r >= self.start() && r <= self.end()) {
            return None;
        }
        let n = self.n_elements();
        let idx = self.nodes.partition_point(|&node| node <= r);
        let element = idx.saturating_sub(1).min(n - 1);
        let x = ((r - self.nodes[element]) / self.width(element)).clamp(0.0, 1.0);
        Some((element, x))
    }

    /// The same mesh with every coordinate multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::invalid(format!("scale factor {factor} must be positive")));
        }
        Ok(Self {
            nodes: self.nodes.iter().map(|x| x * factor).collect(),
            grading: self.grading,
        })
    }

    /// Splits every element in two. The grading tag is kept as a label only.
    pub fn bisected(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.end());
        Self {
            nodes,
            grading: self.grading,
        }
    }
}

/// Free-function form of [`Mesh1d::uniform`].
pub fn build_uniform_mesh(n_elements: usize, r_cut: f64) -> Result<RadialMesh> {
    if !(r_cut > 0.0) {
        return Err(Error::invalid(format!("cutoff radius {r_cut} must be positive")));
    }
    Mesh1d::uniform(n_elements, r_cut)
}

/// Free-function form of [`Mesh1d::graded`].
pub fn build_graded_mesh(n_elements: usize, r_cut: f64, growth: f64) -> Result<RadialMesh> {
    Mesh1d::graded(n_elements, r_cut, growth)
}

/// Tensor product of two radial axes and a uniform mesh on `u = cos θ12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorMesh3 {
    pub r1: RadialMesh,
    pub r2: RadialMesh,
    pub u: Mesh1d,
}

impl TensorMesh3 {
    pub fn new(r1: RadialMesh, r2: RadialMesh, n_angular: usize) -> Result<Self> {
        if r1.start() != 0.0 || r2.start() != 0.0 {
            return Err(Error::invalid("radial axes must start at r = 0"));
        }
        Ok(Self {
            r1,
            r2,
            u: Mesh1d::uniform_on(n_angular, -1.0, 1.0)?,
        })
    }

    /// Same radial mesh on both axes.
    pub fn symmetric(radial: RadialMesh, n_angular: usize) -> Result<Self> {
        Self::new(radial.clone(), radial, n_angular)
    }

    /// The graded mesh used for the exact helium calculations:
    /// `n_radial` elements per radial axis growing by `growth` out to `r_cut`,
    /// and `n_angular` uniform elements in `cos θ12`.
    pub fn graded(n_radial: usize, n_angular: usize, r_cut: f64, growth: f64) -> Result<Self> {
        Self::symmetric(Mesh1d::graded(n_radial, r_cut, growth)?, n_angular)
    }

    pub fn n_elements(&self) -> usize {
        self.r1.n_elements() * self.r2.n_elements() * self.u.n_elements()
    }

    /// Radial axes stretched by `factor`; the angular axis is unchanged.
    pub fn scaled_radially(&self, factor: f64) -> Result<Self> {
        Ok(Self {
            r1: self.r1.scaled(factor)?,
            r2: self.r2.scaled(factor)?,
            u: self.u.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_two_elements() {
        let m = build_uniform_mesh(2, 10.0).unwrap();
        assert_eq!(m.nodes(), &[0.0, 5.0, 10.0]);
    }

    #[test]
    fn uniform_widths() {
        for (n, h) in [(100, 0.1), (1000, 0.01)] {
            let m = build_uniform_mesh(n, 10.0).unwrap();
            assert_eq!(m.n_nodes(), n + 1);
            for w in m.widths() {
                assert!((w - h).abs() < 1e-12 * h * 10.0);
            }
        }
    }

    #[test]
    fn graded_small_case() {
        let m = build_graded_mesh(2, 2.3, 1.3).unwrap();
        let w = m.widths();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] - 1.3).abs() < 1e-12);
    }

    #[test]
    fn graded_first_width_matches_summation() {
        let m = build_graded_mesh(15, 40.0, 1.3).unwrap();
        let w = m.widths();
        // independent: find h1 so that sum_{k<15} h1 1.3^k = 40
        let s: f64 = (0..15).map(|k| 1.3f64.powi(k)).sum();
        assert!((w[0] - 40.0 / s).abs() < 1e-12);
        assert!((w[0] - 40.0 * 0.3 / (1.3f64.powi(15) - 1.0)).abs() < 1e-12);
        assert!((w[0] - 0.23911).abs() < 1e-5);
        for pair in w.windows(2) {
            assert!((pair[1] / pair[0] - 1.3).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_growth_is_uniform() {
        let m = build_graded_mesh(5, 10.0, 1.0).unwrap();
        assert_eq!(m.grading(), Grading::Uniform);
        for w in m.widths() {
            assert!((w - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_uniform_mesh(0, 10.0).is_err());
        assert!(build_uniform_mesh(3, 0.0).is_err());
        assert!(build_uniform_mesh(3, -1.0).is_err());
        assert!(build_graded_mesh(3, 10.0, 0.9).is_err());
        assert!(build_graded_mesh(3, 10.0, f64::NAN).is_err());
    }

    #[test]
    fn locate_points() {
        let m = build_uniform_mesh(4, 4.0).unwrap();
        assert_eq!(m.locate(0.0), Some((0, 0.0)));
        assert_eq!(m.locate(1.5), Some((1, 0.5)));
        assert_eq!(m.locate(2.0), Some((2, 0.0)));
        assert_eq!(m.locate(4.0), Some((3, 1.0)));
        assert_eq!(m.locate(4.5), None);
        assert_eq!(m.locate(-0.1), None);
    }

    #[test]
    fn bisection_nests() {
        let m = build_graded_mesh(4, 10.0, 1.3).unwrap();
        let b = m.bisected();
        assert_eq!(b.n_elements(), 8);
        for (i, node) in m.nodes().iter().enumerate() {
            assert_eq!(b.nodes()[2 * i], *node);
        }
    }

    #[test]
    fn tensor_mesh_counts() {
        let t = TensorMesh3::graded(15, 3, 40.0, 1.3).unwrap();
        assert_eq!(t.n_elements(), 675);
        assert_eq!(t.u.start(), -1.0);
        assert_eq!(t.u.end(), 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn widths_telescope(n in 1usize..200, r_cut in 0.5f64..100.0, growth in 1.0f64..1.6) {
                let m = build_graded_mesh(n, r_cut, growth).unwrap();
                let total: f64 = m.widths().iter().sum();
                prop_assert!((total - r_cut).abs() < 1e-10);
                prop_assert_eq!(m.nodes()[0], 0.0);
                prop_assert_eq!(m.r_cut(), r_cut);
                prop_assert!(m.nodes().windows(2).all(|w| w[1] > w[0]));
            }
        }
    }
}
