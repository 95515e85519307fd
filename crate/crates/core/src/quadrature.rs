//! Gauss-Legendre quadrature.
//!
//! Nodes are found by Newton iteration on the Legendre polynomial rather
//! than tabulated, so every rule is accurate to machine precision.

use std::sync::OnceLock;

/// Number of points in the rule used by every integral in the crate.
pub const DEFAULT_POINTS: usize = 10;

/// Abscissae and weights of a Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub abscissae: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Builds the `n`-point rule.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one point");
        let mut abscissae = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            abscissae[i] = -x;
            abscissae[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            abscissae[n / 2] = 0.0;
        }
        Self { abscissae, weights }
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// Integrates `f` over `[-1, 1]`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.abscissae
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrates `f` over `[a, b]` with the affine map.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|x| f(mid + half * x))
    }

    /// The rule mapped to the reference element `[0, 1]` as (points, weights).
    pub fn unit_interval(&self) -> (Vec<f64>, Vec<f64>) {
        let pts = self.abscissae.iter().map(|x| 0.5 * (x + 1.0)).collect();
        let wts = self.weights.iter().map(|w| 0.5 * w).collect();
        (pts, wts)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The 10-point Gauss-Legendre rule, computed once.
pub fn gauss_rule() -> &'static QuadRule {
    static RULE: OnceLock<QuadRule> = OnceLock::new();
    RULE.get_or_init(|| QuadRule::gauss_legendre(DEFAULT_POINTS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let sum: f64 = gauss_rule().weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn low_order_moments() {
        let rule = gauss_rule();
        assert!((rule.integrate(|_| 1.0) - 2.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x.powi(18)) - 2.0 / 19.0).abs() < 1e-13);
    }

    #[test]
    fn exact_through_degree_nineteen() {
        let rule = gauss_rule();
        for k in 0..=19 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = rule.integrate(|x| x.powi(k));
            assert!((got - exact).abs() < 1e-13, "degree {k}: {got} vs {exact}");
        }
        // degree 20 is not integrated exactly
        let got = rule.integrate(|x| x.powi(20));
        assert!((got - 2.0 / 21.0).abs() > 1e-10);
    }

    #[test]
    fn nodes_symmetric_and_sorted() {
        let rule = gauss_rule();
        for i in 0..rule.len() {
            assert!((rule.abscissae[i] + rule.abscissae[rule.len() - 1 - i]).abs() < 1e-15);
            if i > 0 {
                assert!(rule.abscissae[i] > rule.abscissae[i - 1]);
            }
        }
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = QuadRule::gauss_legendre(5);
        assert_eq!(rule.abscissae[2], 0.0);
        assert!((rule.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
    }
}
