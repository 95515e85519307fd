//! Data collapse onto a single scaling curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub x: f64,
    pub y: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub alpha: f64,
    pub nu: f64,
    pub z_c: f64,
    pub points: Vec<CollapsePoint>,
    /// Mean squared spread across size groups, relative to the mean square
    /// of the collapsed curve.
    pub residual: f64,
}

/// Rescales `(N, Z, E)` to `x = N^{1/ν}(Z - z_c)`, `y = E N^{α/ν}` and
/// scores how well the size groups fall on one curve.
///
/// Each group is linearly interpolated at the centres of 20 equal bins
/// spanning the x range common to all groups; the residual is the mean
/// variance across groups at those centres over the mean square of the
/// bin means.
pub fn collapse(points: &[(f64, f64, f64)], alpha: f64, nu: f64, z_c: f64) -> Result<Collapse> {
    if !(nu > 0.0) || !alpha.is_finite() || !z_c.is_finite() {
        return Err(Error::invalid(format!("bad collapse parameters alpha = {alpha}, nu = {nu}, z_c = {z_c}")));
    }
    let mut mapped: Vec<CollapsePoint> = points
        .iter()
        .map(|&(n, z, e)| CollapsePoint {
            x: n.powf(1.0 / nu) * (z - z_c),
            y: e * n.powf(alpha / nu),
            size: n,
        })
        .collect();
    if mapped.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::CollapseUndefined("non-finite rescaled point".into()));
    }
    mapped.sort_by(|a, b| a.size.total_cmp(&b.size).then(a.x.total_cmp(&b.x)));

    let groups: Vec<&[CollapsePoint]> = mapped.chunk_by(|a, b| a.size == b.size).collect();
    if groups.len() < 2 {
        return Err(Error::CollapseUndefined("need at least two basis sizes".into()));
    }
    // bins span the x range every group covers, so the set of groups
    // compared does not jump as nu changes
    let (lo, hi) = groups.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(l, h), g| {
        (l.max(g[0].x), h.min(g[g.len() - 1].x))
    });
    if !(hi > lo) {
        return Err(Error::CollapseUndefined("size groups share no x range".into()));
    }
    let width = (hi - lo) / BINS as f64;

    let mut spread = 0.0;
    let mut level = 0.0;
    let mut used = 0usize;
    for b in 0..BINS {
        let centre = lo + (b as f64 + 0.5) * width;
        let vals: Vec<f64> = groups.iter().filter_map(|g| interpolate(g, centre)).collect();
        if vals.len() < 2 {
            continue;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        spread += vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        level += mean * mean;
        used += 1;
    }
    if used == 0 {
        return Err(Error::CollapseUndefined("size groups do not overlap in x".into()));
    }
    let norm = level / used as f64;
    let residual = if norm > 0.0 { spread / used as f64 / norm } else { 0.0 };
    Ok(Collapse {
        alpha,
        nu,
        z_c,
        points: mapped,
        residual,
    })
}

fn interpolate(group: &[CollapsePoint], x: f64) -> Option<f64> {
    if group.len() < 2 || x < group[0].x || x > group[group.len() - 1].x {
        return None;
    }
    let k = group.partition_point(|p| p.x <= x).clamp(1, group.len() - 1);
    let (a, b) = (group[k - 1], group[k]);
    if b.x == a.x {
        return Some(a.y);
    }
    Some(a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x))
}

/// Collapse residual on a grid of `nu` values; returns the minimizer and
/// every `(nu, residual)` pair that could be scored.
pub fn scan_nu(points: &[(f64, f64, f64)], alpha: f64, z_c: f64, nus: &[f64]) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut scores = Vec::with_capacity(nus.len());
    let mut last_err = None;
    for &nu in nus {
        match collapse(points, alpha, nu, z_c) {
            Ok(c) => scores.push((nu, c.residual)),
            Err(e) => last_err = Some(e),
        }
    }
    let best = scores
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|s| s.0)
        .ok_or_else(|| last_err.unwrap_or_else(|| Error::invalid("empty nu grid")))?;
    Ok((best, scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Points on a shared x grid so that every group samples the same curve.
    fn synthetic(alpha: f64, nu: f64, z_c: f64) -> Vec<(f64, f64, f64)> {
        let mut pts = Vec::new();
        for n in [10.0, 20.0, 40.0, 80.0] {
            for k in 0..=30 {
                let x = -3.0 + 0.2 * k as f64;
                let z = z_c + x * f64::powf(n, -1.0 / nu);
                pts.push((n, z, f64::powf(n, -alpha / nu) * x.exp()));
            }
        }
        pts
    }

    #[test]
    fn exact_collapse() {
        let pts = synthetic(1.0, 0.85, 0.91);
        let c = collapse(&pts, 1.0, 0.85, 0.91).unwrap();
        assert!(c.residual < 1e-12, "{}", c.residual);
        assert_eq!(c.points.len(), pts.len());
    }

    #[test]
    fn perturbed_alpha_is_worse() {
        let pts = synthetic(1.0, 0.85, 0.91);
        let truth = collapse(&pts, 1.0, 0.85, 0.91).unwrap().residual;
        let off = collapse(&pts, 1.1, 0.85, 0.91).unwrap().residual;
        assert!(off > truth);
        assert!(off > 1e-6);
    }

    #[test]
    fn scan_finds_true_nu() {
        let pts = synthetic(1.0, 0.85, 0.91);
        let nus: Vec<f64> = (0..=10).map(|k| 0.6 + 0.05 * k as f64).collect();
        let (best, scores) = scan_nu(&pts, 1.0, 0.91, &nus).unwrap();
        assert!((best - 0.85).abs() < 1e-9);
        assert_eq!(scores.len(), nus.len());
    }

    #[test]
    fn single_size_is_undefined() {
        let pts: Vec<_> = (0..10).map(|k| (20.0, 0.9 + 0.01 * k as f64, -0.1)).collect();
        assert!(matches!(collapse(&pts, 1.0, 0.85, 0.91), Err(Error::CollapseUndefined(_))));
    }
}
