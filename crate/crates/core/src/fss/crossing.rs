//! Pseudo-critical points from the crossing of neighbouring Γ curves.

use serde::{Deserialize, Serialize};

use super::gap::GapSource;
use super::{delta, gamma};
use crate::error::{Error, Result};

/// `Γ(coupling; n, n')` for a pair of basis indices.
pub trait GammaSource: Sync {
    fn gamma(&self, coupling: f64, n: usize, n_prime: usize) -> Result<f64>;
}

/// Γ built from the gaps and gap derivatives of a [`GapSource`].
pub struct GapGamma<S>(pub S);

impl<S: GapSource> GammaSource for GapGamma<S> {
    fn gamma(&self, coupling: f64, n: usize, n_prime: usize) -> Result<f64> {
        let a = self.0.gap_point(coupling, n)?;
        let b = self.0.gap_point(coupling, n_prime)?;
        let dh = delta(a.gap, b.gap, a.size, b.size)?;
        let ddh = delta(a.dgap, b.dgap, a.size, b.size)?;
        gamma(dh, ddh)
    }
}

/// Γ given directly as a closure; used for synthetic families.
pub struct FnGamma<F>(pub F);

impl<F> GammaSource for FnGamma<F>
where
    F: Fn(f64, usize, usize) -> Result<f64> + Sync,
{
    fn gamma(&self, coupling: f64, n: usize, n_prime: usize) -> Result<f64> {
        (self.0)(coupling, n, n_prime)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossingOptions {
    /// Evenly spaced samples used to look for sign changes.
    pub scan_points: usize,
    /// Bisection stops once the bracket is narrower than this...
    pub tol: f64,
    /// ...and the curve difference at the midpoint is below this, or the
    /// bracket cannot be split further.
    pub residual_tol: f64,
    pub max_bisections: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            scan_points: 21,
            tol: 1e-6,
            residual_tol: 1e-8,
            max_bisections: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Central basis index.
    pub n: usize,
    pub delta_n: usize,
    /// Central size label.
    pub size: f64,
    /// Crossing location in the source's coupling.
    pub coupling: f64,
    /// Gamma at the crossing: the pseudo-critical exponent.
    pub alpha: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    /// `|Γ(n-δ, n) - Γ(n, n+δ)|` at the reported root.
    pub residual: f64,
    pub evaluations: usize,
}

/// The couplings sampled by the initial scan of a crossing search.
pub fn scan_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 })
        .collect()
}

fn excluded(e: &Error) -> bool {
    matches!(e.root_cause(), Error::UndefinedDelta(..) | Error::GammaPole(_))
}

struct Difference<'a, G: ?Sized> {
    source: &'a G,
    n: usize,
    delta_n: usize,
    evaluations: std::cell::Cell<usize>,
}

impl<G: GammaSource + ?Sized> Difference<'_, G> {
    /// `(g, Γ_left, Γ_right)`, or `None` where Γ is undefined.
    fn eval(&self, c: f64) -> Result<Option<(f64, f64, f64)>> {
        self.evaluations.set(self.evaluations.get() + 1);
        let left = self.source.gamma(c, self.n - self.delta_n, self.n);
        let right = left.and_then(|l| self.source.gamma(c, self.n, self.n + self.delta_n).map(|r| (l, r)));
        match right {
            Ok((l, r)) => Ok(Some((l - r, l, r))),
            Err(e) if excluded(&e) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Root of `Γ(c; n-δ, n) - Γ(c; n, n+δ)` in the coupling interval `[lo, hi]`.
///
/// Sign changes are located on a uniform scan. Brackets whose difference
/// grows under bisection straddle a pole of Γ and are discarded in favour of
/// the next candidate.
pub fn find_crossing<G: GammaSource + ?Sized>(
    source: &G,
    n: usize,
    delta_n: usize,
    lo: f64,
    hi: f64,
    opts: &CrossingOptions,
) -> Result<Crossing> {
    find_crossing_near(source, n, delta_n, lo, hi, None, opts)
}

/// As [`find_crossing`], but when several brackets change sign the one
/// closest to `near` is tried first. Following the previous size's root
/// this way keeps a chain on one branch of crossings.
pub fn find_crossing_near<G: GammaSource + ?Sized>(
    source: &G,
    n: usize,
    delta_n: usize,
    lo: f64,
    hi: f64,
    near: Option<f64>,
    opts: &CrossingOptions,
) -> Result<Crossing> {
    if delta_n == 0 || n <= delta_n {
        return Err(Error::invalid(format!("need 0 < delta ({delta_n}) < n ({n})")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("bad bracket [{lo}, {hi}]")));
    }
    if opts.scan_points < 2 || !(opts.tol > 0.0) {
        return Err(Error::invalid("crossing scan needs at least two points and a positive tolerance"));
    }
    let g = Difference {
        source,
        n,
        delta_n,
        evaluations: std::cell::Cell::new(0),
    };
    let mut samples = Vec::with_capacity(opts.scan_points);
    for c in scan_grid(lo, hi, opts.scan_points) {
        samples.push((c, g.eval(c)?));
    }

    let mut candidates = Vec::new();
    for w in samples.windows(2) {
        if let ((a, Some(ga)), (b, Some(gb))) = (w[0], w[1]) {
            if ga.0 == 0.0 && gb.0 == 0.0 {
                continue;
            }
            if ga.0 == 0.0 || gb.0 == 0.0 || ga.0.signum() != gb.0.signum() {
                candidates.push(((a, ga), (b, gb)));
            }
        }
    }
    match near {
        Some(c) => candidates.sort_by(|x, y| {
            let dx = (0.5 * (x.0 .0 + x.1 .0) - c).abs();
            let dy = (0.5 * (y.0 .0 + y.1 .0) - c).abs();
            dx.total_cmp(&dy)
        }),
        // smoother brackets first
        None => candidates.sort_by(|x, y| {
            let sx = x.0 .1 .0.abs().max(x.1 .1 .0.abs());
            let sy = y.0 .1 .0.abs().max(y.1 .1 .0.abs());
            sx.total_cmp(&sy)
        }),
    }

    for ((a, ga), (b, gb)) in candidates {
        if let Some(c) = bisect(&g, (a, ga), (b, gb), opts)? {
            return Ok(Crossing {
                n,
                delta_n,
                size: n as f64,
                evaluations: g.evaluations.get(),
                ..c
            });
        }
        log::debug!("bracket [{a}, {b}] for n = {n} straddles a pole; trying the next one");
    }
    Err(Error::NoCrossing {
        lo,
        hi,
        samples: samples.into_iter().map(|(c, v)| (c, v.map(|v| v.0))).collect(),
    })
}

type Sample = (f64, (f64, f64, f64));

fn bisect<G: GammaSource + ?Sized>(
    g: &Difference<'_, G>,
    mut a: Sample,
    mut b: Sample,
    opts: &CrossingOptions,
) -> Result<Option<Crossing>> {
    let scale = a.1 .0.abs().max(b.1 .0.abs());
    let done = |s: &Sample, bracket: (f64, f64)| Crossing {
        n: 0,
        delta_n: 0,
        size: f64::NAN,
        coupling: s.0,
        alpha: 0.5 * (s.1 .1 + s.1 .2),
        bracket,
        residual: s.1 .0.abs(),
        evaluations: 0,
    };
    if a.1 .0 == 0.0 {
        return Ok(Some(done(&a, (a.0, b.0))));
    }
    if b.1 .0 == 0.0 {
        return Ok(Some(done(&b, (a.0, b.0))));
    }
    let mut best = if a.1 .0.abs() < b.1 .0.abs() { a } else { b };
    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (a.0 + b.0);
        if mid <= a.0 || mid >= b.0 {
            break;
        }
        let Some(gm) = g.eval(mid)? else {
            // undefined inside the bracket: a pole or a sign change of the gap
            return Ok(None);
        };
        let m = (mid, gm);
        if gm.0.abs() <= best.1 .0.abs() {
            best = m;
        }
        if gm.0 == 0.0 {
            a = m;
            b = m;
            break;
        }
        if gm.0.signum() == a.1 .0.signum() {
            a = m;
        } else {
            b = m;
        }
        if b.0 - a.0 < opts.tol && best.1 .0.abs() <= opts.residual_tol {
            break;
        }
    }
    // a root pulls both ends towards zero; a pole pushes them apart
    if a.1 .0.abs().min(b.1 .0.abs()) > scale {
        return Ok(None);
    }
    // the bisection midpoints sit on a fixed dyadic grid; one secant step
    // inside the final bracket resolves the root below that spacing
    if a.0 < b.0 && a.1 .0 != b.1 .0 {
        let c = a.0 - a.1 .0 * (b.0 - a.0) / (b.1 .0 - a.1 .0);
        if c > a.0 && c < b.0 {
            if let Some(gc) = g.eval(c)? {
                if gc.0.abs() <= best.1 .0.abs() {
                    best = (c, gc);
                }
            }
        }
    }
    Ok(Some(done(&best, (a.0, b.0))))
}

/// [`find_crossing_near`] on Γ built from `source`, with the bracket given
/// as nuclear charges and the result's size label filled in.
pub fn find_gap_crossing<S: GapSource>(
    source: &S,
    n: usize,
    delta_n: usize,
    z_lo: f64,
    z_hi: f64,
    near: Option<f64>,
    opts: &CrossingOptions,
) -> Result<Crossing> {
    let (a, b) = (source.coupling_of_charge(z_lo), source.coupling_of_charge(z_hi));
    let mut c = find_crossing_near(&GapGamma(source), n, delta_n, a.min(b), a.max(b), near, opts)?;
    c.size = source.size(n);
    Ok(c)
}

/// Crossings for each central index in `ns` (ascending), each search
/// steered towards the previous root.
pub fn crossing_chain<S: GapSource>(
    source: &S,
    ns: &[usize],
    delta_n: usize,
    z_lo: f64,
    z_hi: f64,
    opts: &CrossingOptions,
) -> Vec<Result<Crossing>> {
    let mut near = None;
    ns.iter()
        .map(|&n| {
            let c = find_gap_crossing(source, n, delta_n, z_lo, z_hi, near, opts);
            if let Ok(c) = &c {
                near = Some(c.coupling);
            }
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic() -> FnGamma<impl Fn(f64, usize, usize) -> Result<f64> + Sync> {
        FnGamma(|z: f64, n: usize, np: usize| Ok(1.0 + (z - 0.91) * (1.0 / n as f64 - 1.0 / np as f64)))
    }

    #[test]
    fn synthetic_family_root() {
        for n in [5, 10, 37, 200] {
            let c = find_crossing(&synthetic(), n, 1, 0.5, 1.5, &CrossingOptions::default()).unwrap();
            assert!((c.coupling - 0.91).abs() < 1e-6, "{}", c.coupling);
            assert!((c.alpha - 1.0).abs() < 1e-6);
            assert!(c.residual <= 1e-8);
            assert!(c.bracket.0 <= c.coupling && c.coupling <= c.bracket.1);
        }
    }

    #[test]
    fn degenerate_curves_have_no_crossing() {
        let flat = FnGamma(|_z: f64, _n: usize, _np: usize| Ok(1.0));
        match find_crossing(&flat, 10, 1, 0.5, 1.5, &CrossingOptions::default()) {
            Err(Error::NoCrossing { samples, .. }) => {
                assert_eq!(samples.len(), 21);
                assert!(samples.iter().all(|s| s.1 == Some(0.0)));
            }
            other => panic!("expected no crossing, got {other:?}"),
        }
    }

    #[test]
    fn no_sign_change_reports_samples() {
        let src = FnGamma(|z: f64, n: usize, _np: usize| Ok(z * n as f64));
        assert!(matches!(
            find_crossing(&src, 10, 2, 0.5, 1.5, &CrossingOptions::default()),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn pole_brackets_are_skipped() {
        // tan has a pole at 0.5 and a root at 1; the pole's bracket is scaled
        // down so it is tried first
        let src = FnGamma(|z: f64, n: usize, _np: usize| {
            let w = if z < 0.8 { 1e-3 } else { 10.0 };
            Ok(if n == 9 { w * (std::f64::consts::PI * z).tan() } else { 0.0 })
        });
        let c = find_crossing(&src, 10, 1, 0.3, 1.2, &CrossingOptions::default()).unwrap();
        assert!((c.coupling - 1.0).abs() < 1e-6, "{}", c.coupling);
    }

    #[test]
    fn undefined_points_are_excluded() {
        let src = FnGamma(|z: f64, n: usize, np: usize| {
            if z < 0.6 {
                Err(Error::GammaPole(z))
            } else {
                Ok(1.0 + (z - 0.91) * (1.0 / n as f64 - 1.0 / np as f64))
            }
        });
        let c = find_crossing(&src, 8, 2, 0.3, 1.5, &CrossingOptions::default()).unwrap();
        assert!((c.coupling - 0.91).abs() < 1e-6);
    }

    #[test]
    fn solver_errors_propagate() {
        let src = FnGamma(|_z: f64, _n: usize, _np: usize| Err(Error::EigenNotConverged { iterations: 3, residual: 1.0 }));
        assert!(matches!(
            find_crossing(&src, 8, 2, 0.3, 1.5, &CrossingOptions::default()),
            Err(Error::EigenNotConverged { .. })
        ));
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(find_crossing(&synthetic(), 3, 3, 0.5, 1.5, &CrossingOptions::default()).is_err());
        assert!(find_crossing(&synthetic(), 3, 0, 0.5, 1.5, &CrossingOptions::default()).is_err());
        assert!(find_crossing(&synthetic(), 5, 1, 1.5, 0.5, &CrossingOptions::default()).is_err());
    }
}
