//! The ψ-function class: positive continuous weights on an open exponent
//! interval (a, b) with 1 ≤ a < b ≤ ∞, their algebra (product/quotient),
//! built-in families, natural functions of sampled norms, and the
//! compact-embedding order ψ₁ ≪ ψ₂.

use std::sync::Arc;

use thiserror::Error;

use crate::mathcore::{bisect_root, MathError, RealPos};
use crate::sup::SupConfig;

#[derive(Debug, Error)]
pub enum PsiError {
    #[error("invalid support: {0}")]
    Support(String),
    #[error("supports intersect in an empty or degenerate interval: [{0}, {1}]")]
    EmptyIntersection(f64, f64),
    #[error("invalid samples: {0}")]
    Samples(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("relation undefined: {0}")]
    RelationUndefined(String),
    #[error(transparent)]
    Math(#[from] MathError),
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A weight function ψ on an open exponent interval, evaluating to the +∞
/// sentinel outside its closed support so that sup-based norms ignore those
/// points naturally.
#[derive(Clone)]
pub struct PsiFunction {
    support: (f64, f64),
    eval: EvalFn,
    label: String,
}

impl std::fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PsiFunction")
            .field("support", &self.support)
            .field("label", &self.label)
            .finish()
    }
}

fn check_support(a: f64, b: f64) -> Result<(), PsiError> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(PsiError::Support(format!(
            "lower endpoint must be a finite real >= 1, got {a}"
        )));
    }
    if !(b > a) {
        return Err(PsiError::Support(format!(
            "upper endpoint must exceed the lower one, got ({a}, {b})"
        )));
    }
    Ok(())
}

impl PsiFunction {
    pub fn from_fn(
        label: impl Into<String>,
        a: f64,
        b: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, PsiError> {
        check_support(a, b)?;
        Ok(Self {
            support: (a, b),
            eval: Arc::new(f),
            label: label.into(),
        })
    }

    /// ψ(p) = p^(1/λ), the weight of the exponential-Orlicz correspondence.
    pub fn power(lambda: RealPos, a: f64, b: f64) -> Result<Self, PsiError> {
        let inv_lambda = 1.0 / lambda.get();
        Self::from_fn(
            format!("p^(1/{})", lambda.get()),
            a,
            b,
            move |p| p.powf(inv_lambda),
        )
    }

    pub fn constant(c: f64, a: f64, b: f64) -> Result<Self, PsiError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(PsiError::Construction(format!(
                "constant weight must be positive, got {c}"
            )));
        }
        Self::from_fn(format!("const {c}"), a, b, move |_| c)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluate; p outside [a, b] gives the +∞ sentinel.
    pub fn eval(&self, p: f64) -> f64 {
        let (a, b) = self.support;
        if !p.is_finite() || p < a || p > b {
            return f64::INFINITY;
        }
        (self.eval)(p)
    }

    /// ν = ψ · ζ on the intersection of the supports.
    pub fn product(&self, other: &PsiFunction) -> Result<PsiFunction, PsiError> {
        let (a, b) = intersect(self.support, other.support)?;
        let f = self.eval.clone();
        let g = other.eval.clone();
        Ok(PsiFunction {
            support: (a, b),
            eval: Arc::new(move |p| f(p) * g(p)),
            label: format!("({})*({})", self.label, other.label),
        })
    }

    /// ψ = ν / ζ on the intersection of the supports. The positive-infimum
    /// requirement is checked on a grid; a failing check only warns, since a
    /// finite grid cannot prove the infimum is zero.
    pub fn quotient(&self, other: &PsiFunction) -> Result<PsiFunction, PsiError> {
        let (a, b) = intersect(self.support, other.support)?;
        let f = self.eval.clone();
        let g = other.eval.clone();
        let out = PsiFunction {
            support: (a, b),
            eval: Arc::new(move |p| f(p) / g(p)),
            label: format!("({})/({})", self.label, other.label),
        };
        let m = out.grid_min(256);
        if !(m > 0.0) {
            eprintln!(
                "warning: quotient {} has grid minimum {m}; it may fall outside the weight class",
                out.label
            );
        }
        Ok(out)
    }

    /// c · ψ for c > 0.
    pub fn scale(&self, c: f64) -> Result<PsiFunction, PsiError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(PsiError::Construction(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        let f = self.eval.clone();
        Ok(PsiFunction {
            support: self.support,
            eval: Arc::new(move |p| c * f(p)),
            label: format!("{c}*({})", self.label),
        })
    }

    /// Minimum over an interior grid of `n` points (log-spaced for infinite
    /// supports).
    pub fn grid_min(&self, n: usize) -> f64 {
        let cfg = SupConfig::default();
        let grid = crate::sup::interval_grid(self.support.0, self.support.1, n.max(2), &cfg);
        grid.iter()
            .map(|&p| self.eval(p))
            .fold(f64::INFINITY, f64::min)
    }
}

fn intersect(s1: (f64, f64), s2: (f64, f64)) -> Result<(f64, f64), PsiError> {
    let a = s1.0.max(s2.0);
    let b = s1.1.min(s2.1);
    if !(a < b) {
        return Err(PsiError::EmptyIntersection(a, b));
    }
    Ok((a, b))
}

/// The piecewise weight (p−a)^(−α) on (a, h), p^β on (h, ∞), with the
/// crossover h > a the unique solution of (h−a)^(−α) = h^β so that the
/// assembled function is continuous.
#[derive(Debug, Clone, Copy)]
pub struct PsiTilde {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub crossover: f64,
}

impl PsiTilde {
    pub fn new(a: f64, alpha: RealPos, beta: RealPos) -> Result<Self, PsiError> {
        if !(a >= 1.0) || !a.is_finite() {
            return Err(PsiError::Support(format!(
                "left endpoint must be >= 1, got {a}"
            )));
        }
        let (al, be) = (alpha.get(), beta.get());
        // g(h) = (h-a)^(-alpha) - h^beta is strictly decreasing on (a, ∞):
        // +∞ at a⁺, negative for large h. Expand the bracket upward until
        // the sign flips.
        let g = move |h: f64| (h - a).powf(-al) - h.powf(be);
        let lo = a + 1e-12 * a.max(1.0);
        let mut hi = a + 1.0;
        let mut expand = 0;
        while g(hi) > 0.0 {
            hi *= 2.0;
            expand += 1;
            if expand > 200 {
                return Err(PsiError::Construction(
                    "crossover bracket expansion failed".into(),
                ));
            }
        }
        let h = bisect_root(g, lo, hi, 1e-14 * hi.max(1.0))
            .map_err(|e| PsiError::Construction(format!("crossover root: {e}")))?;
        Ok(Self {
            a,
            alpha: al,
            beta: be,
            crossover: h,
        })
    }

    pub fn eval(&self, p: f64) -> f64 {
        if !p.is_finite() || p <= self.a {
            return f64::INFINITY;
        }
        if p < self.crossover {
            (p - self.a).powf(-self.alpha)
        } else {
            p.powf(self.beta)
        }
    }

    pub fn to_psi(&self) -> PsiFunction {
        let copy = *self;
        PsiFunction {
            support: (self.a, f64::INFINITY),
            eval: Arc::new(move |p| copy.eval(p)),
            label: format!(
                "tilde(a={}, alpha={}, beta={})",
                self.a, self.alpha, self.beta
            ),
        }
    }
}

/// Natural function from samples of (p, |f|_p): log-linear interpolation of
/// ln(value) in the variable 1/p, which reproduces indicator norms δ^(1/p)
/// exactly. Support is the open interval spanned by the sample abscissae.
pub fn natural_psi(samples: &[(f64, f64)]) -> Result<PsiFunction, PsiError> {
    if samples.len() < 2 {
        return Err(PsiError::Samples("need at least two samples".into()));
    }
    let mut ps = Vec::with_capacity(samples.len());
    let mut lnv = Vec::with_capacity(samples.len());
    for &(p, v) in samples {
        if !(v > 0.0) || !v.is_finite() {
            return Err(PsiError::Samples(format!(
                "sample value at p={p} must be positive and finite, got {v}"
            )));
        }
        if let Some(&last) = ps.last() {
            if p <= last {
                return Err(PsiError::Samples(
                    "sample abscissae must be strictly increasing".into(),
                ));
            }
        }
        ps.push(p);
        lnv.push(v.ln());
    }
    let (a, b) = (ps[0], *ps.last().unwrap());
    check_support(a, b)?;
    Ok(PsiFunction {
        support: (a, b),
        eval: Arc::new(move |p| {
            // locate the bracketing samples and interpolate in u = 1/p
            let i = match ps.binary_search_by(|x| x.partial_cmp(&p).unwrap()) {
                Ok(i) => return lnv[i].exp(),
                Err(i) => i,
            };
            let (i0, i1) = if i == 0 {
                (0, 1)
            } else if i >= ps.len() {
                (ps.len() - 2, ps.len() - 1)
            } else {
                (i - 1, i)
            };
            let (u0, u1) = (1.0 / ps[i0], 1.0 / ps[i1]);
            let t = (1.0 / p - u0) / (u1 - u0);
            (lnv[i0] + t * (lnv[i1] - lnv[i0])).exp()
        }),
        label: "natural".into(),
    })
}

/// Verdict of the numerical ≪ probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy)]
pub struct PrecedesOptions {
    /// The ratio must fall below this to conclude ψ₁ ≪ ψ₂.
    pub threshold: f64,
    /// Number of trailing probe points examined for monotonicity.
    pub tail: usize,
    /// Minimal growth factor of ψ₂ along the probe; less means ψ₂ is
    /// bounded there and the relation is undefined.
    pub min_growth: f64,
}

impl Default for PrecedesOptions {
    fn default() -> Self {
        Self {
            threshold: 1e-6,
            tail: 8,
            min_growth: 10.0,
        }
    }
}

/// Numerical verdict for ψ₁ ≪ ψ₂ along a probe sequence on which ψ₂ → ∞.
///
/// A limit cannot be decided from finitely many probes, so the contract is a
/// heuristic with explicit thresholds: the ratio ψ₁/ψ₂ must be monotone
/// nonincreasing over the last `tail` probes and end below `threshold` to
/// hold; a ratio bounded away from zero without a decreasing trend fails;
/// anything else is inconclusive.
pub fn precedes(
    psi1: &PsiFunction,
    psi2: &PsiFunction,
    probe: &[f64],
    opts: &PrecedesOptions,
) -> Result<Verdict, PsiError> {
    if probe.len() < opts.tail.max(2) {
        return Err(PsiError::RelationUndefined(format!(
            "probe must contain at least {} points",
            opts.tail.max(2)
        )));
    }
    let mut v2 = Vec::with_capacity(probe.len());
    let mut ratio = Vec::with_capacity(probe.len());
    for &p in probe {
        let a = psi1.eval(p);
        let b = psi2.eval(p);
        if !a.is_finite() || !b.is_finite() || b <= 0.0 {
            return Err(PsiError::RelationUndefined(format!(
                "probe point {p} falls outside the common support"
            )));
        }
        v2.push(b);
        ratio.push(a / b);
    }
    let growth = v2.last().unwrap() / v2.first().unwrap();
    if !(growth >= opts.min_growth) {
        return Err(PsiError::RelationUndefined(format!(
            "psi2 grows only by a factor {growth:.3} along the probe; the limit set psi2 -> inf is not approached"
        )));
    }

    let tail = &ratio[ratio.len() - opts.tail..];
    let nonincreasing = tail
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let first = tail[0];
    let last = *tail.last().unwrap();
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    // a genuine downward trend, as opposed to a flat or oscillating tail
    let heading_down = nonincreasing && last < first * 0.95;

    if nonincreasing && last < opts.threshold {
        Ok(Verdict::Holds)
    } else if heading_down {
        // still decreasing but not below threshold yet
        Ok(Verdict::Inconclusive)
    } else if tail_min >= opts.threshold {
        // flat, oscillating, or growing while bounded away from zero
        Ok(Verdict::Fails)
    } else {
        Ok(Verdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(lambda: f64, a: f64, b: f64) -> PsiFunction {
        PsiFunction::power(RealPos::new(lambda).unwrap(), a, b).unwrap()
    }

    #[test]
    fn power_family_values_and_sentinel() {
        let psi = power(1.0, 1.0, f64::INFINITY);
        assert!((psi.eval(4.0) - 4.0).abs() < 1e-15);
        let psi2 = power(2.0, 1.0, f64::INFINITY);
        assert!((psi2.eval(4.0) - 2.0).abs() < 1e-15);
        assert!(psi2.eval(0.5).is_infinite());
        assert!(psi2.eval(f64::NAN).is_infinite());
    }

    #[test]
    fn builtin_positivity_on_grid() {
        for psi in [
            power(1.0, 1.0, f64::INFINITY),
            power(2.0, 1.0, f64::INFINITY),
            PsiFunction::constant(1.0, 1.0, 8.0).unwrap(),
            PsiTilde::new(1.0, RealPos::new(1.0).unwrap(), RealPos::new(1.0).unwrap())
                .unwrap()
                .to_psi(),
        ] {
            assert!(psi.grid_min(1024) > 0.0, "{} not positive", psi.label());
        }
    }

    #[test]
    fn tilde_crossover_golden_ratio() {
        let t = PsiTilde::new(1.0, RealPos::new(1.0).unwrap(), RealPos::new(1.0).unwrap()).unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((t.crossover - golden).abs() < 1e-12, "h = {}", t.crossover);
        // value at the crossover comes from the power branch = h^beta = h
        assert!((t.eval(t.crossover) - t.crossover).abs() < 1e-12);
    }

    #[test]
    fn tilde_continuity_at_crossover() {
        let t = PsiTilde::new(1.0, RealPos::new(1.0).unwrap(), RealPos::new(1.0).unwrap()).unwrap();
        let h = t.crossover;
        let mut prev_gap = f64::INFINITY;
        for eps in [1e-4, 1e-6, 1e-8] {
            let gap = (t.eval(h - eps) - t.eval(h + eps)).abs();
            assert!(gap < prev_gap, "gap {gap} did not shrink from {prev_gap}");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-7);
    }

    #[test]
    fn tilde_residual_identity() {
        let t = PsiTilde::new(2.0, RealPos::new(0.5).unwrap(), RealPos::new(2.0).unwrap()).unwrap();
        let h = t.crossover;
        let lhs = (h - 2.0).powf(-0.5);
        let rhs = h * h;
        assert!(
            (lhs - rhs).abs() <= 1e-10 * rhs.abs(),
            "residual {}",
            (lhs - rhs).abs() / rhs
        );
    }

    #[test]
    fn product_and_quotient_supports() {
        let psi = power(1.0, 1.0, 4.0);
        let zeta = power(1.0, 2.0, 8.0);
        let nu = psi.product(&zeta).unwrap();
        assert_eq!(nu.support(), (2.0, 4.0));
        assert!((nu.eval(3.0) - 9.0).abs() < 1e-14);

        let half = power(2.0, 1.0, f64::INFINITY);
        let q = power(1.0, 1.0, f64::INFINITY).quotient(&half).unwrap();
        assert!((q.eval(9.0) - 3.0).abs() < 1e-13);

        let lo = power(1.0, 1.0, 2.0);
        let hi = power(1.0, 3.0, 4.0);
        assert!(lo.product(&hi).is_err());
    }

    #[test]
    fn quotient_round_trip() {
        let psi = power(2.0, 1.0, 64.0);
        let zeta = power(1.0, 1.0, 64.0);
        let back = psi.product(&zeta).unwrap().quotient(&zeta).unwrap();
        for i in 0..200 {
            let p = 1.01 + 62.0 * i as f64 / 199.0;
            let a = back.eval(p);
            let b = psi.eval(p);
            assert!((a - b).abs() <= 1e-12 * b, "at p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn natural_psi_indicator_exact() {
        // unit-measure indicator: |f|_p = 1 for all p
        let flat = natural_psi(&[(1.5, 1.0), (3.0, 1.0), (8.0, 1.0)]).unwrap();
        assert!((flat.eval(2.0) - 1.0).abs() < 1e-15);

        // measure-16 indicator: |f|_p = 16^(1/p); interpolation is exact
        let samples: Vec<(f64, f64)> = [1.5, 3.0, 6.0, 9.0]
            .iter()
            .map(|&p| (p, 16.0_f64.powf(1.0 / p)))
            .collect();
        let psi = natural_psi(&samples).unwrap();
        assert!((psi.eval(2.0) - 4.0).abs() < 1e-12);
        assert!((psi.eval(4.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn natural_psi_rejects_bad_samples() {
        assert!(natural_psi(&[(2.0, 1.0)]).is_err());
        assert!(natural_psi(&[(2.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(natural_psi(&[(2.0, 0.0), (3.0, 1.0)]).is_err());
    }

    fn probe_geometric() -> Vec<f64> {
        (1..=40).map(|k| 2.0_f64.powi(k)).collect()
    }

    #[test]
    fn precedes_verdicts() {
        let opts = PrecedesOptions::default();
        let sqrt_p = power(2.0, 1.0, f64::INFINITY);
        let p = power(1.0, 1.0, f64::INFINITY);
        assert_eq!(
            precedes(&sqrt_p, &p, &probe_geometric(), &opts).unwrap(),
            Verdict::Holds
        );
        assert_eq!(
            precedes(&p, &p, &probe_geometric(), &opts).unwrap(),
            Verdict::Fails
        );
        let wobble = PsiFunction::from_fn("p(1+sin^2 p)", 1.0, f64::INFINITY, |p| {
            p * (1.0 + p.sin().powi(2))
        })
        .unwrap();
        assert_eq!(
            precedes(&wobble, &p, &probe_geometric(), &opts).unwrap(),
            Verdict::Fails
        );
        // antisymmetry on the Holds pair
        assert_eq!(
            precedes(&p, &sqrt_p, &probe_geometric(), &opts).unwrap(),
            Verdict::Fails
        );
    }

    #[test]
    fn precedes_requires_unbounded_psi2() {
        let opts = PrecedesOptions::default();
        let one = PsiFunction::constant(1.0, 1.0, f64::INFINITY).unwrap();
        let p = power(1.0, 1.0, f64::INFINITY);
        assert!(precedes(&p, &one, &probe_geometric(), &opts).is_err());
    }
}
