//! Special functions and root finding backing the fundamental-function
//! formulas: log-gamma (Lanczos), Beta in log space, Euclidean ball volumes,
//! and bisection for monotone equations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MathError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bracket error: {0}")]
    Bracket(String),
}

/// A strictly positive finite real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealPos(f64);

impl RealPos {
    pub fn new(value: f64) -> Result<Self, MathError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(MathError::Domain(format!(
                "expected a strictly positive finite real, got {value}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

// Lanczos coefficients for g = 7, n = 9 (Godfrey's set, as used by Boost/GSL).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

const LN_SQRT_2PI: f64 = 0.91893853320467274178;

/// ln Γ(x) for x > 0.
///
/// Lanczos approximation (g = 7) for x ≥ 0.5, reflection below. The
/// approximation error is a few 1e-15 absolute; for large x the result
/// additionally carries the unavoidable rounding of its own magnitude.
pub fn log_gamma(x: f64) -> Result<f64, MathError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(MathError::Domain(format!(
            "log_gamma requires x > 0, got {x}"
        )));
    }
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x)
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.ln() - log_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b), for a, b > 0.
pub fn ln_beta(a: f64, b: f64) -> Result<f64, MathError> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma_unchecked(a + b))
}

/// Euler Beta function B(a, b), computed in log space to avoid overflow
/// for large arguments.
pub fn beta(a: f64, b: f64) -> Result<f64, MathError> {
    Ok(ln_beta(a, b)?.exp())
}

/// Volume of the unit ball in R^d: π^(d/2) / Γ(d/2 + 1).
pub fn ball_volume(d: usize) -> Result<f64, MathError> {
    if d == 0 {
        return Err(MathError::Domain("ball_volume requires d >= 1".into()));
    }
    let half_d = d as f64 / 2.0;
    Ok((half_d * std::f64::consts::PI.ln() - log_gamma_unchecked(half_d + 1.0)).exp())
}

/// Surface area of the unit sphere in R^d: d · ball_volume(d).
pub fn sphere_area(d: usize) -> Result<f64, MathError> {
    Ok(d as f64 * ball_volume(d)?)
}

/// Root of a continuous strictly monotone `g` on `[lo, hi]` by bisection.
///
/// Requires a sign change on the bracket; either monotone direction is
/// accepted. Returns the bracket midpoint once the bracket width is ≤ `tol`.
pub fn bisect_root(
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, MathError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(MathError::Bracket(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = g(a);
    let fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(MathError::Bracket(format!(
            "no sign change on [{lo}, {hi}]: g(lo) = {fa}, g(hi) = {fb}"
        )));
    }
    // bisection halves the bracket every step; 200 steps is more than enough
    // to reach any f64 tolerance from any finite bracket
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a) <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = g(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "got {got}, want {want}"
        );
    }

    #[test]
    fn log_gamma_anchors() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert_close(
            log_gamma(0.5).unwrap(),
            0.57236494292470008707, // ln √π
            1e-14,
        );
        assert_close(log_gamma(5.0).unwrap(), 24.0_f64.ln(), 1e-14);
    }

    #[test]
    fn log_gamma_reference_table() {
        // reference values computed with 40-digit arithmetic (mpmath)
        let table: [(f64, f64); 19] = [
            (1.0000000000000000e-03, 6.9071788853838536617),
            (1.0000000000000000e-02, 4.5994798780420217016),
            (1.0000000000000001e-01, 2.252712651734205902),
            (2.5000000000000000e-01, 1.2880225246980774574),
            (5.0000000000000000e-01, 0.57236494292470008707),
            (7.5000000000000000e-01, 0.20328095143129537148),
            (1.4616321449683622e+00, -0.1214862905358496081),
            (3.5000000000000000e+00, 1.2009736023470742248),
            (5.0000000000000000e+00, 3.1780538303479456196),
            (8.0000000000000000e+00, 8.5251613610654143002),
            (1.2500000000000000e+01, 18.734347511936445702),
            (1.3000000000000000e+01, 19.98721449566188615),
            (2.0250000000000000e+01, 40.084110597917348984),
            (5.0000000000000000e+01, 144.56574394634488601),
            (1.0000000000000000e+02, 359.13420536957539878),
            (1.7150000000000000e+02, 709.14316303092824227),
            (1.0000000000000000e+03, 5905.2204232091812118),
            (1.0000000000000000e+04, 82099.717496442377273),
            (1.0000000000000000e+06, 12815504.56914761166),
        ];
        for (x, want) in table {
            let got = log_gamma(x).unwrap();
            // absolute target 1e-13, relaxed by the rounding floor of the
            // value's own magnitude (a few ulps)
            let tol = 1e-13_f64.max(5.0 * f64::EPSILON * want.abs());
            assert!(
                (got - want).abs() <= tol,
                "lgamma({x}): got {got}, want {want}, err {}",
                (got - want).abs()
            );
        }
    }

    #[test]
    fn log_gamma_domain_errors() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(log_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn beta_anchors() {
        assert_close(beta(1.0, 1.0).unwrap(), 1.0, 1e-14);
        assert_close(beta(0.5, 0.5).unwrap(), std::f64::consts::PI, 1e-13);
        assert_close(beta(0.5, 1.5).unwrap(), std::f64::consts::PI / 2.0, 1e-13);
        // large second argument (mpmath)
        assert_close(beta(0.5, 1000.0).unwrap(), 0.056056918840616006138, 1e-12);
        assert_close(beta(30.5, 41.25).unwrap(), 3.3951575369018603194e-22, 1e-12);
    }

    #[test]
    fn ball_volume_anchors() {
        assert_close(ball_volume(1).unwrap(), 2.0, 1e-14);
        assert_close(ball_volume(2).unwrap(), std::f64::consts::PI, 1e-14);
        assert_close(
            ball_volume(3).unwrap(),
            4.0 * std::f64::consts::PI / 3.0,
            1e-13,
        );
        assert!(ball_volume(0).is_err());
    }

    #[test]
    fn bisect_root_examples() {
        let r = bisect_root(|x| x - 2.0, 0.0, 5.0, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-11);
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-11);
        // (h-1)^(-1) - h = 0 solves h(h-1) = 1, the golden ratio
        let r = bisect_root(|h| 1.0 / (h - 1.0) - h, 1.0 + 1e-9, 10.0, 1e-13).unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((r - golden).abs() < 1e-11);
    }

    #[test]
    fn bisect_root_requires_sign_change() {
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn real_pos_validation() {
        assert!(RealPos::new(1.5).is_ok());
        assert!(RealPos::new(0.0).is_err());
        assert!(RealPos::new(-1.0).is_err());
        assert!(RealPos::new(f64::INFINITY).is_err());
    }
}
