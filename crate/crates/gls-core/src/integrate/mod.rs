//! Norm engines over the test-function families: L_p, weighted L_{p,α},
//! mixed anisotropic, and the sup-based weighted-family norms, each with a
//! closed-form, quadrature, or Monte Carlo backend and an error estimate.
//!
//! Backend policy: closed form when the family admits one, quadrature up to
//! three dimensions, Monte Carlo beyond. Compositions f(A·) never use a
//! closed form; their norms are measured.

pub mod mc;
pub mod quad;
mod testfn;

use thiserror::Error;

use crate::fundamental::{
    theta_scaled, Ellipsoid, FundamentalError, MixedExponent, Parallelepiped, PsiMulti,
};
use crate::linalg::Matrix;
use crate::mathcore::{sphere_area, MathError};
use crate::psi::{PsiError, PsiFunction};
use crate::sup::{sup_scalar, sup_vector, SupConfig};

pub use mc::{mc_integral, mc_region_mixed, mc_volume, McOutcome};
pub use quad::{
    adaptive_quad, adaptive_quad_power_endpoint, adaptive_quad_rel, nested_mixed_norm,
    region_mixed_norm, region_volume, region_weighted_integral, QuadResult, Region,
};
pub use testfn::TestFunction;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Fundamental(#[from] FundamentalError),
    #[error(transparent)]
    Psi(#[from] PsiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// A numerical norm value with an attached error bound and the method that
/// produced it. Monte Carlo errors are 3σ; sup-type values are certified
/// lower bounds up to the per-point evaluation error.
#[derive(Debug, Clone, Copy)]
pub struct NormEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    pub count: u64,
}

#[derive(Debug, Clone, Copy)]
pub enum Backend {
    Auto,
    ClosedForm,
    Quadrature,
    MonteCarlo { n: u64, seed: u64 },
}

const DEFAULT_MC_N: u64 = 1_000_000;
const DEFAULT_MC_SEED: u64 = 0x90_1753;
const QUAD_REL: f64 = 1e-9;

fn check_exponent(f: &TestFunction, p: f64) -> Result<(), NormError> {
    let (lo, hi) = f.integrability_range();
    if !(p >= lo) || !(p < hi) {
        return Err(NormError::Domain(format!(
            "exponent {p} outside the declared integrability range [{lo}, {hi})"
        )));
    }
    Ok(())
}

/// Collapse a function into a quadratic-form Gaussian (Q, center, amplitude)
/// when its kind allows it: plain Gaussians, quadratic Gaussians, products
/// of those, and linear compositions thereof.
fn as_quadratic(f: &TestFunction) -> Option<(Matrix, Vec<f64>, f64)> {
    match f {
        TestFunction::Gaussian {
            centers,
            scales,
            amplitude,
        } => {
            let inv_sq: Vec<f64> = scales.iter().map(|s| 1.0 / (s * s)).collect();
            Some((Matrix::diagonal(&inv_sq), centers.clone(), *amplitude))
        }
        TestFunction::GaussianQuadratic {
            q,
            center,
            amplitude,
        } => Some((q.clone(), center.clone(), *amplitude)),
        TestFunction::Product { factors } => {
            let mut qs = Vec::new();
            let mut center = Vec::new();
            let mut amp = 1.0;
            for g in factors {
                let (q, c, a) = as_quadratic(g)?;
                qs.push(q);
                center.extend(c);
                amp *= a;
            }
            Some((Matrix::block_diagonal(&qs), center, amp))
        }
        TestFunction::Composed { matrix, inner } => {
            let (q, c, a) = as_quadratic(inner)?;
            let qq = matrix.transpose().matmul(&q).matmul(matrix);
            let inv = matrix.inverse().ok()?;
            Some((qq, inv.matvec(&c), a))
        }
        _ => None,
    }
}

/// ∫_R^d of the Gaussian e^{-p xᵀQx} by rotation to the eigenbasis of Q and
/// one adaptive 1-D integral per eigen-coordinate. Returns (ln integral, evals).
fn gaussian_lp_power_integral(q: &Matrix, p: f64) -> Result<(f64, u64), NormError> {
    const K2: f64 = 40.0;
    let (vals, _) = q.sym_eigen();
    let mut ln_i = 0.0;
    let mut evals = 0;
    for &lambda in &vals {
        if !(lambda > 0.0) {
            return Err(NormError::Domain(
                "quadratic form is not positive definite".into(),
            ));
        }
        let hw = (K2 / (p * lambda)).sqrt();
        let r = adaptive_quad_rel(|u| (-p * lambda * u * u).exp(), -hw, hw, 1e-12);
        evals += r.evals;
        ln_i += r.value.ln();
    }
    Ok((ln_i, evals))
}

pub fn lp_norm(f: &TestFunction, p: f64) -> Result<NormEstimate, NormError> {
    lp_norm_with(f, p, Backend::Auto)
}

pub fn lp_norm_with(
    f: &TestFunction,
    p: f64,
    backend: Backend,
) -> Result<NormEstimate, NormError> {
    check_exponent(f, p)?;
    match backend {
        Backend::Auto => {
            if let Some(v) = f.lp_closed_form(p) {
                return Ok(NormEstimate {
                    value: v,
                    abs_error: 0.0,
                    method: Method::ClosedForm,
                    count: 0,
                });
            }
            if f.dim() <= 3 {
                match lp_norm_with(f, p, Backend::Quadrature) {
                    Ok(est) => return Ok(est),
                    Err(NormError::Unsupported(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            lp_norm_with(
                f,
                p,
                Backend::MonteCarlo {
                    n: DEFAULT_MC_N,
                    seed: DEFAULT_MC_SEED,
                },
            )
        }
        Backend::ClosedForm => f
            .lp_closed_form(p)
            .map(|v| NormEstimate {
                value: v,
                abs_error: 0.0,
                method: Method::ClosedForm,
                count: 0,
            })
            .ok_or_else(|| {
                NormError::Unsupported("no closed-form norm for this function".into())
            }),
        Backend::Quadrature => {
            if let Some((region, amp)) = f.indicator_region() {
                let vol = region_volume(&region, QUAD_REL);
                let value = amp * vol.value.powf(1.0 / p);
                let deriv = if vol.value > 0.0 {
                    value / vol.value / p
                } else {
                    0.0
                };
                return Ok(NormEstimate {
                    value,
                    abs_error: vol.abs_error * deriv.abs(),
                    method: Method::Quadrature,
                    count: vol.evals,
                });
            }
            if let Some((q, _, amp)) = as_quadratic(f) {
                let (ln_i, evals) = gaussian_lp_power_integral(&q, p)?;
                let value = amp * (ln_i / p).exp();
                return Ok(NormEstimate {
                    value,
                    abs_error: 1e-10 * value,
                    method: Method::Quadrature,
                    count: evals,
                });
            }
            if let TestFunction::PowerDecay {
                gamma,
                radius,
                dim,
                amplitude,
            } = f
            {
                let d = *dim as f64;
                let e = d - 1.0 - gamma * p;
                let r = adaptive_quad_power_endpoint(|_| 1.0, e, *radius, 1e-12);
                let integral = sphere_area(*dim)? * r.value;
                let value = amplitude * integral.powf(1.0 / p);
                return Ok(NormEstimate {
                    value,
                    abs_error: 1e-10 * value,
                    method: Method::Quadrature,
                    count: r.evals,
                });
            }
            if let TestFunction::Product { factors } = f {
                let mut value = 1.0;
                let mut rel = 0.0;
                let mut count = 0;
                for g in factors {
                    let est = lp_norm_with(g, p, Backend::Quadrature)?;
                    rel += if est.value > 0.0 {
                        est.abs_error / est.value
                    } else {
                        0.0
                    };
                    value *= est.value;
                    count += est.count;
                }
                return Ok(NormEstimate {
                    value,
                    abs_error: rel * value,
                    method: Method::Quadrature,
                    count,
                });
            }
            Err(NormError::Unsupported(
                "no quadrature path for this function kind".into(),
            ))
        }
        Backend::MonteCarlo { n, seed } => {
            if let Some((region, amp)) = f.indicator_region() {
                let vol = mc_volume(&region, n, seed);
                let value = amp * vol.value.powf(1.0 / p);
                let deriv = if vol.value > 0.0 {
                    value / vol.value / p
                } else {
                    0.0
                };
                return Ok(NormEstimate {
                    value,
                    abs_error: 3.0 * vol.std_error * deriv.abs(),
                    method: Method::MonteCarlo,
                    count: n,
                });
            }
            let bbox = f.support_box(p)?;
            let out = mc_integral(|x| f.eval(x).abs().powf(p), &bbox, n, seed);
            let value = out.value.max(0.0).powf(1.0 / p);
            let deriv = if out.value > 0.0 {
                value / out.value / p
            } else {
                0.0
            };
            Ok(NormEstimate {
                value,
                abs_error: 3.0 * out.std_error * deriv.abs(),
                method: Method::MonteCarlo,
                count: n,
            })
        }
    }
}

/// Exponent range for the weighted norm: the weight |x|^α relaxes the
/// power-decay constraint to γp < d + α.
fn weighted_range(f: &TestFunction, alpha: f64) -> (f64, f64) {
    match f {
        TestFunction::PowerDecay { gamma, dim, .. } => (1.0, (*dim as f64 + alpha) / gamma),
        TestFunction::Product { factors } => factors
            .iter()
            .map(|g| weighted_range(g, alpha))
            .fold((1.0, f64::INFINITY), |(a1, b1), (a2, b2)| {
                (a1.max(a2), b1.min(b2))
            }),
        TestFunction::Composed { inner, .. } => weighted_range(inner, alpha),
        _ => (1.0, f64::INFINITY),
    }
}

fn is_centered_isotropic(q: &Matrix, center: &[f64]) -> Option<f64> {
    let (vals, _) = q.sym_eigen();
    let first = vals[0];
    if vals.iter().all(|&v| (v - first).abs() <= 1e-12 * first.abs())
        && center.iter().all(|&c| c.abs() < 1e-14)
    {
        Some(first)
    } else {
        None
    }
}

pub fn weighted_norm(
    f: &TestFunction,
    p: f64,
    alpha: f64,
) -> Result<NormEstimate, NormError> {
    weighted_norm_with(f, p, alpha, true, Backend::Auto)
}

/// Norm against the measure |x|^α dx; `euclidean` selects the Euclidean
/// norm for the weight (false gives the max-norm).
pub fn weighted_norm_with(
    f: &TestFunction,
    p: f64,
    alpha: f64,
    euclidean: bool,
    backend: Backend,
) -> Result<NormEstimate, NormError> {
    if !(alpha >= 0.0) {
        return Err(NormError::Domain(format!(
            "weight exponent must be nonnegative, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return lp_norm_with(f, p, backend);
    }
    let (lo, hi) = weighted_range(f, alpha);
    if !(p >= lo) || !(p < hi) {
        return Err(NormError::Domain(format!(
            "exponent {p} outside the weighted integrability range [{lo}, {hi})"
        )));
    }
    match backend {
        Backend::Auto => {
            let d = f.dim();
            let quad_ok = d <= 3;
            if quad_ok {
                match weighted_norm_with(f, p, alpha, euclidean, Backend::Quadrature) {
                    Ok(est) => return Ok(est),
                    Err(NormError::Unsupported(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            weighted_norm_with(
                f,
                p,
                alpha,
                euclidean,
                Backend::MonteCarlo {
                    n: DEFAULT_MC_N,
                    seed: DEFAULT_MC_SEED,
                },
            )
        }
        Backend::ClosedForm => Err(NormError::Unsupported(
            "weighted norms are always measured numerically".into(),
        )),
        Backend::Quadrature => {
            let d = f.dim();
            if let Some((region, amp)) = f.indicator_region() {
                let w = region_weighted_integral(&region, alpha, euclidean, QUAD_REL);
                let value = amp * w.value.powf(1.0 / p);
                return Ok(NormEstimate {
                    value,
                    abs_error: QUAD_REL * value,
                    method: Method::Quadrature,
                    count: w.evals,
                });
            }
            if let Some((q, center, amp)) = as_quadratic(f) {
                if !euclidean {
                    return Err(NormError::Unsupported(
                        "max-norm weighted Gaussians use the Monte Carlo backend".into(),
                    ));
                }
                if let Some(lambda) = is_centered_isotropic(&q, &center) {
                    // radial reduction: S_d ∫ e^{-pλr²} r^{α+d-1} dr
                    let hw = (40.0 / (p * lambda)).sqrt();
                    let r = adaptive_quad_rel(
                        |t| (-p * lambda * t * t).exp() * t.powf(alpha + d as f64 - 1.0),
                        0.0,
                        hw,
                        1e-12,
                    );
                    let integral = sphere_area(d)? * r.value;
                    let value = amp * integral.powf(1.0 / p);
                    return Ok(NormEstimate {
                        value,
                        abs_error: 1e-10 * value,
                        method: Method::Quadrature,
                        count: r.evals,
                    });
                }
                if d <= 2 {
                    // rotate to the eigenbasis (the Euclidean weight is
                    // rotation invariant) and integrate the separable
                    // Gaussian against the radial weight
                    const K2: f64 = 40.0;
                    let (vals, _) = q.sym_eigen();
                    if vals.iter().any(|&v| !(v > 0.0)) {
                        return Err(NormError::Domain(
                            "quadratic form is not positive definite".into(),
                        ));
                    }
                    if center.iter().any(|&c| c.abs() > 1e-14) {
                        return Err(NormError::Unsupported(
                            "weighted quadrature requires a centered Gaussian".into(),
                        ));
                    }
                    let integral = if d == 1 {
                        let hw = (K2 / (p * vals[0])).sqrt();
                        adaptive_quad_rel(
                            |u| (-p * vals[0] * u * u).exp() * u.abs().powf(alpha),
                            -hw,
                            hw,
                            1e-11,
                        )
                    } else {
                        let hw0 = (K2 / (p * vals[0])).sqrt();
                        let hw1 = (K2 / (p * vals[1])).sqrt();
                        let l0 = vals[0];
                        let l1 = vals[1];
                        adaptive_quad_rel(
                            |u1| {
                                adaptive_quad_rel(
                                    |u0| {
                                        let r2 = u0 * u0 + u1 * u1;
                                        (-p * (l0 * u0 * u0 + l1 * u1 * u1)).exp()
                                            * r2.powf(0.5 * alpha)
                                    },
                                    -hw0,
                                    hw0,
                                    1e-10,
                                )
                                .value
                            },
                            -hw1,
                            hw1,
                            1e-9,
                        )
                    };
                    let value = amp * integral.value.powf(1.0 / p);
                    return Ok(NormEstimate {
                        value,
                        abs_error: 1e-8 * value,
                        method: Method::Quadrature,
                        count: integral.evals,
                    });
                }
                return Err(NormError::Unsupported(
                    "anisotropic weighted Gaussian quadrature is limited to d <= 2".into(),
                ));
            }
            if let TestFunction::PowerDecay {
                gamma,
                radius,
                dim,
                amplitude,
            } = f
            {
                if !euclidean {
                    return Err(NormError::Unsupported(
                        "max-norm weighted power laws use the Monte Carlo backend".into(),
                    ));
                }
                let dd = *dim as f64;
                let e = dd - 1.0 + alpha - gamma * p;
                let r = adaptive_quad_power_endpoint(|_| 1.0, e, *radius, 1e-12);
                let integral = sphere_area(*dim)? * r.value;
                let value = amplitude * integral.powf(1.0 / p);
                return Ok(NormEstimate {
                    value,
                    abs_error: 1e-10 * value,
                    method: Method::Quadrature,
                    count: r.evals,
                });
            }
            Err(NormError::Unsupported(
                "no weighted quadrature path for this function kind".into(),
            ))
        }
        Backend::MonteCarlo { n, seed } => {
            let bbox = f.support_box(p)?;
            let weight = move |x: &[f64]| -> f64 {
                if euclidean {
                    x.iter().map(|v| v * v).sum::<f64>().powf(0.5 * alpha)
                } else {
                    x.iter().fold(0.0_f64, |m, v| m.max(v.abs())).powf(alpha)
                }
            };
            let out = mc_integral(
                |x| f.eval(x).abs().powf(p) * weight(x),
                &bbox,
                n,
                seed,
            );
            let value = out.value.max(0.0).powf(1.0 / p);
            let deriv = if out.value > 0.0 {
                value / out.value / p
            } else {
                0.0
            };
            Ok(NormEstimate {
                value,
                abs_error: 3.0 * out.std_error * deriv.abs(),
                method: Method::MonteCarlo,
                count: n,
            })
        }
    }
}

pub fn mixed_norm(f: &TestFunction, pm: &MixedExponent) -> Result<NormEstimate, NormError> {
    mixed_norm_with(f, pm, Backend::Auto)
}

pub fn mixed_norm_with(
    f: &TestFunction,
    pm: &MixedExponent,
    backend: Backend,
) -> Result<NormEstimate, NormError> {
    if pm.dim() != f.dim() {
        return Err(NormError::Domain(format!(
            "exponent blocks cover dimension {} but the function has dimension {}",
            pm.dim(),
            f.dim()
        )));
    }
    for &p in pm.exponents() {
        check_exponent(f, p)?;
    }
    match backend {
        Backend::Auto => {
            if let Ok(est) = mixed_norm_with(f, pm, Backend::ClosedForm) {
                return Ok(est);
            }
            if f.dim() <= 3 {
                match mixed_norm_with(f, pm, Backend::Quadrature) {
                    Ok(est) => return Ok(est),
                    Err(NormError::Unsupported(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            mixed_norm_with(
                f,
                pm,
                Backend::MonteCarlo {
                    n: DEFAULT_MC_N,
                    seed: DEFAULT_MC_SEED,
                },
            )
        }
        Backend::ClosedForm => {
            if let Some(p) = pm.all_equal() {
                return lp_norm_with(f, p, Backend::ClosedForm);
            }
            // the factorization formula: per-block closed forms
            if let Some(blocks) = f.split_blocks(pm.block_dims()) {
                let mut value = 1.0;
                let mut have_all = true;
                for (g, &p) in blocks.iter().zip(pm.exponents()) {
                    match g.lp_closed_form(p) {
                        Some(v) => value *= v,
                        None => {
                            have_all = false;
                            break;
                        }
                    }
                }
                if have_all {
                    return Ok(NormEstimate {
                        value,
                        abs_error: 0.0,
                        method: Method::ClosedForm,
                        count: 0,
                    });
                }
            }
            // axis-aligned ellipsoid indicators have the recurrence formula,
            // independent of the center
            if let TestFunction::EllipsoidIndicator {
                ellipsoid,
                amplitude,
            } = f
            {
                let value = amplitude
                    * theta_scaled(&pm.expand(), &ellipsoid.semi_axes, ellipsoid.radius)?;
                return Ok(NormEstimate {
                    value,
                    abs_error: 0.0,
                    method: Method::ClosedForm,
                    count: 0,
                });
            }
            Err(NormError::Unsupported(
                "no closed-form mixed norm for this function".into(),
            ))
        }
        Backend::Quadrature => {
            if let Some((region, amp)) = f.indicator_region() {
                let r = region_mixed_norm(&region, &pm.expand(), QUAD_REL);
                let value = amp * r.value;
                return Ok(NormEstimate {
                    value,
                    abs_error: QUAD_REL * value,
                    method: Method::Quadrature,
                    count: r.evals,
                });
            }
            if let Some(blocks) = f.split_blocks(pm.block_dims()) {
                let mut value = 1.0;
                let mut rel = 0.0;
                let mut count = 0;
                for (g, &p) in blocks.iter().zip(pm.exponents()) {
                    let est = lp_norm_with(g, p, Backend::Quadrature)?;
                    rel += if est.value > 0.0 {
                        est.abs_error / est.value
                    } else {
                        0.0
                    };
                    value *= est.value;
                    count += est.count;
                }
                return Ok(NormEstimate {
                    value,
                    abs_error: rel * value,
                    method: Method::Quadrature,
                    count,
                });
            }
            if f.dim() <= 3 {
                let bbox = f.support_box(pm.exponents()[0])?;
                let fr = |x: &[f64]| f.eval(x);
                let r = nested_mixed_norm(&fr, &bbox, &pm.expand(), 1e-8);
                return Ok(NormEstimate {
                    value: r.value,
                    abs_error: 1e-7 * r.value,
                    method: Method::Quadrature,
                    count: r.evals,
                });
            }
            Err(NormError::Unsupported(
                "mixed quadrature is limited to d <= 3 for non-factorable functions".into(),
            ))
        }
        Backend::MonteCarlo { n, seed } => {
            if let Some((region, amp)) = f.indicator_region() {
                let out = mc_region_mixed(&region, &pm.expand(), n, seed)?;
                return Ok(NormEstimate {
                    value: amp * out.value,
                    abs_error: 3.0 * amp * out.std_error,
                    method: Method::MonteCarlo,
                    count: n,
                });
            }
            if let Some(blocks) = f.split_blocks(pm.block_dims()) {
                let mut value = 1.0;
                let mut rel = 0.0;
                for (i, (g, &p)) in blocks.iter().zip(pm.exponents()).enumerate() {
                    let est =
                        lp_norm_with(g, p, Backend::MonteCarlo { n, seed: seed + i as u64 })?;
                    rel += if est.value > 0.0 {
                        est.abs_error / est.value
                    } else {
                        0.0
                    };
                    value *= est.value;
                }
                return Ok(NormEstimate {
                    value,
                    abs_error: rel * value,
                    method: Method::MonteCarlo,
                    count: n,
                });
            }
            Err(NormError::Unsupported(
                "Monte Carlo mixed norms need an indicator or factorable input".into(),
            ))
        }
    }
}

/// sup over the weight's support (intersected with the declared
/// integrability range) of |f|_p / ψ(p).
///
/// Indicator norms are measured once as a volume and reused across the whole
/// exponent sweep.
pub fn gls_norm(
    f: &TestFunction,
    psi: &PsiFunction,
    cfg: &SupConfig,
) -> Result<NormEstimate, NormError> {
    let (fa, fb) = f.integrability_range();
    let (pa, pb) = psi.support();
    let lo = fa.max(pa);
    let hi = fb.min(pb);
    if !(lo < hi) {
        return Err(NormError::Domain(format!(
            "weight support ({pa}, {pb}) does not meet the integrability range ({fa}, {fb})"
        )));
    }

    enum NormEval {
        IndicatorVolume { vol: f64, amp: f64, err: f64 },
        Closed,
        Numeric,
    }
    let strategy = if let Some((region, amp)) = f.indicator_region() {
        if let Some(v) = f.lp_closed_form(1.0) {
            // closed volume: |f|_1 = amp * vol
            NormEval::IndicatorVolume {
                vol: v / amp,
                amp,
                err: 0.0,
            }
        } else {
            let r = region_volume(&region, QUAD_REL);
            NormEval::IndicatorVolume {
                vol: r.value,
                amp,
                err: r.abs_error,
            }
        }
    } else if f.lp_closed_form((lo + hi.min(lo * 2.0 + 2.0)) / 2.0).is_some() {
        NormEval::Closed
    } else {
        NormEval::Numeric
    };

    let mut rel_err: f64 = 0.0;
    let mut method = Method::ClosedForm;
    let norm_at = |p: f64| -> f64 {
        match &strategy {
            NormEval::IndicatorVolume { vol, amp, .. } => amp * vol.powf(1.0 / p),
            NormEval::Closed => f.lp_closed_form(p).unwrap_or(f64::NAN),
            NormEval::Numeric => lp_norm(f, p).map(|e| e.value).unwrap_or(f64::NAN),
        }
    };
    match &strategy {
        NormEval::IndicatorVolume { vol, err, .. } => {
            if *err > 0.0 {
                rel_err = err / vol;
                method = Method::Quadrature;
            }
        }
        NormEval::Closed => {}
        NormEval::Numeric => {
            rel_err = 1e-8;
            method = Method::Quadrature;
        }
    }

    let out = sup_scalar(
        |p| {
            let w = psi.eval(p);
            if !w.is_finite() || w <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let n = norm_at(p);
            if n.is_finite() {
                n / w
            } else {
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        cfg,
    );
    Ok(NormEstimate {
        value: out.value,
        abs_error: rel_err * out.value,
        method,
        count: 0,
    })
}

/// sup over the exponent rectangle of |f|_{p⃗} / ψ(p⃗). Factorable weights
/// over factorable functions decompose into per-block one-dimensional
/// problems; joint weights fall back to a grid sup over mixed norms.
pub fn agls_norm(
    f: &TestFunction,
    psi: &PsiMulti,
    block_dims: &[usize],
    cfg: &SupConfig,
) -> Result<NormEstimate, NormError> {
    if psi.coords() != block_dims.len() {
        return Err(NormError::Domain(format!(
            "weight has {} coordinates but {} blocks were given",
            psi.coords(),
            block_dims.len()
        )));
    }
    if block_dims.iter().sum::<usize>() != f.dim() {
        return Err(NormError::Domain(
            "block dimensions do not cover the function's dimension".into(),
        ));
    }
    if let PsiMulti::Factorable(factors) = psi {
        if let Some(blocks) = f.split_blocks(block_dims) {
            let mut value = 1.0;
            let mut rel = 0.0;
            let mut method = Method::ClosedForm;
            for (g, w) in blocks.iter().zip(factors.iter()) {
                let est = gls_norm(g, w, cfg)?;
                value *= est.value;
                if est.value > 0.0 {
                    rel += est.abs_error / est.value;
                }
                if est.method != Method::ClosedForm {
                    method = est.method;
                }
            }
            return Ok(NormEstimate {
                value,
                abs_error: rel * value,
                method,
                count: 0,
            });
        }
    }
    let domain = psi.domain();
    if domain.len() > 3 {
        return Err(NormError::Unsupported(
            "joint anisotropic sup is limited to 3 exponent coordinates".into(),
        ));
    }
    let out = sup_vector(
        |p| {
            let w = psi.eval(p);
            if !w.is_finite() || w <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let pm = match MixedExponent::new(p.to_vec(), block_dims.to_vec()) {
                Ok(pm) => pm,
                Err(_) => return f64::NEG_INFINITY,
            };
            match mixed_norm(f, &pm) {
                Ok(est) => est.value / w,
                Err(_) => f64::NEG_INFINITY,
            }
        },
        &domain,
        cfg,
    );
    Ok(NormEstimate {
        value: out.value,
        abs_error: 1e-6 * out.value,
        method: Method::Quadrature,
        count: 0,
    })
}

/// A solid region for the Monte Carlo oracle.
#[derive(Debug, Clone)]
pub enum RegionSolid {
    Ellipsoid(Ellipsoid),
    Parallelepiped(Parallelepiped),
}

impl RegionSolid {
    pub fn to_region(&self) -> Region {
        match self {
            RegionSolid::Ellipsoid(e) => Region::from_ellipsoid(e),
            RegionSolid::Parallelepiped(b) => Region::from_box(b),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RegionSolid::Ellipsoid(e) => e.dim(),
            RegionSolid::Parallelepiped(b) => b.dim(),
        }
    }
}

/// Seeded Monte Carlo estimate of the mixed norm of a region's indicator,
/// with a 3σ error bound. Requires n ≥ 10⁴.
pub fn mc_region_norm(
    region: &RegionSolid,
    pm: &MixedExponent,
    n: u64,
    seed: u64,
) -> Result<NormEstimate, NormError> {
    if n < 10_000 {
        return Err(NormError::Domain(format!(
            "need at least 10^4 samples, got {n}"
        )));
    }
    if pm.dim() != region.dim() {
        return Err(NormError::Domain(format!(
            "exponent blocks cover dimension {} but the region has dimension {}",
            pm.dim(),
            region.dim()
        )));
    }
    let out = mc_region_mixed(&region.to_region(), &pm.expand(), n, seed)?;
    Ok(NormEstimate {
        value: out.value,
        abs_error: 3.0 * out.std_error,
        method: Method::MonteCarlo,
        count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::RealPos;
    use crate::psi::natural_psi;

    fn cfg() -> SupConfig {
        SupConfig::default()
    }

    #[test]
    fn lp_norm_examples() {
        // box of volume 16 at p = 4
        let rect = Parallelepiped::new(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
        let f = TestFunction::box_indicator(rect);
        let est = lp_norm(&f, 4.0).unwrap();
        assert!((est.value - 2.0).abs() < 1e-14);

        // Gaussian at p = 2
        let g = TestFunction::gaussian(vec![0.0], vec![1.0]).unwrap();
        let est = lp_norm(&g, 2.0).unwrap();
        let want = (std::f64::consts::PI / 2.0).powf(0.25);
        assert!((est.value - want).abs() < 1e-13);

        // quadrature route agrees with the closed form
        let est_q = lp_norm_with(&g, 2.0, Backend::Quadrature).unwrap();
        assert!((est_q.value - want).abs() < 1e-9);

        // unit disk at p = 2: area^(1/2) = sqrt(pi)
        let disk =
            TestFunction::ellipsoid_indicator(Ellipsoid::centered(vec![1.0, 1.0], 1.0).unwrap());
        let est = lp_norm(&disk, 2.0).unwrap();
        assert!((est.value - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn lp_out_of_range_rejected() {
        let f = TestFunction::power_decay(0.5, 1.0, 1).unwrap();
        // range is [1, 2)
        assert!(lp_norm(&f, 2.0).is_err());
        assert!(lp_norm(&f, 1.5).is_ok());
    }

    #[test]
    fn lp_scaling_is_homogeneous() {
        let g = TestFunction::gaussian(vec![0.5], vec![2.0]).unwrap();
        let c = 3.25;
        let scaled = g.clone().scaled(c);
        for p in [1.0, 2.0, 7.5] {
            let a = lp_norm(&g, p).unwrap().value;
            let b = lp_norm(&scaled, p).unwrap().value;
            assert!((b - c * a).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn weighted_norm_examples() {
        // alpha = 0 reduces to lp
        let g = TestFunction::gaussian(vec![0.0], vec![1.0]).unwrap();
        let a = weighted_norm(&g, 2.0, 0.0).unwrap().value;
        let b = lp_norm(&g, 2.0).unwrap().value;
        assert_eq!(a, b);

        // indicator of [0,1], p = 1, alpha = 1: ∫_0^1 x dx = 1/2
        let f = TestFunction::box_indicator(
            Parallelepiped::new(vec![0.0], vec![1.0]).unwrap(),
        );
        let est = weighted_norm(&f, 1.0, 1.0).unwrap();
        assert!((est.value - 0.5).abs() < 1e-9, "got {}", est.value);

        // unit disk, p = 2, alpha = 2: (∫ r² dA)^(1/2) = sqrt(π/2)
        let disk =
            TestFunction::ellipsoid_indicator(Ellipsoid::centered(vec![1.0, 1.0], 1.0).unwrap());
        let est = weighted_norm(&disk, 2.0, 2.0).unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!((est.value - want).abs() < 1e-7, "got {}", est.value);
    }

    #[test]
    fn weighted_isotropic_gaussian_radial_vs_mc() {
        let g = TestFunction::gaussian(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let quad = weighted_norm(&g, 2.0, 1.0).unwrap();
        let mc = weighted_norm_with(
            &g,
            2.0,
            1.0,
            true,
            Backend::MonteCarlo {
                n: 400_000,
                seed: 11,
            },
        )
        .unwrap();
        assert!(
            (quad.value - mc.value).abs() <= mc.abs_error,
            "quad {} vs mc {} ± {}",
            quad.value,
            mc.value,
            mc.abs_error
        );
    }

    #[test]
    fn mixed_norm_factorization() {
        // box (4, 9) at p = (2, 2): 4^(1/2) · 9^(1/2) = 6
        let f = TestFunction::box_indicator(
            Parallelepiped::new(vec![0.0, 0.0], vec![4.0, 9.0]).unwrap(),
        );
        let pm = MixedExponent::per_coordinate(vec![2.0, 2.0]).unwrap();
        let est = mixed_norm(&f, &pm).unwrap();
        assert!((est.value - 6.0).abs() < 1e-13);

        // factorable two-block Gaussian
        let g1 = TestFunction::gaussian(vec![0.0], vec![1.0]).unwrap();
        let g2 = TestFunction::gaussian(vec![0.0], vec![2.0]).unwrap();
        let f = TestFunction::product(vec![g1.clone(), g2.clone()]).unwrap();
        let pm = MixedExponent::per_coordinate(vec![1.5, 3.0]).unwrap();
        let est = mixed_norm(&f, &pm).unwrap();
        let want =
            g1.lp_closed_form(1.5).unwrap() * g2.lp_closed_form(3.0).unwrap();
        assert!((est.value - want).abs() < 1e-13 * want);
    }

    #[test]
    fn mixed_norm_diagonal_consistency() {
        // |f|_{p,p} = |f|_p on the ellipse, closed form vs quadrature
        let e = Ellipsoid::centered(vec![2.0, 0.5], 1.0).unwrap();
        let f = TestFunction::ellipsoid_indicator(e);
        let p = 2.5;
        let pm = MixedExponent::per_coordinate(vec![p, p]).unwrap();
        let mixed = mixed_norm(&f, &pm).unwrap().value;
        let plain = lp_norm(&f, p).unwrap().value;
        assert!((mixed - plain).abs() <= 1e-10 * plain);
        let quad = mixed_norm_with(&f, &pm, Backend::Quadrature).unwrap().value;
        assert!((quad - plain).abs() <= 1e-6 * plain);
    }

    #[test]
    fn gls_norm_of_natural_weight_is_one() {
        let rect = Parallelepiped::new(vec![0.0], vec![16.0]).unwrap();
        let f = TestFunction::box_indicator(rect);
        let samples: Vec<(f64, f64)> = [1.2, 2.0, 4.0, 8.0]
            .iter()
            .map(|&p| (p, lp_norm(&f, p).unwrap().value))
            .collect();
        let psi = natural_psi(&samples).unwrap();
        let est = gls_norm(&f, &psi, &cfg()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "got {}", est.value);
    }

    #[test]
    fn gls_norm_matches_fundamental_for_indicators() {
        use crate::fundamental::fundamental_gls;
        let rect = Parallelepiped::new(vec![0.0], vec![0.25]).unwrap();
        let f = TestFunction::box_indicator(rect);
        let psi = PsiFunction::power(RealPos::new(1.0).unwrap(), 1.1, 10.0).unwrap();
        let est = gls_norm(&f, &psi, &cfg()).unwrap();
        let expect = fundamental_gls(&psi, 0.25, &cfg());
        assert!(
            (est.value - expect).abs() <= 1e-9 * expect,
            "{} vs {expect}",
            est.value
        );
    }

    #[test]
    fn gls_norm_constant_ratio() {
        // |f|_p = ψ(p)/2 pointwise gives a sup of exactly 1/2
        let rect = Parallelepiped::new(vec![0.0], vec![16.0]).unwrap();
        let f = TestFunction::box_indicator(rect);
        let samples: Vec<(f64, f64)> = [1.2, 2.0, 4.0, 8.0]
            .iter()
            .map(|&p| (p, 2.0 * lp_norm(&f, p).unwrap().value))
            .collect();
        let psi = natural_psi(&samples).unwrap();
        let est = gls_norm(&f, &psi, &cfg()).unwrap();
        assert!((est.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn agls_factorable_equals_block_product() {
        let b1 = TestFunction::box_indicator(
            Parallelepiped::new(vec![0.0], vec![16.0]).unwrap(),
        );
        let b2 = TestFunction::box_indicator(
            Parallelepiped::new(vec![0.0], vec![4.0]).unwrap(),
        );
        let f = TestFunction::product(vec![b1.clone(), b2.clone()]).unwrap();
        let w1 = PsiFunction::power(RealPos::new(1.0).unwrap(), 1.1, 10.0).unwrap();
        let w2 = PsiFunction::power(RealPos::new(2.0).unwrap(), 1.1, 10.0).unwrap();
        let psi = PsiMulti::Factorable(vec![w1.clone(), w2.clone()]);
        let est = agls_norm(&f, &psi, &[1, 1], &cfg()).unwrap();
        let want =
            gls_norm(&b1, &w1, &cfg()).unwrap().value * gls_norm(&b2, &w2, &cfg()).unwrap().value;
        assert!((est.value - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn mc_region_norm_examples() {
        // unit square at (2,2): exactly 1
        let sq = RegionSolid::Parallelepiped(
            Parallelepiped::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
        );
        let pm = MixedExponent::per_coordinate(vec![2.0, 2.0]).unwrap();
        let est = mc_region_norm(&sq, &pm, 1_000_000, 31).unwrap();
        assert!((est.value - 1.0).abs() <= est.abs_error.max(1e-12));

        // unit disk at (2,2): sqrt(pi) within 3σ
        let disk =
            RegionSolid::Ellipsoid(Ellipsoid::centered(vec![1.0, 1.0], 1.0).unwrap());
        let est = mc_region_norm(&disk, &pm, 1_000_000, 32).unwrap();
        assert!(
            (est.value - std::f64::consts::PI.sqrt()).abs() <= est.abs_error,
            "{} ± {}",
            est.value,
            est.abs_error
        );

        // ellipse a=(2, 0.5) at (1,1): area = π a b = π within 3σ
        let ell = RegionSolid::Ellipsoid(
            Ellipsoid::centered(vec![2.0, 0.5], 1.0).unwrap(),
        );
        let pm1 = MixedExponent::per_coordinate(vec![1.0, 1.0]).unwrap();
        let est = mc_region_norm(&ell, &pm1, 1_000_000, 33).unwrap();
        assert!((est.value - std::f64::consts::PI).abs() <= est.abs_error);

        // n too small is rejected
        assert!(mc_region_norm(&sq, &pm, 100, 1).is_err());
    }
}
