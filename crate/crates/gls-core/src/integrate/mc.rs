//! Seeded Monte Carlo engines with standard-error estimates: hit-or-miss
//! volumes, mean-value integrals, and the nested mixed norm of a region's
//! indicator. One named generator (ChaCha8) keyed by an explicit seed makes
//! every estimate reproducible bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::quad::{adaptive_quad_rel, Region};
use super::NormError;

#[derive(Debug, Clone, Copy)]
pub struct McOutcome {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_box(rng: &mut ChaCha8Rng, bbox: &[(f64, f64)], out: &mut [f64]) {
    for (slot, &(lo, hi)) in out.iter_mut().zip(bbox.iter()) {
        let u: f64 = rng.random();
        *slot = lo + (hi - lo) * u;
    }
}

fn box_volume(bbox: &[(f64, f64)]) -> f64 {
    bbox.iter().map(|&(lo, hi)| hi - lo).product()
}

/// Hit-or-miss estimate of a region's volume over its bounding box.
pub fn mc_volume(region: &Region, n: u64, seed: u64) -> McOutcome {
    let mut rng = rng_from_seed(seed);
    let bbox = region.bounding_box();
    let vol = box_volume(bbox);
    let mut point = vec![0.0; region.dim()];
    let mut hits = 0u64;
    for _ in 0..n {
        sample_box(&mut rng, bbox, &mut point);
        if region.contains(&point) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    McOutcome {
        value: vol * p,
        std_error: vol * (p * (1.0 - p) / n as f64).sqrt(),
        n,
    }
}

/// Mean-value estimate of ∫_box f.
pub fn mc_integral(
    f: impl Fn(&[f64]) -> f64,
    bbox: &[(f64, f64)],
    n: u64,
    seed: u64,
) -> McOutcome {
    let mut rng = rng_from_seed(seed);
    let vol = box_volume(bbox);
    let mut point = vec![0.0; bbox.len()];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        sample_box(&mut rng, bbox, &mut point);
        let v = f(&point);
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    McOutcome {
        value: vol * mean,
        std_error: vol * (var / n as f64).sqrt(),
        n,
    }
}

/// Monte Carlo estimate of the mixed norm of a region's indicator with one
/// exponent per coordinate.
///
/// Equal exponents reduce to a hit-or-miss volume raised to 1/p. Otherwise
/// the iterated integral is sampled on its outermost coordinate, with the
/// innermost level an exact section length and (in dimension 3) the middle
/// level a deterministic adaptive quadrature, so the only stochastic error
/// is the outer sampling and the reported standard error is honest.
pub fn mc_region_mixed(
    region: &Region,
    p_per_coord: &[f64],
    n: u64,
    seed: u64,
) -> Result<McOutcome, NormError> {
    let d = region.dim();
    if p_per_coord.len() != d {
        return Err(NormError::Domain(format!(
            "expected {d} exponents, got {}",
            p_per_coord.len()
        )));
    }
    let first = p_per_coord[0];
    if p_per_coord.iter().all(|&p| p == first) {
        let vol = mc_volume(region, n, seed);
        let value = vol.value.powf(1.0 / first);
        // delta method through v -> v^(1/p)
        let deriv = value / vol.value / first;
        return Ok(McOutcome {
            value,
            std_error: vol.std_error * deriv.abs(),
            n,
        });
    }
    match d {
        2 => {
            // N^{p2} = ∫ L(x2)^{p2/p1} dx2, L exact
            let q = p_per_coord[1] / p_per_coord[0];
            let (lo, hi) = region.bounding_box()[1];
            let mut rng = rng_from_seed(seed);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let u: f64 = rng.random();
                let x2 = lo + (hi - lo) * u;
                let l = match region.section(&[x2]) {
                    Some((a, b)) => b - a,
                    None => 0.0,
                };
                let v = l.powf(q);
                sum += v;
                sum_sq += v * v;
            }
            let w = hi - lo;
            let mean = sum / n as f64;
            let var = (sum_sq / n as f64 - mean * mean).max(0.0);
            let integral = w * mean;
            let integral_se = w * (var / n as f64).sqrt();
            let value = integral.powf(1.0 / p_per_coord[1]);
            let deriv = value / integral / p_per_coord[1];
            Ok(McOutcome {
                value,
                std_error: integral_se * deriv.abs(),
                n,
            })
        }
        3 => {
            // N^{p3} = ∫ M(x3)^{p3/p2} dx3 with M(x3) = ∫ L(x2,x3)^{p2/p1} dx2
            let q2 = p_per_coord[1] / p_per_coord[0];
            let q3 = p_per_coord[2] / p_per_coord[1];
            let (lo2, hi2) = region.bounding_box()[1];
            let (lo3, hi3) = region.bounding_box()[2];
            let mut rng = rng_from_seed(seed);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let u: f64 = rng.random();
                let x3 = lo3 + (hi3 - lo3) * u;
                let middle = adaptive_quad_rel(
                    |x2| match region.section(&[x2, x3]) {
                        Some((a, b)) => (b - a).powf(q2),
                        None => 0.0,
                    },
                    lo2,
                    hi2,
                    1e-9,
                )
                .value;
                let v = middle.powf(q3);
                sum += v;
                sum_sq += v * v;
            }
            let w = hi3 - lo3;
            let mean = sum / n as f64;
            let var = (sum_sq / n as f64 - mean * mean).max(0.0);
            let integral = w * mean;
            let integral_se = w * (var / n as f64).sqrt();
            let value = integral.powf(1.0 / p_per_coord[2]);
            let deriv = value / integral / p_per_coord[2];
            Ok(McOutcome {
                value,
                std_error: integral_se * deriv.abs(),
                n,
            })
        }
        _ => Err(NormError::Unsupported(format!(
            "mixed Monte Carlo with unequal exponents supports d in {{2, 3}}, got d = {d}"
        ))),
    }
}
