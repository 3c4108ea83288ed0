//! The closed family of test functions the norm engines understand:
//! factorable Gaussians, quadratic-form Gaussians (the image of a Gaussian
//! under a linear map), box and ellipsoid indicators, truncated power laws,
//! block products, and linear compositions f(A·).

use crate::fundamental::{Ellipsoid, Parallelepiped};
use crate::linalg::Matrix;
use crate::mathcore::ball_volume;

use super::quad::Region;
use super::NormError;

fn ball_vol(d: usize) -> f64 {
    ball_volume(d).expect("d >= 1")
}

#[derive(Debug, Clone)]
pub enum TestFunction {
    /// amplitude · ∏ exp(−((x_i − c_i)/s_i)²)
    Gaussian {
        centers: Vec<f64>,
        scales: Vec<f64>,
        amplitude: f64,
    },
    /// amplitude · exp(−(x − c)ᵀ Q (x − c)), Q symmetric positive definite
    GaussianQuadratic {
        q: Matrix,
        center: Vec<f64>,
        amplitude: f64,
    },
    /// amplitude · I_box
    BoxIndicator {
        rect: Parallelepiped,
        amplitude: f64,
    },
    /// amplitude · I_ellipsoid
    EllipsoidIndicator {
        ellipsoid: Ellipsoid,
        amplitude: f64,
    },
    /// amplitude · |x|^(−γ) on |x| ≤ R, zero outside; in L_p exactly for
    /// γ·p < d, which bounds the declared exponent range
    PowerDecay {
        gamma: f64,
        radius: f64,
        dim: usize,
        amplitude: f64,
    },
    /// Product of independent factors on consecutive coordinate blocks.
    Product { factors: Vec<TestFunction> },
    /// x ↦ inner(A x).
    Composed {
        matrix: Matrix,
        inner: Box<TestFunction>,
    },
}

impl TestFunction {
    pub fn gaussian(centers: Vec<f64>, scales: Vec<f64>) -> Result<Self, NormError> {
        if centers.len() != scales.len() || centers.is_empty() {
            return Err(NormError::Domain("centers/scales length mismatch".into()));
        }
        if scales.iter().any(|&s| !(s > 0.0)) {
            return Err(NormError::Domain("scales must be positive".into()));
        }
        Ok(TestFunction::Gaussian {
            centers,
            scales,
            amplitude: 1.0,
        })
    }

    pub fn box_indicator(rect: Parallelepiped) -> Self {
        TestFunction::BoxIndicator {
            rect,
            amplitude: 1.0,
        }
    }

    pub fn ellipsoid_indicator(ellipsoid: Ellipsoid) -> Self {
        TestFunction::EllipsoidIndicator {
            ellipsoid,
            amplitude: 1.0,
        }
    }

    pub fn power_decay(gamma: f64, radius: f64, dim: usize) -> Result<Self, NormError> {
        if !(gamma > 0.0) || !(radius > 0.0) || dim == 0 {
            return Err(NormError::Domain(
                "power decay needs gamma > 0, radius > 0, dim >= 1".into(),
            ));
        }
        Ok(TestFunction::PowerDecay {
            gamma,
            radius,
            dim,
            amplitude: 1.0,
        })
    }

    pub fn product(factors: Vec<TestFunction>) -> Result<Self, NormError> {
        if factors.is_empty() {
            return Err(NormError::Domain("empty product".into()));
        }
        Ok(TestFunction::Product { factors })
    }

    pub fn scaled(self, c: f64) -> Self {
        match self {
            TestFunction::Gaussian {
                centers,
                scales,
                amplitude,
            } => TestFunction::Gaussian {
                centers,
                scales,
                amplitude: amplitude * c,
            },
            TestFunction::GaussianQuadratic {
                q,
                center,
                amplitude,
            } => TestFunction::GaussianQuadratic {
                q,
                center,
                amplitude: amplitude * c,
            },
            TestFunction::BoxIndicator { rect, amplitude } => TestFunction::BoxIndicator {
                rect,
                amplitude: amplitude * c,
            },
            TestFunction::EllipsoidIndicator {
                ellipsoid,
                amplitude,
            } => TestFunction::EllipsoidIndicator {
                ellipsoid,
                amplitude: amplitude * c,
            },
            TestFunction::PowerDecay {
                gamma,
                radius,
                dim,
                amplitude,
            } => TestFunction::PowerDecay {
                gamma,
                radius,
                dim,
                amplitude: amplitude * c,
            },
            TestFunction::Product { mut factors } => {
                let first = factors.remove(0).scaled(c);
                factors.insert(0, first);
                TestFunction::Product { factors }
            }
            TestFunction::Composed { matrix, inner } => TestFunction::Composed {
                matrix,
                inner: Box::new(inner.scaled(c)),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Gaussian { centers, .. } => centers.len(),
            TestFunction::GaussianQuadratic { q, .. } => q.dim(),
            TestFunction::BoxIndicator { rect, .. } => rect.dim(),
            TestFunction::EllipsoidIndicator { ellipsoid, .. } => ellipsoid.dim(),
            TestFunction::PowerDecay { dim, .. } => *dim,
            TestFunction::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            TestFunction::Composed { inner, .. } => inner.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Gaussian {
                centers,
                scales,
                amplitude,
            } => {
                let mut e = 0.0;
                for i in 0..centers.len() {
                    let t = (x[i] - centers[i]) / scales[i];
                    e += t * t;
                }
                amplitude * (-e).exp()
            }
            TestFunction::GaussianQuadratic {
                q,
                center,
                amplitude,
            } => {
                let d = q.dim();
                let mut form = 0.0;
                for i in 0..d {
                    let xi = x[i] - center[i];
                    for j in 0..d {
                        form += xi * q.get(i, j) * (x[j] - center[j]);
                    }
                }
                amplitude * (-form).exp()
            }
            TestFunction::BoxIndicator { rect, amplitude } => {
                if rect.contains(x) {
                    *amplitude
                } else {
                    0.0
                }
            }
            TestFunction::EllipsoidIndicator {
                ellipsoid,
                amplitude,
            } => {
                if ellipsoid.contains(x) {
                    *amplitude
                } else {
                    0.0
                }
            }
            TestFunction::PowerDecay {
                gamma,
                radius,
                amplitude,
                ..
            } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r > *radius {
                    0.0
                } else if r == 0.0 {
                    f64::INFINITY
                } else {
                    amplitude * r.powf(-gamma)
                }
            }
            TestFunction::Product { factors } => {
                let mut off = 0;
                let mut prod = 1.0;
                for f in factors {
                    let d = f.dim();
                    prod *= f.eval(&x[off..off + d]);
                    off += d;
                }
                prod
            }
            TestFunction::Composed { matrix, inner } => inner.eval(&matrix.matvec(x)),
        }
    }

    /// Open interval of exponents p for which the function is declared to
    /// lie in L_p.
    pub fn integrability_range(&self) -> (f64, f64) {
        match self {
            TestFunction::PowerDecay { gamma, dim, .. } => (1.0, *dim as f64 / gamma),
            TestFunction::Product { factors } => factors
                .iter()
                .map(|f| f.integrability_range())
                .fold((1.0, f64::INFINITY), |(a1, b1), (a2, b2)| {
                    (a1.max(a2), b1.min(b2))
                }),
            TestFunction::Composed { inner, .. } => inner.integrability_range(),
            _ => (1.0, f64::INFINITY),
        }
    }

    /// Exact L_p norm, when the family admits one. Compositions f(A·)
    /// intentionally have none: their norms are measured, not derived.
    pub fn lp_closed_form(&self, p: f64) -> Option<f64> {
        match self {
            TestFunction::Gaussian {
                scales, amplitude, ..
            } => {
                // |f|_p^p = amp^p ∏ s_i sqrt(π/p)
                let ln_pp: f64 = scales
                    .iter()
                    .map(|s| s.ln() + 0.5 * (std::f64::consts::PI / p).ln())
                    .sum();
                Some(amplitude * (ln_pp / p).exp())
            }
            TestFunction::GaussianQuadratic { q, amplitude, .. } => {
                let d = q.dim() as f64;
                let det = q.determinant().ok()?;
                if det <= 0.0 {
                    return None;
                }
                let ln_pp = 0.5 * d * (std::f64::consts::PI / p).ln() - 0.5 * det.ln();
                Some(amplitude * (ln_pp / p).exp())
            }
            TestFunction::BoxIndicator { rect, amplitude } => {
                Some(amplitude * rect.volume().powf(1.0 / p))
            }
            TestFunction::EllipsoidIndicator {
                ellipsoid,
                amplitude,
            } => Some(amplitude * ellipsoid.volume().ok()?.powf(1.0 / p)),
            TestFunction::PowerDecay {
                gamma,
                radius,
                dim,
                amplitude,
            } => {
                let d = *dim as f64;
                if gamma * p >= d {
                    return None;
                }
                let surface = d * ball_vol(*dim);
                let integral = surface * radius.powf(d - gamma * p) / (d - gamma * p);
                Some(amplitude * integral.powf(1.0 / p))
            }
            TestFunction::Product { factors } => {
                let mut prod = 1.0;
                for f in factors {
                    prod *= f.lp_closed_form(p)?;
                }
                Some(prod)
            }
            TestFunction::Composed { .. } => None,
        }
    }

    /// Indicator functions expose their support region and level amplitude,
    /// which lets norm engines measure the volume once and reuse it across
    /// exponents.
    pub fn indicator_region(&self) -> Option<(Region, f64)> {
        match self {
            TestFunction::BoxIndicator { rect, amplitude } => {
                Some((Region::from_box(rect), *amplitude))
            }
            TestFunction::EllipsoidIndicator {
                ellipsoid,
                amplitude,
            } => Some((Region::from_ellipsoid(ellipsoid), *amplitude)),
            TestFunction::Product { factors } => {
                let mut parts = Vec::with_capacity(factors.len());
                let mut amp = 1.0;
                for f in factors {
                    let (r, a) = f.indicator_region()?;
                    parts.push(r);
                    amp *= a;
                }
                Some((Region::product(&parts).ok()?, amp))
            }
            TestFunction::Composed { matrix, inner } => {
                let (r, a) = inner.indicator_region()?;
                Some((r.preimage(matrix).ok()?, a))
            }
            _ => None,
        }
    }

    /// A box outside which |f|^p contributes less than ~1e-16 of the total
    /// (level-set containment for Gaussians, exact support for the rest).
    pub fn support_box(&self, p: f64) -> Result<Vec<(f64, f64)>, NormError> {
        // e^(-k²) with k² = 40 is ~4e-18
        const K2: f64 = 40.0;
        match self {
            TestFunction::Gaussian {
                centers, scales, ..
            } => Ok(centers
                .iter()
                .zip(scales.iter())
                .map(|(&c, &s)| {
                    let hw = s * (K2 / p).sqrt();
                    (c - hw, c + hw)
                })
                .collect()),
            TestFunction::GaussianQuadratic { q, center, .. } => {
                let inv = q
                    .inverse()
                    .map_err(|e| NormError::Domain(format!("quadratic form not invertible: {e}")))?;
                Ok(center
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        let hw = (inv.get(i, i).max(0.0) * K2 / p).sqrt();
                        (c - hw, c + hw)
                    })
                    .collect())
            }
            TestFunction::BoxIndicator { rect, .. } => Ok(rect
                .origin
                .iter()
                .zip(rect.sides.iter())
                .map(|(&o, &s)| (o, o + s))
                .collect()),
            TestFunction::EllipsoidIndicator { ellipsoid, .. } => Ok(ellipsoid
                .center
                .iter()
                .zip(ellipsoid.semi_axes.iter())
                .map(|(&c, &a)| {
                    let hw = a * ellipsoid.radius;
                    (c - hw, c + hw)
                })
                .collect()),
            TestFunction::PowerDecay { radius, dim, .. } => {
                let r = *radius;
                Ok(vec![(-r, r); *dim])
            }
            TestFunction::Product { factors } => {
                let mut out = Vec::with_capacity(self.dim());
                for f in factors {
                    out.extend(f.support_box(p)?);
                }
                Ok(out)
            }
            TestFunction::Composed { matrix, inner } => {
                let inner_box = inner.support_box(p)?;
                let inv = matrix.inverse().map_err(|e| {
                    NormError::Domain(format!("composition matrix not invertible: {e}"))
                })?;
                let d = matrix.dim();
                let mut out = Vec::with_capacity(d);
                for i in 0..d {
                    let mut c = 0.0;
                    let mut hw = 0.0;
                    for j in 0..d {
                        let (lo, hi) = inner_box[j];
                        c += inv.get(i, j) * 0.5 * (lo + hi);
                        hw += inv.get(i, j).abs() * 0.5 * (hi - lo);
                    }
                    out.push((c - hw, c + hw));
                }
                Ok(out)
            }
        }
    }

    /// Split into per-block factors when the function factors over the given
    /// block dimensions (used by the mixed-norm factorization path).
    pub fn split_blocks(&self, block_dims: &[usize]) -> Option<Vec<TestFunction>> {
        if block_dims.len() == 1 && block_dims[0] == self.dim() {
            return Some(vec![self.clone()]);
        }
        match self {
            TestFunction::Product { factors } => {
                // factors must line up with the requested blocks
                let mut out = Vec::with_capacity(block_dims.len());
                let mut iter = factors.iter();
                for &want in block_dims {
                    let f = iter.next()?;
                    if f.dim() != want {
                        return None;
                    }
                    out.push(f.clone());
                }
                if iter.next().is_some() {
                    return None;
                }
                Some(out)
            }
            TestFunction::Gaussian {
                centers,
                scales,
                amplitude,
            } => {
                let mut out = Vec::with_capacity(block_dims.len());
                let mut off = 0;
                for (k, &m) in block_dims.iter().enumerate() {
                    let amp = if k == 0 { *amplitude } else { 1.0 };
                    out.push(TestFunction::Gaussian {
                        centers: centers[off..off + m].to_vec(),
                        scales: scales[off..off + m].to_vec(),
                        amplitude: amp,
                    });
                    off += m;
                }
                if off != centers.len() {
                    return None;
                }
                Some(out)
            }
            TestFunction::BoxIndicator { rect, amplitude } => {
                let mut out = Vec::with_capacity(block_dims.len());
                let mut off = 0;
                for (k, &m) in block_dims.iter().enumerate() {
                    let amp = if k == 0 { *amplitude } else { 1.0 };
                    out.push(TestFunction::BoxIndicator {
                        rect: Parallelepiped::new(
                            rect.origin[off..off + m].to_vec(),
                            rect.sides[off..off + m].to_vec(),
                        )
                        .ok()?,
                        amplitude: amp,
                    });
                    off += m;
                }
                if off != rect.dim() {
                    return None;
                }
                Some(out)
            }
            _ => None,
        }
    }
}
