//! Fundamental functions: δ^(1/p) for Lebesgue spaces, the sup-based
//! fundamental function of a weighted exponent family, the anisotropic
//! fundamental value of ellipsoids via the Beta recurrence, boxes,
//! Cartesian-product factorization, and the anisotropic sup version.

use std::sync::Arc;

use thiserror::Error;

use crate::mathcore::{ball_volume, ln_beta, MathError};
use crate::psi::{PsiFunction, PsiTilde};
use crate::sup::{sup_scalar, sup_vector, SupConfig};

#[derive(Debug, Error)]
pub enum FundamentalError {
    #[error("invalid exponent vector: {0}")]
    Exponents(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("block mismatch: {0}")]
    Blocks(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// An exponent vector p⃗ with block dimensions m⃗; the total dimension is
/// d = Σ m_j.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedExponent {
    p: Vec<f64>,
    m: Vec<usize>,
}

impl MixedExponent {
    pub fn new(p: Vec<f64>, m: Vec<usize>) -> Result<Self, FundamentalError> {
        if p.is_empty() || p.len() != m.len() {
            return Err(FundamentalError::Exponents(format!(
                "exponent/block length mismatch: {} vs {}",
                p.len(),
                m.len()
            )));
        }
        if p.iter().any(|&x| !(x >= 1.0) || !x.is_finite()) {
            return Err(FundamentalError::Exponents(
                "all exponents must be finite and >= 1".into(),
            ));
        }
        if m.iter().any(|&x| x == 0) {
            return Err(FundamentalError::Exponents(
                "all block dimensions must be positive".into(),
            ));
        }
        Ok(Self { p, m })
    }

    /// One exponent per coordinate (all blocks one-dimensional).
    pub fn per_coordinate(p: Vec<f64>) -> Result<Self, FundamentalError> {
        let m = vec![1; p.len()];
        Self::new(p, m)
    }

    /// A single exponent over all of R^d.
    pub fn isotropic(p: f64, d: usize) -> Result<Self, FundamentalError> {
        Self::new(vec![p], vec![d])
    }

    pub fn exponents(&self) -> &[f64] {
        &self.p
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.m
    }

    pub fn blocks(&self) -> usize {
        self.p.len()
    }

    pub fn dim(&self) -> usize {
        self.m.iter().sum()
    }

    /// Expansion to one exponent per coordinate.
    pub fn expand(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for (pj, mj) in self.p.iter().zip(self.m.iter()) {
            out.extend(std::iter::repeat(*pj).take(*mj));
        }
        out
    }

    pub fn all_equal(&self) -> Option<f64> {
        let first = self.p[0];
        if self.p.iter().all(|&x| x == first) {
            Some(first)
        } else {
            None
        }
    }
}

/// Axis-aligned ellipsoid { x : Σ (x_i − c_i)²/a_i² ≤ R² }.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub semi_axes: Vec<f64>,
    pub radius: f64,
    pub center: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(semi_axes: Vec<f64>, radius: f64, center: Vec<f64>) -> Result<Self, FundamentalError> {
        if semi_axes.is_empty() || semi_axes.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(FundamentalError::Geometry(
                "semi-axes must be positive and finite".into(),
            ));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(FundamentalError::Geometry(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if center.len() != semi_axes.len() {
            return Err(FundamentalError::Geometry(
                "center and semi-axes dimension mismatch".into(),
            ));
        }
        Ok(Self {
            semi_axes,
            radius,
            center,
        })
    }

    pub fn centered(semi_axes: Vec<f64>, radius: f64) -> Result<Self, FundamentalError> {
        let d = semi_axes.len();
        Self::new(semi_axes, radius, vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.semi_axes.len()
    }

    pub fn volume(&self) -> Result<f64, FundamentalError> {
        let d = self.dim();
        Ok(ball_volume(d)?
            * self.semi_axes.iter().product::<f64>()
            * self.radius.powi(d as i32))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let mut s = 0.0;
        for i in 0..self.dim() {
            let t = (x[i] - self.center[i]) / self.semi_axes[i];
            s += t * t;
        }
        s <= self.radius * self.radius
    }
}

/// Axis-aligned box { x : o_j ≤ x_j ≤ o_j + δ_j }.
#[derive(Debug, Clone, PartialEq)]
pub struct Parallelepiped {
    pub origin: Vec<f64>,
    pub sides: Vec<f64>,
}

impl Parallelepiped {
    pub fn new(origin: Vec<f64>, sides: Vec<f64>) -> Result<Self, FundamentalError> {
        if sides.is_empty() || sides.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(FundamentalError::Geometry(
                "all side lengths must be positive and finite".into(),
            ));
        }
        if origin.len() != sides.len() {
            return Err(FundamentalError::Geometry(
                "origin and sides dimension mismatch".into(),
            ));
        }
        Ok(Self { origin, sides })
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.origin.iter().zip(self.sides.iter()))
            .all(|(&xi, (&o, &s))| xi >= o && xi <= o + s)
    }
}

/// δ^(1/p): the fundamental function of the p-th Lebesgue space.
pub fn fundamental_lp(delta: f64, p: f64) -> Result<f64, FundamentalError> {
    if !(delta >= 0.0) {
        return Err(FundamentalError::Geometry(format!(
            "measure must be nonnegative, got {delta}"
        )));
    }
    if !(p >= 1.0) {
        return Err(FundamentalError::Exponents(format!(
            "exponent must be >= 1, got {p}"
        )));
    }
    Ok(delta.powf(1.0 / p))
}

/// sup over the open support of δ^(1/p) / τ(p).
pub fn fundamental_gls(tau: &PsiFunction, delta: f64, cfg: &SupConfig) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let (a, b) = tau.support();
    let out = sup_scalar(
        |p| {
            let w = tau.eval(p);
            if w.is_finite() && w > 0.0 {
                delta.powf(1.0 / p) / w
            } else {
                f64::NEG_INFINITY
            }
        },
        a,
        b,
        cfg,
    );
    out.value
}

/// ln of the recurrence factor Z_k given the partial sum s = Σ_{i<k} 1/p_i.
fn ln_z(k: usize, p_k: f64, partial_inv_sum: f64) -> Result<f64, FundamentalError> {
    if k == 0 {
        Ok(std::f64::consts::LN_2 / p_k)
    } else {
        Ok(ln_beta(0.5, 1.0 + 0.5 * p_k * partial_inv_sum)? / p_k)
    }
}

/// ln θ^(d)(p⃗): log of the unit-ellipsoid fundamental value, accumulated in
/// log space so large d cannot underflow.
pub fn ln_theta_unit(pvec: &[f64]) -> Result<f64, FundamentalError> {
    if pvec.is_empty() {
        return Err(FundamentalError::Exponents("empty exponent vector".into()));
    }
    if pvec.iter().any(|&p| !(p >= 1.0) || !p.is_finite()) {
        return Err(FundamentalError::Exponents(
            "all exponents must be finite and >= 1".into(),
        ));
    }
    let mut ln_w = 0.0;
    let mut inv_sum = 0.0;
    for (k, &p) in pvec.iter().enumerate() {
        ln_w += ln_z(k, p, inv_sum)?;
        inv_sum += 1.0 / p;
    }
    Ok(ln_w)
}

/// θ^(d)(p⃗) = Z_1 · Z_2 · … · Z_d, the anisotropic fundamental value of the
/// centered unit ball.
pub fn theta_unit(pvec: &[f64]) -> Result<f64, FundamentalError> {
    Ok(ln_theta_unit(pvec)?.exp())
}

/// The recurrence factor Z_{d+1}(p_1, …, p_{d+1}) itself.
pub fn theta_recurrence_factor(pvec: &[f64]) -> Result<f64, FundamentalError> {
    if pvec.len() < 2 {
        return Err(FundamentalError::Exponents(
            "recurrence factor needs at least two exponents".into(),
        ));
    }
    let d = pvec.len() - 1;
    let inv_sum: f64 = pvec[..d].iter().map(|p| 1.0 / p).sum();
    Ok(ln_z(d, pvec[d], inv_sum)?.exp())
}

/// θ^(d)(p⃗) · ∏ a_i^(1/p_i) · R^(Σ 1/p_i): the anisotropic fundamental value
/// of the ellipsoid with semi-axes a⃗ scaled by R.
pub fn theta_scaled(pvec: &[f64], semi_axes: &[f64], radius: f64) -> Result<f64, FundamentalError> {
    if semi_axes.len() != pvec.len() {
        return Err(FundamentalError::Geometry(
            "semi-axes and exponents dimension mismatch".into(),
        ));
    }
    if semi_axes.iter().any(|&a| !(a > 0.0)) || !(radius > 0.0) {
        return Err(FundamentalError::Geometry(
            "semi-axes and radius must be positive".into(),
        ));
    }
    let mut ln_v = ln_theta_unit(pvec)?;
    let mut inv_sum = 0.0;
    for (a, p) in semi_axes.iter().zip(pvec.iter()) {
        ln_v += a.ln() / p;
        inv_sum += 1.0 / p;
    }
    ln_v += radius.ln() * inv_sum;
    Ok(ln_v.exp())
}

/// ∏ δ_j^(1/p_j): per-coordinate fundamental value of a box; independent of
/// the box origin.
pub fn fundamental_box(pvec: &[f64], sides: &[f64]) -> Result<f64, FundamentalError> {
    if pvec.len() != sides.len() {
        return Err(FundamentalError::Geometry(
            "sides and exponents dimension mismatch".into(),
        ));
    }
    if pvec.iter().any(|&p| !(p >= 1.0)) {
        return Err(FundamentalError::Exponents(
            "all exponents must be >= 1".into(),
        ));
    }
    if sides.iter().any(|&s| !(s > 0.0)) {
        return Err(FundamentalError::Geometry(
            "all sides must be positive".into(),
        ));
    }
    let ln_v: f64 = pvec
        .iter()
        .zip(sides.iter())
        .map(|(&p, &s)| s.ln() / p)
        .sum();
    Ok(ln_v.exp())
}

/// Product of per-block fundamental values, the factorization over a
/// Cartesian product of sets.
pub fn fundamental_product_set(block_values: &[f64]) -> f64 {
    block_values.iter().product()
}

/// One factor of a Cartesian product set, carrying its own exponent
/// coordinate. A d-dimensional box with per-coordinate exponents is a
/// product of d one-dimensional `Cuboid` blocks.
#[derive(Debug, Clone)]
pub enum SetBlock {
    Cuboid { sides: Vec<f64> },
    Ellipsoid { semi_axes: Vec<f64>, radius: f64 },
}

impl SetBlock {
    pub fn dim(&self) -> usize {
        match self {
            SetBlock::Cuboid { sides } => sides.len(),
            SetBlock::Ellipsoid { semi_axes, .. } => semi_axes.len(),
        }
    }

    /// Fundamental value of this block at a single exponent p applied to all
    /// of its coordinates.
    pub fn fundamental_at(&self, p: f64) -> Result<f64, FundamentalError> {
        match self {
            SetBlock::Cuboid { sides } => {
                fundamental_lp(sides.iter().product(), p).map_err(Into::into)
            }
            SetBlock::Ellipsoid { semi_axes, radius } => {
                let pv = vec![p; semi_axes.len()];
                theta_scaled(&pv, semi_axes, *radius)
            }
        }
    }
}

/// A Cartesian product of blocks; the exponent vector for its anisotropic
/// fundamental value has one coordinate per block.
#[derive(Debug, Clone)]
pub struct ProductSet {
    pub blocks: Vec<SetBlock>,
}

impl ProductSet {
    pub fn new(blocks: Vec<SetBlock>) -> Result<Self, FundamentalError> {
        if blocks.is_empty() {
            return Err(FundamentalError::Geometry("empty product set".into()));
        }
        Ok(Self { blocks })
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    pub fn fundamental_at(&self, pvec: &[f64]) -> Result<f64, FundamentalError> {
        if pvec.len() != self.blocks.len() {
            return Err(FundamentalError::Blocks(format!(
                "expected {} block exponents, got {}",
                self.blocks.len(),
                pvec.len()
            )));
        }
        let mut values = Vec::with_capacity(pvec.len());
        for (block, &p) in self.blocks.iter().zip(pvec.iter()) {
            values.push(block.fundamental_at(p)?);
        }
        Ok(fundamental_product_set(&values))
    }
}

type MultiEvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A weight on a rectangle of exponent vectors: either an explicit product
/// of one-dimensional weights (one per block) or a joint function with its
/// own rectangular domain.
#[derive(Clone)]
pub enum PsiMulti {
    Factorable(Vec<PsiFunction>),
    Joint {
        domain: Vec<(f64, f64)>,
        eval: MultiEvalFn,
        label: String,
    },
}

impl std::fmt::Debug for PsiMulti {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsiMulti::Factorable(fs) => f.debug_tuple("Factorable").field(fs).finish(),
            PsiMulti::Joint { domain, label, .. } => f
                .debug_struct("Joint")
                .field("domain", domain)
                .field("label", label)
                .finish(),
        }
    }
}

impl PsiMulti {
    pub fn joint(
        label: impl Into<String>,
        domain: Vec<(f64, f64)>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, FundamentalError> {
        if domain.is_empty() || domain.iter().any(|&(a, b)| !(a >= 1.0) || !(b > a)) {
            return Err(FundamentalError::Exponents(
                "joint weight domain must be a rectangle of intervals with 1 <= a < b".into(),
            ));
        }
        Ok(PsiMulti::Joint {
            domain,
            eval: Arc::new(eval),
            label: label.into(),
        })
    }

    pub fn coords(&self) -> usize {
        match self {
            PsiMulti::Factorable(fs) => fs.len(),
            PsiMulti::Joint { domain, .. } => domain.len(),
        }
    }

    pub fn domain(&self) -> Vec<(f64, f64)> {
        match self {
            PsiMulti::Factorable(fs) => fs.iter().map(|f| f.support()).collect(),
            PsiMulti::Joint { domain, .. } => domain.clone(),
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            PsiMulti::Factorable(fs) => fs.iter().zip(p.iter()).map(|(f, &x)| f.eval(x)).product(),
            PsiMulti::Joint { domain, eval, .. } => {
                for (x, &(a, b)) in p.iter().zip(domain.iter()) {
                    if !x.is_finite() || *x < a || *x > b {
                        return f64::INFINITY;
                    }
                }
                eval(p)
            }
        }
    }

    /// Product of two weights coordinate-wise (factorable × factorable stays
    /// factorable).
    pub fn product(&self, other: &PsiMulti) -> Result<PsiMulti, FundamentalError> {
        if self.coords() != other.coords() {
            return Err(FundamentalError::Blocks(
                "weight coordinate counts differ".into(),
            ));
        }
        match (self, other) {
            (PsiMulti::Factorable(a), PsiMulti::Factorable(b)) => {
                let mut out = Vec::with_capacity(a.len());
                for (fa, fb) in a.iter().zip(b.iter()) {
                    out.push(fa.product(fb).map_err(|e| {
                        FundamentalError::Blocks(format!("factor product: {e}"))
                    })?);
                }
                Ok(PsiMulti::Factorable(out))
            }
            _ => {
                let a = self.clone();
                let b = other.clone();
                let domain: Vec<(f64, f64)> = self
                    .domain()
                    .iter()
                    .zip(other.domain().iter())
                    .map(|(&(a1, b1), &(a2, b2))| (a1.max(a2), b1.min(b2)))
                    .collect();
                if domain.iter().any(|&(lo, hi)| !(lo < hi)) {
                    return Err(FundamentalError::Blocks(
                        "weight domains do not intersect".into(),
                    ));
                }
                PsiMulti::joint("product", domain, move |p| a.eval(p) * b.eval(p))
            }
        }
    }
}

/// sup over the domain interior of φ_{p⃗}(D) / ψ(p⃗).
///
/// Factorable weights decompose into per-block one-dimensional suprema;
/// joint weights are handled by a per-coordinate grid scan with refinement,
/// which is restricted to at most three coordinates.
pub fn fundamental_agls(
    psi: &PsiMulti,
    set: &ProductSet,
    cfg: &SupConfig,
) -> Result<f64, FundamentalError> {
    if psi.coords() != set.blocks.len() {
        return Err(FundamentalError::Blocks(format!(
            "weight has {} coordinates but the set has {} blocks",
            psi.coords(),
            set.blocks.len()
        )));
    }
    match psi {
        PsiMulti::Factorable(factors) => {
            let mut value = 1.0;
            for (factor, block) in factors.iter().zip(set.blocks.iter()) {
                let (a, b) = factor.support();
                let out = sup_scalar(
                    |p| {
                        let w = factor.eval(p);
                        let phi = block.fundamental_at(p).unwrap_or(f64::NAN);
                        if w.is_finite() && w > 0.0 && phi.is_finite() {
                            phi / w
                        } else {
                            f64::NEG_INFINITY
                        }
                    },
                    a,
                    b,
                    cfg,
                );
                if out.unbounded {
                    return Ok(f64::INFINITY);
                }
                value *= out.value;
            }
            Ok(value)
        }
        PsiMulti::Joint { domain, .. } => {
            if domain.len() > 3 {
                return Err(FundamentalError::Unsupported(
                    "joint weights support at most 3 exponent coordinates; use a factorable weight"
                        .into(),
                ));
            }
            let out = sup_vector(
                |p| {
                    let w = psi.eval(p);
                    let phi = set.fundamental_at(p).unwrap_or(f64::NAN);
                    if w.is_finite() && w > 0.0 && phi.is_finite() {
                        phi / w
                    } else {
                        f64::NEG_INFINITY
                    }
                },
                domain,
                cfg,
            );
            Ok(out.value)
        }
    }
}

/// One row of the asymptotic comparison table for the piecewise weight.
#[derive(Debug, Clone)]
pub struct AsymptoteRow {
    pub delta: f64,
    pub phi: f64,
    /// β^β |ln δ|^(−β), the printed small-δ candidate.
    pub small_candidate: f64,
    pub small_ratio: f64,
    /// (a²α/e)^α δ^(1/α) (ln δ)^(−α), the printed large-δ candidate.
    pub large_candidate_printed: f64,
    /// Same prefactor with exponent 1/a instead of 1/α.
    pub large_candidate_alt: f64,
}

/// Table of computed fundamental values of the piecewise weight divided by
/// the candidate asymptotes, for trend inspection. No candidate is asserted
/// as ground truth; the caller decides what to report.
pub fn tilde_phi_asymptotics(
    tilde: &PsiTilde,
    deltas: &[f64],
    cfg: &SupConfig,
) -> Vec<AsymptoteRow> {
    let psi = tilde.to_psi();
    deltas
        .iter()
        .map(|&delta| {
            let phi = fundamental_gls(&psi, delta, cfg);
            let abs_ln = delta.ln().abs();
            let small = tilde.beta.powf(tilde.beta) * abs_ln.powf(-tilde.beta);
            let prefactor =
                (tilde.a * tilde.a * tilde.alpha / std::f64::consts::E).powf(tilde.alpha);
            let (printed, alt) = if delta > 1.0 {
                let tail = delta.ln().powf(-tilde.alpha);
                (
                    prefactor * delta.powf(1.0 / tilde.alpha) * tail,
                    prefactor * delta.powf(1.0 / tilde.a) * tail,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            AsymptoteRow {
                delta,
                phi,
                small_candidate: small,
                small_ratio: phi / small,
                large_candidate_printed: printed,
                large_candidate_alt: alt,
            }
        })
        .collect()
}
