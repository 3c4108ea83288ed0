//! Deterministic quadrature: an adaptive Gauss–Kronrod 7/15 engine, and
//! region integrators built on exact first-coordinate sections of boxes,
//! ellipsoids, their Cartesian products, and linear preimages of all of
//! those.
//!
//! Bounding boxes are computed tight to each region; the adaptive engine
//! relies on that (a support far smaller than the integration range could
//! otherwise slip between the nodes of the first panel).

use crate::fundamental::{Ellipsoid, Parallelepiped};
use crate::linalg::Matrix;

use super::NormError;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: u64,
}

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let v = f(c);
            kronrod += wk * v;
            gauss += WG[3] * v;
        } else {
            let v1 = f(c - h * x);
            let v2 = f(c + h * x);
            kronrod += wk * (v1 + v2);
            if i % 2 == 1 {
                gauss += WG[i / 2] * (v1 + v2);
            }
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Recursive subdivision with a two-level acceptance test: a panel is
/// accepted when its own Kronrod estimate agrees with the sum over its two
/// parts. Comparing two node geometries is robust where the plain |K − G|
/// estimate can be fooled (a jump sitting exactly on a shared node), and
/// the split point is irrational so a discontinuity cannot stay aligned
/// with panel edges down the whole recursion chain.
fn adaptive_rec(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut u64,
) -> (f64, f64) {
    const SPLIT: f64 = 0.618_033_988_749_894_9;
    let mid = a + SPLIT * (b - a);
    let (lv, _) = gk15(f, a, mid);
    let (rv, _) = gk15(f, mid, b);
    *evals += 30;
    let two = lv + rv;
    let delta = (two - whole).abs();
    let converged = delta <= tol && depth >= 2;
    if converged || depth >= 60 || (b - a) <= 1e-15 * (a.abs() + b.abs() + 1.0) {
        return (two, delta);
    }
    let tl = tol * SPLIT;
    let (v1, e1) = adaptive_rec(f, a, mid, lv, tl, depth + 1, evals);
    let (v2, e2) = adaptive_rec(f, mid, b, rv, tol - tl, depth + 1, evals);
    (v1 + v2, e1 + e2)
}

/// Adaptive integral of `f` on `[a, b]` to the given absolute tolerance.
pub fn adaptive_quad(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> QuadResult {
    if !(a < b) {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
        };
    }
    let mut evals = 15;
    let (whole, _) = gk15(&mut f, a, b);
    let (value, abs_error) = adaptive_rec(&mut f, a, b, whole, abs_tol.max(1e-300), 0, &mut evals);
    QuadResult {
        value,
        abs_error,
        evals,
    }
}

/// Adaptive integral with a relative target: a coarse panel sets the scale.
pub fn adaptive_quad_rel(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> QuadResult {
    if !(a < b) {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
        };
    }
    let (coarse, coarse_err) = gk15(&mut f, a, b);
    let scale = coarse.abs().max(coarse_err).max(1e-12);
    let mut evals = 15;
    let (value, abs_error) =
        adaptive_rec(&mut f, a, b, coarse, rel_tol * scale, 0, &mut evals);
    QuadResult {
        value,
        abs_error,
        evals,
    }
}

/// ∫_0^b r^e g(r) dr with g smooth and e > −1, via the substitution
/// r = u^m that removes the endpoint singularity.
pub fn adaptive_quad_power_endpoint(
    g: impl Fn(f64) -> f64,
    e: f64,
    b: f64,
    rel_tol: f64,
) -> QuadResult {
    assert!(e > -1.0, "endpoint power must be integrable");
    let m = (2.0 / (1.0 + e)).ceil().max(1.0);
    let ub = b.powf(1.0 / m);
    // r = u^m, dr = m u^(m-1) du, r^e = u^(me)
    let integrand = move |u: f64| m * u.powf(m * e + m - 1.0) * g(u.powf(m));
    adaptive_quad_rel(integrand, 0.0, ub, rel_tol)
}

/// A primitive membership constraint in its own block of coordinates.
#[derive(Debug, Clone)]
enum Primitive {
    Box { origin: Vec<f64>, sides: Vec<f64> },
    Ellipsoid { center: Vec<f64>, axes: Vec<f64>, radius: f64 },
}

impl Primitive {
    fn dim(&self) -> usize {
        match self {
            Primitive::Box { sides, .. } => sides.len(),
            Primitive::Ellipsoid { axes, .. } => axes.len(),
        }
    }

    fn local_bbox(&self) -> Vec<(f64, f64)> {
        match self {
            Primitive::Box { origin, sides } => origin
                .iter()
                .zip(sides.iter())
                .map(|(&o, &s)| (o, o + s))
                .collect(),
            Primitive::Ellipsoid {
                center,
                axes,
                radius,
            } => center
                .iter()
                .zip(axes.iter())
                .map(|(&c, &a)| (c - a * radius, c + a * radius))
                .collect(),
        }
    }

    fn contains(&self, y: &[f64]) -> bool {
        match self {
            Primitive::Box { origin, sides } => y
                .iter()
                .zip(origin.iter().zip(sides.iter()))
                .all(|(&v, (&o, &s))| v >= o && v <= o + s),
            Primitive::Ellipsoid {
                center,
                axes,
                radius,
            } => {
                let mut acc = 0.0;
                for i in 0..y.len() {
                    let t = (y[i] - center[i]) / axes[i];
                    acc += t * t;
                }
                acc <= radius * radius
            }
        }
    }
}

/// A solid region in R^d whose first-coordinate sections are exact
/// intervals: a Cartesian product of boxes and axis-aligned ellipsoids,
/// optionally pre-composed with a nonsingular linear map (membership of x is
/// membership of `map · x` in the product).
#[derive(Debug, Clone)]
pub struct Region {
    dim: usize,
    prims: Vec<(usize, Primitive)>,
    map: Option<Matrix>,
    bbox: Vec<(f64, f64)>,
}

impl Region {
    pub fn from_box(b: &Parallelepiped) -> Self {
        let prim = Primitive::Box {
            origin: b.origin.clone(),
            sides: b.sides.clone(),
        };
        let bbox = prim.local_bbox();
        Region {
            dim: b.dim(),
            prims: vec![(0, prim)],
            map: None,
            bbox,
        }
    }

    pub fn from_ellipsoid(e: &Ellipsoid) -> Self {
        let prim = Primitive::Ellipsoid {
            center: e.center.clone(),
            axes: e.semi_axes.clone(),
            radius: e.radius,
        };
        let bbox = prim.local_bbox();
        Region {
            dim: e.dim(),
            prims: vec![(0, prim)],
            map: None,
            bbox,
        }
    }

    /// Cartesian product of unmapped regions, blocks in order.
    pub fn product(parts: &[Region]) -> Result<Self, NormError> {
        let mut prims = Vec::new();
        let mut bbox = Vec::new();
        let mut off = 0;
        for part in parts {
            if part.map.is_some() {
                return Err(NormError::Unsupported(
                    "cannot take a product of already-composed regions".into(),
                ));
            }
            for (o, p) in &part.prims {
                prims.push((off + o, p.clone()));
            }
            bbox.extend_from_slice(&part.bbox);
            off += part.dim;
        }
        if off == 0 {
            return Err(NormError::Domain("empty region product".into()));
        }
        Ok(Region {
            dim: off,
            prims,
            map: None,
            bbox,
        })
    }

    /// The preimage { x : A x ∈ self }.
    pub fn preimage(&self, a: &Matrix) -> Result<Self, NormError> {
        if a.dim() != self.dim {
            return Err(NormError::Domain(format!(
                "matrix dimension {} does not match region dimension {}",
                a.dim(),
                self.dim
            )));
        }
        let map = match &self.map {
            // membership of x was map·x ∈ prims; now it is map·(A x)
            Some(m) => m.matmul(a),
            None => a.clone(),
        };
        let inv = map
            .inverse()
            .map_err(|e| NormError::Domain(format!("region preimage needs a nonsingular map: {e}")))?;
        // x ranges over inv · (product bbox): per-coordinate interval bound
        let local: Vec<(f64, f64)> = {
            let mut lb = vec![(0.0, 0.0); self.dim];
            for (off, p) in &self.prims {
                for (i, iv) in p.local_bbox().into_iter().enumerate() {
                    lb[off + i] = iv;
                }
            }
            lb
        };
        let mut bbox = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut c = 0.0;
            let mut hw = 0.0;
            for j in 0..self.dim {
                let (lo, hi) = local[j];
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                c += inv.get(i, j) * mid;
                hw += inv.get(i, j).abs() * half;
            }
            bbox.push((c - hw, c + hw));
        }
        Ok(Region {
            dim: self.dim,
            prims: self.prims.clone(),
            map: Some(map),
            bbox,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounding_box(&self) -> &[(f64, f64)] {
        &self.bbox
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let y;
        let point = match &self.map {
            Some(m) => {
                y = m.matvec(x);
                &y[..]
            }
            None => x,
        };
        self.prims
            .iter()
            .all(|(off, p)| p.contains(&point[*off..*off + p.dim()]))
    }

    /// The exact x₀-section interval for fixed rest = (x₁, …, x_{d−1}).
    /// Returns None when the section is empty.
    pub fn section(&self, rest: &[f64]) -> Option<(f64, f64)> {
        debug_assert_eq!(rest.len(), self.dim - 1);
        // y_i(t) = g_i · t + s_i with g the first column of the map (or e_0)
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let coeff = |i: usize| -> (f64, f64) {
            match &self.map {
                Some(m) => {
                    let g = m.get(i, 0);
                    let mut s = 0.0;
                    for j in 1..self.dim {
                        s += m.get(i, j) * rest[j - 1];
                    }
                    (g, s)
                }
                None => {
                    if i == 0 {
                        (1.0, 0.0)
                    } else {
                        (0.0, rest[i - 1])
                    }
                }
            }
        };
        for (off, p) in &self.prims {
            match p {
                Primitive::Box { origin, sides } => {
                    for i in 0..sides.len() {
                        let (g, s) = coeff(off + i);
                        let (a, b) = (origin[i], origin[i] + sides[i]);
                        if g.abs() < 1e-300 {
                            if s < a || s > b {
                                return None;
                            }
                        } else {
                            let t1 = (a - s) / g;
                            let t2 = (b - s) / g;
                            lo = lo.max(t1.min(t2));
                            hi = hi.min(t1.max(t2));
                        }
                    }
                }
                Primitive::Ellipsoid {
                    center,
                    axes,
                    radius,
                } => {
                    let mut qa = 0.0;
                    let mut qb = 0.0;
                    let mut qc = -radius * radius;
                    for i in 0..axes.len() {
                        let (g, s) = coeff(off + i);
                        let u = (s - center[i]) / axes[i];
                        let v = g / axes[i];
                        qa += v * v;
                        qb += v * u;
                        qc += u * u;
                    }
                    if qa < 1e-300 {
                        if qc > 0.0 {
                            return None;
                        }
                    } else {
                        let disc = qb * qb - qa * qc;
                        if disc <= 0.0 {
                            return None;
                        }
                        let root = disc.sqrt();
                        lo = lo.max((-qb - root) / qa);
                        hi = hi.min((-qb + root) / qa);
                    }
                }
            }
        }
        if lo < hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    fn section_length(&self, rest: &[f64]) -> f64 {
        match self.section(rest) {
            Some((lo, hi)) => hi - lo,
            None => 0.0,
        }
    }
}

/// Recursive integral over coordinates k..0, where the innermost value for a
/// fixed tail is produced by `base` and each level k ≥ 1 raises the level
/// below to `power[k]` before integrating over x_k.
///
/// `rest` is indexed so that rest[j] = x_{j+1}; levels fill it from the
/// outermost coordinate inward.
fn nested_levels(
    bbox: &[(f64, f64)],
    powers: &[f64],
    level: usize,
    rest: &mut Vec<f64>,
    base: &mut dyn FnMut(&[f64]) -> f64,
    rel_tol: f64,
    evals: &mut u64,
) -> f64 {
    if level == 0 {
        *evals += 1;
        return base(rest);
    }
    let (lo, hi) = bbox[level];
    let idx = level - 1;
    // tighten the tolerance one decade per inner level
    let inner_tol = rel_tol * 0.1;
    let mut local_evals = 0;
    let mut f = |x: f64| {
        rest[idx] = x;
        let inner = nested_levels(bbox, powers, level - 1, rest, base, inner_tol, &mut local_evals);
        if powers[level] == 1.0 {
            inner
        } else {
            inner.powf(powers[level])
        }
    };
    let out = adaptive_quad_rel(&mut f, lo, hi, rel_tol);
    *evals += local_evals;
    out.value
}

/// Volume of a region by exact sections along x₀ and adaptive integration
/// over the remaining coordinates.
pub fn region_volume(region: &Region, rel_tol: f64) -> QuadResult {
    let d = region.dim();
    let mut evals = 0u64;
    if d == 1 {
        let v = region.section_length(&[]);
        return QuadResult {
            value: v,
            abs_error: 0.0,
            evals: 1,
        };
    }
    let powers = vec![1.0; d];
    let mut rest = vec![0.0; d - 1];
    let mut base = |r: &[f64]| region.section_length(r);
    let value = nested_levels(
        region.bounding_box(),
        &powers,
        d - 1,
        &mut rest,
        &mut base,
        rel_tol,
        &mut evals,
    );
    QuadResult {
        value,
        abs_error: rel_tol * value.abs(),
        evals,
    }
}

/// Mixed norm of a region's indicator with one exponent per coordinate,
/// computed by the nested iterated integral: the innermost x₀ level is the
/// exact section length, outer levels raise and integrate.
pub fn region_mixed_norm(region: &Region, p_per_coord: &[f64], rel_tol: f64) -> QuadResult {
    let d = region.dim();
    assert_eq!(p_per_coord.len(), d);
    let mut evals = 0u64;
    if d == 1 {
        let v = region.section_length(&[]).powf(1.0 / p_per_coord[0]);
        return QuadResult {
            value: v,
            abs_error: 0.0,
            evals: 1,
        };
    }
    let mut powers = vec![1.0; d];
    for k in 1..d {
        powers[k] = p_per_coord[k] / p_per_coord[k - 1];
    }
    let mut rest = vec![0.0; d - 1];
    let mut base = |r: &[f64]| region.section_length(r);
    let top = nested_levels(
        region.bounding_box(),
        &powers,
        d - 1,
        &mut rest,
        &mut base,
        rel_tol,
        &mut evals,
    );
    let value = top.powf(1.0 / p_per_coord[d - 1]);
    QuadResult {
        value,
        abs_error: rel_tol * value.abs(),
        evals,
    }
}

/// ∫_region w(x)^α dx where w is the Euclidean or max norm: the x₀ level
/// integrates the weight over the exact section, outer levels are plain.
pub fn region_weighted_integral(
    region: &Region,
    alpha: f64,
    euclidean: bool,
    rel_tol: f64,
) -> QuadResult {
    let d = region.dim();
    let mut evals = 0u64;
    let weight = move |t: f64, rest: &[f64]| -> f64 {
        if euclidean {
            let r2 = t * t + rest.iter().map(|v| v * v).sum::<f64>();
            r2.powf(0.5 * alpha)
        } else {
            let m = rest.iter().fold(t.abs(), |acc, v| acc.max(v.abs()));
            m.powf(alpha)
        }
    };
    let mut base = |r: &[f64]| -> f64 {
        match region.section(r) {
            Some((lo, hi)) => adaptive_quad_rel(|t| weight(t, r), lo, hi, rel_tol * 0.01).value,
            None => 0.0,
        }
    };
    if d == 1 {
        let v = base(&[]);
        return QuadResult {
            value: v,
            abs_error: rel_tol * v.abs(),
            evals: 1,
        };
    }
    let powers = vec![1.0; d];
    let mut rest = vec![0.0; d - 1];
    let value = nested_levels(
        region.bounding_box(),
        &powers,
        d - 1,
        &mut rest,
        &mut base,
        rel_tol,
        &mut evals,
    );
    QuadResult {
        value,
        abs_error: rel_tol * value.abs(),
        evals,
    }
}

/// Generic nested mixed norm of |f| over a box with one exponent per
/// coordinate: innermost level integrates |f|^{p₀} over x₀.
pub fn nested_mixed_norm(
    f: &dyn Fn(&[f64]) -> f64,
    bbox: &[(f64, f64)],
    p_per_coord: &[f64],
    rel_tol: f64,
) -> QuadResult {
    let d = bbox.len();
    assert_eq!(p_per_coord.len(), d);
    let mut evals = 0u64;
    let p0 = p_per_coord[0];
    let mut point = vec![0.0; d];
    let mut base = |rest: &[f64]| -> f64 {
        let (lo, hi) = bbox[0];
        adaptive_quad_rel(
            |t| {
                point[0] = t;
                point[1..].copy_from_slice(rest);
                f(&point).abs().powf(p0)
            },
            lo,
            hi,
            rel_tol * 0.1,
        )
        .value
    };
    if d == 1 {
        let v = base(&[]).powf(1.0 / p0);
        return QuadResult {
            value: v,
            abs_error: rel_tol * v.abs(),
            evals: 1,
        };
    }
    let mut powers = vec![1.0; d];
    for k in 1..d {
        powers[k] = p_per_coord[k] / p_per_coord[k - 1];
    }
    let mut rest = vec![0.0; d - 1];
    let top = nested_levels(
        bbox,
        &powers,
        d - 1,
        &mut rest,
        &mut base,
        rel_tol,
        &mut evals,
    );
    let value = top.powf(1.0 / p_per_coord[d - 1]);
    QuadResult {
        value,
        abs_error: rel_tol * value.abs(),
        evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_polynomial() {
        let r = adaptive_quad(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_gaussian() {
        // ∫ e^(-2x²) over R = sqrt(π/2)
        let r = adaptive_quad_rel(|x| (-2.0 * x * x).exp(), -10.0, 10.0, 1e-11);
        let expect = (std::f64::consts::PI / 2.0).sqrt();
        assert!((r.value - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn power_endpoint_singularity() {
        // ∫_0^1 x^(-0.8) dx = 5
        let r = adaptive_quad_power_endpoint(|_| 1.0, -0.8, 1.0, 1e-11);
        assert!((r.value - 5.0).abs() < 1e-9, "got {}", r.value);
    }

    #[test]
    fn disk_volume_by_sections() {
        let e = Ellipsoid::centered(vec![1.0, 1.0], 1.0).unwrap();
        let region = Region::from_ellipsoid(&e);
        let r = region_volume(&region, 1e-9);
        assert!(
            (r.value - std::f64::consts::PI).abs() < 1e-7,
            "got {}",
            r.value
        );
    }

    #[test]
    fn sheared_box_volume() {
        // preimage of the unit square under a shear keeps volume 1/|det| = 1
        let b = Parallelepiped::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let region = Region::from_box(&b).preimage(&a).unwrap();
        let r = region_volume(&region, 1e-9);
        assert!((r.value - 1.0).abs() < 1e-8, "got {}", r.value);
    }

    #[test]
    fn scaled_box_preimage_volume() {
        let b = Parallelepiped::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let a = Matrix::diagonal(&[2.0, 2.0]);
        let region = Region::from_box(&b).preimage(&a).unwrap();
        assert!(region.contains(&[0.25, 0.25]));
        assert!(!region.contains(&[0.75, 0.25]));
        let r = region_volume(&region, 1e-9);
        assert!((r.value - 0.25).abs() < 1e-8);
    }

    #[test]
    fn ellipse_mixed_norm_reference() {
        // unit disk at p = (2, 2): area^(1/2) = sqrt(pi)
        let e = Ellipsoid::centered(vec![1.0, 1.0], 1.0).unwrap();
        let region = Region::from_ellipsoid(&e);
        let r = region_mixed_norm(&region, &[2.0, 2.0], 1e-9);
        let expect = std::f64::consts::PI.sqrt();
        assert!((r.value - expect).abs() < 1e-7 * expect, "got {}", r.value);
    }

    #[test]
    fn triangle_mixed_norm_asymmetry() {
        // indicator of {0 ≤ x ≤ y ≤ 1}: |f|_(1,3) = (1/4)^(1/3), |f|_(3,1) = 3/4
        let tri = |x: &[f64]| -> f64 {
            if x[0] >= 0.0 && x[1] <= 1.0 && x[0] <= x[1] {
                1.0
            } else {
                0.0
            }
        };
        let bbox = [(0.0, 1.0), (0.0, 1.0)];
        let n13 = nested_mixed_norm(&tri, &bbox, &[1.0, 3.0], 1e-8).value;
        let n31 = nested_mixed_norm(&tri, &bbox, &[3.0, 1.0], 1e-8).value;
        let e13 = 0.25_f64.powf(1.0 / 3.0);
        let e31 = 0.75;
        assert!((n13 - e13).abs() < 1e-6, "got {n13}, want {e13}");
        assert!((n31 - e31).abs() < 1e-6, "got {n31}, want {e31}");
        assert!((n13 - n31).abs() > 0.1);
    }

    #[test]
    fn weighted_disk_integral() {
        // ∫_disk |x|² dA = π/2
        let e = Ellipsoid::centered(vec![1.0, 1.0], 1.0).unwrap();
        let region = Region::from_ellipsoid(&e);
        let r = region_weighted_integral(&region, 2.0, true, 1e-9);
        let expect = std::f64::consts::PI / 2.0;
        assert!((r.value - expect).abs() < 1e-6 * expect, "got {}", r.value);
    }
}
