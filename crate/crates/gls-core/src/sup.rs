//! Supremum search over open exponent intervals and rectangles.
//!
//! The sup of an objective over an open interval is estimated by a coarse
//! grid scan, golden-section refinement around the best bracket, and
//! boundary limits probed at geometrically shrinking offsets. Every reported
//! value is a certified lower bound of the true sup (it is the max of
//! actual objective evaluations).

/// Configuration for the sup scans. Infinite upper endpoints are handled by
/// a geometric (log-spaced) grid capped at `infinite_cap`.
#[derive(Debug, Clone)]
pub struct SupConfig {
    pub grid_points: usize,
    pub grid_points_per_axis: usize,
    pub bracket_tol: f64,
    pub boundary_eps: Vec<f64>,
    pub infinite_cap: f64,
    pub refine_sweeps: usize,
}

impl Default for SupConfig {
    fn default() -> Self {
        Self {
            grid_points: 512,
            grid_points_per_axis: 64,
            bracket_tol: 1e-10,
            boundary_eps: vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9],
            infinite_cap: 1e9,
            refine_sweeps: 4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SupOutcome {
    pub value: f64,
    pub arg: f64,
    /// Set when boundary probes kept growing, i.e. the sup is +∞.
    pub unbounded: bool,
}

/// Interior grid over the open interval `(lo, hi)`: uniform for finite `hi`,
/// log-spaced when `hi` is infinite (capped).
pub fn interval_grid(lo: f64, hi: f64, n: usize, cfg: &SupConfig) -> Vec<f64> {
    let scale_lo = lo.abs().max(1.0);
    let a = lo + 1e-3 * scale_lo;
    if hi.is_finite() {
        let b = hi - 1e-3 * hi.abs().max(1.0);
        if b <= a {
            // degenerate-thin interval: fall back to midpoints
            return (0..n)
                .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
                .collect();
        }
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    } else {
        let b = cfg.infinite_cap.max(10.0 * a);
        let (la, lb) = (a.ln(), b.ln());
        (0..n)
            .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Boundary limit of `f` approaching `endpoint` from inside the interval.
/// Returns (limit estimate, unbounded flag).
fn boundary_limit(
    f: &dyn Fn(f64) -> f64,
    endpoint: f64,
    from_above: bool,
    cfg: &SupConfig,
) -> (f64, f64, bool) {
    let scale = endpoint.abs().max(1.0);
    let mut values = Vec::with_capacity(cfg.boundary_eps.len());
    let mut args = Vec::with_capacity(cfg.boundary_eps.len());
    for &eps in &cfg.boundary_eps {
        let p = if from_above {
            endpoint + eps * scale
        } else {
            endpoint - eps * scale
        };
        let v = f(p);
        if v.is_finite() {
            values.push(v);
            args.push(p);
        }
    }
    if values.is_empty() {
        return (f64::NEG_INFINITY, endpoint, false);
    }
    let last = *values.last().unwrap();
    let arg = *args.last().unwrap();
    // clear blow-up: the two final shrink steps each more than doubled
    let n = values.len();
    let unbounded = n >= 3
        && values[n - 1] > 2.0 * values[n - 2]
        && values[n - 2] > 2.0 * values[n - 3]
        && values[n - 1] > 0.0;
    (last, arg, unbounded)
}

/// Supremum of `obj` over the open interval `(lo, hi)`, `hi` possibly +∞.
///
/// NaN and +∞ evaluations are skipped; if a boundary probe sequence keeps
/// blowing up, the outcome is flagged `unbounded` and the value is +∞.
pub fn sup_scalar(obj: impl Fn(f64) -> f64, lo: f64, hi: f64, cfg: &SupConfig) -> SupOutcome {
    let f = |p: f64| obj(p);
    let grid = interval_grid(lo, hi, cfg.grid_points.max(3), cfg);
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    let mut vals = Vec::with_capacity(grid.len());
    for (i, &p) in grid.iter().enumerate() {
        let v = f(p);
        vals.push(v);
        if v.is_finite() && v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut value = best_v;
    let mut arg = grid.get(best_i).copied().unwrap_or(lo);

    if best_v.is_finite() {
        // golden refinement around the best bracket, in the grid's own scale
        let a = if best_i > 0 { grid[best_i - 1] } else { grid[0] };
        let b = if best_i + 1 < grid.len() {
            grid[best_i + 1]
        } else {
            grid[grid.len() - 1]
        };
        if b > a {
            let guarded = |p: f64| {
                let v = f(p);
                if v.is_finite() {
                    v
                } else {
                    f64::NEG_INFINITY
                }
            };
            let (xa, va) = if hi.is_finite() {
                golden_max(&guarded, a, b, cfg.bracket_tol)
            } else {
                let logf = |t: f64| guarded(t.exp());
                let (t, v) = golden_max(&logf, a.ln(), b.ln(), cfg.bracket_tol);
                (t.exp(), v)
            };
            if va > value {
                value = va;
                arg = xa;
            }
        }
    }

    // boundary limits at finite endpoints
    let mut unbounded = false;
    let (bl, bl_arg, ub) = boundary_limit(&f, lo, true, cfg);
    if ub {
        unbounded = true;
    }
    if bl > value {
        value = bl;
        arg = bl_arg;
    }
    if hi.is_finite() {
        let (bh, bh_arg, ub) = boundary_limit(&f, hi, false, cfg);
        if ub {
            unbounded = true;
        }
        if bh > value {
            value = bh;
            arg = bh_arg;
        }
    }

    if unbounded {
        return SupOutcome {
            value: f64::INFINITY,
            arg,
            unbounded: true,
        };
    }
    SupOutcome {
        value,
        arg,
        unbounded: false,
    }
}

#[derive(Debug, Clone)]
pub struct SupVecOutcome {
    pub value: f64,
    pub arg: Vec<f64>,
    pub unbounded: bool,
}

/// Supremum of `obj` over the interior of a rectangle given per-coordinate
/// open intervals. Full product-grid scan (grid_points_per_axis per axis,
/// intended for ≤ 3 axes) followed by cyclic per-coordinate golden sweeps.
pub fn sup_vector(
    obj: impl Fn(&[f64]) -> f64,
    domain: &[(f64, f64)],
    cfg: &SupConfig,
) -> SupVecOutcome {
    let l = domain.len();
    assert!(l >= 1, "empty domain");
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(l);
    for &(lo, hi) in domain {
        let mut axis = interval_grid(lo, hi, cfg.grid_points_per_axis.max(3), cfg);
        // fold near-boundary offsets into each axis so boundary suprema are seen
        let scale_lo = lo.abs().max(1.0);
        for &eps in &cfg.boundary_eps {
            axis.push(lo + eps * scale_lo);
        }
        if hi.is_finite() {
            let scale_hi = hi.abs().max(1.0);
            for &eps in &cfg.boundary_eps {
                axis.push(hi - eps * scale_hi);
            }
        }
        axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        axes.push(axis);
    }

    let mut idx = vec![0usize; l];
    let mut best = f64::NEG_INFINITY;
    let mut best_arg: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let mut point = vec![0.0; l];
    'scan: loop {
        for k in 0..l {
            point[k] = axes[k][idx[k]];
        }
        let v = obj(&point);
        if v.is_finite() && v > best {
            best = v;
            best_arg.copy_from_slice(&point);
        }
        // odometer increment
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == l {
                break 'scan;
            }
        }
    }

    // cyclic golden refinement, one coordinate at a time
    let mut arg = best_arg.clone();
    let mut value = best;
    for _ in 0..cfg.refine_sweeps {
        for k in 0..l {
            let (lo, hi) = domain[k];
            let lo_k = (arg[k] * 0.8 + lo * 0.2).max(lo + 1e-9 * lo.abs().max(1.0));
            let hi_k = if hi.is_finite() {
                (arg[k] * 1.25).min(hi - 1e-9 * hi.abs().max(1.0))
            } else {
                arg[k] * 1.25
            };
            if !(lo_k < hi_k) {
                continue;
            }
            let frozen = arg.clone();
            let f1 = |t: f64| {
                let mut x = frozen.clone();
                x[k] = t;
                let v = obj(&x);
                if v.is_finite() {
                    v
                } else {
                    f64::NEG_INFINITY
                }
            };
            let (t, v) = golden_max(&f1, lo_k, hi_k, cfg.bracket_tol);
            if v > value {
                value = v;
                arg[k] = t;
            }
        }
    }

    SupVecOutcome {
        value,
        arg,
        unbounded: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_maximum_is_refined() {
        let cfg = SupConfig::default();
        // max of -(p-3)^2 + 5 at p = 3
        let out = sup_scalar(|p| 5.0 - (p - 3.0).powi(2), 1.0, 10.0, &cfg);
        assert!((out.value - 5.0).abs() < 1e-12);
        assert!((out.arg - 3.0).abs() < 1e-5);
    }

    #[test]
    fn boundary_supremum_lower_end() {
        let cfg = SupConfig::default();
        // 4^(1/p) on (1, ∞): sup 4 approached at p → 1⁺
        let out = sup_scalar(|p| 4.0_f64.powf(1.0 / p), 1.0, f64::INFINITY, &cfg);
        assert!((out.value - 4.0).abs() < 1e-6, "got {}", out.value);
    }

    #[test]
    fn boundary_supremum_infinite_end() {
        let cfg = SupConfig::default();
        // 0.5^(1/p) on (1, ∞): sup 1 approached as p → ∞
        let out = sup_scalar(|p| 0.5_f64.powf(1.0 / p), 1.0, f64::INFINITY, &cfg);
        assert!((out.value - 1.0).abs() < 1e-6, "got {}", out.value);
    }

    #[test]
    fn unbounded_objective_flagged() {
        let cfg = SupConfig::default();
        let out = sup_scalar(|p| 1.0 / (p - 1.0), 1.0, 4.0, &cfg);
        assert!(out.unbounded);
        assert!(out.value.is_infinite());
    }

    #[test]
    fn vector_sup_factorable() {
        let cfg = SupConfig::default();
        // product of two positive 1-D bumps, max 6 at (2, 4)
        let out = sup_vector(
            |p| 6.0 * (-(p[0] - 2.0).powi(2)).exp() * (-(p[1] - 4.0).powi(2)).exp(),
            &[(1.0, 8.0), (1.0, 8.0)],
            &cfg,
        );
        assert!((out.value - 6.0).abs() < 1e-8, "got {}", out.value);
    }
}
