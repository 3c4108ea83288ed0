use gls_core::integrate::{adaptive_quad_rel, nested_mixed_norm};

fn main() {
    let inner = |x1: f64| -> f64 {
        adaptive_quad_rel(|t: f64| if t >= 0.0 && t <= x1 { 1.0 } else { 0.0 }, 0.0, 1.0, 1e-9).value
    };
    let outer = adaptive_quad_rel(|x1| inner(x1).powi(3), 0.0, 1.0, 1e-8);
    println!("outer = {:.15}, diff {:.3e}", outer.value, (outer.value - 0.25).abs());
    // the one reported bad point
    let x1 = 0.2356827431470915;
    let v = inner(x1);
    println!("inner({x1}) = {v}, diff = {:.6e}", (v - x1).abs());
    let tri = |x: &[f64]| -> f64 {
        if x[0] >= 0.0 && x[1] <= 1.0 && x[0] <= x[1] { 1.0 } else { 0.0 }
    };
    let bbox = [(0.0, 1.0), (0.0, 1.0)];
    let n13 = nested_mixed_norm(&tri, &bbox, &[1.0, 3.0], 1e-8);
    let n31 = nested_mixed_norm(&tri, &bbox, &[3.0, 1.0], 1e-8);
    println!("n13 = {:.12} want {:.12} diff {:.2e}", n13.value, 0.25f64.powf(1.0/3.0), (n13.value - 0.25f64.powf(1.0/3.0)).abs());
    println!("n31 = {:.12} want 0.75 diff {:.2e}", n31.value, (n31.value - 0.75).abs());
}
