//! High-order finite differences on the radial grid.
//!
//! A mode-n radial part a(r) extends smoothly to the plane exactly when
//! a = rⁿ·b with b an even smooth function of r. All differentiation here
//! therefore happens on the even factor b: even ghost values fold the
//! stencils at the origin, and the division by rⁿ is exact at the nodes
//! (with a polynomial limit at r = 0). Stencils are 7-point centered
//! (6th order) with one-sided rows of the same width at the outer edge,
//! which keeps the truncation error uniform down to the axis, including
//! for odd modes, and exact for polynomial radial parts up to degree 6.

use std::sync::OnceLock;

use crate::polar::profile::{divide_rn, divide_rn_limit};
use crate::polar::GridSpec;

const W: usize = 7;

/// Fornberg weights for the m-th derivative at x0 on the given nodes.
fn fornberg(m: usize, x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Precomputed unit-spacing weights: centered (offsets −3..=3) and the
/// three one-sided right-edge rows over the last 7 nodes.
struct Stencils {
    c1: [f64; W],
    c2: [f64; W],
    /// edge1[k] = weights for the derivative at node n−1−k over offsets
    /// −(6−k)..=k relative to that node, stored left-to-right.
    edge1: [[f64; W]; 3],
    edge2: [[f64; W]; 3],
}

fn stencils() -> &'static Stencils {
    static CELL: OnceLock<Stencils> = OnceLock::new();
    CELL.get_or_init(|| {
        let nodes: Vec<f64> = (0..W as i64).map(|i| i as f64).collect();
        let mut s = Stencils {
            c1: [0.0; W],
            c2: [0.0; W],
            edge1: [[0.0; W]; 3],
            edge2: [[0.0; W]; 3],
        };
        let c1 = fornberg(1, 3.0, &nodes);
        let c2 = fornberg(2, 3.0, &nodes);
        s.c1.copy_from_slice(&c1);
        s.c2.copy_from_slice(&c2);
        for k in 0..3usize {
            // evaluation point sits k nodes from the right end of the stencil
            let x0 = (W - 1 - k) as f64;
            s.edge1[k].copy_from_slice(&fornberg(1, x0, &nodes));
            s.edge2[k].copy_from_slice(&fornberg(2, x0, &nodes));
        }
        s
    })
}

/// Value with index folded by even symmetry about 0.
#[inline]
fn even(values: &[f64], i: isize) -> f64 {
    if i < 0 {
        values[(-i) as usize]
    } else {
        values[i as usize]
    }
}

fn apply_stencils(values: &[f64], h: f64, second: bool) -> Vec<f64> {
    let st = stencils();
    let n = values.len();
    let (cen, edge) = if second { (&st.c2, &st.edge2) } else { (&st.c1, &st.edge1) };
    let scale = if second { h * h } else { h };
    let mut out = vec![0.0; n];
    for i in 0..n {
        let acc = if i + 4 <= n {
            // centered, folding ghosts at the axis
            let ii = i as isize;
            let mut a = 0.0;
            for (k, c) in cen.iter().enumerate() {
                a += c * even(values, ii + k as isize - 3);
            }
            a
        } else {
            let k = n - 1 - i; // 0, 1 or 2 from the right end
            let base = n - W;
            let mut a = 0.0;
            for (j, c) in edge[k].iter().enumerate() {
                a += c * values[base + j];
            }
            a
        };
        out[i] = acc / scale;
    }
    out
}

/// 6th-order first derivative of an even-symmetric sampled function.
pub fn d1_even(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = apply_stencils(values, h, false);
    out[0] = 0.0; // even function
    out
}

/// 6th-order second derivative of an even-symmetric sampled function.
pub fn d2_even(values: &[f64], h: f64) -> Vec<f64> {
    apply_stencils(values, h, true)
}

/// d/dr of a mode-n radial part: a' = r^{n−1}(n·b + r·b') with b = a/rⁿ.
pub fn mode_derivative(grid: &GridSpec, values: &[f64], n: u32) -> Vec<f64> {
    let h = grid.spacing();
    if n == 0 {
        return d1_even(values, h);
    }
    let b = divide_rn(grid, values, n);
    let db = d1_even(&b, h);
    let mut out = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let r = grid.r(i);
        if i == 0 {
            out.push(if n == 1 { b[0] } else { 0.0 });
        } else {
            out.push(r.powi(n as i32 - 1) * (n as f64 * b[i] + r * db[i]));
        }
    }
    out
}

/// The planar Laplacian restricted to mode n:
/// a'' + a'/r − n²a/r², evaluated through the even factor as
/// rⁿ(b'' + (2n+1) b'/r).
pub fn mode_laplacian(grid: &GridSpec, values: &[f64], n: u32) -> Vec<f64> {
    let h = grid.spacing();
    let b = divide_rn(grid, values, n);
    let db = d1_even(&b, h);
    let ddb = d2_even(&b, h);
    let mut out = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let r = grid.r(i);
        if i == 0 {
            // b'/r → b''(0); the whole expression is (2n+2)·b''(0) at the
            // axis, multiplied by rⁿ.
            out.push(if n == 0 { (2.0 * n as f64 + 2.0) * ddb[0] } else { 0.0 });
        } else {
            out.push(r.powi(n as i32) * (ddb[i] + (2.0 * n as f64 + 1.0) * db[i] / r));
        }
    }
    out
}

/// Even factor b = a/rⁿ and its origin limit, re-exported for solvers.
pub fn even_factor(grid: &GridSpec, values: &[f64], n: u32) -> Vec<f64> {
    divide_rn(grid, values, n)
}

pub fn even_factor_limit(grid: &GridSpec, values: &[f64], n: u32) -> f64 {
    divide_rn_limit(grid, values, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_centered_fourth_order() {
        let nodes: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let w = fornberg(1, 2.0, &nodes);
        let expect = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let w2 = fornberg(2, 2.0, &nodes);
        let expect2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w2.iter().zip(expect2) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_exact_on_degree_six() {
        let g = GridSpec::new(2.0, 201).unwrap();
        let v = g.sample(|r| 1.0 + 3.0 * r * r - 0.5 * r.powi(4) + 0.1 * r.powi(6));
        let d = d1_even(&v, g.spacing());
        for i in [0, 1, 50, 198, 199, 200] {
            let r = g.r(i);
            let exact = 6.0 * r - 2.0 * r.powi(3) + 0.6 * r.powi(5);
            assert!((d[i] - exact).abs() < 1e-9, "i = {i}: {} vs {exact}", d[i]);
        }
    }

    #[test]
    fn second_derivative_exact_on_degree_six() {
        let g = GridSpec::new(2.0, 201).unwrap();
        let v = g.sample(|r| r.powi(6) - r * r);
        let d = d2_even(&v, g.spacing());
        for i in [0, 1, 2, 100, 198, 200] {
            let r = g.r(i);
            let exact = 30.0 * r.powi(4) - 2.0;
            assert!((d[i] - exact).abs() < 1e-8, "i = {i}: {} vs {exact}", d[i]);
        }
    }

    #[test]
    fn mode_derivative_handles_odd_modes_at_axis() {
        let g = GridSpec::new(10.0, 2001).unwrap();
        // a = r e^{-r²/4} (mode 1): a' = (1 - r²/2) e^{-r²/4}
        let v = g.sample(|r| r * (-r * r / 4.0).exp());
        let d = mode_derivative(&g, &v, 1);
        for i in [0, 1, 2, 500, 1000] {
            let r = g.r(i);
            let exact = (1.0 - r * r / 2.0) * (-r * r / 4.0).exp();
            assert!((d[i] - exact).abs() < 1e-11, "i = {i}: {} vs {exact}", d[i]);
        }
    }

    #[test]
    fn mode_laplacian_on_harmonic_polynomial() {
        // Δ(r³cos3θ) = 0: radial part r³ at n = 3.
        let g = GridSpec::new(5.0, 501).unwrap();
        let v = g.sample(|r| r.powi(3));
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lap = mode_laplacian(&g, &v, 3);
        for i in [1, 10, 250, 500] {
            assert!(lap[i].abs() < 1e-10 * scale, "i = {i}: {}", lap[i]);
        }
    }
}
