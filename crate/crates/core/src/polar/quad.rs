//! Deterministic high-order quadrature on uniform grids.
//!
//! Definite integrals use the composite closed 6-point Newton–Cotes rule
//! when the interval count splits into panels of five, falling back to a
//! per-interval quintic rule of the same order otherwise. Cumulative
//! integrals use the quintic per-interval rule at every node. All sums are
//! compensated and run left to right.

use crate::util::kahan_sum;

/// Closed 6-point Newton–Cotes weights over one panel of five intervals,
/// in units of the spacing h.
const NEWTON_COTES_6: [f64; 6] = [
    95.0 / 288.0,
    375.0 / 288.0,
    250.0 / 288.0,
    250.0 / 288.0,
    375.0 / 288.0,
    95.0 / 288.0,
];

/// Weights (in units of h) for the integral over a single interval, using
/// six nodes around it. Row k integrates from node k to node k+1 of the
/// stencil; rows 0–1 are the left-edge rules, row 2 the centered rule, and
/// the right-edge rules are the reverses of rows 1 and 0.
const INTERVAL_W: [[f64; 6]; 3] = [
    [
        475.0 / 1440.0,
        1427.0 / 1440.0,
        -798.0 / 1440.0,
        482.0 / 1440.0,
        -173.0 / 1440.0,
        27.0 / 1440.0,
    ],
    [
        -27.0 / 1440.0,
        637.0 / 1440.0,
        1022.0 / 1440.0,
        -258.0 / 1440.0,
        77.0 / 1440.0,
        -11.0 / 1440.0,
    ],
    [
        11.0 / 1440.0,
        -93.0 / 1440.0,
        802.0 / 1440.0,
        802.0 / 1440.0,
        -93.0 / 1440.0,
        11.0 / 1440.0,
    ],
];

/// ∫ f dr over the full grid for sampled values, spacing h.
pub fn integrate_values(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 6, "quadrature needs at least 6 nodes");
    let intervals = n - 1;
    if intervals % 5 == 0 {
        // Composite 6-point Newton–Cotes over panels of five intervals.
        let mut terms = Vec::with_capacity(n);
        let mut start = 0;
        while start + 5 <= intervals {
            for (j, w) in NEWTON_COTES_6.iter().enumerate() {
                terms.push(w * values[start + j]);
            }
            start += 5;
        }
        h * kahan_sum(terms)
    } else {
        let c = cumulative_integral(values, h);
        c[n - 1]
    }
}

/// Cumulative integral C with C[0] = 0 and C[i] = ∫_0^{r_i} f dr, built
/// from the quintic per-interval rule (global order h^6).
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 6, "quadrature needs at least 6 nodes");
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..n - 1 {
        // Stencil base so that the interval [i, i+1] maps onto row `row`.
        let (base, row) = if i < 2 {
            (0, i)
        } else if i + 3 < n {
            (i - 2, 2)
        } else {
            (n - 6, i + 6 - n)
        };
        let inc = if row <= 2 {
            let w = &INTERVAL_W[row];
            (0..6).map(|j| w[j] * values[base + j]).sum::<f64>()
        } else {
            // Right-edge rows reuse the left-edge weights reversed:
            // stencil interval k mirrors interval 4 − k.
            let w = &INTERVAL_W[4 - row];
            (0..6).map(|j| w[5 - j] * values[base + j]).sum::<f64>()
        };
        // Compensated accumulation.
        let y = h * inc - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, r_max: f64) -> (Vec<f64>, f64) {
        let h = r_max / (n - 1) as f64;
        ((0..n).map(|i| i as f64 * h).collect(), h)
    }

    #[test]
    fn newton_cotes_exact_on_quintics() {
        let (r, h) = grid(4096, 2.0);
        for p in 0..=5 {
            let vals: Vec<f64> = r.iter().map(|x| x.powi(p)).collect();
            let exact = 2.0f64.powi(p + 1) / (p + 1) as f64;
            let got = integrate_values(&vals, h);
            assert!(
                (got - exact).abs() < 1e-12 * exact.abs().max(1.0),
                "p={p}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn cumulative_exact_on_quintics() {
        let (r, h) = grid(101, 3.0);
        let vals: Vec<f64> = r.iter().map(|x| x.powi(5)).collect();
        let c = cumulative_integral(&vals, h);
        for (i, x) in r.iter().enumerate() {
            let exact = x.powi(6) / 6.0;
            assert!((c[i] - exact).abs() < 1e-11 * exact.max(1.0), "i={i}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let (r, h) = grid(4096, 25.0);
        let vals: Vec<f64> = r.iter().map(|x| x * (-x * x / 4.0).exp()).collect();
        // ∫_0^∞ r e^{-r²/4} dr = 2
        assert!((integrate_values(&vals, h) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn fallback_matches_newton_cotes_class() {
        // 99 intervals is not divisible by 5: exercised fallback.
        let (r, h) = grid(100, 1.0);
        let vals: Vec<f64> = r.iter().map(|x| (3.0 * x).sin()).collect();
        let exact = (1.0 - (3.0f64).cos()) / 3.0;
        assert!((integrate_values(&vals, h) - exact).abs() < 1e-10);
    }
}
