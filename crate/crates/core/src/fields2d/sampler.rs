//! Pointwise evaluation of polar fields at arbitrary plane positions.
//!
//! Radial parts are interpolated by local cubics on the uniform grid
//! (with parity folding below the first node) and continued beyond r_max
//! by the analytic tail of their class: Gaussian-decaying parts vanish
//! there, stream-type parts follow the harmonic far field c·r^{−n}
//! (log + const at n = 0), polynomial parts follow their leading monomial.
//! Mirror evaluation — the field seen reflected through the partner
//! vortex at distance 1/ε — reduces to evaluation at the reflected point.

use crate::operators::stencil;
use crate::polar::{DecayClass, GridSpec, Parity, PolarField};

#[derive(Debug, Clone, Copy)]
enum Tail {
    /// Below resolution beyond the grid.
    Zero,
    /// c₁·ln r + c₀ (mode 0) — the far field of a mass-carrying mode.
    Log { c_log: f64, c_const: f64 },
    /// c·r^{−n} — the decaying harmonic branch.
    Harmonic { c: f64 },
    /// c·r^{k} — polynomial radial parts (exact monomials).
    Monomial { c: f64, k: i32 },
}

struct ModeSampler {
    n: u32,
    parity: Parity,
    values: Vec<f64>,
    derivative: Vec<f64>,
    tail: Tail,
}

/// Evaluator for one polar field.
pub struct PolarSampler {
    grid: GridSpec,
    modes: Vec<ModeSampler>,
}

fn cubic_interp(grid: &GridSpec, values: &[f64], n_parity: u32, r: f64) -> f64 {
    let h = grid.spacing();
    let n = grid.len();
    let x = r / h;
    // base so that nodes base-1..base+2 bracket x; folded at the axis.
    let i = (x.floor() as isize).clamp(0, n as isize - 3);
    let sign = |j: isize| -> f64 {
        if j < 0 && n_parity % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let fetch = |j: isize| -> f64 {
        let jj = if j < 0 { -j } else { j } as usize;
        sign(j) * values[jj.min(n - 1)]
    };
    let (j0, j1, j2, j3) = (i - 1, i, i + 1, i + 2);
    let (f0, f1, f2, f3) = (fetch(j0), fetch(j1), fetch(j2), fetch(j3));
    let t = x - i as f64;
    // Lagrange cubic on nodes −1, 0, 1, 2 in units of h.
    let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3
}

impl PolarSampler {
    pub fn new(field: &PolarField) -> Self {
        let grid = field.grid();
        let n_pts = grid.len();
        let r_last = grid.r(n_pts - 1);
        let modes = field
            .modes()
            .map(|(n, parity, prof)| {
                let derivative = stencil::mode_derivative(&grid, &prof.values, n);
                let last = prof.values[n_pts - 1];
                let dlast = derivative[n_pts - 1];
                let tail = match prof.decay {
                    DecayClass::GaussianWeighted => Tail::Zero,
                    DecayClass::Bounded => {
                        if n == 0 {
                            // match value and derivative: φ ≈ c_log·ln r + c₀
                            let c_log = dlast * r_last;
                            Tail::Log {
                                c_log,
                                c_const: last - c_log * r_last.ln(),
                            }
                        } else {
                            Tail::Harmonic {
                                c: last * r_last.powi(n as i32),
                            }
                        }
                    }
                    DecayClass::PolynomialGrowth => {
                        // leading monomial degree from a log-derivative estimate
                        let k = if last.abs() > 0.0 {
                            (dlast * r_last / last).round() as i32
                        } else {
                            n as i32
                        };
                        Tail::Monomial {
                            c: last / r_last.powi(k),
                            k,
                        }
                    }
                };
                ModeSampler {
                    n,
                    parity,
                    values: prof.values.clone(),
                    derivative,
                    tail,
                }
            })
            .collect();
        PolarSampler { grid, modes }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn radial(&self, m: &ModeSampler, r: f64) -> f64 {
        if r <= self.grid.r_max() {
            cubic_interp(&self.grid, &m.values, m.n, r)
        } else {
            match m.tail {
                Tail::Zero => 0.0,
                Tail::Log { c_log, c_const } => c_log * r.ln() + c_const,
                Tail::Harmonic { c } => c * r.powi(-(m.n as i32)),
                Tail::Monomial { c, k } => c * r.powi(k),
            }
        }
    }

    fn radial_derivative(&self, m: &ModeSampler, r: f64) -> f64 {
        if r <= self.grid.r_max() {
            cubic_interp(&self.grid, &m.derivative, m.n + 1, r)
        } else {
            match m.tail {
                Tail::Zero => 0.0,
                Tail::Log { c_log, .. } => c_log / r,
                Tail::Harmonic { c } => -(m.n as f64) * c * r.powi(-(m.n as i32) - 1),
                Tail::Monomial { c, k } => k as f64 * c * r.powi(k - 1),
            }
        }
    }

    /// Field value at a Cartesian position.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let r = (x * x + y * y).sqrt();
        let theta = y.atan2(x);
        let mut acc = 0.0;
        for m in &self.modes {
            let ang = match m.parity {
                Parity::Cos => (m.n as f64 * theta).cos(),
                Parity::Sin => (m.n as f64 * theta).sin(),
            };
            acc += self.radial(m, r) * ang;
        }
        acc
    }

    /// Gradient at a Cartesian position.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let r = (x * x + y * y).sqrt().max(1e-12);
        let theta = y.atan2(x);
        let (ct, st) = (theta.cos(), theta.sin());
        let mut gx = 0.0;
        let mut gy = 0.0;
        for m in &self.modes {
            let nf = m.n as f64;
            let (ang, dang) = match m.parity {
                Parity::Cos => ((nf * theta).cos(), -nf * (nf * theta).sin()),
                Parity::Sin => ((nf * theta).sin(), nf * (nf * theta).cos()),
            };
            let fr = self.radial_derivative(m, r) * ang;
            let ft = self.radial(m, r) / r * dang;
            gx += fr * ct - ft * st;
            gy += fr * st + ft * ct;
        }
        (gx, gy)
    }

    /// Value of the mirror image: the field evaluated at
    /// (−x − 1/ε, y), the reflected-translated position.
    pub fn mirror_value(&self, x: f64, y: f64, eps: f64) -> f64 {
        self.value(-x - 1.0 / eps, y)
    }

    /// Gradient of the mirror image with respect to (x, y).
    pub fn mirror_gradient(&self, x: f64, y: f64, eps: f64) -> (f64, f64) {
        let (gx, gy) = self.gradient(-x - 1.0 / eps, y);
        (-gx, gy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base;
    use crate::polar::{DecayClass, RadialProfile};

    #[test]
    fn interpolates_gaussian_accurately() {
        let g = GridSpec::standard();
        let f = PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::GaussianWeighted, base::gaussian),
        )
        .unwrap();
        let s = PolarSampler::new(&f);
        for (x, y) in [(0.31, -0.7), (2.13, 1.9), (0.001, 0.002), (-6.4, 3.3)] {
            let r = f64::hypot(x, y);
            let err = (s.value(x, y) - base::gaussian(r)).abs();
            assert!(err < 1e-9, "at ({x},{y}): {err:e}");
            let (gx, gy) = s.gradient(x, y);
            let expect = -0.5 * base::gaussian(r);
            assert!((gx - x * expect).abs() < 1e-8, "∂x at ({x},{y})");
            assert!((gy - y * expect).abs() < 1e-8, "∂y at ({x},{y})");
        }
        // beyond the grid the Gaussian is zero
        assert_eq!(s.value(30.0, 0.0), 0.0);
    }

    #[test]
    fn stream_tail_continues_analytically() {
        let g = GridSpec::standard();
        let f = PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::Bounded, base::stream0),
        )
        .unwrap();
        let s = PolarSampler::new(&f);
        // beyond r_max the stream function is (1/2π)ln r − ln2/(2π):
        let r = 40.0;
        let expect = base::stream0(r);
        assert!((s.value(r, 0.0) - expect).abs() < 1e-10, "{} vs {expect}", s.value(r, 0.0));
        let (gx, _) = s.gradient(r, 0.0);
        assert!((gx - base::speed0(r)).abs() < 1e-12);
    }

    #[test]
    fn mode2_harmonic_tail() {
        // A mode-2 bounded profile that is exactly c/r² in the outer
        // region continues exactly.
        let g = GridSpec::standard();
        let f = PolarField::from_mode(
            2,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::Bounded, |r| {
                if r < 1.0 {
                    r * r * 0.25
                } else {
                    0.25 / (r * r)
                }
            }),
        )
        .unwrap();
        let s = PolarSampler::new(&f);
        let v = s.value(30.0, 0.0);
        assert!((v - 0.25 / 900.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_is_reflection_translation() {
        let g = GridSpec::standard();
        let f = PolarField::from_mode(
            0,
            Parity::Cos,
            RadialProfile::sample(g, DecayClass::Bounded, base::stream0),
        )
        .unwrap();
        let s = PolarSampler::new(&f);
        let eps = 0.1;
        let (x, y) = (1.2, -0.6);
        let direct = s.value(-x - 10.0, y);
        assert_eq!(s.mirror_value(x, y, eps), direct);
        // finite-difference check of the mirror gradient
        let h = 1e-5;
        let d1 = (s.mirror_value(x + h, y, eps) - s.mirror_value(x - h, y, eps)) / (2.0 * h);
        let (gx, _) = s.mirror_gradient(x, y, eps);
        assert!((gx - d1).abs() < 1e-8);
    }
}
