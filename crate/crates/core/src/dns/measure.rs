//! Trajectory analysis: windowed speed fits, the speed deficit against
//! the quartic law, and the distance bound.

use serde::Serialize;

use crate::util::{linear_fit, log_log_slope};
use crate::{Error, Result};

use super::solver::Trajectory;

/// Speed and deficit at one aspect-ratio checkpoint.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedPoint {
    pub eps: f64,
    pub t: f64,
    /// Windowed regression slope of the vertical centroid, bias-corrected.
    pub speed: f64,
    /// 1 − speed/(point-vortex speed).
    pub deficit: f64,
    /// The predicted deficit 2πα ε⁴.
    pub predicted: f64,
    /// deficit / predicted.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub alpha_used: f64,
    pub image_speed_bias: f64,
    pub points: Vec<SpeedPoint>,
    /// log–log slope of the deficit against ε.
    pub deficit_slope: f64,
    /// max over samples of l1_ratio / (νt/d²).
    pub l1_bound_ratio: f64,
    /// max relative drift of the right-half circulation along the run.
    pub circulation_drift: f64,
}

/// Analyze a trajectory against the expansion's speed law.
pub fn measure(traj: &Trajectory, alpha: f64, checkpoints: &[f64]) -> Result<ValidationReport> {
    if traj.samples.len() < 8 {
        return Err(Error::Domain("trajectory too short for a speed fit".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let v_point = traj.gamma / (two_pi * traj.d);
    let t_adv = traj.d * traj.d / traj.gamma;

    let mut points = Vec::new();
    for &eps in checkpoints {
        let t_c = (eps * traj.d).powi(2) / traj.nu;
        // window: a few advective times around the checkpoint
        let half = 2.5 * t_adv;
        let mut ts = Vec::new();
        let mut zs = Vec::new();
        for s in &traj.samples {
            if (s.t - t_c).abs() <= half {
                ts.push(s.t);
                zs.push(s.z2);
            }
        }
        if ts.len() < 4 {
            continue;
        }
        let (slope, _) = linear_fit(&ts, &zs);
        let speed = slope - traj.image_speed_bias;
        let deficit = 1.0 - speed / v_point;
        let predicted = two_pi * alpha * eps.powi(4);
        points.push(SpeedPoint {
            eps,
            t: t_c,
            speed,
            deficit,
            predicted,
            ratio: deficit / predicted,
        });
    }
    if points.len() < 3 {
        return Err(Error::Domain(
            "not enough checkpoints inside the trajectory for a deficit fit".into(),
        ));
    }
    // fit the deficit order on checkpoints with a positive measured
    // deficit (a sign flip means the measurement window left the
    // asymptotic regime)
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in &points {
        if p.deficit > 0.0 {
            xs.push(p.eps);
            ys.push(p.deficit);
        }
    }
    if xs.len() < 3 {
        return Err(Error::Domain(
            "fewer than three positive-deficit checkpoints".into(),
        ));
    }
    let deficit_slope = log_log_slope(&xs, &ys);

    let mut l1_bound_ratio = 0.0f64;
    for s in &traj.samples {
        if s.nu_t_over_d2 > 0.0 {
            l1_bound_ratio = l1_bound_ratio.max(s.l1_ratio / s.nu_t_over_d2);
        }
    }
    let c0 = traj.samples[0].circulation_right;
    let circulation_drift = traj
        .samples
        .iter()
        .map(|s| (s.circulation_right - c0).abs() / c0.abs().max(1e-300))
        .fold(0.0, f64::max);

    Ok(ValidationReport {
        alpha_used: alpha,
        image_speed_bias: traj.image_speed_bias,
        points,
        deficit_slope,
        l1_bound_ratio,
        circulation_drift,
    })
}

/// Trajectory samples as CSV, with a rolling bias-corrected speed and
/// deficit column where a full regression window is available (empty
/// fields near the ends).
pub fn trajectory_csv(traj: &Trajectory, header_meta: &str) -> String {
    let two_pi = 2.0 * std::f64::consts::PI;
    let v_point = traj.gamma / (two_pi * traj.d);
    let t_adv = traj.d * traj.d / traj.gamma;
    let half = 2.5 * t_adv;
    let t_first = traj.samples.first().map(|s| s.t).unwrap_or(0.0);
    let t_last = traj.samples.last().map(|s| s.t).unwrap_or(0.0);
    let mut out = String::new();
    out.push_str(&format!("# {header_meta}\n"));
    out.push_str(&format!("# image_speed_bias={}\n", traj.image_speed_bias));
    out.push_str("t,eps,z2,speed,deficit,l1_ratio,nu_t_over_d2,circulation_right\n");
    for s in &traj.samples {
        let (speed, deficit) = if s.t - half >= t_first && s.t + half <= t_last {
            let mut ts = Vec::new();
            let mut zs = Vec::new();
            for q in &traj.samples {
                if (q.t - s.t).abs() <= half {
                    ts.push(q.t);
                    zs.push(q.z2);
                }
            }
            if ts.len() >= 4 {
                let (slope, _) = linear_fit(&ts, &zs);
                let v = slope - traj.image_speed_bias;
                (format!("{v}"), format!("{}", 1.0 - v / v_point))
            } else {
                (String::new(), String::new())
            }
        } else {
            (String::new(), String::new())
        };
        out.push_str(&format!(
            "{},{},{},{speed},{deficit},{},{},{}\n",
            s.t, s.eps, s.z2, s.l1_ratio, s.nu_t_over_d2, s.circulation_right
        ));
    }
    out
}
