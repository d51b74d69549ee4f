//! Adaptive Dormand-Prince 5(4) integration with cubic-Hermite dense output.
//!
//! The integrator is deliberately small: two-component systems, scalar
//! tolerance, dense output through the stored step endpoints and slopes.

use super::SpectralError;

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
/// Cap on the step size: accepted steps feed a cubic-Hermite dense output
/// whose error grows like h^4/384, so steps are kept small even where the
/// order-5 error estimate would allow giant ones.
const MAX_STEP: f64 = 0.02;

/// Right-hand side of a first-order two-component system `y' = f(t, y)`.
pub trait Rhs {
    fn eval(&self, t: f64, y: [f64; 2]) -> Result<[f64; 2], SpectralError>;
}

impl<F> Rhs for F
where
    F: Fn(f64, [f64; 2]) -> Result<[f64; 2], SpectralError>,
{
    fn eval(&self, t: f64, y: [f64; 2]) -> Result<[f64; 2], SpectralError> {
        self(t, y)
    }
}

/// Accepted integration nodes with slopes; evaluation between nodes is cubic
/// Hermite, fourth-order accurate and well below the step tolerance for the
/// step sizes an order-5 method chooses at tolerance `1e-10`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<[f64; 2]>,
    pub fs: Vec<[f64; 2]>,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// Dense evaluation at `t` inside the integrated span.
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let n = self.ts.len();
        debug_assert!(n >= 1);
        if t <= self.ts[0] {
            return self.ys[0];
        }
        if t >= self.ts[n - 1] {
            return self.ys[n - 1];
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.ts[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.ts[hi] - self.ts[lo];
        let s = (t - self.ts[lo]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut y = [0.0; 2];
        for i in 0..2 {
            y[i] = h00 * self.ys[lo][i]
                + h10 * h * self.fs[lo][i]
                + h01 * self.ys[hi][i]
                + h11 * h * self.fs[hi][i];
        }
        y
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, optionally stopping as soon
/// as `stop` returns true at an accepted node.
pub fn integrate<R: Rhs>(
    f: &R,
    t0: f64,
    y0: [f64; 2],
    t_end: f64,
    tol: f64,
    stop: Option<&dyn Fn(f64, [f64; 2]) -> bool>,
) -> Result<Trajectory, SpectralError> {
    assert!(t_end > t0);
    let span = t_end - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f.eval(t, y)?;
    let mut h = (span / 100.0).clamp(1e-6, MAX_STEP);
    let mut out = Trajectory { ts: vec![t], ys: vec![y], fs: vec![k1] };

    let mut rejected_in_a_row = 0usize;
    while t < t_end {
        if h < 1e-13 * span.max(1.0) {
            return Err(SpectralError::IntegrationFailure {
                at: t,
                reason: "step size underflow".into(),
            });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let (y_next, err, k_last) = dp45_step(f, t, y, k1, h)?;
        let scale_err = {
            let mut s: f64 = 0.0;
            for i in 0..2 {
                let sc = tol + tol * y[i].abs().max(y_next[i].abs());
                s += (err[i] / sc) * (err[i] / sc);
            }
            (s / 2.0).sqrt()
        };
        if scale_err <= 1.0 {
            t += h;
            y = y_next;
            k1 = k_last; // FSAL
            out.ts.push(t);
            out.ys.push(y);
            out.fs.push(k1);
            rejected_in_a_row = 0;
            if let Some(stop_fn) = stop {
                if stop_fn(t, y) {
                    return Ok(out);
                }
            }
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 200 {
                return Err(SpectralError::IntegrationFailure {
                    at: t,
                    reason: "repeated step rejection".into(),
                });
            }
        }
        let scale = if scale_err == 0.0 {
            MAX_SCALE
        } else {
            (SAFETY * scale_err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
        };
        h = (h * scale).min(MAX_STEP);
    }
    Ok(out)
}

/// One Dormand-Prince 5(4) step; returns (y5, error estimate, FSAL slope).
#[allow(clippy::type_complexity)]
fn dp45_step<R: Rhs>(
    f: &R,
    t: f64,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
) -> Result<([f64; 2], [f64; 2], [f64; 2]), SpectralError> {
    let yk = |y: [f64; 2], coefs: &[(f64, [f64; 2])]| {
        let mut out = y;
        for (c, k) in coefs {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k2 = f.eval(t + h / 5.0, yk(y, &[(1.0 / 5.0, k1)]))?;
    let k3 = f.eval(t + 3.0 * h / 10.0, yk(y, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]))?;
    let k4 = f.eval(
        t + 4.0 * h / 5.0,
        yk(y, &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)]),
    )?;
    let k5 = f.eval(
        t + 8.0 * h / 9.0,
        yk(
            y,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
    )?;
    let k6 = f.eval(
        t + h,
        yk(
            y,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
    )?;
    let y5 = yk(
        y,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = f.eval(t + h, y5)?;
    let y4 = yk(
        y,
        &[
            (5179.0 / 57600.0, k1),
            (7571.0 / 16695.0, k3),
            (393.0 / 640.0, k4),
            (-92097.0 / 339200.0, k5),
            (187.0 / 2100.0, k6),
            (1.0 / 40.0, k7),
        ],
    );
    let err = [y5[0] - y4[0], y5[1] - y4[1]];
    Ok((y5, err, k7))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn harmonic(_t: f64, y: [f64; 2]) -> Result<[f64; 2], SpectralError> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn integrates_harmonic_oscillator() {
        let tr = integrate(&harmonic, 0.0, [0.0, 1.0], PI, 1e-10, None).unwrap();
        let y = tr.eval(PI / 2.0);
        assert!((y[0] - 1.0).abs() < 1e-9);
        assert!(y[1].abs() < 1e-9);
        let end = tr.eval(PI);
        assert!(end[0].abs() < 1e-9);
    }

    #[test]
    fn dense_output_accuracy() {
        let tr = integrate(&harmonic, 0.0, [0.0, 1.0], 2.0 * PI, 1e-10, None).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let t = 2.0 * PI * i as f64 / 1000.0;
            let y = tr.eval(t);
            worst = worst.max((y[0] - t.sin()).abs());
        }
        assert!(worst < 1e-8, "dense sup error {}", worst);
    }

    #[test]
    fn stop_condition_halts_early() {
        let tr = integrate(
            &harmonic,
            0.0,
            [0.0, 1.0],
            10.0 * PI,
            1e-10,
            Some(&|_t, y: [f64; 2]| y[0] < 0.0),
        )
        .unwrap();
        assert!(tr.t_end() < 4.0); // first sign change just past pi
    }
}
