//! Adaptive Dormand-Prince 5(4) integrator for planar systems, with cubic
//! Hermite dense output. Integration may run backwards (`t_end < t_start`).

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

pub type State = [f64; 2];

pub struct OdeProblem<F> {
    pub rhs: F,
    pub t_start: f64,
    pub t_end: f64,
    pub initial_state: State,
    pub tol: f64,
}

/// Accepted steps of an integration; `eval` interpolates between them.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    ts: Vec<f64>,
    ys: Vec<State>,
    dys: Vec<State>,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

pub fn integrate_ode<F: Fn(f64, State) -> State>(problem: OdeProblem<F>) -> Result<OdeSolution> {
    let OdeProblem { rhs, t_start, t_end, initial_state, tol } = problem;
    if t_start == t_end || !(tol > 0.0) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(domain("ode problem needs t_start != t_end and tol > 0"));
    }
    let dir = (t_end - t_start).signum();
    let span = (t_end - t_start).abs();
    let mut t = t_start;
    let mut y = initial_state;
    let mut k0 = rhs(t, y);
    let mut h = dir * (span * 1e-3).min(0.01 * span.max(1e-3));
    let mut sol = OdeSolution { ts: alloc::vec![t], ys: alloc::vec![y], dys: alloc::vec![k0] };
    let min_step = 1e-14 * t_start.abs().max(t_end.abs()).max(1.0);
    while (t_end - t) * dir > 0.0 {
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let mut k = [[0.0; 2]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(t + C[s] * h, ys);
        }
        let mut ynew = y;
        for j in 0..6 {
            ynew[0] += h * A[6][j] * k[j][0];
            ynew[1] += h * A[6][j] * k[j][1];
        }
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            let sc = tol * (1.0 + y[i].abs().max(ynew[i].abs()));
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
        } else if err <= 1.0 {
            t += h;
            y = ynew;
            k0 = k[6];
            sol.ts.push(t);
            sol.ys.push(y);
            sol.dys.push(k0);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h.abs() < min_step {
            return Err(Error::StepFailure { t });
        }
    }
    Ok(sol)
}

impl OdeSolution {
    pub fn t_range(&self) -> (f64, f64) {
        (self.ts[0], self.ts[self.ts.len() - 1])
    }

    pub fn steps(&self) -> usize {
        self.ts.len() - 1
    }

    /// State at `t`, interpolated; `t` must lie inside the integrated span.
    pub fn eval(&self, t: f64) -> Result<State> {
        let n = self.ts.len();
        let forward = self.ts[n - 1] > self.ts[0];
        let (lo, hi) = if forward { (self.ts[0], self.ts[n - 1]) } else { (self.ts[n - 1], self.ts[0]) };
        if !(t >= lo && t <= hi) {
            return Err(Error::CacheRange { t });
        }
        // first index with ts[i] beyond t in the integration direction
        let i = self.ts.partition_point(|&s| if forward { s < t } else { s > t }).clamp(1, n - 1);
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            *o = h00 * self.ys[i - 1][k]
                + h10 * h * self.dys[i - 1][k]
                + h01 * self.ys[i][k]
                + h11 * h * self.dys[i][k];
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_motion() {
        let sol = integrate_ode(OdeProblem {
            rhs: |_t, y: State| [y[1], 0.0],
            t_start: 0.0,
            t_end: 1.0,
            initial_state: [0.0, 1.0],
            tol: 1e-10,
        })
        .unwrap();
        let y = sol.eval(1.0).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_forward_and_backward() {
        let sol = integrate_ode(OdeProblem {
            rhs: |_t, y: State| [y[1], y[0]],
            t_start: 0.0,
            t_end: 1.0,
            initial_state: [1.0, 1.0],
            tol: 1e-11,
        })
        .unwrap();
        let e = core::f64::consts::E;
        assert!((sol.eval(1.0).unwrap()[0] - e).abs() < 1e-9);
        assert!((sol.eval(0.37).unwrap()[0] - 0.37f64.exp()).abs() < 1e-8);
        let back = integrate_ode(OdeProblem {
            rhs: |_t, y: State| [y[1], y[0]],
            t_start: 1.0,
            t_end: 0.0,
            initial_state: [e, e],
            tol: 1e-11,
        })
        .unwrap();
        assert!((back.eval(0.0).unwrap()[0] - 1.0).abs() < 1e-9);
        assert!((back.eval(0.5).unwrap()[1] - 0.5f64.exp()).abs() < 1e-8);
        assert!(back.eval(1.5).is_err());
    }

    #[test]
    fn rejects_degenerate_problem() {
        let r = integrate_ode(OdeProblem {
            rhs: |_t, y: State| y,
            t_start: 1.0,
            t_end: 1.0,
            initial_state: [1.0, 0.0],
            tol: 1e-8,
        });
        assert!(r.is_err());
    }

    #[test]
    fn blow_up_reports_step_failure() {
        // y' = y^2 from y(0)=1 blows up at t=1
        let r = integrate_ode(OdeProblem {
            rhs: |_t, y: State| [y[0] * y[0], 0.0],
            t_start: 0.0,
            t_end: 2.0,
            initial_state: [1.0, 0.0],
            tol: 1e-10,
        });
        assert!(r.is_err());
    }
}
