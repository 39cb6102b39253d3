//! Time integration and attractor probing.
//!
//! The integrator is an embedded Dormand–Prince 5(4) pair with PI step-size
//! control and cubic-Hermite dense output. For dilution rates below 1e-3 the
//! system is integrated in rescaled time `τ = D·t`, which keeps spans and
//! controller scales sane for the near-zero-dilution regimes; reported times
//! are always model hours.

use crate::equilibria::{find_steady_states, SteadyState, SteadyStateKind};
use crate::error::{CoreError, Result};
use crate::model::{jacobian, vector_field, BioParams, OperatingPoint, State};
use crate::stability::{eigenvalues, eigenvector};

/// Default (absolute, relative) integration tolerances.
pub const DEFAULT_TOL: (f64, f64) = (1e-8, 1e-8);

/// Dilution rates below this integrate in rescaled time `τ = D·t`.
const TIME_RESCALE_BELOW: f64 = 1e-3;

/// Error-per-step control lets a decaying component overshoot zero by about
/// one absolute tolerance; accepted states are snapped back onto the
/// invariant washout plane within this band and integration aborts beyond it.
fn negativity_band(atol: f64) -> f64 {
    (10.0 * atol).max(1e-12)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub tolerance_used: (f64, f64),
}

impl Trajectory {
    pub fn last_state(&self) -> State {
        *self.states.last().expect("trajectory has samples")
    }

    /// CSV encoding: header `t,S,u,v`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,S,u,v\n");
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                t, x.s, x.u, x.v
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum AttractorKind {
    Equilibrium(State),
    LimitCycle { period: f64, orbit: Trajectory },
    Washout,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct AttractorReport {
    pub kind: AttractorKind,
    /// Integration time discarded before the attractor test, in hours.
    pub transient_time: f64,
}

// ---------------------------------------------------------------------------
// Dormand–Prince 5(4)
// ---------------------------------------------------------------------------

// stage times are implicit: the system is autonomous
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// fifth-order weights minus the embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type V3 = [f64; 3];

fn axpy(y: &mut V3, a: f64, x: &V3) {
    for i in 0..3 {
        y[i] += a * x[i];
    }
}

/// Clamp the sub-rounding negative values an accepted step may carry before
/// the right-hand side sees them.
fn clamped(x: &V3) -> State {
    let fix = |c: f64| if c < 0.0 && c > -1e-13 { 0.0 } else { c };
    State::new(fix(x[0]), fix(x[1]), fix(x[2]))
}

struct System<'a> {
    op: &'a OperatingPoint,
    p: &'a BioParams,
    /// σ = time_scale · t; the RHS is divided by the same factor.
    time_scale: f64,
}

impl System<'_> {
    fn new<'a>(op: &'a OperatingPoint, p: &'a BioParams) -> System<'a> {
        let time_scale = if op.d > 0.0 && op.d < TIME_RESCALE_BELOW {
            op.d
        } else {
            1.0
        };
        System { op, p, time_scale }
    }

    fn rhs(&self, x: &V3) -> V3 {
        let dx = vector_field(&clamped(x), self.op, self.p);
        let inv = 1.0 / self.time_scale;
        [dx.s * inv, dx.u * inv, dx.v * inv]
    }

    fn step(&self, y: &V3, k1: &V3, h: f64) -> (V3, V3, [V3; 7]) {
        let mut k = [[0.0; 3]; 7];
        k[0] = *k1;
        let stage = |k: &[V3; 7], coeffs: &[f64]| {
            let mut yn = *y;
            for (j, &a) in coeffs.iter().enumerate() {
                axpy(&mut yn, h * a, &k[j]);
            }
            yn
        };
        k[1] = self.rhs(&stage(&k, &A2));
        k[2] = self.rhs(&stage(&k, &A3));
        k[3] = self.rhs(&stage(&k, &A4));
        k[4] = self.rhs(&stage(&k, &A5));
        k[5] = self.rhs(&stage(&k, &A6));
        let mut y5 = *y;
        for (j, &b) in B.iter().enumerate() {
            axpy(&mut y5, h * b, &k[j]);
        }
        k[6] = self.rhs(&y5);
        let mut err = [0.0; 3];
        for (j, &e) in E.iter().enumerate() {
            axpy(&mut err, h * e, &k[j]);
        }
        (y5, err, k)
    }

    fn initial_step(&self, y0: &V3, f0: &V3, span: f64, atol: f64, rtol: f64) -> f64 {
        let sc = |y: f64| atol + rtol * y.abs();
        let d0 = (0..3)
            .map(|i| (y0[i] / sc(y0[i])).powi(2))
            .sum::<f64>()
            .sqrt();
        let d1 = (0..3)
            .map(|i| (f0[i] / sc(y0[i])).powi(2))
            .sum::<f64>()
            .sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6 * span.max(1.0)
        } else {
            0.01 * d0 / d1
        };
        let mut y1 = *y0;
        axpy(&mut y1, h0, f0);
        let f1 = self.rhs(&y1);
        let d2 = (0..3)
            .map(|i| ((f1[i] - f0[i]) / sc(y0[i])).powi(2))
            .sum::<f64>()
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) < 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

/// Cubic Hermite interpolation of a step `[t0, t1]`.
fn hermite(t0: f64, y0: &V3, f0: &V3, t1: f64, y1: &V3, f1: &V3, t: f64) -> V3 {
    let h = t1 - t0;
    let th = (t - t0) / h;
    let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    let h10 = th * (1.0 - th) * (1.0 - th);
    let h01 = th * th * (3.0 - 2.0 * th);
    let h11 = th * th * (th - 1.0);
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    }
    out
}

/// Accepted-step observer: `(t0, y0, f0, t1, y1, f1)` in integration time.
type StepObserver<'s> = dyn FnMut(f64, &V3, &V3, f64, &V3, &V3) + 's;

fn drive(
    sys: &System<'_>,
    y_start: V3,
    span: f64,
    tol: (f64, f64),
    observer: &mut StepObserver<'_>,
) -> Result<(V3, usize, usize)> {
    let (atol, rtol) = tol;
    if !(span > 0.0) || !(atol > 0.0) || !(rtol > 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "span and tolerances must be positive (span={span}, tol={tol:?})"
        )));
    }
    let upper = 10.0 * (sys.op.s_in + 1.0);
    let mut t = 0.0;
    let mut y = y_start;
    let mut f = sys.rhs(&y);
    let mut h = sys.initial_step(&y, &f, span, atol, rtol);
    let mut err_prev: f64 = 1.0;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut just_rejected = false;
    while t < span {
        if h < 1e-14 * span {
            return Err(CoreError::StepSizeUnderflow {
                t: t / sys.time_scale,
                h,
            });
        }
        h = h.min(span - t);
        let (y_new, err_vec, k) = sys.step(&y, &f, h);
        let mut err = 0.0;
        for i in 0..3 {
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err += (err_vec[i] / sc).powi(2);
        }
        err = (err / 3.0).sqrt();
        if err <= 1.0 {
            let t_new = t + h;
            let band = negativity_band(atol);
            if y_new.iter().any(|&c| c < -band || c > upper)
                || err_vec.iter().any(|e| !e.is_finite())
            {
                return Err(CoreError::Divergence {
                    t: t_new / sys.time_scale,
                });
            }
            let mut y_new = y_new;
            let mut f_new = k[6];
            let mut snapped = false;
            for c in &mut y_new {
                if *c < 0.0 {
                    *c = 0.0;
                    snapped = true;
                }
            }
            if snapped {
                f_new = sys.rhs(&y_new);
            }
            observer(t, &y, &f, t_new, &y_new, &f_new);
            t = t_new;
            y = y_new;
            f = f_new; // first-same-as-last, re-evaluated after a snap
            accepted += 1;
            let mut fac = 0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
            fac = fac.clamp(0.2, 5.0);
            if just_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            err_prev = err.max(1e-10);
            just_rejected = false;
        } else {
            rejected += 1;
            just_rejected = true;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
            if !err.is_finite() {
                h *= 0.1;
            }
        }
    }
    Ok((y, accepted, rejected))
}

/// Integrates the model from `init` for `t_end` hours with evenly spaced
/// dense output (`n_samples` points including both endpoints).
pub fn integrate_sampled(
    init: &State,
    op: &OperatingPoint,
    p: &BioParams,
    t_end: f64,
    tol: (f64, f64),
    n_samples: usize,
) -> Result<Trajectory> {
    if init.s < 0.0 || init.u < 0.0 || init.v < 0.0 {
        return Err(CoreError::NegativeConcentration(
            init.s.min(init.u).min(init.v),
        ));
    }
    op.validate()?;
    let sys = System::new(op, p);
    let span = t_end * sys.time_scale;
    let n = n_samples.max(2);
    let mut times = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    times.push(0.0);
    states.push(clamped(&init.to_array()));
    let mut next = 1usize;
    let mut observer = |t0: f64, y0: &V3, f0: &V3, t1: f64, y1: &V3, f1: &V3| {
        while next < n {
            let ts = span * next as f64 / (n - 1) as f64;
            if ts > t1 {
                break;
            }
            let ys = if ts >= t1 {
                *y1
            } else {
                hermite(t0, y0, f0, t1, y1, f1, ts)
            };
            times.push(ts / sys.time_scale);
            states.push(clamped(&ys));
            next += 1;
        }
    };
    let (_, accepted, rejected) = drive(&sys, init.to_array(), span, tol, &mut observer)?;
    let mut traj = Trajectory {
        times,
        states,
        accepted_steps: accepted,
        rejected_steps: rejected,
        tolerance_used: tol,
    };
    // guard against a short final step landing exactly on span
    if traj.times.len() < n {
        traj.times.push(t_end);
        let last = *traj.states.last().unwrap();
        traj.states.push(last);
    }
    Ok(traj)
}

/// Integrates with the default dense resolution of 2000 samples.
pub fn integrate(
    init: &State,
    op: &OperatingPoint,
    p: &BioParams,
    t_end: f64,
    tol: (f64, f64),
) -> Result<Trajectory> {
    integrate_sampled(init, op, p, t_end, tol, 2000)
}

/// Fixed-step fifth-order end state, for convergence studies.
pub fn integrate_fixed_step(
    init: &State,
    op: &OperatingPoint,
    p: &BioParams,
    t_end: f64,
    n_steps: usize,
) -> State {
    let sys = System::new(op, p);
    let span = t_end * sys.time_scale;
    let h = span / n_steps as f64;
    let mut y = init.to_array();
    let mut f = sys.rhs(&y);
    for _ in 0..n_steps {
        let (y_new, _, k) = sys.step(&y, &f, h);
        y = y_new;
        f = k[6];
    }
    clamped(&y)
}

// ---------------------------------------------------------------------------
// Poincaré sections
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct Section {
    point: V3,
    normal: V3,
}

impl Section {
    fn side(&self, x: &V3) -> f64 {
        (0..3).map(|i| (x[i] - self.point[i]) * self.normal[i]).sum()
    }
}

/// Integrates while recording positive-direction section crossings (hours).
fn integrate_events(
    start: &State,
    op: &OperatingPoint,
    p: &BioParams,
    t_end: f64,
    tol: (f64, f64),
    section: &Section,
) -> Result<(Vec<(f64, V3)>, State)> {
    let sys = System::new(op, p);
    let span = t_end * sys.time_scale;
    let mut crossings: Vec<(f64, V3)> = Vec::new();
    let mut observer = |t0: f64, y0: &V3, f0: &V3, t1: f64, y1: &V3, f1: &V3| {
        let g0 = section.side(y0);
        let g1 = section.side(y1);
        if !(g0 < 0.0 && g1 >= 0.0) {
            return;
        }
        let mut lo = t0;
        let mut hi = t1;
        // bisection on the dense interpolant
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let ym = hermite(t0, y0, f0, t1, y1, f1, mid);
            if section.side(&ym) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tc = 0.5 * (lo + hi);
        let yc = hermite(t0, y0, f0, t1, y1, f1, tc);
        crossings.push((tc / sys.time_scale, yc));
    };
    let (end, _, _) = drive(&sys, start.to_array(), span, tol, &mut observer)?;
    Ok((crossings, clamped(&end)))
}

fn centroid(states: &[State]) -> V3 {
    let mut c = [0.0; 3];
    for x in states {
        let a = x.to_array();
        for i in 0..3 {
            c[i] += a[i];
        }
    }
    for ci in &mut c {
        *ci /= states.len() as f64;
    }
    c
}

/// Dominant principal direction of the sample cloud, by power iteration on
/// the 3×3 covariance.
fn dominant_direction(states: &[State], c: &V3) -> Option<V3> {
    let mut cov = [[0.0; 3]; 3];
    for x in states {
        let a = x.to_array();
        for r in 0..3 {
            for col in 0..3 {
                cov[r][col] += (a[r] - c[r]) * (a[col] - c[col]);
            }
        }
    }
    let n = states.len() as f64;
    for row in &mut cov {
        for e in row.iter_mut() {
            *e /= n;
        }
    }
    let mut v = [1.0, 1.0, 1.0f64];
    for _ in 0..64 {
        let mut w = [0.0; 3];
        for r in 0..3 {
            for col in 0..3 {
                w[r] += cov[r][col] * v[col];
            }
        }
        let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        if norm < 1e-300 {
            return None;
        }
        for i in 0..3 {
            v[i] = w[i] / norm;
        }
    }
    Some(v)
}

// ---------------------------------------------------------------------------
// attractor probing
// ---------------------------------------------------------------------------

struct ProbeOutcome {
    report: AttractorReport,
    returns: usize,
}

fn near_equilibrium(x: &State, roots: &[SteadyState]) -> Option<SteadyState> {
    roots
        .iter()
        .find(|r| x.dist_inf(&r.state) < 1e-7 * r.state.inf_norm().max(1.0))
        .copied()
}

fn probe_impl(
    init: &State,
    op: &OperatingPoint,
    p: &BioParams,
    budget: f64,
    tol: (f64, f64),
) -> Result<ProbeOutcome> {
    let roots = find_steady_states(op, p)?;
    let transient = 0.6 * budget;
    let make = |kind: AttractorKind| AttractorReport {
        kind,
        transient_time: transient,
    };

    // transient discard, with a coarse tail to test convergence direction
    let warm = integrate_sampled(init, op, p, transient, tol, 256)?;
    let x1 = warm.last_state();
    if let Some(root) = near_equilibrium(&x1, &roots) {
        // lock on only when the distance is still shrinking
        let tail: Vec<f64> = warm.states[warm.states.len().saturating_sub(8)..]
            .iter()
            .map(|x| x.dist_inf(&root.state))
            .collect();
        if tail.windows(2).all(|w| w[1] <= w[0] + 1e-12) {
            let kind = if root.kind == SteadyStateKind::Washout {
                AttractorKind::Washout
            } else {
                AttractorKind::Equilibrium(root.state)
            };
            return Ok(ProbeOutcome {
                report: make(kind),
                returns: 0,
            });
        }
    }

    // orbit geometry from a medium window
    let geometry_span = 0.15 * budget;
    let geo = integrate_sampled(&x1, op, p, geometry_span, tol, 2048)?;
    let c = centroid(&geo.states);
    let amplitude = geo
        .states
        .iter()
        .map(|x| x.dist_inf(&State::from_array(c)))
        .fold(0.0, f64::max);
    let x2 = geo.last_state();
    if amplitude < 1e-8 * x2.inf_norm().max(1.0) {
        let kind = match near_equilibrium(&x2, &roots) {
            Some(root) if root.kind == SteadyStateKind::Washout => AttractorKind::Washout,
            Some(root) => AttractorKind::Equilibrium(root.state),
            None => AttractorKind::Undetermined,
        };
        return Ok(ProbeOutcome {
            report: make(kind),
            returns: 0,
        });
    }
    let Some(normal) = dominant_direction(&geo.states, &c) else {
        return Ok(ProbeOutcome {
            report: make(AttractorKind::Undetermined),
            returns: 0,
        });
    };
    let section = Section { point: c, normal };

    // measurement window with event detection
    let measure_span = budget - transient - geometry_span;
    let (crossings, end) = integrate_events(&x2, op, p, measure_span, tol, &section)?;
    let returns = crossings.len().saturating_sub(1);
    if crossings.len() >= 6 {
        let k = crossings.len();
        let last = &crossings[k - 6..];
        let gaps: Vec<f64> = last.windows(2).map(|w| w[1].0 - w[0].0).collect();
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let spread = gaps
            .iter()
            .map(|g| (g - mean).abs())
            .fold(0.0, f64::max);
        let contracted = last
            .windows(2)
            .last()
            .map(|w| {
                let d: f64 = (0..3)
                    .map(|i| (w[1].1[i] - w[0].1[i]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                d < 1e-4 * amplitude.max(1e-12)
            })
            .unwrap_or(false);
        if mean > 0.0 && spread < 1e-3 * mean && contracted {
            // the reported orbit spans the exact final return pair, so it
            // closes to the return-map gap rather than the period-average error
            let last_return = crossings[k - 1].0 - crossings[k - 2].0;
            let orbit = integrate_sampled(
                &State::from_array(crossings[k - 2].1),
                op,
                p,
                last_return,
                tol,
                512,
            )?;
            return Ok(ProbeOutcome {
                report: make(AttractorKind::LimitCycle {
                    period: mean,
                    orbit,
                }),
                returns,
            });
        }
    }
    if let Some(root) = near_equilibrium(&end, &roots) {
        let kind = if root.kind == SteadyStateKind::Washout {
            AttractorKind::Washout
        } else {
            AttractorKind::Equilibrium(root.state)
        };
        return Ok(ProbeOutcome {
            report: make(kind),
            returns,
        });
    }
    if end.u + end.v < 1e-10 {
        return Ok(ProbeOutcome {
            report: make(AttractorKind::Washout),
            returns,
        });
    }
    Ok(ProbeOutcome {
        report: make(AttractorKind::Undetermined),
        returns,
    })
}

/// Classifies the attractor reached from `init` within an integration budget
/// of `budget` hours: equilibrium lock-on, limit-cycle detection through a
/// Poincaré return map, or washout.
pub fn attractor_probe(
    init: &State,
    op: &OperatingPoint,
    p: &BioParams,
    budget: f64,
) -> Result<AttractorReport> {
    Ok(probe_impl(init, op, p, budget, DEFAULT_TOL)?.report)
}

/// Limit-cycle period reached from `seed`, requiring at least five section
/// returns with relative spread below 1e-3.
pub fn cycle_period(
    op: &OperatingPoint,
    p: &BioParams,
    seed: &State,
    budget: f64,
) -> Result<f64> {
    let outcome = probe_impl(seed, op, p, budget, DEFAULT_TOL)?;
    match outcome.report.kind {
        AttractorKind::LimitCycle { period, .. } if outcome.returns >= 5 => Ok(period),
        _ => Err(CoreError::PeriodUnresolved {
            returns: outcome.returns,
        }),
    }
}

/// A state displaced off a steady state along its leading unstable direction.
pub fn unstable_seed(
    ss: &SteadyState,
    op: &OperatingPoint,
    p: &BioParams,
    rel_offset: f64,
) -> Result<State> {
    let j = jacobian(&ss.state, op, p);
    let eig = eigenvalues(&j)?;
    let leader = eig
        .into_iter()
        .max_by(|x, y| x.re.partial_cmp(&y.re).unwrap())
        .unwrap();
    let v = eigenvector(&j, leader);
    let mut dir = [v[0].re, v[1].re, v[2].re];
    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    if norm < 1e-12 {
        dir = [v[0].im, v[1].im, v[2].im];
    }
    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2])
        .sqrt()
        .max(1e-300);
    let delta = rel_offset * ss.state.inf_norm().max(1e-6);
    let place = |sign: f64| {
        State::new(
            ss.state.s + sign * delta * dir[0] / norm,
            ss.state.u + sign * delta * dir[1] / norm,
            ss.state.v + sign * delta * dir[2] / norm,
        )
    };
    let x = place(1.0);
    if x.s >= 0.0 && x.u >= 0.0 && x.v >= 0.0 {
        return Ok(x);
    }
    let x = place(-1.0);
    Ok(State::new(x.s.max(0.0), x.u.max(0.0), x.v.max(0.0)))
}

/// Probes the operating point `(s_in, d)` from a seed just off the
/// stable-capable coexistence branch and reports whether no limit cycle of
/// period at most `period_cap` was found, with a one-line probe note.
pub(crate) fn period_beyond_cap(
    s_in: f64,
    d: f64,
    p: &BioParams,
    period_cap: f64,
) -> Result<(bool, String)> {
    let budget = (20.0 * period_cap).max(4000.0);
    let op = OperatingPoint::new(s_in, d);
    let states = find_steady_states(&op, p)?;
    let Some(branch) = states
        .iter()
        .find(|e| e.kind == SteadyStateKind::Branch1)
    else {
        return Ok((true, format!("S_in={s_in}: no coexistence branch")));
    };
    let seed = unstable_seed(branch, &op, p, 1e-3)?;
    let outcome = probe_impl(&seed, &op, p, budget, DEFAULT_TOL)?;
    Ok(match &outcome.report.kind {
        AttractorKind::LimitCycle { period, .. } => (
            *period > period_cap,
            format!("S_in={s_in}: cycle, period {period:.3}"),
        ),
        AttractorKind::Equilibrium(_) => (true, format!("S_in={s_in}: settles to an equilibrium")),
        AttractorKind::Washout => (true, format!("S_in={s_in}: washout")),
        AttractorKind::Undetermined => (
            true,
            format!(
                "S_in={s_in}: unresolved ({} returns); period beyond budget",
                outcome.returns
            ),
        ),
    })
}

/// Bisects the inflow concentration for the point where the limit cycle's
/// period outgrows `period_cap` (the homoclinic proxy). The bracket must
/// separate "cycle with period ≤ cap" from "no such cycle".
pub fn homoclinic_locate(
    d: f64,
    bracket: (f64, f64),
    p: &BioParams,
    period_cap: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) || !(period_cap > 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "bad homoclinic bracket {bracket:?} or cap {period_cap}"
        )));
    }
    let mut log: Vec<String> = Vec::new();
    let probe = |s_in: f64, log: &mut Vec<String>| -> Result<bool> {
        let (beyond, note) = period_beyond_cap(s_in, d, p, period_cap)?;
        log.push(note);
        Ok(beyond)
    };
    let f_lo = probe(lo, &mut log)?;
    let f_hi = probe(hi, &mut log)?;
    if f_lo == f_hi {
        return Err(CoreError::Inconclusive(format!(
            "period predicate identical at both bracket ends: {}",
            log.join("; ")
        )));
    }
    while hi - lo >= 5e-3 {
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut log)? == f_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
