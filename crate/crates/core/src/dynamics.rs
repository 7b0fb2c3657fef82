//! Structure-preserving time integration of Hamiltonian flows.
//!
//! The default method is the implicit midpoint rule: symplectic, symmetric,
//! second order, and applicable to the non-separable p-q coupling
//! V(q) p_z^2 where explicit splittings do not apply. A two-stage
//! Gauss-Legendre scheme provides fourth order, and classical RK4 serves as
//! the non-symplectic reference. Stage equations are solved by fixed-point
//! iteration to [`SOLVER_TOL`] plus one polishing sweep; a damped Newton
//! step with a finite-difference Jacobian of the (exact) vector field takes
//! over if the iteration stalls.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{p_lane, q_lane, LANES};
use crate::observable::{hamiltonian_vector_field, Observable};
use crate::phase::PhasePoint;
use crate::tolerances::{FLOW_MARGIN, SOLVER_MAX_ITER, SOLVER_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ImplicitMidpoint,
    Gauss4,
    Rk4,
}

impl Method {
    pub fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "midpoint" => Method::ImplicitMidpoint,
            "gauss4" => Method::Gauss4,
            "rk4" => Method::Rk4,
            other => return Err(Error::Argument(format!("unknown method `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::ImplicitMidpoint => "midpoint",
            Method::Gauss4 => "gauss4",
            Method::Rk4 => "rk4",
        }
    }
}

/// Admissibility predicate checked after every accepted step.
pub type DomainPredicate = Arc<dyn Fn(&PhasePoint) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct IntegrateOptions {
    pub method: Method,
    pub step: f64,
    pub t_end: f64,
    /// Optional admissible-region predicate; a violation stops the run with
    /// the exit time.
    pub domain: Option<DomainPredicate>,
    /// Margin handed to observable evaluation along the flow.
    pub margin: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
}

impl IntegrateOptions {
    pub fn new(step: f64, t_end: f64, method: Method) -> Self {
        IntegrateOptions {
            method,
            step,
            t_end,
            domain: None,
            margin: FLOW_MARGIN,
            solver_tol: SOLVER_TOL,
            solver_max_iter: SOLVER_MAX_ITER,
        }
    }

    pub fn with_domain(mut self, domain: DomainPredicate) -> Self {
        self.domain = Some(domain);
        self
    }
}

/// A stored flow: strictly monotone times (increasing for forward runs),
/// states in one chart, and monitor series aligned with the times. Steps
/// are uniform except possibly the final one, shortened to land on t_end.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub monitors: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn monitor_series(&self, name: &str) -> Option<&[f64]> {
        self.monitors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Drift summary of one monitored observable. The relative drift divides
/// by |initial| (floored at 1e-12 for near-zero integrals).
#[derive(Clone, Debug)]
pub struct MonitorSummary {
    pub name: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    pub relative_drift: f64,
}

#[derive(Clone, Copy)]
struct State {
    q: [f64; 3],
    p: [f64; 3],
}

impl State {
    fn from_point(z: &PhasePoint) -> Self {
        State {
            q: *z.q_raw(),
            p: *z.p_raw(),
        }
    }

    fn to_point(self, template: &PhasePoint) -> Result<PhasePoint> {
        let n = template.dim();
        PhasePoint::new(template.chart(), &self.q[..n], &self.p[..n])
    }

    fn axpy(mut self, a: f64, f: &[f64; LANES], n: usize) -> Self {
        for i in 0..n {
            self.q[i] += a * f[q_lane(i)];
            self.p[i] += a * f[p_lane(i)];
        }
        self
    }

    fn delta_inf(&self, other: &State, n: usize) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..n {
            d = d.max((self.q[i] - other.q[i]).abs());
            d = d.max((self.p[i] - other.p[i]).abs());
        }
        d
    }
}

struct Field<'a> {
    h: &'a Observable,
    template: PhasePoint,
    margin: f64,
}

impl<'a> Field<'a> {
    fn eval(&self, s: &State) -> Result<[f64; LANES]> {
        let z = s.to_point(&self.template)?;
        hamiltonian_vector_field(self.h, &z, self.margin)
    }
}

/// Integrate the flow of `h` from `z0`. The trajectory keeps the chart of
/// `z0`; canonical chart lifts make the equations of motion chart-agnostic.
pub fn integrate(h: &Observable, z0: &PhasePoint, opts: &IntegrateOptions) -> Result<Trajectory> {
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::Argument("step must be positive".into()));
    }
    if !opts.t_end.is_finite() || opts.t_end == 0.0 {
        return Err(Error::Argument("t_end must be finite and nonzero".into()));
    }
    let n = z0.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            lhs: h.dim(),
            rhs: n,
        });
    }
    let direction = opts.t_end.signum();
    let h_step = opts.step * direction;
    // ceil(t_end/h) steps of size h, the last one shortened to land on t_end.
    let steps = ((opts.t_end.abs() / opts.step).ceil() as usize).max(1);

    if let Some(domain) = &opts.domain {
        if !domain(z0) {
            return Err(Error::DomainExit { t: 0.0 });
        }
    }

    let field = Field {
        h,
        template: *z0,
        margin: opts.margin,
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(*z0);
    let mut current = State::from_point(z0);

    for k in 0..steps {
        let last = k + 1 == steps;
        let t_next = if last {
            opts.t_end
        } else {
            (k + 1) as f64 * h_step
        };
        let h_k = if last {
            opts.t_end - k as f64 * h_step
        } else {
            h_step
        };
        let next = match opts.method {
            Method::ImplicitMidpoint => step_midpoint(&field, &current, h_k, n, opts)?,
            Method::Gauss4 => step_gauss4(&field, &current, h_k, n, opts)?,
            Method::Rk4 => step_rk4(&field, &current, h_k, n)?,
        };
        // A state that cannot be represented in the chart anymore (left the
        // open domain or went non-finite) counts as a domain exit.
        let point = next
            .to_point(z0)
            .map_err(|_| Error::DomainExit { t: t_next })?;
        if let Some(domain) = &opts.domain {
            if !domain(&point) {
                return Err(Error::DomainExit { t: t_next });
            }
        }
        times.push(t_next);
        states.push(point);
        current = next;
    }

    Ok(Trajectory {
        times,
        states,
        monitors: Vec::new(),
    })
}

fn step_rk4(field: &Field, z: &State, h: f64, n: usize) -> Result<State> {
    let k1 = field.eval(z)?;
    let k2 = field.eval(&z.axpy(0.5 * h, &k1, n))?;
    let k3 = field.eval(&z.axpy(0.5 * h, &k2, n))?;
    let k4 = field.eval(&z.axpy(h, &k3, n))?;
    let mut out = *z;
    for i in 0..n {
        out.q[i] +=
            h / 6.0 * (k1[q_lane(i)] + 2.0 * k2[q_lane(i)] + 2.0 * k3[q_lane(i)] + k4[q_lane(i)]);
        out.p[i] +=
            h / 6.0 * (k1[p_lane(i)] + 2.0 * k2[p_lane(i)] + 2.0 * k3[p_lane(i)] + k4[p_lane(i)]);
    }
    Ok(out)
}

/// Midpoint stage: solve m = z + (h/2) f(m), then z' = z + h f(m).
fn step_midpoint(
    field: &Field,
    z: &State,
    h: f64,
    n: usize,
    opts: &IntegrateOptions,
) -> Result<State> {
    let mid = solve_stage(field, z, 0.5 * h, n, opts)?;
    let f = field.eval(&mid)?;
    Ok(z.axpy(h, &f, n))
}

/// Iterates below this multiple of the solver tolerance (scaled by the
/// state magnitude) count as converged-to-rounding when the fixed point
/// stops improving: successive substitution typically ends in a tiny
/// floating-point cycle rather than exactly repeating itself.
fn rounding_floor(z: &State, n: usize, tol: f64) -> f64 {
    let mut norm: f64 = 1.0;
    for i in 0..n {
        norm = norm.max(z.q[i].abs()).max(z.p[i].abs());
    }
    200.0 * tol * norm
}

/// Solve m = z + a f(m) by fixed-point iteration with one polishing sweep,
/// falling back to a finite-difference Newton iteration when the
/// contraction genuinely stalls.
fn solve_stage(
    field: &Field,
    z: &State,
    a: f64,
    n: usize,
    opts: &IntegrateOptions,
) -> Result<State> {
    let floor = rounding_floor(z, n, opts.solver_tol);
    let mut m = *z;
    let mut last_delta = f64::INFINITY;
    for iter in 0..opts.solver_max_iter {
        let f = field.eval(&m)?;
        let next = z.axpy(a, &f, n);
        let delta = next.delta_inf(&m, n);
        m = next;
        let stagnant = iter > 2 && delta >= 0.9 * last_delta;
        if delta <= opts.solver_tol || (stagnant && delta <= floor) {
            let f = field.eval(&m)?;
            return Ok(z.axpy(a, &f, n));
        }
        if stagnant {
            // Contraction too slow; switch to Newton on g(m) = m - z - a f(m).
            return solve_stage_newton(field, z, a, n, opts, m);
        }
        last_delta = delta;
    }
    if last_delta <= floor {
        let f = field.eval(&m)?;
        return Ok(z.axpy(a, &f, n));
    }
    Err(Error::Convergence(format!(
        "fixed point stalled at delta = {last_delta:.3e}"
    )))
}

fn solve_stage_newton(
    field: &Field,
    z: &State,
    a: f64,
    n: usize,
    opts: &IntegrateOptions,
    start: State,
) -> Result<State> {
    let dim = 2 * n;
    let mut m = start;
    let pack = |s: &State| -> Vec<f64> {
        let mut v = Vec::with_capacity(dim);
        v.extend_from_slice(&s.q[..n]);
        v.extend_from_slice(&s.p[..n]);
        v
    };
    let unpack = |v: &[f64]| -> State {
        let mut s = State {
            q: [0.0; 3],
            p: [0.0; 3],
        };
        s.q[..n].copy_from_slice(&v[..n]);
        s.p[..n].copy_from_slice(&v[n..dim]);
        s
    };
    for _ in 0..opts.solver_max_iter {
        let f = field.eval(&m)?;
        let g = {
            let target = z.axpy(a, &f, n);
            let mv = pack(&m);
            let tv = pack(&target);
            mv.iter().zip(tv).map(|(a, b)| a - b).collect::<Vec<_>>()
        };
        let gnorm = g.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if gnorm <= opts.solver_tol {
            let f = field.eval(&m)?;
            return Ok(z.axpy(a, &f, n));
        }
        // Jacobian of g by central differences of the exact vector field.
        let fd = crate::tolerances::SECOND_ORDER_FD_STEP;
        let mv = pack(&m);
        let mut jac = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for col in 0..dim {
            let mut vp = mv.clone();
            let mut vm = mv.clone();
            vp[col] += fd;
            vm[col] -= fd;
            let fp = field.eval(&unpack(&vp))?;
            let fm = field.eval(&unpack(&vm))?;
            for row in 0..dim {
                let lane = if row < n {
                    q_lane(row)
                } else {
                    p_lane(row - n)
                };
                let dfd = (fp[lane] - fm[lane]) / (2.0 * fd);
                jac[(row, col)] = (if row == col { 1.0 } else { 0.0 }) - a * dfd;
            }
        }
        let rhs = nalgebra::DVector::from_vec(g);
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Convergence("singular Newton system".into()))?;
        let mut next = mv;
        for i in 0..dim {
            next[i] -= delta[i];
        }
        m = unpack(&next);
    }
    Err(Error::Convergence("Newton fallback exhausted".into()))
}

/// Gauss-Legendre two-stage coefficients (order four).
const GAUSS_A: [[f64; 2]; 2] = [
    [0.25, 0.25 - 0.288_675_134_594_812_88],
    [0.25 + 0.288_675_134_594_812_88, 0.25],
];

fn step_gauss4(
    field: &Field,
    z: &State,
    h: f64,
    n: usize,
    opts: &IntegrateOptions,
) -> Result<State> {
    let floor = rounding_floor(z, n, opts.solver_tol).max(
        // stage values are field magnitudes, not state magnitudes
        200.0 * opts.solver_tol,
    );
    let mut k1 = field.eval(z)?;
    let mut k2 = k1;
    let mut converged = false;
    let mut last_delta = f64::INFINITY;
    for iter in 0..opts.solver_max_iter {
        let s1 = z
            .axpy(h * GAUSS_A[0][0], &k1, n)
            .axpy(h * GAUSS_A[0][1], &k2, n);
        let s2 = z
            .axpy(h * GAUSS_A[1][0], &k1, n)
            .axpy(h * GAUSS_A[1][1], &k2, n);
        let n1 = field.eval(&s1)?;
        let n2 = field.eval(&s2)?;
        let mut delta: f64 = 0.0;
        for lane in 0..LANES {
            delta = delta.max((n1[lane] - k1[lane]).abs());
            delta = delta.max((n2[lane] - k2[lane]).abs());
        }
        k1 = n1;
        k2 = n2;
        let stagnant = iter > 2 && delta >= 0.9 * last_delta;
        if delta <= opts.solver_tol || (stagnant && delta <= floor) {
            converged = true;
            break;
        }
        if stagnant {
            return Err(Error::Convergence(format!(
                "Gauss stages stalled (delta = {delta:.3e})"
            )));
        }
        last_delta = delta;
    }
    if !converged {
        return Err(Error::Convergence("Gauss stage iteration exhausted".into()));
    }
    // one polishing sweep
    let s1 = z
        .axpy(h * GAUSS_A[0][0], &k1, n)
        .axpy(h * GAUSS_A[0][1], &k2, n);
    let s2 = z
        .axpy(h * GAUSS_A[1][0], &k1, n)
        .axpy(h * GAUSS_A[1][1], &k2, n);
    k1 = field.eval(&s1)?;
    k2 = field.eval(&s2)?;
    Ok(z.axpy(0.5 * h, &k1, n).axpy(0.5 * h, &k2, n))
}

/// Fill monitor series for the given observables and summarize drift.
pub fn monitor(
    traj: &mut Trajectory,
    observables: &[&Observable],
    margin: f64,
) -> Result<Vec<MonitorSummary>> {
    let mut out = Vec::with_capacity(observables.len());
    for obs in observables {
        let mut series = Vec::with_capacity(traj.states.len());
        for z in &traj.states {
            series.push(obs.eval(z, margin)?);
        }
        let initial = series[0];
        let max_abs_drift = series
            .iter()
            .fold(0.0_f64, |acc, v| acc.max((v - initial).abs()));
        let denom = initial.abs().max(1e-12);
        out.push(MonitorSummary {
            name: obs.name().to_string(),
            initial,
            max_abs_drift,
            relative_drift: max_abs_drift / denom,
        });
        traj.monitors.push((obs.name().to_string(), series));
    }
    Ok(out)
}
