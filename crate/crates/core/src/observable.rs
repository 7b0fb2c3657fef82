//! Named scalar phase-space functions and the Poisson-bracket engine.
//!
//! An [`Observable`] owns two monomorphizations of the same formula: one
//! over `f64` for plain values and one over [`Jet1`] for exact phase
//! gradients. Formulas are written in a native chart; evaluation at a point
//! in another chart converts the point through the canonical chart maps
//! first, inside the same scalar type, so gradients of pullbacks are exact
//! too.

use std::sync::Arc;

use crate::charts::{self, ChartId};
use crate::error::{Error, Result};
use crate::jet::{p_lane, q_lane, Jet1, LANES};
use crate::phase::PhasePoint;

type PlainFn = dyn Fn(&[f64; 3], &[f64; 3]) -> f64 + Send + Sync;
type JetFn = dyn Fn(&[Jet1; 3], &[Jet1; 3]) -> Jet1 + Send + Sync;

/// A named scalar function on phase space, evaluable on plain values and on
/// jets. `degree_in_p` tags momentum degree where meaningful (1 linear,
/// 2 quadratic plus lower); it is advisory, degree probes re-test it.
#[derive(Clone)]
pub struct Observable {
    name: String,
    chart: ChartId,
    degree_in_p: Option<u32>,
    plain: Arc<PlainFn>,
    jet: Arc<JetFn>,
}

impl std::fmt::Debug for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("chart", &self.chart)
            .field("degree_in_p", &self.degree_in_p)
            .finish()
    }
}

impl Observable {
    /// Build from the two monomorphizations of one formula. The `mk_obs!`
    /// macro in the catalog instantiates both from a single generic item.
    pub fn from_fns(
        name: impl Into<String>,
        chart: ChartId,
        degree_in_p: Option<u32>,
        plain: impl Fn(&[f64; 3], &[f64; 3]) -> f64 + Send + Sync + 'static,
        jet: impl Fn(&[Jet1; 3], &[Jet1; 3]) -> Jet1 + Send + Sync + 'static,
    ) -> Self {
        Observable {
            name: name.into(),
            chart,
            degree_in_p,
            plain: Arc::new(plain),
            jet: Arc::new(jet),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Chart the formula is written in.
    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn degree_in_p(&self) -> Option<u32> {
        self.degree_in_p
    }

    /// Evaluate at arbitrary padded arrays in the native chart. No domain or
    /// finiteness checks; used by degree probes and tensor extraction.
    pub(crate) fn eval_native_raw(&self, q: &[f64; 3], p: &[f64; 3]) -> f64 {
        (self.plain)(q, p)
    }

    fn check_dim(&self, z: &PhasePoint) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                lhs: z.dim(),
                rhs: self.dim(),
            });
        }
        Ok(())
    }

    /// Plain evaluation, converting `z` into the native chart if needed.
    pub fn eval(&self, z: &PhasePoint, margin: f64) -> Result<f64> {
        self.check_dim(z)?;
        let (q, p) = charts::convert::<f64>(z.chart(), self.chart, z.q_raw(), z.p_raw(), margin)?;
        let v = (self.plain)(&q, &p);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("observable `{}`", self.name)));
        }
        Ok(v)
    }

    /// Jet evaluation seeded on the 2n phase variables of `z`'s chart.
    /// The value lane equals [`Observable::eval`] bit for bit.
    pub fn eval_jet(&self, z: &PhasePoint, margin: f64) -> Result<Jet1> {
        self.check_dim(z)?;
        let n = z.dim();
        let mut qj = [Jet1::constant(0.0); 3];
        let mut pj = [Jet1::constant(0.0); 3];
        for i in 0..n {
            qj[i] = Jet1::variable(z.q_raw()[i], q_lane(i));
            pj[i] = Jet1::variable(z.p_raw()[i], p_lane(i));
        }
        let (q, p) = charts::convert::<Jet1>(z.chart(), self.chart, &qj, &pj, margin)?;
        let v = (self.jet)(&q, &p);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("observable `{}`", self.name)));
        }
        Ok(v)
    }
}

/// Exact phase gradient (dF/dq, dF/dp) at `z`, in `z`'s chart variables.
/// Lane layout follows [`crate::jet`]: `q^i` at lane i, `p_i` at lane 3+i.
pub fn grad_phase(f: &Observable, z: &PhasePoint, margin: f64) -> Result<[f64; LANES]> {
    Ok(f.eval_jet(z, margin)?.grad)
}

/// Canonical Poisson bracket {f, g} at `z`:
/// sum_i dF/dq^i dG/dp_i - dF/dp_i dG/dq^i, exact to rounding.
pub fn poisson_bracket(f: &Observable, g: &Observable, z: &PhasePoint, margin: f64) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            lhs: f.dim(),
            rhs: g.dim(),
        });
    }
    let fj = f.eval_jet(z, margin)?;
    let gj = g.eval_jet(z, margin)?;
    let mut acc = 0.0;
    for i in 0..z.dim() {
        acc += fj.grad[q_lane(i)] * gj.grad[p_lane(i)] - fj.grad[p_lane(i)] * gj.grad[q_lane(i)];
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite(format!(
            "bracket {{{}, {}}}",
            f.name(),
            g.name()
        )));
    }
    Ok(acc)
}

/// Hamiltonian vector field (dq/dt, dp/dt) = (dH/dp, -dH/dq) at `z`,
/// packed in jet-lane layout.
pub fn hamiltonian_vector_field(
    h: &Observable,
    z: &PhasePoint,
    margin: f64,
) -> Result<[f64; LANES]> {
    let jet = h.eval_jet(z, margin)?;
    let mut out = [0.0; LANES];
    for i in 0..z.dim() {
        out[q_lane(i)] = jet.grad[p_lane(i)];
        out[p_lane(i)] = -jet.grad[q_lane(i)];
    }
    Ok(out)
}
