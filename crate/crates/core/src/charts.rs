//! Coordinate charts and their canonical lifts to phase space.
//!
//! Each chart is a point transformation `q_cart = F(q_chart)` together with
//! the unique momentum lift that keeps the transformation canonical:
//! `p_chart = J_F^T p_cart`. The parabolic-cylindrical pair covers the two
//! rotated parabolic systems; the second one is obtained from the first by a
//! quarter-turn of the plane.
//!
//! All maps are written over [`Scalar`], so they can run either on plain
//! values or inside jets, which is what makes brackets of chart-native
//! observables exact at Cartesian points (and vice versa).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{p_lane, q_lane, Jet1, Scalar};
use crate::phase::PhasePoint;
use crate::tolerances::DEFAULT_MARGIN;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartId {
    /// Planar Cartesian (x, y).
    Cartesian2,
    /// Spatial Cartesian (x, y, z).
    Cartesian3,
    /// (r, phi, z): x = r cos phi, y = r sin phi.
    Cylindrical,
    /// (tau, sigma, z) with tau > 0: x = (tau^2 - sigma^2)/2, y = tau sigma.
    ParabolicCylI,
    /// (alpha, beta, z) with alpha > 0: x = alpha beta, y = (alpha^2 - beta^2)/2.
    ParabolicCylII,
}

impl ChartId {
    pub fn dim(self) -> usize {
        match self {
            ChartId::Cartesian2 => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChartId::Cartesian2 => "cartesian2",
            ChartId::Cartesian3 => "cartesian3",
            ChartId::Cylindrical => "cylindrical",
            ChartId::ParabolicCylI => "parabolic_i",
            ChartId::ParabolicCylII => "parabolic_ii",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "cartesian2" => ChartId::Cartesian2,
            "cartesian3" => ChartId::Cartesian3,
            "cylindrical" => ChartId::Cylindrical,
            "parabolic_i" => ChartId::ParabolicCylI,
            "parabolic_ii" => ChartId::ParabolicCylII,
            other => return Err(Error::Argument(format!("unknown chart `{other}`"))),
        })
    }

    pub fn is_cartesian(self) -> bool {
        matches!(self, ChartId::Cartesian2 | ChartId::Cartesian3)
    }

    /// Open-domain predicate with a configurable distance from the chart's
    /// own singular set (coordinate degeneracies only; system denominators
    /// are checked by the owning system).
    pub fn contains(self, q: &[f64], margin: f64) -> bool {
        if q.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            ChartId::Cartesian2 | ChartId::Cartesian3 => true,
            ChartId::Cylindrical => q[0] > margin,
            ChartId::ParabolicCylI => q[0] > margin,
            ChartId::ParabolicCylII => q[0] > margin,
        }
    }
}

/// Chart point map plus canonical momentum lift, towards Cartesian.
/// No domain checks; callers guard margins on the f64 side.
pub(crate) fn lift_to_cartesian<S: Scalar>(
    chart: ChartId,
    q: &[S; 3],
    p: &[S; 3],
) -> ([S; 3], [S; 3]) {
    match chart {
        ChartId::Cartesian2 | ChartId::Cartesian3 => (*q, *p),
        ChartId::Cylindrical => {
            let (r, phi) = (q[0], q[1]);
            let (pr, pphi) = (p[0], p[1]);
            let (c, s) = (phi.cos(), phi.sin());
            let x = r * c;
            let y = r * s;
            let px = c * pr - s * pphi / r;
            let py = s * pr + c * pphi / r;
            ([x, y, q[2]], [px, py, p[2]])
        }
        ChartId::ParabolicCylI => {
            let (tau, sig) = (q[0], q[1]);
            let (ptau, psig) = (p[0], p[1]);
            let half = S::constant(0.5);
            let x = half * (tau * tau - sig * sig);
            let y = tau * sig;
            let den = tau * tau + sig * sig;
            let px = (tau * ptau - sig * psig) / den;
            let py = (sig * ptau + tau * psig) / den;
            ([x, y, q[2]], [px, py, p[2]])
        }
        ChartId::ParabolicCylII => {
            let (a, b) = (q[0], q[1]);
            let (pa, pb) = (p[0], p[1]);
            let half = S::constant(0.5);
            let x = a * b;
            let y = half * (a * a - b * b);
            let den = a * a + b * b;
            let px = (b * pa + a * pb) / den;
            let py = (a * pa - b * pb) / den;
            ([x, y, q[2]], [px, py, p[2]])
        }
    }
}

/// Inverse map from Cartesian into `target`, positive branch for the
/// parabolic radicals (tau = sqrt(r + x), alpha = sqrt(r + y)).
pub(crate) fn lower_from_cartesian<S: Scalar>(
    target: ChartId,
    q: &[S; 3],
    p: &[S; 3],
) -> ([S; 3], [S; 3]) {
    let (x, y) = (q[0], q[1]);
    let (px, py) = (p[0], p[1]);
    match target {
        ChartId::Cartesian2 | ChartId::Cartesian3 => (*q, *p),
        ChartId::Cylindrical => {
            let r = (x * x + y * y).sqrt();
            let phi = y.atan2(x);
            let pr = (x * px + y * py) / r;
            let pphi = x * py - y * px;
            ([r, phi, q[2]], [pr, pphi, p[2]])
        }
        ChartId::ParabolicCylI => {
            let r = (x * x + y * y).sqrt();
            let tau = (r + x).sqrt();
            let sig = y / tau;
            let ptau = tau * px + sig * py;
            let psig = tau * py - sig * px;
            ([tau, sig, q[2]], [ptau, psig, p[2]])
        }
        ChartId::ParabolicCylII => {
            let r = (x * x + y * y).sqrt();
            let a = (r + y).sqrt();
            let b = x / a;
            let pa = b * px + a * py;
            let pb = a * px - b * py;
            ([a, b, q[2]], [pa, pb, p[2]])
        }
    }
}

/// Distance-to-singular-set guard for the inverse map at a Cartesian point.
fn image_ok(target: ChartId, x: f64, y: f64, margin: f64) -> bool {
    let r = x.hypot(y);
    match target {
        ChartId::Cartesian2 | ChartId::Cartesian3 => true,
        ChartId::Cylindrical => r > margin,
        // Branch cut: the closed half-line y = 0, x <= 0 (where tau -> 0).
        ChartId::ParabolicCylI => r + x > margin * margin,
        // Branch cut: the closed half-line x = 0, y <= 0 (where alpha -> 0).
        ChartId::ParabolicCylII => r + y > margin * margin,
    }
}

fn cartesian_of(dim: usize) -> ChartId {
    if dim == 2 {
        ChartId::Cartesian2
    } else {
        ChartId::Cartesian3
    }
}

/// Express `z` in the Cartesian chart of the same dimension. The lifted
/// coordinate and its momentum pass through unchanged.
pub fn to_cartesian(z: &PhasePoint, margin: f64) -> Result<PhasePoint> {
    let chart = z.chart();
    if chart.is_cartesian() {
        return Ok(*z);
    }
    if !chart.contains(z.q_raw(), margin) {
        return Err(Error::Domain(format!(
            "point in chart {} violates margin {margin}",
            chart.name()
        )));
    }
    let (q, p) = lift_to_cartesian::<f64>(chart, z.q_raw(), z.p_raw());
    PhasePoint::new(
        cartesian_of(chart.dim()),
        &q[..chart.dim()],
        &p[..chart.dim()],
    )
}

/// Express a Cartesian point in `target`. Fails outside the image of the
/// target chart (branch cuts and axis for the curvilinear charts).
pub fn from_cartesian(z: &PhasePoint, target: ChartId, margin: f64) -> Result<PhasePoint> {
    let chart = z.chart();
    if !chart.is_cartesian() {
        return Err(Error::Argument(format!(
            "from_cartesian expects a Cartesian point, got {}",
            chart.name()
        )));
    }
    if chart.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            lhs: chart.dim(),
            rhs: target.dim(),
        });
    }
    let (x, y) = (z.q_raw()[0], z.q_raw()[1]);
    if !image_ok(target, x, y, margin) {
        return Err(Error::Domain(format!(
            "Cartesian point ({x}, {y}) outside the image of chart {} (margin {margin})",
            target.name()
        )));
    }
    let (q, p) = lower_from_cartesian::<f64>(target, z.q_raw(), z.p_raw());
    PhasePoint::new(target, &q[..target.dim()], &p[..target.dim()])
}

/// Generic chart-to-chart conversion used by observable evaluation.
/// Passes through Cartesian; margins are checked on the value lanes.
pub(crate) fn convert<S: Scalar>(
    from: ChartId,
    to: ChartId,
    q: &[S; 3],
    p: &[S; 3],
    margin: f64,
) -> Result<([S; 3], [S; 3])> {
    if from == to {
        return Ok((*q, *p));
    }
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch {
            lhs: from.dim(),
            rhs: to.dim(),
        });
    }
    let qv = [q[0].value(), q[1].value(), q[2].value()];
    if !from.contains(&qv[..from.dim()], margin) {
        return Err(Error::Domain(format!(
            "point in chart {} violates margin {margin}",
            from.name()
        )));
    }
    let (qc, pc) = lift_to_cartesian(from, q, p);
    if to.is_cartesian() {
        return Ok((qc, pc));
    }
    if !image_ok(to, qc[0].value(), qc[1].value(), margin) {
        return Err(Error::Domain(format!(
            "point outside the image of chart {} (margin {margin})",
            to.name()
        )));
    }
    Ok(lower_from_cartesian(to, &qc, &pc))
}

/// Maximum deviation of the chart's coordinate/momentum functions from
/// canonical relations, measured with Cartesian-side brackets:
/// max over i, j of |{Q^i, P_j} - delta_ij|, |{Q^i, Q^j}|, |{P_i, P_j}|.
pub fn symplectomorphism_check(chart: ChartId, z: &PhasePoint) -> Result<f64> {
    if z.chart() != chart {
        return Err(Error::Argument(format!(
            "point is in chart {}, expected {}",
            z.chart().name(),
            chart.name()
        )));
    }
    let zc = to_cartesian(z, DEFAULT_MARGIN)?;
    let n = chart.dim();
    let mut qj = [Jet1::constant(0.0); 3];
    let mut pj = [Jet1::constant(0.0); 3];
    for i in 0..n {
        qj[i] = Jet1::variable(zc.q_raw()[i], q_lane(i));
        pj[i] = Jet1::variable(zc.p_raw()[i], p_lane(i));
    }
    let (cq, cp) = lower_from_cartesian::<Jet1>(chart, &qj, &pj);

    let bracket = |f: &Jet1, g: &Jet1| -> f64 {
        (0..n)
            .map(|i| f.grad[q_lane(i)] * g.grad[p_lane(i)] - f.grad[p_lane(i)] * g.grad[q_lane(i)])
            .sum()
    };

    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((bracket(&cq[i], &cp[j]) - delta).abs());
            worst = worst.max(bracket(&cq[i], &cq[j]).abs());
            worst = worst.max(bracket(&cp[i], &cp[j]).abs());
        }
    }
    if !worst.is_finite() {
        return Err(Error::NonFinite("symplectomorphism check".into()));
    }
    Ok(worst)
}
