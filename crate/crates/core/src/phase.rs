//! Phase-space points tagged with their coordinate chart.

use crate::charts::ChartId;
use crate::error::{Error, Result};

/// A point (q, p) in a 2n-dimensional phase space, n = 2 or 3, expressed in
/// a specific chart. Storage is padded to three slots; the unused slot of a
/// planar point stays at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    chart: ChartId,
    q: [f64; 3],
    p: [f64; 3],
}

impl PhasePoint {
    /// Build a point, validating finiteness, slice lengths and the chart's
    /// strict open domain (r > 0, tau > 0, alpha > 0 where applicable).
    pub fn new(chart: ChartId, q: &[f64], p: &[f64]) -> Result<Self> {
        let n = chart.dim();
        if q.len() != n || p.len() != n {
            return Err(Error::DimensionMismatch {
                lhs: q.len().max(p.len()),
                rhs: n,
            });
        }
        if q.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase point coordinates".into()));
        }
        if !chart.contains(q, 0.0) {
            return Err(Error::Domain(format!(
                "configuration outside the open domain of chart {}",
                chart.name()
            )));
        }
        let mut qs = [0.0; 3];
        let mut ps = [0.0; 3];
        qs[..n].copy_from_slice(q);
        ps[..n].copy_from_slice(p);
        Ok(PhasePoint {
            chart,
            q: qs,
            p: ps,
        })
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    /// Degrees of freedom.
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Configuration coordinates (length = dim).
    pub fn q(&self) -> &[f64] {
        &self.q[..self.dim()]
    }

    /// Conjugate momenta (length = dim).
    pub fn p(&self) -> &[f64] {
        &self.p[..self.dim()]
    }

    /// Padded storage, used by chart maps and observables.
    pub(crate) fn q_raw(&self) -> &[f64; 3] {
        &self.q
    }

    pub(crate) fn p_raw(&self) -> &[f64; 3] {
        &self.p
    }
}
