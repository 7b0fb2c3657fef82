//! Riemannian-side machinery: metrics, the lift to one extra dimension,
//! connection coefficients, geodesic residuals, curvature probes and
//! Killing-structure checks.

use std::sync::Arc;

use crate::charts::ChartId;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::jet::{q_lane, Jet1, Scalar};
use crate::observable::{poisson_bracket, Observable};
use crate::phase::PhasePoint;
use crate::tolerances::{CURVATURE_FD_STEP, FLOW_MARGIN};

type PlainMat = dyn Fn(&[f64; 3], &mut [[f64; 3]; 3]) + Send + Sync;
type JetMat = dyn Fn(&[Jet1; 3], &mut [[Jet1; 3]; 3]) + Send + Sync;
type PlainScalar = dyn Fn(&[f64; 3]) -> f64 + Send + Sync;
type JetScalar = dyn Fn(&[Jet1; 3]) -> Jet1 + Send + Sync;

/// A configuration-space scalar field evaluable on plain values and jets.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    plain: Arc<PlainScalar>,
    jet: Arc<JetScalar>,
}

impl ScalarField {
    pub fn from_fns(
        dim: usize,
        plain: impl Fn(&[f64; 3]) -> f64 + Send + Sync + 'static,
        jet: impl Fn(&[Jet1; 3]) -> Jet1 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            dim,
            plain: Arc::new(plain),
            jet: Arc::new(jet),
        }
    }

    /// The planar potential of a catalog family with coefficients `k`.
    pub fn family_potential(family: crate::catalog::Family, k: [f64; 3]) -> Self {
        let ka = k;
        ScalarField::from_fns(
            2,
            move |q: &[f64; 3]| crate::catalog::planar_potential(family, &ka, q[0], q[1]),
            move |q: &[Jet1; 3]| crate::catalog::planar_potential(family, &ka, q[0], q[1]),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, q: &[f64; 3]) -> f64 {
        (self.plain)(q)
    }
}

/// Dense symmetric metric-component field q -> g_ij(q). All catalog metrics
/// are diagonal, but the lift accepts arbitrary planar bases.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    plain: Arc<PlainMat>,
    jet: Arc<JetMat>,
}

impl MetricField {
    pub fn from_fns(
        dim: usize,
        plain: impl Fn(&[f64; 3], &mut [[f64; 3]; 3]) + Send + Sync + 'static,
        jet: impl Fn(&[Jet1; 3], &mut [[Jet1; 3]; 3]) + Send + Sync + 'static,
    ) -> Self {
        MetricField {
            dim,
            plain: Arc::new(plain),
            jet: Arc::new(jet),
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        MetricField::from_fns(
            dim,
            move |_q, g| {
                *g = [[0.0; 3]; 3];
                for (i, row) in g.iter_mut().enumerate().take(dim) {
                    row[i] = 1.0;
                }
            },
            move |_q, g| {
                *g = [[Jet1::constant(0.0); 3]; 3];
                for (i, row) in g.iter_mut().enumerate().take(dim) {
                    row[i] = Jet1::constant(1.0);
                }
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Metric components at q.
    pub fn components(&self, q: &[f64; 3]) -> Result<[[f64; 3]; 3]> {
        let mut g = [[0.0; 3]; 3];
        (self.plain)(q, &mut g);
        let n = self.dim;
        for row in g.iter().take(n) {
            for v in row.iter().take(n) {
                if !v.is_finite() {
                    return Err(Error::NonFinite("metric components".into()));
                }
            }
        }
        Ok(g)
    }

    /// Symmetry and positive-definiteness probe (leading principal minors).
    pub fn positive_definite_at(&self, q: &[f64; 3]) -> Result<bool> {
        let g = self.components(q)?;
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                if (g[i][j] - g[j][i]).abs() > 1e-12 * (1.0 + g[i][j].abs()) {
                    return Ok(false);
                }
            }
        }
        let m1 = g[0][0];
        let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let m3 = if n == 3 { det3(&g) } else { 1.0 };
        Ok(m1 > 0.0 && m2 > 0.0 && m3 > 0.0)
    }
}

fn det3(g: &[[f64; 3]; 3]) -> f64 {
    g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
}

/// Solve g x = b for a small symmetric system with partial pivoting,
/// generically over the scalar type (pivots compared by value magnitude).
fn solve_small<S: Scalar>(n: usize, g: &[[S; 3]; 3], b: &[S; 3]) -> Result<[S; 3]> {
    let mut a = *g;
    let mut x = *b;
    for col in 0..n {
        let mut piv = col;
        for row in (col + 1)..n {
            if a[row][col].value().abs() > a[piv][col].value().abs() {
                piv = row;
            }
        }
        if a[piv][col].value().abs() < 1e-300 {
            return Err(Error::SingularMetric(format!(
                "pivot {:.3e} in {}x{} solve",
                a[piv][col].value(),
                n,
                n
            )));
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            x[row] = x[row] - f * x[col];
        }
    }
    for col in (0..n).rev() {
        for k in (col + 1)..n {
            x[col] = x[col] - a[col][k] * x[k];
        }
        x[col] = x[col] / a[col][col];
    }
    Ok(x)
}

fn inverse_small(n: usize, g: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let mut inv = [[0.0; 3]; 3];
    for j in 0..n {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        let col = solve_small(n, g, &e)?;
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Ok(inv)
}

/// Lift a planar metric and a positive potential into one extra dimension:
/// block metric diag(g2, 1/V) and the quadratic Hamiltonian
/// (p' g2^{-1} p + V p_z^2)/2. Points where V <= 0 evaluate non-finite and
/// are rejected by the usual evaluation guards.
pub fn eisenhart_lift(g2: &MetricField, v: &ScalarField) -> Result<(MetricField, Observable)> {
    if g2.dim() != 2 || v.dim() != 2 {
        return Err(Error::Argument(
            "the lift takes a planar metric and a planar potential".into(),
        ));
    }
    let (g2p, g2j) = (g2.plain.clone(), g2.jet.clone());
    let (vp, vj) = (v.plain.clone(), v.jet.clone());

    let metric3 = MetricField::from_fns(
        3,
        {
            let (g2p, vp) = (g2p.clone(), vp.clone());
            move |q, g| {
                let mut base = [[0.0; 3]; 3];
                g2p(q, &mut base);
                *g = [[0.0; 3]; 3];
                for i in 0..2 {
                    for j in 0..2 {
                        g[i][j] = base[i][j];
                    }
                }
                let vq = vp(q);
                g[2][2] = if vq > 0.0 { 1.0 / vq } else { f64::NAN };
            }
        },
        {
            let (g2j, vj) = (g2j.clone(), vj.clone());
            move |q, g| {
                let mut base = [[Jet1::constant(0.0); 3]; 3];
                g2j(q, &mut base);
                *g = [[Jet1::constant(0.0); 3]; 3];
                for i in 0..2 {
                    for j in 0..2 {
                        g[i][j] = base[i][j];
                    }
                }
                let vq = vj(q);
                g[2][2] = if vq.value() > 0.0 {
                    Jet1::constant(1.0) / vq
                } else {
                    Jet1::constant(f64::NAN)
                };
            }
        },
    );

    #[allow(clippy::type_complexity)]
    fn lifted_energy<S: Scalar>(
        g2: &dyn Fn(&[S; 3], &mut [[S; 3]; 3]),
        v: &dyn Fn(&[S; 3]) -> S,
        q: &[S; 3],
        p: &[S; 3],
    ) -> S {
        let mut base = [[S::constant(0.0); 3]; 3];
        g2(q, &mut base);
        let rhs = [p[0], p[1], S::constant(0.0)];
        let vel = match solve_small(2, &base, &rhs) {
            Ok(x) => x,
            Err(_) => return S::constant(f64::NAN),
        };
        let vq = v(q);
        if vq.value() <= 0.0 {
            return S::constant(f64::NAN);
        }
        S::constant(0.5) * (p[0] * vel[0] + p[1] * vel[1] + vq * p[2] * p[2])
    }

    let energy = Observable::from_fns(
        "T",
        ChartId::Cartesian3,
        Some(2),
        move |q: &[f64; 3], p: &[f64; 3]| lifted_energy::<f64>(&*g2p, &*vp, q, p),
        move |q: &[Jet1; 3], p: &[Jet1; 3]| lifted_energy::<Jet1>(&*g2j, &*vj, q, p),
    );

    Ok((metric3, energy))
}

/// Connection coefficients of the second kind,
/// Gamma^i_jk = g^il (d_k g_lj + d_j g_lk - d_l g_jk)/2,
/// with metric derivatives taken by jets (exact).
pub fn christoffel(g: &MetricField, q: &[f64; 3]) -> Result<[[[f64; 3]; 3]; 3]> {
    let n = g.dim();
    let mut qj = [Jet1::constant(0.0); 3];
    for i in 0..n {
        qj[i] = Jet1::variable(q[i], q_lane(i));
    }
    let mut comp = [[Jet1::constant(0.0); 3]; 3];
    (g.jet)(&qj, &mut comp);
    // dg[l][j][k] = d g_lj / d q^k
    let mut dg = [[[0.0; 3]; 3]; 3];
    let mut gval = [[0.0; 3]; 3];
    for l in 0..n {
        for j in 0..n {
            if !comp[l][j].is_finite() {
                return Err(Error::NonFinite("metric components".into()));
            }
            gval[l][j] = comp[l][j].value;
            for k in 0..n {
                dg[l][j][k] = comp[l][j].grad[q_lane(k)];
            }
        }
    }
    let ginv = inverse_small(n, &gval)?;
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ginv[i][l] * (dg[l][j][k] + dg[l][k][j] - dg[j][k][l]);
                }
                gamma[i][j][k] = 0.5 * acc;
            }
        }
    }
    Ok(gamma)
}

/// Max over interior trajectory samples of |qdd^i + Gamma^i_jk qd^j qd^k|,
/// with velocities g^{-1} p and accelerations from a five-point stencil
/// along the stored flow.
pub fn geodesic_residual(g: &MetricField, traj: &Trajectory) -> Result<f64> {
    let n = g.dim();
    let states = &traj.states;
    if states.len() < 5 {
        return Err(Error::Argument(
            "geodesic residual needs at least five stored states".into(),
        ));
    }
    let h = traj.times[1] - traj.times[0];
    // The stencil needs uniform spacing; a shortened final step is dropped.
    let mut uniform = states.len();
    for i in 1..traj.times.len() {
        if ((traj.times[i] - traj.times[i - 1]) - h).abs() > 1e-12 * (1.0 + h.abs()) {
            uniform = i;
            break;
        }
    }
    if uniform < 5 {
        return Err(Error::Argument(
            "geodesic residual needs at least five uniformly spaced states".into(),
        ));
    }
    let mut vels: Vec<[f64; 3]> = Vec::with_capacity(uniform);
    for z in &states[..uniform] {
        let mut qv = [0.0; 3];
        qv[..n].copy_from_slice(&z.q()[..n]);
        let comp = g.components(&qv)?;
        let mut pv = [0.0; 3];
        pv[..n].copy_from_slice(&z.p()[..n]);
        vels.push(solve_small(n, &comp, &pv)?);
    }
    let mut worst: f64 = 0.0;
    for idx in 2..uniform - 2 {
        let mut qv = [0.0; 3];
        qv[..n].copy_from_slice(&states[idx].q()[..n]);
        let gamma = christoffel(g, &qv)?;
        for i in 0..n {
            // fourth-order central difference of the velocity
            let qdd = (-vels[idx + 2][i] + 8.0 * vels[idx + 1][i] - 8.0 * vels[idx - 1][i]
                + vels[idx - 2][i])
                / (12.0 * h);
            let mut pull = 0.0;
            for j in 0..n {
                for k in 0..n {
                    pull += gamma[i][j][k] * vels[idx][j] * vels[idx][k];
                }
            }
            worst = worst.max((qdd + pull).abs());
        }
    }
    Ok(worst)
}

/// Killing tensor components K^ij(q) of a homogeneous quadratic momentum
/// polynomial, extracted by polarization in the observable's native chart:
/// K^ii = F(q, e_i), K^ij = (F(q, e_i + e_j) - F(q, e_i) - F(q, e_j))/2.
pub fn extract_killing_tensor(f: &Observable, q: &[f64; 3]) -> Result<[[f64; 3]; 3]> {
    let n = f.dim();
    probe_homogeneous_quadratic(f, q)?;
    let basis = |i: usize| -> [f64; 3] {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        e
    };
    let mut k = [[0.0; 3]; 3];
    for i in 0..n {
        k[i][i] = f.eval_native_raw(q, &basis(i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = basis(i);
            e[j] = 1.0;
            let mixed = f.eval_native_raw(q, &e);
            k[i][j] = 0.5 * (mixed - k[i][i] - k[j][j]);
            k[j][i] = k[i][j];
        }
    }
    for row in k.iter().take(n) {
        for v in row.iter().take(n) {
            if !v.is_finite() {
                return Err(Error::NonFinite("killing tensor components".into()));
            }
        }
    }
    Ok(k)
}

/// Homogeneity degree of F in the momenta at q: |F(q, s p) - s^d F(q, p)|
/// must vanish for several scalings, with d = 1 or 2.
fn probe_homogeneous_degree(f: &Observable, q: &[f64; 3]) -> Result<u32> {
    let probe = [0.7, -0.4, 0.9];
    let base = f.eval_native_raw(q, &probe);
    'degree: for d in [2u32, 1] {
        for s in [-2.0, 0.5, 3.0f64] {
            let scaled = [probe[0] * s, probe[1] * s, probe[2] * s];
            let got = f.eval_native_raw(q, &scaled);
            let want = s.powi(d as i32) * base;
            if !(got - want).is_finite() || (got - want).abs() > 1e-9 * (1.0 + want.abs()) {
                continue 'degree;
            }
        }
        return Ok(d);
    }
    Err(Error::Degree(format!(
        "`{}` is not homogeneous of degree 1 or 2 in p",
        f.name()
    )))
}

fn probe_homogeneous_quadratic(f: &Observable, q: &[f64; 3]) -> Result<()> {
    match probe_homogeneous_degree(f, q)? {
        2 => Ok(()),
        d => Err(Error::Degree(format!(
            "`{}` is homogeneous of degree {d}, expected 2",
            f.name()
        ))),
    }
}

/// Bracket form of the Killing certification: max over samples of |{F, T}|.
/// F must probe as a homogeneous momentum polynomial of degree one (Killing
/// vector) or two (Killing tensor) at each sample.
pub fn killing_check(f: &Observable, t: &Observable, samples: &[PhasePoint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in samples {
        let znat = if z.chart() == f.chart() {
            *z
        } else {
            let zc = crate::charts::to_cartesian(z, FLOW_MARGIN)?;
            crate::charts::from_cartesian(&zc, f.chart(), FLOW_MARGIN)?
        };
        let mut qv = [0.0; 3];
        qv[..znat.dim()].copy_from_slice(znat.q());
        probe_homogeneous_degree(f, &qv)?;
        worst = worst.max(poisson_bracket(f, t, z, FLOW_MARGIN)?.abs());
    }
    Ok(worst)
}

/// Dimension of the space of valence-p Killing tensors on a constant
/// curvature n-manifold: C(n+p, p+1) C(n+p-1, p) / n.
pub fn killing_dimension(n: u32, p: u32) -> Result<u64> {
    if n < 1 || p < 1 {
        return Err(Error::Argument(format!(
            "killing_dimension needs n >= 1 and p >= 1 (got n = {n}, p = {p})"
        )));
    }
    let num =
        binomial(u64::from(n + p), u64::from(p + 1)) * binomial(u64::from(n + p - 1), u64::from(p));
    debug_assert_eq!(num % u64::from(n), 0);
    Ok(num / u64::from(n))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as u64
}

/// Scalar curvature at q, contracted from connection coefficients whose
/// derivatives are taken by Richardson-extrapolated central differences
/// (curvature is a diagnostic, never flow-critical).
pub fn scalar_curvature_probe(g: &MetricField, q: &[f64; 3]) -> Result<f64> {
    let n = g.dim();
    let gval = g.components(q)?;
    let ginv = inverse_small(n, &gval)?;
    let gamma = christoffel(g, q)?;

    // dgamma[i][j][k][m] = d Gamma^i_jk / d q^m
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    let h = CURVATURE_FD_STEP;
    for m in 0..n {
        let diff = |step: f64| -> Result<[[[f64; 3]; 3]; 3]> {
            let mut qp = *q;
            let mut qm = *q;
            qp[m] += step;
            qm[m] -= step;
            let gp = christoffel(g, &qp)?;
            let gm = christoffel(g, &qm)?;
            let mut out = [[[0.0; 3]; 3]; 3];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out[i][j][k] = (gp[i][j][k] - gm[i][j][k]) / (2.0 * step);
                    }
                }
            }
            Ok(out)
        };
        let d1 = diff(h)?;
        let d2 = diff(h / 2.0)?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    dgamma[i][j][k][m] = (4.0 * d2[i][j][k] - d1[i][j][k]) / 3.0;
                }
            }
        }
    }

    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            let mut ric = 0.0;
            for i in 0..n {
                ric += dgamma[i][j][k][i] - dgamma[i][i][k][j];
                for p in 0..n {
                    ric += gamma[i][i][p] * gamma[p][j][k] - gamma[i][j][p] * gamma[p][i][k];
                }
            }
            scalar += ginv[j][k] * ric;
        }
    }
    if !scalar.is_finite() {
        return Err(Error::NonFinite("scalar curvature".into()));
    }
    Ok(scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, Family, Tier};
    use crate::tolerances::DEFAULT_MARGIN;

    fn polar_metric() -> MetricField {
        // diag(1, r^2) on the half-plane r > 0
        MetricField::from_fns(
            2,
            |q, g| {
                *g = [[0.0; 3]; 3];
                g[0][0] = 1.0;
                g[1][1] = q[0] * q[0];
            },
            |q, g| {
                *g = [[Jet1::constant(0.0); 3]; 3];
                g[0][0] = Jet1::constant(1.0);
                g[1][1] = q[0] * q[0];
            },
        )
    }

    fn sphere_metric() -> MetricField {
        // diag(1, sin^2 theta): unit sphere, scalar curvature 2
        MetricField::from_fns(
            2,
            |q, g| {
                *g = [[0.0; 3]; 3];
                g[0][0] = 1.0;
                g[1][1] = q[0].sin() * q[0].sin();
            },
            |q, g| {
                *g = [[Jet1::constant(0.0); 3]; 3];
                g[0][0] = Jet1::constant(1.0);
                g[1][1] = q[0].sin() * q[0].sin();
            },
        )
    }

    #[test]
    fn degenerate_metrics_report_singular_solves() {
        let g = MetricField::from_fns(
            2,
            |_q, g| {
                *g = [[0.0; 3]; 3];
            },
            |_q, g| {
                *g = [[Jet1::constant(0.0); 3]; 3];
            },
        );
        let err = christoffel(&g, &[1.0, 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::SingularMetric(_)));
    }

    #[test]
    fn flat_metrics_have_zero_christoffels() {
        let g = MetricField::euclidean(3);
        let gamma = christoffel(&g, &[0.4, -1.0, 2.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(gamma[i][j][k], 0.0);
                }
            }
        }
    }

    #[test]
    fn polar_christoffels_match_hand_values() {
        let gamma = christoffel(&polar_metric(), &[2.0, 0.7, 0.0]).unwrap();
        assert!((gamma[0][1][1] + 2.0).abs() < 1e-12); // Gamma^r_phiphi = -r
        assert!((gamma[1][0][1] - 0.5).abs() < 1e-12); // Gamma^phi_rphi = 1/r
        assert!((gamma[1][1][0] - 0.5).abs() < 1e-12);
        assert!(gamma[0][0][0].abs() < 1e-14);
    }

    #[test]
    fn lifted_family_a_christoffel_gzxz() {
        // For diag(1, 1, 1/V): Gamma^z_xz = -(d_x V)/(2V).
        let v = ScalarField::family_potential(Family::A, [1.0, 1.0, 1.0]);
        let (g3, _) = eisenhart_lift(&MetricField::euclidean(2), &v).unwrap();
        let q = [1.3, 0.8, 0.0];
        let gamma = christoffel(&g3, &q).unwrap();
        let (x, y) = (q[0], q[1]);
        let vq = 0.5 * (x * x + y * y) + 1.0 / (x * x) + 1.0 / (y * y);
        let dvdx = x - 2.0 / (x * x * x);
        let expect = -dvdx / (2.0 * vq);
        assert!(
            (gamma[2][0][2] - expect).abs() < 1e-12 * (1.0 + expect.abs()),
            "{} vs {expect}",
            gamma[2][0][2]
        );
    }

    #[test]
    fn christoffel_is_symmetric_and_metric_compatible() {
        let v = ScalarField::family_potential(Family::C, catalog::DEFAULT_K);
        let (g3, _) = eisenhart_lift(&MetricField::euclidean(2), &v).unwrap();
        let q = [0.9, 1.2, 0.4];
        let gamma = christoffel(&g3, &q).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(gamma[i][j][k], gamma[i][k][j]);
                }
            }
        }
        // finite-difference covariant derivative of g
        let h = 1e-5;
        for m in 0..3 {
            let mut qp = q;
            let mut qm = q;
            qp[m] += h;
            qm[m] -= h;
            let gp = g3.components(&qp).unwrap();
            let gm = g3.components(&qm).unwrap();
            let gq = g3.components(&q).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let mut nabla = (gp[i][j] - gm[i][j]) / (2.0 * h);
                    for l in 0..3 {
                        nabla -= gamma[l][m][i] * gq[l][j] + gamma[l][m][j] * gq[i][l];
                    }
                    assert!(
                        nabla.abs() <= crate::tolerances::METRIC_COMPAT_TOL,
                        "nabla_{m} g_{i}{j} = {nabla}"
                    );
                }
            }
        }
    }

    #[test]
    fn lift_block_structure_and_energy_match_hand_values() {
        // V constant 1: energy is the free quadratic form.
        let one = ScalarField::from_fns(2, |_| 1.0, |_| Jet1::constant(1.0));
        let (g3, t) = eisenhart_lift(&MetricField::euclidean(2), &one).unwrap();
        let z = PhasePoint::new(ChartId::Cartesian3, &[0.3, -0.2, 1.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.eval(&z, DEFAULT_MARGIN).unwrap(), 0.5 * (1.0 + 4.0 + 9.0));
        let g = g3.components(&[0.3, -0.2, 1.0]).unwrap();
        assert_eq!(g[2][2], 1.0);

        // g_zz = 1/V = r for the first Kepler-Coulomb family with k = (1, 0, 0)
        let v = ScalarField::family_potential(Family::C, [1.0, 0.0, 0.0]);
        let (g3, _) = eisenhart_lift(&MetricField::euclidean(2), &v).unwrap();
        let g = g3.components(&[3.0, 4.0, 0.0]).unwrap();
        assert!((g[2][2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn lift_accepts_non_euclidean_planar_bases() {
        // base g2 = diag(1 + x^2, 2): the lifted energy inverts the block,
        // T = (p_x^2/(1 + x^2) + p_y^2/2 + V p_z^2)/2.
        let base = MetricField::from_fns(
            2,
            |q, g| {
                *g = [[0.0; 3]; 3];
                g[0][0] = 1.0 + q[0] * q[0];
                g[1][1] = 2.0;
            },
            |q, g| {
                *g = [[Jet1::constant(0.0); 3]; 3];
                g[0][0] = Jet1::constant(1.0) + q[0] * q[0];
                g[1][1] = Jet1::constant(2.0);
            },
        );
        let v = ScalarField::from_fns(
            2,
            |q: &[f64; 3]| 1.0 + q[1] * q[1],
            |q: &[Jet1; 3]| Jet1::constant(1.0) + q[1] * q[1],
        );
        let (g3, t) = eisenhart_lift(&base, &v).unwrap();
        let q = [0.7, -0.4, 0.2];
        let p = [1.1, 0.5, -0.8];
        let z = PhasePoint::new(ChartId::Cartesian3, &q, &p).unwrap();
        let want = 0.5
            * (p[0] * p[0] / (1.0 + q[0] * q[0])
                + p[1] * p[1] / 2.0
                + (1.0 + q[1] * q[1]) * p[2] * p[2]);
        let got = t.eval(&z, crate::tolerances::DEFAULT_MARGIN).unwrap();
        assert!(
            (got - want).abs() <= 1e-14 * (1.0 + want.abs()),
            "{got} vs {want}"
        );
        let comp = g3.components(&q).unwrap();
        assert_eq!(comp[0][0], 1.0 + q[0] * q[0]);
        assert_eq!(comp[1][1], 2.0);
        assert!((comp[2][2] - 1.0 / (1.0 + q[1] * q[1])).abs() < 1e-15);
        assert!(g3.positive_definite_at(&q).unwrap());
        // jets through the generic solve agree with finite differences
        let jet = t.eval_jet(&z, crate::tolerances::DEFAULT_MARGIN).unwrap();
        let h = crate::tolerances::GRAD_CHECK_FD_STEP;
        let zp = PhasePoint::new(ChartId::Cartesian3, &[q[0] + h, q[1], q[2]], &p).unwrap();
        let zm = PhasePoint::new(ChartId::Cartesian3, &[q[0] - h, q[1], q[2]], &p).unwrap();
        let fd = (t.eval(&zp, 0.1).unwrap() - t.eval(&zm, 0.1).unwrap()) / (2.0 * h);
        assert!((jet.grad[0] - fd).abs() <= 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn lifted_energy_matches_catalog_at_a_worked_point() {
        let v = ScalarField::family_potential(Family::A, [1.0, 1.0, 1.0]);
        let (_, t) = eisenhart_lift(&MetricField::euclidean(2), &v).unwrap();
        let z = PhasePoint::new(
            ChartId::Cartesian3,
            &[1.0, 1.0, 0.0],
            &[0.0, 0.0, std::f64::consts::SQRT_2],
        )
        .unwrap();
        let got = t.eval(&z, DEFAULT_MARGIN).unwrap();
        assert!((got - 3.0).abs() < 1e-14, "lifted energy {got}");
    }

    #[test]
    fn geodesic_residuals_on_flat_and_polar_charts() {
        use crate::dynamics::{integrate, IntegrateOptions, Method};
        use crate::jet::Scalar;

        // free particle: straight lines, residual at rounding level
        fn free<S: Scalar>(_q: &[S; 3], p: &[S; 3]) -> S {
            S::constant(0.5) * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2])
        }
        let h = Observable::from_fns("T", ChartId::Cartesian3, Some(2), free::<f64>, free::<Jet1>);
        let z0 = PhasePoint::new(ChartId::Cartesian3, &[0.1, 0.2, 0.0], &[0.4, -0.3, 0.7]).unwrap();
        let opts = IntegrateOptions::new(1e-3, 1.0, Method::ImplicitMidpoint);
        let traj = integrate(&h, &z0, &opts).unwrap();
        let res = geodesic_residual(&MetricField::euclidean(3), &traj).unwrap();
        assert!(res <= 1e-12, "free-particle residual {res:.3e}");

        // the polar chart of the plane: geodesics are straight lines in
        // curvilinear clothing
        fn polar_energy<S: Scalar>(q: &[S; 3], p: &[S; 3]) -> S {
            S::constant(0.5) * (p[0] * p[0] + p[1] * p[1] / (q[0] * q[0]))
        }
        let h = Observable::from_fns(
            "T",
            ChartId::Cylindrical,
            Some(2),
            polar_energy::<f64>,
            polar_energy::<Jet1>,
        );
        let z0 = PhasePoint::new(ChartId::Cylindrical, &[2.0, 0.3, 0.0], &[0.2, 0.5, 0.0]).unwrap();
        let opts = IntegrateOptions::new(1e-3, 1.0, Method::ImplicitMidpoint);
        let traj = integrate(&h, &z0, &opts).unwrap();
        let res = geodesic_residual(&polar_metric(), &traj).unwrap();
        assert!(res <= 1e-7, "polar-chart residual {res:.3e}");
    }

    #[test]
    fn killing_tensor_extraction_matches_hand_second_derivatives() {
        let spec = catalog::default_spec(Family::A, Tier::Geodesic3D);
        let sys = catalog::build_system(&spec).unwrap();
        let f = sys.observable("sep_x").unwrap();
        let q = [1.1, 0.9, 0.2];
        let k = extract_killing_tensor(f, &q).unwrap();
        let (k1, k2) = (spec.k[0], spec.k[1]);
        let coeff = 0.5 * k1 * q[0] * q[0] + k2 / (q[0] * q[0]);
        assert!((k[0][0] - 1.0).abs() < 1e-12);
        assert!(k[1][1].abs() < 1e-12);
        assert!((k[2][2] - coeff).abs() < 1e-12 * (1.0 + coeff.abs()));
        assert!(k[0][1].abs() < 1e-12 && k[0][2].abs() < 1e-12 && k[1][2].abs() < 1e-12);
    }

    #[test]
    fn twice_the_energy_extracts_the_inverse_metric() {
        let spec = catalog::default_spec(Family::A, Tier::Geodesic3D);
        let k = spec.k;
        let double = Observable::from_fns(
            "2T",
            ChartId::Cartesian3,
            Some(2),
            move |q: &[f64; 3], p: &[f64; 3]| {
                let v = catalog::planar_potential(Family::A, &k, q[0], q[1]);
                p[0] * p[0] + p[1] * p[1] + v * p[2] * p[2]
            },
            move |q: &[Jet1; 3], p: &[Jet1; 3]| {
                let v = catalog::planar_potential(Family::A, &k, q[0], q[1]);
                p[0] * p[0] + p[1] * p[1] + v * p[2] * p[2]
            },
        );
        let q = [1.2, 0.7, -0.1];
        let kt = extract_killing_tensor(&double, &q).unwrap();
        let v = catalog::planar_potential(Family::A, &k, q[0], q[1]);
        assert!((kt[0][0] - 1.0).abs() < 1e-12);
        assert!((kt[1][1] - 1.0).abs() < 1e-12);
        assert!((kt[2][2] - v).abs() < 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn linear_momenta_fail_the_degree_probe() {
        let spec = catalog::default_spec(Family::A, Tier::Geodesic3D);
        let sys = catalog::build_system(&spec).unwrap();
        let pz = sys.observable("pz").unwrap();
        let err = extract_killing_tensor(pz, &[1.0, 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Degree(_)));
    }

    #[test]
    fn killing_dimension_closed_forms() {
        assert_eq!(killing_dimension(3, 1).unwrap(), 6);
        assert_eq!(killing_dimension(3, 2).unwrap(), 20);
        assert_eq!(killing_dimension(2, 1).unwrap(), 3);
        for n in 1..=6u32 {
            assert_eq!(killing_dimension(n, 1).unwrap(), u64::from(n * (n + 1) / 2));
        }
        assert!(killing_dimension(0, 1).is_err());
        assert!(killing_dimension(3, 0).is_err());
    }

    #[test]
    fn curvature_probe_flat_sphere_and_nonconstant() {
        let g = MetricField::euclidean(3);
        assert!(scalar_curvature_probe(&g, &[0.3, 0.4, 0.5]).unwrap().abs() < 1e-8);

        let r = scalar_curvature_probe(&polar_metric(), &[2.0, 0.3, 0.0]).unwrap();
        assert!(r.abs() < 1e-8, "polar chart of the plane is flat, got {r}");

        let s = scalar_curvature_probe(&sphere_metric(), &[1.1, 0.4, 0.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-6, "unit sphere curvature, got {s}");

        let v = ScalarField::family_potential(Family::A, [1.0, 0.0, 0.0]);
        let (g3, _) = eisenhart_lift(&MetricField::euclidean(2), &v).unwrap();
        let r1 = scalar_curvature_probe(&g3, &[1.0, 1.0, 0.0]).unwrap();
        let r2 = scalar_curvature_probe(&g3, &[2.0, 1.0, 0.0]).unwrap();
        assert!(
            (r1 - r2).abs() > crate::tolerances::CURVATURE_NONCONST_MIN,
            "lifted metric should have nonconstant curvature: {r1} vs {r2}"
        );
    }
}
