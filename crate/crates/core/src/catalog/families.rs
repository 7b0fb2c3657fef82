//! Formula layer for the four Hamiltonian families.
//!
//! Everything here is written once, generically over [`Scalar`], and gets
//! monomorphized for plain and jet evaluation. The four 3D tiers of one
//! family share a single master expression: the geodesic tier is the master
//! with the potential coefficients, the profile Z and the mass parameter all
//! zero, the potential tier switches on (t, Z), the PDM tiers switch on
//! lambda. Multiplying by an exactly-zero parameter and adding exact zeros
//! keeps every tier limit pointwise exact, not merely close.
//!
//! Momentum-array layout is positional per chart:
//! cartesian (p_x, p_y, p_z), cylindrical (p_r, p_phi, p_z),
//! parabolic I (p_tau, p_sigma, p_z), parabolic II (p_alpha, p_beta, p_z).

use std::f64::consts::SQRT_2;

use super::{Family, Params, ZProfile};
use crate::charts::{self, ChartId};
use crate::jet::Scalar;

pub(crate) fn zval<S: Scalar>(zp: &ZProfile, z: S) -> S {
    match zp {
        ZProfile::Zero => S::constant(0.0),
        ZProfile::Quadratic { c } => S::constant(*c) * z * z,
        ZProfile::Cosine { c, omega } => S::constant(*c) * (S::constant(*omega) * z).cos(),
        ZProfile::Polynomial { coeffs } => {
            let mut acc = S::constant(0.0);
            for &a in coeffs.iter().rev() {
                acc = acc * z + S::constant(a);
            }
            acc
        }
    }
}

/// Derivative Z'(z).
pub(crate) fn zslope(zp: &ZProfile, z: f64) -> f64 {
    match zp {
        ZProfile::Zero => 0.0,
        ZProfile::Quadratic { c } => 2.0 * c * z,
        ZProfile::Cosine { c, omega } => -c * omega * (omega * z).sin(),
        ZProfile::Polynomial { coeffs } => coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| i as f64 * a * z.powi(i as i32 - 1))
            .sum(),
    }
}

/// The axial separation combination p_z^2 + 2 Z(z).
fn axial<S: Scalar>(pr: &Params, z: S, pz: S) -> S {
    pz * pz + S::constant(2.0) * zval(&pr.z, z)
}

/// Planar potential of a family with explicit coefficients; the companion
/// potential U is the same shape with the secondary coefficient triple.
pub(crate) fn planar_potential<S: Scalar>(family: Family, c: &[f64; 3], x: S, y: S) -> S {
    match family {
        Family::A => v_a(c, x, y),
        Family::B => v_b(c, x, y),
        Family::C => v_c(c, x, y),
        Family::D => v_d(c, x, y),
    }
}

/// Conformal mass factor of a family.
pub(crate) fn mass_factor<S: Scalar>(family: Family, lambda: f64, x: S, y: S) -> S {
    let one = S::constant(1.0);
    let lam = S::constant(lambda);
    match family {
        Family::A => one - lam * (x * x + y * y),
        Family::B => one - lam * x,
        Family::C | Family::D => one - lam / (x * x + y * y).sqrt(),
    }
}

/// Master 3D Hamiltonian of a family (native cartesian):
/// [ (p_x^2 + p_y^2 + V p_z^2)/2 + U + V Z(z) ] / mu.
pub(crate) fn h3d<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y, z) = (q[0], q[1], q[2]);
    let v = planar_potential(family, &pr.k, x, y);
    let u = planar_potential(family, &pr.t, x, y);
    let kin = S::constant(0.5) * (p[0] * p[0] + p[1] * p[1] + v * p[2] * p[2]);
    (kin + u + v * zval(&pr.z, z)) / mass_factor(family, pr.lambda, x, y)
}

/// Planar Hamiltonian (p_x^2 + p_y^2)/2 + V.
pub(crate) fn h2d<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    S::constant(0.5) * (p[0] * p[0] + p[1] * p[1]) + planar_potential(family, &pr.k, q[0], q[1])
}

/// Axial momentum p_z (geodesic tiers).
pub(crate) fn pz_int<S: Scalar>(_family: Family, _pr: &Params, _q: &[S; 3], p: &[S; 3]) -> S {
    p[2]
}

/// Axial separation constant p_z^2 + 2 Z(z) (potential tiers).
pub(crate) fn sep_z_int<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    axial(pr, q[2], p[2])
}

fn ang<S: Scalar>(q: &[S; 3], p: &[S; 3]) -> S {
    q[0] * p[1] - q[1] * p[0]
}

// ---------------------------------------------------------------- family a

fn v_a<S: Scalar>(c: &[f64; 3], x: S, y: S) -> S {
    S::constant(0.5 * c[0]) * (x * x + y * y)
        + S::constant(c[1]) / (x * x)
        + S::constant(c[2]) / (y * y)
}

/// Cartesian separation constant in x.
pub(crate) fn sep_x_a<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, z) = (q[0], q[2]);
    let (px, pz) = (p[0], p[2]);
    let coeff = S::constant(0.5 * pr.k[0]) * x * x + S::constant(pr.k[1]) / (x * x);
    px * px
        + coeff * axial(pr, z, pz)
        + S::constant(pr.t[0]) * x * x
        + S::constant(2.0 * pr.t[1]) / (x * x)
        + S::constant(2.0 * pr.lambda) * x * x * h3d(family, pr, q, p)
}

/// Cartesian separation constant in y.
pub(crate) fn sep_y_a<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (y, z) = (q[1], q[2]);
    let (py, pz) = (p[1], p[2]);
    let coeff = S::constant(0.5 * pr.k[0]) * y * y + S::constant(pr.k[2]) / (y * y);
    py * py
        + coeff * axial(pr, z, pz)
        + S::constant(pr.t[0]) * y * y
        + S::constant(2.0 * pr.t[2]) / (y * y)
        + S::constant(2.0 * pr.lambda) * y * y * h3d(family, pr, q, p)
}

/// Angular separation constant, native cylindrical.
pub(crate) fn sep_phi_a<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (phi, z) = (q[1], q[2]);
    let (pphi, pz) = (p[1], p[2]);
    let c2 = phi.cos() * phi.cos();
    let s2 = phi.sin() * phi.sin();
    pphi * pphi
        + (S::constant(pr.k[1]) / c2 + S::constant(pr.k[2]) / s2) * axial(pr, z, pz)
        + S::constant(2.0 * pr.t[1]) / c2
        + S::constant(2.0 * pr.t[2]) / s2
}

/// Radial separation partner (geodesic tier), native cylindrical.
pub(crate) fn sep_r_a<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let r = q[0];
    let (prad, pz) = (p[0], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::Cylindrical, q, p);
    let energy = h3d(family, pr, &qc, &pc);
    r * r * prad * prad + S::constant(0.5 * pr.k[0]) * r.powi(4) * pz * pz
        - S::constant(2.0) * r * r * energy
}

/// Planar one-dimensional energy in x.
pub(crate) fn i1_a<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let x = q[0];
    S::constant(0.5) * p[0] * p[0]
        + S::constant(0.5 * pr.k[0]) * x * x
        + S::constant(pr.k[1]) / (x * x)
}

/// Planar one-dimensional energy in y.
pub(crate) fn i2_a<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let y = q[1];
    S::constant(0.5) * p[1] * p[1]
        + S::constant(0.5 * pr.k[0]) * y * y
        + S::constant(pr.k[2]) / (y * y)
}

/// Planar angular integral.
pub(crate) fn i3_a<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y) = (q[0], q[1]);
    let l = ang(q, p);
    l * l
        + S::constant(2.0 * pr.k[1]) * (y / x) * (y / x)
        + S::constant(2.0 * pr.k[2]) * (x / y) * (x / y)
}

// ---------------------------------------------------------------- family b

fn v_b<S: Scalar>(c: &[f64; 3], x: S, y: S) -> S {
    S::constant(0.5 * c[0]) * (S::constant(4.0) * x * x + y * y)
        + S::constant(c[1]) / (y * y)
        + S::constant(c[2]) * x
}

pub(crate) fn sep_x_b<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, z) = (q[0], q[2]);
    let (px, pz) = (p[0], p[2]);
    let coeff = S::constant(2.0 * pr.k[0]) * x * x + S::constant(pr.k[2]) * x;
    px * px
        + coeff * axial(pr, z, pz)
        + S::constant(4.0 * pr.t[0]) * x * x
        + S::constant(2.0 * pr.t[2]) * x
        + S::constant(2.0 * pr.lambda) * x * h3d(family, pr, q, p)
}

pub(crate) fn sep_y_b<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (y, z) = (q[1], q[2]);
    let (py, pz) = (p[1], p[2]);
    let coeff = S::constant(0.5 * pr.k[0]) * y * y + S::constant(pr.k[1]) / (y * y);
    py * py
        + coeff * axial(pr, z, pz)
        + S::constant(pr.t[0]) * y * y
        + S::constant(2.0 * pr.t[1]) / (y * y)
}

/// Parabolic separation constant, native parabolic I.
pub(crate) fn sep_tau_b<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (tau, z) = (q[0], q[2]);
    let (ptau, pz) = (p[0], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylI, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(0.5 * pr.k[0]) * tau.powi(6)
        + S::constant(pr.k[1]) / (tau * tau)
        + S::constant(0.5 * pr.k[2]) * tau.powi(4);
    ptau * ptau
        + coeff * axial(pr, z, pz)
        + S::constant(pr.t[0]) * tau.powi(6)
        + S::constant(2.0 * pr.t[1]) / (tau * tau)
        + S::constant(pr.t[2]) * tau.powi(4)
        - tau * tau * (S::constant(2.0) - S::constant(pr.lambda) * tau * tau) * h
}

/// Parabolic partner (geodesic tier), native parabolic I.
pub(crate) fn sep_sigma_b<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let sig = q[1];
    let (psig, pz) = (p[1], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylI, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(0.5 * pr.k[0]) * sig.powi(6) + S::constant(pr.k[1]) / (sig * sig)
        - S::constant(0.5 * pr.k[2]) * sig.powi(4);
    psig * psig + coeff * pz * pz - S::constant(2.0) * sig * sig * h
}

pub(crate) fn i1_b<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let x = q[0];
    S::constant(0.5) * p[0] * p[0] + S::constant(2.0 * pr.k[0]) * x * x + S::constant(pr.k[2]) * x
}

pub(crate) fn i2_b<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let y = q[1];
    S::constant(0.5) * p[1] * p[1]
        + S::constant(0.5 * pr.k[0]) * y * y
        + S::constant(pr.k[1]) / (y * y)
}

/// Planar integral from one shifted-oscillator axis of the Runge-Lenz kind.
pub(crate) fn i3_b<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y) = (q[0], q[1]);
    ang(q, p) * p[1] - S::constant(pr.k[0]) * x * y * y + S::constant(2.0 * pr.k[1]) * x / (y * y)
        - S::constant(0.5 * pr.k[2]) * y * y
}

// ---------------------------------------------------------------- family c

fn v_c<S: Scalar>(c: &[f64; 3], x: S, y: S) -> S {
    let r = (x * x + y * y).sqrt();
    S::constant(c[0]) / r + S::constant(c[1]) / (y * y) + S::constant(c[2]) * x / (y * y * r)
}

pub(crate) fn sep_phi_c<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (phi, z) = (q[1], q[2]);
    let (pphi, pz) = (p[1], p[2]);
    let (cphi, s2) = (phi.cos(), phi.sin() * phi.sin());
    pphi * pphi
        + (S::constant(pr.k[1]) / s2 + S::constant(pr.k[2]) * cphi / s2) * axial(pr, z, pz)
        + S::constant(2.0 * pr.t[1]) / s2
        + S::constant(2.0 * pr.t[2]) * cphi / s2
}

/// Radial partner (geodesic and PDM-geodesic tiers), native cylindrical.
pub(crate) fn sep_r_c<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let r = q[0];
    let (prad, pz) = (p[0], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::Cylindrical, q, p);
    let h = h3d(family, pr, &qc, &pc);
    r * r * prad * prad + S::constant(pr.k[0]) * r * pz * pz
        - S::constant(2.0) * r * (r - S::constant(pr.lambda)) * h
}

pub(crate) fn sep_tau_c<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (tau, z) = (q[0], q[2]);
    let (ptau, pz) = (p[0], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylI, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(pr.k[0]) + S::constant(pr.k[1] - pr.k[2]) / (tau * tau);
    ptau * ptau
        + coeff * axial(pr, z, pz)
        + S::constant(2.0 * pr.t[0])
        + S::constant(2.0 * (pr.t[1] - pr.t[2])) / (tau * tau)
        + S::constant(2.0) * (S::constant(pr.lambda) - tau * tau) * h
}

/// Parabolic partner (geodesic tier), native parabolic I.
pub(crate) fn sep_sigma_c<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let sig = q[1];
    let (psig, pz) = (p[1], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylI, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(pr.k[0]) + S::constant(pr.k[1] + pr.k[2]) / (sig * sig);
    psig * psig + coeff * pz * pz - S::constant(2.0) * sig * sig * h
}

/// Planar angular integral.
pub(crate) fn i2_c<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y) = (q[0], q[1]);
    let r = (x * x + y * y).sqrt();
    let l = ang(q, p);
    l * l
        + S::constant(2.0 * pr.k[1]) * x * x / (y * y)
        + S::constant(2.0 * pr.k[2]) * x * r / (y * y)
}

/// Planar Runge-Lenz-type integral.
pub(crate) fn i3_c<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y) = (q[0], q[1]);
    let r = (x * x + y * y).sqrt();
    ang(q, p) * p[1]
        + S::constant(pr.k[0]) * x / r
        + S::constant(2.0 * pr.k[1]) * x / (y * y)
        + S::constant(pr.k[2]) * (S::constant(2.0) * x * x + y * y) / (y * y * r)
}

// ---------------------------------------------------------------- family d

fn v_d<S: Scalar>(c: &[f64; 3], x: S, y: S) -> S {
    let r = (x * x + y * y).sqrt();
    (S::constant(c[0]) + S::constant(c[1]) * (r + x).sqrt() + S::constant(c[2]) * (r - x).sqrt())
        / r
}

pub(crate) fn sep_tau_d<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (tau, z) = (q[0], q[2]);
    let (ptau, pz) = (p[0], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylI, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(pr.k[0]) + S::constant(2.0 * pr.k[1]) * tau;
    ptau * ptau
        + coeff * axial(pr, z, pz)
        + S::constant(2.0 * pr.t[0])
        + S::constant(4.0 * pr.t[1]) * tau
        + S::constant(2.0) * (S::constant(pr.lambda) - tau * tau) * h
}

/// Parabolic partner (geodesic and PDM-geodesic tiers), native parabolic I.
pub(crate) fn sep_sigma_d<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let sig = q[1];
    let (psig, pz) = (p[1], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylI, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(pr.k[0]) + S::constant(2.0 * pr.k[2]) * sig;
    psig * psig + coeff * pz * pz + S::constant(2.0) * (S::constant(pr.lambda) - sig * sig) * h
}

/// Rotated parabolic separation constant, native parabolic II.
pub(crate) fn sep_alpha_d<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (alpha, z) = (q[0], q[2]);
    let (palpha, pz) = (p[0], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylII, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(pr.k[0]) + S::constant(SQRT_2 * (pr.k[1] + pr.k[2])) * alpha;
    palpha * palpha
        + coeff * axial(pr, z, pz)
        + S::constant(2.0 * pr.t[0])
        + S::constant(2.0 * SQRT_2 * (pr.t[1] + pr.t[2])) * alpha
        + S::constant(2.0) * (S::constant(pr.lambda) - alpha * alpha) * h
}

/// Rotated parabolic partner (geodesic tier), native parabolic II.
pub(crate) fn sep_beta_d<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let beta = q[1];
    let (pbeta, pz) = (p[1], p[2]);
    let (qc, pc) = charts::lift_to_cartesian(ChartId::ParabolicCylII, q, p);
    let h = h3d(family, pr, &qc, &pc);
    let coeff = S::constant(pr.k[0]) + S::constant(SQRT_2 * (pr.k[1] - pr.k[2])) * beta;
    pbeta * pbeta + coeff * pz * pz + S::constant(2.0) * (S::constant(pr.lambda) - beta * beta) * h
}

/// Planar Runge-Lenz component conjugate to x.
pub(crate) fn i2_d<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y) = (q[0], q[1]);
    let r = (x * x + y * y).sqrt();
    ang(q, p) * p[1] + S::constant(pr.k[0]) * x / r - S::constant(pr.k[1]) * y * (r - x).sqrt() / r
        + S::constant(pr.k[2]) * y * (r + x).sqrt() / r
}

/// Planar Runge-Lenz component conjugate to y.
pub(crate) fn i3_d<S: Scalar>(_family: Family, pr: &Params, q: &[S; 3], p: &[S; 3]) -> S {
    let (x, y) = (q[0], q[1]);
    let r = (x * x + y * y).sqrt();
    ang(q, p) * p[0] - S::constant(pr.k[0]) * y / r - S::constant(pr.k[1]) * x * (r - x).sqrt() / r
        + S::constant(pr.k[2]) * x * (r + x).sqrt() / r
}

/// Aliased aux observables: planar potential V, companion potential U and
/// mass factor mu as functions on phase space (momenta ignored).
pub(crate) fn v_aux<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], _p: &[S; 3]) -> S {
    planar_potential(family, &pr.k, q[0], q[1])
}

pub(crate) fn u_aux<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], _p: &[S; 3]) -> S {
    planar_potential(family, &pr.t, q[0], q[1])
}

pub(crate) fn mu_aux<S: Scalar>(family: Family, pr: &Params, q: &[S; 3], _p: &[S; 3]) -> S {
    mass_factor(family, pr.lambda, q[0], q[1])
}
