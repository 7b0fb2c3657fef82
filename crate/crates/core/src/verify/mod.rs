//! Executable verification suites: involution matrices, functional
//! independence, algebraic identities, lifted-flow reduction, parameter
//! limits, and the structured report consumed by the command line.

mod sampler;

use serde::{Serialize, Serializer};

use crate::catalog::{build_system, Family, RelationKind, System, SystemSpec, Tier, ZProfile};
use crate::charts::ChartId;
use crate::dynamics::{integrate, IntegrateOptions, Method};
use crate::error::{Error, Result};
use crate::jet::{p_lane, q_lane, Jet1};
use crate::observable::{poisson_bracket, Observable};
use crate::phase::PhasePoint;
use crate::tolerances::{
    BRACKET_ATOL, BRACKET_RTOL, CONTINUITY_LAMBDA, CONTINUITY_TOL, DEFAULT_MARGIN, FLOW_MARGIN,
    IDENTITY_RTOL, LIMIT_RTOL, RANK_SV_CUTOFF, REDUCTION_TOL, SECOND_ORDER_FD_STEP,
};

pub use sampler::{sample_points, CounterRng};

fn serialize_f64_17<S: Serializer>(v: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format!("{v:.16e}"))
}

/// One verified claim: residual, tolerance and verdict.
#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub kind: String,
    #[serde(serialize_with = "serialize_f64_17")]
    pub max_residual: f64,
    #[serde(serialize_with = "serialize_f64_17")]
    pub tolerance: f64,
    pub pass: bool,
}

/// Structured pass/fail record of every checked claim for one system.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub system: SystemSpec,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckItem>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

fn bracket_from_jets(n: usize, f: &Jet1, g: &Jet1) -> f64 {
    (0..n)
        .map(|i| f.grad[q_lane(i)] * g.grad[p_lane(i)] - f.grad[p_lane(i)] * g.grad[q_lane(i)])
        .sum()
}

/// Pairwise max |{F_i, F_j}| over the samples, with pass verdicts for the
/// declared vanishing pairs. Row/column zero is the Hamiltonian.
#[derive(Clone, Debug)]
pub struct InvolutionResult {
    pub names: Vec<String>,
    /// max over samples of |{F_i, F_j}|; entry (i, j) filled for i < j.
    pub matrix: Vec<Vec<f64>>,
    pub checks: Vec<CheckItem>,
}

impl InvolutionResult {
    pub fn entry(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Some(self.matrix[i][j])
    }
}

pub fn involution_matrix(system: &System, samples: usize, seed: u64) -> Result<InvolutionResult> {
    let points = sample_points(system, samples, seed, DEFAULT_MARGIN)?;
    let mut observables: Vec<&Observable> = vec![system.hamiltonian()];
    observables.extend(system.integrals().iter());
    let names: Vec<String> = observables.iter().map(|o| o.name().to_string()).collect();
    let m = observables.len();
    let n = system.dim();

    let mut max_abs = vec![vec![0.0_f64; m]; m];
    let mut worst_ratio = vec![vec![0.0_f64; m]; m];
    let mut tol_at_worst = vec![vec![BRACKET_ATOL; m]; m];

    for z in &points {
        let jets: Vec<Jet1> = observables
            .iter()
            .map(|o| o.eval_jet(z, DEFAULT_MARGIN))
            .collect::<Result<_>>()?;
        for i in 0..m {
            for j in (i + 1)..m {
                let b = bracket_from_jets(n, &jets[i], &jets[j]).abs();
                let scale = 1.0 + (jets[i].value * jets[j].value).abs();
                let tol = BRACKET_ATOL + BRACKET_RTOL * scale;
                max_abs[i][j] = max_abs[i][j].max(b);
                let ratio = b / tol;
                if ratio > worst_ratio[i][j] {
                    worst_ratio[i][j] = ratio;
                    tol_at_worst[i][j] = tol;
                }
            }
        }
    }

    let index_of = |name: &str| names.iter().position(|n| n == name);
    let mut checks = Vec::new();
    for rel in system.relations() {
        if rel.kind != RelationKind::Zero {
            continue;
        }
        let (Some(a), Some(b)) = (index_of(&rel.lhs), index_of(&rel.rhs)) else {
            return Err(Error::UnknownObservable(format!(
                "relation references `{}`/`{}`",
                rel.lhs, rel.rhs
            )));
        };
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        let kind = if names[i] == "H" || names[j] == "H" {
            "conservation"
        } else {
            "involution"
        };
        checks.push(CheckItem {
            name: format!("{{{}, {}}}", rel.lhs, rel.rhs),
            kind: kind.into(),
            max_residual: max_abs[i][j],
            tolerance: tol_at_worst[i][j],
            pass: worst_ratio[i][j] <= 1.0,
        });
    }

    Ok(InvolutionResult {
        names,
        matrix: max_abs,
        checks,
    })
}

/// Ranks of the Jacobian of a named observable set across samples.
#[derive(Clone, Debug)]
pub struct RankResult {
    pub set: Vec<String>,
    pub ranks: Vec<usize>,
    pub min_rank: usize,
    /// Number of samples achieving rank == set size.
    pub full_rank_count: usize,
}

pub fn independence_rank(
    system: &System,
    set: &[&str],
    samples: usize,
    seed: u64,
) -> Result<RankResult> {
    let points = sample_points(system, samples, seed, DEFAULT_MARGIN)?;
    let observables: Vec<&Observable> = set
        .iter()
        .map(|name| system.observable(name))
        .collect::<Result<_>>()?;
    let n = system.dim();
    let m = observables.len();
    let mut ranks = Vec::with_capacity(points.len());
    for z in &points {
        let mut jac = nalgebra::DMatrix::<f64>::zeros(m, 2 * n);
        for (row, obs) in observables.iter().enumerate() {
            let jet = obs.eval_jet(z, DEFAULT_MARGIN)?;
            for i in 0..n {
                jac[(row, i)] = jet.grad[q_lane(i)];
                jac[(row, n + i)] = jet.grad[p_lane(i)];
            }
        }
        let svd = jac.svd(false, false);
        let smax = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
        let rank = svd
            .singular_values
            .iter()
            .filter(|s| **s >= RANK_SV_CUTOFF * smax)
            .count();
        ranks.push(rank);
    }
    let min_rank = ranks.iter().copied().min().unwrap_or(0);
    let full_rank_count = ranks.iter().filter(|r| **r == m).count();
    Ok(RankResult {
        set: set.iter().map(|s| s.to_string()).collect(),
        ranks,
        min_rank,
        full_rank_count,
    })
}

/// Residual and scale of one identity at one point.
type IdentityEval<'a> = Box<dyn Fn(&PhasePoint) -> Result<(f64, f64)> + 'a>;

/// Pointwise sum and half-sum identities declared by the system.
pub fn identity_checks(system: &System, samples: usize, seed: u64) -> Result<Vec<CheckItem>> {
    let points = sample_points(system, samples, seed, DEFAULT_MARGIN)?;
    let mut out = Vec::new();
    for rel in system.relations() {
        let (name, eval): (String, IdentityEval) = match &rel.kind {
            RelationKind::Zero => continue,
            RelationKind::SumZero => {
                let lhs = system.observable(&rel.lhs)?;
                let rhs = system.observable(&rel.rhs)?;
                (
                    format!("{} + {} = 0", rel.lhs, rel.rhs),
                    Box::new(move |z| {
                        let a = lhs.eval(z, DEFAULT_MARGIN)?;
                        let b = rhs.eval(z, DEFAULT_MARGIN)?;
                        Ok(((a + b).abs(), 1.0 + a.abs() + b.abs()))
                    }),
                )
            }
            RelationKind::HalfSumEquals { target } => {
                let lhs = system.observable(&rel.lhs)?;
                let rhs = system.observable(&rel.rhs)?;
                let tgt = system.observable(target)?;
                (
                    format!("({} + {})/2 = {}", rel.lhs, rel.rhs, target),
                    Box::new(move |z| {
                        let a = lhs.eval(z, DEFAULT_MARGIN)?;
                        let b = rhs.eval(z, DEFAULT_MARGIN)?;
                        let c = tgt.eval(z, DEFAULT_MARGIN)?;
                        Ok(((0.5 * (a + b) - c).abs(), 1.0 + a.abs() + b.abs() + c.abs()))
                    }),
                )
            }
        };
        let mut max_res = 0.0_f64;
        let mut worst_ratio = 0.0_f64;
        let mut tol_at_worst = IDENTITY_RTOL;
        for z in &points {
            let (res, scale) = eval(z)?;
            let tol = IDENTITY_RTOL * scale;
            max_res = max_res.max(res);
            if res / tol > worst_ratio {
                worst_ratio = res / tol;
                tol_at_worst = tol;
            }
        }
        out.push(CheckItem {
            name,
            kind: "identity".into(),
            max_residual: max_res,
            tolerance: tol_at_worst,
            pass: worst_ratio <= 1.0,
        });
    }
    Ok(out)
}

/// Result of projecting the lifted flow onto the planar one.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub sup_distance: f64,
    pub max_pz_deviation: f64,
    pub pass: bool,
}

/// Integrate the planar Hamiltonian from `z0_2d` and the lifted geodesic
/// Hamiltonian from its lift (z = 0, p_z = sqrt 2); the planar block of the
/// lifted flow must match the planar flow, and p_z must stay sqrt 2.
pub fn reduction_check(
    family: Family,
    k: [f64; 3],
    z0_2d: &PhasePoint,
    t_end: f64,
    step: f64,
) -> Result<ReductionResult> {
    if z0_2d.dim() != 2 {
        return Err(Error::Argument(
            "reduction starts from a planar point".into(),
        ));
    }
    let spec2 = SystemSpec {
        family,
        tier: Tier::Euclidean2D,
        k,
        t: [0.0; 3],
        lambda: 0.0,
        zfun: ZProfile::Zero,
    };
    let spec3 = SystemSpec {
        tier: Tier::Geodesic3D,
        ..spec2.clone()
    };
    let planar = build_system(&spec2)?;
    let lifted = build_system(&spec3)?;

    let z0_3d = PhasePoint::new(
        ChartId::Cartesian3,
        &[z0_2d.q()[0], z0_2d.q()[1], 0.0],
        &[z0_2d.p()[0], z0_2d.p()[1], std::f64::consts::SQRT_2],
    )?;

    let dom2 = {
        let sys = planar.clone();
        std::sync::Arc::new(move |z: &PhasePoint| sys.domain_ok(z, FLOW_MARGIN))
            as crate::dynamics::DomainPredicate
    };
    let dom3 = {
        let sys = lifted.clone();
        std::sync::Arc::new(move |z: &PhasePoint| sys.domain_ok(z, FLOW_MARGIN))
            as crate::dynamics::DomainPredicate
    };

    let opts2 = IntegrateOptions::new(step, t_end, Method::ImplicitMidpoint).with_domain(dom2);
    let opts3 = IntegrateOptions::new(step, t_end, Method::ImplicitMidpoint).with_domain(dom3);
    let flow2 = integrate(planar.hamiltonian(), z0_2d, &opts2)?;
    let flow3 = integrate(lifted.hamiltonian(), &z0_3d, &opts3)?;

    let mut sup = 0.0_f64;
    let mut pz_dev = 0.0_f64;
    for (a, b) in flow2.states.iter().zip(flow3.states.iter()) {
        for i in 0..2 {
            sup = sup.max((a.q()[i] - b.q()[i]).abs());
            sup = sup.max((a.p()[i] - b.p()[i]).abs());
        }
        pz_dev = pz_dev.max((b.p()[2] - std::f64::consts::SQRT_2).abs());
    }
    Ok(ReductionResult {
        sup_distance: sup,
        max_pz_deviation: pz_dev,
        pass: sup <= REDUCTION_TOL && pz_dev <= 1e-12,
    })
}

/// Adapter between the axial integrals of potential and geodesic tiers:
/// with the profile off, p_z^2 + 2 Z collapses to the square of p_z.
fn limit_pair_value(base_name: &str, reduced: &System, z: &PhasePoint) -> Result<f64> {
    if base_name == "sep_z" && reduced.observable("sep_z").is_err() {
        let pz = reduced.observable("pz")?.eval(z, DEFAULT_MARGIN)?;
        return Ok(pz * pz);
    }
    reduced.observable(base_name)?.eval(z, DEFAULT_MARGIN)
}

fn compare_systems(
    label: &str,
    base: &System,
    reduced: &System,
    points: &[PhasePoint],
    out: &mut Vec<CheckItem>,
) -> Result<()> {
    let mut names: Vec<String> = vec!["H".into()];
    names.extend(base.integrals().iter().map(|o| o.name().to_string()));
    for name in names {
        if name != "sep_z" && reduced.observable(&name).is_err() {
            continue;
        }
        let base_obs = base.observable(&name)?;
        let mut max_res = 0.0_f64;
        let mut worst_ratio = 0.0_f64;
        let mut tol_at_worst = LIMIT_RTOL;
        for z in points {
            let a = base_obs.eval(z, DEFAULT_MARGIN)?;
            let b = limit_pair_value(&name, reduced, z)?;
            let res = (a - b).abs();
            let tol = LIMIT_RTOL * (1.0 + a.abs() + b.abs());
            max_res = max_res.max(res);
            if res / tol > worst_ratio {
                worst_ratio = res / tol;
                tol_at_worst = tol;
            }
        }
        out.push(CheckItem {
            name: format!("{label}:{name}"),
            kind: "limit".into(),
            max_residual: max_res,
            tolerance: tol_at_worst,
            pass: worst_ratio <= 1.0,
        });
    }
    Ok(())
}

/// Names whose formulas do not involve the mass parameter at all, so the
/// PDM-tier observable coincides with its undeformed counterpart at every
/// lambda, not only in the limit.
fn lambda_free_names(family: Family) -> &'static [&'static str] {
    match family {
        Family::A => &["sep_phi"],
        Family::B => &["sep_y"],
        Family::C => &["pz", "sep_phi"],
        Family::D => &[],
    }
}

/// Tier-limit checks for one spec:
/// PDM tiers compare the lambda -> 0 build against the undeformed tier
/// (plus continuity in lambda and exact lambda-independence where declared);
/// potential tiers compare the (t, Z) -> 0 build against the geodesic tier.
pub fn limit_check(spec: &SystemSpec, samples: usize, seed: u64) -> Result<Vec<CheckItem>> {
    spec.validate()?;
    let base = build_system(spec)?;
    let points = sample_points(&base, samples, seed, DEFAULT_MARGIN)?;
    let mut out = Vec::new();

    if spec.tier.has_mass() {
        let lower_tier = match spec.tier {
            Tier::PdmPotential => Tier::Potential3D,
            Tier::PdmGeodesic => Tier::Geodesic3D,
            _ => unreachable!(),
        };
        let mut at_zero = spec.clone();
        at_zero.lambda = 0.0;
        let mut lower = spec.clone();
        lower.tier = lower_tier;
        lower.lambda = 0.0;
        let base_zero = build_system(&at_zero)?;
        let reduced = build_system(&lower)?;
        compare_systems("lambda->0", &base_zero, &reduced, &points, &mut out)?;

        // continuity of the Hamiltonian in the mass parameter
        let mut tiny = spec.clone();
        tiny.lambda = CONTINUITY_LAMBDA;
        let sys_tiny = build_system(&tiny)?;
        let mut max_res = 0.0_f64;
        let mut worst_ratio = 0.0_f64;
        let mut tol_at_worst = CONTINUITY_TOL;
        for z in &points {
            let a = sys_tiny.hamiltonian().eval(z, DEFAULT_MARGIN)?;
            let b = base_zero.hamiltonian().eval(z, DEFAULT_MARGIN)?;
            let res = (a - b).abs();
            let tol = CONTINUITY_TOL * (1.0 + a.abs() + b.abs());
            max_res = max_res.max(res);
            if res / tol > worst_ratio {
                worst_ratio = res / tol;
                tol_at_worst = tol;
            }
        }
        out.push(CheckItem {
            name: "continuity:H".into(),
            kind: "continuity".into(),
            max_residual: max_res,
            tolerance: tol_at_worst,
            pass: worst_ratio <= 1.0,
        });

        // exact lambda-independence at the spec's own lambda
        let reduced_sys = build_system(&lower)?;
        for &name in lambda_free_names(spec.family) {
            let name = if name == "pz" && spec.tier.has_potential() {
                "sep_z"
            } else {
                name
            };
            if base.observable(name).is_err() {
                continue;
            }
            let mut max_res = 0.0_f64;
            let mut worst_ratio = 0.0_f64;
            let mut tol_at_worst = LIMIT_RTOL;
            for z in &points {
                let a = base.observable(name)?.eval(z, DEFAULT_MARGIN)?;
                let b = reduced_sys.observable(name)?.eval(z, DEFAULT_MARGIN)?;
                let res = (a - b).abs();
                let tol = LIMIT_RTOL * (1.0 + a.abs() + b.abs());
                max_res = max_res.max(res);
                if res / tol > worst_ratio {
                    worst_ratio = res / tol;
                    tol_at_worst = tol;
                }
            }
            out.push(CheckItem {
                name: format!("lambda-independent:{name}"),
                kind: "limit".into(),
                max_residual: max_res,
                tolerance: tol_at_worst,
                pass: worst_ratio <= 1.0,
            });
        }
    }

    if spec.tier.has_potential() {
        let lower_tier = match spec.tier {
            Tier::PdmPotential => Tier::PdmGeodesic,
            Tier::Potential3D => Tier::Geodesic3D,
            _ => unreachable!(),
        };
        let mut at_zero = spec.clone();
        at_zero.t = [0.0; 3];
        at_zero.zfun = ZProfile::Zero;
        let mut lower = spec.clone();
        lower.tier = lower_tier;
        lower.t = [0.0; 3];
        lower.zfun = ZProfile::Zero;
        let base_zero = build_system(&at_zero)?;
        let reduced = build_system(&lower)?;
        compare_systems("potential-off", &base_zero, &reduced, &points, &mut out)?;
    }

    if out.is_empty() {
        return Err(Error::Spec(format!(
            "tier {} has no declared limits",
            spec.tier.name()
        )));
    }
    Ok(out)
}

/// Jacobi residual |{f, {g, h}} + {g, {h, f}} + {h, {f, g}}| at `z`, inner
/// brackets differentiated by central differences of bracket values.
pub fn jacobi_residual(
    f: &Observable,
    g: &Observable,
    h: &Observable,
    z: &PhasePoint,
    margin: f64,
) -> Result<f64> {
    let n = z.dim();
    let fd = SECOND_ORDER_FD_STEP;
    let displaced = |lane: usize, delta: f64| -> Result<PhasePoint> {
        let mut q = *z.q_raw();
        let mut p = *z.p_raw();
        if lane < 3 {
            q[lane] += delta;
        } else {
            p[lane - 3] += delta;
        }
        PhasePoint::new(z.chart(), &q[..n], &p[..n])
    };
    let bracket_grad = |a: &Observable, b: &Observable| -> Result<[f64; 6]> {
        let mut grad = [0.0; 6];
        for i in 0..n {
            for lane in [q_lane(i), p_lane(i)] {
                let zp = displaced(lane, fd)?;
                let zm = displaced(lane, -fd)?;
                let bp = poisson_bracket(a, b, &zp, margin)?;
                let bm = poisson_bracket(a, b, &zm, margin)?;
                grad[lane] = (bp - bm) / (2.0 * fd);
            }
        }
        Ok(grad)
    };
    let outer = |a: &Observable, inner: &[f64; 6]| -> Result<f64> {
        let ja = a.eval_jet(z, margin)?;
        let mut acc = 0.0;
        for i in 0..n {
            acc += ja.grad[q_lane(i)] * inner[p_lane(i)] - ja.grad[p_lane(i)] * inner[q_lane(i)];
        }
        Ok(acc)
    };
    let gh = bracket_grad(g, h)?;
    let hf = bracket_grad(h, f)?;
    let fg = bracket_grad(f, g)?;
    Ok((outer(f, &gh)? + outer(g, &hf)? + outer(h, &fg)?).abs())
}

/// Undeclared pair per family used as a negative control: its bracket is
/// generically nonzero, proving the engine does not return zero trivially.
pub fn negative_control_pair(family: Family, tier: Tier) -> (&'static str, &'static str) {
    match (family, tier) {
        (Family::A, Tier::Euclidean2D) => ("sep_x", "angular"),
        (Family::A, _) => ("sep_x", "sep_phi"),
        (Family::B, Tier::Euclidean2D) => ("sep_x", "lrl_x"),
        (Family::B, _) => ("sep_x", "sep_tau"),
        (Family::C, Tier::Euclidean2D) => ("angular", "lrl_x"),
        (Family::C, _) => ("sep_phi", "sep_tau"),
        (Family::D, Tier::Euclidean2D) => ("lrl_x", "lrl_y"),
        (Family::D, _) => ("sep_tau", "sep_alpha"),
    }
}

/// Run every suite that applies to a spec and assemble the report. Checks
/// are emitted in declaration order, so identical (spec, seed, samples)
/// produce byte-identical serialized reports.
pub fn full_verification(
    spec: &SystemSpec,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    full_verification_of(&build_system(spec)?, samples, seed)
}

/// Same as [`full_verification`] but for an already-built (possibly
/// mutated) system.
pub fn full_verification_of(
    system: &System,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let spec = system.spec().clone();
    let mut checks = Vec::new();

    let inv = involution_matrix(system, samples, seed)?;
    checks.extend(inv.checks.iter().cloned());

    checks.extend(identity_checks(system, samples, seed)?);

    let set: Vec<&str> = system
        .independent_names()
        .iter()
        .map(|s| s.as_str())
        .collect();
    let rank = independence_rank(system, &set, samples, seed)?;
    let declared = set.len();
    let deficient = (samples - rank.full_rank_count) as f64;
    let allowed = (samples as f64 * 0.005).max(1.0);
    checks.push(CheckItem {
        name: format!("rank({}) = {declared}", set.join(", ")),
        kind: "independence".into(),
        max_residual: deficient,
        tolerance: allowed,
        pass: deficient <= allowed,
    });

    if spec.tier.has_mass() || spec.tier.has_potential() {
        checks.extend(limit_check(&spec, samples, seed)?);
    }

    let (a, b) = negative_control_pair(spec.family, spec.tier);
    if let Some(entry) = inv.entry(a, b) {
        checks.push(CheckItem {
            name: format!("negative control {{{a}, {b}}}"),
            kind: "negative-control".into(),
            max_residual: entry,
            tolerance: f64::INFINITY,
            pass: true,
        });
    }

    let overall = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        system: spec,
        seed,
        samples,
        checks,
        overall,
    })
}
