//! Spectrum of the nonlinear operator pencil via its decoupled form.
//!
//! Over each Dirichlet eigenfunction of the base domain the pencil restricts
//! to a 2x2 block whose determinant factors into a tan branch and a cot
//! branch. Every pencil eigenvalue in the interval
//! J_n = ((pi(n-1))^2 q^{-2}, (pi n)^2 q^{-2}) is a root of one of the two
//! branch equations; the "hard" branch (tan for odd n, cot for even n) maps
//! J_n monotonically onto (left endpoint, +inf) and carries one root per
//! sufficiently large base eigenvalue, accumulating at the right endpoint.

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SpectrumEntry, SpectrumTag};
use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative coincidence tolerance for merging tan and cot roots.
const BOTH_MERGE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilParams {
    pub p: f64,
    pub q: f64,
    pub omega: f64,
    /// Root-bracket guard, relative to the width of J_n.
    pub delta_pole: f64,
}

impl PencilParams {
    pub fn new(p: f64, q: f64, omega: f64) -> Self {
        assert!(p >= 0.0 && q > 0.0 && omega > 0.0);
        PencilParams {
            p,
            q,
            omega,
            delta_pole: 1e-9,
        }
    }

    /// Interval J_n.
    pub fn interval(&self, n: u32) -> (f64, f64) {
        let lo = (PI * (n - 1) as f64 / self.q).powi(2);
        let hi = (PI * n as f64 / self.q).powi(2);
        (lo, hi)
    }

    /// Accumulation point (pi n)^2 q^{-2}.
    pub fn accumulation_point(&self, n: u32) -> f64 {
        (PI * n as f64 / self.q).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Tan,
    Cot,
}

impl Branch {
    /// The branch that maps J_n onto (left endpoint, +inf).
    pub fn hard(n: u32) -> Branch {
        if n % 2 == 1 {
            Branch::Tan
        } else {
            Branch::Cot
        }
    }

    pub fn soft(n: u32) -> Branch {
        match Branch::hard(n) {
            Branch::Tan => Branch::Cot,
            Branch::Cot => Branch::Tan,
        }
    }

    pub fn tag(self) -> SpectrumTag {
        match self {
            Branch::Tan => SpectrumTag::Tan,
            Branch::Cot => SpectrumTag::Cot,
        }
    }
}

/// Left-hand side of the branch equation:
/// tan branch: lambda + (p omega / q) sqrt(lambda) tan(q sqrt(lambda)/2),
/// cot branch: lambda - (p omega / q) sqrt(lambda) cot(q sqrt(lambda)/2).
pub fn branch_fn(branch: Branch, lambda: f64, params: &PencilParams) -> f64 {
    let s = lambda.max(0.0).sqrt();
    let half = params.q * s / 2.0;
    let c = params.p * params.omega / params.q;
    match branch {
        Branch::Tan => lambda + c * s * half.tan(),
        Branch::Cot => {
            if half == 0.0 {
                // sqrt(lambda) cot(q sqrt(lambda)/2) -> 2/q as lambda -> 0+
                -c * 2.0 / params.q
            } else {
                lambda - c * s / half.tan()
            }
        }
    }
}

fn branch_fn_derivative(branch: Branch, lambda: f64, params: &PencilParams) -> f64 {
    let s = lambda.sqrt();
    let half = params.q * s / 2.0;
    let c = params.p * params.omega / params.q;
    match branch {
        Branch::Tan => {
            let t = half.tan();
            1.0 + c * (t / (2.0 * s) + params.q / 4.0 * (1.0 + t * t))
        }
        Branch::Cot => {
            let t = half.tan();
            let cot = 1.0 / t;
            1.0 - c * (cot / (2.0 * s) - params.q / 4.0 * (1.0 + cot * cot))
        }
    }
}

/// Outcome of a single-branch root search in J_n.
enum RootOutcome {
    /// Unique root strictly inside the guarded bracket.
    Root(f64),
    /// No root in J_n for this right-hand side.
    Absent,
    /// A root exists but lies within delta_pole of an endpoint; the payload
    /// is the guarded endpoint it hides behind.
    PoleNear(f64),
}

fn find_branch_root(
    branch: Branch,
    n: u32,
    mu: f64,
    params: &PencilParams,
    tol: f64,
) -> Result<RootOutcome> {
    assert!(n >= 1 && mu > 0.0 && tol > 0.0);
    let (lo, hi) = params.interval(n);

    if params.p == 0.0 {
        // Both branch equations collapse to lambda = mu.
        return Ok(if mu > lo && mu < hi {
            RootOutcome::Root(mu)
        } else {
            RootOutcome::Absent
        });
    }

    let hard = branch == Branch::hard(n);
    // Exact range test: the hard branch covers (lo, +inf), the soft branch
    // is bounded above by the right endpoint value.
    if hard && mu <= lo {
        return Ok(RootOutcome::Absent);
    }
    if !hard && mu >= hi {
        return Ok(RootOutcome::Absent);
    }

    let width = hi - lo;
    let guard = params.delta_pole * width;
    let (a, b) = (lo + guard, hi - guard);
    let ga = branch_fn(branch, a, params) - mu;
    let gb = branch_fn(branch, b, params) - mu;
    if ga > 0.0 {
        // Monotone increasing f with f(a) > mu: the root sits in (lo, a).
        // For the soft branch at n = 1 the left endpoint is not a pole and
        // f(0+) < 0 < mu, so this cannot trigger there.
        return Ok(RootOutcome::PoleNear(a));
    }
    if gb < 0.0 {
        return Ok(RootOutcome::PoleNear(b));
    }

    // Bracketed bisection on the monotone branch.
    let (mut a, mut b) = (a, b);
    let scale = mu.abs().max(1.0);
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        let gm = branch_fn(branch, mid, params) - mu;
        if gm.abs() <= tol * scale {
            break;
        }
        if gm > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
        if b - a <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    // One Newton polish, kept only if it stays bracketed and improves.
    let g_mid = branch_fn(branch, mid, params) - mu;
    let d = branch_fn_derivative(branch, mid, params);
    if d.is_finite() && d != 0.0 {
        let polished = mid - g_mid / d;
        if polished > a && polished < b {
            let gp = branch_fn(branch, polished, params) - mu;
            if gp.abs() < g_mid.abs() {
                mid = polished;
            }
        }
    }
    let residual = (branch_fn(branch, mid, params) - mu).abs();
    if residual > tol * scale {
        return Err(Error::ConvergenceFailure(format!(
            "branch root residual {residual:.3e} exceeds {:.3e} at lambda = {mid}",
            tol * scale
        )));
    }
    Ok(RootOutcome::Root(mid))
}

/// The unique lambda in J_n solving the branch equation with right-hand side
/// `mu`, or `None` if no root exists there. A root hiding within
/// delta_pole of an interval endpoint is reported as `PoleProximity`.
pub fn branch_root(
    branch: Branch,
    n: u32,
    mu: f64,
    params: &PencilParams,
    tol: f64,
) -> Result<Option<f64>> {
    match find_branch_root(branch, n, mu, params, tol)? {
        RootOutcome::Root(l) => Ok(Some(l)),
        RootOutcome::Absent => Ok(None),
        RootOutcome::PoleNear(at) => Err(Error::PoleProximity(format!(
            "root for mu = {mu} on {branch:?} branch of J_{n} lies within the pole guard near lambda = {at}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilRoot {
    pub value: f64,
    pub multiplicity: u32,
    pub branch: SpectrumTag,
    /// Indices into the base spectrum's entry list.
    pub mu_indices: Vec<usize>,
    /// True when the root could only be located up to the pole guard.
    pub pole_proximity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRoots {
    pub n: u32,
    pub lo: f64,
    pub hi: f64,
    pub roots: Vec<PencilRoot>,
}

/// Pencil eigenvalues grouped by interval, plus the accumulation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilSpectrum {
    pub intervals: Vec<IntervalRoots>,
    pub accumulation_points: Vec<f64>,
}

impl PencilSpectrum {
    /// Flattens into a plain sorted spectrum.
    pub fn to_spectrum(&self) -> Spectrum {
        let mut entries: Vec<SpectrumEntry> = self
            .intervals
            .iter()
            .flat_map(|iv| iv.roots.iter())
            .map(|r| SpectrumEntry {
                value: r.value,
                multiplicity: r.multiplicity,
                tag: r.branch,
            })
            .collect();
        entries.sort_by(|a, b| a.value.total_cmp(&b.value));
        Spectrum {
            entries,
            accumulation_points: self.accumulation_points.clone(),
        }
    }
}

/// Enumerates the pencil spectrum over J_1..J_n_max for the given base
/// spectrum. Hard-branch roots are collected per base eigenvalue up to
/// `per_interval_cap`; a lambda solving both branch equations is merged into
/// one root with summed multiplicity.
pub fn pencil_spectrum(
    base: &Spectrum,
    params: &PencilParams,
    n_max: u32,
    per_interval_cap: usize,
) -> Result<PencilSpectrum> {
    assert!(n_max >= 1 && per_interval_cap >= 1);
    // Near the right endpoint the derivative of f blows up, so the residual
    // floor reachable in f64 is about |f'| * ulp(lambda); 1e-9 * max(1, mu)
    // is attainable across all of J_n while lambda itself stays accurate to
    // machine precision.
    let tol = 1e-9;
    let mut intervals = Vec::with_capacity(n_max as usize);

    for n in 1..=n_max {
        let (lo, hi) = params.interval(n);
        let mut roots: Vec<PencilRoot> = Vec::new();

        if params.p == 0.0 {
            // Decoupled reduction: lambda = mu with doubled multiplicity.
            for (idx, e) in base.entries.iter().enumerate() {
                if e.value > lo && e.value < hi {
                    roots.push(PencilRoot {
                        value: e.value,
                        multiplicity: 2 * e.multiplicity,
                        branch: SpectrumTag::Both,
                        mu_indices: vec![idx],
                        pole_proximity: false,
                    });
                }
            }
        } else {
            let hard = Branch::hard(n);
            let soft = Branch::soft(n);
            let mut hard_count = 0usize;
            for (idx, e) in base.entries.iter().enumerate() {
                if e.value > lo && hard_count < per_interval_cap {
                    push_root(&mut roots, hard, n, idx, e, params, tol)?;
                    hard_count += 1;
                }
                if e.value < hi {
                    push_root(&mut roots, soft, n, idx, e, params, tol)?;
                }
            }
            roots.sort_by(|a, b| a.value.total_cmp(&b.value));
            roots = merge_coincident(roots);
        }
        intervals.push(IntervalRoots { n, lo, hi, roots });
    }

    let accumulation_points = (1..=n_max).map(|n| params.accumulation_point(n)).collect();
    Ok(PencilSpectrum {
        intervals,
        accumulation_points,
    })
}

fn push_root(
    roots: &mut Vec<PencilRoot>,
    branch: Branch,
    n: u32,
    idx: usize,
    entry: &SpectrumEntry,
    params: &PencilParams,
    tol: f64,
) -> Result<()> {
    match find_branch_root(branch, n, entry.value, params, tol)? {
        RootOutcome::Root(l) => roots.push(PencilRoot {
            value: l,
            multiplicity: entry.multiplicity,
            branch: branch.tag(),
            mu_indices: vec![idx],
            pole_proximity: false,
        }),
        RootOutcome::PoleNear(at) => roots.push(PencilRoot {
            value: at,
            multiplicity: entry.multiplicity,
            branch: branch.tag(),
            mu_indices: vec![idx],
            pole_proximity: true,
        }),
        RootOutcome::Absent => {}
    }
    Ok(())
}

/// Merges adjacent roots from different branches that coincide to relative
/// tolerance into a single root tagged "both".
fn merge_coincident(roots: Vec<PencilRoot>) -> Vec<PencilRoot> {
    let mut out: Vec<PencilRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(last)
                if last.branch != r.branch
                    && !last.pole_proximity
                    && !r.pole_proximity
                    && (r.value - last.value).abs() <= BOTH_MERGE_REL_TOL * r.value.abs() =>
            {
                last.multiplicity += r.multiplicity;
                last.branch = SpectrumTag::Both;
                last.mu_indices.extend(r.mu_indices);
            }
            _ => out.push(r),
        }
    }
    out
}

/// The pencil restricted to the span of one base eigenfunction with
/// eigenvalue mu: [[mu + c_t - lambda, -c_s], [-c_s, mu + c_t - lambda]]
/// with c_t = p omega sqrt(lambda) / (q tan(q sqrt(lambda))) and
/// c_s = p omega sqrt(lambda) / (q sin(q sqrt(lambda))).
pub fn pencil_block(lambda: f64, mu: f64, params: &PencilParams) -> Result<Matrix2<f64>> {
    let s = lambda.sqrt();
    let theta = params.q * s;
    // Guard only the true poles: sin(q sqrt(lambda)) = 0, i.e. the interval
    // endpoints. tan poles at half-integer multiples cancel (c_t -> 0 there).
    let nearest = (theta / PI).round();
    let (w_lo, w_hi) = params.interval(1);
    if nearest >= 1.0 && (theta - nearest * PI).abs() < params.delta_pole * (w_hi - w_lo).sqrt() {
        return Err(Error::PoleProximity(format!(
            "lambda = {lambda} is within the guard of accumulation point n = {nearest}"
        )));
    }
    let c = params.p * params.omega * s / params.q;
    let c_t = c / theta.tan();
    let c_s = c / theta.sin();
    let diag = mu + c_t - lambda;
    Ok(Matrix2::new(diag, -c_s, -c_s, diag))
}

/// Tube-mode norm coefficients and the limit inner-product weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeCoefficients {
    pub k1: f64,
    pub k2: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
}

/// k1 = (t - sin t cos t) / (2 t sin^2 t), k2 = -(t cos t - sin t) / (2 t sin^2 t)
/// with t = q sqrt(lambda), and rho+- = 1/2 + (k1 +- k2)/2.
pub fn tube_coefficients(lambda: f64, q: f64) -> Result<TubeCoefficients> {
    assert!(lambda > 0.0 && q > 0.0);
    let t = q * lambda.sqrt();
    let nearest = (t / PI).round();
    if nearest >= 1.0 && (t - nearest * PI).abs() < 1e-9 {
        return Err(Error::PoleProximity(format!(
            "q sqrt(lambda) = {t} is too close to pi * {nearest}"
        )));
    }
    let (s, c) = t.sin_cos();
    let denom = 2.0 * t * s * s;
    let k1 = (t - s * c) / denom;
    let k2 = -(t * c - s) / denom;
    Ok(TubeCoefficients {
        k1,
        k2,
        rho_plus: 0.5 + 0.5 * (k1 + k2),
        rho_minus: 0.5 + 0.5 * (k1 - k2),
    })
}
