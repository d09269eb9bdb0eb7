//! Smallest eigenpairs of the generalized problem K u = lambda M u.
//!
//! The mass matrix is diagonal, so the problem reduces to the ordinary
//! symmetric problem C y = lambda y with C = M^{-1/2} K M^{-1/2} and
//! u = M^{-1/2} y. Small models are solved densely; large ones by
//! shift-invert Lanczos with C^{-1} applied through conjugate gradients.

use super::{DiscreteModel, DENSE_LIMIT};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// The `m` smallest eigenpairs of K u = lambda M u, values ascending,
/// vectors M-orthonormal, each satisfying
/// ||K u - lambda M u|| <= tol * ||M u|| * max(1, lambda).
pub fn smallest_eigenpairs(
    model: &DiscreteModel,
    m: usize,
    tol: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = model.dim();
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!(
            "requested {m} eigenpairs of a dimension-{n} model"
        )));
    }
    let inv_sqrt_m: Vec<f64> = model.mass.iter().map(|v| 1.0 / v.sqrt()).collect();
    let pairs = if n < DENSE_LIMIT {
        dense_path(model, &inv_sqrt_m, m)
    } else {
        lanczos_path(model, &inv_sqrt_m, m, tol)?
    };
    for (lambda, u) in &pairs {
        let res = residual(model, *lambda, u);
        if res > tol {
            return Err(Error::ConvergenceFailure(format!(
                "eigenpair at lambda = {lambda} has relative residual {res:.3e} > {tol:.3e}"
            )));
        }
    }
    Ok(pairs)
}

/// ||K u - lambda M u|| / (||M u|| * max(1, lambda)).
pub fn residual(model: &DiscreteModel, lambda: f64, u: &[f64]) -> f64 {
    let n = model.dim();
    let mut ku = vec![0.0; n];
    model.stiffness.matvec(u, &mut ku);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let mu = model.mass[i] * u[i];
        num += (ku[i] - lambda * mu).powi(2);
        den += mu * mu;
    }
    num.sqrt() / (den.sqrt() * lambda.max(1.0))
}

fn dense_path(model: &DiscreteModel, inv_sqrt_m: &[f64], m: usize) -> Vec<(f64, Vec<f64>)> {
    let n = model.dim();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for k in model.stiffness.row_ptr[i]..model.stiffness.row_ptr[i + 1] {
            let j = model.stiffness.cols[k];
            c[(i, j)] = model.stiffness.vals[k] * inv_sqrt_m[i] * inv_sqrt_m[j];
        }
    }
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .take(m)
        .map(|idx| {
            let y = eig.eigenvectors.column(idx);
            let u: Vec<f64> = (0..n).map(|i| y[i] * inv_sqrt_m[i]).collect();
            (eig.eigenvalues[idx], u)
        })
        .collect()
}

/// All eigenvalues, dense path only. Used by oracle tests and band counts.
pub fn dense_eigenvalues(model: &DiscreteModel) -> Vec<f64> {
    let n = model.dim();
    let inv_sqrt_m: Vec<f64> = model.mass.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for k in model.stiffness.row_ptr[i]..model.stiffness.row_ptr[i + 1] {
            let j = model.stiffness.cols[k];
            c[(i, j)] = model.stiffness.vals[k] * inv_sqrt_m[i] * inv_sqrt_m[j];
        }
    }
    let mut eigs: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

struct ScaledOp<'a> {
    model: &'a DiscreteModel,
    inv_sqrt_m: &'a [f64],
    scratch: Vec<f64>,
}

impl ScaledOp<'_> {
    /// y = C x with C = M^{-1/2} K M^{-1/2}.
    fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            self.scratch[i] = x[i] * self.inv_sqrt_m[i];
        }
        let scratch = std::mem::take(&mut self.scratch);
        self.model.stiffness.matvec(&scratch, y);
        self.scratch = scratch;
        for i in 0..n {
            y[i] *= self.inv_sqrt_m[i];
        }
    }

    /// Solves C y = b by conjugate gradients (C is positive definite after
    /// Dirichlet elimination).
    fn solve(&mut self, b: &[f64], y: &mut [f64], rel_tol: f64) -> Result<()> {
        let n = b.len();
        y.fill(0.0);
        let mut r = b.to_vec();
        let mut p = b.to_vec();
        let mut cp = vec![0.0; n];
        let b_norm2: f64 = b.iter().map(|v| v * v).sum();
        if b_norm2 == 0.0 {
            return Ok(());
        }
        let target = rel_tol * rel_tol * b_norm2;
        let mut r_norm2 = b_norm2;
        let max_iter = 40 * (n as f64).sqrt() as usize + 1000;
        for _ in 0..max_iter {
            self.apply(&p, &mut cp);
            let pcp: f64 = p.iter().zip(&cp).map(|(a, b)| a * b).sum();
            let alpha = r_norm2 / pcp;
            for i in 0..n {
                y[i] += alpha * p[i];
                r[i] -= alpha * cp[i];
            }
            let r_new: f64 = r.iter().map(|v| v * v).sum();
            if r_new <= target {
                return Ok(());
            }
            let beta = r_new / r_norm2;
            r_norm2 = r_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        Err(Error::ConvergenceFailure(format!(
            "CG stalled at relative residual {:.3e}",
            (r_norm2 / b_norm2).sqrt()
        )))
    }
}

/// Shift-invert Lanczos at shift 0 with full reorthogonalization and
/// deterministic start vectors. A single Krylov sequence captures only one
/// direction per eigenspace, so after each sweep an inertia count verifies
/// nothing below the m-th value was missed; missed copies are recovered by
/// restarting with the accepted eigenvectors deflated.
fn lanczos_path(
    model: &DiscreteModel,
    inv_sqrt_m: &[f64],
    m: usize,
    tol: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = model.dim();
    let mut accepted: Vec<(f64, Vec<f64>)> = Vec::new(); // (lambda, y)
    for sweep in 0..m + 8 {
        let want = (m - accepted.len().min(m)).max(1);
        let found = lanczos_sweep(model, inv_sqrt_m, want, tol, &accepted, sweep)?;
        if found.is_empty() {
            return Err(Error::ConvergenceFailure(
                "Lanczos sweep converged no new eigenpairs".into(),
            ));
        }
        accepted.extend(found);
        accepted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if accepted.len() >= m && spectrum_complete(model, &accepted, m)? {
            polish(model, inv_sqrt_m, &mut accepted[..m]);
            let pairs = accepted
                .into_iter()
                .take(m)
                .map(|(lambda, y)| {
                    let u: Vec<f64> = (0..n).map(|i| y[i] * inv_sqrt_m[i]).collect();
                    (lambda, u)
                })
                .collect();
            return Ok(pairs);
        }
    }
    Err(Error::ConvergenceFailure(
        "Lanczos restarts exhausted before the spectrum count matched".into(),
    ))
}

/// One inverse-iteration step per pair with a tight CG tolerance, followed
/// by a Rayleigh-quotient update. The Ritz pairs arrive with residuals near
/// the sweep tolerance; this pushes them well below it. Each polished vector
/// is orthogonalized against the earlier ones so degenerate copies stay
/// independent.
fn polish(model: &DiscreteModel, inv_sqrt_m: &[f64], pairs: &mut [(f64, Vec<f64>)]) {
    let n = model.dim();
    let mut op = ScaledOp {
        model,
        inv_sqrt_m,
        scratch: vec![0.0; n],
    };
    let mut z = vec![0.0; n];
    let mut cz = vec![0.0; n];
    for k in 0..pairs.len() {
        if op.solve(&pairs[k].1, &mut z, 1e-12).is_err() {
            continue; // keep the unpolished Ritz pair
        }
        for j in 0..k {
            let dot: f64 = z.iter().zip(&pairs[j].1).map(|(a, b)| a * b).sum();
            for i in 0..n {
                z[i] -= dot * pairs[j].1[i];
            }
        }
        normalize(&mut z);
        op.apply(&z, &mut cz);
        let theta: f64 = z.iter().zip(&cz).map(|(a, b)| a * b).sum();
        pairs[k].0 = theta;
        pairs[k].1.copy_from_slice(&z);
    }
}

/// True when the inertia count confirms that `accepted` contains every
/// eigenvalue up to its m-th smallest entry.
fn spectrum_complete(
    model: &DiscreteModel,
    accepted: &[(f64, Vec<f64>)],
    m: usize,
) -> Result<bool> {
    let lambda_m = accepted[m - 1].0;
    let cut = lambda_m * (1.0 + 1e-8);
    let have = accepted.iter().filter(|(l, _)| *l <= cut).count();
    let count = super::inertia::count_below(model, cut)?;
    Ok(count <= have)
}

fn lanczos_sweep(
    model: &DiscreteModel,
    inv_sqrt_m: &[f64],
    want: usize,
    tol: f64,
    deflate: &[(f64, Vec<f64>)],
    sweep: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = model.dim();
    let mut op = ScaledOp {
        model,
        inv_sqrt_m,
        scratch: vec![0.0; n],
    };
    let cg_tol = (tol * 1e-2).min(1e-10);
    let max_steps = 200.min(n - deflate.len());
    let project_out = |w: &mut [f64], basis: &[Vec<f64>]| {
        for _ in 0..2 {
            for (_, y) in deflate {
                let proj: f64 = w.iter().zip(y).map(|(a, c)| a * c).sum();
                for (wi, yi) in w.iter_mut().zip(y) {
                    *wi -= proj * yi;
                }
            }
            for b in basis {
                let proj: f64 = w.iter().zip(b).map(|(a, c)| a * c).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
    };

    let mut v = vec![0.0f64; n];
    for (i, vi) in v.iter_mut().enumerate() {
        *vi = ((i as f64 + 1.0) * (1.0 + 0.37 * sweep as f64) + 0.2 * sweep as f64).sin();
    }
    project_out(&mut v, &[]);
    normalize(&mut v);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut result: Option<(Vec<f64>, DMatrix<f64>)> = None;

    for step in 0..max_steps {
        let mut w = vec![0.0; n];
        op.solve(&basis[step], &mut w, cg_tol)?;
        let alpha: f64 = w.iter().zip(&basis[step]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        project_out(&mut w, &basis);
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let last = step % 5 == 4 || beta < 1e-12 || step + 1 == max_steps;

        if last {
            let k = alphas.len();
            let mut t = DMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alphas[i];
                if i + 1 < k {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = t.symmetric_eigen();
            let mut order: Vec<usize> = (0..k).collect();
            // largest theta of C^{-1} first, i.e. smallest lambda
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let converged: Vec<usize> = order
                .iter()
                .take(want)
                .copied()
                .filter(|&idx| {
                    let theta = eig.eigenvalues[idx];
                    let bound = beta * eig.eigenvectors[(k - 1, idx)].abs();
                    theta > 0.0 && (bound <= 0.1 * tol * theta || beta < 1e-12)
                })
                .collect();
            if converged.len() == want || beta < 1e-12 || step + 1 == max_steps {
                let thetas: Vec<f64> = converged.iter().map(|&i| eig.eigenvalues[i]).collect();
                let mut s = DMatrix::<f64>::zeros(k, converged.len());
                for (col, &idx) in converged.iter().enumerate() {
                    s.set_column(col, &eig.eigenvectors.column(idx));
                }
                result = Some((thetas, s));
                if converged.len() == want || beta < 1e-12 {
                    break;
                }
            }
        }

        if beta < 1e-12 {
            break;
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }

    let (thetas, s) = result.ok_or_else(|| {
        Error::ConvergenceFailure("Lanczos did not reach the Ritz residual target".into())
    })?;

    let mut pairs = Vec::with_capacity(thetas.len());
    for (col, &theta) in thetas.iter().enumerate() {
        let lambda = 1.0 / theta;
        let mut y = vec![0.0; n];
        for (j, b) in basis.iter().enumerate().take(s.nrows()) {
            let c = s[(j, col)];
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += c * bi;
            }
        }
        normalize(&mut y);
        pairs.push((lambda, y));
    }
    Ok(pairs)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v {
        *x /= norm;
    }
}
