//! Dirichlet spectrum of the base box domain: closed-form separation of
//! variables plus a finite-difference oracle, and the unit-sphere constant.

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SpectrumTag};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Relative tolerance under which two closed-form eigenvalues are treated as
/// one eigenvalue with higher multiplicity.
pub const COINCIDENCE_REL_TOL: f64 = 1e-12;

/// Surface measure of the unit sphere S^{N-1}: 2 pi^{N/2} / Gamma(N/2).
pub fn sphere_volume(dim: u32) -> f64 {
    assert!(dim >= 2, "dimension must be >= 2");
    // Gamma(N/2) for integer N: (N/2-1)! when N is even,
    // sqrt(pi) (N-2)!! / 2^{(N-1)/2} when N is odd.
    let gamma_half_n = if dim % 2 == 0 {
        let mut g = 1.0;
        for k in 1..(dim / 2) {
            g *= k as f64;
        }
        g
    } else {
        // Gamma(N/2) = sqrt(pi) * (1/2)(3/2)...((N-2)/2)
        let mut g = PI.sqrt();
        let mut j = 1u32;
        while j <= dim - 2 {
            g *= j as f64 / 2.0;
            j += 2;
        }
        g
    };
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_n
}

/// First `count` Dirichlet eigenvalues (with multiplicity) of -Laplace on a
/// box with the given side lengths: mu = pi^2 sum_j k_j^2 / a_j^2, k_j >= 1.
pub fn box_dirichlet_spectrum(side_lengths: &[f64], count: usize) -> Result<Spectrum> {
    validate_sides(side_lengths)?;
    if count == 0 {
        return Ok(Spectrum::empty());
    }
    let inv_sq: Vec<f64> = side_lengths.iter().map(|a| 1.0 / (a * a)).collect();
    let mut bound = 4.0 * PI * PI * inv_sq.iter().sum::<f64>();
    loop {
        let mut values = Vec::new();
        collect_lattice(&inv_sq, 0, 0.0, bound / (PI * PI), &mut values);
        if values.len() >= count {
            let tagged = values
                .into_iter()
                .map(|v| (PI * PI * v, SpectrumTag::Base))
                .collect();
            let mut spec = Spectrum::aggregate(tagged, COINCIDENCE_REL_TOL);
            spec.truncate_multiplicity(count);
            return Ok(spec);
        }
        bound *= 2.0;
    }
}

/// All Dirichlet box eigenvalues strictly below `threshold`.
pub fn box_dirichlet_spectrum_below(side_lengths: &[f64], threshold: f64) -> Result<Spectrum> {
    validate_sides(side_lengths)?;
    let inv_sq: Vec<f64> = side_lengths.iter().map(|a| 1.0 / (a * a)).collect();
    let mut values = Vec::new();
    collect_lattice(&inv_sq, 0, 0.0, threshold / (PI * PI), &mut values);
    let tagged = values
        .into_iter()
        .map(|v| (PI * PI * v, SpectrumTag::Base))
        .filter(|(v, _)| *v < threshold)
        .collect();
    Ok(Spectrum::aggregate(tagged, COINCIDENCE_REL_TOL))
}

fn validate_sides(side_lengths: &[f64]) -> Result<()> {
    if side_lengths.is_empty() {
        return Err(Error::InvalidInput("side lengths must be nonempty".into()));
    }
    if side_lengths.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidInput("side lengths must be positive".into()));
    }
    Ok(())
}

/// Recursively enumerates lattice tuples k_j >= 1 with
/// sum_j k_j^2 / a_j^2 <= bound, pushing the partial sums.
fn collect_lattice(inv_sq: &[f64], axis: usize, acc: f64, bound: f64, out: &mut Vec<f64>) {
    if axis == inv_sq.len() {
        out.push(acc);
        return;
    }
    let mut k = 1u64;
    loop {
        let term = (k * k) as f64 * inv_sq[axis];
        let next = acc + term;
        if next > bound {
            break;
        }
        // remaining axes each need at least 1/a^2
        let min_rest: f64 = inv_sq[axis + 1..].iter().sum();
        if next + min_rest <= bound {
            collect_lattice(inv_sq, axis + 1, next, bound, out);
        }
        k += 1;
    }
}

/// Spectrum of the (2N+1)-point finite-difference Dirichlet Laplacian on a
/// grid of spacing `h`. The operator is a Kronecker sum, so its eigenvalues
/// are sums of numerically computed 1-D tridiagonal eigenvalues per axis.
pub fn fd_dirichlet_spectrum(side_lengths: &[f64], h: f64, count: usize) -> Result<Spectrum> {
    validate_sides(side_lengths)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput("h must be positive".into()));
    }
    let mut axis_eigs: Vec<Vec<f64>> = Vec::new();
    let mut grid_size = 1usize;
    for &a in side_lengths {
        let segs = (a / h).round();
        if ((a / h) - segs).abs() > 1e-9 || segs < 2.0 {
            return Err(Error::InvalidInput(format!(
                "h = {h} does not divide side length {a} into >= 2 segments"
            )));
        }
        let n = segs as usize - 1; // interior nodes on this axis
        grid_size *= n;
        axis_eigs.push(fd_interval_eigenvalues(n, h));
    }
    if count > grid_size {
        return Err(Error::ResolutionTooCoarse {
            requested: count,
            available: grid_size,
        });
    }
    let mut sums = vec![0.0f64];
    for eigs in &axis_eigs {
        let mut next = Vec::with_capacity(sums.len() * eigs.len());
        for &s in &sums {
            for &e in eigs {
                next.push(s + e);
            }
        }
        sums = next;
    }
    sums.sort_by(f64::total_cmp);
    sums.truncate(count);
    let tagged = sums.into_iter().map(|v| (v, SpectrumTag::Base)).collect();
    Ok(Spectrum::aggregate(tagged, COINCIDENCE_REL_TOL))
}

/// Eigenvalues of the 1-D FD Dirichlet Laplacian with `n` interior nodes and
/// spacing `h`, by dense symmetric eigensolve of the tridiagonal matrix.
fn fd_interval_eigenvalues(n: usize, h: f64) -> Vec<f64> {
    let inv_h2 = 1.0 / (h * h);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 2.0 * inv_h2;
        if i + 1 < n {
            m[(i, i + 1)] = -inv_h2;
            m[(i + 1, i)] = -inv_h2;
        }
    }
    let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Closed-form eigenvalues of the 1-D FD Dirichlet Laplacian:
/// (4/h^2) sin^2(k pi h / (2 a)), k = 1..a/h-1. Used as an oracle.
pub fn fd_closed_form_axis(a: f64, h: f64) -> Vec<f64> {
    let segs = (a / h).round() as usize;
    (1..segs)
        .map(|k| {
            let s = (k as f64 * PI * h / (2.0 * a)).sin();
            4.0 / (h * h) * s * s
        })
        .collect()
}
