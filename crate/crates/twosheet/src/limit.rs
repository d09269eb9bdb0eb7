//! Homogenized spectra of the four limit problems and number-by-number
//! eigenvalue limits.

use crate::error::{Error, Result};
use crate::pencil::{pencil_spectrum, PencilParams};
use crate::regime::HomogenizedProblem;
use crate::spectrum::{Spectrum, SpectrumEntry, SpectrumTag};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of intervals J_n enumerated for pencil-type spectra.
pub const DEFAULT_N_MAX: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    /// The m-th discrete eigenvalue of the limit problem.
    #[serde(rename = "discrete eigenvalue")]
    Discrete,
    /// The threshold pi^2 q^{-2}, the limit for every index beyond the
    /// threshold index.
    #[serde(rename = "threshold π²q⁻²")]
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitQueryResult {
    pub m: usize,
    pub limit_value: f64,
    pub kind: LimitKind,
}

fn doubled(base: &Spectrum) -> Vec<SpectrumEntry> {
    base.entries
        .iter()
        .map(|e| SpectrumEntry {
            value: e.value,
            multiplicity: 2 * e.multiplicity,
            tag: SpectrumTag::Base,
        })
        .collect()
}

fn accumulation_points(q: f64, n_max: u32) -> Vec<f64> {
    (1..=n_max).map(|n| (PI * n as f64 / q).powi(2)).collect()
}

/// The full homogenized spectrum of a limit problem over the given base
/// spectrum, truncated to `count` eigenvalues counting multiplicity.
pub fn homogenized_spectrum(
    problem: &HomogenizedProblem,
    base: &Spectrum,
    count: usize,
) -> Result<Spectrum> {
    assert!(count >= 1);
    let mut spec = match *problem {
        HomogenizedProblem::Pencil { p, q, omega } => {
            let params = PencilParams::new(p, q, omega);
            pencil_spectrum(base, &params, DEFAULT_N_MAX, count)?.to_spectrum()
        }
        HomogenizedProblem::DecoupledThreshold { q } => Spectrum {
            entries: doubled(base),
            accumulation_points: accumulation_points(q, DEFAULT_N_MAX),
        },
        HomogenizedProblem::ScaledLaplacian { c } => Spectrum {
            entries: base
                .entries
                .iter()
                .map(|e| SpectrumEntry {
                    value: e.value * c,
                    multiplicity: e.multiplicity,
                    tag: SpectrumTag::Scaled,
                })
                .collect(),
            accumulation_points: Vec::new(),
        },
        HomogenizedProblem::Coupled { v } => {
            if v == 0.0 {
                Spectrum {
                    entries: doubled(base),
                    accumulation_points: Vec::new(),
                }
            } else {
                // u+ keeps the base values, u- is shifted by 2V.
                let mut entries = base.entries.clone();
                entries.extend(base.entries.iter().map(|e| SpectrumEntry {
                    value: e.value + 2.0 * v,
                    multiplicity: e.multiplicity,
                    tag: SpectrumTag::Plus2V,
                }));
                entries.sort_by(|a, b| a.value.total_cmp(&b.value));
                Spectrum {
                    entries,
                    accumulation_points: Vec::new(),
                }
            }
        }
    };
    spec.truncate_multiplicity(count);
    Ok(spec)
}

/// The threshold index: the number of limit eigenvalues strictly below
/// pi^2 q^{-2}, counted over the doubled base spectrum.
pub fn threshold_index(base: &Spectrum, q: f64) -> usize {
    assert!(q > 0.0);
    let threshold = (PI / q).powi(2);
    base.entries
        .iter()
        .filter(|e| e.value < threshold)
        .map(|e| 2 * e.multiplicity as usize)
        .sum()
}

/// The limit of the m-th eigenvalue of the eps-problem as eps -> 0.
pub fn eigenvalue_limit(
    problem: &HomogenizedProblem,
    base: &Spectrum,
    m: usize,
) -> Result<LimitQueryResult> {
    assert!(m >= 1);
    match *problem {
        HomogenizedProblem::Pencil { p, q, omega } => {
            // The number-by-number limits are the roots in J_1.
            let params = PencilParams::new(p, q, omega);
            let spec = pencil_spectrum(base, &params, 1, m)?;
            let j1 = &spec.intervals[0];
            let mut seen = 0usize;
            for root in &j1.roots {
                seen += root.multiplicity as usize;
                if seen >= m {
                    return Ok(LimitQueryResult {
                        m,
                        limit_value: root.value,
                        kind: LimitKind::Discrete,
                    });
                }
            }
            Err(Error::InsufficientBase {
                needed: m,
                available: seen,
            })
        }
        HomogenizedProblem::DecoupledThreshold { q } => {
            let cap = threshold_index(base, q);
            if m <= cap {
                let value = Spectrum {
                    entries: doubled(base),
                    accumulation_points: Vec::new(),
                }
                .nth(m)
                .expect("threshold index bounds the doubled list")
                .value;
                Ok(LimitQueryResult {
                    m,
                    limit_value: value,
                    kind: LimitKind::Discrete,
                })
            } else {
                Ok(LimitQueryResult {
                    m,
                    limit_value: (PI / q).powi(2),
                    kind: LimitKind::Threshold,
                })
            }
        }
        HomogenizedProblem::ScaledLaplacian { .. } | HomogenizedProblem::Coupled { .. } => {
            let spec = homogenized_spectrum(problem, base, m)?;
            match spec.nth(m) {
                Some(e) => Ok(LimitQueryResult {
                    m,
                    limit_value: e.value,
                    kind: LimitKind::Discrete,
                }),
                None => Err(Error::InsufficientBase {
                    needed: m,
                    available: spec.total_multiplicity(),
                }),
            }
        }
    }
}
