//! Convergence verification of the eigenvalue limit theorems against the
//! direct finite-difference model.

use super::{assemble, smallest_eigenpairs, sheet_symmetry_indicator, ModelConfig};
use crate::base::box_dirichlet_spectrum;
use crate::error::{Error, Result};
use crate::limit::eigenvalue_limit;
use crate::regime::{classify, limits_from_law, HomogenizedProblem, ScalingLaw};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    /// Grid refinement K (h = eps/K).
    pub refine: u32,
    pub sides: [f64; 2],
    /// Eigensolver residual tolerance.
    pub tol: f64,
    /// Relative-error bound at the finest eps for a "pass" verdict.
    pub pass_threshold: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            refine: 4,
            sides: [1.0, 1.0],
            tol: 1e-8,
            pass_threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub dim: usize,
    pub computed: Vec<f64>,
    pub predicted: Vec<f64>,
    pub rel_errors: Vec<f64>,
    /// Sheet-symmetry indicator of the ground eigenvector.
    pub ground_symmetry: Option<f64>,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Which limit theorem the classified regime falls under.
    pub theorem: String,
    pub regime: HomogenizedProblem,
    /// Rows sorted by decreasing eps.
    pub rows: Vec<ConvergenceRow>,
    /// True iff the lambda_1 relative error strictly decreases along the
    /// rows and the final error is below the threshold.
    pub verdict: bool,
    pub seconds: f64,
}

/// Runs the direct model over `eps_list` and compares the first `m`
/// eigenvalues against the predicted limits of the classified regime.
/// Per-row failures are recorded without aborting the remaining rows.
pub fn convergence_study(
    law: &ScalingLaw,
    eps_list: &[f64],
    m: usize,
    options: &StudyOptions,
) -> Result<ConvergenceReport> {
    if eps_list.is_empty() || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "eps list must be nonempty and strictly decreasing".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let start = Instant::now();
    let limits = limits_from_law(law)?;
    let omega = crate::base::sphere_volume(law.dim);
    let regime = classify(&limits, law.dim, omega)?;
    let theorem = match regime {
        HomogenizedProblem::Pencil { .. } => "theorem 8",
        HomogenizedProblem::DecoupledThreshold { .. } => "theorem 10",
        HomogenizedProblem::ScaledLaplacian { .. } | HomogenizedProblem::Coupled { .. } => {
            "theorem 6"
        }
    }
    .to_string();

    let base = box_dirichlet_spectrum(&options.sides, m + 40)?;
    let predicted: Vec<f64> = (1..=m)
        .map(|i| eigenvalue_limit(&regime, &base, i).map(|r| r.limit_value))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let row_start = Instant::now();
        let row = match run_row(law, eps, m, &predicted, options) {
            Ok(mut row) => {
                row.seconds = row_start.elapsed().as_secs_f64();
                row
            }
            Err(e) => ConvergenceRow {
                eps,
                dim: 0,
                computed: Vec::new(),
                predicted: predicted.clone(),
                rel_errors: Vec::new(),
                ground_symmetry: None,
                error: Some(e.to_string()),
                seconds: row_start.elapsed().as_secs_f64(),
            },
        };
        rows.push(row);
    }

    let errors: Vec<f64> = rows
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| r.rel_errors[0])
        .collect();
    let verdict = errors.len() == rows.len()
        && errors.windows(2).all(|w| w[1] < w[0])
        && *errors.last().unwrap() < options.pass_threshold;

    Ok(ConvergenceReport {
        theorem,
        regime,
        rows,
        verdict,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_row(
    law: &ScalingLaw,
    eps: f64,
    m: usize,
    predicted: &[f64],
    options: &StudyOptions,
) -> Result<ConvergenceRow> {
    let config = ModelConfig::new(*law, eps, options.refine, options.sides)?;
    let model = assemble(&config)?;
    let pairs = smallest_eigenpairs(&model, m, options.tol)?;
    let computed: Vec<f64> = pairs.iter().map(|(l, _)| *l).collect();
    let rel_errors: Vec<f64> = computed
        .iter()
        .zip(predicted)
        .map(|(c, p)| (c - p).abs() / p.abs())
        .collect();
    let ground_symmetry = Some(sheet_symmetry_indicator(&model, &pairs[0].1));
    Ok(ConvergenceRow {
        eps,
        dim: model.dim(),
        computed,
        predicted: predicted.to_vec(),
        rel_errors,
        ground_symmetry,
        error: None,
        seconds: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::pencil_law;
    use super::*;
    use crate::regime::Rational;

    #[test]
    fn rejects_bad_eps_list() {
        let law = pencil_law();
        let options = StudyOptions::default();
        assert!(convergence_study(&law, &[], 1, &options).is_err());
        assert!(convergence_study(&law, &[0.25, 0.25], 1, &options).is_err());
        assert!(convergence_study(&law, &[0.125, 0.25], 1, &options).is_err());
    }

    #[test]
    fn bad_row_is_recorded_not_fatal() {
        let law = pencil_law();
        let options = StudyOptions {
            // huge refinement at the coarse eps violates d < h only... the
            // opposite: tiny refinement makes d exceed h at no eps here, so
            // use a side length indivisible at the second eps instead.
            sides: [1.0, 1.0],
            ..StudyOptions::default()
        };
        // eps = 3/16 is not a power of two: the row fails during config
        let report = convergence_study(&law, &[0.25, 0.1875], 1, &options).unwrap();
        assert!(report.rows[0].error.is_none());
        assert!(report.rows[1].error.is_some());
        assert!(!report.verdict);
    }

    #[test]
    fn pencil_study_converges_at_coarse_scale() {
        // Two coarse eps values keep this fast; the full three-level run is
        // exercised by the acceptance suite.
        let law = pencil_law();
        let options = StudyOptions::default();
        let report = convergence_study(&law, &[0.25, 0.125], 1, &options).unwrap();
        assert_eq!(report.theorem, "theorem 8");
        let e: Vec<f64> = report.rows.iter().map(|r| r.rel_errors[0]).collect();
        assert!(e[1] < e[0], "errors {e:?}");
    }

    #[test]
    fn decoupled_theorem_is_labelled() {
        // alpha = 3, beta = 0 at N = 2: q = 1 > 0 and p = 0
        let law = ScalingLaw::power(2, 0.5, Rational::new(3, 1), 1.0, Rational::new(0, 1))
            .unwrap();
        let limits = limits_from_law(&law).unwrap();
        assert_eq!(limits.p, 0.0);
        assert!(limits.q > 0.0);
        let report = convergence_study(&law, &[0.25], 1, &StudyOptions::default()).unwrap();
        assert_eq!(report.theorem, "theorem 10");
    }
}
