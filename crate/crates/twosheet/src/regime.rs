//! Scaling-regime classification.
//!
//! Computes the limits p, q, r, D, Q of a scaling law by exact comparison of
//! rational exponents and selects which homogenized problem governs. No
//! floating-point limit is ever taken: phase boundaries are measure-zero and
//! must be hit exactly.

use crate::error::{Error, Result};
use crate::spectrum::ExtReal;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

pub type Rational = Rational64;

/// Radius law of the holes/tubes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DForm {
    /// d = d0 * eps^alpha
    PowerLaw { d0: f64, alpha: Rational },
    /// d = exp(-a / eps^2), dimension 2 only.
    Exponential { a: f64 },
}

/// Exact description of the tube radius and length as functions of eps:
/// radius per `d_form`, length q0 * eps^beta, in dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLaw {
    pub dim: u32,
    pub d_form: DForm,
    pub q0: f64,
    pub beta: Rational,
}

impl ScalingLaw {
    pub fn new(dim: u32, d_form: DForm, q0: f64, beta: Rational) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("dimension must be >= 2, got {dim}")));
        }
        match d_form {
            DForm::PowerLaw { d0, .. } if !(d0 > 0.0) => {
                return Err(Error::InvalidInput("d0 must be positive".into()))
            }
            DForm::Exponential { a } if !(a > 0.0) => {
                return Err(Error::InvalidInput("a must be positive".into()))
            }
            _ => {}
        }
        if !(q0 > 0.0) {
            return Err(Error::InvalidInput("q0 must be positive".into()));
        }
        if beta.is_negative() {
            return Err(Error::InadmissibleLaw(
                "beta < 0: tube length is unbounded as eps -> 0".into(),
            ));
        }
        Ok(ScalingLaw { dim, d_form, q0, beta })
    }

    pub fn power(dim: u32, d0: f64, alpha: Rational, q0: f64, beta: Rational) -> Result<Self> {
        ScalingLaw::new(dim, DForm::PowerLaw { d0, alpha }, q0, beta)
    }

    /// Tube radius at a concrete eps.
    pub fn d_at(&self, eps: f64) -> f64 {
        match self.d_form {
            DForm::PowerLaw { d0, alpha } => d0 * eps.powf(rat_f64(alpha)),
            DForm::Exponential { a } => (-a / (eps * eps)).exp(),
        }
    }

    /// Tube length at a concrete eps.
    pub fn q_at(&self, eps: f64) -> f64 {
        self.q0 * eps.powf(rat_f64(self.beta))
    }

    /// Checks the admissibility inequalities; reports the first one that fails.
    pub fn check_admissible(&self) -> Result<()> {
        let n = Rational::from_integer(self.dim as i64);
        match self.d_form {
            DForm::PowerLaw { alpha, .. } => {
                if alpha <= Rational::from_integer(1) {
                    return Err(Error::InadmissibleLaw(format!(
                        "alpha = {alpha} <= 1: tube radius is not o(eps)"
                    )));
                }
                // alpha(N-1) + beta - N >= 0, else p = inf
                let gamma_p = alpha * (n - 1) + self.beta - n;
                if gamma_p.is_negative() {
                    return Err(Error::InadmissibleLaw(format!(
                        "alpha(N-1) + beta - N = {gamma_p} < 0: p would be infinite"
                    )));
                }
                Ok(())
            }
            DForm::Exponential { .. } => {
                if self.dim != 2 {
                    Err(Error::InadmissibleLaw(
                        "exponential radius law is only defined for dimension 2".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// The limits p, q, r, D, Q. `big_q` is populated iff 0 < D < inf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeLimits {
    pub p: f64,
    pub q: f64,
    pub r: ExtReal,
    pub big_d: ExtReal,
    pub big_q: Option<ExtReal>,
}

/// Limit of coeff * eps^gamma as eps -> 0, decided by the exact sign of gamma.
fn power_limit(coeff: f64, gamma: Rational) -> ExtReal {
    match gamma.cmp(&Rational::zero()) {
        Ordering::Greater => ExtReal::Finite(0.0),
        Ordering::Equal => ExtReal::Finite(coeff),
        Ordering::Less => ExtReal::Infinity,
    }
}

fn rat_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Computes the limits p, q, r, D, Q from an admissible scaling law.
pub fn limits_from_law(law: &ScalingLaw) -> Result<RegimeLimits> {
    law.check_admissible()?;
    let n = Rational::from_integer(law.dim as i64);
    let nm1 = law.dim as i32 - 1;
    let q = power_limit(law.q0, law.beta)
        .finite()
        .expect("beta >= 0 keeps q finite");

    match law.d_form {
        DForm::PowerLaw { d0, alpha } => {
            // p = lim d^{N-1} q / eps^N
            let gamma_p = alpha * (n - 1) + law.beta - n;
            let p = power_limit(d0.powi(nm1) * law.q0, gamma_p)
                .finite()
                .expect("admissibility keeps p finite");
            // r = lim d^{N-1} / (eps^N q)
            let gamma_r = alpha * (n - 1) - law.beta - n;
            let r = power_limit(d0.powi(nm1) / law.q0, gamma_r);
            // D = lim D^eps / eps^N with D^eps = d^{N-2} (N>2) or 1/|ln d| (N=2).
            // For a power law at N=2, eps^2 |ln d| -> 0, hence D = inf.
            let big_d = if law.dim > 2 {
                let gamma_d = alpha * (n - 2) - n;
                power_limit(d0.powi(law.dim as i32 - 2), gamma_d)
            } else {
                ExtReal::Infinity
            };
            let big_q = match big_d {
                ExtReal::Finite(v) if v > 0.0 => {
                    // N > 2 here: Q = lim q/d = (q0/d0) eps^{beta - alpha}
                    Some(power_limit(law.q0 / d0, law.beta - alpha))
                }
                _ => None,
            };
            Ok(RegimeLimits { p, q, r, big_d, big_q })
        }
        DForm::Exponential { a } => {
            // d decays faster than any power: p = 0, r = 0; D^eps = eps^2/a.
            // Q = lim q / (d |ln d|) = inf for any power-law tube length.
            Ok(RegimeLimits {
                p: 0.0,
                q,
                r: ExtReal::Finite(0.0),
                big_d: ExtReal::Finite(1.0 / a),
                big_q: Some(ExtReal::Infinity),
            })
        }
    }
}

/// The four limit problems of the homogenization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum HomogenizedProblem {
    /// q > 0, p > 0: nonlinear operator pencil.
    Pencil { p: f64, q: f64, omega: f64 },
    /// q > 0, p = 0: decoupled pair with the threshold pi^2 q^{-2}.
    DecoupledThreshold { q: f64 },
    /// q = 0, r = inf, D = inf: Laplacian scaled by c = (1 + p omega / 2)^{-1}.
    ScaledLaplacian { c: f64 },
    /// q = 0, (r < inf, D = inf) or D < inf: coupled system with constant V.
    Coupled { v: f64 },
}

/// Selects the homogenized problem governed by the given limits.
pub fn classify(limits: &RegimeLimits, dim: u32, omega: f64) -> Result<HomogenizedProblem> {
    if !limits.p.is_finite() || !limits.q.is_finite() {
        return Err(Error::InadmissibleLaw(
            "p and q must be finite (main conditions)".into(),
        ));
    }
    if limits.p < 0.0 || limits.q < 0.0 {
        return Err(Error::InvalidInput("p and q must be nonnegative".into()));
    }
    if limits.q > 0.0 {
        if limits.p > 0.0 {
            Ok(HomogenizedProblem::Pencil {
                p: limits.p,
                q: limits.q,
                omega,
            })
        } else {
            Ok(HomogenizedProblem::DecoupledThreshold { q: limits.q })
        }
    } else {
        match (limits.r, limits.big_d) {
            (ExtReal::Infinity, ExtReal::Infinity) => Ok(HomogenizedProblem::ScaledLaplacian {
                c: 1.0 / (1.0 + limits.p * omega / 2.0),
            }),
            (ExtReal::Finite(_), ExtReal::Infinity) | (_, ExtReal::Finite(_)) => {
                Ok(HomogenizedProblem::Coupled {
                    v: coupling_constant(limits, dim, omega)?,
                })
            }
        }
    }
}

/// The coupling constant V of the q = 0 coupled system.
pub fn coupling_constant(limits: &RegimeLimits, dim: u32, omega: f64) -> Result<f64> {
    if limits.q != 0.0 {
        return Err(Error::InvalidInput("coupling constant requires q = 0".into()));
    }
    match (limits.r, limits.big_d) {
        (ExtReal::Finite(r), ExtReal::Infinity) => {
            // r = 0 gives V = 0, 0 < r < inf gives V = r omega.
            Ok(r * omega)
        }
        (_, ExtReal::Finite(d)) if d == 0.0 => Ok(0.0),
        (_, ExtReal::Finite(d)) => match limits.big_q {
            None => Err(Error::MissingQ),
            Some(ExtReal::Infinity) => Ok(0.0),
            Some(ExtReal::Finite(qq)) => {
                if dim > 2 {
                    let nm2 = (dim - 2) as f64;
                    Ok(nm2 * omega * d / (2.0 + nm2 * qq))
                } else {
                    Ok(2.0 * std::f64::consts::PI * d / (2.0 + qq))
                }
            }
        },
        (ExtReal::Infinity, ExtReal::Infinity) => Err(Error::UncoveredRegime(
            "r = inf with D = inf has no coupling constant".into(),
        )),
    }
}

/// Region of the (alpha, beta) phase diagram for a power-law scaling at N > 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    #[serde(rename = "segment(B,C)")]
    SegmentBC,
    #[serde(rename = "ray(C,D)")]
    RayCD,
    #[serde(rename = "segment(C,E)")]
    SegmentCE,
    #[serde(rename = "ray(E,F)")]
    RayEF,
    #[serde(rename = "segment(E,G)")]
    SegmentEG,
    #[serde(rename = "Σ1")]
    Sigma1,
    #[serde(rename = "Σ2")]
    Sigma2,
    #[serde(rename = "inadmissible")]
    Inadmissible,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PhaseLabel::A => "A",
            PhaseLabel::B => "B",
            PhaseLabel::C => "C",
            PhaseLabel::D => "D",
            PhaseLabel::E => "E",
            PhaseLabel::F => "F",
            PhaseLabel::G => "G",
            PhaseLabel::SegmentBC => "segment(B,C)",
            PhaseLabel::RayCD => "ray(C,D)",
            PhaseLabel::SegmentCE => "segment(C,E)",
            PhaseLabel::RayEF => "ray(E,F)",
            PhaseLabel::SegmentEG => "segment(E,G)",
            PhaseLabel::Sigma1 => "Σ1",
            PhaseLabel::Sigma2 => "Σ2",
            PhaseLabel::Inadmissible => "inadmissible",
        };
        f.write_str(s)
    }
}

/// Locates a power-law point (alpha, beta) on the phase diagram. Everything is
/// decided by exact rational comparison against the polyline vertices
/// C = (N/(N-1), 0), E = (N/(N-2), N/(N-2)), G = (N/(N-2), 0).
///
/// The named points A, B, D, F are never returned: A and F sit at beta = inf,
/// D at alpha = inf, and B = (1, 1) fails alpha > 1.
pub fn phase_point(law: &ScalingLaw) -> Result<PhaseLabel> {
    let (d0_unused, alpha) = match law.d_form {
        DForm::PowerLaw { d0, alpha } => (d0, alpha),
        DForm::Exponential { .. } => {
            return Err(Error::InvalidInput(
                "phase diagram is defined for power-law radii only".into(),
            ))
        }
    };
    let _ = d0_unused;
    if law.dim <= 2 {
        return Err(Error::InvalidInput(
            "phase diagram is defined for dimension > 2".into(),
        ));
    }
    if law.check_admissible().is_err() {
        return Ok(PhaseLabel::Inadmissible);
    }

    let n = Rational::from_integer(law.dim as i64);
    let beta = law.beta;
    let alpha_c = n / (n - 1); // abscissa of C
    let alpha_e = n / (n - 2); // abscissa of E, G, F

    if beta.is_zero() {
        // On the horizontal axis: admissibility forces alpha >= N/(N-1).
        return Ok(if alpha == alpha_c {
            PhaseLabel::C
        } else if alpha == alpha_e {
            PhaseLabel::G
        } else {
            PhaseLabel::RayCD
        });
    }

    // beta > 0 from here on, so q = 0.
    let gamma_p = alpha * (n - 1) + beta - n;
    if gamma_p.is_zero() {
        return Ok(PhaseLabel::SegmentBC);
    }
    let gamma_r = alpha * (n - 1) - beta - n; // zero exactly on the line CE
    match alpha.cmp(&alpha_e) {
        Ordering::Equal => Ok(match beta.cmp(&alpha_e) {
            Ordering::Equal => PhaseLabel::E,
            Ordering::Greater => PhaseLabel::RayEF,
            Ordering::Less => PhaseLabel::SegmentEG,
        }),
        Ordering::Less => Ok(match gamma_r.cmp(&Rational::zero()) {
            Ordering::Equal => PhaseLabel::SegmentCE,
            Ordering::Less => PhaseLabel::Sigma1,
            Ordering::Greater => PhaseLabel::Sigma2, // triangle CEG: r = 0
        }),
        Ordering::Greater => Ok(PhaseLabel::Sigma2), // right of EF: D = 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn power_law(dim: u32, d0: f64, alpha: Rational, q0: f64, beta: Rational) -> ScalingLaw {
        ScalingLaw::power(dim, d0, alpha, q0, beta).unwrap()
    }

    #[test]
    fn point_c_limits() {
        // N=3, alpha=3/2, beta=0, d=1, q=1: q = 1, p = d^{N-1} q = 1
        let law = power_law(3, 1.0, rat(3, 2), 1.0, rat(0, 1));
        let lim = limits_from_law(&law).unwrap();
        assert_eq!(lim.p, 1.0);
        assert_eq!(lim.q, 1.0);
    }

    #[test]
    fn ray_cd_limits() {
        let law = power_law(3, 2.0, rat(2, 1), 3.0, rat(0, 1));
        let lim = limits_from_law(&law).unwrap();
        assert_eq!(lim.p, 0.0);
        assert_eq!(lim.q, 3.0);
    }

    #[test]
    fn exponential_d_limit() {
        let law = ScalingLaw::new(2, DForm::Exponential { a: 5.0 }, 1.0, rat(0, 1)).unwrap();
        let lim = limits_from_law(&law).unwrap();
        assert_eq!(lim.big_d, ExtReal::Finite(0.2));
        assert_eq!(lim.p, 0.0);
    }

    #[test]
    fn sigma2_limits() {
        // N=3, alpha=4, beta=1: q=0, p=0, D=0
        let law = power_law(3, 1.0, rat(4, 1), 1.0, rat(1, 1));
        let lim = limits_from_law(&law).unwrap();
        assert_eq!(lim.q, 0.0);
        assert_eq!(lim.p, 0.0);
        assert_eq!(lim.big_d, ExtReal::Finite(0.0));
    }

    #[test]
    fn inadmissible_reports_failing_inequality() {
        let law = power_law(3, 1.0, rat(11, 10), 1.0, rat(0, 1));
        match limits_from_law(&law) {
            Err(Error::InadmissibleLaw(msg)) => assert!(msg.contains("alpha(N-1)"), "{msg}"),
            other => panic!("expected InadmissibleLaw, got {other:?}"),
        }
        let law = ScalingLaw {
            dim: 3,
            d_form: DForm::PowerLaw { d0: 1.0, alpha: rat(1, 2) },
            q0: 1.0,
            beta: rat(5, 1),
        };
        match limits_from_law(&law) {
            Err(Error::InadmissibleLaw(msg)) => assert!(msg.contains("alpha"), "{msg}"),
            other => panic!("expected InadmissibleLaw, got {other:?}"),
        }
    }

    #[test]
    fn classify_pencil() {
        let lim = RegimeLimits {
            p: 1.0,
            q: 1.0,
            r: ExtReal::Infinity,
            big_d: ExtReal::Infinity,
            big_q: None,
        };
        assert!(matches!(
            classify(&lim, 3, 4.0 * PI).unwrap(),
            HomogenizedProblem::Pencil { p: 1.0, q: 1.0, .. }
        ));
    }

    #[test]
    fn classify_scaled_laplacian() {
        let lim = RegimeLimits {
            p: 0.5,
            q: 0.0,
            r: ExtReal::Infinity,
            big_d: ExtReal::Infinity,
            big_q: None,
        };
        match classify(&lim, 3, 4.0 * PI).unwrap() {
            HomogenizedProblem::ScaledLaplacian { c } => {
                assert_relative_eq!(c, 1.0 / (1.0 + PI), max_relative = 1e-15)
            }
            other => panic!("expected ScaledLaplacian, got {other:?}"),
        }
    }

    #[test]
    fn classify_coupled_d_zero() {
        let lim = RegimeLimits {
            p: 0.0,
            q: 0.0,
            r: ExtReal::Infinity,
            big_d: ExtReal::Finite(0.0),
            big_q: None,
        };
        match classify(&lim, 3, 4.0 * PI).unwrap() {
            HomogenizedProblem::Coupled { v } => assert_eq!(v, 0.0),
            other => panic!("expected Coupled, got {other:?}"),
        }
    }

    #[test]
    fn classify_infinite_p_is_inadmissible() {
        let lim = RegimeLimits {
            p: f64::INFINITY,
            q: 1.0,
            r: ExtReal::Infinity,
            big_d: ExtReal::Infinity,
            big_q: None,
        };
        assert!(matches!(classify(&lim, 3, 4.0 * PI), Err(Error::InadmissibleLaw(_))));
    }

    #[test]
    fn coupling_constant_cases() {
        let omega3 = 4.0 * PI;
        let mk = |r, d, q| RegimeLimits {
            p: 0.0,
            q: 0.0,
            r,
            big_d: d,
            big_q: q,
        };
        // 0 < r < inf, D = inf: V = r omega
        let v = coupling_constant(&mk(ExtReal::Finite(0.5), ExtReal::Infinity, None), 3, omega3)
            .unwrap();
        assert_relative_eq!(v, 2.0 * PI, max_relative = 1e-15);
        // N > 2 row: V = (N-2) omega D / (2 + (N-2) Q)
        let v = coupling_constant(
            &mk(ExtReal::Finite(0.0), ExtReal::Finite(0.5), Some(ExtReal::Finite(0.0))),
            3,
            omega3,
        )
        .unwrap();
        assert_relative_eq!(v, PI, max_relative = 1e-15);
        // N = 2 row: V = 2 pi D / (2 + Q)
        let v = coupling_constant(
            &mk(ExtReal::Finite(0.0), ExtReal::Finite(0.2), Some(ExtReal::Finite(3.0))),
            2,
            2.0 * PI,
        )
        .unwrap();
        assert_relative_eq!(v, 0.4 * PI / 5.0, max_relative = 1e-15);
        // Q = inf zeroes the coupling
        let v = coupling_constant(
            &mk(ExtReal::Finite(0.0), ExtReal::Finite(0.7), Some(ExtReal::Infinity)),
            3,
            omega3,
        )
        .unwrap();
        assert_eq!(v, 0.0);
        // Missing Q with 0 < D < inf
        assert_eq!(
            coupling_constant(&mk(ExtReal::Finite(0.0), ExtReal::Finite(0.7), None), 3, omega3),
            Err(Error::MissingQ)
        );
    }

    #[test]
    fn phase_labels() {
        let cases: &[(i64, i64, i64, i64, PhaseLabel)] = &[
            // (alpha_n, alpha_d, beta_n, beta_d, label) at N = 3
            (3, 2, 0, 1, PhaseLabel::C),
            (3, 1, 0, 1, PhaseLabel::G),
            (2, 1, 0, 1, PhaseLabel::RayCD),
            (6, 5, 1, 1, PhaseLabel::Sigma1),
            (4, 1, 1, 1, PhaseLabel::Sigma2),
            (5, 4, 1, 2, PhaseLabel::SegmentBC),
            (7, 4, 1, 2, PhaseLabel::SegmentCE),
            (3, 1, 3, 1, PhaseLabel::E),
            (3, 1, 5, 1, PhaseLabel::RayEF),
            (3, 1, 1, 1, PhaseLabel::SegmentEG),
            (2, 1, 1, 2, PhaseLabel::Sigma2), // inside triangle CEG
            (1, 1, 1, 1, PhaseLabel::Inadmissible), // point B
            (9, 8, 0, 1, PhaseLabel::Inadmissible), // gamma_p < 0
        ];
        for &(an, ad, bn, bd, want) in cases {
            let law = ScalingLaw {
                dim: 3,
                d_form: DForm::PowerLaw { d0: 1.0, alpha: rat(an, ad) },
                q0: 1.0,
                beta: rat(bn, bd),
            };
            assert_eq!(phase_point(&law).unwrap(), want, "alpha={an}/{ad} beta={bn}/{bd}");
        }
    }

    #[test]
    fn segment_bc_classifies_as_scaled_laplacian_with_positive_p() {
        // On (B,C): q=0, r=inf, D=inf, p = d0^{N-1} q0 > 0
        let law = power_law(3, 1.0, rat(5, 4), 1.0, rat(1, 2));
        let lim = limits_from_law(&law).unwrap();
        assert_eq!(lim.p, 1.0);
        match classify(&lim, 3, 4.0 * PI).unwrap() {
            HomogenizedProblem::ScaledLaplacian { c } => {
                assert_relative_eq!(c, 1.0 / (1.0 + 2.0 * PI), max_relative = 1e-15)
            }
            other => panic!("expected ScaledLaplacian, got {other:?}"),
        }
    }

    #[test]
    fn segment_ce_gives_positive_coupling() {
        // On (C,E): r = d0^{N-1}/q0 finite, D = inf, V = r omega > 0
        let law = power_law(3, 1.0, rat(7, 4), 1.0, rat(1, 2));
        let lim = limits_from_law(&law).unwrap();
        assert_eq!(lim.r, ExtReal::Finite(1.0));
        match classify(&lim, 3, 4.0 * PI).unwrap() {
            HomogenizedProblem::Coupled { v } => assert_relative_eq!(v, 4.0 * PI),
            other => panic!("expected Coupled, got {other:?}"),
        }
    }
}
