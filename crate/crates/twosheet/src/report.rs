//! Deterministic JSON/CSV rendering of the result types.
//!
//! JSON fields appear in declaration order, floats render shortest
//! round-trip, and extended values serialize as the string "inf", so equal
//! reports produce identical bytes.

use crate::direct::ConvergenceReport;
use crate::pencil::PencilSpectrum;
use crate::spectrum::Spectrum;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(body: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            body,
        }
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report types serialize");
        bytes.push(b'\n');
        bytes
    }
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("value,multiplicity,tag\n");
    for e in &spectrum.entries {
        out.push_str(&format!("{},{},{}\n", e.value, e.multiplicity, e.tag));
    }
    out
}

pub fn pencil_csv(spectrum: &PencilSpectrum) -> String {
    let mut out = String::from("n,value,multiplicity,branch,mu_indices,pole_proximity\n");
    for iv in &spectrum.intervals {
        for r in &iv.roots {
            let indices: Vec<String> = r.mu_indices.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                iv.n,
                r.value,
                r.multiplicity,
                r.branch,
                indices.join(";"),
                r.pole_proximity
            ));
        }
    }
    out
}

pub fn convergence_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("eps,dim,m,computed,predicted,rel_error,error\n");
    for row in &report.rows {
        if let Some(msg) = &row.error {
            out.push_str(&format!(
                "{},{},,,,,\"{}\"\n",
                row.eps,
                row.dim,
                msg.replace('"', "'")
            ));
            continue;
        }
        for (i, c) in row.computed.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},\n",
                row.eps,
                row.dim,
                i + 1,
                c,
                row.predicted[i],
                row.rel_errors[i]
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::box_dirichlet_spectrum;
    use crate::pencil::{pencil_spectrum, PencilParams};
    use std::f64::consts::PI;

    #[test]
    fn json_is_deterministic_and_round_trips() {
        let spec = box_dirichlet_spectrum(&[1.0, 1.0], 6).unwrap();
        let a = Report::new(spec.clone()).to_json_bytes();
        let b = Report::new(spec.clone()).to_json_bytes();
        assert_eq!(a, b);
        let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(parsed["schema_version"], 1);
        let back: Spectrum = serde_json::from_value(parsed.clone()).unwrap();
        assert_eq!(back, spec);
        // accumulation_points present even when empty
        assert!(parsed["accumulation_points"].is_array());
    }

    #[test]
    fn spectrum_csv_shape() {
        let spec = box_dirichlet_spectrum(&[1.0, 1.0], 4).unwrap();
        let csv = spectrum_csv(&spec);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "value,multiplicity,tag");
        assert_eq!(lines.len(), 4); // header + 3 aggregated entries
        assert!(lines[2].ends_with(",2,base"));
    }

    #[test]
    fn pencil_csv_has_branch_tags() {
        let base = box_dirichlet_spectrum(&[1.0, 1.0], 4).unwrap();
        let params = PencilParams::new(1.0, 1.0, 2.0 * PI);
        let spec = pencil_spectrum(&base, &params, 1, 8).unwrap();
        let csv = pencil_csv(&spec);
        assert!(csv.starts_with("n,value,multiplicity,branch,mu_indices,pole_proximity\n"));
        assert!(csv.contains(",tan,"));
    }

    #[test]
    fn infinity_renders_as_string() {
        use crate::spectrum::ExtReal;
        let json = serde_json::to_string(&ExtReal::Infinity).unwrap();
        assert_eq!(json, "\"inf\"");
        let json = serde_json::to_string(&ExtReal::Finite(0.5)).unwrap();
        assert_eq!(json, "0.5");
    }
}
