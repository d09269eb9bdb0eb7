//! Shared spectrum containers and the extended nonnegative reals.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A nonnegative real or +infinity. Infinity serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn is_zero(self) -> bool {
        matches!(self, ExtReal::Finite(v) if v == 0.0)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinity => None,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_infinite() {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                if v == "inf" {
                    Ok(ExtReal::Infinity)
                } else {
                    Err(E::custom(format!("expected \"inf\", got {v:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Provenance of a spectrum entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumTag {
    /// Dirichlet eigenvalue of the base domain.
    Base,
    /// Root of the tan-branch equation.
    Tan,
    /// Root of the cot-branch equation.
    Cot,
    /// Simultaneous root of both branch equations.
    Both,
    /// Base eigenvalue shifted by 2V (coupled system, antisymmetric component).
    Plus2V,
    /// Base eigenvalue scaled by the effective coefficient.
    Scaled,
}

impl fmt::Display for SpectrumTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpectrumTag::Base => "base",
            SpectrumTag::Tan => "tan",
            SpectrumTag::Cot => "cot",
            SpectrumTag::Both => "both",
            SpectrumTag::Plus2V => "plus2V",
            SpectrumTag::Scaled => "scaled",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: u32,
    pub tag: SpectrumTag,
}

/// Sorted eigenvalue list with multiplicities plus accumulation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub accumulation_points: Vec<f64>,
}

impl Spectrum {
    pub fn empty() -> Self {
        Spectrum::default()
    }

    /// Eigenvalue count including multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity as usize).sum()
    }

    /// The m-th eigenvalue (1-based) counting multiplicity.
    pub fn nth(&self, m: usize) -> Option<&SpectrumEntry> {
        let mut seen = 0usize;
        for e in &self.entries {
            seen += e.multiplicity as usize;
            if seen >= m {
                return Some(e);
            }
        }
        None
    }

    /// Flat eigenvalue list, each value repeated by its multiplicity.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for e in &self.entries {
            for _ in 0..e.multiplicity {
                out.push(e.value);
            }
        }
        out
    }

    /// Build from a sorted list of (value, tag) pairs, aggregating values that
    /// coincide to `rel_tol` into multiplicity. Entries sharing a value but
    /// not a tag are kept separate unless `merge_tag` maps them together.
    pub fn aggregate(mut values: Vec<(f64, SpectrumTag)>, rel_tol: f64) -> Self {
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        for (v, tag) in values {
            match entries.last_mut() {
                Some(last)
                    if last.tag == tag && (v - last.value).abs() <= rel_tol * v.abs().max(1.0) =>
                {
                    last.multiplicity += 1;
                }
                _ => entries.push(SpectrumEntry {
                    value: v,
                    multiplicity: 1,
                    tag,
                }),
            }
        }
        Spectrum {
            entries,
            accumulation_points: Vec::new(),
        }
    }

    /// Keep the first `count` eigenvalues counting multiplicity; the final
    /// entry is truncated if its multiplicity straddles the cut.
    pub fn truncate_multiplicity(&mut self, count: usize) {
        let mut seen = 0usize;
        let mut keep = 0usize;
        for e in &mut self.entries {
            if seen >= count {
                break;
            }
            let take = (e.multiplicity as usize).min(count - seen);
            e.multiplicity = take as u32;
            seen += take;
            keep += 1;
        }
        self.entries.truncate(keep);
    }
}
