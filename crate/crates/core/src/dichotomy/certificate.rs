//! Serialisable tractability certificates.

use serde::{Deserialize, Serialize};

use super::structure::Structure;
use crate::cyclotomic::{CycNum, Rational};

/// Rationals as `num/den` strings.
pub(crate) mod rational_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::cyclotomic::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| serde::de::Error::custom("invalid rational"))
    }

    pub mod list {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).ok_or_else(|| serde::de::Error::custom("invalid rational")))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub dim: usize,
    pub components: Vec<ComponentCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCertificate {
    /// Indices of the component in the input matrix, ascending.
    pub indices: Vec<usize>,
    pub body: ComponentBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentBody {
    /// A single index; `entry` in the matrix text format.
    Single { entry: String },
    Structured(Box<StructuredComponent>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredComponent {
    pub bipartite: bool,
    #[serde(with = "rational_text")]
    pub scale: Rational,
    pub n: u64,
    pub n_prime: u64,
    pub h: usize,
    /// Root exponents of the class matrix `H` mod `n`.
    pub hmat: Vec<Vec<u64>>,
    pub h11: u64,
    /// Root exponents of the normalised matrix `X` mod `n_prime`.
    pub x: Vec<Vec<u64>>,
    pub sides: Vec<SideCertificate>,
    pub structure: Structure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCertificate {
    /// Component-local indices of this side, in sorted order.
    pub members: Vec<usize>,
    #[serde(with = "rational_text::list")]
    pub values: Vec<Rational>,
    #[serde(with = "rational_text::list")]
    pub group_values: Vec<Rational>,
    pub group_of: Vec<usize>,
    pub class_of: Vec<usize>,
    pub shift: Vec<u64>,
    pub reps: Vec<usize>,
    /// `K^{[r]}` per magnitude group, `r` in `0..n`.
    pub k: Vec<Vec<CycNum>>,
    /// `L^{[r]}` per twin class, `r` in `0..n`.
    pub l: Vec<Vec<CycNum>>,
    pub pivots: Vec<Option<usize>>,
    pub alpha: Vec<u64>,
    pub vertex_exp: Vec<Option<u64>>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
