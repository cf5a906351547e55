//! Decide tractability of `Z_A` for a symmetric matrix of pure entries.
//!
//! Each connected component of `A` goes through three stages. Step 1 checks
//! that the magnitudes have rank one. Step 2 groups indices into twin classes,
//! checks the shape of the resulting pair `(C, D)` and normalises it. Step 3
//! checks the group, coset and quadratic conditions and records a Fourier
//! decomposition. Success yields a [`Certificate`] carrying everything the
//! evaluator needs; failure yields a [`Witness`] naming the first violated condition.

mod certificate;
mod steps;
mod structure;
mod validate;

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

pub use certificate::{Certificate, ComponentBody, ComponentCertificate, SideCertificate, StructuredComponent};
pub use steps::{step1_bulatov_grohe, step2_build_cd, step2_check_shapes, step2_normalize, CdPair, Normalized, Shapes, SideStructure, Step1};
pub use structure::{fourier_decompose, step3_structure, ClassData, Fourier, FourierBlock, PrimePart, Shift, Structure};
pub use validate::validate_certificate;

use crate::cyclotomic::{CycNum, Rational};
use crate::formats::format_entry;
use crate::model::{components, PureEntry, PureMatrix};

/// The first violated condition, located by component and stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub component: usize,
    pub stage: String,
    pub condition: String,
    pub detail: String,
}

impl Witness {
    pub(crate) fn new(stage: &str, condition: &str, detail: impl Into<String>) -> Self {
        Witness {
            component: 0,
            stage: stage.to_string(),
            condition: condition.to_string(),
            detail: detail.into(),
        }
    }

    /// `stage:condition`, e.g. `step2:shape6`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.stage, self.condition)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (component {}: {})", self.label(), self.component, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Tractable(Certificate),
    PHard(Witness),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DichotomyError {
    #[error("entry ({0}, {1}) is not a rational multiple of a root of unity")]
    NonPureEntry(usize, usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    let root = |b: &BigInt| {
        let s = b.sqrt();
        (&s * &s == *b).then_some(s)
    };
    Some(Rational::new(root(r.numer())?, root(r.denom())?))
}

/// Write `z` as `magnitude · ω_d^k` if it has that form.
pub fn pure_entry_of(z: &CycNum) -> Option<PureEntry> {
    if z.is_zero() {
        return Some(PureEntry::zero());
    }
    let norm = z.norm_sq().rational_value().ok()?;
    let mag = rational_sqrt(&norm)?;
    let unit = z.scale(&mag.recip());
    let (d, k) = unit.root_of_unity()?;
    PureEntry::new(mag, d, k).ok()
}

/// Convert a symmetric matrix of cyclotomic numbers and decide it.
pub fn decide_values(rows: &[Vec<CycNum>]) -> Result<Verdict, DichotomyError> {
    let m = rows.len();
    let mut entries = Vec::with_capacity(m * m);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if rows[j][i] != *z {
                return Err(DichotomyError::NotSymmetric(i, j));
            }
            entries.push(pure_entry_of(z).ok_or(DichotomyError::NonPureEntry(i, j))?);
        }
    }
    let a = PureMatrix::new(m, entries).map_err(|_| DichotomyError::NotSymmetric(0, 0))?;
    Ok(decide(&a))
}

/// Run all stages on one connected component with at least two indices.
pub(crate) fn analyse_component(a: &PureMatrix) -> Result<StructuredComponent, Witness> {
    let s1 = step1_bulatov_grohe(a)?;
    let cd = step2_build_cd(&s1)?;
    let shapes = step2_check_shapes(&cd)?;
    let norm = step2_normalize(&cd, &shapes);
    let structure = step3_structure(&cd, &norm)?;
    let sides = cd
        .sides
        .iter()
        .enumerate()
        .map(|(s, side)| SideCertificate {
            members: side.order.iter().map(|&o| s1.sides[s][o]).collect(),
            values: side.order.iter().map(|&o| s1.values[s][o].clone()).collect(),
            group_values: side.group_values.clone(),
            group_of: side.group_of.clone(),
            class_of: side.class_of.clone(),
            shift: side.shift.clone(),
            reps: side.reps.clone(),
            k: shapes.k[s].clone(),
            l: shapes.l[s].clone(),
            pivots: shapes.pivots[s].clone(),
            alpha: norm.alpha[s].clone(),
            vertex_exp: norm.vertex_exp[s].clone(),
        })
        .collect();
    Ok(StructuredComponent {
        bipartite: s1.bipartite,
        scale: s1.scale.clone(),
        n: s1.n,
        n_prime: norm.n_prime,
        h: cd.h,
        hmat: cd.hmat.clone(),
        h11: norm.h11,
        x: norm.x.clone(),
        sides,
        structure,
    })
}

/// Decide whether evaluating `Z_A` is tractable, component by component.
pub fn decide(a: &PureMatrix) -> Verdict {
    let mut certs = Vec::new();
    for (ci, comp) in components(a).into_iter().enumerate() {
        let body = if comp.indices.len() == 1 {
            ComponentBody::Single {
                entry: format_entry(comp.matrix.get(0, 0)),
            }
        } else {
            match analyse_component(&comp.matrix) {
                Ok(s) => ComponentBody::Structured(Box::new(s)),
                Err(mut w) => {
                    w.component = ci;
                    return Verdict::PHard(w);
                }
            }
        };
        certs.push(ComponentCertificate {
            indices: comp.indices,
            body,
        });
    }
    Verdict::Tractable(Certificate {
        dim: a.dim(),
        components: certs,
    })
}
