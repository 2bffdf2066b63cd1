//! Presemifields of order q^6 with F_(q^3) in the left nucleus, given by a
//! 6-dimensional F_q-space of 2×2 matrices over F_(q^3) whose nonzero
//! members are invertible. The product of a row vector u ∈ F_(q^3)^2 with the
//! member indexed by c ∈ F_q^6 is u·M(c).

mod nuclei;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower, FqMatrix};
use crate::linsets::{for_each_projective_combination, fq_rank, LinearSet};
use crate::projgeom::{bilinear, quadratic_form, vadd, vscale, Vec4};

pub use nuclei::{KaplanskySemifield, NucleiProfile};

/// A 2×2 matrix [[m0, m1], [m2, m3]] flattened row by row.
pub type Mat2 = [Fe; 4];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: String,
    pub params: BTreeMap<String, i64>,
    /// Derivative operations applied after construction, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivations: Vec<String>,
}

impl Provenance {
    pub fn new(family: &str) -> Self {
        Provenance {
            family: family.to_string(),
            ..Default::default()
        }
    }

    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn derived(&self, op: &str) -> Self {
        let mut p = self.clone();
        p.derivations.push(op.to_string());
        p
    }

    /// Like `derived`, but a repeated exact involution cancels.
    fn toggled(&self, op: &str) -> Self {
        let mut p = self.clone();
        if p.derivations.last().map(String::as_str) == Some(op) {
            p.derivations.pop();
        } else {
            p.derivations.push(op.to_string());
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadSet {
    basis: Vec<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// Outcome of the exhaustive determinant scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsingularityReport {
    pub nonsingular: bool,
    /// F_q-coefficients (canonical integers) of a singular member.
    pub witness: Option<Vec<u32>>,
    pub checked: u64,
}

/// u·M for a row vector u.
pub fn row_times(t: &FieldTower, u: (Fe, Fe), m: &Mat2) -> (Fe, Fe) {
    (
        t.add(t.mul(u.0, m[0]), t.mul(u.1, m[2])),
        t.add(t.mul(u.0, m[1]), t.mul(u.1, m[3])),
    )
}

/// Coefficient vector of (x, y) ∈ F_(q^3)^2 for spread sets whose basis is
/// M(β_0, 0), M(β_1, 0), M(β_2, 0), M(0, β_0), M(0, β_1), M(0, β_2).
pub fn pair_coefficients(t: &FieldTower, x: Fe, y: Fe) -> [Fe; 6] {
    let a = t.fq3_coords(x);
    let b = t.fq3_coords(y);
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

impl SpreadSet {
    pub fn new(t: &FieldTower, basis: Vec<Mat2>, provenance: Option<Provenance>) -> Result<Self> {
        for m in &basis {
            if let Some(x) = m.iter().find(|x| !t.in_subfield(**x, 3)) {
                return Err(Error::NotInSubfield {
                    elem: x.0,
                    degree: 3,
                });
            }
        }
        let r = fq_rank(t, &basis);
        if r != 6 || basis.len() != 6 {
            return Err(Error::SpreadSetRank(r));
        }
        Ok(SpreadSet { basis, provenance })
    }

    pub fn basis(&self) -> &[Mat2] {
        &self.basis
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn set_provenance(&mut self, p: Option<Provenance>) {
        self.provenance = p;
    }

    /// Σ c_i·M_i for c ∈ F_q^6.
    pub fn member(&self, t: &FieldTower, c: &[Fe]) -> Mat2 {
        self.basis
            .iter()
            .zip(c)
            .fold([Fe::ZERO; 4], |acc, (m, &ci)| vadd(t, &acc, &vscale(t, ci, m)))
    }

    /// u ⋆ c = u·M(c).
    pub fn mul(&self, t: &FieldTower, u: (Fe, Fe), c: &[Fe]) -> (Fe, Fe) {
        row_times(t, u, &self.member(t, c))
    }

    /// Determinant of every nonzero member, up to F_q-scalars (det(λM) =
    /// λ²det(M)), so (q^6 - 1)/(q - 1) members are examined.
    pub fn verify_no_zero_divisors(&self, t: &FieldTower) -> NonsingularityReport {
        let mut witness = None;
        let mut checked = 0u64;
        let fq = t.fq_elements();
        for_each_projective_combination(t, &self.basis, |idx, m| {
            if witness.is_some() {
                return;
            }
            checked += 1;
            if quadratic_form(t, m).is_zero() {
                witness = Some(idx.iter().map(|&i| fq[i].0).collect());
            }
        });
        NonsingularityReport {
            nonsingular: witness.is_none(),
            witness,
            checked,
        }
    }

    pub fn transpose(&self) -> SpreadSet {
        SpreadSet {
            basis: self.basis.iter().map(|m| [m[0], m[2], m[1], m[3]]).collect(),
            provenance: self.provenance.as_ref().map(|p| p.toggled("transpose")),
        }
    }

    /// Orthogonal complement of the span inside the 12-dimensional F_q-space
    /// of matrices, for T(M, M') = Tr_(q^3/q)(m0·m3' + m3·m0' - m1·m2' - m2·m1').
    pub fn translation_dual(&self, t: &FieldTower) -> Result<SpreadSet> {
        let beta = t.fq3_basis();
        let units: Vec<Mat2> = (0..12)
            .map(|k| {
                let mut m = [Fe::ZERO; 4];
                m[k / 3] = beta[k % 3];
                m
            })
            .collect();
        let mut gram = FqMatrix::zeros(6, 12);
        for (i, b) in self.basis.iter().enumerate() {
            for (k, e) in units.iter().enumerate() {
                gram.set(i, k, t.trace3(bilinear(t, b, e)));
            }
        }
        let ker = gram.kernel(t);
        if ker.len() != 6 {
            return Err(Error::DegenerateDual(format!(
                "complement has dimension {}",
                ker.len()
            )));
        }
        let basis: Vec<Mat2> = ker
            .iter()
            .map(|c| {
                units
                    .iter()
                    .zip(c)
                    .fold([Fe::ZERO; 4], |acc, (e, &ci)| vadd(t, &acc, &vscale(t, ci, e)))
            })
            .collect();
        let provenance = self.provenance.as_ref().map(|p| p.derived("translation-dual"));
        SpreadSet::new(t, basis, provenance)
    }

    /// Whether both spread sets span the same F_q-space of matrices.
    pub fn same_span(&self, t: &FieldTower, other: &SpreadSet) -> bool {
        let mut all: Vec<Vec4> = self.basis.clone();
        all.extend_from_slice(&other.basis);
        fq_rank(t, &all) == 6
    }

    /// (m0, m1, m2, m3) for each member; det(M) becomes X0·X3 - X1·X2.
    pub fn linear_set(&self, t: &FieldTower) -> LinearSet {
        LinearSet::new(t, self.basis.clone()).expect("spread set basis has rank 6")
    }

    pub fn from_linear_set(t: &FieldTower, l: &LinearSet, provenance: Option<Provenance>) -> Result<Self> {
        SpreadSet::new(t, l.basis().to_vec(), provenance)
    }

    pub fn nuclei(&self, t: &FieldTower) -> Result<NucleiProfile> {
        Ok(KaplanskySemifield::new(t, self)?.nuclei(t))
    }
}
