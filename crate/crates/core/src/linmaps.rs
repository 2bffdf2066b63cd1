//! F_q-linear maps of F_(q^3), stored as q-polynomials
//! x ↦ c0·x + c1·x^q + c2·x^(q^2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower, FqMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QLinearMap {
    pub c: [Fe; 3],
}

fn check_r(r: u32) -> Result<()> {
    if r == 1 || r == 2 {
        Ok(())
    } else {
        Err(Error::InvalidR(r as i64))
    }
}

fn check_cubic_unit(t: &FieldTower, x: Fe) -> Result<()> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    if !t.in_subfield(x, 3) {
        return Err(Error::NotInSubfield {
            elem: x.0,
            degree: 3,
        });
    }
    Ok(())
}

impl QLinearMap {
    pub const fn new(c0: Fe, c1: Fe, c2: Fe) -> Self {
        QLinearMap { c: [c0, c1, c2] }
    }

    pub const fn identity() -> Self {
        Self::new(Fe::ONE, Fe::ZERO, Fe::ZERO)
    }

    pub const fn zero() -> Self {
        Self::new(Fe::ZERO, Fe::ZERO, Fe::ZERO)
    }

    pub const fn scalar(c: Fe) -> Self {
        Self::new(c, Fe::ZERO, Fe::ZERO)
    }

    /// x ↦ x^(q^r) - a·x^(q^(-r)).
    pub fn a_map(t: &FieldTower, a: Fe, r: u32) -> Result<Self> {
        check_r(r)?;
        check_cubic_unit(t, a)?;
        let mut c = [Fe::ZERO; 3];
        c[r as usize] = Fe::ONE;
        c[3 - r as usize] = t.neg(a);
        Ok(QLinearMap { c })
    }

    /// x ↦ x - b·x^(q^(-r)).
    pub fn h_map(t: &FieldTower, b: Fe, r: u32) -> Result<Self> {
        check_r(r)?;
        check_cubic_unit(t, b)?;
        let mut c = [Fe::ONE, Fe::ZERO, Fe::ZERO];
        c[3 - r as usize] = t.neg(b);
        Ok(QLinearMap { c })
    }

    /// 2·H⁻¹ - id with H = [`h_map`](Self::h_map)(b, r).
    pub fn b_map(t: &FieldTower, b: Fe, r: u32) -> Result<Self> {
        let h = Self::h_map(t, b, r)?;
        if t.norm3(b) == Fe::ONE {
            return Err(Error::NormIsOne { param: "b" });
        }
        let hinv = h.invert(t)?;
        Ok(hinv.scale(t, t.int(2)).sub(t, &Self::identity()))
    }

    /// Evaluation without the membership check on x.
    #[inline]
    pub fn apply(&self, t: &FieldTower, x: Fe) -> Fe {
        let c = &self.c;
        let mut acc = t.mul(c[0], x);
        if !c[1].is_zero() {
            acc = t.add(acc, t.mul(c[1], t.frob(x, 1)));
        }
        if !c[2].is_zero() {
            acc = t.add(acc, t.mul(c[2], t.frob(x, 2)));
        }
        acc
    }

    pub fn eval(&self, t: &FieldTower, x: Fe) -> Result<Fe> {
        if !t.in_subfield(x, 3) {
            return Err(Error::NotInSubfield {
                elem: x.0,
                degree: 3,
            });
        }
        Ok(self.apply(t, x))
    }

    pub fn add(&self, t: &FieldTower, o: &Self) -> Self {
        QLinearMap {
            c: std::array::from_fn(|i| t.add(self.c[i], o.c[i])),
        }
    }

    pub fn sub(&self, t: &FieldTower, o: &Self) -> Self {
        QLinearMap {
            c: std::array::from_fn(|i| t.sub(self.c[i], o.c[i])),
        }
    }

    pub fn scale(&self, t: &FieldTower, s: Fe) -> Self {
        QLinearMap {
            c: std::array::from_fn(|i| t.mul(s, self.c[i])),
        }
    }

    /// self ∘ other.
    pub fn compose(&self, t: &FieldTower, other: &Self) -> Self {
        let mut c = [Fe::ZERO; 3];
        for i in 0..3 {
            for j in 0..3 {
                let term = t.mul(self.c[i], t.frob(other.c[j], i as i64));
                c[(i + j) % 3] = t.add(c[(i + j) % 3], term);
            }
        }
        QLinearMap { c }
    }

    /// Matrix over F_q acting on coordinate columns w.r.t. the tower's basis
    /// of F_(q^3): column j holds the coordinates of the image of β_j.
    pub fn fq_matrix(&self, t: &FieldTower) -> FqMatrix {
        let mut m = FqMatrix::zeros(3, 3);
        for (j, &b) in t.fq3_basis().iter().enumerate() {
            let img = t.fq3_coords(self.apply(t, b));
            for i in 0..3 {
                m.set(i, j, img[i]);
            }
        }
        m
    }

    pub fn is_bijective(&self, t: &FieldTower) -> bool {
        self.fq_matrix(t).rank(t) == 3
    }

    /// Inverse as a q-polynomial: invert the F_q-matrix, then interpolate on
    /// the basis through the Moore matrix (β_i^(q^k)).
    pub fn invert(&self, t: &FieldTower) -> Result<Self> {
        let minv = self.fq_matrix(t).inverse(t).ok_or(Error::SingularMap)?;
        let basis = t.fq3_basis();
        let values: Vec<Fe> = (0..3)
            .map(|i| t.fq3_from_coords([minv.get(0, i), minv.get(1, i), minv.get(2, i)]))
            .collect();
        let moore = FqMatrix::from_rows(
            &basis
                .iter()
                .map(|&b| (0..3).map(|k| t.frob(b, k)).collect())
                .collect::<Vec<_>>(),
        );
        let d = moore
            .solve(t, &values)
            .expect("Moore matrix of a basis is invertible");
        Ok(QLinearMap {
            c: [d[0], d[1], d[2]],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel_size_brute(t: &FieldTower, m: &QLinearMap) -> usize {
        t.subfield_elements(3)
            .into_iter()
            .filter(|&x| m.apply(t, x).is_zero())
            .count()
    }

    #[test]
    fn trivial_maps() {
        let t = FieldTower::build(3, 1).unwrap();
        let g = t.subfield_generator(3);
        assert_eq!(QLinearMap::identity().eval(&t, g).unwrap(), g);
        assert_eq!(QLinearMap::zero().eval(&t, g).unwrap(), Fe::ZERO);
        let frob = QLinearMap::new(Fe::ZERO, Fe::ONE, Fe::ZERO);
        assert_eq!(frob.eval(&t, g).unwrap(), t.pow(g, 3));
        assert!(frob.eval(&t, t.generator()).is_err());
    }

    #[test]
    fn a_map_on_base_field() {
        let t = FieldTower::build(5, 1).unwrap();
        let a = t.subfield_generator(3);
        for r in 1..=2 {
            let m = QLinearMap::a_map(&t, a, r).unwrap();
            for &x in t.fq_elements() {
                assert_eq!(m.apply(&t, x), t.mul(t.sub(Fe::ONE, a), x));
            }
        }
        assert_eq!(QLinearMap::a_map(&t, a, 3), Err(Error::InvalidR(3)));
        assert_eq!(QLinearMap::a_map(&t, Fe::ZERO, 1), Err(Error::ZeroElement));
    }

    #[test]
    fn a_map_bijective_iff_norm_not_one() {
        for p in [3, 5, 7] {
            let t = FieldTower::build(p, 1).unwrap();
            for a in t.subfield_units(3) {
                for r in 1..=2 {
                    let m = QLinearMap::a_map(&t, a, r).unwrap();
                    assert_eq!(m.is_bijective(&t), t.norm3(a) != Fe::ONE, "p={p} a={a}");
                }
            }
        }
    }

    #[test]
    fn kernel_search_oracle_q5() {
        let t = FieldTower::build(5, 1).unwrap();
        let units = t.subfield_units(3);
        let a1 = *units.iter().find(|&&a| t.norm3(a) == Fe::ONE && a != Fe::ONE).unwrap();
        let a2 = *units.iter().find(|&&a| t.norm3(a) == Fe(2)).unwrap();
        let m1 = QLinearMap::a_map(&t, a1, 1).unwrap();
        let m2 = QLinearMap::a_map(&t, a2, 1).unwrap();
        assert!(kernel_size_brute(&t, &m1) > 1);
        assert!(!m1.is_bijective(&t));
        assert_eq!(kernel_size_brute(&t, &m2), 1);
        assert!(m2.is_bijective(&t));

        let b1 = *units.iter().find(|&&b| t.norm3(b) == Fe::ONE && b != Fe::ONE).unwrap();
        assert!(kernel_size_brute(&t, &QLinearMap::h_map(&t, b1, 2).unwrap()) > 1);
        let h = QLinearMap::h_map(&t, Fe(2), 1).unwrap();
        assert_eq!(kernel_size_brute(&t, &h), 1);
    }

    #[test]
    fn h_map_on_base_field() {
        let t = FieldTower::build(5, 1).unwrap();
        let h = QLinearMap::h_map(&t, Fe(3), 1).unwrap();
        for &x in t.fq_elements() {
            assert_eq!(h.apply(&t, x), t.mul(t.sub(Fe::ONE, Fe(3)), x));
        }
    }

    #[test]
    fn invert_exhaustive_q5() {
        let t = FieldTower::build(5, 1).unwrap();
        let h = QLinearMap::h_map(&t, Fe(2), 1).unwrap();
        let hinv = h.invert(&t).unwrap();
        for x in t.subfield_elements(3) {
            assert_eq!(hinv.apply(&t, h.apply(&t, x)), x);
            assert_eq!(h.apply(&t, hinv.apply(&t, x)), x);
        }
        assert_eq!(hinv.invert(&t).unwrap(), h);
        assert_eq!(QLinearMap::identity().invert(&t).unwrap(), QLinearMap::identity());
        let c = t.subfield_generator(3);
        assert_eq!(
            QLinearMap::scalar(c).invert(&t).unwrap(),
            QLinearMap::scalar(t.inv(c))
        );
        assert_eq!(QLinearMap::zero().invert(&t), Err(Error::SingularMap));
    }

    #[test]
    fn b_map_identities() {
        let t = FieldTower::build(5, 1).unwrap();
        let two = t.int(2);
        for (b, r) in [(Fe(2), 1), (Fe(2), 2), (t.subfield_generator(3), 1)] {
            let h = QLinearMap::h_map(&t, b, r).unwrap();
            let bm = QLinearMap::b_map(&t, b, r).unwrap();
            for x in t.subfield_elements(3) {
                let hx = h.apply(&t, x);
                let expect = t.add(x, t.mul(b, t.frob(x, -(r as i64))));
                assert_eq!(bm.apply(&t, hx), expect);
                assert_eq!(t.add(bm.apply(&t, hx), hx), t.mul(two, x));
                assert_eq!(h.apply(&t, t.add(bm.apply(&t, x), x)), t.mul(two, x));
            }
        }
        let bm = QLinearMap::b_map(&t, Fe(2), 1).unwrap();
        let h = QLinearMap::h_map(&t, Fe(2), 1).unwrap();
        assert_eq!(bm.apply(&t, h.apply(&t, Fe::ONE)), Fe(3));
        let b1 = t
            .subfield_units(3)
            .into_iter()
            .find(|&b| t.norm3(b) == Fe::ONE)
            .unwrap();
        assert_eq!(
            QLinearMap::b_map(&t, b1, 1),
            Err(Error::NormIsOne { param: "b" })
        );
    }

    #[test]
    fn compose_matches_pointwise() {
        let t = FieldTower::build(3, 1).unwrap();
        let a = QLinearMap::a_map(&t, t.subfield_generator(3), 1).unwrap();
        let h = QLinearMap::h_map(&t, Fe(2), 2).unwrap();
        let ah = a.compose(&t, &h);
        for x in t.subfield_elements(3) {
            assert_eq!(ah.apply(&t, x), a.apply(&t, h.apply(&t, x)));
        }
    }
}
