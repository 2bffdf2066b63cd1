use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower, FqMatrix};

/// A vector of V(4, q^3).
pub type Vec4 = [Fe; 4];

pub fn vadd(t: &FieldTower, a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| t.add(a[i], b[i]))
}

pub fn vsub(t: &FieldTower, a: &Vec4, b: &Vec4) -> Vec4 {
    std::array::from_fn(|i| t.sub(a[i], b[i]))
}

pub fn vscale(t: &FieldTower, s: Fe, a: &Vec4) -> Vec4 {
    std::array::from_fn(|i| t.mul(s, a[i]))
}

pub fn dot(t: &FieldTower, a: &Vec4, b: &Vec4) -> Fe {
    (0..4).fold(Fe::ZERO, |acc, i| t.add(acc, t.mul(a[i], b[i])))
}

pub fn is_zero_vec(a: &Vec4) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// b(X, Y) = X0·Y3 + X3·Y0 - X1·Y2 - X2·Y1, the polarization of the quadric
/// X0·X3 - X1·X2.
pub fn bilinear(t: &FieldTower, x: &Vec4, y: &Vec4) -> Fe {
    let plus = t.add(t.mul(x[0], y[3]), t.mul(x[3], y[0]));
    let minus = t.add(t.mul(x[1], y[2]), t.mul(x[2], y[1]));
    t.sub(plus, minus)
}

pub fn quadratic_form(t: &FieldTower, x: &Vec4) -> Fe {
    t.sub(t.mul(x[0], x[3]), t.mul(x[1], x[2]))
}

/// The functional Y ↦ b(x, Y) as a coefficient vector.
pub fn polar_functional(t: &FieldTower, x: &Vec4) -> Vec4 {
    [x[3], t.neg(x[2]), t.neg(x[1]), x[0]]
}

/// Scales so that the first nonzero coordinate is 1; `None` for zero.
pub fn normalize(t: &FieldTower, v: &Vec4) -> Option<Vec4> {
    let lead = v.iter().copied().find(|x| !x.is_zero())?;
    if lead == Fe::ONE {
        return Some(*v);
    }
    Some(vscale(t, t.inv(lead), v))
}

fn check_cubic(t: &FieldTower, v: &Vec4) -> Result<()> {
    match v.iter().find(|&&x| !t.in_subfield(x, 3)) {
        Some(&x) => Err(Error::NotInSubfield {
            elem: x.0,
            degree: 3,
        }),
        None => Ok(()),
    }
}

/// Rank over F_(q^3) of a list of vectors.
pub fn rank_of(t: &FieldTower, vs: &[Vec4]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    FqMatrix::from_rows(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).rank(t)
}

/// Basis of the common kernel of the given functionals.
pub fn common_kernel(t: &FieldTower, functionals: &[Vec4]) -> Vec<Vec4> {
    let m = if functionals.is_empty() {
        FqMatrix::zeros(1, 4)
    } else {
        FqMatrix::from_rows(&functionals.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
    };
    m.kernel(t)
        .into_iter()
        .map(|k| [k[0], k[1], k[2], k[3]])
        .collect()
}

/// A point of PG(3, q^3), first nonzero coordinate 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint {
    coords: Vec4,
}

impl ProjPoint {
    pub fn new(t: &FieldTower, v: Vec4) -> Result<Self> {
        check_cubic(t, &v)?;
        Self::from_vec(t, &v).ok_or(Error::ZeroVector)
    }

    /// Normalizes a nonzero vector already known to lie in V(4, q^3).
    #[inline]
    pub fn from_vec(t: &FieldTower, v: &Vec4) -> Option<Self> {
        normalize(t, v).map(|coords| ProjPoint { coords })
    }

    pub fn coords(&self) -> &Vec4 {
        &self.coords
    }

    pub fn on_quadric(&self, t: &FieldTower) -> bool {
        quadratic_form(t, &self.coords).is_zero()
    }

    /// The polar plane b(P, ·) = 0.
    pub fn polar(&self, t: &FieldTower) -> ProjPlane {
        ProjPlane::from_functional(t, &polar_functional(t, &self.coords)).unwrap()
    }
}

/// A line of PG(3, q^3), stored as the reduced row echelon form of any
/// 2×4 matrix whose rows span it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjLine {
    rows: [Vec4; 2],
}

/// Intersection of two lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Meet {
    Skew,
    Point(ProjPoint),
    Same,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineProfile {
    External,
    Tangent,
    Secant,
    Contained,
}

impl ProjLine {
    pub fn from_vectors(t: &FieldTower, u: &Vec4, v: &Vec4) -> Result<Self> {
        check_cubic(t, u)?;
        check_cubic(t, v)?;
        Self::span_vecs(t, u, v).ok_or(Error::Dependent("line needs two independent vectors"))
    }

    pub fn span(t: &FieldTower, p: &ProjPoint, q: &ProjPoint) -> Result<Self> {
        Self::span_vecs(t, &p.coords, &q.coords)
            .ok_or(Error::Dependent("line needs two distinct points"))
    }

    /// Canonical form of ⟨u, v⟩ without membership checks.
    pub fn span_vecs(t: &FieldTower, u: &Vec4, v: &Vec4) -> Option<Self> {
        let m = FqMatrix::from_rows(&[u.to_vec(), v.to_vec()]);
        let (r, piv) = m.rref(t);
        if piv.len() < 2 {
            return None;
        }
        let row = |i: usize| -> Vec4 { std::array::from_fn(|j| r.get(i, j)) };
        Some(ProjLine {
            rows: [row(0), row(1)],
        })
    }

    /// The line given by two independent linear equations f1 = f2 = 0.
    pub fn from_equations(t: &FieldTower, f1: &Vec4, f2: &Vec4) -> Result<Self> {
        let k = common_kernel(t, &[*f1, *f2]);
        if k.len() != 2 {
            return Err(Error::Dependent("equations do not cut out a line"));
        }
        Ok(Self::span_vecs(t, &k[0], &k[1]).unwrap())
    }

    pub fn rows(&self) -> &[Vec4; 2] {
        &self.rows
    }

    fn pivots(&self) -> (usize, usize) {
        let p0 = self.rows[0].iter().position(|x| !x.is_zero()).unwrap();
        let p1 = self.rows[1].iter().position(|x| !x.is_zero()).unwrap();
        (p0, p1)
    }

    pub fn contains_vec(&self, t: &FieldTower, v: &Vec4) -> bool {
        let (p0, p1) = self.pivots();
        let r = vsub(t, v, &vscale(t, v[p0], &self.rows[0]));
        let r = vsub(t, &r, &vscale(t, r[p1], &self.rows[1]));
        is_zero_vec(&r)
    }

    pub fn contains(&self, t: &FieldTower, p: &ProjPoint) -> bool {
        self.contains_vec(t, &p.coords)
    }

    /// All q^3 + 1 points.
    pub fn points(&self, t: &FieldTower) -> Vec<ProjPoint> {
        let mut out: Vec<ProjPoint> = t
            .subfield_elements(3)
            .into_iter()
            .map(|l| {
                let v = vadd(t, &self.rows[0], &vscale(t, l, &self.rows[1]));
                ProjPoint::from_vec(t, &v).unwrap()
            })
            .collect();
        out.push(ProjPoint::from_vec(t, &self.rows[1]).unwrap());
        out
    }

    pub fn meet(&self, t: &FieldTower, other: &ProjLine) -> Meet {
        let [r0, r1] = self.rows;
        let [s0, s1] = other.rows;
        // columns r0, r1, s0, s1; a kernel vector gives a common point
        let mut m = FqMatrix::zeros(4, 4);
        for i in 0..4 {
            m.set(i, 0, r0[i]);
            m.set(i, 1, r1[i]);
            m.set(i, 2, s0[i]);
            m.set(i, 3, s1[i]);
        }
        let k = m.kernel(t);
        match k.len() {
            0 => Meet::Skew,
            1 => {
                let v = vadd(t, &vscale(t, k[0][0], &r0), &vscale(t, k[0][1], &r1));
                Meet::Point(ProjPoint::from_vec(t, &v).unwrap())
            }
            _ => Meet::Same,
        }
    }

    pub fn is_skew(&self, t: &FieldTower, other: &ProjLine) -> bool {
        self.meet(t, other) == Meet::Skew
    }

    /// The polar line {Y : b(X, Y) = 0 for all X on the line}.
    pub fn polar(&self, t: &FieldTower) -> ProjLine {
        Self::from_equations(
            t,
            &polar_functional(t, &self.rows[0]),
            &polar_functional(t, &self.rows[1]),
        )
        .expect("the form is nondegenerate")
    }

    pub fn quadric_points(&self, t: &FieldTower) -> usize {
        self.points(t).iter().filter(|p| p.on_quadric(t)).count()
    }

    pub fn quadric_profile(&self, t: &FieldTower) -> LineProfile {
        let n = self.quadric_points(t);
        match n {
            0 => LineProfile::External,
            1 => LineProfile::Tangent,
            2 => LineProfile::Secant,
            _ => LineProfile::Contained,
        }
    }

    /// The plane spanned by this line and a point off it.
    pub fn join_point(&self, t: &FieldTower, p: &ProjPoint) -> Result<ProjPlane> {
        ProjPlane::through(t, &[self.rows[0], self.rows[1], p.coords])
    }
}

/// A plane of PG(3, q^3) given by a normalized functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPlane {
    functional: Vec4,
}

impl ProjPlane {
    pub fn from_functional(t: &FieldTower, c: &Vec4) -> Result<Self> {
        check_cubic(t, c)?;
        let functional = normalize(t, c).ok_or(Error::ZeroVector)?;
        Ok(ProjPlane { functional })
    }

    /// The plane spanned by three independent vectors.
    pub fn through(t: &FieldTower, vs: &[Vec4; 3]) -> Result<Self> {
        let k = common_kernel(t, vs);
        if k.len() != 1 {
            return Err(Error::Dependent("plane needs three independent vectors"));
        }
        Self::from_functional(t, &k[0])
    }

    pub fn functional(&self) -> &Vec4 {
        &self.functional
    }

    pub fn contains_vec(&self, t: &FieldTower, v: &Vec4) -> bool {
        dot(t, &self.functional, v).is_zero()
    }

    pub fn contains(&self, t: &FieldTower, p: &ProjPoint) -> bool {
        self.contains_vec(t, &p.coords)
    }

    pub fn contains_line(&self, t: &FieldTower, l: &ProjLine) -> bool {
        l.rows.iter().all(|r| self.contains_vec(t, r))
    }

    /// The pole of the plane.
    pub fn polar(&self, t: &FieldTower) -> ProjPoint {
        let c = &self.functional;
        ProjPoint::from_vec(t, &[c[3], t.neg(c[2]), t.neg(c[1]), c[0]]).unwrap()
    }

    /// Basis of the underlying 3-dimensional subspace.
    pub fn basis(&self, t: &FieldTower) -> Vec<Vec4> {
        common_kernel(t, &[self.functional])
    }
}

/// For each of the q^3 + 1 points X of s1, the line through X meeting s2
/// and s3.
pub fn common_transversal_lines(
    t: &FieldTower,
    s1: &ProjLine,
    s2: &ProjLine,
    s3: &ProjLine,
) -> Result<Vec<ProjLine>> {
    if !(s1.is_skew(t, s2) && s1.is_skew(t, s3) && s2.is_skew(t, s3)) {
        return Err(Error::NotSkew);
    }
    let [c0, c1] = s3.rows;
    Ok(s1
        .points(t)
        .iter()
        .map(|x| {
            let plane = common_kernel(t, &[x.coords, s2.rows[0], s2.rows[1]])[0];
            let y = vsub(
                t,
                &vscale(t, dot(t, &plane, &c1), &c0),
                &vscale(t, dot(t, &plane, &c0), &c1),
            );
            ProjLine::span_vecs(t, &x.coords, &y).expect("skew lines give distinct points")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fe4(a: [u32; 4]) -> Vec4 {
        a.map(Fe)
    }

    fn random_point(t: &FieldTower, rng: &mut ChaCha8Rng) -> ProjPoint {
        loop {
            let v: Vec4 = std::array::from_fn(|_| t.random_in_subfield(rng, 3));
            if let Some(p) = ProjPoint::from_vec(t, &v) {
                return p;
            }
        }
    }

    #[test]
    fn quadric_membership() {
        let t = FieldTower::build(3, 1).unwrap();
        assert!(ProjPoint::new(&t, fe4([1, 0, 0, 0])).unwrap().on_quadric(&t));
        assert!(!ProjPoint::new(&t, fe4([1, 0, 0, 1])).unwrap().on_quadric(&t));
        assert_eq!(ProjPoint::new(&t, fe4([0; 4])), Err(Error::ZeroVector));
    }

    #[test]
    fn polar_of_s_is_s_perp() {
        let t = FieldTower::build(5, 1).unwrap();
        let one = Fe::ONE;
        let s = ProjLine::from_equations(&t, &[Fe(0), one, Fe(0), Fe(0)], &[Fe(0), Fe(0), one, Fe(0)])
            .unwrap();
        let s_perp = ProjLine::from_equations(&t, &[one, Fe(0), Fe(0), Fe(0)], &[Fe(0), Fe(0), Fe(0), one])
            .unwrap();
        assert_eq!(s.polar(&t), s_perp);
        assert_eq!(s_perp.polar(&t), s);
    }

    #[test]
    fn polarity_is_an_involution_reversing_incidence() {
        let t = FieldTower::build(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = random_point(&t, &mut rng);
            assert_eq!(p.polar(&t).polar(&t), p);
            if p.on_quadric(&t) {
                assert!(p.polar(&t).contains(&t, &p));
            }
            let q = random_point(&t, &mut rng);
            let pl = q.polar(&t);
            assert_eq!(pl.contains(&t, &p), p.polar(&t).contains(&t, &pl.polar(&t)));
            if let Ok(l) = ProjLine::span(&t, &p, &q) {
                assert_eq!(l.polar(&t).polar(&t), l);
            }
            // b(X, X) = 2 Q(X)
            let c = p.coords();
            assert_eq!(bilinear(&t, c, c), t.mul(t.int(2), quadratic_form(&t, c)));
        }
    }

    #[test]
    fn on_quadric_point_lies_on_polar() {
        let t = FieldTower::build(3, 1).unwrap();
        let p = ProjPoint::new(&t, fe4([1, 1, 1, 1])).unwrap();
        assert!(p.on_quadric(&t));
        assert!(p.polar(&t).contains(&t, &p));
    }

    #[test]
    fn line_incidence() {
        let t = FieldTower::build(3, 1).unwrap();
        let l = ProjLine::span(
            &t,
            &ProjPoint::new(&t, fe4([1, 0, 0, 0])).unwrap(),
            &ProjPoint::new(&t, fe4([0, 1, 0, 0])).unwrap(),
        )
        .unwrap();
        let pts = l.points(&t);
        assert_eq!(pts.len(), 28);
        let distinct: std::collections::HashSet<_> = pts.iter().collect();
        assert_eq!(distinct.len(), 28);
        let plane = ProjPlane::from_functional(&t, &fe4([1, 0, 0, 0])).unwrap();
        let on: Vec<_> = pts.iter().filter(|p| plane.contains(&t, p)).collect();
        assert_eq!(on, vec![&ProjPoint::new(&t, fe4([0, 1, 0, 0])).unwrap()]);
        assert!(ProjLine::span(&t, &pts[0], &pts[0]).is_err());
        // X1 = X3 = 0 lies on the quadric
        let ruling = ProjLine::from_equations(&t, &fe4([0, 1, 0, 0]), &fe4([0, 0, 0, 1])).unwrap();
        assert_eq!(ruling.quadric_profile(&t), LineProfile::Contained);
        assert_eq!(l.quadric_profile(&t), LineProfile::Contained);
        let secant = ProjLine::span(
            &t,
            &ProjPoint::new(&t, fe4([1, 0, 0, 0])).unwrap(),
            &ProjPoint::new(&t, fe4([0, 0, 0, 1])).unwrap(),
        )
        .unwrap();
        assert_eq!(secant.quadric_profile(&t), LineProfile::Secant);
    }

    #[test]
    fn meet_cases() {
        let t = FieldTower::build(3, 1).unwrap();
        let e = |i: usize| {
            let mut v = [Fe::ZERO; 4];
            v[i] = Fe::ONE;
            v
        };
        let l01 = ProjLine::span_vecs(&t, &e(0), &e(1)).unwrap();
        let l23 = ProjLine::span_vecs(&t, &e(2), &e(3)).unwrap();
        let l12 = ProjLine::span_vecs(&t, &e(1), &e(2)).unwrap();
        assert_eq!(l01.meet(&t, &l23), Meet::Skew);
        assert_eq!(
            l01.meet(&t, &l12),
            Meet::Point(ProjPoint::new(&t, e(1)).unwrap())
        );
        assert_eq!(l01.meet(&t, &l01), Meet::Same);
    }

    #[test]
    fn transversals_of_random_skew_triples() {
        let t = FieldTower::build(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let random_line = |rng: &mut ChaCha8Rng| loop {
            let p = random_point(&t, rng);
            let q = random_point(&t, rng);
            if let Ok(l) = ProjLine::span(&t, &p, &q) {
                return l;
            }
        };
        let mut done = 0;
        while done < 3 {
            let (a, b, c) = (random_line(&mut rng), random_line(&mut rng), random_line(&mut rng));
            let ts = match common_transversal_lines(&t, &a, &b, &c) {
                Ok(ts) => ts,
                Err(e) => {
                    assert_eq!(e, Error::NotSkew);
                    continue;
                }
            };
            done += 1;
            assert_eq!(ts.len(), 28);
            for l in &ts {
                for s in [&a, &b, &c] {
                    assert!(matches!(l.meet(&t, s), Meet::Point(_)));
                }
            }
        }
    }
}
