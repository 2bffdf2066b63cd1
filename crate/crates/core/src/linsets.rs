//! Rank-6 F_q-linear sets of PG(3, q^3).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower, FqMatrix};
use crate::projgeom::{
    common_kernel, common_transversal_lines, rank_of, vadd, vscale, Meet, ProjLine, ProjPlane,
    ProjPoint, Vec4,
};

/// F_q-coordinates of a vector of V(4, q^3), 12 entries.
pub fn fq_coords(t: &FieldTower, v: &Vec4) -> [Fe; 12] {
    let mut out = [Fe::ZERO; 12];
    for (i, &x) in v.iter().enumerate() {
        out[3 * i..3 * i + 3].copy_from_slice(&t.fq3_coords(x));
    }
    out
}

/// Dimension over F_q of the F_q-span of some vectors of V(4, q^3).
pub fn fq_rank(t: &FieldTower, vs: &[Vec4]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Fe>> = vs.iter().map(|v| fq_coords(t, v).to_vec()).collect();
    FqMatrix::from_rows(&rows).rank(t)
}

/// Visits every F_q-combination Σ c_i·b_i whose first nonzero coefficient is
/// 1, i.e. one representative per F_q-projective class of nonzero vectors.
pub fn for_each_projective_combination(
    t: &FieldTower,
    basis: &[Vec4],
    mut f: impl FnMut(&[usize], &Vec4),
) {
    let fq = t.fq_elements();
    let q = fq.len();
    let k = basis.len();
    // multiples[i][c] = fq[c]·b_i
    let multiples: Vec<Vec<Vec4>> = basis
        .iter()
        .map(|b| fq.iter().map(|&c| vscale(t, c, b)).collect())
        .collect();
    let one = fq.iter().position(|&x| x == Fe::ONE).unwrap();
    let zero = fq.iter().position(|x| x.is_zero()).unwrap();
    let mut idx = vec![0usize; k];
    for lead in 0..k {
        // coefficients before `lead` are zero, at `lead` one, after it free
        idx.fill(zero);
        idx[lead] = one;
        let free = k - lead - 1;
        let total = q.pow(free as u32);
        for n in 0..total {
            let mut r = n;
            for j in (lead + 1..k).rev() {
                idx[j] = r % q;
                r /= q;
            }
            let mut v = basis[lead];
            for j in lead + 1..k {
                if !fq[idx[j]].is_zero() {
                    v = vadd(t, &v, &multiples[j][idx[j]]);
                }
            }
            f(&idx, &v);
        }
    }
}

/// Weight of every point of a linear set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    entries: Vec<(ProjPoint, u8)>,
}

impl WeightTable {
    pub fn get(&self, p: &ProjPoint) -> u8 {
        self.entries
            .binary_search_by(|(q, _)| q.cmp(p))
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ProjPoint, u8)> {
        self.entries.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = &ProjPoint> {
        self.entries.iter().map(|(p, _)| p)
    }

    pub fn points_of_weight_at_least(&self, w: u8) -> Vec<ProjPoint> {
        self.entries
            .iter()
            .filter(|(_, x)| *x >= w)
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn histogram(&self) -> BTreeMap<u8, usize> {
        let mut h = BTreeMap::new();
        for (_, w) in &self.entries {
            *h.entry(*w).or_insert(0) += 1;
        }
        h
    }

    pub fn max_weight(&self) -> u8 {
        self.entries.iter().map(|e| e.1).max().unwrap_or(0)
    }
}

/// L_U for an F_q-subspace U of V(4, q^3) of dimension 6.
#[derive(Clone, Debug)]
pub struct LinearSet {
    basis: Vec<Vec4>,
    weights: OnceLock<WeightTable>,
}

impl PartialEq for LinearSet {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pseudoregulus {
    pub lines: Vec<ProjLine>,
    pub transversals: [ProjLine; 2],
}

/// An F_q-semilinear map from the space of t1 to the space of t2:
/// x·d0 + y·d1 ↦ x'·c0 + y'·c1 with (x', y')ᵀ = M·(x^σ, y^σ)ᵀ, σ = q^sigma.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilinearMap {
    pub domain: [Vec4; 2],
    pub codomain: [Vec4; 2],
    pub matrix: [[Fe; 2]; 2],
    pub sigma: u32,
}

impl SemilinearMap {
    pub fn apply_coords(&self, t: &FieldTower, x: Fe, y: Fe) -> Vec4 {
        let s = self.sigma as i64;
        let (xs, ys) = (t.frob(x, s), t.frob(y, s));
        let m = &self.matrix;
        let x2 = t.add(t.mul(m[0][0], xs), t.mul(m[0][1], ys));
        let y2 = t.add(t.mul(m[1][0], xs), t.mul(m[1][1], ys));
        vadd(
            t,
            &vscale(t, x2, &self.codomain[0]),
            &vscale(t, y2, &self.codomain[1]),
        )
    }

    /// u in coordinates w.r.t. the domain basis.
    pub fn domain_vector(&self, t: &FieldTower, x: Fe, y: Fe) -> Vec4 {
        vadd(
            t,
            &vscale(t, x, &self.domain[0]),
            &vscale(t, y, &self.domain[1]),
        )
    }

    /// The lines ⟨P, P^Φ_f⟩ for the q^3 + 1 points P of t1, sorted.
    pub fn joining_lines(&self, t: &FieldTower) -> Vec<ProjLine> {
        let mut coords: Vec<(Fe, Fe)> = t
            .subfield_elements(3)
            .into_iter()
            .map(|l| (Fe::ONE, l))
            .collect();
        coords.push((Fe::ZERO, Fe::ONE));
        let mut out: Vec<ProjLine> = coords
            .into_iter()
            .map(|(x, y)| {
                let u = self.domain_vector(t, x, y);
                let fu = self.apply_coords(t, x, y);
                ProjLine::span_vecs(t, &u, &fu).expect("t1 and t2 are disjoint")
            })
            .collect();
        out.sort();
        out
    }
}

impl LinearSet {
    pub fn new(t: &FieldTower, basis: Vec<Vec4>) -> Result<Self> {
        for v in &basis {
            if let Some(x) = v.iter().find(|x| !t.in_subfield(**x, 3)) {
                return Err(Error::NotInSubfield {
                    elem: x.0,
                    degree: 3,
                });
            }
        }
        let r = fq_rank(t, &basis);
        if r != 6 || basis.len() != 6 {
            return Err(Error::RankDeficient(r));
        }
        Ok(LinearSet {
            basis,
            weights: OnceLock::new(),
        })
    }

    pub fn basis(&self) -> &[Vec4] {
        &self.basis
    }

    /// dim_Fq of U ∩ W, W the common kernel of the given functionals.
    pub fn weight_in_kernel(&self, t: &FieldTower, functionals: &[Vec4]) -> usize {
        if functionals.is_empty() {
            return self.basis.len();
        }
        let mut m = FqMatrix::zeros(3 * functionals.len(), self.basis.len());
        for (fi, f) in functionals.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let c = t.fq3_coords(crate::projgeom::dot(t, f, b));
                for k in 0..3 {
                    m.set(3 * fi + k, j, c[k]);
                }
            }
        }
        self.basis.len() - m.rank(t)
    }

    /// Weight of the F_(q^3)-span of the given vectors.
    pub fn weight_of_span(&self, t: &FieldTower, vs: &[Vec4]) -> usize {
        if vs.is_empty() {
            return 0;
        }
        self.weight_in_kernel(t, &common_kernel(t, vs))
    }

    pub fn weight_of_point(&self, t: &FieldTower, p: &ProjPoint) -> usize {
        self.weight_of_span(t, &[*p.coords()])
    }

    pub fn weight_of_line(&self, t: &FieldTower, l: &ProjLine) -> usize {
        self.weight_of_span(t, l.rows())
    }

    pub fn weight_of_plane(&self, t: &FieldTower, p: &ProjPlane) -> usize {
        self.weight_in_kernel(t, &[*p.functional()])
    }

    pub fn weight_of_space(&self) -> usize {
        self.basis.len()
    }

    /// Weights of all points, by enumerating the (q^6 - 1)/(q - 1)
    /// projective representatives of U and grouping them by point: a point
    /// of weight w collects (q^w - 1)/(q - 1) representatives.
    pub fn point_weights(&self, t: &FieldTower) -> &WeightTable {
        self.weights.get_or_init(|| {
            let q = t.q() as usize;
            let mut pts = Vec::with_capacity((q.pow(6) - 1) / (q - 1));
            for_each_projective_combination(t, &self.basis, |_, v| {
                pts.push(ProjPoint::from_vec(t, v).expect("basis is independent"));
            });
            pts.sort_unstable();
            let mut entries = Vec::new();
            let mut i = 0;
            while i < pts.len() {
                let mut j = i;
                while j < pts.len() && pts[j] == pts[i] {
                    j += 1;
                }
                let count = j - i;
                let mut w = 0u8;
                let mut size = 0usize;
                while size < count {
                    size = size * q + 1;
                    w += 1;
                }
                assert_eq!(size, count, "class size is not (q^w - 1)/(q - 1)");
                entries.push((pts[i], w));
                i = j;
            }
            WeightTable { entries }
        })
    }

    /// Number of points of the linear set.
    pub fn size(&self, t: &FieldTower) -> usize {
        self.point_weights(t).len()
    }

    pub fn is_scattered(&self, t: &FieldTower) -> bool {
        self.point_weights(t).max_weight() == 1
    }

    pub fn contains_point(&self, t: &FieldTower, p: &ProjPoint) -> bool {
        self.point_weights(t).get(p) > 0
    }

    /// Σ_P (q^w(P) - 1) over all points; equals q^6 - 1.
    pub fn partition_sum(&self, t: &FieldTower) -> u64 {
        let q = t.q();
        self.point_weights(t)
            .iter()
            .map(|(_, w)| q.pow(*w as u32) - 1)
            .sum()
    }

    pub fn meets_quadric(&self, t: &FieldTower) -> bool {
        self.point_weights(t).points().any(|p| p.on_quadric(t))
    }

    /// Lines all of whose points lie in the set. Each such line carries a
    /// point of weight at least 2, so only lines through those points are
    /// examined: through P, a line is contained iff it holds q^3 other
    /// points of the set.
    pub fn contained_lines(&self, t: &FieldTower) -> Vec<ProjLine> {
        let table = self.point_weights(t);
        let heavy = table.points_of_weight_at_least(2);
        let q3 = t.q().pow(3) as usize;
        let mut found = HashSet::new();
        for p in &heavy {
            let mut counts: HashMap<ProjLine, usize> = HashMap::new();
            for other in table.points() {
                if other == p {
                    continue;
                }
                let l = ProjLine::span(t, p, other).unwrap();
                *counts.entry(l).or_insert(0) += 1;
            }
            found.extend(counts.into_iter().filter(|&(_, c)| c == q3).map(|(l, _)| l));
        }
        let mut out: Vec<ProjLine> = found.into_iter().collect();
        out.sort();
        out
    }

    /// Number of points of the set on a line.
    pub fn points_on_line(&self, t: &FieldTower, l: &ProjLine) -> usize {
        let table = self.point_weights(t);
        l.points(t).iter().filter(|p| table.get(p) > 0).count()
    }

    /// F_(q^3)-kernel of (λ_1..λ_6) ↦ Σ λ_i b_i.
    fn dependency_kernel(&self, t: &FieldTower) -> Vec<Vec<Fe>> {
        let mut m = FqMatrix::zeros(4, self.basis.len());
        for (j, b) in self.basis.iter().enumerate() {
            for i in 0..4 {
                m.set(i, j, b[i]);
            }
        }
        m.kernel(t)
    }

    /// Pseudoregulus of a scattered set.
    ///
    /// Lines of weight 3 come from the F_(q^3)-relations among the basis:
    /// a relation k = Σ_j β_j k^(j) with k^(j) ∈ F_q^6 makes the three
    /// vectors Φ(k^(j)) of U dependent over F_(q^3), so they span a line
    /// meeting U in an F_q-space of dimension 3. The relations form a
    /// 2-dimensional F_(q^3)-space whose q^3 + 1 points give the q^3 + 1
    /// lines; the partition of L by them is verified.
    pub fn pseudoregulus(&self, t: &FieldTower) -> Result<Pseudoregulus> {
        if !self.is_scattered(t) {
            return Err(Error::StructureNotFound(
                "linear set is not scattered".into(),
            ));
        }
        let k = self.dependency_kernel(t);
        if k.len() != 2 {
            return Err(Error::StructureNotFound(format!(
                "relation space has dimension {}, expected 2",
                k.len()
            )));
        }
        let mut relations: Vec<Vec<Fe>> = t
            .subfield_elements(3)
            .into_iter()
            .map(|l| (0..6).map(|i| t.add(k[0][i], t.mul(l, k[1][i]))).collect())
            .collect();
        relations.push(k[1].clone());

        let q = t.q() as usize;
        let per_line = q * q + q + 1;
        let mut lines = Vec::with_capacity(relations.len());
        let mut covered: Vec<ProjPoint> = Vec::with_capacity(relations.len() * per_line);
        for rel in &relations {
            let comps: Vec<[Fe; 3]> = rel.iter().map(|&x| t.fq3_coords(x)).collect();
            let vecs: Vec<Vec4> = (0..3)
                .map(|j| {
                    (0..6).fold([Fe::ZERO; 4], |acc, i| {
                        vadd(t, &acc, &vscale(t, comps[i][j], &self.basis[i]))
                    })
                })
                .collect();
            if fq_rank(t, &vecs) != 3 || rank_of(t, &vecs) != 2 {
                return Err(Error::StructureNotFound(
                    "a relation does not yield a weight-3 line".into(),
                ));
            }
            let line = ProjLine::span_vecs(t, &vecs[0], &vecs[1])
                .or_else(|| ProjLine::span_vecs(t, &vecs[0], &vecs[2]))
                .unwrap();
            for_each_projective_combination(t, &vecs, |_, v| {
                covered.push(ProjPoint::from_vec(t, v).unwrap());
            });
            lines.push(line);
        }
        covered.sort_unstable();
        let before = covered.len();
        covered.dedup();
        let table = self.point_weights(t);
        if covered.len() != before || covered.len() != table.len() {
            return Err(Error::StructureNotFound(format!(
                "{} lines cover {} of {} points ({} repeats)",
                lines.len(),
                covered.len(),
                table.len(),
                before - covered.len()
            )));
        }
        lines.sort();

        let candidates = common_transversal_lines(t, &lines[0], &lines[1], &lines[2])?;
        let mut transversals: Vec<ProjLine> = candidates
            .into_iter()
            .filter(|c| {
                lines
                    .iter()
                    .all(|l| matches!(c.meet(t, l), Meet::Point(_)))
                    && self.weight_of_line(t, c) == 0
            })
            .collect();
        if transversals.len() != 2 {
            return Err(Error::StructureNotFound(format!(
                "{} transversal lines instead of 2",
                transversals.len()
            )));
        }
        transversals.sort();
        Ok(Pseudoregulus {
            lines,
            transversals: [transversals[0], transversals[1]],
        })
    }

    /// The plane of weight 5, when it exists and is unique.
    ///
    /// An F_q-hyperplane H = {c : d·c = 0} of U spans a plane exactly when
    /// every F_(q^3)-relation among the basis lies in H ⊗ F_(q^3), i.e. when
    /// d annihilates the relation space. Those d form an F_q-subspace; a
    /// unique plane means it has dimension 1.
    pub fn find_weight5_plane(&self, t: &FieldTower) -> Result<ProjPlane> {
        let k = self.dependency_kernel(t);
        if k.len() != 2 {
            return Err(Error::StructureNotFound(format!(
                "relation space has dimension {}, expected 2",
                k.len()
            )));
        }
        let mut m = FqMatrix::zeros(3 * k.len(), 6);
        for (r, rel) in k.iter().enumerate() {
            for (i, &x) in rel.iter().enumerate() {
                let c = t.fq3_coords(x);
                for j in 0..3 {
                    m.set(3 * r + j, i, c[j]);
                }
            }
        }
        let ds = m.kernel(t);
        if ds.len() != 1 {
            return Err(Error::StructureNotFound(format!(
                "{} independent weight-5 plane candidates",
                ds.len()
            )));
        }
        self.plane_of_hyperplane(t, &ds[0])
    }

    /// F_(q^3)-span of Φ({c ∈ F_q^6 : d·c = 0}).
    pub fn plane_of_hyperplane(&self, t: &FieldTower, d: &[Fe]) -> Result<ProjPlane> {
        let h = FqMatrix::from_rows(&[d.to_vec()]).kernel(t);
        let vecs: Vec<Vec4> = h
            .iter()
            .map(|c| {
                (0..6).fold([Fe::ZERO; 4], |acc, i| {
                    vadd(t, &acc, &vscale(t, c[i], &self.basis[i]))
                })
            })
            .collect();
        let f = common_kernel(t, &vecs);
        if f.len() != 1 {
            return Err(Error::StructureNotFound(
                "hyperplane does not span a plane".into(),
            ));
        }
        ProjPlane::from_functional(t, &f[0])
    }
}

/// L_(ρ,f) = {⟨u + ρ·f(u)⟩ : u ∈ U1 \ {0}}.
pub fn build_pseudoregulus_linearset(
    t: &FieldTower,
    t1: &ProjLine,
    t2: &ProjLine,
    f: &SemilinearMap,
    rho: Fe,
) -> Result<LinearSet> {
    if !t1.is_skew(t, t2) {
        return Err(Error::NotSkew);
    }
    if f.sigma != 1 && f.sigma != 2 {
        return Err(Error::BadAutomorphism(f.sigma));
    }
    if rho.is_zero() || !t.in_subfield(rho, 3) {
        return Err(Error::ZeroElement);
    }
    let m = FqMatrix::from_rows(&[f.matrix[0].to_vec(), f.matrix[1].to_vec()]);
    if m.rank(t) != 2 {
        return Err(Error::SingularMap);
    }
    if ProjLine::span_vecs(t, &f.domain[0], &f.domain[1]) != Some(*t1)
        || ProjLine::span_vecs(t, &f.codomain[0], &f.codomain[1]) != Some(*t2)
    {
        return Err(Error::Dependent("map bases do not span the given lines"));
    }
    let mut basis = Vec::with_capacity(6);
    for slot in 0..2 {
        for &beta in &t.fq3_basis() {
            let (x, y) = if slot == 0 {
                (beta, Fe::ZERO)
            } else {
                (Fe::ZERO, beta)
            };
            let u = f.domain_vector(t, x, y);
            let fu = f.apply_coords(t, x, y);
            basis.push(vadd(t, &u, &vscale(t, rho, &fu)));
        }
    }
    LinearSet::new(t, basis)
}
