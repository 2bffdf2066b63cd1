//! Kaplansky isotope of a spread-set presemifield and its nuclei, computed
//! from the F_p structure tensor.

use serde::{Deserialize, Serialize};

use super::{row_times, SpreadSet};
use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower, FqMatrix};

/// Sizes (N_l, N_r, N_m, Z); serialized as that 4-element array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[u64; 4]", from = "[u64; 4]")]
pub struct NucleiProfile {
    pub left: u64,
    pub right: u64,
    pub middle: u64,
    pub center: u64,
}

impl From<NucleiProfile> for [u64; 4] {
    fn from(n: NucleiProfile) -> Self {
        [n.left, n.right, n.middle, n.center]
    }
}

impl From<[u64; 4]> for NucleiProfile {
    fn from(a: [u64; 4]) -> Self {
        NucleiProfile {
            left: a[0],
            right: a[1],
            middle: a[2],
            center: a[3],
        }
    }
}

impl std::fmt::Display for NucleiProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.left, self.right, self.middle, self.center)
    }
}

/// x∘y = R⁻¹(x) ⋆ L⁻¹(y) with R(x) = x ⋆ e_y, L(y) = e_x ⋆ y, written in
/// F_p-coordinates. The identity is e_x ⋆ e_y.
#[derive(Clone, Debug)]
pub struct KaplanskySemifield {
    p: u64,
    n: usize,
    /// table[(i*n + j)*n + k]: k-th coordinate of z_i∘z_j.
    table: Vec<u64>,
    identity: Vec<u64>,
}

fn fp_coords(t: &FieldTower, u: (Fe, Fe)) -> Vec<u64> {
    let mut out = Vec::with_capacity(6 * t.h() as usize);
    for z in [u.0, u.1] {
        for c in t.fq3_coords(z) {
            out.extend(t.fq_coords_fp(c).iter().map(|&v| v as u64));
        }
    }
    out
}

fn fq_from_fp(t: &FieldTower, c: &[Fe]) -> Fe {
    t.fq_basis_fp()
        .iter()
        .zip(c)
        .fold(Fe::ZERO, |acc, (&z, &ci)| t.add(acc, t.mul(ci, z)))
}

fn x_from_fp(t: &FieldTower, c: &[Fe]) -> (Fe, Fe) {
    let h = t.h() as usize;
    let slot = |s: usize| {
        let q: Vec<Fe> = (0..3).map(|a| fq_from_fp(t, &c[(3 * s + a) * h..(3 * s + a + 1) * h])).collect();
        t.fq3_from_coords([q[0], q[1], q[2]])
    };
    (slot(0), slot(1))
}

fn y_from_fp(t: &FieldTower, c: &[Fe]) -> Vec<Fe> {
    let h = t.h() as usize;
    (0..6).map(|k| fq_from_fp(t, &c[k * h..(k + 1) * h])).collect()
}

fn to_fe(v: &[u64]) -> Vec<Fe> {
    v.iter().map(|&x| Fe(x as u32)).collect()
}

impl KaplanskySemifield {
    /// Units e_x = (1, 0) and e_y = first basis member.
    pub fn new(t: &FieldTower, s: &SpreadSet) -> Result<Self> {
        let mut ey = [Fe::ZERO; 6];
        ey[0] = Fe::ONE;
        Self::with_units(t, s, (Fe::ONE, Fe::ZERO), &ey)
    }

    pub fn with_units(t: &FieldTower, s: &SpreadSet, ex: (Fe, Fe), ey: &[Fe]) -> Result<Self> {
        let h = t.h() as usize;
        let n = 6 * h;
        let zeta = t.fq_basis_fp();
        let beta = t.fq3_basis();
        let xs: Vec<(Fe, Fe)> = (0..n)
            .map(|i| {
                let z = t.mul(beta[(i / h) % 3], zeta[i % h]);
                if i < 3 * h {
                    (z, Fe::ZERO)
                } else {
                    (Fe::ZERO, z)
                }
            })
            .collect();
        let ys: Vec<Vec<Fe>> = (0..n)
            .map(|i| {
                let mut c = vec![Fe::ZERO; 6];
                c[i / h] = zeta[i % h];
                c
            })
            .collect();

        let mey = s.member(t, ey);
        let rows = |f: &dyn Fn(usize) -> (Fe, Fe)| {
            FqMatrix::from_rows(&(0..n).map(|i| to_fe(&fp_coords(t, f(i)))).collect::<Vec<_>>())
        };
        let r = rows(&|i| row_times(t, xs[i], &mey));
        let l = rows(&|i| s.mul(t, ex, &ys[i]));
        let (rinv, linv) = match (r.inverse(t), l.inverse(t)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::ZeroDivisors),
        };

        let left: Vec<(Fe, Fe)> = (0..n).map(|i| x_from_fp(t, rinv.row(i))).collect();
        let right: Vec<_> = (0..n).map(|j| s.member(t, &y_from_fp(t, linv.row(j)))).collect();
        let mut table = Vec::with_capacity(n * n * n);
        for x in &left {
            for m in &right {
                table.extend(fp_coords(t, row_times(t, *x, m)));
            }
        }
        Ok(KaplanskySemifield {
            p: t.p() as u64,
            n,
            table,
            identity: fp_coords(t, s.mul(t, ex, ey)),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> &[u64] {
        &self.identity
    }

    fn entry(&self, i: usize, j: usize) -> &[u64] {
        let o = (i * self.n + j) * self.n;
        &self.table[o..o + self.n]
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (i, &ai) in a.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (j, &bj) in b.iter().enumerate().filter(|(_, &v)| v != 0) {
                let c = ai * bj % self.p;
                for (o, &e) in out.iter_mut().zip(self.entry(i, j)) {
                    *o = (*o + c * e) % self.p;
                }
            }
        }
        out
    }

    /// z_a∘z_b expanded: Σ_m T[a][b][m]·T[m][c] (when `first`) or
    /// Σ_m T[b][c][m]·T[a][m].
    fn assoc(&self, a: usize, b: usize, c: usize, first: bool) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        let coeffs = if first { self.entry(a, b) } else { self.entry(b, c) };
        for (m, &w) in coeffs.iter().enumerate().filter(|(_, &w)| w != 0) {
            let e = if first { self.entry(m, c) } else { self.entry(a, m) };
            for (o, &x) in out.iter_mut().zip(e) {
                *o = (*o + w * x) % self.p;
            }
        }
        out
    }

    fn equations(&self, t: &FieldTower, eqs: impl Fn(usize, usize, usize) -> Vec<u64>) -> FqMatrix {
        let n = self.n;
        let mut m = FqMatrix::zeros(0, n);
        for j in 0..n {
            for k in 0..n {
                let cols: Vec<Vec<u64>> = (0..n).map(|i| eqs(i, j, k)).collect();
                for o in 0..n {
                    let row: Vec<Fe> = cols.iter().map(|c| Fe(c[o] as u32)).collect();
                    if row.iter().any(|x| !x.is_zero()) {
                        m.push_row(&row);
                    }
                }
            }
            m = compress(t, &m);
        }
        m
    }

    pub fn nuclei(&self, t: &FieldTower) -> NucleiProfile {
        let p = self.p;
        let diff = |a: Vec<u64>, b: Vec<u64>| -> Vec<u64> {
            a.iter().zip(&b).map(|(x, y)| (x + p - y) % p).collect()
        };
        let left = self.equations(t, |i, j, k| diff(self.assoc(i, j, k, true), self.assoc(i, j, k, false)));
        let middle = self.equations(t, |i, j, k| diff(self.assoc(j, i, k, true), self.assoc(j, i, k, false)));
        let right = self.equations(t, |i, j, k| diff(self.assoc(j, k, i, true), self.assoc(j, k, i, false)));
        let comm = self.equations(t, |i, j, k| {
            if k == 0 {
                diff(self.entry(i, j).to_vec(), self.entry(j, i).to_vec())
            } else {
                vec![0; self.n]
            }
        });
        let n = self.n;
        let size = |ms: &[&FqMatrix]| {
            let mut all = FqMatrix::zeros(0, n);
            for m in ms {
                for i in 0..m.rows() {
                    all.push_row(m.row(i));
                }
            }
            p.pow((n - all.rank(t)) as u32)
        };
        NucleiProfile {
            left: size(&[&left]),
            right: size(&[&right]),
            middle: size(&[&middle]),
            center: size(&[&left, &middle, &right, &comm]),
        }
    }
}

/// Row-reduced nonzero rows spanning the same space.
fn compress(t: &FieldTower, m: &FqMatrix) -> FqMatrix {
    let (r, piv) = m.rref(t);
    let mut out = FqMatrix::zeros(0, m.cols());
    for i in 0..piv.len() {
        out.push_row(r.row(i));
    }
    out
}
