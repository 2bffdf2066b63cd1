//! The second model of PG(3, q^3): PG(V) with V = F_(q^6) × F_(q^6) viewed
//! over F_(q^3), the quadric X^(q^3+1) = Y^(q^3+1), the bridge φ from
//! PG(3, q^3), and the group of collineations fixing both reguli.

use serde::{Deserialize, Serialize};

use super::space::{ProjPoint, Vec4};
use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower};

/// x^(q^3), the involution of F_(q^6) over F_(q^3).
#[inline]
pub fn bar(t: &FieldTower, x: Fe) -> Fe {
    t.frob(x, 3)
}

/// A point ⟨(X, Y)⟩ of PG(V), scaled by F_(q^3)^* so that the discrete log
/// of the first nonzero entry is below q^3 + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldModelPoint {
    pub x: Fe,
    pub y: Fe,
}

impl FieldModelPoint {
    pub fn new(t: &FieldTower, x: Fe, y: Fe) -> Result<Self> {
        let lead = if !x.is_zero() {
            x
        } else if !y.is_zero() {
            y
        } else {
            return Err(Error::ZeroVector);
        };
        let period = t.q().pow(3) + 1;
        let l = t.log(lead).unwrap() as u64;
        // multiply by g^(-(l - l mod period)), an element of F_(q^3)^*
        let shift = l - l % period;
        let m = t.order() as u64 - 1;
        let s = t.exp((m - shift % m) % m);
        Ok(FieldModelPoint {
            x: t.mul(s, x),
            y: t.mul(s, y),
        })
    }

    pub fn on_quadric(&self, t: &FieldTower) -> bool {
        t.norm63(self.x) == t.norm63(self.y)
    }
}

/// B̄((X, Y), (X', Y')) = X·X'^(q^3) + X^(q^3)·X' - Y·Y'^(q^3) - Y^(q^3)·Y',
/// the polarization of X^(q^3+1) - Y^(q^3+1).
pub fn model_bilinear(t: &FieldTower, a: (Fe, Fe), b: (Fe, Fe)) -> Fe {
    let xx = t.add(t.mul(a.0, bar(t, b.0)), t.mul(bar(t, a.0), b.0));
    let yy = t.add(t.mul(a.1, bar(t, b.1)), t.mul(bar(t, a.1), b.1));
    t.sub(xx, yy)
}

/// The bridge φ for a fixed nonsquare ξ, with ω the smaller-encoded root of
/// ω² = 1/ξ (ω lies in F_(q^2) \ F_q).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldModel {
    xi: Fe,
    omega: Fe,
}

impl FieldModel {
    pub fn new(t: &FieldTower, xi: Fe) -> Result<Self> {
        if xi.is_zero() || !t.in_subfield(xi, 1) || t.is_square_in_fq(xi)? {
            return Err(Error::BadXi);
        }
        let omega = t.sqrt(t.inv(xi)).expect("nonsquare of F_q is a square in F_(q^2)");
        debug_assert!(t.in_subfield(omega, 2) && !t.in_subfield(omega, 1));
        Ok(FieldModel { xi, omega })
    }

    pub fn xi(&self) -> Fe {
        self.xi
    }

    pub fn omega(&self) -> Fe {
        self.omega
    }

    /// (x0 + x3 + (x1 + ξx2)ω, x0 - x3 + (x1 - ξx2)ω).
    pub fn phi_vec(&self, t: &FieldTower, v: &Vec4) -> (Fe, Fe) {
        let xi_x2 = t.mul(self.xi, v[2]);
        let x = t.add(t.add(v[0], v[3]), t.mul(t.add(v[1], xi_x2), self.omega));
        let y = t.add(t.sub(v[0], v[3]), t.mul(t.sub(v[1], xi_x2), self.omega));
        (x, y)
    }

    pub fn phi(&self, t: &FieldTower, p: &ProjPoint) -> FieldModelPoint {
        let (x, y) = self.phi_vec(t, p.coords());
        FieldModelPoint::new(t, x, y).expect("φ is injective on vectors")
    }

    /// Inverse of [`phi_vec`](Self::phi_vec).
    pub fn phi_inv_vec(&self, t: &FieldTower, xy: (Fe, Fe)) -> Vec4 {
        let (ax, bx) = self.split(t, xy.0);
        let (ay, by) = self.split(t, xy.1);
        let half = t.inv(t.int(2));
        [
            t.mul(half, t.add(ax, ay)),
            t.mul(half, t.add(bx, by)),
            t.div(t.sub(bx, by), t.mul(t.int(2), self.xi)),
            t.mul(half, t.sub(ax, ay)),
        ]
    }

    /// Z = A + Bω with A, B ∈ F_(q^3).
    pub fn split(&self, t: &FieldTower, z: Fe) -> (Fe, Fe) {
        let zb = bar(t, z);
        let half = t.inv(t.int(2));
        let a = t.mul(half, t.add(z, zb));
        let b = t.div(t.sub(z, zb), t.mul(t.int(2), self.omega));
        (a, b)
    }

    /// F_(q^3)-coordinates (A_X, B_X, A_Y, B_Y) of (X, Y) in the basis
    /// {1, ω} of F_(q^6); an F_(q^3)-linear isomorphism V → V(4, q^3).
    pub fn coordinates(&self, t: &FieldTower, xy: (Fe, Fe)) -> Vec4 {
        let (a, b) = self.split(t, xy.0);
        let (c, d) = self.split(t, xy.1);
        [a, b, c, d]
    }

    pub fn from_coordinates(&self, t: &FieldTower, v: &Vec4) -> (Fe, Fe) {
        (
            t.add(v[0], t.mul(v[1], self.omega)),
            t.add(v[2], t.mul(v[3], self.omega)),
        )
    }
}

/// An element of the collineation group fixing the reguli of the model
/// quadric:
///
/// ⟨x, y⟩ ↦ ⟨A·u + B·w̄, A·w + B·ū⟩, u = C^τ x^τ + D^(τq^3) y^τ,
/// w = D^τ x^τ + C^(τq^3) y^τ,
///
/// where τ: z ↦ z^(p^k) and the bar is the q^3-power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
    pub tau: u32,
}

impl GroupElement {
    pub fn new(t: &FieldTower, a: Fe, b: Fe, c: Fe, d: Fe, tau: u32) -> Result<Self> {
        if t.norm63(a) == t.norm63(b) || t.norm63(c) == t.norm63(d) {
            return Err(Error::DegenerateGroupElement);
        }
        Ok(GroupElement {
            a,
            b,
            c,
            d,
            tau: tau % t.degree(),
        })
    }

    pub fn identity() -> Self {
        GroupElement {
            a: Fe::ONE,
            b: Fe::ZERO,
            c: Fe::ONE,
            d: Fe::ZERO,
            tau: 0,
        }
    }

    pub fn apply_vec(&self, t: &FieldTower, xy: (Fe, Fe)) -> (Fe, Fe) {
        let k = self.tau as i64;
        let (x, y) = (t.frob_p(xy.0, k), t.frob_p(xy.1, k));
        let (c, d) = (t.frob_p(self.c, k), t.frob_p(self.d, k));
        let u = t.add(t.mul(c, x), t.mul(bar(t, d), y));
        let w = t.add(t.mul(d, x), t.mul(bar(t, c), y));
        (
            t.add(t.mul(self.a, u), t.mul(self.b, bar(t, w))),
            t.add(t.mul(self.a, w), t.mul(self.b, bar(t, u))),
        )
    }

    pub fn apply(&self, t: &FieldTower, p: &FieldModelPoint) -> FieldModelPoint {
        let (x, y) = self.apply_vec(t, (p.x, p.y));
        FieldModelPoint::new(t, x, y).expect("group elements are bijective")
    }
}

/// The transversal ℓ_λ = {⟨(λy, y)⟩}; `None` stands for ℓ = {⟨(y, 0)⟩}.
pub fn model_line_contains(t: &FieldTower, lambda: Option<Fe>, p: &FieldModelPoint) -> bool {
    match lambda {
        None => p.y.is_zero(),
        Some(l) => t.mul(l, p.y) == p.x,
    }
}

/// Identification of V with 2×2 matrices over F_(q^3): (A, B) is sent to
/// the matrix of x ↦ A·x + B·x^(q^3) on F_(q^6) = F_(q^3) ⊕ F_(q^3)·w,
/// acting on row vectors, with w the smallest element outside F_(q^3).
/// Its determinant is A^(q^3+1) - B^(q^3+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EndomorphismModel {
    w: Fe,
    w_bar: Fe,
    inv_diff: Fe,
}

impl EndomorphismModel {
    pub fn new(t: &FieldTower) -> Self {
        let w = (1..t.order())
            .map(Fe)
            .find(|&x| !t.in_subfield(x, 3))
            .unwrap();
        let w_bar = bar(t, w);
        EndomorphismModel {
            w,
            w_bar,
            inv_diff: t.inv(t.sub(w, w_bar)),
        }
    }

    pub fn w(&self) -> Fe {
        self.w
    }

    /// z = z1 + z2·w with z1, z2 ∈ F_(q^3).
    pub fn coords(&self, t: &FieldTower, z: Fe) -> (Fe, Fe) {
        let z2 = t.mul(t.sub(z, bar(t, z)), self.inv_diff);
        (t.sub(z, t.mul(z2, self.w)), z2)
    }

    pub fn from_coords(&self, t: &FieldTower, z1: Fe, z2: Fe) -> Fe {
        t.add(z1, t.mul(z2, self.w))
    }

    /// Flattened matrix (m0, m1, m2, m3) = rows (coords(A+B), coords(Aw+Bw̄)).
    pub fn matrix(&self, t: &FieldTower, a: Fe, b: Fe) -> Vec4 {
        let (m0, m1) = self.coords(t, t.add(a, b));
        let (m2, m3) = self.coords(
            t,
            t.add(t.mul(a, self.w), t.mul(b, self.w_bar)),
        );
        [m0, m1, m2, m3]
    }

    /// Inverse of [`matrix`](Self::matrix).
    pub fn endomorphism(&self, t: &FieldTower, m: &Vec4) -> (Fe, Fe) {
        let z1 = self.from_coords(t, m[0], m[1]);
        let z2 = self.from_coords(t, m[2], m[3]);
        let b = t.div(t.sub(z2, t.mul(self.w, z1)), t.sub(self.w_bar, self.w));
        (t.sub(z1, b), b)
    }
}
