//! Constructors for the concrete presemifield families: D_A, D_AB, the
//! F4(a) representative over F_(q^6), the canonical family
//! S(λ, 0, α, 0, σ) with its two known instances S1, S2, and the transport
//! of a scattered D_A into canonical position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower};
use crate::linmaps::QLinearMap;
use crate::linsets::LinearSet;
use crate::projgeom::{EndomorphismModel, FieldModel, GroupElement, Vec4};
use crate::spreadsets::{Mat2, Provenance, SpreadSet};

/// ξ if given (checked to be a nonsquare of F_q^*), else the smallest
/// nonsquare.
pub fn resolve_xi(t: &FieldTower, xi: Option<Fe>) -> Result<Fe> {
    match xi {
        None => Ok(t.smallest_nonsquare()),
        Some(x) => {
            if x.is_zero() || !t.in_subfield(x, 1) {
                Err(Error::BadXi)
            } else if t.is_square_in_fq(x)? {
                Err(Error::XiIsSquare(x.0))
            } else {
                Ok(x)
            }
        }
    }
}

fn check_unit3(t: &FieldTower, x: Fe) -> Result<()> {
    if x.is_zero() {
        Err(Error::ZeroElement)
    } else if !t.in_subfield(x, 3) {
        Err(Error::NotInSubfield {
            elem: x.0,
            degree: 3,
        })
    } else {
        Ok(())
    }
}

fn check_r(r: u32) -> Result<()> {
    if r == 1 || r == 2 {
        Ok(())
    } else {
        Err(Error::InvalidR(r as i64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DAParams {
    pub r: u32,
    pub a: Fe,
    pub xi: Fe,
}

impl DAParams {
    pub fn new(t: &FieldTower, r: u32, a: Fe, xi: Option<Fe>) -> Result<Self> {
        check_r(r)?;
        check_unit3(t, a)?;
        let xi = resolve_xi(t, xi)?;
        if t.norm3(a) == Fe::ONE {
            return Err(Error::NormIsOne { param: "a" });
        }
        Ok(DAParams { r, a, xi })
    }

    /// N(a) ∉ {1, -1}: the scattered case.
    pub fn is_scattered_case(&self, t: &FieldTower) -> bool {
        t.norm3(self.a) != t.minus_one()
    }

    pub fn a_map(&self, t: &FieldTower) -> QLinearMap {
        QLinearMap::a_map(t, self.a, self.r).expect("validated parameters")
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new("d-a")
            .with("r", self.r as i64)
            .with("a", self.a.0 as i64)
            .with("xi", self.xi.0 as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DABParams {
    pub r: u32,
    pub b: Fe,
    pub xi: Fe,
}

impl DABParams {
    pub fn new(t: &FieldTower, r: u32, b: Fe, xi: Option<Fe>) -> Result<Self> {
        check_r(r)?;
        if t.q() == 3 {
            return Err(Error::FamilyEmpty {
                family: "d-ab",
                q: 3,
                reason: "every norm from F_27 to F_3 is 1 or -1".into(),
            });
        }
        check_unit3(t, b)?;
        let xi = resolve_xi(t, xi)?;
        let n = t.norm3(b);
        if n == Fe::ONE {
            return Err(Error::NormIsOne { param: "b" });
        }
        if n == t.minus_one() {
            return Err(Error::NormIsMinusOne { param: "b" });
        }
        Ok(DABParams { r, b, xi })
    }

    /// N(b^2) = -1: the non-scattered case.
    pub fn norm_b2_is_minus_one(&self, t: &FieldTower) -> bool {
        t.norm3(t.mul(self.b, self.b)) == t.minus_one()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new("d-ab")
            .with("r", self.r as i64)
            .with("b", self.b.0 as i64)
            .with("xi", self.xi.0 as i64)
    }
}

/// Spread set of M(x, y) = [[x, y], [g(y), ξ·f(x)]] on the basis
/// M(β_i, 0), M(0, β_i).
fn two_map_spread_set(t: &FieldTower, f: &QLinearMap, g: &QLinearMap, xi: Fe, prov: Provenance) -> Result<SpreadSet> {
    let beta = t.fq3_basis();
    let mut basis: Vec<Mat2> = beta
        .iter()
        .map(|&b| [b, Fe::ZERO, Fe::ZERO, t.mul(xi, f.apply(t, b))])
        .collect();
    basis.extend(beta.iter().map(|&b| [Fe::ZERO, b, g.apply(t, b), Fe::ZERO]));
    SpreadSet::new(t, basis, Some(prov))
}

pub fn make_da(t: &FieldTower, p: &DAParams) -> Result<SpreadSet> {
    let a = p.a_map(t);
    two_map_spread_set(t, &a, &a, p.xi, p.provenance())
}

pub fn make_dab(t: &FieldTower, p: &DABParams) -> Result<SpreadSet> {
    let a = QLinearMap::a_map(t, t.mul(p.b, p.b), p.r)?;
    let b = QLinearMap::b_map(t, p.b, p.r)?;
    two_map_spread_set(t, &b, &a, p.xi, p.provenance())
}

/// Roots in F_(q^3) of X^3 - s·X - 1, in encoding order.
fn cubic_roots(t: &FieldTower, s: Fe) -> Vec<Fe> {
    t.subfield_elements(3)
        .into_iter()
        .filter(|&u| t.sub(t.sub(t.pow(u, 3), t.mul(s, u)), Fe::ONE).is_zero())
        .collect()
}

/// X^3 - s·X - 1 has no root in F_q (so is irreducible, being a cubic).
fn cubic_irreducible(t: &FieldTower, s: Fe) -> bool {
    !cubic_roots(t, s).iter().any(|&u| t.in_subfield(u, 1))
}

/// Smallest solution of N_(q^6/q^3)(z) = target.
pub fn smallest_with_norm63(t: &FieldTower, target: Fe) -> Result<Fe> {
    (1..t.order())
        .map(Fe)
        .find(|&z| t.norm63(z) == target)
        .ok_or_else(|| Error::StructureNotFound("no element of the prescribed norm".into()))
}

/// Parameters of the F4(a) representative: u³ = s·u + 1 and
/// b^(q^3+1) = s² + 9u + 3s·u².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F4aModelParams {
    pub s: Fe,
    pub u: Fe,
    pub b: Fe,
}

impl F4aModelParams {
    /// With `s = None`, the smallest admissible s ∈ F_q^* is taken.
    pub fn new(t: &FieldTower, s: Option<Fe>) -> Result<Self> {
        let s = match s {
            Some(s) => {
                if s.is_zero() || !t.in_subfield(s, 1) {
                    return Err(Error::NotInSubfield { elem: s.0, degree: 1 });
                }
                if !cubic_irreducible(t, s) {
                    return Err(Error::ReducibleCubic(s.0));
                }
                s
            }
            None => t
                .fq_elements()
                .iter()
                .copied()
                .filter(|s| !s.is_zero())
                .find(|&s| cubic_irreducible(t, s) && !Self::rhs(t, s, cubic_roots(t, s)[0]).is_zero())
                .ok_or(Error::NoCubicParameter)?,
        };
        let u = cubic_roots(t, s)[0];
        let rhs = Self::rhs(t, s, u);
        if rhs.is_zero() {
            return Err(Error::NoCubicParameter);
        }
        let b = smallest_with_norm63(t, rhs)?;
        Ok(F4aModelParams { s, u, b })
    }

    fn rhs(t: &FieldTower, s: Fe, u: Fe) -> Fe {
        let nine = t.mul(t.int(9), u);
        let three = t.mul(t.mul(t.int(3), s), t.mul(u, u));
        t.add(t.add(t.mul(s, s), nine), three)
    }
}

/// x ⋆ y = (α + βu + γu²)x + γb·x^(q^3) with y = α + βu + γ(b + u²),
/// α, β, γ ∈ F_(q^2); as a spread set over the basis {1, w} of F_(q^6).
pub fn make_f4a_model(t: &FieldTower, p: &F4aModelParams) -> Result<SpreadSet> {
    let e = EndomorphismModel::new(t);
    let nu = t.subfield_generator(2);
    let u2 = t.mul(p.u, p.u);
    let mut basis = Vec::with_capacity(6);
    for (la, lb) in [(Fe::ONE, Fe::ZERO), (p.u, Fe::ZERO), (u2, p.b)] {
        for c in [Fe::ONE, nu] {
            basis.push(e.matrix(t, t.mul(c, la), t.mul(c, lb)));
        }
    }
    let prov = Provenance::new("f4a-model")
        .with("s", p.s.0 as i64)
        .with("u", p.u.0 as i64)
        .with("b", p.b.0 as i64);
    SpreadSet::new(t, basis, Some(prov))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub lambda: Fe,
    pub alpha: Fe,
    /// σ = q^sigma, sigma ∈ {2, 4}.
    pub sigma: u32,
}

impl CanonicalParams {
    pub fn new(t: &FieldTower, lambda: Fe, alpha: Fe, sigma: u32) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::ZeroElement);
        }
        if sigma != 2 && sigma != 4 {
            return Err(Error::BadSigma(sigma));
        }
        let p = CanonicalParams { lambda, alpha, sigma };
        if let Some(y) = p.norm_witness(t) {
            return Err(Error::NormConditionFails(y.0));
        }
        Ok(p)
    }

    /// λy + αy^σ.
    pub fn first(&self, t: &FieldTower, y: Fe) -> Fe {
        t.add(t.mul(self.lambda, y), t.mul(self.alpha, t.frob(y, self.sigma as i64)))
    }

    /// Smallest-log y ≠ 0 with N(y) = N(λy + αy^σ), if any.
    pub fn norm_witness(&self, t: &FieldTower) -> Option<Fe> {
        (0..t.order() as u64 - 1)
            .map(|i| t.exp(i))
            .find(|&y| t.norm63(y) == t.norm63(self.first(t, y)))
    }

    /// F_q-basis (λy + αy^σ, y), y = g^0..g^5, of L(λ, 0, α, 0, σ) in PG(V).
    pub fn model_basis(&self, t: &FieldTower) -> Vec<(Fe, Fe)> {
        let g = t.generator();
        (0..6)
            .map(|i| {
                let y = t.pow(g, i);
                (self.first(t, y), y)
            })
            .collect()
    }
}

/// The spread set whose linear set is φ⁻¹(L(λ, 0, α, 0, σ)), with φ built
/// from the smallest nonsquare.
pub fn make_canonical(t: &FieldTower, p: &CanonicalParams) -> Result<SpreadSet> {
    let m = FieldModel::new(t, t.smallest_nonsquare())?;
    let basis: Vec<Mat2> = p.model_basis(t).iter().map(|&xy| m.phi_inv_vec(t, xy)).collect();
    let prov = Provenance::new("canonical")
        .with("lambda", p.lambda.0 as i64)
        .with("alpha", p.alpha.0 as i64)
        .with("sigma", p.sigma as i64);
    SpreadSet::new(t, basis, Some(prov))
}

/// Primitive 6th roots of unity in F_q, in encoding order.
pub fn sixth_roots_of_unity(t: &FieldTower) -> Vec<Fe> {
    let mut v: Vec<Fe> = t
        .subfield_units(1)
        .into_iter()
        .filter(|&e| t.pow(e, 6) == Fe::ONE && t.pow(e, 2) != Fe::ONE && t.pow(e, 3) != Fe::ONE)
        .collect();
    v.sort();
    v
}

/// N(λ1) = (2(1 - η))⁻¹ for each primitive 6th root η; q ≡ 1 (mod 6).
pub fn s1_norms(t: &FieldTower) -> Result<Vec<(Fe, Fe)>> {
    if t.q() % 6 != 1 {
        return Err(Error::Congruence(format!("S1 needs q = 1 mod 6, got q = {}", t.q())));
    }
    Ok(sixth_roots_of_unity(t)
        .into_iter()
        .map(|eta| (eta, t.inv(t.mul(t.int(2), t.sub(Fe::ONE, eta)))))
        .collect())
}

/// N(λ2) = -(u + u²)⁻¹ with u³ = u + 1 the smallest root in F_(q^3);
/// q ≡ 0 (mod 3).
pub fn s2_norm(t: &FieldTower) -> Result<(Fe, Fe)> {
    if !t.q().is_multiple_of(3) {
        return Err(Error::Congruence(format!("S2 needs q = 0 mod 3, got q = {}", t.q())));
    }
    if !cubic_irreducible(t, Fe::ONE) {
        return Err(Error::ReducibleCubic(1));
    }
    let u = cubic_roots(t, Fe::ONE)[0];
    let n = t.neg(t.inv(t.add(u, t.mul(u, u))));
    Ok((u, n))
}

fn make_known(t: &FieldTower, family: &str, norm: Fe, extra: (&str, Fe)) -> Result<SpreadSet> {
    let lambda = smallest_with_norm63(t, norm)?;
    let p = CanonicalParams::new(t, lambda, lambda, 2)?;
    let mut s = make_canonical(t, &p)?;
    let prov = Provenance::new(family)
        .with("lambda", lambda.0 as i64)
        .with(extra.0, extra.1 .0 as i64);
    s.set_provenance(Some(prov));
    Ok(s)
}

/// S(λ1, 0, λ1, 0, q²) for the smallest primitive 6th root η.
pub fn make_s1(t: &FieldTower) -> Result<SpreadSet> {
    let (eta, n) = s1_norms(t)?[0];
    make_known(t, "s1", n, ("eta", eta))
}

/// S(λ2, 0, λ2, 0, q²).
pub fn make_s2(t: &FieldTower) -> Result<SpreadSet> {
    let (u, n) = s2_norm(t)?;
    make_known(t, "s2", n, ("u", u))
}

/// λ̄ = (N(a) - 1)/(N(a) + 1).
pub fn lambda_bar(t: &FieldTower, a: Fe) -> Result<Fe> {
    check_unit3(t, a)?;
    let n = t.norm3(a);
    if n == Fe::ONE {
        return Err(Error::NormIsOne { param: "a" });
    }
    if n == t.minus_one() {
        return Err(Error::NormIsMinusOne { param: "a" });
    }
    Ok(t.div(t.sub(n, Fe::ONE), t.add(n, Fe::ONE)))
}

/// L_(D_A) carried into PG(V) by φ and then by Ψ.
#[derive(Clone, Debug)]
pub struct CanonicalTransport {
    pub model: FieldModel,
    pub psi: GroupElement,
    pub lambda_bar: Fe,
    /// φΨ-images of the basis of L_(D_A).
    pub model_basis: Vec<(Fe, Fe)>,
    /// The image pulled back to PG(3, q^3) through φ.
    pub linear_set: LinearSet,
}

impl CanonicalTransport {
    pub fn map_vec(&self, t: &FieldTower, v: &Vec4) -> (Fe, Fe) {
        self.psi.apply_vec(t, self.model.phi_vec(t, v))
    }
}

/// Ψ: (X, Y) ↦ ((1 - ξc)X + (-1 - ξc)Y, (-1 - ξc)X + (1 - ξc)Y) with
/// c = a^(q^r + 1).
pub fn psi_for(t: &FieldTower, p: &DAParams) -> Result<GroupElement> {
    let c = t.mul(p.a, t.frob(p.a, p.r as i64));
    let xc = t.mul(p.xi, c);
    GroupElement::new(t, Fe::ONE, Fe::ZERO, t.sub(Fe::ONE, xc), t.sub(t.minus_one(), xc), 0)
}

pub fn da_to_canonical(t: &FieldTower, p: &DAParams) -> Result<CanonicalTransport> {
    let lambda_bar = lambda_bar(t, p.a)?;
    let model = FieldModel::new(t, p.xi)?;
    let psi = psi_for(t, p)?;
    let l = make_da(t, p)?.linear_set(t);
    let model_basis: Vec<(Fe, Fe)> = l
        .basis()
        .iter()
        .map(|v| psi.apply_vec(t, model.phi_vec(t, v)))
        .collect();
    let pulled: Vec<Vec4> = model_basis.iter().map(|&xy| model.phi_inv_vec(t, xy)).collect();
    Ok(CanonicalTransport {
        model,
        psi,
        lambda_bar,
        model_basis,
        linear_set: LinearSet::new(t, pulled)?,
    })
}

/// All a ∈ F_(q^3)^* with N(a) ∉ {1, -1}, in encoding order.
pub fn scattered_da_parameters(t: &FieldTower) -> Vec<Fe> {
    let mut v: Vec<Fe> = t
        .subfield_units(3)
        .into_iter()
        .filter(|&a| {
            let n = t.norm3(a);
            n != Fe::ONE && n != t.minus_one()
        })
        .collect();
    v.sort();
    v
}

/// All valid b for D_AB, in encoding order; empty at q = 3.
pub fn valid_dab_parameters(t: &FieldTower) -> Vec<Fe> {
    scattered_da_parameters(t)
}
