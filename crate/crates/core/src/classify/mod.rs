//! Geometric classification of the linear set of a rank-two semifield of
//! order q^6 into the classes F3, F4(a/b/c), F5 (and a catch-all), the
//! invariant signatures of the known families, the norm test between
//! canonical-form parameters, and counting of D_A isotopy classes.

pub mod theorems;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower};
use crate::linsets::LinearSet;
use crate::projgeom::{LineProfile, Meet, ProjLine, ProjPlane, ProjPoint};
use crate::spreadsets::{NucleiProfile, Provenance, SpreadSet};
use crate::zoo::{lambda_bar, scattered_da_parameters};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyLabel {
    F3,
    F4a,
    F4b,
    F4c,
    F5,
    #[serde(rename = "other")]
    Other,
}

impl std::fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyLabel::F3 => "F3",
            FamilyLabel::F4a => "F4a",
            FamilyLabel::F4b => "F4b",
            FamilyLabel::F4c => "F4c",
            FamilyLabel::F5 => "F5",
            FamilyLabel::Other => "other",
        };
        f.write_str(s)
    }
}

/// Position of the two transversals of the pseudoregulus relative to the
/// quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransversalConfig {
    BothContained,
    ExternalPolarPair,
    /// One transversal contained in the quadric, the other external.
    Mixed,
    /// Both external, not polar, t1^⊥ ∩ t2 empty.
    ExternalPerpDisjoint,
    /// Both external, t1^⊥ ∩ t2 a point.
    ExternalPerpPoint,
    /// Tangent or secant transversals.
    Unlisted,
}

impl std::fmt::Display for TransversalConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        f.write_str(s.as_str().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F3Data {
    /// The unique point of weight 2.
    pub point: ProjPoint,
    /// The unique plane of weight 5.
    pub plane: ProjPlane,
    pub point_polar_weight: usize,
    pub plane_polar_weight: usize,
    /// (w(P^⊥), w(π^⊥)); absent when π = P^⊥.
    pub type_pair: Option<(u8, u8)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F4Data {
    pub line: ProjLine,
    /// |ℓ^⊥ ∩ L|.
    pub polar_points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F5Data {
    pub config: TransversalConfig,
    pub transversals: [ProjLine; 2],
    pub profiles: [LineProfile; 2],
    /// t1^⊥ ∩ t2 when it is a point.
    pub perp_point: Option<ProjPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub family: FamilyLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f3: Option<F3Data>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f4: Option<F4Data>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f5: Option<F5Data>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nuclei: Option<NucleiProfile>,
    pub weight_histogram: BTreeMap<u8, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn f5_data(t: &FieldTower, l: &LinearSet) -> Result<F5Data> {
    let pr = l.pseudoregulus(t)?;
    let [t1, t2] = pr.transversals;
    let profiles = [t1.quadric_profile(t), t2.quadric_profile(t)];
    let contained = |p: LineProfile| p == LineProfile::Contained;
    let external = |p: LineProfile| p == LineProfile::External;
    let mut perp_point = None;
    let config = if contained(profiles[0]) && contained(profiles[1]) {
        TransversalConfig::BothContained
    } else if (contained(profiles[0]) && external(profiles[1])) || (external(profiles[0]) && contained(profiles[1])) {
        TransversalConfig::Mixed
    } else if external(profiles[0]) && external(profiles[1]) {
        if t1.polar(t) == t2 {
            TransversalConfig::ExternalPolarPair
        } else {
            match t1.polar(t).meet(t, &t2) {
                Meet::Skew => TransversalConfig::ExternalPerpDisjoint,
                Meet::Point(p) => {
                    perp_point = Some(p);
                    TransversalConfig::ExternalPerpPoint
                }
                Meet::Same => TransversalConfig::ExternalPolarPair,
            }
        }
    } else {
        TransversalConfig::Unlisted
    };
    Ok(F5Data {
        config,
        transversals: [t1, t2],
        profiles,
        perp_point,
    })
}

fn f3_data(t: &FieldTower, l: &LinearSet, point: ProjPoint) -> Result<F3Data> {
    let plane = l.find_weight5_plane(t)?;
    let pp = point.polar(t);
    let plane_polar = plane.polar(t);
    let point_polar_weight = l.weight_of_plane(t, &pp);
    let plane_polar_weight = l.weight_of_point(t, &plane_polar);
    let type_pair = (plane != pp).then_some((point_polar_weight as u8, plane_polar_weight as u8));
    Ok(F3Data {
        point,
        plane,
        point_polar_weight,
        plane_polar_weight,
        type_pair,
    })
}

/// Decision tree: a contained line gives F4 (subclass by |ℓ^⊥ ∩ L|), a
/// scattered set gives F5, a unique heavy point of weight 2 with a unique
/// plane of weight 5 gives F3, anything else is `Other`.
pub fn classify(t: &FieldTower, l: &LinearSet) -> Result<ClassificationReport> {
    if l.meets_quadric(t) {
        return Err(Error::MeetsQuadric);
    }
    let table = l.point_weights(t);
    let mut report = ClassificationReport {
        family: FamilyLabel::Other,
        f3: None,
        f4: None,
        f5: None,
        nuclei: None,
        weight_histogram: table.histogram(),
        provenance: None,
    };
    let lines = l.contained_lines(t);
    if let Some(line) = lines.first() {
        let polar_points = l.points_on_line(t, &line.polar(t));
        let q = t.q() as usize;
        report.family = match polar_points {
            0 => FamilyLabel::F4a,
            1 => FamilyLabel::F4b,
            n if n == q + 1 => FamilyLabel::F4c,
            _ => FamilyLabel::Other,
        };
        report.f4 = Some(F4Data {
            line: *line,
            polar_points,
        });
        return Ok(report);
    }
    if table.max_weight() == 1 {
        report.f5 = Some(f5_data(t, l)?);
        report.family = FamilyLabel::F5;
        return Ok(report);
    }
    let heavy = table.points_of_weight_at_least(2);
    if heavy.len() == 1 && table.get(&heavy[0]) == 2 {
        if let Ok(d) = f3_data(t, l, heavy[0]) {
            report.f3 = Some(d);
            report.family = FamilyLabel::F3;
        }
    }
    Ok(report)
}

/// Classification of a spread set's linear set, with nuclei and provenance.
pub fn classify_spread_set(t: &FieldTower, s: &SpreadSet) -> Result<ClassificationReport> {
    let mut r = classify(t, &s.linear_set(t))?;
    r.nuclei = Some(s.nuclei(t)?);
    r.provenance = s.provenance().cloned();
    Ok(r)
}

pub fn f3_type(t: &FieldTower, l: &LinearSet) -> Result<(u8, u8)> {
    let r = classify(t, l)?;
    match r.f3 {
        Some(F3Data {
            type_pair: Some(tp), ..
        }) => Ok(tp),
        Some(_) => Err(Error::PlaneIsPolarOfPoint),
        None => Err(Error::NotF3(format!("classified as {}", r.family))),
    }
}

/// Invariants compared when deciding whether a presemifield could belong to
/// a known family. Absent fields are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub family: FamilyLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f3_type: Option<(u8, u8)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<TransversalConfig>,
    /// Nuclei sizes as powers of q.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nuclei_exponents: Option<[u32; 4]>,
    /// Frobenius orbit of N_(q^6/q^3)(λ) for canonical-form members.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_orbit: Option<BTreeSet<u32>>,
}

fn log_q(q: u64, n: u64) -> u32 {
    let mut e = 0;
    let mut v = 1;
    while v < n {
        v *= q;
        e += 1;
    }
    e
}

impl Signature {
    pub fn of_report(t: &FieldTower, r: &ClassificationReport) -> Self {
        Signature {
            family: r.family,
            f3_type: r.f3.as_ref().and_then(|d| d.type_pair),
            config: r.f5.as_ref().map(|d| d.config),
            nuclei_exponents: r.nuclei.map(|n| <[u64; 4]>::from(n).map(|s| log_q(t.q(), s))),
            norm_orbit: None,
        }
    }

    pub fn with_norm_orbit(mut self, orbit: BTreeSet<u32>) -> Self {
        self.norm_orbit = Some(orbit);
        self
    }

    /// Whether nothing recorded in `known` separates the two.
    pub fn compatible_with(&self, known: &Signature) -> bool {
        fn agree<T: PartialEq>(a: &Option<T>, k: &Option<T>) -> bool {
            match (a, k) {
                (Some(a), Some(k)) => a == k,
                _ => true,
            }
        }
        self.family == known.family
            && agree(&self.f3_type, &known.f3_type)
            && agree(&self.config, &known.config)
            && agree(&self.nuclei_exponents, &known.nuclei_exponents)
            && agree(&self.norm_orbit, &known.norm_orbit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownSignature {
    pub name: String,
    pub signature: Signature,
}

fn known(name: &str, family: FamilyLabel, f3_type: Option<(u8, u8)>, config: Option<TransversalConfig>, nuclei: Option<[u32; 4]>) -> KnownSignature {
    KnownSignature {
        name: name.to_string(),
        signature: Signature {
            family,
            f3_type,
            config,
            nuclei_exponents: nuclei,
            norm_orbit: None,
        },
    }
}

/// The known families and their derivative-stable invariants. The entries
/// for S1 and S2 (and their transposes) carry their norm orbits and exist
/// only when q satisfies the congruence.
pub fn known_signatures(t: &FieldTower) -> Vec<KnownSignature> {
    use TransversalConfig::*;
    let mut v = vec![
        known("knuth", FamilyLabel::F5, None, Some(BothContained), None),
        known("generalized-twisted-field", FamilyLabel::F5, None, Some(ExternalPolarPair), None),
        known("scattered-one-transversal-on-quadric", FamilyLabel::F5, None, Some(Mixed), None),
        known("huang-johnson-extension", FamilyLabel::F3, Some((4, 1)), None, None),
        known("f4a-right-nucleus-q2", FamilyLabel::F4a, None, None, Some([3, 2, 1, 1])),
        known("f4a-middle-nucleus-q2", FamilyLabel::F4a, None, None, Some([3, 1, 2, 1])),
    ];
    let mut canon = Vec::new();
    if let Ok(norms) = crate::zoo::s1_norms(t) {
        for (eta, n) in norms {
            canon.push((format!("s1-eta{}", eta.0), n));
        }
    }
    if let Ok((_, n)) = crate::zoo::s2_norm(t) {
        canon.push(("s2".to_string(), n));
    }
    for (name, n) in canon {
        let orbit = frobenius_orbit(t, n);
        // the translation dual has the signature of the original
        for (suffix, nuc) in [("", [3, 2, 1, 1]), ("-transpose", [3, 1, 2, 1])] {
            let mut k = known(&format!("{name}{suffix}"), FamilyLabel::F5, None, Some(ExternalPerpDisjoint), Some(nuc));
            k.signature.norm_orbit = Some(orbit.clone());
            v.push(k);
        }
    }
    v
}

/// {x^(p^k) : 0 ≤ k < 6h} as canonical encodings.
pub fn frobenius_orbit(t: &FieldTower, x: Fe) -> BTreeSet<u32> {
    (0..t.degree() as i64).map(|k| t.frob_p(x, k).0).collect()
}

/// Whether N(λ1)^τ = N(λ2) for some automorphism τ; a false result
/// separates S(λ1, 0, α, 0, σ) from S(λ2, 0, α', 0, σ') up to isotopy.
pub fn norms_in_same_orbit(t: &FieldTower, l1: Fe, l2: Fe) -> Result<bool> {
    if l1.is_zero() || l2.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n2 = t.norm63(l2);
    Ok(frobenius_orbit(t, t.norm63(l1)).contains(&n2.0))
}

/// Frobenius orbits of λ̄² over the scattered D_A parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaClassCount {
    pub orbits: Vec<BTreeSet<u32>>,
    pub count: usize,
    /// (q - 3)/(2h).
    pub bound: f64,
}

pub fn count_da_lower_bound(t: &FieldTower) -> Result<DaClassCount> {
    let q = t.q();
    if q == 3 {
        return Err(Error::FamilyEmpty {
            family: "d-a (scattered)",
            q,
            reason: "every norm from F_27 to F_3 is 1 or -1".into(),
        });
    }
    let mut squares = BTreeSet::new();
    for a in scattered_da_parameters(t) {
        let l = lambda_bar(t, a)?;
        squares.insert(t.mul(l, l));
    }
    let mut orbits: Vec<BTreeSet<u32>> = Vec::new();
    for s in squares {
        if !orbits.iter().any(|o| o.contains(&s.0)) {
            orbits.push(frobenius_orbit(t, s));
        }
    }
    let bound = (q as f64 - 3.0) / (2.0 * t.h() as f64);
    let count = orbits.len();
    if bound > 0.0 && (count as f64) < bound.ceil() {
        return Err(Error::StructureNotFound(format!(
            "{count} orbits, below the bound {bound}"
        )));
    }
    Ok(DaClassCount { orbits, count, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{make_da, make_dab, make_f4a_model, make_s1, DABParams, DAParams, F4aModelParams};

    fn tower(p: u32) -> FieldTower {
        FieldTower::build(p, 1).unwrap()
    }

    fn with_norm(t: &FieldTower, n: i64) -> Fe {
        t.subfield_units(3).into_iter().find(|&a| t.norm3(a) == t.int(n)).unwrap()
    }

    #[test]
    fn da_with_norm_minus_one_is_f4a() {
        let t = tower(5);
        let s = make_da(&t, &DAParams::new(&t, 1, with_norm(&t, -1), None).unwrap()).unwrap();
        let r = classify_spread_set(&t, &s).unwrap();
        assert_eq!(r.family, FamilyLabel::F4a);
        assert_eq!(r.weight_histogram.get(&2), Some(&6));
        assert_eq!(r.f4.unwrap().polar_points, 0);
    }

    #[test]
    fn f4a_model_is_f4a() {
        for p in [3, 5] {
            let t = tower(p);
            let s = make_f4a_model(&t, &F4aModelParams::new(&t, None).unwrap()).unwrap();
            let r = classify_spread_set(&t, &s).unwrap();
            assert_eq!(r.family, FamilyLabel::F4a, "q={p}");
        }
    }

    #[test]
    fn dab_at_q5_is_f3_type_30() {
        let t = tower(5);
        let p = DABParams::new(&t, 1, with_norm(&t, 2), None).unwrap();
        let l = make_dab(&t, &p).unwrap().linear_set(&t);
        let r = classify(&t, &l).unwrap();
        assert_eq!(r.family, FamilyLabel::F3);
        let d = r.f3.unwrap();
        assert!(d.plane.contains(&t, &d.point));
        assert_eq!(f3_type(&t, &l).unwrap(), (3, 0));
    }

    #[test]
    fn dab_at_q7_is_f5_with_perp_point() {
        let t = tower(7);
        let p = DABParams::new(&t, 2, with_norm(&t, 3), None).unwrap();
        let r = classify(&t, &make_dab(&t, &p).unwrap().linear_set(&t)).unwrap();
        let d = r.f5.unwrap();
        assert_eq!(d.config, TransversalConfig::ExternalPerpPoint);
        let xi = p.xi;
        assert_eq!(*d.perp_point.unwrap().coords(), [Fe::ONE, Fe::ZERO, Fe::ZERO, t.neg(xi)]);
    }

    #[test]
    fn scattered_da_and_s1_share_configuration() {
        let t = tower(7);
        let s = make_da(&t, &DAParams::new(&t, 1, with_norm(&t, 2), None).unwrap()).unwrap();
        let r = classify(&t, &s.linear_set(&t)).unwrap();
        assert_eq!(r.f5.unwrap().config, TransversalConfig::ExternalPerpDisjoint);
        let s1 = classify_spread_set(&t, &make_s1(&t).unwrap()).unwrap();
        assert_eq!(s1.f5.as_ref().unwrap().config, TransversalConfig::ExternalPerpDisjoint);
        let sig = Signature::of_report(&t, &s1);
        assert_eq!(sig.nuclei_exponents, Some([3, 2, 1, 1]));
        assert!(known_signatures(&t).iter().any(|k| sig.compatible_with(&k.signature)));
    }

    #[test]
    fn norm_orbit_examples() {
        let t = tower(7);
        let g = t.generator();
        assert!(norms_in_same_orbit(&t, g, g).unwrap());
        assert!(norms_in_same_orbit(&t, g, t.frob_p(g, 1)).unwrap());
        assert_eq!(norms_in_same_orbit(&t, Fe::ZERO, g), Err(Error::ZeroElement));
        // λ̄ ∈ F_7 with λ̄² = 2 against N(λ1) = 5
        let lb = Fe(3);
        assert_eq!(t.mul(lb, lb), Fe(2));
        let l1 = (1..t.order()).map(Fe).find(|&z| t.norm63(z) == Fe(5)).unwrap();
        assert!(!norms_in_same_orbit(&t, lb, l1).unwrap());
        assert!(!norms_in_same_orbit(&t, l1, lb).unwrap());
    }

    #[test]
    fn da_class_counts() {
        let c5 = count_da_lower_bound(&tower(5)).unwrap();
        assert_eq!((c5.count, c5.bound), (1, 1.0));
        assert_eq!(c5.orbits, vec![BTreeSet::from([4])]);
        let c7 = count_da_lower_bound(&tower(7)).unwrap();
        assert_eq!((c7.count, c7.bound), (2, 2.0));
        assert!(matches!(count_da_lower_bound(&tower(3)), Err(Error::FamilyEmpty { .. })));
        let c9 = count_da_lower_bound(&FieldTower::build(3, 2).unwrap()).unwrap();
        assert_eq!(c9.bound, 1.5);
        assert!(c9.count >= 2, "{c9:?}");
    }

    #[test]
    fn known_signatures_are_distinct() {
        for p in [3, 5, 7] {
            let t = tower(p);
            let k = known_signatures(&t);
            for i in 0..k.len() {
                for j in 0..i {
                    assert_ne!(k[i].signature, k[j].signature);
                }
            }
        }
    }
}
