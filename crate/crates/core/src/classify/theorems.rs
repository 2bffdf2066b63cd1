//! Drivers that check the classification statements for D_A and D_AB, and
//! the construction of pseudoregulus-type linear sets, exhaustively at a
//! given q. Each driver returns a structured report of named sub-checks.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, classify_spread_set, frobenius_orbit, known_signatures, norms_in_same_orbit, count_da_lower_bound, ClassificationReport, FamilyLabel, Signature, TransversalConfig};
use crate::error::{Error, Result};
use crate::fieldtower::{Fe, FieldTower, FqMatrix};
use crate::linsets::{build_pseudoregulus_linearset, SemilinearMap};
use crate::projgeom::{model_line_contains, FieldModelPoint, LineProfile, ProjLine, ProjPlane, ProjPoint, Vec4};
use crate::spreadsets::{NucleiProfile, SpreadSet};
use crate::zoo::{
    da_to_canonical, make_da, make_dab, make_f4a_model, resolve_xi, s1_norms, s2_norm, scattered_da_parameters,
    smallest_with_norm63, valid_dab_parameters, DABParams, DAParams, F4aModelParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// L_(ρ,f) is of pseudoregulus type with transversals t1, t2.
    AlgebraicPseudoregulus,
    /// D_A with N(a) = -1 lies in F4(a).
    DaNotNew,
    /// D_A with N(a) ∉ {±1} is scattered and new.
    DaNew,
    /// D_AB with N(b²) = -1 lies in F3 with type (3, 0).
    DabF3,
    /// D_AB with N(b²) ≠ -1 lies in F5 with |t1^⊥ ∩ t2| = 1.
    DabF5,
    /// Transpose and translation dual do not reach known families.
    Derivatives,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::AlgebraicPseudoregulus,
        TheoremId::DaNotNew,
        TheoremId::DaNew,
        TheoremId::DabF3,
        TheoremId::DabF5,
        TheoremId::Derivatives,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::AlgebraicPseudoregulus => "algebraic-pseudoregulus",
            TheoremId::DaNotNew => "da-not-new",
            TheoremId::DaNew => "da-new",
            TheoremId::DabF3 => "dab-f3",
            TheoremId::DabF5 => "dab-f5",
            TheoremId::Derivatives => "derivatives",
        }
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown theorem id {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Random instances for the construction roundtrip.
    pub trials: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { trials: 20, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub evidence: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub params: BTreeMap<String, i64>,
    pub checks: Vec<Check>,
}

impl CaseReport {
    fn new(params: &[(&str, i64)]) -> Self {
        CaseReport {
            label: None,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            checks: Vec::new(),
        }
    }

    fn labelled(label: &str) -> Self {
        CaseReport {
            label: Some(label.to_string()),
            ..Default::default()
        }
    }

    fn check(&mut self, name: &str, pass: bool, evidence: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            evidence: evidence.into(),
        });
    }

    /// Records an error as a failed check.
    fn fail(&mut self, name: &str, e: &Error) {
        self.check(name, false, format!("error: {e}"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub checks: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub p: u32,
    pub h: u32,
    pub q: u64,
    pub modulus: Vec<u32>,
    pub seed: u64,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl TheoremReport {
    fn new(t: &FieldTower, id: TheoremId, cfg: &CheckConfig, cases: Vec<CaseReport>) -> Self {
        let checks = cases.iter().map(|c| c.checks.len()).sum();
        let failed = cases.iter().flat_map(|c| &c.checks).filter(|c| !c.pass).count();
        TheoremReport {
            theorem: id,
            p: t.p(),
            h: t.h(),
            q: t.q(),
            modulus: t.modulus().to_vec(),
            seed: cfg.seed,
            summary: Summary {
                cases: cases.len(),
                checks,
                failed,
                pass: failed == 0 && checks > 0,
            },
            cases,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.pass
    }
}

pub fn verify_theorem(t: &FieldTower, id: TheoremId, cfg: &CheckConfig) -> Result<TheoremReport> {
    let cases = match id {
        TheoremId::AlgebraicPseudoregulus => algebraic_pseudoregulus(t, cfg)?,
        TheoremId::DaNotNew => da_not_new(t)?,
        TheoremId::DaNew => da_new(t)?,
        TheoremId::DabF3 => dab_f3(t)?,
        TheoremId::DabF5 => dab_f5(t)?,
        TheoremId::Derivatives => derivatives(t)?,
    };
    Ok(TheoremReport::new(t, id, cfg, cases))
}

fn inadmissible(t: &FieldTower, reason: impl Into<String>) -> Error {
    Error::Inadmissible {
        q: t.q(),
        reason: reason.into(),
    }
}

fn profile_exponents(t: &FieldTower, n: &NucleiProfile) -> [u32; 4] {
    <[u64; 4]>::from(*n).map(|s| {
        let mut e = 0;
        let mut v = 1;
        while v < s {
            v *= t.q();
            e += 1;
        }
        e
    })
}

fn check_semifield(c: &mut CaseReport, t: &FieldTower, s: &SpreadSet, nuclei: [u32; 4]) {
    let scan = s.verify_no_zero_divisors(t);
    c.check(
        "no-zero-divisors",
        scan.nonsingular,
        format!("{} members scanned, witness {:?}", scan.checked, scan.witness),
    );
    match s.nuclei(t) {
        Ok(n) => c.check(
            "nuclei",
            profile_exponents(t, &n) == nuclei,
            format!("{n}, expected q^{nuclei:?}"),
        ),
        Err(e) => c.fail("nuclei", &e),
    }
}

fn line_from_equations(t: &FieldTower, f1: Vec4, f2: Vec4) -> Result<ProjLine> {
    ProjLine::from_equations(t, &f1, &f2)
}

fn sorted_pair(a: ProjLine, b: ProjLine) -> [ProjLine; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

fn with_r<T: Copy + Send + Sync>(params: &[T]) -> Vec<(u32, T)> {
    [1u32, 2]
        .iter()
        .flat_map(|&r| params.iter().map(move |&x| (r, x)))
        .collect()
}

fn algebraic_pseudoregulus(t: &FieldTower, cfg: &CheckConfig) -> Result<Vec<CaseReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut instances = Vec::with_capacity(cfg.trials);
    while instances.len() < cfg.trials {
        let mut v = || -> Vec4 { std::array::from_fn(|_| t.random_in_subfield(&mut rng, 3)) };
        let (d0, d1, c0, c1) = (v(), v(), v(), v());
        let (Some(t1), Some(t2)) = (ProjLine::span_vecs(t, &d0, &d1), ProjLine::span_vecs(t, &c0, &c1)) else {
            continue;
        };
        if !t1.is_skew(t, &t2) {
            continue;
        }
        let m: [[Fe; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| t.random_in_subfield(&mut rng, 3)));
        if FqMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]).rank(t) != 2 {
            continue;
        }
        let f = SemilinearMap {
            domain: [d0, d1],
            codomain: [c0, c1],
            matrix: m,
            sigma: rng.gen_range(1..=2),
        };
        let rho = t.random_unit_in_subfield(&mut rng, 3);
        instances.push((t1, t2, f, rho));
    }
    Ok(instances
        .par_iter()
        .enumerate()
        .map(|(i, (t1, t2, f, rho))| {
            let mut c = CaseReport::new(&[("trial", i as i64), ("sigma", f.sigma as i64), ("rho", rho.0 as i64)]);
            let l = match build_pseudoregulus_linearset(t, t1, t2, f, *rho) {
                Ok(l) => l,
                Err(e) => {
                    c.fail("construction", &e);
                    return c;
                }
            };
            c.check("scattered", l.is_scattered(t), format!("histogram {:?}", l.point_weights(t).histogram()));
            match l.pseudoregulus(t) {
                Ok(pr) => {
                    c.check(
                        "transversals",
                        pr.transversals == sorted_pair(*t1, *t2),
                        "extracted transversals equal t1, t2",
                    );
                    let joins = f.joining_lines(t);
                    c.check(
                        "pseudoregulus-lines",
                        pr.lines == joins,
                        format!("{} lines, {} joins", pr.lines.len(), joins.len()),
                    );
                }
                Err(e) => c.fail("pseudoregulus", &e),
            }
            c
        })
        .collect())
}

fn params_with_norm(t: &FieldTower, pred: impl Fn(Fe) -> bool) -> Vec<Fe> {
    let mut v: Vec<Fe> = t.subfield_units(3).into_iter().filter(|&a| pred(t.norm3(a))).collect();
    v.sort();
    v
}

fn da_not_new(t: &FieldTower) -> Result<Vec<CaseReport>> {
    let xi = resolve_xi(t, None)?;
    let q = t.q() as usize;
    let params = params_with_norm(t, |n| n == t.minus_one());
    let mut cases: Vec<CaseReport> = with_r(&params)
        .par_iter()
        .map(|&(r, a)| {
            let mut c = CaseReport::new(&[("r", r as i64), ("a", a.0 as i64), ("xi", xi.0 as i64)]);
            let s = match DAParams::new(t, r, a, Some(xi)).and_then(|p| make_da(t, &p)) {
                Ok(s) => s,
                Err(e) => {
                    c.fail("construction", &e);
                    return c;
                }
            };
            check_semifield(&mut c, t, &s, [3, 2, 1, 1]);
            let l = s.linear_set(t);
            let table = l.point_weights(t);
            c.check("not-scattered", table.max_weight() > 1, format!("histogram {:?}", table.histogram()));
            let heavy = table.points_of_weight_at_least(2);
            let all_two = heavy.iter().all(|p| table.get(p) == 2);
            c.check(
                "weight-2-points",
                heavy.len() == q + 1 && all_two,
                format!("{} heavy points, all of weight 2: {all_two}", heavy.len()),
            );
            let lines = l.contained_lines(t);
            let on_line = lines.len() == 1 && heavy.iter().all(|p| lines[0].contains(t, p));
            c.check(
                "contained-line",
                on_line,
                format!("{} contained lines; heavy points on it: {on_line}", lines.len()),
            );
            match classify(t, &l) {
                Ok(r) => c.check(
                    "family",
                    r.family == FamilyLabel::F4a,
                    format!("{}, |l^perp ∩ L| = {:?}", r.family, r.f4.map(|d| d.polar_points)),
                ),
                Err(e) => c.fail("family", &e),
            }
            c
        })
        .collect();

    let mut c = CaseReport::labelled("f4a-representative");
    match F4aModelParams::new(t, None).and_then(|p| Ok((p, make_f4a_model(t, &p)?))) {
        Ok((p, s)) => {
            c.params.insert("s".into(), p.s.0 as i64);
            c.params.insert("b".into(), p.b.0 as i64);
            check_semifield(&mut c, t, &s, [3, 2, 1, 1]);
            match classify_spread_set(t, &s) {
                Ok(r) => {
                    let sig = Signature::of_report(t, &r);
                    let expect = Signature {
                        family: FamilyLabel::F4a,
                        f3_type: None,
                        config: None,
                        nuclei_exponents: Some([3, 2, 1, 1]),
                        norm_orbit: None,
                    };
                    c.check("same-signature", sig == expect, format!("{sig:?}"));
                }
                Err(e) => c.fail("same-signature", &e),
            }
        }
        Err(e) => c.fail("construction", &e),
    }
    cases.push(c);
    Ok(cases)
}

/// t1: X2 = -c·X1, X3 = -ξc·X0 and t2: X1 = d·X2, X0 = (d/ξ)·X3 with
/// c = a^(q^r + 1), d = a^(q^(-r)).
pub fn da_displayed_transversals(t: &FieldTower, p: &DAParams) -> Result<[ProjLine; 2]> {
    let c = t.mul(p.a, t.frob(p.a, p.r as i64));
    let d = t.frob(p.a, -(p.r as i64));
    let z = Fe::ZERO;
    let t1 = line_from_equations(t, [z, c, Fe::ONE, z], [t.mul(p.xi, c), z, z, Fe::ONE])?;
    let t2 = line_from_equations(t, [z, Fe::ONE, t.neg(d), z], [Fe::ONE, z, z, t.neg(t.div(d, p.xi))])?;
    Ok([t1, t2])
}

/// t1: X2 = b^(-2q^(-r))·X1, X3 = ξX0 and t2: b^(-2q^r)·X2 = -b²·X1,
/// X3 = -ξX0.
pub fn dab_displayed_transversals(t: &FieldTower, p: &DABParams) -> Result<[ProjLine; 2]> {
    let r = p.r as i64;
    let b2 = t.mul(p.b, p.b);
    let e1 = t.inv(t.frob(b2, -r));
    let e2 = t.inv(t.frob(b2, r));
    let z = Fe::ZERO;
    let t1 = line_from_equations(t, [z, t.neg(e1), Fe::ONE, z], [t.neg(p.xi), z, z, Fe::ONE])?;
    let t2 = line_from_equations(t, [z, b2, e2, z], [p.xi, z, z, Fe::ONE])?;
    Ok([t1, t2])
}

fn model_line_holds(t: &FieldTower, tr: &crate::zoo::CanonicalTransport, line: &ProjLine, lambda: Option<Fe>) -> bool {
    line.points(t).iter().all(|pt| {
        let (x, y) = tr.map_vec(t, pt.coords());
        model_line_contains(t, lambda, &FieldModelPoint::new(t, x, y).unwrap())
    })
}

fn da_new(t: &FieldTower) -> Result<Vec<CaseReport>> {
    let params = scattered_da_parameters(t);
    if params.is_empty() {
        return Err(inadmissible(t, "no a with N(a) outside {1, -1}"));
    }
    let xi = resolve_xi(t, None)?;
    let mut cases: Vec<CaseReport> = with_r(&params)
        .par_iter()
        .map(|&(r, a)| {
            let mut c = CaseReport::new(&[("r", r as i64), ("a", a.0 as i64), ("xi", xi.0 as i64)]);
            let run = |c: &mut CaseReport| -> Result<()> {
                let p = DAParams::new(t, r, a, Some(xi))?;
                let l = make_da(t, &p)?.linear_set(t);
                c.check("scattered", l.is_scattered(t), format!("histogram {:?}", l.point_weights(t).histogram()));
                let shown = da_displayed_transversals(t, &p)?;
                let rep = classify(t, &l)?;
                let f5 = rep.f5.ok_or_else(|| Error::StructureNotFound(format!("classified as {}", rep.family)))?;
                c.check(
                    "transversal-equations",
                    f5.transversals == sorted_pair(shown[0], shown[1]),
                    "pseudoregulus transversals against the displayed t1, t2",
                );
                c.check(
                    "transversals-external",
                    f5.profiles == [LineProfile::External; 2],
                    format!("{:?}", f5.profiles),
                );
                c.check(
                    "perp-disjoint",
                    shown[0].polar(t).is_skew(t, &shown[1]) && f5.config == TransversalConfig::ExternalPerpDisjoint,
                    format!("configuration {}", f5.config),
                );
                let tr = da_to_canonical(t, &p)?;
                let n = t.norm3(a);
                let formula = t.div(t.sub(n, Fe::ONE), t.add(n, Fe::ONE));
                c.check(
                    "lambda-bar",
                    tr.lambda_bar == formula && !tr.lambda_bar.is_zero(),
                    format!("N(a) = {n}, lambda-bar = {}", tr.lambda_bar),
                );
                c.check(
                    "t1-to-l",
                    model_line_holds(t, &tr, &shown[0], None),
                    "every point of t1 maps into {(y, 0)}",
                );
                c.check(
                    "t2-to-l-lambda",
                    model_line_holds(t, &tr, &shown[1], Some(tr.lambda_bar)),
                    "every point of t2 maps into {(lambda-bar y, y)}",
                );
                c.check("image-scattered", tr.linear_set.is_scattered(t), "transported set is scattered");
                Ok(())
            };
            if let Err(e) = run(&mut c) {
                c.fail("pipeline", &e);
            }
            c
        })
        .collect();

    let mut g = CaseReport::labelled("class-count");
    match count_da_lower_bound(t) {
        Ok(cnt) => {
            g.check(
                "orbit-count",
                cnt.count as f64 >= cnt.bound,
                format!("{} Frobenius orbits of lambda-bar^2 {:?}, bound (q-3)/2h = {}", cnt.count, cnt.orbits, cnt.bound),
            );
            if let Ok(norms) = s1_norms(t) {
                let mut all_false = true;
                let mut ev = Vec::new();
                for (eta, n) in norms {
                    let l1 = smallest_with_norm63(t, n)?;
                    for o in &cnt.orbits {
                        let lb2 = Fe(*o.iter().next().unwrap());
                        let lb = t.sqrt(lb2).ok_or(Error::StructureNotFound("lambda-bar^2 without root".into()))?;
                        let r = norms_in_same_orbit(t, lb, l1)?;
                        all_false &= !r;
                        ev.push(format!("eta={} N={} vs {:?}: {}", eta.0, n.0, o, r));
                    }
                }
                g.check("s1-excluded", all_false, ev.join("; "));
            }
        }
        Err(e) => g.fail("orbit-count", &e),
    }
    cases.push(g);
    Ok(cases)
}

fn dab_cases(t: &FieldTower, minus_one: bool) -> Result<Vec<(u32, Fe)>> {
    if t.q() == 3 {
        return Err(inadmissible(t, "D_AB is empty at q = 3"));
    }
    let params: Vec<Fe> = valid_dab_parameters(t)
        .into_iter()
        .filter(|&b| (t.norm3(t.mul(b, b)) == t.minus_one()) == minus_one)
        .collect();
    if params.is_empty() {
        let what = if minus_one { "=" } else { "!=" };
        return Err(inadmissible(t, format!("no valid b with N(b^2) {what} -1 at q={}", t.q())));
    }
    Ok(with_r(&params))
}

fn dab_f3(t: &FieldTower) -> Result<Vec<CaseReport>> {
    let xi = resolve_xi(t, None)?;
    let known = known_signatures(t);
    Ok(dab_cases(t, true)?
        .par_iter()
        .map(|&(r, b)| {
            let mut c = CaseReport::new(&[("r", r as i64), ("b", b.0 as i64), ("xi", xi.0 as i64)]);
            let run = |c: &mut CaseReport| -> Result<()> {
                let p = DABParams::new(t, r, b, Some(xi))?;
                let l = make_dab(t, &p)?.linear_set(t);
                let table = l.point_weights(t);
                let heavy = table.points_of_weight_at_least(2);
                c.check(
                    "unique-weight-2-point",
                    heavy.len() == 1 && table.get(&heavy[0]) == 2,
                    format!("histogram {:?}", table.histogram()),
                );
                let pt = heavy.first().copied().ok_or(Error::StructureNotFound("no heavy point".into()))?;
                let v = pt.coords();
                let am = crate::linmaps::QLinearMap::a_map(t, t.mul(b, b), r)?;
                let shape = v[0].is_zero()
                    && v[3].is_zero()
                    && t.subfield_units(3).into_iter().any(|y| {
                        ProjPoint::from_vec(t, &[Fe::ZERO, y, am.apply(t, y), Fe::ZERO]) == Some(pt)
                    });
                c.check("point-shape", shape, format!("P = {:?}", v.map(|x| x.0)));
                let s_line = line_from_equations(t, [Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ZERO], [Fe::ZERO, Fe::ZERO, Fe::ONE, Fe::ZERO])?;
                let plane = l.find_weight5_plane(t)?;
                let expect = s_line.join_point(t, &pt)?;
                c.check(
                    "weight-5-plane",
                    plane == expect && l.weight_of_plane(t, &plane) == 5,
                    format!("pi = {:?}", plane.functional().map(|x| x.0)),
                );
                let pp: ProjPlane = pt.polar(t);
                let in_pp: Vec<&ProjPoint> = table.points().filter(|x| pp.contains(t, x)).collect();
                let in_s: Vec<&ProjPoint> = table.points().filter(|x| s_line.contains(t, x)).collect();
                c.check(
                    "polar-plane-meets-in-s",
                    in_pp == in_s,
                    format!("|L ∩ P^perp| = {}, |L ∩ s| = {}", in_pp.len(), in_s.len()),
                );
                let rep = classify(t, &l)?;
                let tp = rep.f3.as_ref().and_then(|d| d.type_pair);
                c.check("type", rep.family == FamilyLabel::F3 && tp == Some((3, 0)), format!("{} {:?}", rep.family, tp));
                let sig = Signature::of_report(t, &rep);
                let clash: Vec<&str> = known
                    .iter()
                    .filter(|k| sig.compatible_with(&k.signature))
                    .map(|k| k.name.as_str())
                    .collect();
                c.check("new-signature", clash.is_empty(), format!("compatible known families: {clash:?}"));
                Ok(())
            };
            if let Err(e) = run(&mut c) {
                c.fail("pipeline", &e);
            }
            c
        })
        .collect())
}

fn dab_f5(t: &FieldTower) -> Result<Vec<CaseReport>> {
    let xi = resolve_xi(t, None)?;
    let known = known_signatures(t);
    Ok(dab_cases(t, false)?
        .par_iter()
        .map(|&(r, b)| {
            let mut c = CaseReport::new(&[("r", r as i64), ("b", b.0 as i64), ("xi", xi.0 as i64)]);
            let run = |c: &mut CaseReport| -> Result<()> {
                let p = DABParams::new(t, r, b, Some(xi))?;
                let l = make_dab(t, &p)?.linear_set(t);
                c.check("scattered", l.is_scattered(t), format!("histogram {:?}", l.point_weights(t).histogram()));
                let shown = dab_displayed_transversals(t, &p)?;
                let rep = classify(t, &l)?;
                let f5 = rep.f5.clone().ok_or_else(|| Error::StructureNotFound(format!("classified as {}", rep.family)))?;
                c.check(
                    "transversal-equations",
                    f5.transversals == sorted_pair(shown[0], shown[1]),
                    "pseudoregulus transversals against the displayed t1, t2",
                );
                c.check(
                    "transversals-external",
                    f5.profiles == [LineProfile::External; 2],
                    format!("{:?}", f5.profiles),
                );
                let expect = ProjPoint::new(t, [Fe::ONE, Fe::ZERO, Fe::ZERO, t.neg(xi)])?;
                let meet = shown[0].polar(t).meet(t, &shown[1]);
                c.check(
                    "perp-point",
                    meet == crate::projgeom::Meet::Point(expect) && f5.perp_point == Some(expect),
                    format!("t1^perp ∩ t2 = {meet:?}"),
                );
                let sig = Signature::of_report(t, &rep);
                let clash: Vec<&str> = known
                    .iter()
                    .filter(|k| sig.compatible_with(&k.signature))
                    .map(|k| k.name.as_str())
                    .collect();
                c.check("new-signature", clash.is_empty(), format!("compatible known families: {clash:?}"));
                Ok(())
            };
            if let Err(e) = run(&mut c) {
                c.fail("pipeline", &e);
            }
            c
        })
        .collect())
}

/// Norms N(λ_i) and N(λ_i^(q^3)) of the known canonical examples at this q.
fn known_canonical_lambdas(t: &FieldTower) -> Result<Vec<(String, Fe)>> {
    let mut out = Vec::new();
    let mut add = |name: String, n: Fe| -> Result<()> {
        let l = smallest_with_norm63(t, n)?;
        out.push((name.clone(), l));
        out.push((format!("{name}-translation-dual"), t.frob(l, 3)));
        Ok(())
    };
    if let Ok(norms) = s1_norms(t) {
        for (eta, n) in norms {
            add(format!("s1-eta{}", eta.0), n)?;
        }
    }
    if let Ok((_, n)) = s2_norm(t) {
        add("s2".into(), n)?;
    }
    Ok(out)
}

fn derivative_checks(
    c: &mut CaseReport,
    t: &FieldTower,
    s: &SpreadSet,
    base: &ClassificationReport,
    orbit: Option<std::collections::BTreeSet<u32>>,
) -> Result<()> {
    let known = known_signatures(t);
    let tt = s.transpose().transpose();
    c.check("transpose-involution", tt.basis() == s.basis(), "transpose twice returns the basis");
    let dual = s.translation_dual(t)?;
    c.check(
        "dual-involution",
        dual.translation_dual(t)?.same_span(t, s),
        "translation dual twice spans the original space",
    );
    let n = base.nuclei.expect("nuclei computed");
    let tr = classify_spread_set(t, &s.transpose())?;
    let dr = classify_spread_set(t, &dual)?;
    let tn = tr.nuclei.unwrap();
    let dn = dr.nuclei.unwrap();
    c.check(
        "transpose-swaps-nuclei",
        tn.left == n.left && tn.right == n.middle && tn.middle == n.right && tn.center == n.center,
        format!("{n} -> {tn}"),
    );
    c.check("dual-keeps-nuclei", dn == n, format!("{n} -> {dn}"));
    for (name, rep) in [("transpose", &tr), ("translation-dual", &dr)] {
        let mut sig = Signature::of_report(t, rep);
        if let Some(o) = &orbit {
            sig = sig.with_norm_orbit(o.clone());
        }
        let base_sig = Signature::of_report(t, base);
        let same_geometry = sig.family == base_sig.family && sig.f3_type == base_sig.f3_type && sig.config == base_sig.config;
        c.check(
            &format!("{name}-geometry"),
            same_geometry,
            format!("{} {:?} {:?}", sig.family, sig.f3_type, sig.config),
        );
        let clash: Vec<&str> = known
            .iter()
            .filter(|k| sig.compatible_with(&k.signature))
            .map(|k| k.name.as_str())
            .collect();
        c.check(&format!("{name}-new-signature"), clash.is_empty(), format!("compatible known families: {clash:?}"));
    }
    Ok(())
}

fn derivatives(t: &FieldTower) -> Result<Vec<CaseReport>> {
    if t.q() == 3 {
        return Err(inadmissible(t, "neither scattered D_A nor D_AB exists at q = 3"));
    }
    let xi = resolve_xi(t, None)?;
    let canon = known_canonical_lambdas(t)?;
    let mut jobs: Vec<(&str, u32, Fe)> = with_r(&scattered_da_parameters(t))
        .into_iter()
        .map(|(r, a)| ("d-a", r, a))
        .collect();
    jobs.extend(with_r(&valid_dab_parameters(t)).into_iter().map(|(r, b)| ("d-ab", r, b)));
    Ok(jobs
        .par_iter()
        .map(|&(family, r, x)| {
            let key = if family == "d-a" { "a" } else { "b" };
            let mut c = CaseReport::new(&[("r", r as i64), (key, x.0 as i64), ("xi", xi.0 as i64)]);
            c.label = Some(family.to_string());
            let run = |c: &mut CaseReport| -> Result<()> {
                let (s, orbit) = if family == "d-a" {
                    let p = DAParams::new(t, r, x, Some(xi))?;
                    let lb = crate::zoo::lambda_bar(t, x)?;
                    let orbit = frobenius_orbit(t, t.mul(lb, lb));
                    let mut ev = Vec::new();
                    let mut none = true;
                    for (name, l) in &canon {
                        let hit = norms_in_same_orbit(t, lb, *l)?;
                        none &= !hit;
                        ev.push(format!("{name}: {hit}"));
                    }
                    if canon.is_empty() {
                        ev.push("no S1/S2 example at this q".into());
                    }
                    c.check("norm-test-against-known", none, ev.join("; "));
                    (make_da(t, &p)?, Some(orbit))
                } else {
                    (make_dab(t, &DABParams::new(t, r, x, Some(xi))?)?, None)
                };
                let base = classify_spread_set(t, &s)?;
                derivative_checks(c, t, &s, &base, orbit)
            };
            if let Err(e) = run(&mut c) {
                c.fail("pipeline", &e);
            }
            c
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(p: u32, id: TheoremId) -> TheoremReport {
        let t = FieldTower::build(p, 1).unwrap();
        verify_theorem(&t, id, &CheckConfig { trials: 5, seed: 1 }).unwrap()
    }

    fn failures(r: &TheoremReport) -> Vec<String> {
        r.cases
            .iter()
            .flat_map(|c| c.checks.iter().filter(|k| !k.pass).map(move |k| format!("{:?} {}: {}", c.params, k.name, k.evidence)))
            .take(5)
            .collect()
    }

    #[test]
    fn ids_roundtrip() {
        for id in TheoremId::ALL {
            assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
        }
        assert!("3.2".parse::<TheoremId>().is_err());
    }

    #[test]
    fn da_not_new_at_q3() {
        let r = run(3, TheoremId::DaNotNew);
        assert!(r.passed(), "{:?}", failures(&r));
        assert_eq!(r.summary.cases, 2 * 13 + 1);
    }

    #[test]
    fn da_new_at_q5() {
        let r = run(5, TheoremId::DaNew);
        assert!(r.passed(), "{:?}", failures(&r));
    }

    #[test]
    fn dab_at_q5() {
        let r = run(5, TheoremId::DabF3);
        assert!(r.passed(), "{:?}", failures(&r));
        let t = FieldTower::build(5, 1).unwrap();
        assert!(matches!(
            verify_theorem(&t, TheoremId::DabF5, &CheckConfig::default()),
            Err(Error::Inadmissible { q: 5, .. })
        ));
    }

    #[test]
    fn roundtrip_at_q3() {
        let r = run(3, TheoremId::AlgebraicPseudoregulus);
        assert!(r.passed(), "{:?}", failures(&r));
        assert_eq!(r.summary.cases, 5);
    }

    #[test]
    fn derivatives_at_q5() {
        let r = run(5, TheoremId::Derivatives);
        assert!(r.passed(), "{:?}", failures(&r));
    }
}
