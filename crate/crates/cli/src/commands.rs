use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use sfz_core::classify::theorems::{verify_theorem, CheckConfig, TheoremReport};
use sfz_core::classify::{
    classify_spread_set, frobenius_orbit, known_signatures, ClassificationReport, FamilyLabel, Signature,
    TransversalConfig,
};
use sfz_core::spreadsets::{NonsingularityReport, NucleiProfile, SpreadSet};
use sfz_core::zoo::{
    lambda_bar, make_canonical, make_da, make_dab, make_f4a_model, make_s1, make_s2, s1_norms, s2_norm,
    scattered_da_parameters, valid_dab_parameters, CanonicalParams, DABParams, DAParams,
    F4aModelParams,
};
use sfz_core::{Error, Fe, FieldTower};

use crate::params::{element, load_tower, optional_element, required, theorem_id};
use crate::render::{cell, emit, Report, Table};
use crate::{CacheAction, DeriveOp, Failure, Family, FamilyArgs, FieldArgs, GlobalOpts, SurveyFamily};

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub p: u32,
    pub h: u32,
    pub q: u64,
    pub modulus: Vec<u32>,
    pub seed: u64,
}

impl Header {
    fn new(t: &FieldTower, g: &GlobalOpts) -> Self {
        Header {
            p: t.p(),
            h: t.h(),
            q: t.q(),
            modulus: t.modulus().to_vec(),
            seed: g.seed,
        }
    }
}

#[derive(Serialize)]
struct TowerReport {
    #[serde(flatten)]
    header: Header,
    degree: u32,
    order: u32,
    generator: u32,
    /// Generators of F_(q^k)^* for k = 1, 2, 3.
    subfield_generators: BTreeMap<u32, u32>,
    smallest_nonsquare: u32,
    fq_basis_of_cubic: [u32; 3],
}

impl Report for TowerReport {}

pub fn tower(g: &GlobalOpts, f: &FieldArgs) -> Result<(), Failure> {
    let t = load_tower(g, f)?;
    let report = TowerReport {
        header: Header::new(&t, g),
        degree: t.degree(),
        order: t.order(),
        generator: t.generator().0,
        subfield_generators: [1, 2, 3].into_iter().map(|k| (k, t.subfield_generator(k).0)).collect(),
        smallest_nonsquare: t.smallest_nonsquare().0,
        fq_basis_of_cubic: t.fq3_basis().map(|b| b.0),
    };
    emit(g, &report)
}

fn compatible_known(t: &FieldTower, sig: &Signature) -> Vec<String> {
    known_signatures(t)
        .into_iter()
        .filter(|k| sig.compatible_with(&k.signature))
        .map(|k| k.name)
        .collect()
}

#[derive(Serialize)]
struct Analysis {
    nonsingular: NonsingularityReport,
    nuclei: Option<NucleiProfile>,
    classification: ClassificationReport,
    signature: Signature,
    /// Known families whose recorded invariants do not separate this one.
    compatible_known: Vec<String>,
}

fn analyse(t: &FieldTower, s: &SpreadSet) -> Result<Analysis, Failure> {
    let nonsingular = s.verify_no_zero_divisors(t);
    if !nonsingular.nonsingular {
        return Err(Failure::usage(
            Error::ZeroDivisors.code(),
            format!("spread set has a singular member, coefficients {:?}", nonsingular.witness),
        ));
    }
    let classification = classify_spread_set(t, s)?;
    let signature = Signature::of_report(t, &classification);
    Ok(Analysis {
        nonsingular,
        nuclei: classification.nuclei,
        compatible_known: compatible_known(t, &signature),
        signature,
        classification,
    })
}

#[derive(Serialize)]
struct ConstructReport {
    #[serde(flatten)]
    header: Header,
    family: String,
    params: BTreeMap<String, i64>,
    spread_set: SpreadSet,
    #[serde(flatten)]
    analysis: Analysis,
}

impl Report for ConstructReport {
    fn text(&self) -> Option<String> {
        let c = &self.analysis.classification;
        let mut s = format!("{} at q = {}: {:?}\n", self.family, self.header.q, self.params);
        s += &format!("nuclei {}\n", self.analysis.nuclei.map(|n| n.to_string()).unwrap_or_default());
        s += &format!("family {}", c.family);
        if let Some(tp) = c.f3.as_ref().and_then(|d| d.type_pair) {
            s += &format!(" type {tp:?}");
        }
        if let Some(d) = &c.f5 {
            s += &format!(" {}", d.config);
        }
        s += &format!("\ncompatible known families: {:?}\n", self.analysis.compatible_known);
        Some(s)
    }
}

fn int(x: Fe) -> i64 {
    x.0 as i64
}

fn build(t: &FieldTower, family: Family, a: &FamilyArgs) -> Result<(SpreadSet, BTreeMap<String, i64>), Failure> {
    let xi = optional_element(t, "xi", &a.xi, 1)?;
    let mut extra = BTreeMap::new();
    let s = match family {
        Family::DA => {
            let v = match a.a.as_deref() {
                None | Some("auto") => scattered_da_parameters(t)
                    .first()
                    .copied()
                    .or_else(|| t.subfield_units(3).into_iter().find(|&x| t.norm3(x) != Fe::ONE))
                    .expect("F_(q^3) has elements of norm other than 1"),
                Some(raw) => element(t, "a", raw, 3)?,
            };
            let p = DAParams::new(t, a.r, v, xi)?;
            extra.insert("norm_a".into(), int(t.norm3(v)));
            if let Ok(lb) = lambda_bar(t, v) {
                extra.insert("lambda_bar".into(), int(lb));
            }
            make_da(t, &p)?
        }
        Family::DAB => {
            let v = match a.b.as_deref() {
                None | Some("auto") => *valid_dab_parameters(t).first().ok_or(Error::FamilyEmpty {
                    family: "d-ab",
                    q: t.q(),
                    reason: "no b with N(b) outside {1, -1}".into(),
                })?,
                Some(raw) => element(t, "b", raw, 3)?,
            };
            let p = DABParams::new(t, a.r, v, xi)?;
            extra.insert("norm_b".into(), int(t.norm3(v)));
            extra.insert("norm_b_squared".into(), int(t.norm3(t.mul(v, v))));
            make_dab(t, &p)?
        }
        Family::F4aModel => {
            let s = optional_element(t, "s", &a.s, 1)?;
            make_f4a_model(t, &F4aModelParams::new(t, s)?)?
        }
        Family::S1 => {
            let s = make_s1(t)?;
            let (eta, n) = s1_norms(t)?[0];
            extra.insert("eta".into(), int(eta));
            extra.insert("norm_lambda".into(), int(n));
            s
        }
        Family::S2 => {
            let s = make_s2(t)?;
            extra.insert("norm_lambda".into(), int(s2_norm(t)?.1));
            s
        }
        Family::Canonical => {
            let lambda = element(t, "lambda", required(&a.lambda, "lambda")?, 6)?;
            let alpha = element(t, "alpha", required(&a.alpha, "alpha")?, 6)?;
            let p = CanonicalParams::new(t, lambda, alpha, a.sigma)?;
            extra.insert("norm_lambda".into(), int(t.norm63(lambda)));
            make_canonical(t, &p)?
        }
    };
    let mut params = s.provenance().map(|p| p.params.clone()).unwrap_or_default();
    params.extend(extra);
    Ok((s, params))
}

pub fn construct(g: &GlobalOpts, family: Family, a: &FamilyArgs) -> Result<(), Failure> {
    let t = load_tower(g, &a.field)?;
    let (s, params) = build(&t, family, a)?;
    let analysis = analyse(&t, &s)?;
    let report = ConstructReport {
        header: Header::new(&t, g),
        family: s.provenance().map(|p| p.family.clone()).unwrap_or_default(),
        params,
        spread_set: s,
        analysis,
    };
    emit(g, &report)
}

#[derive(Clone, Debug, Default, Serialize)]
struct SurveyRow {
    r: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<u32>,
    norm: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm_squared: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_bar: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_bar_squared: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilyLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f3_type: Option<(u8, u8)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<TransversalConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nuclei: Option<NucleiProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct SignatureCount {
    signature: Signature,
    rows: usize,
}

#[derive(Serialize)]
struct SurveySummary {
    rows: usize,
    errors: usize,
    families: BTreeMap<String, usize>,
    signatures: Vec<SignatureCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_bar_squared_orbits: Option<Vec<BTreeSet<u32>>>,
}

#[derive(Serialize)]
struct SurveyReport {
    #[serde(flatten)]
    header: Header,
    family: String,
    rows: Vec<SurveyRow>,
    summary: SurveySummary,
}

const SURVEY_COLUMNS: [&str; 13] = [
    "r", "a", "b", "norm", "norm_squared", "lambda_bar", "lambda_bar_squared", "family", "f3_type", "config", "nuclei",
    "error", "q",
];

impl Report for SurveyReport {
    fn table(&self) -> Option<Table> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let v = serde_json::to_value(r).unwrap();
                SURVEY_COLUMNS
                    .iter()
                    .map(|&c| match c {
                        "q" => self.header.q.to_string(),
                        c => v.get(c).map(cell).unwrap_or_default(),
                    })
                    .collect()
            })
            .collect();
        Some(Table {
            header: SURVEY_COLUMNS.iter().map(|s| s.to_string()).collect(),
            rows,
        })
    }

    fn text(&self) -> Option<String> {
        let s = &self.summary;
        let mut out = format!(
            "{} at q = {}: {} rows, {} errors\nfamilies {:?}\n",
            self.family, self.header.q, s.rows, s.errors, s.families
        );
        for c in &s.signatures {
            out += &format!("{:>6} rows  {}\n", c.rows, serde_json::to_string(&c.signature).unwrap());
        }
        if let Some(o) = &s.lambda_bar_squared_orbits {
            out += &format!("lambda-bar^2 Frobenius orbits: {} {:?}\n", o.len(), o);
        }
        Some(out)
    }
}

fn survey_row(t: &FieldTower, family: SurveyFamily, r: u32, x: Fe) -> SurveyRow {
    let mut row = SurveyRow {
        r,
        norm: t.norm3(x).0,
        ..Default::default()
    };
    let built = match family {
        SurveyFamily::DA => {
            row.a = Some(x.0);
            if let Ok(lb) = lambda_bar(t, x) {
                row.lambda_bar = Some(lb.0);
                row.lambda_bar_squared = Some(t.mul(lb, lb).0);
            }
            DAParams::new(t, r, x, None).and_then(|p| make_da(t, &p))
        }
        SurveyFamily::DAB => {
            row.b = Some(x.0);
            row.norm_squared = Some(t.norm3(t.mul(x, x)).0);
            DABParams::new(t, r, x, None).and_then(|p| make_dab(t, &p))
        }
    };
    match built.and_then(|s| classify_spread_set(t, &s)) {
        Ok(c) => {
            row.family = Some(c.family);
            row.f3_type = c.f3.and_then(|d| d.type_pair);
            row.config = c.f5.map(|d| d.config);
            row.nuclei = c.nuclei;
        }
        Err(e) => row.error = Some(e.code().to_string()),
    }
    row
}

pub fn survey(g: &GlobalOpts, family: SurveyFamily, f: &FieldArgs) -> Result<(), Failure> {
    let t = load_tower(g, f)?;
    let mut params: Vec<Fe> = t.subfield_units(3);
    params.sort();
    let jobs: Vec<(Fe, u32)> = params.iter().flat_map(|&x| [(x, 1), (x, 2)]).collect();
    let rows: Vec<SurveyRow> = jobs.par_iter().map(|&(x, r)| survey_row(&t, family, r, x)).collect();

    let mut families = BTreeMap::new();
    let mut sigs: Vec<SignatureCount> = Vec::new();
    for row in rows.iter().filter(|r| r.error.is_none()) {
        *families.entry(row.family.unwrap().to_string()).or_insert(0) += 1;
        let sig = Signature {
            family: row.family.unwrap(),
            f3_type: row.f3_type,
            config: row.config,
            nuclei_exponents: row.nuclei.map(|n| {
                <[u64; 4]>::from(n).map(|s| (0..=6).find(|&e| t.q().pow(e) == s).unwrap_or(0))
            }),
            norm_orbit: None,
        };
        match sigs.iter_mut().find(|c| c.signature == sig) {
            Some(c) => c.rows += 1,
            None => sigs.push(SignatureCount { signature: sig, rows: 1 }),
        }
    }
    let orbits = (family == SurveyFamily::DA).then(|| {
        let squares: BTreeSet<u32> = rows.iter().filter(|r| r.error.is_none()).filter_map(|r| r.lambda_bar_squared).collect();
        let mut orbits: Vec<BTreeSet<u32>> = Vec::new();
        for s in squares {
            if !orbits.iter().any(|o| o.contains(&s)) {
                orbits.push(frobenius_orbit(&t, Fe(s)));
            }
        }
        orbits
    });
    let report = SurveyReport {
        header: Header::new(&t, g),
        family: match family {
            SurveyFamily::DA => "d-a",
            SurveyFamily::DAB => "d-ab",
        }
        .into(),
        summary: SurveySummary {
            rows: rows.len(),
            errors: rows.iter().filter(|r| r.error.is_some()).count(),
            families,
            signatures: sigs,
            lambda_bar_squared_orbits: orbits,
        },
        rows,
    };
    emit(g, &report)
}

struct CheckOutput(TheoremReport);

impl Serialize for CheckOutput {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Report for CheckOutput {
    fn table(&self) -> Option<Table> {
        let r = &self.0;
        let header = ["theorem", "q", "case", "label", "params", "check", "pass", "evidence"];
        let mut rows = Vec::new();
        for (i, c) in r.cases.iter().enumerate() {
            for k in &c.checks {
                rows.push(vec![
                    r.theorem.as_str().to_string(),
                    r.q.to_string(),
                    i.to_string(),
                    c.label.clone().unwrap_or_default(),
                    serde_json::to_string(&c.params).unwrap(),
                    k.name.clone(),
                    k.pass.to_string(),
                    k.evidence.clone(),
                ]);
            }
        }
        Some(Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        })
    }

    fn text(&self) -> Option<String> {
        let r = &self.0;
        let s = &r.summary;
        let mut out = format!(
            "{} {} at q = {}: {} cases, {} checks, {} failed\n",
            if s.pass { "PASS" } else { "FAIL" },
            r.theorem.as_str(),
            r.q,
            s.cases,
            s.checks,
            s.failed
        );
        for c in &r.cases {
            for k in c.checks.iter().filter(|k| !k.pass) {
                out += &format!("  {:?} {}: {}\n", c.params, k.name, k.evidence);
            }
        }
        Some(out)
    }
}

pub fn check(g: &GlobalOpts, theorem: &str, f: &FieldArgs, trials: usize) -> Result<(), Failure> {
    let id = theorem_id(theorem)?;
    let t = load_tower(g, f)?;
    let report = verify_theorem(&t, id, &CheckConfig { trials, seed: g.seed })?;
    let pass = report.passed();
    emit(g, &CheckOutput(report))?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn read_input(path: &Path) -> Result<Value, Failure> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|s| text = s)
    };
    res.map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage("malformed-input", e.to_string()))
}

/// Accepts a construct/classify report (`spread_set`), a derive report
/// (`output.spread_set`), each with a (p, h, modulus) header, or a bare
/// spread set with --p/--h.
fn load_spread_set(g: &GlobalOpts, input: &Path, p: Option<u32>, h: Option<u32>) -> Result<(FieldTower, SpreadSet), Failure> {
    let v = read_input(input)?;
    let field = |k: &str| v.get(k).and_then(Value::as_u64).map(|x| x as u32);
    let p = p.or_else(|| field("p")).ok_or_else(|| Failure::usage("malformed-input", "no p in input; pass --p"))?;
    let h = h.or_else(|| field("h")).unwrap_or(1);
    let t = load_tower(g, &FieldArgs { p, h })?;
    if let Some(m) = v.get("modulus") {
        if m != &serde_json::to_value(t.modulus()).unwrap() {
            return Err(Failure::usage(
                "modulus-mismatch",
                format!("input was encoded with modulus {m}, this tower uses {:?}", t.modulus()),
            ));
        }
    }
    let raw = v
        .get("spread_set")
        .or_else(|| v.get("output").and_then(|o| o.get("spread_set")))
        .unwrap_or(&v)
        .clone();
    let s: SpreadSet = serde_json::from_value(raw).map_err(|e| Failure::usage("malformed-input", e.to_string()))?;
    if s.basis().iter().flatten().any(|x| x.0 >= t.order()) {
        return Err(Failure::usage("malformed-input", "matrix entry outside the field"));
    }
    let s = SpreadSet::new(&t, s.basis().to_vec(), s.provenance().cloned())?;
    Ok((t, s))
}

#[derive(Serialize)]
struct Side {
    spread_set: SpreadSet,
    #[serde(flatten)]
    analysis: Analysis,
}

#[derive(Serialize)]
struct DeriveReport {
    #[serde(flatten)]
    header: Header,
    op: String,
    input: Side,
    output: Side,
    /// Signature fields that differ between input and output.
    changed: Vec<String>,
}

impl Report for DeriveReport {
    fn text(&self) -> Option<String> {
        let show = |s: &Side| {
            format!(
                "{} nuclei {}",
                serde_json::to_string(&s.analysis.signature).unwrap(),
                s.analysis.nuclei.map(|n| n.to_string()).unwrap_or_default()
            )
        };
        Some(format!(
            "{} at q = {}\n  before {}\n  after  {}\n  changed {:?}\n",
            self.op,
            self.header.q,
            show(&self.input),
            show(&self.output),
            self.changed
        ))
    }
}

fn signature_diff(a: &Signature, b: &Signature) -> Vec<String> {
    let (va, vb) = (serde_json::to_value(a).unwrap(), serde_json::to_value(b).unwrap());
    let keys: BTreeSet<&String> = va.as_object().unwrap().keys().chain(vb.as_object().unwrap().keys()).collect();
    keys.into_iter().filter(|k| va.get(*k) != vb.get(*k)).cloned().collect()
}

pub fn derive(g: &GlobalOpts, op: DeriveOp, input: &Path, p: Option<u32>, h: Option<u32>) -> Result<(), Failure> {
    let (t, s) = load_spread_set(g, input, p, h)?;
    let before = analyse(&t, &s)?;
    let (name, d) = match op {
        DeriveOp::Transpose => ("transpose", s.transpose()),
        DeriveOp::TranslationDual => ("translation-dual", s.translation_dual(&t)?),
    };
    let after = analyse(&t, &d)?;
    let report = DeriveReport {
        header: Header::new(&t, g),
        op: name.into(),
        changed: signature_diff(&before.signature, &after.signature),
        input: Side { spread_set: s, analysis: before },
        output: Side { spread_set: d, analysis: after },
    };
    emit(g, &report)
}

#[derive(Serialize)]
struct ClassifyReport {
    #[serde(flatten)]
    header: Header,
    spread_set: SpreadSet,
    #[serde(flatten)]
    analysis: Analysis,
}

impl Report for ClassifyReport {}

pub fn classify(g: &GlobalOpts, input: &Path, p: Option<u32>, h: Option<u32>) -> Result<(), Failure> {
    let (t, s) = load_spread_set(g, input, p, h)?;
    let analysis = analyse(&t, &s)?;
    emit(
        g,
        &ClassifyReport {
            header: Header::new(&t, g),
            spread_set: s,
            analysis,
        },
    )
}

#[derive(Serialize)]
struct CacheEntry {
    file: String,
    bytes: u64,
}

#[derive(Serialize)]
struct CacheReport {
    dir: PathBuf,
    action: String,
    entries: Vec<CacheEntry>,
}

impl Report for CacheReport {
    fn table(&self) -> Option<Table> {
        Some(Table {
            header: vec!["file".into(), "bytes".into()],
            rows: self.entries.iter().map(|e| vec![e.file.clone(), e.bytes.to_string()]).collect(),
        })
    }
}

fn cached_files(dir: &Path) -> Vec<CacheEntry> {
    let Ok(rd) = fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut v: Vec<CacheEntry> = rd
        .filter_map(|e| e.ok())
        .filter(|e| {
            let n = e.file_name().to_string_lossy().into_owned();
            n.starts_with("tower-") && n.ends_with(".sfzt")
        })
        .map(|e| CacheEntry {
            file: e.file_name().to_string_lossy().into_owned(),
            bytes: e.metadata().map(|m| m.len()).unwrap_or(0),
        })
        .collect();
    v.sort_by(|a, b| a.file.cmp(&b.file));
    v
}

pub fn cache(g: &GlobalOpts, action: &CacheAction) -> Result<(), Failure> {
    let dir = g
        .cache_dir
        .clone()
        .ok_or_else(|| Failure::usage("no-cache-dir", "set SFZ_CACHE_DIR or pass --cache-dir"))?;
    let (name, entries) = match action {
        CacheAction::Build(f) => {
            load_tower(g, f)?;
            let file = FieldTower::cache_file_name(f.p, f.h);
            ("build", cached_files(&dir).into_iter().filter(|e| e.file == file).collect())
        }
        CacheAction::List => ("list", cached_files(&dir)),
        CacheAction::Clear => {
            let files = cached_files(&dir);
            for e in &files {
                fs::remove_file(dir.join(&e.file)).map_err(|err| Failure::usage("io", err.to_string()))?;
            }
            ("clear", files)
        }
    };
    emit(
        g,
        &CacheReport {
            dir,
            action: name.into(),
            entries,
        },
    )
}
