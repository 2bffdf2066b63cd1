//! Parsing of field elements, theorem ids and tower loading.

use sfz_core::classify::theorems::TheoremId;
use sfz_core::{Fe, FieldTower};

use crate::{Failure, FieldArgs, GlobalOpts};

/// `n` is a canonical integer of F_(q^6); `@i` is the i-th power of the
/// generator of F_(q^k)^*. The result must lie in F_(q^k).
pub fn element(t: &FieldTower, name: &str, raw: &str, k: u32) -> Result<Fe, Failure> {
    let bad = |msg: String| Failure::usage("bad-element", format!("--{name} {raw}: {msg}"));
    let x = if let Some(idx) = raw.strip_prefix('@') {
        let i: u64 = idx.parse().map_err(|_| bad("expected @<exponent>".into()))?;
        t.pow(t.subfield_generator(k), i)
    } else {
        let v: u32 = raw.parse().map_err(|_| bad("expected a canonical integer, @<exponent> or auto".into()))?;
        if v >= t.order() {
            return Err(bad(format!("canonical integers run below {}", t.order())));
        }
        Fe(v)
    };
    if !t.in_subfield(x, k) {
        let field = if k == 6 { "F_(q^6)".to_string() } else { format!("F_(q^{k})") };
        return Err(bad(format!("{} is not in {field}; use @i for powers of its generator", x.0)));
    }
    Ok(x)
}

/// `None` for "auto".
pub fn optional_element(t: &FieldTower, name: &str, raw: &str, k: u32) -> Result<Option<Fe>, Failure> {
    if raw == "auto" {
        Ok(None)
    } else {
        element(t, name, raw, k).map(Some)
    }
}

pub fn required<'a>(v: &'a Option<String>, name: &str) -> Result<&'a str, Failure> {
    v.as_deref()
        .ok_or_else(|| Failure::usage("missing-parameter", format!("--{name} is required for this family")))
}

/// Descriptive ids plus the numeric aliases used in the literature.
pub fn theorem_id(s: &str) -> Result<TheoremId, Failure> {
    let id = match s {
        "2.1" => TheoremId::AlgebraicPseudoregulus,
        "3.1" => TheoremId::DaNotNew,
        "3.2" => TheoremId::DaNew,
        "3.3i" => TheoremId::DabF3,
        "3.3ii" => TheoremId::DabF5,
        "3.4" => TheoremId::Derivatives,
        other => other.parse().map_err(|e: String| Failure::usage("unknown-theorem", e))?,
    };
    Ok(id)
}

pub fn load_tower(g: &GlobalOpts, f: &FieldArgs) -> Result<FieldTower, Failure> {
    let q = (f.p as u64).checked_pow(f.h).unwrap_or(u64::MAX);
    if q > g.max_q {
        if !g.allow_large_q {
            return Err(Failure::usage(
                "q-above-cap",
                format!("q = {q} exceeds the cap {}; pass --allow-large-q to run anyway", g.max_q),
            ));
        }
        eprintln!("warning: q = {q} is above the cap {}; exhaustive scans may take very long", g.max_q);
    }
    let t = match &g.cache_dir {
        Some(dir) => FieldTower::load_or_build_default(dir, f.p, f.h)?,
        None => FieldTower::build(f.p, f.h)?,
    };
    Ok(t)
}
