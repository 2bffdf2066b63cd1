//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines appear in order on stdout.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sfz_core::classify::theorems::{verify_theorem, CheckConfig, TheoremId, TheoremReport};
use sfz_core::classify::{count_da_lower_bound, norms_in_same_orbit};
use sfz_core::fieldtower::{Fe, FieldTower};
use sfz_core::linsets::LinearSet;
use sfz_core::projgeom::ProjLine;
use sfz_core::spreadsets::SpreadSet;
use sfz_core::zoo::{
    make_da, make_dab, make_f4a_model, make_s1, s1_norms, scattered_da_parameters, smallest_with_norm63,
    valid_dab_parameters, DABParams, DAParams, F4aModelParams,
};

type Outcome = Result<String, String>;

/// Name, check, runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn tower(p: u32, h: u32) -> FieldTower {
    FieldTower::build(p, h).expect("tower")
}

fn q_exp(t: &FieldTower, size: u64) -> u32 {
    (0..=6).find(|&e| t.q().pow(e) == size).unwrap_or(99)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn theorem(t: &FieldTower, id: TheoremId, cfg: &CheckConfig) -> Result<TheoremReport, String> {
    let r = verify_theorem(t, id, cfg).map_err(|e| format!("{} at q={}: {e}", id.as_str(), t.q()))?;
    if r.passed() {
        Ok(r)
    } else {
        let first = r
            .cases
            .iter()
            .flat_map(|c| c.checks.iter().filter(|k| !k.pass).map(move |k| format!("{:?} {}: {}", c.params, k.name, k.evidence)))
            .next()
            .unwrap_or_default();
        Err(format!("{} at q={}: {} failed checks, first {first}", id.as_str(), t.q(), r.summary.failed))
    }
}

fn semifield_ok(t: &FieldTower, s: &SpreadSet, expect: [u32; 4]) -> Result<(), String> {
    let scan = s.verify_no_zero_divisors(t);
    ensure(scan.nonsingular, || format!("zero divisor {:?} in {:?}", scan.witness, s.provenance()))?;
    let n = s.nuclei(t).map_err(|e| e.to_string())?;
    let got = <[u64; 4]>::from(n).map(|x| q_exp(t, x));
    ensure(got == expect, || format!("nuclei {n} in {:?}", s.provenance()))
}

fn axioms_and_parameters() -> Outcome {
    let mut total = 0;
    for p in [3, 5, 7] {
        let t = tower(p, 1);
        let a_vals: Vec<Fe> = t.subfield_units(3).into_iter().filter(|&a| t.norm3(a) != Fe::ONE).collect();
        let b_vals = if p == 3 { Vec::new() } else { valid_dab_parameters(&t) };
        let mut jobs: Vec<(bool, u32, Fe)> = Vec::new();
        for r in [1, 2] {
            jobs.extend(a_vals.iter().map(|&a| (true, r, a)));
            jobs.extend(b_vals.iter().map(|&b| (false, r, b)));
        }
        total += jobs.len();
        jobs.par_iter().try_for_each(|&(is_a, r, x)| {
            if is_a {
                let s = make_da(&t, &DAParams::new(&t, r, x, None).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                semifield_ok(&t, &s, [3, 2, 1, 1])
            } else {
                let s = make_dab(&t, &DABParams::new(&t, r, x, None).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                semifield_ok(&t, &s, [3, 1, 1, 1])
            }
        })?;
    }
    Ok(format!("{total} presemifields nonsingular with expected nuclei"))
}

fn da_not_new() -> Outcome {
    let mut cases = 0;
    for p in [3, 5, 7] {
        cases += theorem(&tower(p, 1), TheoremId::DaNotNew, &CheckConfig::default())?.summary.cases;
    }
    Ok(format!("{cases} cases, all F4a; F4a model signature identical"))
}

fn da_new() -> Outcome {
    let mut notes = Vec::new();
    for (p, orbits) in [(5, 1usize), (7, 2)] {
        let t = tower(p, 1);
        let r = theorem(&t, TheoremId::DaNew, &CheckConfig::default())?;
        let cnt = count_da_lower_bound(&t).map_err(|e| e.to_string())?;
        ensure(cnt.count == orbits && cnt.count as f64 >= cnt.bound, || {
            format!("q={p}: {} orbits, bound {}", cnt.count, cnt.bound)
        })?;
        notes.push(format!("q={p}: {} cases, {} orbit(s)", r.summary.cases, cnt.count));
        if p == 7 {
            let norms: BTreeSet<u32> = s1_norms(&t).map_err(|e| e.to_string())?.iter().map(|(_, n)| n.0).collect();
            let lb2: BTreeSet<u32> = cnt.orbits.iter().flatten().copied().collect();
            ensure(norms == BTreeSet::from([5, 6]) && lb2 == BTreeSet::from([2, 4]), || {
                format!("S1 norms {norms:?}, lambda-bar^2 orbits {lb2:?}")
            })?;
            for &n in &norms {
                let l1 = smallest_with_norm63(&t, Fe(n)).map_err(|e| e.to_string())?;
                for &v in &lb2 {
                    let lb = t.sqrt(Fe(v)).ok_or("no square root")?;
                    ensure(!norms_in_same_orbit(&t, lb, l1).map_err(|e| e.to_string())?, || {
                        format!("norm orbits meet for N={n}, lambda-bar^2={v}")
                    })?;
                }
            }
            notes.push("S1 excluded".into());
        }
    }
    Ok(notes.join("; "))
}

fn dab_f3() -> Outcome {
    let mut notes = Vec::new();
    for (p, h) in [(5, 1), (3, 2)] {
        let t = tower(p, h);
        let r = theorem(&t, TheoremId::DabF3, &CheckConfig::default())?;
        if p == 5 {
            ensure(r.summary.cases == 2 * valid_dab_parameters(&t).len(), || "q=5 must cover every valid b".into())?;
        }
        notes.push(format!("q={}: {} cases", t.q(), r.summary.cases));
    }
    Ok(notes.join("; "))
}

fn dab_f5() -> Outcome {
    let r = theorem(&tower(7, 1), TheoremId::DabF5, &CheckConfig::default())?;
    Ok(format!("q=7: {} cases, perp point (1,0,0,-xi)", r.summary.cases))
}

fn roundtrip() -> Outcome {
    let cfg = CheckConfig { trials: 20, seed: 2024 };
    let mut n = 0;
    for p in [3, 5] {
        n += theorem(&tower(p, 1), TheoremId::AlgebraicPseudoregulus, &cfg)?.summary.cases;
    }
    Ok(format!("{n} random instances"))
}

fn derivatives() -> Outcome {
    let mut n = 0;
    for p in [5, 7] {
        n += theorem(&tower(p, 1), TheoremId::Derivatives, &CheckConfig::default())?.summary.cases;
    }
    Ok(format!("{n} D_A/D_AB derivative cases"))
}

fn partition_identity(t: &FieldTower, l: &LinearSet, what: &str) -> Result<(), String> {
    let q6 = t.q().pow(6) - 1;
    let got = l.partition_sum(t);
    ensure(got == q6, || format!("{what}: partition sum {got} != {q6}"))
}

fn cross_cutting() -> Outcome {
    let mut sets = 0;
    for p in [3, 5] {
        let t = tower(p, 1);
        let mut all: Vec<(String, LinearSet)> = Vec::new();
        for r in [1, 2] {
            for a in t.subfield_units(3).into_iter().filter(|&a| t.norm3(a) != Fe::ONE) {
                let s = make_da(&t, &DAParams::new(&t, r, a, None).unwrap()).unwrap();
                all.push((format!("d-a r={r} a={}", a.0), s.linear_set(&t)));
            }
            if p != 3 {
                for b in valid_dab_parameters(&t) {
                    let s = make_dab(&t, &DABParams::new(&t, r, b, None).unwrap()).unwrap();
                    all.push((format!("d-ab r={r} b={}", b.0), s.linear_set(&t)));
                }
            }
        }
        let e = make_f4a_model(&t, &F4aModelParams::new(&t, None).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        all.push(("f4a-model".into(), e.linear_set(&t)));
        all.par_iter().try_for_each(|(w, l)| partition_identity(&t, l, w))?;
        sets += all.len();

        let q3 = t.q().pow(3);
        for a in scattered_da_parameters(&t).into_iter().take(3) {
            let l = make_da(&t, &DAParams::new(&t, 1, a, None).unwrap()).unwrap().linear_set(&t);
            let pr = l.pseudoregulus(&t).map_err(|e| e.to_string())?;
            ensure(pr.lines.len() as u64 == q3 + 1, || format!("{} pseudoregulus lines", pr.lines.len()))?;
            ensure((q3 + 1) * (t.q().pow(2) + t.q() + 1) == (t.q().pow(6) - 1) / (t.q() - 1), || "count".into())?;
            let covered: usize = pr.lines.iter().map(|ln| l.points_on_line(&t, ln)).sum();
            ensure(covered == l.size(&t), || format!("pseudoregulus covers {covered} of {}", l.size(&t)))?;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let u: [Fe; 4] = std::array::from_fn(|_| t.random_in_subfield(&mut rng, 3));
            let w: [Fe; 4] = std::array::from_fn(|_| t.random_in_subfield(&mut rng, 3));
            if let Some(ln) = ProjLine::span_vecs(&t, &u, &w) {
                ensure(ln.polar(&t).polar(&t) == ln, || "line polarity is not an involution".into())?;
                if let Some(pt) = ln.points(&t).first() {
                    ensure(pt.polar(&t).polar(&t) == *pt, || "point polarity is not an involution".into())?;
                }
            }
        }
    }
    let t = tower(3, 2);
    for x in t.subfield_units(6) {
        let via3 = t.norm(t.norm(x, 6, 3).unwrap(), 3, 1).unwrap();
        let via2 = t.norm(t.norm(x, 6, 2).unwrap(), 2, 1).unwrap();
        let direct = t.norm(x, 6, 1).unwrap();
        let tr3 = t.trace(t.trace(x, 6, 3).unwrap(), 3, 1).unwrap();
        let tr2 = t.trace(t.trace(x, 6, 2).unwrap(), 2, 1).unwrap();
        ensure(via3 == direct && via2 == direct, || format!("norm transitivity fails at {}", x.0))?;
        ensure(tr3 == t.trace(x, 6, 1).unwrap() && tr2 == tr3, || format!("trace transitivity fails at {}", x.0))?;
    }

    let t = tower(5, 1);
    let cfg = CheckConfig { trials: 5, seed: 11 };
    let once = |id| serde_json::to_vec(&verify_theorem(&t, id, &cfg).unwrap()).unwrap();
    for id in [TheoremId::DabF3, TheoremId::AlgebraicPseudoregulus] {
        let first = once(id);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| once(id));
        ensure(first == once(id) && first == single, || format!("{} report not reproducible", id.as_str()))?;
    }
    let t7 = tower(7, 1);
    let s1 = make_s1(&t7).map_err(|e| e.to_string())?;
    partition_identity(&t7, &s1.linear_set(&t7), "s1")?;
    Ok(format!("{} linear sets satisfy the weight partition identity; polarity, norm/trace and determinism hold", sets + 1))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("axioms-and-nuclei", axioms_and_parameters, 300),
        ("da-norm-minus-one-is-f4a", da_not_new, 300),
        ("da-scattered-is-new", da_new, 900),
        ("dab-f3-type-3-0", dab_f3, 600),
        ("dab-f5-perp-point", dab_f5, 600),
        ("pseudoregulus-roundtrip", roundtrip, 300),
        ("derivatives", derivatives, 600),
        ("cross-cutting-properties", cross_cutting, 300),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (status, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the {budget}s budget")),
            Err(e) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {} {name}: {status} ({:.1}s) {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
