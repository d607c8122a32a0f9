//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain binary
//! so the verdict lines are always visible; exits non-zero if any fail.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use kl_sheaves::bmsheaf::{build_bm, BMSheaf, DEFAULT_CAP_MARGIN};
use kl_sheaves::conjectures::{
    check_dcon, check_klcon, check_pcon_all, check_pdimone_hl, genmaps_sample, shift_lemma_check,
    CenterConvention, Conjecture, GenericMapProblem, GenmapsParams, Verdict,
};
use kl_sheaves::coxeter::{Ball, CoxeterSystem, ElementId};
use kl_sheaves::exactfield::FieldElement;
use kl_sheaves::gradedlin::{specialize_to_line, GradedMultiset, TorsionDecomposition};
use kl_sheaves::hecke::{HeckeAlgebra, LaurentPoly};
use kl_sheaves::io::{sheaf_from_json, sheaf_to_json, CacheStatus, SheafCache};

use common::{ball, MuOracle};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Sheaves built for the character criteria, reused by later ones.
struct Built {
    group: String,
    algebra: Arc<HeckeAlgebra>,
    sheaf: BMSheaf,
}

#[derive(Default)]
struct Corpus {
    built: Vec<Built>,
    /// Every decomposition produced, with the centres it was checked at.
    decompositions: Vec<(TorsionDecomposition, Vec<i32>)>,
}

fn by_length(ball: &Ball, max: usize) -> Vec<ElementId> {
    let mut ids: Vec<ElementId> = ball.ids().filter(|&w| ball.length(w) <= max).collect();
    ids.sort_by_key(|&w| (ball.length(w), w));
    ids
}

fn character_sweep(corpus: &mut Corpus, group: &str, sys: Arc<CoxeterSystem>, max_len: usize) -> Check {
    let b = ball(sys, max_len);
    let algebra = Arc::new(HeckeAlgebra::new(b.clone()));
    let mut n = 0;
    for x in by_length(&b, max_len) {
        let sheaf = build_bm(&b, x, DEFAULT_CAP_MARGIN).map_err(|e| e.to_string())?;
        let r = check_klcon(&sheaf, &algebra).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Holds, || {
            format!("{group}: h(B({})) != C'; witness {:?}", b.format(x), r.witness)
        })?;
        corpus.built.push(Built { group: group.to_string(), algebra: algebra.clone(), sheaf });
        n += 1;
    }
    Ok(format!("{group}: {n} elements"))
}

fn criterion_1(c: &mut Corpus) -> Check {
    let mut parts = Vec::new();
    for m in 2..=6u32 {
        parts.push(character_sweep(c, &format!("I2({m})"), CoxeterSystem::dihedral(m), m as usize)?);
    }
    Ok(parts.join(", "))
}

fn criterion_2(c: &mut Corpus) -> Check {
    let a = character_sweep(c, "universal rank 2", CoxeterSystem::universal(2), 4)?;
    let b = character_sweep(c, "universal rank 3", CoxeterSystem::universal(3), 4)?;
    Ok(format!("{a}, {b}"))
}

fn criterion_3(c: &mut Corpus) -> Check {
    let summary = character_sweep(c, "A3", CoxeterSystem::type_a(3), 6)?;
    ensure(c.built.iter().filter(|b| b.group == "A3").count() == 24, || "A3 is not complete".into())?;
    let built = c
        .built
        .iter()
        .find(|b| b.group == "A3" && b.sheaf.ball().format(b.sheaf.x()) == "s2 s1 s3 s2")
        .ok_or("s2 s1 s3 s2 missing")?;
    let b = built.sheaf.ball();
    let s2 = b.parse("s2").unwrap();
    ensure(built.sheaf.stalk_at(s2) == GradedMultiset::new(vec![0, 2]), || {
        format!("stalk at s2 is {:?}", built.sheaf.stalk_at(s2))
    })?;
    let h = built.algebra.kl_basis(built.sheaf.x()).unwrap().h(s2);
    ensure(h == LaurentPoly::from_terms([(3, 1), (1, 1)]), || format!("h = {h}"))?;
    let oracle = MuOracle::new(b.clone());
    let p = oracle.p(s2, built.sheaf.x());
    ensure(p == vec![1, 1], || format!("oracle P = {p:?}"))?;
    Ok(format!("{summary}; stalk(s2) = {{0, 2}}, h = v^3 + v, oracle P = 1 + q"))
}

fn criterion_4() -> Check {
    let systems = [
        ("A3", CoxeterSystem::type_a(3)),
        ("B2", CoxeterSystem::dihedral(4)),
    ]
    .into_iter()
    .chain((2..=8).map(|m| (["I2(2)", "I2(3)", "I2(4)", "I2(5)", "I2(6)", "I2(7)", "I2(8)"][m - 2], CoxeterSystem::dihedral(m as u32))));
    let mut total = 0;
    for (name, sys) in systems {
        let b = ball(sys, 6);
        let alg = HeckeAlgebra::new(b.clone());
        let oracle = MuOracle::new(b.clone());
        for x in by_length(&b, 6) {
            let kl = alg.kl_basis(x).map_err(|e| e.to_string())?;
            let c = kl.to_element();
            for y in b.ids() {
                let got: Vec<i64> = kl.p(y).iter().map(|n| i64::try_from(n).unwrap()).collect();
                ensure(got == oracle.p(y, x), || {
                    format!("{name}: P[{}, {}] = {got:?}, oracle {:?}", b.format(y), b.format(x), oracle.p(y, x))
                })?;
            }
            let bar = alg.bar_involution(&c).map_err(|e| e.to_string())?;
            ensure(bar == c, || format!("{name}: C'[{}] is not self-dual", b.format(x)))?;
            ensure(c.coefficient(x) == LaurentPoly::one(), || format!("{name}: leading term"))?;
            for (y, h) in c.terms() {
                ensure(y == x || h.min_exponent().is_some_and(|e| e >= 1), || {
                    format!("{name}: h[{}, {}] = {h} not in vZ[v]", b.format(y), b.format(x))
                })?;
                ensure(oracle.leq(y, x), || format!("{name}: support outside [e, x]"))?;
            }
            total += 1;
        }
    }
    Ok(format!("{total} elements across A3, B2, I2(2..8); oracle, self-duality, normalization and degree bounds agree"))
}

fn criterion_5(c: &Corpus) -> Check {
    let mut pairs = 0;
    for b in &c.built {
        let s = &b.sheaf;
        for y in 0..s.graph().len() {
            ensure(s.duality_at(y), || {
                format!(
                    "{} x={} y={}: stalk {:?}, defect {:?}",
                    b.group,
                    s.ball().format(s.x()),
                    s.ball().format(s.graph().vertices[y]),
                    s.stalk(y),
                    s.defect(y).degrees
                )
            })?;
            pairs += 1;
        }
        ensure(s.cap_report().is_empty(), || format!("{}: cap flags {:?}", b.group, s.cap_report()))?;
    }
    Ok(format!("{pairs} (x, y) pairs over {} sheaves; no cap flags", c.built.len()))
}

fn criterion_6(c: &Corpus) -> Check {
    let mut pairs = 0;
    for b in &c.built {
        let reports = check_dcon(&b.sheaf).map_err(|e| e.to_string())?;
        let dcon = reports.iter().all(|r| r.verdict == Verdict::Holds);
        let klcon = check_klcon(&b.sheaf, &b.algebra).map_err(|e| e.to_string())?.verdict == Verdict::Holds;
        ensure(dcon, || format!("{} x={}: dcon fails", b.group, b.sheaf.ball().format(b.sheaf.x())))?;
        ensure(dcon == klcon, || "dcon and klcon disagree".into())?;
        pairs += reports.len();
    }
    Ok(format!("{pairs} pairs; agrees with the character check on every sheaf"))
}

fn proportional(a: &[FieldElement], b: &[FieldElement]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

fn criterion_7(c: &mut Corpus) -> Check {
    let cases = [
        ("A1", CoxeterSystem::type_a(1), "s1", vec![(0, 0)]),
        ("A1xA1", CoxeterSystem::dihedral(2), "s1 s2", vec![(0, 1)]),
        ("A2", CoxeterSystem::type_a(2), "s1 s2 s1", vec![(0, 2)]),
    ];
    for (name, sys, word, want) in cases {
        let b = ball(sys, 3);
        let sheaf = build_bm(&b, b.parse(word).unwrap(), DEFAULT_CAP_MARGIN).map_err(|e| e.to_string())?;
        // Seeds are drawn until three distinct specializations are found;
        // in rank >= 2 they must also be pairwise non-proportional.
        let labels = sheaf.graph().labels();
        let mut points: Vec<Vec<FieldElement>> = Vec::new();
        let mut seed = 0;
        while points.len() < 3 && seed < 64 {
            seed += 1;
            let p = specialize_to_line(sheaf.rank(), &labels, seed).point;
            if points.iter().any(|q| proportional(q, &p) && (p.len() > 1 || *q == p)) {
                continue;
            }
            let s = check_pdimone_hl(&sheaf, 0, seed, &CenterConvention::ALL).map_err(|e| e.to_string())?;
            ensure(s.decomposition.summands == want, || {
                format!("{name}, seed {seed}: {:?}", s.decomposition.summands)
            })?;
            c.decompositions.push((s.decomposition, vec![sheaf.gap(0), sheaf.gap(0) - 1]));
            points.push(p);
        }
        ensure(points.len() == 3, || format!("{name}: fewer than 3 distinct lines in 64 seeds"))?;
    }
    // Every decomposition gathered anywhere in the suite, re-checked over a
    // range of centres.
    let mut checked = 0;
    for (d, centers) in &c.decompositions {
        let lo = centers.iter().min().unwrap() - 3;
        let hi = centers.iter().max().unwrap() + 3;
        for center in lo..=hi {
            let (hl, shape) = shift_lemma_check(d, center).map_err(|e| e.to_string())?;
            ensure(hl == shape, || format!("{d:?} at {center}"))?;
            checked += 1;
        }
    }
    Ok(format!(
        "3 decompositions reproduced on 3 distinct specializations each; shift lemma agrees on {} decompositions ({checked} centre evaluations)",
        c.decompositions.len()
    ))
}

fn criterion_8(c: &mut Corpus) -> Check {
    let groups = [
        ("A2", CoxeterSystem::type_a(2), 3),
        ("B2", CoxeterSystem::dihedral(4), 4),
        ("A1xA1", CoxeterSystem::dihedral(2), 2),
        ("A3", CoxeterSystem::type_a(3), 4),
    ];
    let mut tally: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for (name, sys, max_len) in groups {
        let b = ball(sys, max_len);
        for x in by_length(&b, max_len) {
            let sheaf = build_bm(&b, x, DEFAULT_CAP_MARGIN).map_err(|e| e.to_string())?;
            for y in 0..sheaf.graph().len() - 1 {
                let surveys = (0..3)
                    .map(|seed| check_pdimone_hl(&sheaf, y, seed, &CenterConvention::ALL))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?;
                let first = &surveys[0];
                for s in &surveys[1..] {
                    ensure(s.decomposition == first.decomposition && s.reports.iter().map(|r| r.verdict).eq(first.reports.iter().map(|r| r.verdict)), || {
                        format!("{name} x={} y={}: verdicts depend on the line", b.format(x), b.format(sheaf.graph().vertices[y]))
                    })?;
                }
                for conj in [Conjecture::Pdimone, Conjecture::Hl] {
                    let lit = first.verdict(conj, CenterConvention::Literal) == Some(Verdict::Holds);
                    let sh = first.verdict(conj, CenterConvention::Shifted) == Some(Verdict::Holds);
                    ensure(!(lit || sh) || sh, || {
                        format!("{name} x={} y={}: {} holds only at the literal centre", b.format(x), b.format(sheaf.graph().vertices[y]), conj.name())
                    })?;
                    if conj == Conjecture::Pdimone {
                        let t = tally.entry(name).or_default();
                        t[0] += 1;
                        t[1] += usize::from(sh);
                        t[2] += usize::from(lit);
                    }
                }
                let gap = sheaf.gap(y);
                c.decompositions.push((first.decomposition.clone(), vec![gap, gap - 1]));
            }
        }
    }
    let summary: Vec<String> = tally
        .iter()
        .map(|(g, [n, sh, lit])| format!("{g}: {n} pairs, shifted holds {sh}, literal holds {lit}"))
        .collect();
    Ok(summary.join("; "))
}

fn criterion_9() -> Check {
    let params = GenmapsParams {
        problem: GenericMapProblem { l: 2, ks: vec![1, 2], r: 2 },
        trials: 2000,
        seed: 2024,
        coeff_range: 50,
    };
    let r = genmaps_sample(&params).map_err(|e| e.to_string())?;
    ensure(r.fraction >= 0.99, || format!("fraction {}", r.fraction))?;
    Ok(format!("{}/{} maps satisfy both conditions (fraction {:.4})", r.satisfied, params.trials, r.fraction))
}

fn criterion_10(c: &mut Corpus) -> Check {
    let mut pairs = 0;
    for (name, sys, max_len) in [("A2", CoxeterSystem::type_a(2), 3), ("A1xA1", CoxeterSystem::dihedral(2), 2)] {
        let b = ball(sys, max_len);
        for x in by_length(&b, max_len) {
            let sheaf = build_bm(&b, x, DEFAULT_CAP_MARGIN).map_err(|e| e.to_string())?;
            let cap = 2 * b.length(x) as i32 + 4;
            let dcon = check_dcon(&sheaf).map_err(|e| e.to_string())?;
            for y in 0..sheaf.graph().len() - 1 {
                let reports = check_pcon_all(&sheaf, y, cap).map_err(|e| e.to_string())?;
                let pcon = reports.iter().all(|r| r.verdict == Verdict::HoldsUpToCap);
                let label = || format!("{name} x={} y={}", b.format(x), b.format(sheaf.graph().vertices[y]));
                ensure(pcon, || format!("{}: pcon fails {:?}", label(), reports.iter().find(|r| r.verdict.is_fail())))?;
                ensure(dcon[y].verdict == Verdict::Holds, || format!("{}: pcon holds but dcon fails", label()))?;
                let shape = check_pdimone_hl(&sheaf, y, 0, &[CenterConvention::Shifted]).map_err(|e| e.to_string())?;
                if shape.verdict(Conjecture::Pdimone, CenterConvention::Shifted) == Some(Verdict::Holds) {
                    ensure(pcon, || format!("{}: torsion shape holds but pcon fails", label()))?;
                }
                c.decompositions.push((shape.decomposition, vec![sheaf.gap(y) - 1]));
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs hold up to cap 2l(x)+4 for all m; pcon => dcon and shape => pcon confirmed"))
}

fn criterion_11(c: &Corpus) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = SheafCache::new(dir.path()).map_err(|e| e.to_string())?;
    for b in &c.built {
        let s = &b.sheaf;
        let label = || format!("{} x={}", b.group, s.ball().format(s.x()));
        let json = serde_json::to_string(&sheaf_to_json(s).map_err(|e| e.to_string())?).unwrap();
        let again = build_bm(s.ball(), s.x(), s.cap_margin()).map_err(|e| e.to_string())?;
        let json2 = serde_json::to_string(&sheaf_to_json(&again).map_err(|e| e.to_string())?).unwrap();
        ensure(json == json2, || format!("{}: rebuild is not byte-identical", label()))?;
        let parsed = serde_json::from_str(&json).map_err(|e| e.to_string())?;
        let back = sheaf_from_json(&parsed, s.ball()).map_err(|e| e.to_string())?;
        ensure(&back == s, || format!("{}: JSON roundtrip differs", label()))?;
        cache.store(s).map_err(|e| e.to_string())?;
        let (loaded, status) = cache.load(s.ball(), s.x(), s.cap_margin()).map_err(|e| e.to_string())?;
        ensure(status == CacheStatus::Hit && loaded.as_ref() == Some(s), || format!("{}: cache {status:?}", label()))?;
    }
    Ok(format!("{} sheaves rebuilt byte-identically and roundtripped through JSON and the cache", c.built.len()))
}

fn main() {
    let mut corpus = Corpus::default();
    let mut results: Vec<(u32, &str, Check, f64)> = Vec::new();
    let mut run = |id: u32, title: &'static str, f: &mut dyn FnMut(&mut Corpus) -> Check| {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(|| f(&mut corpus)))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        results.push((id, title, r, t.elapsed().as_secs_f64()));
    };
    run(1, "character theorem, dihedral", &mut criterion_1);
    run(2, "character theorem, universal", &mut criterion_2);
    run(3, "character theorem, A3", &mut criterion_3);
    run(4, "KL engine vs mu-recursion oracle", &mut |_| criterion_4());
    run(5, "duality invariants", &mut |c| criterion_5(c));
    run(6, "degree conjecture", &mut |c| criterion_6(c));
    // 8 and 10 feed decompositions into the suite-wide shift lemma check in 7.
    run(8, "Hard Lefschetz / torsion shape survey", &mut criterion_8);
    run(10, "genericity up to cap", &mut criterion_10);
    run(7, "specialization and shift lemma", &mut criterion_7);
    run(9, "generic maps", &mut |_| criterion_9());
    run(11, "determinism and persistence", &mut |c| criterion_11(c));

    results.sort_by_key(|r| r.0);
    for (id, title, r, secs) in &results {
        match r {
            Ok(d) => println!("PASS criterion {id:>2} ({title}) [{secs:.1}s]: {d}"),
            Err(e) => println!("FAIL criterion {id:>2} ({title}) [{secs:.1}s]: {e}"),
        }
    }
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
