use std::sync::Arc;

use kl_sheaves::bmsheaf::{build_bm, BMSheaf, DEFAULT_CAP_MARGIN};
use kl_sheaves::conjectures::{
    check_dcon, check_pcon, check_pdimone_hl, genmaps_sample, CenterConvention, Conjecture,
    ConjectureReport, GenericMapProblem, GenmapsParams, Verdict,
};
use kl_sheaves::coxeter::{enumerate_ball, CoxeterSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sheaf(sys: Arc<CoxeterSystem>, radius: usize, word: &str) -> BMSheaf {
    let b = Arc::new(enumerate_ball(&sys, radius));
    let x = b.parse(word).unwrap();
    build_bm(&b, x, DEFAULT_CAP_MARGIN).unwrap()
}

#[test]
fn dcon_a3_singular_pair() {
    let s = sheaf(CoxeterSystem::type_a(3), 4, "s2 s1 s3 s2");
    let b = s.ball();
    let y = s.graph().position(b.parse("s2").unwrap()).unwrap();
    let r = &check_dcon(&s).unwrap()[y];
    assert_eq!(r.y.as_deref(), Some("s2"));
    assert_eq!(r.verdict, Verdict::Holds);
    assert_eq!(s.gap(y), 3);
}

#[test]
fn pcon_a1_empty_stalk_truncation() {
    let s = sheaf(CoxeterSystem::type_a(1), 1, "s1");
    assert_eq!(check_pcon(&s, 0, 2, 8).unwrap().verdict, Verdict::HoldsUpToCap);
}

#[test]
fn genmaps_single_linear_entry() {
    // f = c·α with c uniform in [-10, 10]; it fails exactly when c = 0.
    let params = GenmapsParams {
        problem: GenericMapProblem { l: 1, ks: vec![1], r: 1 },
        trials: 1000,
        seed: 7,
        coeff_range: 10,
    };
    let report = genmaps_sample(&params).unwrap();
    let nonzero = (0..1000u64)
        .filter(|t| ChaCha8Rng::seed_from_u64(7 + t).gen_range(-10i64..=10) != 0)
        .count();
    assert_eq!(report.satisfied, nonzero);
    assert_eq!(report.fraction, nonzero as f64 / 1000.0);
    assert!(report.fraction >= 0.95, "{}", report.fraction);
}

#[test]
fn verdicts_do_not_depend_on_the_line() {
    let s = sheaf(CoxeterSystem::dihedral(4), 4, "s1 s2 s1 s2");
    for y in 0..s.graph().len() - 1 {
        let runs: Vec<_> = (10..14)
            .map(|seed| check_pdimone_hl(&s, y, seed, &CenterConvention::ALL).unwrap())
            .collect();
        for r in &runs[1..] {
            assert_eq!(r.decomposition, runs[0].decomposition);
        }
        assert_eq!(
            runs[0].verdict(Conjecture::Hl, CenterConvention::Shifted),
            Some(Verdict::Holds)
        );
    }
}

#[test]
fn report_json_schema() {
    let s = sheaf(CoxeterSystem::type_a(1), 1, "s1");
    let survey = check_pdimone_hl(&s, 0, 0, &[CenterConvention::Literal]).unwrap();
    let json = serde_json::to_value(&survey.reports).unwrap();
    let hl = &json[1];
    assert_eq!(hl["conjecture"], "hl");
    assert_eq!(hl["x"], "s1");
    assert_eq!(hl["y"], "e");
    assert_eq!(hl["verdict"], "fails");
    assert_eq!(hl["params"]["center"], 1);
    assert_eq!(hl["params"]["convention"], "literal");
    let back: Vec<ConjectureReport> = serde_json::from_value(json).unwrap();
    assert_eq!(back, survey.reports);
    let pcon = serde_json::to_value(check_pcon(&s, 0, 1, 6).unwrap()).unwrap();
    assert_eq!(pcon["verdict"], "holds-up-to-cap");
    assert!(pcon["witness"].is_null());
}
