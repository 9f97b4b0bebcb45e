use std::sync::Arc;

use mosva_core::exact_laurent::poly::names;
use mosva_core::exact_laurent::scalar::{int, ratio};
use mosva_core::graded::DualVector;
use mosva_core::structures::{Ctx, Elem, Side};
use mosva_core::verification::correlate::{
    check_region_consistency, correlate, estimate_poles, reconstruct_rational, CorrelationMode,
};
use mosva_core::workbench::{build_heisenberg, matrix_algebra, regular_module};

#[test]
fn heisenberg_two_point() {
    let level = ratio(3, 2);
    let (h, _) = build_heisenberg(&level, 6).unwrap();
    let ctx = Ctx::algebra(&h);
    let a = Elem::v(h.vector("a-1").unwrap());
    let vac = Elem::v(h.vacuum.clone());
    let bra = DualVector(h.vacuum.clone());
    let ops = vec![(a.clone(), "z1".to_string()), (a.clone(), "z2".to_string())];
    let s = correlate(&ctx, &bra, &ops, &vac, CorrelationMode::Product, None).unwrap();
    assert_eq!(s.degree, Some(-2));
    // level/(z1-z2)^2 = level sum_k (k+1) z1^{-2-k} z2^k
    for (e, c) in s.series.poly.terms() {
        assert_eq!(e[0], -2 - e[1]);
        assert_eq!(c, &(&level * int(e[1] + 1)));
    }
    assert!(s.series.poly.len() >= 6);
    let poles = estimate_poles(&ctx, &[a.clone(), a.clone()], &vac).unwrap();
    assert_eq!(poles.p_diag.get(&(0, 1)), Some(&2));
    let rec = reconstruct_rational(&s, &poles).unwrap();
    assert!(rec.certified, "{}", rec.explanation);
    assert_eq!(rec.degree, 0);
    let f = rec.function.unwrap();
    assert_eq!(f.pole_diag(0, 1), 2);
    assert_eq!(f.numerator().coeff(&[0, 0]), Some(&level));
    let report = check_region_consistency(&ctx, &bra, &ops, &vac, 6).unwrap();
    assert!(report.passed(), "{}", report.to_text());
}

#[test]
fn heisenberg_three_point_regions() {
    let (h, fock) = build_heisenberg(&int(1), 8).unwrap();
    let ctx = Ctx::module(&fock);
    let a = Elem::v(h.vector("a-1").unwrap());
    let ops = vec![(a.clone(), "z1".to_string()), (a.clone(), "z2".to_string()), (a.clone(), "z3".to_string())];
    let cases = [("1", "a-1"), ("a-1", "1")];
    for (bra, ket) in cases {
        let bra = DualVector(fock.vector(bra).unwrap());
        let ket = Elem::w(fock.vector(ket).unwrap());
        let report = check_region_consistency(&ctx, &bra, &ops, &ket, 6).unwrap();
        assert!(report.passed(), "{}", report.to_text());
    }
    let s = correlate(&ctx, &DualVector(fock.vector("1").unwrap()), &ops, &Elem::w(fock.vector("a-1").unwrap()), CorrelationMode::Iterate, None).unwrap();
    assert_eq!(s.series.poly.vars(), names(&["z1-z2", "z2-z3", "z3"]).as_slice());
}

#[test]
fn matrix_constant_correlator() {
    let m = Arc::new(matrix_algebra(2).unwrap());
    let ctx = Ctx::algebra(&m);
    let e = |l: &str| Elem::v(m.vector(l).unwrap());
    let ops = vec![(e("E12"), "z1".to_string()), (e("E21"), "z2".to_string())];
    let bra = DualVector(m.vector("E11").unwrap());
    let s = correlate(&ctx, &bra, &ops, &e("E11"), CorrelationMode::Product, None).unwrap();
    assert_eq!(s.series.poly.len(), 1);
    assert_eq!(s.series.poly.coeff(&[0, 0]), Some(&int(1)));
    let zero = correlate(&ctx, &DualVector(Default::default()), &ops, &e("E11"), CorrelationMode::Product, None).unwrap();
    assert!(zero.series.poly.is_zero());
    let report = check_region_consistency(&ctx, &bra, &ops, &e("E11"), 6).unwrap();
    assert!(report.passed(), "{}", report.to_text());
    let bi = regular_module(&m, Side::Bi);
    let bctx = Ctx::module(&bi);
    let ops = vec![(e("E12"), "z1".to_string()), (Elem::w(bi.vector("E22").unwrap()), "z2".to_string())];
    let s = correlate(&bctx, &DualVector(bi.vector("E12").unwrap()), &ops, &e("E21").clone(), CorrelationMode::Mixed, None);
    assert!(s.is_err() || s.unwrap().series.poly.is_zero());
    let ops = vec![(e("E12"), "z1".to_string()), (Elem::w(bi.vector("E21").unwrap()), "z2".to_string())];
    let s = correlate(&bctx, &DualVector(bi.vector("E11").unwrap()), &ops, &e("E11"), CorrelationMode::Mixed, None).unwrap();
    assert_eq!(s.series.poly.coeff(&[0, 0]), Some(&int(1)));
}

#[test]
fn short_window_is_not_certified() {
    let (h, _) = build_heisenberg(&int(1), 3).unwrap();
    let ctx = Ctx::algebra(&h);
    let a = Elem::v(h.vector("a-1").unwrap());
    let vac = Elem::v(h.vacuum.clone());
    let ops = vec![(a.clone(), "z1".to_string()), (a.clone(), "z2".to_string())];
    let s = correlate(&ctx, &DualVector(h.vector("a-1").unwrap()), &ops, &a, CorrelationMode::Product, None).unwrap();
    let poles = estimate_poles(&ctx, &[a.clone(), a.clone()], &a).unwrap();
    let rec = reconstruct_rational(&s, &poles).unwrap();
    assert!(!rec.certified);
    assert!(correlate(&ctx, &DualVector(h.vacuum.clone()), &ops, &vac, CorrelationMode::Product, Some(9)).is_err());
}
