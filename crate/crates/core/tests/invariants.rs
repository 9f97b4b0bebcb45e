use std::collections::BTreeMap;
use std::sync::Arc;

use mosva_core::constructions::{compare_maps, opposite_mosva};
use mosva_core::exact_laurent::poly::{names, LaurentPoly, Window};
use mosva_core::exact_laurent::rational::{divisor_poly, expand_rational, RationalFn, Region};
use mosva_core::exact_laurent::scalar::{int, ratio};
use mosva_core::graded::Vector;
use mosva_core::structures::{Ctx, Elem};
use mosva_core::verification::{check_weak_associativity, run_suite, Suite, SuiteOptions};
use mosva_core::workbench::{build_heisenberg, build_matrix_mosva};
use proptest::prelude::*;

fn poly(vars: &[String], terms: &[(Vec<i64>, i64, i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::zero(vars.to_vec());
    for (e, a, b) in terms {
        p.add_term(e.clone(), &ratio(*a, *b));
    }
    p
}

fn terms(n: usize, lo: i64) -> impl Strategy<Value = Vec<(Vec<i64>, i64, i64)>> {
    prop::collection::vec((prop::collection::vec(lo..4i64, n), -5i64..6, 1i64..4), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_ring_laws(a in terms(2, -3), b in terms(2, -3), c in terms(2, -3)) {
        let vars = names(&["x", "y"]);
        let (p, q, r) = (poly(&vars, &a), poly(&vars, &b), poly(&vars, &c));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
    }

    /// Expanding `N / D` and multiplying back by `D` returns `N` wherever the
    /// product is determined by the certified window.
    #[test]
    fn expansion_times_divisor_is_numerator(
        num in terms(3, 0),
        axis in prop::collection::vec(0u32..3, 3),
        diag in prop::collection::vec(0u32..3, 3),
        order in 2i64..6,
        reversed in any::<bool>(),
    ) {
        let vars = names(&["z1", "z2", "z3"]);
        let n = poly(&vars, &num);
        let axis: BTreeMap<usize, u32> = axis.into_iter().enumerate().filter(|(_, p)| *p > 0).collect();
        let diag: BTreeMap<(usize, usize), u32> =
            [(0, 1), (0, 2), (1, 2)].into_iter().zip(diag).filter(|(_, p)| *p > 0).collect();
        let f = RationalFn::new(n.clone(), axis.clone(), diag.clone()).unwrap();
        let region = if reversed { Region::custom(&["z3", "z2", "z1"]) } else { Region::product(&vars) };
        let s = expand_rational(&f, &region, order).unwrap();
        let d = divisor_poly(&vars, &axis, &diag);
        let w = &s.window;
        let shifted = Window {
            vars: w.vars.clone(),
            chain: w.chain.clone(),
            tail_bounds: (0..w.chain.len())
                .map(|r| {
                    let least = d.terms().map(|(e, _)| w.tail_sum(e, r)).min().unwrap();
                    w.tail_bounds[r].map(|b| b + least)
                })
                .collect(),
        };
        prop_assert_eq!(s.poly.mul(&d).restrict(&shifted), n.restrict(&shifted));
    }

    #[test]
    fn heisenberg_any_level(p in -9i64..10, q in 1i64..6) {
        prop_assume!(p != 0);
        let (h, _) = build_heisenberg(&ratio(p, q), 4).unwrap();
        let ctx = Ctx::algebra(&h);
        for suite in [Suite::Vacuum, Suite::D, Suite::Grading, Suite::Mobius] {
            let r = run_suite(&ctx, suite, &SuiteOptions::default()).unwrap();
            prop_assert!(r.passed(), "{}", r.to_text());
        }
        let op = opposite_mosva(&h).unwrap();
        prop_assert_eq!(compare_maps(&op.result.y, &h.y), None);
    }

    #[test]
    fn modes_are_bilinear(x in prop::collection::vec(-4i64..5, 3), y in prop::collection::vec(-4i64..5, 3), n in -4i64..4) {
        let (h, _) = build_heisenberg(&int(1), 4).unwrap();
        let u = Vector::from_entries([(1, int(x[0])), (2, int(x[1])), (4, int(x[2]))]);
        let u2 = Vector::from_entries([(0, int(y[0])), (3, int(y[1])), (5, int(y[2]))]);
        let v = Vector::from_entries([(1, int(y[0])), (2, int(x[1]))]);
        let lhs = h.y.mode_apply(&u.add(&u2.scale(&int(3))), n, &v).unwrap();
        let a = h.y.mode_apply(&u, n, &v).unwrap();
        let b = h.y.mode_apply(&u2, n, &v).unwrap();
        prop_assert_eq!(lhs.exact, a.exact && b.exact);
        prop_assert_eq!(lhs.value, a.value.add(&b.value.scale(&int(3))));
    }

    /// Weak associativity holds for homogeneous combinations, not only basis
    /// vectors.
    #[test]
    fn associativity_on_combinations(c in prop::collection::vec(-3i64..4, 4)) {
        let (h, _) = build_heisenberg(&int(1), 5).unwrap();
        let ctx = Ctx::algebra(&h);
        let v = |l: &str| h.vector(l).unwrap();
        let u2 = v("a-2").scale(&int(c[0])).add(&v("a-1a-1").scale(&int(c[1])));
        let w = v("a-1").scale(&int(c[2]));
        let u1 = v("a-1").scale(&int(c[3]));
        let o = check_weak_associativity(&ctx, &Elem::v(u1), &Elem::v(u2), &Elem::v(w), None).unwrap();
        prop_assert!(o.passed(), "{:?}", o.witness);
    }

    #[test]
    fn cyclic_group_algebras(n in 1usize..6) {
        let labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let table: Vec<Vec<Vector>> = (0..n).map(|i| (0..n).map(|j| Vector::basis((i + j) % n)).collect()).collect();
        let v = Arc::new(build_matrix_mosva("Z/n", &refs, &table, &Vector::basis(0)).unwrap());
        let r = run_suite(&Ctx::algebra(&v), Suite::All, &SuiteOptions::default()).unwrap();
        prop_assert!(r.passed(), "{}", r.to_text());
        prop_assert_eq!(compare_maps(&opposite_mosva(&v).unwrap().result.y, &v.y), None);
    }
}
