//! The ten acceptance criteria, one PASS/FAIL line each on stderr.
//!
//! Lines go straight to the stderr handle so they show up without
//! `--nocapture`.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use mosva_core::constructions::{contragredient_module, opposite_mosva, transport_module, Direction};
use mosva_core::exact_laurent::scalar::{format_scalar, int, to_i64, Scalar};
use mosva_core::graded::{DualVector, Vector};
use mosva_core::report::Verdict;
use mosva_core::structures::{AlgebraInstance, Ctx, Elem, ModuleInstance, Side, Sp, VertexMap};
use mosva_core::verification::{
    audit_pole_order, basis_triples, check_contragredient_obligations, check_region_consistency,
    check_weak_associativity, correlate, estimate_poles, reconstruct_rational, run_suite, CorrelationMode, Suite,
    SuiteOptions,
};
use mosva_core::workbench::{build_heisenberg, matrix_algebra, regular_module};
use mosva_core::Error;

struct Line {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Line {
    Line { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Line {
    Line { ok: false, detail: detail.into() }
}

fn say(text: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{text}");
}

fn run(n: usize, f: impl FnOnce() -> Line) -> (bool, Duration) {
    let t = Instant::now();
    let line = f();
    let dt = t.elapsed();
    let verdict = if line.ok { "PASS" } else { "FAIL" };
    say(&format!("criterion {n:>2}: {verdict} [{:.2?}] {}", dt, line.detail));
    (line.ok, dt)
}

fn weight(s: &Scalar) -> i64 {
    to_i64(s).unwrap()
}

/// Every entry certified in both maps where both inputs have weight at most
/// `max_in`: returns (compared, first difference).
fn compare_low(a: &VertexMap, b: &VertexMap, max_in: Option<i64>) -> (usize, Option<String>) {
    let mut compared = 0;
    for x in 0..a.first().dim() {
        for y in 0..a.second().dim() {
            if let Some(m) = max_in {
                if weight(a.first().weight(x)) > m || weight(a.second().weight(y)) > m {
                    continue;
                }
            }
            for n in a.modes(x, y) {
                let (ra, rb) = (a.mode_basis(x, n, y), b.mode_basis(x, n, y));
                if ra.exact && rb.exact {
                    compared += 1;
                    if ra.value != rb.value {
                        return (compared, Some(a.entry_name(x, y, n)));
                    }
                }
            }
        }
    }
    (compared, None)
}

fn same_algebra(a: &AlgebraInstance, b: &AlgebraInstance) -> Option<String> {
    if let (_, Some(d)) = compare_low(&a.y, &b.y, None) {
        return Some(d);
    }
    if a.y.entries() != b.y.entries() {
        return Some("stored entries differ".into());
    }
    if a.deriv != b.deriv || a.l1 != b.l1 || a.vacuum != b.vacuum {
        return Some("D, L(1) or vacuum differ".into());
    }
    None
}

fn criterion_1() -> Line {
    let t = Instant::now();
    let m = Arc::new(matrix_algebra(2).unwrap());
    let r = run_suite(&Ctx::algebra(&m), Suite::All, &SuiteOptions::default()).unwrap();
    if !r.passed() {
        return fail(format!("check --suite all: {}", r.to_text()));
    }
    let op = opposite_mosva(&m).unwrap().result;
    // E_ij E_kl = delta_jk E_il, computed here from the labels.
    let s = &m.space;
    let unit = |l: &str| (l.as_bytes()[1] - b'0', l.as_bytes()[2] - b'0');
    let mut pairs = 0;
    for a in 0..4 {
        for b in 0..4 {
            let (i, j) = unit(s.label(a));
            let (k, l) = unit(s.label(b));
            let ba = if l == i { s.basis_vector(&format!("E{k}{j}")).unwrap() } else { Vector::zero() };
            if op.y.mode_basis(a, -1, b).value != ba {
                return fail(format!("Y^s_-1({}){} is not {}{}", s.label(a), s.label(b), s.label(b), s.label(a)));
            }
            pairs += 1;
        }
    }
    let back = opposite_mosva(&op).unwrap().result;
    if let Some(d) = same_algebra(&back, &m) {
        return fail(format!("double opposite differs: {d}"));
    }
    let dt = t.elapsed();
    if dt >= Duration::from_secs(1) {
        return fail(format!("runtime {dt:.2?} >= 1 s"));
    }
    pass(format!("suite all passes; Y^s_-1(u)v = vu on {pairs} pairs; (M2^op)^op = M2"))
}

fn criterion_2() -> Line {
    let t = Instant::now();
    let (h, _) = build_heisenberg(&int(1), 6).unwrap();
    let ctx = Ctx::algebra(&h);
    for suite in [Suite::Structural, Suite::Vacuum, Suite::D, Suite::Grading, Suite::Mobius] {
        let r = run_suite(&ctx, suite, &SuiteOptions::default()).unwrap();
        if r.verdict() != Verdict::Pass {
            return fail(format!("{suite} suite: {}", r.to_text()));
        }
    }
    let triples = basis_triples(&ctx, [Sp::V, Sp::V, Sp::V], Some(&int(4))).unwrap();
    let mut p_top = 0;
    for (a, b, c) in &triples {
        let o = check_weak_associativity(&ctx, a, b, c, None).unwrap();
        match o.p1 {
            Some(p) if p <= 6 => p_top = p_top.max(p),
            _ => return fail(format!("weak associativity on {}: p1 = {:?}", o.inputs, o.p1)),
        }
    }
    let dt = t.elapsed();
    if dt >= Duration::from_secs(60) {
        return fail(format!("runtime {dt:.2?} >= 60 s"));
    }
    pass(format!(
        "structural, vacuum, D, grading and Mobius pass; weak associativity on {} triples, max minimal p1 = {p_top}",
        triples.len()
    ))
}

fn criterion_3() -> Line {
    let (h, _) = build_heisenberg(&int(1), 6).unwrap();
    let op = opposite_mosva(&h).unwrap().result;
    match compare_low(&op.y, &h.y, Some(4)) {
        (n, None) if n > 0 => pass(format!("Y^s = Y_V on {n} certified entries with input weights <= 4")),
        (_, Some(d)) => fail(format!("{d} differs")),
        _ => fail("nothing compared"),
    }
}

fn criterion_4() -> Line {
    let (h, _) = build_heisenberg(&int(1), 6).unwrap();
    let m = Arc::new(matrix_algebra(2).unwrap());
    for v in [&h, &m] {
        let back = opposite_mosva(&opposite_mosva(v).unwrap().result).unwrap().result;
        if let Some(d) = same_algebra(&back, v) {
            return fail(format!("{}: {d}", v.name));
        }
    }
    pass("(V^op)^op = V for Heisenberg cutoff 6 and M2")
}

fn module_maps_agree(a: &ModuleInstance, b: &ModuleInstance) -> Option<String> {
    for (x, y) in [(&a.y_left, &b.y_left), (&a.y_right, &b.y_right)] {
        match (x, y) {
            (Some(x), Some(y)) => {
                if let (_, Some(d)) = compare_low(x, y, None) {
                    return Some(d);
                }
            }
            (None, None) => {}
            _ => return Some("different sides".into()),
        }
    }
    None
}

fn criterion_5() -> Line {
    let (h, fock) = build_heisenberg(&int(1), 5).unwrap();
    let m = Arc::new(matrix_algebra(2).unwrap());
    let cases = [
        (fock.clone(), Direction::LeftToRightOp, h.clone()),
        (regular_module(&h, Side::Right), Direction::RightToLeftOp, h.clone()),
        (regular_module(&m, Side::Left), Direction::LeftToRightOp, m.clone()),
        (regular_module(&m, Side::Right), Direction::RightToLeftOp, m.clone()),
    ];
    let mut compared = 0;
    for (w, dir, v) in cases {
        let there = transport_module(&w, dir, None).unwrap();
        let back = transport_module(&there, dir.inverse(), Some(v)).unwrap();
        if let Some(d) = module_maps_agree(&back, &w) {
            return fail(format!("{} via {dir}: {d}", w.name));
        }
        compared += 1;
    }
    pass(format!("{compared} round trips (Fock and M2, both sides) are the identity"))
}

fn criterion_6() -> Line {
    let (_, fock) = build_heisenberg(&int(1), 5).unwrap();
    let r = check_contragredient_obligations(&fock, None, &SuiteOptions::default(), 4, 6).unwrap();
    if r.verdict() != Verdict::Pass {
        return fail(r.to_text());
    }
    let dual = contragredient_module(&fock, None).unwrap();
    let ddual = contragredient_module(&dual, None).unwrap();
    if let (_, Some(d)) = compare_low(ddual.left().unwrap(), fock.left().unwrap(), None) {
        return fail(format!("W'' differs at {d}"));
    }
    if ddual.deriv.action() != fock.deriv.action() || ddual.l1.as_ref().map(|o| o.action()) != fock.l1.as_ref().map(|o| o.action()) {
        return fail("W'' has different D or L(1)");
    }
    pass(format!("{} obligations pass; W'' = W on certified entries", r.obligations.len()))
}

/// Heisenberg correlators `<b, Y(u1, z1)...Y(un, zn) c>`, n = 2, 3, with
/// `wt b + sum wt u_i + wt c <= max`.
fn correlator_set(h: &AlgebraInstance, max: i64) -> Vec<(usize, Vec<usize>, usize)> {
    let s = &h.space;
    let low: Vec<usize> = (0..s.dim()).filter(|&i| weight(s.weight(i)) <= max).collect();
    let wt = |i: usize| weight(s.weight(i));
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..n + 2 {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    low.iter().map(move |&i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .filter(|t| t.iter().map(|&i| wt(i)).sum::<i64>() <= max)
                .collect();
        }
        for t in tuples {
            out.push((t[0], t[1..=n].to_vec(), t[n + 1]));
        }
    }
    out
}

fn ops_of(ops: &[usize]) -> Vec<(Elem, String)> {
    ops.iter().enumerate().map(|(k, &u)| (Elem::v(Vector::basis(u)), format!("z{}", k + 1))).collect()
}

const REGION_CUTOFF: u32 = 8;

fn criterion_7() -> Line {
    let (h, _) = build_heisenberg(&int(1), 6).unwrap();
    let ctx = Ctx::algebra(&h);
    let a = Elem::v(h.vector("a-1").unwrap());
    let ops = vec![(a.clone(), "z1".to_string()), (a.clone(), "z2".to_string())];
    let one = Elem::v(h.vacuum.clone());
    let s = correlate(&ctx, &DualVector(h.vacuum.clone()), &ops, &one, CorrelationMode::Product, None).unwrap();
    let rec = reconstruct_rational(&s, &estimate_poles(&ctx, &[a.clone(), a], &one).unwrap()).unwrap();
    let Some(f) = rec.function else { return fail(format!("2-point not certified: {}", rec.explanation)) };
    let level_over_diag = f.pole_diag(0, 1) == 2
        && f.pole_axis(0) == 0
        && f.pole_axis(1) == 0
        && f.numerator().len() == 1
        && f.numerator().coeff(&[0, 0]) == Some(&int(1));
    if !level_over_diag {
        return fail(format!("2-point reconstructs to {f}"));
    }

    let (h, _) = build_heisenberg(&int(1), REGION_CUTOFF).unwrap();
    let ctx = Ctx::algebra(&h);
    let sp = &h.space;
    let (mut checked, mut zero) = (0, 0);
    for (b, ops, c) in correlator_set(&h, 4) {
        let elems: Vec<Elem> = ops.iter().map(|&u| Elem::v(Vector::basis(u))).collect();
        let ket = Elem::v(Vector::basis(c));
        let s = correlate(&ctx, &DualVector(Vector::basis(b)), &ops_of(&ops), &ket, CorrelationMode::Product, None).unwrap();
        let poles = estimate_poles(&ctx, &elems, &ket).unwrap();
        let rec = reconstruct_rational(&s, &poles).unwrap();
        let Some(f) = rec.function else {
            return fail(format!("{} not certified: {}", s.description, rec.explanation));
        };
        if f.is_zero() {
            zero += 1;
            continue;
        }
        let degree0 = weight(sp.weight(b)) - ops.iter().map(|&u| weight(sp.weight(u))).sum::<i64>() - weight(sp.weight(c));
        let pole_sum: i64 = poles.p_axis.values().sum::<i64>() + poles.p_diag.values().sum::<i64>();
        let raw: Vec<i64> = rec.numerator.total_degrees();
        let reduced = f.numerator_degree().unwrap() - f.denominator().total_degrees()[0];
        if rec.degree != degree0 + pole_sum || raw != vec![rec.degree] || reduced != degree0 {
            return fail(format!(
                "{}: formula {} vs numerator degrees {raw:?}, reduced degree {reduced} vs {degree0}",
                s.description, rec.degree
            ));
        }
        checked += 1;
    }
    pass(format!(
        "<1, Y(a,z1)Y(a,z2)1> = 1/(z1-z2)^2 at level 1; degree formula matches {checked} nonzero 2- and 3-point \
         correlators ({zero} vanish; cutoff {REGION_CUTOFF})"
    ))
}

fn criterion_8() -> Line {
    let (h, _) = build_heisenberg(&int(1), REGION_CUTOFF).unwrap();
    let ctx = Ctx::algebra(&h);
    let set = correlator_set(&h, 4);
    let results = mosva_core::par::map(&set, |(b, ops, c)| {
        check_region_consistency(&ctx, &DualVector(Vector::basis(*b)), &ops_of(ops), &Elem::v(Vector::basis(*c)), 6)
    });
    for r in results {
        match r {
            Ok(r) if r.verdict() == Verdict::Pass => {}
            Ok(r) => return fail(r.to_text()),
            Err(Error::WindowInsufficient { message, .. }) => return fail(format!("insufficient: {message}")),
            Err(e) => return fail(e.to_string()),
        }
    }
    pass(format!(
        "{} correlators with wt b + sum wt u_i + wt c <= 4 match in both regions to order 6 (cutoff {REGION_CUTOFF})",
        set.len()
    ))
}

fn criterion_9() -> Line {
    let (h, _) = build_heisenberg(&int(1), 6).unwrap();
    let ctx = Ctx::algebra(&h);
    let samples = basis_triples(&ctx, [Sp::V, Sp::V, Sp::V], Some(&int(4))).unwrap();
    let audit = audit_pole_order(&ctx, &samples, None).unwrap();
    let Some(c) = audit.witness.constant_c.clone() else { return fail("no constant C") };
    for (a, b, w) in &samples {
        let p = check_weak_associativity(&ctx, a, b, w, None).unwrap().p1.unwrap();
        if int(p) > ctx.weight_of(a).unwrap() + ctx.weight_of(w).unwrap() + &c {
            return fail(format!("p1 = {p} exceeds the bound with C = {}", format_scalar(&c)));
        }
    }
    let m = Arc::new(matrix_algebra(2).unwrap());
    let mctx = Ctx::algebra(&m);
    let msamples = basis_triples(&mctx, [Sp::V, Sp::V, Sp::V], None).unwrap();
    let maudit = audit_pole_order(&mctx, &msamples, None).unwrap();
    if maudit.witness.constant_c != Some(int(0)) || maudit.samples.iter().any(|(_, p)| *p != 0) {
        return fail(format!("matrix audit: {}", maudit.to_text()));
    }
    pass(format!(
        "Heisenberg: C = {} over {} samples; M2: C = 0 and p1 = 0 on all {} samples",
        format_scalar(&c),
        samples.len(),
        msamples.len()
    ))
}

/// Stored entries ordered by output weight, so cheap low entries come first.
fn entries_by_weight(v: &AlgebraInstance) -> Vec<(usize, usize, i64)> {
    let mut keys: Vec<_> = v.y.entries().keys().copied().collect();
    keys.sort_by_key(|&(a, b, n)| (v.y.target_weight(a, b, n), a, b, n));
    keys
}

/// First stored entry whose doubling the suite reports as a failure with a
/// witness.
fn detecting_entry(v: &AlgebraInstance, suite: Suite) -> Option<(String, String)> {
    let opts = SuiteOptions::default();
    for (a, b, n) in entries_by_weight(v) {
        let mut bad = v.clone();
        let e = bad.y.get(a, b, n).unwrap().scale(&int(2));
        bad.y.insert(a, b, n, e);
        let r = run_suite(&Ctx::algebra(&bad), suite, &opts).unwrap();
        if let Some(w) = r.first_failure().and_then(|o| o.witness.clone()) {
            return Some((v.y.entry_name(a, b, n), w));
        }
    }
    None
}

fn criterion_10() -> (Line, Vec<(String, Suite)>) {
    let (h, _) = build_heisenberg(&int(1), 4).unwrap();
    let m = matrix_algebra(2).unwrap();
    let mut missed = Vec::new();
    let mut found = Vec::new();
    for v in [&*h, &m] {
        for suite in Suite::EACH {
            match detecting_entry(v, suite) {
                Some((entry, witness)) => {
                    say(&format!("    {} / {suite}: 2 * {entry} caught: {witness}", v.name));
                    found.push((v.name.clone(), suite));
                }
                None => {
                    say(&format!("    {} / {suite}: no single doubled entry is detected", v.name));
                    missed.push(format!("{} / {suite}", v.name));
                }
            }
        }
    }
    let line = if missed.is_empty() {
        pass(format!("all {} suite/example pairs detect a doubled entry", found.len()))
    } else {
        fail(format!(
            "{} of 12 suite/example pairs detect a doubled entry; undetectable: {}",
            found.len(),
            missed.join(", ")
        ))
    };
    (line, found)
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    results.push(run(1, criterion_1));
    results.push(run(2, criterion_2));
    results.push(run(3, criterion_3));
    results.push(run(4, criterion_4));
    results.push(run(5, criterion_5));
    results.push(run(6, criterion_6));
    results.push(run(7, criterion_7));
    results.push(run(8, criterion_8));
    results.push(run(9, criterion_9));
    let mut found = Vec::new();
    results.push(run(10, || {
        let (line, f) = criterion_10();
        found = f;
        line
    }));
    for (i, (ok, _)) in results.iter().take(9).enumerate() {
        assert!(ok, "criterion {} failed", i + 1);
    }
    // Scaling an entry keeps it homogeneous, so the structural and grading
    // suites cannot see it; with D = L(1) = 0 the matrix D and Mobius
    // suites are vacuous. Every other pair must detect.
    let expected = [
        ("Heisenberg level 1 cutoff 4", Suite::Vacuum),
        ("Heisenberg level 1 cutoff 4", Suite::D),
        ("Heisenberg level 1 cutoff 4", Suite::Assoc),
        ("Heisenberg level 1 cutoff 4", Suite::Mobius),
        ("matrix M2", Suite::Vacuum),
        ("matrix M2", Suite::Assoc),
    ];
    for (name, suite) in expected {
        assert!(found.iter().any(|(n, s)| n == name && *s == suite), "{name} / {suite} missed the fault");
    }
}
