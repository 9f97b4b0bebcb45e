//! Vacuum, `D`, grading and Mobius suites as mode-level identities.

use num_traits::Zero;

use crate::error::Error;
use crate::exact_laurent::poly::{Laurent, Window};
use crate::exact_laurent::scalar::{factorial, format_scalar, int, Scalar};
use crate::graded::{GradedOp, Vector};
use crate::report::{Obligation, Report};
use crate::structures::{Ctx, Sp, VertexMap};

/// The vertex maps present in the context, as `(first, second)` spaces.
pub fn map_pairs(ctx: &Ctx) -> Vec<(Sp, Sp)> {
    let mut out = vec![(Sp::V, Sp::V)];
    if let Some(m) = ctx.module {
        if m.y_left.is_some() {
            out.push((Sp::V, Sp::W));
        }
        if m.y_right.is_some() {
            out.push((Sp::W, Sp::V));
        }
    }
    out
}

/// Modes of `Y(a, x)b` that can be nonzero, widened by `pad` on each side.
fn mode_range(m: &VertexMap, a: usize, b: usize, pad: i64) -> Vec<i64> {
    let modes = m.modes(a, b);
    match (modes.first(), modes.last()) {
        (Some(&lo), Some(&hi)) => (lo - pad..=hi + pad).collect(),
        _ => Vec::new(),
    }
}

/// Running tally of an identity checked over many inputs.
#[derive(Default)]
struct Tally {
    checked: usize,
    skipped: usize,
    witness: Option<String>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    /// Records one comparison; `None` means a side touched absent data.
    fn record(&mut self, outcome: Option<bool>, describe: impl FnOnce() -> String) {
        match outcome {
            None => self.skipped += 1,
            Some(true) => self.checked += 1,
            Some(false) => {
                self.checked += 1;
                if self.witness.is_none() {
                    self.witness = Some(describe());
                }
            }
        }
    }

    fn obligation(self, name: String, inputs: String) -> Obligation {
        let window = format!("{} certified comparisons, {} skipped as absent", self.checked, self.skipped);
        Obligation::from_witness(name, inputs, window, self.witness)
    }
}

fn scan(n: usize, f: impl Fn(usize) -> Result<Tally, Error> + Sync + Send) -> Result<Tally, Error> {
    let idx: Vec<usize> = (0..n).collect();
    let mut total = Tally::default();
    for t in crate::par::map(&idx, |&i| f(i)) {
        total.merge(t?);
    }
    Ok(total)
}

fn op_apply(op: &GradedOp, v: &Vector) -> Result<Option<Vector>, Error> {
    let r = op.apply(v)?;
    Ok(r.exact.then_some(r.value))
}

fn map_name(ctx: &Ctx, pair: (Sp, Sp)) -> String {
    ctx.map_for(pair.0, pair.1).map(|(m, _)| m.kind().to_string()).unwrap_or_default()
}

/// Identity `Y(1, x) = id` and creation `Y(a, x)1 = e^{xD}a`.
pub fn check_vacuum(ctx: &Ctx) -> Result<Report, Error> {
    let mut report = Report::new("vacuum suite");
    let vac = ctx.algebra.vacuum.clone();
    for pair in map_pairs(ctx) {
        let (m, _) = ctx.map_for(pair.0, pair.1)?;
        let name = map_name(ctx, pair);
        if pair.0 == Sp::V {
            let second = ctx.space(pair.1)?;
            let t = scan(second.dim(), |b| {
                let mut t = Tally::default();
                let a = vac.support().next().unwrap_or(0);
                for n in mode_range(m, a, b, 1) {
                    let r = m.mode_apply(&vac, n, &Vector::basis(b))?;
                    let want = if n == -1 { Vector::basis(b) } else { Vector::zero() };
                    t.record(r.exact.then(|| r.value == want), || {
                        format!(
                            "{name}_{n}(1){} = {}, expected {}",
                            second.label(b),
                            m.target().format_vector(&r.value),
                            m.target().format_vector(&want)
                        )
                    });
                }
                Ok(t)
            })?;
            report.push(t.obligation(format!("{name} identity property"), format!("all {} basis vectors", second.dim())));
        }
        if pair.1 == Sp::V {
            let first = ctx.space(pair.0)?;
            let d = ctx.deriv(pair.0)?;
            let t = scan(first.dim(), |a| {
                let mut t = Tally::default();
                let e = Vector::basis(a);
                for n in mode_range(m, a, vac.support().next().unwrap_or(0), 1) {
                    let r = m.mode_apply(&e, n, &vac)?;
                    let want = if n >= 0 {
                        Some(Vector::zero())
                    } else {
                        let k = (-n - 1) as u64;
                        let mut cur = Some(e.clone());
                        for _ in 0..k {
                            cur = match cur {
                                Some(c) => op_apply(d, &c)?,
                                None => None,
                            };
                        }
                        cur.map(|c| c.scale(&factorial(k).recip()))
                    };
                    let outcome = match (&want, r.exact) {
                        (Some(w), true) => Some(&r.value == w),
                        _ => None,
                    };
                    t.record(outcome, || {
                        format!(
                            "{name}_{n}({})1 = {}, expected {}",
                            first.label(a),
                            m.target().format_vector(&r.value),
                            m.target().format_vector(want.as_ref().unwrap())
                        )
                    });
                }
                Ok(t)
            })?;
            report.push(t.obligation(
                format!("{name} creation property (e^{{xD}})"),
                format!("all {} basis vectors", first.dim()),
            ));
        }
    }
    Ok(report)
}

/// `D`-derivative `Y_n(Da)b = -n Y_{n-1}(a)b`, `D`-commutator
/// `D Y_n(a)b - Y_n(a)Db = Y_n(Da)b`, and the conjugation identity
/// `Y(a, x+y)b = Y(e^{yD}a, x)b` through a Taylor shift.
pub fn check_d(ctx: &Ctx, shift_order: i64) -> Result<Report, Error> {
    let mut report = Report::new("D suite");
    for pair in map_pairs(ctx) {
        let (m, tsp) = ctx.map_for(pair.0, pair.1)?;
        let name = map_name(ctx, pair);
        let first = ctx.space(pair.0)?;
        let second = ctx.space(pair.1)?;
        let d1 = ctx.deriv(pair.0)?;
        let d2 = ctx.deriv(pair.1)?;
        let dt = ctx.deriv(tsp)?;
        let deriv = scan(first.dim(), |a| {
            let mut t = Tally::default();
            let ea = Vector::basis(a);
            let da = op_apply(d1, &ea)?;
            for b in 0..second.dim() {
                let eb = Vector::basis(b);
                for n in mode_range(m, a, b, 2) {
                    let rhs = m.mode_apply(&ea, n - 1, &eb)?;
                    let lhs = match &da {
                        Some(v) => Some(m.mode_apply(v, n, &eb)?),
                        None => None,
                    };
                    let outcome = match &lhs {
                        Some(l) if l.exact && rhs.exact => Some(l.value == rhs.value.scale(&int(-n))),
                        _ => None,
                    };
                    t.record(outcome, || {
                        format!("{name}_{n}(D {}){} differs from -{n} {name}_{}({}){}", first.label(a), second.label(b), n - 1, first.label(a), second.label(b))
                    });
                }
            }
            Ok(t)
        })?;
        report.push(deriv.obligation(format!("{name} D-derivative"), "all basis pairs".into()));

        let comm = scan(first.dim(), |a| {
            let mut t = Tally::default();
            let ea = Vector::basis(a);
            let da = op_apply(d1, &ea)?;
            for b in 0..second.dim() {
                let eb = Vector::basis(b);
                let db = op_apply(d2, &eb)?;
                for n in mode_range(m, a, b, 1) {
                    let y = m.mode_apply(&ea, n, &eb)?;
                    let outcome = (|| -> Result<Option<bool>, Error> {
                        let (Some(da), Some(db)) = (&da, &db) else { return Ok(None) };
                        if !y.exact {
                            return Ok(None);
                        }
                        let Some(l1) = op_apply(dt, &y.value)? else { return Ok(None) };
                        let l2 = m.mode_apply(&ea, n, db)?;
                        let r = m.mode_apply(da, n, &eb)?;
                        if !l2.exact || !r.exact {
                            return Ok(None);
                        }
                        Ok(Some(l1.sub(&l2.value) == r.value))
                    })()?;
                    t.record(outcome, || {
                        format!("[D, {name}_{n}({})] {} differs from {name}_{n}(D {}){}", first.label(a), second.label(b), first.label(a), second.label(b))
                    });
                }
            }
            Ok(t)
        })?;
        report.push(comm.obligation(format!("{name} D-commutator"), "all basis pairs".into()));

        let conj = scan(first.dim(), |a| {
            let mut t = Tally::default();
            for b in 0..second.dim() {
                match conjugation_matches(ctx, pair, a, b, shift_order)? {
                    None => t.skipped += 1,
                    Some(None) => t.checked += 1,
                    Some(Some(w)) => {
                        t.checked += 1;
                        if t.witness.is_none() {
                            t.witness = Some(format!("Y({}, x+y){}: {w}", first.label(a), second.label(b)));
                        }
                    }
                }
            }
            Ok(t)
        })?;
        report.push(conj.obligation(
            format!("{name} D-conjugation Y(a, x+y) = Y(e^{{yD}}a, x)"),
            format!("all basis pairs, y-order {shift_order}"),
        ));
    }
    Ok(report)
}

/// `Some(None)` on agreement, `Some(Some(witness))` on disagreement and
/// `None` when nothing is certified.
fn conjugation_matches(
    ctx: &Ctx,
    pair: (Sp, Sp),
    a: usize,
    b: usize,
    order: i64,
) -> Result<Option<Option<String>>, Error> {
    let (m, _) = ctx.map_for(pair.0, pair.1)?;
    let d = ctx.deriv(pair.0)?;
    let ea = Vector::basis(a);
    let eb = Vector::basis(b);
    let s = m.series(&ea, &eb, "x")?;
    let vars = vec!["x".to_string(), "y".to_string()];
    let mut rhs = Laurent::zero(vars.clone());
    let mut cur = ea.clone();
    let mut reached = order;
    for k in 0..=order {
        let sk = m.series(&cur, &eb, "x")?;
        for (e, c) in sk.poly.terms() {
            rhs.add_term(vec![e[0], k], &c.scale(&factorial(k as u64).recip()));
        }
        if k == order {
            break;
        }
        let next = d.apply(&cur)?;
        if !next.exact {
            reached = k;
            break;
        }
        cur = next.value;
        if cur.is_zero() {
            break;
        }
    }
    let mut window = Window::natural(vars.clone());
    window.tail_bounds = vec![s.window.tail_bounds[0], Some(reached)];
    let shifted = s.poly.with_vars(&["x".to_string()])?.taylor_shift("x", ("x1", "y"), "y", order)?;
    let mut lhs = Laurent::zero(vars.clone());
    for (e, c) in shifted.terms() {
        lhs.add_term(e.clone(), c);
    }
    let lhs = lhs.restrict(&window);
    let rhs = rhs.restrict(&window);
    let target = m.target();
    let mut keys: Vec<&Vec<i64>> = lhs.terms().map(|(e, _)| e).chain(rhs.terms().map(|(e, _)| e)).collect();
    keys.sort();
    keys.dedup();
    for e in keys {
        let l = lhs.coeff(e).cloned().unwrap_or_default();
        let r = rhs.coeff(e).cloned().unwrap_or_default();
        if l != r {
            return Ok(Some(Some(format!(
                "coefficient of x^{} y^{}: {} vs {}",
                e[0],
                e[1],
                target.format_vector(&l),
                target.format_vector(&r)
            ))));
        }
    }
    Ok(Some(None))
}

/// `[d, Y_n(a)] = (wt a - n - 1) Y_n(a)` on every basis vector, plus the
/// module grading bounded below.
pub fn check_grading(ctx: &Ctx) -> Result<Report, Error> {
    let mut report = Report::new("grading suite");
    for pair in map_pairs(ctx) {
        let (m, tsp) = ctx.map_for(pair.0, pair.1)?;
        let name = map_name(ctx, pair);
        let first = ctx.space(pair.0)?;
        let second = ctx.space(pair.1)?;
        let dt = ctx.space(tsp)?;
        let d_t = crate::graded::GradedOp::grading(dt.clone());
        let d_2 = crate::graded::GradedOp::grading(second.clone());
        let t = scan(first.dim(), |a| {
            let mut t = Tally::default();
            let ea = Vector::basis(a);
            for b in 0..second.dim() {
                let eb = Vector::basis(b);
                let db = d_2.apply(&eb)?.value;
                for n in mode_range(m, a, b, 1) {
                    let y = m.mode_apply(&ea, n, &eb)?;
                    if !y.exact {
                        t.skipped += 1;
                        continue;
                    }
                    let lhs = d_t.apply(&y.value)?.value.sub(&m.mode_apply(&ea, n, &db)?.value);
                    let rhs = y.value.scale(&(first.weight(a) - int(n) - int(1)));
                    t.record(Some(lhs == rhs), || {
                        format!(
                            "[d, {name}_{n}({})]{} = {}, expected weight multiple {}",
                            first.label(a),
                            second.label(b),
                            dt.format_vector(&lhs),
                            format_scalar(&(first.weight(a) - int(n) - int(1)))
                        )
                    });
                }
            }
            Ok(t)
        })?;
        report.push(t.obligation(format!("{name} d-commutator"), "all basis pairs".into()));
    }
    for sp in [Sp::V, Sp::W] {
        if let Ok(s) = ctx.space(sp) {
            let which = if sp == Sp::V { "algebra" } else { "module" };
            let w = s.min_weight();
            report.push(Obligation::from_witness(
                format!("{which} weights bounded below"),
                format!("{} basis vectors", s.dim()),
                w.as_ref().map(|w| format!("lowest weight {}", format_scalar(w))).unwrap_or_default(),
                w.is_none().then(|| "empty basis".to_string()),
            ));
        }
    }
    let vac_ok = ctx.algebra.space.weight_of(&ctx.algebra.vacuum).is_some_and(|w| w.is_zero());
    report.push(Obligation::from_witness(
        "vacuum has weight 0",
        "1",
        "",
        (!vac_ok).then(|| "vacuum is not homogeneous of weight 0".to_string()),
    ));
    Ok(report)
}

/// sl(2) brackets, the `L(0)`- and `L(1)`-commutator formulas at mode level,
/// and nilpotency of `N0`.
pub fn check_mobius(ctx: &Ctx) -> Result<Report, Error> {
    let mut report = Report::new("Mobius suite");
    let mut spaces = vec![Sp::V];
    if ctx.module.is_some() {
        spaces.push(Sp::W);
    }
    for &sp in &spaces {
        let which = if sp == Sp::V { "V" } else { "W" };
        let Some(l1) = ctx.l1(sp)? else {
            report.push(Obligation::fail("Mobius structure present", which, "", format!("no L(1) on {which}")));
            continue;
        };
        let space = ctx.space(sp)?;
        let lm1 = ctx.deriv(sp)?;
        let l0 = ctx.l0(sp)?;
        let mut t = Tally::default();
        for i in 0..space.dim() {
            let v = Vector::basis(i);
            let checks: [(&str, &GradedOp, &GradedOp, &GradedOp, Scalar); 3] = [
                ("[L(0), L(-1)] = L(-1)", &l0, lm1, lm1, int(1)),
                ("[L(0), L(1)] = -L(1)", &l0, l1, l1, int(-1)),
                ("[L(-1), L(1)] = -2L(0)", lm1, l1, &l0, int(-2)),
            ];
            for (label, x, y, z, c) in checks {
                let outcome = (|| -> Result<Option<bool>, Error> {
                    let Some(yv) = op_apply(y, &v)? else { return Ok(None) };
                    let Some(xyv) = op_apply(x, &yv)? else { return Ok(None) };
                    let Some(xv) = op_apply(x, &v)? else { return Ok(None) };
                    let Some(yxv) = op_apply(y, &xv)? else { return Ok(None) };
                    let Some(zv) = op_apply(z, &v)? else { return Ok(None) };
                    Ok(Some(xyv.sub(&yxv) == zv.scale(&c)))
                })()?;
                t.record(outcome, || format!("{label} fails on {} in {which}", space.label(i)));
            }
        }
        report.push(t.obligation(format!("sl(2) brackets on {which}"), format!("{} basis vectors", space.dim())));
        if sp == Sp::W {
            if let Some(n0) = ctx.module.and_then(|m| m.n0.as_ref()) {
                report.push(Obligation::from_witness(
                    "N0 nilpotent",
                    "N0",
                    "",
                    (!n0.is_nilpotent()).then(|| "N0 is not nilpotent".to_string()),
                ));
            }
        }
    }
    if report.obligations.iter().any(|o| o.name == "Mobius structure present") {
        return Ok(report);
    }
    for pair in map_pairs(ctx) {
        let (m, tsp) = ctx.map_for(pair.0, pair.1)?;
        let name = map_name(ctx, pair);
        let first = ctx.space(pair.0)?;
        let second = ctx.space(pair.1)?;
        let l0_1 = ctx.l0(pair.0)?;
        let l0_2 = ctx.l0(pair.1)?;
        let l0_t = ctx.l0(tsp)?;
        let l1_1 = ctx.l1(pair.0)?.unwrap();
        let l1_2 = ctx.l1(pair.1)?.unwrap();
        let l1_t = ctx.l1(tsp)?.unwrap();
        let d_1 = ctx.deriv(pair.0)?;
        let l0 = scan(first.dim(), |a| {
            let mut t = Tally::default();
            let ea = Vector::basis(a);
            let l0a = l0_1.apply(&ea)?.value;
            for b in 0..second.dim() {
                let eb = Vector::basis(b);
                let l0b = l0_2.apply(&eb)?.value;
                for n in mode_range(m, a, b, 1) {
                    let outcome = (|| -> Result<Option<bool>, Error> {
                        let y = m.mode_apply(&ea, n, &eb)?;
                        let y2 = m.mode_apply(&ea, n, &l0b)?;
                        let y3 = m.mode_apply(&l0a, n, &eb)?;
                        if !(y.exact && y2.exact && y3.exact) {
                            return Ok(None);
                        }
                        let lhs = l0_t.apply(&y.value)?.value.sub(&y2.value);
                        let rhs = y3.value.add(&y.value.scale(&int(-n - 1)));
                        Ok(Some(lhs == rhs))
                    })()?;
                    t.record(outcome, || {
                        format!("[L(0), {name}_{n}({})]{} differs from the commutator formula", first.label(a), second.label(b))
                    });
                }
            }
            Ok(t)
        })?;
        report.push(l0.obligation(format!("{name} L(0)-commutator"), "all basis pairs".into()));
        let l1 = scan(first.dim(), |a| {
            let mut t = Tally::default();
            let ea = Vector::basis(a);
            let l1a = l1_1.apply(&ea)?.value;
            let l0a = l0_1.apply(&ea)?.value;
            let da = op_apply(d_1, &ea)?;
            for b in 0..second.dim() {
                let eb = Vector::basis(b);
                let l1b = l1_2.apply(&eb)?.value;
                for n in mode_range(m, a, b, 2) {
                    let outcome = (|| -> Result<Option<bool>, Error> {
                        let Some(da) = &da else { return Ok(None) };
                        let y = m.mode_apply(&ea, n, &eb)?;
                        let y2 = m.mode_apply(&ea, n, &l1b)?;
                        let r1 = m.mode_apply(&l1a, n, &eb)?;
                        let r2 = m.mode_apply(&l0a, n + 1, &eb)?;
                        let r3 = m.mode_apply(da, n + 2, &eb)?;
                        if !(y.exact && y2.exact && r1.exact && r2.exact && r3.exact) {
                            return Ok(None);
                        }
                        let lhs = l1_t.apply(&y.value)?.value.sub(&y2.value);
                        let rhs = r1.value.add(&r2.value.scale(&int(2))).add(&r3.value);
                        Ok(Some(lhs == rhs))
                    })()?;
                    t.record(outcome, || {
                        format!("[L(1), {name}_{n}({})]{} differs from the commutator formula", first.label(a), second.label(b))
                    });
                }
            }
            Ok(t)
        })?;
        report.push(l1.obligation(format!("{name} L(1)-commutator"), "all basis pairs".into()));
    }
    Ok(report)
}
