//! Obligations for the contragredient module `W'` over `V^op`.

use crate::constructions::{contragredient_module, opposite_vertex_components};
use crate::error::Error;
use crate::exact_laurent::scalar::int;
use crate::graded::{DualVector, Vector};
use crate::report::{Obligation, Report};
use crate::structures::{Ctx, Elem, ModuleInstance};

use super::{check_assoc_suite, check_d, check_mobius, check_region_consistency, check_vacuum, PoleOrderWitness, SuiteOptions};

/// Builds `W'` and runs the vacuum, `D`, Mobius, weak-associativity and
/// region-consistency checks on it, plus the transposition invariant
/// `<Y'_n(u)w', w> = <w', (Y^o)_n(u)w>` on every certified entry.
///
/// Region checks use the nonzero two-point correlators
/// `<b, Y'(u1, z1)Y'(u2, z2)c'>` with `wt b + wt u1 + wt u2 + wt c <= region_weight`.
pub fn check_contragredient_obligations(
    w: &ModuleInstance,
    certificate: Option<&PoleOrderWitness>,
    opts: &SuiteOptions,
    region_weight: i64,
    order: i64,
) -> Result<Report, Error> {
    let dual = contragredient_module(w, certificate)?;
    let ctx = Ctx::module(&dual);
    let mut report = Report::new(format!("contragredient obligations for {}", dual.name));
    report.extend(check_vacuum(&ctx)?);
    report.extend(check_d(&ctx, opts.shift_order)?);
    report.extend(check_mobius(&ctx)?);
    report.extend(check_assoc_suite(&ctx, opts)?);
    report.push(transposition(w, &dual)?);
    report.extend(regions(&ctx, &dual, region_weight, order)?);
    Ok(report)
}

fn transposition(w: &ModuleInstance, dual: &ModuleInstance) -> Result<Obligation, Error> {
    let y = dual.left()?;
    let v_dim = w.algebra.space.dim();
    let mut keys = Vec::new();
    for u in 0..v_dim {
        let mut ns: Vec<i64> = (0..dual.space.dim()).flat_map(|b| y.modes(u, b)).collect();
        ns.sort();
        ns.dedup();
        keys.extend(ns.into_iter().map(|n| (u, n)));
    }
    let results = crate::par::map(&keys, |&(u, n)| -> Result<(usize, Option<String>), Error> {
        let yo = opposite_vertex_components(w, &Vector::basis(u), n)?.value;
        let mut checked = 0;
        for b in 0..dual.space.dim() {
            let lhs = y.mode_basis(u, n, b);
            if !lhs.exact {
                continue;
            }
            for c in 0..w.space.dim() {
                let rhs = yo.apply_basis(c);
                if !rhs.exact {
                    continue;
                }
                checked += 1;
                if lhs.value.get(c) != rhs.value.get(b) {
                    return Ok((
                        checked,
                        Some(format!(
                            "<Y'_{n}({}){}, {}> differs from <{}, Y^o_{n}({}){}>",
                            w.algebra.space.label(u),
                            dual.space.label(b),
                            w.space.label(c),
                            dual.space.label(b),
                            w.algebra.space.label(u),
                            w.space.label(c)
                        )),
                    ));
                }
            }
        }
        Ok((checked, None))
    });
    let mut total = 0;
    let mut witness = None;
    for r in results {
        let (n, wit) = r?;
        total += n;
        if witness.is_none() {
            witness = wit;
        }
    }
    Ok(Obligation::from_witness(
        "transposition invariant <Y'_n(u)w', w> = <w', Y^o_n(u)w>",
        "all basis u, w', w",
        format!("{total} certified pairings"),
        witness,
    ))
}

fn regions(ctx: &Ctx, dual: &ModuleInstance, max_weight: i64, order: i64) -> Result<Report, Error> {
    let alg = &dual.algebra.space;
    let ops: Vec<usize> = (0..alg.dim()).filter(|&i| alg.weight(i) > &int(0)).collect();
    let mut cases = Vec::new();
    for &u1 in &ops {
        for &u2 in &ops {
            for c in 0..dual.space.dim() {
                for b in 0..dual.space.dim() {
                    let sum = alg.weight(u1) + alg.weight(u2) + dual.space.weight(c) + dual.space.weight(b);
                    if sum <= int(max_weight) {
                        cases.push((u1, u2, c, b));
                    }
                }
            }
        }
    }
    let mut report = Report::new("contragredient region consistency");
    let mut compared = 0;
    let mut nonzero = 0;
    for (u1, u2, c, b) in cases {
        let ops = vec![
            (Elem::v(Vector::basis(u1)), "z1".to_string()),
            (Elem::v(Vector::basis(u2)), "z2".to_string()),
        ];
        let bra = DualVector(Vector::basis(b));
        let ket = Elem::w(Vector::basis(c));
        let product = super::correlate(ctx, &bra, &ops, &ket, super::CorrelationMode::Product, None)?;
        compared += 1;
        if product.series.poly.is_zero() {
            continue;
        }
        nonzero += 1;
        match check_region_consistency(ctx, &bra, &ops, &ket, order) {
            Ok(r) => {
                if let Some(f) = r.first_failure() {
                    report.push(f.clone());
                }
            }
            Err(Error::WindowInsufficient { message, needed }) => {
                report.push(Obligation::insufficient("region consistency", product.description, "", format!("{message}; {needed} would suffice")));
            }
            Err(e) => return Err(e),
        }
    }
    if report.obligations.is_empty() {
        report.push(Obligation::pass(
            "region consistency on two-point correlators",
            format!("{compared} correlators with weight sum <= {max_weight}"),
            format!("{nonzero} nonzero, all matched in product and iterate regions to order {order}"),
        ));
    }
    Ok(report)
}
