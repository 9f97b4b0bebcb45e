//! Correlation series, degree-certified reconstruction and region consistency.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::exact_laurent::poly::{format_monomial, series_match, CertifiedSeries, Laurent, LaurentPoly, Window};
use crate::exact_laurent::rational::{
    divisor_poly, expand_rational, iterate_var_names, RationalFn, Region,
};
use crate::exact_laurent::scalar::{floor_i64, format_scalar, to_i64, Scalar};
use crate::graded::{DualVector, GradedSpace, Vector};
use crate::report::{Obligation, Report};
use crate::structures::{Ctx, Elem, Sp};

use super::PoleOrderWitness;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// `<w', Y(u1, z1) ... Y(un, zn) w>` in `|z1| > ... > |zn|`.
    Product,
    /// `<w', Y(...Y(Y(u1, z1-z2)u2, z2-z3)..., zn) w>`.
    Iterate,
    /// A product on a bimodule with left and right operators mixed.
    Mixed,
}

impl fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationMode::Product => "product",
            CorrelationMode::Iterate => "iterate",
            CorrelationMode::Mixed => "mixed",
        })
    }
}

impl FromStr for CorrelationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "product" => Ok(CorrelationMode::Product),
            "iterate" => Ok(CorrelationMode::Iterate),
            "mixed" => Ok(CorrelationMode::Mixed),
            _ => Err(Error::Argument(format!("unknown correlation mode {s}"))),
        }
    }
}

/// A correlator truncated to the coefficients the instance determines.
#[derive(Clone, PartialEq, Debug)]
pub struct CorrelationSeries {
    pub series: CertifiedSeries,
    pub mode: CorrelationMode,
    /// Operator variables as given, before any change to difference variables.
    pub op_vars: Vec<String>,
    pub description: String,
    /// `wt w' - sum wt u_i - wt w`; `None` for inhomogeneous arguments.
    pub degree: Option<i64>,
}

impl CorrelationSeries {
    pub fn to_text(&self) -> String {
        let vars = self.series.poly.vars();
        let mut out = format!("{} ({} mode)\nwindow: {}\n", self.description, self.mode, self.series.window);
        if let Some(d) = self.degree {
            out.push_str(&format!("total degree: {d}\n"));
        }
        for (e, c) in self.series.poly.terms() {
            out.push_str(&format!("  {} 1{}\n", format_scalar(c), format_monomial(vars, e)));
        }
        if self.series.poly.is_zero() {
            out.push_str("  0\n");
        }
        out
    }
}

fn cap(s: &GradedSpace) -> Option<Scalar> {
    s.cutoff().cloned()
}

fn int_of(s: &Scalar, what: &str) -> Result<i64, Error> {
    to_i64(s).ok_or_else(|| Error::Argument(format!("{what} {} is not an integer", format_scalar(s))))
}

/// Space reached after applying `ops[r..]` to `ket` in product order.
fn product_spaces(ctx: &Ctx, ops: &[Elem], ket: Sp) -> Result<Vec<Sp>, Error> {
    let mut out = vec![ket; ops.len()];
    let mut cur = ket;
    for r in (0..ops.len()).rev() {
        cur = ctx.map_for(ops[r].sp, cur)?.1;
        out[r] = cur;
    }
    Ok(out)
}

fn homogeneous(ctx: &Ctx, e: &Elem) -> Result<Vec<(Scalar, Elem)>, Error> {
    Ok(ctx
        .space(e.sp)?
        .homogeneous_parts(&e.vec)
        .into_iter()
        .map(|(w, v)| (w, Elem { sp: e.sp, vec: v }))
        .collect())
}

fn extend(e: &[i64], slot: usize, x: i64) -> Vec<i64> {
    let mut e = e.to_vec();
    e[slot] += x;
    e
}

/// Product or iterate correlator for homogeneous arguments, with its degree.
fn correlate_homogeneous(
    ctx: &Ctx,
    bra: &Vector,
    ops: &[Elem],
    ket: &Elem,
    mode: CorrelationMode,
    vars: &[String],
) -> Result<(CertifiedSeries, i64), Error> {
    let n = ops.len();
    let wt_ket = ctx.weight_of(ket)?;
    let wts: Vec<Scalar> = ops.iter().map(|o| ctx.weight_of(o)).collect::<Result<_, _>>()?;
    let sum_wt: Scalar = wts.iter().sum();
    let final_sp = product_spaces(ctx, ops, ket.sp)?.first().copied().unwrap_or(ket.sp);
    let final_space = ctx.space(final_sp)?;
    let wt_bra = final_space
        .weight_of(bra)
        .ok_or_else(|| Error::Argument("bra is not homogeneous".into()))?;
    let degree = int_of(&(&wt_bra - &sum_wt - &wt_ket), "correlator degree")?;
    match mode {
        CorrelationMode::Product | CorrelationMode::Mixed => {
            let spaces = product_spaces(ctx, ops, ket.sp)?;
            let mut window = Window::natural(vars.to_vec());
            let mut tail_wt = wt_ket.clone();
            let mut bounds = vec![None; n];
            for r in (0..n).rev() {
                tail_wt += &wts[r];
                bounds[r] = cap(ctx.space(spaces[r])?).map(|c| floor_i64(&(c - &tail_wt)));
            }
            window.tail_bounds = bounds;
            let mut state: Laurent<Vector> = Laurent::monomial(vars.to_vec(), vec![0; n], ket.vec.clone());
            let mut sp = ket.sp;
            for r in (0..n).rev() {
                let (m, next) = ctx.map_for(ops[r].sp, sp)?;
                let mut out = Laurent::zero(vars.to_vec());
                for (e, v) in state.terms() {
                    let s = m.series(&ops[r].vec, v, "x")?;
                    for (x, w) in s.poly.terms() {
                        let ne = extend(e, r, x[0]);
                        if window.tail_bounds[r].is_none_or(|b| window.tail_sum(&ne, r) <= b) {
                            out.add_term(ne, w);
                        }
                    }
                }
                state = out;
                sp = next;
            }
            let poly = state.map_coeffs(|v| bra.dot(v));
            Ok((CertifiedSeries { poly: poly.restrict(&window), window }, degree))
        }
        CorrelationMode::Iterate => {
            let zeta = iterate_var_names(vars);
            let chain: Vec<usize> = (0..n).rev().collect();
            let mut window = Window::unbounded(zeta.clone(), chain);
            // X_k = Y(X_{k-1}, zeta_{k-1})u_k; its weight is a prefix sum.
            let mut state: Laurent<Vector> = Laurent::monomial(zeta.clone(), vec![0; n], ops[0].vec.clone());
            let mut sp = ops[0].sp;
            let mut prefix_wt = wts[0].clone();
            for k in 1..n {
                let (m, next) = ctx.map_for(sp, ops[k].sp)?;
                prefix_wt += &wts[k];
                let r = n - k;
                window.tail_bounds[r] = cap(ctx.space(next)?).map(|c| floor_i64(&(c - &prefix_wt)));
                let mut out = Laurent::zero(zeta.clone());
                for (e, v) in state.terms() {
                    let s = m.series(v, &ops[k].vec, "x")?;
                    for (x, w) in s.poly.terms() {
                        let ne = extend(e, k - 1, x[0]);
                        if window.tail_bounds[r].is_none_or(|b| window.tail_sum(&ne, r) <= b) {
                            out.add_term(ne, w);
                        }
                    }
                }
                state = out;
                sp = next;
            }
            let (m, next) = ctx.map_for(sp, ket.sp)?;
            window.tail_bounds[0] = cap(ctx.space(next)?).map(|c| floor_i64(&(c - &prefix_wt - &wt_ket)));
            let mut out = Laurent::zero(zeta.clone());
            for (e, v) in state.terms() {
                let s = m.series(v, &ket.vec, "x")?;
                for (x, w) in s.poly.terms() {
                    let ne = extend(e, n - 1, x[0]);
                    if window.tail_bounds[0].is_none_or(|b| window.tail_sum(&ne, 0) <= b) {
                        out.add_term(ne, w);
                    }
                }
            }
            let poly = out.map_coeffs(|v| bra.dot(v));
            Ok((CertifiedSeries { poly: poly.restrict(&window), window }, degree))
        }
    }
}

/// Computes a correlator in the requested mode.
///
/// Inhomogeneous arguments are split into homogeneous parts; the results are
/// summed and their windows intersected. When `order` is given, every
/// intermediate tail must be certified for at least `order` steps past its
/// lowest possible value; otherwise the call fails with the cutoff that
/// would suffice.
pub fn correlate(
    ctx: &Ctx,
    bra: &DualVector,
    ops: &[(Elem, String)],
    ket: &Elem,
    mode: CorrelationMode,
    order: Option<i64>,
) -> Result<CorrelationSeries, Error> {
    if ops.is_empty() {
        return Err(Error::Argument("a correlator needs at least one operator".into()));
    }
    let vars: Vec<String> = ops.iter().map(|(_, v)| v.clone()).collect();
    let mut sorted = vars.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != vars.len() {
        return Err(Error::Variable("operator variables must be distinct".into()));
    }
    let elems: Vec<Elem> = ops.iter().map(|(e, _)| e.clone()).collect();
    if mode == CorrelationMode::Mixed {
        let bimodule = ctx.module.is_some_and(|m| m.y_left.is_some() && m.y_right.is_some());
        if !bimodule {
            return Err(Error::Argument("mixed mode needs a bimodule".into()));
        }
        if !elems.iter().any(|e| e.sp == Sp::W) {
            return Err(Error::Argument("mixed mode needs a module element among the operators".into()));
        }
    }
    let spaces = product_spaces(ctx, &elems, ket.sp)?;
    let final_space = ctx.space(spaces[0])?;
    final_space.check_vector(&bra.0)?;
    let description = format!(
        "<{}, {} {}>",
        final_space.format_vector(&bra.0).split(" + ").map(|t| format!("{t}'")).collect::<Vec<_>>().join(" + "),
        ops.iter().map(|(e, v)| format!("Y({}, {v})", ctx.format(e))).collect::<Vec<_>>().join(" "),
        ctx.format(ket)
    );
    let out_vars = match mode {
        CorrelationMode::Iterate => iterate_var_names(&vars),
        _ => vars.clone(),
    };
    let chain: Vec<usize> = match mode {
        CorrelationMode::Iterate => (0..vars.len()).rev().collect(),
        _ => (0..vars.len()).collect(),
    };
    if let Some(order) = order {
        check_order(ctx, &elems, ket, mode, order)?;
    }
    let mut acc = Laurent::zero(out_vars.clone());
    let mut window: Option<Window> = None;
    let mut degree = None;
    let mut parts = 0;
    let bra_parts = final_space.homogeneous_parts(&bra.0);
    let ket_parts = homogeneous(ctx, ket)?;
    let op_parts: Vec<Vec<(Scalar, Elem)>> = elems.iter().map(|e| homogeneous(ctx, e)).collect::<Result<_, _>>()?;
    let mut combos: Vec<Vec<Elem>> = vec![Vec::new()];
    for choices in &op_parts {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                choices.iter().map(move |(_, e)| {
                    let mut c = c.clone();
                    c.push(e.clone());
                    c
                })
            })
            .collect();
    }
    for b in bra_parts.values() {
        for (_, k) in &ket_parts {
            for combo in &combos {
                let (s, d) = correlate_homogeneous(ctx, b, combo, k, mode, &vars)?;
                acc = acc.add(&s.poly);
                window = Some(match window {
                    None => s.window,
                    Some(w) => w.intersect(&s.window)?,
                });
                degree = if parts == 0 { Some(d) } else { None };
                parts += 1;
            }
        }
    }
    let window = window.unwrap_or_else(|| Window::unbounded(out_vars.clone(), chain));
    let series = CertifiedSeries { poly: acc.restrict(&window), window };
    if let Some(d) = degree {
        if let Some((e, _)) = series.poly.terms().find(|(e, _)| e.iter().sum::<i64>() != d) {
            return Err(Error::Window(format!(
                "monomial 1{} breaks the total-degree invariant {d}",
                format_monomial(&out_vars, e)
            )));
        }
    }
    if let Some(b) = series.window.tail_bounds[0] {
        if parts > 0 && degree.is_some_and(|d| d > b) {
            return Err(Error::WindowInsufficient {
                message: "window empty at this cutoff".into(),
                needed: format!("a cutoff raised by {}", degree.unwrap() - b),
            });
        }
    }
    Ok(CorrelationSeries { series, mode, op_vars: vars, description, degree })
}

/// Fails unless each intermediate weight is certified `order` steps above
/// its lowest value.
fn check_order(ctx: &Ctx, ops: &[Elem], ket: &Elem, mode: CorrelationMode, order: i64) -> Result<(), Error> {
    let mut worst: Option<Scalar> = None;
    let mut need = |s: &GradedSpace| {
        if let (Some(c), Some(lo)) = (s.cutoff(), s.min_weight()) {
            let required = lo + Scalar::from_integer(order.into());
            if &required > c && worst.as_ref().is_none_or(|w| &required > w) {
                worst = Some(required);
            }
        }
    };
    match mode {
        CorrelationMode::Iterate => {
            let mut sp = ops[0].sp;
            for op in &ops[1..] {
                sp = ctx.map_for(sp, op.sp)?.1;
                need(ctx.space(sp)?);
            }
        }
        _ => {
            let spaces = product_spaces(ctx, ops, ket.sp)?;
            for sp in &spaces[1..] {
                need(ctx.space(*sp)?);
            }
        }
    }
    match worst {
        None => Ok(()),
        Some(w) => Err(Error::WindowInsufficient {
            message: format!("order {order} exceeds the certified window"),
            needed: format!("cutoff {}", format_scalar(&w)),
        }),
    }
}

/// Pole orders read from two-point data: `p_ij` from the most singular power
/// of `Y(u_i, x)u_j` and `p_i` from `Y(u_i, x)w`.
pub fn estimate_poles(ctx: &Ctx, ops: &[Elem], ket: &Elem) -> Result<PoleOrderWitness, Error> {
    let pole = |a: &Elem, b: &Elem| -> Result<i64, Error> {
        let (s, _) = ctx.series(a, b, "x")?;
        Ok(s.poly.min_exponent(0).map_or(0, |m| (-m).max(0)))
    };
    let mut w = PoleOrderWitness::default();
    for i in 0..ops.len() {
        let p = pole(&ops[i], ket)?;
        if p > 0 {
            w.p_axis.insert(i, p);
        }
        for j in i + 1..ops.len() {
            if ops[i].sp == Sp::W && ops[j].sp == Sp::W {
                continue;
            }
            let p = pole(&ops[i], &ops[j])?;
            if p > 0 {
                w.p_diag.insert((i, j), p);
            }
        }
    }
    Ok(w)
}

/// Outcome of a degree-certified reconstruction.
#[derive(Clone, PartialEq, Debug)]
pub struct Reconstruction {
    pub function: Option<RationalFn>,
    /// Divisor times series, before reduction.
    pub numerator: LaurentPoly,
    /// Predicted total degree of the numerator.
    pub degree: i64,
    pub certified: bool,
    pub explanation: String,
    /// Additional cutoff needed for certification, when the window is short.
    pub shortfall: Option<i64>,
}

/// Multiplies a product correlator by the divisor of `poles` and reads off
/// the polynomial numerator. Certified iff the window covers every monomial
/// of the predicted total degree and nothing outside the numerator survives.
pub fn reconstruct_rational(s: &CorrelationSeries, poles: &PoleOrderWitness) -> Result<Reconstruction, Error> {
    if s.mode == CorrelationMode::Iterate {
        return Err(Error::Argument("reconstruction reads product-region series".into()));
    }
    let vars = s.series.poly.vars().to_vec();
    let n = vars.len();
    let degree0 = s
        .degree
        .ok_or_else(|| Error::Argument("reconstruction needs homogeneous arguments".into()))?;
    let axis: BTreeMap<usize, u32> = poles.p_axis.iter().map(|(&i, &p)| (i, p as u32)).collect();
    let diag: BTreeMap<(usize, usize), u32> = poles.p_diag.iter().map(|(&k, &p)| (k, p as u32)).collect();
    if axis.keys().any(|&i| i >= n) || diag.keys().any(|&(i, j)| i >= j || j >= n) {
        return Err(Error::Argument("pole orders refer to variables outside the correlator".into()));
    }
    let pole_sum: i64 = poles.p_axis.values().sum::<i64>() + poles.p_diag.values().sum::<i64>();
    let degree = degree0 + pole_sum;
    let mut window = s.series.window.clone();
    for r in 0..n {
        let shift: i64 = poles.p_axis.iter().filter(|(&i, _)| i >= r).map(|(_, p)| p).sum::<i64>()
            + poles.p_diag.iter().filter(|(&(i, _), _)| i >= r).map(|(_, p)| p).sum::<i64>();
        if let Some(b) = window.tail_bounds[r].as_mut() {
            *b += shift;
        }
    }
    let product = s.series.poly.mul_poly(&divisor_poly(&vars, &axis, &diag)).restrict(&window);
    let shortfall = window.tail_bounds.iter().flatten().map(|b| degree - b).max().filter(|&d| d > 0);
    let stray = product.terms().find(|(e, _)| e.iter().any(|&k| k < 0) || e.iter().sum::<i64>() != degree);
    if let Some((e, c)) = stray {
        return Ok(Reconstruction {
            function: None,
            numerator: product.clone(),
            degree,
            certified: false,
            explanation: format!(
                "divisor times series keeps {} 1{} outside the numerator; the pole orders are too small",
                format_scalar(c),
                format_monomial(&vars, e)
            ),
            shortfall: None,
        });
    }
    if let Some(d) = shortfall {
        return Ok(Reconstruction {
            function: None,
            numerator: product,
            degree,
            certified: false,
            explanation: format!("window [{window}] stops short of the predicted numerator degree {degree}"),
            shortfall: Some(d),
        });
    }
    let function = RationalFn::new(product.clone(), axis, diag)?;
    Ok(Reconstruction {
        function: Some(function),
        numerator: product,
        degree,
        certified: true,
        explanation: format!("numerator of total degree {degree} fully inside window [{window}]"),
        shortfall: None,
    })
}

/// Reconstructs the product correlator and checks that its expansions in
/// the product and iterate regions match the directly computed series.
pub fn check_region_consistency(
    ctx: &Ctx,
    bra: &DualVector,
    ops: &[(Elem, String)],
    ket: &Elem,
    order: i64,
) -> Result<Report, Error> {
    let elems: Vec<Elem> = ops.iter().map(|(e, _)| e.clone()).collect();
    let product_mode = if elems.iter().any(|e| e.sp == Sp::W) && ctx.module.is_some_and(|m| m.side == crate::structures::Side::Bi) {
        CorrelationMode::Mixed
    } else {
        CorrelationMode::Product
    };
    let product = correlate(ctx, bra, ops, ket, product_mode, None)?;
    let poles = estimate_poles(ctx, &elems, ket)?;
    let rec = reconstruct_rational(&product, &poles)?;
    let Some(f) = rec.function.clone() else {
        return Err(match rec.shortfall {
            Some(d) => Error::WindowInsufficient {
                message: format!("{}: reconstruction not certified: {}", product.description, rec.explanation),
                needed: format!("a cutoff raised by {d}"),
            },
            None => Error::Rational(format!("{}: reconstruction not certified: {}", product.description, rec.explanation)),
        });
    };
    let iterate = correlate(ctx, bra, ops, ket, CorrelationMode::Iterate, None)?;
    let mut report = Report::new(format!("region consistency for {}", product.description));
    report.push(Obligation::pass(
        "degree-certified reconstruction",
        product.description.clone(),
        format!("f = {f}; {}", rec.explanation),
    ));
    let vars = product.op_vars.clone();
    for (name, region, direct) in [
        ("product region", Region::product(&vars), &product),
        ("iterate region", Region::iterate(&vars), &iterate),
    ] {
        let expanded = expand_rational(&f, &region, order)?;
        let window = expanded.window.intersect(&direct.series.window)?;
        let m = series_match(&expanded, &direct.series, &window)?;
        let witness = (!m.equal).then(|| format!("{name}: {}", m.describe(&window.vars)));
        report.push(Obligation::from_witness(
            format!("{name} expansion matches the {} series", direct.mode),
            product.description.clone(),
            format!("[{window}], order {order}, {} monomials", m.compared),
            witness,
        ));
    }
    Ok(report)
}
