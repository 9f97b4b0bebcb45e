//! Axiom and theorem checkers.

pub mod assoc;
pub mod axioms;
pub mod contragredient;
pub mod correlate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;


use crate::error::Error;
use crate::exact_laurent::scalar::{format_scalar, Scalar};
use crate::graded::Vector;
use crate::report::{Obligation, Report};
use crate::structures::{validate_algebra, validate_module, Ctx, Elem, Side, Sp};

pub use assoc::{audit_pole_order, check_weak_associativity, AssocOutcome, PoleAudit};
pub use axioms::{check_d, check_grading, check_mobius, check_vacuum};
pub use contragredient::check_contragredient_obligations;
pub use correlate::{
    check_region_consistency, correlate, estimate_poles, reconstruct_rational, CorrelationMode, CorrelationSeries,
    Reconstruction,
};

/// Pole orders found by search: `p_axis[i]` bounds the pole at `z_i = 0`,
/// `p_diag[(i, j)]` the pole at `z_i = z_j`.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct PoleOrderWitness {
    pub p_axis: BTreeMap<usize, i64>,
    pub p_diag: BTreeMap<(usize, usize), i64>,
    pub p1_search_bound: i64,
    /// Present only when the strong condition `p1 <= wt u1 + wt w + C` was
    /// audited.
    pub constant_c: Option<Scalar>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    Structural,
    Vacuum,
    D,
    Grading,
    Assoc,
    Mobius,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Structural, Suite::Vacuum, Suite::D, Suite::Grading, Suite::Assoc, Suite::Mobius];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Structural => "structural",
            Suite::Vacuum => "vacuum",
            Suite::D => "D",
            Suite::Grading => "grading",
            Suite::Assoc => "assoc",
            Suite::Mobius => "mobius",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "structural" => Suite::Structural,
            "vacuum" => Suite::Vacuum,
            "D" | "d" => Suite::D,
            "grading" => Suite::Grading,
            "assoc" => Suite::Assoc,
            "mobius" => Suite::Mobius,
            "all" => Suite::All,
            _ => return Err(Error::Argument(format!("unknown suite {s}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Upper end of the `p1` search; `None` uses `wt u1 + wt w + cutoff`.
    pub p1_max: Option<i64>,
    /// Largest `wt u1 + wt u2 + wt w` sampled by the associativity suite;
    /// `None` uses `cutoff - 2`, or everything for a complete instance.
    pub max_weight: Option<Scalar>,
    /// Order in `y` of the `D`-conjugation spot check.
    pub shift_order: i64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { p1_max: None, max_weight: None, shift_order: 3 }
    }
}

/// Runs one suite, or all of them in order, on an algebra or a module.
pub fn run_suite(ctx: &Ctx, suite: Suite, opts: &SuiteOptions) -> Result<Report, Error> {
    let title = match ctx.module {
        Some(m) => m.name.clone(),
        None => ctx.algebra.name.clone(),
    };
    let mut report = Report::new(format!("{suite} suite on {title}"));
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        let part = match s {
            Suite::Structural => match ctx.module {
                Some(m) => validate_module(m),
                None => validate_algebra(ctx.algebra),
            },
            Suite::Vacuum => check_vacuum(ctx)?,
            Suite::D => check_d(ctx, opts.shift_order)?,
            Suite::Grading => check_grading(ctx)?,
            Suite::Assoc => check_assoc_suite(ctx, opts)?,
            Suite::Mobius => {
                let mobius = ctx.algebra.l1.is_some() && ctx.module.is_none_or(|m| m.l1.is_some());
                if !mobius && suite == Suite::All {
                    let mut r = Report::new("Mobius suite");
                    r.push(Obligation::pass("Mobius suite skipped", "no L(1) present", "not a Mobius instance"));
                    r
                } else {
                    check_mobius(ctx)?
                }
            }
            Suite::All => unreachable!(),
        };
        report.extend(part);
    }
    Ok(report)
}

/// Triple shapes `(u1, u2, w)` exercised for the instance.
pub fn triple_shapes(ctx: &Ctx) -> Vec<[Sp; 3]> {
    let mut out = vec![[Sp::V, Sp::V, Sp::V]];
    if let Some(m) = ctx.module {
        if matches!(m.side, Side::Left | Side::Bi) {
            out.push([Sp::V, Sp::V, Sp::W]);
        }
        if matches!(m.side, Side::Right | Side::Bi) {
            out.push([Sp::W, Sp::V, Sp::V]);
        }
        if m.side == Side::Bi {
            out.push([Sp::V, Sp::W, Sp::V]);
        }
    }
    out
}

fn default_max_weight(ctx: &Ctx) -> Option<Scalar> {
    ctx.algebra.cutoff().map(|c| c - Scalar::from_integer(2.into()))
}

/// All basis triples of the given shape with weight sum at most `max_weight`.
pub fn basis_triples(ctx: &Ctx, shape: [Sp; 3], max_weight: Option<&Scalar>) -> Result<Vec<(Elem, Elem, Elem)>, Error> {
    let spaces = [ctx.space(shape[0])?, ctx.space(shape[1])?, ctx.space(shape[2])?];
    let mut out = Vec::new();
    for i in 0..spaces[0].dim() {
        for j in 0..spaces[1].dim() {
            for k in 0..spaces[2].dim() {
                let w = spaces[0].weight(i) + spaces[1].weight(j) + spaces[2].weight(k);
                if max_weight.is_none_or(|m| &w <= m) {
                    out.push((
                        Elem { sp: shape[0], vec: Vector::basis(i) },
                        Elem { sp: shape[1], vec: Vector::basis(j) },
                        Elem { sp: shape[2], vec: Vector::basis(k) },
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Weak associativity on every basis triple up to the weight limit, one
/// obligation per triple shape, with the pole-order summary in the window.
pub fn check_assoc_suite(ctx: &Ctx, opts: &SuiteOptions) -> Result<Report, Error> {
    let mut report = Report::new("weak associativity suite");
    let max_weight = opts.max_weight.clone().or_else(|| default_max_weight(ctx));
    for shape in triple_shapes(ctx) {
        let triples = basis_triples(ctx, shape, max_weight.as_ref())?;
        let outcomes = crate::par::map(&triples, |(a, b, c)| check_weak_associativity(ctx, a, b, c, opts.p1_max));
        let mut witness = None;
        let mut insufficient = Vec::new();
        let mut p_top = 0;
        let mut c_max: Option<Scalar> = None;
        let mut passed = 0;
        for ((a, _, c), o) in triples.iter().zip(outcomes) {
            match o {
                Ok(o) => match o.p1 {
                    Some(p) => {
                        passed += 1;
                        p_top = p_top.max(p);
                        let cc = Scalar::from_integer(p.into()) - ctx.weight_of(a)? - ctx.weight_of(c)?;
                        if c_max.as_ref().is_none_or(|m| &cc > m) {
                            c_max = Some(cc);
                        }
                    }
                    None => {
                        if witness.is_none() {
                            witness = Some(format!("{}: {}", o.inputs, o.witness.unwrap_or_default()));
                        }
                    }
                },
                Err(Error::WindowInsufficient { message, .. }) => insufficient.push(message),
                Err(e) => return Err(e),
            }
        }
        let name = format!(
            "weak associativity ({})",
            shape.iter().map(|s| if *s == Sp::V { "V" } else { "W" }).collect::<Vec<_>>().join(",")
        );
        let inputs = format!(
            "{} basis triples with weight sum <= {}",
            triples.len(),
            max_weight.as_ref().map_or("any".to_string(), format_scalar)
        );
        let window = format!(
            "{passed} passed; max minimal p1 = {p_top}; least C with p1 <= wt u1 + wt w + C: {}",
            c_max.as_ref().map_or("n/a".to_string(), format_scalar)
        );
        if witness.is_some() {
            report.push(Obligation::from_witness(name, inputs, window, witness));
        } else if !insufficient.is_empty() {
            report.push(Obligation::insufficient(
                name,
                inputs,
                window,
                format!("{} triples outside the window, first: {}", insufficient.len(), insufficient[0]),
            ));
        } else {
            report.push(Obligation::pass(name, inputs, window));
        }
    }
    Ok(report)
}
