//! Sparse multivariate Laurent polynomials with generic coefficients, and the
//! certified windows that say which monomials of a truncated series are exact.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{binomial, format_scalar, Scalar};
use crate::error::Error;

/// Coefficient ring for [`Laurent`]: a vector space over the rationals.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn is_zero_coeff(&self) -> bool;
    fn add_assign_coeff(&mut self, other: &Self);
    fn scaled(&self, s: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_assign_coeff(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, s: &Scalar) -> Self {
        self * s
    }
}

pub type Exponents = Vec<i64>;

/// A finite sum of monomials `c * x_1^{e_1} ... x_n^{e_n}`.
///
/// Terms are kept in lexicographic exponent order and zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Laurent<C> {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, C>,
}

pub type LaurentPoly = Laurent<Scalar>;

impl<C: Coeff> Laurent<C> {
    pub fn zero(vars: Vec<String>) -> Self {
        Laurent { vars, terms: BTreeMap::new() }
    }

    pub fn monomial(vars: Vec<String>, exps: Exponents, c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(exps, &c);
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Exponents, C> {
        self.terms
    }

    pub fn coeff(&self, exps: &[i64]) -> Option<&C> {
        self.terms.get(exps)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Exponents, c: &C) {
        assert_eq!(exps.len(), self.vars.len(), "exponent tuple length mismatch");
        if c.is_zero_coeff() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_coeff(c);
                if e.get().is_zero_coeff() {
                    e.remove();
                }
            }
        }
    }

    /// Re-expresses the polynomial over `vars`, which must contain every
    /// variable of `self`; missing variables get exponent zero.
    pub fn with_vars(&self, vars: &[String]) -> Result<Self, Error> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::Variable(format!("variable {v} missing from target context")))
            })
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(vars.to_vec());
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &j) in map.iter().enumerate() {
                ne[j] = e[i];
            }
            out.add_term(ne, c);
        }
        Ok(out)
    }

    fn aligned(&self, other_vars: &[String]) -> (Vec<String>, bool) {
        if self.vars == other_vars {
            return (self.vars.clone(), false);
        }
        let mut vars = self.vars.clone();
        for v in other_vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        (vars, true)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (vars, realign) = self.aligned(&other.vars);
        let (mut out, rhs) = if realign {
            (self.with_vars(&vars).unwrap(), other.with_vars(&vars).unwrap())
        } else {
            (self.clone(), other.clone())
        };
        for (e, c) in rhs.terms {
            out.add_term(e, &c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(self.vars.clone());
        if s.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &c.scaled(s));
        }
        out
    }

    /// Product with a scalar Laurent polynomial.
    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        let (vars, _) = self.aligned(&p.vars);
        let a = self.with_vars(&vars).unwrap();
        let b = p.with_vars(&vars).unwrap();
        let mut out = Self::zero(vars);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, &ca.scaled(cb));
            }
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Laurent<D> {
        let mut out = Laurent::zero(self.vars.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    /// Keeps only the monomials certified by `window`.
    pub fn restrict(&self, window: &Window) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            if window.certifies(e) {
                out.add_term(e.clone(), c);
            }
        }
        out
    }

    /// Formal derivative in `var`.
    pub fn derivative(&self, var: &str) -> Result<Self, Error> {
        let i = self
            .var_index(var)
            .ok_or_else(|| Error::Variable(format!("unknown variable {var}")))?;
        let mut out = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, &c.scaled(&Scalar::from_integer(e[i].into())));
            }
        }
        Ok(out)
    }

    /// Substitutes `var -> a + b` and expands every power of `a + b`
    /// (negative ones included) binomially in nonnegative powers of
    /// `expansion_var`, keeping powers of `expansion_var` up to `order`.
    ///
    /// `expansion_var` must be one of `a`, `b`. Either may already be a
    /// variable of `self`.
    pub fn taylor_shift(
        &self,
        var: &str,
        replacement: (&str, &str),
        expansion_var: &str,
        order: i64,
    ) -> Result<Self, Error> {
        let (a, b) = replacement;
        if a == b || (expansion_var != a && expansion_var != b) || a == var || b == var || order < 0 {
            return Err(Error::Variable(format!(
                "malformed replacement {var} -> {a} + {b} expanded in {expansion_var} to order {order}"
            )));
        }
        let vi = self
            .var_index(var)
            .ok_or_else(|| Error::Variable(format!("unknown variable {var}")))?;
        let other = if expansion_var == a { b } else { a };
        let mut vars: Vec<String> = self.vars.iter().filter(|v| *v != var).cloned().collect();
        for v in [other, expansion_var] {
            if !vars.iter().any(|w| w == v) {
                vars.push(v.to_string());
            }
        }
        let oi = vars.iter().position(|v| v == other).unwrap();
        let xi = vars.iter().position(|v| v == expansion_var).unwrap();
        let mut out = Self::zero(vars.clone());
        for (e, c) in &self.terms {
            let mut base = vec![0; vars.len()];
            for (k, v) in self.vars.iter().enumerate() {
                if k != vi {
                    let j = vars.iter().position(|w| w == v).unwrap();
                    base[j] += e[k];
                }
            }
            let power = e[vi];
            let top = if power >= 0 { power.min(order) } else { order };
            for j in 0..=top {
                let mut ne = base.clone();
                ne[oi] += power - j;
                ne[xi] += j;
                out.add_term(ne, &c.scaled(&binomial(power, j as u64)));
            }
        }
        Ok(out)
    }

    pub fn min_exponent(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[var]).min()
    }

    pub fn max_exponent(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[var]).max()
    }
}

impl LaurentPoly {
    pub fn constant(vars: Vec<String>, c: Scalar) -> Self {
        let n = vars.len();
        Self::monomial(vars, vec![0; n], c)
    }

    /// The polynomial consisting of the single variable `name` in context `vars`.
    pub fn variable(vars: Vec<String>, name: &str) -> Self {
        let i = vars.iter().position(|v| v == name).expect("variable in context");
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Scalar::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_poly(other)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.vars.clone(), Scalar::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes polynomials for every variable. `images[i]` replaces
    /// `vars[i]`; exponents of `self` must be nonnegative unless the image is
    /// a single monomial.
    pub fn substitute(&self, images: &[LaurentPoly], target_vars: &[String]) -> Result<Self, Error> {
        let imgs: Vec<LaurentPoly> = images
            .iter()
            .map(|p| p.with_vars(target_vars))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(target_vars.to_vec());
        for (e, c) in &self.terms {
            let mut term = Self::constant(target_vars.to_vec(), c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k >= 0 {
                    term = term.mul(&imgs[i].pow(k as u32));
                } else if imgs[i].len() == 1 {
                    let (me, mc) = imgs[i].terms.iter().next().unwrap();
                    let inv = Self::monomial(
                        target_vars.to_vec(),
                        me.iter().map(|x| -x).collect(),
                        mc.recip(),
                    );
                    term = term.mul(&inv.pow((-k) as u32));
                } else {
                    return Err(Error::Variable(format!(
                        "cannot substitute a non-monomial for {} under a negative power",
                        self.vars[i]
                    )));
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn total_degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.terms.keys().map(|e| e.iter().sum()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_scalar(c))?;
            write!(f, "{}", format_monomial(&self.vars, e))?;
        }
        Ok(())
    }
}

/// `*z1^-1*z2` style rendering of a monomial, empty for the unit monomial.
pub fn format_monomial(vars: &[String], e: &[i64]) -> String {
    let mut s = String::new();
    for (v, &k) in vars.iter().zip(e) {
        match k {
            0 => {}
            1 => s.push_str(&format!("*{v}")),
            _ => s.push_str(&format!("*{v}^{k}")),
        }
    }
    s
}

/// Monomial certification window.
///
/// `chain` lists variable indices from largest to smallest modulus. For each
/// position `r`, `tail_bounds[r]` (when present) bounds the tail sum
/// `T_r = sum of the exponents of chain[r..]`; `T_0` is the total degree. A
/// monomial is certified iff every present bound holds.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Window {
    pub vars: Vec<String>,
    pub chain: Vec<usize>,
    pub tail_bounds: Vec<Option<i64>>,
}

impl Window {
    /// Window certifying everything.
    pub fn unbounded(vars: Vec<String>, chain: Vec<usize>) -> Self {
        let n = chain.len();
        Window { vars, chain, tail_bounds: vec![None; n] }
    }

    /// Chain following the variable order given.
    pub fn natural(vars: Vec<String>) -> Self {
        let chain = (0..vars.len()).collect();
        Self::unbounded(vars, chain)
    }

    pub fn tail_sum(&self, exps: &[i64], r: usize) -> i64 {
        self.chain[r..].iter().map(|&i| exps[i]).sum()
    }

    pub fn certifies(&self, exps: &[i64]) -> bool {
        self.tail_bounds
            .iter()
            .enumerate()
            .all(|(r, b)| b.is_none_or(|b| self.tail_sum(exps, r) <= b))
    }

    /// Intersection with a window over the same chain.
    pub fn intersect(&self, other: &Window) -> Result<Window, Error> {
        if self.vars != other.vars || self.chain != other.chain {
            return Err(Error::Window("cannot intersect windows over different chains".into()));
        }
        let tail_bounds = self
            .tail_bounds
            .iter()
            .zip(&other.tail_bounds)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some(*x.min(y)),
                (Some(x), None) | (None, Some(x)) => Some(*x),
                (None, None) => None,
            })
            .collect();
        Ok(Window { vars: self.vars.clone(), chain: self.chain.clone(), tail_bounds })
    }

    /// True if `self` is syntactically contained in `other` (same chain,
    /// every bound at least as tight).
    pub fn within(&self, other: &Window) -> bool {
        self.vars == other.vars
            && self.chain == other.chain
            && self.tail_bounds.iter().zip(&other.tail_bounds).all(|(a, b)| match (a, b) {
                (_, None) => true,
                (Some(x), Some(y)) => x <= y,
                (None, Some(_)) => false,
            })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (r, b) in self.tail_bounds.iter().enumerate() {
            if let Some(b) = b {
                let names: Vec<&str> = self.chain[r..].iter().map(|&i| self.vars[i].as_str()).collect();
                parts.push(format!("deg({}) <= {}", names.join(","), b));
            }
        }
        if parts.is_empty() {
            write!(f, "unbounded")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

/// A truncated series together with the window on which it is exact.
#[derive(Clone, PartialEq, Debug)]
pub struct CertifiedSeries<C = Scalar> {
    pub poly: Laurent<C>,
    pub window: Window,
}

#[derive(Clone, PartialEq, Debug)]
pub struct MatchReport {
    pub equal: bool,
    pub compared: usize,
    /// First differing monomial in lexicographic order, with both coefficients.
    pub witness: Option<(Exponents, Scalar, Scalar)>,
}

impl MatchReport {
    pub fn describe(&self, vars: &[String]) -> String {
        match &self.witness {
            None => format!("equal on {} monomials", self.compared),
            Some((e, a, b)) => format!(
                "differ at 1{}: {} vs {}",
                format_monomial(vars, e),
                format_scalar(a),
                format_scalar(b)
            ),
        }
    }
}

/// Coefficientwise comparison of two certified series on `window`.
///
/// When the window shares a chain with an operand it must lie inside that
/// operand's window; otherwise every compared monomial must be certified by
/// both operands.
pub fn series_match(
    a: &CertifiedSeries,
    b: &CertifiedSeries,
    window: &Window,
) -> Result<MatchReport, Error> {
    if a.poly.vars() != window.vars.as_slice() || b.poly.vars() != window.vars.as_slice() {
        return Err(Error::Variable("series_match operands use different variables".into()));
    }
    for (name, s) in [("left", a), ("right", b)] {
        if s.window.chain == window.chain && !window.within(&s.window) {
            return Err(Error::Window(format!(
                "comparison window [{window}] exceeds the {name} operand's certified window [{}]",
                s.window
            )));
        }
    }
    let mut monomials: Vec<&Exponents> = a
        .poly
        .terms()
        .map(|(e, _)| e)
        .chain(b.poly.terms().map(|(e, _)| e))
        .filter(|e| window.certifies(e))
        .collect();
    monomials.sort();
    monomials.dedup();
    let zero = Scalar::zero();
    for e in &monomials {
        for (name, s) in [("left", a), ("right", b)] {
            if !s.window.certifies(e) {
                return Err(Error::Window(format!(
                    "monomial 1{} is outside the {name} operand's certified window [{}]",
                    format_monomial(&window.vars, e),
                    s.window
                )));
            }
        }
    }
    for e in &monomials {
        let ca = a.poly.coeff(e).unwrap_or(&zero);
        let cb = b.poly.coeff(e).unwrap_or(&zero);
        if ca != cb {
            return Ok(MatchReport {
                equal: false,
                compared: monomials.len(),
                witness: Some(((*e).clone(), ca.clone(), cb.clone())),
            });
        }
    }
    Ok(MatchReport { equal: true, compared: monomials.len(), witness: None })
}

pub fn names(vs: &[&str]) -> Vec<String> {
    vs.iter().map(|s| s.to_string()).collect()
}
