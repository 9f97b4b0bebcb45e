//! Rational functions with poles on the divisor `{z_i = 0} ∪ {z_i = z_j}` and
//! their Laurent expansions in modulus-ordered regions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::poly::{CertifiedSeries, Exponents, LaurentPoly, Window};
use super::scalar::{binomial, format_scalar, pow_i, Scalar};
use crate::error::Error;

/// `numerator / (prod z_i^{p_i} prod_{i<j} (z_i - z_j)^{p_ij})`, kept reduced.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalFn {
    vars: Vec<String>,
    numerator: LaurentPoly,
    pole_axis: BTreeMap<usize, u32>,
    pole_diag: BTreeMap<(usize, usize), u32>,
}

impl RationalFn {
    pub fn new(
        numerator: LaurentPoly,
        pole_axis: BTreeMap<usize, u32>,
        pole_diag: BTreeMap<(usize, usize), u32>,
    ) -> Result<Self, Error> {
        let vars = numerator.vars().to_vec();
        let n = vars.len();
        if numerator.terms().any(|(e, _)| e.iter().any(|&k| k < 0)) {
            return Err(Error::Rational("numerator has negative exponents".into()));
        }
        if pole_axis.keys().any(|&i| i >= n) || pole_diag.keys().any(|&(i, j)| i >= j || j >= n) {
            return Err(Error::Rational("pole index out of range or diagonal pair not ordered".into()));
        }
        let mut f = RationalFn { vars, numerator, pole_axis, pole_diag };
        f.reduce();
        Ok(f)
    }

    /// Polynomial (no poles).
    pub fn polynomial(numerator: LaurentPoly) -> Result<Self, Error> {
        Self::new(numerator, BTreeMap::new(), BTreeMap::new())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.numerator
    }

    pub fn pole_axis(&self, i: usize) -> u32 {
        self.pole_axis.get(&i).copied().unwrap_or(0)
    }

    pub fn pole_diag(&self, i: usize, j: usize) -> u32 {
        self.pole_diag.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Cancels common factors `z_i` and `z_i - z_j` between numerator and
    /// denominator.
    fn reduce(&mut self) {
        self.pole_axis.retain(|_, p| *p > 0);
        self.pole_diag.retain(|_, p| *p > 0);
        if self.numerator.is_zero() {
            self.pole_axis.clear();
            self.pole_diag.clear();
            return;
        }
        for (&i, p) in self.pole_axis.iter_mut() {
            let shift = self.numerator.min_exponent(i).unwrap_or(0).min(*p as i64);
            if shift > 0 {
                let mut out = LaurentPoly::zero(self.vars.clone());
                for (e, c) in self.numerator.terms() {
                    let mut ne = e.clone();
                    ne[i] -= shift;
                    out.add_term(ne, c);
                }
                self.numerator = out;
                *p -= shift as u32;
            }
        }
        let pairs: Vec<(usize, usize)> = self.pole_diag.keys().copied().collect();
        for (i, j) in pairs {
            while self.pole_diag[&(i, j)] > 0 {
                match divide_by_difference(&self.numerator, i, j) {
                    Some(q) => {
                        self.numerator = q;
                        *self.pole_diag.get_mut(&(i, j)).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.pole_axis.retain(|_, p| *p > 0);
        self.pole_diag.retain(|_, p| *p > 0);
    }

    /// The denominator `prod z_i^{p_i} prod (z_i - z_j)^{p_ij}` as a polynomial.
    pub fn denominator(&self) -> LaurentPoly {
        divisor_poly(&self.vars, &self.pole_axis, &self.pole_diag)
    }

    /// Total degree of the numerator, `None` for the zero function.
    pub fn numerator_degree(&self) -> Option<i64> {
        self.numerator.total_degrees().last().copied()
    }
}

/// `prod z_i^{p_i} prod (z_i - z_j)^{p_ij}` over `vars`.
pub fn divisor_poly(
    vars: &[String],
    axis: &BTreeMap<usize, u32>,
    diag: &BTreeMap<(usize, usize), u32>,
) -> LaurentPoly {
    let n = vars.len();
    let mut e = vec![0; n];
    for (&i, &p) in axis {
        e[i] += p as i64;
    }
    let mut acc = LaurentPoly::monomial(vars.to_vec(), e, Scalar::one());
    for (&(i, j), &p) in diag {
        let zi = LaurentPoly::variable(vars.to_vec(), &vars[i]);
        let zj = LaurentPoly::variable(vars.to_vec(), &vars[j]);
        acc = acc.mul(&zi.sub(&zj).pow(p));
    }
    acc
}

/// Exact quotient `p / (z_i - z_j)` if it exists.
fn divide_by_difference(p: &LaurentPoly, i: usize, j: usize) -> Option<LaurentPoly> {
    let vars = p.vars().to_vec();
    let mut rem = p.clone();
    let mut quo = LaurentPoly::zero(vars.clone());
    loop {
        let lead = rem
            .terms()
            .filter(|(e, _)| e[i] > 0)
            .max_by_key(|(e, _)| (e[i], (*e).clone()))
            .map(|(e, c)| (e.clone(), c.clone()));
        let Some((e, c)) = lead else { break };
        let mut qe = e.clone();
        qe[i] -= 1;
        let term = LaurentPoly::monomial(vars.clone(), qe.clone(), c);
        let mut ze = vec![0; vars.len()];
        ze[i] = 1;
        let mut we = vec![0; vars.len()];
        we[j] = 1;
        let diff = LaurentPoly::monomial(vars.clone(), ze, Scalar::one())
            .sub(&LaurentPoly::monomial(vars.clone(), we, Scalar::one()));
        rem = rem.sub(&term.mul(&diff));
        quo = quo.add(&term);
    }
    if rem.is_zero() {
        Some(quo)
    } else {
        None
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerator)?;
        let mut den = Vec::new();
        for (&i, &p) in &self.pole_axis {
            den.push(if p == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], p) });
        }
        for (&(i, j), &p) in &self.pole_diag {
            let base = format!("({}-{})", self.vars[i], self.vars[j]);
            den.push(if p == 1 { base } else { format!("{base}^{p}") });
        }
        if !den.is_empty() {
            write!(f, " / ({})", den.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Product,
    Iterate,
    CustomChain,
}

/// A modulus-ordered expansion region.
///
/// * `Product`: `|z_1| > |z_2| > ... > |z_n| > 0`.
/// * `Iterate`: the iterate region, expressed in the difference variables
///   `z_1-z_2, ..., z_{n-1}-z_n, z_n` with `z_n` dominant and each
///   difference dominating the ones before it.
/// * `CustomChain`: any strict modulus ordering of the original variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Region {
    pub kind: RegionKind,
    /// Variable names from largest to smallest modulus.
    pub chain: Vec<String>,
}

impl Region {
    pub fn product(vars: &[String]) -> Self {
        Region { kind: RegionKind::Product, chain: vars.to_vec() }
    }

    pub fn iterate(vars: &[String]) -> Self {
        let mut chain = iterate_var_names(vars);
        chain.reverse();
        Region { kind: RegionKind::Iterate, chain }
    }

    pub fn custom(chain: &[&str]) -> Self {
        Region { kind: RegionKind::CustomChain, chain: chain.iter().map(|s| s.to_string()).collect() }
    }
}

/// Difference variables `z1-z2, z2-z3, ..., z_n` for an iterate of `vars`.
pub fn iterate_var_names(vars: &[String]) -> Vec<String> {
    let n = vars.len();
    (0..n)
        .map(|i| if i + 1 < n { format!("{}-{}", vars[i], vars[i + 1]) } else { vars[i].clone() })
        .collect()
}

struct LinearFactor {
    coeffs: Vec<i64>,
    power: u32,
}

/// Unique Laurent expansion of `f` in `region`.
///
/// Every denominator factor `L^{-p}` is expanded around its dominant variable
/// (the one of largest modulus in the chain) keeping `k <= order` terms. The
/// returned window bounds each chain tail sum by its minimum plus `order`;
/// every monomial of the true expansion inside it is present and exact.
pub fn expand_rational(f: &RationalFn, region: &Region, order: i64) -> Result<CertifiedSeries, Error> {
    if order < 0 {
        return Err(Error::Rational("expansion order must be nonnegative".into()));
    }
    let n = f.vars.len();
    let (out_vars, numerator, factors) = match region.kind {
        RegionKind::Product | RegionKind::CustomChain => {
            let mut factors = Vec::new();
            for (&i, &p) in &f.pole_axis {
                let mut c = vec![0; n];
                c[i] = 1;
                factors.push(LinearFactor { coeffs: c, power: p });
            }
            for (&(i, j), &p) in &f.pole_diag {
                let mut c = vec![0; n];
                c[i] = 1;
                c[j] = -1;
                factors.push(LinearFactor { coeffs: c, power: p });
            }
            (f.vars.clone(), f.numerator.clone(), factors)
        }
        RegionKind::Iterate => {
            let zeta = iterate_var_names(&f.vars);
            // z_i = zeta_i + ... + zeta_n
            let images: Vec<LaurentPoly> = (0..n)
                .map(|i| {
                    (i..n).fold(LaurentPoly::zero(zeta.clone()), |acc, j| {
                        acc.add(&LaurentPoly::variable(zeta.clone(), &zeta[j]))
                    })
                })
                .collect();
            let numerator = f.numerator.substitute(&images, &zeta)?;
            let mut factors = Vec::new();
            for (&i, &p) in &f.pole_axis {
                let c = (0..n).map(|j| i64::from(j >= i)).collect();
                factors.push(LinearFactor { coeffs: c, power: p });
            }
            for (&(i, j), &p) in &f.pole_diag {
                let c = (0..n).map(|k| i64::from(k >= i && k < j)).collect();
                factors.push(LinearFactor { coeffs: c, power: p });
            }
            (zeta, numerator, factors)
        }
    };
    let chain: Vec<usize> = region
        .chain
        .iter()
        .map(|name| {
            out_vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Rational(format!("region variable {name} not among {out_vars:?}")))
        })
        .collect::<Result<_, _>>()?;
    let mut seen = chain.clone();
    seen.sort_unstable();
    seen.dedup();
    if chain.len() != n || seen.len() != n {
        return Err(Error::Rational("region chain must order every variable exactly once".into()));
    }
    if region.kind == RegionKind::Product && chain != (0..n).collect::<Vec<_>>() {
        return Err(Error::Rational("product region must follow the variable order".into()));
    }
    let mut pos = vec![0; n];
    for (r, &v) in chain.iter().enumerate() {
        pos[v] = r;
    }
    let tail = |e: &[i64], r: usize| -> i64 { chain[r..].iter().map(|&i| e[i]).sum() };

    let mut window = Window::unbounded(out_vars.clone(), chain.clone());
    if numerator.is_zero() {
        return Ok(CertifiedSeries { poly: numerator, window });
    }
    // Running minimum of each tail sum over the partial product.
    let mut base: Vec<i64> = (0..n)
        .map(|r| numerator.terms().map(|(e, _)| tail(e, r)).min().unwrap())
        .collect();
    let mut acc = numerator;
    for factor in &factors {
        let d = (0..n)
            .filter(|&i| factor.coeffs[i] != 0)
            .min_by_key(|&i| pos[i])
            .ok_or_else(|| Error::Rational("empty linear factor".into()))?;
        let cd = Scalar::from_integer(factor.coeffs[d].into());
        let p = factor.power as i64;
        let mut rest_e = factor.coeffs.clone();
        rest_e[d] = 0;
        let mut rest = LaurentPoly::zero(out_vars.clone());
        for (i, &c) in rest_e.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; n];
                e[i] = 1;
                rest.add_term(e, &Scalar::from_integer(c.into()));
            }
        }
        let kmax = if rest.is_zero() { 0 } else { order };
        let mut series = LaurentPoly::zero(out_vars.clone());
        let mut rest_pow = LaurentPoly::constant(out_vars.clone(), Scalar::one());
        for k in 0..=kmax {
            let coef = binomial(-p, k as u64) * pow_i(&cd, -p - k);
            let mut e = vec![0; n];
            e[d] = -p - k;
            let lead = LaurentPoly::monomial(out_vars.clone(), e, coef);
            series = series.add(&lead.mul(&rest_pow));
            rest_pow = rest_pow.mul(&rest);
        }
        for (r, b) in base.iter_mut().enumerate() {
            if pos[d] >= r {
                *b -= p;
            }
        }
        let product = acc.mul(&series);
        let mut pruned = LaurentPoly::zero(out_vars.clone());
        for (e, c) in product.terms() {
            if (1..n).all(|r| tail(e, r) <= base[r] + order) {
                pruned.add_term(e.clone(), c);
            }
        }
        acc = pruned;
    }
    for r in 1..n {
        window.tail_bounds[r] = Some(base[r] + order);
    }
    Ok(CertifiedSeries { poly: acc, window })
}

/// Substitutes `var -> a + b` in a rational function and expands in
/// nonnegative powers of `expansion_var` up to `order`.
///
/// Poles `var^p` become `(a+b)^{-p}` and are expanded binomially. A diagonal
/// pole `(var - w)^p` whose other summand is `w` cancels exactly to the
/// expansion variable's power. All remaining poles must be monomial.
pub fn taylor_shift_rational(
    f: &RationalFn,
    var: &str,
    replacement: (&str, &str),
    expansion_var: &str,
    order: i64,
) -> Result<LaurentPoly, Error> {
    let (a, b) = replacement;
    if (expansion_var != a && expansion_var != b) || a == b || order < 0 {
        return Err(Error::Variable(format!("malformed replacement {var} -> {a} + {b}")));
    }
    let other = if expansion_var == a { b } else { a };
    let vi = f
        .vars
        .iter()
        .position(|v| v == var)
        .ok_or_else(|| Error::Variable(format!("unknown variable {var}")))?;
    let mut out_vars: Vec<String> = f.vars.iter().filter(|v| *v != var).cloned().collect();
    for v in [other, expansion_var] {
        if !out_vars.iter().any(|w| w == v) {
            out_vars.push(v.to_string());
        }
    }
    let idx = |name: &str| out_vars.iter().position(|v| v == name).unwrap();
    let mut acc = f
        .numerator
        .taylor_shift(var, (a, b), expansion_var, order)?
        .with_vars(&out_vars)?;
    let shifted_power = |p: i64| -> Result<LaurentPoly, Error> {
        let vars1 = vec![var.to_string()];
        LaurentPoly::monomial(vars1, vec![p], Scalar::one())
            .taylor_shift(var, (a, b), expansion_var, order)?
            .with_vars(&out_vars)
    };
    for (&i, &p) in &f.pole_axis {
        if i == vi {
            acc = acc.mul(&shifted_power(-(p as i64))?);
        } else {
            let mut e = vec![0; out_vars.len()];
            e[idx(&f.vars[i])] = -(p as i64);
            acc = acc.mul(&LaurentPoly::monomial(out_vars.clone(), e, Scalar::one()));
        }
    }
    for (&(i, j), &p) in &f.pole_diag {
        let (sign, w) = if i == vi {
            (1i64, &f.vars[j])
        } else if j == vi {
            (-1i64, &f.vars[i])
        } else {
            return Err(Error::Rational(format!(
                "pole ({}-{}) is not a Laurent monomial after substitution",
                f.vars[i], f.vars[j]
            )));
        };
        if w != other {
            return Err(Error::Rational(format!(
                "pole ({}-{}) does not cancel under {var} -> {a} + {b}",
                f.vars[i], f.vars[j]
            )));
        }
        // (var - w) = expansion_var, (w - var) = -expansion_var
        let mut e = vec![0; out_vars.len()];
        e[idx(expansion_var)] = -(p as i64);
        let c = pow_i(&Scalar::from_integer(sign.into()), -(p as i64));
        acc = acc.mul(&LaurentPoly::monomial(out_vars.clone(), e, c));
    }
    // Powers of the expansion variable beyond `order` are not certified.
    let xi = idx(expansion_var);
    let mut out = LaurentPoly::zero(out_vars.clone());
    for (e, c) in acc.terms() {
        if e[xi] <= order {
            out.add_term(e.clone(), c);
        }
    }
    Ok(out)
}

/// Human-readable `coefficient*monomial` list, used in reports.
pub fn describe_terms(p: &LaurentPoly, max: usize) -> String {
    let mut parts: Vec<String> = p
        .terms()
        .take(max)
        .map(|(e, c): (&Exponents, &Scalar)| format!("{}{}", format_scalar(c), super::poly::format_monomial(p.vars(), e)))
        .collect();
    if p.len() > max {
        parts.push("...".into());
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
