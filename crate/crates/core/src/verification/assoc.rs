//! Weak associativity with a minimal-`p1` search, and the pole-order audit.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::error::Error;
use crate::exact_laurent::scalar::{binomial, floor_i64, format_scalar, int, Scalar};
use crate::graded::{Exact, GradedSpace, Vector};
use crate::report::Obligation;
use crate::structures::{Ctx, Elem};

use super::PoleOrderWitness;

/// Outcome of one weak-associativity search.
#[derive(Clone, Debug, PartialEq)]
pub struct AssocOutcome {
    pub inputs: String,
    /// Minimal `p1` for which both sides agree on the certified window.
    pub p1: Option<i64>,
    pub p1_max: i64,
    /// Number of certified `x0^a x2^b` coefficients compared at the reported `p1`.
    pub compared: usize,
    pub window: String,
    /// First differing coefficient at `p1_max` when the search fails.
    pub witness: Option<String>,
    pub pole: PoleOrderWitness,
}

impl AssocOutcome {
    pub fn passed(&self) -> bool {
        self.p1.is_some()
    }

    pub fn obligation(&self) -> Obligation {
        let window = match self.p1 {
            Some(p) => format!("{}; minimal p1 = {p}; {} coefficients", self.window, self.compared),
            None => format!("{}; p1 searched in [0, {}]", self.window, self.p1_max),
        };
        Obligation::from_witness("weak associativity", self.inputs.clone(), window, self.witness.clone())
    }
}

/// Largest weight the space determines: the cutoff, or the top weight of a
/// complete space.
fn cap(s: &GradedSpace) -> Scalar {
    s.cutoff().cloned().or_else(|| s.weight_list().last().cloned()).unwrap_or_else(Scalar::zero)
}

fn ceil_i64(s: &Scalar) -> i64 {
    -floor_i64(&-s)
}

struct Sides<'a> {
    ctx: &'a Ctx<'a>,
    a1: &'a Elem,
    a2: &'a Elem,
    a3: &'a Elem,
    inner_min: i64,
    left: HashMap<(i64, i64), Exact<Vector>>,
    right: HashMap<(i64, i64), Exact<Vector>>,
    inner_right: HashMap<i64, Exact<Elem>>,
}

impl Sides<'_> {
    /// Coefficient of `x0^a x2^b` in `Y(a1, x0+x2)Y(a2, x2)a3`, with the
    /// first power expanded in nonnegative powers of `x2`.
    fn left(&mut self, a: i64, b: i64) -> Result<Exact<Vector>, Error> {
        if let Some(v) = self.left.get(&(a, b)) {
            return Ok(v.clone());
        }
        let mut out = Vector::zero();
        let mut exact = true;
        let mut j = 0;
        // Y_{-(b-j)-1}(a2)a3 has x2-exponent b - j and vanishes below inner_min.
        while b - j >= self.inner_min {
            let inner = self.ctx.mode(self.a2, j - b - 1, self.a3)?;
            if !inner.exact {
                exact = false;
                break;
            }
            if !inner.value.vec.is_zero() {
                let outer = self.ctx.mode(self.a1, -(a + j) - 1, &inner.value)?;
                if !outer.exact {
                    exact = false;
                    break;
                }
                out.add_scaled(&outer.value.vec, &binomial(a + j, j as u64));
            }
            j += 1;
        }
        let r = Exact { value: out, exact };
        self.left.insert((a, b), r.clone());
        Ok(r)
    }

    /// Coefficient of `x0^a x2^b` in `Y(Y(a1, x0)a2, x2)a3`.
    fn right(&mut self, a: i64, b: i64) -> Result<Exact<Vector>, Error> {
        if let Some(v) = self.right.get(&(a, b)) {
            return Ok(v.clone());
        }
        let inner = match self.inner_right.get(&a) {
            Some(v) => v.clone(),
            None => {
                let v = self.ctx.mode(self.a1, -a - 1, self.a2)?;
                self.inner_right.insert(a, v.clone());
                v
            }
        };
        let r = if !inner.exact {
            Exact::absent(Vector::zero())
        } else if inner.value.vec.is_zero() {
            Exact::exact(Vector::zero())
        } else {
            let outer = self.ctx.mode(&inner.value, -b - 1, self.a3)?;
            Exact { value: outer.value.vec, exact: outer.exact }
        };
        self.right.insert((a, b), r.clone());
        Ok(r)
    }
}

/// Searches the minimal `p1 in [0, p1_max]` with
/// `(x0+x2)^p1 Y(a1, x0+x2)Y(a2, x2)a3 = (x0+x2)^p1 Y(Y(a1, x0)a2, x2)a3`
/// on every certified coefficient. `p1_max` defaults to
/// `wt a1 + wt a3 + cutoff`.
pub fn check_weak_associativity(
    ctx: &Ctx,
    a1: &Elem,
    a2: &Elem,
    a3: &Elem,
    p1_max: Option<i64>,
) -> Result<AssocOutcome, Error> {
    let (_, s12sp) = ctx.map_for(a1.sp, a2.sp)?;
    let (_, s23sp) = ctx.map_for(a2.sp, a3.sp)?;
    let (_, tsp) = ctx.map_for(a1.sp, s23sp)?;
    let inputs = format!("u1 = {}, u2 = {}, w = {}", ctx.format(a1), ctx.format(a2), ctx.format(a3));
    let default_max = |w1: &Scalar, w3: &Scalar, t: &GradedSpace| floor_i64(&(w1 + w3 + cap(t))).max(0);
    let t_space = ctx.space(tsp)?;
    if a1.vec.is_zero() || a2.vec.is_zero() || a3.vec.is_zero() {
        return Ok(AssocOutcome {
            inputs,
            p1: Some(0),
            p1_max: p1_max.unwrap_or(0),
            compared: 0,
            window: "zero argument".into(),
            witness: None,
            pole: PoleOrderWitness { p_axis: BTreeMap::from([(0, 0)]), ..Default::default() },
        });
    }
    let (w1, w2, w3) = (ctx.weight_of(a1)?, ctx.weight_of(a2)?, ctx.weight_of(a3)?);
    let p1_max = p1_max.unwrap_or_else(|| default_max(&w1, &w3, t_space));
    let w0 = &w1 + &w2 + &w3;
    let s12 = ctx.space(s12sp)?;
    let s23 = ctx.space(s23sp)?;
    if w0 > cap(t_space) {
        return Err(Error::WindowInsufficient {
            message: format!("{inputs}: total weight {} exceeds the certified range", format_scalar(&w0)),
            needed: format!("cutoff {}", format_scalar(&w0)),
        });
    }
    let lowest = |s: &GradedSpace| s.min_weight().unwrap_or_else(Scalar::zero);
    let a_max = floor_i64(&(cap(s12) - &w1 - &w2));
    let b_max = floor_i64(&(cap(s23) - &w2 - &w3));
    let b_min = ceil_i64(&(lowest(s23) - &w2 - &w3));
    let t_max = floor_i64(&(cap(t_space) - &w0));
    let t_min = ceil_i64(&(lowest(t_space) - &w0));
    let window = format!(
        "x0-degree <= {a_max}, x2-degree in [{b_min}, {b_max}], total output weight <= {}",
        format_scalar(&cap(t_space))
    );
    let mut sides = Sides {
        ctx,
        a1,
        a2,
        a3,
        inner_min: b_min,
        left: HashMap::new(),
        right: HashMap::new(),
        inner_right: HashMap::new(),
    };
    let target = t_space;
    let mut last_witness = None;
    for p in 0..=p1_max {
        let coeffs: Vec<Scalar> = (0..=p).map(|i| binomial(p, i as u64)).collect();
        let mut compared = 0;
        let mut witness = None;
        'scan: for b in b_min..=b_max {
            for t in (t_min + p)..=(t_max + p) {
                let a = t - b;
                if a > a_max + p {
                    continue;
                }
                let mut gl = Vector::zero();
                let mut gr = Vector::zero();
                let mut exact = true;
                for (i, c) in coeffs.iter().enumerate() {
                    let (fa, fb) = (a - i as i64, b - p + i as i64);
                    let l = sides.left(fa, fb)?;
                    let r = sides.right(fa, fb)?;
                    if !(l.exact && r.exact) {
                        exact = false;
                        break;
                    }
                    gl.add_scaled(&l.value, c);
                    gr.add_scaled(&r.value, c);
                }
                if !exact {
                    continue;
                }
                compared += 1;
                if gl != gr {
                    witness = Some(format!(
                        "p1 = {p}: coefficient of x0^{a} x2^{b}: left {} vs right {}",
                        target.format_vector(&gl),
                        target.format_vector(&gr)
                    ));
                    break 'scan;
                }
            }
        }
        if witness.is_none() {
            if compared == 0 {
                return Err(Error::WindowInsufficient {
                    message: format!("{inputs}: no certified coefficient at this cutoff"),
                    needed: format!("cutoff {}", format_scalar(&(&w0 + int(1)))),
                });
            }
            let pole = PoleOrderWitness {
                p_axis: BTreeMap::from([(0, p)]),
                p_diag: BTreeMap::new(),
                p1_search_bound: p1_max,
                constant_c: None,
            };
            return Ok(AssocOutcome { inputs, p1: Some(p), p1_max, compared, window, witness: None, pole });
        }
        last_witness = witness;
    }
    Ok(AssocOutcome {
        inputs,
        p1: None,
        p1_max,
        compared: 0,
        window,
        witness: last_witness,
        pole: PoleOrderWitness { p1_search_bound: p1_max, ..Default::default() },
    })
}

/// Result of a pole-order audit over a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleAudit {
    pub witness: PoleOrderWitness,
    /// Largest minimal `p1` over the varied `u2`, per `(u1, w)`.
    pub per_pair: BTreeMap<(String, String), i64>,
    /// Every sample with its minimal `p1`.
    pub samples: Vec<(String, i64)>,
    pub disclaimer: String,
}

impl PoleAudit {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((u1, w), p) in &self.per_pair {
            out.push_str(&format!("u1 = {u1}, w = {w}: max p1 = {p}\n"));
        }
        if let Some(c) = &self.witness.constant_c {
            out.push_str(&format!("constant C = {}\n", format_scalar(c)));
        }
        out.push_str(&self.disclaimer);
        out.push('\n');
        out
    }
}

/// Runs weak associativity on every sample and summarizes the pole orders:
/// the largest `p1` per `(u1, w)` and the least `C` with
/// `p1 <= wt u1 + wt w + C` on all samples.
pub fn audit_pole_order(ctx: &Ctx, samples: &[(Elem, Elem, Elem)], p1_max: Option<i64>) -> Result<PoleAudit, Error> {
    if samples.is_empty() {
        return Err(Error::EmptySamples("pole-order audit needs at least one sample".into()));
    }
    let outcomes = crate::par::map(samples, |(a, b, c)| check_weak_associativity(ctx, a, b, c, p1_max));
    let mut per_pair = BTreeMap::new();
    let mut listed = Vec::new();
    let mut c_max: Option<Scalar> = None;
    let mut p_top = 0;
    let mut bound = 0;
    for ((u1, _, w), o) in samples.iter().zip(outcomes) {
        let o = o?;
        let Some(p) = o.p1 else {
            return Err(Error::Argument(format!(
                "pole-order search bound {} exceeded for {}: {}",
                o.p1_max,
                o.inputs,
                o.witness.unwrap_or_default()
            )));
        };
        let c = int(p) - ctx.weight_of(u1)? - ctx.weight_of(w)?;
        if c_max.as_ref().is_none_or(|m| &c > m) {
            c_max = Some(c);
        }
        let e = per_pair.entry((ctx.format(u1), ctx.format(w))).or_insert(p);
        *e = (*e).max(p);
        p_top = p_top.max(p);
        bound = bound.max(o.p1_max);
        listed.push((o.inputs, p));
    }
    Ok(PoleAudit {
        witness: PoleOrderWitness {
            p_axis: BTreeMap::from([(0, p_top)]),
            p_diag: BTreeMap::new(),
            p1_search_bound: bound,
            constant_c: c_max,
        },
        per_pair,
        samples: listed,
        disclaimer: format!(
            "windowed evidence over {} samples at the instance cutoff, not a proof over the whole algebra",
            samples.len()
        ),
    })
}
