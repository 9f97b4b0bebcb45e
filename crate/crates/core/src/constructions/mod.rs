//! Opposite MOSVA, module transports, the opposite vertex operator and the
//! contragredient module.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::exact_laurent::scalar::{factorial, int, sign, to_i64, Scalar};
use crate::graded::{Exact, GradedOp, GradedSpace, Vector};
use crate::structures::{AlgebraInstance, MapKind, ModuleInstance, Side, VertexMap};
use crate::verification::PoleOrderWitness;

/// One summand `(-1)^{n+k+1}/k! D^k Y_{n+k}(b)a` of a skew-symmetry sum.
#[derive(Clone, PartialEq, Debug)]
pub struct SkewTerm {
    pub k: u64,
    pub source_mode: i64,
}

/// Provenance of one entry of a skew-symmetry construction.
#[derive(Clone, PartialEq, Debug)]
pub struct SkewEntry {
    pub terms: Vec<SkewTerm>,
    /// The `D`-sum stopped because `D^k` left the represented range rather
    /// than because the summands vanished.
    pub stopped_at_cutoff: bool,
}

#[derive(Clone, PartialEq, Debug)]
pub struct OppositeWitness {
    pub source: Arc<AlgebraInstance>,
    pub result: Arc<AlgebraInstance>,
    pub mode_table: BTreeMap<(usize, usize, i64), SkewEntry>,
}

/// `out_n(a)b = sum_k (-1)^{n+k+1}/k! D^k src_{n+k}(b)a`, for every basis pair
/// and every mode whose output is represented.
///
/// The output weight is fixed at `t = wt a + wt b - n - 1` and `D^k` only
/// climbs to it, so every summand lies within the cutoff.
fn skew_map(
    src: &VertexMap,
    kind: MapKind,
    deriv: &GradedOp,
) -> Result<(VertexMap, BTreeMap<(usize, usize, i64), SkewEntry>), Error> {
    let first = src.second().clone();
    let second = src.first().clone();
    let target = src.target().clone();
    let min_t = target.min_weight().unwrap_or_else(Scalar::zero);
    let mut out = VertexMap::new(kind, first.clone(), second.clone(), target.clone());
    let pairs: Vec<(usize, usize)> =
        (0..first.dim()).flat_map(|a| (0..second.dim()).map(move |b| (a, b))).collect();
    let rows = crate::par::map(&pairs, |&(a, b)| -> Result<Vec<_>, Error> {
        let mut row = Vec::new();
        for n in out.modes(a, b) {
            let t = out.target_weight(a, b, n);
            if !target.represents(&t) {
                continue;
            }
            let kmax = to_i64(&(&t - &min_t)).unwrap_or(0).max(0);
            let mut acc = Vector::zero();
            let mut terms = Vec::new();
            let mut stopped = false;
            for k in 0..=kmax {
                let y = src.mode_basis(b, n + k, a);
                if !y.exact {
                    stopped = true;
                    continue;
                }
                if y.value.is_zero() {
                    continue;
                }
                let mut cur = y.value;
                for _ in 0..k {
                    let r = deriv.apply(&cur)?;
                    if !r.exact {
                        stopped = true;
                    }
                    cur = r.value;
                }
                let c = sign(n + k + 1) / factorial(k as u64);
                acc.add_scaled(&cur, &c);
                terms.push(SkewTerm { k: k as u64, source_mode: n + k });
            }
            row.push(((a, b, n), acc, SkewEntry { terms, stopped_at_cutoff: stopped }));
        }
        Ok(row)
    });
    let mut table = BTreeMap::new();
    for row in rows {
        for (key, v, entry) in row? {
            out.insert(key.0, key.1, key.2, v);
            if !entry.terms.is_empty() {
                table.insert(key, entry);
            }
        }
    }
    Ok((out, table))
}

/// `Y^s(u, x)v = e^{xD} Y(v, -x)u`; Mobius data carried over unchanged.
pub fn opposite_mosva(v: &Arc<AlgebraInstance>) -> Result<OppositeWitness, Error> {
    let (y, mode_table) = skew_map(&v.y, MapKind::Algebra, &v.deriv)?;
    let result = AlgebraInstance {
        name: opposite_name(&v.name),
        space: v.space.clone(),
        y,
        vacuum: v.vacuum.clone(),
        deriv: v.deriv.clone(),
        l1: v.l1.clone(),
    };
    Ok(OppositeWitness { source: v.clone(), result: Arc::new(result), mode_table })
}

fn opposite_name(name: &str) -> String {
    match name.strip_suffix("^op") {
        Some(base) => base.to_string(),
        None => format!("{name}^op"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    /// Right `V`-module to left `V^op`-module.
    RightToLeftOp,
    /// Left `V`-module to right `V^op`-module.
    LeftToRightOp,
    /// Left `V^op`-module back to right `V`-module.
    LeftOpToRight,
    /// Right `V^op`-module back to left `V`-module.
    RightOpToLeft,
}

impl Direction {
    pub const ALL: [Direction; 4] =
        [Direction::RightToLeftOp, Direction::LeftToRightOp, Direction::LeftOpToRight, Direction::RightOpToLeft];

    fn from_right(self) -> bool {
        matches!(self, Direction::RightToLeftOp | Direction::RightOpToLeft)
    }

    pub fn inverse(self) -> Direction {
        match self {
            Direction::RightToLeftOp => Direction::LeftOpToRight,
            Direction::LeftToRightOp => Direction::RightOpToLeft,
            Direction::LeftOpToRight => Direction::RightToLeftOp,
            Direction::RightOpToLeft => Direction::LeftToRightOp,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::RightToLeftOp => "right_to_left_op",
            Direction::LeftToRightOp => "left_to_right_op",
            Direction::LeftOpToRight => "left_op_to_right",
            Direction::RightOpToLeft => "right_op_to_left",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Direction::ALL
            .into_iter()
            .find(|d| d.to_string() == s)
            .ok_or_else(|| Error::Argument(format!("unknown direction {s:?}")))
    }
}

/// Moves a module across the left/right divide:
/// `Y^{s(R)}(v, x)w = e^{xD_W} Y^R(w, -x)v` and
/// `Y^{s(L)}(w, x)v = e^{xD_W} Y^L(v, -x)w`.
///
/// The inverse directions use the same formulas over the opposite algebra.
/// `target` is the algebra the result is a module over; when omitted it is
/// the opposite of the source algebra.
pub fn transport_module(
    w: &ModuleInstance,
    direction: Direction,
    target: Option<Arc<AlgebraInstance>>,
) -> Result<ModuleInstance, Error> {
    let (src, kind, side) = if direction.from_right() {
        let m = w.y_right.as_ref().ok_or_else(|| {
            Error::Argument(format!("direction {direction} needs a right module, got a {} module", w.side))
        })?;
        (m, MapKind::Left, Side::Left)
    } else {
        let m = w.y_left.as_ref().ok_or_else(|| {
            Error::Argument(format!("direction {direction} needs a left module, got a {} module", w.side))
        })?;
        (m, MapKind::Right, Side::Right)
    };
    let (map, _) = skew_map(src, kind, &w.deriv)?;
    let algebra = match target {
        Some(a) => {
            if a.space != w.algebra.space {
                return Err(Error::SpaceMismatch("target algebra has a different underlying space".into()));
            }
            a
        }
        None => opposite_mosva(&w.algebra)?.result,
    };
    let (y_left, y_right) = if side == Side::Left { (Some(map), None) } else { (None, Some(map)) };
    Ok(ModuleInstance {
        name: match w.name.strip_suffix(&format!(" via {}", direction.inverse())) {
            Some(base) => base.to_string(),
            None => format!("{} via {direction}", w.name),
        },
        side,
        algebra,
        space: w.space.clone(),
        y_left,
        y_right,
        deriv: w.deriv.clone(),
        l1: w.l1.clone(),
        n0: w.n0.clone(),
        grading_restricted: w.grading_restricted,
    })
}

/// `(Y^o)_n(u) = (-1)^h sum_m (1/m!) Y^L_{-n-m-2+2h}(L(1)^m u)` for `u` of
/// integer weight `h`, as an operator on `W` of weight `n + 1 - h`.
pub fn opposite_vertex_components(w: &ModuleInstance, u: &Vector, n: i64) -> Result<Exact<GradedOp>, Error> {
    let left = w.left()?;
    let alg = &w.algebra;
    let l1 = alg
        .l1
        .as_ref()
        .ok_or_else(|| Error::Argument("the opposite vertex operator needs L(1) on the algebra".into()))?;
    if u.is_zero() {
        return Ok(Exact::exact(GradedOp::zero(w.space.clone(), int(n + 1))));
    }
    let h = alg
        .space
        .weight_of(u)
        .ok_or_else(|| Error::Argument(format!("{} is not homogeneous", alg.space.format_vector(u))))?;
    let h = to_i64(&h).ok_or_else(|| Error::Argument("algebra weights must be integers".into()))?;
    let mut powers = Vec::new();
    let mut cur = u.clone();
    let mut m = 0u64;
    while !cur.is_zero() {
        powers.push((m, cur.clone()));
        cur = l1.apply(&cur)?.value;
        m += 1;
    }
    let shift = int(n + 1 - h);
    let space = w.space.clone();
    let mut action = BTreeMap::new();
    let mut exact = true;
    for c in 0..space.dim() {
        if !space.represents(&(space.weight(c) + &shift)) {
            exact = false;
            continue;
        }
        let mut acc = Vector::zero();
        for (m, v) in &powers {
            let r = left.mode_apply(v, -n - *m as i64 - 2 + 2 * h, &Vector::basis(c))?;
            exact &= r.exact;
            acc.add_scaled(&r.value, &(sign(h) / factorial(*m)));
        }
        action.insert(c, acc);
    }
    Ok(Exact { value: GradedOp::new(space, shift, action), exact })
}

/// The contragredient `W'` of a Mobius left module, a left module over
/// `V^op`: `<Y'_n(u)w', w> = <w', (Y^o)_n(u)w>`, `D' = L(1)^t`,
/// `L'(1) = D^t`, `N0' = N0^t`, on the dual bases.
///
/// Modules not claimed grading-restricted need a pole-order certificate
/// with an audited constant `C`.
pub fn contragredient_module(
    w: &ModuleInstance,
    certificate: Option<&PoleOrderWitness>,
) -> Result<ModuleInstance, Error> {
    w.left()?;
    if w.algebra.l1.is_none() || w.l1.is_none() {
        return Err(Error::Argument("the contragredient needs L(1) on both the algebra and the module".into()));
    }
    if !w.grading_restricted {
        match certificate {
            Some(c) if c.constant_c.is_some() => {}
            Some(_) => {
                return Err(Error::Argument(
                    "the pole-order certificate has no audited constant C".into(),
                ))
            }
            None => {
                return Err(Error::Argument(
                    "module is not grading-restricted; a strong pole-order certificate is required".into(),
                ))
            }
        }
    }
    let opposite = opposite_mosva(&w.algebra)?.result;
    let dual = Arc::new(w.space.dual());
    let alg_space = w.algebra.space.clone();
    let mut y = VertexMap::new(MapKind::Left, alg_space.clone(), dual.clone(), dual.clone());
    let keys: Vec<(usize, i64)> = (0..alg_space.dim())
        .flat_map(|u| {
            let mut ns: Vec<i64> = (0..dual.dim()).flat_map(|b| y.modes(u, b)).collect();
            ns.sort();
            ns.dedup();
            ns.into_iter().map(move |n| (u, n))
        })
        .collect();
    let blocks = crate::par::map(&keys, |&(u, n)| -> Result<Vec<(usize, Vector)>, Error> {
        let yo = opposite_vertex_components(w, &Vector::basis(u), n)?.value;
        let t = yo.transpose(dual.clone());
        Ok((0..dual.dim())
            .filter(|&b| dual.represents(&y.target_weight(u, b, n)))
            .map(|b| (b, t.apply_basis(b).value))
            .collect())
    });
    for (&(u, n), block) in keys.iter().zip(blocks) {
        for (b, v) in block? {
            y.insert(u, b, n, v);
        }
    }
    Ok(ModuleInstance {
        name: format!("{}'", w.name),
        side: Side::Left,
        algebra: opposite,
        space: dual.clone(),
        y_left: Some(y),
        y_right: None,
        deriv: w.l1.as_ref().unwrap().transpose(dual.clone()),
        l1: Some(w.deriv.transpose(dual.clone())),
        n0: w.n0.as_ref().map(|n| n.transpose(dual.clone())),
        grading_restricted: w.grading_restricted,
    })
}

/// Compares two vertex maps entry by entry on every entry certified in both;
/// returns the first difference. Spaces are matched by basis position, so a
/// map may be compared with one over relabelled (e.g. double dual) spaces.
pub fn compare_maps(a: &VertexMap, b: &VertexMap) -> Option<String> {
    let same = |x: &GradedSpace, y: &GradedSpace| {
        x.dim() == y.dim() && (0..x.dim()).all(|i| x.weight(i) == y.weight(i))
    };
    if !same(a.first(), b.first()) || !same(a.second(), b.second()) || !same(a.target(), b.target()) {
        return Some("maps are over differently graded spaces".into());
    }
    let keys: std::collections::BTreeSet<_> = a.entries().keys().chain(b.entries().keys()).collect();
    for &(x, y, n) in keys {
        let ra = a.mode_basis(x, n, y);
        let rb = b.mode_basis(x, n, y);
        if ra.exact && rb.exact && ra.value != rb.value {
            return Some(format!(
                "{}: {} vs {}",
                a.entry_name(x, y, n),
                a.target().format_vector(&ra.value),
                b.target().format_vector(&rb.value)
            ));
        }
    }
    None
}

/// Number of entries certified in both maps up to output weight `max_weight`.
pub fn certified_entry_count(a: &VertexMap, max_weight: Option<&Scalar>) -> usize {
    let mut count = 0;
    for x in 0..a.first().dim() {
        for y in 0..a.second().dim() {
            for n in a.modes(x, y) {
                let t = a.target_weight(x, y, n);
                if a.target().represents(&t) && max_weight.is_none_or(|m| &t <= m) {
                    count += 1;
                }
            }
        }
    }
    count
}
