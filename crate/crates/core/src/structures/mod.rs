//! MOSVAs and their left, right and bi-modules at a weight cutoff, stored as
//! sparse structure constants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact_laurent::poly::{CertifiedSeries, Laurent, Window};
use crate::exact_laurent::scalar::{floor_i64, format_scalar, int, is_integer, to_i64, Scalar};
use crate::graded::{Exact, GradedOp, GradedSpace, Vector};
use crate::report::{Obligation, Report};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `Y_V(u, x)v`, keys `(u, v, n)`.
    Algebra,
    /// `Y^L_W(u, x)w`, keys `(u, w, n)`.
    Left,
    /// `Y^R_W(w, x)u`, keys `(w, u, n)`.
    Right,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Algebra => "Y_V",
            MapKind::Left => "Y^L",
            MapKind::Right => "Y^R",
        })
    }
}

/// Sparse structure constants `(a, b, n) -> Y_n(a)b`.
///
/// A missing entry whose output weight `wt a + wt b - n - 1` lies within the
/// target cutoff is zero; above the cutoff it is absent.
#[derive(Clone, PartialEq, Debug)]
pub struct VertexMap {
    kind: MapKind,
    first: Arc<GradedSpace>,
    second: Arc<GradedSpace>,
    target: Arc<GradedSpace>,
    entries: BTreeMap<(usize, usize, i64), Vector>,
}

impl VertexMap {
    pub fn new(kind: MapKind, first: Arc<GradedSpace>, second: Arc<GradedSpace>, target: Arc<GradedSpace>) -> Self {
        VertexMap { kind, first, second, target, entries: BTreeMap::new() }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn first(&self) -> &Arc<GradedSpace> {
        &self.first
    }

    pub fn second(&self) -> &Arc<GradedSpace> {
        &self.second
    }

    pub fn target(&self) -> &Arc<GradedSpace> {
        &self.target
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize, i64), Vector> {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize, n: i64) -> Option<&Vector> {
        self.entries.get(&(a, b, n))
    }

    pub fn insert(&mut self, a: usize, b: usize, n: i64, v: Vector) {
        if v.is_zero() {
            self.entries.remove(&(a, b, n));
        } else {
            self.entries.insert((a, b, n), v);
        }
    }

    /// `wt a + wt b - n - 1`.
    pub fn target_weight(&self, a: usize, b: usize, n: i64) -> Scalar {
        self.first.weight(a) + self.second.weight(b) - int(n) - int(1)
    }

    /// Modes `n` (ascending) whose output weight is a represented weight of
    /// the target. Every other mode is zero or absent.
    pub fn modes(&self, a: usize, b: usize) -> Vec<i64> {
        let s = self.first.weight(a) + self.second.weight(b) - int(1);
        let mut out: Vec<i64> = self
            .target
            .weight_list()
            .iter()
            .filter_map(|t| {
                let n = &s - t;
                to_i64(&n)
            })
            .collect();
        out.sort();
        out
    }

    /// Largest certified power of `x` in `Y(a, x)b`, if bounded.
    pub fn exponent_bound(&self, a: usize, b: usize) -> Option<i64> {
        self.target
            .cutoff()
            .map(|c| floor_i64(&(c - self.first.weight(a) - self.second.weight(b))))
    }

    pub fn mode_basis(&self, a: usize, n: i64, b: usize) -> Exact<Vector> {
        if !self.target.represents(&self.target_weight(a, b, n)) {
            return Exact::absent(Vector::zero());
        }
        Exact::exact(self.entries.get(&(a, b, n)).cloned().unwrap_or_default())
    }

    /// `Y_n(u)v` by bilinear extension.
    pub fn mode_apply(&self, u: &Vector, n: i64, v: &Vector) -> Result<Exact<Vector>, Error> {
        self.first.check_vector(u)?;
        self.second.check_vector(v)?;
        let mut out = Vector::zero();
        let mut exact = true;
        for (&a, ca) in u.entries() {
            for (&b, cb) in v.entries() {
                let r = self.mode_basis(a, n, b);
                exact &= r.exact;
                out.add_scaled(&r.value, &(ca * cb));
            }
        }
        Ok(Exact { value: out, exact })
    }

    /// `Y(u, x)v = sum_n Y_n(u)v x^{-n-1}` with the window of certified powers.
    pub fn series(&self, u: &Vector, v: &Vector, var: &str) -> Result<CertifiedSeries<Vector>, Error> {
        self.first.check_vector(u)?;
        self.second.check_vector(v)?;
        let vars = vec![var.to_string()];
        let mut poly = Laurent::zero(vars.clone());
        let mut window = Window::natural(vars);
        for (&a, ca) in u.entries() {
            for (&b, cb) in v.entries() {
                if let Some(bound) = self.exponent_bound(a, b) {
                    window.tail_bounds[0] = Some(window.tail_bounds[0].map_or(bound, |x: i64| x.min(bound)));
                }
                let c = ca * cb;
                for n in self.modes(a, b) {
                    if let Some(e) = self.entries.get(&(a, b, n)) {
                        poly.add_term(vec![-n - 1], &e.scale(&c));
                    }
                }
            }
        }
        Ok(CertifiedSeries { poly, window })
    }

    pub fn entry_name(&self, a: usize, b: usize, n: i64) -> String {
        format!("{}_{}({}){}", self.kind, n, self.first.label(a), self.second.label(b))
    }

    /// Entries whose output leaves the predicted weight or lies above the
    /// target cutoff.
    pub fn homogeneity_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (&(a, b, n), v) in &self.entries {
            let t = self.target_weight(a, b, n);
            if !self.target.represents(&t) {
                bad.push(format!("{} stored above the cutoff (weight {})", self.entry_name(a, b, n), format_scalar(&t)));
            } else if let Some(j) = v.support().find(|&j| self.target.weight(j) != &t) {
                bad.push(format!(
                    "{} has a component {} of weight {}, expected weight {}",
                    self.entry_name(a, b, n),
                    self.target.label(j),
                    format_scalar(self.target.weight(j)),
                    format_scalar(&t)
                ));
            }
        }
        bad
    }
}

/// A MOSVA `(V, Y_V, 1)` with `D = L(-1)` and optional `L(1)`; `d` is read
/// off the weights.
#[derive(Clone, PartialEq, Debug)]
pub struct AlgebraInstance {
    pub name: String,
    pub space: Arc<GradedSpace>,
    pub y: VertexMap,
    pub vacuum: Vector,
    pub deriv: GradedOp,
    pub l1: Option<GradedOp>,
}

impl AlgebraInstance {
    pub fn cutoff(&self) -> Option<&Scalar> {
        self.space.cutoff()
    }

    pub fn grading(&self) -> GradedOp {
        GradedOp::grading(self.space.clone())
    }

    pub fn vector(&self, label: &str) -> Result<Vector, Error> {
        self.space.basis_vector(label)
    }

    pub fn is_mobius(&self) -> bool {
        self.l1.is_some()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Bi,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bi => "bi",
        })
    }
}

/// A left, right or bi-module over `algebra`. `L(0) = d + n0`.
///
/// `grading_restricted` is the claim that every weight space of the full
/// module is finite-dimensional; a truncated instance cannot test it.
#[derive(Clone, PartialEq, Debug)]
pub struct ModuleInstance {
    pub name: String,
    pub side: Side,
    pub algebra: Arc<AlgebraInstance>,
    pub space: Arc<GradedSpace>,
    pub y_left: Option<VertexMap>,
    pub y_right: Option<VertexMap>,
    pub deriv: GradedOp,
    pub l1: Option<GradedOp>,
    pub n0: Option<GradedOp>,
    pub grading_restricted: bool,
}

impl ModuleInstance {
    pub fn cutoff(&self) -> Option<&Scalar> {
        self.space.cutoff()
    }

    pub fn grading(&self) -> GradedOp {
        GradedOp::grading(self.space.clone())
    }

    /// `L(0) = d + N0`.
    pub fn l0(&self) -> GradedOp {
        match &self.n0 {
            Some(n) => self.grading().add(n).expect("N0 has weight zero"),
            None => self.grading(),
        }
    }

    pub fn left(&self) -> Result<&VertexMap, Error> {
        self.y_left.as_ref().ok_or_else(|| Error::Argument(format!("{} module has no left action", self.side)))
    }

    pub fn right(&self) -> Result<&VertexMap, Error> {
        self.y_right.as_ref().ok_or_else(|| Error::Argument(format!("{} module has no right action", self.side)))
    }

    pub fn vector(&self, label: &str) -> Result<Vector, Error> {
        self.space.basis_vector(label)
    }

    pub fn is_mobius(&self) -> bool {
        self.l1.is_some() && self.algebra.l1.is_some()
    }
}

/// Which space an element lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Sp {
    V,
    W,
}

/// A vector tagged with its space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Elem {
    pub sp: Sp,
    pub vec: Vector,
}

impl Elem {
    pub fn v(vec: Vector) -> Self {
        Elem { sp: Sp::V, vec }
    }
    pub fn w(vec: Vector) -> Self {
        Elem { sp: Sp::W, vec }
    }
}

/// An algebra with an optional module: the setting in which products of
/// vertex operators are formed. The map used for `Y(a, x)b` is chosen from
/// the spaces of `a` and `b`: `(V, V)` uses `Y_V`, `(V, W)` uses `Y^L` and
/// `(W, V)` uses `Y^R`.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub algebra: &'a AlgebraInstance,
    pub module: Option<&'a ModuleInstance>,
}

impl<'a> Ctx<'a> {
    pub fn algebra(algebra: &'a AlgebraInstance) -> Self {
        Ctx { algebra, module: None }
    }

    pub fn module(module: &'a ModuleInstance) -> Self {
        Ctx { algebra: &module.algebra, module: Some(module) }
    }

    fn need_module(&self) -> Result<&'a ModuleInstance, Error> {
        self.module.ok_or_else(|| Error::Argument("a module element was given but no module is present".into()))
    }

    pub fn space(&self, sp: Sp) -> Result<&'a Arc<GradedSpace>, Error> {
        Ok(match sp {
            Sp::V => &self.algebra.space,
            Sp::W => &self.need_module()?.space,
        })
    }

    pub fn map_for(&self, a: Sp, b: Sp) -> Result<(&'a VertexMap, Sp), Error> {
        match (a, b) {
            (Sp::V, Sp::V) => Ok((&self.algebra.y, Sp::V)),
            (Sp::V, Sp::W) => Ok((self.need_module()?.left()?, Sp::W)),
            (Sp::W, Sp::V) => Ok((self.need_module()?.right()?, Sp::W)),
            (Sp::W, Sp::W) => Err(Error::Argument("no vertex operator pairs two module elements".into())),
        }
    }

    pub fn deriv(&self, sp: Sp) -> Result<&'a GradedOp, Error> {
        Ok(match sp {
            Sp::V => &self.algebra.deriv,
            Sp::W => &self.need_module()?.deriv,
        })
    }

    pub fn l1(&self, sp: Sp) -> Result<Option<&'a GradedOp>, Error> {
        Ok(match sp {
            Sp::V => self.algebra.l1.as_ref(),
            Sp::W => self.need_module()?.l1.as_ref(),
        })
    }

    pub fn l0(&self, sp: Sp) -> Result<GradedOp, Error> {
        Ok(match sp {
            Sp::V => self.algebra.grading(),
            Sp::W => self.need_module()?.l0(),
        })
    }

    pub fn mode(&self, a: &Elem, n: i64, b: &Elem) -> Result<Exact<Elem>, Error> {
        let (m, sp) = self.map_for(a.sp, b.sp)?;
        let r = m.mode_apply(&a.vec, n, &b.vec)?;
        Ok(Exact { value: Elem { sp, vec: r.value }, exact: r.exact })
    }

    pub fn series(&self, a: &Elem, b: &Elem, var: &str) -> Result<(CertifiedSeries<Vector>, Sp), Error> {
        let (m, sp) = self.map_for(a.sp, b.sp)?;
        Ok((m.series(&a.vec, &b.vec, var)?, sp))
    }

    pub fn label(&self, sp: Sp, i: usize) -> Result<&'a str, Error> {
        Ok(self.space(sp)?.label(i))
    }

    pub fn format(&self, e: &Elem) -> String {
        match self.space(e.sp) {
            Ok(s) => s.format_vector(&e.vec),
            Err(_) => "?".into(),
        }
    }

    pub fn weight_of(&self, e: &Elem) -> Result<Scalar, Error> {
        let s = self.space(e.sp)?;
        s.weight_of(&e.vec)
            .ok_or_else(|| Error::Argument(format!("{} is not homogeneous", s.format_vector(&e.vec))))
    }
}

fn op_obligation(report: &mut Report, what: &str, op: Option<&GradedOp>, expected_shift: i64) {
    if let Some(op) = op {
        let mut bad = op.homogeneity_violations();
        if op.shift() != &int(expected_shift) {
            bad.insert(0, format!("weight shift {} instead of {expected_shift}", format_scalar(op.shift())));
        }
        report.push(Obligation::from_witness(format!("{what} homogeneity"), what, "", bad.into_iter().next()));
    }
}

fn map_obligations(report: &mut Report, m: &VertexMap) {
    let window = match m.target().cutoff() {
        Some(c) => format!("output weight <= {}", format_scalar(c)),
        None => "complete".into(),
    };
    report.push(Obligation::from_witness(
        format!("{} homogeneity", m.kind()),
        format!("{} stored entries", m.entries().len()),
        window.clone(),
        m.homogeneity_violations().into_iter().next(),
    ));
    // [d, Y_n(a)] b = (wt a - n - 1) Y_n(a) b on every stored entry.
    let d = GradedOp::grading(m.target().clone());
    let mut witness = None;
    for (&(a, b, n), v) in m.entries() {
        let lhs = d.apply(v).expect("entry in target").value.sub(&v.scale(m.second().weight(b)));
        let rhs = v.scale(&(m.first().weight(a) - int(n) - int(1)));
        if lhs != rhs {
            witness = Some(format!("[d, {}] differs from its weight multiple", m.entry_name(a, b, n)));
            break;
        }
    }
    report.push(Obligation::from_witness(format!("{} d-commutator", m.kind()), "all stored entries", window, witness));
    report.push(Obligation::pass(
        format!("{} lower truncation", m.kind()),
        "finitely many stored modes per pair",
        "",
    ));
}

/// Basis-level structural invariants of an algebra.
pub fn validate_algebra(v: &AlgebraInstance) -> Report {
    let mut report = Report::new(format!("structural checks for {}", v.name));
    let nonint = (0..v.space.dim()).find(|&i| !is_integer(v.space.weight(i)));
    report.push(Obligation::from_witness(
        "integer grading",
        "algebra weights",
        "",
        nonint.map(|i| format!("{} has weight {}", v.space.label(i), format_scalar(v.space.weight(i)))),
    ));
    let vac = if v.vacuum.is_zero() {
        Some("vacuum is zero".to_string())
    } else {
        match v.space.weight_of(&v.vacuum) {
            Some(w) if w.is_zero() => None,
            _ => Some(format!("vacuum {} is not of weight 0", v.space.format_vector(&v.vacuum))),
        }
    };
    report.push(Obligation::from_witness("vacuum weight", "1", "", vac));
    report.push(Obligation::from_witness(
        "weights bounded below",
        "basis",
        "",
        v.space.min_weight().is_none().then(|| "empty basis".to_string()),
    ));
    map_obligations(&mut report, &v.y);
    op_obligation(&mut report, "D", Some(&v.deriv), 1);
    op_obligation(&mut report, "L(1)", v.l1.as_ref(), -1);
    report
}

/// Basis-level structural invariants of a module, including its algebra.
pub fn validate_module(w: &ModuleInstance) -> Report {
    let mut report = validate_algebra(&w.algebra);
    report.title = format!("structural checks for {}", w.name);
    let sides = match w.side {
        Side::Left => w.y_left.is_some(),
        Side::Right => w.y_right.is_some(),
        Side::Bi => w.y_left.is_some() && w.y_right.is_some(),
    };
    report.push(Obligation::from_witness(
        "side maps present",
        format!("{} module", w.side),
        "",
        (!sides).then(|| format!("a {} module needs its action maps", w.side)),
    ));
    report.push(Obligation::from_witness(
        "weights bounded below",
        "module basis",
        "",
        w.space.min_weight().is_none().then(|| "empty basis".to_string()),
    ));
    for m in [&w.y_left, &w.y_right].into_iter().flatten() {
        map_obligations(&mut report, m);
    }
    op_obligation(&mut report, "D_W", Some(&w.deriv), 1);
    op_obligation(&mut report, "L_W(1)", w.l1.as_ref(), -1);
    op_obligation(&mut report, "N0", w.n0.as_ref(), 0);
    if let Some(n) = &w.n0 {
        report.push(Obligation::from_witness(
            "N0 nilpotent",
            "N0",
            "",
            (!n.is_nilpotent()).then(|| "N0 is not nilpotent".to_string()),
        ));
    }
    report
}

/// The vacuum `1` as an algebra element.
pub fn vacuum(v: &AlgebraInstance) -> Elem {
    Elem::v(v.vacuum.clone())
}
