//! Weight-graded finite-basis linear algebra: spaces, vectors, dual vectors,
//! homogeneous operators and the exponential series `e^{xT}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::exact_laurent::poly::{CertifiedSeries, Coeff, Laurent, Window};
use crate::exact_laurent::scalar::{factorial, format_scalar, Scalar};

/// A value together with a flag saying whether it was computed without
/// touching absent (above-cutoff) data.
#[derive(Clone, PartialEq, Debug)]
pub struct Exact<T> {
    pub value: T,
    pub exact: bool,
}

impl<T> Exact<T> {
    pub fn exact(value: T) -> Self {
        Exact { value, exact: true }
    }
    pub fn absent(value: T) -> Self {
        Exact { value, exact: false }
    }
}

/// Finitely many weight components, each a finite list of basis labels.
///
/// `cutoff = None` means the space is represented completely; otherwise
/// every weight above the cutoff is absent from the model.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedSpace {
    labels: Vec<String>,
    weights: Vec<Scalar>,
    cutoff: Option<Scalar>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    /// Basis in the given order. Labels must be unique and weights must not
    /// exceed the cutoff.
    pub fn new(basis: Vec<(String, Scalar)>, cutoff: Option<Scalar>) -> Result<Self, Error> {
        let mut index = HashMap::new();
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        for (i, (l, w)) in basis.into_iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Document(format!("duplicate basis label {l:?}")));
            }
            if let Some(c) = &cutoff {
                if &w > c {
                    return Err(Error::Document(format!(
                        "basis label {l:?} has weight {} above the cutoff {}",
                        format_scalar(&w),
                        format_scalar(c)
                    )));
                }
            }
            labels.push(l);
            weights.push(w);
        }
        Ok(GradedSpace { labels, weights, cutoff, index })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, i: usize) -> &Scalar {
        &self.weights[i]
    }

    pub fn cutoff(&self) -> Option<&Scalar> {
        self.cutoff.as_ref()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, Error> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn basis_vector(&self, label: &str) -> Result<Vector, Error> {
        Ok(Vector::basis(self.index_of(label)?))
    }

    /// Whether the weight lies inside the represented range.
    pub fn represents(&self, weight: &Scalar) -> bool {
        self.cutoff.as_ref().is_none_or(|c| weight <= c)
    }

    /// Distinct weights in increasing order.
    pub fn weight_list(&self) -> Vec<Scalar> {
        let mut ws = self.weights.clone();
        ws.sort();
        ws.dedup();
        ws
    }

    pub fn min_weight(&self) -> Option<Scalar> {
        self.weights.iter().min().cloned()
    }

    /// Basis indices of the component of the given weight.
    pub fn component(&self, weight: &Scalar) -> Vec<usize> {
        (0..self.dim()).filter(|&i| &self.weights[i] == weight).collect()
    }

    pub fn components(&self) -> BTreeMap<Scalar, Vec<usize>> {
        let mut out: BTreeMap<Scalar, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim() {
            out.entry(self.weights[i].clone()).or_default().push(i);
        }
        out
    }

    /// The graded dual: same weights, labels suffixed with `'`.
    pub fn dual(&self) -> GradedSpace {
        let basis = (0..self.dim())
            .map(|i| (dual_label(&self.labels[i]), self.weights[i].clone()))
            .collect();
        GradedSpace::new(basis, self.cutoff.clone()).expect("dual of a valid space")
    }

    pub fn check_vector(&self, v: &Vector) -> Result<(), Error> {
        match v.entries.keys().find(|&&i| i >= self.dim()) {
            Some(i) => Err(Error::SpaceMismatch(format!("basis index {i} outside a space of dimension {}", self.dim()))),
            None => Ok(()),
        }
    }

    /// Splits a vector into homogeneous components.
    pub fn homogeneous_parts(&self, v: &Vector) -> BTreeMap<Scalar, Vector> {
        let mut out: BTreeMap<Scalar, Vector> = BTreeMap::new();
        for (&i, c) in &v.entries {
            out.entry(self.weights[i].clone()).or_insert_with(Vector::zero).add_scaled(&Vector::basis(i), c);
        }
        out
    }

    /// The weight of a nonzero homogeneous vector.
    pub fn weight_of(&self, v: &Vector) -> Option<Scalar> {
        let parts = self.homogeneous_parts(v);
        if parts.len() == 1 {
            parts.into_keys().next()
        } else {
            None
        }
    }

    pub fn pair(&self, w_dual: &DualVector, w: &Vector) -> Result<Scalar, Error> {
        self.check_vector(&w_dual.0)?;
        self.check_vector(w)?;
        Ok(w_dual.0.dot(w))
    }

    pub fn format_vector(&self, v: &Vector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.entries
            .iter()
            .map(|(&i, c)| format!("{}*{}", format_scalar(c), self.labels[i]))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn dual_label(label: &str) -> String {
    format!("{label}'")
}

/// A finitely supported vector over a basis, keyed by basis index.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash, PartialOrd, Ord)]
pub struct Vector {
    entries: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Vector::zero();
        v.entries.insert(i, Scalar::one());
        v
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = Vector::zero();
        for (i, c) in entries {
            v.add_scaled(&Vector::basis(i), &c);
        }
        v
    }

    pub fn entries(&self) -> &BTreeMap<usize, Scalar> {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.entries.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Vector, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (&i, c) in &other.entries {
            let e = self.entries.entry(i).or_insert_with(Scalar::zero);
            *e += c * s;
            if e.is_zero() {
                self.entries.remove(&i);
            }
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        let mut out = Vector::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn dot(&self, other: &Vector) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, c) in &self.entries {
            if let Some(d) = other.entries.get(i) {
                acc += c * d;
            }
        }
        acc
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }
}

impl Coeff for Vector {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_assign_coeff(&mut self, other: &Self) {
        self.add_scaled(other, &Scalar::one());
    }
    fn scaled(&self, s: &Scalar) -> Self {
        self.scale(s)
    }
}

/// An element of the graded dual, expressed in the dual basis.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DualVector(pub Vector);

impl DualVector {
    pub fn basis(i: usize) -> Self {
        DualVector(Vector::basis(i))
    }
}

/// A homogeneous operator of fixed weight shift, stored on basis vectors.
///
/// The action on basis vectors whose image would lie above the cutoff is
/// absent; every other unlisted basis vector is sent to zero.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedOp {
    space: Arc<GradedSpace>,
    shift: Scalar,
    action: BTreeMap<usize, Vector>,
}

impl GradedOp {
    pub fn new(space: Arc<GradedSpace>, shift: Scalar, action: BTreeMap<usize, Vector>) -> Self {
        let action = action.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        GradedOp { space, shift, action }
    }

    pub fn zero(space: Arc<GradedSpace>, shift: Scalar) -> Self {
        Self::new(space, shift, BTreeMap::new())
    }

    /// The grading operator `d`, acting by weight.
    pub fn grading(space: Arc<GradedSpace>) -> Self {
        let action = (0..space.dim()).map(|i| (i, Vector::basis(i).scale(space.weight(i)))).collect();
        Self::new(space, Scalar::zero(), action)
    }

    /// Builds an operator from a function on basis indices; the function is
    /// called only for basis vectors whose image is represented.
    pub fn from_fn(space: Arc<GradedSpace>, shift: Scalar, f: impl Fn(usize) -> Vector) -> Self {
        let action = (0..space.dim())
            .filter(|&i| space.represents(&(space.weight(i) + &shift)))
            .map(|i| (i, f(i)))
            .collect();
        Self::new(space, shift, action)
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn shift(&self) -> &Scalar {
        &self.shift
    }

    pub fn action(&self) -> &BTreeMap<usize, Vector> {
        &self.action
    }

    pub fn is_present(&self, i: usize) -> bool {
        self.space.represents(&(self.space.weight(i) + &self.shift))
    }

    pub fn apply_basis(&self, i: usize) -> Exact<Vector> {
        if !self.is_present(i) {
            return Exact::absent(Vector::zero());
        }
        Exact::exact(self.action.get(&i).cloned().unwrap_or_default())
    }

    pub fn apply(&self, v: &Vector) -> Result<Exact<Vector>, Error> {
        self.space.check_vector(v)?;
        let mut out = Vector::zero();
        let mut exact = true;
        for (&i, c) in v.entries() {
            let r = self.apply_basis(i);
            exact &= r.exact;
            out.add_scaled(&r.value, c);
        }
        Ok(Exact { value: out, exact })
    }

    pub fn set_basis(&mut self, i: usize, v: Vector) {
        if v.is_zero() {
            self.action.remove(&i);
        } else {
            self.action.insert(i, v);
        }
    }

    pub fn add(&self, other: &GradedOp) -> Result<GradedOp, Error> {
        if self.shift != other.shift || self.space != other.space {
            return Err(Error::SpaceMismatch("adding operators of different shift or space".into()));
        }
        let mut out = self.clone();
        for (&i, v) in &other.action {
            let s = out.action.get(&i).cloned().unwrap_or_default().add(v);
            out.set_basis(i, s);
        }
        Ok(out)
    }

    /// Basis labels whose image leaves the predicted weight component.
    pub fn homogeneity_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (&i, v) in &self.action {
            let target = self.space.weight(i) + &self.shift;
            if v.support().any(|j| self.space.weight(j) != &target) {
                bad.push(self.space.label(i).to_string());
            }
        }
        bad
    }

    /// Transpose acting on `dual`, the graded dual of this operator's space:
    /// `<T^t e'_b, e_c> = <e'_b, T e_c>`.
    pub fn transpose(&self, dual: Arc<GradedSpace>) -> GradedOp {
        let shift = -self.shift.clone();
        let mut action: BTreeMap<usize, Vector> = BTreeMap::new();
        for (&c, v) in &self.action {
            for (&b, coef) in v.entries() {
                action.entry(b).or_default().add_scaled(&Vector::basis(c), coef);
            }
        }
        GradedOp::new(dual, shift, action)
    }

    /// True if some power of the operator vanishes on every basis vector.
    pub fn is_nilpotent(&self) -> bool {
        (0..self.space.dim()).all(|i| self.power_vanishes(&Vector::basis(i)).is_some())
    }

    fn power_vanishes(&self, v: &Vector) -> Option<usize> {
        let mut cur = v.clone();
        for k in 0..=self.space.dim() + 1 {
            if cur.is_zero() {
                return Some(k);
            }
            cur = self.apply(&cur).ok()?.value;
        }
        None
    }
}

impl fmt::Display for GradedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&i, v) in &self.action {
            writeln!(f, "{} -> {}", self.space.label(i), self.space.format_vector(v))?;
        }
        Ok(())
    }
}

/// `sum_k (1/k!) T^k v x^k`, certified up to the last power computed without
/// absent data.
///
/// Terminates by vanishing (`T^k v = 0`), by reaching absent data for raising
/// operators, or is rejected for weight-zero operators that are not nilpotent.
pub fn exp_op_series(op: &GradedOp, v: &Vector, var: &str) -> Result<CertifiedSeries<Vector>, Error> {
    op.space.check_vector(v)?;
    let vars = vec![var.to_string()];
    let mut series = Laurent::zero(vars.clone());
    let mut window = Window::natural(vars.clone());
    if op.shift.is_zero() && op.power_vanishes(v).is_none() {
        return Err(Error::Nonterminating("weight-zero operator is not nilpotent on the vector".into()));
    }
    let mut cur = v.clone();
    let mut k: u64 = 0;
    loop {
        if cur.is_zero() {
            break;
        }
        series.add_term(vec![k as i64], &cur.scale(&factorial(k).recip()));
        let next = op.apply(&cur)?;
        if !next.exact {
            window.tail_bounds[0] = Some(k as i64);
            break;
        }
        cur = next.value;
        k += 1;
    }
    Ok(CertifiedSeries { poly: series, window })
}
