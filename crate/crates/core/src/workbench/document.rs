//! JSON instance documents and pole-order certificates.
//!
//! Scalars are `"p/q"` strings, vectors are lists of `[label, scalar]` pairs
//! in basis order and vertex entries are sorted by `(u, v, n)` basis
//! position, so serializing the same instance twice gives the same bytes.
//! Parsing only checks the schema; weight homogeneity and the other
//! structural invariants are left to [`Instance::validate`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact_laurent::scalar::{format_scalar, int, parse_scalar, Scalar};
use crate::graded::{GradedOp, GradedSpace, Vector};
use crate::report::Report;
use crate::structures::{validate_algebra, validate_module, AlgebraInstance, MapKind, ModuleInstance, Side, VertexMap};
use crate::verification::PoleOrderWitness;

pub const FORMAT_VERSION: u32 = 1;

/// A scalar written as `"p/q"`.
#[derive(Clone, PartialEq, Debug)]
struct Text(Scalar);

impl Serialize for Text {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(&self.0))
    }
}

impl<'de> Deserialize<'de> for Text {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map(Text).map_err(de::Error::custom)
    }
}

type VecRepr = Vec<(String, Text)>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocRepr {
    format_version: u32,
    metadata: Metadata,
    algebra: AlgebraRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    module: Option<ModuleRepr>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    Algebra,
    Module,
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocKind::Algebra => "algebra",
            DocKind::Module => "module",
        })
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    /// Cutoff of the primary space (the module's, for a module document).
    #[serde(with = "opt_text")]
    pub cutoff: Option<Scalar>,
    pub kind: DocKind,
    #[serde(default)]
    pub provenance: String,
}

mod opt_text {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        v.clone().map(Text).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
        Ok(Option::<Text>::deserialize(d)?.map(|t| t.0))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceRepr {
    cutoff: Option<Text>,
    /// Runs of equal weight in basis order.
    components: Vec<ComponentRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentRepr {
    weight: Text,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryRepr {
    u: String,
    v: String,
    n: i64,
    result: VecRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraOps {
    #[serde(rename = "D")]
    d: BTreeMap<String, VecRepr>,
    #[serde(rename = "L1", default, skip_serializing_if = "Option::is_none")]
    l1: Option<BTreeMap<String, VecRepr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleOps {
    #[serde(rename = "D")]
    d: BTreeMap<String, VecRepr>,
    #[serde(rename = "L1", default, skip_serializing_if = "Option::is_none")]
    l1: Option<BTreeMap<String, VecRepr>>,
    #[serde(rename = "N0", default, skip_serializing_if = "Option::is_none")]
    n0: Option<BTreeMap<String, VecRepr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraRepr {
    name: String,
    basis: SpaceRepr,
    vacuum: VecRepr,
    operators: AlgebraOps,
    vertex: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleRepr {
    name: String,
    side: Side,
    grading_restricted: bool,
    basis: SpaceRepr,
    operators: ModuleOps,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<Vec<EntryRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<Vec<EntryRepr>>,
}

/// An algebra or a module together with its algebra.
#[derive(Clone, PartialEq, Debug)]
pub enum Instance {
    Algebra(Arc<AlgebraInstance>),
    Module(ModuleInstance),
}

impl Instance {
    pub fn kind(&self) -> DocKind {
        match self {
            Instance::Algebra(_) => DocKind::Algebra,
            Instance::Module(_) => DocKind::Module,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Instance::Algebra(v) => &v.name,
            Instance::Module(w) => &w.name,
        }
    }

    pub fn cutoff(&self) -> Option<&Scalar> {
        match self {
            Instance::Algebra(v) => v.cutoff(),
            Instance::Module(w) => w.cutoff(),
        }
    }

    /// Structural validation, separate from parsing.
    pub fn validate(&self) -> Report {
        match self {
            Instance::Algebra(v) => validate_algebra(v),
            Instance::Module(w) => validate_module(w),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct InstanceDocument {
    pub provenance: String,
    pub instance: Instance,
}

impl InstanceDocument {
    pub fn new(instance: Instance, provenance: impl Into<String>) -> Self {
        InstanceDocument { provenance: provenance.into(), instance }
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            cutoff: self.instance.cutoff().cloned(),
            kind: self.instance.kind(),
            provenance: self.provenance.clone(),
        }
    }

    /// Pretty JSON with LF line endings and a trailing newline.
    pub fn to_json(&self) -> String {
        let (algebra, module) = match &self.instance {
            Instance::Algebra(v) => (algebra_repr(v), None),
            Instance::Module(w) => (algebra_repr(&w.algebra), Some(module_repr(w))),
        };
        let doc = DocRepr { format_version: FORMAT_VERSION, metadata: self.metadata(), algebra, module };
        let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
        s.push('\n');
        s
    }

    /// Parses a document. Schema errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let doc: DocRepr = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        let algebra = Arc::new(algebra_from(doc.algebra)?);
        let instance = match (doc.metadata.kind, doc.module) {
            (DocKind::Algebra, None) => Instance::Algebra(algebra),
            (DocKind::Module, Some(m)) => Instance::Module(module_from(m, algebra)?),
            (DocKind::Algebra, Some(_)) => {
                return Err(Error::Document("an algebra document must not have a module section".into()))
            }
            (DocKind::Module, None) => return Err(Error::Document("a module document needs a module section".into())),
        };
        if instance.cutoff() != doc.metadata.cutoff.as_ref() {
            return Err(Error::Document(format!(
                "metadata cutoff {} disagrees with the basis cutoff {}",
                show_cutoff(doc.metadata.cutoff.as_ref()),
                show_cutoff(instance.cutoff())
            )));
        }
        Ok(InstanceDocument { provenance: doc.metadata.provenance, instance })
    }
}

fn show_cutoff(c: Option<&Scalar>) -> String {
    c.map_or_else(|| "null".into(), format_scalar)
}

fn space_repr(s: &GradedSpace) -> SpaceRepr {
    let mut components: Vec<ComponentRepr> = Vec::new();
    for i in 0..s.dim() {
        match components.last_mut() {
            Some(c) if c.weight.0 == *s.weight(i) => c.labels.push(s.label(i).to_string()),
            _ => components.push(ComponentRepr { weight: Text(s.weight(i).clone()), labels: vec![s.label(i).to_string()] }),
        }
    }
    SpaceRepr { cutoff: s.cutoff().cloned().map(Text), components }
}

fn space_from(r: SpaceRepr) -> Result<Arc<GradedSpace>, Error> {
    let basis = r
        .components
        .into_iter()
        .flat_map(|c| {
            let w = c.weight.0;
            c.labels.into_iter().map(move |l| (l, w.clone()))
        })
        .collect();
    Ok(Arc::new(GradedSpace::new(basis, r.cutoff.map(|t| t.0))?))
}

fn vec_repr(s: &GradedSpace, v: &Vector) -> VecRepr {
    v.entries().iter().map(|(&i, c)| (s.label(i).to_string(), Text(c.clone()))).collect()
}

fn vec_from(s: &GradedSpace, r: VecRepr) -> Result<Vector, Error> {
    let mut v = Vector::zero();
    for (l, c) in r {
        v.add_scaled(&Vector::basis(s.index_of(&l)?), &c.0);
    }
    Ok(v)
}

fn op_repr(op: &GradedOp) -> BTreeMap<String, VecRepr> {
    let s = op.space();
    op.action().iter().map(|(&i, v)| (s.label(i).to_string(), vec_repr(s, v))).collect()
}

fn op_from(space: &Arc<GradedSpace>, shift: i64, r: BTreeMap<String, VecRepr>) -> Result<GradedOp, Error> {
    let mut action = BTreeMap::new();
    for (l, v) in r {
        action.insert(space.index_of(&l)?, vec_from(space, v)?);
    }
    Ok(GradedOp::new(space.clone(), int(shift), action))
}

fn entries_repr(m: &VertexMap) -> Vec<EntryRepr> {
    m.entries()
        .iter()
        .map(|(&(a, b, n), v)| EntryRepr {
            u: m.first().label(a).to_string(),
            v: m.second().label(b).to_string(),
            n,
            result: vec_repr(m.target(), v),
        })
        .collect()
}

fn map_from(
    kind: MapKind,
    first: &Arc<GradedSpace>,
    second: &Arc<GradedSpace>,
    target: &Arc<GradedSpace>,
    entries: Vec<EntryRepr>,
) -> Result<VertexMap, Error> {
    let mut m = VertexMap::new(kind, first.clone(), second.clone(), target.clone());
    for e in entries {
        let (a, b) = (first.index_of(&e.u)?, second.index_of(&e.v)?);
        if m.get(a, b, e.n).is_some() {
            return Err(Error::Document(format!("duplicate {kind} entry ({}, {}, {})", e.u, e.v, e.n)));
        }
        m.insert(a, b, e.n, vec_from(target, e.result)?);
    }
    Ok(m)
}

fn algebra_repr(v: &AlgebraInstance) -> AlgebraRepr {
    AlgebraRepr {
        name: v.name.clone(),
        basis: space_repr(&v.space),
        vacuum: vec_repr(&v.space, &v.vacuum),
        operators: AlgebraOps { d: op_repr(&v.deriv), l1: v.l1.as_ref().map(op_repr) },
        vertex: entries_repr(&v.y),
    }
}

fn algebra_from(r: AlgebraRepr) -> Result<AlgebraInstance, Error> {
    let space = space_from(r.basis)?;
    Ok(AlgebraInstance {
        name: r.name,
        vacuum: vec_from(&space, r.vacuum)?,
        deriv: op_from(&space, 1, r.operators.d)?,
        l1: r.operators.l1.map(|o| op_from(&space, -1, o)).transpose()?,
        y: map_from(MapKind::Algebra, &space, &space, &space, r.vertex)?,
        space,
    })
}

fn module_repr(w: &ModuleInstance) -> ModuleRepr {
    ModuleRepr {
        name: w.name.clone(),
        side: w.side,
        grading_restricted: w.grading_restricted,
        basis: space_repr(&w.space),
        operators: ModuleOps {
            d: op_repr(&w.deriv),
            l1: w.l1.as_ref().map(op_repr),
            n0: w.n0.as_ref().map(op_repr),
        },
        left: w.y_left.as_ref().map(entries_repr),
        right: w.y_right.as_ref().map(entries_repr),
    }
}

fn module_from(r: ModuleRepr, algebra: Arc<AlgebraInstance>) -> Result<ModuleInstance, Error> {
    let space = space_from(r.basis)?;
    let alg = algebra.space.clone();
    let y_left = r.left.map(|e| map_from(MapKind::Left, &alg, &space, &space, e)).transpose()?;
    let y_right = r.right.map(|e| map_from(MapKind::Right, &space, &alg, &space, e)).transpose()?;
    Ok(ModuleInstance {
        name: r.name,
        side: r.side,
        algebra,
        y_left,
        y_right,
        deriv: op_from(&space, 1, r.operators.d)?,
        l1: r.operators.l1.map(|o| op_from(&space, -1, o)).transpose()?,
        n0: r.operators.n0.map(|o| op_from(&space, 0, o)).transpose()?,
        grading_restricted: r.grading_restricted,
        space,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateRepr {
    format_version: u32,
    kind: CertificateKind,
    p1_search_bound: i64,
    constant_c: Option<Text>,
    p_axis: BTreeMap<usize, i64>,
    p_diag: Vec<DiagRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CertificateKind {
    PoleOrderCertificate,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagRepr {
    i: usize,
    j: usize,
    p: i64,
}

/// A pole-order certificate as JSON.
pub fn certificate_to_json(c: &PoleOrderWitness) -> String {
    let r = CertificateRepr {
        format_version: FORMAT_VERSION,
        kind: CertificateKind::PoleOrderCertificate,
        p1_search_bound: c.p1_search_bound,
        constant_c: c.constant_c.clone().map(Text),
        p_axis: c.p_axis.clone(),
        p_diag: c.p_diag.iter().map(|(&(i, j), &p)| DiagRepr { i, j, p }).collect(),
    };
    let mut s = serde_json::to_string_pretty(&r).expect("certificate serializes");
    s.push('\n');
    s
}

pub fn certificate_from_json(text: &str) -> Result<PoleOrderWitness, Error> {
    let r: CertificateRepr = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    if r.format_version != FORMAT_VERSION {
        return Err(Error::Document(format!("unsupported format_version {}", r.format_version)));
    }
    Ok(PoleOrderWitness {
        p_axis: r.p_axis,
        p_diag: r.p_diag.into_iter().map(|d| ((d.i, d.j), d.p)).collect(),
        p1_search_bound: r.p1_search_bound,
        constant_c: r.constant_c.map(|t| t.0),
    })
}
