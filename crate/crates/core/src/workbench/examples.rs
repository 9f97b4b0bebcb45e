//! Shipped examples: finite-dimensional associative algebras as weight-zero
//! MOSVAs, and the rank-one Heisenberg vertex algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::exact_laurent::scalar::{binomial, format_scalar, int, to_i64, Scalar};
use crate::graded::{GradedOp, GradedSpace, Vector};
use crate::structures::{AlgebraInstance, MapKind, ModuleInstance, Side, VertexMap};

/// A weight-zero MOSVA from an associative unital multiplication table:
/// `Y_{-1}(u)v = uv`, every other mode zero, `D = L(1) = 0`.
///
/// `table[i][j]` is the product of basis elements `i` and `j`. The table is
/// checked exhaustively for associativity and for `unit` being a two-sided
/// unit.
pub fn build_matrix_mosva(
    name: &str,
    labels: &[&str],
    table: &[Vec<Vector>],
    unit: &Vector,
) -> Result<AlgebraInstance, Error> {
    let k = labels.len();
    if table.len() != k || table.iter().any(|row| row.len() != k) {
        return Err(Error::Construction(format!("multiplication table must be {k} x {k}")));
    }
    let space = Arc::new(GradedSpace::new(labels.iter().map(|l| (l.to_string(), Scalar::zero())).collect(), None)?);
    for row in table {
        for v in row {
            space.check_vector(v)?;
        }
    }
    space.check_vector(unit)?;
    let mul = |x: &Vector, y: &Vector| {
        let mut out = Vector::zero();
        for (&i, a) in x.entries() {
            for (&j, b) in y.entries() {
                out.add_scaled(&table[i][j], &(a * b));
            }
        }
        out
    };
    for a in 0..k {
        let ea = Vector::basis(a);
        if mul(unit, &ea) != ea || mul(&ea, unit) != ea {
            return Err(Error::Construction(format!("{} is not a unit: fails on {}", space.format_vector(unit), labels[a])));
        }
        for b in 0..k {
            for c in 0..k {
                let l = mul(&table[a][b], &Vector::basis(c));
                let r = mul(&ea, &table[b][c]);
                if l != r {
                    return Err(Error::Construction(format!(
                        "table is not associative on ({}, {}, {})",
                        labels[a], labels[b], labels[c]
                    )));
                }
            }
        }
    }
    let mut y = VertexMap::new(MapKind::Algebra, space.clone(), space.clone(), space.clone());
    for (a, row) in table.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            y.insert(a, b, -1, v.clone());
        }
    }
    Ok(AlgebraInstance {
        name: name.to_string(),
        deriv: GradedOp::zero(space.clone(), int(1)),
        l1: Some(GradedOp::zero(space.clone(), int(-1))),
        space,
        y,
        vacuum: unit.clone(),
    })
}

/// The full matrix algebra `M_k` with matrix units `Eij` as basis.
pub fn matrix_algebra(k: usize) -> Result<AlgebraInstance, Error> {
    let labels: Vec<String> = (1..=k).flat_map(|i| (1..=k).map(move |j| format!("E{i}{j}"))).collect();
    let idx = |i: usize, j: usize| i * k + j;
    let mut table = vec![vec![Vector::zero(); k * k]; k * k];
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                table[idx(i, j)][idx(j, l)] = Vector::basis(idx(i, l));
            }
        }
    }
    let unit = Vector::from_entries((0..k).map(|i| (idx(i, i), Scalar::one())));
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    build_matrix_mosva(&format!("matrix M{k}"), &refs, &table, &unit)
}

/// The algebra as a module over itself: `Y^L = Y^R = Y_V`, sharing `D`,
/// `L(1)` and the grading.
pub fn regular_module(v: &Arc<AlgebraInstance>, side: Side) -> ModuleInstance {
    let space = v.space.clone();
    let copy = |kind| {
        let mut m = VertexMap::new(kind, space.clone(), space.clone(), space.clone());
        for (&(a, b, n), e) in v.y.entries() {
            m.insert(a, b, n, e.clone());
        }
        m
    };
    ModuleInstance {
        name: format!("{} as a {side} module over itself", v.name),
        side,
        algebra: v.clone(),
        space: space.clone(),
        y_left: matches!(side, Side::Left | Side::Bi).then(|| copy(MapKind::Left)),
        y_right: matches!(side, Side::Right | Side::Bi).then(|| copy(MapKind::Right)),
        deriv: v.deriv.clone(),
        l1: v.l1.clone(),
        n0: None,
        grading_restricted: true,
    }
}

/// Oscillator monomial `a_{-n_1} ... a_{-n_k} 1` with `n_1 >= ... >= n_k`.
type Partition = Vec<u32>;

fn partitions(total: u32, max_part: u32) -> Vec<Partition> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max_part.min(total)).rev() {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn heisenberg_label(p: &[u32]) -> String {
    if p.is_empty() {
        "1".into()
    } else {
        p.iter().map(|n| format!("a-{n}")).collect()
    }
}

/// Sparse Fock-space vectors keyed by partitions.
type FockVec = BTreeMap<Partition, Scalar>;

fn fock_add(acc: &mut FockVec, p: Partition, c: Scalar) {
    let e = acc.entry(p.clone()).or_insert_with(Scalar::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&p);
    }
}

/// Rank-one Heisenberg vertex algebra at `level`, truncated at weight
/// `cutoff`, with `D = L(-1)` and `L(1)` from the Virasoro action, and its
/// Fock space as the algebra acting on itself.
pub fn build_heisenberg(level: &Scalar, cutoff: u32) -> Result<(Arc<AlgebraInstance>, ModuleInstance), Error> {
    if cutoff < 2 {
        return Err(Error::Construction("Heisenberg cutoff must be at least 2".into()));
    }
    if level.is_zero() {
        return Err(Error::Construction("Heisenberg level must be nonzero".into()));
    }
    let basis: Vec<Partition> = (0..=cutoff).flat_map(|w| partitions(w, w)).collect();
    let space = Arc::new(GradedSpace::new(
        basis.iter().map(|p| (heisenberg_label(p), int(p.iter().sum::<u32>() as i64))).collect(),
        Some(int(cutoff as i64)),
    )?);
    let index: BTreeMap<Partition, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let to_vector = |f: &FockVec| Vector::from_entries(f.iter().filter_map(|(p, c)| index.get(p).map(|&i| (i, c.clone()))));

    let mut y = VertexMap::new(MapKind::Algebra, space.clone(), space.clone(), space.clone());
    let cut = cutoff as i64;
    let rows = crate::par::map(&basis, |u| {
        let mut row: BTreeMap<(usize, i64), Vector> = BTreeMap::new();
        for (b, v) in basis.iter().enumerate() {
            for ((n, q), c) in normal_ordered_action(u, v, cut, level) {
                if let Some(&i) = index.get(&q) {
                    row.entry((b, n)).or_default().add_scaled(&Vector::basis(i), &c);
                }
            }
        }
        row
    });
    for (a, row) in rows.into_iter().enumerate() {
        for ((b, n), v) in row {
            y.insert(a, b, n, v);
        }
    }

    // D and L(1) act as derivations on the oscillators:
    // [L(-1), a_{-n}] = n a_{-n-1} and [L(1), a_{-n}] = n a_{-n+1}.
    let basis_ref = &basis;
    let to_vector_ref = &to_vector;
    let derivation = |step: i64| {
        move |i: usize| {
            let p = &basis_ref[i];
            let mut out = FockVec::new();
            for k in 0..p.len() {
                let n = p[k] as i64;
                let m = n - step;
                if m <= 0 {
                    continue;
                }
                let mut q = p.clone();
                q[k] = m as u32;
                q.sort_by(|a, b| b.cmp(a));
                fock_add(&mut out, q, int(n));
            }
            to_vector_ref(&out)
        }
    };
    let deriv = GradedOp::from_fn(space.clone(), int(1), derivation(-1));
    let l1 = GradedOp::from_fn(space.clone(), int(-1), derivation(1));
    let vacuum = Vector::basis(index[&vec![]]);
    let name = format!("Heisenberg level {} cutoff {cutoff}", format_scalar(level));
    let alg = Arc::new(AlgebraInstance { name, space, y, vacuum, deriv, l1: Some(l1) });
    let fock = regular_module(&alg, Side::Left);
    Ok((alg, fock))
}

/// `Y_n(u)v` for monomials `u`, `v` as a map `(n, monomial) -> coefficient`,
/// from the normal-ordered product `:d^{(n_1-1)}a(x) ... d^{(n_k-1)}a(x):`
/// with `d^{(m)}a(x) = sum_j C(-j-1, m) a_j x^{-j-1-m}`.
///
/// Creators commute with each other and so do annihilators, so the factors
/// are absorbed one at a time into states
/// `(remaining part of v, created monomial, sum of j)`, merging equal states.
/// Outputs above `cutoff` are dropped.
fn normal_ordered_action(u: &Partition, v: &Partition, cutoff: i64, level: &Scalar) -> BTreeMap<(i64, Partition), Scalar> {
    type State = (Partition, Partition, i64);
    let wt = |p: &Partition| p.iter().map(|&n| n as i64).sum::<i64>();
    let mut states: BTreeMap<State, Scalar> = BTreeMap::new();
    states.insert((v.clone(), Vec::new(), 0), Scalar::one());
    for &part in u {
        let m = part as u64 - 1;
        let mut next: BTreeMap<State, Scalar> = BTreeMap::new();
        for ((rest, created, jsum), c) in &states {
            let room = cutoff - wt(created);
            for k in 1..=room {
                let b = binomial(k - 1, m);
                if b.is_zero() {
                    continue;
                }
                let mut cr = created.clone();
                cr.push(k as u32);
                cr.sort_by(|a, b| b.cmp(a));
                let e = next.entry((rest.clone(), cr, jsum - k)).or_insert_with(Scalar::zero);
                *e += c * b;
            }
            let mut seen = Vec::new();
            for (pos, &j) in rest.iter().enumerate() {
                if seen.contains(&j) {
                    continue;
                }
                seen.push(j);
                let b = binomial(-(j as i64) - 1, m);
                if b.is_zero() {
                    continue;
                }
                let count = rest.iter().filter(|&&x| x == j).count() as i64;
                let mut r = rest.clone();
                r.remove(pos);
                let e = next.entry((r, created.clone(), jsum + j as i64)).or_insert_with(Scalar::zero);
                *e += c * b * int(count * j as i64) * level;
            }
        }
        next.retain(|_, c| !c.is_zero());
        states = next;
    }
    let wt_u = wt(u);
    let mut out: BTreeMap<(i64, Partition), Scalar> = BTreeMap::new();
    for ((rest, created, jsum), c) in states {
        if wt(&rest) + wt(&created) > cutoff {
            continue;
        }
        let mut q = rest;
        q.extend(created);
        q.sort_by(|a, b| b.cmp(a));
        let e = out.entry((jsum - 1 + wt_u, q)).or_insert_with(Scalar::zero);
        *e += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Dimensions of the weight components, lowest weight first.
pub fn component_dims(space: &GradedSpace) -> Vec<(i64, usize)> {
    space
        .components()
        .into_iter()
        .map(|(w, v)| (to_i64(&w).unwrap_or(i64::MIN), v.len()))
        .collect()
}
