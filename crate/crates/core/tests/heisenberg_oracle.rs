//! Brute-force oscillator oracle for the Heisenberg instance.
//!
//! Modes are computed by the Borcherds recursion
//! (a_{-m}u)_n = sum_j C(m+j-1, j) [a_{-m-j} u_{n+j} - (-1)^m u_{n-m-j} a_j]
//! directly on the oscillator representation, with no cutoff, and compared
//! against the generated structure constants.

use std::collections::{BTreeMap, HashMap};

use mosva_core::exact_laurent::scalar::{binomial, int, ratio, sign, Scalar};
use mosva_core::graded::Vector;
use mosva_core::structures::AlgebraInstance;
use mosva_core::workbench::build_heisenberg;
use num_traits::{One, Zero};

type Part = Vec<u32>;
type Fock = BTreeMap<Part, Scalar>;

fn add(acc: &mut Fock, p: &Part, c: &Scalar) {
    let e = acc.entry(p.clone()).or_insert_with(Scalar::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(p);
    }
}

fn label(p: &Part) -> String {
    if p.is_empty() {
        "1".to_string()
    } else {
        p.iter().map(|n| format!("a-{n}")).collect()
    }
}

struct Oracle {
    level: Scalar,
    memo: HashMap<(Part, i64, Part), Fock>,
}

impl Oracle {
    fn new(level: Scalar) -> Self {
        Oracle { level, memo: HashMap::new() }
    }

    /// a_j on a Fock vector, from [a_m, a_n] = m k delta_{m+n,0}.
    fn osc(&self, j: i64, v: &Fock) -> Fock {
        let mut out = Fock::new();
        for (p, c) in v {
            if j < 0 {
                let mut q = p.clone();
                q.push((-j) as u32);
                q.sort_unstable_by(|a, b| b.cmp(a));
                add(&mut out, &q, c);
            } else if j > 0 {
                for (i, &n) in p.iter().enumerate() {
                    if n as i64 == j {
                        let mut q = p.clone();
                        q.remove(i);
                        add(&mut out, &q, &(c * int(j) * &self.level));
                    }
                }
            }
        }
        out
    }

    fn weight(p: &Part) -> i64 {
        p.iter().map(|&n| n as i64).sum()
    }

    /// u_n w for monomials u, w.
    fn mode(&mut self, u: &Part, n: i64, w: &Part) -> Fock {
        let key = (u.clone(), n, w.clone());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let mut out = Fock::new();
        if Self::weight(u) + Self::weight(w) - n - 1 < 0 {
        } else if u.is_empty() {
            if n == -1 {
                out.insert(w.clone(), Scalar::one());
            }
        } else {
            let m = u[0] as i64;
            let rest: Part = u[1..].to_vec();
            let wt_w = Self::weight(w);
            let mut j = 0i64;
            loop {
                let c = binomial(m + j - 1, j as u64);
                let first = self.mode(&rest, n + j, w);
                let first = self.osc(-m - j, &first);
                for (p, x) in &first {
                    add(&mut out, p, &(x * &c));
                }
                if j <= wt_w {
                    let mut aw = Fock::new();
                    aw.insert(w.clone(), Scalar::one());
                    let aw = self.osc(j, &aw);
                    let s = -(sign(m) * &c);
                    for (q, y) in &aw {
                        let inner = self.mode(&rest, n - m - j, q);
                        for (p, x) in &inner {
                            add(&mut out, p, &(x * y * &s));
                        }
                    }
                }
                // u'_{n+j} w vanishes once its weight is negative.
                if Self::weight(&rest) + wt_w - (n + j) - 1 < 0 && j > wt_w {
                    break;
                }
                j += 1;
            }
        }
        self.memo.insert(key, out.clone());
        out
    }
}

fn parts_of(h: &AlgebraInstance, i: usize) -> Part {
    let l = h.space.label(i);
    if l == "1" {
        return vec![];
    }
    l.split("a-").filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect()
}

fn to_vector(h: &AlgebraInstance, f: &Fock) -> Vector {
    Vector::from_entries(f.iter().map(|(p, c)| (h.space.index_of(&label(p)).unwrap(), c.clone())))
}

fn compare_all(level: Scalar, cutoff: u32) {
    let (h, _) = build_heisenberg(&level, cutoff).unwrap();
    let mut oracle = Oracle::new(level);
    let dim = h.space.dim();
    let mut checked = 0;
    for a in 0..dim {
        for b in 0..dim {
            let (pa, pb) = (parts_of(&h, a), parts_of(&h, b));
            for n in h.y.modes(a, b) {
                let got = h.y.mode_basis(a, n, b);
                assert!(got.exact);
                let want = to_vector(&h, &oracle.mode(&pa, n, &pb));
                assert_eq!(got.value, want, "Y_{n}({}){}", h.space.label(a), h.space.label(b));
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn generator_matches_oracle_level_one() {
    compare_all(int(1), 5);
}

#[test]
fn generator_matches_oracle_rational_level() {
    compare_all(ratio(-2, 3), 4);
}

#[test]
fn sl2_operators_match_quadratic_expressions() {
    // L(-1) = (1/k) sum_{m>=1} a_{-1-m} a_m and L(1) = (1/k) sum_{m>=2} a_{1-m} a_m
    // on the zero-momentum Fock space.
    let level = ratio(5, 2);
    let (h, _) = build_heisenberg(&level, 5).unwrap();
    let oracle = Oracle::new(level.clone());
    for i in 0..h.space.dim() {
        let p = parts_of(&h, i);
        let mut start = Fock::new();
        start.insert(p, Scalar::one());
        let mut lm1 = Fock::new();
        let mut l1 = Fock::new();
        for m in 1..=6 {
            for (q, c) in oracle.osc(-1 - m, &oracle.osc(m, &start)) {
                add(&mut lm1, &q, &(c / &level));
            }
            if m >= 2 {
                for (q, c) in oracle.osc(1 - m, &oracle.osc(m, &start)) {
                    add(&mut l1, &q, &(c / &level));
                }
            }
        }
        let d = h.deriv.apply_basis(i);
        if d.exact {
            assert_eq!(d.value, to_vector(&h, &lm1), "D on {}", h.space.label(i));
        }
        let l = h.l1.as_ref().unwrap().apply_basis(i);
        assert!(l.exact);
        assert_eq!(l.value, to_vector(&h, &l1), "L(1) on {}", h.space.label(i));
    }
}
