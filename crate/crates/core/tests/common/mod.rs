//! Reference implementations used to cross-check the library. None of them
//! shares code with the library beyond the `Sentence` and `Ordinal` types.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use conwork::kripke::Countermodel;
use conwork::ordinal::Ordinal;
use conwork::sentence::Sentence;

// ---------------------------------------------------------------------------
// Exhaustive model search

/// Every strict partial order on four labelled worlds with every valuation
/// of one atom. Truth at a world depends only on the worlds above it, so a
/// countermodel with fewer worlds embeds here by adding isolated worlds.
pub struct SmallModels {
    atom: String,
    /// successor mask of each world, per order
    orders: Vec<[u8; 4]>,
    /// `con[m][v]`: worlds with a successor in `v`, for model `m`
    con: Vec<[u8; 16]>,
    /// atom valuation of model `m`
    val: Vec<u8>,
}

const N: usize = 4;

impl SmallModels {
    pub fn new(atom: &str) -> Self {
        let pairs: Vec<(usize, usize)> = (0..N)
            .flat_map(|i| (0..N).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .collect();
        let mut orders = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let mut succ = [0u8; N];
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    succ[i] |= 1 << j;
                }
            }
            let antisymmetric =
                (0..N).all(|i| (0..N).all(|j| !(succ[i] >> j & 1 == 1 && succ[j] >> i & 1 == 1)));
            let transitive =
                (0..N).all(|i| (0..N).all(|j| succ[i] >> j & 1 == 0 || succ[j] & !succ[i] == 0));
            if antisymmetric && transitive {
                orders.push(succ);
            }
        }
        let mut con = Vec::new();
        let mut val = Vec::new();
        for succ in &orders {
            let mut table = [0u8; 16];
            for (v, slot) in table.iter_mut().enumerate() {
                for (w, s) in succ.iter().enumerate() {
                    if s & v as u8 != 0 {
                        *slot |= 1 << w;
                    }
                }
            }
            for p in 0..16u8 {
                con.push(table);
                val.push(p);
            }
        }
        SmallModels {
            atom: atom.to_string(),
            orders,
            con,
            val,
        }
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    fn eval(&self, s: &Sentence) -> Vec<u8> {
        let m = self.con.len();
        match s {
            Sentence::Top => vec![0xF; m],
            Sentence::Bot => vec![0; m],
            Sentence::Atom(a) if *a == self.atom => self.val.clone(),
            Sentence::Atom(_) => vec![0; m],
            Sentence::Not(a) => self.eval(a).into_iter().map(|x| !x & 0xF).collect(),
            Sentence::And(a, b) => zip(self.eval(a), self.eval(b), |x, y| x & y),
            Sentence::Or(a, b) => zip(self.eval(a), self.eval(b), |x, y| x | y),
            Sentence::Imp(a, b) => zip(self.eval(a), self.eval(b), |x, y| (!x | y) & 0xF),
            Sentence::Con(a) => {
                let v = self.eval(a);
                v.iter()
                    .enumerate()
                    .map(|(i, &x)| self.con[i][x as usize])
                    .collect()
            }
            Sentence::ConIter(k, a) => {
                let k = k.as_finite().expect("finite index");
                let body = self.eval(a);
                let mut acc = vec![0xF; m];
                for _ in 0..k {
                    acc = acc
                        .iter()
                        .zip(&body)
                        .enumerate()
                        .map(|(i, (&x, &y))| self.con[i][(x & y) as usize])
                        .collect();
                }
                acc
            }
            other => panic!("no small-model reading for {other}"),
        }
    }

    /// Whether some model and world falsify `s`.
    pub fn has_countermodel(&self, s: &Sentence) -> bool {
        self.eval(s).iter().any(|&x| x != 0xF)
    }
}

fn zip(a: Vec<u8>, b: Vec<u8>, f: fn(u8, u8) -> u8) -> Vec<u8> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

// ---------------------------------------------------------------------------
// Independent model checking of returned countermodels

pub fn check_holds(m: &Countermodel, s: &Sentence, w: usize) -> bool {
    let succ: Vec<usize> = m
        .relation()
        .iter()
        .filter(|(i, _)| *i == w)
        .map(|&(_, j)| j)
        .collect();
    match s {
        Sentence::Top => true,
        Sentence::Bot => false,
        Sentence::Atom(a) => m.valuation(w).contains(a),
        Sentence::Schematic(a) => m.valuation(w).contains(&format!("@{a}")),
        Sentence::Not(a) => !check_holds(m, a, w),
        Sentence::And(a, b) => check_holds(m, a, w) && check_holds(m, b, w),
        Sentence::Or(a, b) => check_holds(m, a, w) || check_holds(m, b, w),
        Sentence::Imp(a, b) => !check_holds(m, a, w) || check_holds(m, b, w),
        Sentence::Con(a) => succ.iter().any(|&v| check_holds(m, a, v)),
        Sentence::ConIter(k, a) => {
            let k = k.as_finite().expect("finite index");
            let mut s = Sentence::Top;
            for _ in 0..k {
                s = Sentence::con(Sentence::and((**a).clone(), s));
            }
            check_holds(m, &s, w)
        }
        other => panic!("no model reading for {other}"),
    }
}

/// The model is a strict partial order and falsifies `s` at its root.
pub fn confirms_refutation(m: &Countermodel, s: &Sentence) -> bool {
    let rel = m.relation();
    let irreflexive = rel.iter().all(|(i, j)| i != j);
    let transitive = rel.iter().all(|&(i, j)| {
        rel.iter()
            .filter(|(a, _)| *a == j)
            .all(|&(_, k)| rel.contains(&(i, k)))
    });
    irreflexive && transitive && !check_holds(m, s, m.root())
}

// ---------------------------------------------------------------------------
// Hilbert-style derivation search

/// Formulas with an explicit box; `Con(x)` reads as `~Box(~x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum F {
    Top,
    Bot,
    Var(String),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Imp(Box<F>, Box<F>),
    Box_(Box<F>),
}

pub fn to_f(s: &Sentence) -> F {
    let b = |x: &Sentence| Box::new(to_f(x));
    match s {
        Sentence::Top => F::Top,
        Sentence::Bot => F::Bot,
        Sentence::Atom(a) => F::Var(a.clone()),
        Sentence::Schematic(a) => F::Var(format!("@{a}")),
        Sentence::Not(a) => F::Not(b(a)),
        Sentence::And(x, y) => F::And(b(x), b(y)),
        Sentence::Or(x, y) => F::Or(b(x), b(y)),
        Sentence::Imp(x, y) => F::Imp(b(x), b(y)),
        Sentence::Con(a) => F::Not(Box::new(F::Box_(Box::new(F::Not(b(a)))))),
        Sentence::ConIter(k, a) => {
            let k = k.as_finite().expect("finite index");
            let mut s = Sentence::Top;
            for _ in 0..k {
                s = Sentence::con(Sentence::and((**a).clone(), s));
            }
            to_f(&s)
        }
        other => panic!("no modal reading for {other}"),
    }
}

fn conj(items: impl IntoIterator<Item = F>) -> F {
    items
        .into_iter()
        .reduce(|a, b| F::And(Box::new(a), Box::new(b)))
        .unwrap_or(F::Top)
}

/// Propositional letters of `f`: variables and boxes not under a box.
fn letters(f: &F, out: &mut BTreeSet<F>) {
    match f {
        F::Top | F::Bot => {}
        F::Var(_) | F::Box_(_) => {
            out.insert(f.clone());
        }
        F::Not(a) => letters(a, out),
        F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => {
            letters(a, out);
            letters(b, out);
        }
    }
}

fn eval_prop(f: &F, v: &HashMap<&F, bool>) -> bool {
    match f {
        F::Top => true,
        F::Bot => false,
        F::Var(_) | F::Box_(_) => v[f],
        F::Not(a) => !eval_prop(a, v),
        F::And(a, b) => eval_prop(a, v) && eval_prop(b, v),
        F::Or(a, b) => eval_prop(a, v) || eval_prop(b, v),
        F::Imp(a, b) => !eval_prop(a, v) || eval_prop(b, v),
    }
}

/// Bounded search for a derivation in K + Loeb + necessitation.
///
/// `f` is derived when every truth assignment to its letters that makes it
/// false is excluded by a derived implication `Box G1 & .. & Box Gn ->
/// Box Y`, where the `Box Gi` are the boxes the assignment makes true and
/// `Box Y` is one it makes false. Such an implication is obtained from a
/// derivation of `(G & Box G & Box Y) -> Y` (one level down) by
/// necessitation, distribution, the Loeb axiom and `Box G -> Box Box G`.
pub struct Hilbert {
    memo: HashMap<(F, u32), bool>,
}

impl Hilbert {
    pub fn new() -> Self {
        Hilbert {
            memo: HashMap::new(),
        }
    }

    pub fn derivable(&mut self, f: &F, level: u32) -> bool {
        if let Some(&r) = self.memo.get(&(f.clone(), level)) {
            return r;
        }
        let mut ls = BTreeSet::new();
        letters(f, &mut ls);
        let ls: Vec<F> = ls.into_iter().collect();
        assert!(ls.len() <= 20, "too many letters");
        let mut result = true;
        for bits in 0u32..(1 << ls.len()) {
            let v: HashMap<&F, bool> = ls
                .iter()
                .enumerate()
                .map(|(i, l)| (l, bits >> i & 1 == 1))
                .collect();
            if eval_prop(f, &v) {
                continue;
            }
            let excluded = level > 0
                && ls.iter().any(|l| {
                    let F::Box_(y) = l else { return false };
                    if v[l] {
                        return false;
                    }
                    let gamma: Vec<F> = ls
                        .iter()
                        .filter(|g| matches!(g, F::Box_(_)) && v[*g])
                        .cloned()
                        .collect();
                    let bodies = gamma.iter().map(|g| match g {
                        F::Box_(x) => (**x).clone(),
                        _ => unreachable!(),
                    });
                    let premise = conj(bodies.chain(gamma.iter().cloned()).chain([l.clone()]));
                    let sub = F::Imp(Box::new(premise), y.clone());
                    self.derivable(&sub, level - 1)
                });
            if !excluded {
                result = false;
                break;
            }
        }
        self.memo.insert((f.clone(), level), result);
        result
    }
}

/// Number of distinct boxed subformulas: enough levels for any derivation
/// the search can find, since each level adds one box to the assumptions.
pub fn box_count(f: &F) -> u32 {
    fn go(f: &F, out: &mut BTreeSet<F>) {
        match f {
            F::Top | F::Bot | F::Var(_) => {}
            F::Box_(a) => {
                out.insert(f.clone());
                go(a, out);
            }
            F::Not(a) => go(a, out),
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => {
                go(a, out);
                go(b, out);
            }
        }
    }
    let mut s = BTreeSet::new();
    go(f, &mut s);
    s.len() as u32
}

pub fn hilbert_proves(s: &Sentence) -> bool {
    let f = to_f(s);
    let level = box_count(&f) + 1;
    Hilbert::new().derivable(&f, level)
}

// ---------------------------------------------------------------------------
// Ordinals as hereditary multisets

/// `w^a1 + ... + w^an` as the multiset `{a1, ..., an}`, coefficients
/// expanded into repeated elements.
#[derive(Debug, Clone)]
pub struct Hm(pub Vec<Hm>);

pub fn to_hm(a: &Ordinal) -> Hm {
    let mut items = Vec::new();
    for t in a.terms() {
        for _ in 0..t.coefficient() {
            items.push(to_hm(t.exponent()));
        }
    }
    Hm(items)
}

pub fn hm_eq(a: &Hm, b: &Hm) -> bool {
    if a.0.len() != b.0.len() {
        return false;
    }
    let mut used = vec![false; b.0.len()];
    'outer: for x in &a.0 {
        for (j, y) in b.0.iter().enumerate() {
            if !used[j] && hm_eq(x, y) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The multiset ordering: after cancelling common elements, every
/// remaining element of `a` is dominated by a remaining element of `b`,
/// and `b` has something left.
pub fn hm_lt(a: &Hm, b: &Hm) -> bool {
    let mut rest_b: Vec<&Hm> = b.0.iter().collect();
    let mut rest_a: Vec<&Hm> = Vec::new();
    for x in &a.0 {
        match rest_b.iter().position(|y| hm_eq(x, y)) {
            Some(j) => {
                rest_b.remove(j);
            }
            None => rest_a.push(x),
        }
    }
    !rest_b.is_empty() && rest_a.iter().all(|x| rest_b.iter().any(|y| hm_lt(x, y)))
}

pub fn hm_cmp(a: &Hm, b: &Hm) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    if hm_lt(a, b) {
        Less
    } else if hm_lt(b, a) {
        Greater
    } else {
        Equal
    }
}

/// Successor: one more copy of the empty multiset.
pub fn hm_succ(a: &Hm) -> Hm {
    let mut v = a.0.clone();
    v.push(Hm(Vec::new()));
    Hm(v)
}

pub fn hm_is_zero(a: &Hm) -> bool {
    a.0.is_empty()
}

pub fn hm_is_successor(a: &Hm) -> bool {
    a.0.iter().any(|x| x.0.is_empty())
}
