//! Decision procedure for the provability-logic reading of `Con`.
//!
//! `Con(s)` is the diamond of Gödel–Löb logic (`~Box ~s`). A sentence is
//! valid iff it holds at every world of every finite transitive irreflexive
//! Kripke model. The procedure is a backtracking tableau over formulas in
//! negation normal form. When a diamond `<>a` is expanded, the new world is
//! seeded with `a`, `Box ~a` and the boxed formulas of the current world
//! together with their bodies; the extra `Box ~a` makes every branch finite
//! without a loop check.
//!
//! Anything the logic cannot speak about (1-consistency, auxiliary
//! modalities, limit indices) yields `Unknown` instead of a verdict.
//!
//! Using this logic as a stand-in for provability over elementary arithmetic
//! assumes arithmetical completeness there; the classical completeness
//! theorem is stated for stronger base theories.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::kripke::Countermodel;
use crate::ordinal::Ordinal;
use crate::sentence::{AuxTag, Sentence, SentenceError, DEFAULT_SENTENCE_NODE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Sentence(#[from] SentenceError),
    #[error("sentence is not letterless: {0}")]
    NotLetterless(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    OneCon,
    AuxModality,
    LimitIndex,
    ExpansionBudget,
    ModelCap,
}

impl UnknownReason {
    /// Resource exhaustion, as opposed to leaving the decidable fragment.
    pub fn is_resource(self) -> bool {
        matches!(
            self,
            UnknownReason::ExpansionBudget | UnknownReason::ModelCap
        )
    }

    pub fn tag(self) -> &'static str {
        match self {
            UnknownReason::OneCon => "one-con",
            UnknownReason::AuxModality => "aux-modality",
            UnknownReason::LimitIndex => "limit-index",
            UnknownReason::ExpansionBudget => "resource:expansions",
            UnknownReason::ModelCap => "resource:model-cap",
        }
    }
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Countermodel),
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid(_))
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match self {
            Verdict::Invalid(m) => Some(m),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid => "VALID",
            Verdict::Invalid(_) => "INVALID",
            Verdict::Unknown(_) => "UNKNOWN",
        }
    }
}

/// Three-valued answer for derived questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn and(self, other: Answer) -> Answer {
        match (self, other) {
            (Answer::No, _) | (_, Answer::No) => Answer::No,
            (Answer::Unknown, _) | (_, Answer::Unknown) => Answer::Unknown,
            _ => Answer::Yes,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "Yes",
            Answer::No => "No",
            Answer::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Maximum number of tableau node expansions per query.
    pub expansion_budget: u64,
    /// Maximum number of worlds in a reported countermodel.
    pub model_cap: usize,
    /// Maximum number of nodes in a queried sentence.
    pub node_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            expansion_budget: 1_000_000,
            model_cap: 512,
            node_cap: DEFAULT_SENTENCE_NODE_CAP,
        }
    }
}

/// The decision oracle. Stateless apart from its configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle {
    pub config: OracleConfig,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Self {
        Oracle { config }
    }

    pub fn decide(&self, s: &Sentence) -> Result<Verdict, OracleError> {
        decide_with(s, &self.config)
    }

    /// `s` proves `t`: validity of `s -> t`.
    pub fn proves(&self, s: &Sentence, t: &Sentence) -> Result<Verdict, OracleError> {
        self.decide(&Sentence::imp(s.clone(), t.clone()))
    }

    /// Yes iff `s` proves `t` and `t` does not prove `s`.
    pub fn strictly_proves(&self, s: &Sentence, t: &Sentence) -> Result<Answer, OracleError> {
        let forward = self.proves(s, t)?;
        let backward = self.proves(t, s)?;
        Ok(strictness(&forward, &backward))
    }

    /// Both directions of `proves`.
    pub fn equivalent(&self, s: &Sentence, t: &Sentence) -> Result<Answer, OracleError> {
        let forward = answer_of(&self.proves(s, t)?);
        if forward == Answer::No {
            return Ok(Answer::No);
        }
        Ok(forward.and(answer_of(&self.proves(t, s)?)))
    }

    /// Whether `s` is consistent: `~s` is not valid.
    pub fn consistent(&self, s: &Sentence) -> Result<Answer, OracleError> {
        Ok(match self.decide(&Sentence::not(s.clone()))? {
            Verdict::Valid => Answer::No,
            Verdict::Invalid(_) => Answer::Yes,
            Verdict::Unknown(_) => Answer::Unknown,
        })
    }
}

/// `h & ~Con(~h)`: `h` taken as an axiom, so both true and provable.
pub fn globalize(h: &Sentence) -> Sentence {
    Sentence::and(
        h.clone(),
        Sentence::not(Sentence::con(Sentence::not(h.clone()))),
    )
}

/// Hypotheses a caller conjoins to a query explicitly. The oracle never adds
/// any on its own.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HypothesisPack {
    items: Vec<Sentence>,
}

impl HypothesisPack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[Sentence] {
        &self.items
    }

    pub fn push(&mut self, h: Sentence) -> &mut Self {
        if !self.items.contains(&h) {
            self.items.push(h);
        }
        self
    }

    /// `Con[a](s) -> Con[a](t)`, for a pair with `s` proving `t`.
    pub fn monotonicity(&mut self, a: Ordinal, s: Sentence, t: Sentence) -> &mut Self {
        self.push(Sentence::imp(
            Sentence::con_iter(a.clone(), s),
            Sentence::con_iter(a, t),
        ))
    }

    /// `Con[a](s) -> Con[b](s)` for `b < a`.
    pub fn hierarchy(&mut self, a: Ordinal, b: Ordinal, s: Sentence) -> &mut Self {
        debug_assert!(b < a);
        self.push(Sentence::imp(
            Sentence::con_iter(a, s.clone()),
            Sentence::con_iter(b, s),
        ))
    }

    /// `Con(s) -> ConCF(s)`; no converse is ever registered.
    pub fn cut_free(&mut self, s: Sentence) -> &mut Self {
        self.push(Sentence::imp(
            Sentence::con(s.clone()),
            Sentence::con_aux(AuxTag::CutFree, s),
        ))
    }

    /// The conjunction of the globalized items.
    pub fn antecedent(&self) -> Sentence {
        Sentence::and_all(self.items.iter().map(globalize))
    }

    /// `antecedent -> s`, or `s` itself for an empty pack.
    pub fn wrap(&self, s: Sentence) -> Sentence {
        if self.items.is_empty() {
            s
        } else {
            Sentence::imp(self.antecedent(), s)
        }
    }
}

/// Replaces every construct outside the decidable fragment by an opaque
/// atom named after its rendering. Returns the first reason, if any.
pub fn abstract_opaque(s: &Sentence) -> (Sentence, Option<UnknownReason>) {
    let mut reason = None;
    let out = abstract_rec(s, &mut reason);
    (out, reason)
}

fn abstract_rec(s: &Sentence, reason: &mut Option<UnknownReason>) -> Sentence {
    use Sentence::*;
    let opaque = |r: UnknownReason, reason: &mut Option<UnknownReason>| {
        reason.get_or_insert(r);
        Atom(format!("#{s}"))
    };
    match s {
        OneCon(_) => opaque(UnknownReason::OneCon, reason),
        ConAux(..) => opaque(UnknownReason::AuxModality, reason),
        ConIter(a, _) if a.as_finite().is_none() => opaque(UnknownReason::LimitIndex, reason),
        Top | Bot | Atom(_) | Schematic(_) => s.clone(),
        Not(a) => Sentence::not(abstract_rec(a, reason)),
        And(a, b) => Sentence::and(abstract_rec(a, reason), abstract_rec(b, reason)),
        Or(a, b) => Sentence::or(abstract_rec(a, reason), abstract_rec(b, reason)),
        Imp(a, b) => Sentence::imp(abstract_rec(a, reason), abstract_rec(b, reason)),
        Con(a) => Sentence::con(abstract_rec(a, reason)),
        ConIter(k, a) => Sentence::con_iter(k.clone(), abstract_rec(a, reason)),
    }
}

impl Oracle {
    /// Decides `s` with opaque constructs abstracted to atoms. Validity of
    /// the abstraction implies validity of `s` (substitution instances of
    /// theorems are theorems); a countermodel to the abstraction says
    /// nothing, so it is reported as `Unknown`.
    pub fn decide_abstracted(&self, s: &Sentence) -> Result<Verdict, OracleError> {
        let (abs, reason) = abstract_opaque(s);
        let verdict = self.decide(&abs)?;
        Ok(match (verdict, reason) {
            (Verdict::Invalid(_), Some(r)) => Verdict::Unknown(r),
            (v, _) => v,
        })
    }

    /// `decide_abstracted` of `s` under the pack's hypotheses.
    pub fn decide_under(
        &self,
        pack: &HypothesisPack,
        s: &Sentence,
    ) -> Result<Verdict, OracleError> {
        self.decide_abstracted(&pack.wrap(s.clone()))
    }
}

/// Yes/No/Unknown reading of a validity verdict.
pub fn answer_of(v: &Verdict) -> Answer {
    match v {
        Verdict::Valid => Answer::Yes,
        Verdict::Invalid(_) => Answer::No,
        Verdict::Unknown(_) => Answer::Unknown,
    }
}

fn strictness(forward: &Verdict, backward: &Verdict) -> Answer {
    match (forward, backward) {
        (Verdict::Valid, Verdict::Invalid(_)) => Answer::Yes,
        (Verdict::Unknown(_), _) | (_, Verdict::Unknown(_)) => Answer::Unknown,
        _ => Answer::No,
    }
}

pub fn decide(s: &Sentence) -> Result<Verdict, OracleError> {
    decide_with(s, &OracleConfig::default())
}

pub fn proves(s: &Sentence, t: &Sentence) -> Result<Verdict, OracleError> {
    Oracle::default().proves(s, t)
}

pub fn strictly_proves(s: &Sentence, t: &Sentence) -> Result<Answer, OracleError> {
    Oracle::default().strictly_proves(s, t)
}

/// The first construct outside the decidable fragment, if any.
pub fn fragment_issue(s: &Sentence) -> Option<UnknownReason> {
    scan(s).1
}

/// Tree size and fragment issue in one pass.
fn scan(s: &Sentence) -> (usize, Option<UnknownReason>) {
    fn go(s: &Sentence, size: &mut usize, flags: &mut u8) {
        *size += 1;
        match s {
            Sentence::OneCon(_) => *flags |= 1,
            Sentence::ConAux(..) => *flags |= 2,
            Sentence::ConIter(a, _) if a.as_finite().is_none() => *flags |= 4,
            _ => {}
        }
        for c in s.children() {
            go(c, size, flags);
        }
    }
    let (mut size, mut flags) = (0, 0);
    go(s, &mut size, &mut flags);
    let issue = if flags & 1 != 0 {
        Some(UnknownReason::OneCon)
    } else if flags & 2 != 0 {
        Some(UnknownReason::AuxModality)
    } else if flags & 4 != 0 {
        Some(UnknownReason::LimitIndex)
    } else {
        None
    };
    (size, issue)
}

/// Number of distinct subformulas, stopping once it passes `cap`.
fn distinct_nodes(s: &Sentence, cap: usize) -> usize {
    let mut seen = HashSet::new();
    let mut stack = vec![s];
    while let Some(n) = stack.pop() {
        if seen.len() > cap {
            break;
        }
        if seen.insert(n) {
            stack.extend(n.children());
        }
    }
    seen.len()
}

/// The node cap applies to distinct subformulas: the tableau works on the
/// shared representation, so repeated subterms cost nothing extra.
pub fn decide_with(s: &Sentence, config: &OracleConfig) -> Result<Verdict, OracleError> {
    let (size, issue) = scan(s);
    if size > config.node_cap && distinct_nodes(s, config.node_cap) > config.node_cap {
        return Err(SentenceError::SizeCapExceeded {
            cap: config.node_cap,
        }
        .into());
    }
    if let Some(reason) = issue {
        return Ok(Verdict::Unknown(reason));
    }
    // Deep formulas recurse deeply; give them a thread with a large stack.
    if size > 1024 {
        Ok(std::thread::scope(|scope| {
            std::thread::Builder::new()
                .stack_size(512 << 20)
                .spawn_scoped(scope, || run_tableau(s, config))
                .expect("spawn tableau thread")
                .join()
                .expect("tableau thread panicked")
        }))
    } else {
        Ok(run_tableau(s, config))
    }
}

fn run_tableau(s: &Sentence, config: &OracleConfig) -> Verdict {
    let mut arena = Arena::default();
    let root = arena.nnf(s, true);
    let mut tableau = Tableau {
        arena: &arena,
        budget: config.expansion_budget,
        used: 0,
        memo: FxHashMap::default(),
    };
    match tableau.world(vec![root]) {
        Err(Exhausted) => Verdict::Unknown(UnknownReason::ExpansionBudget),
        Ok(None) => Verdict::Valid,
        Ok(Some(world)) => match arena.extract(&world, config.model_cap) {
            Some(model) => Verdict::Invalid(model),
            None => Verdict::Unknown(UnknownReason::ModelCap),
        },
    }
}

type Id = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Var(u32, bool),
    And(Id, Id),
    Or(Id, Id),
    Box(Id),
    Dia(Id),
}

/// Hash-consed NNF formulas, closed under negation: every node is created
/// together with its dual.
#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    neg: Vec<Id>,
    index: FxHashMap<Node, Id>,
    atoms: Vec<String>,
    /// atom and schematic-atom names to variable numbers
    atom_index: [FxHashMap<String, u32>; 2],
    iter_memo: FxHashMap<(Id, u64), Id>,
}

impl Arena {
    fn dual(&self, node: Node) -> Node {
        match node {
            Node::True => Node::False,
            Node::False => Node::True,
            Node::Var(v, b) => Node::Var(v, !b),
            Node::And(a, b) => Node::Or(self.neg[a as usize], self.neg[b as usize]),
            Node::Or(a, b) => Node::And(self.neg[a as usize], self.neg[b as usize]),
            Node::Box(a) => Node::Dia(self.neg[a as usize]),
            Node::Dia(a) => Node::Box(self.neg[a as usize]),
        }
    }

    fn intern(&mut self, node: Node) -> Id {
        let node = canonical(node);
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let dual = canonical(self.dual(node));
        let id = self.nodes.len() as Id;
        self.nodes.push(node);
        self.nodes.push(dual);
        self.neg.push(id + 1);
        self.neg.push(id);
        self.index.insert(node, id);
        self.index.insert(dual, id + 1);
        id
    }

    fn top(&mut self) -> Id {
        self.intern(Node::True)
    }

    fn bot(&mut self) -> Id {
        self.intern(Node::False)
    }

    fn and(&mut self, a: Id, b: Id) -> Id {
        match (self.nodes[a as usize], self.nodes[b as usize]) {
            (Node::False, _) | (_, Node::False) => self.bot(),
            (Node::True, _) => b,
            (_, Node::True) => a,
            _ if a == b => a,
            _ if self.neg[a as usize] == b => self.bot(),
            _ => self.intern(Node::And(a, b)),
        }
    }

    fn or(&mut self, a: Id, b: Id) -> Id {
        let (na, nb) = (self.neg[a as usize], self.neg[b as usize]);
        let n = self.and(na, nb);
        self.neg[n as usize]
    }

    fn dia(&mut self, a: Id) -> Id {
        match self.nodes[a as usize] {
            Node::False => self.bot(),
            _ => self.intern(Node::Dia(a)),
        }
    }

    fn var(&mut self, name: &str, schematic: bool) -> Id {
        let table = &mut self.atom_index[schematic as usize];
        let v = match table.get(name) {
            Some(&v) => v,
            None => {
                let v = self.atoms.len() as u32;
                table.insert(name.to_string(), v);
                self.atoms.push(if schematic {
                    format!("@{name}")
                } else {
                    name.to_string()
                });
                v
            }
        };
        self.intern(Node::Var(v, true))
    }

    /// `Con[k](body)` built from the successor clause.
    fn con_iter(&mut self, body: Id, k: u64) -> Id {
        if let Some(&id) = self.iter_memo.get(&(body, k)) {
            return id;
        }
        let mut acc = self.top();
        for _ in 0..k {
            let inner = self.and(body, acc);
            acc = self.dia(inner);
        }
        self.iter_memo.insert((body, k), acc);
        acc
    }

    /// NNF of `s`, or of `~s` when `negate` is set.
    fn nnf(&mut self, s: &Sentence, negate: bool) -> Id {
        use Sentence::*;
        let id = match s {
            Top => self.top(),
            Bot => self.bot(),
            Atom(name) => self.var(name, false),
            Schematic(name) => self.var(name, true),
            Not(a) => return self.nnf(a, !negate),
            And(a, b) => {
                let (a, b) = (self.nnf(a, false), self.nnf(b, false));
                self.and(a, b)
            }
            Or(a, b) => {
                let (a, b) = (self.nnf(a, false), self.nnf(b, false));
                self.or(a, b)
            }
            Imp(a, b) => {
                let (a, b) = (self.nnf(a, true), self.nnf(b, false));
                self.or(a, b)
            }
            Con(a) => {
                let a = self.nnf(a, false);
                self.dia(a)
            }
            ConIter(index, a) => {
                let k = index
                    .as_finite()
                    .expect("limit indices are filtered earlier");
                let a = self.nnf(a, false);
                self.con_iter(a, k)
            }
            OneCon(_) | ConAux(..) => unreachable!("filtered by fragment_issue"),
        };
        if negate {
            self.neg[id as usize]
        } else {
            id
        }
    }

    /// Flattens a satisfying world graph into a countermodel; `None` when it
    /// has more than `cap` worlds.
    fn extract(&self, root: &Rc<World>, cap: usize) -> Option<Countermodel> {
        let mut ids: HashMap<*const World, usize> = HashMap::new();
        let mut order: Vec<Rc<World>> = Vec::new();
        let mut stack = vec![root.clone()];
        while let Some(w) = stack.pop() {
            if ids.contains_key(&Rc::as_ptr(&w)) {
                continue;
            }
            ids.insert(Rc::as_ptr(&w), order.len());
            order.push(w.clone());
            if order.len() > cap {
                return None;
            }
            for c in w.children.iter().rev() {
                stack.push(c.clone());
            }
        }
        let mut edges = Vec::new();
        let mut valuation = Vec::with_capacity(order.len());
        for (i, w) in order.iter().enumerate() {
            for c in &w.children {
                edges.push((i, ids[&Rc::as_ptr(c)]));
            }
            valuation.push(
                w.true_atoms
                    .iter()
                    .map(|&v| self.atoms[v as usize].clone())
                    .collect::<BTreeSet<_>>(),
            );
        }
        Some(
            Countermodel::from_edges(order.len(), edges, valuation, 0)
                .expect("tableau graphs are acyclic"),
        )
    }
}

fn canonical(node: Node) -> Node {
    match node {
        Node::And(a, b) if b < a => Node::And(b, a),
        Node::Or(a, b) if b < a => Node::Or(b, a),
        n => n,
    }
}

#[derive(Debug)]
struct World {
    true_atoms: Vec<u32>,
    children: Vec<Rc<World>>,
}

#[derive(Debug)]
struct Exhausted;

/// Formulas on the current branch, with an undo trail for backtracking.
struct Branch {
    member: Vec<bool>,
    trail: Vec<Id>,
    ors: Vec<Id>,
}

impl Branch {
    fn new(n: usize) -> Self {
        Branch {
            member: vec![false; n],
            trail: Vec::new(),
            ors: Vec::new(),
        }
    }

    fn has(&self, id: Id) -> bool {
        self.member[id as usize]
    }

    fn mark(&self) -> (usize, usize) {
        (self.trail.len(), self.ors.len())
    }

    fn undo(&mut self, (trail, ors): (usize, usize)) {
        for id in self.trail.drain(trail..) {
            self.member[id as usize] = false;
        }
        self.ors.truncate(ors);
    }
}

struct Tableau<'a> {
    arena: &'a Arena,
    budget: u64,
    used: u64,
    memo: FxHashMap<Vec<Id>, Option<Rc<World>>>,
}

impl Tableau<'_> {
    fn tick(&mut self) -> Result<(), Exhausted> {
        self.used += 1;
        if self.used > self.budget {
            Err(Exhausted)
        } else {
            Ok(())
        }
    }

    fn neg(&self, id: Id) -> Id {
        self.arena.neg[id as usize]
    }

    /// Satisfiability of a world seeded with `seed`.
    fn world(&mut self, mut seed: Vec<Id>) -> Result<Option<Rc<World>>, Exhausted> {
        seed.sort_unstable();
        seed.dedup();
        if let Some(hit) = self.memo.get(&seed) {
            return Ok(hit.clone());
        }
        let mut branch = Branch::new(self.arena.nodes.len());
        let mut agenda = seed.clone();
        agenda.reverse();
        let result = self.run(&mut branch, agenda)?;
        self.memo.insert(seed, result.clone());
        Ok(result)
    }

    fn run(
        &mut self,
        br: &mut Branch,
        mut agenda: Vec<Id>,
    ) -> Result<Option<Rc<World>>, Exhausted> {
        let mark = br.mark();
        loop {
            while let Some(x) = agenda.pop() {
                self.tick()?;
                if br.has(x) {
                    continue;
                }
                let node = self.arena.nodes[x as usize];
                if node == Node::False || br.has(self.neg(x)) {
                    br.undo(mark);
                    return Ok(None);
                }
                br.member[x as usize] = true;
                br.trail.push(x);
                match node {
                    Node::And(a, b) => {
                        agenda.push(b);
                        agenda.push(a);
                    }
                    Node::Or(..) => br.ors.push(x),
                    _ => {}
                }
            }

            let mut forced = None;
            let mut choice: Option<Id> = None;
            for &o in &br.ors {
                let Node::Or(a, b) = self.arena.nodes[o as usize] else {
                    unreachable!()
                };
                if br.has(a) || br.has(b) {
                    continue;
                }
                if br.has(self.neg(a)) {
                    forced = Some(b);
                    break;
                }
                if br.has(self.neg(b)) {
                    forced = Some(a);
                    break;
                }
                if choice.is_none_or(|c| o < c) {
                    choice = Some(o);
                }
            }
            if let Some(f) = forced {
                agenda.push(f);
                continue;
            }
            if let Some(o) = choice {
                let Node::Or(a, b) = self.arena.nodes[o as usize] else {
                    unreachable!()
                };
                if let Some(w) = self.run(br, vec![a])? {
                    return Ok(Some(w));
                }
                // second branch may assume the first disjunct failed
                let result = self.run(br, vec![b, self.neg(a)])?;
                if result.is_none() {
                    br.undo(mark);
                }
                return Ok(result);
            }
            return self.modal_step(br, mark);
        }
    }

    fn modal_step(
        &mut self,
        br: &mut Branch,
        mark: (usize, usize),
    ) -> Result<Option<Rc<World>>, Exhausted> {
        let mut members: Vec<Id> = br.trail.clone();
        members.sort_unstable();
        let mut boxed = Vec::new();
        let mut diamonds = Vec::new();
        let mut true_atoms = Vec::new();
        for &m in &members {
            match self.arena.nodes[m as usize] {
                Node::Box(a) => {
                    boxed.push(m);
                    boxed.push(a);
                }
                Node::Dia(a) => diamonds.push((m, a)),
                Node::Var(v, true) => true_atoms.push(v),
                _ => {}
            }
        }
        let mut children = Vec::with_capacity(diamonds.len());
        for (d, a) in diamonds {
            let mut seed = boxed.clone();
            seed.push(a);
            seed.push(self.neg(d));
            match self.world(seed)? {
                Some(w) => children.push(w),
                None => {
                    br.undo(mark);
                    return Ok(None);
                }
            }
        }
        Ok(Some(Rc::new(World {
            true_atoms,
            children,
        })))
    }
}

/// Truth values of a letterless sentence at depths `0..=m`, where `m` is its
/// modal depth. In any finite transitive irreflexive model a letterless
/// sentence's truth at a world depends only on the length of the longest
/// chain above it, and is constant from depth `m` on.
pub fn depth_profile(s: &Sentence) -> Result<Vec<bool>, OracleError> {
    if !s.is_letterless() {
        return Err(OracleError::NotLetterless(s.to_string()));
    }
    let m = s
        .modal_depth()
        .expect("letterless sentences have finite depth") as usize;
    Ok(profile_at(s, m + 1))
}

fn profile_at(s: &Sentence, len: usize) -> Vec<bool> {
    use Sentence::*;
    let zip = |a: Vec<bool>, b: Vec<bool>, f: fn(bool, bool) -> bool| -> Vec<bool> {
        a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
    };
    // Con(v)[d] iff v holds at some depth below d
    let diamond = |v: &[bool]| -> Vec<bool> {
        let mut out = Vec::with_capacity(len);
        let mut seen = false;
        for &x in v {
            out.push(seen);
            seen |= x;
        }
        out
    };
    match s {
        Top => vec![true; len],
        Bot => vec![false; len],
        Not(a) => profile_at(a, len).into_iter().map(|x| !x).collect(),
        And(a, b) => zip(profile_at(a, len), profile_at(b, len), |x, y| x && y),
        Or(a, b) => zip(profile_at(a, len), profile_at(b, len), |x, y| x || y),
        Imp(a, b) => zip(profile_at(a, len), profile_at(b, len), |x, y| !x || y),
        Con(a) => diamond(&profile_at(a, len)),
        ConIter(k, a) => {
            let body = profile_at(a, len);
            let mut acc = vec![true; len];
            for _ in 0..k.as_finite().expect("letterless") {
                let inner = zip(body.clone(), acc, |x, y| x && y);
                acc = diamond(&inner);
            }
            acc
        }
        Atom(_) | Schematic(_) | OneCon(_) | ConAux(..) => unreachable!("letterless"),
    }
}

/// Truth of a letterless sentence in the standard model, where every
/// `Con[k](T)` is true (soundness of the base theory).
pub fn truth_letterless(s: &Sentence) -> Result<bool, OracleError> {
    Ok(*depth_profile(s)?.last().expect("profile is nonempty"))
}

/// Normal form of a letterless sentence as a Boolean combination of the
/// chain `Con[k](T)`: a disjunction of depth intervals, each rendered as
/// `Con[a](T)`, `~Con[b](T)` or `(Con[a](T) & ~Con[b](T))`.
pub fn letterless_nf(s: &Sentence) -> Result<Sentence, OracleError> {
    let profile = depth_profile(s)?;
    let chain = |k: usize| Sentence::con_k(k as u64, Sentence::Top);
    let mut intervals = Vec::new();
    let mut d = 0;
    while d < profile.len() {
        if !profile[d] {
            d += 1;
            continue;
        }
        let start = d;
        while d < profile.len() && profile[d] {
            d += 1;
        }
        // a run reaching the last entry extends to every greater depth
        let end = if d == profile.len() { None } else { Some(d) };
        intervals.push(match (start, end) {
            (0, None) => Sentence::Top,
            (a, None) => chain(a),
            (0, Some(b)) => Sentence::not(chain(b)),
            (a, Some(b)) => Sentence::and(chain(a), Sentence::not(chain(b))),
        });
    }
    Ok(Sentence::or_all(intervals))
}
