//! The proof gadgets as constructors, each paired with a report that checks
//! the derivation steps of the corresponding argument on that instance.
//!
//! Quantified side conditions are never decided. A condition such as
//! "for all z, Con(z) -> Con(z & ~f(z))" becomes a schematic atom conjoined
//! into the constructed sentence, plus the finitely many instantiations the
//! argument uses, written `(@atom -> instance)` and listed as hypotheses.
//! Hypotheses are axioms of the checked theory, so they are assumed both
//! true and provable.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kripke::Countermodel;
use crate::operators::OperatorSpec;
use crate::oracle::{answer_of, globalize, Answer, Oracle, OracleError, Verdict};
use crate::ordinal::{Kind, Ordinal};
use crate::sentence::{Sentence, SentenceError, DEFAULT_SENTENCE_NODE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sentence(#[from] SentenceError),
    #[error("hypothesis not met: {sentence} is refuted")]
    HypothesisNotMet {
        sentence: Sentence,
        model: Countermodel,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("tower height {n} exceeds the cap {cap}")]
    TowerCapExceeded { n: u64, cap: u64 },
}

impl From<crate::ordinal::OrdinalError> for ConstructionError {
    fn from(e: crate::ordinal::OrdinalError) -> Self {
        ConstructionError::Sentence(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionConfig {
    pub tower_cap: u64,
    pub onecon_cap: u64,
    /// Longest ordinal-indexed sequence a constructor will build.
    pub sequence_cap: usize,
    pub node_cap: usize,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig {
            tower_cap: 4,
            onecon_cap: 5,
            sequence_cap: 256,
            node_cap: DEFAULT_SENTENCE_NODE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Countermodel {
        refuted: Sentence,
        model: Countermodel,
    },
    Trace(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub label: String,
    pub verdict: Answer,
    pub witness: Option<Witness>,
    pub hypotheses: Vec<Sentence>,
    pub subclaims: Vec<ClaimReport>,
}

impl ClaimReport {
    pub fn leaf(label: impl Into<String>, verdict: Answer, witness: Option<Witness>) -> Self {
        ClaimReport {
            label: label.into(),
            verdict,
            witness,
            hypotheses: Vec::new(),
            subclaims: Vec::new(),
        }
    }

    /// A report for the validity query `query`.
    pub fn from_verdict(label: impl Into<String>, query: &Sentence, verdict: Verdict) -> Self {
        let answer = answer_of(&verdict);
        let witness = match verdict {
            Verdict::Valid => None,
            Verdict::Invalid(model) => Some(Witness::Countermodel {
                refuted: query.clone(),
                model,
            }),
            Verdict::Unknown(reason) => Some(Witness::Trace(format!("unknown: {reason}"))),
        };
        Self::leaf(label, answer, witness)
    }

    /// Yes iff every subclaim is Yes; a No inherits the first No's witness.
    pub fn all(label: impl Into<String>, subclaims: Vec<ClaimReport>) -> Self {
        let verdict = subclaims
            .iter()
            .fold(Answer::Yes, |acc, c| acc.and(c.verdict));
        let witness = match verdict {
            Answer::No => subclaims
                .iter()
                .find(|c| c.verdict == Answer::No)
                .and_then(|c| c.witness.clone()),
            _ => None,
        };
        let mut hypotheses: Vec<Sentence> = Vec::new();
        for c in &subclaims {
            for h in &c.hypotheses {
                if !hypotheses.contains(h) {
                    hypotheses.push(h.clone());
                }
            }
        }
        ClaimReport {
            label: label.into(),
            verdict,
            witness,
            hypotheses,
            subclaims,
        }
    }

    pub fn with_hypotheses(mut self, hyps: &[Sentence]) -> Self {
        for h in hyps {
            if !self.hypotheses.contains(h) {
                self.hypotheses.push(h.clone());
            }
        }
        self
    }

    pub fn find(&self, label: &str) -> Option<&ClaimReport> {
        if self.label == label {
            return Some(self);
        }
        self.subclaims.iter().find_map(|c| c.find(label))
    }

    /// Every claim in the tree, parents first.
    pub fn walk(&self) -> Vec<&ClaimReport> {
        let mut out = vec![self];
        for c in &self.subclaims {
            out.extend(c.walk());
        }
        out
    }

    fn write_into(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CLAIM {} VERDICT {}", self.label, self.verdict)?;
        if self.subclaims.is_empty() {
            for h in &self.hypotheses {
                writeln!(f, "HYP {h}")?;
            }
            match &self.witness {
                Some(Witness::Countermodel { refuted, model }) => {
                    writeln!(f, "WITNESS")?;
                    writeln!(f, "REFUTES {refuted}")?;
                    write!(f, "{model}")?;
                    writeln!(f, "END")?;
                }
                Some(Witness::Trace(t)) => writeln!(f, "TRACE {t}")?,
                None => {}
            }
        }
        for c in &self.subclaims {
            c.write_into(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_into(f)
    }
}

/// Checks that `antecedent` proves `consequent` with `hyps` as axioms.
pub fn check_proves(
    oracle: &Oracle,
    label: impl Into<String>,
    hyps: &[Sentence],
    antecedent: &Sentence,
    consequent: &Sentence,
) -> Result<ClaimReport, ConstructionError> {
    let body = Sentence::imp(antecedent.clone(), consequent.clone());
    let query = if hyps.is_empty() {
        body
    } else {
        Sentence::imp(Sentence::and_all(hyps.iter().map(globalize)), body)
    };
    let verdict = oracle.decide(&query)?;
    Ok(ClaimReport::from_verdict(label, &query, verdict).with_hypotheses(hyps))
}

fn cap(s: Sentence, config: &ConstructionConfig) -> Result<Sentence, ConstructionError> {
    s.check_size(config.node_cap)?;
    Ok(s)
}

/// `Con[k](s)` unfolded into nested `Con` by the successor clause; `s`
/// itself is left as is.
fn con_k_exact(k: u64, s: &Sentence) -> Result<Sentence, ConstructionError> {
    let mut acc = Sentence::Top;
    for _ in 0..k {
        acc = Sentence::con(Sentence::and(s.clone(), acc));
    }
    Ok(acc)
}

/// For `s` proving `Con(T)`: `psi := (Con(T) -> s)` and the check that
/// `psi & Con(psi)` is equivalent to `s`.
pub fn inversion_witness(
    oracle: &Oracle,
    s: &Sentence,
) -> Result<(Sentence, ClaimReport), ConstructionError> {
    let con_t = Sentence::con(Sentence::Top);
    let pre = check_proves(oracle, "inversion/hypothesis", &[], s, &con_t)?;
    if let Some(Witness::Countermodel { refuted, model }) = &pre.witness {
        if pre.verdict == Answer::No {
            return Err(ConstructionError::HypothesisNotMet {
                sentence: refuted.clone(),
                model: model.clone(),
            });
        }
    }
    let psi = Sentence::imp(con_t, s.clone());
    let strong = Sentence::and(psi.clone(), Sentence::con(psi.clone()));
    let forward = check_proves(oracle, "inversion/forward", &[], s, &strong)?;
    let backward = check_proves(oracle, "inversion/backward", &[], &strong, s)?;
    Ok((
        psi,
        ClaimReport::all("inversion", vec![pre, forward, backward]),
    ))
}

/// The strictness construction: with `chi` the schematic side condition
/// "for all z, Con(z) -> Con(z & ~f(z))", `psi := psi0 & @chi_<op>` and
/// `theta := psi & (f(psi) -> Con(psi))`.
pub fn bbb_theta(
    oracle: &Oracle,
    psi0: &Sentence,
    op: &OperatorSpec,
) -> Result<(Sentence, ClaimReport), ConstructionError> {
    bbb_theta_with(oracle, psi0, op, &ConstructionConfig::default())
}

pub fn bbb_theta_with(
    oracle: &Oracle,
    psi0: &Sentence,
    op: &OperatorSpec,
    config: &ConstructionConfig,
) -> Result<(Sentence, ClaimReport), ConstructionError> {
    let chi = Sentence::schematic(format!("chi_{}", op.name()));
    let psi = Sentence::and(psi0.clone(), chi.clone());
    let f_psi = op.transform(&psi);
    let con_psi = Sentence::con(psi.clone());
    let instance = Sentence::imp(
        con_psi.clone(),
        Sentence::con(Sentence::and(psi.clone(), Sentence::not(f_psi.clone()))),
    );
    let hyp = Sentence::imp(chi, instance.clone());
    let theta = cap(
        Sentence::and(psi.clone(), Sentence::imp(f_psi.clone(), con_psi.clone())),
        config,
    )?;
    let f_theta = cap(op.transform(&theta), config)?;
    let theta_con = Sentence::and(theta.clone(), Sentence::con(theta.clone()));
    let psi_con = Sentence::and(psi.clone(), con_psi);
    let hyps = [hyp.clone()];
    let premise = Sentence::imp(f_theta.clone(), theta.clone());

    let mut claims = Vec::new();
    let q = instance.clone();
    claims.push(ClaimReport::from_verdict(
        "bbb/chi_instance",
        &q,
        oracle.decide(&q)?,
    ));
    claims.push(check_proves(
        oracle,
        "bbb/claim1_premise",
        &[],
        &f_theta,
        &theta,
    )?);
    claims.push(check_proves(
        oracle,
        "bbb/claim1",
        &[hyp.clone(), premise],
        &f_theta,
        &Sentence::and(theta.clone(), f_psi.clone()),
    )?);
    claims.push(check_proves(
        oracle,
        "bbb/claim2",
        &hyps,
        &Sentence::and(theta.clone(), f_psi),
        &psi_con,
    )?);
    claims.push(check_proves(
        oracle,
        "bbb/claim3",
        &hyps,
        &psi_con,
        &theta_con,
    )?);
    claims.push(check_proves(
        oracle,
        "bbb/conclusion",
        &hyps,
        &f_theta,
        &theta_con,
    )?);
    Ok((theta, ClaimReport::all("bbb", claims)))
}

/// The finite tower `phi_{k+1} := phi_k & (f(phi_k) -> Con[k](phi_k))` with
/// `phi_1 := base & @ttt_chi_<op> & @ttt_noncoincide_<op>`.
pub fn ttt_tower(
    oracle: &Oracle,
    base: &Sentence,
    op: &OperatorSpec,
    n: u64,
) -> Result<(Vec<Sentence>, ClaimReport), ConstructionError> {
    ttt_tower_with(oracle, base, op, n, &ConstructionConfig::default())
}

pub fn ttt_tower_with(
    oracle: &Oracle,
    base: &Sentence,
    op: &OperatorSpec,
    n: u64,
    config: &ConstructionConfig,
) -> Result<(Vec<Sentence>, ClaimReport), ConstructionError> {
    if n > config.tower_cap {
        return Err(ConstructionError::TowerCapExceeded {
            n,
            cap: config.tower_cap,
        });
    }
    let chi = Sentence::schematic(format!("ttt_chi_{}", op.name()));
    let noncoincide = Sentence::schematic(format!("ttt_noncoincide_{}", op.name()));
    let mut seq = vec![Sentence::and_all([
        base.clone(),
        chi.clone(),
        noncoincide.clone(),
    ])];
    for k in 1..=n {
        let prev = &seq[k as usize - 1];
        let next = Sentence::and(
            prev.clone(),
            Sentence::imp(op.transform(prev), con_k_exact(k, prev)?),
        );
        seq.push(cap(next, config)?);
    }
    if n == 0 {
        let report = ClaimReport::leaf(
            "ttt",
            Answer::Yes,
            Some(Witness::Trace("height 0: nothing to check".into())),
        );
        return Ok((seq, report));
    }

    // the instantiations of both side conditions at every tower element
    let mut hyps = Vec::new();
    for phi in &seq {
        let f_phi = op.transform(phi);
        hyps.push(Sentence::imp(
            chi.clone(),
            Sentence::imp(
                Sentence::con(phi.clone()),
                Sentence::con(Sentence::and(phi.clone(), Sentence::not(f_phi.clone()))),
            ),
        ));
        for x in 0..n {
            let coincide = Sentence::iff(
                Sentence::and(phi.clone(), con_k_exact(x, phi)?),
                f_phi.clone(),
            );
            hyps.push(Sentence::imp(
                noncoincide.clone(),
                Sentence::imp(
                    con_k_exact(x + 1, phi)?,
                    Sentence::con(Sentence::not(coincide)),
                ),
            ));
        }
    }

    let mut claims = Vec::new();
    for k in 1..=n {
        let phi_k = &seq[k as usize - 1];
        let phi_next = &seq[k as usize];
        claims.push(check_proves(
            oracle,
            format!("ttt/lemma_k{k}"),
            &hyps,
            &Sentence::and(phi_k.clone(), con_k_exact(k, phi_k)?),
            &con_k_exact(k, phi_next)?,
        )?);
    }
    claims.push(equivalence_search(oracle, op, &seq, n)?);
    Ok((seq, ClaimReport::all("ttt", claims)))
}

/// Looks for `k <= n` and a tower element `phi` with `f(phi)` equivalent to
/// the consistent sentence `phi & Con[k](phi)`.
fn equivalence_search(
    oracle: &Oracle,
    op: &OperatorSpec,
    seq: &[Sentence],
    n: u64,
) -> Result<ClaimReport, ConstructionError> {
    let mut witness = None;
    let mut unknown = false;
    for k in 0..=n {
        for (i, phi) in seq.iter().enumerate() {
            let f_phi = op.transform(phi);
            let target = Sentence::and(phi.clone(), con_k_exact(k, phi)?);
            let mut ok = true;
            for (a, b) in [(&f_phi, &target), (&target, &f_phi)] {
                let query = Sentence::imp(a.clone(), b.clone());
                match oracle.decide(&query)? {
                    Verdict::Valid => {}
                    Verdict::Invalid(model) => {
                        witness.get_or_insert(Witness::Countermodel {
                            refuted: query,
                            model,
                        });
                        ok = false;
                        break;
                    }
                    Verdict::Unknown(_) => {
                        unknown = true;
                        ok = false;
                        break;
                    }
                }
            }
            if ok && oracle.consistent(&target)? == Answer::Yes {
                let trace = format!("k={k} phi_{}", i + 1);
                return Ok(ClaimReport::leaf(
                    "ttt/equivalence",
                    Answer::Yes,
                    Some(Witness::Trace(trace)),
                ));
            }
        }
    }
    let verdict = if unknown { Answer::Unknown } else { Answer::No };
    let witness = witness.or_else(|| Some(Witness::Trace("no consistent coincidence".into())));
    Ok(ClaimReport::leaf("ttt/equivalence", verdict, witness))
}

/// Ordinals in `[1, alpha]` a construction at `alpha` refers to, with limits
/// cut to their first `limit_budget` fundamental steps.
fn needed_indices(
    alpha: &Ordinal,
    limit_budget: u64,
    config: &ConstructionConfig,
) -> Result<BTreeSet<Ordinal>, ConstructionError> {
    if alpha.is_zero() {
        return Err(ConstructionError::InvalidArgument(
            "sequences start at index 1".into(),
        ));
    }
    let mut set = BTreeSet::new();
    let mut stack = vec![alpha.clone()];
    while let Some(b) = stack.pop() {
        if b.is_zero() || set.contains(&b) {
            continue;
        }
        set.insert(b.clone());
        if set.len() > config.sequence_cap {
            return Err(ConstructionError::InvalidArgument(format!(
                "sequence longer than {}",
                config.sequence_cap
            )));
        }
        match b.classify() {
            Kind::Successor => stack.push(b.predecessor()?),
            Kind::Limit => {
                for i in 0..limit_budget {
                    stack.push(b.fundamental_step(i)?);
                }
            }
            Kind::Zero => {}
        }
    }
    set.insert(Ordinal::finite(1));
    Ok(set)
}

/// The schematic sequence `theta_b` for `1 <= b <= alpha`: `theta_1` is an
/// atom, a successor adds its body atom to its predecessor, and a limit
/// conjoins the truth atoms of its first fundamental steps with its body.
pub fn theta_sequence(
    alpha: &Ordinal,
    op: &OperatorSpec,
    limit_budget: u64,
) -> Result<Vec<(Ordinal, Sentence)>, ConstructionError> {
    theta_sequence_with(alpha, op, limit_budget, &ConstructionConfig::default())
}

pub fn theta_sequence_with(
    alpha: &Ordinal,
    op: &OperatorSpec,
    limit_budget: u64,
    config: &ConstructionConfig,
) -> Result<Vec<(Ordinal, Sentence)>, ConstructionError> {
    let name = op.name();
    let body = |b: &Ordinal| Sentence::schematic(format!("theta_body_{name}_{}", b.ident()));
    let mut out: Vec<(Ordinal, Sentence)> = Vec::new();
    for b in needed_indices(alpha, limit_budget, config)? {
        let theta = if b == Ordinal::finite(1) {
            Sentence::schematic(format!("theta1_{name}"))
        } else if b.classify() == Kind::Successor {
            let pred = b.predecessor()?;
            let prev = &out
                .iter()
                .find(|(o, _)| *o == pred)
                .expect("predecessor built")
                .1;
            Sentence::and(prev.clone(), body(&b))
        } else {
            let truths = (0..limit_budget)
                .map(|i| {
                    let g = b.fundamental_step(i)?;
                    Ok(if g.is_zero() {
                        Sentence::Top
                    } else {
                        Sentence::schematic(format!("true_pi3_theta_{name}_{}", g.ident()))
                    })
                })
                .collect::<Result<Vec<_>, ConstructionError>>()?;
            Sentence::and(Sentence::and_all(truths), body(&b))
        };
        out.push((b, cap(theta, config)?));
    }
    Ok(out)
}

/// The schematic sequence `phi_g`: `phi_1` is the conjunction of four side
/// conditions and `phi_g := phi_1 & /\_d (T1(f(phi_d)) -> Con[d](phi_d))`
/// over the indices `1 <= d < g` reachable within `limit_budget`. `T1(x)` is
/// `x` itself when `x` is consistency-shaped and a truth atom otherwise.
pub fn main_phi_sequence(
    alpha: &Ordinal,
    op: &OperatorSpec,
    limit_budget: u64,
) -> Result<Vec<(Ordinal, Sentence)>, ConstructionError> {
    main_phi_sequence_with(alpha, op, limit_budget, &ConstructionConfig::default())
}

pub fn main_phi_sequence_with(
    alpha: &Ordinal,
    op: &OperatorSpec,
    limit_budget: u64,
    config: &ConstructionConfig,
) -> Result<Vec<(Ordinal, Sentence)>, ConstructionError> {
    let name = op.name();
    let phi1 = Sentence::and_all([
        Sentence::schematic(format!("phi1_strict_{name}")),
        Sentence::schematic(format!("phi1_noncoincide_{name}")),
        Sentence::schematic(format!("phi1_mono_{name}")),
        Sentence::schematic("phi1_pi02_sound"),
    ]);
    let indices = needed_indices(alpha, limit_budget, config)?;
    let mut out: Vec<(Ordinal, Sentence)> = Vec::new();
    // below[g]: the indices d >= 1 that phi_g quantifies over
    let mut below: Vec<BTreeSet<Ordinal>> = Vec::new();
    for g in &indices {
        let lookup = |o: &Ordinal| out.iter().position(|(x, _)| x == o);
        let mut ds = BTreeSet::new();
        match g.classify() {
            _ if *g == Ordinal::finite(1) => {}
            Kind::Successor => {
                let pred = g.predecessor()?;
                let i = lookup(&pred).expect("predecessor built");
                ds.extend(below[i].iter().cloned());
                ds.insert(pred);
            }
            _ => {
                for step in 0..limit_budget {
                    let d = g.fundamental_step(step)?;
                    if let Some(i) = lookup(&d) {
                        ds.extend(below[i].iter().cloned());
                        ds.insert(d);
                    }
                }
            }
        }
        let phi = if *g == Ordinal::finite(1) {
            phi1.clone()
        } else {
            let clauses = ds.iter().map(|d| {
                let phi_d = &out[lookup(d).expect("earlier index")].1;
                let f = op.transform(phi_d);
                let truth = if f.is_con_shaped() {
                    f
                } else {
                    Sentence::schematic(format!("true_pi1_{name}_{}", d.ident()))
                };
                Sentence::imp(truth, Sentence::con_iter(d.clone(), phi_d.clone()))
            });
            Sentence::and(phi1.clone(), Sentence::and_all(clauses.collect::<Vec<_>>()))
        };
        out.push((g.clone(), cap(phi, config)?));
        below.push(ds);
    }
    Ok(out)
}

/// The successor step for 1-consistency: with the instance
/// `H := Con[k](s) -> Con(s & Con[k](s))`, checks that `H & Con[k](s)`
/// proves `Con[k+1](s)`.
pub fn onecon_successor_check(
    oracle: &Oracle,
    s: &Sentence,
    k: u64,
) -> Result<ClaimReport, ConstructionError> {
    onecon_successor_check_with(oracle, s, k, &ConstructionConfig::default())
}

pub fn onecon_successor_check_with(
    oracle: &Oracle,
    s: &Sentence,
    k: u64,
    config: &ConstructionConfig,
) -> Result<ClaimReport, ConstructionError> {
    if k > config.onecon_cap {
        return Err(ConstructionError::InvalidArgument(format!(
            "index {k} exceeds the cap {}",
            config.onecon_cap
        )));
    }
    let con_k = con_k_exact(k, s)?;
    let h = Sentence::imp(
        con_k.clone(),
        Sentence::con(Sentence::and(s.clone(), con_k.clone())),
    );
    let claim = check_proves(
        oracle,
        format!("onecon/successor_k{k}"),
        &[],
        &Sentence::and(h.clone(), con_k),
        &con_k_exact(k + 1, s)?,
    )?;
    Ok(claim.with_hypotheses(&[h]))
}
