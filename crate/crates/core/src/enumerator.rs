//! Staged construction of a set of letterless sentences, with checks of the
//! two properties its construction is meant to have.
//!
//! Stage 0 numerates `phi_0` and `~phi_0` and activates `x & Con(x)` for
//! both. Stage `n+1` splits every active `psi` on `phi_{n+1}`: it numerates
//! `psi & phi_{n+1}` and `psi & ~phi_{n+1}` and activates each of those
//! conjoined with its own consistency. After every stage, sentences of a
//! small fixed universe that are provably equivalent to something numerated
//! are numerated too.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::constructions::{ClaimReport, Witness};
use crate::gen::SentenceSpace;
use crate::oracle::{depth_profile, Answer, Oracle, OracleError, Verdict};
use crate::sentence::Sentence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumeratorError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("stage cap {0} reached")]
    StageCapExceeded(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} active sentences are true")]
    UniqueTruthViolated(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumeratorConfig {
    pub closure_depth: u32,
    /// Largest sentence size in the closure universe.
    pub universe_size: usize,
    pub stage_cap: u64,
}

impl Default for EnumeratorConfig {
    fn default() -> Self {
        EnumeratorConfig {
            closure_depth: 0,
            universe_size: 4,
            stage_cap: 8,
        }
    }
}

/// Truth values of a letterless sentence by depth, constant past the end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile(Vec<bool>);

impl Profile {
    pub fn of(s: &Sentence) -> Result<Profile, OracleError> {
        let mut v = depth_profile(s)?;
        while v.len() > 1 && v[v.len() - 1] == v[v.len() - 2] {
            v.pop();
        }
        Ok(Profile(v))
    }

    pub fn at(&self, depth: usize) -> bool {
        self.0[depth.min(self.0.len() - 1)]
    }

    /// Truth in the standard model.
    pub fn truth(&self) -> bool {
        *self.0.last().expect("nonempty")
    }

    /// Pointwise implication: the letterless reading of provable implication.
    pub fn implies(&self, other: &Profile) -> bool {
        let n = self.0.len().max(other.0.len());
        (0..n).all(|d| !self.at(d) || other.at(d))
    }

    fn is_constant(&self) -> bool {
        self.0.len() == 1
    }
}

/// Letterless sentences that are neither provable nor refutable, ordered by
/// size and then by rendering.
#[derive(Debug, Clone)]
pub struct Enumeration {
    space: SentenceSpace,
    next_size: usize,
    items: Vec<Sentence>,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration {
            space: SentenceSpace::letterless(),
            next_size: 1,
            items: Vec::new(),
        }
    }
}

impl Enumeration {
    pub fn get(&mut self, i: usize) -> Sentence {
        while self.items.len() <= i {
            let mut level: Vec<(String, Sentence)> = self
                .space
                .level(self.next_size)
                .iter()
                .filter(|s| !Profile::of(s).expect("letterless").is_constant())
                .map(|s| (s.to_string(), s.clone()))
                .collect();
            level.sort_by(|a, b| a.0.cmp(&b.0));
            self.items.extend(level.into_iter().map(|(_, s)| s));
            self.next_size += 1;
        }
        self.items[i].clone()
    }
}

#[derive(Debug, Clone)]
pub struct EnumeratorState {
    pub stage: u64,
    pub config: EnumeratorConfig,
    enumeration: Enumeration,
    numerated: Vec<Sentence>,
    numerated_set: HashSet<Sentence>,
    active: Vec<Sentence>,
    /// Every closure addition with the numerated sentence it matched.
    pub closure_log: Vec<(Sentence, Sentence)>,
    universe: Vec<(Sentence, Profile)>,
}

fn with_con(s: Sentence) -> Sentence {
    Sentence::and(s.clone(), Sentence::con(s))
}

impl EnumeratorState {
    pub fn init(oracle: &Oracle, config: EnumeratorConfig) -> Result<Self, EnumeratorError> {
        let mut enumeration = Enumeration::default();
        let phi0 = enumeration.get(0);
        let neg = Sentence::not(phi0.clone());
        let mut universe = Vec::new();
        SentenceSpace::letterless().for_each_up_to(config.universe_size, &mut |s| {
            let p = Profile::of(&s).expect("letterless");
            universe.push((s, p));
        });
        let mut st = EnumeratorState {
            stage: 0,
            config,
            enumeration,
            numerated: Vec::new(),
            numerated_set: HashSet::new(),
            active: vec![with_con(phi0.clone()), with_con(neg.clone())],
            closure_log: Vec::new(),
            universe,
        };
        st.numerate(phi0);
        st.numerate(neg);
        st.close(oracle)?;
        Ok(st)
    }

    pub fn numerated(&self) -> &[Sentence] {
        &self.numerated
    }

    pub fn is_numerated(&self, s: &Sentence) -> bool {
        self.numerated_set.contains(s)
    }

    pub fn active(&self) -> &[Sentence] {
        &self.active
    }

    /// `phi_i` of the base enumeration.
    pub fn phi(&mut self, i: usize) -> Sentence {
        self.enumeration.get(i)
    }

    fn numerate(&mut self, s: Sentence) -> bool {
        if self.numerated_set.insert(s.clone()) {
            self.numerated.push(s);
            true
        } else {
            false
        }
    }

    pub fn step(&self, oracle: &Oracle) -> Result<Self, EnumeratorError> {
        if self.stage >= self.config.stage_cap {
            return Err(EnumeratorError::StageCapExceeded(self.config.stage_cap));
        }
        let mut next = self.clone();
        let phi = next.enumeration.get(self.stage as usize + 1);
        let mut active = Vec::with_capacity(self.active.len() * 2);
        for psi in &self.active {
            for part in [phi.clone(), Sentence::not(phi.clone())] {
                let theta = Sentence::and(psi.clone(), part);
                next.numerate(theta.clone());
                active.push(with_con(theta));
            }
        }
        next.active = active;
        next.stage += 1;
        next.close(oracle)?;
        Ok(next)
    }

    /// Numerates universe sentences equivalent to numerated ones, for at
    /// most `closure_depth` rounds. Depth profiles narrow the candidates and
    /// the oracle confirms each one.
    fn close(&mut self, oracle: &Oracle) -> Result<(), EnumeratorError> {
        for _ in 0..self.config.closure_depth {
            let mut by_profile: HashMap<Profile, usize> = HashMap::new();
            for (i, s) in self.numerated.iter().enumerate() {
                by_profile.entry(Profile::of(s)?).or_insert(i);
            }
            let mut added = Vec::new();
            for (u, prof) in &self.universe {
                if self.numerated_set.contains(u) {
                    continue;
                }
                let Some(&i) = by_profile.get(prof) else {
                    continue;
                };
                let source = &self.numerated[i];
                if oracle.equivalent(u, source)? == Answer::Yes {
                    added.push((u.clone(), source.clone()));
                }
            }
            if added.is_empty() {
                break;
            }
            for (u, source) in added {
                self.numerate(u.clone());
                self.closure_log.push((u, source));
            }
        }
        Ok(())
    }

    /// The active sentences that are true.
    pub fn true_actives(&self) -> Result<Vec<&Sentence>, EnumeratorError> {
        let mut out = Vec::new();
        for s in &self.active {
            if Profile::of(s)?.truth() {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// The unique true active sentence.
    pub fn unique_true(&self) -> Result<&Sentence, EnumeratorError> {
        let t = self.true_actives()?;
        match t.as_slice() {
            [one] => Ok(one),
            _ => Err(EnumeratorError::UniqueTruthViolated(t.len())),
        }
    }

    /// Every two distinct actives are jointly refutable.
    pub fn verify_incompatibility(&self, oracle: &Oracle) -> Result<ClaimReport, EnumeratorError> {
        let mut claims = Vec::new();
        for i in 0..self.active.len() {
            for j in i + 1..self.active.len() {
                let q = Sentence::not(Sentence::and(
                    self.active[i].clone(),
                    self.active[j].clone(),
                ));
                let v = oracle.decide(&q)?;
                claims.push(ClaimReport::from_verdict(
                    format!("incompatible/{i}_{j}"),
                    &q,
                    v,
                ));
            }
        }
        Ok(ClaimReport::all(
            format!("incompatibility/stage_{}", self.stage),
            claims,
        ))
    }

    /// For every true `phi_k` with `k <= horizon`, some true numerated
    /// sentence proves it.
    pub fn verify_unbounded_truth(
        &mut self,
        oracle: &Oracle,
        horizon: u64,
    ) -> Result<ClaimReport, EnumeratorError> {
        if horizon > self.stage {
            return Err(EnumeratorError::InvalidArgument(format!(
                "horizon {horizon} beyond stage {}",
                self.stage
            )));
        }
        let mut claims = Vec::new();
        for k in 0..=horizon as usize {
            let phi = self.phi(k);
            let target = Profile::of(&phi)?;
            if !target.truth() {
                continue;
            }
            let label = format!("unbounded_truth/phi_{k}");
            let mut found = None;
            let mut first_refutation = None;
            let mut unknown = false;
            for psi in &self.numerated {
                let prof = Profile::of(psi)?;
                if !prof.truth() {
                    continue;
                }
                if !prof.implies(&target) && first_refutation.is_some() {
                    continue;
                }
                let q = Sentence::imp(psi.clone(), phi.clone());
                match oracle.decide(&q)? {
                    Verdict::Valid => {
                        found = Some(psi.clone());
                        break;
                    }
                    Verdict::Invalid(model) => {
                        first_refutation.get_or_insert(Witness::Countermodel { refuted: q, model });
                    }
                    Verdict::Unknown(_) => unknown = true,
                }
            }
            claims.push(match found {
                Some(psi) => ClaimReport::leaf(
                    label,
                    Answer::Yes,
                    Some(Witness::Trace(format!("{psi} proves {phi}"))),
                ),
                None if unknown => ClaimReport::leaf(label, Answer::Unknown, None),
                None => ClaimReport::leaf(label, Answer::No, first_refutation),
            });
        }
        Ok(ClaimReport::all("unbounded_truth", claims))
    }

    /// Looks for a letterless `psi` of size at most `size_bound`, not
    /// numerated, strictly between `phi & Con(phi)` and `phi` for the first
    /// true numerated `phi`.
    pub fn search_gap_witness(
        &self,
        oracle: &Oracle,
        size_bound: usize,
    ) -> Result<GapResult, EnumeratorError> {
        let mut phi = None;
        for s in &self.numerated {
            if Profile::of(s)?.truth() {
                phi = Some(s.clone());
                break;
            }
        }
        let phi = phi
            .ok_or_else(|| EnumeratorError::InvalidArgument("no true numerated sentence".into()))?;
        let upper = Profile::of(&phi)?;
        let strong = with_con(phi.clone());
        let lower = Profile::of(&strong)?;
        let mut candidates = Vec::new();
        SentenceSpace::letterless().for_each_up_to(size_bound, &mut |s| {
            let p = Profile::of(&s).expect("letterless");
            let strictly_between =
                lower.implies(&p) && p != lower && p.implies(&upper) && p != upper;
            if strictly_between && !self.numerated_set.contains(&s) {
                candidates.push(s);
            }
        });
        for psi in candidates {
            let a = oracle.strictly_proves(&strong, &psi)?;
            let b = oracle.strictly_proves(&psi, &phi)?;
            if a == Answer::Yes && b == Answer::Yes {
                return Ok(GapResult::Found { phi, psi });
            }
        }
        Ok(GapResult::NotFound { phi })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapResult {
    Found { phi: Sentence, psi: Sentence },
    NotFound { phi: Sentence },
}

impl fmt::Display for GapResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapResult::Found { phi, psi } => write!(f, "GAP FOUND {psi} BELOW {phi}"),
            GapResult::NotFound { phi } => write!(f, "GAP NOTFOUND BELOW {phi}"),
        }
    }
}

/// The stage dump: `STAGE`, closure bounds, `NUM` lines, `ACT` lines and
/// the `TRUE` active.
impl fmt::Display for EnumeratorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "STAGE {}", self.stage)?;
        writeln!(
            f,
            "CLOSURE depth {} universe {}",
            self.config.closure_depth, self.config.universe_size
        )?;
        for s in &self.numerated {
            writeln!(f, "NUM {s}")?;
        }
        for s in &self.active {
            writeln!(f, "ACT {s}")?;
        }
        if let Ok(t) = self.unique_true() {
            writeln!(f, "TRUE {t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentence::parse_sentence;

    fn p(s: &str) -> Sentence {
        parse_sentence(s).unwrap()
    }

    fn config(closure_depth: u32) -> EnumeratorConfig {
        EnumeratorConfig {
            closure_depth,
            ..EnumeratorConfig::default()
        }
    }

    #[test]
    fn enumeration_starts_with_consistency() {
        let mut e = Enumeration::default();
        assert_eq!(e.get(0), p("Con(T)"));
        assert_eq!(e.get(1), p("Con(Con(T))"));
    }

    #[test]
    fn init_matches_stage_zero() {
        let oracle = Oracle::default();
        let st = EnumeratorState::init(&oracle, config(0)).unwrap();
        assert_eq!(st.numerated(), &[p("Con(T)"), p("~Con(T)")]);
        assert_eq!(
            st.active(),
            &[p("(Con(T) & Con(Con(T)))"), p("(~Con(T) & Con(~Con(T)))")]
        );
        assert_eq!(st.unique_true().unwrap(), &st.active()[0]);
        assert_eq!(
            st.verify_incompatibility(&oracle).unwrap().verdict,
            Answer::Yes
        );
    }

    #[test]
    fn closure_adds_only_equivalents() {
        let oracle = Oracle::default();
        let st = EnumeratorState::init(&oracle, config(2)).unwrap();
        assert!(st.numerated().len() > 2);
        assert!(st.is_numerated(&p("Con(~F)")));
        for (added, source) in &st.closure_log {
            assert_eq!(oracle.equivalent(added, source).unwrap(), Answer::Yes);
        }
    }

    #[test]
    fn steps_keep_the_invariants() {
        let oracle = Oracle::default();
        let mut st = EnumeratorState::init(&oracle, config(1)).unwrap();
        for stage in 1..=3u64 {
            let next = st.step(&oracle).unwrap();
            assert_eq!(next.stage, stage);
            assert_eq!(next.active().len(), 1 << (stage + 1));
            assert!(st.numerated().iter().all(|s| next.is_numerated(s)));
            next.unique_true().unwrap();
            assert_eq!(
                next.verify_incompatibility(&oracle).unwrap().verdict,
                Answer::Yes
            );
            st = next;
        }
        assert!(st.numerated().len() >= 2 + 4 + 8 + 16);
        let r = st.verify_unbounded_truth(&oracle, 3).unwrap();
        assert_eq!(r.verdict, Answer::Yes, "{r}");
        assert!(st.verify_unbounded_truth(&oracle, 4).is_err());
    }

    #[test]
    fn stage_cap_is_enforced() {
        let oracle = Oracle::default();
        let st = EnumeratorState::init(
            &oracle,
            EnumeratorConfig {
                stage_cap: 0,
                ..config(0)
            },
        )
        .unwrap();
        assert_eq!(
            st.step(&oracle).unwrap_err(),
            EnumeratorError::StageCapExceeded(0)
        );
    }

    #[test]
    fn gap_search_reports() {
        let oracle = Oracle::default();
        let st = EnumeratorState::init(&oracle, config(0)).unwrap();
        match st.search_gap_witness(&oracle, 3).unwrap() {
            GapResult::Found { phi, psi } => {
                let strong = with_con(phi.clone());
                assert_eq!(oracle.strictly_proves(&strong, &psi).unwrap(), Answer::Yes);
                assert_eq!(oracle.strictly_proves(&psi, &phi).unwrap(), Answer::Yes);
            }
            GapResult::NotFound { phi } => assert_eq!(phi, p("Con(T)")),
        }
    }

    #[test]
    fn dump_format() {
        let oracle = Oracle::default();
        let st = EnumeratorState::init(&oracle, config(0)).unwrap();
        assert_eq!(
            st.to_string(),
            "STAGE 0\nCLOSURE depth 0 universe 4\nNUM Con(T)\nNUM ~Con(T)\n\
             ACT (Con(T) & Con(Con(T)))\nACT (~Con(T) & Con(~Con(T)))\n\
             TRUE (Con(T) & Con(Con(T)))\n"
        );
    }
}
