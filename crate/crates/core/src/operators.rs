//! Sentence operators as named values, the bounded `star` and slow
//! consistency constructors, and randomized property checks.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen::random_sentence;
use crate::kripke::Countermodel;
use crate::oracle::{Oracle, OracleError, Verdict};
use crate::ordinal::Ordinal;
use crate::sentence::{AuxTag, Sentence, SentenceError, DEFAULT_SENTENCE_NODE_CAP};

/// A property an operator claims to have. Claims are checked, never assumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Monotone,
    /// Every output is consistency-shaped (`Con` or a nonzero `Con[a]`).
    Pi01Valued,
    /// `s & Con[k](s)` proves `f(s)`.
    BoundedByConK(u64),
    /// `f(s)` proves `s`.
    ImpliesInput,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Monotone => f.write_str("monotone"),
            Property::Pi01Valued => f.write_str("pi01_valued"),
            Property::BoundedByConK(k) => write!(f, "bounded_by_con_k({k})"),
            Property::ImpliesInput => f.write_str("implies_input"),
        }
    }
}

type Transform = Arc<dyn Fn(&Sentence) -> Sentence + Send + Sync>;

#[derive(Clone)]
pub struct OperatorSpec {
    name: String,
    transform: Transform,
    properties: Vec<Property>,
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("name", &self.name)
            .field("properties", &self.properties)
            .finish()
    }
}

impl OperatorSpec {
    pub fn new(
        name: impl Into<String>,
        properties: Vec<Property>,
        transform: impl Fn(&Sentence) -> Sentence + Send + Sync + 'static,
    ) -> Self {
        OperatorSpec {
            name: name.into(),
            transform: Arc::new(transform),
            properties,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn declares(&self, p: &Property) -> bool {
        self.properties.contains(p)
    }

    /// The raw transform, without the size check of [`apply`].
    pub fn transform(&self, s: &Sentence) -> Sentence {
        (self.transform)(s)
    }

    pub fn identity() -> Self {
        use Property::*;
        Self::new(
            "identity",
            vec![Monotone, BoundedByConK(0), ImpliesInput],
            |s| s.clone(),
        )
    }

    /// `s -> (s & Con(s))`
    pub fn conj_con() -> Self {
        use Property::*;
        Self::new(
            "conj_con",
            vec![Monotone, BoundedByConK(1), ImpliesInput],
            |s| Sentence::and(s.clone(), Sentence::con(s.clone())),
        )
    }

    /// `s -> (s & Con[k](s))`
    pub fn conj_con_k(k: u64) -> Self {
        use Property::*;
        Self::new(
            format!("conj_con_k{k}"),
            vec![Monotone, BoundedByConK(k), ImpliesInput],
            move |s| Sentence::and(s.clone(), Sentence::con_k(k, s.clone())),
        )
    }

    /// `s -> (s & Con[a](s))`
    pub fn conj_con_ord(a: Ordinal) -> Self {
        use Property::*;
        let mut props = vec![Monotone, ImpliesInput];
        if let Some(k) = a.as_finite() {
            props.insert(1, BoundedByConK(k));
        }
        Self::new(format!("conj_con_ord_{}", a.ident()), props, move |s| {
            Sentence::and(s.clone(), Sentence::con_iter(a.clone(), s.clone()))
        })
    }

    /// `s -> Con(s)`
    pub fn con() -> Self {
        use Property::*;
        Self::new("con", vec![Monotone, Pi01Valued, BoundedByConK(1)], |s| {
            Sentence::con(s.clone())
        })
    }

    /// `s -> Con[k](s)`, `k >= 1`.
    pub fn con_k(k: u64) -> Self {
        use Property::*;
        let k = k.max(1);
        Self::new(
            format!("con_k{k}"),
            vec![Monotone, Pi01Valued, BoundedByConK(k)],
            move |s| Sentence::con_k(k, s.clone()),
        )
    }

    /// `s -> ~s`; antitone, declared with nothing.
    pub fn negate() -> Self {
        Self::new("negate", vec![], |s| Sentence::not(s.clone()))
    }
}

/// Name-indexed operators. Parametric families resolve by name:
/// `conj_con_k<N>`, `con_k<N>` and `conj_con_ord:<ordinal>`.
#[derive(Debug, Clone)]
pub struct OperatorRegistry {
    ops: BTreeMap<String, OperatorSpec>,
}

impl Default for OperatorRegistry {
    fn default() -> Self {
        let mut reg = OperatorRegistry {
            ops: BTreeMap::new(),
        };
        for op in [
            OperatorSpec::identity(),
            OperatorSpec::conj_con(),
            OperatorSpec::con(),
            OperatorSpec::negate(),
        ] {
            reg.register(op);
        }
        reg
    }
}

impl OperatorRegistry {
    pub fn register(&mut self, op: OperatorSpec) {
        self.ops.insert(op.name.clone(), op);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }

    pub fn resolve(&self, name: &str) -> Option<OperatorSpec> {
        if let Some(op) = self.ops.get(name) {
            return Some(op.clone());
        }
        if let Some(k) = name.strip_prefix("conj_con_k") {
            return k.parse().ok().map(OperatorSpec::conj_con_k);
        }
        if let Some(k) = name.strip_prefix("con_k") {
            return k.parse().ok().filter(|&k| k >= 1).map(OperatorSpec::con_k);
        }
        if let Some(a) = name.strip_prefix("conj_con_ord:") {
            return Ordinal::parse(a).ok().map(OperatorSpec::conj_con_ord);
        }
        None
    }
}

pub fn apply(op: &OperatorSpec, s: &Sentence) -> Result<Sentence, SentenceError> {
    apply_capped(op, s, DEFAULT_SENTENCE_NODE_CAP)
}

pub fn apply_capped(
    op: &OperatorSpec,
    s: &Sentence,
    cap: usize,
) -> Result<Sentence, SentenceError> {
    let out = op.transform(s);
    out.check_size(cap)?;
    Ok(out)
}

fn isigma(x: u64, s: Sentence) -> Sentence {
    Sentence::con_aux(AuxTag::ISigma(x), s)
}

/// `s & /\_{x<bound} (ConI[x](s) -> ConI[x]((s & ConI[x](s))))`: the
/// universal quantifier over `x` instantiated below `bound`.
pub fn build_star(s: &Sentence, bound: u64) -> Result<Sentence, SentenceError> {
    if bound == 0 {
        return Err(SentenceError::InvalidArgument(
            "instantiation bound must be at least 1".into(),
        ));
    }
    let clauses = (0..bound).map(|x| {
        Sentence::imp(
            isigma(x, s.clone()),
            isigma(x, Sentence::and(s.clone(), isigma(x, s.clone()))),
        )
    });
    let out = Sentence::and(s.clone(), Sentence::and_all(clauses));
    out.check_size(DEFAULT_SENTENCE_NODE_CAP)?;
    Ok(out)
}

/// `/\_{x<bound} (@F_eps0_total_at_x -> ConI[x](s))`.
pub fn build_slowcon(s: &Sentence, bound: u64) -> Result<Sentence, SentenceError> {
    if bound == 0 {
        return Err(SentenceError::InvalidArgument(
            "instantiation bound must be at least 1".into(),
        ));
    }
    let out = Sentence::and_all((0..bound).map(|x| {
        Sentence::imp(
            Sentence::schematic(format!("F_eps0_total_at_{x}")),
            isigma(x, s.clone()),
        )
    }));
    out.check_size(DEFAULT_SENTENCE_NODE_CAP)?;
    Ok(out)
}

/// A random pair `(s, t)` where `s` proves `t` by construction.
pub fn weakening_pair<R: Rng>(rng: &mut R, atoms: &[&str]) -> (Sentence, Sentence) {
    let pick = |rng: &mut R| {
        let n = rng.gen_range(1..=5);
        random_sentence(rng, n, atoms)
    };
    let a = pick(rng);
    let b = pick(rng);
    match rng.gen_range(0..5) {
        0 => (Sentence::and(a.clone(), b), a),
        1 => (a.clone(), Sentence::or(a, b)),
        2 => (b.clone(), Sentence::imp(a, b)),
        3 => (Sentence::con(Sentence::con(a.clone())), Sentence::con(a)),
        _ => (Sentence::and(a.clone(), Sentence::imp(a, b.clone())), b),
    }
}

#[derive(Debug, Clone)]
pub struct MonotoneItem {
    pub index: usize,
    pub s: Sentence,
    pub t: Sentence,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub operator: String,
    pub seed: u64,
    pub items: Vec<MonotoneItem>,
}

impl MonotoneReport {
    pub fn count(&self, label: &str) -> usize {
        self.items
            .iter()
            .filter(|i| i.verdict.label() == label)
            .count()
    }

    pub fn valid(&self) -> usize {
        self.count("VALID")
    }

    pub fn invalid(&self) -> usize {
        self.count("INVALID")
    }

    pub fn unknown(&self) -> usize {
        self.count("UNKNOWN")
    }
}

impl fmt::Display for MonotoneReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OPERATOR {} SEED {}", self.operator, self.seed)?;
        for item in &self.items {
            writeln!(f, "ITEM {} VERDICT {}", item.index, item.verdict.label())?;
            if let Verdict::Invalid(model) = &item.verdict {
                writeln!(f, "WITNESS {}", item.index)?;
                writeln!(f, "S {}", item.s)?;
                writeln!(f, "T {}", item.t)?;
                write!(f, "{model}")?;
                writeln!(f, "END")?;
            }
        }
        writeln!(
            f,
            "SUMMARY VALID {} INVALID {} UNKNOWN {}",
            self.valid(),
            self.invalid(),
            self.unknown()
        )
    }
}

/// Checks `f(s)` proves `f(t)` on `corpus_size` seeded pairs where `s`
/// proves `t`.
pub fn check_monotone(
    oracle: &Oracle,
    op: &OperatorSpec,
    corpus_size: usize,
    seed: u64,
) -> Result<MonotoneReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(corpus_size);
    for index in 0..corpus_size {
        let (s, t) = weakening_pair(&mut rng, &["p", "q"]);
        let verdict = oracle.proves(&op.transform(&s), &op.transform(&t))?;
        items.push(MonotoneItem {
            index,
            s,
            t,
            verdict,
        });
    }
    Ok(MonotoneReport {
        operator: op.name.clone(),
        seed,
        items,
    })
}

/// Outcome of testing one declared property on a corpus.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub property: Property,
    pub passed: usize,
    pub unknown: usize,
    /// First input on which the property failed, with a countermodel when
    /// the failure is a non-provability.
    pub failure: Option<(Sentence, Option<Countermodel>)>,
}

/// Tests each declared property of `op` on `corpus` (monotonicity is
/// covered by [`check_monotone`] and skipped here).
pub fn check_declared(
    oracle: &Oracle,
    op: &OperatorSpec,
    corpus: &[Sentence],
) -> Result<Vec<PropertyCheck>, OracleError> {
    let mut out = Vec::new();
    for prop in &op.properties {
        let mut check = PropertyCheck {
            property: prop.clone(),
            passed: 0,
            unknown: 0,
            failure: None,
        };
        for s in corpus {
            let image = op.transform(s);
            let verdict = match prop {
                Property::Monotone => continue,
                Property::Pi01Valued if image.is_con_shaped() => Verdict::Valid,
                Property::Pi01Valued => {
                    check.failure.get_or_insert((s.clone(), None));
                    continue;
                }
                Property::ImpliesInput => oracle.proves(&image, s)?,
                Property::BoundedByConK(k) => oracle.proves(
                    &Sentence::and(s.clone(), Sentence::con_k(*k, s.clone())),
                    &image,
                )?,
            };
            match verdict {
                Verdict::Valid => check.passed += 1,
                Verdict::Unknown(_) => check.unknown += 1,
                Verdict::Invalid(m) => {
                    check.failure.get_or_insert((s.clone(), Some(m)));
                }
            }
        }
        if *prop != Property::Monotone {
            out.push(check);
        }
    }
    Ok(out)
}

/// Renders a property-check list, one line per property.
pub fn render_property_checks(op: &OperatorSpec, checks: &[PropertyCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        let _ = writeln!(
            out,
            "PROPERTY {} {} PASSED {} UNKNOWN {} FAILED {}",
            op.name,
            c.property,
            c.passed,
            c.unknown,
            usize::from(c.failure.is_some())
        );
    }
    out
}
