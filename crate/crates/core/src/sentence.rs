//! The formula language.
//!
//! `Con` is a unary modality read as "the base theory plus the argument is
//! consistent". `Con[a](s)` is its iterate along an ordinal notation, `1Con`
//! is 1-consistency, and `ConCF` / `ConI[n]` are auxiliary consistency
//! notions (cut-free, and relative to `I Sigma_n`). Schematic atoms (`@name`)
//! stand for quantified side conditions and truth-predicate instances that
//! the finitary language cannot express; they are opaque to every decision
//! procedure.
//!
//! Iterates are given by their zero, successor and limit clauses, not by a
//! diagonal fixed point; everything checked here uses only the clauses.
//!
//! Grammar:
//!
//! ```text
//! s  := "T" | "F" | IDENT | "@" NAME | "~" s | "(" s OP s ")"
//!     | "Con(" s ")" | "Con[" ord "](" s ")" | "1Con(" s ")"
//!     | "ConCF(" s ")" | "ConI[" NUM "](" s ")"
//! OP := "&" | "|" | "->"
//! ```

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError, DEFAULT_ORDINAL_NODE_CAP};

/// Default bound on the number of nodes in a sentence.
pub const DEFAULT_SENTENCE_NODE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SentenceError {
    #[error("sentence parse error at {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("unknown schematic atom @{0}")]
    UnknownSchematicAtom(String),
    #[error("sentence has more than {cap} nodes")]
    SizeCapExceeded { cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

/// Auxiliary consistency modalities. They have no decision procedure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuxTag {
    /// consistency with respect to cut-free proofs
    CutFree,
    /// consistency of `I Sigma_n` plus the argument
    ISigma(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sentence {
    Top,
    Bot,
    Atom(String),
    Schematic(String),
    Not(Arc<Sentence>),
    And(Arc<Sentence>, Arc<Sentence>),
    Or(Arc<Sentence>, Arc<Sentence>),
    Imp(Arc<Sentence>, Arc<Sentence>),
    Con(Arc<Sentence>),
    ConIter(Ordinal, Arc<Sentence>),
    OneCon(Arc<Sentence>),
    ConAux(AuxTag, Arc<Sentence>),
}

use Sentence::*;

impl Sentence {
    pub fn atom(name: &str) -> Self {
        Atom(name.to_string())
    }

    pub fn schematic(name: impl Into<String>) -> Self {
        Schematic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Sentence) -> Self {
        Not(Arc::new(s))
    }

    pub fn and(a: Sentence, b: Sentence) -> Self {
        And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Sentence, b: Sentence) -> Self {
        Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Sentence, b: Sentence) -> Self {
        Imp(Arc::new(a), Arc::new(b))
    }

    /// `(a -> b) & (b -> a)`
    pub fn iff(a: Sentence, b: Sentence) -> Self {
        Self::and(Self::imp(a.clone(), b.clone()), Self::imp(b, a))
    }

    pub fn con(s: Sentence) -> Self {
        Con(Arc::new(s))
    }

    pub fn con_iter(index: Ordinal, s: Sentence) -> Self {
        ConIter(index, Arc::new(s))
    }

    /// `Con[k](s)` for a finite `k`.
    pub fn con_k(k: u64, s: Sentence) -> Self {
        ConIter(Ordinal::finite(k), Arc::new(s))
    }

    pub fn one_con(s: Sentence) -> Self {
        OneCon(Arc::new(s))
    }

    pub fn con_aux(tag: AuxTag, s: Sentence) -> Self {
        ConAux(tag, Arc::new(s))
    }

    /// Left-nested conjunction; `T` for an empty iterator.
    pub fn and_all<I: IntoIterator<Item = Sentence>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Top,
            Some(first) => it.fold(first, Self::and),
        }
    }

    /// Left-nested disjunction; `F` for an empty iterator.
    pub fn or_all<I: IntoIterator<Item = Sentence>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Bot,
            Some(first) => it.fold(first, Self::or),
        }
    }

    pub fn children(&self) -> impl Iterator<Item = &Sentence> {
        self.kids().into_iter().flatten()
    }

    fn kids(&self) -> [Option<&Sentence>; 2] {
        match self {
            Top | Bot | Atom(_) | Schematic(_) => [None, None],
            Not(a) | Con(a) | ConIter(_, a) | OneCon(a) | ConAux(_, a) => [Some(a), None],
            And(a, b) | Or(a, b) | Imp(a, b) => [Some(a), Some(b)],
        }
    }

    /// Number of nodes; ordinal indices count as part of their `Con[..]` node.
    pub fn size(&self) -> usize {
        1 + self
            .kids()
            .into_iter()
            .flatten()
            .map(Sentence::size)
            .sum::<usize>()
    }

    pub fn check_size(&self, cap: usize) -> Result<(), SentenceError> {
        if self.size() > cap {
            Err(SentenceError::SizeCapExceeded { cap })
        } else {
            Ok(())
        }
    }

    /// Nesting depth of consistency-like operators, counting `Con[k]` as `k`
    /// for finite `k`; limit indices count as unbounded (`None`).
    pub fn modal_depth(&self) -> Option<u64> {
        let inner = self
            .kids()
            .into_iter()
            .flatten()
            .map(Sentence::modal_depth)
            .try_fold(0u64, |acc, d| d.map(|d| acc.max(d)))?;
        match self {
            Con(_) | OneCon(_) | ConAux(..) => Some(inner + 1),
            ConIter(a, _) => a.as_finite().map(|k| if k == 0 { 0 } else { inner + k }),
            _ => Some(inner),
        }
    }

    pub fn any_node(&self, pred: &dyn Fn(&Sentence) -> bool) -> bool {
        pred(self) || self.kids().into_iter().flatten().any(|c| c.any_node(pred))
    }

    /// No atoms, schematic atoms, 1-consistency, auxiliary modalities, or
    /// limit indices.
    pub fn is_letterless(&self) -> bool {
        !self.any_node(&|s| match s {
            Atom(_) | Schematic(_) | OneCon(_) | ConAux(..) => true,
            ConIter(a, _) => a.as_finite().is_none(),
            _ => false,
        })
    }

    /// Whether the sentence is a consistency statement at the root, i.e.
    /// syntactically Pi^0_1.
    pub fn is_con_shaped(&self) -> bool {
        matches!(self, Con(_)) || matches!(self, ConIter(a, _) if !a.is_zero())
    }

    pub fn parse(text: &str) -> Result<Sentence, SentenceError> {
        parse_sentence(text)
    }
}

impl fmt::Display for AuxTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxTag::CutFree => f.write_str("CF"),
            AuxTag::ISigma(n) => write!(f, "I[{n}]"),
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Top => f.write_str("T"),
            Bot => f.write_str("F"),
            Atom(name) => f.write_str(name),
            Schematic(name) => write!(f, "@{name}"),
            Not(a) => write!(f, "~{a}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Imp(a, b) => write!(f, "({a} -> {b})"),
            Con(a) => write!(f, "Con({a})"),
            ConIter(i, a) => write!(f, "Con[{i}]({a})"),
            OneCon(a) => write!(f, "1Con({a})"),
            ConAux(tag, a) => write!(f, "Con{tag}({a})"),
        }
    }
}

impl std::str::FromStr for Sentence {
    type Err = SentenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sentence(s)
    }
}

/// Registered names for schematic atoms. A name is accepted when it starts
/// with one of the registered prefixes.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    prefixes: Vec<String>,
}

/// Prefixes used by the built-in constructions.
pub const DEFAULT_SCHEMATIC_PREFIXES: &[&str] = &[
    "true_pi1_",
    "true_pi2_",
    "true_pi3_",
    "true_pi01_",
    "F_eps0_total_at_",
    "theta1_",
    "theta_body_",
    "phi1_",
    "chi_",
    "ttt_",
    "ti_",
    "hyp_",
];

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            prefixes: DEFAULT_SCHEMATIC_PREFIXES
                .iter()
                .map(|p| p.to_string())
                .collect(),
        }
    }
}

impl Vocabulary {
    pub fn register(&mut self, prefix: &str) {
        if !self.prefixes.iter().any(|p| p == prefix) {
            self.prefixes.push(prefix.to_string());
        }
    }

    pub fn accepts(&self, name: &str) -> bool {
        self.prefixes.iter().any(|p| name.starts_with(p.as_str()))
    }
}

#[derive(Debug, Clone)]
pub struct ParseConfig {
    pub vocabulary: Vocabulary,
    pub node_cap: usize,
    pub ordinal_cap: usize,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            vocabulary: Vocabulary::default(),
            node_cap: DEFAULT_SENTENCE_NODE_CAP,
            ordinal_cap: DEFAULT_ORDINAL_NODE_CAP,
        }
    }
}

pub fn parse_sentence(text: &str) -> Result<Sentence, SentenceError> {
    parse_sentence_with(text, &ParseConfig::default())
}

pub fn parse_sentence_with(text: &str, config: &ParseConfig) -> Result<Sentence, SentenceError> {
    let mut p = Parser {
        src: text.as_bytes(),
        text,
        pos: 0,
        config,
    };
    let s = p.sentence()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    s.check_size(config.node_cap)?;
    Ok(s)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    config: &'a ParseConfig,
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> SentenceError {
        SentenceError::Parse {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn rest(&mut self) -> &[u8] {
        self.skip_ws();
        &self.src[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), SentenceError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("'{token}'")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && pred(self.src[self.pos]) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn paren_body(&mut self) -> Result<Arc<Sentence>, SentenceError> {
        self.expect("(")?;
        let s = self.sentence()?;
        self.expect(")")?;
        Ok(Arc::new(s))
    }

    fn bracket_ordinal(&mut self) -> Result<Ordinal, SentenceError> {
        let start = self.pos;
        let close = self.src[start..]
            .iter()
            .position(|&c| c == b']')
            .ok_or_else(|| self.error("']'"))?;
        let ord_text = &self.text[start..start + close];
        let ord =
            Ordinal::parse_with_cap(ord_text, self.config.ordinal_cap).map_err(|e| match e {
                OrdinalError::Parse { position, expected } => SentenceError::Parse {
                    position: start + position,
                    expected,
                },
                other => SentenceError::Ordinal(other),
            })?;
        self.pos = start + close + 1;
        Ok(ord)
    }

    fn sentence(&mut self) -> Result<Sentence, SentenceError> {
        let rest = self.rest();
        let Some(&c) = rest.first() else {
            return Err(self.error("sentence"));
        };
        match c {
            b'~' => {
                self.pos += 1;
                Ok(Not(Arc::new(self.sentence()?)))
            }
            b'(' => {
                self.pos += 1;
                let a = self.sentence()?;
                let op = if self.eat("&") {
                    0
                } else if self.eat("|") {
                    1
                } else if self.eat("->") {
                    2
                } else {
                    return Err(self.error("'&', '|' or '->'"));
                };
                let b = self.sentence()?;
                self.expect(")")?;
                let (a, b) = (Arc::new(a), Arc::new(b));
                Ok(match op {
                    0 => And(a, b),
                    1 => Or(a, b),
                    _ => Imp(a, b),
                })
            }
            b'@' => {
                self.pos += 1;
                let start = self.pos;
                if !self.src.get(start).is_some_and(|c| c.is_ascii_alphabetic()) {
                    return Err(self.error("schematic atom name"));
                }
                let name = self
                    .take_while(|c| c.is_ascii_alphanumeric() || c == b'_')
                    .to_string();
                if !self.config.vocabulary.accepts(&name) {
                    return Err(SentenceError::UnknownSchematicAtom(name));
                }
                Ok(Schematic(name))
            }
            b'1' => {
                self.expect("1Con")?;
                Ok(OneCon(self.paren_body()?))
            }
            b'a'..=b'z' => {
                let name = self
                    .take_while(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_')
                    .to_string();
                Ok(Atom(name))
            }
            b'C' => {
                if self.eat("ConCF") {
                    Ok(ConAux(AuxTag::CutFree, self.paren_body()?))
                } else if self.eat("ConI[") {
                    self.skip_ws();
                    let start = self.pos;
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    let n = digits.parse::<u64>().map_err(|_| SentenceError::Parse {
                        position: start,
                        expected: "numeral".into(),
                    })?;
                    self.expect("]")?;
                    Ok(ConAux(AuxTag::ISigma(n), self.paren_body()?))
                } else if self.eat("Con[") {
                    let ord = self.bracket_ordinal()?;
                    Ok(ConIter(ord, self.paren_body()?))
                } else if self.eat("Con") {
                    Ok(Con(self.paren_body()?))
                } else {
                    Err(self.error("'Con'"))
                }
            }
            b'T' => {
                self.pos += 1;
                Ok(Top)
            }
            b'F' => {
                self.pos += 1;
                Ok(Bot)
            }
            _ => Err(self.error("sentence")),
        }
    }
}

/// Rewrites every `Con[a](s)` by the defining clauses: index 0 becomes `T`,
/// a successor `b+1` becomes `Con(s & Con[b](s))`, and a limit `l` becomes
/// the conjunction of `Con[l[i]](s)` for `i < budget`. The flag is `true`
/// iff no limit had to be truncated.
pub fn unfold_iter(s: &Sentence, budget: u64) -> Result<(Sentence, bool), SentenceError> {
    unfold_iter_capped(s, budget, DEFAULT_SENTENCE_NODE_CAP)
}

pub fn unfold_iter_capped(
    s: &Sentence,
    budget: u64,
    cap: usize,
) -> Result<(Sentence, bool), SentenceError> {
    if budget == 0 {
        return Err(SentenceError::InvalidArgument(
            "unfolding budget must be at least 1".into(),
        ));
    }
    let mut exact = true;
    let out = Unfolder {
        budget,
        cap,
        exact: &mut exact,
    }
    .walk(s)?;
    out.check_size(cap)?;
    Ok((out, exact))
}

struct Unfolder<'a> {
    budget: u64,
    cap: usize,
    exact: &'a mut bool,
}

impl Unfolder<'_> {
    fn walk(&mut self, s: &Sentence) -> Result<Sentence, SentenceError> {
        Ok(match s {
            Top | Bot | Atom(_) | Schematic(_) => s.clone(),
            Not(a) => Not(Arc::new(self.walk(a)?)),
            And(a, b) => And(Arc::new(self.walk(a)?), Arc::new(self.walk(b)?)),
            Or(a, b) => Or(Arc::new(self.walk(a)?), Arc::new(self.walk(b)?)),
            Imp(a, b) => Imp(Arc::new(self.walk(a)?), Arc::new(self.walk(b)?)),
            Con(a) => Con(Arc::new(self.walk(a)?)),
            OneCon(a) => OneCon(Arc::new(self.walk(a)?)),
            ConAux(t, a) => ConAux(t.clone(), Arc::new(self.walk(a)?)),
            ConIter(index, a) => {
                let body = self.walk(a)?;
                self.expand(index, &body)?
            }
        })
    }

    fn expand(&mut self, index: &Ordinal, body: &Sentence) -> Result<Sentence, SentenceError> {
        let (base, m) = index.split_finite();
        let mut acc = if base.is_zero() {
            Top
        } else {
            *self.exact = false;
            let mut parts = Vec::new();
            let mut size = 0usize;
            for i in 0..self.budget {
                let part = self.expand(&base.fundamental_step(i)?, body)?;
                size += part.size() + 1;
                if size > self.cap {
                    return Err(SentenceError::SizeCapExceeded { cap: self.cap });
                }
                parts.push(part);
            }
            Sentence::and_all(parts)
        };
        let step = body.size() + 2;
        let mut size = acc.size();
        for _ in 0..m {
            size += step;
            if size > self.cap {
                return Err(SentenceError::SizeCapExceeded { cap: self.cap });
            }
            acc = Sentence::con(Sentence::and(body.clone(), acc));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Sentence {
        parse_sentence(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("Con(T)"), Sentence::con(Top));
        assert_eq!(
            p("(Con(T) -> Con(~Con(T)))"),
            Sentence::imp(
                Sentence::con(Top),
                Sentence::con(Sentence::not(Sentence::con(Top)))
            )
        );
        assert_eq!(
            p("Con[w](p)"),
            Sentence::con_iter(Ordinal::omega(), Sentence::atom("p"))
        );
    }

    #[test]
    fn render_examples() {
        assert_eq!(Top.to_string(), "T");
        let s = Sentence::and(Sentence::atom("p"), Sentence::con(Sentence::atom("p")));
        assert_eq!(s.to_string(), "(p & Con(p))");
        let w2p1 = Ordinal::parse("w*2+1").unwrap();
        assert_eq!(Sentence::con_iter(w2p1, Top).to_string(), "Con[w*2+1](T)");
    }

    #[test]
    fn parses_auxiliary_forms() {
        assert_eq!(
            p("ConI[0]((p & ConI[0](p)))").to_string(),
            "ConI[0]((p & ConI[0](p)))"
        );
        assert_eq!(p("ConCF(T)"), Sentence::con_aux(AuxTag::CutFree, Top));
        assert_eq!(p("1Con(q1)"), Sentence::one_con(Sentence::atom("q1")));
        assert_eq!(
            p("@F_eps0_total_at_3"),
            Sentence::schematic("F_eps0_total_at_3")
        );
    }

    #[test]
    fn whitespace_is_tolerated() {
        assert_eq!(p(" ( p  &  Con[ w + 1 ]( T ) ) "), p("(p & Con[w+1](T))"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_sentence("(p & q"),
            Err(SentenceError::Parse { .. })
        ));
        assert!(matches!(
            parse_sentence("(p q)"),
            Err(SentenceError::Parse { position: 3, .. })
        ));
        assert!(matches!(
            parse_sentence("Cob(p)"),
            Err(SentenceError::Parse { .. })
        ));
        assert!(matches!(
            parse_sentence("p q"),
            Err(SentenceError::Parse { .. })
        ));
        assert_eq!(
            parse_sentence("@mystery"),
            Err(SentenceError::UnknownSchematicAtom("mystery".into()))
        );
        assert!(matches!(
            parse_sentence("Con[w+w^2](p)"),
            Err(SentenceError::Ordinal(OrdinalError::NonCanonical(_)))
        ));
        assert!(matches!(
            parse_sentence("Con[w^](p)"),
            Err(SentenceError::Parse { position: 6, .. })
        ));
    }

    #[test]
    fn custom_vocabulary() {
        let mut config = ParseConfig::default();
        config.vocabulary.register("mystery");
        assert!(parse_sentence_with("@mystery", &config).is_ok());
    }

    #[test]
    fn node_cap_on_parse() {
        let config = ParseConfig {
            node_cap: 3,
            ..ParseConfig::default()
        };
        assert!(parse_sentence_with("(p & q)", &config).is_ok());
        assert_eq!(
            parse_sentence_with("(p & ~q)", &config),
            Err(SentenceError::SizeCapExceeded { cap: 3 })
        );
    }

    #[test]
    fn unfold_zero_and_successor() {
        assert_eq!(unfold_iter(&p("Con[0](p)"), 4).unwrap(), (Top, true));
        let (s, exact) = unfold_iter(&p("Con[2](T)"), 4).unwrap();
        assert!(exact);
        assert_eq!(s, p("Con((T & Con((T & T))))"));
    }

    #[test]
    fn unfold_limit_truncates() {
        let (s, exact) = unfold_iter(&p("Con[w](T)"), 2).unwrap();
        assert!(!exact);
        // Con[0](T) & Con[1](T)
        assert_eq!(s, p("(T & Con((T & T)))"));
        let (s, exact) = unfold_iter(&p("Con[w+1](p)"), 1).unwrap();
        assert!(!exact);
        assert_eq!(s, p("Con((p & T))"));
    }

    #[test]
    fn unfold_is_a_fixed_point() {
        for text in [
            "Con[3](Con[2](p))",
            "(Con[w](T) -> Con[w*2](q))",
            "1Con(Con[1](p))",
        ] {
            let (once, _) = unfold_iter(&p(text), 2).unwrap();
            let (twice, exact) = unfold_iter(&once, 2).unwrap();
            assert_eq!(once, twice);
            assert!(exact);
        }
    }

    #[test]
    fn unfold_respects_cap() {
        assert_eq!(
            unfold_iter_capped(&p("Con[100](p)"), 1, 64),
            Err(SentenceError::SizeCapExceeded { cap: 64 })
        );
        assert!(matches!(
            unfold_iter(&p("p"), 0),
            Err(SentenceError::InvalidArgument(_))
        ));
    }

    #[test]
    fn letterless_and_depth() {
        assert!(p("(Con(T) | ~Con[3](F))").is_letterless());
        assert!(!p("Con(p)").is_letterless());
        assert!(!p("Con[w](T)").is_letterless());
        assert_eq!(p("Con[3](Con(T))").modal_depth(), Some(4));
        assert_eq!(p("Con[0](Con(T))").modal_depth(), Some(0));
        assert_eq!(p("Con[w](T)").modal_depth(), None);
    }
}
