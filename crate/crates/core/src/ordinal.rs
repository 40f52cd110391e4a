//! Ordinal notations below epsilon-zero in Cantor normal form.
//!
//! A notation is a finite sequence of terms `w^e * c` with strictly
//! decreasing exponents and positive coefficients; the empty sequence is 0.
//! These serve as the concrete elementary well-ordering that indexes the
//! iterated consistency operators.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Default bound on the number of nodes in a notation.
pub const DEFAULT_ORDINAL_NODE_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("ordinal parse error at {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("non-canonical notation: {0}")]
    NonCanonical(String),
    #[error("notation is not a successor")]
    NotASuccessor,
    #[error("notation is not a limit")]
    NotALimit,
    #[error("notation has {size} nodes, cap is {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
}

/// Zero / successor / limit classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Zero,
    Successor,
    Limit,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Zero => "ZERO",
            Kind::Successor => "SUCCESSOR",
            Kind::Limit => "LIMIT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    exponent: Ordinal,
    coefficient: u64,
}

impl Term {
    pub fn exponent(&self) -> &Ordinal {
        &self.exponent
    }

    pub fn coefficient(&self) -> u64 {
        self.coefficient
    }
}

/// A canonical Cantor-normal-form notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent: Self::zero(),
                coefficient: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::finite(1))
    }

    /// `w^e`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient: 1,
            }],
        }
    }

    /// Builds a notation from `(exponent, coefficient)` pairs, rejecting
    /// anything that is not in Cantor normal form.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Result<Self, OrdinalError> {
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (exponent, coefficient) in terms {
            if coefficient == 0 {
                return Err(OrdinalError::NonCanonical("coefficient 0".into()));
            }
            if let Some(prev) = out.last() {
                if prev.exponent <= exponent {
                    return Err(OrdinalError::NonCanonical(format!(
                        "exponent {} does not decrease after {}",
                        exponent, prev.exponent
                    )));
                }
            }
            out.push(Term {
                exponent,
                coefficient,
            });
        }
        Ok(Ordinal { terms: out })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a natural number, if below `w`.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    /// Number of nodes in the notation tree (0 counts as one node).
    pub fn size(&self) -> usize {
        if self.terms.is_empty() {
            return 1;
        }
        self.terms.iter().map(|t| 1 + t.exponent.size()).sum()
    }

    pub fn check_size(&self, cap: usize) -> Result<(), OrdinalError> {
        let size = self.size();
        if size > cap {
            Err(OrdinalError::SizeCapExceeded { size, cap })
        } else {
            Ok(())
        }
    }

    pub fn classify(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some(t) if t.exponent.is_zero() => Kind::Successor,
            Some(_) => Kind::Limit,
        }
    }

    /// Splits `self` as `base + m` where `base` is zero or a limit.
    pub fn split_finite(&self) -> (Ordinal, u64) {
        match self.terms.split_last() {
            Some((last, rest)) if last.exponent.is_zero() => (
                Ordinal {
                    terms: rest.to_vec(),
                },
                last.coefficient,
            ),
            _ => (self.clone(), 0),
        }
    }

    /// `self + 1`.
    pub fn successor(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some(t) if t.exponent.is_zero() => t.coefficient += 1,
            _ => terms.push(Term {
                exponent: Ordinal::zero(),
                coefficient: 1,
            }),
        }
        Ordinal { terms }
    }

    pub fn predecessor(&self) -> Result<Ordinal, OrdinalError> {
        if self.classify() != Kind::Successor {
            return Err(OrdinalError::NotASuccessor);
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        if last.coefficient > 1 {
            last.coefficient -= 1;
        } else {
            terms.pop();
        }
        Ok(Ordinal { terms })
    }

    /// The `n`-th element of the standard fundamental sequence of a limit:
    /// `(g + w^(b+1)*c)[n] = g + w^(b+1)*(c-1) + w^b*n` and
    /// `(g + w^l*c)[n] = g + w^l*(c-1) + w^(l[n])` for limit `l`.
    pub fn fundamental_step(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if self.classify() != Kind::Limit {
            return Err(OrdinalError::NotALimit);
        }
        let mut terms = self.terms.clone();
        let last = terms.pop().expect("limit has a last term");
        if last.coefficient > 1 {
            terms.push(Term {
                exponent: last.exponent.clone(),
                coefficient: last.coefficient - 1,
            });
        }
        match last.exponent.classify() {
            Kind::Successor => {
                if n > 0 {
                    terms.push(Term {
                        exponent: last.exponent.predecessor()?,
                        coefficient: n,
                    });
                }
            }
            Kind::Limit => terms.push(Term {
                exponent: last.exponent.fundamental_step(n)?,
                coefficient: 1,
            }),
            Kind::Zero => unreachable!("limit term has a nonzero exponent"),
        }
        Ok(Ordinal { terms })
    }

    /// Rendering restricted to identifier characters, for use inside
    /// schematic atom names: `^ * + ( )` become `e x p o c`.
    pub fn ident(&self) -> String {
        self.to_string()
            .chars()
            .map(|c| match c {
                '^' => 'e',
                '*' => 'x',
                '+' => 'p',
                '(' => 'o',
                ')' => 'c',
                c => c,
            })
            .collect()
    }

    pub fn parse(text: &str) -> Result<Ordinal, OrdinalError> {
        Self::parse_with_cap(text, DEFAULT_ORDINAL_NODE_CAP)
    }

    pub fn parse_with_cap(text: &str, cap: usize) -> Result<Ordinal, OrdinalError> {
        let mut p = OrdParser {
            src: text.as_bytes(),
            pos: 0,
        };
        let ord = p.ord()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("end of input"));
        }
        ord.check_size(cap)?;
        Ok(ord)
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_finite() {
            write!(f, "{n}")
        } else if *self == Ordinal::omega() {
            f.write_str("w")
        } else {
            write!(f, "({self})")
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if t.exponent != Ordinal::finite(1) {
                f.write_str("^")?;
                t.exponent.fmt_factor(f)?;
            }
            if t.coefficient > 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ordinal::parse(s)
    }
}

struct OrdParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl OrdParser<'_> {
    fn error(&self, expected: &str) -> OrdinalError {
        OrdinalError::Parse {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn num(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("numeral"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse::<u64>().map_err(|_| OrdinalError::Parse {
            position: start,
            expected: "numeral fitting in 64 bits".into(),
        })
    }

    fn positive(&mut self) -> Result<u64, OrdinalError> {
        let start = self.pos;
        let n = self.num()?;
        if n == 0 {
            return Err(OrdinalError::Parse {
                position: start,
                expected: "numeral >= 1".into(),
            });
        }
        Ok(n)
    }

    fn ord(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.peek() == Some(b'0') {
            let start = self.pos;
            let n = self.num()?;
            if n == 0 {
                return Ok(Ordinal::zero());
            }
            // a numeral with a leading zero such as "07"
            self.pos = start;
            return Err(self.error("numeral without leading zero"));
        }
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        Ordinal::from_terms(terms)
    }

    fn term(&mut self) -> Result<(Ordinal, u64), OrdinalError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok((Ordinal::zero(), self.positive()?)),
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    self.factor()?
                } else {
                    Ordinal::finite(1)
                };
                let coefficient = if self.eat(b'*') { self.positive()? } else { 1 };
                Ok((exponent, coefficient))
            }
            _ => Err(self.error("numeral or 'w'")),
        }
    }

    fn factor(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.positive()?)),
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.ord()?;
                if !self.eat(b')') {
                    return Err(self.error("')'"));
                }
                Ok(inner)
            }
            _ => Err(self.error("numeral, 'w' or '('")),
        }
    }
}

/// A linear order with decidable zero/successor/limit classification and
/// computable fundamental sequences. Cantor normal form is the instance
/// shipped here; other presentations (for instance non-well-founded
/// recursive orders) can be plugged in behind the same interface.
pub trait ElementaryOrder {
    type Point: Clone + fmt::Display;

    fn compare(&self, a: &Self::Point, b: &Self::Point) -> Ordering;
    fn classify(&self, a: &Self::Point) -> Kind;
    fn predecessor(&self, a: &Self::Point) -> Result<Self::Point, OrdinalError>;
    fn fundamental_step(&self, a: &Self::Point, n: u64) -> Result<Self::Point, OrdinalError>;
    /// Name of the fundamental-sequence convention, reported in outputs.
    fn convention(&self) -> &'static str;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CantorNormalForm;

impl ElementaryOrder for CantorNormalForm {
    type Point = Ordinal;

    fn compare(&self, a: &Ordinal, b: &Ordinal) -> Ordering {
        a.cmp(b)
    }

    fn classify(&self, a: &Ordinal) -> Kind {
        a.classify()
    }

    fn predecessor(&self, a: &Ordinal) -> Result<Ordinal, OrdinalError> {
        a.predecessor()
    }

    fn fundamental_step(&self, a: &Ordinal, n: u64) -> Result<Ordinal, OrdinalError> {
        a.fundamental_step(n)
    }

    fn convention(&self) -> &'static str {
        "cnf-standard"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        Ordinal::parse(s).unwrap()
    }

    #[test]
    fn parses_zero_and_literals() {
        assert!(o("0").is_zero());
        let a = o("w^w*2+w*3+5");
        assert_eq!(a.terms().len(), 3);
        assert_eq!(a.terms()[0].exponent(), &Ordinal::omega());
        assert_eq!(a.terms()[0].coefficient(), 2);
        assert_eq!(a.terms()[2].coefficient(), 5);
        assert_eq!(a.to_string(), "w^w*2+w*3+5");
    }

    #[test]
    fn rejects_non_canonical() {
        assert!(matches!(
            Ordinal::parse("w+w^2"),
            Err(OrdinalError::NonCanonical(_))
        ));
        assert!(matches!(
            Ordinal::parse("3+2"),
            Err(OrdinalError::NonCanonical(_))
        ));
        assert!(matches!(
            Ordinal::from_terms(vec![(Ordinal::zero(), 0)]),
            Err(OrdinalError::NonCanonical(_))
        ));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "w^", "w*0", "(w)", "w+", "07", "w^(w", "x"] {
            assert!(
                matches!(Ordinal::parse(bad), Err(OrdinalError::Parse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn non_canonical_spellings_normalise_on_render() {
        assert_eq!(o("w^1*1").to_string(), "w");
        assert_eq!(o("w^(w)").to_string(), "w^w");
        assert_eq!(o("w^(2)").to_string(), "w^2");
    }

    #[test]
    fn nested_exponents_render_with_parens() {
        assert_eq!(o("w^(w^w)").to_string(), "w^(w^w)");
        assert_eq!(o("w^(w+1)*3").to_string(), "w^(w+1)*3");
    }

    #[test]
    fn size_cap_is_enforced() {
        let err = Ordinal::parse_with_cap("w^(w^w)", 3).unwrap_err();
        assert!(matches!(err, OrdinalError::SizeCapExceeded { .. }));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(o("w").cmp(&o("w")), Ordering::Equal);
        assert_eq!(o("w^2*2+w*9").cmp(&o("w^2*3")), Ordering::Less);
        assert_eq!(o("5").cmp(&o("w")), Ordering::Less);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(o("0").classify(), Kind::Zero);
        assert_eq!(o("w*2+1").classify(), Kind::Successor);
        assert_eq!(o("w^w").classify(), Kind::Limit);
    }

    #[test]
    fn predecessor_examples() {
        assert_eq!(o("1").predecessor().unwrap(), o("0"));
        assert_eq!(o("w+3").predecessor().unwrap(), o("w+2"));
        assert_eq!(o("w").predecessor(), Err(OrdinalError::NotASuccessor));
        assert_eq!(o("0").predecessor(), Err(OrdinalError::NotASuccessor));
    }

    #[test]
    fn fundamental_sequence_table() {
        // hand-audited reference values, exponents up to w
        let table = [
            ("w", 3, "3"),
            ("w", 0, "0"),
            ("w^2", 2, "w*2"),
            ("w^2", 0, "0"),
            ("w*2", 4, "w+4"),
            ("w^2*3", 1, "w^2*2+w"),
            ("w^2+w", 5, "w^2+5"),
            ("w^3", 2, "w^2*2"),
            ("w^w", 0, "1"),
            ("w^w", 3, "w^3"),
            ("w^w*2", 2, "w^w+w^2"),
            ("w^(w+1)", 2, "w^w*2"),
            ("w^(w*2)", 1, "w^(w+1)"),
            ("w^(w^w)", 2, "w^(w^2)"),
        ];
        for (a, n, want) in table {
            assert_eq!(o(a).fundamental_step(n).unwrap(), o(want), "{a}[{n}]");
        }
        assert_eq!(o("w+1").fundamental_step(0), Err(OrdinalError::NotALimit));
        assert_eq!(o("0").fundamental_step(0), Err(OrdinalError::NotALimit));
    }

    #[test]
    fn successor_inverts_predecessor() {
        for s in ["1", "w+3", "w^w*2+1", "7"] {
            let a = o(s);
            assert_eq!(a.predecessor().unwrap().successor(), a);
        }
    }

    #[test]
    fn trait_instance_reports_convention() {
        let cnf = CantorNormalForm;
        assert_eq!(cnf.convention(), "cnf-standard");
        assert_eq!(cnf.classify(&o("w")), Kind::Limit);
        assert_eq!(cnf.compare(&o("1"), &o("2")), Ordering::Less);
    }
}
