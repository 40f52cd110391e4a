//! Finite transitive irreflexive Kripke models.
//!
//! `Con(s)` holds at a world iff `s` holds at some strictly later world.
//! Finite strict partial orders are conversely well-founded, which is what
//! makes these models sound for the provability reading of `Con`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::sentence::Sentence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("relation is not irreflexive at world {0}")]
    Reflexive(usize),
    #[error("relation is not transitive: {0} < {1} < {2}")]
    NotTransitive(usize, usize, usize),
    #[error("world {0} out of range")]
    OutOfRange(usize),
    #[error("malformed model text at line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// A countermodel: finite worlds `0..n`, a strict partial order, a
/// valuation and a designated world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    worlds: usize,
    relation: BTreeSet<(usize, usize)>,
    valuation: Vec<BTreeSet<String>>,
    root: usize,
}

impl Countermodel {
    /// Validates and builds a model. `relation` must already be transitive.
    pub fn new(
        worlds: usize,
        relation: BTreeSet<(usize, usize)>,
        valuation: Vec<BTreeSet<String>>,
        root: usize,
    ) -> Result<Self, ModelError> {
        if root >= worlds.max(1) || worlds == 0 {
            return Err(ModelError::OutOfRange(root));
        }
        if valuation.len() != worlds {
            return Err(ModelError::OutOfRange(valuation.len()));
        }
        for &(i, j) in &relation {
            if i >= worlds || j >= worlds {
                return Err(ModelError::OutOfRange(i.max(j)));
            }
            if i == j {
                return Err(ModelError::Reflexive(i));
            }
        }
        for &(i, j) in &relation {
            for &(j2, k) in relation.range((j, 0)..(j + 1, 0)) {
                debug_assert_eq!(j, j2);
                if !relation.contains(&(i, k)) {
                    return Err(ModelError::NotTransitive(i, j, k));
                }
            }
        }
        Ok(Countermodel {
            worlds,
            relation,
            valuation,
            root,
        })
    }

    /// Builds a model from edges, closing them transitively first.
    #[allow(clippy::needless_range_loop)]
    pub fn from_edges(
        worlds: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        valuation: Vec<BTreeSet<String>>,
        root: usize,
    ) -> Result<Self, ModelError> {
        let mut reach = vec![vec![false; worlds]; worlds];
        for (i, j) in edges {
            if i >= worlds || j >= worlds {
                return Err(ModelError::OutOfRange(i.max(j)));
            }
            reach[i][j] = true;
        }
        for k in 0..worlds {
            for i in 0..worlds {
                if reach[i][k] {
                    for j in 0..worlds {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let relation = (0..worlds)
            .flat_map(|i| (0..worlds).map(move |j| (i, j)))
            .filter(|&(i, j)| reach[i][j])
            .collect();
        Self::new(worlds, relation, valuation, root)
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn relation(&self) -> &BTreeSet<(usize, usize)> {
        &self.relation
    }

    pub fn valuation(&self, world: usize) -> &BTreeSet<String> {
        &self.valuation[world]
    }

    pub fn successors(&self, world: usize) -> impl Iterator<Item = usize> + '_ {
        self.relation
            .range((world, 0)..(world + 1, 0))
            .map(|&(_, j)| j)
    }

    /// Truth of `s` at `world`; `None` when `s` mentions constructs with no
    /// Kripke reading here (1-consistency, auxiliary modalities, limit
    /// indices). Schematic atoms read their valuation under `@name`.
    pub fn holds(&self, s: &Sentence, world: usize) -> Option<bool> {
        use Sentence::*;
        Some(match s {
            Top => true,
            Bot => false,
            Atom(name) => self.valuation[world].contains(name),
            Schematic(name) => self.valuation[world].contains(&format!("@{name}")),
            Not(a) => !self.holds(a, world)?,
            And(a, b) => self.holds(a, world)? & self.holds(b, world)?,
            Or(a, b) => self.holds(a, world)? | self.holds(b, world)?,
            Imp(a, b) => !self.holds(a, world)? | self.holds(b, world)?,
            Con(a) => {
                let mut any = false;
                for v in self.successors(world) {
                    any |= self.holds(a, v)?;
                }
                any
            }
            ConIter(index, a) => {
                let k = index.as_finite()?;
                self.con_iter_holds(k, a, world)?
            }
            OneCon(_) | ConAux(..) => return None,
        })
    }

    // Con[k+1](a) holds at w iff some v > w has a and Con[k](a).
    fn con_iter_holds(&self, k: u64, a: &Sentence, world: usize) -> Option<bool> {
        if k == 0 {
            return Some(true);
        }
        let mut any = false;
        for v in self.successors(world) {
            any |= self.holds(a, v)? && self.con_iter_holds(k - 1, a, v)?;
        }
        Some(any)
    }

    /// Whether the model refutes `s` at its designated world.
    pub fn refutes(&self, s: &Sentence) -> Option<bool> {
        self.holds(s, self.root).map(|b| !b)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut worlds = None;
        let mut relation = BTreeSet::new();
        let mut vals: Vec<(usize, String)> = Vec::new();
        let mut root = None;
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let bad = |reason: &str| ModelError::Format {
                line: line_no,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<usize, ModelError> {
                fields
                    .get(i)
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| bad("expected a world index"))
            };
            match fields.first().copied() {
                None => continue,
                Some("WORLDS") if fields.len() == 2 => worlds = Some(num(1)?),
                Some("REL") if fields.len() == 3 => {
                    relation.insert((num(1)?, num(2)?));
                }
                Some("VAL") if fields.len() == 3 => vals.push((num(1)?, fields[2].to_string())),
                Some("ROOT") if fields.len() == 2 => root = Some(num(1)?),
                _ => return Err(bad("unrecognised line")),
            }
        }
        let worlds = worlds.ok_or(ModelError::Format {
            line: 0,
            reason: "missing WORLDS".into(),
        })?;
        let root = root.ok_or(ModelError::Format {
            line: 0,
            reason: "missing ROOT".into(),
        })?;
        let mut valuation = vec![BTreeSet::new(); worlds];
        for (w, name) in vals {
            valuation
                .get_mut(w)
                .ok_or(ModelError::OutOfRange(w))?
                .insert(name);
        }
        Self::new(worlds, relation, valuation, root)
    }
}

/// The line-oriented model format: `WORLDS n`, `REL i j` per pair of the
/// (transitively closed) relation, `VAL i name` per true atom, `ROOT i`.
impl fmt::Display for Countermodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WORLDS {}", self.worlds)?;
        for (i, j) in &self.relation {
            writeln!(f, "REL {i} {j}")?;
        }
        for (w, atoms) in self.valuation.iter().enumerate() {
            for a in atoms {
                writeln!(f, "VAL {w} {a}")?;
            }
        }
        writeln!(f, "ROOT {}", self.root)
    }
}
