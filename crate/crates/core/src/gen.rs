//! Sentence and ordinal generators: exhaustive by size, and seeded random.

use rand::Rng;

use crate::ordinal::Ordinal;
use crate::sentence::Sentence;

/// All sentences over a fixed set of leaves and the connectives
/// `~ Con & | ->`, organised by node count.
#[derive(Debug, Clone)]
pub struct SentenceSpace {
    levels: Vec<Vec<Sentence>>,
}

impl SentenceSpace {
    pub fn new(leaves: Vec<Sentence>) -> Self {
        SentenceSpace {
            levels: vec![Vec::new(), leaves],
        }
    }

    /// Leaves `T`, `F`.
    pub fn letterless() -> Self {
        Self::new(vec![Sentence::Top, Sentence::Bot])
    }

    /// Leaves `T`, `F` and the given atoms.
    pub fn with_atoms(atoms: &[&str]) -> Self {
        let mut leaves = vec![Sentence::Top, Sentence::Bot];
        leaves.extend(atoms.iter().map(|a| Sentence::atom(a)));
        Self::new(leaves)
    }

    /// Sentences with exactly `n` nodes, in construction order.
    pub fn level(&mut self, n: usize) -> &[Sentence] {
        while self.levels.len() <= n {
            let k = self.levels.len();
            let mut next = Vec::new();
            self.extend_level(k, &mut |s| next.push(s));
            self.levels.push(next);
        }
        &self.levels[n]
    }

    /// Visits every sentence with exactly `n` nodes without storing level `n`.
    pub fn for_each_of_size(&mut self, n: usize, f: &mut dyn FnMut(Sentence)) {
        if n < self.levels.len() {
            for s in &self.levels[n] {
                f(s.clone());
            }
            return;
        }
        if n >= 2 {
            self.level(n - 1);
        }
        self.extend_level(n, f);
    }

    /// Visits every sentence with at most `n` nodes, smaller first.
    pub fn for_each_up_to(&mut self, n: usize, f: &mut dyn FnMut(Sentence)) {
        for k in 1..=n {
            self.for_each_of_size(k, f);
        }
    }

    fn extend_level(&self, n: usize, f: &mut dyn FnMut(Sentence)) {
        if n < 2 {
            return;
        }
        for s in &self.levels[n - 1] {
            f(Sentence::not(s.clone()));
            f(Sentence::con(s.clone()));
        }
        for left in 1..n - 1 {
            let right = n - 1 - left;
            for a in &self.levels[left] {
                for b in &self.levels[right] {
                    f(Sentence::and(a.clone(), b.clone()));
                    f(Sentence::or(a.clone(), b.clone()));
                    f(Sentence::imp(a.clone(), b.clone()));
                }
            }
        }
    }
}

/// A uniformly shaped random sentence with exactly `size` nodes.
pub fn random_sentence<R: Rng>(rng: &mut R, size: usize, atoms: &[&str]) -> Sentence {
    let size = size.max(1);
    if size == 1 {
        let pick = rng.gen_range(0..atoms.len() + 2);
        return match pick {
            0 => Sentence::Top,
            1 => Sentence::Bot,
            i => Sentence::atom(atoms[i - 2]),
        };
    }
    if size == 2 || rng.gen_bool(0.4) {
        let inner = random_sentence(rng, size - 1, atoms);
        return if rng.gen_bool(0.5) {
            Sentence::not(inner)
        } else {
            Sentence::con(inner)
        };
    }
    let left = rng.gen_range(1..size - 1);
    let a = random_sentence(rng, left, atoms);
    let b = random_sentence(rng, size - 1 - left, atoms);
    match rng.gen_range(0..3) {
        0 => Sentence::and(a, b),
        1 => Sentence::or(a, b),
        _ => Sentence::imp(a, b),
    }
}

/// A random ordinal below `w^^(height+1)` (so height 2 stays below
/// `w^(w^w)`), with at most `max_terms` terms per level.
pub fn random_ordinal<R: Rng>(rng: &mut R, height: u32, max_terms: usize) -> Ordinal {
    if height == 0 {
        return Ordinal::finite(rng.gen_range(0..6));
    }
    let count = rng.gen_range(0..=max_terms);
    let mut terms: Vec<(Ordinal, u64)> = (0..count)
        .map(|_| {
            let e = random_ordinal(rng, height - 1, max_terms);
            (e, rng.gen_range(1..4))
        })
        .collect();
    terms.sort_by(|a, b| b.0.cmp(&a.0));
    let mut merged: Vec<(Ordinal, u64)> = Vec::new();
    for (e, c) in terms {
        match merged.last_mut() {
            Some(last) if last.0 == e => last.1 += c,
            _ => merged.push((e, c)),
        }
    }
    Ordinal::from_terms(merged).expect("terms sorted and merged")
}
