//! Z-trees given by a word rule (rooted k-ary trees and free-group Cayley
//! trees), their eventually periodic ends, group actions on `X ∪ Ends(X)` and
//! dynamical diagnostics.
//!
//! Vertices are words; the parent of a nonempty word drops its last letter.
//! Free-group letters are stored as `2i` for the `i`-th generator and `2i+1`
//! for its inverse, displayed as lowercase and uppercase ASCII letters.

mod action;
mod dynamics;
mod point;

pub use action::{GroupWord, Generator, TreeAction};
pub use dynamics::{
    approximant, check_action_monotone, closedness_test, cylinder_dynamics, detect_proximal,
    extreme_proximality_witness, fragment_fixtures, fragment_scan, maps_complement_into, omega_limit_approx,
    random_point, random_triple_sequence, random_word, shadow_stabilization, AxisEmbedding, AxisFunction,
    ClosedPiece, ClosednessReport, CylinderPermutation, EpSearch, FragmentFixture, FragmentOutcome, Proximality,
    ProximalityCertificate, StabilizationReport, TripleSequence, MAX_CYLINDER_DEPTH,
};
pub use point::{between_ext, canonicalize_end, confluence, median_ext, Depth, ExtendedPoint};

use std::fmt;

use crate::error::{Error, Result};

pub type Word = Vec<u8>;

/// Shape of the rule tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleTree {
    /// Rooted tree where every vertex has `k` children labelled `0..k`.
    Kary(u8),
    /// Cayley tree of the free group of the given rank; words are reduced.
    Free(u8),
}

impl RuleTree {
    pub fn kary(k: u8) -> Result<Self> {
        if !(1..=10).contains(&k) {
            return Err(Error::InvalidStructure(format!("arity {k} outside 1..=10")));
        }
        Ok(RuleTree::Kary(k))
    }

    pub fn free(rank: u8) -> Result<Self> {
        if !(1..=26).contains(&rank) {
            return Err(Error::InvalidStructure(format!("rank {rank} outside 1..=26")));
        }
        Ok(RuleTree::Free(rank))
    }

    pub fn alphabet_size(self) -> u8 {
        match self {
            RuleTree::Kary(k) => k,
            RuleTree::Free(r) => 2 * r,
        }
    }

    pub fn is_free(self) -> bool {
        matches!(self, RuleTree::Free(_))
    }

    /// Letters that may follow `prev` in a word of this tree.
    pub fn successors(self, prev: Option<u8>) -> impl Iterator<Item = u8> {
        let free = self.is_free();
        (0..self.alphabet_size()).filter(move |&l| !(free && prev == Some(l ^ 1)))
    }

    pub fn inverse_letter(l: u8) -> u8 {
        l ^ 1
    }

    pub fn letter_char(self, l: u8) -> char {
        match self {
            RuleTree::Kary(_) => (b'0' + l) as char,
            RuleTree::Free(_) if l.is_multiple_of(2) => (b'a' + l / 2) as char,
            RuleTree::Free(_) => (b'A' + l / 2) as char,
        }
    }

    pub fn parse_letter(self, c: char) -> Option<u8> {
        let l = match (self, c) {
            (RuleTree::Kary(_), '0'..='9') => c as u8 - b'0',
            (RuleTree::Free(_), 'a'..='z') => 2 * (c as u8 - b'a'),
            (RuleTree::Free(_), 'A'..='Z') => 2 * (c as u8 - b'A') + 1,
            _ => return None,
        };
        (l < self.alphabet_size()).then_some(l)
    }

    /// Parse a word; the empty word may be written as `""` or `ε`.
    pub fn parse_word(self, s: &str) -> Result<Word> {
        if s == "ε" {
            return Ok(Word::new());
        }
        let w = s
            .chars()
            .map(|c| {
                self.parse_letter(c)
                    .ok_or_else(|| Error::InvalidWord(s.to_string(), format!("letter `{c}` not in alphabet")))
            })
            .collect::<Result<Word>>()?;
        self.check_word(&w)
            .map_err(|_| Error::InvalidWord(s.to_string(), "not reduced".into()))?;
        Ok(w)
    }

    pub fn format_word(self, w: &[u8]) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        w.iter().map(|&l| self.letter_char(l)).collect()
    }

    /// Letters in range and, for free groups, no adjacent inverse pair.
    pub fn check_word(self, w: &[u8]) -> Result<()> {
        if w.iter().any(|&l| l >= self.alphabet_size()) {
            return Err(Error::MixedTrees);
        }
        if self.is_free() && w.windows(2).any(|p| p[1] == p[0] ^ 1) {
            return Err(Error::InvalidWord(self.format_word(w), "not reduced".into()));
        }
        Ok(())
    }

    /// All words of length exactly `len`, in lexicographic letter order.
    pub fn words_of_length(self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    self.successors(w.last().copied()).map(move |l| {
                        let mut x = w.clone();
                        x.push(l);
                        x
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for RuleTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTree::Kary(k) => write!(f, "kary {k}"),
            RuleTree::Free(r) => {
                let gens: String = (0..*r).map(|i| (b'a' + i) as char).collect();
                write!(f, "free {gens}")
            }
        }
    }
}

/// Freely reduce a concatenation of free-group words.
pub fn reduce(letters: impl IntoIterator<Item = u8>) -> Word {
    let mut out = Word::new();
    for l in letters {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Inverse of a free-group word.
pub fn inverse_word(w: &[u8]) -> Word {
    w.iter().rev().map(|&l| l ^ 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_round_trip() {
        let f = RuleTree::free(2).unwrap();
        let w = f.parse_word("abAB").unwrap();
        assert_eq!(w, vec![0, 2, 1, 3]);
        assert_eq!(f.format_word(&w), "abAB");
        assert!(f.parse_word("aA").is_err());
        assert!(f.parse_word("c").is_err());
        assert_eq!(f.parse_word("ε").unwrap(), Word::new());
        let k = RuleTree::kary(2).unwrap();
        assert_eq!(k.parse_word("0110").unwrap(), vec![0, 1, 1, 0]);
        assert!(k.parse_word("2").is_err());
    }

    #[test]
    fn reduced_word_counts() {
        let f = RuleTree::free(2).unwrap();
        for len in 1..6 {
            assert_eq!(f.words_of_length(len).len(), 4 * 3usize.pow(len as u32 - 1));
        }
        assert_eq!(RuleTree::kary(3).unwrap().words_of_length(4).len(), 81);
    }

    #[test]
    fn free_reduction() {
        assert_eq!(reduce([0, 2, 3, 1, 2]), vec![2]);
        assert_eq!(reduce(inverse_word(&[0, 2]).into_iter().chain([0, 2])), Word::new());
    }
}
