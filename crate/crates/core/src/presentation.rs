//! Finitely presented groups as generator names plus relator words.

use std::fmt;

use serde::Serialize;

use crate::lattice::{smith_normal_form, AbelianGroup};
use crate::scalar::ExactInt;

/// A syllable `g^e` of a word: generator index and nonzero exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable<I> {
    pub generator: usize,
    pub exponent: I,
}

/// A relator word; the empty word is the identity.
pub type Word<I> = Vec<Syllable<I>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("relator {relator} references undeclared generator {generator}")]
pub struct UndeclaredGenerator {
    pub relator: usize,
    pub generator: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation<I> {
    generators: Vec<String>,
    relators: Vec<Word<I>>,
}

impl<I: ExactInt> GroupPresentation<I> {
    pub fn new(generators: Vec<String>, relators: Vec<Word<I>>) -> Result<Self, UndeclaredGenerator> {
        for (r, w) in relators.iter().enumerate() {
            if let Some(s) = w.iter().find(|s| s.generator >= generators.len()) {
                return Err(UndeclaredGenerator {
                    relator: r,
                    generator: s.generator,
                });
            }
        }
        Ok(Self {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word<I>] {
        &self.relators
    }

    /// Exponent-sum matrix: one row per relator, one column per generator.
    pub fn relation_matrix(&self) -> Vec<Vec<I>> {
        self.relators
            .iter()
            .map(|w| {
                let mut row = vec![I::zero(); self.generators.len()];
                for s in w {
                    row[s.generator] = row[s.generator].clone() + s.exponent.clone();
                }
                row
            })
            .collect()
    }

    pub fn abelianize(&self) -> AbelianGroup<I> {
        smith_normal_form(&self.relation_matrix(), self.generators.len()).cokernel()
    }

    /// Renders a relator as `"q1^2 h^1"`; the empty word renders as `"1"`.
    pub fn render_word(&self, w: &Word<I>) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|s| format!("{}^{}", self.generators[s.generator], s.exponent))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn rendered_relators(&self) -> Vec<String> {
        self.relators.iter().map(|w| self.render_word(w)).collect()
    }
}

impl<I: ExactInt> fmt::Display for GroupPresentation<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{} | {}>",
            self.generators.join(", "),
            self.rendered_relators().join(", ")
        )
    }
}

#[derive(Serialize)]
struct PresentationRepr {
    generators: Vec<String>,
    relators: Vec<String>,
}

impl<I: ExactInt> Serialize for GroupPresentation<I> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PresentationRepr {
            generators: self.generators.clone(),
            relators: self.rendered_relators(),
        }
        .serialize(s)
    }
}

/// Shorthand for a syllable with a machine-integer exponent.
pub fn syl<I: ExactInt>(generator: usize, exponent: I) -> Syllable<I> {
    Syllable {
        generator,
        exponent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_undeclared_generators() {
        let e = GroupPresentation::<i64>::new(vec!["a".into()], vec![vec![syl(1, 1)]]);
        assert_eq!(
            e,
            Err(UndeclaredGenerator {
                relator: 0,
                generator: 1
            })
        );
    }

    #[test]
    fn renders_and_abelianizes() {
        let g = GroupPresentation::<i64>::new(
            vec!["a".into(), "b".into()],
            vec![vec![syl(0, 1), syl(1, 1), syl(0, -1), syl(1, -1)], vec![syl(0, 3)], vec![]],
        )
        .unwrap();
        assert_eq!(g.rendered_relators(), vec!["a^1 b^1 a^-1 b^-1", "a^3", "1"]);
        let ab = g.abelianize();
        assert_eq!(ab.free_rank, 1);
        assert_eq!(ab.torsion, vec![3]);
    }
}
