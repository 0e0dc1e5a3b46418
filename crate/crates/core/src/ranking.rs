//! Ordinal conditional functions (ranking functions) and the queries the
//! rest of the engine builds on: rank lifting to formulas, conditional
//! acceptance, and propositional belief.

use std::fmt;

use thiserror::Error;

use crate::logic::{Conditional, Formula, Signature, Verdict, World, WorldSet};

/// Degree of disbelief of a formula: a natural number, or infinity for
/// unsatisfiable formulas. World ranks themselves are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(u64),
    Infinity,
}

impl Rank {
    pub fn is_finite(&self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self {
            Rank::Finite(n) => Some(*n),
            Rank::Infinity => None,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OcfError {
    #[error("ranking table has {got} entries, signature requires {expected}")]
    WrongTableSize { expected: usize, got: usize },
    #[error("no world has rank 0")]
    NoMinimalWorld,
}

/// An ordinal conditional function: a total map from worlds to finite ranks
/// with at least one rank-0 world. Lower rank means more plausible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ocf {
    sig: Signature,
    ranks: Vec<u64>,
}

impl Ocf {
    /// Builds an OCF from a rank table indexed by canonical world code.
    pub fn new(sig: Signature, ranks: Vec<u64>) -> Result<Ocf, OcfError> {
        if ranks.len() != sig.world_count() {
            return Err(OcfError::WrongTableSize { expected: sig.world_count(), got: ranks.len() });
        }
        if !ranks.contains(&0) {
            return Err(OcfError::NoMinimalWorld);
        }
        Ok(Ocf { sig, ranks })
    }

    pub fn uniform_zero(sig: Signature) -> Ocf {
        let ranks = vec![0; sig.world_count()];
        Ocf { sig, ranks }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Rank table in canonical world order.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn rank_of_world(&self, world: World) -> u64 {
        self.ranks[world.code()]
    }

    pub fn max_rank(&self) -> u64 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// κ(A) = min { κ(ω) | ω ⊨ A }, infinity when A has no models.
    pub fn rank_of(&self, formula: &Formula) -> Rank {
        let mut best: Option<u64> = None;
        for world in self.sig.worlds() {
            if formula.eval(world, &self.sig) {
                let r = self.ranks[world.code()];
                best = Some(best.map_or(r, |b| b.min(r)));
            }
        }
        best.map_or(Rank::Infinity, Rank::Finite)
    }

    /// κ ⊨ (B|A) iff κ(A ∧ B) < κ(A ∧ ¬B).
    ///
    /// A conditional whose verification is unsatisfiable is never accepted;
    /// one with satisfiable verification and unsatisfiable falsification is
    /// always accepted.
    pub fn accepts(&self, conditional: &Conditional) -> bool {
        let mut min_verify: Option<u64> = None;
        let mut min_falsify: Option<u64> = None;
        for world in self.sig.worlds() {
            let r = self.ranks[world.code()];
            match conditional.verdict(world, &self.sig) {
                Verdict::Verifies => min_verify = Some(min_verify.map_or(r, |b| b.min(r))),
                Verdict::Falsifies => min_falsify = Some(min_falsify.map_or(r, |b| b.min(r))),
                Verdict::NotApplicable => {}
            }
        }
        let verify = min_verify.map_or(Rank::Infinity, Rank::Finite);
        let falsify = min_falsify.map_or(Rank::Infinity, Rank::Finite);
        verify < falsify
    }

    /// Membership query for the conditional belief set Bel_C(κ).
    pub fn accepts_conditional_belief(&self, conditional: &Conditional) -> bool {
        self.accepts(conditional)
    }

    /// Mod(κ): the non-empty set of rank-0 worlds.
    pub fn belief_models(&self) -> WorldSet {
        let mut set = WorldSet::empty(&self.sig);
        for world in self.sig.worlds() {
            if self.ranks[world.code()] == 0 {
                set.insert(world);
            }
        }
        set
    }

    /// A ∈ Bel(κ) iff A holds in every rank-0 world.
    pub fn believes(&self, formula: &Formula) -> bool {
        self.belief_models().is_subset(&formula.models(&self.sig))
    }

    /// The printable surrogate for Bel(κ): the disjunction of the complete
    /// conjunctions of the rank-0 worlds.
    pub fn belief_formula(&self) -> Formula {
        let mut disjunction: Option<Formula> = None;
        for world in self.belief_models().iter() {
            let mut conj: Option<Formula> = None;
            for i in 0..self.sig.atom_count() {
                let lit = if world.truth(i) {
                    Formula::atom(self.sig.atom_name(i))
                } else {
                    Formula::not(Formula::atom(self.sig.atom_name(i)))
                };
                conj = Some(match conj {
                    None => lit,
                    Some(c) => Formula::and(c, lit),
                });
            }
            let conj = conj.expect("signature is non-empty");
            disjunction = Some(match disjunction {
                None => conj,
                Some(d) => Formula::or(d, conj),
            });
        }
        disjunction.expect("an OCF has at least one rank-0 world")
    }
}
