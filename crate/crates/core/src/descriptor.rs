//! Belief descriptors: success conditions for a change, expressed over
//! conditionals.
//!
//! An atomic descriptor `B(B|A)` states that the conditional (B|A) is
//! accepted; molecular descriptors combine atoms with negation, conjunction
//! and disjunction; a descriptor is a set of molecular descriptors read as a
//! conjunction. Propositional atoms `B(A)` are stored desugared as
//! `B(A | top)`.

use std::collections::HashSet;
use std::fmt;

use crate::logic::{Conditional, Formula, Signature, WorldSet};
use crate::ranking::Ocf;

/// `B(B|A)`: the conditional (B|A) is accepted in the belief state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicDescriptor {
    pub cond: Conditional,
}

impl AtomicDescriptor {
    pub fn new(cond: Conditional) -> AtomicDescriptor {
        AtomicDescriptor { cond }
    }

    pub fn propositional(formula: Formula) -> AtomicDescriptor {
        AtomicDescriptor { cond: Conditional::propositional(formula) }
    }
}

/// Molecular descriptor tree over atomic descriptors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MolecularDescriptor {
    Atom(AtomicDescriptor),
    Neg(Box<MolecularDescriptor>),
    And(Box<MolecularDescriptor>, Box<MolecularDescriptor>),
    Or(Box<MolecularDescriptor>, Box<MolecularDescriptor>),
}

/// Sign of a literal descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// View of a molecular descriptor of shape `B(...)` or `!B(...)`.
#[derive(Debug, Clone, Copy)]
pub struct LiteralDescriptor<'a> {
    pub polarity: Polarity,
    pub atom: &'a AtomicDescriptor,
}

impl MolecularDescriptor {
    pub fn atom(a: AtomicDescriptor) -> MolecularDescriptor {
        MolecularDescriptor::Atom(a)
    }

    pub fn neg(m: MolecularDescriptor) -> MolecularDescriptor {
        MolecularDescriptor::Neg(Box::new(m))
    }

    pub fn and(a: MolecularDescriptor, b: MolecularDescriptor) -> MolecularDescriptor {
        MolecularDescriptor::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: MolecularDescriptor, b: MolecularDescriptor) -> MolecularDescriptor {
        MolecularDescriptor::Or(Box::new(a), Box::new(b))
    }

    /// Truth-functional evaluation against the conditional beliefs of `state`.
    pub fn holds(&self, state: &Ocf) -> bool {
        match self {
            MolecularDescriptor::Atom(a) => state.accepts_conditional_belief(&a.cond),
            MolecularDescriptor::Neg(m) => !m.holds(state),
            MolecularDescriptor::And(a, b) => a.holds(state) && b.holds(state),
            MolecularDescriptor::Or(a, b) => a.holds(state) || b.holds(state),
        }
    }

    pub fn as_literal(&self) -> Option<LiteralDescriptor<'_>> {
        match self {
            MolecularDescriptor::Atom(a) => {
                Some(LiteralDescriptor { polarity: Polarity::Positive, atom: a })
            }
            MolecularDescriptor::Neg(inner) => match inner.as_ref() {
                MolecularDescriptor::Atom(a) => {
                    Some(LiteralDescriptor { polarity: Polarity::Negative, atom: a })
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn collect_conditionals<'a>(&'a self, out: &mut Vec<&'a Conditional>) {
        match self {
            MolecularDescriptor::Atom(a) => out.push(&a.cond),
            MolecularDescriptor::Neg(m) => m.collect_conditionals(out),
            MolecularDescriptor::And(a, b) | MolecularDescriptor::Or(a, b) => {
                a.collect_conditionals(out);
                b.collect_conditionals(out);
            }
        }
    }

    fn semantic_key(&self, sig: &Signature) -> MolKey {
        match self {
            MolecularDescriptor::Atom(a) => MolKey::Atom(a.cond.semantic_key(sig)),
            MolecularDescriptor::Neg(m) => MolKey::Neg(Box::new(m.semantic_key(sig))),
            MolecularDescriptor::And(a, b) => {
                MolKey::And(Box::new(a.semantic_key(sig)), Box::new(b.semantic_key(sig)))
            }
            MolecularDescriptor::Or(a, b) => {
                MolKey::Or(Box::new(a.semantic_key(sig)), Box::new(b.semantic_key(sig)))
            }
        }
    }
}

#[derive(PartialEq, Eq, Hash)]
enum MolKey {
    Atom((WorldSet, WorldSet)),
    Neg(Box<MolKey>),
    And(Box<MolKey>, Box<MolKey>),
    Or(Box<MolKey>, Box<MolKey>),
}

impl fmt::Display for MolecularDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MolecularDescriptor::Atom(a) => {
                if a.cond.antecedent == Formula::Top {
                    write!(f, "B({})", a.cond.consequent)
                } else {
                    write!(f, "B({} | {})", a.cond.consequent, a.cond.antecedent)
                }
            }
            MolecularDescriptor::Neg(m) => match m.as_ref() {
                MolecularDescriptor::Atom(_) | MolecularDescriptor::Neg(_) => write!(f, "!{m}"),
                _ => write!(f, "!({m})"),
            },
            MolecularDescriptor::And(a, b) => {
                for (i, side) in [a, b].into_iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    match side.as_ref() {
                        MolecularDescriptor::Or(..) => write!(f, "({side})")?,
                        _ => write!(f, "{side}")?,
                    }
                }
                Ok(())
            }
            MolecularDescriptor::Or(a, b) => write!(f, "{a} | {b}"),
        }
    }
}

/// A composite descriptor: an ordered set of molecular descriptors, read as
/// their conjunction. Order is first occurrence; duplicates (by semantic
/// identity of the underlying conditionals) are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Descriptor {
    elements: Vec<MolecularDescriptor>,
}

impl Descriptor {
    pub fn empty() -> Descriptor {
        Descriptor { elements: Vec::new() }
    }

    pub fn new<I>(elements: I, sig: &Signature) -> Descriptor
    where
        I: IntoIterator<Item = MolecularDescriptor>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for element in elements {
            if seen.insert(element.semantic_key(sig)) {
                out.push(element);
            }
        }
        Descriptor { elements: out }
    }

    pub fn elements(&self) -> &[MolecularDescriptor] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The descriptor holds iff every element holds. The empty descriptor
    /// holds everywhere.
    pub fn holds(&self, state: &Ocf) -> bool {
        self.elements.iter().all(|m| m.holds(state))
    }

    /// An elementary descriptor is a set of literal descriptors.
    pub fn is_elementary(&self) -> bool {
        self.elements.iter().all(|m| m.as_literal().is_some())
    }

    /// All conditionals occurring in the descriptor, in first-occurrence
    /// order, deduplicated by semantic identity.
    pub fn conditionals(&self, sig: &Signature) -> Vec<Conditional> {
        let mut refs = Vec::new();
        for element in &self.elements {
            element.collect_conditionals(&mut refs);
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for cond in refs {
            if seen.insert(cond.semantic_key(sig)) {
                out.push(cond.clone());
            }
        }
        out
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, element) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{element}")?;
        }
        Ok(())
    }
}
