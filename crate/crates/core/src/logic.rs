//! Propositional signatures, worlds, formulas, conditionals and the
//! three-valued verdict a world gives to a conditional.
//!
//! Worlds are kept fully explicit: a signature of `n` atoms spans a table of
//! `2^n` interpretations, and model sets are bit sets over that table. This
//! keeps every minimum and every comparison in the engine exact.

use std::fmt;

use thiserror::Error;

/// Default cap on the signature size so the explicit world table stays small.
pub const DEFAULT_ATOM_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("signature must contain at least one atom")]
    Empty,
    #[error("duplicate atom `{0}` in signature")]
    DuplicateAtom(String),
    #[error("signature has {len} atoms, limit is {limit}")]
    TooLarge { len: usize, limit: usize },
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
}

/// An ordered, duplicate-free list of atom names.
///
/// Declaration order is the single source of truth: it fixes the bit layout
/// of worlds, the canonical row order of every printed table, and the order
/// in which literals appear when a world is rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    atoms: Vec<String>,
}

fn valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    // Reserved words of the formula grammar.
    name != "top" && name != "bot"
}

impl Signature {
    pub fn new<I, S>(atoms: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_limit(atoms, DEFAULT_ATOM_LIMIT)
    }

    pub fn with_limit<I, S>(atoms: I, limit: usize) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(SignatureError::Empty);
        }
        if atoms.len() > limit {
            return Err(SignatureError::TooLarge { len: atoms.len(), limit });
        }
        for (i, name) in atoms.iter().enumerate() {
            if !valid_atom_name(name) {
                return Err(SignatureError::InvalidAtom(name.clone()));
            }
            if atoms[..i].contains(name) {
                return Err(SignatureError::DuplicateAtom(name.clone()));
            }
        }
        Ok(Signature { atoms })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_name(&self, index: usize) -> &str {
        &self.atoms[index]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn world_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    /// All worlds in canonical order: the first atom varies slowest and
    /// `true` sorts before `false`, so the all-true world comes first.
    pub fn worlds(&self) -> impl Iterator<Item = World> + '_ {
        let width = self.atom_count();
        (0..self.world_count()).map(move |code| World::from_code(code, width))
    }

    /// Builds the world assigning `values[i]` to atom `i`.
    pub fn world_from_values(&self, values: &[bool]) -> World {
        assert_eq!(values.len(), self.atom_count(), "value vector width mismatch");
        let width = self.atom_count();
        let mut code = 0usize;
        for (i, &v) in values.iter().enumerate() {
            if !v {
                code |= 1 << (width - 1 - i);
            }
        }
        World::from_code(code, width)
    }

    /// Renders a world as space-separated literals, e.g. `b f !p`.
    pub fn format_world(&self, world: World) -> String {
        let mut out = String::new();
        for i in 0..self.atom_count() {
            if i > 0 {
                out.push(' ');
            }
            if !world.truth(i) {
                out.push('!');
            }
            out.push_str(&self.atoms[i]);
        }
        out
    }
}

/// A propositional interpretation, identified by its canonical code.
///
/// Code 0 is the all-true world; incrementing the code flips truth values in
/// truth-table order (first atom most significant, `true` before `false`).
/// The derived `Ord` is exactly the canonical enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World {
    code: u16,
    width: u8,
}

impl World {
    pub fn from_code(code: usize, width: usize) -> World {
        debug_assert!(width <= 16 && code < (1 << width));
        World { code: code as u16, width: width as u8 }
    }

    pub fn code(&self) -> usize {
        self.code as usize
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Truth value of atom `atom_index` in this world.
    pub fn truth(&self, atom_index: usize) -> bool {
        debug_assert!(atom_index < self.width as usize);
        let bit = self.width as usize - 1 - atom_index;
        (self.code >> bit) & 1 == 0
    }
}

/// A set of worlds over one signature, stored as a bit set indexed by
/// canonical world codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldSet {
    width: u8,
    blocks: Vec<u64>,
}

impl WorldSet {
    pub fn empty(sig: &Signature) -> WorldSet {
        let universe = sig.world_count();
        WorldSet {
            width: sig.atom_count() as u8,
            blocks: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(sig: &Signature) -> WorldSet {
        let mut set = WorldSet::empty(sig);
        let universe = set.universe();
        for (i, block) in set.blocks.iter_mut().enumerate() {
            let remaining = universe - i * 64;
            *block = if remaining >= 64 { u64::MAX } else { (1u64 << remaining) - 1 };
        }
        set
    }

    pub fn universe(&self) -> usize {
        1usize << self.width
    }

    pub fn insert(&mut self, world: World) {
        debug_assert_eq!(world.width, self.width);
        let code = world.code();
        self.blocks[code / 64] |= 1 << (code % 64);
    }

    pub fn contains(&self, world: World) -> bool {
        let code = world.code();
        (self.blocks[code / 64] >> (code % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> WorldSet {
        let universe = self.universe();
        let mut out = self.clone();
        for (i, block) in out.blocks.iter_mut().enumerate() {
            let remaining = universe - i * 64;
            let mask = if remaining >= 64 { u64::MAX } else { (1u64 << remaining) - 1 };
            *block = !*block & mask;
        }
        out
    }

    fn zip_with(&self, other: &WorldSet, f: impl Fn(u64, u64) -> u64) -> WorldSet {
        debug_assert_eq!(self.width, other.width);
        WorldSet {
            width: self.width,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Member worlds in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = World> + '_ {
        let width = self.width as usize;
        (0..self.universe())
            .filter(move |&code| (self.blocks[code / 64] >> (code % 64)) & 1 == 1)
            .map(move |code| World::from_code(code, width))
    }
}

/// Propositional formula AST.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Classical truth value of the formula in `world`.
    ///
    /// Panics if the formula mentions an atom outside the signature; parsers
    /// reject such formulas, so this only trips on malformed hand-built ASTs.
    pub fn eval(&self, world: World, sig: &Signature) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(name) => {
                let idx = sig
                    .atom_index(name)
                    .unwrap_or_else(|| panic!("atom `{name}` not in signature"));
                world.truth(idx)
            }
            Formula::Not(f) => !f.eval(world, sig),
            Formula::And(a, b) => a.eval(world, sig) && b.eval(world, sig),
            Formula::Or(a, b) => a.eval(world, sig) || b.eval(world, sig),
            Formula::Implies(a, b) => !a.eval(world, sig) || b.eval(world, sig),
        }
    }

    /// The model set `{ ω | eval(self, ω) }` in canonical order.
    pub fn models(&self, sig: &Signature) -> WorldSet {
        let mut set = WorldSet::empty(sig);
        for world in sig.worlds() {
            if self.eval(world, sig) {
                set.insert(world);
            }
        }
        set
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            Formula::Top | Formula::Bot | Formula::Atom(_) => 5,
        }
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Top => write!(f, "top")?,
            Formula::Bot => write!(f, "bot")?,
            Formula::Atom(name) => write!(f, "{name}")?,
            Formula::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_with(f, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_with(f, 3)?;
                write!(f, " & ")?;
                b.fmt_with(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.fmt_with(f, 2)?;
                write!(f, " | ")?;
                b.fmt_with(f, 2)?;
            }
            Formula::Implies(a, b) => {
                // Right-associative: the left operand needs parens when it is
                // itself an implication.
                a.fmt_with(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_with(f, 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, 0)
    }
}

/// A conditional `(B | A)`: "if A then usually B".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conditional {
    pub consequent: Formula,
    pub antecedent: Formula,
}

/// Verdict of a single world on a conditional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// ω ⊨ A ∧ B
    Verifies,
    /// ω ⊨ A ∧ ¬B
    Falsifies,
    /// ω ⊭ A
    NotApplicable,
}

impl Verdict {
    pub fn symbol(&self) -> &'static str {
        match self {
            Verdict::Verifies => "v",
            Verdict::Falsifies => "f",
            Verdict::NotApplicable => "-",
        }
    }
}

impl Conditional {
    pub fn new(consequent: Formula, antecedent: Formula) -> Conditional {
        Conditional { consequent, antecedent }
    }

    /// Embeds a propositional formula as the conditional `(A | top)`.
    pub fn propositional(formula: Formula) -> Conditional {
        Conditional { consequent: formula, antecedent: Formula::Top }
    }

    pub fn verdict(&self, world: World, sig: &Signature) -> Verdict {
        if !self.antecedent.eval(world, sig) {
            Verdict::NotApplicable
        } else if self.consequent.eval(world, sig) {
            Verdict::Verifies
        } else {
            Verdict::Falsifies
        }
    }

    /// Worlds verifying the conditional: models of A ∧ B.
    pub fn verifying_set(&self, sig: &Signature) -> WorldSet {
        let mut set = WorldSet::empty(sig);
        for world in sig.worlds() {
            if self.verdict(world, sig) == Verdict::Verifies {
                set.insert(world);
            }
        }
        set
    }

    /// Worlds falsifying the conditional: models of A ∧ ¬B.
    pub fn falsifying_set(&self, sig: &Signature) -> WorldSet {
        let mut set = WorldSet::empty(sig);
        for world in sig.worlds() {
            if self.verdict(world, sig) == Verdict::Falsifies {
                set.insert(world);
            }
        }
        set
    }

    /// Semantic identity of a conditional: the pair of its verifying and
    /// falsifying world sets. Syntactically different but equivalent
    /// conditionals share a key.
    pub fn semantic_key(&self, sig: &Signature) -> (WorldSet, WorldSet) {
        (self.verifying_set(sig), self.falsifying_set(sig))
    }
}

impl fmt::Display for Conditional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.consequent, self.antecedent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_bfp() -> Signature {
        Signature::new(["b", "f", "p"]).unwrap()
    }

    #[test]
    fn signature_rejects_bad_input() {
        assert_eq!(Signature::new(Vec::<String>::new()).unwrap_err(), SignatureError::Empty);
        assert_eq!(
            Signature::new(["a", "a"]).unwrap_err(),
            SignatureError::DuplicateAtom("a".into())
        );
        assert!(matches!(
            Signature::with_limit(["a", "b", "c"], 2).unwrap_err(),
            SignatureError::TooLarge { len: 3, limit: 2 }
        ));
        assert_eq!(
            Signature::new(["top"]).unwrap_err(),
            SignatureError::InvalidAtom("top".into())
        );
        assert_eq!(
            Signature::new(["1a"]).unwrap_err(),
            SignatureError::InvalidAtom("1a".into())
        );
    }

    #[test]
    fn canonical_order_matches_truth_table_convention() {
        let sig = sig_bfp();
        let rendered: Vec<String> = sig.worlds().map(|w| sig.format_world(w)).collect();
        assert_eq!(
            rendered,
            vec![
                "b f p", "b f !p", "b !f p", "b !f !p", "!b f p", "!b f !p", "!b !f p",
                "!b !f !p",
            ]
        );
    }

    #[test]
    fn world_from_values_round_trips() {
        let sig = sig_bfp();
        for world in sig.worlds() {
            let values: Vec<bool> = (0..3).map(|i| world.truth(i)).collect();
            assert_eq!(sig.world_from_values(&values), world);
        }
    }

    #[test]
    fn eval_on_basic_connectives() {
        let sig = sig_bfp();
        let w = sig.world_from_values(&[true, true, false]); // b f !p
        assert!(Formula::and(Formula::atom("b"), Formula::atom("f")).eval(w, &sig));
        assert!(Formula::Top.eval(w, &sig));
        let w2 = sig.world_from_values(&[true, false, true]); // b !f p
        assert!(!Formula::implies(Formula::atom("b"), Formula::atom("f")).eval(w2, &sig));
    }

    #[test]
    fn models_of_constants_and_complete_conjunction() {
        let sig = sig_bfp();
        assert!(Formula::Bot.models(&sig).is_empty());
        let taut = Formula::or(Formula::atom("b"), Formula::not(Formula::atom("b")));
        assert_eq!(taut.models(&sig).len(), 8);
        let conj = Formula::and(
            Formula::and(Formula::atom("b"), Formula::atom("f")),
            Formula::not(Formula::atom("p")),
        );
        let models = conj.models(&sig);
        assert_eq!(models.len(), 1);
        assert_eq!(sig.format_world(models.iter().next().unwrap()), "b f !p");
    }

    #[test]
    fn verdicts_match_penguin_table_column() {
        let sig = sig_bfp();
        let not_f_if_p = Conditional::new(Formula::not(Formula::atom("f")), Formula::atom("p"));
        let w_bfp = sig.world_from_values(&[true, true, true]);
        let w_b_notf_p = sig.world_from_values(&[true, false, true]);
        let w_bf_notp = sig.world_from_values(&[true, true, false]);
        assert_eq!(not_f_if_p.verdict(w_bfp, &sig), Verdict::Falsifies);
        assert_eq!(not_f_if_p.verdict(w_b_notf_p, &sig), Verdict::Verifies);
        assert_eq!(not_f_if_p.verdict(w_bf_notp, &sig), Verdict::NotApplicable);
    }

    #[test]
    fn world_set_algebra() {
        let sig = sig_bfp();
        let b = Formula::atom("b").models(&sig);
        let f = Formula::atom("f").models(&sig);
        assert_eq!(b.intersection(&f).len(), 2);
        assert_eq!(b.union(&f).len(), 6);
        assert_eq!(b.complement().len(), 4);
        assert!(b.intersection(&f).is_subset(&b));
        assert_eq!(WorldSet::full(&sig).len(), 8);
        assert_eq!(WorldSet::full(&sig).complement().len(), 0);
    }

    #[test]
    fn display_uses_minimal_parens() {
        let f = Formula::implies(
            Formula::not(Formula::or(Formula::atom("b"), Formula::atom("f"))),
            Formula::atom("p"),
        );
        assert_eq!(f.to_string(), "!(b | f) -> p");
        let g = Formula::and(
            Formula::or(Formula::atom("a"), Formula::atom("b")),
            Formula::atom("c"),
        );
        assert_eq!(g.to_string(), "(a | b) & c");
    }
}
