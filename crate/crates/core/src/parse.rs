//! Text surface for formulas, conditionals and descriptors.
//!
//! Formula grammar: identifiers are atoms, `top`/`bot` the constants, with
//! `!` > `&` > `|` > `->` precedence (`->` right-associative). A conditional
//! is written `(B | A)`; inside the parentheses of a conditional position
//! exactly one top-level `|` acts as the separator, so disjunctions inside
//! either side need their own parentheses, and more than one top-level bar
//! is rejected. Descriptors are comma-separated molecular descriptors built
//! from `B(...)` / `!B(...)` atoms with `!`, `&`, `|` at descriptor level;
//! `B(A)` without a separator bar is propositional sugar for `B(A | top)`.

use thiserror::Error;

use crate::descriptor::{AtomicDescriptor, Descriptor, MolecularDescriptor};
use crate::logic::{Conditional, Formula, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("parse error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown atom `{name}` at position {pos}")]
    UnknownAtom { pos: usize, name: String },
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Bar,
    Arrow,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '!' => {
                out.push(Token { tok: Tok::Bang, pos: i });
                i += 1;
            }
            '&' => {
                out.push(Token { tok: Tok::Amp, pos: i });
                i += 1;
            }
            '|' => {
                out.push(Token { tok: Tok::Bar, pos: i });
                i += 1;
            }
            '(' => {
                out.push(Token { tok: Tok::LParen, pos: i });
                i += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::RParen, pos: i });
                i += 1;
            }
            ',' => {
                out.push(Token { tok: Tok::Comma, pos: i });
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push(Token { tok: Tok::Arrow, pos: i });
                    i += 2;
                } else {
                    return Err(syntax(i, "expected `->`"));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(text[start..i].to_string()), pos: start });
            }
            other => return Err(syntax(i, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    sig: &'a Signature,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], sig: &'a Signature, end: usize) -> Parser<'a> {
        Parser { toks, pos: 0, sig, end }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t.tok == tok => Ok(t.pos),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == Some(&Tok::Bang) {
            self.bump();
            Ok(Formula::not(self.unary()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.here();
        match self.bump().cloned() {
            Some(Token { tok: Tok::LParen, .. }) => {
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token { tok: Tok::Ident(name), pos }) => match name.as_str() {
                "top" => Ok(Formula::Top),
                "bot" => Ok(Formula::Bot),
                _ => {
                    if self.sig.atom_index(&name).is_none() {
                        return Err(ParseError::UnknownAtom { pos, name });
                    }
                    Ok(Formula::Atom(name))
                }
            },
            _ => Err(syntax(pos, "expected a formula")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

fn parse_formula_tokens(
    toks: &[Token],
    sig: &Signature,
    end: usize,
) -> Result<Formula, ParseError> {
    let mut p = Parser::new(toks, sig, end);
    let f = p.formula()?;
    if !p.at_end() {
        return Err(syntax(p.here(), "unexpected trailing input in formula"));
    }
    Ok(f)
}

/// Positions of depth-0 `|` tokens within a token slice.
fn top_level_bars(toks: &[Token]) -> Vec<usize> {
    let mut depth = 0usize;
    let mut bars = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth = depth.saturating_sub(1),
            Tok::Bar if depth == 0 => bars.push(i),
            _ => {}
        }
    }
    bars
}

/// Parses the interior of a conditional position: one top-level bar splits
/// consequent from antecedent; no bar reads the whole slice as a
/// propositional formula embedded as `(A | top)`.
fn parse_conditional_interior(
    toks: &[Token],
    sig: &Signature,
    start: usize,
    end: usize,
) -> Result<Conditional, ParseError> {
    if toks.is_empty() {
        return Err(syntax(start, "empty conditional"));
    }
    let bars = top_level_bars(toks);
    match bars.len() {
        0 => {
            let formula = parse_formula_tokens(toks, sig, end)?;
            Ok(Conditional::propositional(formula))
        }
        1 => {
            let split = bars[0];
            let consequent = parse_formula_tokens(&toks[..split], sig, toks[split].pos)?;
            let antecedent = parse_formula_tokens(&toks[split + 1..], sig, end)?;
            Ok(Conditional::new(consequent, antecedent))
        }
        _ => Err(syntax(
            toks[bars[1]].pos,
            "more than one top-level `|` in conditional position",
        )),
    }
}

/// Parses a propositional formula. All atoms must be declared in `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    parse_formula_tokens(&toks, sig, text.len())
}

/// Parses a conditional `(B | A)`.
///
/// Input that is not a single parenthesized group with a top-level bar is
/// read as a propositional formula `A` and embedded as `(A | top)`.
pub fn parse_conditional(text: &str, sig: &Signature) -> Result<Conditional, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(syntax(0, "empty conditional"));
    }
    if toks[0].tok == Tok::LParen {
        // Does the opening paren close at the final token?
        let mut depth = 0usize;
        let mut closes_at_end = false;
        for (i, t) in toks.iter().enumerate() {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        closes_at_end = i == toks.len() - 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        if closes_at_end {
            let interior = &toks[1..toks.len() - 1];
            let end = toks[toks.len() - 1].pos;
            if !top_level_bars(interior).is_empty() || interior.is_empty() {
                return parse_conditional_interior(interior, sig, toks[0].pos, end);
            }
        }
    }
    let formula = parse_formula_tokens(&toks, sig, text.len())?;
    Ok(Conditional::propositional(formula))
}

/// Parses a comma-separated list of conditionals.
pub fn parse_conditional_list(
    text: &str,
    sig: &Signature,
) -> Result<Vec<Conditional>, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut slices = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth = depth.saturating_sub(1),
            Tok::Comma if depth == 0 => {
                slices.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    slices.push(&toks[start..]);
    for slice in slices {
        let pos = slice.first().map_or(text.len(), |t| t.pos);
        if slice.is_empty() {
            return Err(syntax(pos, "empty conditional in list"));
        }
        // Each list entry must be a parenthesized conditional.
        if slice[0].tok != Tok::LParen || slice[slice.len() - 1].tok != Tok::RParen {
            return Err(syntax(pos, "expected a parenthesized conditional `(B | A)`"));
        }
        let interior = &slice[1..slice.len() - 1];
        out.push(parse_conditional_interior(
            interior,
            sig,
            slice[0].pos,
            slice[slice.len() - 1].pos,
        )?);
    }
    Ok(out)
}

struct DescriptorParser<'a> {
    toks: &'a [Token],
    pos: usize,
    sig: &'a Signature,
    end: usize,
}

impl<'a> DescriptorParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.pos)
    }

    fn molecular(&mut self) -> Result<MolecularDescriptor, ParseError> {
        let mut lhs = self.mol_conjunction()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let rhs = self.mol_conjunction()?;
            lhs = MolecularDescriptor::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn mol_conjunction(&mut self) -> Result<MolecularDescriptor, ParseError> {
        let mut lhs = self.mol_unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.mol_unary()?;
            lhs = MolecularDescriptor::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn mol_unary(&mut self) -> Result<MolecularDescriptor, ParseError> {
        if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            Ok(MolecularDescriptor::neg(self.mol_unary()?))
        } else {
            self.mol_atom()
        }
    }

    fn mol_atom(&mut self) -> Result<MolecularDescriptor, ParseError> {
        let pos = self.here();
        match self.peek() {
            Some(Tok::Ident(name)) if name == "B" => {
                self.pos += 1;
                self.expect_lparen()?;
                let open = self.pos - 1;
                let close = self.matching_rparen(open)?;
                let interior = &self.toks[open + 1..close];
                let cond = parse_conditional_interior(
                    interior,
                    self.sig,
                    self.toks[open].pos,
                    self.toks[close].pos,
                )?;
                self.pos = close + 1;
                Ok(MolecularDescriptor::atom(AtomicDescriptor::new(cond)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.molecular()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(syntax(self.here(), "expected `)`")),
                }
            }
            _ => Err(syntax(pos, "expected a descriptor atom `B(...)`")),
        }
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(syntax(self.here(), "expected `(` after `B`")),
        }
    }

    fn matching_rparen(&self, open: usize) -> Result<usize, ParseError> {
        let mut depth = 0usize;
        for (i, t) in self.toks.iter().enumerate().skip(open) {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(i);
                    }
                }
                _ => {}
            }
        }
        Err(syntax(self.toks[open].pos, "unclosed `(`"))
    }
}

/// Parses a descriptor: comma-separated molecular descriptors. Empty or
/// whitespace-only input is the empty descriptor.
pub fn parse_descriptor(text: &str, sig: &Signature) -> Result<Descriptor, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Ok(Descriptor::empty());
    }
    let mut elements = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut slices = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth = depth.saturating_sub(1),
            Tok::Comma if depth == 0 => {
                slices.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    slices.push(&toks[start..]);
    for slice in slices {
        if slice.is_empty() {
            return Err(syntax(
                slice.first().map_or(text.len(), |t| t.pos),
                "empty descriptor element",
            ));
        }
        let mut p = DescriptorParser { toks: slice, pos: 0, sig, end: text.len() };
        let element = p.molecular()?;
        if p.pos != slice.len() {
            return Err(syntax(p.here(), "unexpected trailing input in descriptor element"));
        }
        elements.push(element);
    }
    Ok(Descriptor::new(elements, sig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::Polarity;
    use crate::testdata::sig_bfp;

    #[test]
    fn formula_precedence() {
        let sig = sig_bfp();
        let f = parse_formula("b & f", &sig).unwrap();
        assert_eq!(f, Formula::and(Formula::atom("b"), Formula::atom("f")));
        let g = parse_formula("!(b | f) -> p", &sig).unwrap();
        assert_eq!(
            g,
            Formula::implies(
                Formula::not(Formula::or(Formula::atom("b"), Formula::atom("f"))),
                Formula::atom("p"),
            )
        );
        // ! > & > | > ->
        let h = parse_formula("!b & f | p -> b", &sig).unwrap();
        assert_eq!(
            h,
            Formula::implies(
                Formula::or(
                    Formula::and(Formula::not(Formula::atom("b")), Formula::atom("f")),
                    Formula::atom("p"),
                ),
                Formula::atom("b"),
            )
        );
    }

    #[test]
    fn malformed_formulas_report_positions() {
        let sig = sig_bfp();
        match parse_formula("b & & f", &sig).unwrap_err() {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_formula("", &sig).is_err());
        assert!(parse_formula("b &", &sig).is_err());
        assert!(parse_formula("(b", &sig).is_err());
        assert!(parse_formula("b f", &sig).is_err());
    }

    #[test]
    fn unknown_atoms_are_rejected() {
        let sig = sig_bfp();
        match parse_formula("b & q", &sig).unwrap_err() {
            ParseError::UnknownAtom { name, pos } => {
                assert_eq!(name, "q");
                assert_eq!(pos, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn constants_parse() {
        let sig = sig_bfp();
        assert_eq!(parse_formula("top", &sig).unwrap(), Formula::Top);
        assert_eq!(parse_formula("bot & b", &sig).unwrap().to_string(), "bot & b");
    }

    #[test]
    fn conditional_forms() {
        let sig = sig_bfp();
        let c = parse_conditional("(f | b)", &sig).unwrap();
        assert_eq!(c, Conditional::new(Formula::atom("f"), Formula::atom("b")));
        let sugar = parse_conditional("!p", &sig).unwrap();
        assert_eq!(sugar, Conditional::propositional(Formula::not(Formula::atom("p"))));
        // A fully parenthesized group without a top-level bar is a formula.
        let disj = parse_conditional("((f | b))", &sig).unwrap();
        assert_eq!(
            disj,
            Conditional::propositional(Formula::or(Formula::atom("f"), Formula::atom("b")))
        );
        assert!(parse_conditional("(f | b | p)", &sig).is_err());
        // Disjunction inside a side needs parentheses.
        let ok = parse_conditional("((f | p) | b)", &sig).unwrap();
        assert_eq!(
            ok,
            Conditional::new(
                Formula::or(Formula::atom("f"), Formula::atom("p")),
                Formula::atom("b"),
            )
        );
    }

    #[test]
    fn conditional_list_parsing() {
        let sig = sig_bfp();
        let conds = parse_conditional_list("(p|b),(f|p),(!f|p)", &sig).unwrap();
        assert_eq!(conds.len(), 3);
        assert_eq!(conds[2].to_string(), "(!f | p)");
        assert!(parse_conditional_list("(p|b),", &sig).is_err());
        assert!(parse_conditional_list("p|b", &sig).is_err());
    }

    #[test]
    fn elementary_descriptor_from_running_example() {
        let sig = sig_bfp();
        let psi = parse_descriptor("B(p|b), !B(f|p), !B(!f|p)", &sig).unwrap();
        assert_eq!(psi.elements().len(), 3);
        assert!(psi.is_elementary());
        let lits: Vec<Polarity> = psi
            .elements()
            .iter()
            .map(|m| m.as_literal().unwrap().polarity)
            .collect();
        assert_eq!(lits, vec![Polarity::Positive, Polarity::Negative, Polarity::Negative]);
        let conds = psi.conditionals(&sig);
        assert_eq!(conds[0].to_string(), "(p | b)");
    }

    #[test]
    fn composite_descriptor_with_disjunction_and_sugar() {
        let sig = sig_bfp();
        let psi = parse_descriptor("B(!b) | B(p), !B(b&f)", &sig).unwrap();
        assert_eq!(psi.elements().len(), 2);
        assert!(!psi.is_elementary());
        // First element is a descriptor-level disjunction of two
        // propositional atoms.
        assert_eq!(psi.elements()[0].to_string(), "B(!b) | B(p)");
        assert_eq!(psi.elements()[1].to_string(), "!B(b & f)");
    }

    #[test]
    fn descriptor_errors() {
        let sig = sig_bfp();
        assert!(parse_descriptor("B()", &sig).is_err());
        assert!(parse_descriptor("B(p|b", &sig).is_err());
        assert!(parse_descriptor("B(p|b) &", &sig).is_err());
        assert!(parse_descriptor("p", &sig).is_err());
        assert!(parse_descriptor("B(p|b),,B(f|p)", &sig).is_err());
        assert!(parse_descriptor("B(f|b|p)", &sig).is_err());
    }

    #[test]
    fn empty_descriptor() {
        let sig = sig_bfp();
        assert!(parse_descriptor("", &sig).unwrap().is_empty());
        assert!(parse_descriptor("   ", &sig).unwrap().is_empty());
    }

    #[test]
    fn descriptor_grouping_parens() {
        let sig = sig_bfp();
        let psi = parse_descriptor("!(B(b) | B(f)) & B(p)", &sig).unwrap();
        assert_eq!(psi.elements().len(), 1);
        assert!(!psi.is_elementary());
    }
}
