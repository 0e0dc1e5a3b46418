//! Revision of a ranking function by an elementary descriptor.
//!
//! Each literal of the descriptor contributes one inequality over the impact
//! variables γ₁⁺, γ₁⁻, …, γₙ⁺, γₙ⁻: a positive literal for conditional i
//! demands γᵢ⁻ − γᵢ⁺ strictly above the difference of the shifted minima of
//! its verifying and falsifying worlds (the shifts collecting the impacts of
//! the *other* conditionals), a negative literal demands less-or-equal. The
//! solver enumerates a finite integer box and returns every impact vector
//! satisfying all inequalities, paired with the posterior it induces.

use std::fmt;

use thiserror::Error;

use crate::descriptor::{Descriptor, Polarity};
use crate::logic::{Conditional, Verdict, WorldSet};
use crate::pcp::{induced_ocf, pcp_representable, GammaVector};
use crate::ranking::Ocf;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RevisionError {
    #[error("descriptor is not elementary (contains a non-literal element)")]
    NotElementary,
    #[error("bounds cover {got} variables, constraint system has {expected}")]
    BoundsDimension { expected: usize, got: usize },
    #[error("empty interval for variable {var}: [{lo}, {hi}]")]
    EmptyInterval { var: String, lo: i64, hi: i64 },
}

/// Closed integer interval per impact variable, indexed like the flat gamma
/// layout (γ₁⁺, γ₁⁻, γ₂⁺, γ₂⁻, …).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    lows: Vec<i64>,
    highs: Vec<i64>,
}

impl Bounds {
    pub fn new(lows: Vec<i64>, highs: Vec<i64>) -> Result<Bounds, RevisionError> {
        assert_eq!(lows.len(), highs.len(), "bounds vectors differ in length");
        for (v, (&lo, &hi)) in lows.iter().zip(&highs).enumerate() {
            if lo > hi {
                return Err(RevisionError::EmptyInterval {
                    var: crate::pcp::variable_name(v),
                    lo,
                    hi,
                });
            }
        }
        Ok(Bounds { lows, highs })
    }

    pub fn uniform(var_count: usize, lo: i64, hi: i64) -> Bounds {
        assert!(lo <= hi);
        Bounds { lows: vec![lo; var_count], highs: vec![hi; var_count] }
    }

    pub fn var_count(&self) -> usize {
        self.lows.len()
    }

    pub fn low(&self, var: usize) -> i64 {
        self.lows[var]
    }

    pub fn high(&self, var: usize) -> i64 {
        self.highs[var]
    }

    pub fn set(&mut self, var: usize, lo: i64, hi: i64) -> Result<(), RevisionError> {
        if lo > hi {
            return Err(RevisionError::EmptyInterval {
                var: crate::pcp::variable_name(var),
                lo,
                hi,
            });
        }
        self.lows[var] = lo;
        self.highs[var] = hi;
        Ok(())
    }

    fn width(&self, var: usize) -> u64 {
        (self.highs[var] - self.lows[var]) as u64 + 1
    }

    /// Number of grid points in the box (saturating).
    pub fn grid_size(&self) -> u128 {
        let mut total: u128 = 1;
        for v in 0..self.var_count() {
            total = total.saturating_mul(self.width(v) as u128);
        }
        total
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.var_count() {
            if v > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} in [{}, {}]", crate::pcp::variable_name(v), self.lows[v], self.highs[v])?;
        }
        Ok(())
    }
}

/// One world's contribution to a min-term: its prior rank plus the impact
/// variables of the *other* conditionals it triggers.
#[derive(Debug, Clone)]
struct MinTerm {
    kappa: i64,
    others: Vec<u32>,
}

impl MinTerm {
    fn value(&self, gamma: &[i64]) -> i64 {
        self.kappa + self.others.iter().map(|&v| gamma[v as usize]).sum::<i64>()
    }
}

/// The constraint a single literal descriptor imposes.
#[derive(Debug, Clone)]
pub struct LiteralConstraint {
    /// Position of the literal's conditional in the conditional list.
    pub index: usize,
    pub polarity: Polarity,
    pub verifying_set: WorldSet,
    pub falsifying_set: WorldSet,
    verifying: Vec<MinTerm>,
    falsifying: Vec<MinTerm>,
}

/// Degenerate status of a constraint, decided by world sets alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ConstraintStatus {
    Contingent,
    AlwaysTrue,
    AlwaysFalse,
}

impl LiteralConstraint {
    /// A conditional with no verifying world is never accepted: a positive
    /// literal on it is unsatisfiable and a negative one vacuous. With
    /// verifying worlds but no falsifying ones it is always accepted.
    fn status(&self) -> ConstraintStatus {
        if self.verifying_set.is_empty() {
            return match self.polarity {
                Polarity::Positive => ConstraintStatus::AlwaysFalse,
                Polarity::Negative => ConstraintStatus::AlwaysTrue,
            };
        }
        if self.falsifying_set.is_empty() {
            return match self.polarity {
                Polarity::Positive => ConstraintStatus::AlwaysTrue,
                Polarity::Negative => ConstraintStatus::AlwaysFalse,
            };
        }
        ConstraintStatus::Contingent
    }
}

/// Constraint system for one prior and one elementary descriptor.
#[derive(Debug, Clone)]
pub struct Csp {
    prior: Ocf,
    conds: Vec<Conditional>,
    constraints: Vec<LiteralConstraint>,
}

/// Builds the constraint system: one literal constraint per descriptor
/// element, over the impact variables of the descriptor's conditionals.
pub fn build_csp(prior: &Ocf, psi: &Descriptor) -> Result<Csp, RevisionError> {
    let sig = prior.signature();
    let conds = psi.conditionals(sig);
    let keys: Vec<_> = conds.iter().map(|c| c.semantic_key(sig)).collect();
    let verdict_tables: Vec<Vec<Verdict>> = sig
        .worlds()
        .map(|w| conds.iter().map(|c| c.verdict(w, sig)).collect())
        .collect();

    let mut constraints = Vec::with_capacity(psi.elements().len());
    for element in psi.elements() {
        let literal = element.as_literal().ok_or(RevisionError::NotElementary)?;
        let key = literal.atom.cond.semantic_key(sig);
        let index = keys.iter().position(|k| *k == key).expect("literal conditional is listed");

        let mut verifying = Vec::new();
        let mut falsifying = Vec::new();
        for world in sig.worlds() {
            let verdict = verdict_tables[world.code()][index];
            if verdict == Verdict::NotApplicable {
                continue;
            }
            let mut others = Vec::new();
            for (j, v) in verdict_tables[world.code()].iter().enumerate() {
                if j == index {
                    continue;
                }
                match v {
                    Verdict::Verifies => others.push(2 * j as u32),
                    Verdict::Falsifies => others.push(2 * j as u32 + 1),
                    Verdict::NotApplicable => {}
                }
            }
            let term = MinTerm { kappa: prior.rank_of_world(world) as i64, others };
            match verdict {
                Verdict::Verifies => verifying.push(term),
                Verdict::Falsifies => falsifying.push(term),
                Verdict::NotApplicable => unreachable!(),
            }
        }
        constraints.push(LiteralConstraint {
            index,
            polarity: literal.polarity,
            verifying_set: keys[index].0.clone(),
            falsifying_set: keys[index].1.clone(),
            verifying,
            falsifying,
        });
    }
    Ok(Csp { prior: prior.clone(), conds, constraints })
}

impl Csp {
    pub fn prior(&self) -> &Ocf {
        &self.prior
    }

    pub fn conditionals(&self) -> &[Conditional] {
        &self.conds
    }

    pub fn constraints(&self) -> &[LiteralConstraint] {
        &self.constraints
    }

    pub fn var_count(&self) -> usize {
        2 * self.conds.len()
    }

    /// Evaluates one literal constraint at a full assignment: the shifted
    /// minimum over verifying worlds minus the one over falsifying worlds,
    /// compared against γᵢ⁻ − γᵢ⁺ (strict for positive literals).
    pub fn eval_constraint(&self, constraint: usize, gamma: &GammaVector) -> bool {
        debug_assert_eq!(gamma.conditional_count(), self.conds.len());
        let c = &self.constraints[constraint];
        match c.status() {
            ConstraintStatus::AlwaysTrue => return true,
            ConstraintStatus::AlwaysFalse => return false,
            ConstraintStatus::Contingent => {}
        }
        let values = gamma.values();
        let min_verify =
            c.verifying.iter().map(|t| t.value(values)).min().expect("contingent has verifiers");
        let min_falsify =
            c.falsifying.iter().map(|t| t.value(values)).min().expect("contingent has falsifiers");
        let lhs = gamma.minus(c.index) - gamma.plus(c.index);
        let rhs = min_verify - min_falsify;
        match c.polarity {
            Polarity::Positive => lhs > rhs,
            Polarity::Negative => lhs <= rhs,
        }
    }

    /// All constraints hold at the assignment.
    pub fn satisfied(&self, gamma: &GammaVector) -> bool {
        (0..self.constraints.len()).all(|i| self.eval_constraint(i, gamma))
    }
}

/// A solution of the constraint system: an impact vector inside the bounds
/// together with the posterior it induces.
#[derive(Debug, Clone)]
pub struct Solution {
    pub gamma: GammaVector,
    pub kappa0: i64,
    pub posterior: Ocf,
}

struct Search<'a> {
    csp: &'a Csp,
    bounds: &'a Bounds,
    /// Indices of contingent constraints; degenerate ones are resolved
    /// before the search starts.
    active: Vec<usize>,
    pruning: bool,
}

impl<'a> Search<'a> {
    /// Returns None when some constraint is unsatisfiable regardless of the
    /// assignment.
    fn prepare(csp: &'a Csp, bounds: &'a Bounds, pruning: bool) -> Option<Search<'a>> {
        let mut active = Vec::new();
        for (i, c) in csp.constraints.iter().enumerate() {
            match c.status() {
                ConstraintStatus::AlwaysFalse => return None,
                ConstraintStatus::AlwaysTrue => {}
                ConstraintStatus::Contingent => active.push(i),
            }
        }
        Some(Search { csp, bounds, active, pruning })
    }

    fn lo_of(&self, gamma: &[i64], assigned: usize, var: usize) -> i64 {
        if var < assigned {
            gamma[var]
        } else {
            self.bounds.low(var)
        }
    }

    fn hi_of(&self, gamma: &[i64], assigned: usize, var: usize) -> i64 {
        if var < assigned {
            gamma[var]
        } else {
            self.bounds.high(var)
        }
    }

    /// Interval test: true when some constraint is violated for *every*
    /// completion of the first `assigned` variables. Never prunes a
    /// satisfiable completion, so the solution set is unchanged.
    fn prunable(&self, gamma: &[i64], assigned: usize) -> bool {
        for &ci in &self.active {
            let c = &self.csp.constraints[ci];
            let own_plus = 2 * c.index;
            let own_minus = own_plus + 1;
            let lhs_lo =
                self.lo_of(gamma, assigned, own_minus) - self.hi_of(gamma, assigned, own_plus);
            let lhs_hi =
                self.hi_of(gamma, assigned, own_minus) - self.lo_of(gamma, assigned, own_plus);

            let term_bounds = |terms: &[MinTerm]| -> (i64, i64) {
                let mut min_lo = i64::MAX;
                let mut min_hi = i64::MAX;
                for t in terms {
                    let mut lo = t.kappa;
                    let mut hi = t.kappa;
                    for &v in &t.others {
                        lo += self.lo_of(gamma, assigned, v as usize);
                        hi += self.hi_of(gamma, assigned, v as usize);
                    }
                    min_lo = min_lo.min(lo);
                    min_hi = min_hi.min(hi);
                }
                (min_lo, min_hi)
            };
            let (mv_lo, mv_hi) = term_bounds(&c.verifying);
            let (mf_lo, mf_hi) = term_bounds(&c.falsifying);

            let violated_everywhere = match c.polarity {
                // Needs lhs > mv - mf somewhere; best case is lhs_hi against
                // the smallest possible right side.
                Polarity::Positive => lhs_hi <= mv_lo - mf_hi,
                // Needs lhs <= mv - mf somewhere.
                Polarity::Negative => lhs_lo > mv_hi - mf_lo,
            };
            if violated_everywhere {
                return true;
            }
        }
        false
    }

    fn leaf_accepts(&self, gamma: &[i64]) -> bool {
        let gv = GammaVector::new(gamma.to_vec());
        self.active.iter().all(|&i| self.csp.eval_constraint(i, &gv))
    }

    fn dfs(&self, gamma: &mut Vec<i64>, var: usize, out: &mut Vec<Solution>) {
        let nvars = self.csp.var_count();
        if var == nvars {
            if self.leaf_accepts(gamma) {
                out.push(self.materialize(gamma));
            }
            return;
        }
        for value in self.bounds.low(var)..=self.bounds.high(var) {
            gamma[var] = value;
            if self.pruning && self.prunable(gamma, var + 1) {
                continue;
            }
            self.dfs(gamma, var + 1, out);
        }
    }

    fn materialize(&self, gamma: &[i64]) -> Solution {
        let gv = GammaVector::new(gamma.to_vec());
        let induced = induced_ocf(&self.csp.prior, &self.csp.conds, &gv);
        Solution { gamma: gv, kappa0: induced.kappa0, posterior: induced.ocf }
    }
}

fn search(csp: &Csp, bounds: &Bounds, pruning: bool) -> Vec<Solution> {
    assert_eq!(
        bounds.var_count(),
        csp.var_count(),
        "bounds must cover every impact variable"
    );
    let Some(search) = Search::prepare(csp, bounds, pruning) else {
        return Vec::new();
    };
    let mut gamma = vec![0i64; csp.var_count()];
    let mut out = Vec::new();
    search.dfs(&mut gamma, 0, &mut out);
    out
}

/// Enumerates every solution in the box, in lexicographic gamma order.
pub fn solve_sequential(csp: &Csp, bounds: &Bounds) -> Vec<Solution> {
    search(csp, bounds, true)
}

/// Parallel enumeration: the leading variables are partitioned across
/// workers and each block is searched independently; blocks are concatenated
/// in order, so the result is identical to the sequential run.
#[cfg(feature = "parallel")]
pub fn solve_parallel(csp: &Csp, bounds: &Bounds) -> Vec<Solution> {
    assert_eq!(
        bounds.var_count(),
        csp.var_count(),
        "bounds must cover every impact variable"
    );
    const MIN_PARALLEL_GRID: u128 = 1 << 12;
    let nvars = csp.var_count();
    if bounds.grid_size() < MIN_PARALLEL_GRID {
        return solve_sequential(csp, bounds);
    }
    let Some(search) = Search::prepare(csp, bounds, true) else {
        return Vec::new();
    };

    // Flatten enough leading variables that each worker gets many blocks.
    let target = 16 * rayon::current_num_threads() as u128;
    let mut prefix_len = 0usize;
    let mut prefix_count: u128 = 1;
    while prefix_len < nvars && prefix_count < target {
        prefix_count = prefix_count.saturating_mul(bounds.width(prefix_len) as u128);
        prefix_len += 1;
    }
    let prefix_count = prefix_count as u64;

    let blocks: Vec<Vec<Solution>> = (0..prefix_count)
        .into_par_iter()
        .map(|index| {
            let mut gamma = vec![0i64; nvars];
            let mut rest = index;
            for var in (0..prefix_len).rev() {
                let width = bounds.width(var);
                gamma[var] = bounds.low(var) + (rest % width) as i64;
                rest /= width;
            }
            let mut out = Vec::new();
            if !search.prunable(&gamma, prefix_len) {
                search.dfs(&mut gamma, prefix_len, &mut out);
            }
            out
        })
        .collect();
    blocks.concat()
}

/// Enumerates every solution in the box. Uses the parallel search when the
/// `parallel` feature is enabled.
pub fn solve(csp: &Csp, bounds: &Bounds) -> Vec<Solution> {
    #[cfg(feature = "parallel")]
    {
        solve_parallel(csp, bounds)
    }
    #[cfg(not(feature = "parallel"))]
    {
        solve_sequential(csp, bounds)
    }
}

/// Heuristic search box when the caller supplies none: κ_max + n in each
/// direction. Wide enough for the worked examples, but no completeness
/// guarantee exists for any fixed box.
pub fn default_bounds(prior: &Ocf, psi: &Descriptor) -> Bounds {
    let n = psi.conditionals(prior.signature()).len();
    let radius = (prior.max_rank() as i64).saturating_add(n as i64);
    Bounds::uniform(2 * n, -radius, radius)
}

/// Deterministic choice functions over the solution list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// First solution in lexicographic gamma order.
    Lex,
    /// Smallest total impact Σ|γᵢ^±|, ties by lexicographic order.
    MinSum,
}

/// Applies a selection policy to a lexicographically sorted solution list.
pub fn select(solutions: &[Solution], policy: SelectionPolicy) -> Option<usize> {
    if solutions.is_empty() {
        return None;
    }
    match policy {
        SelectionPolicy::Lex => Some(0),
        SelectionPolicy::MinSum => (0..solutions.len()).min_by_key(|&i| solutions[i].gamma.abs_sum()),
    }
}

/// Outcome of a revision: all admissible successors and the index of the
/// chosen one. `selected` is None exactly when no successor exists.
#[derive(Debug, Clone)]
pub struct RevisionOutcome {
    pub solutions: Vec<Solution>,
    pub selected: Option<usize>,
}

/// Revision by an elementary descriptor: solves the constraint system over
/// the given box (or the default box) and applies the selection policy.
pub fn revise(
    prior: &Ocf,
    psi: &Descriptor,
    bounds: Option<&Bounds>,
    policy: SelectionPolicy,
) -> Result<RevisionOutcome, RevisionError> {
    let csp = build_csp(prior, psi)?;
    let default;
    let bounds = match bounds {
        Some(b) => {
            if b.var_count() != csp.var_count() {
                return Err(RevisionError::BoundsDimension {
                    expected: csp.var_count(),
                    got: b.var_count(),
                });
            }
            b
        }
        None => {
            default = default_bounds(prior, psi);
            &default
        }
    };
    let solutions = solve(&csp, bounds);
    let selected = select(&solutions, policy);
    Ok(RevisionOutcome { solutions, selected })
}

/// Independent validation of a solution: the descriptor must hold in the
/// posterior and the change must be representable. Neither check uses the
/// constraint inequalities.
pub fn cross_check(solution: &Solution, prior: &Ocf, psi: &Descriptor) -> bool {
    let conds = psi.conditionals(prior.signature());
    if !psi.holds(&solution.posterior) {
        return false;
    }
    match pcp_representable(prior, &solution.posterior, &conds) {
        Ok(analysis) => analysis.witness().is_some(),
        Err(_) => false,
    }
}

/// Collapses solutions that induce identical posteriors, keeping the first
/// (lexicographically smallest) gamma for each table.
pub fn dedup_by_posterior(solutions: Vec<Solution>) -> Vec<Solution> {
    let mut seen: Vec<Vec<u64>> = Vec::new();
    let mut out = Vec::new();
    for solution in solutions {
        let table = solution.posterior.ranks().to_vec();
        if !seen.contains(&table) {
            seen.push(table);
            out.push(solution);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;
    use crate::parse::parse_descriptor;
    use crate::testdata::{penguin_posterior, penguin_prior, sig_bfp};

    fn penguin_psi() -> Descriptor {
        parse_descriptor("B(p|b), !B(f|p), !B(!f|p)", &sig_bfp()).unwrap()
    }

    /// The worked nine-solution box: γ₁⁺∈[−2,0], γ₁⁻∈[0,2], γ₂^±∈[−1,1],
    /// γ₃^± = 0.
    fn nine_solution_bounds() -> Bounds {
        Bounds::new(vec![-2, 0, -1, -1, 0, 0], vec![0, 2, 1, 1, 0, 0]).unwrap()
    }

    #[test]
    fn csp_shape_for_running_example() {
        let csp = build_csp(&penguin_prior(), &penguin_psi()).unwrap();
        assert_eq!(csp.conditionals().len(), 3);
        assert_eq!(csp.constraints().len(), 3);
        assert_eq!(csp.var_count(), 6);
        for c in csp.constraints() {
            assert!(c.verifying_set.intersection(&c.falsifying_set).is_empty());
            assert_eq!(c.verifying_set.len(), 2);
            assert_eq!(c.falsifying_set.len(), 2);
        }
    }

    #[test]
    fn constraint_evaluation_at_known_points() {
        let csp = build_csp(&penguin_prior(), &penguin_psi()).unwrap();
        let solution = GammaVector::new(vec![0, 2, -1, 0, 0, 0]);
        assert!(csp.satisfied(&solution));

        let zero = GammaVector::zeros(3);
        assert!(!csp.eval_constraint(0, &zero));
        assert!(csp.eval_constraint(1, &zero));
        assert!(!csp.eval_constraint(2, &zero));
        assert!(!csp.satisfied(&zero));
    }

    #[test]
    fn nine_solutions_in_the_worked_box() {
        let prior = penguin_prior();
        let psi = penguin_psi();
        let csp = build_csp(&prior, &psi).unwrap();
        let solutions = solve(&csp, &nine_solution_bounds());
        assert_eq!(solutions.len(), 9);
        let gammas: Vec<&[i64]> = solutions.iter().map(|s| s.gamma.values()).collect();
        let expected: Vec<Vec<i64>> = vec![
            vec![-2, 0, -1, 0, 0, 0],
            vec![-2, 1, -1, 0, 0, 0],
            vec![-2, 1, 0, 1, 0, 0],
            vec![-2, 2, -1, 0, 0, 0],
            vec![-2, 2, 0, 1, 0, 0],
            vec![-1, 1, -1, 0, 0, 0],
            vec![-1, 2, -1, 0, 0, 0],
            vec![-1, 2, 0, 1, 0, 0],
            vec![0, 2, -1, 0, 0, 0],
        ];
        assert_eq!(gammas, expected.iter().map(Vec::as_slice).collect::<Vec<_>>());
        let star = solutions.iter().find(|s| s.gamma.values() == [0, 2, -1, 0, 0, 0]).unwrap();
        assert_eq!(star.posterior, penguin_posterior());
        assert_eq!(star.kappa0, 0);
        for s in &solutions {
            assert!(cross_check(s, &prior, &psi));
            assert_eq!(s.posterior.ranks().iter().min(), Some(&0));
        }
    }

    #[test]
    fn empty_descriptor_reproduces_prior() {
        let prior = penguin_prior();
        let psi = Descriptor::empty();
        let csp = build_csp(&prior, &psi).unwrap();
        assert_eq!(csp.var_count(), 0);
        let solutions = solve(&csp, &Bounds::uniform(0, 0, 0));
        assert_eq!(solutions.len(), 1);
        assert_eq!(solutions[0].gamma.values(), &[] as &[i64]);
        assert_eq!(solutions[0].posterior, prior);
    }

    #[test]
    fn contradictory_literals_have_no_solutions() {
        let sig = sig_bfp();
        let prior = penguin_prior();
        let psi = parse_descriptor("B(b), !B(b)", &sig).unwrap();
        let csp = build_csp(&prior, &psi).unwrap();
        // One conditional, two constraints of opposite polarity.
        assert_eq!(csp.conditionals().len(), 1);
        assert_eq!(csp.constraints().len(), 2);
        assert!(solve(&csp, &Bounds::uniform(2, -3, 3)).is_empty());
    }

    #[test]
    fn unsatisfiable_verification_blocks_positive_literals() {
        let sig = sig_bfp();
        let prior = penguin_prior();
        let positive = parse_descriptor("B(f | b & !b)", &sig).unwrap();
        let csp = build_csp(&prior, &positive).unwrap();
        assert!(solve(&csp, &Bounds::uniform(2, -2, 2)).is_empty());

        // The negated form is vacuous instead.
        let negative = parse_descriptor("!B(f | b & !b)", &sig).unwrap();
        let csp = build_csp(&prior, &negative).unwrap();
        let grid = Bounds::uniform(2, 0, 0);
        assert_eq!(solve(&csp, &grid).len(), 1);
    }

    #[test]
    fn non_elementary_descriptor_is_rejected() {
        let sig = sig_bfp();
        let psi = parse_descriptor("B(!b) | B(p)", &sig).unwrap();
        assert_eq!(
            build_csp(&penguin_prior(), &psi).unwrap_err(),
            RevisionError::NotElementary
        );
        assert!(matches!(
            revise(&penguin_prior(), &psi, None, SelectionPolicy::Lex),
            Err(RevisionError::NotElementary)
        ));
    }

    #[test]
    fn default_bounds_formula() {
        let prior = penguin_prior();
        let bounds = default_bounds(&prior, &penguin_psi());
        assert_eq!(bounds.var_count(), 6);
        for v in 0..6 {
            assert_eq!((bounds.low(v), bounds.high(v)), (-7, 7));
        }
        let uniform = Ocf::uniform_zero(sig_bfp());
        let single = parse_descriptor("B(f|b)", &sig_bfp()).unwrap();
        let bounds = default_bounds(&uniform, &single);
        assert_eq!((bounds.low(0), bounds.high(0)), (-1, 1));
    }

    #[test]
    fn min_sum_prefers_no_change_when_descriptor_already_holds() {
        let prior = penguin_prior();
        let sig = sig_bfp();
        // κ_p accepts (f|b), so the descriptor already holds.
        let psi = parse_descriptor("B(f|b)", &sig).unwrap();
        assert!(psi.holds(&prior));
        let outcome =
            revise(&prior, &psi, Some(&Bounds::uniform(2, -2, 2)), SelectionPolicy::MinSum)
                .unwrap();
        let chosen = &outcome.solutions[outcome.selected.unwrap()];
        assert_eq!(chosen.gamma.values(), &[0, 0]);
        assert_eq!(chosen.posterior, prior);
    }

    #[test]
    fn selection_policies() {
        let prior = penguin_prior();
        let psi = penguin_psi();
        let outcome =
            revise(&prior, &psi, Some(&nine_solution_bounds()), SelectionPolicy::Lex).unwrap();
        assert_eq!(outcome.solutions.len(), 9);
        assert_eq!(outcome.selected, Some(0));
        let outcome =
            revise(&prior, &psi, Some(&nine_solution_bounds()), SelectionPolicy::MinSum).unwrap();
        // Minimal total impact among the nine is |(-1,1,-1,0)| = 3.
        let chosen = &outcome.solutions[outcome.selected.unwrap()];
        assert_eq!(chosen.gamma.abs_sum(), 3);
        assert_eq!(chosen.gamma.values(), &[-1, 1, -1, 0, 0, 0]);
    }

    #[test]
    fn bounds_validation() {
        assert!(matches!(
            Bounds::new(vec![1], vec![0]),
            Err(RevisionError::EmptyInterval { .. })
        ));
        let psi = penguin_psi();
        let bad = Bounds::uniform(2, -1, 1);
        assert!(matches!(
            revise(&penguin_prior(), &psi, Some(&bad), SelectionPolicy::Lex),
            Err(RevisionError::BoundsDimension { expected: 6, got: 2 })
        ));
    }

    #[test]
    fn pruned_and_unpruned_searches_agree() {
        let prior = penguin_prior();
        let psi = penguin_psi();
        let csp = build_csp(&prior, &psi).unwrap();
        let bounds = Bounds::uniform(6, -2, 2);
        let pruned = search(&csp, &bounds, true);
        let unpruned = search(&csp, &bounds, false);
        assert_eq!(pruned.len(), unpruned.len());
        for (a, b) in pruned.iter().zip(&unpruned) {
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.posterior, b.posterior);
        }
    }

    #[test]
    fn monotone_in_bounds() {
        let prior = penguin_prior();
        let psi = penguin_psi();
        let csp = build_csp(&prior, &psi).unwrap();
        let small = solve(&csp, &nine_solution_bounds());
        let big = solve(&csp, &Bounds::uniform(6, -3, 3));
        for s in &small {
            assert!(big.iter().any(|b| b.gamma == s.gamma));
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let prior = penguin_prior();
        let psi = penguin_psi();
        let csp = build_csp(&prior, &psi).unwrap();
        let bounds = Bounds::uniform(6, -3, 3);
        let seq = solve_sequential(&csp, &bounds);
        let par = solve_parallel(&csp, &bounds);
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.kappa0, b.kappa0);
            assert_eq!(a.posterior, b.posterior);
        }
    }

    #[test]
    fn dedup_collapses_identical_posteriors() {
        let sig = sig_bfp();
        let prior = Ocf::uniform_zero(sig.clone());
        let psi = parse_descriptor("B(f|b)", &sig).unwrap();
        let csp = build_csp(&prior, &psi).unwrap();
        let solutions = solve(&csp, &Bounds::uniform(2, -2, 2));
        let deduped = dedup_by_posterior(solutions.clone());
        assert!(deduped.len() < solutions.len());
        // Posteriors are pairwise distinct afterwards.
        for (i, a) in deduped.iter().enumerate() {
            for b in &deduped[i + 1..] {
                assert_ne!(a.posterior.ranks(), b.posterior.ranks());
            }
        }
    }

    #[test]
    fn constraint_agrees_with_direct_acceptance_on_a_grid() {
        // Equivalence of the inequality route and direct acceptance checking
        // on the induced posterior, exhaustively over a small box.
        let sig = Signature::new(["a", "b"]).unwrap();
        let prior = Ocf::new(sig.clone(), vec![0, 1, 2, 0]).unwrap();
        let psi = parse_descriptor("B(b|a), !B(a)", &sig).unwrap();
        let csp = build_csp(&prior, &psi).unwrap();
        let bounds = Bounds::uniform(4, -2, 2);
        let mut stack = vec![0i64; 4];
        let mut mismatches = 0;
        fn visit(
            csp: &Csp,
            bounds: &Bounds,
            psi: &Descriptor,
            stack: &mut Vec<i64>,
            var: usize,
            mismatches: &mut u32,
        ) {
            if var == stack.len() {
                let gamma = GammaVector::new(stack.clone());
                let by_constraints = csp.satisfied(&gamma);
                let induced = induced_ocf(csp.prior(), csp.conditionals(), &gamma);
                let by_acceptance = psi.holds(&induced.ocf);
                if by_constraints != by_acceptance {
                    *mismatches += 1;
                }
                return;
            }
            for v in bounds.low(var)..=bounds.high(var) {
                stack[var] = v;
                visit(csp, bounds, psi, stack, var + 1, mismatches);
            }
        }
        visit(&csp, &bounds, &psi, &mut stack, 0, &mut mismatches);
        assert_eq!(mismatches, 0);
    }

    use crate::logic::Signature;
