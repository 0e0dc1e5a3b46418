//! The principle of conditional preservation for ranking-function changes.
//!
//! A change from κ to κ° preserves the conditional structure of a set of
//! conditionals when every world's new rank is the old rank plus a
//! normalizer κ₀ and one additive impact per conditional it verifies (γᵢ⁺)
//! or falsifies (γᵢ⁻). This module builds posteriors from impact vectors,
//! decides representability of a given change by exact rational solving over
//! the realized verdict-profile classes, and offers a bounded multiset
//! balance check as an independent validator.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::logic::{Conditional, Signature, Verdict, World};
use crate::ranking::Ocf;
use crate::ratlin::{solve_integer, solve_rational};

/// Impact vector: one (γᵢ⁺, γᵢ⁻) pair per conditional, flattened as
/// (γ₁⁺, γ₁⁻, γ₂⁺, γ₂⁻, …). Lexicographic comparison of the flat layout is
/// the canonical solution order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaVector {
    values: Vec<i64>,
}

impl GammaVector {
    pub fn new(values: Vec<i64>) -> GammaVector {
        assert!(values.len() % 2 == 0, "gamma vector needs one (+,-) pair per conditional");
        GammaVector { values }
    }

    pub fn zeros(conditional_count: usize) -> GammaVector {
        GammaVector { values: vec![0; 2 * conditional_count] }
    }

    pub fn conditional_count(&self) -> usize {
        self.values.len() / 2
    }

    /// γᵢ⁺ for the 0-based conditional index `i`.
    pub fn plus(&self, i: usize) -> i64 {
        self.values[2 * i]
    }

    /// γᵢ⁻ for the 0-based conditional index `i`.
    pub fn minus(&self, i: usize) -> i64 {
        self.values[2 * i + 1]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn abs_sum(&self) -> u64 {
        self.values.iter().map(|v| v.unsigned_abs()).sum()
    }
}

impl fmt::Display for GammaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Human-readable name of flat impact variable `v`: g1+, g1-, g2+, …
pub fn variable_name(v: usize) -> String {
    format!("g{}{}", v / 2 + 1, if v % 2 == 0 { "+" } else { "-" })
}

/// Total shift a world receives under an impact vector: the sum of γⱼ⁺ over
/// verified conditionals plus γⱼ⁻ over falsified ones.
pub fn shift_of(
    world: World,
    conds: &[Conditional],
    gamma: &GammaVector,
    sig: &Signature,
) -> i64 {
    debug_assert_eq!(conds.len(), gamma.conditional_count());
    let mut total = 0i64;
    for (i, cond) in conds.iter().enumerate() {
        match cond.verdict(world, sig) {
            Verdict::Verifies => total += gamma.plus(i),
            Verdict::Falsifies => total += gamma.minus(i),
            Verdict::NotApplicable => {}
        }
    }
    total
}

/// A posterior built from an impact vector, together with the normalizer
/// that made it a valid ranking function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Induced {
    pub ocf: Ocf,
    pub kappa0: i64,
}

/// Builds κ_γ(ω) = κ₀ + κ(ω) + shift(ω) with κ₀ the smallest integer making
/// every rank non-negative; the minimum rank is then exactly 0.
pub fn induced_ocf(prior: &Ocf, conds: &[Conditional], gamma: &GammaVector) -> Induced {
    let sig = prior.signature();
    let shifted: Vec<i64> = sig
        .worlds()
        .map(|w| prior.rank_of_world(w) as i64 + shift_of(w, conds, gamma, sig))
        .collect();
    let min = shifted.iter().copied().min().expect("signature is non-empty");
    let kappa0 = -min;
    let ranks: Vec<u64> = shifted.iter().map(|&v| (v + kappa0) as u64).collect();
    let ocf = Ocf::new(sig.clone(), ranks).expect("normalization yields a valid ranking");
    Induced { ocf, kappa0 }
}

/// Checks whether a concrete integer assignment reproduces `post` from
/// `prior` world by world. This is the membership test for the witness
/// solution space.
pub fn reproduces_posterior(
    prior: &Ocf,
    post: &Ocf,
    conds: &[Conditional],
    kappa0: i64,
    gamma: &GammaVector,
) -> bool {
    let sig = prior.signature();
    sig.worlds().all(|w| {
        let lhs = post.rank_of_world(w) as i64;
        let rhs = kappa0 + prior.rank_of_world(w) as i64 + shift_of(w, conds, gamma, sig);
        lhs == rhs
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PcpError {
    #[error("prior and posterior are defined over different signatures")]
    SignatureMismatch,
    #[error("multiset enumeration needs {needed} pairs, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

/// A rational witness for representability: a solution of the profile-class
/// system, plus the directions of its solution-space freedom.
#[derive(Debug, Clone)]
pub struct PcpWitness {
    pub kappa0: BigRational,
    /// (γᵢ⁺, γᵢ⁻) per conditional.
    pub gammas: Vec<(BigRational, BigRational)>,
    /// Null-space basis over the coordinates (κ₀, γ₁⁺, γ₁⁻, …).
    pub freedom: Vec<Vec<BigRational>>,
}

impl PcpWitness {
    pub fn is_integral(&self) -> bool {
        self.kappa0.is_integer()
            && self.gammas.iter().all(|(p, m)| p.is_integer() && m.is_integer())
    }
}

/// Why a change is not representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PcpObstruction {
    /// Two worlds with identical verdict profiles changed by different
    /// amounts.
    ProfileDelta {
        profile: Vec<Verdict>,
        world_a: World,
        delta_a: i64,
        world_b: World,
        delta_b: i64,
    },
    /// Profile deltas are consistent per class but the classes contradict
    /// each other.
    UnsolvableSystem,
}

#[derive(Debug, Clone)]
pub enum PcpAnalysis {
    Representable(PcpWitness),
    NotRepresentable(PcpObstruction),
}

impl PcpAnalysis {
    pub fn witness(&self) -> Option<&PcpWitness> {
        match self {
            PcpAnalysis::Representable(w) => Some(w),
            PcpAnalysis::NotRepresentable(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&PcpObstruction> {
        match self {
            PcpAnalysis::Representable(_) => None,
            PcpAnalysis::NotRepresentable(o) => Some(o),
        }
    }
}

/// One equation per realized verdict-profile class: the rank delta of the
/// class equals κ₀ plus the impacts its profile selects. Returns the profile
/// map or the offending pair when a class has inconsistent deltas.
fn profile_classes(
    prior: &Ocf,
    post: &Ocf,
    conds: &[Conditional],
) -> Result<BTreeMap<Vec<u8>, (Vec<Verdict>, World, i64)>, PcpObstruction> {
    let sig = prior.signature();
    let mut classes: BTreeMap<Vec<u8>, (Vec<Verdict>, World, i64)> = BTreeMap::new();
    for world in sig.worlds() {
        let profile: Vec<Verdict> = conds.iter().map(|c| c.verdict(world, sig)).collect();
        let key: Vec<u8> = profile
            .iter()
            .map(|v| match v {
                Verdict::Verifies => 0u8,
                Verdict::Falsifies => 1,
                Verdict::NotApplicable => 2,
            })
            .collect();
        let delta = post.rank_of_world(world) as i64 - prior.rank_of_world(world) as i64;
        match classes.get(&key) {
            None => {
                classes.insert(key, (profile, world, delta));
            }
            Some((profile, first, first_delta)) => {
                if *first_delta != delta {
                    return Err(PcpObstruction::ProfileDelta {
                        profile: profile.clone(),
                        world_a: *first,
                        delta_a: *first_delta,
                        world_b: world,
                        delta_b: delta,
                    });
                }
            }
        }
    }
    Ok(classes)
}

fn class_row_indices(key: &[u8]) -> Vec<usize> {
    // Coordinate 0 is κ₀; conditional i contributes coordinate 1 + 2i for a
    // verify and 2 + 2i for a falsify.
    let mut cols = vec![0usize];
    for (i, &verdict) in key.iter().enumerate() {
        match verdict {
            0 => cols.push(1 + 2 * i),
            1 => cols.push(2 + 2 * i),
            _ => {}
        }
    }
    cols
}

/// Decides representability of the change from `prior` to `post` with
/// respect to `conds`, over the rationals.
pub fn pcp_representable(
    prior: &Ocf,
    post: &Ocf,
    conds: &[Conditional],
) -> Result<PcpAnalysis, PcpError> {
    if prior.signature() != post.signature() {
        return Err(PcpError::SignatureMismatch);
    }
    let classes = match profile_classes(prior, post, conds) {
        Ok(classes) => classes,
        Err(obstruction) => return Ok(PcpAnalysis::NotRepresentable(obstruction)),
    };
    let width = 1 + 2 * conds.len();
    let mut rows = Vec::with_capacity(classes.len());
    let mut rhs = Vec::with_capacity(classes.len());
    for (key, (_, _, delta)) in &classes {
        let mut row = vec![BigRational::zero(); width];
        for col in class_row_indices(key) {
            row[col] = BigRational::one();
        }
        rows.push(row);
        rhs.push(BigRational::from_integer(BigInt::from(*delta)));
    }
    match solve_rational(&rows, &rhs) {
        None => Ok(PcpAnalysis::NotRepresentable(PcpObstruction::UnsolvableSystem)),
        Some(solution) => {
            let kappa0 = solution.particular[0].clone();
            let gammas = (0..conds.len())
                .map(|i| {
                    (solution.particular[1 + 2 * i].clone(), solution.particular[2 + 2 * i].clone())
                })
                .collect();
            Ok(PcpAnalysis::Representable(PcpWitness {
                kappa0,
                gammas,
                freedom: solution.nullspace,
            }))
        }
    }
}

/// Searches the witness solution space for an integer point. Returns the
/// normalizer and impact vector when one exists.
pub fn integer_witness(
    prior: &Ocf,
    post: &Ocf,
    conds: &[Conditional],
) -> Result<Option<(i64, GammaVector)>, PcpError> {
    if prior.signature() != post.signature() {
        return Err(PcpError::SignatureMismatch);
    }
    let classes = match profile_classes(prior, post, conds) {
        Ok(classes) => classes,
        Err(_) => return Ok(None),
    };
    let width = 1 + 2 * conds.len();
    let mut rows = Vec::with_capacity(classes.len());
    let mut rhs = Vec::with_capacity(classes.len());
    for (key, (_, _, delta)) in &classes {
        let mut row = vec![BigInt::zero(); width];
        for col in class_row_indices(key) {
            row[col] = BigInt::one();
        }
        rows.push(row);
        rhs.push(BigInt::from(*delta));
    }
    let Some(solution) = solve_integer(&rows, &rhs) else {
        return Ok(None);
    };
    let to_i64 = |b: &BigInt| -> i64 {
        i64::try_from(b).expect("profile-class solutions stay within i64 at supported scales")
    };
    let kappa0 = to_i64(&solution[0]);
    let gamma = GammaVector::new(solution[1..].iter().map(to_i64).collect());
    Ok(Some((kappa0, gamma)))
}

/// Bounded validator for the multiset balance definition: for every pair of
/// equal-size multisets with identical per-conditional verify/falsify
/// counts, the rank sums must change by the same amount. Sizes run up to
/// `m_max`; the implied pair count is capped by `budget`.
pub fn pcp_check_definition(
    prior: &Ocf,
    post: &Ocf,
    conds: &[Conditional],
    m_max: usize,
    budget: u64,
) -> Result<bool, PcpError> {
    if prior.signature() != post.signature() {
        return Err(PcpError::SignatureMismatch);
    }
    let sig = prior.signature();
    let n_worlds = sig.world_count();

    // Multisets of size m over n worlds: C(n + m - 1, m).
    let multiset_count = |m: usize| -> u128 {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..m {
            num *= (n_worlds + i) as u128;
            den *= (i + 1) as u128;
        }
        num / den
    };
    let mut pairs: u128 = 0;
    for m in 1..=m_max {
        let count = multiset_count(m);
        pairs += count * count;
    }
    if pairs > budget as u128 {
        return Err(PcpError::BudgetExceeded { needed: pairs, budget });
    }

    let worlds: Vec<World> = sig.worlds().collect();
    let deltas: Vec<i64> = worlds
        .iter()
        .map(|&w| post.rank_of_world(w) as i64 - prior.rank_of_world(w) as i64)
        .collect();
    let verdicts: Vec<Vec<Verdict>> = worlds
        .iter()
        .map(|&w| conds.iter().map(|c| c.verdict(w, sig)).collect())
        .collect();

    for m in 1..=m_max {
        // Group multisets by their per-conditional count signature; balance
        // holds iff the delta sum is constant within every group.
        let mut groups: BTreeMap<Vec<(usize, usize)>, i64> = BTreeMap::new();
        for multiset in (0..n_worlds).combinations_with_replacement(m) {
            let mut counts = vec![(0usize, 0usize); conds.len()];
            let mut delta_sum = 0i64;
            for &w in &multiset {
                delta_sum += deltas[w];
                for (i, verdict) in verdicts[w].iter().enumerate() {
                    match verdict {
                        Verdict::Verifies => counts[i].0 += 1,
                        Verdict::Falsifies => counts[i].1 += 1,
                        Verdict::NotApplicable => {}
                    }
                }
            }
            match groups.get(&counts) {
                None => {
                    groups.insert(counts, delta_sum);
                }
                Some(&seen) => {
                    if seen != delta_sum {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Default pair budget for the bounded balance check.
pub const DEFAULT_BALANCE_BUDGET: u64 = 10_000_000;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Formula;
    use crate::testdata::{penguin_posterior, penguin_prior, sig_bfp};

    fn penguin_conds() -> Vec<Conditional> {
        vec![
            Conditional::new(Formula::atom("p"), Formula::atom("b")),
            Conditional::new(Formula::atom("f"), Formula::atom("p")),
            Conditional::new(Formula::not(Formula::atom("f")), Formula::atom("p")),
        ]
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn shift_respects_verdict_profile() {
        let sig = sig_bfp();
        let conds = penguin_conds();
        let gamma = GammaVector::new(vec![0, 2, -1, 0, 0, 0]);
        // b f p verifies (p|b) and (f|p) and falsifies (!f|p).
        let w = sig.world_from_values(&[true, true, true]);
        assert_eq!(shift_of(w, &conds, &gamma, &sig), -1);
        // !b f !p triggers nothing.
        let w = sig.world_from_values(&[false, true, false]);
        assert_eq!(shift_of(w, &conds, &gamma, &sig), 0);
        let zero = GammaVector::zeros(3);
        for w in sig.worlds() {
            assert_eq!(shift_of(w, &conds, &zero, &sig), 0);
        }
    }

    #[test]
    fn induced_posterior_matches_running_example() {
        let prior = penguin_prior();
        let gamma = GammaVector::new(vec![0, 2, -1, 0, 0, 0]);
        let induced = induced_ocf(&prior, &penguin_conds(), &gamma);
        assert_eq!(induced.kappa0, 0);
        assert_eq!(induced.ocf, penguin_posterior());
    }

    #[test]
    fn zero_impacts_reproduce_the_prior() {
        let prior = penguin_prior();
        let induced = induced_ocf(&prior, &penguin_conds(), &GammaVector::zeros(3));
        assert_eq!(induced.kappa0, 0);
        assert_eq!(induced.ocf, prior);
    }

    #[test]
    fn uniform_negative_shift_renormalizes() {
        let prior = penguin_prior();
        let conds = vec![Conditional::new(Formula::atom("p"), Formula::atom("b"))];
        let gamma = GammaVector::new(vec![-3, -3]);
        let induced = induced_ocf(&prior, &conds, &gamma);
        assert_eq!(induced.kappa0, 3);
        assert_eq!(induced.ocf.ranks(), &[2, 0, 1, 1, 7, 3, 5, 3]);
        assert_eq!(induced.ocf.ranks().iter().min(), Some(&0));
    }

    #[test]
    fn representability_of_the_running_example() {
        let prior = penguin_prior();
        let post = penguin_posterior();
        let conds = penguin_conds();
        let analysis = pcp_representable(&prior, &post, &conds).unwrap();
        let witness = analysis.witness().expect("change is representable");
        // The witness itself reproduces the posterior on every world.
        let sig = prior.signature();
        for w in sig.worlds() {
            let mut rhs = witness.kappa0.clone() + rat(prior.rank_of_world(w) as i64);
            for (i, cond) in conds.iter().enumerate() {
                match cond.verdict(w, sig) {
                    Verdict::Verifies => rhs += witness.gammas[i].0.clone(),
                    Verdict::Falsifies => rhs += witness.gammas[i].1.clone(),
                    Verdict::NotApplicable => {}
                }
            }
            assert_eq!(rat(post.rank_of_world(w) as i64), rhs);
        }
        // The known integral solution lies in the witness space.
        assert!(reproduces_posterior(
            &prior,
            &post,
            &conds,
            0,
            &GammaVector::new(vec![0, 2, -1, 0, 0, 0]),
        ));
        // A transposed assignment does not.
        assert!(!reproduces_posterior(
            &prior,
            &post,
            &conds,
            0,
            &GammaVector::new(vec![0, -1, 0, 2, 0, 0]),
        ));
    }

    #[test]
    fn identity_change_has_zero_witness() {
        let prior = penguin_prior();
        let conds = penguin_conds();
        let analysis = pcp_representable(&prior, &prior, &conds).unwrap();
        let witness = analysis.witness().unwrap();
        assert!(reproduces_posterior(&prior, &prior, &conds, 0, &GammaVector::zeros(3)));
        assert!(witness.is_integral() || !witness.freedom.is_empty());
    }

    #[test]
    fn off_profile_bump_is_an_obstruction() {
        let prior = penguin_prior();
        let conds = penguin_conds();
        // b f !p and b !f !p share the profile (f, -, -); bump only one.
        let mut ranks = prior.ranks().to_vec();
        ranks[1] += 1;
        let tampered = Ocf::new(sig_bfp(), ranks).unwrap();
        let analysis = pcp_representable(&prior, &tampered, &conds).unwrap();
        match analysis.obstruction().unwrap() {
            PcpObstruction::ProfileDelta { delta_a, delta_b, .. } => {
                assert_ne!(delta_a, delta_b);
            }
            other => panic!("expected a profile obstruction, got {other:?}"),
        }
    }

    #[test]
    fn integer_witness_for_running_example() {
        let prior = penguin_prior();
        let post = penguin_posterior();
        let conds = penguin_conds();
        let (kappa0, gamma) = integer_witness(&prior, &post, &conds).unwrap().unwrap();
        assert!(reproduces_posterior(&prior, &post, &conds, kappa0, &gamma));
    }

    #[test]
    fn rational_but_not_integer_witness() {
        // Three conditionals with tautological consequents whose verifying
        // sets pairwise overlap force half-integral impacts for this delta.
        let sig = Signature::new(["a", "b"]).unwrap();
        let conds = vec![
            Conditional::new(Formula::Top, Formula::atom("b")),
            Conditional::new(Formula::Top, Formula::atom("a")),
            Conditional::new(
                Formula::Top,
                Formula::or(
                    Formula::and(Formula::atom("a"), Formula::not(Formula::atom("b"))),
                    Formula::and(Formula::not(Formula::atom("a")), Formula::atom("b")),
                ),
            ),
        ];
        let prior = Ocf::uniform_zero(sig.clone());
        // Worlds in canonical order: ab, a!b, !ab, !a!b.
        let post = Ocf::new(sig, vec![1, 1, 1, 0]).unwrap();
        let analysis = pcp_representable(&prior, &post, &conds).unwrap();
        let witness = analysis.witness().expect("rationally representable");
        assert!(!witness.is_integral());
        assert!(integer_witness(&prior, &post, &conds).unwrap().is_none());
    }

    #[test]
    fn balance_check_on_running_example() {
        let prior = penguin_prior();
        let post = penguin_posterior();
        let conds = penguin_conds();
        assert!(pcp_check_definition(&prior, &post, &conds, 2, DEFAULT_BALANCE_BUDGET).unwrap());
    }

    #[test]
    fn balance_fails_at_singletons_for_off_profile_bump() {
        let prior = penguin_prior();
        let conds = penguin_conds();
        let mut ranks = prior.ranks().to_vec();
        ranks[0] += 1; // b f p, shares no profile class: still balanced at m=1?
        // b f p is alone in its class, so bumping it stays balanced.
        let lone = Ocf::new(sig_bfp(), ranks).unwrap();
        assert!(pcp_check_definition(&prior, &lone, &conds, 1, DEFAULT_BALANCE_BUDGET).unwrap());
        // Bumping one of two worlds with a shared profile breaks balance at
        // m = 1 already.
        let mut ranks = prior.ranks().to_vec();
        ranks[1] += 1; // b f !p, paired with b !f !p under (p|b)-falsification
        let shared = Ocf::new(sig_bfp(), ranks).unwrap();
        assert!(!pcp_check_definition(&prior, &shared, &conds, 1, DEFAULT_BALANCE_BUDGET).unwrap());
    }

    #[test]
    fn balance_budget_is_enforced() {
        let prior = penguin_prior();
        let post = penguin_posterior();
        let conds = penguin_conds();
        match pcp_check_definition(&prior, &post, &conds, 2, 10) {
            Err(PcpError::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn representability_implies_bounded_balance() {
        // Exhaustive over small impact grids: induced changes always pass
        // the definition check.
        let sig = Signature::new(["a", "b"]).unwrap();
        let prior = Ocf::new(sig.clone(), vec![0, 1, 2, 0]).unwrap();
        let conds = vec![Conditional::new(Formula::atom("b"), Formula::atom("a"))];
        for plus in -3..=3 {
            for minus in -3..=3 {
                let gamma = GammaVector::new(vec![plus, minus]);
                let induced = induced_ocf(&prior, &conds, &gamma);
                assert!(pcp_check_definition(
                    &prior,
                    &induced.ocf,
                    &conds,
                    2,
                    DEFAULT_BALANCE_BUDGET
                )
                .unwrap());
            }
        }
    }

    #[test]
    fn induced_changes_are_always_representable() {
        // Forward direction of the characterization, exhaustively on a
        // two-conditional instance over two atoms.
        let sig = Signature::new(["a", "b"]).unwrap();
        let prior = Ocf::new(sig.clone(), vec![1, 0, 2, 1]).unwrap();
        let conds = vec![
            Conditional::new(Formula::atom("b"), Formula::atom("a")),
            Conditional::new(Formula::atom("a"), Formula::atom("b")),
        ];
        for g in (0..4).map(|_| -3i64..=3).multi_cartesian_product() {
            let gamma = GammaVector::new(g);
            let induced = induced_ocf(&prior, &conds, &gamma);
            let analysis = pcp_representable(&prior, &induced.ocf, &conds).unwrap();
            assert!(analysis.witness().is_some(), "gamma {gamma} must be representable");
        }
    }

    #[test]
    fn signature_mismatch_is_reported() {
        let prior = penguin_prior();
        let other = Ocf::uniform_zero(Signature::new(["a"]).unwrap());
        assert_eq!(
            pcp_representable(&prior, &other, &[]).unwrap_err(),
            PcpError::SignatureMismatch
        );
    }
}
