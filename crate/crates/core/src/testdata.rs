//! Shared fixtures for unit tests: the running penguin example.

use crate::logic::Signature;
use crate::ranking::Ocf;

pub fn sig_bfp() -> Signature {
    Signature::new(["b", "f", "p"]).unwrap()
}

/// Prior ranking over {b, f, p} in canonical world order
/// (b f p, b f !p, b !f p, b !f !p, !b f p, !b f !p, !b !f p, !b !f !p).
pub fn penguin_prior() -> Ocf {
    Ocf::new(sig_bfp(), vec![2, 0, 1, 1, 4, 0, 2, 0]).unwrap()
}

/// Posterior ranking reached from the prior in the running example.
pub fn penguin_posterior() -> Ocf {
    Ocf::new(sig_bfp(), vec![1, 2, 1, 3, 3, 0, 2, 0]).unwrap()
}
