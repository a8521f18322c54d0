//! Capacity of deterministic relay channels with a noiseless relay link.
//!
//! A transmitter sends X; the receiver sees Y and the relay sees
//! Y1 = f(X, Y), then forwards R0 bits per symbol to the receiver.
//!
//! * [`info`]: entropies, mutual information and typicality tests.
//! * [`channel`]: relay channel models, file formats and Gaussian closed forms.
//! * [`capacity`]: the max-min capacity, compress-and-forward rates and optimizers.
//! * [`codec`]: hash-and-forward coding and its Monte Carlo error estimate.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values, and
// dense probability arrays read most clearly with explicit index loops.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod error;
pub mod info;

pub use capacity::{
    ah_optimal, capacity_curve, cf_optimal, cf_rate, chf_rate, cutset_rate, theorem1_capacity, OptimizerConfig,
    RateCurve, RatePoint, TestChannel,
};
pub use channel::{DiscreteRelayChannel, RelayFunction, StateChannel};
pub use codec::{build_codebook, haf_decode, relay_forward, simulate_haf, BinHash, Codebook, SimParams, SimReport};
pub use error::{Error, Result};
pub use info::{JointPmf, Pmf, Typicality};
