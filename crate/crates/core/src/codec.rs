//! Hash-and-forward at finite block length.
//!
//! The transmitter sends a random codeword, the relay sends a hash (bin
//! index) of its observation Y1^n, and the receiver keeps the codewords
//! jointly typical with Y^n, recomputes Y1^n(w) = f(X^n(w), Y^n) for each,
//! and accepts the unique one whose bin matches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSampler, DiscreteRelayChannel, RelayFunction, AXIS_X, AXIS_Y};
use crate::error::{Error, Result};
use crate::info::{JointPmf, Pmf, Symbol, Typicality, TypicalityTest};

pub const SIM_REPORT_SCHEMA: &str = "relaycap.sim-report/1";

/// 2^61 - 1.
const MERSENNE_61: u64 = (1 << 61) - 1;

pub const MAX_CODEBOOK_BITS: u32 = 24;
pub const MAX_SIM_BLOCK: usize = 20;
pub const MAX_SIM_CODEBOOK_BITS: u32 = 20;
pub const MAX_SIM_TRIALS: usize = 1_000_000;
pub const MAX_BIN_BITS: u32 = 40;

/// Slack for floating products such as n * R that should be integers.
const ROUNDING_SLACK: f64 = 1e-9;

/// Codebook exponent ceil(n R).
pub fn codebook_bits(n: usize, rate: f64) -> u32 {
    (n as f64 * rate - ROUNDING_SLACK).ceil().max(0.0) as u32
}

/// Hash width floor(n R0).
pub fn bin_bits(n: usize, r0: f64) -> u32 {
    (n as f64 * r0 + ROUNDING_SLACK).floor().max(0.0) as u32
}

/// SplitMix64 finalizer over (master, index, stream).
pub fn derive_seed(master: u64, index: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    num_words: usize,
    words: Vec<Symbol>,
    gen_seed: u64,
    source: Pmf,
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_words(&self) -> usize {
        self.num_words
    }

    pub fn gen_seed(&self) -> u64 {
        self.gen_seed
    }

    pub fn source(&self) -> &Pmf {
        &self.source
    }

    pub fn word(&self, w: usize) -> &[Symbol] {
        &self.words[w * self.n..(w + 1) * self.n]
    }

    pub fn words(&self) -> impl Iterator<Item = &[Symbol]> {
        self.words.chunks(self.n)
    }
}

/// 2^ceil(nR) codewords with i.i.d. symbols drawn from `px`.
pub fn build_codebook(px: &Pmf, n: usize, rate: f64, seed: u64) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be at least 1".into()));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
    }
    let bits = codebook_bits(n, rate);
    if bits > MAX_CODEBOOK_BITS {
        return Err(Error::Guard(format!(
            "codebook of 2^{bits} words exceeds 2^{MAX_CODEBOOK_BITS}"
        )));
    }
    let num_words = 1usize << bits;
    let mut cdf = Vec::with_capacity(px.len());
    let mut acc = 0.0;
    for &p in px.probs() {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..num_words * n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            let mut s = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            while px.probs()[s] == 0.0 && s > 0 {
                s -= 1;
            }
            s as Symbol
        })
        .collect();
    Ok(Codebook {
        n,
        num_words,
        words,
        gen_seed: seed,
        source: px.clone(),
    })
}

/// Seeded hash of relay sequences onto 2^binBits bins.
///
/// `h(u) = ((b + sum_i a_i u_i) mod (2^61 - 1)) mod 2^binBits` with
/// coefficients uniform on the field. The affine map is pairwise independent
/// over sequences; the final reduction adds a relative bias of at most
/// 2^(binBits - 61) to collision probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinHash {
    hash_seed: u64,
    n: usize,
    bin_bits: u32,
    coeffs: Vec<u64>,
    offset: u64,
}

impl BinHash {
    pub fn new(n: usize, bin_bits: u32, hash_seed: u64) -> Result<Self> {
        if bin_bits > MAX_BIN_BITS {
            return Err(Error::Guard(format!("{bin_bits} hash bits exceeds {MAX_BIN_BITS}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hash_seed);
        let coeffs = (0..n).map(|_| rng.random_range(0..MERSENNE_61)).collect();
        let offset = rng.random_range(0..MERSENNE_61);
        Ok(Self {
            hash_seed,
            n,
            bin_bits,
            coeffs,
            offset,
        })
    }

    /// Hash sized for link rate `r0`: floor(n R0) bits.
    pub fn for_link_rate(n: usize, r0: f64, hash_seed: u64) -> Result<Self> {
        if !(r0 >= 0.0) || !r0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "link rate must be nonnegative, got {r0}"
            )));
        }
        Self::new(n, bin_bits(n, r0), hash_seed)
    }

    pub fn bin_bits(&self) -> u32 {
        self.bin_bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hash_seed(&self) -> u64 {
        self.hash_seed
    }

    pub fn num_bins(&self) -> u64 {
        1u64 << self.bin_bits
    }

    pub(crate) fn bin_unchecked(&self, seq: &[Symbol]) -> u64 {
        let mut acc = self.offset as u128;
        for (&a, &u) in self.coeffs.iter().zip(seq) {
            acc += a as u128 * u as u128;
        }
        let v = (acc % MERSENNE_61 as u128) as u64;
        v & (self.num_bins() - 1)
    }
}

/// Bin index the relay sends for its observation `y1s`.
pub fn relay_forward(y1s: &[Symbol], hash: &BinHash) -> Result<u64> {
    if y1s.len() != hash.n {
        return Err(Error::LengthMismatch {
            left: y1s.len(),
            right: hash.n,
        });
    }
    Ok(hash.bin_unchecked(y1s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome", content = "index")]
pub enum DecodeOutcome {
    Decoded(usize),
    /// No codeword is jointly typical with the received sequence.
    EmptyList,
    /// Typical codewords exist but none matches the bin.
    EmptyBinMatch,
    /// More than one typical codeword matches the bin.
    Ambiguous,
}

#[derive(Debug, Clone)]
pub struct ListMember {
    pub index: usize,
    pub relay: Vec<Symbol>,
    pub bin: u64,
}

#[derive(Debug, Clone)]
pub struct ListDecode {
    pub members: Vec<ListMember>,
    /// Typical codewords dropped because f was undefined somewhere.
    pub undefined_lookups: usize,
    pub outcome: DecodeOutcome,
}

/// List decoder with a relay hash check.
pub struct Decoder<'a> {
    codebook: &'a Codebook,
    relay: &'a RelayFunction,
    typicality: &'a TypicalityTest,
    hash: &'a BinHash,
}

impl<'a> Decoder<'a> {
    pub fn new(
        codebook: &'a Codebook,
        relay: &'a RelayFunction,
        typicality: &'a TypicalityTest,
        hash: &'a BinHash,
    ) -> Result<Self> {
        if hash.n != codebook.n {
            return Err(Error::LengthMismatch {
                left: hash.n,
                right: codebook.n,
            });
        }
        if codebook.source.len() > relay.size_x() {
            return Err(Error::ShapeMismatch("codebook alphabet exceeds |X|".into()));
        }
        Ok(Self {
            codebook,
            relay,
            typicality,
            hash,
        })
    }

    pub fn decode(&self, ys: &[Symbol], bin: u64) -> Result<ListDecode> {
        if ys.len() != self.codebook.n {
            return Err(Error::LengthMismatch {
                left: ys.len(),
                right: self.codebook.n,
            });
        }
        if let Some(&y) = ys.iter().find(|&&y| y as usize >= self.relay.size_y()) {
            return Err(Error::SymbolOutOfRange {
                symbol: y as usize,
                size: self.relay.size_y(),
            });
        }
        let mut members = Vec::new();
        let mut undefined = 0;
        for (w, xs) in self.codebook.words().enumerate() {
            if !self.typicality.check_unchecked(xs, ys) {
                continue;
            }
            match self.relay.apply(xs, ys) {
                Some(relay) => {
                    let b = self.hash.bin_unchecked(&relay);
                    members.push(ListMember {
                        index: w,
                        relay,
                        bin: b,
                    });
                }
                None => undefined += 1,
            }
        }
        let mut matches = members.iter().filter(|m| m.bin == bin);
        let outcome = match (matches.next(), matches.next()) {
            _ if members.is_empty() => DecodeOutcome::EmptyList,
            (None, _) => DecodeOutcome::EmptyBinMatch,
            (Some(m), None) => DecodeOutcome::Decoded(m.index),
            (Some(_), Some(_)) => DecodeOutcome::Ambiguous,
        };
        Ok(ListDecode {
            members,
            undefined_lookups: undefined,
            outcome,
        })
    }
}

/// Decodes `ys` given the relay's bin index.
#[allow(clippy::too_many_arguments)]
pub fn haf_decode(
    ys: &[Symbol],
    bin: u64,
    codebook: &Codebook,
    relay: &RelayFunction,
    joint_xy: &JointPmf,
    eps: f64,
    typicality: Typicality,
    hash: &BinHash,
) -> Result<DecodeOutcome> {
    let test = TypicalityTest::new(joint_xy, eps, typicality)?;
    Ok(Decoder::new(codebook, relay, &test, hash)?.decode(ys, bin)?.outcome)
}

/// Error sources of a failed trial, attributed with precedence a > b > c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorEvent {
    /// (a) the transmitted codeword is not jointly typical with Y^n.
    Atypical,
    /// (b) another list member has a different relay sequence in the same bin.
    BinCollision,
    /// (c) another list member induces the same relay sequence.
    SameRelayOutput,
    /// Failure matching none of the above.
    Unattributed,
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub message: usize,
    pub outcome: DecodeOutcome,
    pub event: Option<ErrorEvent>,
    pub list_size: usize,
    pub undefined_lookups: usize,
}

/// Sends `message`, passes it through the channel and decodes.
pub fn run_trial<R: Rng + ?Sized>(
    decoder: &Decoder,
    sampler: &ChannelSampler,
    message: usize,
    rng: &mut R,
) -> Result<TrialResult> {
    let xs = decoder.codebook.word(message);
    let (ys, y1s) = sampler.sample(xs, rng)?;
    let bin = decoder.hash.bin_unchecked(&y1s);
    let list = decoder.decode(&ys, bin)?;
    let event = if list.outcome == DecodeOutcome::Decoded(message) {
        None
    } else if !decoder.typicality.check_unchecked(xs, &ys) {
        Some(ErrorEvent::Atypical)
    } else {
        let others = || list.members.iter().filter(|m| m.index != message);
        if others().any(|m| m.bin == bin && m.relay != y1s) {
            Some(ErrorEvent::BinCollision)
        } else if others().any(|m| m.relay == y1s) {
            Some(ErrorEvent::SameRelayOutput)
        } else {
            Some(ErrorEvent::Unattributed)
        }
    };
    Ok(TrialResult {
        message,
        outcome: list.outcome,
        event,
        list_size: list.members.len(),
        undefined_lookups: list.undefined_lookups,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimParams {
    pub n: usize,
    pub rate: f64,
    pub r0: f64,
    pub eps: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub typicality: Typicality,
    pub fixed_codebook: bool,
}

impl SimParams {
    pub fn new(n: usize, rate: f64, r0: f64, eps: f64, trials: usize, master_seed: u64) -> Self {
        Self {
            n,
            rate,
            r0,
            eps,
            trials,
            master_seed,
            typicality: Typicality::default(),
            fixed_codebook: false,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SIM_BLOCK {
            return Err(Error::Guard(format!(
                "block length {} outside 1..={MAX_SIM_BLOCK}",
                self.n
            )));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rate must be positive, got {}",
                self.rate
            )));
        }
        if codebook_bits(self.n, self.rate) > MAX_SIM_CODEBOOK_BITS {
            return Err(Error::Guard(format!(
                "2^{} codewords exceeds 2^{MAX_SIM_CODEBOOK_BITS}",
                codebook_bits(self.n, self.rate)
            )));
        }
        if !(self.r0 >= 0.0) || !self.r0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "link rate must be nonnegative, got {}",
                self.r0
            )));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.trials == 0 || self.trials > MAX_SIM_TRIALS {
            return Err(Error::Guard(format!(
                "trials {} outside 1..={MAX_SIM_TRIALS}",
                self.trials
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReportParams {
    pub n: usize,
    pub rate: f64,
    /// ceil(nR) / n, the rate actually simulated.
    pub effective_rate: f64,
    pub r0: f64,
    pub bin_bits: u32,
    pub num_words: usize,
    pub eps: f64,
    pub typicality: Typicality,
    pub master_seed: u64,
    pub fixed_codebook: bool,
    pub seed_scheme: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReport {
    pub schema: String,
    pub trials: usize,
    pub errors: usize,
    pub err_a: usize,
    pub err_b: usize,
    pub err_c: usize,
    pub err_none: usize,
    pub pe_hat: f64,
    pub wilson95: [f64; 2],
    pub mean_list_size: f64,
    pub undefined_lookups: usize,
    pub params: SimReportParams,
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson95(successes: usize, trials: usize) -> [f64; 2] {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return [0.0, 1.0];
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    [(center - half).max(0.0), (center + half).min(1.0)]
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    trials: usize,
    err_a: usize,
    err_b: usize,
    err_c: usize,
    err_none: usize,
    list_total: usize,
    undefined: usize,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            err_a: self.err_a + o.err_a,
            err_b: self.err_b + o.err_b,
            err_c: self.err_c + o.err_c,
            err_none: self.err_none + o.err_none,
            list_total: self.list_total + o.list_total,
            undefined: self.undefined + o.undefined,
        }
    }

    fn add(&mut self, r: &TrialResult) {
        self.trials += 1;
        self.list_total += r.list_size;
        self.undefined += r.undefined_lookups;
        match r.event {
            None => {}
            Some(ErrorEvent::Atypical) => self.err_a += 1,
            Some(ErrorEvent::BinCollision) => self.err_b += 1,
            Some(ErrorEvent::SameRelayOutput) => self.err_c += 1,
            Some(ErrorEvent::Unattributed) => self.err_none += 1,
        }
    }
}

const STREAM_CODEBOOK: u64 = 1;
const STREAM_HASH: u64 = 2;
const STREAM_CHANNEL: u64 = 3;

/// Monte Carlo estimate of the hash-and-forward error probability.
///
/// Each trial derives its codebook, hash and channel seeds from the master
/// seed and the trial index, so the report does not depend on how trials
/// are scheduled across threads.
pub fn simulate_haf(ch: &DiscreteRelayChannel, px: &Pmf, params: &SimParams) -> Result<SimReport> {
    params.check()?;
    let relay = ch.validate()?;
    let joint = ch.induced_joint(px)?.marginal(&[AXIS_X, AXIS_Y])?;
    let test = TypicalityTest::new(&joint, params.eps, params.typicality)?;
    let sampler = ch.sampler();
    let n = params.n;
    let master = params.master_seed;

    let fixed = if params.fixed_codebook {
        Some((
            build_codebook(px, n, params.rate, derive_seed(master, 0, STREAM_CODEBOOK))?,
            BinHash::for_link_rate(n, params.r0, derive_seed(master, 0, STREAM_HASH))?,
        ))
    } else {
        None
    };

    let tally = (0..params.trials)
        .into_par_iter()
        .map(|trial| -> Result<Tally> {
            let t = trial as u64;
            let owned;
            let (codebook, hash) = match &fixed {
                Some((cb, h)) => (cb, h),
                None => {
                    owned = (
                        build_codebook(px, n, params.rate, derive_seed(master, t, STREAM_CODEBOOK))?,
                        BinHash::for_link_rate(n, params.r0, derive_seed(master, t, STREAM_HASH))?,
                    );
                    (&owned.0, &owned.1)
                }
            };
            let decoder = Decoder::new(codebook, &relay, &test, hash)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, t, STREAM_CHANNEL));
            let message = rng.random_range(0..codebook.num_words());
            let result = run_trial(&decoder, &sampler, message, &mut rng)?;
            let mut tally = Tally::default();
            tally.add(&result);
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let errors = tally.err_a + tally.err_b + tally.err_c + tally.err_none;
    let bits = codebook_bits(n, params.rate);
    Ok(SimReport {
        schema: SIM_REPORT_SCHEMA.into(),
        trials: tally.trials,
        errors,
        err_a: tally.err_a,
        err_b: tally.err_b,
        err_c: tally.err_c,
        err_none: tally.err_none,
        pe_hat: errors as f64 / tally.trials as f64,
        wilson95: wilson95(errors, tally.trials),
        mean_list_size: tally.list_total as f64 / tally.trials as f64,
        undefined_lookups: tally.undefined,
        params: SimReportParams {
            n,
            rate: params.rate,
            effective_rate: bits as f64 / n as f64,
            r0: params.r0,
            bin_bits: bin_bits(n, params.r0),
            num_words: 1 << bits,
            eps: params.eps,
            typicality: params.typicality,
            master_seed: master,
            fixed_codebook: params.fixed_codebook,
            seed_scheme: "splitmix64(master, trial, stream); streams codebook=1 hash=2 channel=3".into(),
        },
    })
}
