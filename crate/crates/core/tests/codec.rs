use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relaycap::channel::DiscreteRelayChannel;
use relaycap::codec::{
    build_codebook, relay_forward, run_trial, simulate_haf, BinHash, DecodeOutcome, Decoder, ErrorEvent, SimParams,
};
use relaycap::info::{Pmf, Typicality, TypicalityTest};

fn state_channel(p: f64) -> DiscreteRelayChannel {
    DiscreteRelayChannel::bsc_state(p).unwrap()
}

/// Y = X over a binary alphabet; the relay sees nothing.
fn noiseless() -> DiscreteRelayChannel {
    DiscreteRelayChannel::new(2, 2, 1, vec![1.0, 0.0, 0.0, 1.0]).unwrap()
}

#[test]
fn bins_are_uniform_chi_square() {
    // 0.99 quantile of chi-square with 63 degrees of freedom
    const CRITICAL: f64 = 92.010;
    // long sequences so that repeated inputs, which inflate the statistic
    // even for an ideal random function, are negligible
    let hash = BinHash::new(40, 6, 2024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = [0u32; 64];
    let total = 100_000;
    for _ in 0..total {
        let seq: Vec<u8> = (0..40).map(|_| rng.random_range(0..2)).collect();
        counts[relay_forward(&seq, &hash).unwrap() as usize] += 1;
    }
    let expected = total as f64 / 64.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(stat < CRITICAL, "chi-square {stat}");
}

fn collisions(u: &[u8], v: &[u8], bits: u32, seeds: std::ops::Range<u64>) -> usize {
    seeds
        .filter(|&s| {
            let h = BinHash::new(u.len(), bits, s).unwrap();
            relay_forward(u, &h).unwrap() == relay_forward(v, &h).unwrap()
        })
        .count()
}

#[test]
fn single_symbol_change_collides_at_nominal_rate() {
    let u = [0u8, 1, 1, 0, 1, 0, 0, 1, 1, 1];
    let mut v = u;
    v[3] = 1;
    for bits in [1, 2] {
        let rate = collisions(&u, &v, bits, 0..10_000) as f64 / 10_000.0;
        assert!(rate <= 0.5f64.powi(bits as i32) * 1.05, "bits {bits}: {rate}");
    }
}

#[test]
fn pooled_pair_collisions_at_six_bits() {
    // 16 pairs, each differing in one position, over 10^4 seeds apiece
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut hits = 0;
    for k in 0..16u64 {
        let u: Vec<u8> = (0..12).map(|_| rng.random_range(0..3)).collect();
        let mut v = u.clone();
        let i = rng.random_range(0..12);
        v[i] = (v[i] + 1 + rng.random_range(0..2)) % 3;
        hits += collisions(&u, &v, 6, k * 10_000..(k + 1) * 10_000);
    }
    let rate = hits as f64 / 160_000.0;
    assert!(rate <= 1.05 / 64.0, "{rate}");
}

#[test]
fn bin_collisions_fall_as_hash_widens() {
    let ch = state_channel(0.2);
    let relay = ch.validate().unwrap();
    let px = Pmf::uniform(2);
    let joint = ch.induced_joint(&px).unwrap().marginal(&[0, 1]).unwrap();
    let test = TypicalityTest::new(&joint, 0.25, Typicality::Weak).unwrap();
    let cb = build_codebook(&px, 12, 0.5, 31).unwrap();
    let sampler = ch.sampler();
    let count = |bits: u32| -> usize {
        let mut events = 0;
        for hash_seed in 0..20 {
            let hash = BinHash::new(12, bits, 1000 + hash_seed).unwrap();
            let decoder = Decoder::new(&cb, &relay, &test, &hash).unwrap();
            for realization in 0..200u64 {
                // the same noise for every hash
                let mut rng = ChaCha8Rng::seed_from_u64(realization);
                let message = rng.random_range(0..cb.num_words());
                let r = run_trial(&decoder, &sampler, message, &mut rng).unwrap();
                events += usize::from(r.event == Some(ErrorEvent::BinCollision));
            }
        }
        events
    };
    let counts: Vec<usize> = [0, 2, 4, 6].into_iter().map(count).collect();
    assert!(counts[0] > 0, "{counts:?}");
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
}

#[test]
fn decoded_index_reproduces_the_bin() {
    let ch = state_channel(0.11);
    let relay = ch.validate().unwrap();
    let px = Pmf::uniform(2);
    let joint = ch.induced_joint(&px).unwrap().marginal(&[0, 1]).unwrap();
    let test = TypicalityTest::new(&joint, 0.25, Typicality::Weak).unwrap();
    let sampler = ch.sampler();
    let mut decoded = 0;
    for seed in 0..50u64 {
        let cb = build_codebook(&px, 10, 0.4, seed).unwrap();
        let hash = BinHash::new(10, 3, seed + 500).unwrap();
        let decoder = Decoder::new(&cb, &relay, &test, &hash).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 900);
        for _ in 0..20 {
            let message = rng.random_range(0..cb.num_words());
            let (ys, y1s) = sampler.sample(cb.word(message), &mut rng).unwrap();
            let bin = relay_forward(&y1s, &hash).unwrap();
            if let DecodeOutcome::Decoded(w) = decoder.decode(&ys, bin).unwrap().outcome {
                let again = relay
                    .apply(cb.word(w), &ys)
                    .expect("list members have defined relay output");
                assert_eq!(relay_forward(&again, &hash).unwrap(), bin);
                decoded += 1;
            }
        }
    }
    assert!(decoded > 0);
}

#[test]
fn noiseless_error_vanishes_with_block_length() {
    let ch = noiseless();
    let px = Pmf::uniform(2);
    let pe: Vec<f64> = [8, 12, 16]
        .into_iter()
        .map(|n| {
            simulate_haf(&ch, &px, &SimParams::new(n, 0.5, 0.0, 0.25, 2000, 5))
                .unwrap()
                .pe_hat
        })
        .collect();
    assert!(pe[2] < pe[0], "{pe:?}");
    assert!(pe[2] <= 0.01, "{pe:?}");
}

#[test]
fn report_is_deterministic_across_thread_counts() {
    let ch = state_channel(0.2);
    let px = Pmf::uniform(2);
    let params = SimParams::new(10, 0.3, 0.2, 0.25, 500, 42);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_haf(&ch, &px, &params).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&simulate_haf(&ch, &px, &params).unwrap()).unwrap()
    );
    let other = simulate_haf(
        &ch,
        &px,
        &SimParams {
            master_seed: 43,
            ..params
        },
    )
    .unwrap();
    assert_ne!(one, other);
}

#[test]
fn report_accounting() {
    let ch = state_channel(0.2);
    let px = Pmf::uniform(2);
    for fixed in [false, true] {
        let params = SimParams {
            fixed_codebook: fixed,
            ..SimParams::new(12, 0.4, 0.2, 0.25, 400, 9)
        };
        let r = simulate_haf(&ch, &px, &params).unwrap();
        assert_eq!(r.errors, r.err_a + r.err_b + r.err_c + r.err_none);
        assert!(r.errors <= r.trials);
        assert_eq!(r.pe_hat, r.errors as f64 / r.trials as f64);
        assert!(r.wilson95[0] <= r.pe_hat && r.pe_hat <= r.wilson95[1]);
        assert_eq!(r.params.num_words, 1 << 5);
        assert_eq!(r.params.bin_bits, 2);
        assert_eq!(r.params.fixed_codebook, fixed);
    }
}

#[test]
fn strong_typicality_is_selectable() {
    let ch = state_channel(0.2);
    let px = Pmf::uniform(2);
    let params = SimParams {
        typicality: Typicality::Strong,
        ..SimParams::new(8, 0.25, 0.2, 0.25, 300, 3)
    };
    let r = simulate_haf(&ch, &px, &params).unwrap();
    assert_eq!(r.params.typicality, Typicality::Strong);
    // strict per-cell typicality rejects most short blocks outright
    assert!(r.err_a as f64 > 0.5 * r.trials as f64, "{r:?}");
}
