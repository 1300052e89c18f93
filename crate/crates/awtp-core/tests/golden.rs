//! One frozen end-to-end encoding of the reference instance. Every stage
//! of the pipeline is recomputed here from first principles with local
//! modular arithmetic, so a regression in any layer (or in the seeded
//! randomness stream) moves some assertion.

use awtp_core::awtp::{AwtpConfig, AwtpParams, DecodeOutcome, Frac};
use awtp_core::frs::{format_symbols, ReceivedWord};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

const Q: u64 = 37;

fn modpow(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= Q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % Q;
        }
        b = b * b % Q;
        e >>= 1;
    }
    acc
}

fn modinv(a: u64) -> u64 {
    modpow(a, Q - 2)
}

#[test]
fn reference_encoding_is_frozen_and_recomputes_stage_by_stage() {
    let cfg = AwtpConfig {
        q: 37,
        u: 6,
        v: 2,
        n_sym: 6,
        mu: 1,
        d: 2,
        w: 4,
        b: 2,
        rho_r: Frac::new(1, 6),
        rho_w: Frac::new(1, 3),
        seed: 7,
    };
    let params = AwtpParams::new(cfg).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let message = vec![vec![5u64], vec![11u64]];
    let (cw, trace) = params.encode_traced(&message, &mut rng).unwrap();

    // frozen seeded randomness: the key and the filler coordinates
    assert_eq!(trace.amd_codeword.r, vec![1]);
    assert_eq!(trace.filler, vec![11, 5, 20, 10, 35, 6]);

    // stage 1: tag t = r^4 + x1 r + x2 r^2 over F_37, recomputed locally
    assert_eq!(trace.amd_codeword.x, message);
    let r = trace.amd_codeword.r[0];
    let t = trace.amd_codeword.t[0];
    assert_eq!(t, (modpow(r, 4) + 5 * r + 11 * modpow(r, 2)) % Q);
    assert_eq!(t, 17);

    // stage 2: systematic coordinates x1, x2, r, t exactly fill the
    // 4 payload slots, no padding at this size
    assert_eq!(trace.padded, vec![5, 11, r, t]);

    // stage 3: each block of the set point keeps its payload pair in the
    // free slots and zeroes both power forms, with the Cauchy coefficients
    // 1/((i+1)+(v+j+1)) and degrees 7, 5, 3, 2 recomputed here
    assert_eq!(trace.set_point, vec![24, 25, 5, 11, 36, 11, 1, 17]);
    let degrees = [7u64, 5, 3, 2];
    for (blk, payload) in trace.set_point.chunks(4).zip(trace.padded.chunks(2)) {
        assert_eq!(&blk[2..], payload);
        for i in 0..2u64 {
            let mut acc = 0u64;
            for (j, (&x, &d)) in blk.iter().zip(&degrees).enumerate() {
                let a = modinv((i + 1 + 2 + j as u64 + 1) % Q);
                acc = (acc + a * modpow(x, d)) % Q;
            }
            assert_eq!(acc, 0, "form {i} does not vanish on {blk:?}");
        }
    }

    // stage 4: polynomial coefficients are the set point then the filler
    assert_eq!(trace.coeffs[..8], trace.set_point[..]);
    assert_eq!(trace.coeffs[8..], trace.filler[..]);

    // stage 5: symbol j carries the polynomial at g^(6j), .., g^(6j+5)
    // where g = 2; confirm g really has multiplicative order 36 first
    let g = params.frs().generator();
    assert_eq!(g, 2);
    assert!((1..36).all(|e| modpow(g, e) != 1) && modpow(g, 36) == 1);
    for (j, sym) in cw.symbols.iter().enumerate() {
        assert_eq!(sym.len(), 6);
        for (s, &val) in sym.iter().enumerate() {
            let point = modpow(g, (6 * j + s) as u64);
            let mut acc = 0u64;
            for (m, &c) in trace.coeffs.iter().enumerate() {
                acc = (acc + c * modpow(point, m as u64)) % Q;
            }
            assert_eq!(val, acc, "symbol {j} slot {s}");
        }
    }

    // the complete artifact, byte for byte
    let frozen = include_str!("data/reference_codeword.txt");
    assert_eq!(format_symbols(&cw.symbols), frozen);

    // and the pipeline inverts it
    let outcome = params
        .decode(&ReceivedWord {
            symbols: cw.symbols.clone(),
        })
        .unwrap();
    assert_eq!(outcome, DecodeOutcome::Message(message));
}
