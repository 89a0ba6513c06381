//! Kloosterman sums `S(m, n; c)` by direct summation over invertible
//! residues.  The imaginary parts cancel in conjugate pairs, so only the
//! cosine sum is accumulated; absolute error is a small multiple of
//! `c * eps_machine`.

use std::f64::consts::TAU;

pub fn kloosterman(m: i64, n: i64, c: u64) -> f64 {
    assert!(c >= 1);
    if c == 1 {
        return 1.0;
    }
    let mut total = 0.0f64;
    for x in 1..c {
        let Some(x_inv) = inverse_mod(x, c) else {
            continue;
        };
        let phase = (m.rem_euclid(c as i64) as u64 as i128 * x as i128
            + n.rem_euclid(c as i64) as u64 as i128 * x_inv as i128)
            .rem_euclid(c as i128) as f64;
        total += (TAU * phase / c as f64).cos();
    }
    total
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}
