//! Elementary multiplicative arithmetic shared by the trace and Petersson
//! machinery.

/// Prime factorization `[(p, e), ...]` with ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Every prime divisor appears at least cubed.  Vacuously true for 1.
pub fn is_cubefull(n: u64) -> bool {
    factorize(n).iter().all(|(_, e)| *e >= 3)
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|(_, e)| *e == 1)
}

/// Moebius function.
pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|(_, e)| *e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let snapshot = out.clone();
        let mut pe = 1;
        for _ in 0..e {
            pe *= p;
            out.extend(snapshot.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Squarefree divisors, ascending.
pub fn squarefree_divisors(n: u64) -> Vec<u64> {
    divisors(n).into_iter().filter(|d| is_squarefree(*d)).collect()
}

/// The signed double-divisor expansion `(d, e, mu(d) mu(e))`; zero-weight
/// pairs never appear because only squarefree divisors are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobiusPair {
    pub d: u64,
    pub e: u64,
    pub weight: i64,
}

pub fn mobius_pairs(n: u64) -> Vec<MobiusPair> {
    let sf = squarefree_divisors(n);
    let mut out = Vec::with_capacity(sf.len() * sf.len());
    for &d in &sf {
        for &e in &sf {
            out.push(MobiusPair {
                d,
                e,
                weight: mobius(d) * mobius(e),
            });
        }
    }
    out
}

/// `mu * mu` (Dirichlet convolution): -2 at primes, +1 at prime squares,
/// 0 at higher powers; multiplicative.
pub fn mobius_convolved_mobius(n: u64) -> i64 {
    let mut acc = 1i64;
    for (_, e) in factorize(n) {
        acc *= match e {
            1 => -2,
            2 => 1,
            _ => 0,
        };
    }
    acc
}

/// Index `psi(N) = N prod_(p|N) (1 + 1/p)`.
pub fn psi(n: u64) -> u64 {
    let mut acc = n;
    for (p, _) in factorize(n) {
        acc = acc / p * (p + 1);
    }
    acc
}

pub fn euler_phi(n: u64) -> u64 {
    let mut acc = n;
    for (p, _) in factorize(n) {
        acc = acc / p * (p - 1);
    }
    acc
}

/// Number of cusps: `sum_(c|N) phi(gcd(c, N/c))`.
pub fn cusp_count(n: u64) -> u64 {
    divisors(n)
        .into_iter()
        .map(|c| euler_phi(gcd(c, n / c)))
        .sum()
}

/// Elliptic point counts: solutions of `x^2 + 1 = 0` mod N.
pub fn epsilon2(n: u64) -> u64 {
    let mut acc = 1u64;
    for (p, e) in factorize(n) {
        acc *= match (p % 4, p, e) {
            (_, 2, 1) => 1,
            (_, 2, _) => 0,
            (1, _, _) => 2,
            _ => 0,
        };
    }
    acc
}

/// Solutions of `x^2 + x + 1 = 0` mod N.
pub fn epsilon3(n: u64) -> u64 {
    let mut acc = 1u64;
    for (p, e) in factorize(n) {
        acc *= match (p % 3, p, e) {
            (_, 3, 1) => 1,
            (_, 3, _) => 0,
            (1, _, _) => 2,
            _ => 0,
        };
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Kronecker symbol `(d | p)` for prime p.
pub fn kronecker_at_prime(d: i64, p: u64) -> i64 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 => 1,
            5 => -1,
            _ if d % 2 == 0 => 0,
            3 | 7 => {
                // odd d: (d|2) = (2|d) = ±1 by d mod 8
                if d.rem_euclid(8) == 7 { 1 } else { -1 }
            }
            _ => unreachable!(),
        };
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    // Euler's criterion
    let mut acc: u64 = 1;
    let mut base = r % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}
