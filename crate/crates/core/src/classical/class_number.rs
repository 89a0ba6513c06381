//! Class numbers of positive binary quadratic forms by direct counting of
//! reduced forms.  Both the aggregate Hurwitz number (all forms) and the
//! per-discriminant primitive count are needed; the first is the sum of the
//! second over square scalings, which the tests exercise.

use num::rational::BigRational;
use num::BigInt;

/// Hurwitz class number `H(n)`: weighted count of all reduced positive
/// binary quadratic forms of discriminant `-n`, with weights 1/2 and 1/3 at
/// the square and hexagonal classes, and `H(0) = -1/12`.
///
/// Zero for `n` not congruent to 0 or 3 mod 4.
pub fn hurwitz_class_number(n: u64) -> BigRational {
    if n == 0 {
        return BigRational::new(BigInt::from(-1), BigInt::from(12));
    }
    if n % 4 != 0 && n % 4 != 3 {
        return BigRational::from(BigInt::from(0));
    }
    weighted_form_count(n, false)
}

/// Weighted count of reduced *primitive* forms of discriminant `D < 0`
/// (the class number `h(D)` divided by half the unit count: `1/3` at
/// `D = -3`, `1/2` at `D = -4`, plain `h` otherwise).
pub fn class_number_weighted_primitive(d: i64) -> BigRational {
    assert!(d < 0, "need a negative discriminant");
    let n = (-d) as u64;
    assert!(n % 4 == 0 || n % 4 == 3, "discriminant must be 0 or 1 mod 4");
    weighted_form_count(n, true)
}

/// Reduced forms `(a, b, c)` with `b^2 - 4ac = -n`, `-a < b <= a <= c`,
/// and `b >= 0` when `a == c`.
fn weighted_form_count(n: u64, primitive_only: bool) -> BigRational {
    let mut sixth_weight_total: i64 = 0; // count forms in units of 1/6
    let mut a: i64 = 1;
    let n = n as i64;
    while 3 * a * a <= n {
        for b in (-a + 1)..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue;
            }
            if primitive_only && gcd3(a, b.abs(), c) != 1 {
                continue;
            }
            sixth_weight_total += if a == b && b == c {
                2 // weight 1/3
            } else if a == c && b == 0 {
                3 // weight 1/2
            } else {
                6
            };
        }
        a += 1;
    }
    BigRational::new(BigInt::from(sixth_weight_total), BigInt::from(6))
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn g(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            g(b, a % b)
        }
    }
    g(g(a, b), c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_hurwitz_values() {
        let table = [
            (0u64, ratio(-1, 12)),
            (3, ratio(1, 3)),
            (4, ratio(1, 2)),
            (7, ratio(1, 1)),
            (8, ratio(1, 1)),
            (11, ratio(1, 1)),
            (12, ratio(4, 3)),
            (15, ratio(2, 1)),
            (16, ratio(3, 2)),
            (19, ratio(1, 1)),
            (20, ratio(2, 1)),
            (23, ratio(3, 1)),
            (24, ratio(2, 1)),
            (27, ratio(4, 3)),
            (28, ratio(2, 1)),
        ];
        for (n, expect) in table {
            assert_eq!(hurwitz_class_number(n), expect, "H({n})");
        }
        assert_eq!(hurwitz_class_number(5), ratio(0, 1));
        assert_eq!(hurwitz_class_number(13), ratio(0, 1));
    }

    #[test]
    fn primitive_values() {
        assert_eq!(class_number_weighted_primitive(-3), ratio(1, 3));
        assert_eq!(class_number_weighted_primitive(-4), ratio(1, 2));
        assert_eq!(class_number_weighted_primitive(-12), ratio(1, 1));
        assert_eq!(class_number_weighted_primitive(-27), ratio(1, 1));
        assert_eq!(class_number_weighted_primitive(-16), ratio(1, 1));
    }

    #[test]
    fn hurwitz_aggregates_primitive_counts() {
        // H(n) = sum over f with f^2 | n and n/f^2 = 0,3 mod 4 of h_w(-n/f^2)
        for n in 1..200u64 {
            if n % 4 != 0 && n % 4 != 3 {
                continue;
            }
            let mut total = BigRational::from(BigInt::from(0));
            let mut f = 1u64;
            while f * f <= n {
                if n % (f * f) == 0 {
                    let m = n / (f * f);
                    if m % 4 == 0 || m % 4 == 3 {
                        total += class_number_weighted_primitive(-(m as i64));
                    }
                }
                f += 1;
            }
            assert_eq!(hurwitz_class_number(n), total, "n = {n}");
        }
    }
}
