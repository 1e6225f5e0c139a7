//! Small-integer number theory used throughout: modular arithmetic on `u64`,
//! primality, factorization and CRT.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i128, m: u64) -> Option<u64> {
    let m_i = m as i128;
    let a = a.rem_euclid(m_i);
    let (mut old_r, mut r) = (a, m_i);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m_i) as u64)
}

/// Reduce a `BigInt` into `[0, m)`.
pub fn big_mod(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Reduce a rational `num/den` modulo `m`; `None` if `den` is not a unit mod `m`.
pub fn rational_mod(num: &BigInt, den: &BigInt, m: u64) -> Option<u64> {
    let d = big_mod(den, m);
    let dinv = mod_inv(d as i128, m)?;
    Some(mod_mul(big_mod(num, m), dinv, m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
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

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Legendre symbol (a/p) for an odd prime p, in {-1, 0, 1}.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Combine residues `r_i mod m_i` (pairwise coprime moduli).
pub fn crt(residues: &[(u64, u64)]) -> (u64, u64) {
    let mut acc = (0u64, 1u64);
    for &(r, m) in residues {
        let (a, n) = acc;
        let inv = mod_inv(n as i128, m).expect("moduli must be coprime");
        let diff = (r as i128 - a as i128).rem_euclid(m as i128) as u64;
        let k = mod_mul(diff, inv, m);
        let modulus = n * m;
        acc = (((a as u128 + k as u128 * n as u128) % modulus as u128) as u64, modulus);
    }
    acc
}

/// Squarefree part and square cofactor: `n = sf * sq^2` with `sf` squarefree.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs().to_u64().expect("small integer expected");
    let mut sf = 1u64;
    let mut sq = 1u64;
    for (q, e) in factorize(m) {
        if e % 2 == 1 {
            sf *= q;
        }
        sq *= q.pow(e / 2);
    }
    m = sf;
    (BigInt::from(m) * sign, BigInt::from(sq))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let bp = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    while (&m % &bp).is_zero() {
        m /= &bp;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_crt() {
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(6, 9), None);
        assert_eq!(crt(&[(2, 3), (3, 4)]), (11, 12));
    }

    #[test]
    fn primality_matches_sieve() {
        let sieve: Vec<u64> = (2..500u64)
            .filter(|n| (2..*n).take_while(|d| d * d <= *n).all(|d| n % d != 0))
            .collect();
        assert_eq!(primes_up_to(499), sieve);
    }

    #[test]
    fn legendre_small() {
        assert_eq!(legendre(-1, 3), -1);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(10, 5), 0);
    }
}
