//! Modular gcd of integer polynomials: reduce modulo 61-bit primes, rebuild
//! by CRT, confirm by exact division. Results are exact; the prime images
//! only steer the search.

use super::binary::{content, primitive, trim};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const MAX_PRIMES: usize = 400;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic for all 64-bit inputs with these bases.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 61) - 1;
    std::iter::from_fn(move || {
        while !is_prime(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

fn reduce(a: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = a.iter().map(|c| c.mod_floor(&pb).to_u64().expect("reduced below p")).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Monic gcd over `F_p`.
fn gcd_mod(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut x, mut y) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    while !y.is_empty() {
        let inv = pow_mod(*y.last().expect("nonempty"), p - 2, p);
        let dy = y.len() - 1;
        while x.len() > dy {
            let dx = x.len() - 1;
            let q = mul_mod(x[dx], inv, p);
            if q != 0 {
                for (j, &yj) in y.iter().enumerate() {
                    let t = mul_mod(q, yj, p);
                    let k = dx - dy + j;
                    x[k] = if x[k] >= t { x[k] - t } else { x[k] + p - t };
                }
            }
            while x.last() == Some(&0) {
                x.pop();
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    if let Some(&lc) = x.last() {
        let inv = pow_mod(lc, p - 2, p);
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// `a / b` over the integers when the division is exact.
fn div_checked(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let (qc, rem) = r[dr].div_rem(&b[db]);
        if !rem.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &qc * bj;
        }
        q[dr - db] = qc;
        trim(&mut r);
    }
    r.is_empty().then_some(q)
}

/// Gcd of two trimmed nonconstant integer polynomials, primitive with a
/// positive leading coefficient and times the gcd of the contents. `None`
/// if the prime budget runs out.
pub(crate) fn upoly_gcd_modular(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let cont = content(a).gcd(&content(b));
    let a = primitive(a);
    let b = primitive(b);
    let beta = a.last().expect("nonempty").gcd(b.last().expect("nonempty"));
    let mut best_deg = usize::MAX;
    let mut acc: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut last: Option<Vec<BigInt>> = None;
    for p in primes().take(MAX_PRIMES) {
        let pb = BigInt::from(p);
        let beta_p = beta.mod_floor(&pb).to_u64().expect("reduced");
        if beta_p == 0 {
            continue;
        }
        let g = gcd_mod(reduce(&a, p), reduce(&b, p), p);
        let d = g.len() - 1;
        if d == 0 {
            return Some(vec![cont]);
        }
        if d > best_deg {
            continue;
        }
        let img: Vec<u64> = g.iter().map(|&c| mul_mod(c, beta_p, p)).collect();
        if d < best_deg {
            best_deg = d;
            acc = img.iter().map(|&c| BigInt::from(c)).collect();
            modulus = pb;
            last = None;
            continue;
        }
        // CRT: x ≡ acc (mod M), x ≡ img (mod p).
        let m_inv = BigInt::from(pow_mod((&modulus % &pb).to_u64().expect("reduced"), p - 2, p));
        for (x, &r) in acc.iter_mut().zip(&img) {
            let diff = (BigInt::from(r) - &*x).mod_floor(&pb);
            let t = (diff * &m_inv).mod_floor(&pb);
            *x += &modulus * t;
        }
        modulus *= &pb;
        let half = &modulus >> 1;
        let sym: Vec<BigInt> = acc.iter().map(|x| if x > &half { x - &modulus } else { x.clone() }).collect();
        if last.as_ref() == Some(&sym) {
            let cand = primitive(&sym);
            if div_checked(&a, &cand).is_some() && div_checked(&b, &cand).is_some() {
                let sign = if cand.last().expect("nonempty").is_negative() { -BigInt::one() } else { BigInt::one() };
                return Some(cand.iter().map(|c| c * &sign * &cont).collect());
            }
        }
        last = Some(sym);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmaps::binary::{upoly_gcd_prs, upoly_mul};
    use proptest::prelude::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert_eq!(ps[0], (1u64 << 61) - 1);
        assert!(ps.iter().all(|&p| is_prime(p)));
        assert!(!is_prime(561) && is_prime(7919));
    }

    #[test]
    fn shared_factor_with_large_coefficients() {
        let big = BigInt::from(3u64).pow(90);
        let f = vec![big.clone(), BigInt::from(-7), BigInt::one()];
        let a = upoly_mul(&f, &bi(&[5, 0, 2]));
        let b = upoly_mul(&f, &bi(&[-1, 4]));
        assert_eq!(upoly_gcd_modular(&a, &b).unwrap(), f);
    }

    proptest! {
        #[test]
        fn agrees_with_prs(
            f in prop::collection::vec(-20i64..=20, 1..4),
            g in prop::collection::vec(-20i64..=20, 2..5),
            h in prop::collection::vec(-20i64..=20, 2..5),
        ) {
            let (mut f, mut g, mut h) = (bi(&f), bi(&g), bi(&h));
            trim(&mut f);
            trim(&mut g);
            trim(&mut h);
            prop_assume!(!f.is_empty() && g.len() > 1 && h.len() > 1);
            let a = upoly_mul(&f, &g);
            let b = upoly_mul(&f, &h);
            prop_assume!(a.len() > 1 && b.len() > 1);
            prop_assert_eq!(upoly_gcd_modular(&a, &b).unwrap(), upoly_gcd_prs(&a, &b));
        }
    }
}
