//! Rational-integer helpers: primes, factorization, modular arithmetic.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// All primes `<= n` by a plain sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime_u64(k) {
        k += 1;
    }
    k
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd_i128(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

pub fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd_i128(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Residue of a big integer modulo a machine prime.
pub fn big_mod_u64(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().unwrap()
}

/// Legendre symbol for odd prime `p`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = &one + &one;
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Prime factorization of `|n|` as (prime, exponent) pairs, ascending.
pub fn factor_bigint(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.magnitude().clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if n.is_zero() {
        return Vec::new();
    }
    for p in primes_up_to(10_000) {
        let pb = BigUint::from(p);
        if (&n % &pb).is_zero() {
            let mut e = 0;
            while (&n % &pb).is_zero() {
                n /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
        if n.is_one() {
            break;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime_big(&m) {
            if let Some(entry) = out.iter_mut().find(|(q, _)| *q == m) {
                entry.1 += 1;
            } else {
                out.push((m, 1));
            }
            continue;
        }
        if let Some(r) = perfect_power_root(&m) {
            let (root, k) = r;
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        let d = pollard_brent(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    out.into_iter()
        .map(|(p, e)| (BigInt::from_biguint(Sign::Plus, p), e))
        .collect()
}

fn perfect_power_root(m: &BigUint) -> Option<(BigUint, u32)> {
    let bits = m.bits() as u32;
    for k in (2..=bits.min(64)).rev() {
        let r = m.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *m {
            return Some((r, k));
        }
    }
    None
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor_bigint(&BigInt::from(n))
        .into_iter()
        .map(|(p, e)| (p.to_u64().unwrap(), e))
        .collect()
}

/// Distinct prime divisors of `|n|`.
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    factor_bigint(n).into_iter().map(|(p, _)| p).collect()
}

/// `|x|` as an exact perfect `k`-th power root, if it is one.
pub fn exact_root(x: &BigInt, k: u32) -> Option<BigInt> {
    let m = x.abs();
    let r = m.nth_root(k);
    (r.pow(k) == m).then_some(r)
}

pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
