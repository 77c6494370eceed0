//! Integer arithmetic: primality, primes in residue classes, valuations,
//! Jacobi symbols, square roots modulo `m` and Cornacchia's algorithm.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::{Error, Int, Rat, Result};

const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
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

/// Deterministic primality test for machine-size integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES_U64 {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES_U64 {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality test.
///
/// Exact below `2^64` (Miller-Rabin with the first twelve prime bases).
/// Above that, 64 Miller-Rabin rounds with pseudo-random bases, so a composite
/// is accepted with probability below `2^-128`.
pub fn is_prime(n: &Int) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    if n.is_negative() || n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut rng = StdRng::seed_from_u64(n.iter_u64_digits().fold(0x9e37_79b9, |h, w| h.rotate_left(7) ^ w));
    let span = n - BigInt::from(3u8);
    'rounds: for _ in 0..64 {
        let r: u64 = rng.random();
        let a = BigInt::from(r) % &span + BigInt::from(2u8);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'rounds;
            }
        }
        return false;
    }
    true
}

/// Primes `p` with `lo <= p <= hi` and `p ≡ a (mod m)`, in increasing order.
pub fn primes_in_class(lo: u64, hi: u64, a: u64, m: u64) -> Vec<u64> {
    assert!(m > 0, "modulus must be positive");
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    let a = a % m;
    (lo.max(2)..=hi)
        .filter(|&p| p % m == a && !composite[p as usize])
        .collect()
}

/// Exponent of `p` in a nonzero integer.
pub fn ord_p_int(n: &Int, p: &Int) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if p == &BigInt::from(2u8) {
        return Ok(n.trailing_zeros().unwrap_or(0) as i64);
    }
    let mut k = 0;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(k);
        }
        m = q;
        k += 1;
    }
}

/// `p`-adic valuation of a nonzero rational.
pub fn ord_p(x: &Rat, p: &Int) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(ord_p_int(x.numer(), p)? - ord_p_int(x.denom(), p)?)
}

/// 2-adic valuation of a nonzero integer.
pub fn ord2(n: &Int) -> Result<i64> {
    n.trailing_zeros().map(|t| t as i64).ok_or(Error::ZeroValuation)
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: &Int, n: &Int) -> i32 {
    assert!(n.is_positive() && n.is_odd(), "jacobi needs odd positive n");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    while !a.is_zero() {
        let z = a.trailing_zeros().unwrap_or(0);
        a >>= z;
        let r8 = (&n % 8u8).to_u8().unwrap();
        if z % 2 == 1 && (r8 == 3 || r8 == 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u8).to_u8() == Some(3) && (&n % 4u8).to_u8() == Some(3) {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// A square root of `a` modulo an odd prime `p`, if one exists (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: &Int, p: &Int) -> Option<Int> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    if p == &BigInt::from(2u8) {
        return Some(a);
    }
    if jacobi(&a, p) != 1 {
        return None;
    }
    let one = BigInt::one();
    let pm1: Int = p - &one;
    let s = pm1.trailing_zeros().unwrap_or(0);
    let q = &pm1 >> s;
    let mut z = BigInt::from(2u8);
    while jacobi(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Square roots of an odd `a` modulo `2^k`, all of them, in `[0, 2^k)`.
pub fn sqrt_mod_pow2(a: &Int, k: u32) -> Vec<Int> {
    let m = BigInt::one() << k;
    let a = a.mod_floor(&m);
    if a.is_even() {
        return brute_sqrt_mod(&a, &m);
    }
    match k {
        0 => vec![BigInt::zero()],
        1 => vec![BigInt::one()],
        2 => {
            if (&a % 4u8).is_one() {
                vec![BigInt::one(), BigInt::from(3u8)]
            } else {
                Vec::new()
            }
        }
        _ => {
            if !(&a % 8u8).is_one() {
                return Vec::new();
            }
            // s^2 ≡ a (mod 2^j) for j = 3 initially; lift one bit at a time.
            let mut s = BigInt::one();
            for j in 3..k {
                let mj = BigInt::one() << (j + 1);
                if !(&s * &s - &a).mod_floor(&mj).is_zero() {
                    s += BigInt::one() << (j - 1);
                }
            }
            let half = BigInt::one() << (k - 1);
            let mut roots: Vec<Int> = [s.clone(), -&s, &s + &half, &half - &s]
                .into_iter()
                .map(|r| r.mod_floor(&m))
                .collect();
            roots.sort();
            roots.dedup();
            roots
        }
    }
}

fn brute_sqrt_mod(a: &Int, m: &Int) -> Vec<Int> {
    let mm = m.to_u64().expect("brute force square roots need a small modulus");
    assert!(mm <= 1 << 24, "modulus too large for exhaustive square roots");
    let a = a.mod_floor(m).to_u64().unwrap();
    (0..mm)
        .filter(|&r| mul_mod(r, r, mm) == a)
        .map(BigInt::from)
        .collect()
}

/// Factorization of `m` when it is cheap: a power of two times a cofactor
/// that is prime or below `2^40`. Returns `None` otherwise.
pub fn factor_small(m: &Int) -> Option<Vec<(Int, u32)>> {
    assert!(m.is_positive());
    let mut out = Vec::new();
    let z = m.trailing_zeros().unwrap_or(0) as u32;
    if z > 0 {
        out.push((BigInt::from(2u8), z));
    }
    let rest: Int = m >> z;
    if rest.is_one() {
        return Some(out);
    }
    if is_prime(&rest) {
        out.push((rest, 1));
        return Some(out);
    }
    let mut r = rest.to_u64().filter(|&r| r < 1 << 40)?;
    let mut p = 3u64;
    while p * p <= r {
        if r % p == 0 {
            let mut e = 0;
            while r % p == 0 {
                r /= p;
                e += 1;
            }
            out.push((BigInt::from(p), e));
        }
        p += 2;
    }
    if r > 1 {
        out.push((BigInt::from(r), 1));
    }
    Some(out)
}

/// All square roots of `a` modulo `m` in `[0, m)`, for `gcd(a, m) = 1`.
///
/// Needs the factorization of `m` to be cheap (see [`factor_small`]).
pub fn sqrt_mod(a: &Int, m: &Int) -> Option<Vec<Int>> {
    let fac = factor_small(m)?;
    let mut roots = vec![BigInt::zero()];
    let mut modulus = BigInt::one();
    for (p, e) in fac {
        let pe = num_traits::pow(p.clone(), e as usize);
        let local = if p == BigInt::from(2u8) {
            sqrt_mod_pow2(a, e)
        } else {
            sqrt_mod_odd_prime_power(a, &p, e)
        };
        if local.is_empty() {
            return Some(Vec::new());
        }
        let inv = mod_inverse(&modulus, &pe).expect("coprime moduli");
        let mut next = Vec::with_capacity(roots.len() * local.len());
        for r in &roots {
            for l in &local {
                // x ≡ r (mod modulus), x ≡ l (mod pe)
                let t = ((l - r) * &inv).mod_floor(&pe);
                next.push(r + &modulus * t);
            }
        }
        modulus *= &pe;
        roots = next;
    }
    roots.sort();
    Some(roots)
}

fn sqrt_mod_odd_prime_power(a: &Int, p: &Int, e: u32) -> Vec<Int> {
    let Some(r) = sqrt_mod_prime(a, p) else {
        return Vec::new();
    };
    if (a % p).is_zero() {
        return brute_sqrt_mod(a, &num_traits::pow(p.clone(), e as usize));
    }
    let mut r = r;
    let mut pk = p.clone();
    for _ in 1..e {
        pk *= p;
        let inv = mod_inverse(&(BigInt::from(2u8) * &r), &pk).unwrap();
        r = (&r - (&r * &r - a) * inv).mod_floor(&pk);
    }
    let mut v = vec![r.clone(), (-r).mod_floor(&pk)];
    v.sort();
    v.dedup();
    v
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Cornacchia: a solution of `x² + d·y² = m` with `x, y > 0` and minimal `x`.
///
/// Requires `d > 0`, `m > 0`, `gcd(d, m) = 1`. Imprimitive solutions are found by
/// recursing on `m / g²`; this needs `m` to factor cheaply, otherwise only
/// primitive solutions are considered.
pub fn cornacchia(d: &Int, m: &Int) -> Option<(Int, Int)> {
    assert!(d.is_positive() && m.is_positive());
    assert!(d.gcd(m).is_one(), "cornacchia needs gcd(d, m) = 1");
    let mut best: Option<(Int, Int)> = None;
    let mut consider = |x: Int, y: Int| {
        if x.is_positive() && y.is_positive() && best.as_ref().is_none_or(|(bx, _)| x < *bx) {
            best = Some((x, y));
        }
    };
    let squares = match factor_small(m) {
        Some(fac) => square_divisors(&fac),
        None => vec![BigInt::one()],
    };
    for g in squares {
        let mg = m / (&g * &g);
        for (x, y) in cornacchia_primitive(d, &mg) {
            if d.is_one() {
                consider(&y * &g, &x * &g);
            }
            consider(x * &g, y * &g);
        }
    }
    best
}

fn square_divisors(fac: &[(Int, u32)]) -> Vec<Int> {
    let mut out = vec![BigInt::one()];
    for (p, e) in fac {
        let mut next = Vec::new();
        for g in &out {
            let mut pk = g.clone();
            for _ in 0..=e / 2 {
                next.push(pk.clone());
                pk *= p;
            }
        }
        out = next;
    }
    out
}

fn cornacchia_primitive(d: &Int, m: &Int) -> Vec<(Int, Int)> {
    if m.is_one() {
        return Vec::new();
    }
    let Some(roots) = sqrt_mod(&(-d), m) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for r in roots {
        let (mut a, mut b) = (m.clone(), r);
        while &b * &b >= *m {
            let t = &a % &b;
            a = b;
            b = t;
        }
        let rest: Int = m - &b * &b;
        if (&rest % d).is_zero() {
            let c = &rest / d;
            let s = c.sqrt();
            if &s * &s == c && s.sign() == Sign::Plus {
                out.push((b, s));
            }
        }
    }
    out
}
