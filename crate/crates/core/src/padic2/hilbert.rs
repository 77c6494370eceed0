use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{jacobi, ord_p_int};
use crate::{Int, Rat};

/// Integer in the same square class as a nonzero rational.
fn square_class_int(x: &Rat) -> Int {
    assert!(!x.is_zero(), "Hilbert symbol of zero");
    x.numer() * x.denom()
}

fn split_pow(n: &Int, p: &Int) -> (i64, Int) {
    let k = ord_p_int(n, p).unwrap();
    let mut u = n.clone();
    for _ in 0..k {
        u /= p;
    }
    (k, u)
}

fn eps(u: &Int) -> i64 {
    // (u - 1)/2 mod 2
    ((u - 1i32) / 2i32).mod_floor(&BigInt::from(2)).to_i64().unwrap()
}

fn omega(u: &Int) -> i64 {
    // (u² - 1)/8 mod 2
    ((u * u - 1i32) / 8i32).mod_floor(&BigInt::from(2)).to_i64().unwrap()
}

/// Hilbert symbol `(a, b)₂` of nonzero rationals.
pub fn hilbert2(a: &Rat, b: &Rat) -> i32 {
    let two = BigInt::from(2);
    let (al, u) = split_pow(&square_class_int(a), &two);
    let (be, v) = split_pow(&square_class_int(b), &two);
    let e = eps(&u) * eps(&v) + al * omega(&v) + be * omega(&u);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Hilbert symbol `(a, b)_p` at an odd prime `p`.
pub fn hilbert_odd(a: &Rat, b: &Rat, p: &Int) -> i32 {
    let (al, u) = split_pow(&square_class_int(a), p);
    let (be, v) = split_pow(&square_class_int(b), p);
    let mut s = 1;
    if (al * be) % 2 == 1 && eps(p) == 1 {
        s = -s;
    }
    if be % 2 == 1 {
        s *= jacobi(&u, p);
    }
    if al % 2 == 1 {
        s *= jacobi(&v, p);
    }
    s
}

/// Hilbert symbol at the real place.
pub fn hilbert_inf(a: &Rat, b: &Rat) -> i32 {
    if a.is_negative() && b.is_negative() {
        -1
    } else {
        1
    }
}
