//! Closed-form divisibility conditions for designs and their relatives.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Divisibility, Failure};
use crate::applications::structures::RainbowMode;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn divides(d: &BigInt, x: &BigInt) -> bool {
    if d.is_zero() {
        x.is_zero()
    } else {
        (x % d).is_zero()
    }
}

/// `C(q−i, r−i) | λ·C(n−i, r−i)` for `0 ≤ i < r`.
pub fn design_divisible(n: u64, q: u64, r: u64, lambda: u64) -> Divisibility {
    if n < q || r > q {
        return Divisibility::fail(Failure::TooSmall { n, q });
    }
    for i in 0..r {
        if !divides(&binomial(q - i, r - i), &(binomial(n - i, r - i) * lambda)) {
            return Divisibility::fail(Failure::Level { i: i as usize });
        }
    }
    Divisibility::ok()
}

/// Design conditions plus `q | n`.
pub fn resolvable_divisible(n: u64, q: u64, r: u64, lambda: u64) -> Divisibility {
    if q == 0 || !n.is_multiple_of(q) {
        return Divisibility::fail(Failure::Divides { divisor: q, value: n });
    }
    design_divisible(n, q, r, lambda)
}

/// `n ≡ q` modulo `lcm(1, …, q)`.
pub fn complete_resolution_divisible(n: u64, q: u64) -> Divisibility {
    if n < q {
        return Divisibility::fail(Failure::TooSmall { n, q });
    }
    let modulus = (1..=q).fold(1u64, |acc, k| acc.lcm(&k));
    if !(n - q).is_multiple_of(modulus) {
        return Divisibility::fail(Failure::Congruence { modulus });
    }
    Divisibility::ok()
}

/// Design conditions plus an integral number of designs,
/// `C(n,q)·C(q,r) / (λ·C(n,r))`.
pub fn large_set_divisible(n: u64, q: u64, r: u64, lambda: u64) -> Divisibility {
    let d = design_divisible(n, q, r, lambda);
    if !d.divisible {
        return d;
    }
    let num = binomial(n, q) * binomial(q, r);
    let den = binomial(n, r) * lambda;
    if !divides(&den, &num) {
        let count = binomial(n - r, q - r);
        let value = u64::try_from(&count).unwrap_or(u64::MAX);
        return Divisibility::fail(Failure::Divides { divisor: lambda, value });
    }
    Divisibility::ok()
}

/// Any rainbow colouring: `C(q−i, r−i) | C(q, r)·C(n−i, r−i)`;
/// one fixed colouring: `C(r, i) | C(n−i, r−i)`; both for `0 ≤ i < r`.
pub fn rainbow_divisible(q: u64, r: u64, n: u64, mode: RainbowMode) -> Divisibility {
    if n < q || r > q {
        return Divisibility::fail(Failure::TooSmall { n, q });
    }
    for i in 0..r {
        let ok = match mode {
            RainbowMode::All => divides(&binomial(q - i, r - i), &(binomial(q, r) * binomial(n - i, r - i))),
            RainbowMode::Fixed => divides(&binomial(r, i), &binomial(n - i, r - i)),
        };
        if !ok {
            return Divisibility::fail(Failure::Level { i: i as usize });
        }
    }
    Divisibility::ok()
}
