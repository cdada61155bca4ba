//! Primes, prime powers and the von Mangoldt function.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest bound accepted by [`prime_powers_up_to`] unless a caller asks for
/// another cap.
pub const DEFAULT_TABLE_CAP: f64 = 1e8;

/// `Λ(n)`: `log p` when `n = p^k` for a prime `p` and `k ≥ 1`, else `0`.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let p = smallest_prime_factor(n);
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// All primes `≤ n`, by an odd-only bit sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    // bit i stands for the odd number 2i + 1
    let odd_count = (n as usize).div_ceil(2);
    let mut composite = vec![0u64; odd_count.div_ceil(64)];
    let mut i = 1usize;
    loop {
        let p = 2 * i + 1;
        if p.saturating_mul(p) > n as usize {
            break;
        }
        if composite[i / 64] & (1 << (i % 64)) == 0 {
            let mut j = p * p / 2;
            while j < odd_count {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(estimate_pi(n));
    out.push(2);
    for i in 1..odd_count {
        if composite[i / 64] & (1 << (i % 64)) == 0 {
            out.push(2 * i as u64 + 1);
        }
    }
    out
}

fn estimate_pi(n: u64) -> usize {
    let x = n as f64;
    if x < 10.0 {
        4
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// One prime power `p^n` in a [`PrimePowerTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
    pub value: u64,
    pub log_p: f64,
}

/// Every prime power `p^n ≤ x`, sorted by `p^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimePowerTable {
    bound: f64,
    entries: Vec<PrimePower>,
}

impl PrimePowerTable {
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn entries(&self) -> &[PrimePower] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, PrimePower> {
        self.entries.iter()
    }

    /// Distinct primes in the table, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .entries
            .iter()
            .filter(|e| e.exponent == 1)
            .map(|e| e.prime)
            .collect();
        ps.sort_unstable();
        ps
    }

    /// Entries with `p^n ≤ y`, for `y ≤ bound`.
    pub fn restrict(&self, y: f64) -> PrimePowerTable {
        let cut = self.entries.partition_point(|e| (e.value as f64) <= y);
        PrimePowerTable {
            bound: y.min(self.bound),
            entries: self.entries[..cut].to_vec(),
        }
    }

    /// `Σ_{n ≤ x} Λ(n)`, Chebyshev's function at the table bound.
    pub fn chebyshev_psi(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.log_p)
            .collect::<crate::numeric::CompensatedSum>()
            .value()
    }
}

/// Table of prime powers up to `x`, capped at [`DEFAULT_TABLE_CAP`].
pub fn prime_powers_up_to(x: f64) -> Result<PrimePowerTable> {
    prime_powers_up_to_capped(x, DEFAULT_TABLE_CAP)
}

pub fn prime_powers_up_to_capped(x: f64, cap: f64) -> Result<PrimePowerTable> {
    if !(x >= 2.0) {
        return Err(domain("prime power table needs x >= 2"));
    }
    if x > cap {
        return Err(Error::TableCap { requested: x, cap });
    }
    let n = x.floor() as u64;
    let primes = primes_up_to(n);
    let mut entries = Vec::with_capacity(primes.len() + primes.len() / 8);
    for &p in &primes {
        let log_p = (p as f64).ln();
        let mut value = p;
        let mut exponent = 1u32;
        loop {
            entries.push(PrimePower {
                prime: p,
                exponent,
                value,
                log_p,
            });
            match value.checked_mul(p) {
                Some(v) if v <= n => {
                    value = v;
                    exponent += 1;
                }
                _ => break,
            }
        }
    }
    entries.sort_unstable_by_key(|e| e.value);
    Ok(PrimePowerTable { bound: x, entries })
}

const SEGMENT: u64 = 1 << 18;

/// Calls `f` on every prime power `≤ n` without storing them, by a
/// segmented sieve. Higher powers come first, then primes in increasing
/// order.
pub fn for_each_prime_power(n: u64, mut f: impl FnMut(PrimePower)) {
    if n < 2 {
        return;
    }
    let base = primes_up_to(isqrt(n));
    for &p in &base {
        let log_p = (p as f64).ln();
        let (mut value, mut exponent) = (p * p, 2u32);
        while value <= n {
            f(PrimePower {
                prime: p,
                exponent,
                value,
                log_p,
            });
            match value.checked_mul(p) {
                Some(v) => {
                    value = v;
                    exponent += 1;
                }
                None => break,
            }
        }
    }
    let mut composite = vec![false; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= n {
        let hi = lo.saturating_add(SEGMENT - 1).min(n);
        composite.iter_mut().for_each(|c| *c = false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m <= hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        for v in lo..=hi {
            if !composite[(v - lo) as usize] {
                f(PrimePower {
                    prime: v,
                    exponent: 1,
                    value: v,
                    log_p: (v as f64).ln(),
                });
            }
        }
        if hi == n {
            break;
        }
        lo = hi + 1;
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}
