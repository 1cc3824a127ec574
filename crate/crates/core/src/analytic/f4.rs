//! The F₄ function F₄(n) = √n/d(n)·∏_{p | n, p ∤ N, χ(p) = −1}(p−1)/(p+1) on odd squarefree n and
//! the enumeration of n with F₄(n) ≤ F.
//!
//! F₄ is multiplicative over the prime factors: F₄(n) = ∏_{p | n} h(p) with h(p) = √p/2·g(p),
//! g(p) = (p−1)/(p+1) for inert p ∤ N and 1 otherwise. Every h(p') with p' ≥ p is at least
//! hmin(p) = √p/2·(p−1)/(p+1), which drives the pruning. Products are always accumulated in
//! increasing prime order so that the search and the direct evaluation agree to the last bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_squarefree, kronecker};
use crate::error::{Error, Result};

/// Inert primes p with √p/2·(p−1)/(p+1) ≤ R satisfy p < 4R² + 5; the slack also absorbs rounding.
const MARGIN: u64 = 16;

/// The data determining F₄: level N and character discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F4Params {
    pub level: u64,
    pub disc: i128,
}

impl F4Params {
    pub fn new(level: u64, disc: i128) -> Self {
        F4Params { level, disc }
    }

    /// h(p).
    pub fn factor(&self, p: u64) -> f64 {
        let half_root = (p as f64).sqrt() / 2.0;
        if self.level % p != 0 && kronecker(self.disc, p as i128) == -1 {
            half_root * ((p - 1) as f64 / (p + 1) as f64)
        } else {
            half_root
        }
    }

    /// hmin(p) ≤ h(p') for every p' ≥ p.
    pub fn factor_floor(p: u64) -> f64 {
        (p as f64).sqrt() / 2.0 * ((p - 1) as f64 / (p + 1) as f64)
    }

    /// F₄(n) for squarefree n.
    pub fn value(&self, n: u64) -> Result<f64> {
        if n == 0 || !is_squarefree(n) {
            return Err(Error::NotSquarefree(n));
        }
        let mut v = 1.0;
        for (p, _) in factorize(n) {
            v *= self.factor(p);
        }
        Ok(v)
    }
}

/// F₄(n) for squarefree n.
pub fn f4_value(n: u64, level: u64, disc: i128) -> Result<f64> {
    F4Params::new(level, disc).value(n)
}

/// Odd primes up to a limit as a bitset with cumulative counts.
pub struct PrimeCounter {
    limit: u64,
    bits: Vec<u64>,
    cum: Vec<u32>,
}

impl PrimeCounter {
    /// Sieve of the odd numbers up to `limit`.
    pub fn new(limit: u64) -> Self {
        let odd = (limit + 1) / 2;
        let words = (odd as usize + 63) / 64;
        let mut bits = vec![!0u64; words];
        bits[0] &= !1;
        let mut i = 1u64;
        while (2 * i + 1) * (2 * i + 1) <= limit {
            if bits[(i / 64) as usize] >> (i % 64) & 1 == 1 {
                let p = 2 * i + 1;
                let mut j = (p * p - 1) / 2;
                while j < odd {
                    bits[(j / 64) as usize] &= !(1u64 << (j % 64));
                    j += p;
                }
            }
            i += 1;
        }
        if odd % 64 != 0 {
            let last = words - 1;
            bits[last] &= (1u64 << (odd % 64)) - 1;
        }
        let mut cum = Vec::with_capacity(words + 1);
        let mut acc = 0u32;
        for w in &bits {
            cum.push(acc);
            acc += w.count_ones();
        }
        cum.push(acc);
        PrimeCounter { limit, bits, cum }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Whether the odd number p ≤ limit is prime.
    pub fn is_odd_prime(&self, p: u64) -> bool {
        debug_assert!(p % 2 == 1 && p <= self.limit);
        let i = p / 2;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Number of odd primes ≤ x.
    pub fn odd_pi(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "prime count beyond sieve limit");
        if x < 3 {
            return 0;
        }
        let i = (x - 1) / 2;
        let w = (i / 64) as usize;
        let mask = if i % 64 == 63 { !0u64 } else { (1u64 << (i % 64 + 1)) - 1 };
        self.cum[w] as u64 + (self.bits[w] & mask).count_ones() as u64
    }

    /// Odd primes in [lo, hi].
    pub fn odd_primes(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let start = lo.max(3) | 1;
        let hi = hi.min(self.limit);
        (start..=hi).step_by(2).filter(move |&p| self.is_odd_prime(p))
    }
}

/// Largest candidate, largest number of prime factors and total count for a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct F4Summary {
    pub max_candidate: u64,
    pub max_prime_factors: u32,
    pub count: u64,
}

/// Odd squarefree n with F₄(n) ≤ F.
pub struct F4Search {
    pub threshold: f64,
    pub params: F4Params,
}

impl F4Search {
    pub fn new(threshold: f64, level: u64, disc: i128) -> Self {
        F4Search { threshold, params: F4Params::new(level, disc) }
    }

    /// Smallest value of F₄ on divisors of 105; every other h(p) exceeds 1.
    fn min_product(&self) -> f64 {
        [3u64, 5, 7].iter().map(|&p| self.params.factor(p)).filter(|&h| h < 1.0).product()
    }

    /// Upper bound for the prime factors of any candidate.
    pub fn prime_bound(&self) -> u64 {
        let f = self.threshold.max(1.0) / self.min_product();
        (4.0 * f * f) as u64 + 2 * MARGIN
    }

    /// Calls `emit` on every candidate n ≤ limit in depth-first order.
    pub fn for_each_candidate<F: FnMut(u64)>(&self, limit: u64, mut emit: F) {
        let bound = self.prime_bound().min(limit);
        let counter = PrimeCounter::new(bound.max(3));
        let primes: Vec<u64> = counter.odd_primes(3, bound).collect();
        self.dfs(&primes, 1, 1.0, 0, limit, &mut emit);
    }

    fn dfs<F: FnMut(u64)>(&self, primes: &[u64], n: u64, h: f64, start: usize, limit: u64, emit: &mut F) {
        if h > self.threshold {
            return;
        }
        emit(n);
        for (i, &p) in primes.iter().enumerate().skip(start) {
            if h * F4Params::factor_floor(p) > self.threshold || n.saturating_mul(p) > limit {
                break;
            }
            let hp = h * self.params.factor(p);
            if hp <= self.threshold {
                self.dfs(primes, n * p, hp, i + 1, limit, emit);
            }
        }
    }

    /// Sorted candidates up to a limit.
    pub fn candidates_up_to(&self, limit: u64) -> Vec<u64> {
        let mut v = Vec::new();
        self.for_each_candidate(limit, |n| v.push(n));
        v.sort_unstable();
        v
    }

    /// Maximum, prime-factor count and total count without listing candidates: each
    /// prefix m contributes the primes p > P(m) with F₄(m)·h(p) ≤ F, counted through a
    /// prime table; only prefixes that can still take two more primes are expanded.
    pub fn summary(&self) -> F4Summary {
        if self.threshold < 1.0 {
            return F4Summary { max_candidate: 0, max_prime_factors: 0, count: 0 };
        }
        let counter = PrimeCounter::new(self.prime_bound());
        let mut s = F4Summary { max_candidate: 1, max_prime_factors: 0, count: 1 };
        self.completions(&counter, 1, 1.0, 2, 0, &mut s);
        let roots = self.children(&counter, 1.0, 2);
        let parts: Vec<F4Summary> = roots
            .par_iter()
            .map(|&(p, hp)| {
                let mut t = F4Summary { max_candidate: 0, max_prime_factors: 0, count: 0 };
                self.expand(&counter, p, hp, p, 1, &mut t);
                t
            })
            .collect();
        for t in parts {
            s.count += t.count;
            s.max_candidate = s.max_candidate.max(t.max_candidate);
            s.max_prime_factors = s.max_prime_factors.max(t.max_prime_factors);
        }
        s
    }

    /// Primes p > last with F₄(n)·h(p) ≤ F that leave room for a further prime.
    fn children(&self, counter: &PrimeCounter, h: f64, last: u64) -> Vec<(u64, f64)> {
        let f = self.threshold;
        let mut out = Vec::new();
        for p in counter.odd_primes(last + 1, counter.limit()) {
            let floor = F4Params::factor_floor(p);
            if h * floor * floor > f {
                break;
            }
            let hp = h * self.params.factor(p);
            if hp <= f {
                out.push((p, hp));
            }
        }
        out
    }

    /// Counts n·p for primes p > last with F₄(n)·h(p) ≤ F and records the largest.
    fn completions(&self, counter: &PrimeCounter, n: u64, h: f64, last: u64, depth: u32, s: &mut F4Summary) {
        let f = self.threshold;
        let r = f / h;
        let x = (4.0 * r * r) as u64;
        let safe = x.saturating_sub(MARGIN);
        let top = (x + MARGIN).min(counter.limit());
        let mut best = None;
        let mut scan_from = last + 1;
        if safe > last {
            let c = counter.odd_pi(safe) - counter.odd_pi(last);
            if c > 0 {
                s.count += c;
                best = Some(safe);
            }
            scan_from = safe + 1;
        }
        let mut best_prime = None;
        for p in counter.odd_primes(scan_from, top) {
            if h * self.params.factor(p) <= f {
                s.count += 1;
                best_prime = Some(p);
            }
        }
        if best_prime.is_none() {
            if let Some(b) = best {
                best_prime = (last + 1..=b).rev().filter(|&p| p % 2 == 1).find(|&p| counter.is_odd_prime(p));
            }
        }
        if let Some(p) = best_prime {
            s.max_candidate = s.max_candidate.max(n * p);
            s.max_prime_factors = s.max_prime_factors.max(depth + 1);
        }
    }

    fn expand(&self, counter: &PrimeCounter, n: u64, h: f64, last: u64, depth: u32, s: &mut F4Summary) {
        self.completions(counter, n, h, last, depth, s);
        for (p, hp) in self.children(counter, h, last) {
            self.expand(counter, n * p, hp, p, depth + 1, s);
        }
    }
}

/// Candidates ≤ limit by direct evaluation of F₄ on every odd squarefree n.
pub fn f4_scan(threshold: f64, level: u64, disc: i128, limit: u64) -> Vec<u64> {
    let params = F4Params::new(level, disc);
    (1..=limit)
        .step_by(2)
        .filter(|&n| is_squarefree(n) && params.value(n).unwrap() <= threshold)
        .collect()
}

/// Candidates F₄(n) ≤ F up to a limit (see [`F4Search`] for the full stream and summary).
pub fn f4_candidates(threshold: f64, level: u64, disc: i128, limit: u64) -> Vec<u64> {
    F4Search::new(threshold, level, disc).candidates_up_to(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    #[test]
    fn values() {
        assert_eq!(f4_value(1, 6780, 6780).unwrap(), 1.0);
        for p in [7u64, 11, 13, 17, 19] {
            let v = f4_value(p, 6780, 6780).unwrap();
            if kronecker(6780, p as i128) == 1 {
                assert!((v - (p as f64).sqrt() / 2.0).abs() < 1e-15);
            } else {
                assert!((v - (p as f64).sqrt() / 2.0 * (p - 1) as f64 / (p + 1) as f64).abs() < 1e-15);
            }
        }
        assert_eq!(f4_value(9, 1, 1), Err(Error::NotSquarefree(9)));
    }

    #[test]
    fn prime_counter() {
        let c = PrimeCounter::new(100_000);
        let mut k = 0;
        for x in 1..=100_000u64 {
            if x % 2 == 1 && x > 2 && is_prime(x) {
                k += 1;
            }
            if x % 997 == 0 || x < 200 {
                assert_eq!(c.odd_pi(x), k, "{x}");
            }
        }
    }

    #[test]
    fn matches_scan() {
        for (f, level, disc) in [(1.0, 6780u64, 6780i128), (10.0, 1, 1), (10.0, 6780, 6780), (25.0, 4200, 168), (50.0, 6780, 6780)] {
            let limit = 1_000_000;
            let search = f4_candidates(f, level, disc, limit);
            assert_eq!(search, f4_scan(f, level, disc, limit), "F = {f}, N = {level}");
        }
    }

    #[test]
    fn summary_matches_enumeration() {
        for (f, level, disc) in [(10.0, 1u64, 1i128), (30.0, 6780, 6780), (40.0, 4200, 168)] {
            let search = F4Search::new(f, level, disc);
            let all = search.candidates_up_to(u64::MAX);
            let s = search.summary();
            assert_eq!(s.count, all.len() as u64);
            assert_eq!(s.max_candidate, *all.iter().max().unwrap());
            let w = all.iter().map(|&n| factorize(n).len() as u32).max().unwrap();
            assert_eq!(s.max_prime_factors, w);
        }
    }
}
