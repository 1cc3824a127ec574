//! Elementary number theory on machine integers.

/// Greatest common divisor of absolute values.
pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: i128, p: i128) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `n` with all factors of `p` removed, and the number removed.
pub fn split_power(mut n: i128, p: i128) -> (u32, i128) {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

pub fn pow_i128(b: i128, e: u32) -> i128 {
    b.checked_pow(e).expect("integer power overflow")
}

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

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
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

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization, sorted by prime.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = vec![m];
    let mut primes = Vec::new();
    while let Some(x) = stack.pop() {
        if x == 1 {
            continue;
        }
        if is_prime(x) {
            primes.push(x);
            continue;
        }
        let d = pollard_rho(x);
        stack.push(d);
        stack.push(x / d);
    }
    primes.sort_unstable();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Distinct prime divisors of |n|.
pub fn prime_divisors(n: i128) -> Vec<u64> {
    let n = u64::try_from(n.unsigned_abs()).expect("prime_divisors: argument exceeds 64 bits");
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn num_divisors(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Primes up to `limit` inclusive.
pub fn primes_up_to(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
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

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i128, p: i128) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let r = pow_mod(a as u64, ((p - 1) / 2) as u64, p as u64);
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i128, n: i128) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let (v, odd) = split_power(n, 2);
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r8 = a.rem_euclid(8);
        if (r8 == 3 || r8 == 5) && v % 2 == 1 {
            result = -result;
        }
    }
    // Jacobi symbol (a/odd).
    let mut a = a.rem_euclid(odd);
    let mut m = odd;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Squarefree kernel with sign: n = s * k^2, s squarefree.
pub fn squarefree_part(n: i128) -> (i128, i128) {
    assert!(n != 0);
    let sign = n.signum();
    let mut s = 1i128;
    let mut k = 1i128;
    for (p, e) in factorize(n.unsigned_abs() as u64) {
        let p = p as i128;
        if e % 2 == 1 {
            s *= p;
        }
        k *= pow_i128(p, e / 2);
    }
    (sign * s, k)
}

/// Fundamental discriminant f and m > 0 with d = f * m^2, for d > 0 (f = 1 when d is a square).
pub fn fundamental_part(d: i128) -> (i128, i128) {
    let (s, k) = squarefree_part(d);
    if s.rem_euclid(4) == 1 {
        (s, k)
    } else {
        // d = 4s (k/2)^2; a positive-definite even Gram has k even here.
        assert!(k % 2 == 0, "{d} is not a discriminant");
        (4 * s, k / 2)
    }
}

/// Whether d is a fundamental discriminant (d != 1).
pub fn is_fundamental_discriminant(d: i128) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs() as u64);
    }
    if r == 0 {
        let m = d / 4;
        let rm = m.rem_euclid(4);
        return (rm == 2 || rm == 3) && is_squarefree(m.unsigned_abs() as u64);
    }
    false
}

/// Integer square root (floor).
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

/// Inverse of a modulo m (gcd must be 1).
pub fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "not invertible");
    s0.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_and_factoring() {
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert_eq!(factorize(6780), vec![(2, 2), (3, 1), (5, 1), (113, 1)]);
        let n = 999_999_937u64 * 1_000_000_007;
        assert_eq!(factorize(n), vec![(999_999_937, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_up_to(60).into_iter().skip(1) {
            for a in -30i128..30 {
                assert_eq!(kronecker(a, p as i128), legendre(a, p as i128));
            }
        }
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(12, 2), 0);
    }

    #[test]
    fn fundamental_discriminants() {
        assert!(is_fundamental_discriminant(6780));
        assert!(!is_fundamental_discriminant(4200));
        assert!(is_fundamental_discriminant(168));
        assert_eq!(fundamental_part(4200), (168, 5));
        assert_eq!(fundamental_part(16), (1, 4));
        assert_eq!(fundamental_part(6780i128.pow(3)), (6780, 6780));
    }
}
