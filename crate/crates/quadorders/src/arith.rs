//! Elementary arithmetic: primes, factorization, Kronecker symbol, and the
//! basic invariants of a real quadratic field Q(√d).
//!
//! Throughout the crate d is a squarefree integer ≥ 2. The ring of integers
//! of K = Q(√d) is Z[ω] with
//!
//! * ω = √d and field discriminant d_K = 4d when d ≡ 2, 3 (mod 4),
//! * ω = (1+√d)/2 and d_K = d when d ≡ 1 (mod 4).
//!
//! A rational prime p is split, inert, or ramified in K according to the
//! Kronecker symbol (d_K/p) being +1, −1, or 0.

use std::sync::OnceLock;

use serde::Serialize;

use crate::config;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Prime sieve
// ---------------------------------------------------------------------------

struct Sieve {
    limit: u64,
    primes: Vec<u64>,
}

fn sieve() -> &'static Sieve {
    static SIEVE: OnceLock<Sieve> = OnceLock::new();
    SIEVE.get_or_init(|| {
        let limit = config::sieve_limit().max(100);
        let n = limit as usize;
        let mut composite = vec![false; n];
        let mut primes = Vec::new();
        for i in 2..n {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j < n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        Sieve { limit, primes }
    })
}

/// All primes below `bound`, from the shared sieve.
///
/// Errors with [`Error::BudgetExhausted`] if `bound` exceeds the sieve limit
/// (`QUADORDERS_SIEVE_LIMIT`).
pub fn primes_below(bound: u64) -> Result<&'static [u64]> {
    let s = sieve();
    if bound > s.limit {
        return Err(Error::budget(format!(
            "prime sieve covers [2, {}) but [2, {bound}) was requested",
            s.limit
        )));
    }
    let end = s.primes.partition_point(|&p| p < bound);
    Ok(&s.primes[..end])
}

// ---------------------------------------------------------------------------
// Primality and factorization
// ---------------------------------------------------------------------------

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin. The twelve smallest primes as witnesses decide
/// primality correctly for every n < 3.3·10²⁴, far beyond u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's cycle-finding variant of Pollard's rho. `n` must be odd, composite
/// and free of factors below the trial-division cutoff used by the caller.
fn brent_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut q) = (2u64, 1u64);
        let (mut y, mut ys) = (x, x);
        let mut g = 1u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys = y;
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time to recover the factor lost by
            // batching; restart with a different constant if even that fails.
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization of n ≥ 1 as (prime, exponent) pairs in ascending order.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::invalid("factorize(0) is undefined"));
    }
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let mut push = |p: u64, e: u32| {
        match pairs.iter_mut().find(|(q, _)| *q == p) {
            Some((_, exp)) => *exp += e,
            None => pairs.push((p, e)),
        }
    };
    let mut m = n;
    // Trial division by sieved primes up to the square root handles all but a
    // bounded number of large prime factors.
    for &p in sieve().primes.iter() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            push(p, e);
        }
    }
    // The remaining cofactor has no factor below min(sieve limit, √m); split
    // it recursively with rho. The stack holds at most a handful of entries.
    let mut stack = Vec::new();
    if m > 1 {
        stack.push(m);
    }
    while let Some(v) = stack.pop() {
        if is_prime(v) {
            push(v, 1);
            continue;
        }
        let limit = sieve().limit;
        if v < limit * limit {
            // v is composite with a prime factor below the sieve limit, yet
            // trial division missed it — impossible unless v reached here
            // without full trial division. Guard anyway.
            let d = brent_rho(v);
            stack.push(d);
            stack.push(v / d);
            continue;
        }
        let d = brent_rho(v);
        stack.push(d);
        stack.push(v / d);
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// True if n ≥ 1 has no repeated prime factor.
pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factorize(n)?.iter().all(|&(_, e)| e == 1))
}

// ---------------------------------------------------------------------------
// Kronecker symbol
// ---------------------------------------------------------------------------

/// Kronecker symbol (a/n), the total extension of the Jacobi symbol:
/// multiplicative in n with (a/2) = 0 for even a and (−1)^((a²−1)/8) for odd
/// a, (a/−1) = sign(a) for a ≠ 0, (a/0) = [|a| = 1].
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    // Strip factors of two from n; each contributes (a/2) = ±1 for odd a.
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos % 2 == 1 {
        match (a % 8 + 8) % 8 {
            1 | 7 => {}
            3 | 5 => sign = -sign,
            _ => return 0,
        }
    }
    // Jacobi core: n is now odd and positive.
    a = ((a % n) + n) % n;
    while a != 0 {
        let mut t = 0u32;
        while a % 2 == 0 {
            a /= 2;
            t += 1;
        }
        if t % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        // Quadratic reciprocity for odd positive a, n.
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Field data
// ---------------------------------------------------------------------------

/// Which algebraic integer generates O_K over Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OmegaKind {
    /// ω = √d (d ≡ 2, 3 mod 4, discriminant 4d).
    SqrtD,
    /// ω = (1+√d)/2 (d ≡ 1 mod 4, discriminant d).
    HalfOnePlusSqrtD,
}

impl OmegaKind {
    /// Trace of ω.
    pub fn trace(self) -> u64 {
        match self {
            OmegaKind::SqrtD => 0,
            OmegaKind::HalfOnePlusSqrtD => 1,
        }
    }

    /// −N(ω), i.e. the constant c with ω² = trace(ω)·ω + c.
    pub fn omega_sq_const(self, d: u64) -> u64 {
        match self {
            OmegaKind::SqrtD => d,
            OmegaKind::HalfOnePlusSqrtD => (d - 1) / 4,
        }
    }
}

/// Splitting behaviour of a rational prime in O_K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PrimeSplit {
    Split,
    Inert,
    Ramified,
}

/// The basic invariants of K = Q(√d) for squarefree d ≥ 2.
#[derive(Clone, Debug, Serialize)]
pub struct FieldData {
    /// Squarefree radicand.
    pub d: u64,
    /// Field discriminant: d if d ≡ 1 (mod 4), else 4d.
    pub d_k: u64,
    /// Shape of the maximal-order generator ω.
    pub omega_kind: OmegaKind,
    /// Number of distinct primes dividing the discriminant.
    pub t: u32,
    /// Ascending prime factors of d (all simple, d being squarefree).
    #[serde(skip)]
    d_primes: Vec<u64>,
}

impl FieldData {
    /// Validates d (squarefree, ≥ 2) and assembles the field invariants.
    pub fn new(d: u64) -> Result<FieldData> {
        if d < 2 {
            return Err(Error::invalid(format!("d = {d} must be at least 2")));
        }
        let factors = factorize(d)?;
        if factors.iter().any(|&(_, e)| e > 1) {
            return Err(Error::invalid(format!("d = {d} is not squarefree")));
        }
        let d_primes: Vec<u64> = factors.into_iter().map(|(p, _)| p).collect();
        let (d_k, omega_kind) = if d % 4 == 1 {
            (d, OmegaKind::HalfOnePlusSqrtD)
        } else {
            (4 * d, OmegaKind::SqrtD)
        };
        // The discriminant's prime set is the primes of d, plus 2 when
        // d ≡ 3 (mod 4); for even d the factor 2 is already counted.
        let t = d_primes.len() as u32 + u32::from(d % 4 == 3);
        Ok(FieldData { d, d_k, omega_kind, t, d_primes })
    }

    /// Ascending prime factors of d.
    pub fn d_primes(&self) -> &[u64] {
        &self.d_primes
    }

    /// Ascending prime factors of the discriminant d_K.
    pub fn ramified_primes(&self) -> Vec<u64> {
        let mut ps = self.d_primes.clone();
        if self.d % 4 == 3 {
            ps.insert(0, 2);
        }
        ps
    }

    /// Splitting type of p in O_K: inert iff (d_K/p) = −1, ramified iff
    /// p | d_K, split otherwise.
    pub fn classify_prime(&self, p: u64) -> Result<PrimeSplit> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(match kronecker(self.d_k as i64, p as i64) {
            0 => PrimeSplit::Ramified,
            1 => PrimeSplit::Split,
            _ => PrimeSplit::Inert,
        })
    }
}

/// Integer square root (floor), exposed for callers that pair it with the
/// continued-fraction engine.
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}
