//! Arithmetic modulo a small prime and the number-theoretic constants used by
//! the catalog: the least quadratic non-residue `nu`, the least primitive root
//! `omega`, and the closed formula for the number of groups of order `p^6`.

use thiserror::Error;

/// Largest modulus accepted by [`is_prime`]-based constructors.
pub const MAX_PRIME: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported prime {0}: the count formula holds for p >= 7")]
    UnsupportedPrime(u64),
}

/// Deterministic trial division, valid up to [`MAX_PRIME`] and well beyond.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_odd_prime(p: u64) -> Result<(), NumError> {
    if p > MAX_PRIME || !is_prime(p) {
        return Err(NumError::InvalidArgument(format!("{p} is not a supported prime")));
    }
    if p == 2 {
        return Err(NumError::InvalidArgument("p = 2 has no non-residues".into()));
    }
    Ok(())
}

/// `a^k mod p` by square and multiply.
pub fn mod_pow(a: u64, mut k: u64, p: u64) -> u64 {
    let mut base = a % p;
    let mut acc = 1 % p;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`.
pub fn mod_inverse(a: u64, p: u64) -> Result<u64, NumError> {
    if a.is_multiple_of(p) {
        return Err(NumError::InvalidArgument(format!("{a} has no inverse mod {p}")));
    }
    Ok(mod_pow(a, p - 2, p))
}

/// Least `a >= 2` with `a^((p-1)/2) = -1 mod p`.
pub fn smallest_nonresidue(p: u64) -> Result<u64, NumError> {
    check_odd_prime(p)?;
    Ok((2..p).find(|&a| mod_pow(a, (p - 1) / 2, p) == p - 1).expect("odd primes have non-residues"))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least `a >= 2` whose multiplicative order mod `p` is `p - 1`.
pub fn smallest_primitive_root(p: u64) -> Result<u64, NumError> {
    check_odd_prime(p)?;
    let qs = prime_factors(p - 1);
    Ok((2..p)
        .find(|&a| qs.iter().all(|&q| mod_pow(a, (p - 1) / q, p) != 1))
        .expect("cyclic unit group"))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Terms of the count formula, kept separate for the CLI breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountTerms {
    pub p: u64,
    pub quadratic: u64,
    pub gcd3: u64,
    pub gcd4: u64,
    pub gcd5: u64,
}

impl CountTerms {
    pub fn total(&self) -> u64 {
        self.quadratic + 24 * self.gcd3 + 11 * self.gcd4 + 2 * self.gcd5
    }
}

pub fn group_count_terms(p: u64) -> Result<CountTerms, NumError> {
    if !is_prime(p) {
        return Err(NumError::InvalidArgument(format!("{p} is not prime")));
    }
    if p < 7 {
        return Err(NumError::UnsupportedPrime(p));
    }
    Ok(formula_terms(p))
}

/// The count formula's terms without the `p >= 7` guard. Below 7 the
/// formula is not a theorem; callers use it only as a reference value.
pub fn formula_terms(p: u64) -> CountTerms {
    CountTerms {
        p,
        quadratic: 3 * p * p + 39 * p + 344,
        gcd3: gcd(p - 1, 3),
        gcd4: gcd(p - 1, 4),
        gcd5: gcd(p - 1, 5),
    }
}

/// Number of groups of order `p^6`:
/// `3p^2 + 39p + 344 + 24 gcd(p-1,3) + 11 gcd(p-1,4) + 2 gcd(p-1,5)`.
pub fn group_count(p: u64) -> Result<u64, NumError> {
    Ok(group_count_terms(p)?.total())
}

/// A prime together with its derived constants. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeContext {
    p: u32,
    nu: u32,
    omega: u32,
    squares: Vec<bool>,
}

impl PrimeContext {
    /// Accepts odd primes up to 65521 so residues fit in 16 bits.
    pub fn new(p: u64) -> Result<Self, NumError> {
        if p > u16::MAX as u64 {
            return Err(NumError::InvalidArgument(format!("{p} exceeds the 16-bit residue range")));
        }
        let nu = smallest_nonresidue(p)? as u32;
        let omega = smallest_primitive_root(p)? as u32;
        let mut squares = vec![false; p as usize];
        for x in 0..p {
            squares[(x * x % p) as usize] = true;
        }
        Ok(PrimeContext { p: p as u32, nu, omega, squares })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn omega(&self) -> u32 {
        self.omega
    }

    /// Reduce any integer to `[0, p)`.
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// Squares include 0.
    pub fn is_square(&self, a: i64) -> bool {
        self.squares[self.reduce(a) as usize]
    }

    pub fn pow(&self, a: i64, k: u64) -> u32 {
        mod_pow(self.reduce(a) as u64, k, self.p as u64) as u32
    }

    pub fn inv(&self, a: i64) -> Result<u32, NumError> {
        mod_inverse(self.reduce(a) as u64, self.p as u64).map(|x| x as u32)
    }
}
