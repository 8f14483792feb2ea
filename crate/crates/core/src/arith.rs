//! Exact integer arithmetic: totients, von Mangoldt, cyclotomic values at 1.
//!
//! Everything here is pure and works on `u64`. Factorization is by trial
//! division, which is exact for every input up to [`FACTORIZATION_LIMIT`].

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use crate::scalar::Scalar;

/// Largest input accepted by the factorizing functions (trial divisors
/// up to 10^6 certify every factor below this bound).
pub const FACTORIZATION_LIMIT: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },
}

fn domain(op: &'static str, reason: impl Into<String>) -> ArithError {
    ArithError::Domain {
        op,
        reason: reason.into(),
    }
}

/// A prime power `p^r` with `r >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u64,
    r: u32,
}

impl PrimePower {
    pub fn new(p: u64, r: u32) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(domain("PrimePower::new", format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(domain("PrimePower::new", "exponent must be at least 1"));
        }
        Ok(Self { p, r })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.r
    }

    pub fn value(&self) -> u64 {
        self.p.pow(self.r)
    }

    /// `φ(p^r) = p^(r-1) (p - 1)`.
    pub fn totient(&self) -> u64 {
        self.p.pow(self.r - 1) * (self.p - 1)
    }
}

/// Primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut q = 3u64;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// Prime factorization as ascending `(p, a)` pairs. `factorize(1)` is empty.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>, ArithError> {
    if n == 0 {
        return Err(domain("factorize", "n must be positive"));
    }
    if n > FACTORIZATION_LIMIT {
        return Err(domain(
            "factorize",
            format!("{n} exceeds the trial-division bound {FACTORIZATION_LIMIT}"),
        ));
    }
    let mut out = Vec::new();
    let mut m = n;
    let mut q = 2u64;
    while q * q <= m {
        if m % q == 0 {
            let mut a = 0;
            while m % q == 0 {
                m /= q;
                a += 1;
            }
            out.push((q, a));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

/// Euler's totient via `φ(∏ p^a) = ∏ p^(a-1) (p-1)`.
pub fn euler_phi(n: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(domain("euler_phi", "n must be positive"));
    }
    Ok(factorize(n)?
        .into_iter()
        .map(|(p, a)| p.pow(a - 1) * (p - 1))
        .product())
}

/// `Some(p^r)` iff `n` is a prime power.
pub fn prime_power_decompose(n: u64) -> Result<Option<PrimePower>, ArithError> {
    if n <= 1 {
        return Err(domain("prime_power_decompose", "n must be at least 2"));
    }
    let factors = factorize(n)?;
    Ok(match factors.as_slice() {
        [(p, r)] => Some(PrimePower { p: *p, r: *r }),
        _ => None,
    })
}

/// Value of the von Mangoldt function, kept symbolic until evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VonMangoldt {
    Zero,
    /// `log p` for the given prime.
    Log(u64),
}

impl VonMangoldt {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            VonMangoldt::Zero => T::zero(),
            VonMangoldt::Log(p) => T::of_u64(p).ln(),
        }
    }

    pub fn is_zero(self) -> bool {
        self == VonMangoldt::Zero
    }
}

pub fn von_mangoldt(n: u64) -> Result<VonMangoldt, ArithError> {
    if n == 0 {
        return Err(domain("von_mangoldt", "n must be positive"));
    }
    if n == 1 {
        return Ok(VonMangoldt::Zero);
    }
    Ok(match prime_power_decompose(n)? {
        Some(pp) => VonMangoldt::Log(pp.p),
        None => VonMangoldt::Zero,
    })
}

/// `Φ_d(1)`: `p` when `d = p^r`, otherwise 1.
pub fn cyclotomic_at_one(d: u64) -> Result<u64, ArithError> {
    if d <= 1 {
        return Err(domain("cyclotomic_at_one", "d must be at least 2"));
    }
    Ok(prime_power_decompose(d)?.map_or(1, |pp| pp.p))
}

/// Ascending units of `Z/dZ`, represented in `[1, d]`. `modular_units(1) == [1]`.
pub fn modular_units(d: u64) -> Result<Vec<u64>, ArithError> {
    if d == 0 {
        return Err(domain("modular_units", "d must be positive"));
    }
    if d == 1 {
        return Ok(vec![1]);
    }
    Ok((1..d).filter(|k| k.gcd(&d) == 1).collect())
}

/// A `p`-adic absolute value of the form `1` or `p^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicAbs {
    One,
    Power { base: u64, exponent: Ratio<i64> },
}

impl PadicAbs {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            PadicAbs::One => T::one(),
            PadicAbs::Power { base, exponent } => {
                let e = T::of_i64(*exponent.numer()) / T::of_i64(*exponent.denom());
                T::of_u64(base).powf(e)
            }
        }
    }

    /// Natural logarithm, as an exact rational multiple of `log base`.
    pub fn log_coefficient(self) -> Ratio<i64> {
        match self {
            PadicAbs::One => Ratio::from_integer(0),
            PadicAbs::Power { exponent, .. } => exponent,
        }
    }
}

/// `|ζ - 1|_p` for a primitive `d`-th root of unity `ζ`.
pub fn padic_distance_to_one(p: u64, d: u64) -> Result<PadicAbs, ArithError> {
    if !is_prime(p) {
        return Err(domain("padic_distance_to_one", format!("{p} is not prime")));
    }
    if d < 2 {
        return Err(domain("padic_distance_to_one", "d must be at least 2"));
    }
    match prime_power_decompose(d)? {
        Some(pp) if pp.p == p => Ok(PadicAbs::Power {
            base: p,
            exponent: Ratio::new(-1, pp.totient() as i64),
        }),
        _ => Ok(PadicAbs::One),
    }
}
