//! Torsion points of the 2-torus and the height of `C ∩ ωC`, where `C` is
//! the line `x0 + x1 + x2 = 0` in the projective plane.
//!
//! A point `ω = (ζ^c1, ζ^c2)` with `ζ = exp(2πi/d)` is stored as the residue
//! pair `(c1, c2)` modulo `d`. Heights only depend on the reduced pair
//! `(c1/g, c2/g)` modulo the order `e = d/g`, `g = gcd(c1, c2, d)`, so every
//! orbit sum below runs over the units of `Z/eZ`.

use num_complex::Complex;
use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, ArithError, VonMangoldt};
use crate::scalar::{CompensatedSum, Scalar};

/// Tolerance used when deciding that a computed height sits on an extremal value.
pub const EXTREMAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeightError {
    #[error("torsion point (0, 0) mod {d} is trivial; C ∩ ωC is not a point")]
    Trivial { d: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `ω = (ζ_d^c1, ζ_d^c2)` with residues in `[0, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorsionPoint {
    d: u64,
    c1: u64,
    c2: u64,
}

impl TorsionPoint {
    /// Builds a point, reducing the residues into `[0, d)`.
    pub fn new(d: u64, c1: i64, c2: i64) -> Result<Self, HeightError> {
        if d == 0 {
            return Err(HeightError::ZeroModulus);
        }
        let m = d as i128;
        Ok(Self {
            d,
            c1: (c1 as i128).rem_euclid(m) as u64,
            c2: (c2 as i128).rem_euclid(m) as u64,
        })
    }

    /// Like [`TorsionPoint::new`] but rejects the trivial point.
    pub fn nontrivial(d: u64, c1: i64, c2: i64) -> Result<Self, HeightError> {
        let pt = Self::new(d, c1, c2)?;
        pt.ensure_nontrivial()?;
        Ok(pt)
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn residues(&self) -> (u64, u64) {
        (self.c1, self.c2)
    }

    pub fn is_trivial(&self) -> bool {
        self.c1 == 0 && self.c2 == 0
    }

    fn ensure_nontrivial(&self) -> Result<(), HeightError> {
        if self.is_trivial() {
            Err(HeightError::Trivial { d: self.d })
        } else {
            Ok(())
        }
    }

    /// `d / gcd(c1, c2, d)`.
    pub fn order(&self) -> u64 {
        self.d / self.c1.gcd(&self.c2).gcd(&self.d)
    }

    /// The same point written at its own order: `(e, c1/g, c2/g)`.
    pub fn reduced(&self) -> TorsionPoint {
        let g = self.c1.gcd(&self.c2).gcd(&self.d);
        TorsionPoint {
            d: self.d / g,
            c1: self.c1 / g,
            c2: self.c2 / g,
        }
    }

    /// Image under the Galois automorphism `ζ ↦ ζ^k`.
    pub fn galois_conjugate(&self, k: u64) -> TorsionPoint {
        let m = self.d as u128;
        TorsionPoint {
            d: self.d,
            c1: ((self.c1 as u128 * k as u128) % m) as u64,
            c2: ((self.c2 as u128 * k as u128) % m) as u64,
        }
    }
}

/// `2 |sin(π r / n)| = |exp(2πi r/n) - 1|`, folded so the angle stays in `[0, π/2]`.
pub(crate) fn chord<T: Scalar>(r: u64, n: u64) -> T {
    let r = r % n;
    let r = r.min(n - r);
    let two = T::of(2.0);
    two * (T::PI() * T::of_u64(r) / T::of_u64(n)).sin()
}

/// Archimedean and non-Archimedean parts of the height of `P(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightBreakdown<T> {
    pub archimedean: T,
    pub nonarchimedean: T,
    pub total: T,
    /// Size of the Galois orbit, `φ(ord ω)`.
    pub orbit_size: u64,
}

/// Homogeneous coordinates of `P(ω) = [ω2⁻¹ - ω1⁻¹ : 1 - ω2⁻¹ : ω1⁻¹ - 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePointC<T> {
    pub coords: [Complex<T>; 3],
}

impl<T: Scalar> ProjectivePointC<T> {
    /// Rescaled so the first coordinate that is not (numerically) zero equals 1.
    pub fn normalized(&self) -> Self {
        let eps = T::of(1e-12);
        let pivot = self
            .coords
            .iter()
            .copied()
            .find(|z| z.norm() > eps)
            .expect("projective point has a nonzero coordinate");
        Self {
            coords: self.coords.map(|z| z / pivot),
        }
    }

    /// `x0 + x1 + x2`, which vanishes for points on `C`.
    pub fn coordinate_sum(&self) -> Complex<T> {
        self.coords[0] + self.coords[1] + self.coords[2]
    }

    /// Equality as projective points (cross products vanish).
    pub fn projectively_eq(&self, other: &Self, tol: T) -> bool {
        let (a, b) = (&self.coords, &other.coords);
        (0..3).all(|i| {
            (i + 1..3).all(|j| (a[i] * b[j] - a[j] * b[i]).norm() <= tol)
        })
    }
}

fn root_of_unity<T: Scalar>(c: u64, d: u64) -> Complex<T> {
    let theta = T::of(2.0) * T::PI() * T::of_u64(c) / T::of_u64(d);
    Complex::new(theta.cos(), theta.sin())
}

pub fn intersection_point<T: Scalar>(pt: &TorsionPoint) -> Result<ProjectivePointC<T>, HeightError> {
    pt.ensure_nontrivial()?;
    let w1_inv = root_of_unity::<T>(pt.d - pt.c1, pt.d);
    let w2_inv = root_of_unity::<T>(pt.d - pt.c2, pt.d);
    let one = Complex::new(T::one(), T::zero());
    Ok(ProjectivePointC {
        coords: [w2_inv - w1_inv, one - w2_inv, w1_inv - one],
    })
}

/// Archimedean local height of `P(ω)`: the average over the Galois orbit of
/// `log max(|ω2^k - ω1^k|, |ω2^k - 1|, |ω1^k - 1|)`.
pub fn archimedean_height<T: Scalar>(pt: &TorsionPoint) -> Result<T, HeightError> {
    pt.ensure_nontrivial()?;
    let red = pt.reduced();
    let e = red.d;
    let diff = (red.c2 + e - red.c1) % e;
    let units = arith::modular_units(e)?;
    let n = units.len() as u64;
    let mut acc = CompensatedSum::new();
    for &k in &units {
        let k = k as u128;
        let m = e as u128;
        let r1 = ((red.c1 as u128 * k) % m) as u64;
        let r2 = ((red.c2 as u128 * k) % m) as u64;
        let r3 = ((diff as u128 * k) % m) as u64;
        let largest = chord::<T>(r1, e).max(chord::<T>(r2, e)).max(chord::<T>(r3, e));
        acc.add(largest.ln());
    }
    Ok(acc.value() / T::of_u64(n))
}

/// Exact non-Archimedean part `-Λ(e)/φ(e)`, as a rational multiple of `log p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLogTerm {
    /// Rational coefficient; zero when the order is not a prime power.
    pub coefficient: Ratio<i64>,
    /// The prime whose logarithm is multiplied; 1 when the term vanishes.
    pub log_of: u64,
}

impl ExactLogTerm {
    pub fn value<T: Scalar>(&self) -> T {
        if self.log_of <= 1 {
            return T::zero();
        }
        T::of_i64(*self.coefficient.numer()) / T::of_i64(*self.coefficient.denom())
            * T::of_u64(self.log_of).ln()
    }
}

pub fn nonarchimedean_exact(pt: &TorsionPoint) -> Result<ExactLogTerm, HeightError> {
    pt.ensure_nontrivial()?;
    let e = pt.order();
    let phi = arith::euler_phi(e)? as i64;
    Ok(match arith::von_mangoldt(e)? {
        VonMangoldt::Zero => ExactLogTerm {
            coefficient: Ratio::from_integer(0),
            log_of: 1,
        },
        VonMangoldt::Log(p) => ExactLogTerm {
            coefficient: Ratio::new(-1, phi),
            log_of: p,
        },
    })
}

/// Sum of the non-Archimedean local heights, `-Λ(e)/φ(e)`.
pub fn nonarchimedean_height<T: Scalar>(pt: &TorsionPoint) -> Result<T, HeightError> {
    pt.ensure_nontrivial()?;
    let e = pt.order();
    let lambda = arith::von_mangoldt(e)?;
    let phi = arith::euler_phi(e)?;
    Ok(-lambda.value::<T>() / T::of_u64(phi))
}

pub fn total_height<T: Scalar>(pt: &TorsionPoint) -> Result<HeightBreakdown<T>, HeightError> {
    let archimedean = archimedean_height::<T>(pt)?;
    let nonarchimedean = nonarchimedean_height::<T>(pt)?;
    Ok(HeightBreakdown {
        archimedean,
        nonarchimedean,
        total: archimedean + nonarchimedean,
        orbit_size: arith::euler_phi(pt.order())?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremal {
    /// Height 0.
    #[serde(rename = "min")]
    AttainsMin,
    /// Height log 2.
    #[serde(rename = "max")]
    AttainsMax,
    Interior,
}

impl Extremal {
    pub fn label(&self) -> &'static str {
        match self {
            Extremal::AttainsMin => "min",
            Extremal::AttainsMax => "max",
            Extremal::Interior => "interior",
        }
    }
}

fn order_of_residue(c: u64, d: u64) -> u64 {
    d / c.gcd(&d)
}

/// Decides from residues alone whether the height is 0, log 2, or neither.
///
/// Minimum: `(1, ζ)`, `(ζ, 1)`, `(ζ, ζ)` with `ζ ≠ 1`, and `(ζ, ζ²)` with `ζ`
/// a primitive cube root of unity. Maximum: `(-1, ζ)`, `(ζ, -1)`, `(ζ, -ζ)`
/// with `ord ζ` not a power of two.
pub fn classify_extremal(pt: &TorsionPoint) -> Result<Extremal, HeightError> {
    pt.ensure_nontrivial()?;
    let TorsionPoint { d, c1, c2 } = *pt;

    if c1 == 0 || c2 == 0 || c1 == c2 {
        return Ok(Extremal::AttainsMin);
    }
    if d % 3 == 0 && order_of_residue(c1, d) == 3 && c2 == (2 * c1) % d {
        return Ok(Extremal::AttainsMin);
    }

    if d % 2 == 0 {
        let half = d / 2;
        let not_pow2 = |c: u64| !order_of_residue(c, d).is_power_of_two();
        let hit = (c1 == half && not_pow2(c2))
            || (c2 == half && not_pow2(c1))
            || (c2 == (c1 + half) % d && not_pow2(c1));
        if hit {
            return Ok(Extremal::AttainsMax);
        }
    }
    Ok(Extremal::Interior)
}
