//! The order-12 group generated by
//! `α(c1, c2) = (c2, c1)`, `β(c1, c2) = (-c2, c1 - c2)`, `γ(c1, c2) = (-c1, -c2)`
//! acting on residue pairs. Heights are invariant under it, which lets the
//! grid evaluate one representative per orbit.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("the pair (0, 0) is fixed by every symmetry and has no meaningful orbit")]
    TrivialPair,
    #[error("modulus must be positive")]
    ZeroModulus,
}

type Matrix = [[i64; 2]; 2];

const IDENTITY: Matrix = [[1, 0], [0, 1]];
const ALPHA: Matrix = [[0, 1], [1, 0]];
const BETA: Matrix = [[0, -1], [1, -1]];
const GAMMA: Matrix = [[-1, 0], [0, -1]];

fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `α^e1 β^e2 γ^e3` with `e1, e3 ∈ {0, 1}` and `e2 ∈ {0, 1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetryElement {
    e1: u8,
    e2: u8,
    e3: u8,
}

impl SymmetryElement {
    pub const IDENTITY: SymmetryElement = SymmetryElement { e1: 0, e2: 0, e3: 0 };
    pub const ALPHA: SymmetryElement = SymmetryElement { e1: 1, e2: 0, e3: 0 };
    pub const BETA: SymmetryElement = SymmetryElement { e1: 0, e2: 1, e3: 0 };
    pub const GAMMA: SymmetryElement = SymmetryElement { e1: 0, e2: 0, e3: 1 };

    pub fn new(e1: u8, e2: u8, e3: u8) -> Option<Self> {
        (e1 < 2 && e2 < 3 && e3 < 2).then_some(Self { e1, e2, e3 })
    }

    pub fn exponents(&self) -> (u8, u8, u8) {
        (self.e1, self.e2, self.e3)
    }

    /// All twelve elements, each exactly once.
    pub fn all() -> [SymmetryElement; 12] {
        let mut out = [Self::IDENTITY; 12];
        let mut i = 0;
        for e1 in 0..2 {
            for e2 in 0..3 {
                for e3 in 0..2 {
                    out[i] = Self { e1, e2, e3 };
                    i += 1;
                }
            }
        }
        out
    }

    /// Integer matrix of the linear map.
    pub fn matrix(&self) -> Matrix {
        let mut m = IDENTITY;
        if self.e1 == 1 {
            m = mul(&m, &ALPHA);
        }
        for _ in 0..self.e2 {
            m = mul(&m, &BETA);
        }
        if self.e3 == 1 {
            m = mul(&m, &GAMMA);
        }
        m
    }

    fn from_matrix(m: &Matrix) -> Option<Self> {
        Self::all().into_iter().find(|g| &g.matrix() == m)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        Self::from_matrix(&mul(&self.matrix(), &other.matrix()))
            .expect("the twelve elements are closed under composition")
    }

    pub fn inverse(&self) -> SymmetryElement {
        Self::all()
            .into_iter()
            .find(|g| self.compose(g) == Self::IDENTITY)
            .expect("every element has an inverse")
    }

    /// Acts on `(c1, c2)` and reduces into `[0, d)`.
    pub fn apply(&self, c: (u64, u64), d: u64) -> (u64, u64) {
        let m = self.matrix();
        let dd = d as i128;
        let (x, y) = (c.0 as i128, c.1 as i128);
        let r1 = (m[0][0] as i128 * x + m[0][1] as i128 * y).rem_euclid(dd);
        let r2 = (m[1][0] as i128 * x + m[1][1] as i128 * y).rem_euclid(dd);
        (r1 as u64, r2 as u64)
    }
}

fn check(c: (u64, u64), d: u64) -> Result<(u64, u64), SymmetryError> {
    if d == 0 {
        return Err(SymmetryError::ZeroModulus);
    }
    let c = (c.0 % d, c.1 % d);
    if c == (0, 0) {
        return Err(SymmetryError::TrivialPair);
    }
    Ok(c)
}

pub fn orbit(c: (u64, u64), d: u64) -> Result<BTreeSet<(u64, u64)>, SymmetryError> {
    let c = check(c, d)?;
    Ok(SymmetryElement::all().iter().map(|g| g.apply(c, d)).collect())
}

/// Lexicographically smallest member of the orbit.
pub fn canonical_representative(c: (u64, u64), d: u64) -> Result<(u64, u64), SymmetryError> {
    let c = check(c, d)?;
    Ok(SymmetryElement::all()
        .iter()
        .map(|g| g.apply(c, d))
        .min()
        .expect("group is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::{total_height, TorsionPoint};

    /// Orbit by closure under the three generators, independent of the
    /// twelve-element table.
    fn closure_orbit(c: (u64, u64), d: u64) -> BTreeSet<(u64, u64)> {
        let gens = [SymmetryElement::ALPHA, SymmetryElement::BETA, SymmetryElement::GAMMA];
        let mut seen = BTreeSet::from([c]);
        let mut frontier = vec![c];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = g.apply(x, d);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn apply_examples() {
        assert_eq!(SymmetryElement::BETA.apply((1, 0), 5), (0, 1));
        assert_eq!(SymmetryElement::GAMMA.apply((1, 3), 5), (4, 2));
        let beta3 = SymmetryElement::BETA
            .compose(&SymmetryElement::BETA)
            .compose(&SymmetryElement::BETA);
        assert_eq!(beta3, SymmetryElement::IDENTITY);
        for c in [(1, 2), (3, 7), (0, 5)] {
            let mut x = c;
            for _ in 0..3 {
                x = SymmetryElement::BETA.apply(x, 11);
            }
            assert_eq!(x, c);
        }
    }

    #[test]
    fn orbit_examples() {
        let o = orbit((1, 1), 3).unwrap();
        let expected = BTreeSet::from([(1, 1), (2, 2), (2, 0), (0, 2), (1, 0), (0, 1)]);
        assert_eq!(o, expected);
        assert_eq!(o, closure_orbit((1, 1), 3));
        assert_eq!(orbit((0, 0), 3), Err(SymmetryError::TrivialPair));
        let o = orbit((1, 3), 8).unwrap();
        assert_eq!(o.len(), 12);
        assert_eq!(o, closure_orbit((1, 3), 8));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_representative((2, 2), 3).unwrap(), (0, 1));
        assert_eq!(canonical_representative((0, 1), 3).unwrap(), (0, 1));
        let lexmin = *closure_orbit((7, 7), 8).iter().next().unwrap();
        assert_eq!(canonical_representative((7, 7), 8).unwrap(), lexmin);
        assert_eq!(lexmin, (0, 1));
        assert!(canonical_representative((0, 0), 8).is_err());
    }

    #[test]
    fn group_law() {
        let all = SymmetryElement::all();
        let distinct: BTreeSet<_> = all.iter().map(|g| g.matrix()).collect();
        assert_eq!(distinct.len(), 12);
        for a in &all {
            for b in &all {
                assert!(all.contains(&a.compose(b)));
            }
            assert_eq!(a.compose(&a.inverse()), SymmetryElement::IDENTITY);
            assert_eq!(a.inverse().compose(a), SymmetryElement::IDENTITY);
        }
        let (a, b, g) = (SymmetryElement::ALPHA, SymmetryElement::BETA, SymmetryElement::GAMMA);
        assert_eq!(a.compose(&a), SymmetryElement::IDENTITY);
        assert_eq!(g.compose(&g), SymmetryElement::IDENTITY);
        assert_eq!(b.compose(&a), a.compose(&b).compose(&b));
        assert_eq!(g.compose(&a), a.compose(&g));
        assert_eq!(g.compose(&b), b.compose(&g));
    }

    #[test]
    fn orbit_sizes_divide_twelve_and_partition() {
        for d in 1..=40u64 {
            let mut reps = BTreeSet::new();
            for c1 in 0..d {
                for c2 in 0..d {
                    if (c1, c2) == (0, 0) {
                        continue;
                    }
                    let o = orbit((c1, c2), d).unwrap();
                    assert_eq!(12 % o.len(), 0);
                    assert_eq!(o, closure_orbit((c1, c2), d));
                    let r = canonical_representative((c1, c2), d).unwrap();
                    assert_eq!(canonical_representative(r, d).unwrap(), r);
                    reps.insert(r);
                }
            }
            let total: usize = reps.iter().map(|&r| orbit(r, d).unwrap().len()).sum();
            assert_eq!(total as u64, d * d - 1);
        }
    }

    #[test]
    fn heights_are_invariant() {
        for d in 2..=48u64 {
            for c1 in 0..d {
                for c2 in 0..d {
                    if (c1, c2) == (0, 0) {
                        continue;
                    }
                    let p = TorsionPoint::new(d, c1 as i64, c2 as i64).unwrap();
                    let h = total_height::<f64>(&p).unwrap().total;
                    for g in SymmetryElement::all() {
                        let (x, y) = g.apply((c1, c2), d);
                        let q = TorsionPoint::new(d, x as i64, y as i64).unwrap();
                        let hq = total_height::<f64>(&q).unwrap().total;
                        assert!((h - hq).abs() <= 1e-12, "{p:?} vs {q:?}");
                    }
                }
            }
        }
    }
}
