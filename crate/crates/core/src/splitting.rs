//! The embedding set as a disjoint union of Frobenius orbits.
//!
//! Only the prime `p` and the residue degrees of the primes above it are
//! modelled. Embeddings are flat-indexed orbit-major, position-minor, in the
//! orbit order given at construction. Frobenius acts on an orbit of length
//! `f` by `position -> position + 1 (mod f)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the embedding set: an orbit and a position inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub orbit: usize,
    pub position: usize,
}

impl Embedding {
    pub const fn new(orbit: usize, position: usize) -> Self {
        Self { orbit, position }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.orbit, self.position)
    }
}

/// A rational prime together with the residue degrees of the primes above it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplittingType {
    p: u64,
    degrees: Vec<usize>,
    offsets: Vec<usize>,
    // Flat-index tables for the Frobenius action and its inverse.
    next: Vec<usize>,
    prev: Vec<usize>,
    orbit_of: Vec<usize>,
}

impl SplittingType {
    pub fn new(p: u64, degrees: &[usize]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degrees.is_empty() {
            return Err(Error::EmptyDegrees);
        }
        if let Some((orbit, &degree)) = degrees.iter().enumerate().find(|(_, &f)| f < 1) {
            return Err(Error::DegreeTooSmall { orbit, degree });
        }

        let mut offsets = Vec::with_capacity(degrees.len());
        let mut next = Vec::new();
        let mut prev = Vec::new();
        let mut orbit_of = Vec::new();
        let mut start = 0;
        for (orbit, &f) in degrees.iter().enumerate() {
            offsets.push(start);
            for j in 0..f {
                next.push(start + (j + 1) % f);
                prev.push(start + (j + f - 1) % f);
                orbit_of.push(orbit);
            }
            start += f;
        }

        Ok(Self {
            p,
            degrees: degrees.to_vec(),
            offsets,
            next,
            prev,
            orbit_of,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Number of orbits (primes above `p`).
    pub fn orbit_count(&self) -> usize {
        self.degrees.len()
    }

    /// Total number of embeddings, `d = sum of the residue degrees`.
    pub fn d(&self) -> usize {
        self.next.len()
    }

    pub fn splits_completely(&self) -> bool {
        self.degrees.iter().all(|&f| f == 1)
    }

    /// Flat index range `[start, start + f)` of an orbit.
    pub fn orbit_range(&self, orbit: usize) -> std::ops::Range<usize> {
        let start = self.offsets[orbit];
        start..start + self.degrees[orbit]
    }

    /// Builds an embedding, reducing the position modulo the orbit length.
    pub fn embedding(&self, orbit: usize, position: usize) -> Result<Embedding> {
        match self.degrees.get(orbit) {
            Some(&f) => Ok(Embedding::new(orbit, position % f)),
            None => Err(Error::EmbeddingOutOfRange(Embedding::new(orbit, position))),
        }
    }

    pub fn flat_index(&self, beta: Embedding) -> Result<usize> {
        match self.degrees.get(beta.orbit) {
            Some(&f) if beta.position < f => Ok(self.offsets[beta.orbit] + beta.position),
            _ => Err(Error::EmbeddingOutOfRange(beta)),
        }
    }

    pub fn embedding_at(&self, index: usize) -> Result<Embedding> {
        let orbit = *self.orbit_of.get(index).ok_or(Error::IndexOutOfRange {
            index,
            d: self.d(),
        })?;
        Ok(Embedding::new(orbit, index - self.offsets[orbit]))
    }

    /// All embeddings in flat order.
    pub fn embeddings(&self) -> impl Iterator<Item = Embedding> + '_ {
        self.degrees
            .iter()
            .enumerate()
            .flat_map(|(orbit, &f)| (0..f).map(move |position| Embedding::new(orbit, position)))
    }

    /// `sigma o beta`: same orbit, next position.
    pub fn frobenius(&self, beta: Embedding) -> Result<Embedding> {
        let i = self.flat_index(beta)?;
        self.embedding_at(self.next[i])
    }

    /// `sigma^-1 o beta`: same orbit, previous position.
    pub fn frobenius_inverse(&self, beta: Embedding) -> Result<Embedding> {
        let i = self.flat_index(beta)?;
        self.embedding_at(self.prev[i])
    }

    /// Flat index of `sigma o beta` given the flat index of `beta`.
    ///
    /// Panics if `index >= d`.
    pub fn next_index(&self, index: usize) -> usize {
        self.next[index]
    }

    /// Flat index of `sigma^-1 o beta` given the flat index of `beta`.
    ///
    /// Panics if `index >= d`.
    pub fn prev_index(&self, index: usize) -> usize {
        self.prev[index]
    }

    /// Residue degree of the orbit containing the flat index.
    ///
    /// Panics if `index >= d`.
    pub fn degree_at(&self, index: usize) -> usize {
        self.degrees[self.orbit_of[index]]
    }
}

/// Canonical textual form `p=<int>;f=<int>,<int>,...`.
impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={};f=", self.p)?;
        for (i, deg) in self.degrees.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{deg}")?;
        }
        Ok(())
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &WITNESSES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut odd = n - 1;
    let mut twos = 0;
    while odd.is_multiple_of(2) {
        odd /= 2;
        twos += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &WITNESSES {
        let mut x = pow(a, odd);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(p: u64, degrees: &[usize]) -> SplittingType {
        SplittingType::new(p, degrees).unwrap()
    }

    #[test]
    fn build_examples() {
        let a = st(2, &[2]);
        assert_eq!((a.d(), a.orbit_count()), (2, 1));
        let b = st(5, &[1, 1]);
        assert_eq!(b.d(), 2);
        assert!(b.splits_completely());
        let c = st(3, &[1, 2]);
        assert_eq!(c.d(), 3);
        assert_eq!(c.orbit_range(1), 1..3);
    }

    #[test]
    fn build_errors_are_distinct() {
        assert_eq!(SplittingType::new(4, &[1]), Err(Error::NotPrime(4)));
        assert_eq!(SplittingType::new(1, &[1]), Err(Error::NotPrime(1)));
        assert_eq!(SplittingType::new(3, &[]), Err(Error::EmptyDegrees));
        assert_eq!(
            SplittingType::new(3, &[1, 0]),
            Err(Error::DegreeTooSmall { orbit: 1, degree: 0 })
        );
    }

    #[test]
    fn frobenius_examples() {
        let e = Embedding::new;
        assert_eq!(st(2, &[2]).frobenius(e(0, 1)), Ok(e(0, 0)));
        assert_eq!(st(5, &[1, 1]).frobenius(e(1, 0)), Ok(e(1, 0)));
        assert_eq!(st(3, &[1, 2]).frobenius(e(1, 0)), Ok(e(1, 1)));
        assert_eq!(st(2, &[2]).frobenius_inverse(e(0, 0)), Ok(e(0, 1)));
        assert_eq!(st(5, &[1, 1]).frobenius_inverse(e(0, 0)), Ok(e(0, 0)));
    }

    #[test]
    fn out_of_range_embeddings_rejected() {
        let s = st(3, &[1, 2]);
        let bad = Embedding::new(0, 1);
        assert_eq!(s.frobenius(bad), Err(Error::EmbeddingOutOfRange(bad)));
        let bad = Embedding::new(2, 0);
        assert_eq!(s.frobenius_inverse(bad), Err(Error::EmbeddingOutOfRange(bad)));
        assert!(s.embedding_at(3).is_err());
    }

    #[test]
    fn embedding_positions_reduce_mod_orbit_length() {
        let s = st(3, &[1, 3]);
        assert_eq!(s.embedding(1, 7), Ok(Embedding::new(1, 1)));
        assert_eq!(s.embedding(0, 5), Ok(Embedding::new(0, 0)));
        assert!(s.embedding(2, 0).is_err());
    }

    #[test]
    fn splits_completely_examples() {
        assert!(st(5, &[1, 1]).splits_completely());
        assert!(!st(2, &[2]).splits_completely());
        assert!(!st(3, &[1, 2]).splits_completely());
    }

    #[test]
    fn flat_indexing_is_orbit_major() {
        let s = st(2, &[3, 1, 2]);
        let flat: Vec<_> = s.embeddings().map(|b| s.flat_index(b).unwrap()).collect();
        assert_eq!(flat, (0..6).collect::<Vec<_>>());
        assert_eq!(s.embedding_at(4), Ok(Embedding::new(2, 0)));
        assert_eq!(s.to_string(), "p=2;f=3,1,2");
    }

    #[test]
    fn frobenius_orbits_have_exact_length() {
        for s in [st(2, &[2]), st(3, &[1, 2]), st(7, &[4, 1, 3]), st(2, &[5])] {
            for beta in s.embeddings() {
                let f = s.degrees()[beta.orbit];
                assert_eq!(s.frobenius_inverse(s.frobenius(beta).unwrap()), Ok(beta));
                let mut cur = beta;
                for step in 1..=f {
                    cur = s.frobenius(cur).unwrap();
                    assert_eq!(cur.orbit, beta.orbit);
                    assert_eq!(cur == beta, step == f, "power {step} of orbit length {f}");
                }
            }
            // bijection
            let mut images: Vec<_> = s.embeddings().map(|b| s.frobenius(b).unwrap()).collect();
            images.sort();
            assert_eq!(images, s.embeddings().collect::<Vec<_>>());
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }
}
