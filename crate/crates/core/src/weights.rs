//! Integer and rational weight vectors indexed by the embedding set, and the
//! partial Hasse weights `h_beta = p e_{sigma^-1 beta} - e_beta`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::splitting::{Embedding, SplittingType};

pub type Rational = BigRational;

fn same_splitting(a: &Arc<SplittingType>, b: &Arc<SplittingType>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_len(st: &SplittingType, found: usize) -> Result<()> {
    if found == st.d() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: st.d(),
            found,
        })
    }
}

/// An integer weight `k = sum k_beta e_beta`, flat-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    st: Arc<SplittingType>,
    entries: Vec<BigInt>,
}

impl WeightVector {
    pub fn new(st: &Arc<SplittingType>, entries: Vec<BigInt>) -> Result<Self> {
        check_len(st, entries.len())?;
        Ok(Self {
            st: Arc::clone(st),
            entries,
        })
    }

    pub fn from_i64(st: &Arc<SplittingType>, entries: &[i64]) -> Result<Self> {
        Self::new(st, entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(st: &Arc<SplittingType>) -> Self {
        Self {
            st: Arc::clone(st),
            entries: vec![BigInt::zero(); st.d()],
        }
    }

    /// The unit vector `e_beta`.
    pub fn unit(st: &Arc<SplittingType>, beta: Embedding) -> Result<Self> {
        let i = st.flat_index(beta)?;
        let mut v = Self::zero(st);
        v.entries[i] = BigInt::from(1);
        Ok(v)
    }

    pub fn splitting(&self) -> &Arc<SplittingType> {
        &self.st
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.entries
    }

    pub fn get(&self, beta: Embedding) -> Result<&BigInt> {
        Ok(&self.entries[self.st.flat_index(beta)?])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<Self> {
        if !same_splitting(&self.st, &other.st) {
            return Err(Error::SplittingMismatch);
        }
        Ok(Self {
            st: Arc::clone(&self.st),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| op(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            st: Arc::clone(&self.st),
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    /// Componentwise partial order; `None` on a splitting mismatch.
    pub fn le(&self, other: &Self) -> Option<bool> {
        same_splitting(&self.st, &other.st)
            .then(|| self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b))
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector {
            st: Arc::clone(&self.st),
            entries: self
                .entries
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect(),
        }
    }

    /// Parses the JSON array form, e.g. `[0, 3]`.
    pub fn from_json(st: &Arc<SplittingType>, text: &str) -> Result<Self> {
        let values: Vec<serde_json::Value> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("weight {text:?}: {e}")))?;
        let entries = values
            .iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => n
                    .to_string()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("{n} is not an integer"))),
                other => Err(Error::Parse(format!("{other} is not an integer"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(st, entries)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.entries)
    }
}

/// Serialized as a JSON array of (arbitrary precision) integers.
impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for x in &self.entries {
            seq.serialize_element(&json_integer(x))?;
        }
        seq.end()
    }
}

pub(crate) fn json_integer(x: &BigInt) -> serde_json::Number {
    x.to_string()
        .parse()
        .expect("decimal integers are valid JSON numbers")
}

fn write_tuple<T: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[T]) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

/// An exact rational vector `sum x_beta e_beta`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalVector {
    st: Arc<SplittingType>,
    entries: Vec<Rational>,
}

impl RationalVector {
    pub fn new(st: &Arc<SplittingType>, entries: Vec<Rational>) -> Result<Self> {
        check_len(st, entries.len())?;
        Ok(Self {
            st: Arc::clone(st),
            entries,
        })
    }

    pub fn zero(st: &Arc<SplittingType>) -> Self {
        Self {
            st: Arc::clone(st),
            entries: vec![Rational::zero(); st.d()],
        }
    }

    pub fn splitting(&self) -> &Arc<SplittingType> {
        &self.st
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, beta: Embedding) -> Result<&Rational> {
        Ok(&self.entries[self.st.flat_index(beta)?])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_splitting(&self.st, &other.st) {
            return Err(Error::SplittingMismatch);
        }
        Ok(Self {
            st: Arc::clone(&self.st),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            st: Arc::clone(&self.st),
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    /// `Some` when every entry is an integer.
    pub fn to_integer(&self) -> Option<WeightVector> {
        self.entries
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(|entries| WeightVector {
                st: Arc::clone(&self.st),
                entries,
            })
    }

    /// Parses a JSON array whose items are integers or strings `"a/b"`.
    pub fn from_json(st: &Arc<SplittingType>, text: &str) -> Result<Self> {
        let values: Vec<serde_json::Value> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("vector {text:?}: {e}")))?;
        let entries = values
            .iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                serde_json::Value::String(s) => parse_rational(s),
                other => Err(Error::Parse(format!("{other} is not a rational"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(st, entries)
    }
}

impl From<&WeightVector> for RationalVector {
    fn from(k: &WeightVector) -> Self {
        k.to_rational()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.entries)
    }
}

/// Serialized as a JSON array of strings `"a"` or `"a/b"` in lowest terms.
impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.entries.iter().map(|x| x.to_string()))
    }
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("{text:?} is not a rational number"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// Flat-indexed entries of `h_beta` for the embedding at `index`.
pub(crate) fn hasse_weight_entries(st: &SplittingType, index: usize) -> Vec<BigInt> {
    let mut entries = vec![BigInt::zero(); st.d()];
    entries[st.prev_index(index)] += BigInt::from(st.p());
    entries[index] -= 1;
    entries
}

/// The weight `h_beta` of the partial Hasse invariant `H_beta`.
pub fn hasse_weight(st: &Arc<SplittingType>, beta: Embedding) -> Result<WeightVector> {
    let i = st.flat_index(beta)?;
    Ok(WeightVector {
        st: Arc::clone(st),
        entries: hasse_weight_entries(st, i),
    })
}

/// `sum_beta n_beta h_beta` for a nonnegative exponent vector `n`.
pub fn combine(n: &WeightVector) -> Result<WeightVector> {
    let st = n.splitting();
    if let Some(index) = n.entries.iter().position(Signed::is_negative) {
        return Err(Error::NegativeExponent { index });
    }
    let p = BigInt::from(st.p());
    let mut entries = vec![BigInt::zero(); st.d()];
    for (i, n_i) in n.entries.iter().enumerate() {
        if n_i.is_zero() {
            continue;
        }
        entries[st.prev_index(i)] += &p * n_i;
        entries[i] -= n_i;
    }
    Ok(WeightVector {
        st: Arc::clone(st),
        entries,
    })
}
