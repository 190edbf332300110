//! Exact rational scalars and sparse univariate polynomials, optionally
//! truncated to `k[x]/(x^{N+1})`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field. `BigRational` keeps itself in lowest terms with a
/// positive denominator, so structural equality is mathematical equality.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `p/q`, or `p` when `q = 1`.
pub fn format_scalar(s: &Scalar) -> String {
    s.to_string()
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            Ok(Scalar::new(num, den))
        }
        None => {
            let num: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Scalar::from_integer(num))
        }
    }
}

/// Serde adapters for scalars written as rational strings.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Scalar, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_scalar(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Scalar, D::Error> {
        let text = String::deserialize(de)?;
        parse_scalar(&text).map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            values: &[Scalar],
            ser: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = ser.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&format_scalar(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            de: D,
        ) -> std::result::Result<Vec<Scalar>, D::Error> {
            let texts = Vec::<String>::deserialize(de)?;
            texts
                .iter()
                .map(|t| parse_scalar(t).map_err(de::Error::custom))
                .collect()
        }
    }
}

/// Sparse polynomial in one variable. `bound = Some(N)` means the element
/// lives in `k[x]/(x^{N+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: BTreeMap<usize, Scalar>,
    bound: Option<usize>,
}

impl Poly {
    pub fn zero(bound: Option<usize>) -> Self {
        Poly {
            coeffs: BTreeMap::new(),
            bound,
        }
    }

    /// Builds a polynomial from `(degree, coefficient)` pairs. Repeated
    /// degrees are summed; terms above the bound are dropped.
    pub fn from_terms<I>(terms: I, bound: Option<usize>) -> Self
    where
        I: IntoIterator<Item = (usize, Scalar)>,
    {
        let mut p = Poly::zero(bound);
        for (deg, c) in terms {
            p.add_term(deg, c);
        }
        p
    }

    pub fn constant(c: Scalar, bound: Option<usize>) -> Self {
        Poly::from_terms([(0, c)], bound)
    }

    pub fn monomial(deg: usize, bound: Option<usize>) -> Self {
        Poly::from_terms([(deg, Scalar::one())], bound)
    }

    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, deg: usize) -> Scalar {
        self.coeffs.get(&deg).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    fn add_term(&mut self, deg: usize, c: Scalar) {
        if c.is_zero() || self.bound.is_some_and(|n| deg > n) {
            return;
        }
        let slot = self.coeffs.entry(deg).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&deg);
        }
    }

    fn check_bounds(&self, other: &Poly) -> Result<()> {
        if self.bound == other.bound {
            Ok(())
        } else {
            Err(Error::contract(format!(
                "polynomial bounds differ: {:?} vs {:?}",
                self.bound, other.bound
            )))
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_bounds(other)?;
        let mut out = self.clone();
        for (d, c) in other.terms() {
            out.add_term(d, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::from_terms(self.terms().map(|(d, v)| (d, v * c)), self.bound)
    }

    /// Ordinary product, reduced modulo `x^{bound+1}` when bounded.
    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_bounds(other)?;
        let mut out = Poly::zero(self.bound);
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out.add_term(i + j, a * b);
            }
        }
        Ok(out)
    }

    /// `P(0)`.
    pub fn eval0(&self) -> Scalar {
        self.coeff(0)
    }

    /// The perm product `P ∘ Q = P(0) Q`.
    pub fn perm_circ(&self, other: &Poly) -> Result<Poly> {
        self.check_bounds(other)?;
        Ok(other.scale(&self.eval0()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{d}")?,
            }
        }
        Ok(())
    }
}

/// Serialized as `[[degree, "p/q"], ...]` sorted by degree. The bound is not
/// part of the wire format.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.coeffs.len()))?;
        for (d, c) in self.terms() {
            seq.serialize_element(&(d, format_scalar(c)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(usize, String)>::deserialize(de)?;
        let mut terms = Vec::with_capacity(pairs.len());
        for (d, text) in pairs {
            terms.push((d, parse_scalar(&text).map_err(de::Error::custom)?));
        }
        Ok(Poly::from_terms(terms, None))
    }
}

/// Multiplies `v` by the lowest common denominator of its entries and
/// divides by the gcd of the numerators, giving a primitive integer vector.
pub(crate) fn primitive_integers(v: &[(usize, Scalar)]) -> Vec<(usize, BigInt)> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut ints: Vec<(usize, BigInt)> = v
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (*i, c.numer() * (&lcm / c.denom())))
        .collect();
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for (_, c) in ints.iter_mut() {
            *c /= &g;
        }
    }
    if ints.first().is_some_and(|(_, c)| c.is_negative()) {
        for (_, c) in ints.iter_mut() {
            *c = -&*c;
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(usize, i64)], bound: Option<usize>) -> Poly {
        Poly::from_terms(terms.iter().map(|&(d, c)| (d, int(c))), bound)
    }

    // Independent oracle: dense double loop over coefficient arrays.
    fn naive_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn scalar_canonical_form() {
        let s = frac(6, -4);
        assert_eq!(s.numer(), &BigInt::from(-3));
        assert_eq!(s.denom(), &BigInt::from(2));
        assert_eq!(format_scalar(&s), "-3/2");
        assert_eq!(format_scalar(&int(5)), "5");
        assert_eq!(parse_scalar("-3/2").unwrap(), s);
        assert_eq!(parse_scalar("4/2").unwrap(), int(2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
    }

    #[test]
    fn mul_binomial_square() {
        let p = poly(&[(0, 1), (1, 1)], Some(2));
        assert_eq!(p.mul(&p).unwrap(), poly(&[(0, 1), (1, 2), (2, 1)], Some(2)));
    }

    #[test]
    fn mul_quotient_kills_top() {
        let x = Poly::monomial(1, Some(1));
        assert!(x.mul(&x).unwrap().is_zero());
    }

    #[test]
    fn mul_unbounded_matches_naive() {
        let p = poly(&[(0, 3), (1, 2)], None);
        let q = poly(&[(1, 1)], None);
        let expected = naive_mul(&[3, 2], &[0, 1]);
        assert_eq!(expected, vec![0, 3, 2]);
        let got = p.mul(&q).unwrap();
        for (d, c) in expected.iter().enumerate() {
            assert_eq!(got.coeff(d), int(*c));
        }
    }

    #[test]
    fn mismatched_bounds_rejected() {
        let p = Poly::monomial(1, Some(2));
        let q = Poly::monomial(1, None);
        assert!(matches!(p.mul(&q), Err(Error::Contract(_))));
        assert!(matches!(p.perm_circ(&q), Err(Error::Contract(_))));
    }

    #[test]
    fn eval0_examples() {
        assert_eq!(Poly::zero(None).eval0(), int(0));
        assert_eq!(poly(&[(0, 3), (1, 5)], None).eval0(), int(3));
        assert_eq!(Poly::monomial(2, None).eval0(), int(0));
    }

    #[test]
    fn perm_circ_examples() {
        let b = Some(3);
        let x_plus_1 = poly(&[(0, 1), (1, 1)], b);
        let x2 = Poly::monomial(2, b);
        assert_eq!(x_plus_1.perm_circ(&x2).unwrap(), x2);
        let x = Poly::monomial(1, b);
        assert!(x.perm_circ(&poly(&[(0, 2), (1, 3)], b)).unwrap().is_zero());
        let one = Poly::constant(int(1), b);
        let q = poly(&[(0, 2), (1, 3)], b);
        assert_eq!(one.perm_circ(&q).unwrap(), q);
    }

    #[test]
    fn zero_never_stored() {
        let p = poly(&[(1, 2), (1, -2), (0, 0)], None);
        assert!(p.is_zero());
        assert_eq!(p.terms().count(), 0);
    }

    #[test]
    fn poly_wire_format() {
        let p = Poly::from_terms([(2, frac(1, 2)), (0, int(-3))], None);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"[[0,"-3"],[2,"1/2"]]"#);
        let back: Poly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn primitive_vector() {
        let v = vec![(0, frac(-1, 2)), (3, frac(3, 4)), (5, int(0))];
        let p = primitive_integers(&v);
        assert_eq!(p, vec![(0, BigInt::from(2)), (3, BigInt::from(-3))]);
    }
}
