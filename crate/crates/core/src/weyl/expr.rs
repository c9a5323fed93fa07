use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::coeff::{GaussianRational, WeylCoefficient};
use crate::error::{Error, Result};

/// Highest total degree (in generators) an expression may reach.
pub const MAX_DEGREE: u32 = 16;

/// Generators in canonical order: all positions before all momenta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X,
    Y,
    Z,
    Px,
    Py,
    Pz,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::X,
        Generator::Y,
        Generator::Z,
        Generator::Px,
        Generator::Py,
        Generator::Pz,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_momentum(self) -> bool {
        self.index() >= 3
    }

    /// Spatial dimension 0, 1 or 2.
    pub fn dimension(self) -> usize {
        self.index() % 3
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::X => "x",
            Generator::Y => "y",
            Generator::Z => "z",
            Generator::Px => "px",
            Generator::Py => "py",
            Generator::Pz => "pz",
        }
    }

    pub fn from_name(s: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.name() == s)
    }

    /// True when `self` followed by `next` is `p_q q` for the same dimension.
    pub fn is_conjugate_pair(self, next: Generator) -> bool {
        self.is_momentum() && !next.is_momentum() && self.dimension() == next.dimension()
    }
}

/// `x^a y^b z^c px^d py^e pz^f`, always normal ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct WeylMonomial {
    pub exponents: [u32; 6],
}

impl WeylMonomial {
    pub fn one() -> Self {
        WeylMonomial::default()
    }

    pub fn generator(g: Generator) -> Self {
        let mut m = WeylMonomial::default();
        m.exponents[g.index()] = 1;
        m
    }

    /// Normal-ordered monomial with the same generator counts as `word`.
    pub fn from_sorted_word(word: &[Generator]) -> Self {
        let mut m = WeylMonomial::default();
        for g in word {
            m.exponents[g.index()] += 1;
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn word(&self) -> Vec<Generator> {
        Generator::ALL
            .into_iter()
            .flat_map(|g| std::iter::repeat_n(g, self.exponents[g.index()] as usize))
            .collect()
    }
}

/// Monomials are listed in decreasing lexicographic order of their exponent
/// vectors (higher powers of earlier generators first).
impl Ord for WeylMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.exponents.cmp(&self.exponents)
    }
}

impl PartialOrd for WeylMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct TermKey {
    monomial: WeylMonomial,
    hbar: u32,
}

/// A sum of normal-ordered monomials with `GaussianRational·hbar^n` coefficients.
///
/// Zero coefficients are never stored, so structural equality is operator
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WeylExpression {
    terms: BTreeMap<TermKey, GaussianRational>,
}

impl WeylExpression {
    pub fn zero() -> Self {
        WeylExpression::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        WeylExpression::term(c, 0, WeylMonomial::one())
    }

    pub fn int(n: i64) -> Self {
        WeylExpression::constant(GaussianRational::from_int(n))
    }

    pub fn hbar() -> Self {
        WeylExpression::term(GaussianRational::one(), 1, WeylMonomial::one())
    }

    pub fn i() -> Self {
        WeylExpression::constant(GaussianRational::i())
    }

    pub fn generator(g: Generator) -> Self {
        WeylExpression::term(GaussianRational::one(), 0, WeylMonomial::generator(g))
    }

    pub fn term(c: GaussianRational, hbar: u32, monomial: WeylMonomial) -> Self {
        let mut e = WeylExpression::zero();
        e.add_term(monomial, hbar, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest generator degree among the terms (0 for constants and zero).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.monomial.degree()).max().unwrap_or(0)
    }

    /// Iterates `(monomial, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (WeylMonomial, WeylCoefficient)> + '_ {
        self.terms.iter().map(|(k, c)| {
            (
                k.monomial,
                WeylCoefficient {
                    value: c.clone(),
                    hbar: k.hbar,
                },
            )
        })
    }

    pub(crate) fn add_term(&mut self, monomial: WeylMonomial, hbar: u32, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let key = TermKey { monomial, hbar };
        let slot = self.terms.entry(key).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &WeylExpression) -> WeylExpression {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.monomial, k.hbar, c.clone());
        }
        out
    }

    pub fn neg(&self) -> WeylExpression {
        self.scale(&-GaussianRational::one())
    }

    pub fn sub(&self, other: &WeylExpression) -> WeylExpression {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &GaussianRational) -> WeylExpression {
        let mut out = WeylExpression::zero();
        for (k, v) in &self.terms {
            out.add_term(k.monomial, k.hbar, v * c);
        }
        out
    }

    /// Normal-ordered product `self · other`.
    ///
    /// Each factor is already normal ordered, so only the momenta of the left
    /// term need to pass the positions of the right term. Per dimension,
    /// `p^b q^c = sum_k k!·C(b,k)·C(c,k)·(-i hbar)^k q^(c-k) p^(b-k)`.
    pub fn mul(&self, other: &WeylExpression) -> Result<WeylExpression> {
        let mut out = WeylExpression::zero();
        for (lk, lc) in &self.terms {
            for (rk, rc) in &other.terms {
                let degree = lk.monomial.degree() + rk.monomial.degree();
                if degree > MAX_DEGREE {
                    return Err(Error::DegreeOverflow {
                        degree,
                        limit: MAX_DEGREE,
                    });
                }
                let base = lc * rc;
                multiply_monomials(&lk.monomial, &rk.monomial, &mut |m, k, factor| {
                    out.add_term(m, lk.hbar + rk.hbar + k, &base * &factor);
                });
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<WeylExpression> {
        let mut out = WeylExpression::int(1);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for j in 0..k {
        r = r * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    r
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Calls `emit(monomial, hbar_power, coefficient)` for each term of `left · right`.
fn multiply_monomials(
    left: &WeylMonomial,
    right: &WeylMonomial,
    emit: &mut dyn FnMut(WeylMonomial, u32, GaussianRational),
) {
    // per dimension: momenta exponent on the left, position exponent on the right
    let b: [u32; 3] = [left.exponents[3], left.exponents[4], left.exponents[5]];
    let c: [u32; 3] = [right.exponents[0], right.exponents[1], right.exponents[2]];
    for kx in 0..=b[0].min(c[0]) {
        for ky in 0..=b[1].min(c[1]) {
            for kz in 0..=b[2].min(c[2]) {
                let ks = [kx, ky, kz];
                let mut weight = BigInt::one();
                let mut m = WeylMonomial::default();
                for d in 0..3 {
                    let k = ks[d];
                    weight *= factorial(k) * binomial(b[d], k) * binomial(c[d], k);
                    m.exponents[d] = left.exponents[d] + c[d] - k;
                    m.exponents[d + 3] = b[d] - k + right.exponents[d + 3];
                }
                let total = kx + ky + kz;
                let factor =
                    &GaussianRational::neg_i_pow(total) * &GaussianRational::real(BigRational::from_integer(weight));
                emit(m, total, factor);
            }
        }
    }
}

/// Formats the expression in the input grammar, terms in canonical order.
impl fmt::Display for WeylExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            let negative;
            if c.is_real() || c.is_imaginary() {
                let (mag, imaginary) = if c.is_real() { (&c.re, false) } else { (&c.im, true) };
                negative = mag.is_negative();
                let mag = mag.abs();
                if !mag.is_one() {
                    factors.push(mag.to_string());
                }
                if imaginary {
                    factors.push("i".into());
                }
            } else {
                negative = false;
                factors.push(c.to_string());
            }
            factors.extend(std::iter::repeat_n("hbar".to_owned(), k.hbar as usize));
            factors.extend(k.monomial.word().into_iter().map(|g| g.name().to_owned()));
            if factors.is_empty() {
                factors.push("1".into());
            }
            let body = factors.join("*");
            match (n, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for WeylExpression {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeylExpression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}
