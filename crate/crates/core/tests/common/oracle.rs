//! Weyl algebra oracle: the Schrödinger representation on polynomials.
//!
//! Positions act by multiplication and `p_j = -i hbar d/dq_j`. `hbar` is kept
//! as a formal power, so two operators agree iff they agree on every
//! monomial up to their differential order.

use std::collections::BTreeMap;

use num_traits::Zero;
use spinbasis::weyl::{GaussianRational, Generator, WeylExpression};

/// Sum of `c · hbar^h · x^a y^b z^c`, keyed by `([a, b, c], h)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly(pub BTreeMap<([u32; 3], u32), GaussianRational>);

impl Poly {
    pub fn monomial(exp: [u32; 3]) -> Poly {
        Poly([((exp, 0), GaussianRational::from_int(1))].into())
    }

    fn add_term(&mut self, key: ([u32; 3], u32), c: GaussianRational) {
        let slot = self.0.entry(key).or_insert_with(GaussianRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn add(&mut self, other: &Poly, scale: &GaussianRational, hbar: u32) {
        for ((e, h), c) in &other.0 {
            self.add_term((*e, h + hbar), c * scale);
        }
    }

    pub fn apply(&self, g: Generator) -> Poly {
        let d = g.dimension();
        let mut out = Poly::default();
        for ((e, h), c) in &self.0 {
            let mut e2 = *e;
            if g.is_momentum() {
                if e[d] == 0 {
                    continue;
                }
                e2[d] -= 1;
                let k = GaussianRational::from_int(e[d] as i64);
                out.add_term((e2, h + 1), -(&(c * &k) * &GaussianRational::i()));
            } else {
                e2[d] += 1;
                out.add_term((e2, *h), c.clone());
            }
        }
        out
    }

    /// `word[0] · word[1] · ... · f`: the rightmost generator acts first.
    pub fn apply_word(&self, word: &[Generator]) -> Poly {
        word.iter().rev().fold(self.clone(), |f, g| f.apply(*g))
    }

    pub fn apply_expr(&self, e: &WeylExpression) -> Poly {
        let mut out = Poly::default();
        for (m, c) in e.terms() {
            out.add(&self.apply_word(&m.word()), &c.value, c.hbar);
        }
        out
    }
}

/// Every monomial `x^a y^b z^c` with `a + b + c <= degree`.
pub fn test_monomials(degree: u32) -> Vec<Poly> {
    let mut out = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                out.push(Poly::monomial([a, b, c]));
            }
        }
    }
    out
}

/// Action of a sum of raw words.
pub fn apply_raw(f: &Poly, terms: &[spinbasis::weyl::RawTerm]) -> Poly {
    let mut out = Poly::default();
    for t in terms {
        out.add(&f.apply_word(&t.word), &t.coeff, t.hbar);
    }
    out
}

/// True when `e` acts like the raw sum `terms` on every test monomial.
pub fn represents(e: &WeylExpression, terms: &[spinbasis::weyl::RawTerm]) -> bool {
    let order = terms.iter().map(|t| t.word.len() as u32).max().unwrap_or(0);
    test_monomials(order)
        .iter()
        .all(|f| f.apply_expr(e) == apply_raw(f, terms))
}

/// True when two expressions act identically up to differential order `order`.
pub fn same_operator(a: &WeylExpression, b: &WeylExpression, order: u32) -> bool {
    test_monomials(order).iter().all(|f| f.apply_expr(a) == f.apply_expr(b))
}
