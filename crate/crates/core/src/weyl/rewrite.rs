//! Normal ordering of raw generator words by adjacent swaps.
//!
//! A word is rewritten one adjacent out-of-order pair at a time:
//! `p_q q -> q p_q - i hbar` for a conjugate pair, plain exchange otherwise.
//! This is independent of the closed-form product in `expr`, and the result
//! does not depend on which pair is picked first.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::coeff::GaussianRational;
use super::expr::{Generator, WeylExpression, WeylMonomial, MAX_DEGREE};
use crate::error::{Error, Result};

/// A coefficient times `hbar^n` times a product of generators in the given order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub coeff: GaussianRational,
    pub hbar: u32,
    pub word: Vec<Generator>,
}

impl RawTerm {
    pub fn new(coeff: GaussianRational, word: Vec<Generator>) -> Self {
        RawTerm { coeff, hbar: 0, word }
    }

    pub fn unit(word: Vec<Generator>) -> Self {
        RawTerm::new(GaussianRational::from_int(1), word)
    }
}

/// Which out-of-order adjacent pair is rewritten first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// First offending pair from the left.
    #[default]
    Leftmost,
    /// Last offending pair from the right.
    Rightmost,
}

fn find_pair(word: &[Generator], strategy: Strategy) -> Option<usize> {
    let mut pairs = word.windows(2).enumerate().filter(|(_, w)| w[0] > w[1]).map(|(i, _)| i);
    match strategy {
        Strategy::Leftmost => pairs.next(),
        Strategy::Rightmost => pairs.next_back(),
    }
}

/// Normal orders a sum of raw words.
pub fn normal_order(terms: &[RawTerm]) -> Result<WeylExpression> {
    normal_order_with(terms, Strategy::default())
}

pub fn normal_order_with(terms: &[RawTerm], strategy: Strategy) -> Result<WeylExpression> {
    let mut pending: BTreeMap<(Vec<Generator>, u32), GaussianRational> = BTreeMap::new();
    let push = |pending: &mut BTreeMap<(Vec<Generator>, u32), GaussianRational>,
                word: Vec<Generator>,
                hbar: u32,
                c: GaussianRational| {
        if c.is_zero() {
            return;
        }
        let key = (word, hbar);
        let slot = pending.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            pending.remove(&key);
        }
    };
    for t in terms {
        let degree = t.word.len() as u32;
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree,
                limit: MAX_DEGREE,
            });
        }
        push(&mut pending, t.word.clone(), t.hbar, t.coeff.clone());
    }

    let mut out = WeylExpression::zero();
    // Longest words first so shorter correction terms accumulate before they
    // are processed.
    while let Some(key) = pending.keys().max_by_key(|(w, _)| w.len()).cloned() {
        let c = pending.remove(&key).expect("key was just found");
        let (word, hbar) = key;
        match find_pair(&word, strategy) {
            None => out.add_term(WeylMonomial::from_sorted_word(&word), hbar, c),
            Some(i) => {
                let (left, right) = (word[i], word[i + 1]);
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                push(&mut pending, swapped, hbar, c.clone());
                if left.is_conjugate_pair(right) {
                    let mut shorter = word;
                    shorter.drain(i..i + 2);
                    push(&mut pending, shorter, hbar + 1, -(c * GaussianRational::i()));
                }
            }
        }
    }
    Ok(out)
}
