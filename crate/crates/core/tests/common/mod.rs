//! Exact polynomial oracles shared by the integration tests.
//!
//! Polynomials are dense coefficient vectors in increasing degree with a
//! nonzero last entry (or empty for the zero polynomial).

#![allow(dead_code)]

use num_traits::Zero;
use onebit_core::rational::integer;
use onebit_core::Rational;
use std::cmp::Ordering;

pub type Poly = Vec<Rational>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn from_ints(c: &[i64]) -> Poly {
    trim(c.iter().map(|&v| integer(v)).collect())
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn derivative(p: &[Rational]) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * integer(i as i64))
            .collect(),
    )
}

/// Remainder of `a` divided by `b` (`b` nonzero).
pub fn rem(a: &[Rational], b: &[Rational]) -> Poly {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap().clone() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r = trim(r);
    }
    r
}

/// Exact quotient of `a` by `b` (assumes `b` divides `a`).
pub fn div_exact(a: &[Rational], b: &[Rational]) -> Poly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![Rational::zero(); a.len() + 1 - b.len()];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap().clone() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        q[shift] = f;
        r = trim(r);
    }
    assert!(r.is_empty(), "inexact division");
    trim(q)
}

pub fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    // Monic, to keep coefficients small.
    match a.last().cloned() {
        Some(lead) => a.into_iter().map(|c| c / &lead).collect(),
        None => a,
    }
}

fn sturm_chain(p: &[Rational]) -> Vec<Poly> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    while chain.last().is_some_and(|q| !q.is_empty()) {
        let n = chain.len();
        let r = rem(&chain[n - 2], &chain[n - 1]);
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain.pop();
    chain
}

fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
    let s: Vec<Ordering> = signs.filter(|o| *o != Ordering::Equal).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sign_at(p: &[Rational], x: &Rational) -> Ordering {
    eval(p, x).cmp(&Rational::zero())
}

fn sign_at_infinity(p: &[Rational], negative: bool) -> Ordering {
    let lead = p.last().unwrap().cmp(&Rational::zero());
    if negative && (p.len() - 1) % 2 == 1 {
        lead.reverse()
    } else {
        lead
    }
}

/// Where a Sturm count endpoint sits.
#[derive(Clone)]
pub enum End {
    NegInf,
    At(Rational),
    PosInf,
}

fn variations_at(chain: &[Poly], e: &End) -> usize {
    match e {
        End::NegInf => variations(chain.iter().map(|q| sign_at_infinity(q, true))),
        End::PosInf => variations(chain.iter().map(|q| sign_at_infinity(q, false))),
        End::At(x) => variations(chain.iter().map(|q| sign_at(q, x))),
    }
}

/// Distinct real roots in `(a, b]` for a nonconstant `p`.
pub fn distinct_roots_between(p: &[Rational], a: &End, b: &End) -> usize {
    if p.len() < 2 {
        return 0;
    }
    let chain = sturm_chain(p);
    variations_at(&chain, a) - variations_at(&chain, b)
}

/// Yun's square-free factorization: `p = c · Π f_i^i`.
pub fn square_free_parts(p: &[Rational]) -> Vec<(usize, Poly)> {
    let mut out = Vec::new();
    if p.len() < 2 {
        return out;
    }
    let dp = derivative(p);
    let a0 = gcd(p, &dp);
    let mut b = div_exact(p, &a0);
    let mut c = div_exact(&dp, &a0);
    let mut d: Poly = trim(
        (0..c.len().max(b.len()))
            .map(|i| {
                c.get(i).cloned().unwrap_or_else(Rational::zero)
                    - derivative(&b).get(i).cloned().unwrap_or_else(Rational::zero)
            })
            .collect(),
    );
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d);
        if a.len() > 1 {
            out.push((i, a.clone()));
        }
        b = div_exact(&b, &a);
        c = div_exact(&d, &a);
        d = trim(
            (0..c.len().max(b.len()))
                .map(|i| {
                    c.get(i).cloned().unwrap_or_else(Rational::zero)
                        - derivative(&b).get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        );
        i += 1;
    }
    out
}

/// Positive real roots counted with multiplicity.
pub fn positive_roots_with_multiplicity(p: &[Rational]) -> usize {
    square_free_parts(p)
        .iter()
        .map(|(m, f)| m * distinct_roots_between(f, &End::At(Rational::zero()), &End::PosInf))
        .sum()
}

/// Distinct real roots with `|r| >= radius` (`radius > 0`).
pub fn roots_outside(p: &[Rational], radius: &Rational) -> usize {
    let neg = -radius.clone();
    let above = distinct_roots_between(p, &End::At(radius.clone()), &End::PosInf);
    let below = distinct_roots_between(p, &End::NegInf, &End::At(neg));
    above + below + usize::from(eval(p, radius).is_zero())
}

/// Real roots counted with multiplicity.
pub fn real_roots_with_multiplicity(p: &[Rational]) -> usize {
    square_free_parts(p)
        .iter()
        .map(|(m, f)| m * distinct_roots_between(f, &End::NegInf, &End::PosInf))
        .sum()
}
