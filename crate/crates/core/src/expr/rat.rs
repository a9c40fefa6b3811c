//! Rational normal form: a reduced ratio of two polynomials with a monic
//! denominator and a deterministic term order. Conversion back to a tree is
//! canonical, which makes `normal_form` idempotent.

use super::field::Coeff;
use super::poly::{poly_gcd, Atom, Mono, Poly};
use super::tree::{Symbol, Tree};

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum NormalError {
    #[error("division by an identically zero denominator")]
    ZeroDenominator,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rat<K, V> {
    pub num: Poly<K, V>,
    pub den: Poly<K, V>,
}

impl<K: Coeff, V: Symbol> Rat<K, V> {
    pub fn from_poly(p: Poly<K, V>) -> Self {
        Rat {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub(crate) fn reduced(num: Poly<K, V>, den: Poly<K, V>) -> Self {
        assert!(!den.is_zero(), "internal: zero denominator after checks");
        if num.is_zero() {
            return Rat::zero();
        }
        let (mut num, mut den) = if den.is_one() {
            (num, den)
        } else {
            let g = poly_gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides"),
                    den.exact_div(&g).expect("gcd divides"),
                )
            }
        };
        // Monic denominator fixes the scaling ambiguity.
        let lc = den.leading().expect("nonzero").1.clone();
        if lc != K::one() {
            let inv = lc.inv().expect("field");
            num = num.mul_scalar(&inv);
            den = den.mul_scalar(&inv);
        }
        Rat { num, den }
    }

    pub fn add(&self, o: &Self) -> Self {
        Rat::reduced(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Rat::reduced(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        Rat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Rat::reduced(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Result<Self, NormalError> {
        if o.num.is_zero() {
            return Err(NormalError::ZeroDenominator);
        }
        Ok(Rat::reduced(
            self.num.mul(&o.den),
            self.den.mul(&o.num),
        ))
    }

    pub fn pow(&self, n: i32) -> Result<Self, NormalError> {
        if n >= 0 {
            Ok(Rat::reduced(
                self.num.pow(n as u32),
                self.den.pow(n as u32),
            ))
        } else {
            if self.num.is_zero() {
                return Err(NormalError::ZeroDenominator);
            }
            let m = (-n) as u32;
            Ok(Rat::reduced(self.den.pow(m), self.num.pow(m)))
        }
    }
}

/// Convert a tree to its rational normal form. Transcendental calls become
/// opaque atoms whose arguments are recursively normalized.
pub fn to_rat<K: Coeff, V: Symbol>(t: &Tree<K, V>) -> Result<Rat<K, V>, NormalError> {
    match t {
        Tree::Const(k) => Ok(Rat::from_poly(Poly::constant(k.clone()))),
        Tree::Var(v) => Ok(Rat::from_poly(Poly::atom(Atom::Var(*v)))),
        Tree::Add(a, b) => Ok(to_rat(a)?.add(&to_rat(b)?)),
        Tree::Sub(a, b) => Ok(to_rat(a)?.sub(&to_rat(b)?)),
        Tree::Mul(a, b) => Ok(to_rat(a)?.mul(&to_rat(b)?)),
        Tree::Div(a, b) => to_rat(a)?.div(&to_rat(b)?),
        Tree::Neg(a) => Ok(to_rat(a)?.neg()),
        Tree::Pow(a, n) => to_rat(a)?.pow(*n),
        Tree::Call(f, a) => {
            let arg = rat_to_tree(&to_rat(a)?);
            // Re-apply the constructor so constant folds (sin 0, sqrt of a
            // perfect square, ...) land in canonical form.
            match Tree::call(*f, arg) {
                Tree::Const(k) => Ok(Rat::from_poly(Poly::constant(k))),
                Tree::Call(f, arg) => Ok(Rat::from_poly(Poly::atom(Atom::Fun(f, *arg)))),
                other => to_rat(&other),
            }
        }
    }
}

/// Canonical tree of a normal form: descending term order, explicit ratio.
pub fn rat_to_tree<K: Coeff, V: Symbol>(r: &Rat<K, V>) -> Tree<K, V> {
    if r.den.is_one() {
        poly_to_tree(&r.num)
    } else {
        Tree::Div(
            Box::new(poly_to_tree(&r.num)),
            Box::new(poly_to_tree(&r.den)),
        )
    }
}

pub fn poly_to_tree<K: Coeff, V: Symbol>(p: &Poly<K, V>) -> Tree<K, V> {
    let mut acc: Option<Tree<K, V>> = None;
    for (m, k) in p.terms.iter().rev() {
        let negative = k.is_display_negative();
        let coeff = if negative { k.neg() } else { k.clone() };
        let term = term_tree(&coeff, m);
        acc = Some(match acc {
            None => {
                if !negative {
                    term
                } else if m.is_unit() {
                    // A lone constant keeps its sign in the node itself.
                    Tree::Const(k.clone())
                } else {
                    Tree::Neg(Box::new(term))
                }
            }
            Some(prev) => {
                if negative {
                    Tree::Sub(Box::new(prev), Box::new(term))
                } else {
                    Tree::Add(Box::new(prev), Box::new(term))
                }
            }
        });
    }
    acc.unwrap_or_else(|| Tree::int(0))
}

fn term_tree<K: Coeff, V: Symbol>(k: &K, m: &Mono<K, V>) -> Tree<K, V> {
    let mut factors: Vec<Tree<K, V>> = Vec::new();
    if m.is_unit() || *k != K::one() {
        factors.push(Tree::Const(k.clone()));
    }
    for (a, e) in &m.0 {
        let base = a.to_tree();
        factors.push(if *e == 1 {
            base
        } else {
            Tree::Pow(Box::new(base), *e as i32)
        });
    }
    let mut it = factors.into_iter();
    let first = it.next().expect("at least one factor");
    it.fold(first, |acc, f| Tree::Mul(Box::new(acc), Box::new(f)))
}
