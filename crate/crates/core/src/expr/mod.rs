//! Immutable symbolic expression trees with exact rational constants.
//!
//! `Expr` is the real workhorse over the five system variables
//! (x, f1, f2, f1', f2'); `CScalar` is its complex sibling over (x, u, u').
//! Normal forms are reduced polynomial ratios with a deterministic term
//! order; zero testing is symbolic with a seeded numeric fallback.

mod cscalar;
mod field;
mod poly;
mod rat;
mod tree;
mod zero;

pub use cscalar::{CScalar, CVar};
pub use field::{q_int, q_ratio, Coeff, CQ, Q};
pub use rat::NormalError;
pub use tree::{EvalError, Func};
pub use zero::{ZeroTest, ZeroVerdict};

pub(crate) use poly::{poly_lcm, Atom, Mono, Poly};
pub(crate) use rat::{poly_to_tree, rat_to_tree, to_rat, Rat};
pub(crate) use tree::{print_tree, Symbol, Tree};

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// The five variables of a two-equation second-order system.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Var {
    X,
    F1,
    F2,
    F1p,
    F2p,
}

impl Symbol for Var {
    fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::F1 => "f1",
            Var::F2 => "f2",
            Var::F1p => "f1'",
            Var::F2p => "f2'",
        }
    }

    fn all() -> &'static [Self] {
        &[Var::X, Var::F1, Var::F2, Var::F1p, Var::F2p]
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum SubstError {
    #[error("slice-singular: substitution makes a denominator identically zero")]
    SliceSingular,
}

/// Real symbolic expression over (x, f1, f2, f1', f2').
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Expr(pub(crate) Tree<Q, Var>);

impl Expr {
    pub fn var(v: Var) -> Expr {
        Expr(Tree::var(v))
    }
    pub fn x() -> Expr {
        Expr::var(Var::X)
    }
    pub fn f1() -> Expr {
        Expr::var(Var::F1)
    }
    pub fn f2() -> Expr {
        Expr::var(Var::F2)
    }
    pub fn f1p() -> Expr {
        Expr::var(Var::F1p)
    }
    pub fn f2p() -> Expr {
        Expr::var(Var::F2p)
    }
    pub fn int(n: i64) -> Expr {
        Expr(Tree::int(n))
    }
    pub fn rational(q: Q) -> Expr {
        Expr(Tree::constant(q))
    }
    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr(Tree::constant(q_ratio(num, den)))
    }

    pub fn pow(&self, n: i32) -> Expr {
        Expr(Tree::pow(self.0.clone(), n))
    }
    pub fn func(f: Func, arg: &Expr) -> Expr {
        Expr(Tree::call(f, arg.0.clone()))
    }
    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self)
    }
    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self)
    }
    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self)
    }
    pub fn log(&self) -> Expr {
        Expr::func(Func::Log, self)
    }
    pub fn sqrt(&self) -> Expr {
        Expr::func(Func::Sqrt, self)
    }
    pub fn arctan(&self) -> Expr {
        Expr::func(Func::Arctan, self)
    }

    pub fn is_const_zero(&self) -> bool {
        self.0.is_const_zero()
    }

    pub fn vars_used(&self) -> Vec<Var> {
        self.0.vars_used()
    }

    /// Partial derivative treating the five variables as independent symbols.
    pub fn diff(&self, v: Var) -> Expr {
        let raw = self.0.diff(v);
        match to_rat(&raw) {
            Ok(r) => Expr(rat_to_tree(&r)),
            Err(_) => Expr(raw),
        }
    }

    pub fn substitute(&self, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, SubstError> {
        let map: BTreeMap<Var, Tree<Q, Var>> =
            bindings.iter().map(|(v, e)| (*v, e.0.clone())).collect();
        let raw = self.0.subst_map(&map);
        match to_rat(&raw) {
            Ok(r) => Ok(Expr(rat_to_tree(&r))),
            Err(NormalError::ZeroDenominator) => Err(SubstError::SliceSingular),
        }
    }

    pub fn normal_form(&self) -> Result<Expr, NormalError> {
        Ok(Expr(rat_to_tree(&to_rat(&self.0)?)))
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> ZeroVerdict {
        match to_rat(&self.0) {
            Ok(r) => zt.rat_is_zero(&r),
            Err(_) => ZeroVerdict::Undecided,
        }
    }

    /// Semantic equality: `self - other` is (numerically confirmed) zero.
    pub fn normal_eq(&self, other: &Expr, zt: &ZeroTest) -> bool {
        (self.clone() - other.clone()).is_zero(zt).is_zero()
    }

    pub fn eval(&self, point: &Point) -> Result<Complex64, EvalError> {
        self.0.eval_c64(&|v| point.get(v))
    }

    /// Evaluate with real samples packed into the point's real parts.
    pub fn eval_real(&self, point: &RealPoint) -> Result<f64, EvalError> {
        let p = Point {
            x: Complex64::new(point.x, 0.0),
            f1: Complex64::new(point.f1, 0.0),
            f2: Complex64::new(point.f2, 0.0),
            f1p: Complex64::new(point.f1p, 0.0),
            f2p: Complex64::new(point.f2p, 0.0),
        };
        Ok(self.eval(&p)?.re)
    }

    pub(crate) fn tree(&self) -> &Tree<Q, Var> {
        &self.0
    }

    pub(crate) fn rat(&self) -> Result<Rat<Q, Var>, NormalError> {
        to_rat(&self.0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_tree(&self.0))
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr(Tree::add(self.0, rhs.0))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr(Tree::sub(self.0, rhs.0))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr(Tree::mul(self.0, rhs.0))
    }
}

/// Division panics when the divisor is the literal zero constant; building
/// such a tree is a programming error, not a data error.
impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr(Tree::div(self.0, rhs.0))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(Tree::neg(self.0))
    }
}

/// Complex evaluation point for the five system variables.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub x: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub f1p: Complex64,
    pub f2p: Complex64,
}

impl Point {
    pub fn get(&self, v: Var) -> Complex64 {
        match v {
            Var::X => self.x,
            Var::F1 => self.f1,
            Var::F2 => self.f2,
            Var::F1p => self.f1p,
            Var::F2p => self.f2p,
        }
    }

    pub fn real(x: f64, f1: f64, f2: f64, f1p: f64, f2p: f64) -> Point {
        Point {
            x: Complex64::new(x, 0.0),
            f1: Complex64::new(f1, 0.0),
            f2: Complex64::new(f2, 0.0),
            f1p: Complex64::new(f1p, 0.0),
            f2p: Complex64::new(f2p, 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RealPoint {
    pub x: f64,
    pub f1: f64,
    pub f2: f64,
    pub f1p: f64,
    pub f2p: f64,
}

#[cfg(test)]
mod tests;
