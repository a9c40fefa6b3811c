//! Complex symbolic scalars over (x, u, u') with Gaussian-rational constants.

use super::field::{q_ratio, CQ, Q};
use super::rat::{rat_to_tree, to_rat, NormalError, Rat};
use super::tree::{print_tree, EvalError, Func, Symbol, Tree};
use super::zero::{ZeroTest, ZeroVerdict};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CVar {
    X,
    U,
    Up,
}

impl Symbol for CVar {
    fn name(self) -> &'static str {
        match self {
            CVar::X => "x",
            CVar::U => "u",
            CVar::Up => "u'",
        }
    }

    fn all() -> &'static [Self] {
        &[CVar::X, CVar::U, CVar::Up]
    }
}

/// Complex-valued expression in (x, u, u'), analytic by construction: the
/// grammar has no conjugation, so u enters only holomorphically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CScalar(pub(crate) Tree<CQ, CVar>);

impl CScalar {
    pub fn var(v: CVar) -> CScalar {
        CScalar(Tree::var(v))
    }
    pub fn x() -> CScalar {
        CScalar::var(CVar::X)
    }
    pub fn u() -> CScalar {
        CScalar::var(CVar::U)
    }
    pub fn up() -> CScalar {
        CScalar::var(CVar::Up)
    }
    pub fn int(n: i64) -> CScalar {
        CScalar(Tree::int(n))
    }
    pub fn i() -> CScalar {
        CScalar(Tree::constant(CQ::i()))
    }
    pub fn constant(c: CQ) -> CScalar {
        CScalar(Tree::constant(c))
    }
    pub fn from_q(re: Q) -> CScalar {
        CScalar(Tree::constant(CQ::from_re(re)))
    }
    pub fn ratio(num: i64, den: i64) -> CScalar {
        CScalar::from_q(q_ratio(num, den))
    }

    pub fn pow(&self, n: i32) -> CScalar {
        CScalar(Tree::pow(self.0.clone(), n))
    }
    pub fn func(f: Func, arg: &CScalar) -> CScalar {
        CScalar(Tree::call(f, arg.0.clone()))
    }
    pub fn sin(&self) -> CScalar {
        CScalar::func(Func::Sin, self)
    }
    pub fn cos(&self) -> CScalar {
        CScalar::func(Func::Cos, self)
    }
    pub fn exp(&self) -> CScalar {
        CScalar::func(Func::Exp, self)
    }
    pub fn log(&self) -> CScalar {
        CScalar::func(Func::Log, self)
    }
    pub fn sqrt(&self) -> CScalar {
        CScalar::func(Func::Sqrt, self)
    }
    pub fn arctan(&self) -> CScalar {
        CScalar::func(Func::Arctan, self)
    }

    pub fn is_const_zero(&self) -> bool {
        self.0.is_const_zero()
    }

    pub fn vars_used(&self) -> Vec<CVar> {
        self.0.vars_used()
    }

    pub fn diff(&self, v: CVar) -> CScalar {
        let raw = self.0.diff(v);
        match to_rat(&raw) {
            Ok(r) => CScalar(rat_to_tree(&r)),
            Err(_) => CScalar(raw),
        }
    }

    pub fn substitute(
        &self,
        bindings: &BTreeMap<CVar, CScalar>,
    ) -> Result<CScalar, NormalError> {
        let map: BTreeMap<CVar, Tree<CQ, CVar>> =
            bindings.iter().map(|(v, e)| (*v, e.0.clone())).collect();
        let raw = self.0.subst_map(&map);
        Ok(CScalar(rat_to_tree(&to_rat(&raw)?)))
    }

    pub fn normal_form(&self) -> Result<CScalar, NormalError> {
        Ok(CScalar(rat_to_tree(&to_rat(&self.0)?)))
    }

    pub fn is_zero(&self, zt: &ZeroTest) -> ZeroVerdict {
        match to_rat(&self.0) {
            Ok(r) => zt.rat_is_zero(&r),
            Err(_) => ZeroVerdict::Undecided,
        }
    }

    pub fn normal_eq(&self, other: &CScalar, zt: &ZeroTest) -> bool {
        (self.clone() - other.clone()).is_zero(zt).is_zero()
    }

    pub fn eval(&self, x: Complex64, u: Complex64, up: Complex64) -> Result<Complex64, EvalError> {
        self.0.eval_c64(&|v| match v {
            CVar::X => x,
            CVar::U => u,
            CVar::Up => up,
        })
    }

    /// Constant value if the scalar is a literal constant.
    pub fn as_const(&self) -> Option<&CQ> {
        match &self.0 {
            Tree::Const(c) => Some(c),
            _ => None,
        }
    }

    pub(crate) fn tree(&self) -> &Tree<CQ, CVar> {
        &self.0
    }

    pub(crate) fn from_tree(t: Tree<CQ, CVar>) -> CScalar {
        CScalar(t)
    }

    pub(crate) fn rat(&self) -> Result<Rat<CQ, CVar>, NormalError> {
        to_rat(&self.0)
    }
}

impl fmt::Display for CScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_tree(&self.0))
    }
}

impl std::ops::Add for CScalar {
    type Output = CScalar;
    fn add(self, rhs: CScalar) -> CScalar {
        CScalar(Tree::add(self.0, rhs.0))
    }
}

impl std::ops::Sub for CScalar {
    type Output = CScalar;
    fn sub(self, rhs: CScalar) -> CScalar {
        CScalar(Tree::sub(self.0, rhs.0))
    }
}

impl std::ops::Mul for CScalar {
    type Output = CScalar;
    fn mul(self, rhs: CScalar) -> CScalar {
        CScalar(Tree::mul(self.0, rhs.0))
    }
}

impl std::ops::Div for CScalar {
    type Output = CScalar;
    fn div(self, rhs: CScalar) -> CScalar {
        CScalar(Tree::div(self.0, rhs.0))
    }
}

impl std::ops::Neg for CScalar {
    type Output = CScalar;
    fn neg(self) -> CScalar {
        CScalar(Tree::neg(self.0))
    }
}
