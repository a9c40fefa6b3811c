//! Generic expression trees shared by the real and complex kernels.

use super::field::{Coeff, RenderClass};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Variable sets are small fixed enums; the kernel is generic over them.
pub trait Symbol: Copy + Clone + Ord + Eq + fmt::Debug + 'static {
    fn name(self) -> &'static str;
    fn all() -> &'static [Self];
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Arctan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "arctan" => Func::Arctan,
            _ => return None,
        })
    }

    pub fn apply_c64(self, z: Complex64) -> Complex64 {
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Exp => z.exp(),
            Func::Log => z.ln(),
            Func::Sqrt => z.sqrt(),
            Func::Arctan => z.atan(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Tree<K, V> {
    Const(K),
    Var(V),
    Add(Box<Tree<K, V>>, Box<Tree<K, V>>),
    Sub(Box<Tree<K, V>>, Box<Tree<K, V>>),
    Mul(Box<Tree<K, V>>, Box<Tree<K, V>>),
    Div(Box<Tree<K, V>>, Box<Tree<K, V>>),
    Neg(Box<Tree<K, V>>),
    Pow(Box<Tree<K, V>>, i32),
    Call(Func, Box<Tree<K, V>>),
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum EvalError {
    #[error("pole: division by a value of magnitude below 1e-14")]
    Pole,
    #[error("branch: argument lies exactly on a branch cut of {0}")]
    Branch(&'static str),
}

impl<K: Coeff, V: Symbol> Tree<K, V> {
    pub fn constant(k: K) -> Self {
        Tree::Const(k)
    }

    pub fn int(n: i64) -> Self {
        Tree::Const(K::from_i64(n))
    }

    pub fn var(v: V) -> Self {
        Tree::Var(v)
    }

    pub fn add(a: Self, b: Self) -> Self {
        if let (Tree::Const(x), Tree::Const(y)) = (&a, &b) {
            return Tree::Const(x.add(y));
        }
        Tree::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Self, b: Self) -> Self {
        if let (Tree::Const(x), Tree::Const(y)) = (&a, &b) {
            return Tree::Const(x.sub(y));
        }
        Tree::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Self, b: Self) -> Self {
        if let (Tree::Const(x), Tree::Const(y)) = (&a, &b) {
            return Tree::Const(x.mul(y));
        }
        Tree::Mul(Box::new(a), Box::new(b))
    }

    /// Division. The divisor must not be the literal zero constant; that is a
    /// construction-time contract (parsers and callers check before building).
    pub fn div(a: Self, b: Self) -> Self {
        if let Tree::Const(y) = &b {
            assert!(!y.is_zero(), "expression construction divides by the literal zero constant");
            if let Tree::Const(x) = &a {
                return Tree::Const(x.mul(&y.inv().expect("nonzero")));
            }
        }
        Tree::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Self) -> Self {
        if let Tree::Const(x) = &a {
            return Tree::Const(x.neg());
        }
        Tree::Neg(Box::new(a))
    }

    pub fn pow(a: Self, n: i32) -> Self {
        if let Tree::Const(x) = &a {
            if n >= 0 {
                let mut acc = K::one();
                for _ in 0..n {
                    acc = acc.mul(x);
                }
                return Tree::Const(acc);
            } else if let Some(inv) = x.inv() {
                let mut acc = K::one();
                for _ in 0..(-n) {
                    acc = acc.mul(&inv);
                }
                return Tree::Const(acc);
            }
        }
        Tree::Pow(Box::new(a), n)
    }

    pub fn call(f: Func, a: Self) -> Self {
        if let Tree::Const(x) = &a {
            // Fold only the exact cases; everything else stays symbolic.
            if x.is_zero() {
                match f {
                    Func::Sin | Func::Arctan | Func::Sqrt => return Tree::int(0),
                    Func::Cos => return Tree::int(1),
                    Func::Exp => return Tree::int(1),
                    Func::Log => {}
                }
            }
            if *x == K::one() && f == Func::Log {
                return Tree::int(0);
            }
            if f == Func::Sqrt {
                if let Some(r) = x.exact_sqrt() {
                    return Tree::Const(r);
                }
            }
        }
        Tree::Call(f, Box::new(a))
    }

    pub fn is_const_zero(&self) -> bool {
        matches!(self, Tree::Const(k) if k.is_zero())
    }

    /// Structural partial derivative treating the variables as independent symbols.
    pub fn diff(&self, v: V) -> Self {
        match self {
            Tree::Const(_) => Tree::int(0),
            Tree::Var(w) => {
                if *w == v {
                    Tree::int(1)
                } else {
                    Tree::int(0)
                }
            }
            Tree::Add(a, b) => Tree::add(a.diff(v), b.diff(v)),
            Tree::Sub(a, b) => Tree::sub(a.diff(v), b.diff(v)),
            Tree::Mul(a, b) => Tree::add(
                Tree::mul(a.diff(v), (**b).clone()),
                Tree::mul((**a).clone(), b.diff(v)),
            ),
            Tree::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = Tree::sub(
                    Tree::mul(a.diff(v), (**b).clone()),
                    Tree::mul((**a).clone(), b.diff(v)),
                );
                Tree::div(num, Tree::pow((**b).clone(), 2))
            }
            Tree::Neg(a) => Tree::neg(a.diff(v)),
            Tree::Pow(a, n) => {
                if *n == 0 {
                    return Tree::int(0);
                }
                let d = a.diff(v);
                if d.is_const_zero() {
                    return Tree::int(0);
                }
                Tree::mul(
                    Tree::mul(Tree::int(*n as i64), Tree::pow((**a).clone(), n - 1)),
                    d,
                )
            }
            Tree::Call(f, a) => {
                let d = a.diff(v);
                if d.is_const_zero() {
                    return Tree::int(0);
                }
                let arg = (**a).clone();
                let outer = match f {
                    Func::Sin => Tree::call(Func::Cos, arg),
                    Func::Cos => Tree::neg(Tree::call(Func::Sin, arg)),
                    Func::Exp => Tree::call(Func::Exp, arg),
                    Func::Log => Tree::div(Tree::int(1), arg),
                    Func::Sqrt => Tree::div(
                        Tree::int(1),
                        Tree::mul(Tree::int(2), Tree::call(Func::Sqrt, arg)),
                    ),
                    Func::Arctan => Tree::div(
                        Tree::int(1),
                        Tree::add(Tree::int(1), Tree::pow(arg, 2)),
                    ),
                };
                Tree::mul(outer, d)
            }
        }
    }

    /// Simultaneous substitution of variables by subtrees.
    pub fn subst_map(&self, bindings: &BTreeMap<V, Tree<K, V>>) -> Self {
        match self {
            Tree::Const(_) => self.clone(),
            Tree::Var(w) => bindings.get(w).cloned().unwrap_or_else(|| self.clone()),
            Tree::Add(a, b) => Tree::add(a.subst_map(bindings), b.subst_map(bindings)),
            Tree::Sub(a, b) => Tree::sub(a.subst_map(bindings), b.subst_map(bindings)),
            Tree::Mul(a, b) => Tree::mul(a.subst_map(bindings), b.subst_map(bindings)),
            Tree::Div(a, b) => {
                Tree::Div(Box::new(a.subst_map(bindings)), Box::new(b.subst_map(bindings)))
            }
            Tree::Neg(a) => Tree::neg(a.subst_map(bindings)),
            Tree::Pow(a, n) => Tree::pow(a.subst_map(bindings), *n),
            Tree::Call(f, a) => Tree::call(*f, a.subst_map(bindings)),
        }
    }

    /// Map leaves into a tree over a different coefficient/variable pair.
    pub fn map_leaves<K2, V2>(
        &self,
        conv_const: &impl Fn(&K) -> Tree<K2, V2>,
        conv_var: &impl Fn(V) -> Tree<K2, V2>,
    ) -> Tree<K2, V2>
    where
        K2: Coeff,
        V2: Symbol,
    {
        match self {
            Tree::Const(k) => conv_const(k),
            Tree::Var(v) => conv_var(*v),
            Tree::Add(a, b) => Tree::add(
                a.map_leaves(conv_const, conv_var),
                b.map_leaves(conv_const, conv_var),
            ),
            Tree::Sub(a, b) => Tree::sub(
                a.map_leaves(conv_const, conv_var),
                b.map_leaves(conv_const, conv_var),
            ),
            Tree::Mul(a, b) => Tree::mul(
                a.map_leaves(conv_const, conv_var),
                b.map_leaves(conv_const, conv_var),
            ),
            Tree::Div(a, b) => Tree::Div(
                Box::new(a.map_leaves(conv_const, conv_var)),
                Box::new(b.map_leaves(conv_const, conv_var)),
            ),
            Tree::Neg(a) => Tree::neg(a.map_leaves(conv_const, conv_var)),
            Tree::Pow(a, n) => Tree::pow(a.map_leaves(conv_const, conv_var), *n),
            Tree::Call(f, a) => Tree::call(*f, a.map_leaves(conv_const, conv_var)),
        }
    }

    pub fn vars_used(&self) -> Vec<V> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<V>) {
        match self {
            Tree::Const(_) => {}
            Tree::Var(v) => out.push(*v),
            Tree::Add(a, b) | Tree::Sub(a, b) | Tree::Mul(a, b) | Tree::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Tree::Neg(a) | Tree::Pow(a, _) | Tree::Call(_, a) => a.collect_vars(out),
        }
    }

    /// Complex evaluation with principal branches.
    pub fn eval_c64(&self, point: &impl Fn(V) -> Complex64) -> Result<Complex64, EvalError> {
        match self {
            Tree::Const(k) => Ok(k.to_c64()),
            Tree::Var(v) => Ok(point(*v)),
            Tree::Add(a, b) => Ok(a.eval_c64(point)? + b.eval_c64(point)?),
            Tree::Sub(a, b) => Ok(a.eval_c64(point)? - b.eval_c64(point)?),
            Tree::Mul(a, b) => Ok(a.eval_c64(point)? * b.eval_c64(point)?),
            Tree::Div(a, b) => {
                let den = b.eval_c64(point)?;
                if den.norm() < 1e-14 {
                    return Err(EvalError::Pole);
                }
                Ok(a.eval_c64(point)? / den)
            }
            Tree::Neg(a) => Ok(-a.eval_c64(point)?),
            Tree::Pow(a, n) => {
                let base = a.eval_c64(point)?;
                if *n < 0 && base.norm() < 1e-14 {
                    return Err(EvalError::Pole);
                }
                Ok(base.powi(*n))
            }
            Tree::Call(f, a) => {
                let z = a.eval_c64(point)?;
                match f {
                    Func::Log => {
                        if z.norm() < 1e-14 {
                            return Err(EvalError::Pole);
                        }
                        if z.im == 0.0 && z.re < 0.0 {
                            return Err(EvalError::Branch("log"));
                        }
                    }
                    Func::Sqrt => {
                        if z.im == 0.0 && z.re < 0.0 {
                            return Err(EvalError::Branch("sqrt"));
                        }
                    }
                    Func::Arctan => {
                        if z.re == 0.0 && z.im.abs() >= 1.0 {
                            return Err(EvalError::Branch("arctan"));
                        }
                    }
                    _ => {}
                }
                Ok(f.apply_c64(z))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing. Precedence per the problem-file grammar: ^ binds tightest, then
// unary minus, then * /, then + -.
// ---------------------------------------------------------------------------

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

pub fn print_tree<K: Coeff, V: Symbol>(t: &Tree<K, V>) -> String {
    let mut s = String::new();
    write_prec(t, 0, &mut s);
    s
}

fn node_prec<K: Coeff, V: Symbol>(t: &Tree<K, V>) -> u8 {
    match t {
        Tree::Const(k) => match k.render_class() {
            RenderClass::Atom => PREC_ATOM,
            RenderClass::NegAtom => PREC_NEG,
            RenderClass::Product => PREC_MUL,
            RenderClass::Sum => PREC_ADD,
        },
        Tree::Var(_) | Tree::Call(..) => PREC_ATOM,
        Tree::Add(..) | Tree::Sub(..) => PREC_ADD,
        Tree::Mul(..) | Tree::Div(..) => PREC_MUL,
        // "-a*b" renders as a product, so the node reassociates like one.
        Tree::Neg(a) => match **a {
            Tree::Mul(..) | Tree::Div(..) => PREC_MUL,
            _ => PREC_NEG,
        },
        Tree::Pow(..) => PREC_POW,
    }
}

fn write_prec<K: Coeff, V: Symbol>(t: &Tree<K, V>, min: u8, out: &mut String) {
    let prec = node_prec(t);
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    match t {
        Tree::Const(k) => out.push_str(&k.render()),
        Tree::Var(v) => out.push_str(v.name()),
        Tree::Add(a, b) => {
            write_prec(a, PREC_ADD, out);
            // Fold "+ (-term)" into "- term" for readability.
            if leading_minus(b) {
                out.push_str(" - ");
                write_stripped(b, out);
            } else {
                out.push_str(" + ");
                write_prec(b, PREC_ADD + 1, out);
            }
        }
        Tree::Sub(a, b) => {
            write_prec(a, PREC_ADD, out);
            out.push_str(" - ");
            write_prec(b, PREC_ADD + 1, out);
        }
        Tree::Mul(a, b) => {
            write_prec(a, PREC_MUL, out);
            out.push('*');
            write_prec(b, PREC_MUL + 1, out);
        }
        Tree::Div(a, b) => {
            write_prec(a, PREC_MUL, out);
            out.push('/');
            write_prec(b, PREC_MUL + 1, out);
        }
        Tree::Neg(a) => {
            // -(a*b) and (-a)*b are the same value, so products may follow
            // the sign without parentheses.
            out.push('-');
            write_prec(a, PREC_MUL, out);
        }
        Tree::Pow(a, n) => {
            write_prec(a, PREC_ATOM, out);
            out.push('^');
            if *n < 0 {
                out.push_str(&format!("({})", n));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Tree::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_prec(a, 0, out);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

fn leading_minus<K: Coeff, V: Symbol>(t: &Tree<K, V>) -> bool {
    match t {
        Tree::Neg(_) => true,
        Tree::Const(k) => {
            k.is_display_negative() && k.render_class() != RenderClass::Sum
        }
        Tree::Mul(a, _) | Tree::Div(a, _) => leading_minus(a),
        _ => false,
    }
}

fn write_stripped<K: Coeff, V: Symbol>(t: &Tree<K, V>, out: &mut String) {
    // Print `t` with its leading minus removed; only called when leading_minus(t).
    match t {
        Tree::Neg(a) => write_prec(a, PREC_NEG, out),
        Tree::Const(k) => {
            let s = k.render();
            out.push_str(s.strip_prefix('-').unwrap_or(&s));
        }
        Tree::Mul(a, b) => {
            write_stripped(a, out);
            out.push('*');
            write_prec(b, PREC_MUL + 1, out);
        }
        Tree::Div(a, b) => {
            write_stripped(a, out);
            out.push('/');
            write_prec(b, PREC_MUL + 1, out);
        }
        _ => write_prec(t, PREC_ADD + 1, out),
    }
}
