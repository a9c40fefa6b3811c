//! Exact coefficient arithmetic: rationals and Gaussian rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Q = BigRational;

/// Coefficient field used by the expression kernel. Implemented by exact
/// rationals (real expressions) and Gaussian rationals (complex scalars).
pub trait Coeff: Clone + Ord + Eq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    /// Numeric image used by evaluation and sampling.
    fn to_c64(&self) -> num_complex::Complex64;
    /// True when the canonical printer should fold the sign out ("-c" with c positive).
    fn is_display_negative(&self) -> bool;
    /// Exact square root if one exists in the field (used to fold sqrt of constants).
    fn exact_sqrt(&self) -> Option<Self>;
    /// Positive gcd-like magnitude of two coefficients, used to keep
    /// pseudo-remainder sequences primitive. Any common factor works; it only
    /// controls growth, the final result is normalized monic anyway.
    fn content_gcd(&self, o: &Self) -> Self;
    fn render(&self) -> String;
    /// How the rendered constant re-parses, which decides parenthesization.
    fn render_class(&self) -> RenderClass;
}

/// Effective precedence of a rendered constant: "2" is atomic, "-2" unary,
/// "3/4" or "2*i" a product, "1 + 2*i" a sum.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderClass {
    Atom,
    NegAtom,
    Product,
    Sum,
}

fn q_to_f64(q: &Q) -> f64 {
    // Ratio::to_f64 via num-traits would truncate huge ints badly; do it in two parts.
    let n = q.numer();
    let d = q.denom();
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    nf / df
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    // f64 conversion with graceful overflow to ±inf.
    let s = n.to_string();
    s.parse::<f64>().unwrap_or(if n.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// gcd of two rationals: gcd of numerators over lcm of denominators,
/// always non-negative.
pub fn q_content_gcd(a: &Q, b: &Q) -> Q {
    use num_integer::Integer;
    if Zero::is_zero(a) {
        return b.abs();
    }
    if Zero::is_zero(b) {
        return a.abs();
    }
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Q::new(n, d).abs()
}

/// Exact sqrt of a non-negative rational, if the numerator and denominator
/// are both perfect squares.
pub fn q_exact_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let ns = q.numer().sqrt();
    let ds = q.denom().sqrt();
    if &ns.clone() * &ns == *q.numer() && &ds.clone() * &ds == *q.denom() {
        Some(Q::new(ns, ds))
    } else {
        None
    }
}

impl Coeff for Q {
    fn zero() -> Self {
        <Q as Zero>::zero()
    }
    fn one() -> Self {
        <Q as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(q_to_f64(self), 0.0)
    }
    fn is_display_negative(&self) -> bool {
        self.is_negative()
    }
    fn exact_sqrt(&self) -> Option<Self> {
        q_exact_sqrt(self)
    }
    fn content_gcd(&self, o: &Self) -> Self {
        q_content_gcd(self, o)
    }
    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn render_class(&self) -> RenderClass {
        if self.is_integer() {
            if self.is_negative() {
                RenderClass::NegAtom
            } else {
                RenderClass::Atom
            }
        } else {
            RenderClass::Product
        }
    }
}

/// Gaussian rational: a + b*i with exact rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CQ {
    pub re: Q,
    pub im: Q,
}

impl CQ {
    pub fn new(re: Q, im: Q) -> Self {
        CQ { re, im }
    }
    pub fn from_re(re: Q) -> Self {
        CQ {
            re,
            im: <Q as Zero>::zero(),
        }
    }
    pub fn i() -> Self {
        CQ {
            re: <Q as Zero>::zero(),
            im: <Q as One>::one(),
        }
    }
    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }
}

impl PartialOrd for CQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CQ {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Coeff for CQ {
    fn zero() -> Self {
        CQ::new(<Q as Zero>::zero(), <Q as Zero>::zero())
    }
    fn one() -> Self {
        CQ::new(<Q as One>::one(), <Q as Zero>::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, o: &Self) -> Self {
        CQ::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        CQ::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn neg(&self) -> Self {
        CQ::new(-self.re.clone(), -self.im.clone())
    }
    fn mul(&self, o: &Self) -> Self {
        CQ::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(CQ::new(&self.re / &n, -(&self.im / &n)))
    }
    fn from_i64(n: i64) -> Self {
        CQ::from_re(Q::from_integer(BigInt::from(n)))
    }
    fn from_q(q: &Q) -> Self {
        CQ::from_re(q.clone())
    }
    fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
    fn is_display_negative(&self) -> bool {
        self.re.is_negative() || (Zero::is_zero(&self.re) && self.im.is_negative())
    }
    fn exact_sqrt(&self) -> Option<Self> {
        if self.is_real() {
            q_exact_sqrt(&self.re).map(CQ::from_re)
        } else {
            None
        }
    }
    fn content_gcd(&self, o: &Self) -> Self {
        let g = q_content_gcd(&q_content_gcd(&self.re, &self.im), &q_content_gcd(&o.re, &o.im));
        CQ::from_re(g)
    }
    fn render(&self) -> String {
        let re = Coeff::render(&self.re);
        if Zero::is_zero(&self.im) {
            return re;
        }
        let one: Q = <Q as One>::one();
        let im_part = if self.im == one {
            "i".to_string()
        } else if self.im == -one.clone() {
            "-i".to_string()
        } else {
            format!("{}*i", Coeff::render(&self.im))
        };
        if Zero::is_zero(&self.re) {
            im_part
        } else if self.im.is_negative() {
            format!("{} - {}", re, im_part.trim_start_matches('-'))
        } else {
            format!("{} + {}", re, im_part)
        }
    }
    fn render_class(&self) -> RenderClass {
        if Zero::is_zero(&self.im) {
            return Coeff::render_class(&self.re);
        }
        if Zero::is_zero(&self.re) {
            let one: Q = <Q as One>::one();
            if self.im == one {
                return RenderClass::Atom; // "i"
            }
            if self.im == -one {
                return RenderClass::NegAtom; // "-i"
            }
            return RenderClass::Product; // "c*i"
        }
        RenderClass::Sum
    }
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_inverse() {
        let z = CQ::new(q_int(3), q_int(4));
        let w = z.inv().unwrap();
        let p = z.mul(&w);
        assert_eq!(p, CQ::one());
    }

    #[test]
    fn exact_sqrt_rationals() {
        assert_eq!(q_exact_sqrt(&q_ratio(9, 4)), Some(q_ratio(3, 2)));
        assert_eq!(q_exact_sqrt(&q_int(2)), None);
        assert_eq!(q_exact_sqrt(&q_int(-4)), None);
    }
}
