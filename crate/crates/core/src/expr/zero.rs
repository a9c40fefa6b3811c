//! Zero testing: symbolic first, randomized-numeric fallback.
//!
//! A rational normal form is identically zero iff its numerator polynomial
//! is. Without transcendental atoms that is decided exactly. With them, the
//! numerator is sampled at seeded random points; "undecided" is a first-class
//! outcome rather than a guess.

use super::field::Coeff;
use super::poly::{Atom, Poly};
use super::rat::Rat;
use super::tree::Symbol;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ZeroVerdict {
    /// Identically zero, decided symbolically.
    Zero,
    /// Zero at every sampled point; transcendental atoms forced the numeric path.
    ZeroNumeric,
    NonZero,
    /// Sampling was inconclusive (too few valid points, or magnitudes in the
    /// ambiguous band between `tol` and `strong`).
    Undecided,
}

impl ZeroVerdict {
    pub fn is_zero(self) -> bool {
        matches!(self, ZeroVerdict::Zero | ZeroVerdict::ZeroNumeric)
    }

    pub fn is_decided(self) -> bool {
        !matches!(self, ZeroVerdict::Undecided)
    }
}

#[derive(Clone, Debug)]
pub struct ZeroTest {
    pub seed: u64,
    pub samples: usize,
    /// Relative magnitude below which a sample counts as vanishing.
    pub tol: f64,
    /// Relative magnitude above which a single sample certifies nonzero.
    pub strong: f64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            seed: 0,
            samples: 8,
            tol: 1e-10,
            strong: 1e-6,
        }
    }
}

impl ZeroTest {
    pub fn with_seed(seed: u64) -> Self {
        ZeroTest {
            seed,
            ..Default::default()
        }
    }

    pub fn rat_is_zero<K: Coeff, V: Symbol>(&self, r: &Rat<K, V>) -> ZeroVerdict {
        self.poly_is_zero(&r.num)
    }

    pub fn poly_is_zero<K: Coeff, V: Symbol>(&self, p: &Poly<K, V>) -> ZeroVerdict {
        if p.is_zero() {
            return ZeroVerdict::Zero;
        }
        if !p.has_transcendental() {
            return ZeroVerdict::NonZero;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut valid = 0usize;
        let mut worst: f64 = 0.0;
        let mut attempts = 0usize;
        let max_attempts = self.samples * 16;
        while valid < self.samples && attempts < max_attempts {
            attempts += 1;
            let point = random_point::<V>(&mut rng);
            let Some(ratio) = sample_poly(p, &point) else {
                continue;
            };
            valid += 1;
            if ratio > self.strong {
                return ZeroVerdict::NonZero;
            }
            worst = worst.max(ratio);
        }
        if valid < self.samples {
            return ZeroVerdict::Undecided;
        }
        if worst <= self.tol {
            ZeroVerdict::ZeroNumeric
        } else {
            ZeroVerdict::Undecided
        }
    }
}

fn random_point<V: Symbol>(rng: &mut ChaCha8Rng) -> BTreeMap<V, Complex64> {
    // Real parts kept positive and O(1), imaginary parts small: stays clear of
    // the principal branch cuts for typical arguments while still probing the
    // complex direction.
    V::all()
        .iter()
        .map(|v| {
            let re = rng.gen_range(0.35..2.35);
            let im = rng.gen_range(-0.4..0.4);
            (*v, Complex64::new(re, im))
        })
        .collect()
}

/// Evaluate the polynomial termwise; returns |sum| / (1 + sum of |terms|),
/// or `None` when an atom cannot be evaluated at the point.
fn sample_poly<K: Coeff, V: Symbol>(
    p: &Poly<K, V>,
    point: &BTreeMap<V, Complex64>,
) -> Option<f64> {
    let mut atom_vals: BTreeMap<&Atom<K, V>, Complex64> = BTreeMap::new();
    let lookup = |v: V| point[&v];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for (mono, coeff) in &p.terms {
        let mut term = coeff.to_c64();
        for (atom, exp) in &mono.0 {
            let val = match atom_vals.get(atom) {
                Some(v) => *v,
                None => {
                    let v = match atom {
                        Atom::Var(v) => lookup(*v),
                        Atom::Fun(..) => atom.to_tree().eval_c64(&lookup).ok()?,
                    };
                    atom_vals.insert(atom, v);
                    v
                }
            };
            term *= val.powi(*exp as i32);
        }
        if !term.re.is_finite() || !term.im.is_finite() {
            return None;
        }
        sum += term;
        scale += term.norm();
    }
    Some(sum.norm() / (1.0 + scale))
}
