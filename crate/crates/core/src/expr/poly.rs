//! Sparse multivariate polynomials over an exact coefficient field.
//!
//! Atoms are either kernel variables or whole transcendental subtrees
//! (`sin(...)`, `sqrt(...)`, ...) treated as opaque independent symbols. The
//! rational normal form is built on this layer; transcendental identities are
//! deliberately left to the randomized-numeric zero test.

use super::field::Coeff;
use super::tree::{Func, Symbol, Tree};
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Atom<K, V> {
    Var(V),
    Fun(Func, Tree<K, V>),
}

impl<K: Coeff, V: Symbol> Atom<K, V> {
    pub fn depends_on(&self, v: V) -> bool {
        match self {
            Atom::Var(w) => *w == v,
            Atom::Fun(_, arg) => arg.vars_used().contains(&v),
        }
    }

    pub fn to_tree(&self) -> Tree<K, V> {
        match self {
            Atom::Var(v) => Tree::var(*v),
            Atom::Fun(f, arg) => Tree::Call(*f, Box::new(arg.clone())),
        }
    }

    pub fn is_transcendental(&self) -> bool {
        matches!(self, Atom::Fun(..))
    }
}

/// Monomial: strictly ascending atoms with positive exponents.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mono<K, V>(pub Vec<(Atom<K, V>, u32)>);

impl<K: Coeff, V: Symbol> Mono<K, V> {
    pub fn unit() -> Self {
        Mono(Vec::new())
    }

    pub fn atom(a: Atom<K, V>) -> Self {
        Mono(vec![(a, 1)])
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exp_of(&self, a: &Atom<K, V>) -> u32 {
        self.0
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            if j >= o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0) {
                out.push(self.0[i].clone());
                i += 1;
            } else if i >= self.0.len() || o.0[j].0 < self.0[i].0 {
                out.push(o.0[j].clone());
                j += 1;
            } else {
                out.push((self.0[i].0.clone(), self.0[i].1 + o.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Mono(out)
    }

    /// Divide by `o`; `None` when any exponent would go negative.
    pub fn try_div(&self, o: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            let mut e = *e;
            while j < o.0.len() && o.0[j].0 < *a {
                return None; // divisor has an atom we lack
            }
            if j < o.0.len() && o.0[j].0 == *a {
                if o.0[j].1 > e {
                    return None;
                }
                e -= o.0[j].1;
                j += 1;
            }
            if e > 0 {
                out.push((a.clone(), e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut out = Vec::new();
        let mut j = 0;
        for (a, e) in &self.0 {
            while j < o.0.len() && o.0[j].0 < *a {
                j += 1;
            }
            if j < o.0.len() && o.0[j].0 == *a {
                out.push((a.clone(), (*e).min(o.0[j].1)));
            }
        }
        Mono(out)
    }

    /// Split off all powers of the given atom: returns (exponent, remainder).
    pub fn split_atom(&self, a: &Atom<K, V>) -> (u32, Self) {
        let mut rest = Vec::new();
        let mut exp = 0;
        for (b, e) in &self.0 {
            if b == a {
                exp = *e;
            } else {
                rest.push((b.clone(), *e));
            }
        }
        (exp, Mono(rest))
    }
}

impl<K: Coeff, V: Symbol> PartialOrd for Mono<K, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: Coeff, V: Symbol> Ord for Mono<K, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Graded lexicographic: total degree first, then a positive power of
        // the earliest differing atom wins.
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((aa, ae)), Some((ba, be))) => {
                    if aa < ba {
                        return Ordering::Greater;
                    }
                    if ba < aa {
                        return Ordering::Less;
                    }
                    if ae != be {
                        return ae.cmp(be);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<K, V> {
    pub terms: BTreeMap<Mono<K, V>, K>,
}

impl<K: Coeff, V: Symbol> Poly<K, V> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(k: K) -> Self {
        let mut terms = BTreeMap::new();
        if !k.is_zero() {
            terms.insert(Mono::unit(), k);
        }
        Poly { terms }
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn atom(a: Atom<K, V>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::atom(a), K::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_const(&self) -> Option<&K> {
        if self.terms.is_empty() {
            return None;
        }
        if self.terms.len() == 1 {
            let (m, k) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(k);
            }
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|k| *k == K::one())
    }

    pub fn add_term(&mut self, m: Mono<K, V>, k: K) {
        if k.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                let s = c.add(&k);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(m, k);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, k) in &o.terms {
            out.add_term(m.clone(), k.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, k) in &o.terms {
            out.add_term(m.clone(), k.neg());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Poly::zero();
        for (ma, ka) in &self.terms {
            for (mb, kb) in &o.terms {
                out.add_term(ma.mul(mb), ka.mul(kb));
            }
        }
        out
    }

    pub fn mul_scalar(&self, k: &K) -> Self {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul(k)))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn leading(&self) -> Option<(&Mono<K, V>, &K)> {
        self.terms.iter().next_back()
    }

    /// All distinct atoms appearing in the polynomial.
    pub fn atoms(&self) -> Vec<Atom<K, V>> {
        let mut out: Vec<Atom<K, V>> = Vec::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out.sort();
        out
    }

    pub fn max_atom(&self) -> Option<Atom<K, V>> {
        self.atoms().into_iter().next_back()
    }

    pub fn depends_on_var(&self, v: V) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(a, _)| a.depends_on(v)))
    }

    pub fn has_transcendental(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(a, _)| a.is_transcendental()))
    }

    pub fn degree_in(&self, a: &Atom<K, V>) -> u32 {
        self.terms.keys().map(|m| m.exp_of(a)).max().unwrap_or(0)
    }

    /// Dense coefficient list in powers of `a` (index = exponent).
    pub fn coeffs_in(&self, a: &Atom<K, V>) -> Vec<Poly<K, V>> {
        let d = self.degree_in(a) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, k) in &self.terms {
            let (e, rest) = m.split_atom(a);
            out[e as usize].add_term(rest, k.clone());
        }
        out
    }

    pub fn from_coeffs_in(a: &Atom<K, V>, coeffs: &[Poly<K, V>]) -> Self {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let pow = if e == 0 {
                Poly::one()
            } else {
                Poly::atom(a.clone()).pow(e as u32)
            };
            out = out.add(&c.mul(&pow));
        }
        out
    }

    /// Divide exactly; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "exact division by the zero polynomial");
        if d.is_one() {
            return Some(self.clone());
        }
        if let Some(c) = d.as_const() {
            let inv = c.inv().expect("field");
            return Some(self.mul_scalar(&inv));
        }
        let mut r = self.clone();
        let mut q = Poly::zero();
        let (dm, dk) = {
            let (m, k) = d.leading().unwrap();
            (m.clone(), k.clone())
        };
        let dk_inv = dk.inv().expect("field");
        while !r.is_zero() {
            let (rm, rk) = {
                let (m, k) = r.leading().unwrap();
                (m.clone(), k.clone())
            };
            let qm = rm.try_div(&dm)?;
            let qk = rk.mul(&dk_inv);
            let mut t = Poly::zero();
            t.add_term(qm, qk);
            q = q.add(&t);
            r = r.sub(&t.mul(d));
        }
        Some(q)
    }

    /// Scale so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some((_, k)) => {
                let inv = k.inv().expect("field");
                self.mul_scalar(&inv)
            }
        }
    }

    /// Partial derivative with respect to a plain variable atom. `None` when
    /// a transcendental atom depends on the variable (the chain rule lives at
    /// the tree level, not here).
    pub fn diff_var(&self, v: V) -> Option<Poly<K, V>> {
        let atom = Atom::Var(v);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (a, _) in &m.0 {
                if a.is_transcendental() && a.depends_on(v) {
                    return None;
                }
            }
            let (e, rest) = m.split_atom(&atom);
            if e == 0 {
                continue;
            }
            let mut mono = rest;
            if e > 1 {
                mono = mono.mul(&Mono(vec![(atom.clone(), e - 1)]));
            }
            out.add_term(mono, c.mul(&K::from_i64(e as i64)));
        }
        Some(out)
    }

    /// Common monomial factor of all terms.
    pub fn mono_content(&self) -> Mono<K, V> {
        let mut it = self.terms.keys();
        let mut g = match it.next() {
            None => return Mono::unit(),
            Some(m) => m.clone(),
        };
        for m in it {
            g = g.gcd(m);
            if g.is_unit() {
                break;
            }
        }
        g
    }
}

// ---------------------------------------------------------------------------
// Multivariate GCD by primitive pseudo-remainder sequences, recursing on the
// largest atom. Coefficients live in a field, so constants are units and the
// result is normalized monic.
// ---------------------------------------------------------------------------

pub fn poly_gcd<K: Coeff, V: Symbol>(a: &Poly<K, V>, b: &Poly<K, V>) -> Poly<K, V> {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    // Fast path: pull out the common monomial factor first.
    let mg = a.mono_content().gcd(&b.mono_content());
    let (a, b) = if mg.is_unit() {
        (a.clone(), b.clone())
    } else {
        let mut mp = Poly::zero();
        mp.add_term(mg.clone(), K::one());
        (a.exact_div(&mp).unwrap(), b.exact_div(&mp).unwrap())
    };
    let core = gcd_inner(&a, &b);
    let mut mp = Poly::zero();
    mp.add_term(mg, K::one());
    core.mul(&mp).monic()
}

fn gcd_inner<K: Coeff, V: Symbol>(a: &Poly<K, V>, b: &Poly<K, V>) -> Poly<K, V> {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_const().is_some() || b.as_const().is_some() {
        return Poly::one();
    }
    let va = a.max_atom().unwrap();
    let vb = b.max_atom().unwrap();
    let v = if va >= vb { va } else { vb };

    let ca = a.coeffs_in(&v);
    let cb = b.coeffs_in(&v);
    let cont_a = gcd_list(&ca);
    let cont_b = gcd_list(&cb);
    let cont = gcd_inner(&cont_a, &cont_b);

    let ppa = primitive_vec(ca.iter().map(|c| div_or_zero(c, &cont_a)).collect());
    let ppb = primitive_vec(cb.iter().map(|c| div_or_zero(c, &cont_b)).collect());

    let (mut f, mut g) = if deg_of(&ppa) >= deg_of(&ppb) {
        (ppa, ppb)
    } else {
        (ppb, ppa)
    };

    // Primitive PRS: dividing every remainder by its full content (polynomial
    // and scalar) is what keeps coefficient growth polynomial.
    loop {
        if deg_of(&g) == 0 {
            // Primitive part collapsed to a nonzero constant: pp-gcd is 1.
            return cont.monic();
        }
        let r = pseudo_rem(&f, &g);
        if r.iter().all(|c| c.is_zero()) {
            break;
        }
        let rc = gcd_list(&r);
        let rp = primitive_vec(r.iter().map(|c| div_or_zero(c, &rc)).collect());
        f = g;
        g = rp;
    }
    let gp = Poly::from_coeffs_in(&v, &g);
    let gc = gcd_list(&g);
    let gpp = gp.exact_div(&gc).unwrap();
    cont.mul(&gpp).monic()
}

fn div_or_zero<K: Coeff, V: Symbol>(c: &Poly<K, V>, d: &Poly<K, V>) -> Poly<K, V> {
    if c.is_zero() {
        Poly::zero()
    } else {
        c.exact_div(d).expect("content divides coefficients")
    }
}

/// Divide a coefficient vector by the scalar content of all its entries.
fn primitive_vec<K: Coeff, V: Symbol>(v: Vec<Poly<K, V>>) -> Vec<Poly<K, V>> {
    let mut content: Option<K> = None;
    for p in &v {
        for c in p.terms.values() {
            content = Some(match content {
                None => c.content_gcd(c),
                Some(acc) => acc.content_gcd(c),
            });
        }
    }
    let Some(content) = content else {
        return v;
    };
    if content == K::one() || content.is_zero() {
        return v;
    }
    let inv = content.inv().expect("nonzero content");
    v.into_iter().map(|p| p.mul_scalar(&inv)).collect()
}

fn gcd_list<K: Coeff, V: Symbol>(list: &[Poly<K, V>]) -> Poly<K, V> {
    let mut g = Poly::zero();
    for p in list {
        if p.is_zero() {
            continue;
        }
        g = if g.is_zero() { p.monic() } else { gcd_inner(&g, p) };
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn deg_of<K: Coeff, V: Symbol>(c: &[Poly<K, V>]) -> usize {
    c.iter().rposition(|p| !p.is_zero()).unwrap_or(0)
}

/// Pseudo-remainder of dense coefficient vectors in the shared main atom.
fn pseudo_rem<K: Coeff, V: Symbol>(a: &[Poly<K, V>], b: &[Poly<K, V>]) -> Vec<Poly<K, V>> {
    let db = deg_of(b);
    let lb = b[db].clone();
    let mut r: Vec<Poly<K, V>> = a.to_vec();
    loop {
        let dr = deg_of(&r);
        if r.iter().all(|c| c.is_zero()) || dr < db {
            return r;
        }
        let lr = r[dr].clone();
        // r := lb*r - lr * x^(dr-db) * b
        let mut next = vec![Poly::zero(); dr + 1];
        for (i, c) in r.iter().enumerate() {
            next[i] = c.mul(&lb);
        }
        for (i, c) in b.iter().enumerate() {
            let idx = i + (dr - db);
            next[idx] = next[idx].sub(&c.mul(&lr));
        }
        while next.len() > 1 && next.last().unwrap().is_zero() {
            next.pop();
        }
        r = next;
    }
}

pub fn poly_lcm<K: Coeff, V: Symbol>(a: &Poly<K, V>, b: &Poly<K, V>) -> Poly<K, V> {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = poly_gcd(a, b);
    a.mul(&b.exact_div(&g).expect("gcd divides")).monic()
}
