//! Exact rational linear algebra: fraction-free (Bareiss) elimination with
//! rational back-substitution. Nullspace dimensions must be exact integers,
//! so nothing here ever touches floating point.

use crate::expr::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major rational matrix.
#[derive(Clone, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    /// Clear denominators row by row.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut l = BigInt::one();
            for v in row {
                l = l.lcm(v.denom());
            }
            let mut irow: Vec<BigInt> = row.iter().map(|v| v.numer() * (&l / v.denom())).collect();
            // Divide out the integer content to keep entries small.
            let mut g = BigInt::zero();
            for x in &irow {
                g = g.gcd(x);
            }
            if !g.is_zero() && !g.is_one() {
                for x in &mut irow {
                    *x = &*x / &g;
                }
            }
            out.push(irow);
        }
        out
    }
}

/// Row echelon form by fraction-free Bareiss elimination.
/// Returns (echelon integer rows, pivot columns in order).
fn bareiss_echelon(mut m: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut rank = 0usize;
    for col in 0..cols {
        // Find a pivot row: smallest nonzero magnitude keeps numbers small.
        let mut best: Option<usize> = None;
        for (r, row) in m.iter().enumerate().skip(rank) {
            if !row[col].is_zero() {
                match best {
                    None => best = Some(r),
                    Some(b) => {
                        if m[b][col].magnitude() > row[col].magnitude() {
                            best = Some(r);
                        }
                    }
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in (rank + 1)..rows {
            if m[r][col].is_zero() {
                continue;
            }
            // Fraction-free update: (pivot*a_rj - a_rc*a_pj) / prev
            let factor = m[r][col].clone();
            for j in col..cols {
                let v = &pivot * &m[r][j] - &factor * &m[rank][j];
                m[r][j] = &v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    m.truncate(rank);
    (m, pivots)
}

/// Basis of the right nullspace, one vector per free column, in column order.
/// Each vector is scaled to coprime integers with its first nonzero entry
/// positive.
pub fn nullspace(m: &QMatrix) -> Vec<Vec<Q>> {
    let (ech, pivots) = bareiss_echelon(m.integer_rows(), m.cols);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for fc in 0..m.cols {
        if pivot_set.contains(&fc) {
            continue;
        }
        let mut v = vec![Q::zero(); m.cols];
        v[fc] = Q::one();
        // Back-substitute pivot rows bottom-up.
        for (ri, &pc) in pivots.iter().enumerate().rev() {
            let row = &ech[ri];
            let mut s = Q::zero();
            for j in (pc + 1)..m.cols {
                if !row[j].is_zero() && !v[j].is_zero() {
                    s += Q::from_integer(row[j].clone()) * &v[j];
                }
            }
            if !s.is_zero() {
                v[pc] = -s / Q::from_integer(row[pc].clone());
            }
        }
        basis.push(normalize_primitive(v));
    }
    basis
}

/// Scale a rational vector to coprime integers, first nonzero entry positive.
pub fn normalize_primitive(v: Vec<Q>) -> Vec<Q> {
    let mut l = BigInt::one();
    for x in &v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    let first = ints.iter().find(|x| !x.is_zero());
    if let Some(f) = first {
        if f.is_negative() {
            g = -g;
        }
    }
    ints.into_iter()
        .map(|x| Q::from_integer(x / &g))
        .collect()
}

/// Exact solve of A c = b; `None` when inconsistent. A is taken column-wise
/// from `columns`, each of length `dim`.
pub fn solve_columns(columns: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = columns.len();
    let dim = b.len();
    // Augmented rational Gauss-Jordan.
    let mut aug: Vec<Vec<Q>> = (0..dim)
        .map(|r| {
            let mut row: Vec<Q> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut rank = 0usize;
    let mut pivot_cols = Vec::new();
    for col in 0..n {
        let Some(p) = (rank..dim).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].clone();
        for j in col..=n {
            let v = aug[rank][j].clone() / &inv;
            aug[rank][j] = v;
        }
        for r in 0..dim {
            if r != rank && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for j in col..=n {
                    let v = aug[r][j].clone() - &f * &aug[rank][j];
                    aug[r][j] = v;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == dim {
            break;
        }
    }
    // Inconsistent when a zero row has nonzero rhs.
    for r in rank..dim {
        if !aug[r][n].is_zero() {
            return None;
        }
    }
    let mut c = vec![Q::zero(); n];
    for (ri, &pc) in pivot_cols.iter().enumerate() {
        c[pc] = aug[ri][n].clone();
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{q_int, q_ratio};

    #[test]
    fn nullspace_simple() {
        // x + y + z = 0, x - z = 0 -> span {(1, -2, 1)}
        let mut m = QMatrix::zero(2, 3);
        for (r, c, v) in [(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 0, 1), (1, 2, -1)] {
            m.set(r, c, q_int(v));
        }
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![q_int(1), q_int(-2), q_int(1)]);
    }

    #[test]
    fn nullspace_full_rank_is_empty() {
        let mut m = QMatrix::zero(2, 2);
        m.set(0, 0, q_int(2));
        m.set(1, 1, q_ratio(1, 3));
        assert!(nullspace(&m).is_empty());
    }

    #[test]
    fn nullspace_zero_matrix_is_identity_basis() {
        let m = QMatrix::zero(2, 3);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 3);
        for (i, v) in ns.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { q_int(1) } else { q_int(0) });
            }
        }
    }

    #[test]
    fn nullspace_vectors_satisfy_system() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let mut m = QMatrix::zero(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, q_ratio(rng.gen_range(-4i64..5), rng.gen_range(1i64..4)));
                }
            }
            for v in nullspace(&m) {
                for r in 0..rows {
                    let mut s = Q::zero();
                    for c in 0..cols {
                        s += m.at(r, c) * &v[c];
                    }
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let cols = vec![vec![q_int(1), q_int(0)], vec![q_int(1), q_int(1)]];
        let c = solve_columns(&cols, &[q_int(3), q_int(2)]).unwrap();
        assert_eq!(c, vec![q_int(1), q_int(2)]);
        let cols = vec![vec![q_int(1), q_int(2)]];
        assert!(solve_columns(&cols, &[q_int(1), q_int(1)]).is_none());
    }
}
