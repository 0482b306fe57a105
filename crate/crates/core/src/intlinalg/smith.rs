use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `u · m · v = d` with `u`, `v` unimodular and `d` diagonal, `d₁ | d₂ | …`, entries `>= 0`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    u_inv: IntMatrix,
}

impl SmithForm {
    /// Diagonal of `d`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Inverse of `u`, tracked alongside the row operations.
    pub fn u_inv(&self) -> &IntMatrix {
        &self.u_inv
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    /// row[dst] += f · row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.a.add_row(dst, src, f);
        self.u.add_row(dst, src, f);
        self.u_inv.add_col(src, dst, &-f);
    }

    /// col[dst] += f · col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.a.add_col(dst, src, f);
        self.v.add_col(dst, src, f);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn smallest_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a[(i, j)].abs();
                if x.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, b)| x < *b) {
                    best = Some(((i, j), x));
                }
            }
        }
        best.map(|(p, _)| p)
    }

    /// Brings one invariant factor to `(t, t)`; false when the remaining block is zero.
    fn reduce_step(&mut self, t: usize) -> bool {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        loop {
            let Some((pi, pj)) = self.smallest_nonzero(t) else {
                return false;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            let pivot = self.a[(t, t)].clone();

            let mut clean = true;
            for i in t + 1..rows {
                let q = self.a[(i, t)].div_floor(&pivot);
                self.add_row(i, t, &-q);
                clean &= self.a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                let q = self.a[(t, j)].div_floor(&pivot);
                self.add_col(j, t, &-q);
                clean &= self.a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => self.add_row(t, i, &BigInt::from(1)),
                None => {
                    if self.a[(t, t)].is_negative() {
                        self.negate_row(t);
                    }
                    return true;
                }
            }
        }
    }
}

/// Smith normal form of an arbitrary integer matrix. Deterministic for a fixed input.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut r = Reducer {
        a: m.clone(),
        u: IntMatrix::identity(m.rows()),
        u_inv: IntMatrix::identity(m.rows()),
        v: IntMatrix::identity(m.cols()),
    };
    for t in 0..m.rows().min(m.cols()) {
        if !r.reduce_step(t) {
            break;
        }
    }
    SmithForm {
        u: r.u,
        d: r.a,
        v: r.v,
        u_inv: r.u_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d, "U M V != D for {m:?}");
        assert!(s.d.is_diagonal());
        assert_eq!(s.u.det().abs(), BigInt::one());
        assert_eq!(s.v.det().abs(), BigInt::one());
        assert_eq!(s.u.mul(s.u_inv()), IntMatrix::identity(m.rows()));
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zero before nonzero in {diag:?}");
            assert!(w[1].is_multiple_of(&w[0]), "divisibility fails in {diag:?}");
        }
        assert!(diag.iter().all(|x| !x.is_negative()));
        s
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(check(&m).diagonal(), ints(&[1, 6]));
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    #[test]
    fn zero_matrix() {
        let s = check(&IntMatrix::zeros(1, 1));
        assert_eq!(s.diagonal(), ints(&[0]));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn rectangular_and_empty() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12]]).unwrap();
        assert_eq!(check(&m).diagonal(), ints(&[2, 6]));
        check(&IntMatrix::zeros(0, 0));
        check(&IntMatrix::zeros(0, 3));
    }

    proptest! {
        #[test]
        fn reconstructs_random(rows in 1usize..5, cols in 1usize..5,
                               seed in proptest::collection::vec(-9i64..10, 16)) {
            let m = IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(seed[i * 4 + j]));
            check(&m);
        }
    }
}
