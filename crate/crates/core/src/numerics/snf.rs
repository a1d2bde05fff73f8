//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::intmat::IntMatrix;

/// `u * m * v == s`, with `s` diagonal, non-negative, and each diagonal entry
/// dividing the next.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        // smallest non-zero entry of the trailing block
        let Some((pi, pj)) = smallest_nonzero(&s, t) else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -s[(i, t)].div_floor(&s[(t, t)]);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !s[(i, t)].is_zero() {
                    s.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -s[(t, j)].div_floor(&s[(t, t)]);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !s[(t, j)].is_zero() {
                    s.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the block.
            let pivot = s[(t, t)].clone();
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !s[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::from(1);
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }

    let out = SmithForm { u, s, v };
    debug_assert!(verify(m, &out), "Smith normal form postcondition violated");
    out
}

fn smallest_nonzero(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            if s[(i, j)].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Exact check of every postcondition.
pub fn verify(m: &IntMatrix, f: &SmithForm) -> bool {
    if &(&f.u * m) * &f.v != f.s {
        return false;
    }
    if !f.u.is_unimodular() || !f.v.is_unimodular() {
        return false;
    }
    for i in 0..f.s.rows() {
        for j in 0..f.s.cols() {
            if i != j && !f.s[(i, j)].is_zero() {
                return false;
            }
        }
    }
    let d = f.invariant_factors();
    if d.iter().any(Signed::is_negative) {
        return false;
    }
    d.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity() {
        let f = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(f.s, IntMatrix::identity(3));
    }

    #[test]
    fn diag_2_3() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let f = smith_normal_form(&m);
        assert_eq!(f.s, IntMatrix::from_i64(&[&[1, 0], &[0, 6]]));
        assert!(verify(&m, &f));
        assert_eq!((&(&f.u * &m) * &f.v), f.s);
    }

    #[test]
    fn zero_one_by_one() {
        let m = IntMatrix::from_i64(&[&[0]]);
        assert_eq!(smith_normal_form(&m).s, m);
    }

    #[test]
    fn rectangular() {
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let f = smith_normal_form(&m);
        assert_eq!(f.invariant_factors(), vec![2.into(), 6.into(), 12.into()]);
        let r = IntMatrix::from_i64(&[&[1, 2], &[3, 4], &[5, 6]]);
        let g = smith_normal_form(&r);
        assert!(verify(&r, &g));
        assert_eq!(g.invariant_factors(), vec![1.into(), 2.into()]);
    }

    #[test]
    fn large_entries_do_not_overflow() {
        let big = i64::MAX;
        let m = IntMatrix::from_i64(&[&[big, big - 1], &[big - 2, big - 7]]);
        assert!(verify(&m, &smith_normal_form(&m)));
    }

    proptest! {
        #[test]
        fn random_matrices(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-9i64..10, 25)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            let m = IntMatrix::from_rows(&data).unwrap();
            let f = smith_normal_form(&m);
            prop_assert!(verify(&m, &f));
        }
    }
}
