use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::matrix::IntMatrix;
use super::snf::{smith_normal_form, Snf};

/// Finds some integer `x` with `a · x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_with(&smith_normal_form(a), a.cols(), b)
}

pub(crate) fn solve_with(f: &Snf, ncols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(f.u.cols(), b.len(), "right-hand side length mismatch");
    let ub = f.u.mul_vec(b);
    let d = f.diagonal();
    let mut y = vec![BigInt::zero(); ncols];
    for (i, c) in ub.iter().enumerate() {
        match d.get(i) {
            Some(s) => {
                let (q, r) = c.div_rem(s);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
            None => {
                if !c.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(f.v.mul_vec(&y))
}

/// Basis of the integer kernel `{x : a · x = 0}`, as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    kernel_with(&smith_normal_form(a))
}

pub(crate) fn kernel_with(f: &Snf) -> IntMatrix {
    let r = f.rank();
    let idx: Vec<usize> = (r..f.v.cols()).collect();
    f.v.select_columns(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_rejects() {
        let a = IntMatrix::from_rows(&[[2, 4], [0, 6]]);
        let b = vec![BigInt::from(6), BigInt::from(6)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(solve_integer(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }

    #[test]
    fn kernel_spans_relations() {
        let a = IntMatrix::from_rows(&[[1, 2, 3], [2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        // (1, 1, -1) lies in the span
        let target = vec![BigInt::from(1), BigInt::from(1), BigInt::from(-1)];
        assert!(solve_integer(&k, &target).is_some());
    }
}
