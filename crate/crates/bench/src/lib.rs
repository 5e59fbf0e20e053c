//! Instances shared by the benchmarks.

use matlift::{LiftProblem, Matrix, MultiPoly, RingSpec};

/// `xy + y^2 = diag(0, 9)` over `Z/5^l` with seed `(diag(4, 0), diag(1, 2))`.
pub fn padic5(l: u32) -> LiftProblem {
    let s = RingSpec::int(5, l).expect("valid ring");
    let k = s.residue_field();
    let f = MultiPoly::from_int_terms(s, 2, &[(&[1, 1], 1), (&[0, 2], 1)]).expect("two variables");
    LiftProblem::new(Matrix::diag(s, &[0, 9]), f, vec![Matrix::diag(k, &[4, 0]), Matrix::diag(k, &[1, 2])])
}

/// `B^2 = diag(5, 2)` over `Z/9`.
pub fn z9_square() -> (Matrix, MultiPoly) {
    let s = RingSpec::int(3, 2).expect("valid ring");
    (Matrix::diag(s, &[5, 2]), MultiPoly::univariate(s, &[0, 0, 1]))
}
