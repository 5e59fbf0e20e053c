//! Random instance generators for tests, benchmarks and demos.

use rand::Rng;

use crate::matrix::Matrix;
use crate::polynomial::MultiPoly;
use crate::ring::{RingElement, RingSpec};

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, spec: RingSpec) -> RingElement {
    RingElement::new_unchecked(spec, rng.gen_range(0..spec.modulus()))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, spec: RingSpec, n: usize) -> Matrix {
    Matrix::from_raw(spec, n, (0..n * n).map(|_| rng.gen_range(0..spec.modulus())).collect())
}

/// Rejection-samples an invertible matrix.
pub fn random_unit_matrix<R: Rng + ?Sized>(rng: &mut R, spec: RingSpec, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, spec, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Companion matrix of the monic `t^n + c_{n-1} t^{n-1} + ... + c_0`, given `c_0..c_{n-1}`.
pub fn companion(spec: RingSpec, lower_coeffs: &[RingElement]) -> Matrix {
    let n = lower_coeffs.len();
    let mut data = vec![0u64; n * n];
    for i in 1..n {
        data[i * n + i - 1] = 1;
    }
    for (i, c) in lower_coeffs.iter().enumerate() {
        data[i * n + n - 1] = spec.neg(c.value());
    }
    Matrix::from_raw(spec, n, data)
}

/// `U C U^-1` for a companion matrix `C` of a random monic polynomial and a random invertible `U`.
/// Always cyclic: `C` has `e_1` as cyclic vector at every level.
pub fn random_cyclic_matrix<R: Rng + ?Sized>(rng: &mut R, spec: RingSpec, n: usize) -> Matrix {
    let coeffs: Vec<RingElement> = (0..n).map(|_| random_element(rng, spec)).collect();
    let c = companion(spec, &coeffs);
    let u = random_unit_matrix(rng, spec, n);
    let u_inv = u.inverse().expect("sampled invertible");
    u.mul_unchecked(&c).mul_unchecked(&u_inv)
}

/// Random univariate monic polynomial of the given degree.
pub fn random_monic_univariate<R: Rng + ?Sized>(rng: &mut R, spec: RingSpec, degree: u32) -> MultiPoly {
    let mut f = MultiPoly::zero(spec, 1);
    for i in 0..degree {
        f.add_term_raw(vec![i], rng.gen_range(0..spec.modulus()));
    }
    f.add_term_raw(vec![degree], 1);
    f
}

/// Random polynomial in `nvars` variables with `nterms` terms of total degree at most `max_degree`.
pub fn random_multipoly<R: Rng + ?Sized>(
    rng: &mut R,
    spec: RingSpec,
    nvars: usize,
    max_degree: u32,
    nterms: usize,
) -> MultiPoly {
    let mut f = MultiPoly::zero(spec, nvars);
    for _ in 0..nterms {
        let mut budget = rng.gen_range(0..=max_degree);
        let mut e = vec![0u32; nvars];
        while budget > 0 {
            e[rng.gen_range(0..nvars)] += 1;
            budget -= 1;
        }
        f.add_term_raw(e, rng.gen_range(1..spec.modulus()));
    }
    f
}
