//! Cyclic matrices and their centralizers.
//!
//! For a cyclic `A` over `O_l` the centralizer of `A` in `M_n(O_l)` is the
//! polynomial algebra `O_l[A]`, free with basis `I, A, ..., A^(n-1)`. A cyclic
//! vector `v` (one whose Krylov matrix `K = [v | Av | ... | A^(n-1)v]` is
//! invertible) gives coordinates: `B = sum c_j A^j` iff `K c = B v`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, UniPoly};
use crate::ring::{RingElement, RingSpec};

/// Seed of the pseudo-random stage of the cyclic-vector search.
pub const FRAME_SEED: u64 = 0x6379_636c_6963;
/// Total number of candidate vectors tried by [`find_cyclic_frame`].
pub const FRAME_ATTEMPTS: usize = 64;

/// Monic minimal polynomial of a matrix over the residue field.
///
/// Finds the first linear relation among `I, A, A^2, ...` by incremental elimination
/// in the `n^2`-dimensional coordinate space.
pub fn min_poly_residue(abar: &Matrix) -> Result<UniPoly> {
    let s = abar.spec();
    if s.ell() != 1 {
        return Err(Error::InvalidSpec(format!("minimal polynomial needs the residue field, got {s}")));
    }
    let n = abar.n();
    let dim = n * n;
    // Each basis row: (pivot column, reduced vector with pivot 1, combination of powers).
    let mut basis: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
    let mut power = Matrix::identity(s, n);
    for k in 0..=n {
        let mut vec = power.values().to_vec();
        let mut comb = vec![0u64; n + 1];
        comb[k] = 1;
        for (pivot, row, row_comb) in &basis {
            let factor = vec[*pivot];
            if factor == 0 {
                continue;
            }
            for (x, &r) in vec.iter_mut().zip(row) {
                *x = s.sub(*x, s.mul(factor, r));
            }
            for (x, &r) in comb.iter_mut().zip(row_comb) {
                *x = s.sub(*x, s.mul(factor, r));
            }
        }
        match (0..dim).find(|&j| vec[j] != 0) {
            None => return Ok(UniPoly::from_raw(s, comb[..=k].to_vec())),
            Some(pivot) => {
                let scale = s.inv(vec[pivot])?;
                vec.iter_mut().for_each(|x| *x = s.mul(scale, *x));
                comb.iter_mut().for_each(|x| *x = s.mul(scale, *x));
                basis.push((pivot, vec, comb));
            }
        }
        power = power.mul_unchecked(abar);
    }
    unreachable!("Cayley-Hamilton bounds the degree of the minimal polynomial by n")
}

/// A matrix is cyclic when its residue has minimal polynomial of degree `n`.
pub fn is_cyclic(a: &Matrix) -> bool {
    let abar = a.reduce(1).expect("length is at least 1");
    min_poly_residue(&abar).ok().and_then(|m| m.degree()) == Some(a.n())
}

/// Coordinates `(c_0, ..., c_{n-1})` of `sum c_j A^j` in `O_l[A]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CentralizerCoords {
    spec: RingSpec,
    values: Vec<u64>,
}

impl CentralizerCoords {
    pub fn new(coeffs: &[RingElement]) -> Result<Self> {
        let spec = coeffs.first().ok_or_else(|| Error::ShapeMismatch("empty coordinates".into()))?.spec();
        if coeffs.iter().any(|c| c.spec() != spec) {
            return Err(Error::SpecMismatch);
        }
        Ok(CentralizerCoords { spec, values: coeffs.iter().map(|c| c.value()).collect() })
    }

    pub(crate) fn from_raw(spec: RingSpec, values: Vec<u64>) -> Self {
        CentralizerCoords { spec, values }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn coeffs(&self) -> Vec<RingElement> {
        self.values.iter().map(|&v| RingElement::new_unchecked(self.spec, v)).collect()
    }

    pub fn reduce(&self, target: u32) -> Result<Self> {
        self.spec.check_target(target)?;
        let spec = self.spec.with_ell(target)?;
        Ok(CentralizerCoords { spec, values: self.values.iter().map(|&v| v % spec.modulus()).collect() })
    }

    /// Same representatives, read in a longer ring.
    pub fn lift_to(&self, spec: RingSpec) -> Result<Self> {
        if spec.p() != self.spec.p() || spec.family() != self.spec.family() || spec.ell() < self.spec.ell() {
            return Err(Error::SpecMismatch);
        }
        Ok(CentralizerCoords { spec, values: self.values.clone() })
    }

    /// Smallest valuation among the coordinates.
    pub fn valuation(&self) -> u32 {
        self.values.iter().map(|&v| self.spec.valuation(v)).min().unwrap_or(self.spec.ell())
    }

    /// Coordinate-wise floor division by `pi^v`.
    pub fn divide_by_pi_power(&self, v: u32) -> Result<Self> {
        let values = self.coeffs().iter().map(|c| c.divide_by_pi_power(v).map(|q| q.value())).collect::<Result<_>>()?;
        Ok(CentralizerCoords { spec: self.spec, values })
    }
}

/// A cyclic matrix together with a cyclic vector and its Krylov basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicFrame {
    a: Matrix,
    v: Vec<u64>,
    krylov: Matrix,
    krylov_inv: Matrix,
    powers: Vec<Matrix>,
}

impl CyclicFrame {
    /// Frame for `a` with the given vector; fails if the Krylov matrix is not invertible.
    pub fn with_vector(a: &Matrix, v: &[RingElement]) -> Result<Self> {
        if v.len() != a.n() {
            return Err(Error::ShapeMismatch("vector length".into()));
        }
        if v.iter().any(|x| x.spec() != a.spec()) {
            return Err(Error::SpecMismatch);
        }
        let raw: Vec<u64> = v.iter().map(|x| x.value()).collect();
        Self::from_raw_vector(a, raw).ok_or(Error::NotACyclicVector)
    }

    fn from_raw_vector(a: &Matrix, v: Vec<u64>) -> Option<Self> {
        let n = a.n();
        let mut columns = Vec::with_capacity(n);
        let mut w = v.clone();
        for _ in 0..n {
            let next = a.mul_vec_raw(&w);
            columns.push(std::mem::replace(&mut w, next));
        }
        let mut data = vec![0u64; n * n];
        for (j, col) in columns.iter().enumerate() {
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        let krylov = Matrix::from_raw(a.spec(), n, data);
        let krylov_inv = krylov.inverse().ok()?;
        let mut powers = vec![Matrix::identity(a.spec(), n)];
        for _ in 1..n {
            let next = powers.last().unwrap().mul_unchecked(a);
            powers.push(next);
        }
        Some(CyclicFrame { a: a.clone(), v, krylov, krylov_inv, powers })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn spec(&self) -> RingSpec {
        self.a.spec()
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn vector(&self) -> Vec<RingElement> {
        self.v.iter().map(|&x| RingElement::new_unchecked(self.spec(), x)).collect()
    }

    pub fn krylov(&self) -> &Matrix {
        &self.krylov
    }

    pub fn krylov_inverse(&self) -> &Matrix {
        &self.krylov_inv
    }

    /// `I, A, ..., A^(n-1)`.
    pub fn powers(&self) -> &[Matrix] {
        &self.powers
    }

    /// The same cyclic vector viewed over `O_target`.
    pub fn reduce(&self, target: u32) -> Result<Self> {
        let m = self.spec().with_ell(target)?.modulus();
        self.spec().check_target(target)?;
        Ok(CyclicFrame {
            a: self.a.reduce(target)?,
            v: self.v.iter().map(|&x| x % m).collect(),
            krylov: self.krylov.reduce(target)?,
            krylov_inv: self.krylov_inv.reduce(target)?,
            powers: self.powers.iter().map(|p| p.reduce(target)).collect::<Result<_>>()?,
        })
    }

    /// Coordinates of `b` in the basis `I, A, ..., A^(n-1)`; `b` must commute with `A`.
    pub fn express_in_powers(&self, b: &Matrix) -> Result<CentralizerCoords> {
        if b.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        if b.n() != self.n() {
            return Err(Error::ShapeMismatch("matrix size differs from the frame".into()));
        }
        if !b.commutes_unchecked(&self.a) {
            return Err(Error::NotInCentralizer);
        }
        let bv = b.mul_vec_raw(&self.v);
        let coords = CentralizerCoords::from_raw(self.spec(), self.krylov_inv.mul_vec_raw(&bv));
        if &self.coords_to_matrix(&coords)? != b {
            return Err(Error::ReconstructionFailure);
        }
        Ok(coords)
    }

    /// `sum c_j A^j`.
    pub fn coords_to_matrix(&self, c: &CentralizerCoords) -> Result<Matrix> {
        if c.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        if c.len() != self.n() {
            return Err(Error::ShapeMismatch(format!("{} coordinates for n = {}", c.len(), self.n())));
        }
        Ok(self.combine_raw(c.values()))
    }

    pub(crate) fn combine_raw(&self, c: &[u64]) -> Matrix {
        let mut out = Matrix::zeros(self.spec(), self.n());
        for (&cj, pj) in c.iter().zip(&self.powers) {
            out.add_scaled_assign(cj, pj);
        }
        out
    }
}

/// Finds a cyclic vector for `a`.
///
/// Tries `e_1, ..., e_n` first, then pseudo-random vectors from a ChaCha8 stream
/// seeded with [`FRAME_SEED`], for [`FRAME_ATTEMPTS`] candidates in total.
pub fn find_cyclic_frame(a: &Matrix) -> Result<CyclicFrame> {
    if !is_cyclic(a) {
        return Err(Error::NotCyclic);
    }
    let n = a.n();
    let modulus = a.spec().modulus();
    let basis = (0..n).map(|i| {
        let mut e = vec![0u64; n];
        e[i] = 1;
        e
    });
    let mut rng = ChaCha8Rng::seed_from_u64(FRAME_SEED);
    let random = std::iter::repeat_with(move || (0..n).map(|_| rng.gen_range(0..modulus)).collect::<Vec<u64>>());
    basis
        .chain(random)
        .take(FRAME_ATTEMPTS)
        .find_map(|v| CyclicFrame::from_raw_vector(a, v))
        .ok_or(Error::FrameSearchExhausted)
}

/// Result of an exhaustive scan for annihilating polynomials of bounded degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullIdealReport {
    pub degree_bound: usize,
    pub candidates: u64,
    /// Every polynomial of degree `< degree_bound` (including zero) with `H(A) = 0`.
    pub annihilators: Vec<UniPoly>,
}

impl NullIdealReport {
    /// True when only the zero polynomial annihilates `A` below the degree bound.
    pub fn only_zero(&self) -> bool {
        self.annihilators.iter().all(UniPoly::is_zero)
    }
}

/// Enumerates all polynomials over `O_l` of degree `< degree_bound` and reports those that
/// annihilate `a`.
pub fn verify_null_ideal_small(a: &Matrix, degree_bound: usize, budget: u64) -> Result<NullIdealReport> {
    let s = a.spec();
    if degree_bound == 0 {
        return Ok(NullIdealReport { degree_bound, candidates: 0, annihilators: Vec::new() });
    }
    let needed = (s.modulus() as u128).checked_pow(degree_bound as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut powers = vec![Matrix::identity(s, a.n())];
    for _ in 1..degree_bound {
        let next = powers.last().unwrap().mul_unchecked(a);
        powers.push(next);
    }
    let mut annihilators = Vec::new();
    let mut coeffs = vec![0u64; degree_bound];
    for _ in 0..needed {
        let mut acc = Matrix::zeros(s, a.n());
        for (&c, pw) in coeffs.iter().zip(&powers) {
            acc.add_scaled_assign(c, pw);
        }
        if acc.is_zero() {
            annihilators.push(UniPoly::from_raw(s, coeffs.clone()));
        }
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < s.modulus() {
                break;
            }
            *c = 0;
        }
    }
    Ok(NullIdealReport { degree_bound, candidates: needed as u64, annihilators })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, l: u32) -> RingSpec {
        RingSpec::int(p, l).unwrap()
    }

    fn companion(spec: RingSpec, coeffs: &[i64]) -> Matrix {
        // Companion of t^n + c_{n-1} t^{n-1} + ... + c_0, last column carries -c.
        let n = coeffs.len();
        let mut m = Matrix::zeros(spec, n);
        for i in 1..n {
            m.set(i, i - 1, RingElement::one(spec)).unwrap();
        }
        for (i, &c) in coeffs.iter().enumerate() {
            m.set(i, n - 1, RingElement::from_int(spec, -c)).unwrap();
        }
        m
    }

    #[test]
    fn min_poly_examples() {
        let f3 = z(3, 1);
        assert_eq!(min_poly_residue(&Matrix::diag(f3, &[2, 2])).unwrap(), UniPoly::from_ints(f3, &[-2, 1]));
        let f5 = z(5, 1);
        let m = min_poly_residue(&Matrix::diag(f5, &[0, 4])).unwrap();
        assert_eq!(m, UniPoly::from_ints(f5, &[0, 1, 1]));
        assert!(m.eval_matrix(&Matrix::diag(f5, &[0, 4])).unwrap().is_zero());
        let c = companion(f3, &[-2, 0]);
        assert_eq!(min_poly_residue(&c).unwrap(), UniPoly::from_ints(f3, &[1, 0, 1]));
        assert!(min_poly_residue(&Matrix::diag(z(3, 2), &[1, 2])).is_err());
    }

    #[test]
    fn min_poly_of_jordan_block_has_full_degree() {
        let f5 = z(5, 1);
        let j = Matrix::from_ints(f5, &[&[2, 1, 0], &[0, 2, 1], &[0, 0, 2]]).unwrap();
        assert_eq!(min_poly_residue(&j).unwrap(), UniPoly::from_ints(f5, &[-8, 12, -6, 1]));
        let partial = Matrix::from_ints(f5, &[&[2, 1, 0], &[0, 2, 0], &[0, 0, 2]]).unwrap();
        assert_eq!(min_poly_residue(&partial).unwrap().degree(), Some(2));
    }

    #[test]
    fn cyclicity_examples() {
        assert!(!is_cyclic(&Matrix::diag(z(3, 2), &[5, 2])));
        assert!(is_cyclic(&Matrix::diag(z(5, 2), &[0, 9])));
        assert!(!is_cyclic(&Matrix::identity(z(7, 3), 3)));
        assert!(is_cyclic(&Matrix::identity(z(7, 3), 1)));
    }

    #[test]
    fn frame_examples() {
        let s = z(5, 2);
        let a = Matrix::diag(s, &[0, 9]);
        let ones = [RingElement::one(s), RingElement::one(s)];
        let frame = CyclicFrame::with_vector(&a, &ones).unwrap();
        assert_eq!(frame.krylov(), &Matrix::from_ints(s, &[&[1, 0], &[1, 9]]).unwrap());
        assert_eq!(frame.krylov().det().value(), 9);
        assert_eq!(frame.krylov().mul(frame.krylov_inverse()).unwrap(), Matrix::identity(s, 2));
        let e1 = [RingElement::one(s), RingElement::zero(s)];
        assert_eq!(CyclicFrame::with_vector(&a, &e1), Err(Error::NotACyclicVector));

        let found = find_cyclic_frame(&a).unwrap();
        assert!(found.krylov().det().is_unit());

        let c = companion(z(3, 3), &[1, 2, 0]);
        let f = find_cyclic_frame(&c).unwrap();
        assert_eq!(f.vector()[0], RingElement::one(z(3, 3)));
        assert_eq!(f.krylov(), &Matrix::identity(z(3, 3), 3));

        assert_eq!(find_cyclic_frame(&Matrix::diag(z(3, 1), &[2, 2])), Err(Error::NotCyclic));
    }

    #[test]
    fn express_in_powers_examples() {
        let f5 = z(5, 1);
        let frame = find_cyclic_frame(&Matrix::diag(f5, &[0, 4])).unwrap();
        let c = frame.express_in_powers(&Matrix::diag(f5, &[1, 2])).unwrap();
        assert_eq!(c.values(), &[1, 4]);

        let s = z(7, 2);
        let a = companion(s, &[3, 1, 5]);
        let frame = find_cyclic_frame(&a).unwrap();
        assert_eq!(frame.express_in_powers(&a).unwrap().values(), &[0, 1, 0]);
        assert_eq!(frame.express_in_powers(&Matrix::identity(s, 3)).unwrap().values(), &[1, 0, 0]);
        let one = CentralizerCoords::new(&[RingElement::one(s), RingElement::zero(s), RingElement::zero(s)]).unwrap();
        assert_eq!(frame.coords_to_matrix(&one).unwrap(), Matrix::identity(s, 3));

        let not_commuting = Matrix::from_ints(s, &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]).unwrap();
        assert_eq!(frame.express_in_powers(&not_commuting), Err(Error::NotInCentralizer));
    }

    #[test]
    fn null_ideal_examples() {
        // Cyclic 2x2 over Z/9: only the zero polynomial of degree < 2 annihilates.
        let a = Matrix::from_ints(z(3, 2), &[&[0, 1], &[2, 0]]).unwrap();
        let report = verify_null_ideal_small(&a, 2, 1_000).unwrap();
        assert_eq!(report.candidates, 81);
        assert!(report.only_zero());
        assert_eq!(report.annihilators.len(), 1);

        // Scalar matrix over F_3: t - 2 and its multiple 2t - 1 annihilate.
        let f3 = z(3, 1);
        let report = verify_null_ideal_small(&Matrix::diag(f3, &[2, 2]), 2, 1_000).unwrap();
        let nonzero: Vec<_> = report.annihilators.iter().filter(|h| !h.is_zero()).cloned().collect();
        assert_eq!(nonzero, vec![UniPoly::from_ints(f3, &[1, 1]), UniPoly::from_ints(f3, &[2, 2])]);

        let empty = verify_null_ideal_small(&a, 0, 1).unwrap();
        assert!(empty.annihilators.is_empty());
        assert!(matches!(verify_null_ideal_small(&a, 3, 100), Err(Error::BudgetExceeded { .. })));
    }
}
