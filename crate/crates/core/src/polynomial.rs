//! Sparse multivariate polynomials over `O_l` and their evaluation at commuting matrix tuples.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{RingElement, RingSpec};

/// Exponent vector, ordered so that iteration is descending graded-lex (leading term first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so that a BTreeMap iterates from the largest monomial down.
        other.degree().cmp(&self.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    spec: RingSpec,
    nvars: usize,
    terms: BTreeMap<Exponents, u64>,
}

impl MultiPoly {
    pub fn zero(spec: RingSpec, nvars: usize) -> Self {
        assert!(nvars >= 1, "a polynomial needs at least one variable");
        MultiPoly { spec, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(spec: RingSpec, nvars: usize, c: i64) -> Self {
        let mut f = Self::zero(spec, nvars);
        f.add_term_raw(vec![0; nvars], spec.from_int(c));
        f
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(spec: RingSpec, nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::VariableOutOfRange { index: i, nvars });
        }
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut f = Self::zero(spec, nvars);
        f.add_term_raw(e, 1);
        Ok(f)
    }

    /// Builds a polynomial from `(exponents, integer coefficient)` pairs; like terms are summed.
    pub fn from_int_terms(spec: RingSpec, nvars: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        let mut f = Self::zero(spec, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ShapeMismatch(format!("exponent vector {e:?} for {nvars} variables")));
            }
            f.add_term_raw(e.to_vec(), spec.from_int(*c));
        }
        Ok(f)
    }

    pub fn from_terms(spec: RingSpec, nvars: usize, terms: Vec<(Vec<u32>, RingElement)>) -> Result<Self> {
        let mut f = Self::zero(spec, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ShapeMismatch(format!("exponent vector {e:?} for {nvars} variables")));
            }
            if c.spec() != spec {
                return Err(Error::SpecMismatch);
            }
            f.add_term_raw(e, c.value());
        }
        Ok(f)
    }

    /// Univariate polynomial from integer coefficients, lowest degree first.
    pub fn univariate(spec: RingSpec, coeffs: &[i64]) -> Self {
        let mut f = Self::zero(spec, 1);
        for (i, &c) in coeffs.iter().enumerate() {
            f.add_term_raw(vec![i as u32], spec.from_int(c));
        }
        f
    }

    pub(crate) fn add_term_raw(&mut self, e: Vec<u32>, c: u64) {
        let key = Exponents(e);
        let s = self.spec;
        let sum = s.add(self.terms.get(&key).copied().unwrap_or(0), c);
        if sum == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], RingElement)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.0.as_slice(), RingElement::new_unchecked(self.spec, c)))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Exponents::degree)
    }

    /// For univariate polynomials: leading coefficient equals 1.
    pub fn is_monic_univariate(&self) -> bool {
        self.nvars == 1 && self.terms.iter().next().map(|(_, &c)| c) == Some(1)
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term_raw(e.0.clone(), c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let s = self.spec;
        let mut out = MultiPoly::zero(s, self.nvars);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e: Vec<u32> = e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect();
                out.add_term_raw(e, s.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &RingElement) -> Result<MultiPoly> {
        if c.spec() != self.spec {
            return Err(Error::SpecMismatch);
        }
        let mut out = MultiPoly::zero(self.spec, self.nvars);
        for (e, &x) in &self.terms {
            out.add_term_raw(e.0.clone(), self.spec.mul(c.value(), x));
        }
        Ok(out)
    }

    fn check(&self, other: &MultiPoly) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::ShapeMismatch("different numbers of variables".into()));
        }
        Ok(())
    }

    /// Coefficient-wise image in `O_target[x]`.
    pub fn reduce(&self, target: u32) -> Result<MultiPoly> {
        self.spec.check_target(target)?;
        let spec = self.spec.with_ell(target)?;
        let mut out = MultiPoly::zero(spec, self.nvars);
        for (e, &c) in &self.terms {
            out.add_term_raw(e.0.clone(), c % spec.modulus());
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `x_i` (0-based).
    pub fn partial_derivative(&self, i: usize) -> Result<MultiPoly> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange { index: i, nvars: self.nvars });
        }
        let s = self.spec;
        let mut out = MultiPoly::zero(s, self.nvars);
        for (e, &c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[i] -= 1;
            out.add_term_raw(d, s.mul(s.from_int(k as i64), c));
        }
        Ok(out)
    }

    fn check_tuple(&self, bs: &[Matrix]) -> Result<()> {
        if bs.len() != self.nvars {
            return Err(Error::ShapeMismatch(format!("{} matrices for {} variables", bs.len(), self.nvars)));
        }
        for b in bs {
            if b.spec() != self.spec {
                return Err(Error::SpecMismatch);
            }
            if b.n() != bs[0].n() {
                return Err(Error::ShapeMismatch("matrices of different sizes".into()));
            }
        }
        Ok(())
    }

    /// `F(B_1, ..., B_m)`. The tuple must commute pairwise; this is checked.
    pub fn eval_at_tuple(&self, bs: &[Matrix]) -> Result<Matrix> {
        self.check_tuple(bs)?;
        if let Some((i, j)) = first_noncommuting_pair(bs) {
            return Err(Error::NonCommutingTuple(i, j));
        }
        Ok(self.eval_commuting(bs))
    }

    /// Evaluation for a tuple already known to commute and to match `spec`/`nvars`.
    pub(crate) fn eval_commuting(&self, bs: &[Matrix]) -> Matrix {
        let n = bs[0].n();
        let mut max_exp = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for (m, &k) in max_exp.iter_mut().zip(&e.0) {
                *m = (*m).max(k);
            }
        }
        let powers: Vec<Vec<Matrix>> = bs
            .iter()
            .zip(&max_exp)
            .map(|(b, &k)| {
                let mut ps = vec![Matrix::identity(self.spec, n)];
                for _ in 0..k {
                    let next = ps.last().unwrap().mul_unchecked(b);
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = Matrix::zeros(self.spec, n);
        for (e, &c) in &self.terms {
            let mut mono: Option<Matrix> = None;
            for (v, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pk = &powers[v][k as usize];
                mono = Some(match mono {
                    None => pk.clone(),
                    Some(m) => m.mul_unchecked(pk),
                });
            }
            match mono {
                None => acc.add_scalar_assign(c),
                Some(m) => acc.add_scaled_assign(c, &m),
            }
        }
        acc
    }

    /// The quadratic remainder `F(X+Y) - F(X) - sum_i dF/dx_i(X) Y_i`.
    ///
    /// All matrices in `xs` and `ys` together must commute pairwise.
    pub fn taylor_linear_residual(&self, xs: &[Matrix], ys: &[Matrix]) -> Result<Matrix> {
        self.check_tuple(xs)?;
        self.check_tuple(ys)?;
        let all: Vec<Matrix> = xs.iter().chain(ys).cloned().collect();
        if let Some((i, j)) = first_noncommuting_pair(&all) {
            return Err(Error::NonCommutingTuple(i, j));
        }
        let shifted: Vec<Matrix> = xs.iter().zip(ys).map(|(x, y)| x.add_unchecked(y)).collect();
        let mut r = self.eval_commuting(&shifted).sub(&self.eval_commuting(xs))?;
        for (i, y) in ys.iter().enumerate() {
            let d = self.partial_derivative(i)?.eval_commuting(xs);
            r = r.sub(&d.mul_unchecked(y))?;
        }
        Ok(r)
    }
}

pub(crate) fn first_noncommuting_pair(bs: &[Matrix]) -> Option<(usize, usize)> {
    for i in 0..bs.len() {
        for j in i + 1..bs.len() {
            if !bs[i].commutes_unchecked(&bs[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn var_name(nvars: usize, i: usize) -> String {
    match nvars {
        1 => "t".into(),
        n if n <= VAR_NAMES.len() => VAR_NAMES[i].into(),
        _ => format!("x{}", i + 1),
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let mono: String = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| match k {
                        1 => var_name(self.nvars, i),
                        _ => format!("{}^{}", var_name(self.nvars, i), k),
                    })
                    .collect::<Vec<_>>()
                    .join("*");
                match (mono.is_empty(), c.value() == 1) {
                    (true, _) => c.to_string(),
                    (false, true) => mono,
                    (false, false) => format!("{c}*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(p: u64, l: u32) -> RingSpec {
        RingSpec::int(p, l).unwrap()
    }

    fn xy_plus_y2(spec: RingSpec) -> MultiPoly {
        MultiPoly::from_int_terms(spec, 2, &[(&[1, 1], 1), (&[0, 2], 1)]).unwrap()
    }

    #[test]
    fn terms_are_in_descending_graded_lex_order() {
        let f =
            MultiPoly::from_int_terms(z(5, 1), 2, &[(&[0, 2], 1), (&[1, 0], 3), (&[1, 1], 1), (&[2, 0], 2)]).unwrap();
        let exps: Vec<Vec<u32>> = f.terms().map(|(e, _)| e.to_vec()).collect();
        assert_eq!(exps, vec![vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0]]);
        assert_eq!(xy_plus_y2(z(5, 2)).to_string(), "x*y + y^2");
    }

    #[test]
    fn reduction_examples() {
        let f = xy_plus_y2(z(5, 2));
        assert_eq!(f.reduce(1).unwrap(), xy_plus_y2(z(5, 1)));
        let g = MultiPoly::univariate(z(5, 2), &[0, 5, 1]);
        assert_eq!(g.reduce(1).unwrap(), MultiPoly::univariate(z(5, 1), &[0, 0, 1]));
        assert_eq!(g.reduce(2).unwrap(), g);
        assert!(g.reduce(3).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let k = z(5, 1);
        let f = xy_plus_y2(k);
        let b = [Matrix::diag(k, &[4, 0]), Matrix::diag(k, &[1, 2])];
        assert_eq!(f.eval_at_tuple(&b).unwrap(), Matrix::diag(k, &[0, 4]));

        let a = Matrix::from_ints(k, &[&[1, 2], &[3, 4]]).unwrap();
        let x = MultiPoly::var(k, 1, 0).unwrap();
        assert_eq!(x.eval_at_tuple(std::slice::from_ref(&a)).unwrap(), a);

        let f3 = z(3, 1);
        let sq = MultiPoly::univariate(f3, &[0, 0, 1]);
        let b = Matrix::from_ints(f3, &[&[0, 1], &[2, 0]]).unwrap();
        assert_eq!(sq.eval_at_tuple(&[b]).unwrap(), Matrix::diag(f3, &[2, 2]));
    }

    #[test]
    fn constant_term_adds_scalar_matrix() {
        let s = z(7, 2);
        let f = MultiPoly::univariate(s, &[3, 1]);
        let a = Matrix::from_ints(s, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(f.eval_at_tuple(&[a]).unwrap(), Matrix::from_ints(s, &[&[4, 2], &[3, 7]]).unwrap());
    }

    #[test]
    fn non_commuting_tuple_is_rejected() {
        let s = z(5, 1);
        let f = xy_plus_y2(s);
        let a = Matrix::from_ints(s, &[&[0, 1], &[0, 0]]).unwrap();
        let b = Matrix::from_ints(s, &[&[0, 0], &[1, 0]]).unwrap();
        assert_eq!(f.eval_at_tuple(&[a, b]), Err(Error::NonCommutingTuple(0, 1)));
    }

    #[test]
    fn derivative_examples() {
        let k = z(5, 1);
        let f = xy_plus_y2(k);
        let fx = f.partial_derivative(0).unwrap();
        let fy = f.partial_derivative(1).unwrap();
        assert_eq!(fx, MultiPoly::var(k, 2, 1).unwrap());
        assert_eq!(fy, MultiPoly::from_int_terms(k, 2, &[(&[1, 0], 1), (&[0, 1], 2)]).unwrap());
        let seed = [Matrix::diag(k, &[4, 0]), Matrix::diag(k, &[1, 2])];
        let b2 = seed[1].clone();
        assert_eq!(fx.eval_at_tuple(&seed).unwrap(), b2);
        assert_eq!(fy.eval_at_tuple(&seed).unwrap(), b2.mul(&b2).unwrap());
        assert!(MultiPoly::constant(k, 2, 3).partial_derivative(0).unwrap().is_zero());
        assert!(f.partial_derivative(2).is_err());
    }

    #[test]
    fn derivative_of_pth_power_vanishes_in_residue_characteristic() {
        let s = z(3, 2);
        let f = MultiPoly::univariate(s, &[0, 0, 0, 1]);
        let d = f.partial_derivative(0).unwrap();
        assert_eq!(d, MultiPoly::univariate(s, &[0, 0, 3]));
        assert!(d.reduce(1).unwrap().is_zero());
    }

    #[test]
    fn taylor_residual_examples() {
        let s = z(5, 3);
        let f = MultiPoly::univariate(s, &[0, 0, 1]);
        let x = Matrix::from_ints(s, &[&[1, 2], &[3, 4]]).unwrap();
        let zero = Matrix::zeros(s, 2);
        assert!(f.taylor_linear_residual(std::slice::from_ref(&x), &[zero]).unwrap().is_zero());
        // Y nilpotent and commuting with X.
        let nil = Matrix::from_ints(s, &[&[0, 1], &[0, 0]]).unwrap();
        let x_upper = Matrix::from_ints(s, &[&[2, 7], &[0, 2]]).unwrap();
        assert!(f.taylor_linear_residual(&[x_upper], &[nil]).unwrap().is_zero());
    }

    fn spec_strategy() -> impl Strategy<Value = RingSpec> {
        (prop::sample::select(vec![3u64, 5, 7]), 1u32..5, any::<bool>())
            .prop_map(|(p, l, series)| if series { RingSpec::series(p, l) } else { RingSpec::int(p, l) }.unwrap())
    }

    fn poly_strategy(spec: RingSpec, nvars: usize) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, nvars), 0..spec.modulus()), 0..6).prop_map(move |terms| {
            let mut f = MultiPoly::zero(spec, nvars);
            for (e, c) in terms {
                f.add_term_raw(e, c);
            }
            f
        })
    }

    proptest! {
        #[test]
        fn derivative_is_linear_and_leibniz(
            (f, g) in spec_strategy().prop_flat_map(|s| (poly_strategy(s, 2), poly_strategy(s, 2)))
        ) {
            for i in 0..2 {
                let d = |h: &MultiPoly| h.partial_derivative(i).unwrap();
                prop_assert_eq!(d(&f.add(&g).unwrap()), d(&f).add(&d(&g)).unwrap());
                let lhs = d(&f.mul(&g).unwrap());
                let rhs = d(&f).mul(&g).unwrap().add(&f.mul(&d(&g)).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn evaluation_commutes_with_reduction(
            (f, coeffs, m) in spec_strategy().prop_flat_map(|s| (
                poly_strategy(s, 2),
                prop::collection::vec(0..s.modulus(), 8),
                1..=s.ell(),
            ))
        ) {
            // Two polynomials in one matrix commute.
            let s = f.spec();
            let g = Matrix::from_raw(s, 2, coeffs[0..4].to_vec());
            let b1 = g.scale_raw(coeffs[4]).add_unchecked(&Matrix::identity(s, 2).scale_raw(coeffs[5]));
            let b2 = g.mul_unchecked(&g).scale_raw(coeffs[6]).add_unchecked(&g.scale_raw(coeffs[7]));
            let bs = [b1, b2];
            let lhs = f.eval_at_tuple(&bs).unwrap().reduce(m).unwrap();
            let reduced: Vec<Matrix> = bs.iter().map(|b| b.reduce(m).unwrap()).collect();
            let rhs = f.reduce(m).unwrap().eval_at_tuple(&reduced).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
