//! Hensel lifting of solutions of `F(B_1, ..., B_m) = A` for cyclic `A`.
//!
//! All work happens in centralizer coordinates: a level-`m` solution is a tuple of
//! coordinate vectors over `O_m`, the canonical lift of those vectors gives a
//! commuting tuple `B` over `O_{m+1}`, the defect `F(B) - A` is `pi^m C` with `C` in
//! `O_{m+1}[A]`, and the correction `B_i + pi^m D_i` with
//! `sum_i dF/dx_i(B) D_i = -C` kills the defect because every quadratic term in the
//! corrections is divisible by `pi^(2m)`.
//!
//! The corrections follow a weighting of the variables with invertible partials:
//! with `r` such variables and `p` not dividing `r`, each gets weight `r`
//! (`D_i = -C (r dF/dx_i)^-1`). When `p | r` the first `r - 1` get weight `2(r - 1)`
//! and the last gets weight `2`. Variables whose partial vanishes at the seed get
//! `D_i = 0`.

use serde::{Deserialize, Serialize};

use crate::centralizer::{find_cyclic_frame, is_cyclic, CentralizerCoords, CyclicFrame};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::polynomial::{first_noncommuting_pair, MultiPoly};
use crate::ring::{RingElement, RingSpec};

/// A lifting problem: cyclic `A` and `F` over `O_L`, and a commuting residue solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftProblem {
    pub a: Matrix,
    pub f: MultiPoly,
    pub seed: Vec<Matrix>,
    /// Require a univariate `F` to be monic.
    pub strict_monic: bool,
}

impl LiftProblem {
    pub fn new(a: Matrix, f: MultiPoly, seed: Vec<Matrix>) -> Self {
        LiftProblem { a, f, seed, strict_monic: false }
    }

    pub fn strict(mut self) -> Self {
        self.strict_monic = true;
        self
    }

    /// Ring of the problem; its length is the target length `L`.
    pub fn spec(&self) -> RingSpec {
        self.a.spec()
    }

    pub fn target_length(&self) -> u32 {
        self.spec().ell()
    }

    /// The same problem with `A` and `F` reduced to a shorter target length.
    pub fn truncate(&self, target: u32) -> Result<LiftProblem> {
        Ok(LiftProblem {
            a: self.a.reduce(target)?,
            f: self.f.reduce(target)?,
            seed: self.seed.clone(),
            strict_monic: self.strict_monic,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartialKind {
    Unit,
    Zero,
    Neither,
}

/// Classifies a residue-level matrix as invertible, zero, or neither.
pub fn classify_partial(m: &Matrix) -> PartialKind {
    if m.is_zero() {
        PartialKind::Zero
    } else if m.is_invertible() {
        PartialKind::Unit
    } else {
        PartialKind::Neither
    }
}

/// Which partial derivatives are invertible and which vanish at the seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeProfile {
    pub unit_indices: Vec<usize>,
    pub zero_indices: Vec<usize>,
    pub r: usize,
    /// Unit indices first, then zero indices.
    pub permutation: Vec<usize>,
}

impl DerivativeProfile {
    pub fn from_kinds(kinds: &[PartialKind]) -> Result<Self> {
        if let Some(index) = kinds.iter().position(|&k| k == PartialKind::Neither) {
            return Err(Error::PartialNeitherUnitNorZero { index });
        }
        let unit_indices: Vec<usize> = (0..kinds.len()).filter(|&i| kinds[i] == PartialKind::Unit).collect();
        let zero_indices: Vec<usize> = (0..kinds.len()).filter(|&i| kinds[i] == PartialKind::Zero).collect();
        if unit_indices.is_empty() {
            return Err(Error::NoInvertiblePartial);
        }
        let permutation = unit_indices.iter().chain(&zero_indices).copied().collect();
        Ok(DerivativeProfile { r: unit_indices.len(), unit_indices, zero_indices, permutation })
    }

    /// True when `p | r`, which selects the second weighting.
    pub fn needs_split_weights(&self, spec: RingSpec) -> bool {
        (self.r as u64).is_multiple_of(spec.p())
    }

    /// Correction weights `w_i` for the unit variables, in permuted (unit) order.
    pub fn weights(&self, spec: RingSpec) -> Vec<RingElement> {
        correction_weights(spec, self.r)
    }
}

/// Weights `w_1, ..., w_r` with `sum_i w_i^-1 = 1` in `O_l`.
///
/// `p` not dividing `r`: all equal to `r`. `p | r`: `2(r-1)` for the first `r-1`, then `2`.
pub fn correction_weights(spec: RingSpec, r: usize) -> Vec<RingElement> {
    assert!(r >= 1);
    if !(r as u64).is_multiple_of(spec.p()) {
        vec![RingElement::from_int(spec, r as i64); r]
    } else {
        let mut w = vec![RingElement::from_int(spec, 2 * (r as i64 - 1)); r - 1];
        w.push(RingElement::from_int(spec, 2));
        w
    }
}

/// `sum_i w_i^-1` for the weights of [`correction_weights`]; equals one in every valid ring.
pub fn weight_sum(spec: RingSpec, r: usize) -> Result<RingElement> {
    correction_weights(spec, r).iter().try_fold(RingElement::zero(spec), |acc, w| acc.add(&w.invert_unit()?))
}

/// Checks the lifting hypotheses and classifies the partial derivatives.
pub fn validate_hypotheses(problem: &LiftProblem) -> Result<DerivativeProfile> {
    let spec = problem.spec();
    let a = &problem.a;
    let f = &problem.f;
    if f.spec() != spec {
        return Err(Error::SpecMismatch);
    }
    if !is_cyclic(a) {
        return Err(Error::NotCyclic);
    }
    let k = spec.residue_field();
    if problem.seed.len() != f.nvars() {
        return Err(Error::ShapeMismatch(format!("{} seed matrices for {} variables", problem.seed.len(), f.nvars())));
    }
    for b in &problem.seed {
        if b.spec() != k {
            return Err(Error::SpecMismatch);
        }
        if b.n() != a.n() {
            return Err(Error::ShapeMismatch("seed matrix size differs from A".into()));
        }
    }
    if let Some((i, j)) = first_noncommuting_pair(&problem.seed) {
        return Err(Error::SeedNotCommuting(i, j));
    }
    let fbar = f.reduce(1)?;
    let abar = a.reduce(1)?;
    if fbar.eval_commuting(&problem.seed) != abar {
        return Err(Error::SeedNotASolution);
    }
    if problem.strict_monic && f.nvars() == 1 && !f.is_monic_univariate() {
        return Err(Error::NotMonic);
    }
    let kinds = partial_kinds(&fbar, &problem.seed)?;
    DerivativeProfile::from_kinds(&kinds)
}

/// Classification of each `df/dx_i` at a commuting residue-level tuple.
pub fn partial_kinds(fbar: &MultiPoly, tuple: &[Matrix]) -> Result<Vec<PartialKind>> {
    (0..fbar.nvars()).map(|i| Ok(classify_partial(&fbar.partial_derivative(i)?.eval_commuting(tuple)))).collect()
}

/// One verified level of a lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSolution {
    pub level: u32,
    pub coords: Vec<CentralizerCoords>,
    pub matrices: Vec<Matrix>,
    /// `det(dF/dx_i(B))` for each unit variable, in original variable order.
    pub partial_dets: Vec<RingElement>,
    /// `F(B) - A` vanishes exactly at this level.
    pub residual_zero: bool,
}

/// Verified tower `B_1, ..., B_L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftTranscript {
    pub spec: RingSpec,
    pub profile: DerivativeProfile,
    pub levels: Vec<LevelSolution>,
}

impl LiftTranscript {
    pub fn final_solution(&self) -> &[Matrix] {
        &self.levels.last().expect("a transcript has at least the seed level").matrices
    }
}

struct LevelContext {
    frame: CyclicFrame,
    a: Matrix,
    f: MultiPoly,
    partials: Vec<MultiPoly>,
}

fn level_context(frame_top: &CyclicFrame, problem: &LiftProblem, level: u32) -> Result<LevelContext> {
    let f = problem.f.reduce(level)?;
    let partials = (0..f.nvars()).map(|i| f.partial_derivative(i)).collect::<Result<_>>()?;
    Ok(LevelContext { frame: frame_top.reduce(level)?, a: problem.a.reduce(level)?, f, partials })
}

fn partial_dets(ctx: &LevelContext, profile: &DerivativeProfile, bs: &[Matrix]) -> Vec<RingElement> {
    profile.unit_indices.iter().map(|&i| ctx.partials[i].eval_commuting(bs).det()).collect()
}

/// Raises a level-`m` solution (given in centralizer coordinates over `O_m`) to level `m + 1`.
///
/// `a_next` and `frame_next` live over `O_{m+1}`; `f` may live over any `O_l` with `l >= m + 1`.
pub fn hensel_step(
    a_next: &Matrix,
    frame_next: &CyclicFrame,
    f: &MultiPoly,
    coords_m: &[CentralizerCoords],
    profile: &DerivativeProfile,
    m: u32,
) -> Result<Vec<CentralizerCoords>> {
    let spec = a_next.spec();
    if spec.ell() != m + 1 || frame_next.spec() != spec || frame_next.matrix() != a_next {
        return Err(Error::SpecMismatch);
    }
    let f = if f.spec().ell() == m + 1 { f.clone() } else { f.reduce(m + 1)? };
    if coords_m.len() != f.nvars() {
        return Err(Error::ShapeMismatch("one coordinate vector per variable".into()));
    }

    // Canonical lifts; all lie in O_{m+1}[A] and so commute.
    let lifted: Vec<CentralizerCoords> = coords_m.iter().map(|c| c.lift_to(spec)).collect::<Result<_>>()?;
    let b_check: Vec<Matrix> = lifted.iter().map(|c| frame_next.coords_to_matrix(c)).collect::<Result<_>>()?;

    // Defect F(B) - A = pi^m C, with C extracted in centralizer coordinates.
    let defect = f.eval_commuting(&b_check).sub(a_next)?;
    let defect_coords = frame_next.express_in_powers(&defect)?;
    if defect_coords.valuation() < m {
        return Err(Error::StepVerificationFailed { level: m + 1 });
    }
    let c = frame_next.coords_to_matrix(&defect_coords.divide_by_pi_power(m)?)?;

    let pi_m = RingElement::pi(spec).value().pow(m) % spec.modulus();
    let weights = profile.weights(spec);
    let mut corrected = b_check.clone();
    for (&i, w) in profile.unit_indices.iter().zip(&weights) {
        let partial = f.partial_derivative(i)?.eval_commuting(&b_check);
        let divisor = partial.scalar_mul(w)?;
        let inv = divisor.inverse().map_err(|_| Error::NonUnitCorrectionDivisor { index: i, level: m + 1 })?;
        let d = c.mul_unchecked(&inv).neg();
        corrected[i].add_scaled_assign(pi_m, &d);
    }

    if f.eval_commuting(&corrected) != *a_next {
        return Err(Error::StepVerificationFailed { level: m + 1 });
    }
    let out: Vec<CentralizerCoords> =
        corrected.iter().map(|b| frame_next.express_in_powers(b)).collect::<Result<_>>()?;
    for (new, old) in out.iter().zip(coords_m) {
        if &new.reduce(m)? != old {
            return Err(Error::StepVerificationFailed { level: m + 1 });
        }
    }
    Ok(out)
}

/// Lazily emits the verified solutions at levels `1, 2, ..., bound`.
pub struct LevelStream<'a> {
    problem: &'a LiftProblem,
    profile: DerivativeProfile,
    frame_top: CyclicFrame,
    bound: u32,
    current: Option<LevelSolution>,
    failed: bool,
}

impl<'a> LevelStream<'a> {
    pub fn profile(&self) -> &DerivativeProfile {
        &self.profile
    }

    fn first_level(&self) -> Result<LevelSolution> {
        let ctx = level_context(&self.frame_top, self.problem, 1)?;
        let coords = self.problem.seed.iter().map(|b| ctx.frame.express_in_powers(b)).collect::<Result<Vec<_>>>()?;
        let partial_dets = partial_dets(&ctx, &self.profile, &self.problem.seed);
        let residual_zero = ctx.f.eval_commuting(&self.problem.seed) == ctx.a;
        Ok(LevelSolution { level: 1, coords, matrices: self.problem.seed.clone(), partial_dets, residual_zero })
    }

    fn next_level(&self, prev: &LevelSolution) -> Result<LevelSolution> {
        let level = prev.level + 1;
        let ctx = level_context(&self.frame_top, self.problem, level)?;
        let coords = hensel_step(&ctx.a, &ctx.frame, &ctx.f, &prev.coords, &self.profile, prev.level)?;
        let matrices: Vec<Matrix> = coords.iter().map(|c| ctx.frame.coords_to_matrix(c)).collect::<Result<_>>()?;
        let partial_dets = partial_dets(&ctx, &self.profile, &matrices);
        let residual_zero = ctx.f.eval_commuting(&matrices) == ctx.a;
        Ok(LevelSolution { level, coords, matrices, partial_dets, residual_zero })
    }
}

impl Iterator for LevelStream<'_> {
    type Item = Result<LevelSolution>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let next_level = self.current.as_ref().map_or(1, |c| c.level + 1);
        if next_level > self.bound {
            return None;
        }
        let result = match &self.current {
            None => self.first_level(),
            Some(prev) => self.next_level(prev),
        };
        match result {
            Ok(sol) => {
                self.current = Some(sol.clone());
                Some(Ok(sol))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// Validates the problem and returns a stream of levels up to `bound` (at most `L`).
pub fn stream_levels(problem: &LiftProblem, bound: u32) -> Result<LevelStream<'_>> {
    let profile = validate_hypotheses(problem)?;
    if bound > problem.target_length() {
        return Err(Error::BadTarget { from: problem.target_length(), to: bound });
    }
    let frame_top = find_cyclic_frame(&problem.a)?;
    Ok(LevelStream { problem, profile, frame_top, bound, current: None, failed: false })
}

/// Lifts the seed to a verified solution over `O_L`, recording every level.
pub fn lift_to_length(problem: &LiftProblem) -> Result<LiftTranscript> {
    let stream = stream_levels(problem, problem.target_length())?;
    let profile = stream.profile().clone();
    let levels = stream.collect::<Result<Vec<_>>>()?;
    Ok(LiftTranscript { spec: problem.spec(), profile, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, l: u32) -> RingSpec {
        RingSpec::int(p, l).unwrap()
    }

    fn padic5(l: u32) -> LiftProblem {
        let s = z(5, l);
        let k = z(5, 1);
        let f = MultiPoly::from_int_terms(s, 2, &[(&[1, 1], 1), (&[0, 2], 1)]).unwrap();
        LiftProblem::new(Matrix::diag(s, &[0, 9]), f, vec![Matrix::diag(k, &[4, 0]), Matrix::diag(k, &[1, 2])])
    }

    #[test]
    fn weights_sum_to_one() {
        for p in [3u64, 5, 7] {
            for l in 1..5 {
                for spec in [RingSpec::int(p, l).unwrap(), RingSpec::series(p, l).unwrap()] {
                    for r in 1..=10 {
                        assert_eq!(weight_sum(spec, r).unwrap(), RingElement::one(spec), "{spec} r={r}");
                    }
                }
            }
        }
        let s = z(3, 2);
        assert_eq!(correction_weights(s, 3).iter().map(|w| w.value()).collect::<Vec<_>>(), vec![4, 4, 2]);
        assert_eq!(correction_weights(s, 2).iter().map(|w| w.value()).collect::<Vec<_>>(), vec![2, 2]);
    }

    #[test]
    fn profile_of_padic_example() {
        let profile = validate_hypotheses(&padic5(3)).unwrap();
        assert_eq!(profile.r, 2);
        assert_eq!(profile.unit_indices, vec![0, 1]);
        assert!(profile.zero_indices.is_empty());
    }

    #[test]
    fn counterexample_is_not_cyclic() {
        let s = z(3, 2);
        let seed = Matrix::from_ints(z(3, 1), &[&[0, 1], &[2, 0]]).unwrap();
        let p = LiftProblem::new(Matrix::diag(s, &[5, 2]), MultiPoly::univariate(s, &[0, 0, 1]), vec![seed]);
        assert_eq!(validate_hypotheses(&p), Err(Error::NotCyclic));
    }

    #[test]
    fn identity_polynomial_profile() {
        let s = z(7, 3);
        let a = Matrix::from_ints(s, &[&[1, 2], &[3, 4]]).unwrap();
        let p = LiftProblem::new(a.clone(), MultiPoly::var(s, 1, 0).unwrap(), vec![a.reduce(1).unwrap()]);
        assert_eq!(validate_hypotheses(&p).unwrap().r, 1);
        let t = lift_to_length(&p).unwrap();
        for lvl in &t.levels {
            assert_eq!(lvl.matrices[0], a.reduce(lvl.level).unwrap());
        }
    }

    #[test]
    fn hypothesis_failures() {
        let mut p = padic5(2);
        p.seed[0] = Matrix::diag(z(5, 1), &[3, 0]);
        assert_eq!(validate_hypotheses(&p), Err(Error::SeedNotASolution));

        let mut p = padic5(2);
        p.seed[0] = Matrix::from_ints(z(5, 1), &[&[4, 1], &[0, 0]]).unwrap();
        assert_eq!(validate_hypotheses(&p), Err(Error::SeedNotCommuting(0, 1)));

        // 2t^2 = diag(2, 8) has the residue solution diag(1, 2) but is not monic.
        let s = z(5, 2);
        let a = Matrix::diag(s, &[2, 8]);
        let f = MultiPoly::univariate(s, &[0, 0, 2]);
        let seed = vec![Matrix::diag(z(5, 1), &[1, 2])];
        let p = LiftProblem::new(a, f, seed);
        assert!(validate_hypotheses(&p).is_ok());
        let p = p.strict();
        assert_eq!(validate_hypotheses(&p), Err(Error::NotMonic));
    }

    #[test]
    fn neither_unit_nor_zero_partial_is_rejected() {
        // f = x*y over F_5 with A = diag(1, 0): seed x = diag(1, 1), y = diag(1, 0).
        // df/dx = y is singular and nonzero.
        let s = z(5, 2);
        let f = MultiPoly::from_int_terms(s, 2, &[(&[1, 1], 1)]).unwrap();
        let k = z(5, 1);
        let p = LiftProblem::new(Matrix::diag(s, &[1, 0]), f, vec![Matrix::diag(k, &[1, 1]), Matrix::diag(k, &[1, 0])]);
        assert_eq!(validate_hypotheses(&p), Err(Error::PartialNeitherUnitNorZero { index: 0 }));
    }

    #[test]
    fn square_root_step_matches_brute_force() {
        // Brute force over diagonal matrices mod 25: the only square roots of diag(6, 14)
        // reducing to diag(1, 2) are diag(16, 17).
        let roots: Vec<(u64, u64)> = (0..25u64)
            .flat_map(|x| (0..25u64).map(move |y| (x, y)))
            .filter(|&(x, y)| x * x % 25 == 6 && y * y % 25 == 14 && x % 5 == 1 && y % 5 == 2)
            .collect();
        assert_eq!(roots, vec![(16, 17)]);

        let s = z(5, 2);
        let a = Matrix::diag(s, &[6, 14]);
        let f = MultiPoly::univariate(s, &[0, 0, 1]);
        let problem = LiftProblem::new(a.clone(), f.clone(), vec![Matrix::diag(z(5, 1), &[1, 2])]);
        let profile = validate_hypotheses(&problem).unwrap();
        let frame = find_cyclic_frame(&a).unwrap();
        let frame1 = frame.reduce(1).unwrap();
        let c1 = frame1.express_in_powers(&problem.seed[0]).unwrap();
        let c2 = hensel_step(&a, &frame, &f, &[c1], &profile, 1).unwrap();
        assert_eq!(frame.coords_to_matrix(&c2[0]).unwrap(), Matrix::diag(s, &[16, 17]));
    }

    #[test]
    fn padic_example_lifts_with_zero_residual() {
        let problem = padic5(6);
        let t = lift_to_length(&problem).unwrap();
        assert_eq!(t.levels.len(), 6);
        for (j, lvl) in t.levels.iter().enumerate() {
            let level = j as u32 + 1;
            assert_eq!(lvl.level, level);
            let f = problem.f.reduce(level).unwrap();
            assert_eq!(f.eval_at_tuple(&lvl.matrices).unwrap(), problem.a.reduce(level).unwrap());
            assert!(lvl.partial_dets.iter().all(RingElement::is_unit));
            if level > 1 {
                let prev = &t.levels[j - 1];
                for (b, b_prev) in lvl.matrices.iter().zip(&prev.matrices) {
                    assert_eq!(&b.reduce(level - 1).unwrap(), b_prev);
                }
            }
        }
        assert_eq!(lift_to_length(&problem).unwrap(), t);
    }

    #[test]
    fn length_one_is_the_seed() {
        let problem = padic5(1);
        let t = lift_to_length(&problem).unwrap();
        assert_eq!(t.levels.len(), 1);
        assert_eq!(t.levels[0].matrices, problem.seed);
    }

    #[test]
    fn stream_rejects_bound_past_target() {
        let problem = padic5(3);
        assert!(matches!(stream_levels(&problem, 4), Err(Error::BadTarget { .. })));
        let mut s = stream_levels(&problem, 2).unwrap();
        assert_eq!(s.next().unwrap().unwrap().matrices, problem.seed);
        assert_eq!(s.next().unwrap().unwrap().level, 2);
        assert!(s.next().is_none());
    }

    #[test]
    fn zero_partial_variables_are_left_alone() {
        // f = x^2 + y^3 over p = 3: df/dy = 3y^2 vanishes mod 3, so only x is corrected.
        let s = z(3, 4);
        let k = z(3, 1);
        let f = MultiPoly::from_int_terms(s, 2, &[(&[2, 0], 1), (&[0, 3], 1)]).unwrap();
        // Seed x = diag(1, 2), y = diag(0, 1) solves x^2 + y^3 = diag(1, 2) mod 3.
        let a = Matrix::diag(s, &[4, 11]);
        let seed = vec![Matrix::diag(k, &[1, 2]), Matrix::diag(k, &[0, 1])];
        let problem = LiftProblem::new(a.clone(), f.clone(), seed);
        let profile = validate_hypotheses(&problem).unwrap();
        assert_eq!(profile.unit_indices, vec![0]);
        assert_eq!(profile.zero_indices, vec![1]);
        let t = lift_to_length(&problem).unwrap();
        let seed_coords = t.levels[0].coords[1].values().to_vec();
        for lvl in &t.levels {
            assert_eq!(lvl.coords[1].values(), seed_coords.as_slice());
        }
        assert_eq!(f.eval_at_tuple(t.final_solution()).unwrap(), a);
    }

    #[test]
    fn series_family_lifts() {
        let s = RingSpec::series(5, 4).unwrap();
        let k = s.residue_field();
        // A = diag(1 + u, 4 + 2u^2), F = t^2, seed diag(1, 2).
        let a_entries =
            [RingElement::from_digits(s, &[1, 1, 0, 0]).unwrap(), RingElement::from_digits(s, &[4, 0, 2, 0]).unwrap()];
        let mut a = Matrix::zeros(s, 2);
        a.set(0, 0, a_entries[0]).unwrap();
        a.set(1, 1, a_entries[1]).unwrap();
        let f = MultiPoly::univariate(s, &[0, 0, 1]);
        let problem = LiftProblem::new(a.clone(), f.clone(), vec![Matrix::diag(k, &[1, 2])]).strict();
        let t = lift_to_length(&problem).unwrap();
        let b = &t.final_solution()[0];
        assert_eq!(b.mul(b).unwrap(), a);
    }
}
