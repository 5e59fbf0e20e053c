//! Brute-force solution sets used as oracles for the lifting engine.
//!
//! Candidates are enumerated either over all of `M_n(O_l)^m` or over
//! `O_l[A]^m` in centralizer coordinates (for cyclic `A` every commuting
//! solution lies there). Enumeration is split into disjoint index ranges and run
//! in parallel; results are sorted by their row-major representatives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centralizer::{find_cyclic_frame, is_cyclic};
use crate::error::{Error, Result};
use crate::lift::{lift_to_length, partial_kinds, validate_hypotheses, DerivativeProfile, LiftProblem, PartialKind};
use crate::matrix::Matrix;
use crate::polynomial::MultiPoly;
use crate::ring::{Family, RingSpec};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

const CHUNK: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    max_candidates: u64,
}

impl SearchBudget {
    pub fn new(max_candidates: u64) -> Result<Self> {
        if max_candidates == 0 {
            return Err(Error::Parse("budget must be positive".into()));
        }
        Ok(SearchBudget { max_candidates })
    }

    pub fn max_candidates(&self) -> u64 {
        self.max_candidates
    }

    fn admit(&self, needed: u128) -> Result<u64> {
        if needed > self.max_candidates as u128 {
            return Err(Error::BudgetExceeded { needed, budget: self.max_candidates });
        }
        Ok(needed as u64)
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_candidates: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    /// Tuples of polynomials in `A`, in centralizer coordinates.
    InCentralizer,
    /// All of `M_n(O_l)^m`, filtered to commuting tuples.
    FullSpace,
}

/// Number of candidates an enumeration needs: `(p^l)^(n^2 m)` or `(p^l)^(n m)`.
pub fn candidate_count(modulus: u64, n: usize, nvars: usize, ambient: Ambient) -> u128 {
    let per_var = match ambient {
        Ambient::FullSpace => n * n,
        Ambient::InCentralizer => n,
    };
    (modulus as u128).checked_pow((per_var * nvars) as u32).unwrap_or(u128::MAX)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub ambient: Ambient,
    pub candidates: u64,
    pub solutions: Vec<Vec<Matrix>>,
}

impl SolutionSet {
    pub fn contains(&self, tuple: &[Matrix]) -> bool {
        self.solutions.iter().any(|s| s.as_slice() == tuple)
    }
}

/// Scalar arithmetic for the enumeration loop; small series rings use lookup tables.
struct Arith {
    spec: RingSpec,
    q: u64,
    small_int: bool,
    mul_table: Option<Vec<u32>>,
    add_table: Option<Vec<u32>>,
}

const TABLE_LIMIT: u64 = 1 << 10;

impl Arith {
    fn new(spec: RingSpec) -> Self {
        let q = spec.modulus();
        let tables = spec.family() == Family::SeriesTrunc && spec.ell() > 1 && q <= TABLE_LIMIT;
        let table =
            |op: &dyn Fn(u64, u64) -> u64| -> Vec<u32> { (0..q * q).map(|i| op(i / q, i % q) as u32).collect() };
        Arith {
            spec,
            q,
            small_int: spec.family() == Family::IntTrunc && q <= 1 << 32,
            mul_table: tables.then(|| table(&|a, b| spec.mul(a, b))),
            add_table: tables.then(|| table(&|a, b| spec.add(a, b))),
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small_int {
            return a * b % self.q;
        }
        match &self.mul_table {
            Some(t) => t[(a * self.q + b) as usize] as u64,
            None => self.spec.mul(a, b),
        }
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        match &self.add_table {
            Some(t) => t[(a * self.q + b) as usize] as u64,
            None => self.spec.add(a, b),
        }
    }
}

/// Allocation-free evaluation of `F` on raw row-major matrices.
struct Kernel<'a> {
    arith: &'a Arith,
    n: usize,
    terms: &'a [(Vec<u32>, u64)],
    /// `powers[v][k]` holds `B_v^k` for `k <= max_exp[v]`.
    powers: Vec<Vec<Vec<u64>>>,
    mono: Vec<u64>,
    tmp: Vec<u64>,
    acc: Vec<u64>,
}

impl<'a> Kernel<'a> {
    fn new(arith: &'a Arith, n: usize, terms: &'a [(Vec<u32>, u64)], max_exp: &[u32]) -> Self {
        let mut id = vec![0u64; n * n];
        for i in 0..n {
            id[i * n + i] = 1;
        }
        let powers = max_exp.iter().map(|&k| vec![id.clone(); k as usize + 1]).collect();
        Kernel { arith, n, terms, powers, mono: vec![0; n * n], tmp: vec![0; n * n], acc: vec![0; n * n] }
    }

    fn matmul(arith: &Arith, n: usize, x: &[u64], y: &[u64], out: &mut [u64]) {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s = arith.add(s, arith.mul(x[i * n + k], y[k * n + j]));
                }
                out[i * n + j] = s;
            }
        }
    }

    /// `B_i B_j == B_j B_i` for loaded variables.
    fn commute(&mut self, i: usize, j: usize) -> bool {
        let (x, y) = (&self.powers[i][1], &self.powers[j][1]);
        Self::matmul(self.arith, self.n, x, y, &mut self.mono);
        Self::matmul(self.arith, self.n, y, x, &mut self.tmp);
        self.mono == self.tmp
    }

    /// Loads `B_v` and its powers.
    fn load(&mut self, v: usize, b: impl Fn(&mut [u64])) {
        let ps = &mut self.powers[v];
        if ps.len() < 2 {
            return;
        }
        b(&mut ps[1]);
        for k in 2..ps.len() {
            let (lo, hi) = ps.split_at_mut(k);
            Self::matmul(self.arith, self.n, &lo[k - 1], &lo[1], &mut hi[0]);
        }
    }

    fn eval(&mut self) -> &[u64] {
        let n = self.n;
        self.acc.iter_mut().for_each(|x| *x = 0);
        for (e, c) in self.terms {
            let mut first = true;
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pk = &self.powers[v][k as usize];
                if first {
                    self.mono.copy_from_slice(pk);
                    first = false;
                } else {
                    Self::matmul(self.arith, n, &self.mono, pk, &mut self.tmp);
                    std::mem::swap(&mut self.mono, &mut self.tmp);
                }
            }
            if first {
                for i in 0..n {
                    self.acc[i * n + i] = self.arith.add(self.acc[i * n + i], *c);
                }
            } else {
                for (a, &x) in self.acc.iter_mut().zip(&self.mono) {
                    *a = self.arith.add(*a, self.arith.mul(*c, x));
                }
            }
        }
        &self.acc
    }
}

/// All commuting `B` with `F(B) = A` in the chosen ambient set.
fn enumerate(a: &Matrix, f: &MultiPoly, ambient: Ambient, budget: SearchBudget) -> Result<SolutionSet> {
    let spec = a.spec();
    if f.spec() != spec {
        return Err(Error::SpecMismatch);
    }
    let (n, m, q) = (a.n(), f.nvars(), spec.modulus());
    let total = budget.admit(candidate_count(q, n, m, ambient))?;
    let frame = match ambient {
        Ambient::FullSpace => None,
        Ambient::InCentralizer => Some(find_cyclic_frame(a)?),
    };
    let per_var = match ambient {
        Ambient::FullSpace => n * n,
        Ambient::InCentralizer => n,
    };
    let digits = per_var * m;
    let arith = Arith::new(spec);
    let terms: Vec<(Vec<u32>, u64)> = f.terms().map(|(e, c)| (e.to_vec(), c.value())).collect();
    let mut max_exp = vec![0u32; m];
    for (e, _) in &terms {
        for (mx, &k) in max_exp.iter_mut().zip(e) {
            *mx = (*mx).max(k);
        }
    }
    // Variables of degree 0 still need their matrix for the commutation test and the output.
    let max_exp: Vec<u32> = max_exp.iter().map(|&k| k.max(1)).collect();
    let powers_of_a: Vec<&[u64]> =
        frame.as_ref().map_or(Vec::new(), |fr| fr.powers().iter().map(Matrix::values).collect());
    let target = a.values();

    let chunks = total.div_ceil(CHUNK);
    let mut solutions: Vec<Vec<Matrix>> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut kernel = Kernel::new(&arith, n, &terms, &max_exp);
            // Odometer over base-q digits, most significant first.
            let mut d = vec![0u64; digits];
            let mut x = start;
            for slot in d.iter_mut().rev() {
                *slot = x % q;
                x /= q;
            }
            let mut found = Vec::new();
            for _ in start..end {
                for v in 0..m {
                    let c = &d[v * per_var..(v + 1) * per_var];
                    let ar = &arith;
                    kernel.load(v, |out| {
                        if powers_of_a.is_empty() {
                            out.copy_from_slice(c);
                        } else {
                            out.iter_mut().for_each(|x| *x = 0);
                            for (&cj, pj) in c.iter().zip(&powers_of_a) {
                                for (o, &y) in out.iter_mut().zip(pj.iter()) {
                                    *o = ar.add(*o, ar.mul(cj, y));
                                }
                            }
                        }
                    });
                }
                let commuting = frame.is_some() || (0..m).all(|i| (i + 1..m).all(|j| kernel.commute(i, j)));
                if commuting && kernel.eval() == target {
                    found.push((0..m).map(|v| Matrix::from_raw(spec, n, kernel.powers[v][1].clone())).collect());
                }
                for slot in d.iter_mut().rev() {
                    *slot += 1;
                    if *slot < q {
                        break;
                    }
                    *slot = 0;
                }
            }
            found
        })
        .collect();
    solutions.sort_by(|x, y| {
        let kx: Vec<&[u64]> = x.iter().map(Matrix::values).collect();
        let ky: Vec<&[u64]> = y.iter().map(Matrix::values).collect();
        kx.cmp(&ky)
    });
    Ok(SolutionSet { ambient, candidates: total, solutions })
}

/// A residue-level solution with its derivative classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSolution {
    pub tuple: Vec<Matrix>,
    pub partials: Vec<PartialKind>,
    /// Set when `A` is cyclic and the partials are all invertible or zero with at least one invertible.
    pub profile: Option<DerivativeProfile>,
}

impl ResidueSolution {
    pub fn liftable(&self) -> bool {
        self.profile.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueReport {
    pub ambient: Ambient,
    pub candidates: u64,
    pub cyclic: bool,
    pub solutions: Vec<ResidueSolution>,
}

/// All residue-level solutions `f(B) = A` with `A`, `f` over `F_p`.
pub fn residue_solutions(
    abar: &Matrix,
    fbar: &MultiPoly,
    ambient: Ambient,
    budget: SearchBudget,
) -> Result<ResidueReport> {
    if abar.spec().ell() != 1 {
        return Err(Error::InvalidSpec(format!("residue search needs the residue field, got {}", abar.spec())));
    }
    let cyclic = is_cyclic(abar);
    if ambient == Ambient::InCentralizer && !cyclic {
        return Err(Error::NotCyclic);
    }
    let set = enumerate(abar, fbar, ambient, budget)?;
    let solutions = set
        .solutions
        .into_iter()
        .map(|tuple| {
            let partials = partial_kinds(fbar, &tuple)?;
            let profile = if cyclic { DerivativeProfile::from_kinds(&partials).ok() } else { None };
            Ok(ResidueSolution { tuple, partials, profile })
        })
        .collect::<Result<_>>()?;
    Ok(ResidueReport { ambient, candidates: set.candidates, cyclic, solutions })
}

/// The complete commuting solution set of `F(B) = A` over `O_l`.
pub fn exhaustive_solutions_over_ring(
    a: &Matrix,
    f: &MultiPoly,
    ambient: Ambient,
    budget: SearchBudget,
) -> Result<SolutionSet> {
    if ambient == Ambient::InCentralizer && !is_cyclic(a) {
        return Err(Error::NotCyclic);
    }
    enumerate(a, f, ambient, budget)
}

/// Picks the cheapest ambient set that is complete and fits the budget: full space if it fits,
/// otherwise centralizer coordinates (complete for cyclic `A`).
pub fn choose_ambient(a: &Matrix, nvars: usize, budget: SearchBudget) -> Result<Ambient> {
    let q = a.spec().modulus();
    let full = candidate_count(q, a.n(), nvars, Ambient::FullSpace);
    if full <= budget.max_candidates() as u128 {
        return Ok(Ambient::FullSpace);
    }
    let cent = candidate_count(q, a.n(), nvars, Ambient::InCentralizer);
    if cent <= budget.max_candidates() as u128 && is_cyclic(a) {
        return Ok(Ambient::InCentralizer);
    }
    Err(Error::BudgetExceeded { needed: cent, budget: budget.max_candidates() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub attempted: bool,
    /// Why the check was not attempted (name of the failed hypothesis).
    pub reason: Option<String>,
    pub ambient: Option<Ambient>,
    pub candidates: u64,
    pub solution_count: usize,
    pub member: bool,
}

/// Lifts the problem and confirms the result against the exhaustive solution set at length `L`.
pub fn cross_check_lift(problem: &LiftProblem, budget: SearchBudget) -> Result<CrossCheckReport> {
    if let Err(e) = validate_hypotheses(problem) {
        return Ok(CrossCheckReport {
            attempted: false,
            reason: Some(e.name().to_string()),
            ambient: None,
            candidates: 0,
            solution_count: 0,
            member: false,
        });
    }
    let ambient = choose_ambient(&problem.a, problem.f.nvars(), budget)?;
    let transcript = lift_to_length(problem)?;
    let lifted = transcript.final_solution();
    let set = exhaustive_solutions_over_ring(&problem.a, &problem.f, ambient, budget)?;
    if !set.contains(lifted) {
        return Err(Error::MismatchDetected("lifted tuple missing from the exhaustive solution set".into()));
    }
    let reduced: Vec<Matrix> = lifted.iter().map(|b| b.reduce(1)).collect::<Result<_>>()?;
    if reduced != problem.seed {
        return Err(Error::MismatchDetected("lifted tuple does not reduce to the seed".into()));
    }
    Ok(CrossCheckReport {
        attempted: true,
        reason: None,
        ambient: Some(ambient),
        candidates: set.candidates,
        solution_count: set.solutions.len(),
        member: true,
    })
}
