//! JSON interchange formats.
//!
//! Elements are written as their canonical integer for `Z/p^l` and as the array of
//! `l` residues (lowest degree first) for `F_p[u]/(u^l)`. Matrices, polynomials and
//! coordinates do not repeat the ring; it is carried by the enclosing document.

use serde::{Deserialize, Serialize};

use crate::centralizer::CentralizerCoords;
use crate::error::{Error, Result};
use crate::lift::{DerivativeProfile, LiftProblem, LiftTranscript, PartialKind};
use crate::matrix::Matrix;
use crate::polynomial::MultiPoly;
use crate::ring::{Family, RingElement, RingSpec};
use crate::search::{Ambient, ResidueReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Int(u64),
    Residues(Vec<u64>),
}

impl ElementJson {
    pub fn from_element(e: &RingElement) -> Self {
        match e.spec().family() {
            Family::IntTrunc => ElementJson::Int(e.value()),
            Family::SeriesTrunc => ElementJson::Residues(e.digits()),
        }
    }

    pub fn to_element(&self, spec: RingSpec) -> Result<RingElement> {
        match (spec.family(), self) {
            (Family::IntTrunc, ElementJson::Int(v)) => RingElement::new(spec, *v),
            (Family::SeriesTrunc, ElementJson::Residues(d)) => RingElement::from_digits(spec, d),
            (Family::IntTrunc, ElementJson::Residues(_)) => {
                Err(Error::Parse(format!("expected an integer for {spec}")))
            }
            (Family::SeriesTrunc, ElementJson::Int(_)) => {
                Err(Error::Parse(format!("expected a residue array for {spec}")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<ElementJson>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> Self {
        let entries =
            (0..m.n()).map(|i| (0..m.n()).map(|j| ElementJson::from_element(&m.get(i, j))).collect()).collect();
        MatrixJson { n: m.n(), entries }
    }

    pub fn to_matrix(&self, spec: RingSpec) -> Result<Matrix> {
        if self.n == 0 || self.entries.len() != self.n || self.entries.iter().any(|r| r.len() != self.n) {
            return Err(Error::Parse(format!("entries do not form a {0}x{0} matrix", self.n)));
        }
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|e| e.to_element(spec).map(|x| x.value())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_values(spec, &rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: ElementJson,
}

/// Terms in descending graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn from_poly(f: &MultiPoly) -> Self {
        let terms =
            f.terms().map(|(e, c)| TermJson { exps: e.to_vec(), coeff: ElementJson::from_element(&c) }).collect();
        PolyJson { nvars: f.nvars(), terms }
    }

    pub fn to_poly(&self, spec: RingSpec) -> Result<MultiPoly> {
        if self.nvars == 0 {
            return Err(Error::Parse("nvars must be at least 1".into()));
        }
        let terms =
            self.terms.iter().map(|t| Ok((t.exps.clone(), t.coeff.to_element(spec)?))).collect::<Result<Vec<_>>>()?;
        MultiPoly::from_terms(spec, self.nvars, terms)
    }
}

pub fn coords_to_json(c: &CentralizerCoords) -> Vec<ElementJson> {
    c.coeffs().iter().map(ElementJson::from_element).collect()
}

pub fn coords_from_json(spec: RingSpec, c: &[ElementJson]) -> Result<CentralizerCoords> {
    let coeffs = c.iter().map(|e| e.to_element(spec)).collect::<Result<Vec<_>>>()?;
    CentralizerCoords::new(&coeffs)
}

/// `{"ring", "A", "F", "seed"}`; the seed lives over the residue field of `ring`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftProblemJson {
    pub ring: RingSpec,
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "F")]
    pub f: PolyJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Vec<MatrixJson>>,
}

impl LiftProblemJson {
    pub fn from_problem(p: &LiftProblem) -> Self {
        LiftProblemJson {
            ring: p.spec(),
            a: MatrixJson::from_matrix(&p.a),
            f: PolyJson::from_poly(&p.f),
            seed: Some(p.seed.iter().map(MatrixJson::from_matrix).collect()),
        }
    }

    pub fn matrix_a(&self) -> Result<Matrix> {
        self.a.to_matrix(self.ring)
    }

    pub fn poly_f(&self) -> Result<MultiPoly> {
        self.f.to_poly(self.ring)
    }

    pub fn seed_matrices(&self) -> Result<Option<Vec<Matrix>>> {
        let k = self.ring.residue_field();
        self.seed.as_ref().map(|s| s.iter().map(|m| m.to_matrix(k)).collect()).transpose()
    }

    /// The problem at the ring's full length; requires a seed.
    pub fn to_problem(&self) -> Result<LiftProblem> {
        let seed = self.seed_matrices()?.ok_or_else(|| Error::Parse("problem has no seed".into()))?;
        Ok(LiftProblem::new(self.matrix_a()?, self.poly_f()?, seed))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    pub level: u32,
    pub coords: Vec<Vec<ElementJson>>,
    pub matrices: Vec<MatrixJson>,
    pub partial_dets: Vec<ElementJson>,
    pub residual_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptJson {
    pub ring: RingSpec,
    pub nvars: usize,
    pub profile: DerivativeProfile,
    pub levels: Vec<LevelJson>,
}

impl TranscriptJson {
    pub fn from_transcript(t: &LiftTranscript) -> Self {
        let levels = t
            .levels
            .iter()
            .map(|l| LevelJson {
                level: l.level,
                coords: l.coords.iter().map(coords_to_json).collect(),
                matrices: l.matrices.iter().map(MatrixJson::from_matrix).collect(),
                partial_dets: l.partial_dets.iter().map(ElementJson::from_element).collect(),
                residual_zero: l.residual_zero,
            })
            .collect();
        let nvars = t.levels.first().map_or(0, |l| l.matrices.len());
        TranscriptJson { ring: t.spec, nvars, profile: t.profile.clone(), levels }
    }

    /// `(level, matrices over O_level)` for each recorded level.
    pub fn level_matrices(&self) -> Result<Vec<(u32, Vec<Matrix>)>> {
        self.levels
            .iter()
            .map(|l| {
                let spec = self.ring.with_ell(l.level)?;
                let ms = l.matrices.iter().map(|m| m.to_matrix(spec)).collect::<Result<Vec<_>>>()?;
                Ok((l.level, ms))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSolutionJson {
    pub tuple: Vec<MatrixJson>,
    pub partials: Vec<PartialKind>,
    pub liftable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReportJson {
    pub mode: Ambient,
    pub candidates: u64,
    pub cyclic: bool,
    pub solutions: Vec<ResidueSolutionJson>,
}

impl ResidueReportJson {
    pub fn from_report(r: &ResidueReport) -> Self {
        let solutions = r
            .solutions
            .iter()
            .map(|s| ResidueSolutionJson {
                tuple: s.tuple.iter().map(MatrixJson::from_matrix).collect(),
                partials: s.partials.clone(),
                liftable: s.liftable(),
                r: s.profile.as_ref().map(|p| p.r),
            })
            .collect();
        ResidueReportJson { mode: r.ambient, candidates: r.candidates, cyclic: r.cyclic, solutions }
    }
}
