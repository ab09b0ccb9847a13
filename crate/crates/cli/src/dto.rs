//! JSON interchange types. Field names are part of the external contract;
//! conversions validate through the core constructors so malformed files
//! are rejected before any suite runs.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use octospec_core::cd::{BasisTable, CdNumber};
use octospec_core::factor::PropertyPTriple;
use octospec_core::linalg::{RealMat, RealPicture};
use octospec_core::spectral::{GradedPvm, PvmAtom};
use octospec_core::stone::{SemigroupAtom, SemigroupSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CdNumberDto {
    pub v: u8,
    pub c: Vec<f64>,
}

impl CdNumberDto {
    pub fn from_core(z: &CdNumber) -> Self {
        CdNumberDto { v: z.level(), c: z.coeffs().to_vec() }
    }

    pub fn into_core(self) -> Result<CdNumber> {
        CdNumber::new(self.v, self.c).context("invalid scalar")
    }
}

#[derive(Serialize, Deserialize)]
pub struct TableEntryDto {
    pub s: i8,
    pub l: usize,
}

#[derive(Serialize, Deserialize)]
pub struct TableDto {
    pub v: u8,
    pub table: Vec<Vec<TableEntryDto>>,
}

impl TableDto {
    pub fn from_core(tb: &BasisTable) -> Self {
        let d = tb.dim();
        let table = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        let (s, l) = tb.entry(j, k);
                        TableEntryDto { s, l }
                    })
                    .collect()
            })
            .collect();
        TableDto { v: tb.level(), table }
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub struct RealPictureDto {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl RealPictureDto {
    pub fn from_core(m: &RealPicture) -> Self {
        RealPictureDto { n: m.rows(), rows: matrix_rows(m) }
    }

    pub fn into_core(self) -> Result<RealPicture> {
        if self.rows.len() != self.n {
            bail!("matrix says n = {}, carries {} rows", self.n, self.rows.len());
        }
        let m = RealMat::from_rows(self.rows).context("ragged or empty matrix")?;
        if m.cols() != m.rows() {
            bail!("operator pictures must be square");
        }
        Ok(m)
    }
}

pub fn matrix_rows(m: &RealMat) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.at(r, c)).collect())
        .collect()
}

pub fn matrix_from_rows(rows: Vec<Vec<f64>>) -> Result<RealMat> {
    RealMat::from_rows(rows).context("ragged or empty matrix")
}

#[derive(Serialize, Deserialize)]
pub struct PvmAtomDto {
    pub z: CdNumberDto,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
pub struct GradedPvmDto {
    pub v: u8,
    pub d: usize,
    pub atoms: Vec<PvmAtomDto>,
}

impl GradedPvmDto {
    pub fn from_core(pvm: &GradedPvm) -> Self {
        GradedPvmDto {
            v: pvm.level(),
            d: pvm.dim(),
            atoms: pvm
                .atoms()
                .iter()
                .map(|a| PvmAtomDto {
                    z: CdNumberDto::from_core(&a.z),
                    p: matrix_rows(&a.p),
                })
                .collect(),
        }
    }

    pub fn into_core(self) -> Result<GradedPvm> {
        let atoms = self
            .atoms
            .into_iter()
            .map(|a| {
                Ok(PvmAtom {
                    z: a.z.into_core()?,
                    p: matrix_from_rows(a.p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GradedPvm::new(self.v, self.d, atoms).context("invalid measure")
    }
}

/// A factorization triple on a shared resolution of identity.
#[derive(Serialize, Deserialize)]
pub struct TripleDto {
    pub v: u8,
    pub d: usize,
    #[serde(rename = "P")]
    pub p: Vec<Vec<Vec<f64>>>,
    pub b: Vec<CdNumberDto>,
    pub dvals: Vec<CdNumberDto>,
}

impl TripleDto {
    pub fn from_core(t: &PropertyPTriple) -> Self {
        TripleDto {
            v: t.level(),
            d: t.dim(),
            p: t.projections().iter().map(matrix_rows).collect(),
            b: t.b_values().iter().map(CdNumberDto::from_core).collect(),
            dvals: t.d_values().iter().map(CdNumberDto::from_core).collect(),
        }
    }

    pub fn into_core(self, table: &BasisTable) -> Result<PropertyPTriple> {
        if self.v != table.level() {
            bail!("triple is level {}, table is level {}", self.v, table.level());
        }
        let projections = self
            .p
            .into_iter()
            .map(matrix_from_rows)
            .collect::<Result<Vec<_>>>()?;
        let b = self.b.into_iter().map(CdNumberDto::into_core).collect::<Result<Vec<_>>>()?;
        let dvals =
            self.dvals.into_iter().map(CdNumberDto::into_core).collect::<Result<Vec<_>>>()?;
        PropertyPTriple::new(projections, b, dvals, table).context("invalid triple")
    }
}

#[derive(Serialize, Deserialize)]
pub struct SemigroupAtomDto {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mu: CdNumberDto,
    pub s: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
pub struct SemigroupSpecDto {
    pub v: u8,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub atoms: Vec<SemigroupAtomDto>,
}

impl SemigroupSpecDto {
    pub fn from_core(spec: &SemigroupSpec) -> Self {
        SemigroupSpecDto {
            v: spec.level(),
            d: spec.dim(),
            m: spec.discrete_count(),
            n: spec.n_coords(),
            atoms: spec
                .atoms()
                .iter()
                .map(|a| SemigroupAtomDto {
                    p: matrix_rows(&a.p),
                    a: a.a.clone(),
                    b: a.b.clone(),
                    mu: CdNumberDto::from_core(&a.mu),
                    s: a.s.clone(),
                })
                .collect(),
        }
    }

    pub fn into_core(self) -> Result<SemigroupSpec> {
        let atoms = self
            .atoms
            .into_iter()
            .map(|a| {
                Ok(SemigroupAtom {
                    p: matrix_from_rows(a.p)?,
                    a: a.a,
                    b: a.b,
                    mu: a.mu.into_core()?,
                    s: a.s,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SemigroupSpec::new(self.v, self.d, self.m, self.n, atoms).context("invalid semigroup spec")
    }
}

/// Equally spaced samples of a one-parameter unitary group: `U[i]` is the
/// operator at time `h·(i+1)`.
#[derive(Serialize, Deserialize)]
pub struct SamplesDto {
    pub h: f64,
    pub count: usize,
    #[serde(rename = "U")]
    pub u: Vec<RealPictureDto>,
}

impl SamplesDto {
    pub fn into_pairs(self) -> Result<Vec<(f64, RealPicture)>> {
        if self.u.len() != self.count {
            bail!("samples say count = {}, carry {}", self.count, self.u.len());
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            bail!("need a positive step h");
        }
        self.u
            .into_iter()
            .enumerate()
            .map(|(i, m)| Ok((self.h * (i + 1) as f64, m.into_core()?)))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
pub struct RecoveredAtomDto {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub b: f64,
    pub mu: CdNumberDto,
}

#[derive(Serialize, Deserialize)]
pub struct RecoveryDto {
    pub atoms: Vec<RecoveredAtomDto>,
    pub fit_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub held_out_residual: Option<f64>,
    pub aliasing: bool,
    /// Largest rotation angle seen at the fit step; present when the
    /// branch condition |b|h < π was violated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    pub pass: bool,
}

/// A machine-readable suite verdict. `residuals` keys are suite-specific;
/// map ordering is lexicographic so identical configs serialize to
/// identical bytes.
#[derive(Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<u64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    pub residuals: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub pass: bool,
}

impl Report {
    pub fn new(suite: &str, tolerance: f64) -> Self {
        Report {
            suite: suite.to_string(),
            seed: None,
            seeds: None,
            tolerance,
            convention: None,
            residuals: BTreeMap::new(),
            timestamp: None,
            pass: false,
        }
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.residuals.insert(
            key.to_string(),
            serde_json::to_value(value).expect("residual values are plain data"),
        );
    }
}

/// Collection emitted by `octospec report`.
#[derive(Serialize, Deserialize)]
pub struct ReportSet {
    pub suites: Vec<Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub pass: bool,
}

/// On-disk calibration result consumed by `check theorem5 --convention
/// calibrated`.
#[derive(Serialize, Deserialize)]
pub struct ConventionStore {
    pub winner: String,
    pub level: u8,
    pub seeds: u64,
    pub residual: f64,
    pub ranking: Vec<(String, f64)>,
}
