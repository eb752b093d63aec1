//! JSON wire formats for states, classical sets, operations, and verdicts.
//!
//! Numbers round-trip bit-exactly through serde_json (shortest-representation
//! printing), so emitted files re-parse to equal values.
//!
//! State format: `{"dim": d, "matrix": [[re,im], ...]}` row-major for density
//! matrices, `{"dim": d, "amplitudes": [[re,im], ...]}` for pure states, with
//! an optional `"bipartite": [da, db]` split. Sets:
//! `{"dim": d, "kind": "...", "generators": [<pure state>...]}` plus optional
//! construction metadata. Operations:
//! `{"dim_in": d, "dim_out": d, "kraus": [<matrix>...], "label": "..."}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::ComplexMatrix;
use crate::measures::{EnsembleMember, MeasureReport, Rank};
use crate::ops::ClassicalOperation;
use crate::ordering::{PreorderCertificate, Verdict};
use crate::sets::{coherent_grid, custom_set, product_grid, ClassicalSetModel, SetKind};
use crate::states::{BipartiteShape, DensityMatrix, PureState};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    State(#[from] crate::states::StateError),
    #[error(transparent)]
    Set(#[from] crate::sets::SetError),
    #[error(transparent)]
    Op(#[from] crate::ops::OpError),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

pub type Result<T> = std::result::Result<T, IoError>;

fn pairs_from(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

fn pairs_into(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

/// On-disk state: exactly one of `amplitudes` (pure) or `matrix` (density).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bipartite: Option<[usize; 2]>,
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        StateFile {
            dim: psi.dim(),
            amplitudes: Some(pairs_from(psi.amplitudes())),
            matrix: None,
            bipartite: None,
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        StateFile {
            dim: rho.dim(),
            amplitudes: None,
            matrix: Some(pairs_from(rho.matrix().entries())),
            bipartite: None,
        }
    }

    pub fn with_bipartite(mut self, dim_a: usize, dim_b: usize) -> Self {
        self.bipartite = Some([dim_a, dim_b]);
        self
    }

    pub fn is_pure(&self) -> bool {
        self.amplitudes.is_some()
    }

    pub fn to_pure(&self) -> Result<PureState> {
        let amps = self
            .amplitudes
            .as_ref()
            .ok_or_else(|| IoError::Format("state file carries no amplitudes".into()))?;
        if amps.len() != self.dim {
            return Err(IoError::Format(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                self.dim
            )));
        }
        Ok(PureState::new(pairs_into(amps))?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        if let Some(matrix) = &self.matrix {
            if matrix.len() != self.dim * self.dim {
                return Err(IoError::Format(format!(
                    "{} entries for a {0}x{0} matrix of dimension {1}",
                    matrix.len(),
                    self.dim
                )));
            }
            let m = ComplexMatrix::new(self.dim, self.dim, pairs_into(matrix))?;
            Ok(DensityMatrix::new(m)?)
        } else {
            Ok(crate::states::from_pure(&self.to_pure()?))
        }
    }

    pub fn shape(&self) -> Result<Option<BipartiteShape>> {
        match self.bipartite {
            None => Ok(None),
            Some([da, db]) => Ok(Some(BipartiteShape::new(da, db, self.dim)?)),
        }
    }
}

/// Construction metadata preserved through set files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SetMetadata {
    CoherentGrid { n_max: usize, alphas: Vec<[f64; 2]> },
    ProductGrid { dim_a: usize, dim_b: usize, count: usize, seed: u64 },
}

/// On-disk classical set: kind tag plus the pure generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetFile {
    pub dim: usize,
    pub kind: String,
    pub generators: Vec<StateFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<SetMetadata>,
}

impl SetFile {
    pub fn from_model(set: &ClassicalSetModel) -> Self {
        let metadata = match set.kind() {
            SetKind::CoherentGrid { n_max, alphas } => Some(SetMetadata::CoherentGrid {
                n_max: *n_max,
                alphas: alphas.iter().map(|a| [a.re, a.im]).collect(),
            }),
            SetKind::ProductGrid { dim_a, dim_b, count, seed } => Some(SetMetadata::ProductGrid {
                dim_a: *dim_a,
                dim_b: *dim_b,
                count: *count,
                seed: *seed,
            }),
            SetKind::Custom => None,
        };
        SetFile {
            dim: set.dim(),
            kind: set.kind().tag().to_string(),
            generators: set.generators().iter().map(StateFile::from_pure).collect(),
            metadata,
        }
    }

    /// Rebuilds the model. With construction metadata present the generators
    /// are regenerated from it (and must agree with the stored list); else
    /// the stored generators are taken as a custom set.
    pub fn to_model(&self) -> Result<ClassicalSetModel> {
        let stored: Result<Vec<PureState>> = self.generators.iter().map(|g| g.to_pure()).collect();
        let stored = stored?;
        let model = match &self.metadata {
            Some(SetMetadata::CoherentGrid { n_max, alphas }) => {
                coherent_grid(*n_max, &pairs_into(alphas))?
            }
            Some(SetMetadata::ProductGrid { dim_a, dim_b, count, seed }) => {
                product_grid(*dim_a, *dim_b, *count, *seed)?
            }
            None => custom_set(&stored)?,
        };
        if model.dim() != self.dim || model.len() != stored.len() {
            return Err(IoError::Format("set metadata disagrees with stored generators".into()));
        }
        Ok(model)
    }
}

/// On-disk operator-sum operation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
    pub label: String,
}

impl OpFile {
    pub fn from_op(op: &ClassicalOperation) -> Self {
        OpFile {
            dim_in: op.dim_in(),
            dim_out: op.dim_out(),
            kraus: op.kraus().iter().map(|k| pairs_from(k.entries())).collect(),
            label: op.label().to_string(),
        }
    }

    pub fn to_op(&self) -> Result<ClassicalOperation> {
        let kraus: Result<Vec<ComplexMatrix>> = self
            .kraus
            .iter()
            .map(|k| {
                if k.len() != self.dim_in * self.dim_out {
                    return Err(IoError::Format(format!(
                        "{} entries for a {}x{} Kraus operator",
                        k.len(),
                        self.dim_out,
                        self.dim_in
                    )));
                }
                Ok(ComplexMatrix::new(self.dim_out, self.dim_in, pairs_into(k))?)
            })
            .collect();
        Ok(ClassicalOperation::new(kraus?, self.label.clone())?)
    }
}

/// Wire form of a preorder verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictFile {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

pub const VERDICT_CERTIFIED: &str = "CERTIFIED";
pub const VERDICT_INFEASIBLE: &str = "INFEASIBLE-IN-MODEL";

impl VerdictFile {
    pub fn from_verdict(v: &Verdict) -> Self {
        match v {
            Verdict::Certified(PreorderCertificate { lambda, gamma_weights, residual, lambda_max }) => {
                VerdictFile {
                    verdict: VERDICT_CERTIFIED.into(),
                    lambda: Some(*lambda),
                    lambda_max: Some(*lambda_max),
                    gamma_weights: Some(gamma_weights.clone()),
                    residual: Some(*residual),
                }
            }
            Verdict::InfeasibleInModel => VerdictFile {
                verdict: VERDICT_INFEASIBLE.into(),
                lambda: None,
                lambda_max: None,
                gamma_weights: None,
                residual: None,
            },
        }
    }
}

/// Wire form of a measure report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReportFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Rank>,
    pub mu_lower: Rank,
    pub mu_upper: Rank,
    pub f_mu: f64,
    pub certificate: Vec<EnsembleMemberFile>,
    pub model: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMemberFile {
    pub probability: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

impl MeasureReportFile {
    pub fn from_report(report: &MeasureReport) -> Self {
        MeasureReportFile {
            r: report.r,
            mu_lower: report.mu_lower,
            mu_upper: report.mu_upper,
            f_mu: report.f_mu,
            certificate: report
                .certificate
                .iter()
                .map(|EnsembleMember { probability, state }| EnsembleMemberFile {
                    probability: *probability,
                    amplitudes: pairs_from(state.amplitudes()),
                })
                .collect(),
            model: report.model.clone(),
        }
    }
}
