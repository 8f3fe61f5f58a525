use std::path::{Path, PathBuf};
use std::sync::Arc;

use hochlab::algebra::{
    extension_from_ideal, matrix_algebra, scalar_algebra, square_zero_algebra, tensor_product, unitization,
    zero_algebra, AlgebraPresentation, ExtensionSpec,
};
use hochlab::averaging::CocycleSpec;
use hochlab::chain::ComplexKind;
use hochlab::frame::{involution_extension, FrameConfig, ShiftFrame, SignedPermutation};
use hochlab::homotopy::IdentityId;
use hochlab::linalg::SparseVector;
use hochlab::norms::NormKind;
use hochlab::rational::parse_q;
use hochlab::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A scenario file: shared algebra/frame context plus an ordered task list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_cols: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    #[default]
    Pass,
    Fail,
}

impl Expect {
    pub fn as_str(self) -> &'static str {
        match self {
            Expect::Pass => "pass",
            Expect::Fail => "fail",
        }
    }
}

/// Where an algebra comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraRef {
    Matrix { m: usize },
    Scalar {},
    Zero {},
    SquareZero { dim: usize },
    Unitization { of: Box<AlgebraRef> },
    Tensor { left: Box<AlgebraRef>, right: Box<AlgebraRef> },
    /// Total algebra of the extension of `M_m` by `span{1, U}`.
    Involution {
        permutation: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        signs: Option<Vec<i8>>,
    },
    FrameAmbient {},
    FrameCorner {},
    Presentation { presentation: serde_json::Value },
    /// Path to a presentation file, relative to the scenario file.
    File { path: String },
}

/// Where an ideal extension comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExtensionRef {
    Unitization {
        of: AlgebraRef,
    },
    Involution {
        permutation: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        signs: Option<Vec<i8>>,
    },
    /// The ideal spanned by `basis` (sparse `[index, "p/q"]` vectors).
    Ideal {
        total: AlgebraRef,
        basis: Vec<Vec<(usize, String)>>,
    },
}

fn default_degrees() -> Vec<usize> {
    vec![1, 2]
}

fn default_samples() -> usize {
    20
}

fn default_m3_samples() -> usize {
    50
}

fn default_linf() -> NormKind {
    NormKind::Linf
}

fn default_hochschild() -> ComplexKind {
    ComplexKind::Hochschild
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum Task {
    Homology(HomologyTask),
    BarAcyclicity(BarTask),
    VerifyIdentities(IdentitiesTask),
    Les(ExtensionTask),
    Excision(ExtensionTask),
    AverageCocycle(AveragingTask),
    Decay(DecayTask),
    Norms(NormsTask),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Homology(_) => "homology",
            Task::BarAcyclicity(_) => "bar-acyclicity",
            Task::VerifyIdentities(_) => "verify-identities",
            Task::Les(_) => "les",
            Task::Excision(_) => "excision",
            Task::AverageCocycle(_) => "average-cocycle",
            Task::Decay(_) => "decay",
            Task::Norms(_) => "norms",
        }
    }

    /// The part of the library a task exercises, used in diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Task::Homology(_) | Task::BarAcyclicity(_) | Task::Les(_) | Task::Excision(_) => "homology-engine",
            Task::VerifyIdentities(_) => "homotopy-lab",
            Task::AverageCocycle(_) | Task::Decay(_) => "averaging-cocycle",
            Task::Norms(_) => "norm-bench",
        }
    }

    pub fn expect(&self) -> Expect {
        match self {
            Task::Homology(t) => t.expect,
            Task::BarAcyclicity(t) => t.expect,
            Task::VerifyIdentities(t) => t.expect,
            Task::Les(t) | Task::Excision(t) => t.expect,
            Task::AverageCocycle(t) => t.expect,
            Task::Decay(t) => t.expect,
            Task::Norms(t) => t.expect,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Task::Homology(t) => t.label.as_deref(),
            Task::BarAcyclicity(t) => t.label.as_deref(),
            Task::VerifyIdentities(t) => t.label.as_deref(),
            Task::Les(t) | Task::Excision(t) => t.label.as_deref(),
            Task::AverageCocycle(t) => t.label.as_deref(),
            Task::Decay(t) => t.label.as_deref(),
            Task::Norms(t) => t.label.as_deref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomologyTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    #[serde(default = "default_hochschild")]
    pub kind: ComplexKind,
    pub max_degree: usize,
    #[serde(default)]
    pub cohomology: bool,
    /// Turns the task into a verdict: the computed dimensions must match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_dims: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    /// Algebra for `gamma-null-homotopic` and `splitting-contracts`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<IdentityId>>,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub sabotage: bool,
    /// Random elements for `gamma-null-homotopic`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Pivots for `splitting-contracts`; all of them when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivots: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<ComplexKind>>,
    /// Replace the splitting by one that violates the left-module law.
    #[serde(default)]
    pub corrupted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Defaults to the unitization of the scenario algebra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionRef>,
    #[serde(default = "default_hochschild")]
    pub kind: ComplexKind,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    pub cocycle: CocycleSpec,
    pub degree: usize,
    pub k: Vec<usize>,
    #[serde(rename = "N")]
    pub blocks: Vec<usize>,
    #[serde(default = "default_linf")]
    pub norm: NormKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    pub cocycle: CocycleSpec,
    pub degree: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub blocks: Vec<usize>,
    #[serde(default = "default_linf")]
    pub norm: NormKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsTask {
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    #[serde(default = "default_linf")]
    pub norm: NormKind,
    /// Corner entries `[row, col, "p/q"]` of the amplified element;
    /// `E_11` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<Vec<(usize, usize, String)>>,
    #[serde(rename = "N")]
    pub blocks: Vec<usize>,
    #[serde(default = "default_m3_samples")]
    pub samples: usize,
}

/// A scenario that failed to load, with a position when there is one.
#[derive(Debug)]
pub struct LoadError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

/// serde_json appends " at line L column C"; the position is kept separately.
fn strip_position(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}

impl LoadError {
    fn plain(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: None,
            column: None,
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> std::result::Result<Self, LoadError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| LoadError {
            message: strip_position(&e.to_string()),
            line: Some(e.line()),
            column: Some(e.column()),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, LoadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LoadError::plain(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> std::result::Result<(), LoadError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(LoadError::plain("name must be a non-empty [A-Za-z0-9_-] string"));
        }
        if self.budget_cols == Some(0) {
            return Err(LoadError::plain("budget_cols must be positive"));
        }
        if self.tasks.is_empty() {
            return Err(LoadError::plain("a scenario needs at least one task"));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            let bad = match t {
                Task::VerifyIdentities(t) => t.degrees.is_empty(),
                Task::AverageCocycle(t) => t.k.is_empty() || t.blocks.is_empty(),
                Task::Decay(t) => t.blocks.is_empty(),
                Task::Norms(t) => t.blocks.is_empty(),
                _ => false,
            };
            if bad {
                return Err(LoadError::plain(format!("task {i} ({}): empty parameter list", t.name())));
            }
        }
        Ok(())
    }

    /// sha256 of the canonical re-serialization, so formatting does not
    /// change the hash.
    pub fn content_hash(&self) -> String {
        let text = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Resolution context for references inside a scenario.
#[derive(Clone, Debug)]
pub struct Context {
    pub base_dir: PathBuf,
    pub algebra: Option<AlgebraRef>,
    pub frame: Option<FrameConfig>,
}

impl Context {
    pub fn frame(&self, local: Option<&FrameConfig>) -> Result<ShiftFrame> {
        let config = local
            .or(self.frame.as_ref())
            .ok_or_else(|| Error::InvalidArgument("task needs a frame".into()))?;
        ShiftFrame::from_config(config)
    }

    pub fn algebra(&self, local: Option<&AlgebraRef>) -> Result<Arc<AlgebraPresentation>> {
        let r = local
            .or(self.algebra.as_ref())
            .ok_or_else(|| Error::InvalidArgument("task needs an algebra".into()))?;
        self.resolve(r)
    }

    pub fn resolve(&self, r: &AlgebraRef) -> Result<Arc<AlgebraPresentation>> {
        match r {
            AlgebraRef::Matrix { m } => matrix_algebra(*m),
            AlgebraRef::Scalar {} => Ok(scalar_algebra()),
            AlgebraRef::Zero {} => Ok(zero_algebra()),
            AlgebraRef::SquareZero { dim } => Ok(square_zero_algebra(*dim)),
            AlgebraRef::Unitization { of } => Ok(unitization(&self.resolve(of)?)?.0),
            AlgebraRef::Tensor { left, right } => tensor_product(&*self.resolve(left)?, &*self.resolve(right)?),
            AlgebraRef::Involution { permutation, signs } => {
                Ok(involution_extension(&signed_permutation(permutation, signs.as_deref())?)?.0)
            }
            AlgebraRef::FrameAmbient {} => Ok(self.frame(None)?.ambient().clone()),
            AlgebraRef::FrameCorner {} => Ok(self.frame(None)?.corner_algebra().clone()),
            AlgebraRef::Presentation { presentation } => AlgebraPresentation::from_json_value(presentation),
            AlgebraRef::File { path } => {
                let full = self.base_dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", full.display())))?;
                AlgebraPresentation::from_json(&text)
            }
        }
    }

    pub fn extension(&self, local: Option<&ExtensionRef>) -> Result<ExtensionSpec> {
        match local {
            None => Ok(unitization(&self.algebra(None)?)?.1),
            Some(ExtensionRef::Unitization { of }) => Ok(unitization(&self.resolve(of)?)?.1),
            Some(ExtensionRef::Involution { permutation, signs }) => {
                Ok(involution_extension(&signed_permutation(permutation, signs.as_deref())?)?.1)
            }
            Some(ExtensionRef::Ideal { total, basis }) => {
                let total = self.resolve(total)?;
                let basis = basis
                    .iter()
                    .map(|v| {
                        Ok(SparseVector::from_entries(
                            v.iter().map(|(i, x)| Ok((*i, parse_q(x)?))).collect::<Result<Vec<_>>>()?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                extension_from_ideal(&total, &basis)
            }
        }
    }
}

pub fn signed_permutation(perm: &[usize], signs: Option<&[i8]>) -> Result<SignedPermutation> {
    let signs = signs.map_or_else(|| vec![1; perm.len()], <[i8]>::to_vec);
    SignedPermutation::new(perm.to_vec(), signs)
}
