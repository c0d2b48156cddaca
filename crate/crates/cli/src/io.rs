//! File schemas and atomic output writing.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use isomonodromy::numkit::Matrix;

use crate::CliError;

/// Write through a temp file and rename, so failures leave no partial
/// artifact behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp: PathBuf = {
        let mut name = path.as_os_str().to_owned();
        name.push(format!(".tmp-{}", std::process::id()));
        PathBuf::from(name)
    };
    fs::write(&tmp, contents)
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::parse(format!("cannot move output into place at {}: {e}", path.display()))
    })?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::parse(format!("invalid {what} JSON: {e}")))
}

pub fn to_c64(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn from_c64(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Circle spec as it appears in boundary-data and family files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub nodes: usize,
}

impl CircleSpec {
    pub fn build(&self) -> Result<isomonodromy::numkit::QuadratureCircle, CliError> {
        if self.nodes < 16 || self.nodes % 2 != 0 {
            return Err(CliError::parse(format!(
                "circle node count must be even and at least 16, got {}",
                self.nodes
            )));
        }
        if !(self.radius > 0.0) {
            return Err(CliError::parse("circle radius must be positive".into()));
        }
        Ok(isomonodromy::numkit::QuadratureCircle::new(
            to_c64(self.center),
            self.radius,
            self.nodes,
        ))
    }
}

/// Boundary data for the `rh` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryData {
    pub circle: CircleSpec,
    pub samples: Vec<Matrix>,
}

/// Path specification for `verify`: explicit samples or a segment.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSpec {
    Segment {
        from: Vec<[f64; 2]>,
        to: Vec<[f64; 2]>,
        samples: usize,
    },
    Explicit {
        samples: Vec<Vec<[f64; 2]>>,
    },
}

impl PathSpec {
    pub fn sample_points(&self) -> Vec<Vec<C64>> {
        match self {
            PathSpec::Explicit { samples } => samples
                .iter()
                .map(|t| t.iter().copied().map(to_c64).collect())
                .collect(),
            PathSpec::Segment { from, to, samples } => {
                let count = (*samples).max(2);
                (0..count)
                    .map(|i| {
                        let tau = i as f64 / (count - 1) as f64;
                        from.iter()
                            .zip(to.iter())
                            .map(|(&a, &b)| {
                                let a = to_c64(a);
                                let b = to_c64(b);
                                a + (b - a) * tau
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

/// Grid over one coordinate of the deformation parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoordinateGrid {
    /// 1-based coordinate index into `t`.
    pub coord: usize,
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub samples: usize,
}

/// Scalar parameter grid for boundary-problem families.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalarGrid {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub samples: usize,
}

impl ScalarGrid {
    pub fn points(&self) -> Vec<C64> {
        let count = self.samples.max(2);
        let a = to_c64(self.from);
        let b = to_c64(self.to);
        (0..count)
            .map(|i| a + (b - a) * (i as f64 / (count - 1) as f64))
            .collect()
    }
}

/// Sweep family specification.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FamilySpec {
    /// Sweep the explicit solution over a grid in one t coordinate.
    #[serde(rename = "schlesinger")]
    Schlesinger {
        #[serde(flatten)]
        source: SchlesingerSource,
        grid: CoordinateGrid,
        #[serde(default)]
        emit_q: bool,
    },
    /// `F(x, t) = I + t * C * x^power` on a circle.
    #[serde(rename = "rh_linear")]
    RhLinear {
        circle: CircleSpec,
        coefficient: Matrix,
        power: i32,
        grid: ScalarGrid,
    },
    /// `F(x, t) = diag(x - x0(t), 1/(x - x0(t)))` with `x0` on a segment.
    #[serde(rename = "rh_pole_zero")]
    RhPoleZero {
        circle: CircleSpec,
        x0_from: [f64; 2],
        x0_to: [f64; 2],
        samples: usize,
    },
}

/// Either a seed to construct from, or an already-built solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SchlesingerSource {
    #[serde(rename = "seed")]
    Seed(isomonodromy::schlesinger::SchlesingerSeed),
    #[serde(rename = "solution")]
    Solution(isomonodromy::schlesinger::ExplicitSolution),
}

/// One check line of a verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub worst_residual: f64,
    pub tolerance: f64,
}

/// Verification report written by `verify`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckLine>,
    /// Sample indices where the solution hit a movable pole (annotated,
    /// not fatal).
    pub movable_pole_samples: Vec<usize>,
    pub samples_evaluated: usize,
}

/// Construction summary printed by `construct`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructSummary {
    pub s: usize,
    pub m: usize,
    pub initial_condition_residual: f64,
    pub output: String,
}

/// Factorization artifact written by `rh`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationArtifact {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fredholm_det: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fredholm_det_minus: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fredholm_det_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_residual: Option<f64>,
    #[serde(rename = "X_minus", skip_serializing_if = "Option::is_none")]
    pub x_minus: Option<Vec<Matrix>>,
    #[serde(rename = "X_plus", skip_serializing_if = "Option::is_none")]
    pub x_plus: Option<Vec<Matrix>>,
}
