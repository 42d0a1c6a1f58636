//! JSON problem and factor files.
//!
//! A problem file looks like
//!
//! ```json
//! {
//!   "n": 3, "m": 3, "b": [1, 1, 1],
//!   "C": {"n": 3, "triplets": [[1, 0, -0.5], [2, 1, -0.5]]},
//!   "A": [{"n": 3, "triplets": [[0, 0, 1]]}, ...],
//!   "family": {"kind": "orthocut", "d": 1},
//!   "R": 3
//! }
//! ```
//!
//! `family`, `R`, `constant_trace` and `identity_in_range` are optional.
//! Indices are 0-based with `row >= col`. Errors name the offending JSON path.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_family, family_from_tag, FamilyTag, SdpProblem};
use crate::sym::SymMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: SymMatrix,
    #[serde(rename = "A")]
    pub a: Vec<SymMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_trace: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_in_range: Option<bool>,
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

/// Deserializes JSON, reporting the path of the first offending field.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path.is_empty() || path == "." { "<root>".to_string() } else { path };
        parse_err(path, e.into_inner().to_string())
    })
}

impl ProblemFile {
    pub fn from_problem(problem: &SdpProblem) -> Self {
        Self {
            n: problem.n(),
            m: problem.m(),
            b: problem.rhs().iter().copied().collect(),
            c: problem.cost_matrix().to_sparse(),
            a: problem.constraints().iter().map(|a| a.to_sparse()).collect(),
            family: problem.family().cloned(),
            r: problem.trace_bound(),
            constant_trace: Some(problem.constant_trace()),
            identity_in_range: problem.identity_in_range(),
        }
    }

    /// Validates the file and builds the problem.
    pub fn into_problem(self) -> Result<SdpProblem> {
        if self.c.n() != self.n {
            return Err(parse_err("C.n", format!("{} does not match n = {}", self.c.n(), self.n)));
        }
        if self.a.len() != self.m {
            return Err(parse_err("A", format!("{} matrices but m = {}", self.a.len(), self.m)));
        }
        if self.b.len() != self.m {
            return Err(parse_err("b", format!("length {} does not match m = {}", self.b.len(), self.m)));
        }
        for (i, a) in self.a.iter().enumerate() {
            if a.n() != self.n {
                return Err(parse_err(format!("A[{i}].n"), format!("{} does not match n = {}", a.n(), self.n)));
            }
        }
        let b = DVector::from_vec(self.b.clone());
        if let Some(tag) = &self.family {
            let family = family_from_tag(tag, self.c.clone(), &self.a).map_err(|e| parse_err("family", e.to_string()))?;
            let built = build_family(family).map_err(|e| parse_err("family", e.to_string()))?;
            if built.m() != self.m {
                return Err(parse_err("family", format!("family has {} constraints, file has m = {}", built.m(), self.m)));
            }
            for (i, (want, got)) in built.constraints().iter().zip(&self.a).enumerate() {
                if want.triplets() != got.triplets() {
                    return Err(parse_err(format!("A[{i}]"), "does not match the declared family"));
                }
            }
            if built.rhs() != &b {
                return Err(parse_err("b", "does not match the declared family"));
            }
            if let (Some(r), Some(expect)) = (self.r, built.trace_bound()) {
                if (r - expect).abs() > 1e-12 * expect.abs().max(1.0) {
                    return Err(parse_err("R", format!("{r} disagrees with the family value {expect}")));
                }
            }
            if let Some(flag) = self.constant_trace {
                if flag != built.constant_trace() {
                    return Err(parse_err("constant_trace", "disagrees with the declared family"));
                }
            }
            return Ok(built);
        }
        let mut problem = SdpProblem::new(self.c, self.a, b).map_err(|e| parse_err("A", e.to_string()))?;
        if let Some(r) = self.r {
            problem = problem.with_trace_bound(r).map_err(|e| parse_err("R", e.to_string()))?;
        }
        if let Some(flag) = self.constant_trace {
            problem = problem
                .with_constant_trace(flag)
                .map_err(|e| parse_err("constant_trace", e.to_string()))?;
        }
        match self.identity_in_range {
            Some(true) if problem.identity_in_range() != Some(true) => {
                return Err(parse_err(
                    "identity_in_range",
                    "claimed true but the identity is not in the span of the constraint matrices",
                ));
            }
            Some(false) => problem = problem.with_identity_in_range(Some(false)),
            _ => {}
        }
        Ok(problem)
    }
}

pub fn parse_problem(text: &str) -> Result<SdpProblem> {
    from_json_str::<ProblemFile>(text)?.into_problem()
}

pub fn read_problem(path: &Path) -> Result<SdpProblem> {
    parse_problem(&std::fs::read_to_string(path)?)
}

pub fn problem_to_json(problem: &SdpProblem) -> String {
    serde_json::to_string_pretty(&ProblemFile::from_problem(problem)).expect("serializable")
}

/// `{n, p, data}` with `data` in column-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorFile {
    pub n: usize,
    pub p: usize,
    pub data: Vec<f64>,
}

impl FactorFile {
    pub fn from_matrix(y: &DMatrix<f64>) -> Self {
        Self {
            n: y.nrows(),
            p: y.ncols(),
            data: y.as_slice().to_vec(),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.data.len() != self.n * self.p {
            return Err(parse_err(
                "data",
                format!("{} values but n·p = {}", self.data.len(), self.n * self.p),
            ));
        }
        Ok(DMatrix::from_column_slice(self.n, self.p, &self.data))
    }
}

pub fn read_factor(path: &Path) -> Result<DMatrix<f64>> {
    from_json_str::<FactorFile>(&std::fs::read_to_string(path)?)?.to_matrix()
}
