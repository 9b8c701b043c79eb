//! JSON file formats.
//!
//! Complex entries are `[re, im]` pairs and matrices are row-major arrays of
//! rows:
//!
//! ```json
//! {"n": 3, "m": 1, "T": [[[1.0, 0.0], [0.0, 1.0]]]}
//! {"n": 2, "S": [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]}
//! ```
//!
//! Vertex labels in approximating-graph files are 1-based. Floats are written
//! in shortest round-trip form, so reading back is lossless.

use serde::{Deserialize, Serialize};

use crate::approx::{ApproxGraph, Connector};
use crate::coupling::{CouplingSt, ScatteringMatrix};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Parses a row-major matrix; `cols` is needed when there are no rows.
pub fn matrix_from_json(rows: &JsonMatrix, cols: usize) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(cols, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            rows: nrows,
            cols: ncols,
            got_rows: nrows,
            got_cols: bad.len(),
        });
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub t: JsonMatrix,
}

impl CouplingFile {
    pub fn from_coupling(c: &CouplingSt) -> Self {
        Self { n: c.n(), m: c.m(), t: matrix_to_json(c.t()) }
    }

    pub fn to_coupling(&self) -> Result<CouplingSt> {
        let cols = self.n.saturating_sub(self.m);
        CouplingSt::new(self.n, self.m, matrix_from_json(&self.t, cols)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringFile {
    pub n: usize,
    #[serde(rename = "S")]
    pub s: JsonMatrix,
}

impl ScatteringFile {
    pub fn from_matrix(s: &ScatteringMatrix) -> Self {
        Self { n: s.n(), s: matrix_to_json(s.matrix()) }
    }

    /// Checks the declared size and unitarity within `tol`.
    pub fn to_matrix(&self, tol: f64) -> Result<ScatteringMatrix> {
        let m = matrix_from_json(&self.s, self.n)?;
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                rows: self.n,
                cols: self.n,
                got_rows: m.nrows(),
                got_cols: m.ncols(),
            });
        }
        ScatteringMatrix::new(m, tol)
    }
}

/// A coupling together with its scattering matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingWithScattering {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub t: JsonMatrix,
    #[serde(rename = "S")]
    pub s: JsonMatrix,
}

impl CouplingWithScattering {
    pub fn new(c: &CouplingSt, s: &ScatteringMatrix) -> Self {
        Self { n: c.n(), m: c.m(), t: matrix_to_json(c.t()), s: matrix_to_json(s.matrix()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectorRecord {
    /// 1-based start vertex.
    pub j: usize,
    /// 1-based end vertex.
    pub k: usize,
    pub gamma: f64,
    #[serde(rename = "A")]
    pub potential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxGraphFile {
    pub n: usize,
    pub d: f64,
    pub alpha: Vec<f64>,
    pub connectors: Vec<ConnectorRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction_residual: Option<f64>,
}

impl ApproxGraphFile {
    pub fn from_graph(g: &ApproxGraph) -> Self {
        let connectors = g
            .connectors()
            .iter()
            .map(|c| ConnectorRecord {
                j: c.from() + 1,
                k: c.to() + 1,
                gamma: c.gamma(),
                potential: c.potential(),
            })
            .collect();
        Self {
            n: g.n(),
            d: g.d(),
            alpha: g.alpha().to_vec(),
            connectors,
            reconstruction_residual: None,
        }
    }

    pub fn to_graph(&self) -> Result<ApproxGraph> {
        let connectors = self
            .connectors
            .iter()
            .map(|c| {
                if c.j == 0 || c.k == 0 {
                    return Err(Error::InvalidConnector("vertex labels are 1-based".into()));
                }
                Connector::new(c.j - 1, c.k - 1, c.gamma, c.potential, self.d)
            })
            .collect::<Result<Vec<_>>>()?;
        ApproxGraph::new(self.n, self.d, self.alpha.clone(), connectors)
    }
}

/// Either kind of input accepted by the classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixInput {
    Coupling(CouplingFile),
    Scattering(ScatteringFile),
}

/// Parses a document holding either `"S"` or `"T"`.
pub fn parse_matrix_input(text: &str) -> Result<MatrixInput> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(malformed)?;
    if value.get("S").is_some() {
        serde_json::from_value(value).map(MatrixInput::Scattering).map_err(malformed)
    } else if value.get("T").is_some() {
        serde_json::from_value(value).map(MatrixInput::Coupling).map_err(malformed)
    } else {
        Err(Error::Malformed("expected a \"T\" or \"S\" key".into()))
    }
}

pub fn parse_coupling(text: &str) -> Result<CouplingSt> {
    serde_json::from_str::<CouplingFile>(text).map_err(malformed)?.to_coupling()
}

pub fn malformed(e: serde_json::Error) -> Error {
    Error::Malformed(e.to_string())
}
