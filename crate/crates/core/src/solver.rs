//! Stationary scattering on an approximating graph, and convergence of its
//! scattering matrix towards the exact vertex as `d -> 0`.
//!
//! On every half-line `psi_j(x) = delta_ij e^{-ikx} + S_ji e^{ikx}`. At each
//! endpoint `V_j` all values agree and the sum of outward derivatives equals
//! `alpha_j` times the common value. A connector leaving `V_j` contributes
//! `+phi'(0)`, one arriving at `V_j` contributes `-phi'(L)`.

use std::fmt::Write as _;

use nalgebra::Matrix2;

use crate::approx::{build_approximation, ApproxGraph, Connector};
use crate::coupling::{ft_scattering, CouplingSt, ScatteringMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Errors at or below this are treated as exact and left out of the fit.
pub const FIT_FLOOR: f64 = 1e-12;

/// How a connector's transfer matrix is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMode {
    /// Free propagation times the gauge phase `e^{i A (L2 - L1)}`.
    PhaseFactor,
    /// Explicit plane waves in the three regions, matched on `psi` and the
    /// covariant derivative `psi' - i A psi`.
    Segmented,
}

/// Amplitudes of `e^{+ikx}` and `e^{-ikx}` at the start of a connector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWave {
    pub a: C64,
    pub b: C64,
}

/// Incoming amplitude of `e^{-ikx}` and outgoing amplitude of `e^{ikx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalflineWave {
    pub incoming: C64,
    pub outgoing: C64,
}

/// Full wave function for one incoming line.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    pub halflines: Vec<HalflineWave>,
    pub edges: Vec<EdgeWave>,
}

/// `(psi(0), psi'(0)) -> (psi(L), psi'(L))` for `-psi'' = k^2 psi`.
pub fn free_transfer(k: f64, length: f64) -> Matrix2<C64> {
    let (s, c) = (k * length).sin_cos();
    Matrix2::new(
        C64::new(c, 0.0),
        C64::new(s / k, 0.0),
        C64::new(-k * s, 0.0),
        C64::new(c, 0.0),
    )
}

/// Transfer matrix across a region of constant vector potential `a` and
/// length `len`, acting on `(psi, psi')` with `psi'` taken outside the region.
fn potential_region_transfer(k: f64, a: f64, len: f64) -> Matrix2<C64> {
    let ik = C64::new(0.0, k);
    let plus = C64::from_polar(1.0, (a + k) * len);
    let minus = C64::from_polar(1.0, (a - k) * len);
    let mut m = Matrix2::zeros();
    for col in 0..2 {
        // entry values; the covariant derivative equals the outside psi'
        let (u, w) = if col == 0 {
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (C64::new(0.0, 0.0), C64::new(1.0, 0.0))
        };
        let c1 = (u + w / ik) * 0.5;
        let c2 = (u - w / ik) * 0.5;
        m[(0, col)] = c1 * plus + c2 * minus;
        m[(1, col)] = ik * (c1 * plus - c2 * minus);
    }
    m
}

/// Transfer matrix of a connector, from its `from` end to its `to` end.
pub fn connector_transfer(conn: &Connector, k: f64, mode: TransferMode) -> Matrix2<C64> {
    let length = conn.length();
    match mode {
        TransferMode::PhaseFactor => free_transfer(k, length) * C64::from_polar(1.0, conn.phase()),
        TransferMode::Segmented => {
            let (lo, hi) = conn.support();
            free_transfer(k, length - hi)
                * potential_region_transfer(k, conn.potential(), hi - lo)
                * free_transfer(k, lo)
        }
    }
}

fn check_momentum(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMomentum(k))
    }
}

/// Assembles the `(n + 2E)`-square system; column `i` of the right-hand side
/// corresponds to a unit wave incoming on line `i`. Connector unknowns are
/// the value and derivative at the connector's start, which avoids the
/// cancellation between `a` and `b` on very short edges.
fn assemble(graph: &ApproxGraph, k: f64, mode: TransferMode) -> (CMatrix, CMatrix) {
    let n = graph.n();
    let conns = graph.connectors();
    let size = n + 2 * conns.len();
    let ik = C64::new(0.0, k);
    let one = C64::new(1.0, 0.0);
    let mut sys = CMatrix::zeros(size, size);
    let mut rhs = CMatrix::zeros(size, n);
    let base = 2 * conns.len();

    for (j, &alpha) in graph.alpha().iter().enumerate() {
        let row = base + j;
        sys[(row, j)] = ik - alpha;
        rhs[(row, j)] = ik + alpha;
    }
    for (e, conn) in conns.iter().enumerate() {
        let (iu, iv) = (n + 2 * e, n + 2 * e + 1);
        let m = connector_transfer(conn, k, mode);

        // continuity at both ends
        let row = 2 * e;
        sys[(row, iu)] = one;
        sys[(row, conn.from())] -= one;
        rhs[(row, conn.from())] = one;

        let row = 2 * e + 1;
        sys[(row, iu)] = m[(0, 0)];
        sys[(row, iv)] = m[(0, 1)];
        sys[(row, conn.to())] -= one;
        rhs[(row, conn.to())] = one;

        // outward derivatives
        sys[(base + conn.from(), iv)] += one;
        sys[(base + conn.to(), iu)] -= m[(1, 0)];
        sys[(base + conn.to(), iv)] -= m[(1, 1)];
    }
    (sys, rhs)
}

fn solve_all(graph: &ApproxGraph, k: f64, mode: TransferMode) -> Result<CMatrix> {
    check_momentum(k)?;
    let (sys, rhs) = assemble(graph, k, mode);
    linalg::solve_dense(&sys, &rhs)
}

/// Scattering matrix of the approximating graph at momentum `k`.
pub fn solve_scattering(graph: &ApproxGraph, k: f64) -> Result<ScatteringMatrix> {
    solve_scattering_with(graph, k, TransferMode::PhaseFactor)
}

pub fn solve_scattering_with(
    graph: &ApproxGraph,
    k: f64,
    mode: TransferMode,
) -> Result<ScatteringMatrix> {
    let n = graph.n();
    let sol = solve_all(graph, k, mode)?;
    Ok(ScatteringMatrix::from_raw(sol.rows(0, n).into_owned()))
}

/// Wave amplitudes on every half-line and connector for a unit wave
/// incoming on line `incoming`.
pub fn scattering_state(graph: &ApproxGraph, k: f64, incoming: usize) -> Result<GraphState> {
    let n = graph.n();
    assert!(incoming < n, "incoming line {incoming} out of range");
    let sol = solve_all(graph, k, TransferMode::PhaseFactor)?;
    let col = sol.column(incoming);
    let halflines = (0..n)
        .map(|j| HalflineWave {
            incoming: C64::new(if j == incoming { 1.0 } else { 0.0 }, 0.0),
            outgoing: col[j],
        })
        .collect();
    let edges = (0..graph.connectors().len())
        .map(|e| {
            let (u, v) = (col[n + 2 * e], col[n + 2 * e + 1] / C64::new(0.0, k));
            EdgeWave { a: (u + v) / 2.0, b: (u - v) / 2.0 }
        })
        .collect();
    Ok(GraphState { halflines, edges })
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub d: f64,
    /// Max-entry distance to the exact matrix, or the solver failure.
    pub outcome: std::result::Result<f64, Error>,
}

impl ConvergenceRow {
    pub fn error(&self) -> Option<f64> {
        self.outcome.as_ref().ok().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub k: f64,
    pub rows: Vec<ConvergenceRow>,
    pub fitted_order: f64,
}

impl ConvergenceReport {
    /// Error at the smallest successfully solved `d`.
    pub fn final_error(&self) -> Option<f64> {
        self.rows.iter().rev().find_map(ConvergenceRow::error)
    }

    /// `error(d_{i+1}) / error(d_i)` for consecutive successful rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter_map(|w| Some(w[1].error()? / w[0].error()?))
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = (f64, &Error)> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().err().map(|e| (r.d, e)))
    }

    /// `d,error` rows followed by `# fitted_order = <value>`. Failed rows
    /// print `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,error\n");
        for row in &self.rows {
            match row.error() {
                Some(e) => writeln!(out, "{},{}", row.d, e),
                None => writeln!(out, "{},nan", row.d),
            }
            .unwrap();
        }
        writeln!(out, "# fitted_order = {}", self.fitted_order).unwrap();
        out
    }
}

/// Least-squares slope of `ln error` against `ln d`.
pub fn fit_order(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(d, e)| *d > 0.0 && *e > FIT_FLOOR)
        .map(|(d, e)| (d.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves the approximating graph for each `d` and compares with the exact
/// scattering matrix.
pub fn convergence_study(coupling: &CouplingSt, k: f64, d_values: &[f64]) -> Result<ConvergenceReport> {
    check_momentum(k)?;
    if d_values.len() < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 values of d, got {}", d_values.len())));
    }
    if let Some(&bad) = d_values.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidScale(bad));
    }
    if d_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid("d values must be strictly decreasing".into()));
    }

    let exact = ft_scattering(coupling);
    let rows: Vec<ConvergenceRow> = d_values
        .iter()
        .map(|&d| {
            let outcome = build_approximation(coupling, d)
                .and_then(|g| solve_scattering(&g, k))
                .map(|s| s.distance(&exact));
            ConvergenceRow { d, outcome }
        })
        .collect();

    let ok: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.d, r.error()?))).collect();
    if ok.len() < 3 {
        return Err(Error::InsufficientRows { ok: ok.len(), needed: 3 });
    }
    let fitted_order = fit_order(&ok).ok_or(Error::InsufficientRows { ok: 0, needed: 2 })?;
    Ok(ConvergenceReport { k, rows, fitted_order })
}

/// `d_start * 2^{-j}` for `j = 0..steps`.
pub fn halving_grid(d_start: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|j| d_start * 0.5f64.powi(j as i32)).collect()
}
