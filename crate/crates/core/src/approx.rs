//! Approximation of a scale-invariant vertex by `n` delta couplings joined
//! by short edges carrying constant vector potentials.
//!
//! Each half-line endpoint `V_j` carries a delta coupling of strength
//! `alpha_j`. Endpoints are joined by connectors of length `d / gamma` whose
//! middle half supports a constant vector potential `A`. The only effect of
//! that potential on transport is the phase `A d / (2 gamma)`, and the
//! parameters are chosen so that `gamma e^{-i A d / (2 gamma)}` reproduces
//! the coupling matrix entries exactly:
//!
//! * cross connector `V_l -> V_j` (`j <= m < l`): `conj(t_jl)`,
//! * intra connector `V_j -> V_k` (`j < k <= m`): `-sigma_jk` with
//!   `sigma_jk = sum_l t_jl conj(t_kl)`.

use crate::coupling::CouplingSt;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Couplings with modulus below this (relative to the scale of `T`) do not
/// get a connector.
const NEGLIGIBLE: f64 = 1e-14;

/// An edge joining two half-line endpoints, oriented `from -> to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connector {
    from: usize,
    to: usize,
    gamma: f64,
    potential: f64,
    length: f64,
}

impl Connector {
    /// Endpoints are 0-based. `d` fixes the length `d / gamma`.
    pub fn new(from: usize, to: usize, gamma: f64, potential: f64, d: f64) -> Result<Self> {
        if from == to {
            return Err(Error::InvalidConnector(format!("self-loop at vertex {from}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConnector(format!("gamma = {gamma} must be positive")));
        }
        if !potential.is_finite() {
            return Err(Error::InvalidConnector(format!("potential = {potential} is not finite")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidScale(d));
        }
        Ok(Self { from, to, gamma, potential, length: d / gamma })
    }

    pub fn from(&self) -> usize {
        self.from
    }

    pub fn to(&self) -> usize {
        self.to
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Vector potential strength for the stored orientation.
    pub fn potential(&self) -> f64 {
        self.potential
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Support `[L/4, 3L/4]` of the vector potential.
    pub fn support(&self) -> (f64, f64) {
        (0.25 * self.length, 0.75 * self.length)
    }

    /// Phase `A * (support length)` picked up across the connector.
    pub fn phase(&self) -> f64 {
        self.potential * 0.5 * self.length
    }

    /// The same edge traversed `to -> from`.
    pub fn reversed(&self) -> Self {
        Self {
            from: self.to,
            to: self.from,
            potential: -self.potential,
            ..self.clone()
        }
    }

    /// `gamma e^{-i phase}`, the coupling entry this connector reproduces.
    pub fn weight(&self) -> C64 {
        C64::from_polar(self.gamma, -self.phase())
    }
}

/// The approximating graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxGraph {
    n: usize,
    d: f64,
    alpha: Vec<f64>,
    connectors: Vec<Connector>,
}

impl ApproxGraph {
    pub fn new(n: usize, d: f64, alpha: Vec<f64>, connectors: Vec<Connector>) -> Result<Self> {
        if n < 1 {
            return Err(Error::DegreeTooSmall(n));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidScale(d));
        }
        if alpha.len() != n {
            return Err(Error::InvalidStrengths(format!("{} strengths for {n} vertices", alpha.len())));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidStrengths("non-finite strength".into()));
        }
        let mut pairs = std::collections::HashSet::new();
        for c in &connectors {
            if c.from >= n || c.to >= n {
                return Err(Error::InvalidConnector(format!(
                    "endpoint ({}, {}) outside 0..{n}",
                    c.from, c.to
                )));
            }
            if (c.length - d / c.gamma).abs() > 1e-12 * c.length {
                return Err(Error::InvalidConnector("length inconsistent with d / gamma".into()));
            }
            if !pairs.insert((c.from.min(c.to), c.from.max(c.to))) {
                return Err(Error::InvalidConnector(format!(
                    "duplicate connector between {} and {}",
                    c.from, c.to
                )));
            }
        }
        Ok(Self { n, d, alpha, connectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    /// Connector joining `a` and `b` in either orientation.
    pub fn connector_between(&self, a: usize, b: usize) -> Option<&Connector> {
        self.connectors
            .iter()
            .find(|c| (c.from, c.to) == (a, b) || (c.from, c.to) == (b, a))
    }

    /// Largest deviation of a connector weight from the coupling entry it
    /// is meant to reproduce. A missing connector counts as weight zero.
    pub fn reconstruction_residual(&self, coupling: &CouplingSt) -> f64 {
        connector_targets(coupling)
            .into_iter()
            .map(|(j, k, target)| {
                let got = match self.connector_between(j, k) {
                    Some(c) if c.from == j => c.weight(),
                    Some(c) => c.reversed().weight(),
                    None => C64::new(0.0, 0.0),
                };
                (got - target).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `(j, k, target)` triples: `gamma e^{-i phase}` of the connector oriented
/// `j -> k` must equal `target`. Cross targets are oriented high -> low.
fn connector_targets(c: &CouplingSt) -> Vec<(usize, usize, C64)> {
    let (n, m) = (c.n(), c.m());
    let t = c.t();
    let mut out = Vec::new();
    for j in 0..m {
        for l in m..n {
            out.push((l, j, t[(j, l - m)].conj()));
        }
    }
    for j in 0..m {
        for k in j + 1..m {
            out.push((j, k, -sigma(c, j, k)));
        }
    }
    out
}

/// `sigma_jk = sum_l t_jl conj(t_kl)` for 0-based rows.
fn sigma(c: &CouplingSt, j: usize, k: usize) -> C64 {
    let t = c.t();
    (0..t.ncols()).map(|l| t[(j, l)] * t[(k, l)].conj()).sum()
}

/// Builds the approximating graph of scale `d` for an ST-form coupling.
pub fn build_approximation(coupling: &CouplingSt, d: f64) -> Result<ApproxGraph> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidScale(d));
    }
    let (n, m) = (coupling.n(), coupling.m());
    let t = coupling.t();
    let scale = 1.0 + linalg::max_entry_norm(t).powi(2);
    let negligible = NEGLIGIBLE * scale;

    let mut connectors = Vec::new();
    for (from, to, target) in connector_targets(coupling) {
        let gamma = target.norm();
        if gamma <= negligible {
            continue;
        }
        // gamma e^{-i A d / (2 gamma)} = target, principal branch taken on
        // t_jl for cross connectors and on -sigma_jk for intra ones
        let potential = if from >= m {
            2.0 * gamma / d * linalg::principal_arg(target.conj())
        } else {
            -2.0 * gamma / d * linalg::principal_arg(target)
        };
        connectors.push(Connector::new(from, to, gamma, potential, d)?);
    }

    let mut alpha = vec![0.0; n];
    for (l, a) in alpha.iter_mut().enumerate().skip(m) {
        let attached: f64 = (0..m).map(|j| t[(j, l - m)].norm()).sum();
        *a = (1.0 - attached) / d;
    }
    for (j, a) in alpha.iter_mut().enumerate().take(m) {
        let row = t.row(j);
        let square: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        let plain: f64 = row.iter().map(|z| z.norm()).sum();
        let intra: f64 = (0..m)
            .filter(|&k| k != j)
            .map(|k| sigma(coupling, j, k).norm())
            .filter(|&g| g > negligible)
            .sum();
        *a = (square - intra - plain) / d;
    }

    ApproxGraph::new(n, d, alpha, connectors)
}
