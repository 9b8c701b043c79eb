//! Free-like couplings: scattering amplitudes with the same moduli as the
//! free vertex, `|R_j| = 1 - 2/n` and `|T_ij| = 2/n`.
//!
//! Every free-like scattering matrix is a diagonal-phase conjugate
//! `D^+ M D` of one of three canonical matrices `M`, with `D = diag(1,
//! e^{i xi_2}, ..., e^{i xi_n})`:
//!
//! * `MinusJ`:   `M = -I + (2/n) J`
//! * `PlusJ`:    `M =  I - (2/n) J`
//! * `Balanced`: `n` even, edges relabeled by a permutation, and
//!   `M = [[I - (2/n)J, (2/n)J], [(2/n)J, -I + (2/n)J]]` in `n/2` blocks.

use std::fmt;

use crate::coupling::{ft_scattering, CouplingAb, CouplingSt, ScatteringMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Default moduli tolerance for [`is_freelike`] and [`classify_freelike`].
pub const FREELIKE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeLikeCase {
    /// No positive reflection amplitude (`p = 0`).
    MinusJ,
    /// All reflection amplitudes positive (`p = n`).
    PlusJ,
    /// Half of the reflection amplitudes positive (`p = n/2`).
    Balanced,
}

impl fmt::Display for FreeLikeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FreeLikeCase::MinusJ => "MinusJ",
            FreeLikeCase::PlusJ => "PlusJ",
            FreeLikeCase::Balanced => "Balanced",
        };
        f.write_str(s)
    }
}

/// Edge relabeling: edge `i` sits at canonical position `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() {
                return Err(Error::InvalidPermutation(format!(
                    "entry {p} out of range for length {}",
                    perm.len()
                )));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!("entry {p} repeated")));
            }
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Canonical data of a free-like scattering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeLikeForm {
    n: usize,
    case: FreeLikeCase,
    phases: Vec<f64>,
    permutation: Permutation,
}

impl FreeLikeForm {
    /// `phases` are `xi_2..xi_n` (the leading phase is fixed to zero) and are
    /// wrapped into `[0, 2 pi)`. Non-balanced forms must use the identity
    /// permutation.
    pub fn new(
        n: usize,
        case: FreeLikeCase,
        phases: Vec<f64>,
        permutation: Permutation,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegreeTooSmall(n));
        }
        if case == FreeLikeCase::Balanced && !n.is_multiple_of(2) {
            return Err(Error::BalancedOddDegree(n));
        }
        if phases.len() != n - 1 {
            return Err(Error::PhaseCount { expected: n - 1, got: phases.len() });
        }
        if phases.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        if permutation.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "length {} does not match n = {n}",
                permutation.len()
            )));
        }
        if case != FreeLikeCase::Balanced && !permutation.is_identity() {
            return Err(Error::InvalidPermutation(format!(
                "{case} form takes the identity permutation"
            )));
        }
        let phases = phases.into_iter().map(linalg::wrap_phase).collect();
        Ok(Self { n, case, phases, permutation })
    }

    /// Form with the identity permutation.
    pub fn unpermuted(n: usize, case: FreeLikeCase, phases: Vec<f64>) -> Result<Self> {
        Self::new(n, case, phases, Permutation::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn case(&self) -> FreeLikeCase {
        self.case
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    /// Number of positive reflection amplitudes.
    pub fn p(&self) -> usize {
        match self.case {
            FreeLikeCase::MinusJ => 0,
            FreeLikeCase::PlusJ => self.n,
            FreeLikeCase::Balanced => self.n / 2,
        }
    }

    /// `e^{i xi_j}` for `j = 1..n` with `xi_1 = 0`.
    fn gauge(&self) -> Vec<C64> {
        std::iter::once(C64::new(1.0, 0.0))
            .chain(self.phases.iter().map(|&x| C64::from_polar(1.0, x)))
            .collect()
    }
}

/// An ST-form coupling together with the edge relabeling that realizes a
/// balanced free-like form.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeLikeCoupling {
    pub coupling: CouplingSt,
    pub permutation: Permutation,
}

impl FreeLikeCoupling {
    /// Scattering matrix in the relabeled edge order.
    pub fn scattering(&self) -> ScatteringMatrix {
        ft_scattering(&self.coupling).relabeled(self.permutation.as_slice())
    }

    /// (A, B) data in the relabeled edge order.
    pub fn to_ab(&self) -> CouplingAb {
        self.coupling.to_ab().relabeled(self.permutation.as_slice())
    }
}

fn canonical_matrix(n: usize, case: FreeLikeCase) -> CMatrix {
    let w = 2.0 / n as f64;
    let half = n / 2;
    CMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 } else { 0.0 };
        let v = match case {
            FreeLikeCase::MinusJ => w - diag,
            FreeLikeCase::PlusJ => diag - w,
            FreeLikeCase::Balanced => match (i < half, j < half) {
                (true, true) => diag - w,
                (false, false) => w - diag,
                _ => w,
            },
        };
        C64::new(v, 0.0)
    })
}

/// True iff all diagonal moduli are within `tol` of `1 - 2/n` and all
/// off-diagonal moduli within `tol` of `2/n`.
pub fn is_freelike(s: &ScatteringMatrix, tol: f64) -> bool {
    let n = s.n();
    if n < 2 {
        return false;
    }
    let w = 2.0 / n as f64;
    let m = s.matrix();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let target = if i == j { 1.0 - w } else { w };
            (m[(i, j)].norm() - target).abs() <= tol
        })
    })
}

/// Closed-form scattering matrix of a free-like form: `P^{-1} D^+ M D P`.
pub fn realize_smatrix(form: &FreeLikeForm) -> ScatteringMatrix {
    let n = form.n;
    let g = form.gauge();
    let m = canonical_matrix(n, form.case);
    let canonical = CMatrix::from_fn(n, n, |i, j| g[i].conj() * m[(i, j)] * g[j]);
    ScatteringMatrix::from_raw(canonical).relabeled(form.permutation.as_slice())
}

/// ST-form coupling realizing a free-like form.
///
/// * `MinusJ`: `m = 1`, `T = (e^{i xi_2}, ..., e^{i xi_n})`.
/// * `PlusJ`: `m = n - 1`, `T` the column `t_j = -e^{i (xi_n - xi_j)}`.
/// * `Balanced`: `m = n/2`, `T = (2/n) X^+ J Y` with
///   `X = diag(1, e^{i xi_2}, ..., e^{i xi_{n/2}})`,
///   `Y = diag(e^{i xi_{n/2+1}}, ..., e^{i xi_n})`, plus the form's relabeling.
pub fn build_freelike(form: &FreeLikeForm) -> FreeLikeCoupling {
    let n = form.n;
    let g = form.gauge();
    let (m, t) = match form.case {
        FreeLikeCase::MinusJ => (1, CMatrix::from_fn(1, n - 1, |_, c| g[c + 1])),
        FreeLikeCase::PlusJ => (n - 1, CMatrix::from_fn(n - 1, 1, |r, _| -(g[n - 1] * g[r].conj()))),
        FreeLikeCase::Balanced => {
            let half = n / 2;
            let w = C64::new(2.0 / n as f64, 0.0);
            (half, CMatrix::from_fn(half, half, |r, c| w * g[r].conj() * g[half + c]))
        }
    };
    let coupling = CouplingSt::new(n, m, t).expect("free-like T has the ST-form shape");
    FreeLikeCoupling { coupling, permutation: form.permutation.clone() }
}

/// Recovers the canonical form of a free-like Hermitian scattering matrix.
///
/// The permutation is the stable sort that moves positive reflection
/// amplitudes to the front. Phases come from the first row of the sorted
/// matrix; balanced matrices get a second correction from row `p + 1`.
pub fn classify_freelike(s: &ScatteringMatrix, tol: f64) -> Result<FreeLikeForm> {
    let n = s.n();
    if !is_freelike(s, tol) {
        return Err(Error::NotFreeLike);
    }
    let herm = s.hermiticity_defect();
    if herm > tol {
        return Err(Error::NotHermitian { deviation: herm });
    }
    let form = if n == 2 { classify_two(s)? } else { classify_general(s)? };
    let residual = realize_smatrix(&form).distance(s);
    // moduli within tol still allow O(tol) phase noise in the reconstruction
    if residual > 10.0 * tol {
        return Err(Error::ReconstructionMismatch { residual });
    }
    Ok(form)
}

/// For `n = 2` the diagonal vanishes and every Hermitian free-like matrix
/// `[[0, z], [conj z, 0]]` fits both non-balanced forms; pick the one whose
/// phase is closer to zero.
fn classify_two(s: &ScatteringMatrix) -> Result<FreeLikeForm> {
    let z = s.get(0, 1);
    if z.re >= 0.0 {
        FreeLikeForm::unpermuted(2, FreeLikeCase::MinusJ, vec![z.arg()])
    } else {
        FreeLikeForm::unpermuted(2, FreeLikeCase::PlusJ, vec![(-z).arg()])
    }
}

fn classify_general(s: &ScatteringMatrix) -> Result<FreeLikeForm> {
    let n = s.n();
    let positive: Vec<bool> = (0..n).map(|i| s.get(i, i).re > 0.0).collect();
    let p = positive.iter().filter(|&&b| b).count();
    let case = match p {
        0 => FreeLikeCase::MinusJ,
        p if p == n => FreeLikeCase::PlusJ,
        p if 2 * p == n => FreeLikeCase::Balanced,
        _ => return Err(Error::InconsistentSplit { n, p }),
    };

    // order[c] = edge at canonical position c
    let order: Vec<usize> = (0..n)
        .filter(|&i| positive[i])
        .chain((0..n).filter(|&i| !positive[i]))
        .collect();
    let mut perm = vec![0; n];
    for (c, &e) in order.iter().enumerate() {
        perm[e] = c;
    }
    let sorted = CMatrix::from_fn(n, n, |a, b| s.get(order[a], order[b]));
    let canonical = canonical_matrix(n, case);

    // first pass: make the first row real and equal to the canonical one
    let mut gauge: Vec<C64> = (0..n)
        .map(|j| unit(sorted[(0, j)] / canonical[(0, j)]))
        .collect();
    gauge[0] = C64::new(1.0, 0.0);

    if case == FreeLikeCase::Balanced {
        // second pass on row p + 1 of the first-pass matrix
        let pivot = p;
        let corrected = |j: usize| gauge[pivot] * sorted[(pivot, j)] * gauge[j].conj();
        let second: Vec<C64> = (0..n)
            .map(|j| {
                if j > pivot {
                    unit(corrected(j) / canonical[(pivot, j)])
                } else {
                    C64::new(1.0, 0.0)
                }
            })
            .collect();
        for (g, h) in gauge.iter_mut().zip(&second) {
            *g *= h;
        }
    }

    let phases = gauge[1..].iter().map(|z| z.arg()).collect();
    FreeLikeForm::new(n, case, phases, Permutation::new(perm)?)
}

fn unit(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// All free-like couplings of one case with phases restricted to `{0, pi}`,
/// i.e. real `T`. Balanced forms use the identity partition.
pub fn enumerate_time_reversal(
    n: usize,
    case: FreeLikeCase,
) -> Result<Vec<(CouplingSt, ScatteringMatrix)>> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    if case == FreeLikeCase::Balanced && !n.is_multiple_of(2) {
        return Err(Error::BalancedOddDegree(n));
    }
    let count = 1usize << (n - 1);
    (0..count)
        .map(|bits| {
            let phases = (0..n - 1)
                .map(|b| if bits >> b & 1 == 1 { std::f64::consts::PI } else { 0.0 })
                .collect();
            let form = FreeLikeForm::unpermuted(n, case, phases)?;
            let built = build_freelike(&form);
            let s = built.scattering();
            Ok((built.coupling, s))
        })
        .collect()
}
