//! Vertex couplings on a star graph and their scattering matrices.
//!
//! A scale-invariant coupling is stored in ST-form: a rank split `m` and a
//! complex `m x (n-m)` matrix `T`. The first `m` boundary conditions involve
//! only derivatives,
//!
//! ```text
//! psi_j'(0) + sum_l t_jl psi_l'(0) = 0              j = 1..m
//! psi_j(0) - sum_k conj(t_kj) psi_k(0) = 0          j = m+1..n
//! ```
//!
//! and the scattering matrix does not depend on the momentum.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Library-wide algebraic tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A scale-invariant coupling in ST-form.
///
/// Columns of `T` are stored 0-based; [`CouplingSt::entry`] takes the
/// conventional labels `j in 1..=m`, `l in m+1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSt {
    n: usize,
    m: usize,
    t: CMatrix,
}

impl CouplingSt {
    /// Validates and wraps ST-form data.
    pub fn new(n: usize, m: usize, t: CMatrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegreeTooSmall(n));
        }
        if m < 1 || m > n - 1 {
            return Err(Error::DegenerateRank { n, m });
        }
        if t.nrows() != m || t.ncols() != n - m {
            return Err(Error::DimensionMismatch {
                rows: m,
                cols: n - m,
                got_rows: t.nrows(),
                got_cols: t.ncols(),
            });
        }
        for r in 0..m {
            for c in 0..n - m {
                let z = t[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { n, m, t })
    }

    /// The free (Kirchhoff) coupling: `m = 1`, `T = (1, ..., 1)`.
    pub fn free(n: usize) -> Result<Self> {
        Self::new(n, 1, linalg::ones(1, n.saturating_sub(1)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    /// `t_jl` with 1-based row `j in 1..=m` and shifted column label
    /// `l in m+1..=n`.
    pub fn entry(&self, j: usize, l: usize) -> C64 {
        assert!((1..=self.m).contains(&j), "row label {j} outside 1..={}", self.m);
        assert!(
            (self.m + 1..=self.n).contains(&l),
            "column label {l} outside {}..={}",
            self.m + 1,
            self.n
        );
        self.t[(j - 1, l - self.m - 1)]
    }

    pub fn to_ab(&self) -> CouplingAb {
        st_to_ab(self)
    }

    pub fn scattering(&self) -> ScatteringMatrix {
        ft_scattering(self)
    }
}

/// Validates ST-form data; see [`CouplingSt::new`].
pub fn validate_st(n: usize, m: usize, t: CMatrix) -> Result<CouplingSt> {
    CouplingSt::new(n, m, t)
}

/// General boundary condition `A Psi(0) + B Psi'(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingAb {
    a: CMatrix,
    b: CMatrix,
}

impl CouplingAb {
    /// Checks `rank(A|B) = n` and `A B^dagger = B A^dagger` within `tol`.
    pub fn new(a: CMatrix, b: CMatrix, tol: f64) -> Result<Self> {
        let n = a.nrows();
        if n < 1 {
            return Err(Error::DegreeTooSmall(n));
        }
        for m in [&a, &b] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    rows: n,
                    cols: n,
                    got_rows: m.nrows(),
                    got_cols: m.ncols(),
                });
            }
        }
        for m in [&a, &b] {
            if let Some(pos) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
                // nalgebra iterates column-major
                return Err(Error::NonFinite { row: pos % n, col: pos / n });
            }
        }
        let mut block = CMatrix::zeros(n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&a);
        block.view_mut((0, n), (n, n)).copy_from(&b);
        let rank = linalg::rank(&block, 1e-12);
        if rank != n {
            return Err(Error::RankDeficient { n, rank });
        }
        let abh = &a * b.adjoint();
        let deviation = linalg::hermiticity_defect(&abh);
        let scale = 1.0 + linalg::max_entry_norm(&abh);
        if deviation > tol * scale {
            return Err(Error::NotSelfAdjoint { deviation });
        }
        Ok(Self { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    /// Relabels the edges: edge `i` of the result is edge `perm[i]` of `self`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let n = self.n();
        let a = CMatrix::from_fn(n, n, |i, j| self.a[(perm[i], perm[j])]);
        let b = CMatrix::from_fn(n, n, |i, j| self.b[(perm[i], perm[j])]);
        Self { a, b }
    }
}

/// A scattering matrix: `S_jj` are reflection and `S_ij` transmission
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    s: CMatrix,
}

impl ScatteringMatrix {
    /// Wraps a square matrix, checking unitarity within `tol`.
    pub fn new(s: CMatrix, tol: f64) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                rows: s.nrows().max(1),
                cols: s.nrows().max(1),
                got_rows: s.nrows(),
                got_cols: s.ncols(),
            });
        }
        if let Some(pos) = s.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: pos % s.nrows(), col: pos / s.nrows() });
        }
        let deviation = linalg::unitarity_defect(&s);
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { s })
    }

    /// Wraps without checking. Used where unitarity holds by construction.
    pub(crate) fn from_raw(s: CMatrix) -> Self {
        Self { s }
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn into_matrix(self) -> CMatrix {
        self.s
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.s[(i, j)]
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.s)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.s)
    }

    pub fn distance(&self, other: &ScatteringMatrix) -> f64 {
        linalg::max_entry_distance(&self.s, &other.s)
    }

    /// `S_ij -> S_{perm[i], perm[j]}`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let n = self.n();
        Self { s: CMatrix::from_fn(n, n, |i, j| self.s[(perm[i], perm[j])]) }
    }
}

/// Converts ST-form into the (A, B) pair
///
/// ```text
/// A = [ 0      0 ]     B = [ I  T ]
///     [ -T^+   I ]         [ 0  0 ]
/// ```
pub fn st_to_ab(c: &CouplingSt) -> CouplingAb {
    let (n, m) = (c.n, c.m);
    let mut a = CMatrix::zeros(n, n);
    let mut b = CMatrix::zeros(n, n);
    a.view_mut((m, 0), (n - m, m)).copy_from(&(-c.t.adjoint()));
    a.view_mut((m, m), (n - m, n - m)).fill_with_identity();
    b.view_mut((0, 0), (m, m)).fill_with_identity();
    b.view_mut((0, m), (m, n - m)).copy_from(&c.t);
    CouplingAb { a, b }
}

/// Momentum-independent scattering matrix of an ST-form coupling,
/// assembled blockwise from Cholesky solves with `I + T T^+` and `I + T^+ T`.
pub fn ft_scattering(c: &CouplingSt) -> ScatteringMatrix {
    let (n, m) = (c.n, c.m);
    let t = &c.t;
    let th = t.adjoint();
    let tth = t * &th;
    let tht = &th * t;
    let upper = linalg::identity(m) + &tth;
    let lower = linalg::identity(n - m) + &tht;

    let two = C64::new(2.0, 0.0);
    let ul = linalg::solve_hpd(&upper, &(linalg::identity(m) - &tth));
    let ur = linalg::solve_hpd(&upper, &(t * two));
    let ll = linalg::solve_hpd(&lower, &(&th * two));
    let lr = -linalg::solve_hpd(&lower, &(linalg::identity(n - m) - &tht));

    let mut s = CMatrix::zeros(n, n);
    s.view_mut((0, 0), (m, m)).copy_from(&ul);
    s.view_mut((0, m), (m, n - m)).copy_from(&ur);
    s.view_mut((m, 0), (n - m, m)).copy_from(&ll);
    s.view_mut((m, m), (n - m, n - m)).copy_from(&lr);
    ScatteringMatrix::from_raw(s)
}

/// `S(k) = -(A + ikB)^{-1} (A - ikB)` for general boundary data.
pub fn ks_scattering(c: &CouplingAb, k: f64) -> Result<ScatteringMatrix> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidMomentum(k));
    }
    let ik = C64::new(0.0, k);
    let lhs = &c.a + &c.b * ik;
    let rhs = -(&c.a - &c.b * ik);
    linalg::solve_dense(&lhs, &rhs).map(ScatteringMatrix::from_raw)
}

/// True iff `S(k)` stays within `tol` (max-entry) across all sample pairs.
pub fn is_k_independent(c: &CouplingAb, k_samples: &[f64], tol: f64) -> Result<bool> {
    let mut distinct: Vec<f64> = k_samples.to_vec();
    distinct.sort_by(|a, b| a.total_cmp(b));
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: distinct.len() });
    }
    let matrices = distinct
        .iter()
        .map(|&k| ks_scattering(c, k))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for (i, si) in matrices.iter().enumerate() {
        for sj in &matrices[i + 1..] {
            worst = worst.max(si.distance(sj));
        }
    }
    Ok(worst <= tol)
}

/// Number of real parameters in the `(n-m, m)` family: `2 m (n - m)`.
pub fn parameter_count(n: usize, m: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    if m < 1 || m > n - 1 {
        return Err(Error::DegenerateRank { n, m });
    }
    Ok(2 * m * (n - m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn row(entries: &[C64]) -> CMatrix {
        CMatrix::from_row_slice(1, entries.len(), entries)
    }

    fn free_s(n: usize) -> CMatrix {
        linalg::ones(n, n) * c(2.0 / n as f64, 0.0) - linalg::identity(n)
    }

    #[test]
    fn validate_accepts_free_shape() {
        assert!(CouplingSt::new(3, 1, row(&[c(1.0, 0.0), c(1.0, 0.0)])).is_ok());
    }

    #[test]
    fn validate_rejects_bad_inputs() {
        assert_eq!(
            CouplingSt::new(3, 3, CMatrix::zeros(3, 0)),
            Err(Error::DegenerateRank { n: 3, m: 3 })
        );
        assert_eq!(
            CouplingSt::new(3, 0, CMatrix::zeros(0, 3)),
            Err(Error::DegenerateRank { n: 3, m: 0 })
        );
        assert!(matches!(
            CouplingSt::new(4, 2, CMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { rows: 2, cols: 2, .. })
        ));
        let mut t = CMatrix::zeros(1, 2);
        t[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(CouplingSt::new(3, 1, t), Err(Error::NonFinite { row: 0, col: 1 }));
        assert_eq!(CouplingSt::new(1, 1, CMatrix::zeros(1, 0)), Err(Error::DegreeTooSmall(1)));
    }

    #[test]
    fn entry_uses_shifted_column_labels() {
        let t = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let cp = CouplingSt::new(4, 2, t).unwrap();
        assert_eq!(cp.entry(1, 3), c(1.0, 0.0));
        assert_eq!(cp.entry(2, 4), c(4.0, 0.0));
    }

    #[test]
    fn st_to_ab_two_edges() {
        let t = c(0.3, -1.2);
        let ab = st_to_ab(&CouplingSt::new(2, 1, row(&[t])).unwrap());
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), -t.conj(), c(1.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), t, c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(ab.a(), &a);
        assert_eq!(ab.b(), &b);

        let ab0 = st_to_ab(&CouplingSt::new(2, 1, row(&[c(0.0, 0.0)])).unwrap());
        assert_eq!(ab0.a(), &CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        assert_eq!(ab0.b(), &CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
    }

    #[test]
    fn st_to_ab_output_is_admissible() {
        let t = CMatrix::from_row_slice(2, 1, &[c(2.0, 1.0), c(-0.5, 3.0)]);
        let ab = st_to_ab(&CouplingSt::new(3, 2, t).unwrap());
        assert!(CouplingAb::new(ab.a().clone(), ab.b().clone(), 1e-12).is_ok());
    }

    #[test]
    fn free_coupling_scattering() {
        let s = ft_scattering(&CouplingSt::free(2).unwrap());
        let sx = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(linalg::max_entry_distance(s.matrix(), &sx) < 1e-15);
        for n in 3..=6 {
            let s = ft_scattering(&CouplingSt::free(n).unwrap());
            assert!(linalg::max_entry_distance(s.matrix(), &free_s(n)) < 1e-14);
        }
    }

    #[test]
    fn decoupled_lines_reflect() {
        let s = ft_scattering(&CouplingSt::new(3, 2, CMatrix::zeros(2, 1)).unwrap());
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert_eq!(s.matrix(), &expected);
    }

    #[test]
    fn dirichlet_and_neumann() {
        let n = 3;
        let dir = CouplingAb::new(linalg::identity(n), CMatrix::zeros(n, n), 1e-12).unwrap();
        let neu = CouplingAb::new(CMatrix::zeros(n, n), linalg::identity(n), 1e-12).unwrap();
        for k in [0.1, 1.0, 25.0] {
            let sd = ks_scattering(&dir, k).unwrap();
            let sn = ks_scattering(&neu, k).unwrap();
            assert!(linalg::max_entry_distance(sd.matrix(), &-linalg::identity(n)) < 1e-15);
            assert!(linalg::max_entry_distance(sn.matrix(), &linalg::identity(n)) < 1e-15);
        }
    }

    #[test]
    fn free_coupling_k_independent_in_ab_form() {
        let n = 4;
        let ab = st_to_ab(&CouplingSt::free(n).unwrap());
        for k in [0.5, 1.0, 2.0] {
            let s = ks_scattering(&ab, k).unwrap();
            assert!(linalg::max_entry_distance(s.matrix(), &free_s(n)) < 1e-12);
        }
    }

    #[test]
    fn ks_scattering_rejects_bad_momentum() {
        let ab = st_to_ab(&CouplingSt::free(2).unwrap());
        assert_eq!(ks_scattering(&ab, 0.0), Err(Error::InvalidMomentum(0.0)));
        assert!(ks_scattering(&ab, -1.0).is_err());
    }

    fn delta_coupling(alpha: f64) -> CouplingAb {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(-1.0, 0.0), c(-alpha, 0.0), c(0.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        CouplingAb::new(a, b, 1e-12).unwrap()
    }

    #[test]
    fn k_independence_detection() {
        let ab = st_to_ab(&CouplingSt::new(3, 1, row(&[c(2.0, 0.0), c(0.0, 1.0)])).unwrap());
        assert!(is_k_independent(&ab, &[0.3, 1.0, 7.0], 1e-10).unwrap());
        assert!(!is_k_independent(&delta_coupling(1.0), &[1.0, 2.0], 1e-10).unwrap());
        assert_eq!(
            is_k_independent(&ab, &[1.0], 1e-10),
            Err(Error::TooFewSamples { needed: 2, got: 1 })
        );
        assert!(is_k_independent(&ab, &[1.0, 1.0], 1e-10).is_err());
    }

    #[test]
    fn delta_coupling_matches_textbook_amplitudes() {
        // two-line delta: R = alpha / (2ik - alpha), T = 2ik / (2ik - alpha)
        let alpha = 1.0;
        let k = 1.5;
        let s = ks_scattering(&delta_coupling(alpha), k).unwrap();
        let den = c(-alpha, 2.0 * k);
        assert!((s.get(0, 0) - c(alpha, 0.0) / den).norm() < 1e-14);
        assert!((s.get(1, 0) - c(0.0, 2.0 * k) / den).norm() < 1e-14);
    }

    #[test]
    fn inadmissible_ab_rejected() {
        let n = 2;
        assert!(matches!(
            CouplingAb::new(CMatrix::zeros(n, n), CMatrix::zeros(n, n), 1e-10),
            Err(Error::RankDeficient { n: 2, rank: 0 })
        ));
        let a = linalg::identity(2);
        let b = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(CouplingAb::new(a, b, 1e-10), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(parameter_count(4, 2), Ok(8));
        assert_eq!(parameter_count(2, 1), Ok(2));
        assert_eq!(parameter_count(5, 1), Ok(8));
        for n in 2..=9 {
            let best = (1..n).map(|m| parameter_count(n, m).unwrap()).max().unwrap();
            assert_eq!(best, n * n / 2);
            assert_eq!(parameter_count(n, n / 2).unwrap(), best);
        }
        assert!(parameter_count(4, 4).is_err());
    }
}
