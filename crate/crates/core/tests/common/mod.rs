#![allow(dead_code)]

use ftvertex::{CMatrix, CouplingSt, FreeLikeCase, FreeLikeForm, Permutation, C64};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn st(n: usize, m: usize, entries: &[C64]) -> CouplingSt {
    CouplingSt::new(n, m, CMatrix::from_row_slice(m, n - m, entries)).unwrap()
}

/// Uniform point of the unit disk times `scale`.
pub fn disk_point(rng: &mut impl Rng, scale: f64) -> C64 {
    let r: f64 = rng.random::<f64>().sqrt();
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r * scale, phi)
}

/// Random coupling with entries in the unit disk scaled by up to 10.
pub fn random_coupling(rng: &mut impl Rng, n: usize, m: usize) -> CouplingSt {
    let scale = rng.random_range(0.01..=10.0);
    let t = CMatrix::from_fn(m, n - m, |_, _| disk_point(rng, scale));
    CouplingSt::new(n, m, t).unwrap()
}

pub fn random_coupling_any(rng: &mut impl Rng, max_n: usize) -> CouplingSt {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(1..n);
    random_coupling(rng, n, m)
}

pub fn random_phases(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (1..n).map(|_| rng.random_range(-10.0..10.0)).collect()
}

pub fn random_form(rng: &mut impl Rng, max_n: usize) -> FreeLikeForm {
    let case = [FreeLikeCase::MinusJ, FreeLikeCase::PlusJ, FreeLikeCase::Balanced][rng.random_range(0..3)];
    let n = match case {
        FreeLikeCase::Balanced => 2 * rng.random_range(1..=max_n / 2),
        _ => rng.random_range(2..=max_n),
    };
    let perm = if case == FreeLikeCase::Balanced {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        Permutation::new(p).unwrap()
    } else {
        Permutation::identity(n)
    };
    FreeLikeForm::new(n, case, random_phases(rng, n), perm).unwrap()
}

/// Scattering matrix by direct solution of the boundary-value problem.
///
/// For a unit wave incoming on line `i`, the unknowns are `psi(0)` and
/// `psi'(0)`; the `n` vertex conditions are written straight from the
/// coupling entries and closed with `ik psi(0) - psi'(0) = 2ik e_i`.
pub fn brute_force_scattering(cp: &CouplingSt, k: f64) -> CMatrix {
    let (n, m) = (cp.n(), cp.m());
    let ik = C64::new(0.0, k);
    let mut sys = DMatrix::<C64>::zeros(2 * n, 2 * n);
    for j in 1..=m {
        // psi_j' + sum_l t_jl psi_l' = 0
        sys[(j - 1, n + j - 1)] = c(1.0, 0.0);
        for l in m + 1..=n {
            sys[(j - 1, n + l - 1)] += cp.entry(j, l);
        }
    }
    for j in m + 1..=n {
        // psi_j - sum_k conj(t_kj) psi_k = 0
        sys[(j - 1, j - 1)] = c(1.0, 0.0);
        for k_row in 1..=m {
            sys[(j - 1, k_row - 1)] -= cp.entry(k_row, j).conj();
        }
    }
    for r in 0..n {
        sys[(n + r, r)] = ik;
        sys[(n + r, n + r)] = c(-1.0, 0.0);
    }
    let lu = sys.lu();
    let mut s = CMatrix::zeros(n, n);
    for i in 0..n {
        let mut rhs = nalgebra::DVector::<C64>::zeros(2 * n);
        rhs[n + i] = ik * 2.0;
        let x = lu.solve(&rhs).expect("boundary-value system is regular");
        for j in 0..n {
            s[(j, i)] = x[j] - if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
        }
    }
    s
}

pub fn free_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| c(2.0 / n as f64 - if i == j { 1.0 } else { 0.0 }, 0.0))
}

/// Eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    h.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
}
