//! Acceptance criteria, one line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use ftvertex::approx::build_approximation;
use ftvertex::linalg::{identity, max_entry_distance};
use ftvertex::solver::halving_grid;
use ftvertex::{
    build_freelike, classify_freelike, connector_transfer, convergence_study, enumerate_time_reversal,
    ft_scattering, ks_scattering, realize_smatrix, solve_scattering, st_to_ab, CMatrix, Connector,
    FreeLikeCase, FreeLikeForm, Permutation, ScatteringMatrix, TransferMode,
};
use rand::seq::SliceRandom;
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn free_exactness() -> Check {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let c = st(n, 1, &vec![c(1.0, 0.0); n - 1]);
        worst = worst.max(max_entry_distance(ft_scattering(&c).matrix(), &free_matrix(n)));
    }
    ensure(worst <= 1e-12, format!("max error {worst:.2e}"))
}

fn algebraic_properties() -> Check {
    let mut r = rng(2);
    let (mut worst, mut bad_mult) = (0.0f64, 0usize);
    for n in 2..=8 {
        for _ in 0..200 {
            let m = r.random_range(1..n);
            let c = random_coupling(&mut r, n, m);
            let s = ft_scattering(&c);
            let sq = max_entry_distance(&(s.matrix() * s.matrix()), &identity(n));
            worst = worst.max(s.unitarity_defect()).max(s.hermiticity_defect()).max(sq);
            let eig = hermitian_eigenvalues(s.matrix());
            let plus = eig.iter().filter(|e| (*e - 1.0).abs() <= 1e-10).count();
            let minus = eig.iter().filter(|e| (*e + 1.0).abs() <= 1e-10).count();
            if plus != m || plus + minus != n {
                bad_mult += 1;
            }
        }
    }
    ensure(
        worst <= 1e-10 && bad_mult == 0,
        format!("1400 couplings, max defect {worst:.2e}, multiplicity failures {bad_mult}"),
    )
}

fn k_independence() -> Check {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let c = random_coupling_any(&mut r, 8);
        let exact = ft_scattering(&c);
        let ab = st_to_ab(&c);
        for k in [0.3, 1.0, 7.0] {
            let s = ks_scattering(&ab, k).map_err(|e| e.to_string())?;
            worst = worst.max(s.distance(&exact));
        }
    }
    ensure(worst <= 1e-10, format!("max distance {worst:.2e}"))
}

fn freelike_moduli() -> Check {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for case in [FreeLikeCase::MinusJ, FreeLikeCase::PlusJ, FreeLikeCase::Balanced] {
        for n in 2..=8 {
            if case == FreeLikeCase::Balanced && n % 2 == 1 {
                continue;
            }
            for _ in 0..20 {
                let perm = if case == FreeLikeCase::Balanced {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut r);
                    Permutation::new(p).unwrap()
                } else {
                    Permutation::identity(n)
                };
                let form = FreeLikeForm::new(n, case, random_phases(&mut r, n), perm).unwrap();
                let s = build_freelike(&form).scattering();
                let (diag, off) = (1.0 - 2.0 / n as f64, 2.0 / n as f64);
                for i in 0..n {
                    for j in 0..n {
                        let want = if i == j { diag } else { off };
                        worst = worst.max((s.get(i, j).norm() - want).abs());
                    }
                }
                count += 1;
            }
        }
    }
    ensure(worst <= 1e-10, format!("{count} constructions, max modulus error {worst:.2e}"))
}

fn classification_round_trip() -> Check {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    let mut seen = [false; 3];
    for _ in 0..500 {
        let form = random_form(&mut r, 8);
        let s = realize_smatrix(&form);
        let back = classify_freelike(&s, 1e-9).map_err(|e| format!("classification failed: {e}"))?;
        let n = back.n();
        let (slot, p) = match back.case() {
            FreeLikeCase::MinusJ => (0, 0),
            FreeLikeCase::PlusJ => (1, n),
            FreeLikeCase::Balanced => (2, n / 2),
        };
        if back.p() != p {
            return Err(format!("{} with p={}", back.case(), back.p()));
        }
        seen[slot] = true;
        worst = worst.max(realize_smatrix(&back).distance(&s));
    }
    ensure(
        worst <= 1e-9 && seen.iter().all(|x| *x),
        format!("500 forms, max residual {worst:.2e}, cases seen {seen:?}"),
    )
}

fn time_reversal_count() -> Check {
    let mut min_gap = f64::INFINITY;
    for case in [FreeLikeCase::MinusJ, FreeLikeCase::PlusJ] {
        for n in 2..=5 {
            let list = enumerate_time_reversal(n, case).map_err(|e| e.to_string())?;
            if list.len() != 1 << (n - 1) {
                return Err(format!("{case} n={n}: {} entries", list.len()));
            }
            let mats: Vec<&ScatteringMatrix> = list.iter().map(|(_, s)| s).collect();
            for i in 0..mats.len() {
                for j in i + 1..mats.len() {
                    min_gap = min_gap.min(mats[i].distance(mats[j]));
                }
            }
        }
    }
    ensure(min_gap > 1e-6, format!("2^(n-1) entries, min pairwise distance {min_gap:.3}"))
}

fn reconstruction_identity() -> Check {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let c = random_coupling_any(&mut r, 8);
        let d = r.random_range(1e-3..1.0);
        let g = build_approximation(&c, d).map_err(|e| e.to_string())?;
        worst = worst.max(g.reconstruction_residual(&c));
    }
    ensure(worst <= 1e-12, format!("max residual {worst:.2e}"))
}

fn transfer_oracle() -> Check {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = r.random_range(-20.0..20.0);
        let k = r.random_range(0.1..5.0);
        let gamma = r.random_range(0.1..3.0);
        let d = r.random_range(0.01..1.0);
        let conn = Connector::new(0, 1, gamma, a, d).unwrap();
        let closed = connector_transfer(&conn, k, TransferMode::PhaseFactor);
        let seg = connector_transfer(&conn, k, TransferMode::Segmented);
        let dist = closed.iter().zip(seg.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        worst = worst.max(dist);
    }
    ensure(worst <= 1e-12, format!("1000 draws, max distance {worst:.2e}"))
}

fn convergence_basket() -> Check {
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let basket = [
        ("n=2 T=[1]", st(2, 1, &[one])),
        ("n=2 T=[2]", st(2, 1, &[c(2.0, 0.0)])),
        ("n=2 T=[i]", st(2, 1, &[i])),
        ("n=3 T=[2,i]", st(3, 1, &[c(2.0, 0.0), i])),
        ("n=3 T=col[1,i]", st(3, 2, &[one, i])),
        ("n=4 T=J/2", st(4, 2, &[c(0.5, 0.0); 4])),
    ];
    let grid = halving_grid(0.2, 6);
    let mut summary = Vec::new();
    let mut ok = true;
    for (name, coupling) in &basket {
        let report = convergence_study(coupling, 1.0, &grid).map_err(|e| format!("{name}: {e}"))?;
        let final_error = report.final_error().unwrap_or(f64::NAN);
        let ratios = report.ratios();
        let tail = &ratios[ratios.len().saturating_sub(3)..];
        let pass = report.failures().next().is_none()
            && report.fitted_order >= 0.8
            && final_error <= 0.05
            && tail.len() == 3
            && tail.iter().all(|q| (0.3..=0.7).contains(q));
        ok &= pass;
        summary.push(format!("{name}: order {:.3}, final {final_error:.1e}", report.fitted_order));
    }
    ensure(ok, summary.join("; "))
}

fn analytic_anchor() -> Check {
    let (d, k) = (0.1, 1.0);
    let g = build_approximation(&st(2, 1, &[c(1.0, 0.0)]), d).map_err(|e| e.to_string())?;
    let s = solve_scattering(&g, k).map_err(|e| e.to_string())?;
    let phase = c(0.0, k * d).exp();
    let zero = c(0.0, 0.0);
    let expected = CMatrix::from_row_slice(2, 2, &[zero, phase, phase, zero]);
    let err = max_entry_distance(s.matrix(), &expected);
    ensure(err <= 1e-10, format!("max error {err:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("free-coupling exactness", free_exactness),
        ("algebraic property suite", algebraic_properties),
        ("k-independence", k_independence),
        ("free-like moduli", freelike_moduli),
        ("classification round-trip", classification_round_trip),
        ("time-reversal count", time_reversal_count),
        ("reconstruction identity", reconstruction_identity),
        ("transfer-matrix oracle", transfer_oracle),
        ("convergence basket", convergence_basket),
        ("analytic anchor", analytic_anchor),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {tag} {name} ({detail}) [{secs:.2}s]", idx + 1);
        failed += usize::from(result.is_err());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
