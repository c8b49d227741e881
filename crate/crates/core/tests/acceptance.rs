//! Acceptance gate: one pass/fail line per criterion.
//!
//! Runs every criterion (or only those given as numeric arguments) at its
//! pinned tolerance and exits non-zero if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use common::{bessel_j, gibbs_excited, weyl};
use lzsm::analytic::{
    arc_full, background, bloch_steady_longitudinal, bloch_steady_transverse, delta_n_table, effective_tunneling,
    fit_gamma, longitudinal_population, transverse_population, ArcCurve, Coupling,
};
use lzsm::floquet::transition_elements;
use lzsm::io::{read_pattern, read_spectrum, write_pattern, write_spectrum, SpectrumPayload};
use lzsm::model::{BathParams, DrivingShape, QubitParams};
use lzsm::num::linspace;
use lzsm::redfield::{solve_point, PipelineOptions};
use lzsm::spectra::{
    default_decay_window, fit_decay, fourier2d, match_ridges, pattern_overlap, ridge_contrast, sample_arc,
    sweep_pattern, sweep_patterns, PatternGrid, SpectrumGrid, SweepOptions,
};

// fixed physical parameters shared by the criteria
const DELTA: f64 = 0.5;
const ALPHA: f64 = 1e-3;
const BETA: f64 = 10.0;
const AMP: f64 = 10.0;

// pinned thresholds
const C1_RUNTIME_S: f64 = 120.0;
const C2_RMS: f64 = 0.02;
const C4_ABS: f64 = 0.06;
const C5_TOL: f64 = 1e-8;
const C6_TOL: f64 = 1e-9;
const C7_BINS: f64 = 1.0;
const C7_F3_BINS: f64 = 3.0;
const C8_BINS: f64 = 1.0;
const C8_CONTRAST: f64 = 2.0;
const C9_RATE: f64 = 0.4;
const C9_REL: f64 = 0.25;
const C9_SPREAD: f64 = 0.5;
const C10_TOL: f64 = 5e-4;
const C11_TOL: f64 = 1e-10;

type Outcome = Result<Vec<String>, Vec<String>>;

fn template() -> QubitParams<f64> {
    QubitParams::new(0.0, DELTA, 0.0).unwrap()
}

fn eps_axis() -> Vec<f64> {
    linspace(-10.0, 10.0, 201)
}

fn amp_axis() -> Vec<f64> {
    linspace(0.0, 15.0, 151)
}

const ALPHAS: [f64; 4] = [0.01, 0.02, 0.05, 0.1];
const THETAS: [f64; 6] = [0.0, FRAC_PI_8 / 2.0, FRAC_PI_8, 3.0 * FRAC_PI_8 / 2.0, FRAC_PI_4, FRAC_PI_2];

/// Baths of the shared cosine sweep: six mixing angles at the reference
/// bath, the strong-coupling bath, then transverse and longitudinal at the
/// high temperature for each `ALPHAS` entry.
fn cosine_baths() -> Vec<BathParams<f64>> {
    let mut b: Vec<BathParams<f64>> = THETAS.iter().map(|&th| BathParams::new(ALPHA, BETA, th).unwrap()).collect();
    b.push(BathParams::transverse(0.05, BETA));
    b.extend(ALPHAS.iter().map(|&a| BathParams::transverse(a, 2.0)));
    b.extend(ALPHAS.iter().map(|&a| BathParams::longitudinal(a, 2.0)));
    b
}
const IDX_STRONG: usize = 6;
const IDX_X_HOT: usize = 7;
const IDX_Z_HOT: usize = 11;

fn cosine_sweep() -> &'static Vec<PatternGrid<f64>> {
    static CELL: OnceLock<Vec<PatternGrid<f64>>> = OnceLock::new();
    CELL.get_or_init(|| {
        let t0 = Instant::now();
        let g = sweep_patterns(
            &template(),
            &DrivingShape::cosine(),
            &cosine_baths(),
            &eps_axis(),
            &amp_axis(),
            &SweepOptions::default(),
        )
        .expect("cosine sweep");
        println!("  (shared cosine sweep, {} baths: {:.1} s)", cosine_baths().len(), t0.elapsed().as_secs_f64());
        g
    })
}

fn transverse_pattern(shape: &DrivingShape<f64>) -> PatternGrid<f64> {
    sweep_pattern(
        &template(),
        shape,
        &BathParams::transverse(ALPHA, BETA),
        &eps_axis(),
        &amp_axis(),
        &SweepOptions::default(),
    )
    .expect("pattern sweep")
}

fn slice(eps: &[f64], bath: BathParams<f64>, workers: usize) -> Vec<f64> {
    let opts = SweepOptions { workers, ..Default::default() };
    sweep_pattern(&template(), &DrivingShape::cosine(), &bath, eps, &[AMP], &opts)
        .expect("slice")
        .values
}

fn resonance_slice() -> &'static (Vec<f64>, Vec<f64>, f64) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let eps = linspace(0.0, 10.0, 201);
        let t0 = Instant::now();
        let p = slice(&eps, BathParams::transverse(ALPHA, BETA), 4);
        (eps, p, t0.elapsed().as_secs_f64())
    })
}

fn dn_cos(n: i64) -> f64 {
    let q = QubitParams::new(0.0, DELTA, AMP).unwrap();
    let shape = DrivingShape::cosine();
    let nm = n.unsigned_abs() as usize;
    effective_tunneling(&shape, delta_n_table(&q, &shape, nm)[(n + nm as i64) as usize])
}

fn is_local_max(v: &[f64], i: usize) -> bool {
    i > 0 && i + 1 < v.len() && v[i] >= v[i - 1] && v[i] >= v[i + 1]
}

fn c1() -> Outcome {
    let (eps, p, secs) = resonance_slice();
    let step = eps[1] - eps[0];
    let mut lines = vec![format!("slice of {} points, 4 workers: {secs:.2} s", eps.len())];
    let mut ok = *secs < C1_RUNTIME_S;
    for n in 1..=8 {
        let hit = (0..eps.len()).rev().find(|&i| is_local_max(p, i) && (eps[i] - n as f64).abs() <= step + 1e-9);
        match hit {
            Some(i) => lines.push(format!("n={n}: local max at eps0={:.2} (P={:.4})", eps[i], p[i])),
            None => {
                ok = false;
                lines.push(format!("n={n}: no local maximum within one step"));
            }
        }
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c2() -> Outcome {
    let (eps, p, _) = resonance_slice();
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [7i64, 8] {
        let dn = dn_cos(n);
        let window = |w: f64| -> (Vec<f64>, Vec<f64>) {
            eps.iter().zip(p).filter(|(e, _)| (**e - n as f64).abs() <= w + 1e-9).map(|(e, v)| (*e, *v)).unzip()
        };
        let (we, wv) = window(DELTA);
        let fit = fit_gamma(Coupling::Transverse, &we, &wv, n, dn, 1.0).unwrap();
        let (ne, nv) = window(dn.abs());
        let narrow = fit_gamma(Coupling::Transverse, &ne, &nv, n, dn, 1.0).unwrap();
        ok &= fit.rms <= C2_RMS;
        lines.push(format!(
            "n={n}: Gamma={:.3e} rms={:.4} over |d|<=Delta ({} pts); rms={:.4} over |d|<=|Delta_n| (info)",
            fit.gamma, fit.rms, fit.samples, narrow.rms
        ));
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c3() -> Outcome {
    let eps = linspace(0.0, 10.0, 201);
    let p = slice(&eps, BathParams::longitudinal(ALPHA, BETA), 0);
    let step = eps[1] - eps[0];
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [2i64, 3] {
        let nf = n as f64;
        // crossing of 1/2 nearest to the resonance
        let crossing = (0..eps.len() - 1)
            .filter(|&i| (p[i] - 0.5) * (p[i + 1] - 0.5) <= 0.0)
            .map(|i| eps[i] + step * (0.5 - p[i]) / (p[i + 1] - p[i]))
            .min_by(|a, b| (a - nf).abs().partial_cmp(&(b - nf).abs()).unwrap());
        let dn = dn_cos(n);
        // on the side where (n - eps0) Delta_n > 0 the population exceeds 1/2
        let probe = (2f64.sqrt() * dn.abs()).max(step);
        let side = |s: f64| {
            let i = ((nf + s * probe) / step).round() as usize;
            (eps[i], p[i])
        };
        let (e_hi, p_hi) = side(-dn.signum());
        let (e_lo, p_lo) = side(dn.signum());
        let c_ok = crossing.is_some_and(|c| (c - nf).abs() <= step);
        let s_ok = p_hi > 0.5 && p_lo < 0.5;
        ok &= c_ok && s_ok;
        lines.push(format!(
            "n={n}: crossing at {}, P({e_hi:.2})={p_hi:.4} (expect >1/2), P({e_lo:.2})={p_lo:.4} (expect <1/2), closed form {:.4}/{:.4}",
            crossing.map_or("none".into(), |c| format!("{c:.3}")),
            longitudinal_population(nf - e_hi, dn, 1e-3),
            longitudinal_population(nf - e_lo, dn, 1e-3),
        ));
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c4() -> Outcome {
    let eps = linspace(-10.0, 10.0, 401);
    let p = slice(&eps, BathParams::transverse(ALPHA, BETA), 0);
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for sign in [-1.0, 1.0] {
        for n in 2..8 {
            let (a, b) = (n as f64, n as f64 + 1.0);
            let (i, _) = (0..eps.len())
                .filter(|&i| {
                    let e = sign * eps[i];
                    e > a + 1e-9 && e < b - 1e-9
                })
                .map(|i| (i, p[i]))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            let bg = background(&QubitParams::new(eps[i], DELTA, AMP).unwrap()).unwrap();
            worst = worst.max((p[i] - bg).abs());
            lines.push(format!("min at eps0={:+.2}: P={:.4} background={:.4}", eps[i], p[i], bg));
        }
    }
    lines.push(format!("max deviation {worst:.4}"));
    if worst <= C4_ABS {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c5() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["cos", "f1", "f2", "f3"] {
        let shape = DrivingShape::preset(name).unwrap();
        for a in [1.0, 5.0, 10.0, 15.0] {
            let q = QubitParams::new(0.0, DELTA, a).unwrap();
            let s: f64 = delta_n_table(&q, &shape, 60).iter().map(|d| d.norm_sqr()).sum();
            worst = worst.max((s - DELTA * DELTA).abs());
        }
    }
    let lines = vec![format!("max |sum |Delta_n|^2 - Delta^2| = {worst:.2e}")];
    if worst <= C5_TOL {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c6() -> Outcome {
    let shape = DrivingShape::cosine();
    let mut worst: f64 = 0.0;
    for a in linspace(0.0, 15.0, 301) {
        let t = delta_n_table(&QubitParams::new(0.0, DELTA, a).unwrap(), &shape, 20);
        for n in -20i64..=20 {
            let d = t[(n + 20) as usize];
            worst = worst.max((d - DELTA * bessel_j(n, a)).norm());
        }
    }
    let lines = vec![format!("max |Delta_n - Delta J_n| over |n|<=20, A in [0,15]: {worst:.2e}")];
    if worst <= C6_TOL {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn spectrum(p: &PatternGrid<f64>) -> SpectrumGrid<f64> {
    fourier2d(p, 2, true).unwrap()
}

fn window_grid(s: &SpectrumGrid<f64>, lo: f64, hi: f64) -> Vec<f64> {
    s.tau_eps.iter().copied().filter(|&t| t >= lo && t <= hi).collect()
}

/// Local maxima of `|W|` along `tau_A` in column `i` above `frac` of the column maximum.
fn strong_maxima(s: &SpectrumGrid<f64>, i: usize, frac: f64) -> Vec<f64> {
    let col: Vec<f64> = (0..s.tau_a.len()).map(|j| s.magnitude(i, j)).collect();
    let top = col.iter().copied().fold(0.0, f64::max);
    (1..col.len() - 1)
        .filter(|&j| is_local_max(&col, j) && col[j] >= frac * top)
        .map(|j| s.tau_a[j])
        .collect()
}

fn c7() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["cos", "f1", "f2", "f3"] {
        let shape = DrivingShape::preset(name).unwrap();
        let tp = shape.period();
        let (lo, hi) = (tp / 8.0, 3.0 * tp / 8.0);
        let p = if name == "cos" { cosine_sweep()[0].clone() } else { transverse_pattern(&shape) };
        let s = spectrum(&p);
        let d = s.d_tau_a();
        let grid = window_grid(&s, lo, hi);
        let arcs: Vec<ArcCurve<f64>> = arc_full(&shape, &grid, 4096).iter().map(|c| c.reflected()).collect();
        let m = match_ridges(&s, &arcs, (lo, hi), 3);
        let beyond: Vec<_> = m.iter().filter(|r| !(r.deviation_bins <= C7_BINS)).collect();
        let worst = m.iter().map(|r| r.deviation_bins).fold(0.0, f64::max);
        let mut line = format!(
            "{name}: {} branches, {}/{} ridge matches beyond one bin (worst {worst:.2} bins)",
            arcs.len(),
            beyond.len(),
            m.len()
        );
        ok &= beyond.is_empty() && !m.is_empty();
        if let Some(r) = beyond.first() {
            line += &format!(
                "; first at tau_eps={:.3} branch {} predicted {:.3} found {}",
                r.tau_eps,
                r.branch,
                r.predicted,
                r.found.map_or("none".into(), |f| format!("{f:.3}"))
            );
        }
        lines.push(line);
        match name {
            "f2" => {
                // split region: a column where two distinct predicted arcs on the
                // same side of tau_A = 0 are each matched within one bin by
                // separate ridges (a single-extremum drive has one per side)
                let mut split = 0;
                for &te in &grid {
                    let mut here: Vec<_> = m.iter().filter(|r| r.tau_eps == te).collect();
                    here.sort_by(|a, b| a.predicted.partial_cmp(&b.predicted).unwrap());
                    // symmetric drives give pairs of stationary times with identical arcs
                    here.dedup_by(|a, b| (a.predicted - b.predicted).abs() < d);
                    let resolved = here.iter().enumerate().any(|(k, a)| {
                        here[k + 1..].iter().any(|b| {
                            a.predicted.signum() == b.predicted.signum()
                                && a.deviation_bins <= C7_BINS
                                && b.deviation_bins <= C7_BINS
                                && matches!((a.found, b.found), (Some(x), Some(y)) if (x - y).abs() >= d)
                        })
                    });
                    if resolved {
                        split += 1;
                    }
                }
                let cols_multi = grid.iter().filter(|&&te| arcs.iter().filter(|c| c.tau_a_at(te).is_some()).count() >= 3).count();
                ok &= split > 0;
                lines.push(format!(
                    "f2: {cols_multi} columns with >=3 predicted branches, {split} with two same-side arcs resolved as separate ridges"
                ));
            }
            "f3" => {
                let mut best = (0.0, 0.0);
                for (i, &te) in s.tau_eps.iter().enumerate() {
                    if te < lo || te > hi {
                        continue;
                    }
                    let pred = 2.0 * shape.integral(te / 2.0);
                    let dev = strong_maxima(&s, i, 0.3)
                        .iter()
                        .flat_map(|&t| [(t - pred).abs(), (t + pred).abs()])
                        .fold(f64::INFINITY, f64::min)
                        / d;
                    if dev > best.1 {
                        best = (te, dev);
                    }
                }
                ok &= best.1 > C7_F3_BINS;
                lines.push(format!(
                    "f3: strongest ridges deviate from +-2F(tau_eps/2) by up to {:.1} bins (tau_eps={:.3})",
                    best.1, best.0
                ));
            }
            _ => {}
        }
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c8() -> Outcome {
    let shape = DrivingShape::cosine();
    let tp = shape.period();
    let s = spectrum(&cosine_sweep()[0]);
    let d = s.d_tau_a();
    let window = (0.0, 2.0 * tp);
    let grid = window_grid(&s, 1e-12, window.1);
    let second = ArcCurve::closed_form(&shape, &grid, 2, 0, 0).unwrap().reflected();
    let contrast = ridge_contrast(&s, &second, window, &[3, 4]);
    let matches = match_ridges(&s, std::slice::from_ref(&second), window, 3);
    let (mut run, mut best_run, mut best_end) = (0usize, 0usize, 0.0);
    let mut best_ratio: f64 = 0.0;
    for ((te, on, bg), r) in contrast.iter().zip(&matches) {
        let pred = second.tau_a_at(*te).unwrap();
        let first = [2.0 * shape.integral(te / 2.0), 2.0 * shape.integral(te / 2.0 + tp / 2.0)];
        let sep = first.iter().flat_map(|x| [(x - pred).abs(), (x + pred).abs()]).fold(f64::INFINITY, f64::min) / d;
        let ratio = on / bg;
        if sep >= 6.0 && r.deviation_bins <= C8_BINS && ratio >= C8_CONTRAST {
            run += 1;
            best_ratio = best_ratio.max(ratio);
            if run > best_run {
                best_run = run;
                best_end = *te;
            }
        } else {
            run = 0;
        }
    }
    let lines = vec![format!(
        "{best_run} consecutive columns (ending tau_eps={best_end:.2}) with the ridge within one bin of -4F(tau_eps/4), \
         >=6 bins from first-order arcs, contrast >= 2 (best {best_ratio:.2})"
    )];
    if best_run >= 3 {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn decay_rate(p: &PatternGrid<f64>) -> Result<(f64, f64, f64), String> {
    let shape = DrivingShape::cosine();
    let tp = shape.period();
    let s = spectrum(p);
    let grid = window_grid(&s, 1e-12, tp);
    let arc = ArcCurve::closed_form(&shape, &grid, 1, 0, 0).unwrap().reflected();
    let f = fit_decay(&sample_arc(&s, &arc), default_decay_window(tp)).map_err(|e| e.to_string())?;
    Ok((f.rate, f.uncertainty, f.residual_rms))
}

fn c9() -> Outcome {
    let g = cosine_sweep();
    let mut lines = Vec::new();
    let mut ok = true;
    match decay_rate(&g[IDX_STRONG]) {
        Ok((l, u, r)) => {
            let pass = (l - C9_RATE).abs() <= C9_REL * C9_RATE;
            ok &= pass;
            lines.push(format!("x, alpha=0.05, beta=10: lambda={l:.3} +- {u:.3} (rms {r:.3}), target 0.4 +- 25%"));
        }
        Err(e) => {
            ok = false;
            lines.push(format!("x strong: {e}"));
        }
    }
    let rates = |start: usize| -> Result<Vec<f64>, String> {
        (0..ALPHAS.len()).map(|k| decay_rate(&g[start + k]).map(|r| r.0)).collect()
    };
    match rates(IDX_X_HOT) {
        Ok(lx) => {
            let inc = lx.windows(2).all(|w| w[1] > w[0]);
            ok &= inc;
            lines.push(format!("x, beta=2: lambda(alpha) = {lx:.3?}, strictly increasing: {inc}"));
        }
        Err(e) => {
            ok = false;
            lines.push(format!("x, beta=2: {e}"));
        }
    }
    match rates(IDX_Z_HOT) {
        Ok(lz) => {
            let mn = lz.iter().copied().fold(f64::INFINITY, f64::min);
            let mx = lz.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let spread = (mx - mn) / mn;
            let pass = mn > 0.0 && spread < C9_SPREAD;
            ok &= pass;
            lines.push(format!("z, beta=2: lambda(alpha) = {lz:.3?}, relative spread {spread:.2} (need positive rates, < 0.5)"));
        }
        Err(e) => {
            ok = false;
            lines.push(format!("z, beta=2: {e}"));
        }
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c10() -> Outcome {
    let shape = DrivingShape::cosine();
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for eps in [1.0, 3.0, 0.0] {
        let q = QubitParams::new(eps, DELTA, 0.0).unwrap();
        let gibbs = gibbs_excited(eps, DELTA, 2.0);
        // sigma_x commutes with the static Hamiltonian at eps0 = 0 and cannot thermalize it
        let thetas: &[f64] = if eps == 0.0 { &[FRAC_PI_2] } else { &[0.0, FRAC_PI_2] };
        for &th in thetas {
            let bath = BathParams::new(1e-4, 2.0, th).unwrap();
            let p = solve_point(&q, &shape, &bath, &PipelineOptions::default()).unwrap().p_ex;
            worst = worst.max((p - gibbs).abs());
            lines.push(format!("eps0={eps}, theta={th:.3}: P={p:.6} Gibbs={gibbs:.6}"));
        }
    }
    lines.push(format!("max deviation {worst:.2e}"));
    if worst <= C10_TOL {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c11() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let check = |ok: &mut bool, lines: &mut Vec<String>, label: &str, v: f64, tol: f64| {
        let pass = v <= tol;
        *ok &= pass;
        lines.push(format!("{label}: {v:.2e} (<= {tol:.0e}) {}", if pass { "ok" } else { "FAIL" }));
    };

    // steady state, transition elements and Floquet modes at representative points
    let (mut st_tr, mut st_h, mut rho_tr, mut rho_h, mut x_h, mut unit, mut orth) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_eig = f64::INFINITY;
    let mut violated = false;
    for name in ["cos", "f2", "f3"] {
        let shape = DrivingShape::preset(name).unwrap();
        for (eps, amp) in [(2.0, 3.0), (7.0, 10.0), (-4.3, 12.5)] {
            let q = QubitParams::new(eps, DELTA, amp).unwrap();
            for th in [0.0, 0.7, FRAC_PI_2] {
                let bath = BathParams::new(ALPHA, BETA, th).unwrap();
                let opts = PipelineOptions::default();
                let r = solve_point(&q, &shape, &bath, &opts).unwrap();
                let diag = r.state.diagnose(&r.floquet);
                st_tr = st_tr.max(r.state.trace_defect);
                st_h = st_h.max(r.state.hermiticity_defect);
                rho_tr = rho_tr.max(diag.max_trace_defect);
                rho_h = rho_h.max(diag.max_hermiticity_defect);
                min_eig = min_eig.min(diag.min_eigenvalue);
                violated |= diag.positivity_violated;
                let x = transition_elements(&r.floquet, &bath.coupling_operator(), opts.k_x).unwrap();
                x_h = x_h.max(x.hermiticity_defect());
                unit = unit.max(r.floquet.unitarity_defect);
                orth = orth.max(r.floquet.orthonormality_defect());
            }
        }
    }
    check(&mut ok, &mut lines, "steady-state trace defect", st_tr, C11_TOL);
    check(&mut ok, &mut lines, "steady-state hermiticity defect", st_h, C11_TOL);
    check(&mut ok, &mut lines, "rho(t) trace defect", rho_tr, C11_TOL);
    check(&mut ok, &mut lines, "rho(t) hermiticity defect", rho_h, C11_TOL);
    check(&mut ok, &mut lines, "X hermiticity defect", x_h, C11_TOL);
    check(&mut ok, &mut lines, "monodromy unitarity defect", unit, C11_TOL);
    check(&mut ok, &mut lines, "Floquet mode orthonormality defect", orth, C11_TOL);
    let pos = !violated;
    ok &= pos;
    lines.push(format!("rho(t) positivity: min eigenvalue {min_eig:.2e}, {}", if pos { "ok" } else { "FAIL" }));

    // Bloch equations: matrix inversion against closed forms
    let mut bloch: f64 = 0.0;
    for i in 0..10_000 {
        let det = 6.0 * weyl(i, 0) - 3.0;
        let dn = 2.0 * weyl(i, 1) - 1.0;
        let gamma = 1e-3 + 2.0 * weyl(i, 2);
        let (_, pt) = bloch_steady_transverse(det, dn, gamma).unwrap();
        let (_, pl) = bloch_steady_longitudinal(det, dn, gamma).unwrap();
        bloch = bloch.max((pt - transverse_population(det, dn, gamma)).abs());
        bloch = bloch.max((pl - longitudinal_population(det, dn, gamma)).abs());
    }
    check(&mut ok, &mut lines, "Bloch inversion vs closed form, 1e4 triples", bloch, C11_TOL);

    // grid and spectrum files
    let dir = tempfile::tempdir().unwrap();
    let p = &cosine_sweep()[0];
    let path = dir.path().join("p.lzsm");
    write_pattern(&path, p, "").unwrap();
    let back = read_pattern::<f64>(&path).unwrap();
    let same = back.values.iter().zip(&p.values).all(|(a, b)| a.to_bits() == b.to_bits())
        && back.eps_axis == p.eps_axis
        && back.amp_axis == p.amp_axis
        && back.metadata == p.metadata;
    let s = spectrum(p);
    let spath = dir.path().join("s.lzsm");
    write_spectrum(&spath, &s, SpectrumPayload::Complex, "").unwrap();
    let (sb, _) = read_spectrum::<f64>(&spath).unwrap();
    let same_s = sb.values == s.values && sb.tau_eps == s.tau_eps && sb.tau_a == s.tau_a && sb.mean == s.mean;
    ok &= same && same_s;
    lines.push(format!("pattern file round trip exact: {same}; spectrum file round trip exact: {same_s}"));

    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn c12() -> Outcome {
    let g = cosine_sweep();
    let (px, pz) = (&g[0], &g[5]);
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, th) in THETAS.iter().enumerate() {
        let rx = pattern_overlap(&g[k], px, false).unwrap();
        let rz = pattern_overlap(&g[k], pz, false).unwrap();
        lines.push(format!("theta={th:.4}: r_x={rx:.6} r_z={rz:.6}"));
        if *th <= FRAC_PI_4 + 1e-12 {
            ok &= rx >= rz;
        }
        if k == 0 {
            ok &= rx == 1.0;
        }
        if k == THETAS.len() - 1 {
            ok &= rz == 1.0;
        }
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines)
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "resonance positions", c1),
        (2, "Lorentzian peak match", c2),
        (3, "antisymmetric peaks", c3),
        (4, "off-resonant background", c4),
        (5, "Parseval sum rule", c5),
        (6, "Bessel oracle", c6),
        (7, "arc geometry", c7),
        (8, "higher-order arcs", c8),
        (9, "arc decay", c9),
        (10, "static limit", c10),
        (11, "invariant suite", c11),
        (12, "overlap endpoints", c12),
    ];
    // panics are reported on the criterion line
    std::panic::set_hook(Box::new(|_| {}));
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(vec![format!("panicked: {msg}")])
        });
        let (tag, lines) = match outcome {
            Ok(l) => ("PASS", l),
            Err(l) => {
                failed.push(id);
                ("FAIL", l)
            }
        };
        println!("criterion {id} {tag}: {name} ({:.1} s)", t0.elapsed().as_secs_f64());
        for l in lines {
            println!("    {l}");
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
