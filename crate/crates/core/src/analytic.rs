//! Closed-form results: effective tunnel elements, Bloch-equation steady
//! states near a multiphoton resonance, the off-resonant background, static
//! rates, and the stationary-phase arc predictor for the Fourier transform.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::linalg::Mat2;
use crate::model::{BathParams, DrivingShape, QubitParams};
use crate::num::{Cplx, Real};
use crate::spectra::PatternGrid;

/// Samples per period used for the effective tunnel elements.
pub const DELTA_N_SAMPLES: usize = 4096;
/// Scan resolution of the arc root finder.
pub const DEFAULT_ARC_SCAN: usize = 4096;
const ROOT_TOL: f64 = 1e-10;
const TANGENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("relaxation rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("background formula needs a nonzero drive amplitude")]
    ZeroAmplitude,
    #[error("drive is not time-reversal symmetric; use the general arc finder")]
    AsymmetricShape,
    #[error("invalid arc order k = {k}, shift k' = {shift} (need k >= 1, 0 <= k' <= 2k-1)")]
    InvalidArcOrder { k: u32, shift: u32 },
    #[error("need at least {need} samples for a fit, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("singular Bloch matrix")]
    Singular,
}

/// Which qubit operator couples to the bath in the Bloch-equation limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Transverse,
    Longitudinal,
}

/// `s = tr(sigma rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Excited-state population `(1 + s_z) / 2` in the rotating frame.
    pub fn excited_population(&self) -> T {
        (T::one() + self.z) * T::lit(0.5)
    }
}

/// `Delta_n = (Delta/T) int_0^T e^{i n Omega t - i A F(t)} dt` for `|n| <= n_max`,
/// ordered from `-n_max`.
pub fn delta_n_table<T: Real>(q: &QubitParams<T>, shape: &DrivingShape<T>, n_max: usize) -> Vec<Cplx<T>> {
    delta_n_table_with(q, shape, n_max, DELTA_N_SAMPLES.max(4 * (n_max + 1)).next_power_of_two())
}

pub fn delta_n_table_with<T: Real>(
    q: &QubitParams<T>,
    shape: &DrivingShape<T>,
    n_max: usize,
    samples: usize,
) -> Vec<Cplx<T>> {
    let m = samples;
    let dt = shape.period() / T::from_usize_lossy(m);
    let mut buf: Vec<Cplx<T>> = (0..m)
        .map(|j| {
            let phase = -q.amplitude * shape.integral(dt * T::from_usize_lossy(j));
            Complex::from_polar(q.delta, phase)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let inv = T::from_usize_lossy(m).recip();
    let n = m as i64;
    (-(n_max as i64)..=n_max as i64)
        .map(|k| buf[k.rem_euclid(n) as usize] * inv)
        .collect()
}

pub fn delta_n<T: Real>(q: &QubitParams<T>, shape: &DrivingShape<T>, n: i64) -> Cplx<T> {
    let nm = n.unsigned_abs() as usize;
    delta_n_table(q, shape, nm)[(n + nm as i64) as usize]
}

/// Real effective tunnel element used in the Bloch equations: the signed real
/// part for time-reversal symmetric drives (where `Delta_n` is real), the
/// modulus otherwise.
pub fn effective_tunneling<T: Real>(shape: &DrivingShape<T>, dn: Cplx<T>) -> T {
    if shape.is_time_reversal_symmetric() {
        dn.re
    } else {
        dn.norm()
    }
}

/// `H_eff = -(delta_n / 2) sigma_z + (Delta_n / 2) sigma_+ + h.c.`, `delta_n = n Omega - eps0`.
pub fn effective_hamiltonian<T: Real>(q: &QubitParams<T>, shape: &DrivingShape<T>, n: i64) -> Mat2<T> {
    let dn = delta_n(q, shape, n);
    let det = T::from_i64_lossy(n) * shape.omega() - q.epsilon0;
    let h = T::lit(0.5);
    Mat2::new(
        Complex::new(-det * h, T::zero()),
        dn.scale(h),
        dn.conj().scale(h),
        Complex::new(det * h, T::zero()),
    )
}

/// Bloch matrix `M` and inhomogeneity `b` of `ds/dt = M s - b`.
pub fn bloch_system<T: Real>(coupling: Coupling, detuning: T, dn: T, gamma: T) -> ([[T; 3]; 3], [T; 3]) {
    let h = gamma * T::lit(0.5);
    let z = T::zero();
    match coupling {
        Coupling::Transverse => (
            [[-h, -detuning, z], [detuning, -h, dn], [z, -dn, -gamma]],
            [z, z, gamma],
        ),
        Coupling::Longitudinal => (
            [[-gamma, -detuning, z], [detuning, -h, dn], [z, -dn, -h]],
            [gamma, z, z],
        ),
    }
}

/// Gaussian elimination with partial pivoting for `M s = b`.
fn solve3<T: Real>(mut m: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c] == T::zero() || !m[p][c].is_finite() {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            for k in c..3 {
                m[r][k] = m[r][k] - f * m[c][k];
            }
            b[r] = b[r] - f * b[c];
        }
    }
    let mut x = [T::zero(); 3];
    for r in (0..3).rev() {
        let mut acc = b[r];
        for k in r + 1..3 {
            acc = acc - m[r][k] * x[k];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

fn bloch_steady<T: Real>(coupling: Coupling, detuning: T, dn: T, gamma: T) -> Result<(BlochVector<T>, T), AnalyticError> {
    if !(gamma > T::zero()) {
        return Err(AnalyticError::NonPositiveRate(gamma.to_f64_lossy()));
    }
    let (m, b) = bloch_system(coupling, detuning, dn, gamma);
    let s = solve3(m, b).ok_or(AnalyticError::Singular)?;
    let v = BlochVector { x: s[0], y: s[1], z: s[2] };
    Ok((v, v.excited_population()))
}

/// Steady state of the transverse-coupling Bloch equations; `detuning = n Omega - eps0`.
pub fn bloch_steady_transverse<T: Real>(detuning: T, dn: T, gamma: T) -> Result<(BlochVector<T>, T), AnalyticError> {
    bloch_steady(Coupling::Transverse, detuning, dn, gamma)
}

/// Steady state of the longitudinal-coupling Bloch equations.
pub fn bloch_steady_longitudinal<T: Real>(detuning: T, dn: T, gamma: T) -> Result<(BlochVector<T>, T), AnalyticError> {
    bloch_steady(Coupling::Longitudinal, detuning, dn, gamma)
}

/// Lorentzian resonance `(1/2) (D^2/2) / (d^2 + D^2/2 + G^2/4)`.
pub fn transverse_population<T: Real>(detuning: T, dn: T, gamma: T) -> T {
    let d2 = dn * dn * T::lit(0.5);
    T::lit(0.5) * d2 / (detuning * detuning + d2 + gamma * gamma * T::lit(0.25))
}

/// Antisymmetric resonance `1/2 + d D / (d^2 + 2 D^2 + G^2/2)` with `d = n Omega - eps0`.
pub fn longitudinal_population<T: Real>(detuning: T, dn: T, gamma: T) -> T {
    T::lit(0.5) + detuning * dn / (detuning * detuning + T::lit(2.0) * dn * dn + gamma * gamma * T::lit(0.5))
}

pub fn resonance_population<T: Real>(coupling: Coupling, detuning: T, dn: T, gamma: T) -> T {
    match coupling {
        Coupling::Transverse => transverse_population(detuning, dn, gamma),
        Coupling::Longitudinal => longitudinal_population(detuning, dn, gamma),
    }
}

/// Time-averaged off-resonant population `1/2 - pi |eps0| A / (4 A^2 + 2 eps0^2)`.
///
/// The adiabatic estimate is written for the diabatic `s_z`; the excited
/// state of the undriven qubit swaps diabatic character with the sign of
/// `eps0`, so the excited-state population is even in `eps0`.
pub fn background<T: Real>(q: &QubitParams<T>) -> Result<T, AnalyticError> {
    let a = q.amplitude.abs();
    if a == T::zero() {
        return Err(AnalyticError::ZeroAmplitude);
    }
    let e = q.epsilon0.abs();
    Ok(T::lit(0.5) - T::PI() * e * a / (T::lit(4.0) * a * a + T::lit(2.0) * e * e))
}

/// Relaxation and pure-dephasing rates of the static qubit with splitting `E`:
/// `(pi alpha E coth(beta E / 2), 4 pi alpha / beta)`.
pub fn static_rates<T: Real>(e: T, bath: &BathParams<T>) -> (T, T) {
    let x = bath.beta * e * T::lit(0.5);
    let relax = if x.abs() < T::lit(1e-6) {
        // E coth(beta E / 2) = (2/beta)(1 + x^2/3 + ...)
        T::lit(2.0) * T::PI() * bath.alpha / bath.beta * (T::one() + x * x / T::lit(3.0))
    } else {
        T::PI() * bath.alpha * e / x.tanh()
    };
    (relax, T::lit(4.0) * T::PI() * bath.alpha / bath.beta)
}

/// Sum of resonance contributions on a grid. Transverse: `sum_{|n|<=n_max} P_n`,
/// optionally shifted by `P_bg - 1/2`. Longitudinal: each point uses the
/// resonance nearest to `eps0` (the curves do not superpose).
#[allow(clippy::too_many_arguments)]
pub fn analytic_pattern<T: Real>(
    template: &QubitParams<T>,
    shape: &DrivingShape<T>,
    eps_axis: &[T],
    amp_axis: &[T],
    gamma: T,
    coupling: Coupling,
    n_max: usize,
    with_background: bool,
) -> Result<PatternGrid<T>, AnalyticError> {
    if !(gamma > T::zero()) {
        return Err(AnalyticError::NonPositiveRate(gamma.to_f64_lossy()));
    }
    let omega = shape.omega();
    let nm = n_max as i64;
    let tables: Vec<Vec<T>> = amp_axis
        .iter()
        .map(|&a| {
            delta_n_table(&template.with_point(template.epsilon0, a), shape, n_max)
                .into_iter()
                .map(|d| effective_tunneling(shape, d))
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(eps_axis.len() * amp_axis.len());
    for &e in eps_axis {
        for (ia, &a) in amp_axis.iter().enumerate() {
            let v = match coupling {
                Coupling::Transverse => {
                    let mut s = T::zero();
                    for n in -nm..=nm {
                        let det = T::from_i64_lossy(n) * omega - e;
                        s = s + transverse_population(det, tables[ia][(n + nm) as usize], gamma);
                    }
                    if with_background && a != T::zero() {
                        s = s + background(&template.with_point(e, a))? - T::lit(0.5);
                    }
                    s
                }
                Coupling::Longitudinal => {
                    let n = (e / omega).round().to_i64().unwrap_or(0).clamp(-nm, nm);
                    let det = T::from_i64_lossy(n) * omega - e;
                    longitudinal_population(det, tables[ia][(n + nm) as usize], gamma)
                }
            };
            values.push(v);
        }
    }
    let mut grid = PatternGrid::new(eps_axis.to_vec(), amp_axis.to_vec(), values);
    grid.metadata.insert("source".into(), "analytic".into());
    grid.metadata.insert("coupling".into(), format!("{coupling:?}").to_lowercase());
    grid.metadata.insert("gamma".into(), gamma.to_string());
    grid.metadata.insert("n_max".into(), n_max.to_string());
    Ok(grid)
}

/// Result of fitting the phenomenological rate to a numeric resonance slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit<T> {
    pub gamma: T,
    pub rms: T,
    pub samples: usize,
}

/// Least-squares `Gamma` for one resonance: coarse log scan over
/// `[1e-5, 10] Omega` followed by golden-section refinement.
pub fn fit_gamma<T: Real>(
    coupling: Coupling,
    eps: &[T],
    values: &[T],
    n: i64,
    dn: T,
    omega: T,
) -> Result<GammaFit<T>, AnalyticError> {
    let len = eps.len().min(values.len());
    if len < 3 {
        return Err(AnalyticError::TooFewSamples { need: 3, got: len });
    }
    let center = T::from_i64_lossy(n) * omega;
    let rms = |lg: T| {
        let g = lg.exp();
        let ss = (0..len).fold(T::zero(), |acc, i| {
            let r = resonance_population(coupling, center - eps[i], dn, g) - values[i];
            acc + r * r
        });
        (ss / T::from_usize_lossy(len)).sqrt()
    };
    let lo = T::lit(1e-5).ln();
    let hi = T::lit(10.0).ln();
    let steps = 400;
    let h = (hi - lo) / T::from_usize_lossy(steps);
    let mut best = (0, T::infinity());
    for i in 0..=steps {
        let r = rms(lo + h * T::from_usize_lossy(i));
        if r < best.1 {
            best = (i, r);
        }
    }
    let mut a = lo + h * T::from_usize_lossy(best.0.saturating_sub(1));
    let mut b = lo + h * T::from_usize_lossy((best.0 + 1).min(steps));
    let g = T::lit(0.618_033_988_749_894_9);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if rms(c) < rms(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let lg = (a + b) * T::lit(0.5);
    Ok(GammaFit { gamma: lg.exp(), rms: rms(lg), samples: len })
}

/// `G(t, tau) = F(t + tau/2) - F(t - tau/2)`.
pub fn arc_phase<T: Real>(shape: &DrivingShape<T>, t: T, tau_eps: T) -> T {
    let h = tau_eps * T::lit(0.5);
    shape.integral(t + h) - shape.integral(t - h)
}

/// `g(t, tau) = f(t + tau/2) - f(t - tau/2)`, whose zeros are the stationary points of `G`.
pub fn arc_condition<T: Real>(shape: &DrivingShape<T>, t: T, tau_eps: T) -> T {
    let h = tau_eps * T::lit(0.5);
    shape.value(t + h) - shape.value(t - h)
}

/// The two generic arcs `(2F(tau/2), 2F(tau/2 + T/2))` of a symmetric drive.
pub fn arc_generic<T: Real>(shape: &DrivingShape<T>, tau_eps: T) -> Result<(T, T), AnalyticError> {
    if !shape.is_time_reversal_symmetric() {
        return Err(AnalyticError::AsymmetricShape);
    }
    let two = T::lit(2.0);
    let h = tau_eps / two;
    Ok((two * shape.integral(h), two * shape.integral(h + shape.period() / two)))
}

/// Higher-order arc `2k F(tau/(2k) + k' T/(2k))`.
pub fn arc_higher_order<T: Real>(shape: &DrivingShape<T>, tau_eps: T, k: u32, shift: u32) -> Result<T, AnalyticError> {
    if k == 0 || shift > 2 * k - 1 {
        return Err(AnalyticError::InvalidArcOrder { k, shift });
    }
    if !shape.is_time_reversal_symmetric() {
        return Err(AnalyticError::AsymmetricShape);
    }
    let tk = T::from_u32(2 * k).expect("small integer");
    let arg = tau_eps / tk + T::from_u32(shift).expect("small integer") * shape.period() / tk;
    Ok(tk * shape.integral(arg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSample<T> {
    pub tau_eps: T,
    pub tau_a: T,
    /// Stationary time `t_i` in `[0, T)` (NaN for closed-form arcs).
    pub t: T,
}

/// One continuous branch of stationary-phase arc, ordered by `tau_eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCurve<T> {
    pub branch: usize,
    /// `(k, k')` for closed-form arcs.
    pub order: Option<(u32, u32)>,
    pub samples: Vec<ArcSample<T>>,
}

impl<T: Real> ArcCurve<T> {
    /// Closed-form arc `2k F(tau/(2k) + k' T/(2k))` sampled on a grid.
    pub fn closed_form(shape: &DrivingShape<T>, grid: &[T], k: u32, shift: u32, branch: usize) -> Result<Self, AnalyticError> {
        let samples = grid
            .iter()
            .map(|&te| {
                Ok(ArcSample { tau_eps: te, tau_a: arc_higher_order(shape, te, k, shift)?, t: T::nan() })
            })
            .collect::<Result<Vec<_>, AnalyticError>>()?;
        Ok(Self { branch, order: Some((k, shift)), samples })
    }

    /// Copy with `tau_A -> -tau_A` (position of the arc in a transform taken
    /// with the `e^{-i A tau_A}` kernel, for `tau_eps > 0`).
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|s| s.tau_a = -s.tau_a);
        out
    }

    /// Linear interpolation of `tau_A` at `tau_eps`, if inside the branch.
    pub fn tau_a_at(&self, tau_eps: T) -> Option<T> {
        let s = &self.samples;
        let i = s.partition_point(|p| p.tau_eps < tau_eps);
        if i < s.len() && s[i].tau_eps == tau_eps {
            return Some(s[i].tau_a);
        }
        if i == 0 || i >= s.len() {
            return None;
        }
        let (a, b) = (s[i - 1], s[i]);
        let w = (tau_eps - a.tau_eps) / (b.tau_eps - a.tau_eps);
        Some(a.tau_a + w * (b.tau_a - a.tau_a))
    }
}

fn wrap<T: Real>(t: T, period: T) -> T {
    let r = t % period;
    if r < T::zero() {
        r + period
    } else {
        r
    }
}

/// Stationary times `t in [0, T)` with `g(t, tau) = 0`: sign changes on a
/// dense scan refined by bisection, plus tangential (double) roots seen as
/// local minima of `|g|` below the tangency threshold.
pub fn stationary_times<T: Real>(shape: &DrivingShape<T>, tau_eps: T, scan: usize) -> Vec<T> {
    let period = shape.period();
    let dt = period / T::from_usize_lossy(scan);
    let half = T::lit(0.5);
    let ts: Vec<T> = (0..scan).map(|j| dt * (T::from_usize_lossy(j) + half)).collect();
    let gs: Vec<T> = ts.iter().map(|&t| arc_condition(shape, t, tau_eps)).collect();
    let scale = gs.iter().fold(T::zero(), |m, g| m.max(g.abs()));
    if scale < T::lit(1e-12) {
        // g vanishes identically (tau_eps a multiple of the period)
        return Vec::new();
    }
    let tol = T::lit(ROOT_TOL);
    let tang = T::lit(TANGENCY_TOL);
    let mut roots = Vec::new();
    for j in 0..scan {
        let jn = (j + 1) % scan;
        let (g0, g1) = (gs[j], gs[jn]);
        if g0 == T::zero() {
            roots.push(ts[j]);
            continue;
        }
        if g0 * g1 < T::zero() {
            let (mut a, mut b) = (ts[j], ts[j] + dt);
            let mut ga = g0;
            while b - a > tol {
                let m = (a + b) * half;
                let gm = arc_condition(shape, m, tau_eps);
                if gm == T::zero() {
                    a = m;
                    b = m;
                    break;
                }
                if (gm < T::zero()) == (ga < T::zero()) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            roots.push(wrap((a + b) * half, period));
            continue;
        }
        let jp = (j + scan - 1) % scan;
        let gp = gs[jp];
        let local_min = g0.abs() <= gp.abs() && g0.abs() <= g1.abs();
        if local_min && g0.abs() < tang * T::lit(1e3) && gp * g0 > T::zero() {
            // golden-section on |g| over the bracketing cell pair
            let (mut a, mut b) = (ts[j] - dt, ts[j] + dt);
            let gr = T::lit(0.618_033_988_749_894_9);
            for _ in 0..80 {
                let c = b - gr * (b - a);
                let d = a + gr * (b - a);
                if arc_condition(shape, c, tau_eps).abs() < arc_condition(shape, d, tau_eps).abs() {
                    b = d;
                } else {
                    a = c;
                }
            }
            let t = (a + b) * half;
            if arc_condition(shape, t, tau_eps).abs() < tang {
                roots.push(wrap(t, period));
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < T::lit(1e3) * tol);
    roots
}

/// Every stationary-phase arc on a `tau_eps` grid, threaded into branches by
/// nearest-neighbour continuation of the stationary time (circular distance).
pub fn arc_full<T: Real>(shape: &DrivingShape<T>, grid: &[T], scan: usize) -> Vec<ArcCurve<T>> {
    let period = shape.period();
    let max_jump = period / T::lit(8.0);
    let circ = |a: T, b: T| {
        let d = wrap(a - b, period);
        d.min(period - d)
    };
    let mut curves: Vec<ArcCurve<T>> = Vec::new();
    let mut active: Vec<(usize, T)> = Vec::new(); // (curve index, last t)
    for &te in grid {
        let roots = stationary_times(shape, te, scan);
        if roots.is_empty() {
            active.clear();
            continue;
        }
        let mut pairs: Vec<(T, usize, usize)> = Vec::new();
        for (ai, &(_, lt)) in active.iter().enumerate() {
            for (ri, &r) in roots.iter().enumerate() {
                let d = circ(r, lt);
                if d <= max_jump {
                    pairs.push((d, ai, ri));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut used_a = vec![false; active.len()];
        let mut used_r = vec![false; roots.len()];
        let mut next: Vec<(usize, T)> = Vec::new();
        for (_, ai, ri) in pairs {
            if used_a[ai] || used_r[ri] {
                continue;
            }
            used_a[ai] = true;
            used_r[ri] = true;
            let ci = active[ai].0;
            let t = roots[ri];
            curves[ci].samples.push(ArcSample { tau_eps: te, tau_a: arc_phase(shape, t, te), t });
            next.push((ci, t));
        }
        for (ri, &t) in roots.iter().enumerate() {
            if !used_r[ri] {
                let id = curves.len();
                curves.push(ArcCurve {
                    branch: id,
                    order: None,
                    samples: vec![ArcSample { tau_eps: te, tau_a: arc_phase(shape, t, te), t }],
                });
                next.push((id, t));
            }
        }
        active = next;
    }
    curves
}

/// Over-damped Fourier profile `W(tau_eps, tau_A) = (1/T) int_0^T delta(tau_A - G(t, tau_eps)) dt`
/// as a normalized histogram on a uniform `tau_A` grid (bins centred on grid points).
pub fn overdamped_spectrum<T: Real>(shape: &DrivingShape<T>, tau_eps: T, tau_a: &[T], samples: usize) -> Vec<T> {
    let n = tau_a.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    let h = (tau_a[n - 1] - tau_a[0]) / T::from_usize_lossy(n - 1);
    let dt = shape.period() / T::from_usize_lossy(samples);
    let w = T::one() / (T::from_usize_lossy(samples) * h);
    for j in 0..samples {
        let g = arc_phase(shape, dt * (T::from_usize_lossy(j) + T::lit(0.5)), tau_eps);
        let pos = ((g - tau_a[0]) / h).round();
        if pos >= T::zero() && pos < T::from_usize_lossy(n) {
            let i = pos.to_usize().unwrap_or(0);
            out[i] = out[i] + w;
        }
    }
    out
}
