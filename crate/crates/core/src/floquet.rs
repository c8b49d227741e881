//! Floquet states of the driven two-level system.
//!
//! The one-period propagator (monodromy matrix) is integrated with an
//! adaptive sixth-order Magnus scheme; its eigenphases are the
//! quasienergies and the propagated eigenvectors, sampled on an equidistant
//! time grid, give the Floquet modes and their Fourier coefficients.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::linalg::{eig_normal, inner, Mat2, Vec2};
use crate::model::{symmetrized_hamiltonian, DrivingShape, QubitParams};
use crate::num::{cis, Cplx, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FloquetError {
    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("integrator exceeded {max_steps} steps at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("integrator produced a non-finite propagator at t = {t}")]
    NonFinite { t: f64 },
    #[error("sample count {samples} must be a power of two and at least {min}")]
    BadSampleCount { samples: usize, min: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("requested {requested} Fourier components, at most {max} available from {samples} samples")]
    TooManyHarmonics { requested: usize, max: usize, samples: usize },
}

/// Options of the period propagation and Floquet decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetOptions<T> {
    /// Local error tolerance per accepted integrator step.
    pub tol: T,
    /// Number `M` of equidistant samples per period (power of two).
    pub samples: usize,
    /// Number of kept mode Fourier coefficients, `|k| <= k_modes`.
    pub k_modes: usize,
    pub max_steps: usize,
}

impl<T: Real> Default for FloquetOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-10), samples: 512, k_modes: 64, max_steps: 1_000_000 }
    }
}

/// One-period propagation result.
#[derive(Debug, Clone)]
pub struct Propagation<T: Real> {
    /// `U(T, 0)`.
    pub monodromy: Mat2<T>,
    /// `U(t_m, 0)` at `t_m = m T / M`, `m = 0..M`.
    pub samples: Vec<Mat2<T>>,
    pub steps: usize,
    pub rejected: usize,
    /// Largest accepted local error estimate.
    pub max_local_error: T,
}

const SQRT15: f64 = 3.872_983_346_207_417;

fn generator<T: Real>(q: &QubitParams<T>, shape: &DrivingShape<T>, t: T) -> Mat2<T> {
    symmetrized_hamiltonian(q, shape, t).scale(Complex::new(T::zero(), -T::one()))
}

/// Sixth-order Magnus step `U(t + h, t)` from three Gauss-Legendre nodes.
fn magnus6_step<T: Real>(q: &QubitParams<T>, shape: &DrivingShape<T>, t: T, h: T) -> Mat2<T> {
    let half = T::lit(0.5);
    let off = T::lit(SQRT15 / 10.0);
    let a1 = generator(q, shape, t + (half - off) * h);
    let a2 = generator(q, shape, t + half * h);
    let a3 = generator(q, shape, t + (half + off) * h);
    let b1 = a2.scale_re(h);
    let b2 = (a3 - a1).scale_re(h * T::lit(SQRT15 / 3.0));
    let b3 = (a3 - a2.scale_re(T::lit(2.0)) + a1).scale_re(h * T::lit(10.0 / 3.0));
    let c1 = b1.commutator(&b2);
    let c2 = b1.commutator(&(b3.scale_re(T::lit(2.0)) + c1)).scale_re(T::lit(-1.0 / 60.0));
    let lhs = b1.scale_re(T::lit(-20.0)) - b3 + c1;
    let omega = b1 + b3.scale_re(T::lit(1.0 / 12.0)) + lhs.commutator(&(b2 + c2)).scale_re(T::lit(1.0 / 240.0));
    omega.expm()
}

/// Integrates `i dU/dt = H(t) U` over one period.
///
/// Each of the `samples` segments is covered by adaptive Magnus steps;
/// the local error is estimated by step doubling.
pub fn propagate_period<T: Real>(
    q: &QubitParams<T>,
    shape: &DrivingShape<T>,
    tol: T,
    samples: usize,
    max_steps: usize,
) -> Result<Propagation<T>, FloquetError> {
    if !(tol > T::zero()) {
        return Err(FloquetError::BadTolerance);
    }
    if samples == 0 {
        return Err(FloquetError::BadSampleCount { samples, min: 1 });
    }
    let period = shape.period();
    let seg = period / T::from_usize_lossy(samples);
    let h_min = period * T::lit(1e-13);
    let richardson = T::lit(63.0);

    let mut u = Mat2::identity();
    let mut out = Vec::with_capacity(samples);
    out.push(u);
    let mut h_try = seg;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut max_err = T::zero();

    for m in 0..samples {
        let t_end = if m + 1 == samples { period } else { seg * T::from_usize_lossy(m + 1) };
        let mut t = seg * T::from_usize_lossy(m);
        while t < t_end {
            let remaining = t_end - t;
            let clipped = h_try >= remaining;
            let h = if clipped { remaining } else { h_try };
            let full = magnus6_step(q, shape, t, h);
            let hh = h * T::lit(0.5);
            let two = magnus6_step(q, shape, t + hh, hh) * magnus6_step(q, shape, t, hh);
            let err = (full - two).norm() / richardson;
            if !err.is_finite() {
                return Err(FloquetError::NonFinite { t: t.to_f64_lossy() });
            }
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * (tol / err).powf(T::lit(1.0 / 7.0))).max(T::lit(0.2)).min(T::lit(5.0))
            };
            if err <= tol {
                u = two * u;
                t = if clipped { t_end } else { t + h };
                steps += 1;
                max_err = max_err.max(err);
                if !clipped || factor < T::one() {
                    h_try = h * factor;
                }
            } else {
                rejected += 1;
                h_try = h * factor;
                if h_try < h_min {
                    return Err(FloquetError::StepUnderflow { t: t.to_f64_lossy() });
                }
            }
            if steps + rejected > max_steps {
                return Err(FloquetError::TooManySteps { t: t.to_f64_lossy(), max_steps });
            }
        }
        if m + 1 < samples {
            out.push(u);
        }
    }
    Ok(Propagation { monodromy: u, samples: out, steps, rejected, max_local_error: max_err })
}

/// Quasienergies and Floquet modes of the driven qubit.
#[derive(Debug, Clone)]
pub struct FloquetSolution<T: Real> {
    omega: T,
    /// `eps_alpha` in `[-Omega/2, Omega/2)`, ascending.
    pub quasienergies: [T; 2],
    /// Mode samples `|Phi_alpha(t_m)>`, `t_m = m T / M`.
    pub mode_samples: [Vec<Vec2<T>>; 2],
    /// Fourier coefficients `c_{alpha,k}`, stored at index `k + k_modes`.
    pub coefficients: [Vec<Vec2<T>>; 2],
    pub k_modes: usize,
    /// `|| U(T)^dagger U(T) - 1 ||`.
    pub unitarity_defect: T,
    pub max_local_error: T,
    pub steps: usize,
    /// Modulus of the difference of the two monodromy eigenvalues.
    pub eigenvalue_separation: T,
    /// Set when the eigenvalue separation is below `1e-10`; the modes are
    /// then an arbitrary orthonormal pair.
    pub near_degenerate: bool,
}

impl<T: Real> FloquetSolution<T> {
    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn period(&self) -> T {
        T::two_pi() / self.omega
    }

    pub fn samples(&self) -> usize {
        self.mode_samples[0].len()
    }

    pub fn sample_time(&self, m: usize) -> T {
        self.period() * T::from_usize_lossy(m) / T::from_usize_lossy(self.samples())
    }

    /// `c_{alpha,k}`, zero outside the stored range.
    pub fn coefficient(&self, alpha: usize, k: i64) -> Vec2<T> {
        let kk = self.k_modes as i64;
        if k.abs() > kk {
            return [Cplx::zero(); 2];
        }
        self.coefficients[alpha][(k + kk) as usize]
    }

    /// `|Phi_alpha(t)> = sum_k e^{-i k Omega t} c_{alpha,k}`.
    pub fn mode_at(&self, alpha: usize, t: T) -> Vec2<T> {
        let kk = self.k_modes as i64;
        let mut out = [Cplx::zero(); 2];
        for k in -kk..=kk {
            let c = self.coefficient(alpha, k);
            let ph = cis(-T::from_i64_lossy(k) * self.omega * t);
            out[0] = out[0] + c[0] * ph;
            out[1] = out[1] + c[1] * ph;
        }
        out
    }

    /// `max_{alpha beta} | sum_k c_{alpha,k}^dagger c_{beta,k} - delta_{alpha beta} |`.
    pub fn orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for a in 0..2 {
            for b in 0..2 {
                let s = self.coefficients[a]
                    .iter()
                    .zip(&self.coefficients[b])
                    .fold(Cplx::<T>::zero(), |acc, (u, v)| acc + inner(u, v));
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((s - Complex::<T>::new(target, T::zero())).norm());
            }
        }
        worst
    }

    /// Same solution with the two labels exchanged.
    pub fn swap_labels(&self) -> Self {
        let mut s = self.clone();
        s.quasienergies.swap(0, 1);
        s.mode_samples.swap(0, 1);
        s.coefficients.swap(0, 1);
        s
    }

    /// Distance of the two quasienergies on the Brillouin-zone circle.
    pub fn splitting(&self) -> T {
        let d = (self.quasienergies[1] - self.quasienergies[0]).abs();
        d.min(self.omega - d)
    }

    /// Phase-insensitive label overlap `(1/M) sum_m |<Phi^a_alpha(t_m)|Phi^b_beta(t_m)>|`.
    pub fn overlap_matrix(&self, other: &Self) -> [[T; 2]; 2] {
        let m = self.samples().min(other.samples());
        let stride_a = self.samples() / m;
        let stride_b = other.samples() / m;
        let mut out = [[T::zero(); 2]; 2];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let s = (0..m).fold(T::zero(), |acc, i| {
                    acc + inner(&self.mode_samples[a][i * stride_a], &other.mode_samples[b][i * stride_b]).norm()
                });
                *cell = s / T::from_usize_lossy(m);
            }
        }
        out
    }
}

/// Re-labels `next` so that its modes follow `prev` by maximal overlap.
/// Returns true when the labels were swapped.
pub fn match_labels<T: Real>(prev: &FloquetSolution<T>, next: &mut FloquetSolution<T>) -> bool {
    let o = prev.overlap_matrix(next);
    if o[0][1] + o[1][0] > o[0][0] + o[1][1] {
        *next = next.swap_labels();
        true
    } else {
        false
    }
}

fn planner_inverse<T: Real>(n: usize) -> Arc<dyn Fft<T>> {
    FftPlanner::new().plan_fft_inverse(n)
}

/// `(1/M) sum_m e^{+2 pi i k m / M} x_m` for all `k` (index `k mod M`).
pub(crate) fn fourier_coefficients<T: Real>(fft: &dyn Fft<T>, x: &mut [Cplx<T>]) {
    fft.process(x);
    let inv = T::from_usize_lossy(x.len()).recip();
    x.iter_mut().for_each(|z| *z = *z * inv);
}

/// Extracts components `|k| <= kmax` from a full DFT vector, ordered from `-kmax`.
pub(crate) fn centered<T: Real>(full: &[Cplx<T>], kmax: usize) -> Vec<Cplx<T>> {
    let n = full.len() as i64;
    (-(kmax as i64)..=kmax as i64).map(|k| full[k.rem_euclid(n) as usize]).collect()
}

/// Diagonalizes the monodromy matrix and builds the Floquet modes.
pub fn floquet_solve<T: Real>(
    q: &QubitParams<T>,
    shape: &DrivingShape<T>,
    opts: &FloquetOptions<T>,
) -> Result<FloquetSolution<T>, FloquetError> {
    let m = opts.samples;
    let min = 4 * (opts.k_modes + 1);
    if !m.is_power_of_two() || m < min {
        return Err(FloquetError::BadSampleCount { samples: m, min });
    }
    let prop = propagate_period(q, shape, opts.tol, m, opts.max_steps)?;
    let omega = shape.omega();
    let period = shape.period();

    let (lam, vecs, sep) = eig_normal(&prop.monodromy);
    let half = omega * T::lit(0.5);
    let mut eps = [T::zero(); 2];
    for i in 0..2 {
        let mut e = -lam[i].arg() / period;
        if e >= half {
            e = e - omega;
        }
        if e < -half {
            e = e + omega;
        }
        eps[i] = e;
    }
    let order: [usize; 2] = if eps[0] <= eps[1] { [0, 1] } else { [1, 0] };

    let fft = planner_inverse::<T>(m);
    let mut mode_samples: [Vec<Vec2<T>>; 2] = [Vec::with_capacity(m), Vec::with_capacity(m)];
    let mut coefficients: [Vec<Vec2<T>>; 2] = [Vec::new(), Vec::new()];
    let mut quasienergies = [T::zero(); 2];
    for (slot, &idx) in order.iter().enumerate() {
        let e = eps[idx];
        quasienergies[slot] = e;
        let v = vecs[idx];
        let samples: Vec<Vec2<T>> = prop
            .samples
            .iter()
            .enumerate()
            .map(|(j, u)| {
                let t = period * T::from_usize_lossy(j) / T::from_usize_lossy(m);
                let w = u.apply(&v);
                let ph = cis(e * t);
                [w[0] * ph, w[1] * ph]
            })
            .collect();
        let mut comps: [Vec<Cplx<T>>; 2] = [
            samples.iter().map(|s| s[0]).collect(),
            samples.iter().map(|s| s[1]).collect(),
        ];
        for c in comps.iter_mut() {
            fourier_coefficients(fft.as_ref(), c);
        }
        let c0 = centered(&comps[0], opts.k_modes);
        let c1 = centered(&comps[1], opts.k_modes);
        coefficients[slot] = c0.into_iter().zip(c1).map(|(a, b)| [a, b]).collect();
        mode_samples[slot] = samples;
    }

    Ok(FloquetSolution {
        omega,
        quasienergies,
        mode_samples,
        coefficients,
        k_modes: opts.k_modes,
        unitarity_defect: prop.monodromy.unitarity_defect(),
        max_local_error: prop.max_local_error,
        steps: prop.steps,
        eigenvalue_separation: sep,
        near_degenerate: sep < T::lit(1e-10),
    })
}

/// Fourier components `X_{alpha beta,k}` of the coupling operator in the
/// Floquet basis, `|k| <= k_max`.
#[derive(Debug, Clone)]
pub struct TransitionElements<T: Real> {
    pub k_max: usize,
    /// `data[alpha][beta][k + k_max]`.
    pub data: [[Vec<Cplx<T>>; 2]; 2],
}

impl<T: Real> TransitionElements<T> {
    #[inline]
    pub fn get(&self, alpha: usize, beta: usize, k: i64) -> Cplx<T> {
        let km = self.k_max as i64;
        if k.abs() > km {
            Cplx::zero()
        } else {
            self.data[alpha][beta][(k + km) as usize]
        }
    }

    /// `sum_k X_{alpha beta,k} e^{-i k Omega t}`.
    pub fn reconstruct(&self, alpha: usize, beta: usize, omega: T, t: T) -> Cplx<T> {
        let km = self.k_max as i64;
        (-km..=km).fold(Cplx::zero(), |acc, k| {
            acc + self.get(alpha, beta, k) * cis(-T::from_i64_lossy(k) * omega * t)
        })
    }

    /// `max |X_{alpha beta,k} - conj(X_{beta alpha,-k})|`.
    pub fn hermiticity_defect(&self) -> T {
        let km = self.k_max as i64;
        let mut worst = T::zero();
        for a in 0..2 {
            for b in 0..2 {
                for k in -km..=km {
                    worst = worst.max((self.get(a, b, k) - self.get(b, a, -k).conj()).norm());
                }
            }
        }
        worst
    }

    /// Largest modulus among the outermost components `|k| = k_max`.
    pub fn edge_magnitude(&self) -> T {
        let km = self.k_max as i64;
        let mut worst = T::zero();
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max(self.get(a, b, km).norm()).max(self.get(a, b, -km).norm());
            }
        }
        worst
    }
}

/// `X_{alpha beta,k} = (1/T) int_0^T e^{i k Omega t} <Phi_alpha(t)|X|Phi_beta(t)> dt`
/// by discrete Fourier transform of the sampled matrix elements.
pub fn transition_elements<T: Real>(
    sol: &FloquetSolution<T>,
    x: &Mat2<T>,
    k_max: usize,
) -> Result<TransitionElements<T>, FloquetError> {
    let m = sol.samples();
    if 2 * k_max >= m {
        return Err(FloquetError::TooManyHarmonics { requested: k_max, max: m / 2 - 1, samples: m });
    }
    let fft = planner_inverse::<T>(m);
    let mut data: [[Vec<Cplx<T>>; 2]; 2] = Default::default();
    for (a, row) in data.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            let mut xs: Vec<Cplx<T>> = sol.mode_samples[a]
                .iter()
                .zip(&sol.mode_samples[b])
                .map(|(u, v)| x.sandwich(u, v))
                .collect();
            fourier_coefficients(fft.as_ref(), &mut xs);
            *cell = centered(&xs, k_max);
        }
    }
    Ok(TransitionElements { k_max, data })
}

/// Quasienergies along an amplitude scan with labels followed by overlap.
pub fn quasienergy_scan<T: Real>(
    q: &QubitParams<T>,
    shape: &DrivingShape<T>,
    amplitudes: &[T],
    opts: &FloquetOptions<T>,
) -> Result<Vec<(T, [T; 2])>, FloquetError> {
    let mut out = Vec::with_capacity(amplitudes.len());
    let mut prev: Option<FloquetSolution<T>> = None;
    for &a in amplitudes {
        let mut sol = floquet_solve(&q.with_point(q.epsilon0, a), shape, opts)?;
        if let Some(p) = &prev {
            match_labels(p, &mut sol);
        }
        out.push((a, sol.quasienergies));
        prev = Some(sol);
    }
    Ok(out)
}
