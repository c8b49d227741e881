//! Bloch-Redfield generator in the Floquet basis and its periodic steady state.
//!
//! With the Ohmic bath spectrum `S(w) = pi N(-w)`, `N(w) = alpha w n_th(w)`,
//! coupled through the system operator `X`, the
//! dissipator is `D rho = -[X, L rho] + [X, rho L^dagger]` where
//! `L = int_0^inf C(tau) X(t - tau, t) dtau`. In the Floquet basis `L` has the
//! components `X_{ab,k} g_{ab,k}` with `g_{ab,k} = (pi/2) N(eps_a - eps_b - k Omega)`;
//! principal-value (Lamb shift) parts are dropped. The normalization is the
//! one for which the static qubit relaxes with `Gamma = pi alpha E coth(beta E / 2)`.

use num_complex::Complex;
use num_traits::Zero;
use rustfft::FftPlanner;

use crate::floquet::{centered, fourier_coefficients, FloquetSolution, TransitionElements};
use crate::linalg::{hermitian_eigenvalues, DenseMatrix, LuError, Mat2};
use crate::model::{BathParams, QubitParams};
use crate::num::{cis, Cplx, Real};

/// Default sideband cutoff of the density operator.
pub const DEFAULT_SIDEBANDS: usize = 5;
/// Largest supported sideband cutoff.
pub const MAX_SIDEBANDS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RedfieldError {
    #[error("transition elements cover |k| <= {have}, but sideband cutoff K = {sidebands} needs |k| <= {need}")]
    InsufficientHarmonics { have: usize, need: usize, sidebands: usize },
    #[error("sideband cutoff {0} exceeds the supported maximum {MAX_SIDEBANDS}")]
    TooManySidebands(usize),
    #[error("Liouvillian blocks cover |k| <= {have}, steady state with K = {sidebands} needs {need}")]
    InsufficientBlocks { have: usize, need: usize, sidebands: usize },
    #[error("steady state is not unique without dissipation (alpha = 0)")]
    NoDissipation,
    #[error("steady-state system is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("linear solve failed: {0}")]
    Linear(#[from] LuError),
}

/// `N(w) = alpha w n_th(w)`, `n_th(w) = 1 / (e^{beta w} - 1)`, continued to
/// `N(0) = alpha / beta` and to negative frequencies, where it equals
/// `alpha |w| (1 + n_th(|w|))`.
pub fn bath_rate<T: Real>(omega: T, bath: &BathParams<T>) -> T {
    let x = bath.beta * omega;
    if x.abs() < T::lit(1e-10) {
        // x / (e^x - 1) = 1 - x/2 + x^2/12
        return bath.alpha / bath.beta * (T::one() - x * T::lit(0.5) + x * x / T::lit(12.0));
    }
    if x > T::lit(700.0) {
        return bath.alpha * omega * (-x).exp();
    }
    bath.alpha * omega / x.exp_m1()
}

/// Fourier components `L^(q)`, `|q| <= k_max`, of the Liouvillian acting on
/// `rho_{ab}` in the doubled index `ab = 2 a + b`.
#[derive(Debug, Clone)]
pub struct LiouvillianBlocks<T: Real> {
    pub k_max: usize,
    pub omega: T,
    pub blocks: Vec<[[Cplx<T>; 4]; 4]>,
    pub dissipative: bool,
}

impl<T: Real> LiouvillianBlocks<T> {
    pub fn block(&self, q: i64) -> Option<&[[Cplx<T>; 4]; 4]> {
        let km = self.k_max as i64;
        (q.abs() <= km).then(|| &self.blocks[(q + km) as usize])
    }

    /// `max_{q, a'b'} |sum_a L^(q)_{aa, a'b'}|`.
    pub fn trace_defect(&self) -> T {
        let mut worst = T::zero();
        for b in &self.blocks {
            for col in 0..4 {
                worst = worst.max((b[0][col] + b[3][col]).norm());
            }
        }
        worst
    }

    /// Copy with every `q != 0` block set to zero (the secular, driving-averaged
    /// generator).
    pub fn secular_only(&self) -> Self {
        let mut out = self.clone();
        let km = self.k_max;
        for (i, b) in out.blocks.iter_mut().enumerate() {
            if i != km {
                *b = [[Cplx::zero(); 4]; 4];
            }
        }
        out
    }
}

/// Signed-index complex sequence helper: value at `k` for data stored from `-kmax`.
#[derive(Clone)]
struct Seq<T: Real> {
    kmax: i64,
    v: Vec<Cplx<T>>,
}

impl<T: Real> Seq<T> {
    #[inline]
    fn at(&self, k: i64) -> Cplx<T> {
        if k.abs() > self.kmax {
            Cplx::zero()
        } else {
            self.v[(k + self.kmax) as usize]
        }
    }
}

/// `sum_k u(k) v(q - k)`, skipping negligible factors.
fn convolve<T: Real>(u: &Seq<T>, v: &Seq<T>, q: i64) -> Cplx<T> {
    let lo = (-u.kmax).max(q - v.kmax);
    let hi = u.kmax.min(q + v.kmax);
    let cut = T::lit(1e-12);
    let mut acc = Cplx::zero();
    for k in lo..=hi {
        let a = u.at(k);
        if a.norm_sqr() < cut * cut {
            continue;
        }
        acc = acc + a * v.at(q - k);
    }
    acc
}

/// Assembles `L^(q)` for `|q| <= 2K`.
pub fn build_liouvillian<T: Real>(
    sol: &FloquetSolution<T>,
    x: &TransitionElements<T>,
    bath: &BathParams<T>,
    sidebands: usize,
) -> Result<LiouvillianBlocks<T>, RedfieldError> {
    if sidebands > MAX_SIDEBANDS {
        return Err(RedfieldError::TooManySidebands(sidebands));
    }
    let need = 2 * sidebands;
    if x.k_max < need {
        return Err(RedfieldError::InsufficientHarmonics { have: x.k_max, need, sidebands });
    }
    let omega = sol.omega();
    let eps = sol.quasienergies;
    let kx = x.k_max as i64;
    let half_pi = T::FRAC_PI_2();

    // X, Lambda = X g, and Lambda^dagger components
    let mut xs: [[Option<Seq<T>>; 2]; 2] = Default::default();
    let mut lam: [[Option<Seq<T>>; 2]; 2] = Default::default();
    let mut lam_dag: [[Option<Seq<T>>; 2]; 2] = Default::default();
    for a in 0..2 {
        for b in 0..2 {
            let xv: Vec<Cplx<T>> = (-kx..=kx).map(|k| x.get(a, b, k)).collect();
            let lv: Vec<Cplx<T>> = (-kx..=kx)
                .map(|k| {
                    let w = eps[a] - eps[b] - T::from_i64_lossy(k) * omega;
                    x.get(a, b, k) * (half_pi * bath_rate(w, bath))
                })
                .collect();
            // (L^dagger)_{ab,k} = X_{ab,k} g_{ba,-k}
            let dv: Vec<Cplx<T>> = (-kx..=kx)
                .map(|k| {
                    let w = eps[b] - eps[a] + T::from_i64_lossy(k) * omega;
                    x.get(a, b, k) * (half_pi * bath_rate(w, bath))
                })
                .collect();
            xs[a][b] = Some(Seq { kmax: kx, v: xv });
            lam[a][b] = Some(Seq { kmax: kx, v: lv });
            lam_dag[a][b] = Some(Seq { kmax: kx, v: dv });
        }
    }
    let xs = xs.map(|r| r.map(|s| s.expect("filled")));
    let lam = lam.map(|r| r.map(|s| s.expect("filled")));
    let lam_dag = lam_dag.map(|r| r.map(|s| s.expect("filled")));

    let km = need as i64;
    let mut blocks = Vec::with_capacity(2 * need + 1);
    for q in -km..=km {
        let mut blk = [[Cplx::zero(); 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for ap in 0..2 {
                    for bp in 0..2 {
                        let mut v = Cplx::zero();
                        if q == 0 && a == ap && b == bp {
                            v = v + Complex::new(T::zero(), -(eps[a] - eps[b]));
                        }
                        // + Lambda rho X
                        v = v + convolve(&lam[a][ap], &xs[bp][b], q);
                        // + X rho Lambda^dagger
                        v = v + convolve(&xs[a][ap], &lam_dag[bp][b], q);
                        if b == bp {
                            // - X Lambda rho
                            for g in 0..2 {
                                v = v - convolve(&xs[a][g], &lam[g][ap], q);
                            }
                        }
                        if a == ap {
                            // - rho Lambda^dagger X
                            for g in 0..2 {
                                v = v - convolve(&lam_dag[bp][g], &xs[g][b], q);
                            }
                        }
                        blk[2 * a + b][2 * ap + bp] = v;
                    }
                }
            }
        }
        blocks.push(blk);
    }
    Ok(LiouvillianBlocks { k_max: need, omega, blocks, dissipative: bath.alpha > T::zero() })
}

/// Fourier coefficients `rho^(k)` of the periodic long-time state in the
/// Floquet basis, `|k| <= K`.
#[derive(Debug, Clone)]
pub struct SteadyState<T: Real> {
    pub sidebands: usize,
    pub omega: T,
    /// `rho[k + K][a][b]`.
    pub rho: Vec<[[Cplx<T>; 2]; 2]>,
    /// Residual of the equation that was replaced by the normalization.
    pub replaced_row_residual: T,
    /// `|sum_a rho^(0)_{aa} - 1|`.
    pub trace_defect: T,
    /// `max |rho^(k)_{ab} - conj(rho^(-k)_{ba})|`.
    pub hermiticity_defect: T,
    /// `||A||_1 ||A^{-1}||_1` of the solved system.
    pub condition_estimate: T,
}

impl<T: Real> SteadyState<T> {
    pub fn coefficient(&self, k: i64) -> [[Cplx<T>; 2]; 2] {
        let kk = self.sidebands as i64;
        if k.abs() > kk {
            [[Cplx::zero(); 2]; 2]
        } else {
            self.rho[(k + kk) as usize]
        }
    }

    /// `rho_{ab}(t) = sum_k e^{-i k Omega t} rho^(k)_{ab}`.
    pub fn floquet_matrix_at(&self, t: T) -> [[Cplx<T>; 2]; 2] {
        let kk = self.sidebands as i64;
        let mut out = [[Cplx::zero(); 2]; 2];
        for k in -kk..=kk {
            let ph = cis(-T::from_i64_lossy(k) * self.omega * t);
            let c = self.coefficient(k);
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] = out[a][b] + c[a][b] * ph;
                }
            }
        }
        out
    }

    /// Density operator in the qubit basis at sample `m` of the Floquet grid.
    pub fn density_at_sample(&self, sol: &FloquetSolution<T>, m: usize) -> Mat2<T> {
        let r = self.floquet_matrix_at(sol.sample_time(m));
        let mut out = Mat2::zero();
        for a in 0..2 {
            for b in 0..2 {
                let phi_a = &sol.mode_samples[a][m];
                let phi_b = &sol.mode_samples[b][m];
                out = out + Mat2::outer(phi_a, phi_b).scale(r[a][b]);
            }
        }
        out
    }

    /// Trace and positivity diagnostics over all Floquet sample times.
    pub fn diagnose(&self, sol: &FloquetSolution<T>) -> StateDiagnostics<T> {
        let mut min_eig = T::infinity();
        let mut trace_defect = T::zero();
        let mut herm = T::zero();
        for m in 0..sol.samples() {
            let rho = self.density_at_sample(sol, m);
            trace_defect = trace_defect.max((rho.trace() - Complex::new(T::one(), T::zero())).norm());
            herm = herm.max((rho - rho.adjoint()).norm());
            min_eig = min_eig.min(hermitian_eigenvalues(&rho)[0]);
        }
        StateDiagnostics {
            min_eigenvalue: min_eig,
            max_trace_defect: trace_defect,
            max_hermiticity_defect: herm,
            positivity_violated: min_eig < -T::lit(POSITIVITY_TOLERANCE),
        }
    }
}

/// Negative eigenvalues of `rho(t)` down to this value are tolerated.
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics<T> {
    pub min_eigenvalue: T,
    pub max_trace_defect: T,
    pub max_hermiticity_defect: T,
    pub positivity_violated: bool,
}

const CONDITION_LIMIT: f64 = 1e12;

/// Solves `-i k Omega rho^(k) = sum_k' L^(k-k') rho^(k')` for `|k| <= K` with the
/// `k = 0, (a, b) = (1, 1)` row replaced by `tr rho^(0) = 1`.
pub fn steady_state<T: Real>(blocks: &LiouvillianBlocks<T>, sidebands: usize) -> Result<SteadyState<T>, RedfieldError> {
    if !blocks.dissipative {
        return Err(RedfieldError::NoDissipation);
    }
    if blocks.k_max < 2 * sidebands {
        return Err(RedfieldError::InsufficientBlocks { have: blocks.k_max, need: 2 * sidebands, sidebands });
    }
    let kk = sidebands as i64;
    let nk = 2 * sidebands + 1;
    let n = 4 * nk;
    let idx = |k: i64, ab: usize| ((k + kk) as usize) * 4 + ab;
    let omega = blocks.omega;

    let mut a = DenseMatrix::zeros(n);
    for k in -kk..=kk {
        for ab in 0..4 {
            let row = idx(k, ab);
            for kp in -kk..=kk {
                let blk = blocks.block(k - kp).expect("block range checked");
                for abp in 0..4 {
                    *a.at_mut(row, idx(kp, abp)) = blk[ab][abp];
                }
            }
            let diag = a.at(row, row) + Complex::new(T::zero(), T::from_i64_lossy(k) * omega);
            *a.at_mut(row, row) = diag;
        }
    }
    let norm_row = idx(0, 0);
    let replaced: Vec<Cplx<T>> = (0..n).map(|c| a.at(norm_row, c)).collect();
    for c in 0..n {
        *a.at_mut(norm_row, c) = Cplx::zero();
    }
    *a.at_mut(norm_row, idx(0, 0)) = Complex::new(T::one(), T::zero());
    *a.at_mut(norm_row, idx(0, 3)) = Complex::new(T::one(), T::zero());

    let mut rhs = vec![Cplx::zero(); n];
    rhs[norm_row] = Complex::new(T::one(), T::zero());

    let lu = a.lu()?;
    let cond = a.norm1() * lu.inverse_norm1();
    if !(cond.to_f64_lossy() <= CONDITION_LIMIT) {
        return Err(RedfieldError::IllConditioned(cond.to_f64_lossy()));
    }
    let sol = lu.solve(&rhs)?;

    let residual = replaced.iter().zip(&sol).fold(Cplx::zero(), |acc, (r, s)| acc + *r * *s).norm();
    let rho: Vec<[[Cplx<T>; 2]; 2]> = (-kk..=kk)
        .map(|k| {
            let base = idx(k, 0);
            [[sol[base], sol[base + 1]], [sol[base + 2], sol[base + 3]]]
        })
        .collect();
    let trace_defect = (rho[sidebands][0][0] + rho[sidebands][1][1] - Complex::new(T::one(), T::zero())).norm();
    let mut herm = T::zero();
    for k in -kk..=kk {
        let r = &rho[(k + kk) as usize];
        let rm = &rho[(kk - k) as usize];
        for x in 0..2 {
            for y in 0..2 {
                herm = herm.max((r[x][y] - rm[y][x].conj()).norm());
            }
        }
    }
    Ok(SteadyState {
        sidebands,
        omega,
        rho,
        replaced_row_residual: residual,
        trace_defect,
        hermiticity_defect: herm,
        condition_estimate: cond,
    })
}

/// Time-averaged population of the excited eigenstate of the undriven qubit.
pub fn excited_population<T: Real>(state: &SteadyState<T>, sol: &FloquetSolution<T>, q: &QubitParams<T>) -> T {
    let e = q.excited_state();
    let m = sol.samples();
    let proj: [Vec<Cplx<T>>; 2] = [0, 1].map(|a| {
        sol.mode_samples[a]
            .iter()
            .map(|phi| phi[0] * e[0] + phi[1] * e[1])
            .collect::<Vec<_>>()
    });
    let fft = FftPlanner::<T>::new().plan_fft_forward(m);
    let kk = state.sidebands as i64;
    let mut p = Cplx::zero();
    for a in 0..2 {
        for b in 0..2 {
            // (1/M) sum_m e^{-i k Omega t_m} <e|Phi_a><Phi_b|e>
            let mut w: Vec<Cplx<T>> = proj[a].iter().zip(&proj[b]).map(|(u, v)| *u * v.conj()).collect();
            fourier_coefficients(fft.as_ref(), &mut w);
            let w = centered(&w, state.sidebands);
            for k in -kk..=kk {
                p = p + state.coefficient(k)[a][b] * w[(k + kk) as usize];
            }
        }
    }
    p.re
}

/// Solver knobs of the full Floquet-Redfield pipeline at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions<T> {
    pub floquet: crate::floquet::FloquetOptions<T>,
    /// `K_X`, number of kept transition-element harmonics.
    pub k_x: usize,
    /// `K`, density-operator sideband cutoff.
    pub sidebands: usize,
}

impl<T: Real> Default for PipelineOptions<T> {
    fn default() -> Self {
        Self { floquet: Default::default(), k_x: 32, sidebands: DEFAULT_SIDEBANDS }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Floquet(#[from] crate::floquet::FloquetError),
    #[error(transparent)]
    Redfield(#[from] RedfieldError),
}

/// Steady state and excitation probability at one parameter point.
#[derive(Debug, Clone)]
pub struct PointSolution<T: Real> {
    pub floquet: FloquetSolution<T>,
    pub state: SteadyState<T>,
    pub p_ex: T,
}

/// Runs Floquet decomposition, Liouvillian assembly and the steady-state solve.
pub fn solve_point<T: Real>(
    q: &QubitParams<T>,
    shape: &crate::model::DrivingShape<T>,
    bath: &BathParams<T>,
    opts: &PipelineOptions<T>,
) -> Result<PointSolution<T>, PipelineError> {
    let sol = crate::floquet::floquet_solve(q, shape, &opts.floquet)?;
    let p = solve_with_floquet(&sol, q, bath, opts)?;
    Ok(PointSolution { floquet: sol, state: p.0, p_ex: p.1 })
}

/// Redfield part of the pipeline for a precomputed Floquet solution.
pub fn solve_with_floquet<T: Real>(
    sol: &FloquetSolution<T>,
    q: &QubitParams<T>,
    bath: &BathParams<T>,
    opts: &PipelineOptions<T>,
) -> Result<(SteadyState<T>, T), PipelineError> {
    let x = crate::floquet::transition_elements(sol, &bath.coupling_operator(), opts.k_x)?;
    solve_with_elements(sol, &x, q, bath, opts)
}

/// Redfield part of the pipeline for precomputed transition elements.
pub fn solve_with_elements<T: Real>(
    sol: &FloquetSolution<T>,
    x: &TransitionElements<T>,
    q: &QubitParams<T>,
    bath: &BathParams<T>,
    opts: &PipelineOptions<T>,
) -> Result<(SteadyState<T>, T), PipelineError> {
    let blocks = build_liouvillian(sol, x, bath, opts.sidebands)?;
    let state = steady_state(&blocks, opts.sidebands)?;
    let p = excited_population(&state, sol, q);
    Ok((state, p))
}
