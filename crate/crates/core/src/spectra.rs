//! Pattern sweeps over the `(eps0, A)` plane, their 2D Fourier transform,
//! sampling and fitting along arcs, and the pattern overlap metric.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::analytic::ArcCurve;
use crate::floquet::{floquet_solve, transition_elements};
use crate::model::{BathParams, DrivingShape, QubitParams};
use crate::num::{Cplx, Real};
use crate::redfield::{solve_with_elements, PipelineError, PipelineOptions};

/// Sweeps abort when more than this fraction of grid points fails.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectraError {
    #[error("axis `{0}` must be non-empty, finite, strictly increasing and uniform")]
    BadAxis(&'static str),
    #[error("grid has {got} values, axes need {need}")]
    ShapeMismatch { got: usize, need: usize },
    #[error("{failed} of {total} grid points failed (first: {first})")]
    TooManyFailures { failed: usize, total: usize, first: String },
    #[error("bath has no dissipation (alpha = 0)")]
    NoDissipation,
    #[error("padding factor must be 1, 2 or 4, got {0}")]
    BadPadding(usize),
    #[error("fit window [{0}, {1}] holds fewer than 8 samples")]
    DegenerateWindow(f64, f64),
    #[error("non-positive magnitude {0} inside the fit window")]
    NonPositiveSample(f64),
    #[error("patterns are defined on different axes")]
    AxisMismatch,
    #[error("pattern has zero norm")]
    ZeroNorm,
    #[error("worker pool: {0}")]
    Pool(String),
}

fn axis_ok<T: Real>(a: &[T]) -> bool {
    if a.is_empty() || a.iter().any(|x| !x.is_finite()) {
        return false;
    }
    if a.len() == 1 {
        return true;
    }
    let h = (a[a.len() - 1] - a[0]) / T::from_usize_lossy(a.len() - 1);
    h > T::zero()
        && a.windows(2).all(|w| {
            let d = w[1] - w[0];
            d > T::zero() && (d - h).abs() <= T::lit(1e-6) * h.abs()
        })
}

fn spacing<T: Real>(a: &[T]) -> T {
    if a.len() < 2 {
        T::one()
    } else {
        (a[a.len() - 1] - a[0]) / T::from_usize_lossy(a.len() - 1)
    }
}

/// `P_ex` on a uniform `(eps0, A)` grid, `eps0` the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid<T> {
    pub eps_axis: Vec<T>,
    pub amp_axis: Vec<T>,
    pub values: Vec<T>,
    /// Solver parameters and sweep diagnostics.
    pub metadata: BTreeMap<String, String>,
    /// Flat indices of points that failed and hold NaN.
    pub missing: Vec<usize>,
}

impl<T: Real> PatternGrid<T> {
    pub fn new(eps_axis: Vec<T>, amp_axis: Vec<T>, values: Vec<T>) -> Self {
        Self { eps_axis, amp_axis, values, metadata: BTreeMap::new(), missing: Vec::new() }
    }

    pub fn n_eps(&self) -> usize {
        self.eps_axis.len()
    }

    pub fn n_amp(&self) -> usize {
        self.amp_axis.len()
    }

    #[inline]
    pub fn index(&self, i_eps: usize, i_amp: usize) -> usize {
        i_eps * self.amp_axis.len() + i_amp
    }

    #[inline]
    pub fn at(&self, i_eps: usize, i_amp: usize) -> T {
        self.values[self.index(i_eps, i_amp)]
    }

    /// Checks axis uniformity and that values match the axes (and are finite
    /// except at recorded missing points).
    pub fn validate(&self) -> Result<(), SpectraError> {
        if !axis_ok(&self.eps_axis) {
            return Err(SpectraError::BadAxis("eps0"));
        }
        if !axis_ok(&self.amp_axis) {
            return Err(SpectraError::BadAxis("A"));
        }
        let need = self.n_eps() * self.n_amp();
        if self.values.len() != need {
            return Err(SpectraError::ShapeMismatch { got: self.values.len(), need });
        }
        Ok(())
    }

    /// `eps0` slice at amplitude index `i_amp`.
    pub fn eps_slice(&self, i_amp: usize) -> Vec<T> {
        (0..self.n_eps()).map(|i| self.at(i, i_amp)).collect()
    }

    /// Values with missing points replaced by their nearest finite neighbour
    /// (grid-index distance, ties broken by scan order).
    pub fn filled(&self) -> Vec<T> {
        let mut out = self.values.clone();
        let (ne, na) = (self.n_eps(), self.n_amp());
        for (idx, v) in self.values.iter().enumerate() {
            if v.is_finite() {
                continue;
            }
            let (i0, j0) = ((idx / na) as i64, (idx % na) as i64);
            let mut best: Option<(i64, T)> = None;
            for i in 0..ne as i64 {
                for j in 0..na as i64 {
                    let w = self.values[(i as usize) * na + j as usize];
                    if !w.is_finite() {
                        continue;
                    }
                    let d = (i - i0) * (i - i0) + (j - j0) * (j - j0);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, w));
                    }
                }
            }
            out[idx] = best.map_or(T::zero(), |b| b.1);
        }
        out
    }
}

/// Provenance record of the solver configuration behind a sweep.
pub fn provenance<T: Real>(
    template: &QubitParams<T>,
    shape: &DrivingShape<T>,
    bath: &BathParams<T>,
    opts: &PipelineOptions<T>,
) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("source".into(), "floquet-redfield".into());
    m.insert("delta".into(), template.delta.to_string());
    m.insert("omega".into(), shape.omega().to_string());
    let h: Vec<String> = shape.harmonics().iter().map(|h| format!("{}:{}:{}", h.k, h.a, h.b)).collect();
    m.insert("harmonics".into(), h.join(","));
    m.insert("alpha".into(), bath.alpha.to_string());
    m.insert("beta".into(), bath.beta.to_string());
    m.insert("theta".into(), bath.theta.to_string());
    m.insert("sidebands".into(), opts.sidebands.to_string());
    m.insert("k_x".into(), opts.k_x.to_string());
    m.insert("samples".into(), opts.floquet.samples.to_string());
    m.insert("k_modes".into(), opts.floquet.k_modes.to_string());
    m.insert("tol".into(), opts.floquet.tol.to_string());
    m
}

/// Sweep knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions<T> {
    pub pipeline: PipelineOptions<T>,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        Self { pipeline: PipelineOptions::default(), workers: 0 }
    }
}

/// Per-point failure recorded during a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub index: usize,
    pub message: String,
}

fn run_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R, SpectraError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SpectraError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Full-pipeline `P_ex` grids for several baths sharing one Floquet
/// decomposition per grid point. Points are independent and evaluated in
/// parallel; results are collected in grid order, so output is deterministic.
pub fn sweep_patterns<T: Real>(
    template: &QubitParams<T>,
    shape: &DrivingShape<T>,
    baths: &[BathParams<T>],
    eps_axis: &[T],
    amp_axis: &[T],
    opts: &SweepOptions<T>,
) -> Result<Vec<PatternGrid<T>>, SpectraError> {
    if !axis_ok(eps_axis) {
        return Err(SpectraError::BadAxis("eps0"));
    }
    if !axis_ok(amp_axis) {
        return Err(SpectraError::BadAxis("A"));
    }
    if baths.iter().any(|b| !(b.alpha > T::zero())) {
        return Err(SpectraError::NoDissipation);
    }
    let na = amp_axis.len();
    let total = eps_axis.len() * na;
    let nb = baths.len();
    let popts = opts.pipeline;

    let point = |idx: usize| -> Vec<Result<T, PipelineError>> {
        let q = template.with_point(eps_axis[idx / na], amp_axis[idx % na]);
        let sol = match floquet_solve(&q, shape, &popts.floquet) {
            Ok(s) => s,
            Err(e) => return vec![Err(e.into()); nb],
        };
        // transition elements depend on the bath only through its coupling angle
        let mut cache: Vec<(T, crate::floquet::TransitionElements<T>)> = Vec::new();
        baths
            .iter()
            .map(|bath| {
                let pos = cache.iter().position(|(th, _)| *th == bath.theta);
                let i = match pos {
                    Some(i) => i,
                    None => {
                        let x = transition_elements(&sol, &bath.coupling_operator(), popts.k_x)?;
                        cache.push((bath.theta, x));
                        cache.len() - 1
                    }
                };
                solve_with_elements(&sol, &cache[i].1, &q, bath, &popts).map(|r| r.1)
            })
            .collect()
    };
    let results: Vec<Vec<Result<T, PipelineError>>> =
        run_pool(opts.workers, || (0..total).into_par_iter().map(point).collect())?;

    let mut grids = Vec::with_capacity(nb);
    for (b, bath) in baths.iter().enumerate() {
        let mut values = Vec::with_capacity(total);
        let mut failures = Vec::new();
        for (idx, r) in results.iter().enumerate() {
            match &r[b] {
                Ok(v) if v.is_finite() => values.push(*v),
                Ok(v) => {
                    failures.push(PointFailure { index: idx, message: format!("non-finite population {v}") });
                    values.push(T::nan());
                }
                Err(e) => {
                    failures.push(PointFailure { index: idx, message: e.to_string() });
                    values.push(T::nan());
                }
            }
        }
        if failures.len() as f64 > MAX_FAILED_FRACTION * total as f64 {
            return Err(SpectraError::TooManyFailures {
                failed: failures.len(),
                total,
                first: failures[0].message.clone(),
            });
        }
        let mut g = PatternGrid::new(eps_axis.to_vec(), amp_axis.to_vec(), values);
        g.metadata = provenance(template, shape, bath, &popts);
        g.metadata.insert("missing".into(), failures.len().to_string());
        g.missing = failures.iter().map(|f| f.index).collect();
        grids.push(g);
    }
    Ok(grids)
}

/// Full-pipeline `P_ex(eps0, A)` for one bath.
pub fn sweep_pattern<T: Real>(
    template: &QubitParams<T>,
    shape: &DrivingShape<T>,
    bath: &BathParams<T>,
    eps_axis: &[T],
    amp_axis: &[T],
    opts: &SweepOptions<T>,
) -> Result<PatternGrid<T>, SpectraError> {
    Ok(sweep_patterns(template, shape, std::slice::from_ref(bath), eps_axis, amp_axis, opts)?.remove(0))
}

/// `W(tau_eps, tau_A)` on centred conjugate axes, `tau_eps` the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid<T> {
    pub tau_eps: Vec<T>,
    pub tau_a: Vec<T>,
    pub values: Vec<Cplx<T>>,
    pub pad: usize,
    pub mean_subtracted: bool,
    /// Subtracted mean (zero when not subtracted).
    pub mean: T,
    pub metadata: BTreeMap<String, String>,
}

impl<T: Real> SpectrumGrid<T> {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Cplx<T> {
        self.values[i * self.tau_a.len() + j]
    }

    pub fn magnitude(&self, i: usize, j: usize) -> T {
        self.at(i, j).norm()
    }

    pub fn d_tau_eps(&self) -> T {
        spacing(&self.tau_eps)
    }

    pub fn d_tau_a(&self) -> T {
        spacing(&self.tau_a)
    }

    /// Index of the `tau_eps` bin nearest to `t`.
    pub fn eps_index(&self, t: T) -> Option<usize> {
        nearest(&self.tau_eps, t)
    }

    pub fn amp_index(&self, t: T) -> Option<usize> {
        nearest(&self.tau_a, t)
    }

    /// Bilinear interpolation of `|W|`; `None` outside the grid.
    pub fn magnitude_at(&self, te: T, ta: T) -> Option<T> {
        let (i, fi) = locate(&self.tau_eps, te)?;
        let (j, fj) = locate(&self.tau_a, ta)?;
        let one = T::one();
        let m = |a: usize, b: usize| self.magnitude(a, b);
        Some(
            (one - fi) * (one - fj) * m(i, j)
                + fi * (one - fj) * m(i + 1, j)
                + (one - fi) * fj * m(i, j + 1)
                + fi * fj * m(i + 1, j + 1),
        )
    }

    /// `max |W(tau) - conj W(-tau)|` over all bins whose mirror lies on the grid.
    pub fn conjugate_symmetry_defect(&self) -> T {
        let (ne, na) = (self.tau_eps.len(), self.tau_a.len());
        let mut worst = T::zero();
        for i in 0..ne {
            for j in 0..na {
                // centred axes: index c - n/2 <-> n/2 - c (mod n)
                let mi = (ne - i) % ne;
                let mj = (na - j) % na;
                worst = worst.max((self.at(i, j) - self.at(mi, mj).conj()).norm());
            }
        }
        worst
    }
}

fn nearest<T: Real>(axis: &[T], t: T) -> Option<usize> {
    let h = spacing(axis);
    let pos = ((t - axis[0]) / h).round();
    if pos < T::zero() || pos > T::from_usize_lossy(axis.len() - 1) {
        return None;
    }
    pos.to_usize()
}

/// Cell index and fractional offset for bilinear interpolation.
fn locate<T: Real>(axis: &[T], t: T) -> Option<(usize, T)> {
    let n = axis.len();
    if n < 2 {
        return None;
    }
    let h = spacing(axis);
    let pos = (t - axis[0]) / h;
    if !(pos >= T::zero()) || pos > T::from_usize_lossy(n - 1) {
        return None;
    }
    let i = pos.floor().to_usize()?.min(n - 2);
    Some((i, pos - T::from_usize_lossy(i)))
}

fn fft2_in_place<T: Real>(data: &mut [Cplx<T>], rows: usize, cols: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(cols), planner.plan_fft_inverse(rows))
    } else {
        (planner.plan_fft_forward(cols), planner.plan_fft_forward(rows))
    };
    for r in data.chunks_exact_mut(cols) {
        row_fft.process(r);
    }
    let mut col = vec![Cplx::zero(); rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = data[r * cols + c];
        }
        col_fft.process(&mut col);
        for r in 0..rows {
            data[r * cols + c] = col[r];
        }
    }
}

/// Centred conjugate axis `tau_k = (k - n/2) 2 pi / (n h)`.
fn conjugate_axis<T: Real>(n: usize, h: T) -> Vec<T> {
    let d = T::two_pi() / (T::from_usize_lossy(n) * h);
    (0..n).map(|k| (T::from_i64_lossy(k as i64 - (n / 2) as i64)) * d).collect()
}

/// 2D transform `W(tau_eps, tau_A) = (d_eps d_A / 4 pi^2) sum P(eps, A) e^{-i (eps - eps_min) tau_eps - i (A - A_min) tau_A}`
/// of the zero-padded pattern (phase referenced to the grid origin). Missing
/// points are filled by nearest neighbour first.
pub fn fourier2d<T: Real>(p: &PatternGrid<T>, pad: usize, subtract_mean: bool) -> Result<SpectrumGrid<T>, SpectraError> {
    if ![1, 2, 4].contains(&pad) {
        return Err(SpectraError::BadPadding(pad));
    }
    p.validate()?;
    let (ne, na) = (p.n_eps(), p.n_amp());
    let (rows, cols) = (ne * pad, na * pad);
    let vals = p.filled();
    let mean = if subtract_mean {
        vals.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(vals.len())
    } else {
        T::zero()
    };
    let mut data = vec![Cplx::zero(); rows * cols];
    for i in 0..ne {
        for j in 0..na {
            data[i * cols + j] = Complex::new(vals[i * na + j] - mean, T::zero());
        }
    }
    fft2_in_place(&mut data, rows, cols, false);
    let (he, ha) = (spacing(&p.eps_axis), spacing(&p.amp_axis));
    let norm = he * ha / (T::two_pi() * T::two_pi());
    // fftshift into centred order
    let mut values = vec![Cplx::zero(); rows * cols];
    for i in 0..rows {
        let si = (i + rows - rows / 2) % rows;
        for j in 0..cols {
            let sj = (j + cols - cols / 2) % cols;
            values[i * cols + j] = data[si * cols + sj] * norm;
        }
    }
    let mut metadata = p.metadata.clone();
    metadata.insert("pad".into(), pad.to_string());
    metadata.insert("mean_subtracted".into(), subtract_mean.to_string());
    if !p.missing.is_empty() {
        metadata.insert("filled_points".into(), p.missing.len().to_string());
    }
    Ok(SpectrumGrid {
        tau_eps: conjugate_axis(rows, he),
        tau_a: conjugate_axis(cols, ha),
        values,
        pad,
        mean_subtracted: subtract_mean,
        mean,
        metadata,
    })
}

/// Inverse of [`fourier2d`]: the real padded pattern (mean restored), `rows x cols`.
pub fn inverse_fourier2d<T: Real>(s: &SpectrumGrid<T>, eps_spacing: T, amp_spacing: T) -> Vec<T> {
    let (rows, cols) = (s.tau_eps.len(), s.tau_a.len());
    let mut data = vec![Cplx::zero(); rows * cols];
    for i in 0..rows {
        let si = (i + rows / 2) % rows;
        for j in 0..cols {
            let sj = (j + cols / 2) % cols;
            data[si * cols + sj] = s.values[i * cols + j];
        }
    }
    fft2_in_place(&mut data, rows, cols, true);
    let scale = T::two_pi() * T::two_pi() / (T::from_usize_lossy(rows * cols) * eps_spacing * amp_spacing);
    data.iter().map(|z| z.re * scale).collect()
}

/// `|W|` sampled along an arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcProfile<T> {
    pub tau_eps: Vec<T>,
    pub magnitude: Vec<T>,
    /// Curve samples outside the spectrum grid.
    pub dropped: usize,
}

/// Bilinear samples of `|W|` at the curve points (coordinates used as given).
pub fn sample_arc<T: Real>(s: &SpectrumGrid<T>, curve: &ArcCurve<T>) -> ArcProfile<T> {
    let mut out = ArcProfile { tau_eps: Vec::new(), magnitude: Vec::new(), dropped: 0 };
    for p in &curve.samples {
        match s.magnitude_at(p.tau_eps, p.tau_a) {
            Some(m) => {
                out.tau_eps.push(p.tau_eps);
                out.magnitude.push(m);
            }
            None => out.dropped += 1,
        }
    }
    out
}

/// Local maximum of `|W|` along the `tau_A` column at `tau_eps` bin `i`,
/// searched within `half_window` bins of `tau_a`. Returns `(bin, |W|)`.
pub fn ridge_near<T: Real>(s: &SpectrumGrid<T>, i: usize, tau_a: T, half_window: usize) -> Option<(usize, T)> {
    let c = s.amp_index(tau_a)?;
    let lo = c.saturating_sub(half_window).max(1);
    let hi = (c + half_window).min(s.tau_a.len() - 2);
    let mut best: Option<(usize, T)> = None;
    for j in lo..=hi {
        let m = s.magnitude(i, j);
        if m >= s.magnitude(i, j - 1) && m >= s.magnitude(i, j + 1) && best.is_none_or(|b| m > b.1) {
            best = Some((j, m));
        }
    }
    best
}

/// Comparison of one predicted arc point with the nearest ridge of `|W|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeMatch<T> {
    pub tau_eps: T,
    pub branch: usize,
    pub predicted: T,
    /// `tau_A` of the nearest local maximum along the column, if any.
    pub found: Option<T>,
    /// `|found - predicted|` in units of the `tau_A` bin width.
    pub deviation_bins: T,
}

/// For every spectrum column with `tau_eps` inside `window` and every curve
/// defined there, finds the local maximum of `|W|` along `tau_A` nearest to
/// the curve (searching `search_bins` bins to either side), located to
/// sub-bin accuracy by a three-point parabola.
pub fn match_ridges<T: Real>(
    s: &SpectrumGrid<T>,
    curves: &[ArcCurve<T>],
    window: (T, T),
    search_bins: usize,
) -> Vec<RidgeMatch<T>> {
    let d = s.d_tau_a();
    let mut out = Vec::new();
    for (i, &te) in s.tau_eps.iter().enumerate() {
        if te < window.0 || te > window.1 {
            continue;
        }
        for c in curves {
            let Some(p) = c.tau_a_at(te) else { continue };
            let Some(center) = s.amp_index(p) else { continue };
            let lo = center.saturating_sub(search_bins).max(1);
            let hi = (center + search_bins).min(s.tau_a.len() - 2);
            let mut best: Option<T> = None;
            for j in lo..=hi {
                let m = s.magnitude(i, j);
                let (ml, mr) = (s.magnitude(i, j - 1), s.magnitude(i, j + 1));
                if m >= ml && m >= mr {
                    // vertex of the parabola through the three bins
                    let curv = ml - m - m + mr;
                    let off = if curv < T::zero() { T::lit(0.5) * (ml - mr) / curv } else { T::zero() };
                    let t = s.tau_a[j] + off * d;
                    if best.is_none_or(|b| (t - p).abs() < (b - p).abs()) {
                        best = Some(t);
                    }
                }
            }
            out.push(RidgeMatch {
                tau_eps: te,
                branch: c.branch,
                predicted: p,
                found: best,
                deviation_bins: best.map_or(T::infinity(), |b| (b - p).abs() / d),
            });
        }
    }
    out
}

/// Ratio of `|W|` on a curve to the mean `|W|` at `offsets` bins beside it,
/// per spectrum column inside `window`: `(tau_eps, on-curve, background)`.
pub fn ridge_contrast<T: Real>(
    s: &SpectrumGrid<T>,
    curve: &ArcCurve<T>,
    window: (T, T),
    offsets: &[usize],
) -> Vec<(T, T, T)> {
    let mut out = Vec::new();
    for (i, &te) in s.tau_eps.iter().enumerate() {
        if te < window.0 || te > window.1 {
            continue;
        }
        let Some(p) = curve.tau_a_at(te) else { continue };
        let Some(c) = s.amp_index(p) else { continue };
        // ridge value: best of the bins adjacent to the prediction
        let lo = c.saturating_sub(1);
        let hi = (c + 1).min(s.tau_a.len() - 1);
        let on = (lo..=hi).map(|j| s.magnitude(i, j)).fold(T::zero(), T::max);
        let mut acc = T::zero();
        let mut n = 0usize;
        for &o in offsets {
            for j in [c.checked_sub(o), c.checked_add(o).filter(|&j| j < s.tau_a.len())].into_iter().flatten() {
                acc = acc + s.magnitude(i, j);
                n += 1;
            }
        }
        if n > 0 {
            out.push((te, on, acc / T::from_usize_lossy(n)));
        }
    }
    out
}

/// Exponential decay fit of an arc profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub rate: T,
    /// `ln |W|` at `tau_eps = 0` of the fitted line.
    pub intercept: T,
    pub window: (T, T),
    pub residual_rms: T,
    /// Largest rate change when the window endpoints move by +-10% of its width.
    pub uncertainty: T,
    pub samples: usize,
}

fn line_fit<T: Real>(p: &ArcProfile<T>, lo: T, hi: T) -> Result<(T, T, T, usize), SpectraError> {
    let pts: Vec<(T, T)> = p
        .tau_eps
        .iter()
        .zip(&p.magnitude)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, m)| (*t, *m))
        .collect();
    if pts.len() < 8 {
        return Err(SpectraError::DegenerateWindow(lo.to_f64_lossy(), hi.to_f64_lossy()));
    }
    if let Some((_, m)) = pts.iter().find(|(_, m)| !(*m > T::zero())) {
        return Err(SpectraError::NonPositiveSample(m.to_f64_lossy()));
    }
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1.ln()) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in &pts {
        sxy = sxy + (*x - mx) * (y.ln() - my);
        sxx = sxx + (*x - mx) * (*x - mx);
    }
    if sxx == T::zero() {
        return Err(SpectraError::DegenerateWindow(lo.to_f64_lossy(), hi.to_f64_lossy()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss = pts.iter().fold(T::zero(), |a, (x, y)| {
        let r = y.ln() - (icpt + slope * *x);
        a + r * r
    });
    Ok((slope, icpt, (ss / n).sqrt(), pts.len()))
}

/// Default window `[T/8, 3T/8]` around `tau_eps = T/4`.
pub fn default_decay_window<T: Real>(period: T) -> (T, T) {
    (period / T::lit(8.0), T::lit(3.0) * period / T::lit(8.0))
}

/// Least-squares line through `ln |W|` over the window; `rate = -slope`.
pub fn fit_decay<T: Real>(profile: &ArcProfile<T>, window: (T, T)) -> Result<DecayFit<T>, SpectraError> {
    let (lo, hi) = window;
    let (slope, intercept, rms, n) = line_fit(profile, lo, hi)?;
    let shift = (hi - lo) * T::lit(0.1);
    let mut unc = T::zero();
    for (a, b) in [(lo - shift, hi), (lo + shift, hi), (lo, hi - shift), (lo, hi + shift)] {
        if let Ok((s, _, _, _)) = line_fit(profile, a, b) {
            unc = unc.max((s - slope).abs());
        }
    }
    Ok(DecayFit { rate: -slope, intercept, window, residual_rms: rms, uncertainty: unc, samples: n })
}

/// Normalized overlap `<a, b> / (|a| |b|)` of two patterns on identical axes,
/// optionally after subtracting each pattern's mean.
pub fn pattern_overlap<T: Real>(a: &PatternGrid<T>, b: &PatternGrid<T>, subtract_mean: bool) -> Result<T, SpectraError> {
    if a.eps_axis != b.eps_axis || a.amp_axis != b.amp_axis || a.values.len() != b.values.len() {
        return Err(SpectraError::AxisMismatch);
    }
    let (va, vb) = (a.filled(), b.filled());
    let mean = |v: &[T]| {
        if subtract_mean {
            v.iter().fold(T::zero(), |s, &x| s + x) / T::from_usize_lossy(v.len())
        } else {
            T::zero()
        }
    };
    let (ma, mb) = (mean(&va), mean(&vb));
    let (mut ab, mut aa, mut bb) = (T::zero(), T::zero(), T::zero());
    for (x, y) in va.iter().zip(&vb) {
        let (x, y) = (*x - ma, *y - mb);
        ab = ab + x * y;
        aa = aa + x * x;
        bb = bb + y * y;
    }
    if aa == T::zero() || bb == T::zero() {
        return Err(SpectraError::ZeroNorm);
    }
    // sqrt of the product (not the product of roots) so identical inputs give exactly 1
    Ok(ab / (aa * bb).sqrt())
}
