//! Qubit, drive and bath parameters.
//!
//! Units: `hbar = 1`; energies are measured in units of `hbar * Omega` and
//! times in units of `1 / Omega`, where `Omega` is the fundamental driving
//! frequency of the [`DrivingShape`] (1 by default).
//!
//! The qubit Hamiltonian is always used in the symmetrized gauge
//! `H(t) = (eps0 - A f(t)) sigma_z / 2 + Delta sigma_x / 2`.

use serde::{Deserialize, Serialize};

use crate::linalg::Mat2;
use crate::num::Real;

/// Default cap on the harmonic index of a drive.
pub const DEFAULT_MAX_HARMONIC: u32 = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("harmonic index must be positive (got k = 0); a constant term would spoil periodicity of F(t)")]
    ZeroHarmonic,
    #[error("harmonic index {k} exceeds the cap {cap}")]
    HarmonicTooHigh { k: u32, cap: u32 },
    #[error("duplicate harmonic index {0}")]
    DuplicateHarmonic(u32),
    #[error("driving frequency must be positive and finite")]
    BadFrequency,
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("tunnel coupling Delta must be >= 0")]
    NegativeDelta,
    #[error("dissipation strength alpha must be >= 0")]
    NegativeAlpha,
    #[error("inverse temperature beta must be > 0")]
    NonPositiveBeta,
    #[error("coupling angle theta must lie in [0, pi/2] (got {0})")]
    ThetaOutOfRange(f64),
    #[error("unknown drive preset '{0}' (expected cos, f1, f2 or f3)")]
    UnknownPreset(String),
}

/// One term `a cos(k Omega t) + b sin(k Omega t)` of a drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic<T> {
    pub k: u32,
    pub a: T,
    pub b: T,
}

/// Zero-mean periodic drive shape `f(t)` as a finite harmonic series.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingShape<T: Real> {
    omega: T,
    harmonics: Vec<Harmonic<T>>,
}

impl<T: Real> DrivingShape<T> {
    pub fn new(omega: T, harmonics: Vec<Harmonic<T>>) -> Result<Self, ModelError> {
        Self::with_cap(omega, harmonics, DEFAULT_MAX_HARMONIC)
    }

    pub fn with_cap(omega: T, mut harmonics: Vec<Harmonic<T>>, cap: u32) -> Result<Self, ModelError> {
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(ModelError::BadFrequency);
        }
        harmonics.sort_by_key(|h| h.k);
        for (i, h) in harmonics.iter().enumerate() {
            if h.k == 0 {
                return Err(ModelError::ZeroHarmonic);
            }
            if h.k > cap {
                return Err(ModelError::HarmonicTooHigh { k: h.k, cap });
            }
            if !h.a.is_finite() || !h.b.is_finite() {
                return Err(ModelError::NonFinite("harmonic coefficient"));
            }
            if i > 0 && harmonics[i - 1].k == h.k {
                return Err(ModelError::DuplicateHarmonic(h.k));
            }
        }
        Ok(Self { omega, harmonics })
    }

    /// Builds a drive from `(k, a_k, b_k)` triples with `Omega = 1`.
    pub fn from_triples(triples: &[(u32, T, T)]) -> Result<Self, ModelError> {
        Self::new(
            T::one(),
            triples.iter().map(|&(k, a, b)| Harmonic { k, a, b }).collect(),
        )
    }

    /// `cos(Omega t)`.
    pub fn cosine() -> Self {
        Self::from_triples(&[(1, T::one(), T::zero())]).expect("valid preset")
    }

    /// `cos(Omega t) + 0.1 cos(3 Omega t)`.
    pub fn f1() -> Self {
        Self::from_triples(&[(1, T::one(), T::zero()), (3, T::lit(0.1), T::zero())]).expect("valid preset")
    }

    /// `cos(Omega t) + cos(2 Omega t)`.
    pub fn f2() -> Self {
        Self::from_triples(&[(1, T::one(), T::zero()), (2, T::one(), T::zero())]).expect("valid preset")
    }

    /// `sin(Omega t) + sin(2 Omega t)`.
    pub fn f3() -> Self {
        Self::from_triples(&[(1, T::zero(), T::one()), (2, T::zero(), T::one())]).expect("valid preset")
    }

    /// Looks up one of the named presets `cos`, `f1`, `f2`, `f3`.
    pub fn preset(name: &str) -> Result<Self, ModelError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "cos" | "f0" => Ok(Self::cosine()),
            "f1" => Ok(Self::f1()),
            "f2" => Ok(Self::f2()),
            "f3" => Ok(Self::f3()),
            other => Err(ModelError::UnknownPreset(other.to_string())),
        }
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn period(&self) -> T {
        T::two_pi() / self.omega
    }

    pub fn harmonics(&self) -> &[Harmonic<T>] {
        &self.harmonics
    }

    pub fn max_harmonic(&self) -> u32 {
        self.harmonics.iter().map(|h| h.k).max().unwrap_or(0)
    }

    /// `f(t)`.
    pub fn value(&self, t: T) -> T {
        self.harmonics.iter().fold(T::zero(), |acc, h| {
            let (s, c) = (T::from_u32(h.k).unwrap() * self.omega * t).sin_cos();
            acc + h.a * c + h.b * s
        })
    }

    /// `f'(t)`.
    pub fn derivative(&self, t: T) -> T {
        self.harmonics.iter().fold(T::zero(), |acc, h| {
            let w = T::from_u32(h.k).unwrap() * self.omega;
            let (s, c) = (w * t).sin_cos();
            acc + w * (h.b * c - h.a * s)
        })
    }

    /// `F(t) = int_0^t f(t') dt'`, closed form; `F(0) = F(T) = 0`.
    pub fn integral(&self, t: T) -> T {
        self.harmonics.iter().fold(T::zero(), |acc, h| {
            let w = T::from_u32(h.k).unwrap() * self.omega;
            let (s, c) = (w * t).sin_cos();
            acc + (h.a * s + h.b * (T::one() - c)) / w
        })
    }

    /// True when `f(t) = f(-t)` (pure cosine series).
    pub fn is_time_reversal_symmetric(&self) -> bool {
        let scale = self.coefficient_scale();
        self.harmonics.iter().all(|h| h.b.abs() <= T::lit(1e-14) * scale)
    }

    /// True when `f(t) = -f(-t)` (pure sine series).
    pub fn is_antisymmetric(&self) -> bool {
        let scale = self.coefficient_scale();
        self.harmonics.iter().all(|h| h.a.abs() <= T::lit(1e-14) * scale)
    }

    fn coefficient_scale(&self) -> T {
        self.harmonics
            .iter()
            .fold(T::zero(), |m, h| m.max(h.a.abs()).max(h.b.abs()))
            .max(T::min_positive_value())
    }

    /// The drive with shifted time origin, `g(t) = f(t + t0)`.
    pub fn shifted(&self, t0: T) -> Self {
        let harmonics = self
            .harmonics
            .iter()
            .map(|h| {
                let (s, c) = (T::from_u32(h.k).unwrap() * self.omega * t0).sin_cos();
                Harmonic { k: h.k, a: h.a * c + h.b * s, b: h.b * c - h.a * s }
            })
            .collect();
        Self { omega: self.omega, harmonics }
    }

    /// `(min f, max f)` over one period, from a dense scan refined by
    /// golden-section search around the best samples.
    pub fn extrema(&self) -> (T, T) {
        let n = 2048;
        let dt = self.period() / T::from_usize_lossy(n);
        let mut lo = (T::zero(), T::infinity());
        let mut hi = (T::zero(), T::neg_infinity());
        for i in 0..n {
            let t = dt * T::from_usize_lossy(i);
            let v = self.value(t);
            if v < lo.1 {
                lo = (t, v);
            }
            if v > hi.1 {
                hi = (t, v);
            }
        }
        let refine = |t0: T, sign: T| {
            let (mut a, mut b) = (t0 - dt, t0 + dt);
            let g = T::lit(0.618_033_988_749_894_9);
            for _ in 0..80 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if sign * self.value(c) > sign * self.value(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            self.value((a + b) * T::lit(0.5))
        };
        (refine(lo.0, -T::one()), refine(hi.0, T::one()))
    }
}

/// Static detuning, tunnel splitting and drive amplitude (units of `hbar Omega`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams<T> {
    pub epsilon0: T,
    pub delta: T,
    pub amplitude: T,
}

impl<T: Real> QubitParams<T> {
    pub fn new(epsilon0: T, delta: T, amplitude: T) -> Result<Self, ModelError> {
        if !epsilon0.is_finite() {
            return Err(ModelError::NonFinite("epsilon0"));
        }
        if !delta.is_finite() {
            return Err(ModelError::NonFinite("delta"));
        }
        if !amplitude.is_finite() {
            return Err(ModelError::NonFinite("amplitude"));
        }
        if delta < T::zero() {
            return Err(ModelError::NegativeDelta);
        }
        Ok(Self { epsilon0, delta, amplitude })
    }

    pub fn with_point(&self, epsilon0: T, amplitude: T) -> Self {
        Self { epsilon0, amplitude, ..*self }
    }

    /// Level splitting of the undriven qubit, `sqrt(eps0^2 + Delta^2)`.
    pub fn static_splitting(&self) -> T {
        self.epsilon0.hypot(self.delta)
    }

    /// `(eps0 sigma_z + Delta sigma_x) / 2`.
    pub fn static_hamiltonian(&self) -> Mat2<T> {
        let h = T::lit(0.5);
        Mat2::real_xz(h * self.delta, h * self.epsilon0)
    }

    /// Excited eigenvector of the static Hamiltonian (real components).
    pub fn excited_state(&self) -> [T; 2] {
        let h = T::lit(0.5);
        let (_, v) = crate::linalg::real_symmetric_eig(h * self.epsilon0, h * self.delta, -h * self.epsilon0);
        v[1]
    }
}

/// Ohmic bath: strength `alpha`, inverse temperature `beta`, coupling angle
/// `theta` of `X = sigma_x cos(theta) + sigma_z sin(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams<T> {
    pub alpha: T,
    pub beta: T,
    pub theta: T,
}

impl<T: Real> BathParams<T> {
    pub fn new(alpha: T, beta: T, theta: T) -> Result<Self, ModelError> {
        if !alpha.is_finite() {
            return Err(ModelError::NonFinite("alpha"));
        }
        if !beta.is_finite() {
            return Err(ModelError::NonFinite("beta"));
        }
        if alpha < T::zero() {
            return Err(ModelError::NegativeAlpha);
        }
        if !(beta > T::zero()) {
            return Err(ModelError::NonPositiveBeta);
        }
        let slack = T::lit(1e-12);
        if !(theta >= -slack && theta <= T::FRAC_PI_2() + slack) {
            return Err(ModelError::ThetaOutOfRange(theta.to_f64_lossy()));
        }
        Ok(Self { alpha, beta, theta })
    }

    /// Transverse coupling, `X = sigma_x`.
    pub fn transverse(alpha: T, beta: T) -> Self {
        Self { alpha, beta, theta: T::zero() }
    }

    /// Longitudinal coupling, `X = sigma_z`.
    pub fn longitudinal(alpha: T, beta: T) -> Self {
        Self { alpha, beta, theta: T::FRAC_PI_2() }
    }

    pub fn temperature(&self) -> T {
        self.beta.recip()
    }

    /// `X = sigma_x cos(theta) + sigma_z sin(theta)`; at the end points the
    /// pure Pauli operator is returned exactly.
    pub fn coupling_operator(&self) -> Mat2<T> {
        if self.theta == T::zero() {
            Mat2::sigma_x()
        } else if self.theta == T::FRAC_PI_2() {
            Mat2::sigma_z()
        } else {
            Mat2::real_xz(self.theta.cos(), self.theta.sin())
        }
    }
}

/// `f(t)` of a drive.
pub fn evaluate_driving<T: Real>(shape: &DrivingShape<T>, t: T) -> T {
    shape.value(t)
}

/// `F(t) = int_0^t f`.
pub fn driving_integral<T: Real>(shape: &DrivingShape<T>, t: T) -> T {
    shape.integral(t)
}

/// `H(t) = (eps0 - A f(t)) sigma_z / 2 + Delta sigma_x / 2`.
pub fn symmetrized_hamiltonian<T: Real>(q: &QubitParams<T>, shape: &DrivingShape<T>, t: T) -> Mat2<T> {
    let h = T::lit(0.5);
    Mat2::real_xz(h * q.delta, h * (q.epsilon0 - q.amplitude * shape.value(t)))
}
