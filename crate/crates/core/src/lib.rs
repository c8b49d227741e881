//! Floquet-Bloch-Redfield simulation of Landau-Zener-Stueckelberg-Majorana
//! interference in a dissipative, periodically driven qubit.

pub mod analytic;
pub mod cli;
pub mod config;
pub mod floquet;
pub mod io;
pub mod linalg;
pub mod model;
pub mod num;
pub mod redfield;
pub mod spectra;

pub use num::Real;

/// Double-precision instantiations of the generic types.
pub type Complex64 = num::Cplx<f64>;
pub type DrivingShape = model::DrivingShape<f64>;
pub type QubitParams = model::QubitParams<f64>;
pub type BathParams = model::BathParams<f64>;
pub type FloquetOptions = floquet::FloquetOptions<f64>;
pub type FloquetSolution = floquet::FloquetSolution<f64>;
pub type TransitionElements = floquet::TransitionElements<f64>;
pub type LiouvillianBlocks = redfield::LiouvillianBlocks<f64>;
pub type SteadyState = redfield::SteadyState<f64>;
pub type PipelineOptions = redfield::PipelineOptions<f64>;
pub type PatternGrid = spectra::PatternGrid<f64>;
pub type SpectrumGrid = spectra::SpectrumGrid<f64>;
pub type SweepOptions = spectra::SweepOptions<f64>;
pub type ArcCurve = analytic::ArcCurve<f64>;
pub type ArcProfile = spectra::ArcProfile<f64>;
pub type DecayFit = spectra::DecayFit<f64>;
