//! Batch front end: subcommands that run the pipeline from a [`RunConfig`]
//! and persist grid files, CSV tables and provenance sidecars.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analytic::{
    analytic_pattern, arc_full, arc_phase, background, delta_n, effective_tunneling, fit_gamma, resonance_population,
    AnalyticError, ArcCurve, Coupling,
};
use crate::config::{coupling_name, ConfigError, RunConfig};
use crate::floquet::{quasienergy_scan, FloquetError};
use crate::io::{pattern_rows, read_pattern, write_csv, write_pattern, write_spectrum, IoError, SpectrumPayload};
use crate::model::{BathParams, DrivingShape};
use crate::num::linspace;
use crate::spectra::{
    fit_decay, fourier2d, pattern_overlap, sample_arc, sweep_patterns, PatternGrid, SpectraError, SpectrumGrid,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("sweep: {0}")]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Parser)]
#[command(name = "lzsm", version, about = "LZSM interference of a dissipative driven qubit")]
pub struct Cli {
    /// TOML run configuration; defaults apply to every omitted knob.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sweep worker threads, 0 = all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Zero-padding factor of the 2D Fourier transform.
    #[arg(long, global = true)]
    pub pad: Option<usize>,
    /// Density-operator sideband cutoff.
    #[arg(long, global = true, value_name = "K")]
    pub sidebands: Option<usize>,
    /// Driving preset: cos, f1, f2, f3.
    #[arg(long, global = true)]
    pub shape: Option<String>,
    /// Qubit-bath coupling: x, z or mixed:<theta>.
    #[arg(long, global = true)]
    pub coupling: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasienergies versus amplitude at the configured detuning.
    Floquet,
    /// Full-pipeline excitation pattern on the configured grid.
    Pattern,
    /// 2D Fourier transform of a pattern file.
    Fft {
        /// Pattern file; defaults to `<out>/pattern.lzsm`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Predicted stationary-phase arcs of the driving shape.
    Arcs,
    /// Closed-form pattern and amplitude slice.
    Analytic,
    /// Fourier magnitude along the principal arc and its decay rate.
    Decay {
        /// Pattern file; computed from the config when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Pattern overlaps with pure transverse / longitudinal coupling versus mixing angle.
    Overlap,
    /// Canned figure reproductions.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5,
}

/// Files written and human-readable summary lines.
#[derive(Debug, Default)]
pub struct Report {
    pub artifacts: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl Report {
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

/// Loads the config file (if any) and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            RunConfig::from_toml(&text).map_err(|e| match e {
                ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", p.display())),
                other => other,
            })?
        }
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.output.dir = o.display().to_string();
    }
    if let Some(w) = cli.workers {
        cfg.output.workers = w;
    }
    if let Some(p) = cli.pad {
        cfg.analysis.pad = p;
    }
    if let Some(k) = cli.sidebands {
        cfg.solver.sidebands = k;
        cfg.solver.k_x = cfg.solver.k_x.max(2 * k);
    }
    if let Some(s) = &cli.shape {
        cfg.drive.preset = s.clone();
        cfg.drive.harmonics = None;
    }
    if let Some(c) = &cli.coupling {
        cfg.bath.coupling = c.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Entry point behind the binary.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = resolve_config(cli)?;
    let out = PathBuf::from(&cfg.output.dir);
    let mut rep = Report::default();
    match &cli.command {
        Command::Floquet => cmd_floquet(&cfg, &out, &mut rep)?,
        Command::Pattern => {
            cmd_pattern(&cfg, &out, "pattern", &mut rep)?;
        }
        Command::Fft { input } => {
            let path = input.clone().unwrap_or_else(|| out.join("pattern.lzsm"));
            let p = read_pattern::<f64>(&path)?;
            cmd_fft(&cfg, &p, &out, "spectrum", &mut rep)?;
        }
        Command::Arcs => cmd_arcs(&cfg, &out, "arcs", &mut rep)?,
        Command::Analytic => cmd_analytic(&cfg, &out, &mut rep)?,
        Command::Decay { input } => {
            let p = match input {
                Some(path) => read_pattern::<f64>(path)?,
                None => sweep(&cfg, &[cfg.bath_params()?])?.remove(0),
            };
            cmd_decay(&cfg, &p, &out, "decay", &mut rep)?;
        }
        Command::Overlap => cmd_overlap(&cfg, &out, &mut rep)?,
        Command::Reproduce { figure } => reproduce(*figure, &cfg, &out, &mut rep)?,
    }
    Ok(rep)
}

fn csv(
    rep: &mut Report,
    cfg: &RunConfig,
    path: PathBuf,
    results: &[String],
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<(), CliError> {
    let mut header = String::new();
    for r in results {
        header.push_str(&format!("result: {r}\n"));
    }
    header.push_str(&cfg.to_toml());
    write_csv(&path, &header, columns, rows)?;
    rep.artifacts.push(path);
    Ok(())
}

fn sweep(cfg: &RunConfig, baths: &[BathParams<f64>]) -> Result<Vec<PatternGrid<f64>>, CliError> {
    let grids = sweep_patterns(
        &cfg.qubit_params()?,
        &cfg.shape()?,
        baths,
        &cfg.eps_axis(),
        &cfg.amp_axis(),
        &cfg.sweep_options(),
    )?;
    Ok(grids)
}

fn save_pattern(cfg: &RunConfig, p: &PatternGrid<f64>, out: &Path, stem: &str, rep: &mut Report) -> Result<(), CliError> {
    let path = out.join(format!("{stem}.lzsm"));
    write_pattern(&path, p, &cfg.to_toml())?;
    rep.artifacts.push(path);
    csv(rep, cfg, out.join(format!("{stem}.csv")), &[], &["eps0", "A", "P_ex"], &pattern_rows(p))?;
    if !p.missing.is_empty() {
        rep.note(format!(
            "{stem}: {} of {} points failed (stored as NaN, nearest-neighbour filled before transforms)",
            p.missing.len(),
            p.values.len()
        ));
    }
    Ok(())
}

fn cmd_floquet(cfg: &RunConfig, out: &Path, rep: &mut Report) -> Result<(), CliError> {
    let scan = quasienergy_scan(&cfg.qubit_params()?, &cfg.shape()?, &cfg.amp_axis(), &cfg.floquet_options())?;
    let rows: Vec<Vec<f64>> = scan.iter().map(|(a, e)| vec![*a, e[0], e[1]]).collect();
    csv(rep, cfg, out.join("floquet.csv"), &[], &["A", "quasienergy_0", "quasienergy_1"], &rows)
}

fn cmd_pattern(cfg: &RunConfig, out: &Path, stem: &str, rep: &mut Report) -> Result<PatternGrid<f64>, CliError> {
    let p = sweep(cfg, &[cfg.bath_params()?])?.remove(0);
    save_pattern(cfg, &p, out, stem, rep)?;
    Ok(p)
}

fn cmd_fft(cfg: &RunConfig, p: &PatternGrid<f64>, out: &Path, stem: &str, rep: &mut Report) -> Result<SpectrumGrid<f64>, CliError> {
    let s = fourier2d(p, cfg.analysis.pad, cfg.analysis.subtract_mean)?;
    let path = out.join(format!("{stem}.lzsm"));
    write_spectrum(&path, &s, SpectrumPayload::Complex, &cfg.to_toml())?;
    rep.artifacts.push(path);
    let mut rows = Vec::with_capacity(s.values.len());
    for (i, te) in s.tau_eps.iter().enumerate() {
        for (j, ta) in s.tau_a.iter().enumerate() {
            rows.push(vec![*te, *ta, s.magnitude(i, j)]);
        }
    }
    csv(rep, cfg, out.join(format!("{stem}.csv")), &[], &["tau_eps", "tau_A", "abs_W"], &rows)?;
    Ok(s)
}

/// `tau_eps` grid of predicted arcs: `(0, 2T]`.
fn arc_grid(cfg: &RunConfig, shape: &DrivingShape<f64>) -> Vec<f64> {
    let t = shape.period();
    linspace(0.0, 2.0 * t, cfg.analysis.arc_points + 1).into_iter().skip(1).collect()
}

fn cmd_arcs(cfg: &RunConfig, out: &Path, stem: &str, rep: &mut Report) -> Result<(), CliError> {
    let shape = cfg.shape()?;
    let grid = arc_grid(cfg, &shape);
    let mut rows = Vec::new();
    for c in arc_full(&shape, &grid, cfg.analysis.arc_scan) {
        for s in &c.samples {
            rows.push(vec![c.branch as f64, s.tau_eps, s.tau_a, s.t]);
        }
    }
    let note = "arcs at tau_A = G(t_i, tau_eps); the transform ridges sit at the point reflection".to_string();
    csv(rep, cfg, out.join(format!("{stem}.csv")), &[note], &["branch", "tau_eps", "tau_A", "t"], &rows)?;

    // closed-form arcs 2k F(tau/(2k) + k' T/(2k)), symmetric drives only
    if shape.is_time_reversal_symmetric() {
        let mut rows = Vec::new();
        for k in 1..=2u32 {
            for shift in 0..2 * k {
                let c = ArcCurve::closed_form(&shape, &grid, k, shift, 0)?;
                for s in &c.samples {
                    rows.push(vec![k as f64, shift as f64, s.tau_eps, s.tau_a]);
                }
            }
        }
        csv(rep, cfg, out.join(format!("{stem}_closed_form.csv")), &[], &["k", "shift", "tau_eps", "tau_A"], &rows)?;
    } else {
        rep.note(format!("{stem}: no closed-form arcs for a drive without time-reversal symmetry"));
    }

    // G(t, tau_eps) map over one period in t
    let n = 129;
    let ts = linspace(0.0, shape.period(), n);
    let taus = linspace(0.0, 2.0 * shape.period(), n);
    let mut rows = Vec::with_capacity(n * n);
    for &te in &taus {
        for &t in &ts {
            rows.push(vec![te, t, arc_phase(&shape, t, te)]);
        }
    }
    csv(rep, cfg, out.join(format!("{stem}_phase.csv")), &[], &["tau_eps", "t", "G"], &rows)
}

fn cmd_analytic(cfg: &RunConfig, out: &Path, rep: &mut Report) -> Result<(), CliError> {
    let q = cfg.qubit_params()?;
    let shape = cfg.shape()?;
    let coupling = cfg.analytic_coupling()?;
    let a = &cfg.analysis;
    let transverse = coupling == Coupling::Transverse;
    let p = analytic_pattern(&q, &shape, &cfg.eps_axis(), &cfg.amp_axis(), a.gamma, coupling, a.n_max, transverse)?;
    let path = out.join("analytic.lzsm");
    write_pattern(&path, &p, &cfg.to_toml())?;
    rep.artifacts.push(path);
    let slice = analytic_pattern(&q, &shape, &cfg.eps_axis(), &[q.amplitude], a.gamma, coupling, a.n_max, transverse)?;
    let rows: Vec<Vec<f64>> = slice.eps_axis.iter().zip(&slice.values).map(|(e, v)| vec![*e, *v]).collect();
    csv(rep, cfg, out.join("analytic_slice.csv"), &[format!("A = {}", q.amplitude)], &["eps0", "P_ex"], &rows)
}

/// Principal arc in the orientation of the computed transform.
fn principal_arc(s: &SpectrumGrid<f64>, shape: &DrivingShape<f64>) -> Result<ArcCurve<f64>, CliError> {
    let grid: Vec<f64> = s.tau_eps.iter().copied().filter(|&t| t > 0.0 && t <= shape.period()).collect();
    Ok(ArcCurve::closed_form(shape, &grid, 1, 0, 0)?.reflected())
}

fn cmd_decay(cfg: &RunConfig, p: &PatternGrid<f64>, out: &Path, stem: &str, rep: &mut Report) -> Result<f64, CliError> {
    let shape = cfg.shape()?;
    let s = fourier2d(p, cfg.analysis.pad, cfg.analysis.subtract_mean)?;
    let prof = sample_arc(&s, &principal_arc(&s, &shape)?);
    let t = shape.period();
    let window = (cfg.analysis.decay_window.0 * t, cfg.analysis.decay_window.1 * t);
    let fit = fit_decay(&prof, window)?;
    let summary = format!(
        "lambda = {:.6} +- {:.6} over tau_eps in [{:.4}, {:.4}] ({} samples, rms {:.3e})",
        fit.rate, fit.uncertainty, window.0, window.1, fit.samples, fit.residual_rms
    );
    rep.note(format!("{stem}: {summary}"));
    let rows: Vec<Vec<f64>> = prof
        .tau_eps
        .iter()
        .zip(&prof.magnitude)
        .map(|(te, m)| vec![*te, *m, m.ln(), fit.intercept - fit.rate * te])
        .collect();
    csv(rep, cfg, out.join(format!("{stem}.csv")), &[summary], &["tau_eps", "abs_W", "ln_abs_W", "ln_fit"], &rows)?;
    Ok(fit.rate)
}

fn cmd_overlap(cfg: &RunConfig, out: &Path, rep: &mut Report) -> Result<(), CliError> {
    let mut thetas = cfg.analysis.overlap_thetas.clone();
    thetas.extend([0.0, FRAC_PI_2]);
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let baths: Vec<BathParams<f64>> = thetas
        .iter()
        .map(|&th| BathParams::new(cfg.bath.alpha, cfg.bath.beta, th).map_err(|e| CliError::Input(e.to_string())))
        .collect::<Result<_, _>>()?;
    let grids = sweep(cfg, &baths)?;
    let (px, pz) = (&grids[0], &grids[grids.len() - 1]);
    let sub = cfg.analysis.overlap_subtract_mean;
    let mut rows = Vec::new();
    for (th, g) in thetas.iter().zip(&grids) {
        rows.push(vec![*th, pattern_overlap(g, px, sub)?, pattern_overlap(g, pz, sub)?]);
    }
    for (th, g) in thetas.iter().zip(&grids) {
        save_pattern(cfg, g, out, &format!("overlap_{}", coupling_name(*th).replace(':', "_")), rep)?;
    }
    csv(rep, cfg, out.join("overlap.csv"), &[], &["theta", "r_x", "r_z"], &rows)
}

/// Numeric `P_ex` along `eps0` at fixed amplitude for several coupling angles.
pub fn numeric_slices(cfg: &RunConfig, amplitude: f64, eps: &[f64], thetas: &[f64]) -> Result<Vec<Vec<f64>>, CliError> {
    let baths: Vec<BathParams<f64>> = thetas
        .iter()
        .map(|&th| BathParams::new(cfg.bath.alpha, cfg.bath.beta, th).map_err(|e| CliError::Input(e.to_string())))
        .collect::<Result<_, _>>()?;
    let grids = sweep_patterns(&cfg.qubit_params()?, &cfg.shape()?, &baths, eps, &[amplitude], &cfg.sweep_options())?;
    Ok(grids.into_iter().map(|g| g.filled()).collect())
}

/// Fitted rate and closed-form resonance curve for resonance `n` of a slice,
/// fitted over `|eps0 - n Omega| <= half_width`.
pub fn fit_resonance(
    cfg: &RunConfig,
    coupling: Coupling,
    amplitude: f64,
    eps: &[f64],
    values: &[f64],
    n: i64,
    half_width: f64,
) -> Result<(f64, f64, Vec<f64>), CliError> {
    let q = cfg.qubit_params()?;
    let shape = cfg.shape()?;
    let omega = shape.omega();
    let dn = effective_tunneling(&shape, delta_n(&q.with_point(0.0, amplitude), &shape, n));
    let (we, wv): (Vec<f64>, Vec<f64>) = eps
        .iter()
        .zip(values)
        .filter(|(e, _)| (**e - n as f64 * omega).abs() <= half_width + 1e-12)
        .map(|(e, v)| (*e, *v))
        .unzip();
    let fit = fit_gamma(coupling, &we, &wv, n, dn, omega)?;
    let curve = eps
        .iter()
        .map(|&e| resonance_population(coupling, n as f64 * omega - e, dn, fit.gamma))
        .collect();
    Ok((fit.gamma, fit.rms, curve))
}

fn fig_config(base: &RunConfig) -> RunConfig {
    let mut c = base.clone();
    c.qubit.delta = 0.5;
    c.qubit.amplitude = 10.0;
    c.bath.alpha = 1e-3;
    c.bath.beta = 10.0;
    c.bath.coupling = "x".into();
    c.drive.harmonics = None;
    c.drive.preset = "cos".into();
    c.drive.omega = 1.0;
    c
}

fn reproduce(fig: Figure, base: &RunConfig, out: &Path, rep: &mut Report) -> Result<(), CliError> {
    let amp = 10.0;
    match fig {
        Figure::Fig1 => {
            let dir = out.join("fig1");
            for preset in ["f1", "f2", "f3"] {
                let mut c = fig_config(base);
                c.drive.preset = preset.into();
                let shape = c.shape()?;
                let ts = linspace(0.0, shape.period(), 257);
                let rows: Vec<Vec<f64>> = ts
                    .iter()
                    .map(|&t| {
                        let e = amp * shape.value(t);
                        let en = 0.5 * (e * e + c.qubit.delta * c.qubit.delta).sqrt();
                        vec![t, -en, en, shape.integral(t)]
                    })
                    .collect();
                csv(rep, &c, dir.join(format!("energies_{preset}.csv")), &[format!("eps0 = 0, A = {amp}")], &["t", "E_minus", "E_plus", "F"], &rows)?;
                let p = cmd_pattern(&c, &dir, &format!("pattern_{preset}"), rep)?;
                cmd_fft(&c, &p, &dir, &format!("spectrum_{preset}"), rep)?;
                cmd_arcs(&c, &dir, &format!("arcs_{preset}"), rep)?;
            }
        }
        Figure::Fig2 => {
            let c = fig_config(base);
            let dir = out.join("fig2");
            let grids = sweep(&c, &[c.bath_params()?, BathParams::longitudinal(c.bath.alpha, c.bath.beta)])?;
            save_pattern(&c, &grids[0], &dir, "pattern_x", rep)?;
            let mut cz = c.clone();
            cz.bath.coupling = "z".into();
            save_pattern(&cz, &grids[1], &dir, "pattern_z", rep)?;
        }
        Figure::Fig3 => {
            let mut c = fig_config(base);
            c.analysis.overlap_thetas = (0..=8).map(|i| i as f64 * FRAC_PI_2 / 8.0).collect();
            cmd_overlap(&c, &out.join("fig3"), rep)?;
        }
        Figure::Fig4 => {
            for f in [Figure::Fig4a, Figure::Fig4b, Figure::Fig4c] {
                reproduce(f, base, out, rep)?;
            }
        }
        Figure::Fig4a | Figure::Fig4b => {
            let c = fig_config(base);
            let eps = linspace(0.0, 10.0, 201);
            let (coupling, theta, ns, name) = if fig == Figure::Fig4a {
                (Coupling::Transverse, 0.0, [7, 8], "fig4a")
            } else {
                (Coupling::Longitudinal, FRAC_PI_2, [2, 3], "fig4b")
            };
            let num = numeric_slices(&c, amp, &eps, &[theta])?.remove(0);
            let mut notes = Vec::new();
            let mut curves = Vec::new();
            for n in ns {
                let (g, rms, curve) = fit_resonance(&c, coupling, amp, &eps, &num, n, c.qubit.delta)?;
                notes.push(format!("n = {n}: fitted Gamma = {g:.4e}, rms = {rms:.4}"));
                curves.push(curve);
            }
            rep.notes.extend(notes.iter().map(|s| format!("{name}: {s}")));
            let rows: Vec<Vec<f64>> =
                (0..eps.len()).map(|i| vec![eps[i], num[i], curves[0][i], curves[1][i]]).collect();
            let cols = ["eps0", "P_numeric", &format!("P_analytic_n{}", ns[0]), &format!("P_analytic_n{}", ns[1])];
            let mut cc = c.clone();
            cc.bath.coupling = coupling_name(theta);
            csv(rep, &cc, out.join(format!("{name}.csv")), &notes, &cols, &rows)?;
        }
        Figure::Fig4c => {
            let c = fig_config(base);
            let eps = linspace(-10.0, 10.0, 401);
            let s = numeric_slices(&c, amp, &eps, &[0.0, FRAC_PI_2])?;
            let q = c.qubit_params()?;
            let rows = (0..eps.len())
                .map(|i| Ok(vec![eps[i], s[0][i], s[1][i], background(&q.with_point(eps[i], amp))?]))
                .collect::<Result<Vec<_>, CliError>>()?;
            csv(rep, &c, out.join("fig4c.csv"), &[], &["eps0", "P_x", "P_z", "P_background"], &rows)?;
        }
        Figure::Fig5 => {
            let dir = out.join("fig5");
            let mut c = fig_config(base);
            c.bath.alpha = 0.05;
            let p = sweep(&c, &[c.bath_params()?])?.remove(0);
            cmd_decay(&c, &p, &dir, "decay_profile", rep)?;
            let alphas = [0.01, 0.02, 0.05, 0.1];
            let mut c2 = fig_config(base);
            c2.bath.beta = 2.0;
            let baths: Vec<BathParams<f64>> = alphas
                .iter()
                .flat_map(|&a| [BathParams::transverse(a, 2.0), BathParams::longitudinal(a, 2.0)])
                .collect();
            let grids = sweep(&c2, &baths)?;
            let mut rows = Vec::new();
            for (i, &a) in alphas.iter().enumerate() {
                let mut row = vec![a];
                for (j, name) in ["x", "z"].iter().enumerate() {
                    let mut cj = c2.clone();
                    cj.bath.alpha = a;
                    cj.bath.coupling = (*name).into();
                    let sj = fourier2d(&grids[2 * i + j], cj.analysis.pad, cj.analysis.subtract_mean)?;
                    let prof = sample_arc(&sj, &principal_arc(&sj, &cj.shape()?)?);
                    let t = cj.shape()?.period();
                    let fit = fit_decay(&prof, (cj.analysis.decay_window.0 * t, cj.analysis.decay_window.1 * t))?;
                    row.extend([fit.rate, fit.uncertainty]);
                }
                rows.push(row);
            }
            csv(rep, &c2, dir.join("decay_rates.csv"), &[], &["alpha", "lambda_x", "err_x", "lambda_z", "err_z"], &rows)?;
        }
    }
    Ok(())
}
