mod mechanics;
mod optics;

use membrane_cavity::fit::{FixedCavity, LossGuess, Parameterisation};
use membrane_cavity::{FitConfig, FitResult, MembraneGeometry};

use crate::args::Command;
use crate::config::Config;
use crate::error::CliError;
use crate::report::RunReport;
use crate::table::TableOut;

pub struct Context {
    pub config: Config,
    pub seed: u64,
}

/// What a command produced. A failure still carries the partial report.
pub struct Output {
    pub report: RunReport,
    pub table: Option<TableOut>,
    pub failure: Option<CliError>,
}

impl Output {
    fn report(report: RunReport, failure: Option<CliError>) -> Self {
        Output {
            report,
            table: None,
            failure,
        }
    }

    fn table(report: RunReport, table: TableOut) -> Self {
        Output {
            report,
            table: Some(table),
            failure: None,
        }
    }
}

pub fn dispatch(command: &Command, ctx: &Context) -> Result<Output, CliError> {
    match command {
        Command::Modes(a) => mechanics::modes(ctx, a),
        Command::Effmass(a) => mechanics::effmass(ctx, a),
        Command::Psd(a) => mechanics::psd(ctx, a),
        Command::FitF0(a) => mechanics::fit_f0(ctx, a),
        Command::Scan(a) => optics::scan(ctx, a),
        Command::FinesseFit(a) => optics::finesse_fit(ctx, a),
        Command::Ringdown(a) => optics::ringdown(ctx, a),
    }
}

fn new_report(command: &str, ctx: &Context) -> RunReport {
    let mut report = RunReport::new(command);
    report.inputs_from(ctx.config.echo());
    for key in ctx.config.unknown_keys() {
        report.warn(format!(
            "{}: unknown key '{key}' ignored",
            ctx.config.locate(&key)
        ));
    }
    report
}

fn geometry(cfg: &Config) -> Result<MembraneGeometry, CliError> {
    let g = MembraneGeometry::new(
        cfg.require_f64("membrane.radius_m")?,
        cfg.require_f64("membrane.thickness_m")?,
        cfg.require_f64("membrane.density_kg_m3")?,
        cfg.require_f64("membrane.stress_pa")?,
    );
    g.map_err(|e| CliError::Config(format!("membrane: {e}")))
}

fn fixed_cavity(cfg: &Config) -> Result<FixedCavity, CliError> {
    let fixed = FixedCavity {
        thickness: cfg.require_f64("slab.thickness_m")?,
        n_real: cfg.require_f64("slab.n_real")?,
        length: cfg.require_f64("cavity.length_m")?,
        wavelength: cfg.require_f64("cavity.wavelength_m")?,
        empty_finesse: cfg.require_f64("cavity.empty_finesse")?,
    };
    fixed
        .cavity()
        .map_err(|e| CliError::Config(format!("cavity: {e}")))?;
    fixed
        .slab(0.0, 0.0)
        .map_err(|e| CliError::Config(format!("slab: {e}")))?;
    Ok(fixed)
}

fn fit_config(cfg: &Config) -> Result<FitConfig, CliError> {
    let d = FitConfig::default();
    let fc = FitConfig {
        max_iterations: cfg.usize_or("fit.max_iterations", d.max_iterations)?,
        gradient_tol: cfg.f64_or("fit.gradient_tol", d.gradient_tol)?,
        step_tol: cfg.f64_or("fit.step_tol", d.step_tol)?,
        initial_damping: cfg.f64_or("fit.initial_damping", d.initial_damping)?,
    };
    fc.validate()
        .map_err(|e| CliError::Config(format!("fit: {e}")))?;
    Ok(fc)
}

fn loss_guess(cfg: &Config) -> Result<LossGuess, CliError> {
    let d = LossGuess::default();
    Ok(LossGuess {
        n_imag: cfg.f64_or("fit.n_imag_guess", d.n_imag)?,
        roughness: cfg.f64_or("fit.roughness_guess_m", d.roughness)?,
    })
}

fn parameterisation(cfg: &Config) -> Result<Parameterisation, CliError> {
    match cfg.get_str("fit.parameterisation") {
        None | Some("log") => Ok(Parameterisation::Log),
        Some("linear") => Ok(Parameterisation::Linear),
        Some(other) => Err(CliError::Config(format!(
            "{}: fit.parameterisation must be 'log' or 'linear', got '{other}'",
            cfg.locate("fit.parameterisation")
        ))),
    }
}

/// Copies fitted parameters and fit diagnostics into the report. Returns
/// the non-convergence error when the fit stopped early.
fn record_fit(report: &mut RunReport, fit: &FitResult, units: &[&str]) -> Option<CliError> {
    for ((name, (&p, &s)), unit) in fit
        .names
        .iter()
        .zip(fit.params.iter().zip(&fit.sigmas))
        .zip(units)
    {
        report.output_with_sigma(name, p, s, unit);
    }
    report.output("chi_square", fit.chi_square, "1");
    report.output("reduced_chi_square", fit.reduced_chi_square(), "1");
    report.output("gradient_norm", fit.gradient_norm, "1");
    report.note("iterations", fit.iterations);
    report.note("dof", fit.dof);
    report.note("termination", format!("{:?}", fit.termination));
    report.note("converged", fit.converged);
    report.note("weighted", fit.weighted);
    if fit.converged {
        None
    } else {
        let msg = format!(
            "fit did not converge after {} iterations ({:?})",
            fit.iterations, fit.termination
        );
        report.warn(msg.clone());
        Some(CliError::NonConvergence(msg))
    }
}
