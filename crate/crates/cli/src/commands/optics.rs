use membrane_cavity::fit::{fit_exponential_decay, fit_finesse_curve, FinesseScanPoint};
use membrane_cavity::mechanics::{q_from_ringdown, RingdownTrace};
use membrane_cavity::optics::{
    finesse_from_ringdown, finesse_from_scan, mirror_r_from_finesse, resonance_shift_ideal,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{
    fit_config, fixed_cavity, loss_guess, new_report, parameterisation, record_fit, Context, Output,
};
use crate::args::{DataArgs, RingdownArgs, RingdownMode, ScanArgs};
use crate::error::CliError;
use crate::table::{num, Table, TableOut};

pub(super) fn scan(ctx: &Context, args: &ScanArgs) -> Result<Output, CliError> {
    if args.z_steps == 0 {
        return Err(CliError::Usage("--z-steps must be at least 1".into()));
    }
    if !(args.z_min.is_finite() && args.z_max.is_finite()) || args.z_max < args.z_min {
        return Err(CliError::Usage(format!(
            "need finite --z-min <= --z-max, got {} and {}",
            args.z_min, args.z_max
        )));
    }
    let noise = match args.noise {
        None => None,
        Some(s) if s.is_finite() && s > 0.0 => Some(s),
        Some(s) => {
            return Err(CliError::Usage(format!(
                "--noise must be positive, got {s}"
            )))
        }
    };
    let cfg = &ctx.config;
    let fixed = fixed_cavity(cfg)?;
    let n_imag = cfg.f64_or("slab.n_imag", 0.0)?;
    let roughness = cfg.f64_or("slab.roughness_m", 0.0)?;
    let cav = fixed.cavity()?;
    let slab = fixed
        .slab(n_imag, roughness)
        .map_err(|e| CliError::Config(format!("slab: {e}")))?;
    // the ideal-resonance relation holds for a non-absorbing slab only
    let ideal = slab.lossless();

    let mut report = new_report("scan", ctx);
    report.input("z_min", num(args.z_min));
    report.input("z_max", num(args.z_max));
    report.input("z_steps", args.z_steps);
    report.output("mirror_reflectivity", cav.mirror_reflectivity(), "1");
    report.output("free_spectral_range", cav.free_spectral_range(), "Hz");

    let mut headers = vec!["z_m", "finesse", "resonance_shift_hz"];
    if noise.is_some() {
        headers.push("finesse_sigma");
        report.input("noise", num(noise.unwrap_or_default()));
        report.input("seed", ctx.seed);
    }
    let mut table = TableOut::new(&headers);
    table.comment(format!(
        "finesse scan: n_real={} n_imag={} thickness_m={} roughness_m={}",
        num(fixed.n_real),
        num(n_imag),
        num(fixed.thickness),
        num(roughness)
    ));
    table.comment(format!(
        "cavity: length_m={} wavelength_m={} empty_finesse={}",
        num(fixed.length),
        num(fixed.wavelength),
        num(fixed.empty_finesse)
    ));
    if let Some(s) = noise {
        table.comment(format!("multiplicative noise {} seed {}", num(s), ctx.seed));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let step = if args.z_steps > 1 {
        (args.z_max - args.z_min) / (args.z_steps - 1) as f64
    } else {
        0.0
    };
    let (mut f_min, mut f_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..args.z_steps {
        let z = args.z_min + step * i as f64;
        let f = finesse_from_scan(&cav, &slab, z)?;
        let shift = resonance_shift_ideal(&cav, &ideal, z)?;
        log::debug!("z = {z:e} m: finesse {f}");
        f_min = f_min.min(f);
        f_max = f_max.max(f);
        let mut row = vec![num(z)];
        match noise {
            Some(s) => {
                let noisy = f * (1.0 + s * unit.sample(&mut rng));
                row.extend([num(noisy), num(shift), num(s * f)]);
            }
            None => row.extend([num(f), num(shift)]),
        }
        table.push(row);
    }
    report.output("finesse_min", f_min, "1");
    report.output("finesse_max", f_max, "1");
    Ok(Output::table(report, table))
}

pub(super) fn finesse_fit(ctx: &Context, args: &DataArgs) -> Result<Output, CliError> {
    let data = Table::read(&args.data)?;
    let z = data.column("z_m")?;
    let finesse = data.column("finesse")?;
    let sigma = data.optional_column("finesse_sigma")?;
    let points = (0..data.len())
        .map(|i| FinesseScanPoint::new(z[i], finesse[i], sigma.as_ref().map(|s| s[i])))
        .collect::<Result<Vec<_>, _>>()?;

    let cfg = &ctx.config;
    let fixed = fixed_cavity(cfg)?;
    let guess = loss_guess(cfg)?;
    let param = parameterisation(cfg)?;
    let fit_cfg = fit_config(cfg)?;

    let mut report = new_report("finesse-fit", ctx);
    report.input("data", args.data.display());
    report.input("points", data.len());
    report.note("parameterisation", format!("{param:?}").to_lowercase());
    log::info!("fitting {} scan points", data.len());
    let fit = fit_finesse_curve(&points, &fixed, guess, param, &fit_cfg)?;
    let failure = record_fit(&mut report, &fit, &["1", "m"]);
    Ok(Output::report(report, failure))
}

pub(super) fn ringdown(ctx: &Context, args: &RingdownArgs) -> Result<Output, CliError> {
    let data = Table::read(&args.data)?;
    let t = data.column("time_s")?;
    let a = data.column("amplitude_au")?;
    let fit_cfg = fit_config(&ctx.config)?;
    let mut report = new_report("ringdown", ctx);
    report.input("data", args.data.display());
    report.input(
        "mode",
        match args.mode {
            RingdownMode::Optical => "optical",
            RingdownMode::Mechanical => "mechanical",
        },
    );

    let failure = match args.mode {
        RingdownMode::Optical => {
            let length = ctx.config.require_f64("cavity.length_m")?;
            let fit = fit_exponential_decay(&t, &a, None, &fit_cfg)?;
            let failure = record_fit(&mut report, &fit, &["1", "s", "1"]);
            let (tau, tau_sigma) = (fit.params[1], fit.sigmas[1]);
            let f = finesse_from_ringdown(tau, length)?;
            report.output_with_sigma("finesse", f, f * tau_sigma / tau, "1");
            if f > 1.0 {
                report.output("mirror_reflectivity", mirror_r_from_finesse(f)?, "1");
            }
            failure
        }
        RingdownMode::Mechanical => {
            let frequency = match args.frequency {
                Some(f) => f,
                None => ctx
                    .config
                    .get_f64("ringdown.frequency_hz")?
                    .ok_or_else(|| {
                        CliError::Config(
                            "mechanical ringdown needs --frequency or ringdown.frequency_hz".into(),
                        )
                    })?,
            };
            report.input("frequency_hz", num(frequency));
            let trace = RingdownTrace::new(t, a, frequency)?;
            let q = q_from_ringdown(&trace, &fit_cfg)?;
            let failure = record_fit(&mut report, &q.fit, &["1", "s", "1"]);
            report.output_with_sigma("q", q.q, q.q_sigma, "1");
            failure
        }
    };
    Ok(Output::report(report, failure))
}
