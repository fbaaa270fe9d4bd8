use membrane_cavity::fit::fit_f0_asymptote;
use membrane_cavity::mechanics::{
    base_frequency, effective_mass_gaussian, effective_mass_point, gaussian_readout_warning,
    mode_frequency, physical_mass, synth_psd, thermal_peak_area,
};
use membrane_cavity::special::RootIndex;
use membrane_cavity::{ModeId, ThermalEnvironment};

use super::{fit_config, geometry, new_report, record_fit, Context, Output};
use crate::args::{DataArgs, EffmassArgs, ModesArgs, PsdArgs};
use crate::error::CliError;
use crate::table::{num, Table, TableOut};

/// Peaks are integrated over this many linewidths either side of centre.
const BAND_LINEWIDTHS: f64 = 200.0;

pub(super) fn modes(ctx: &Context, args: &ModesArgs) -> Result<Output, CliError> {
    let geom = geometry(&ctx.config)?;
    let mut report = new_report("modes", ctx);
    report.input("max_m", args.max_m);
    report.input("max_n", args.max_n);
    if let Some(w) = geom.aspect_warning() {
        report.warn(w);
    }
    let mut rows = Vec::new();
    for m in 0..=args.max_m {
        for n in 1..=args.max_n {
            let mode = ModeId::new(m, n)?;
            rows.push((mode_frequency(&geom, mode), mode));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let f0 = base_frequency(&geom);
    report.output("f0", f0, "Hz");
    let mut table = TableOut::new(&["m", "n", "alpha_mn", "f_hz"]);
    table.comment(format!("drum modes, f0 = {} Hz", num(f0)));
    for (f, mode) in rows {
        table.push(vec![
            mode.m.to_string(),
            mode.n().to_string(),
            num(mode.alpha()),
            num(f),
        ]);
    }
    report.note("rows", table.rows.len());
    Ok(Output::table(report, table))
}

pub(super) fn effmass(ctx: &Context, args: &EffmassArgs) -> Result<Output, CliError> {
    let geom = geometry(&ctx.config)?;
    let width = args.w.or(ctx.config.get_f64("readout.width_m")?);
    let mut report = new_report("effmass", ctx);
    report.input("n_max", args.n_max);
    if let Some(w) = width {
        report.input("w", num(w));
        if let Some(msg) = gaussian_readout_warning(&geom, w) {
            report.warn(msg);
        }
    }
    let mass = physical_mass(&geom);
    report.output("physical_mass", mass, "kg");

    let mut headers = vec!["n", "alpha_0n", "f_hz", "m_point_kg", "ratio_point"];
    if width.is_some() {
        headers.extend(["m_gauss_kg", "ratio_gauss"]);
    }
    let mut table = TableOut::new(&headers);
    table.comment(format!("physical mass {} kg", num(mass)));
    for n in 1..=args.n_max {
        let idx = RootIndex::new(n)?;
        let mode = ModeId::new(0, n)?;
        let point = effective_mass_point(&geom, idx);
        let mut row = vec![
            n.to_string(),
            num(mode.alpha()),
            num(mode_frequency(&geom, mode)),
            num(point),
            num(point / mass),
        ];
        if let Some(w) = width {
            let gauss = effective_mass_gaussian(&geom, idx, w)?;
            row.extend([num(gauss), num(gauss / mass)]);
        }
        table.push(row);
    }
    Ok(Output::table(report, table))
}

/// `START:STOP:COUNT`, evenly spaced and strictly increasing.
fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("--grid '{spec}': {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad("expected START:STOP:COUNT"));
    };
    let start: f64 = start
        .trim()
        .parse()
        .map_err(|_| bad("START is not a number"))?;
    let stop: f64 = stop
        .trim()
        .parse()
        .map_err(|_| bad("STOP is not a number"))?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| bad("COUNT is not an integer"))?;
    if !(start.is_finite() && stop.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    if count < 2 {
        return Err(bad("COUNT must be at least 2"));
    }
    if stop <= start {
        return Err(bad("grid must be increasing (STOP > START)"));
    }
    if start <= 0.0 {
        return Err(bad("frequencies must be positive"));
    }
    let step = (stop - start) / (count - 1) as f64;
    let grid: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("spacing is below floating-point resolution"));
    }
    Ok(grid)
}

pub(super) fn psd(ctx: &Context, args: &PsdArgs) -> Result<Output, CliError> {
    let grid = parse_grid(&args.grid)?;
    let geom = geometry(&ctx.config)?;
    let env = ThermalEnvironment::new(ctx.config.require_f64("thermal.temperature_k")?)
        .map_err(|e| CliError::Config(format!("thermal: {e}")))?;
    let width = ctx.config.get_f64("readout.width_m")?;
    let floor = ctx.config.f64_or("psd.floor_m2_per_hz", 0.0)?;

    let mut indices = Vec::new();
    for s in args
        .modes
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
    {
        let n: u32 = s
            .parse()
            .map_err(|_| CliError::Usage(format!("--modes: '{s}' is not a radial index")))?;
        indices.push(n);
    }
    let qs: Vec<f64> = match args.q.len() {
        1 => vec![args.q[0]; indices.len()],
        k if k == indices.len() => args.q.clone(),
        k => {
            return Err(CliError::Usage(format!(
                "--q has {k} values for {} modes; give one or one per mode",
                indices.len()
            )))
        }
    };
    let mut modes = Vec::with_capacity(indices.len());
    for (&n, &q) in indices.iter().zip(&qs) {
        modes.push((ModeId::new(0, n)?, q));
    }

    let mut report = new_report("psd", ctx);
    report.input("modes", args.modes.join(","));
    report.input(
        "q",
        qs.iter().map(|q| num(*q)).collect::<Vec<_>>().join(","),
    );
    report.input("grid", &args.grid);
    if let Some(w) = width.and_then(|w| gaussian_readout_warning(&geom, w)) {
        report.warn(w);
    }

    let spectrum = synth_psd(&geom, &modes, &env, width, &grid, floor)?;
    for &(mode, q) in &modes {
        let f = mode_frequency(&geom, mode);
        let m_eff = match width {
            Some(w) => effective_mass_gaussian(&geom, mode.root_index(), w)?,
            None => effective_mass_point(&geom, mode.root_index()),
        };
        let area = thermal_peak_area(m_eff, f, &env)?;
        let half_band = BAND_LINEWIDTHS * f / q;
        let key = format!("0{}", mode.n());
        report.output(&format!("f_{key}"), f, "Hz");
        report.output(&format!("m_eff_{key}"), m_eff, "kg");
        report.output(&format!("thermal_area_{key}"), area, "m^2");
        report.output(
            &format!("band_area_{key}"),
            spectrum.band_variance(f - half_band, f + half_band, floor),
            "m^2",
        );
    }

    let mut table = TableOut::new(&["f_hz", "psd_m2_per_hz"]);
    table.comment(format!(
        "thermal displacement spectrum at {} K",
        num(env.temperature())
    ));
    for (f, s) in spectrum.frequencies().iter().zip(spectrum.psd()) {
        table.push(vec![num(*f), num(*s)]);
    }
    Ok(Output::table(report, table))
}

pub(super) fn fit_f0(ctx: &Context, args: &DataArgs) -> Result<Output, CliError> {
    let data = Table::read(&args.data)?;
    let ms = data.index_column("m")?;
    let ns = data.index_column("n")?;
    let fs = data.column("f_hz")?;
    let mut modes = Vec::with_capacity(fs.len());
    for ((m, n), f) in ms.into_iter().zip(ns).zip(fs) {
        modes.push((ModeId::new(m, n)?, f));
    }
    let cfg = fit_config(&ctx.config)?;
    let mut report = new_report("fit-f0", ctx);
    report.input("data", args.data.display());
    let fit = fit_f0_asymptote(&modes, &cfg)?;
    let failure = record_fit(&mut report, &fit, &["Hz", "1"]);
    Ok(Output::report(report, failure))
}
