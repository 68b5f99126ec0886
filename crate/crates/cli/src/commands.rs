use std::io::Write;
use std::path::Path;

use transduction::circuit::{
    chi_from_response, extract_circuit_params, integrate_zero_point, kinetic_sheet_inductance, synth_response,
    IntegrationOptions, ResonatorParams,
};
use transduction::constants::{hz_to_rad, mev_to_joule, rad_to_hz, Z0_DEFAULT};
use transduction::io::{
    fmt_f64, read_grid_binary, read_grid_csv, read_response_csv, write_extraction_csv, write_merit_csv,
    write_response_csv, write_rows, write_scheme_csv, write_sweep_csv, write_trajectory_csv, ExtractionRow,
    GRID_MAGIC,
};
use transduction::lambda::{evolve_lambda, steady_populations, EvolveOptions, LambdaParams};
use transduction::optical::{cooperativity, coupling_g, mode_volume, FieldGrid};
use transduction::presets::{Catalog, PresetFile};
use transduction::protocol::{location_presets, rate_presets};
use transduction::qed::{amplitude_scheme, onoff_scheme, pushpull_scheme, CavityAtomParams, SchemeResult};
use transduction::report::{run_report, write_report_csv};
use transduction::retrieval::{
    entanglement_fidelity_closed, entanglement_fidelity_numeric, matched_rate, purcell_rate, retrieval_probability,
    ProtocolTimings,
};
use transduction::spin::{coupling_g_m, snv_dipole_numeric, DipoleRule};

use crate::config::{require, RunConfig, SchemeKind};
use crate::{CircuitArgs, CliError, Common, DipoleArgs, LambdaArgs, ModeArgs, RateArgs, ReportArgs};

type Out = Box<dyn Write>;

/// Order-preserving map over worker threads.
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                s.spawn(move || part.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn catalog(cfg: &RunConfig) -> Result<Catalog, CliError> {
    let mut cat = Catalog::from_env()?;
    let inline = PresetFile { center: cfg.center.clone(), protocol: cfg.protocol.clone() };
    for c in &inline.center {
        c.validate()?;
    }
    for p in &inline.protocol {
        p.validate()?;
    }
    cat.merge(inline);
    Ok(cat)
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn eval_scheme(kind: SchemeKind, coop: f64, loss: f64, gamma_ratio: f64) -> transduction::Result<SchemeResult> {
    match kind {
        SchemeKind::Amplitude => {
            let kappa = 1.0 + loss;
            let g = (coop * kappa * gamma_ratio).sqrt();
            let p = CavityAtomParams::new(g, 1.0, loss, gamma_ratio, 0.0, 0.0)?;
            Ok(amplitude_scheme(&p)?.result)
        }
        SchemeKind::Onoff => onoff_scheme(coop, loss),
        SchemeKind::Pushpull => pushpull_scheme(coop, gamma_ratio, 1.0, loss),
    }
}

pub fn scheme(common: &Common, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let s = require(&cfg.scheme, "scheme")?;
    let sweep = require(&cfg.sweep, "sweep")?;
    let values = sweep.values()?;
    let loss_default = if s.kind == SchemeKind::Amplitude { 1.0 } else { 0.0 };
    let points: Vec<(f64, f64)> = match sweep.param.as_str() {
        "cooperativity" => {
            let loss = s.loss_ratio.unwrap_or(loss_default);
            values.iter().map(|&v| (v, loss)).collect()
        }
        "loss_ratio" => {
            let coop = s
                .cooperativity
                .ok_or_else(|| config_err("scheme.cooperativity is required when sweeping loss_ratio"))?;
            values.iter().map(|&v| (coop, v)).collect()
        }
        other => {
            return Err(config_err(format!(
                "sweep.param: unknown `{other}` (expected cooperativity or loss_ratio)"
            )))
        }
    };
    if s.gamma_over_kappa_c.is_nan() || s.gamma_over_kappa_c <= 0.0 {
        return Err(config_err("scheme.gamma_over_kappa_c must be > 0"));
    }
    let results = par_map(&points, |&(c, k)| eval_scheme(s.kind, c, k, s.gamma_over_kappa_c));
    let mut rows = Vec::with_capacity(values.len());
    for (v, r) in values.iter().zip(results) {
        rows.push((*v, r.map_err(|e| config_err(format!("sweep value {v}: {e}")))?));
    }
    write_scheme_csv(out, &rows)?;
    Ok(())
}

pub fn retrieval(common: &Common, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let r = require(&cfg.retrieval, "retrieval")?;
    let g_m = hz_to_rad(r.g_m_over_2pi_hz);
    let gamma = match r.kappa_m_over_2pi_hz {
        Some(k) => purcell_rate(g_m, hz_to_rad(k))?,
        None => matched_rate(g_m),
    };
    let taus = match (&cfg.sweep, r.tau_s) {
        (Some(sweep), _) => {
            if sweep.param != "tau_s" {
                return Err(config_err(format!("sweep.param: unknown `{}` (expected tau_s)", sweep.param)));
            }
            sweep.values()?
        }
        (None, Some(tau)) => vec![tau],
        (None, None) => return Err(config_err("retrieval.tau_s or a [sweep] over tau_s is required")),
    };
    let mut rows = Vec::with_capacity(taus.len());
    for tau in taus {
        let t = ProtocolTimings {
            tau,
            t_reset: 0.0,
            t1_transmon: r.t1_transmon_s,
            t2_spin: r.t2_spin_s,
            gamma_purcell: gamma,
        };
        let fidelity = entanglement_fidelity_closed(&t)?;
        let (p_a, p_d) = t.error_probabilities();
        let kraus = entanglement_fidelity_numeric(p_a, p_d)?;
        rows.push(vec![
            fmt_f64(tau),
            fmt_f64(rad_to_hz(gamma)),
            fmt_f64(retrieval_probability(gamma, tau)?),
            fmt_f64(p_a),
            fmt_f64(p_d),
            fmt_f64(fidelity),
            fmt_f64(kraus),
        ]);
    }
    write_rows(
        out,
        &["tau_s", "gamma_over_2pi_hz", "retrieval_probability", "p_a", "p_d", "fidelity", "fidelity_kraus"],
        rows,
    )?;
    Ok(())
}

pub fn rate(args: &RateArgs, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_deref())?;
    let cat = catalog(&cfg)?;
    let names: Vec<String> = if !args.preset.is_empty() {
        args.preset.clone()
    } else if args.tau_fixed.is_some() {
        location_presets().into_iter().map(|p| p.name).collect()
    } else {
        rate_presets().into_iter().map(|p| p.name).collect()
    };
    let rows = names.iter().map(|n| cat.protocol(n).cloned()).collect::<Result<Vec<_>, _>>()?;

    if args.sweep {
        let [row] = rows.as_slice() else {
            return Err(config_err("--sweep needs exactly one --preset"));
        };
        write_sweep_csv(out, &row.optimize()?.sweep)?;
        return Ok(());
    }
    if let Some(tau) = args.tau_fixed {
        let mut table = Vec::with_capacity(rows.len());
        for row in &rows {
            let (p, f) = row.at_tau(tau)?;
            table.push(vec![
                row.name.clone(),
                fmt_f64(row.c_opt),
                fmt_f64(row.gamma_over_2pi),
                fmt_f64(tau),
                fmt_f64(p),
                fmt_f64(f),
            ]);
        }
        write_rows(out, &["preset", "c_opt", "gamma_over_2pi_hz", "tau_s", "probability", "fidelity"], table)?;
        return Ok(());
    }
    let reports = par_map(&rows, |row| row.optimize());
    let mut table = Vec::with_capacity(rows.len());
    for (row, rep) in rows.iter().zip(reports) {
        table.push((row.name.clone(), rep?));
    }
    write_merit_csv(out, &table)?;
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn circuit(args: &CircuitArgs, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_deref())?;
    if args.kinetic {
        let r_sq = args.r_sq.ok_or_else(|| config_err("--r-sq is required with --kinetic"))?;
        let gap = args.gap_mev.ok_or_else(|| config_err("--gap-mev is required with --kinetic"))?;
        let lk = kinetic_sheet_inductance(r_sq, mev_to_joule(gap), args.temperature_k)?;
        write_rows(
            out,
            &["r_sq_ohm", "gap_mev", "temperature_k", "l_k_ph_per_sq"],
            [vec![fmt_f64(r_sq), fmt_f64(gap), fmt_f64(args.temperature_k), fmt_f64(lk * 1e12)]],
        )?;
        return Ok(());
    }
    if args.synth {
        let r = require(&cfg.resonator, "resonator")?;
        let mut p = ResonatorParams::from_lc(r.l_h, r.c_f, r.c_k_f)?;
        if let Some(z0) = r.z0_ohm {
            p = p.with_z0(z0)?;
        }
        let half_width = p.loaded_resonance() / (2.0 * p.quality_factor());
        let fr = synth_response(&p, r.span_half_widths * half_width, r.count)?;
        write_response_csv(out, &fr)?;
        return Ok(());
    }
    let input = args
        .input
        .as_deref()
        .ok_or_else(|| config_err("an input response CSV, --kinetic or --synth is required"))?;
    let fr = read_response_csv(read_file(input)?.as_slice())?;
    let section = cfg.circuit.unwrap_or_default();
    let z0 = section.z0_ohm.unwrap_or(Z0_DEFAULT);
    let chi = chi_from_response(&fr);
    let omega_r = chi
        .peak_omega()
        .ok_or_else(|| CliError::Input("susceptibility has no finite peak".into()))?;
    let opts = IntegrationOptions { tail_extrapolation: section.tail_extrapolation };
    let est = integrate_zero_point(&chi, omega_r, z0, opts)?;
    let (l, c) = extract_circuit_params(est.delta_i, est.peak_omega)?;
    write_extraction_csv(out, &[ExtractionRow { omega_r: est.peak_omega, delta_i: est.delta_i, l, c }])?;
    Ok(())
}

pub fn lambda(args: &LambdaArgs, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_deref())?;
    let s = require(&cfg.lambda, "lambda")?;
    let p = LambdaParams::new(s.g_rad_s, s.kappa_rad_s, s.gamma1_rad_s, s.gamma2_rad_s)?;
    if args.steady {
        let (pg1, pg2) = steady_populations(&p)?;
        write_rows(out, &["p_g1", "p_g2"], [vec![fmt_f64(pg1), fmt_f64(pg2)]])?;
        return Ok(());
    }
    if s.sample_every == 0 {
        return Err(config_err("lambda.sample_every must be >= 1"));
    }
    let traj = evolve_lambda(&p, s.t_final_s, EvolveOptions { sample_every: s.sample_every, ..Default::default() })?;
    write_trajectory_csv(out, &traj)?;
    Ok(())
}

pub fn dipole(args: &DipoleArgs, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_deref())?;
    let cat = catalog(&cfg)?;
    let centers = if args.center.is_empty() {
        cat.centers().to_vec()
    } else {
        args.center.iter().map(|n| cat.center(n).cloned()).collect::<Result<Vec<_>, _>>()?
    };
    let mut rows = Vec::with_capacity(centers.len());
    for c in &centers {
        let d = c.dipoles()?;
        let numeric = match c.dipole_rule {
            DipoleRule::SnvHyperfine => {
                let (ax, ay) = (c.strain_alpha * c.strain_phase.cos(), c.strain_alpha * c.strain_phase.sin());
                fmt_f64(snv_dipole_numeric(ax, ay, c.spin_orbit_lambda, c.hyperfine_par, c.hyperfine_perp)?.dipole)
            }
            DipoleRule::SpinOne => String::new(),
        };
        let g_m = match (args.delta_i_na, args.distance_nm) {
            (Some(di), Some(dist)) => fmt_f64(rad_to_hz(coupling_g_m(di * 1e-9, dist * 1e-9, d.magnetic_moment, None)?)),
            _ => String::new(),
        };
        rows.push(vec![
            c.name.clone(),
            fmt_f64(transduction::spin::to_debye(d.electric_moment)),
            fmt_f64(rad_to_hz(d.linewidth_gamma)),
            fmt_f64(d.magnetic_moment),
            numeric,
            g_m,
        ]);
    }
    write_rows(
        out,
        &[
            "center",
            "optical_dipole_debye",
            "linewidth_over_2pi_hz",
            "magnetic_dipole",
            "magnetic_dipole_numeric",
            "g_m_over_2pi_hz",
        ],
        rows,
    )?;
    Ok(())
}

fn load_grid(path: &Path, shape: Option<[usize; 3]>) -> Result<FieldGrid, CliError> {
    let bytes = read_file(path)?;
    if bytes.starts_with(&GRID_MAGIC) {
        Ok(read_grid_binary(bytes.as_slice())?)
    } else {
        Ok(read_grid_csv(bytes.as_slice(), shape)?)
    }
}

pub fn mode(args: &ModeArgs, out: Out) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.common.config.as_deref())?;
    let section = cfg.mode.as_ref();
    let shape = args.shape.or(section.and_then(|m| m.shape));
    let grid = load_grid(&args.field_grid, shape)?;
    let volume = mode_volume(&grid)?;
    let u = match args.emitter.or(section.and_then(|m| m.emitter_m)) {
        Some(pos) => grid.u_at(pos)?,
        None => 1.0,
    };
    let cat = catalog(&cfg)?;
    let center_name = args.center.clone().or(section.and_then(|m| m.center.clone()));
    let kappa = args.kappa_over_2pi_hz.or(section.and_then(|m| m.kappa_over_2pi_hz));
    let (mut g_col, mut coop_col) = (String::new(), String::new());
    if let Some(name) = center_name {
        let c = cat.center(&name)?;
        let d = c.dipoles()?;
        let g = coupling_g(d.electric_moment, c.zpl_omega(), volume, u)?;
        g_col = fmt_f64(rad_to_hz(g));
        if let Some(k) = kappa {
            coop_col = fmt_f64(cooperativity(g, hz_to_rad(k), d.linewidth_gamma)?);
        }
    } else if kappa.is_some() {
        return Err(config_err("mode.kappa_over_2pi_hz needs a center"));
    }
    write_rows(
        out,
        &["volume_m3", "u_emitter", "g_over_2pi_hz", "cooperativity"],
        [vec![fmt_f64(volume), fmt_f64(u), g_col, coop_col]],
    )?;
    Ok(())
}

pub fn report(args: &ReportArgs, out: Out) -> Result<(), CliError> {
    if args.common.config.is_some() {
        return Err(config_err("report takes no configuration"));
    }
    let report = run_report(args.strict)?;
    write_report_csv(out, &report)?;
    match report.failures() {
        0 => Ok(()),
        n => Err(CliError::Golden(n)),
    }
}
