//! Subcommand implementations. Each returns a [`Report`].

use std::f64::consts::PI;

use anyhow::{bail, Result};
use qmemcell::decoherence::{
    boundary_loss_budget, doppler_averaged_scattering, evolve_pumping_traced, residual_pump_occupation,
    scattered_photon_limit, spin_exchange_probability, stark_scattering_detuning, DecoherenceBudget, Level,
    PumpLevelSystem, WidthConvention,
};
use qmemcell::gaussian::{vacuum_state, AtomicBasis, Outcome};
use qmemcell::memory::{collective_kappa, Protocol};
use qmemcell::scenario::ScenarioDocument;
use qmemcell::shifts::{
    ac_zeeman_compensation_intensity, ac_zeeman_ladder, class_dephasing, microwave_pi_pulse,
    stark_compensation_intensity, stark_ladder, stark_pi_pulse, zeeman_ladder, zeeman_pi_pulse, PulseDesign,
    PulseDrive, ShiftLadder,
};
use qmemcell::units::hz_to_rad;
use qmemcell::{ConfigError, ScenarioConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{Cell, Report, ReportRow};

const TO_HZ: f64 = 1.0 / (2.0 * PI);
const TO_MW_CM2: f64 = 0.1;
const TO_W_CM2: f64 = 1e-4;
const TO_GAUSS: f64 = 1e4;

fn mechanism_name(l: &ShiftLadder) -> String {
    serde_json::to_value(l.mechanism)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Ω(m) of the Zeeman ladder and of the Stark and ac Zeeman ladders at
/// their compensating intensities.
pub fn shifts(cfg: &ScenarioConfig) -> Result<Report> {
    let s = &cfg.species;
    let ladders = [
        zeeman_ladder(cfg.omega_b, s)?,
        stark_ladder(stark_compensation_intensity(cfg.omega_b, cfg.stark_detuning, s)?, cfg.stark_detuning, s)?,
        ac_zeeman_ladder(
            ac_zeeman_compensation_intensity(cfg.omega_b, cfg.microwave_detuning, s)?,
            cfg.microwave_detuning,
            s,
        )?,
    ];
    let rows = ladders
        .iter()
        .flat_map(|l| {
            let name = mechanism_name(l);
            l.omegas
                .iter()
                .map(move |&(m, w)| vec![Cell::Text(name.clone()), Cell::Int(m as i64), Cell::Num(w * TO_HZ)])
        })
        .collect();
    Ok(Report::Grid {
        headers: ["mechanism", "m", "omega_hz"].map(String::from).to_vec(),
        rows,
    })
}

pub fn compensate(cfg: &ScenarioConfig) -> Result<Report> {
    let s = &cfg.species;
    let zeeman = zeeman_ladder(cfg.omega_b, s)?;
    let i_s = stark_compensation_intensity(cfg.omega_b, cfg.stark_detuning, s)?;
    let i_mu = ac_zeeman_compensation_intensity(cfg.omega_b, cfg.microwave_detuning, s)?;
    let stark_residual = zeeman.compose(&stark_ladder(i_s, cfg.stark_detuning, s)?)?.spread();
    let mw_residual = zeeman.compose(&ac_zeeman_ladder(i_mu, cfg.microwave_detuning, s)?)?.spread();
    let gamma = doppler_averaged_scattering(
        i_s,
        stark_scattering_detuning(cfg.stark_detuning, s),
        s.doppler_halfwidth,
        cfg.doppler_width,
        s,
    )?;
    Ok(Report::Rows(vec![
        ReportRow::new("uncompensated ladder spread", zeeman.spread(), "rad/s", TO_HZ, "Hz"),
        ReportRow::new("Stark compensation intensity", i_s, "W/m^2", TO_MW_CM2, "mW/cm^2"),
        ReportRow::new("Stark residual spread", stark_residual, "rad/s", TO_HZ, "Hz"),
        ReportRow::new("Stark photon scattering rate", gamma, "1/s", 1.0, "1/s"),
        ReportRow::new("ac Zeeman compensation intensity", i_mu, "W/m^2", TO_W_CM2, "W/cm^2"),
        ReportRow::new("ac Zeeman residual spread", mw_residual, "rad/s", TO_HZ, "Hz"),
    ]))
}

fn intensity(p: &PulseDesign) -> f64 {
    match p.drive {
        PulseDrive::Intensity(i) => i,
        PulseDrive::Magnetic { .. } => f64::NAN,
    }
}

pub fn pulse_design(cfg: &ScenarioConfig, tau: f64) -> Result<Report> {
    let s = &cfg.species;
    let z = zeeman_pi_pulse(tau, s, cfg.field_conversion)?;
    let PulseDrive::Magnetic { omega_b, field } = z.drive else {
        bail!("Zeeman pulse without a magnetic drive")
    };
    let st = stark_pi_pulse(tau, cfg.stark_detuning, s, cfg.doppler_width)?;
    let mw = microwave_pi_pulse(tau, cfg.microwave_detuning, s)?;
    let side = st.side_effects.unwrap_or_default();
    Ok(Report::Rows(vec![
        ReportRow::new("pulse duration", tau, "s", 1e6, "us"),
        ReportRow::new("Zeeman pulse Larmor frequency", omega_b, "rad/s", TO_HZ * 1e-6, "MHz"),
        ReportRow::new("Zeeman pulse bias field", field, "T", TO_GAUSS, "G"),
        ReportRow::new("Zeeman pulse phase difference", z.achieved_phase_difference, "rad", 1.0 / PI, "pi rad"),
        ReportRow::new("Stark pulse intensity", intensity(&st), "W/m^2", TO_MW_CM2, "mW/cm^2"),
        ReportRow::new("Stark pulse scattering rate", side.gamma_ph, "1/s", 1.0, "1/s"),
        ReportRow::plain("Stark pulse scattered photons", side.n_phot),
        ReportRow::new("Stark pulse phase difference", st.achieved_phase_difference, "rad", 1.0 / PI, "pi rad"),
        ReportRow::new("microwave pulse intensity", intensity(&mw), "W/m^2", TO_W_CM2, "W/cm^2"),
        ReportRow::new("microwave pulse phase difference", mw.achieved_phase_difference, "rad", 1.0 / PI, "pi rad"),
    ]))
}

pub fn decoherence(cfg: &ScenarioConfig) -> Result<Report> {
    let s = &cfg.species;
    let b = DecoherenceBudget::from_scenario(cfg)?;
    let bound = boundary_loss_budget(cfg.boundary_loss, cfg.n_boundaries)?;
    Ok(Report::Rows(vec![
        ReportRow::plain("spin-exchange probability", b.eta),
        ReportRow::new("photon scattering rate", b.gamma_ph, "1/s", 1.0, "1/s"),
        ReportRow::plain("scattered photons per atom", b.n_phot),
        ReportRow::plain("scattered-photon limit", scattered_photon_limit(s)),
        ReportRow::plain("residual pump occupation", residual_pump_occupation(s)),
        ReportRow::plain("boundary transmission", bound.transmission),
        ReportRow::plain("boundary added noise fraction", bound.added_noise_fraction),
    ]))
}

pub struct PumpArgs {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
    pub pump_rate: f64,
    pub repump_rate: f64,
    pub leak_rate: f64,
}

pub fn pump(cfg: &ScenarioConfig, a: &PumpArgs) -> Result<Report> {
    let f = cfg.species.f_ground;
    let sys = PumpLevelSystem::uniform_upper(f, a.pump_rate, a.repump_rate, a.leak_rate)?;
    let (_, trace) = evolve_pumping_traced(&sys, a.dt, a.steps, a.record_every.max(1))?;
    let fi = f as i32;
    let mut labels = vec![(0, "t".to_string())];
    for m in -fi..=fi {
        labels.push((sys.index(Level::Upper(m)).unwrap_or(0), format!("upper_{m}")));
    }
    for m in -(fi - 1)..fi {
        labels.push((sys.index(Level::Lower(m)).unwrap_or(0), format!("lower_{m}")));
    }
    let rows = trace
        .into_iter()
        .map(|(t, p)| {
            let mut r = vec![Cell::Num(t)];
            r.extend(labels[1..].iter().map(|(i, _)| Cell::Num(p[*i])));
            r
        })
        .collect();
    Ok(Report::Grid {
        headers: labels.into_iter().map(|(_, l)| l).collect(),
        rows,
    })
}

pub fn memory_sim(cfg: &ScenarioConfig, seed: u64) -> Result<Report> {
    let coupling = collective_kappa(cfg)?;
    let protocol = Protocol::from_scenario(cfg)?;
    let vac = vacuum_state(4, AtomicBasis::PlusMinus)?;
    let write = protocol.write(&vac)?;
    let stored = write.output_state()?;
    let read = protocol.read(&stored)?;
    let (_, records) =
        protocol.write_trajectory(&vac, Outcome::Sample(seed.wrapping_mul(2)), Outcome::Sample(seed.wrapping_mul(2) | 1))?;

    let mut summary = vec![
        ReportRow::new("coupling rate kappa", coupling.kappa, "rad/s", 1.0, "rad/s"),
        ReportRow::plain("k_eff", coupling.k_eff),
        ReportRow::plain("feedback gain", protocol.gain),
        ReportRow::plain("spin-exchange probability", protocol.budget.eta),
        ReportRow::plain("scattered photons per atom", protocol.budget.n_phot),
        ReportRow::plain("write mean fidelity", write.mean_fidelity),
        ReportRow::plain("read mean fidelity", read.mean_fidelity),
    ];
    for (name, res) in [("write", &write), ("read", &read)] {
        for (q, v) in ["X1", "P1", "X2", "P2"].iter().zip(res.added_noise) {
            summary.push(ReportRow::plain(&format!("{name} added noise {q}"), v));
        }
    }
    summary.push(ReportRow::plain("sampled write record X_C", records[0]));
    summary.push(ReportRow::plain("sampled write record P_S", records[1]));

    let json = json!({
        "scenario": cfg.to_document(),
        "coupling": coupling,
        "protocol": protocol,
        "write": write,
        "read": read,
        "trajectory": { "seed": seed, "records": records },
    });
    Ok(Report::Document { summary, json })
}

fn in_range(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

/// The twelve published numbers, recomputed from the scenario.
pub fn paper_check(cfg: &ScenarioConfig) -> Result<Report> {
    let s = &cfg.species;
    let tau = cfg.pulse_duration;
    let pulse_tau = cfg.rotation_pulse_duration;
    let mut rows = Vec::with_capacity(12);

    let dephasing = class_dephasing(cfg.omega_b, tau, s)?;
    rows.push(
        ReportRow::new("class dephasing", dephasing, "rad", 1.0 / PI, "pi rad")
            .compare(0.3, in_range(dephasing / PI, 0.25, 0.31)),
    );

    let weak = class_dephasing(hz_to_rad(5.0e4), tau, s)?;
    rows.push(
        ReportRow::new("weak-field dephasing", weak, "rad", 1e3, "mrad").compare(20.0, in_range(weak * 1e3, 10.0, 30.0)),
    );

    let i_s = stark_compensation_intensity(cfg.omega_b, cfg.stark_detuning, s)?;
    let spread = zeeman_ladder(cfg.omega_b, s)?.compose(&stark_ladder(i_s, cfg.stark_detuning, s)?)?.spread();
    rows.push(
        ReportRow::new("Stark compensation intensity", i_s, "W/m^2", TO_MW_CM2, "mW/cm^2")
            .compare(1.0, in_range(i_s * TO_MW_CM2, 0.9, 1.3) && spread < 1e-9 * cfg.omega_b),
    );

    let center = stark_scattering_detuning(cfg.stark_detuning, s);
    let rate = |w| doppler_averaged_scattering(i_s, center, s.doppler_halfwidth, w, s);
    let both = [rate(WidthConvention::Hwhm)?, rate(WidthConvention::StdDev)?];
    let gamma = rate(cfg.doppler_width)?;
    rows.push(
        ReportRow::new("Doppler-averaged scattering rate", gamma, "1/s", 1.0, "1/s")
            .compare(18.0, both.iter().all(|&g| in_range(g, 18.0 * 0.6, 18.0 * 1.4))),
    );

    let i_mu = ac_zeeman_compensation_intensity(cfg.omega_b, cfg.microwave_detuning, s)?;
    rows.push(
        ReportRow::new("ac Zeeman compensation intensity", i_mu, "W/m^2", TO_W_CM2, "W/cm^2")
            .compare(1.4, in_range(i_mu * TO_W_CM2, 1.3, 1.5)),
    );

    let z = zeeman_pi_pulse(pulse_tau, s, cfg.field_conversion)?;
    let PulseDrive::Magnetic { omega_b, field } = z.drive else {
        bail!("Zeeman pulse without a magnetic drive")
    };
    rows.push(
        ReportRow::new("Zeeman pi-pulse bias field", field, "T", TO_GAUSS, "G")
            .compare(8.8, in_range(omega_b * TO_HZ * 1e-6, 3.0, 3.4) && in_range(field * TO_GAUSS, 8.4, 9.2)),
    );

    let st = stark_pi_pulse(pulse_tau, cfg.stark_detuning, s, cfg.doppler_width)?;
    let n_phot = st.side_effects.unwrap_or_default().n_phot;
    rows.push(
        ReportRow::new("Stark pi-pulse intensity", intensity(&st), "W/m^2", TO_MW_CM2, "mW/cm^2")
            .compare(135.0, in_range(intensity(&st) * TO_MW_CM2, 120.0, 155.0) && in_range(n_phot, 0.04, 0.08)),
    );

    let limit = scattered_photon_limit(s);
    let far = stark_pi_pulse(pulse_tau, 30.0 * s.delta2, s, cfg.doppler_width)?
        .side_effects
        .unwrap_or_default()
        .n_phot;
    rows.push(
        ReportRow::plain("scattered-photon limit", limit)
            .compare(0.04, in_range(limit, 0.038, 0.046) && (far / limit - 1.0).abs() < 0.1),
    );

    let mw = intensity(&microwave_pi_pulse(pulse_tau, cfg.microwave_detuning, s)?);
    rows.push(
        ReportRow::new("microwave pi-pulse intensity", mw, "W/m^2", TO_W_CM2, "W/cm^2")
            .compare(170.0, in_range(mw * TO_W_CM2, 160.0, 180.0)),
    );

    let eta = spin_exchange_probability(s.spin_exchange_cross_section, s.mean_speed, tau, cfg.atom_density);
    rows.push(ReportRow::plain("spin-exchange probability", eta).compare(6.5e-3, (eta / 6.5e-3 - 1.0).abs() <= 0.01));

    let residual = residual_pump_occupation(s);
    rows.push(ReportRow::plain("residual pump occupation", residual).compare(1e-3, in_range(residual, 3e-4, 3e-3)));

    let ratio = boundary_loss_budget(cfg.boundary_loss, 4)?.added_noise_fraction
        / boundary_loss_budget(cfg.boundary_loss, 2)?.added_noise_fraction;
    rows.push(ReportRow::plain("boundary noise ratio, 4 vs 2 crossings", ratio).compare(2.0, in_range(ratio, 1.9, 2.0)));

    Ok(Report::Rows(rows))
}

const SWEEP_COLUMNS: [&str; 8] = [
    "class_dephasing_rad",
    "stark_intensity_mw_cm2",
    "gamma_ph_per_s",
    "n_phot",
    "eta",
    "k_eff",
    "write_fidelity",
    "read_fidelity",
];

fn sweep_point(cfg: &ScenarioConfig) -> Result<Vec<f64>> {
    let p = Protocol::from_scenario(cfg)?;
    let vac = vacuum_state(4, AtomicBasis::PlusMinus)?;
    let write = p.write(&vac)?;
    let read = p.read(&write.output_state()?)?;
    Ok(vec![
        class_dephasing(cfg.omega_b, cfg.pulse_duration, &cfg.species)?,
        stark_compensation_intensity(cfg.omega_b, cfg.stark_detuning, &cfg.species)? * TO_MW_CM2,
        p.budget.gamma_ph,
        p.budget.n_phot,
        p.budget.eta,
        p.k_eff,
        write.mean_fidelity,
        read.mean_fidelity,
    ])
}

/// The base document with `key` set to `value`.
pub fn with_key(base: &ScenarioDocument, key: &str, value: f64) -> Result<ScenarioDocument> {
    let mut v = serde_json::to_value(base)?;
    let number = if value.fract() == 0.0 && value.abs() < 9e15 {
        json!(value as i64)
    } else {
        json!(value)
    };
    match &mut v {
        Value::Object(map) => {
            map.insert(key.to_string(), number);
        }
        _ => bail!("scenario document is not an object"),
    }
    Ok(serde_json::from_value(v).map_err(ConfigError::Parse)?)
}

/// Evaluates every point in parallel; rows keep the order of `values`.
pub fn sweep(base: &ScenarioDocument, key: &str, values: &[f64]) -> Result<Report> {
    let configs = values
        .iter()
        .map(|&v| Ok(with_key(base, key, v)?.validate()?))
        .collect::<Result<Vec<_>>>()?;
    let rows = values
        .par_iter()
        .zip(configs.par_iter())
        .map(|(&v, cfg)| {
            let mut row = vec![Cell::Num(v)];
            row.extend(sweep_point(cfg)?.into_iter().map(Cell::Num));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut headers = vec![key.to_string()];
    headers.extend(SWEEP_COLUMNS.map(String::from));
    Ok(Report::Grid { headers, rows })
}
