//! Text output for the `bec-phonon` command: CSV with `# key = value unit`
//! header lines, gnuplot scripts, and the rate and verification reports.

use std::fmt::Write as _;

use bec_phonon::damping::{
    gamma_beliaev_asymptotic, gamma_integral, gamma_landau_high_t, gamma_landau_low_t, RegimeRatios,
};
use bec_phonon::scenario::{Scenario, SweepCurve, Trajectory, VerifyReport};
use bec_phonon::Result;

/// Fixed-width scientific notation used for every float in output files.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".to_string())
}

fn meta(out: &mut String, key: &str, value: impl std::fmt::Display, unit: &str) {
    if unit.is_empty() {
        let _ = writeln!(out, "# {key} = {value}");
    } else {
        let _ = writeln!(out, "# {key} = {value} {unit}");
    }
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let s = &tr.summary;
    let d = &s.damping;
    let m = &tr.metrics;
    let mut out = String::new();
    meta(
        &mut out,
        "species",
        s.species.as_deref().unwrap_or("custom"),
        "",
    );
    meta(&mut out, "omega_q", num(s.omega), "rad/s");
    meta(&mut out, "temperature", num(s.temperature), "K");
    meta(&mut out, "sound_speed", num(s.sound_speed), "m/s");
    meta(&mut out, "density", num(s.density), "m^-3");
    meta(
        &mut out,
        "chemical_potential",
        num(s.chemical_potential),
        "J",
    );
    meta(&mut out, "rate_source", s.rate_source.as_str(), "");
    meta(&mut out, "regime", d.regime, "");
    meta(&mut out, "in_regime", d.in_regime, "");
    meta(&mut out, "gamma", num(d.gamma), "1/s");
    meta(&mut out, "gamma_beliaev", num(d.gamma_b), "1/s");
    meta(&mut out, "gamma_landau", num(d.gamma_l), "1/s");
    meta(&mut out, "gamma_1", num(d.gamma_1), "1/s");
    meta(&mut out, "gamma_2", num(d.gamma_2), "1/s");
    meta(&mut out, "beta_q", num(d.beta_q), "1");
    meta(&mut out, "n_th", num(d.n_th), "1");
    meta(&mut out, "mu_inf", num(m.mu_inf), "1");
    meta(&mut out, "mu_0", num(s.initial.mu), "1");
    meta(&mut out, "r_0", num(s.initial.r), "1");
    meta(&mut out, "psi_0", num(s.initial.psi), "rad");
    meta(&mut out, "n_0", num(s.initial.n), "1");
    meta(&mut out, "t_min", opt(m.t_min), "s");
    meta(&mut out, "t_tau0", num(m.t_tau0), "s");
    meta(&mut out, "t_half", opt(s.t_half), "s");
    out.push_str("# columns: t [s], mu [1], tau [1], r [1], n [1]\n");
    out.push_str("t,mu,tau,r,n\n");
    for i in 0..m.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(m.t[i]),
            num(m.mu[i]),
            num(m.tau[i]),
            num(m.r[i]),
            num(m.n[i])
        );
    }
    out
}

pub fn sweep_csv(curves: &[SweepCurve]) -> String {
    let mut out = String::new();
    for c in curves {
        let key = format!("sound_speed {}", num(c.sound_speed));
        meta(&mut out, &format!("{key} t_half"), num(c.t_half), "s");
        meta(
            &mut out,
            &format!("{key} truncation_omega"),
            opt(c.truncation_omega),
            "rad/s",
        );
    }
    out.push_str(
        "# columns: c_s [m/s], omega [rad/s], gamma [1/s], t_min [s], t_half [s], truncated, regime\n",
    );
    out.push_str("c_s,omega,gamma,t_min,t_half,truncated,regime\n");
    for c in curves {
        for r in &c.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(r.sound_speed),
                num(r.omega),
                num(r.gamma),
                num(r.t_min),
                num(r.t_half),
                r.truncated as u8,
                r.regime
            );
        }
    }
    out
}

pub fn trajectory_gnuplot(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set multiplot layout 2,2\n\
         set xlabel 't [s]'\n\
         plot '{csv}' using 1:2 with lines title 'purity'\n\
         plot '{csv}' using 1:3 with lines title 'nonclassical depth'\n\
         plot '{csv}' using 1:4 with lines title 'squeezing r'\n\
         set logscale y\n\
         plot '{csv}' using 1:5 with lines title 'occupation'\n\
         unset multiplot\n"
    )
}

pub fn sweep_gnuplot(csv: &str, curves: &[SweepCurve]) -> String {
    let mut out = String::from(
        "set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'omega [rad/s]'\n\
         set ylabel 't_min [s]'\n\
         plot ",
    );
    let parts: Vec<String> = curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            format!(
                "'{csv}' every ::{}::{} using 2:($6 == 0 ? $4 : NaN) with lines title 'c_s = {:.2} mm/s'",
                i * c.rows.len() + 1,
                (i + 1) * c.rows.len(),
                c.sound_speed * 1e3
            )
        })
        .collect();
    out.push_str(&parts.join(", \\\n     "));
    out.push('\n');
    out
}

/// Breakdown of the damping rate at the scenario's frequency.
pub fn rates_report(s: &Scenario) -> Result<String> {
    let p = &s.condensate;
    let w = s.omega;
    let ratios = RegimeRatios::new(w, p);
    let mut out = String::new();
    let line = |out: &mut String, k: &str, v: String, u: &str| {
        let text = format!("{k:<28} {v} {u}");
        let _ = writeln!(out, "{}", text.trim_end());
    };
    line(&mut out, "omega_q", num(w), "rad/s");
    line(&mut out, "temperature", num(p.temperature()), "K");
    line(&mut out, "sound_speed", num(p.sound_speed()), "m/s");
    line(&mut out, "density", num(p.density()), "m^-3");
    line(&mut out, "kT/(hbar omega)", num(ratios.thermal_to_mode), "");
    line(&mut out, "kT/mu", num(ratios.thermal_to_chemical), "");
    line(
        &mut out,
        "mu/(hbar omega)",
        num(ratios.chemical_to_mode),
        "",
    );
    line(&mut out, "detected regime", ratios.regime().to_string(), "");
    for (name, r) in [
        ("beliaev closed form", gamma_beliaev_asymptotic(w, p)?),
        ("landau high-T closed form", gamma_landau_high_t(w, p)?),
        ("landau low-T closed form", gamma_landau_low_t(w, p)?),
    ] {
        let flag = if r.in_regime { "" } else { " (outside regime)" };
        line(&mut out, name, num(r.rate), &format!("1/s{flag}"));
    }
    match gamma_integral(w, p, &s.rate.quadrature) {
        Ok(c) => {
            line(&mut out, "beliaev integral", num(c.gamma_b), "1/s");
            line(&mut out, "landau integral", num(c.gamma_l), "1/s");
            line(&mut out, "integral downward", num(c.down()), "1/s");
            line(&mut out, "integral upward", num(c.up()), "1/s");
        }
        Err(e) => line(&mut out, "collision integrals", format!("failed: {e}"), ""),
    }
    let d = s.damping(w)?;
    line(
        &mut out,
        "rate source",
        s.rate.source.as_str().to_string(),
        "",
    );
    line(&mut out, "gamma", num(d.gamma), "1/s");
    line(&mut out, "gamma_1", num(d.gamma_1), "1/s");
    line(&mut out, "gamma_2", num(d.gamma_2), "1/s");
    line(&mut out, "beta_q", num(d.beta_q), "");
    line(&mut out, "n_th", num(d.n_th), "");
    Ok(out)
}

pub fn verify_report(r: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "quadrature tolerance {}",
        num(r.options.quadrature_tolerance)
    );
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{} {:<34} deviation {} tolerance {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            num(c.deviation),
            num(c.tolerance)
        );
    }
    let _ = writeln!(
        out,
        "{}",
        if r.passed() {
            "all checks passed"
        } else {
            "verification FAILED"
        }
    );
    out
}
