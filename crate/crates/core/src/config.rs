//! Line-oriented `key = value` scenario files.
//!
//! ```text
//! # comments start with '#'
//! scenario = fig2
//! mode.purcell_peak = 1470
//! pulse.area_pi_units = 1
//! sweep.gamma_prime_ev = 1e-6:1e-2:log:25
//! ```
//!
//! A `scenario` line selects the preset the remaining keys modify; it must
//! come before any other key.

use crate::error::{Error, Result};
use crate::scenario::{lin_space, log_space, Coupling, PulseWidth, ScenarioConfig, SweepAxis};

/// Every recognised key.
pub const KEYS: &[&str] = &[
    "scenario",
    "name",
    "mode.omega_c_ev",
    "mode.kappa_ev",
    "mode.beta_rad",
    "mode.s_factor",
    "mode.n_b",
    "mode.g_ev",
    "mode.purcell_peak",
    "mode.apply_s_factor",
    "emitter.omega_a_ev",
    "emitter.dipole_debye",
    "emitter.gamma_ev",
    "emitter.gamma_prime_ev",
    "pulse.area_pi_units",
    "pulse.tau_p_ps",
    "pulse.tau_p_purcell_units",
    "pulse.t_off_ps",
    "pulse.omega_l_ev",
    "space.n_fock",
    "grid.t_end_ps",
    "grid.n_t",
    "grid.n_tau",
    "grid.dt_max_ps",
    "qrt.atol",
    "qrt.rtol",
    "qrt.pump_cutoff",
    "sweep.gamma_prime_ev",
    "sweep.tau_p_purcell_units",
];

fn number(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{value}` is not finite"))
    }
}

fn count(value: &str) -> std::result::Result<usize, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a non-negative integer"))
}

fn boolean(value: &str) -> std::result::Result<bool, String> {
    match value.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

/// Parses `start:stop:log|lin:count` or a comma-separated list of values.
pub fn parse_axis(value: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [a, b, kind, n] => {
            let (a, b, n) = (number(a)?, number(b)?, count(n)?);
            if n == 0 {
                return Err("range needs at least one point".into());
            }
            match *kind {
                "log" => {
                    if !(a > 0.0 && b > 0.0) {
                        return Err("log range needs positive end points".into());
                    }
                    Ok(log_space(a, b, n))
                }
                "lin" => Ok(lin_space(a, b, n)),
                other => Err(format!("unknown spacing `{other}` (log or lin)")),
            }
        }
        [single] => single.split(',').map(number).collect(),
        _ => Err(format!("`{value}` is neither start:stop:log|lin:count nor a list")),
    }
}

/// Applies one `key = value` setting.
pub fn apply_setting(cfg: &mut ScenarioConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    let v = value.trim();
    match key.trim() {
        "scenario" => {
            let name = cfg.name.clone();
            *cfg = ScenarioConfig::preset(v).map_err(|e| e.to_string())?;
            if name != ScenarioConfig::fig1().name {
                cfg.name = name;
            }
        }
        "name" => cfg.name = v.to_string(),
        "mode.omega_c_ev" => cfg.omega_c = number(v)?,
        "mode.kappa_ev" => cfg.kappa = number(v)?,
        "mode.beta_rad" => cfg.beta_rad = number(v)?,
        "mode.s_factor" => cfg.s_factor = number(v)?,
        "mode.n_b" => cfg.n_b = number(v)?,
        "mode.g_ev" => cfg.coupling = Coupling::Direct(number(v)?),
        "mode.purcell_peak" => cfg.coupling = Coupling::Purcell(number(v)?),
        "mode.apply_s_factor" => cfg.apply_s_factor = boolean(v)?,
        "emitter.omega_a_ev" => cfg.omega_a = number(v)?,
        "emitter.dipole_debye" => cfg.dipole = number(v)?,
        "emitter.gamma_ev" => cfg.gamma = Some(number(v)?),
        "emitter.gamma_prime_ev" => cfg.gamma_prime = number(v)?,
        "pulse.area_pi_units" => cfg.area_pi_units = number(v)?,
        "pulse.tau_p_ps" => cfg.tau_p = PulseWidth::Ps(number(v)?),
        "pulse.tau_p_purcell_units" => cfg.tau_p = PulseWidth::PurcellUnits(number(v)?),
        "pulse.t_off_ps" => cfg.t_off = Some(number(v)?),
        "pulse.omega_l_ev" => cfg.omega_l = Some(number(v)?),
        "space.n_fock" => cfg.n_fock = count(v)?,
        "grid.t_end_ps" => cfg.t_end = Some(number(v)?),
        "grid.n_t" => cfg.n_t = count(v)?,
        "grid.n_tau" => cfg.n_tau = count(v)?,
        "grid.dt_max_ps" => cfg.dt_max = Some(number(v)?),
        "qrt.atol" => cfg.qrt.atol = number(v)?,
        "qrt.rtol" => cfg.qrt.rtol = number(v)?,
        "qrt.pump_cutoff" => cfg.qrt.pump_cutoff = number(v)?,
        "sweep.gamma_prime_ev" => cfg.sweep = Some(SweepAxis::GammaPrime(parse_axis(v)?)),
        "sweep.tau_p_purcell_units" => cfg.sweep = Some(SweepAxis::TauPurcellUnits(parse_axis(v)?)),
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}

/// Parses a scenario file on top of `base`.
pub fn parse_config_onto(base: ScenarioConfig, text: &str) -> Result<ScenarioConfig> {
    let mut cfg = base;
    let mut seen_other = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: i + 1,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key == "scenario" && seen_other {
            return Err(Error::Config {
                line: i + 1,
                reason: "`scenario` must precede all other keys".into(),
            });
        }
        seen_other |= key != "scenario";
        apply_setting(&mut cfg, key, value).map_err(|reason| Error::Config { line: i + 1, reason })?;
    }
    Ok(cfg)
}

/// Parses a scenario file; unspecified keys keep the `fig1` defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_onto(ScenarioConfig::fig1(), text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_namespaced_keys() {
        let text = "\
# fig2 with a custom pulse
scenario = fig2
mode.omega_c_ev = 1.25   # shifted
pulse.area_pi_units = 0.5
grid.n_t = 101
sweep.gamma_prime_ev = 1e-6:1e-2:log:25
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.name, "fig2");
        assert_eq!(cfg.omega_c, 1.25);
        assert_eq!(cfg.area_pi_units, 0.5);
        assert_eq!(cfg.n_t, 101);
        match cfg.sweep {
            Some(SweepAxis::GammaPrime(v)) => {
                assert_eq!(v.len(), 25);
                assert!((v[12] - 1e-4).abs() < 1e-16);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_config("mode.kappa_ev = 0.1\n\nbogus.key = 3\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let err = parse_config("mode.kappa_ev 0.1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
        let err = parse_config("grid.n_t = many\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
        let err = parse_config("grid.n_t = 10\nscenario = fig2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
    }

    #[test]
    fn axis_forms() {
        assert_eq!(parse_axis("0:1:lin:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("1e-3, 2e-3").unwrap(), vec![1e-3, 2e-3]);
        assert!(parse_axis("0:1:log:3").is_err());
        assert!(parse_axis("0:1:cubic:3").is_err());
        assert!(parse_axis("0:1").is_err());
    }

    #[test]
    fn coupling_and_width_forms() {
        let cfg = parse_config("mode.g_ev = 0.004\npulse.tau_p_ps = 2\nemitter.gamma_ev = 3e-7").unwrap();
        assert_eq!(cfg.coupling, Coupling::Direct(0.004));
        assert_eq!(cfg.tau_p, PulseWidth::Ps(2.0));
        assert_eq!(cfg.gamma, Some(3e-7));
    }

    #[test]
    fn every_key_is_accepted() {
        for key in KEYS {
            let value = match *key {
                "scenario" => "fig1",
                "name" => "x",
                "mode.apply_s_factor" => "true",
                k if k.starts_with("sweep.") => "1:2:lin:2",
                k if k.contains("n_fock") || k.contains("n_t") => "5",
                _ => "1.5",
            };
            let mut cfg = ScenarioConfig::fig1();
            apply_setting(&mut cfg, key, value).unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }
}
