use serde_json::{json, Value};
use unidir_core::constants::{angular_to_hz, hz_to_angular};
use unidir_core::noise::{nsr_scan, NoiseSettings};
use unidir_core::nonreciprocity::{
    isolation_opt, j_opt, keff_amplification_bound, lin_grid, log_grid, numerical_t_max, sweep,
    t_max_opt, t_max_theor, working_region, SweepRow,
};
use unidir_core::params::{effective_params, photon_flux, power_of_flux};
use unidir_core::presets as core_presets;
use unidir_core::stability::classify;
use unidir_core::steady::{s_in_of_t, steady_states, transmission_cubic, InverseBranch};
use unidir_core::{Direction, Execution, SystemParams};

use crate::config::{Format, ParamsConfig, RunConfig, Spacing};
use crate::presets::FigurePreset;
use crate::table::{fmt_num, read_records, Cell, Table};
use crate::Failure;

/// Relative cubic residual above which `verify` rejects a row.
pub const VERIFY_TOL: f64 = 1e-8;

/// Rendered output plus an optional failure to report after writing it.
pub struct Outcome {
    pub text: String,
    pub failure: Option<Failure>,
}

impl Outcome {
    pub fn table(t: Table, format: Format) -> Self {
        Self {
            text: t.render(format),
            failure: None,
        }
    }
}

pub fn resolve(cfg: &RunConfig) -> Result<SystemParams, Failure> {
    cfg.params.to_spec().resolve().map_err(|e| Failure::Config(e.to_string()))
}

fn powers(cfg: &RunConfig) -> Vec<f64> {
    let s = &cfg.sweep;
    match s.spacing {
        Spacing::Log => log_grid(s.p_min_w, s.p_max_w, s.points),
        Spacing::Lin => lin_grid(s.p_min_w, s.p_max_w, s.points),
    }
}

fn run_sweep(cfg: &RunConfig, exec: Execution) -> Result<(SystemParams, Vec<SweepRow>), Failure> {
    let p = resolve(cfg)?;
    let rows = sweep(&p, &powers(cfg), exec).map_err(Failure::physics)?;
    Ok((p, rows))
}

const SWEEP_COLUMNS: [&str; 7] = ["p_in_W", "s_in", "direction", "branch_index", "T", "stable", "isolation_db"];

fn sweep_table(rows: &[SweepRow], prefix: Option<(&str, Cell)>) -> Table {
    let mut cols: Vec<&str> = prefix.iter().map(|(c, _)| *c).collect();
    cols.extend(SWEEP_COLUMNS);
    let mut t = Table::new(&cols);
    for r in rows {
        for d in Direction::BOTH {
            for (k, b) in r.branches(d).iter().enumerate() {
                let mut row: Vec<Cell> = prefix.iter().map(|(_, v)| v.clone()).collect();
                row.extend([
                    r.p_in.into(),
                    r.s_in.into(),
                    d.as_str().into(),
                    k.into(),
                    b.t.into(),
                    b.verdict.as_str().into(),
                    r.isolation_db.into(),
                ]);
                t.push(row);
            }
        }
    }
    t
}

pub fn cmd_sweep(cfg: &RunConfig, exec: Execution) -> Result<Table, Failure> {
    let (_, rows) = run_sweep(cfg, exec)?;
    Ok(sweep_table(&rows, None))
}

/// Both inverse branches s_in(T) on a log grid of T up to λ/κ².
pub fn cmd_trace_branches(cfg: &RunConfig, points: usize) -> Result<Table, Failure> {
    let p = resolve(cfg)?;
    let mut t = Table::new(&["direction", "inverse_branch", "T", "s_in", "p_in_W"]);
    let e = effective_params(&p, Direction::Forward);
    let t_bound = e.lambda / (e.kappa * e.kappa);
    let grid = log_grid(t_bound * 1e-4, t_bound, points.max(2));
    for d in Direction::BOTH {
        for branch in [InverseBranch::Plus, InverseBranch::Minus] {
            for &tv in &grid {
                let s = s_in_of_t(&p, d, tv, branch).map_err(Failure::physics)?;
                if let Some(s) = s {
                    t.push(vec![
                        d.as_str().into(),
                        branch.as_str().into(),
                        tv.into(),
                        s.into(),
                        power_of_flux(s, p.omega_d).into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

pub fn cmd_stability(cfg: &RunConfig, power: f64) -> Result<Table, Failure> {
    let p = resolve(cfg)?;
    let s = photon_flux(power, p.omega_d).map_err(|e| Failure::Config(e.to_string()))?;
    let mut cols = vec!["p_in_W", "direction", "branch_index", "T", "verdict", "min_real_part_rad_s"];
    let eig_cols: Vec<String> = (1..=6)
        .flat_map(|k| [format!("eig{k}_re"), format!("eig{k}_im")])
        .collect();
    cols.extend(eig_cols.iter().map(String::as_str));
    let mut t = Table::new(&cols);
    for d in Direction::BOTH {
        for (k, b) in steady_states(&p, d, s).iter().enumerate() {
            let rep = classify(&p, b).map_err(Failure::physics)?;
            let mut row: Vec<Cell> = vec![
                power.into(),
                d.as_str().into(),
                k.into(),
                b.t.into(),
                rep.verdict.as_str().into(),
                rep.min_real_part.into(),
            ];
            for z in &rep.eigenvalues {
                row.push(z.re.into());
                row.push(z.im.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

pub fn cmd_noise(cfg: &RunConfig, exec: Execution) -> Result<Table, Failure> {
    let (p, rows) = run_sweep(cfg, exec)?;
    let region = working_region(&rows, &p).map_err(Failure::physics)?;
    let grid = log_grid(region.p_lower, region.p_upper, cfg.noise.samples);
    let settings = NoiseSettings {
        n_m: cfg.noise.n_m,
        delta_omega: hz_to_angular(cfg.noise.delta_omega_over_2pi_hz),
        n_points: cfg.noise.n_points,
    };
    let scan = nsr_scan(&p, &grid, &settings, exec).map_err(Failure::physics)?;
    let mut t = Table::new(&["p_in_W", "NSR", "NSR_tilde"]);
    for r in scan {
        t.push(vec![r.p_in.into(), r.nsr.into(), r.nsr_tilde.into()]);
    }
    Ok(t)
}

pub fn cmd_optimize(cfg: &RunConfig, format: Format) -> Result<Outcome, Failure> {
    let p = resolve(cfg)?;
    let theor = t_max_theor(&p);
    let bound = keff_amplification_bound(&p).ok();
    let est = isolation_opt(&p);
    let report = json!({
        "j_opt_over_2pi_Hz": angular_to_hz(j_opt(&p)),
        "t_max_opt": t_max_opt(&p),
        "t_max_theor_at_current_J": theor.as_ref().ok(),
        "keff_bound_over_2pi_Hz": bound.map(angular_to_hz),
        "e0_db": est.e0_db,
        "e0_db_simplified": est.simplified_db,
        "regime_flags": {
            "delta_positive": theor.is_ok(),
            "simplified_valid": est.simplified_valid,
            "amplification_possible": bound.is_some(),
        },
    });
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Csv => flatten_csv(&report),
    };
    Ok(Outcome {
        text,
        failure: theor.err().map(Failure::physics),
    })
}

fn flatten_csv(report: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Number(n) => out.push_str(&format!("{prefix},{}\n", fmt_num(n.as_f64().unwrap_or(f64::NAN)))),
            Value::Null => out.push_str(&format!("{prefix},\n")),
            other => out.push_str(&format!("{prefix},{other}\n")),
        }
    }
    let mut out = String::from("key,value\n");
    walk("", report, &mut out);
    out
}

/// Re-checks every (p_in_W, direction, T) row of a sweep table against the
/// transmission cubic of the configured parameters.
pub fn cmd_verify(cfg: &RunConfig, path: &str) -> Result<Outcome, Failure> {
    let p = resolve(cfg)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {path}: {e}")))?;
    let records = read_records(&text).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
    let field = |rec: &serde_json::Map<String, Value>, key: &str| -> Result<Option<String>, Failure> {
        match rec.get(key) {
            None => Err(Failure::Config(format!("{path}: table has no '{key}' column"))),
            Some(Value::Null) => Ok(None),
            Some(Value::String(s)) if s.is_empty() => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Ok(Some(v.to_string())),
        }
    };
    let num = |s: &str| -> Result<f64, Failure> {
        s.parse::<f64>().map_err(|_| Failure::Config(format!("{path}: '{s}' is not a number")))
    };
    let (mut checked, mut failed, mut worst) = (0usize, 0usize, 0.0f64);
    for rec in &records {
        let (Some(pw), Some(dir), Some(tv)) = (field(rec, "p_in_W")?, field(rec, "direction")?, field(rec, "T")?)
        else {
            continue;
        };
        let d = match dir.trim_matches('"') {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            other => return Err(Failure::Config(format!("{path}: unknown direction '{other}'"))),
        };
        let s = photon_flux(num(&pw)?, p.omega_d).map_err(|e| Failure::Config(e.to_string()))?;
        let res = transmission_cubic(&p, d, s).relative_residual(num(&tv)?);
        checked += 1;
        worst = worst.max(res);
        if !(res < VERIFY_TOL) {
            failed += 1;
        }
    }
    let mut t = Table::new(&["rows_checked", "rows_failed", "max_relative_residual", "tolerance"]);
    t.push(vec![checked.into(), failed.into(), worst.into(), VERIFY_TOL.into()]);
    let failure = (failed > 0).then(|| {
        Failure::Physics(format!("{failed} of {checked} rows miss the cubic by more than {VERIFY_TOL:e}"))
    });
    Ok(Outcome {
        text: t.render(cfg.output.format),
        failure,
    })
}

/// Per-set configuration of a multi-set preset: the preset base with the
/// given parameter set swapped in and the user's overrides applied on top.
fn set_config(preset: FigurePreset, spec: &unidir_core::ParamSpec, overrides: &[String]) -> Result<RunConfig, Failure> {
    let mut base = preset.config();
    base.params = ParamsConfig::from_spec(spec);
    base.with_overrides(overrides)
}

pub fn cmd_reproduce(
    preset: FigurePreset,
    cfg: &RunConfig,
    overrides: &[String],
    exec: Execution,
) -> Result<Table, Failure> {
    match preset {
        FigurePreset::Fig3 => {
            let mut t = Table::new(&["set", "T_max_num", "T_max_theor", "rel_err"]);
            for (name, spec) in core_presets::amplification_sets() {
                let c = set_config(preset, &spec, overrides)?;
                let (p, rows) = run_sweep(&c, exec)?;
                let (_, num) = numerical_t_max(&rows, &p).map_err(Failure::physics)?;
                let theor = t_max_theor(&p).map_err(Failure::physics)?;
                t.push(vec![name.into(), num.into(), theor.into(), (num / theor - 1.0).abs().into()]);
            }
            Ok(t)
        }
        FigurePreset::Fig4 => {
            let mut out: Option<Table> = None;
            for (d1, d2) in core_presets::FIG4_DETUNINGS_HZ {
                let c = set_config(preset, &core_presets::fig4_params(d1, d2), overrides)?;
                let (_, rows) = run_sweep(&c, exec)?;
                let case = format!("d1_{}MHz_d2_{}MHz", d1 / 1e6, d2 / 1e6);
                let t = sweep_table(&rows, Some(("case", case.into())));
                match out.as_mut() {
                    Some(o) => o.extend(t),
                    None => out = Some(t),
                }
            }
            Ok(out.expect("four detuning pairs"))
        }
        FigurePreset::FigNsr => cmd_noise(cfg, exec),
        _ => cmd_sweep(cfg, exec),
    }
}
