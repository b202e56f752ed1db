use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use super::config::RunConfig;
use crate::kzm::ImpulseWindow;
use crate::protocol::{ControlMode, CostReport, RunResult, SimulationTrace};

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Locale-independent text for a rounded value; non-finite values are
/// written as `nan`/`inf`/`-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let s = format!("{r:?}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn window_json(w: &ImpulseWindow) -> Value {
    json!({ "t_minus": num(w.t_minus), "t_plus": num(w.t_plus) })
}

fn eta_of(mode: ControlMode) -> Option<f64> {
    match mode {
        ControlMode::Window { eta } => Some(eta),
        _ => None,
    }
}

fn config_fields(cfg: &RunConfig, out: &mut Map<String, Value>) {
    out.insert("model".into(), json!(cfg.model.name()));
    out.insert("mode".into(), json!(cfg.mode.name()));
    out.insert("tauq".into(), num(cfg.tau_q));
    out.insert("g0".into(), num(cfg.g0));
    match cfg.model {
        super::config::ModelKind::Lz => {
            out.insert("delta".into(), num(cfg.delta));
        }
        super::config::ModelKind::TfimMomentum => {
            out.insert("omega".into(), num(cfg.omega));
            out.insert("n".into(), json!(cfg.n));
        }
        super::config::ModelKind::TfimSpin => {
            out.insert("omega".into(), num(cfg.omega));
            out.insert("n".into(), json!(cfg.n));
            out.insert("trunc".into(), json!(cfg.trunc));
        }
    }
    if let Some(eta) = eta_of(cfg.mode) {
        out.insert("eta".into(), num(eta));
    }
}

pub fn costs_json(c: &CostReport, out: &mut Map<String, Value>) {
    out.insert("C".into(), num(c.cost));
    out.insert("deltaE".into(), num(c.delta_e));
    out.insert("ratio".into(), num(c.ratio));
    out.insert("lower_bound".into(), opt_num(c.lower_bound));
    let analytic = c.analytic.map_or(Value::Null, |a| {
        json!({
            "C": num(a.cost),
            "deltaE": num(a.delta_e),
            "ratio": num(a.ratio),
            "thermodynamic_deltaE": opt_num(a.thermodynamic_delta_e),
            "thermodynamic_ratio": opt_num(a.thermodynamic_ratio),
        })
    });
    out.insert("analytic".into(), analytic);
}

pub fn summary_json(cfg: &RunConfig, r: &RunResult) -> Value {
    let mut m = Map::new();
    config_fields(cfg, &mut m);
    m.insert("steps".into(), json!(r.steps));
    m.insert("samples".into(), json!(r.trace.len()));
    let f = r.trace.final_fidelity();
    m.insert("final_fidelity".into(), num(f));
    m.insert("infidelity".into(), num(1.0 - f));
    m.insert("min_fidelity".into(), num(r.trace.min_fidelity()));
    m.insert("max_norm_drift".into(), num(r.trace.max_norm_drift()));
    costs_json(&r.costs, &mut m);
    m.insert("window".into(), window_json(&r.window));
    Value::Object(m)
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn trace_csv(trace: &SimulationTrace) -> String {
    let mut s = String::from("t,fidelity,switching,norm_drift\n");
    for i in 0..trace.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_num(trace.times[i]),
            fmt_num(trace.fidelity[i]),
            fmt_num(trace.switching[i]),
            fmt_num(trace.norm_drift[i])
        );
    }
    s
}

pub const SWEEP_HEADER: &str = "model,mode,tauq,eta,n,trunc,final_fidelity,C,deltaE,ratio";

pub fn sweep_row(cfg: &RunConfig, final_fidelity: f64, c: &CostReport) -> String {
    let eta = eta_of(cfg.mode).map(fmt_num).unwrap_or_default();
    let (n, trunc) = match cfg.model {
        super::config::ModelKind::Lz => (String::new(), String::new()),
        super::config::ModelKind::TfimMomentum => (cfg.n.to_string(), String::new()),
        super::config::ModelKind::TfimSpin => (cfg.n.to_string(), cfg.trunc.to_string()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        cfg.model.name(),
        cfg.mode.name(),
        fmt_num(cfg.tau_q),
        eta,
        n,
        trunc,
        fmt_num(final_fidelity),
        fmt_num(c.cost),
        fmt_num(c.delta_e),
        fmt_num(c.ratio)
    )
}
