//! Human-readable rendering of command results.

use std::fmt::Write;

use serde_json::Value;
use spinbasis::api::ApiEnvelope;

/// Text for a successful envelope, or the error line for a failed one.
pub fn render(command: &str, env: &ApiEnvelope) -> String {
    if let Some(e) = &env.error {
        return match e.position {
            Some(p) => format!("error [{}] at {}: {}\n", e.code, p, e.message),
            None => format!("error [{}]: {}\n", e.code, e.message),
        };
    }
    let r = env.result.as_ref().expect("successful envelopes carry a result");
    let mut out = String::new();
    match command {
        "deduce" => deduce(&mut out, r),
        "chain" => chain(&mut out, r),
        "probabilities" => {
            let _ = writeln!(out, "state  {}", r["state"]["text"].as_str().unwrap_or_default());
            let _ = writeln!(out, "p_up   {}", num(&r["p_up"]));
            let _ = writeln!(out, "p_down {}", num(&r["p_down"]));
        }
        "measure" => {
            let _ = writeln!(
                out,
                "port {} (value {}, probability {})",
                str(&r["port"]),
                num(&r["value"]),
                num(&r["probability"])
            );
            let _ = writeln!(out, "post-measurement state {}", str(&r["post_state"]["text"]));
        }
        "bloch" => {
            let _ = writeln!(out, "{} -> {}", str(&r["state"]["text"]), vector(&r["bloch"]));
        }
        "basis" => {
            for s in r["states"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "{:<3} {:<48} {}",
                    str(&s["token"]),
                    str(&s["text"]),
                    vector(&s["bloch"])
                );
            }
        }
        "commutator" => commutator(&mut out, r),
        "version" => {
            let _ = writeln!(out, "{} {}", str(&r["name"]), str(&r["version"]));
        }
        _ => out = serde_json::to_string_pretty(r).expect("values serialize") + "\n",
    }
    out
}

fn str(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(v: &Value) -> String {
    v.as_f64().map(|x| format!("{x:.12}")).unwrap_or_else(|| str(v))
}

fn vector(v: &Value) -> String {
    let parts: Vec<String> = v
        .as_array()
        .into_iter()
        .flatten()
        .map(|x| format!("{:+.6}", x.as_f64().unwrap_or(f64::NAN)))
        .collect();
    format!("({})", parts.join(", "))
}

fn amplitude(v: &Value) -> String {
    let (re, im) = (
        v["re"].as_f64().unwrap_or(f64::NAN),
        v["im"].as_f64().unwrap_or(f64::NAN),
    );
    format!("{re:+.6}{im:+.6}i")
}

fn state(v: &Value) -> String {
    format!("({}, {})", amplitude(&v["a"]), amplitude(&v["b"]))
}

fn deduce(out: &mut String, r: &Value) {
    for (i, step) in r["steps"].as_array().into_iter().flatten().enumerate() {
        let _ = writeln!(out, "{}. {} [{}]", i + 1, str(&step["name"]), str(&step["section"]));
        let _ = writeln!(out, "   constraint: {}", str(&step["constraint"]));
    }
    let _ = writeln!(out, "final states:");
    for key in ["x_up", "x_down", "y_up", "y_down"] {
        let _ = writeln!(out, "  {key:<7} {}", state(&r["final_states"][key]));
    }
    let _ = writeln!(out, "chirality: {}", str(&r["chirality"]));
    let mut failed = 0;
    for c in r["verification"].as_array().into_iter().flatten() {
        if c["passed"] != Value::Bool(true) {
            failed += 1;
            let _ = writeln!(out, "  FAILED {} (residual {})", str(&c["check"]), str(&c["residual"]));
        }
    }
    let total = r["verification"].as_array().map_or(0, Vec::len);
    let _ = writeln!(out, "verification: {}/{} checks passed", total - failed, total);
}

fn chain(out: &mut String, r: &Value) {
    let _ = writeln!(
        out,
        "{:<6} {:<16} {:<5} {:>10} {:>10} {:>12} {:>12}",
        "stage", "axis", "port", "up", "down", "p_up", "p_down"
    );
    for (i, s) in r["per_stage"].as_array().into_iter().flatten().enumerate() {
        let _ = writeln!(
            out,
            "{:<6} {:<16} {:<5} {:>10} {:>10} {:>12.10} {:>12.10}",
            i + 1,
            str(&s["axis"]),
            str(&s["port"]),
            str(&s["up_count"]),
            str(&s["down_count"]),
            s["p_up_exact"].as_f64().unwrap_or(f64::NAN),
            s["p_down_exact"].as_f64().unwrap_or(f64::NAN),
        );
    }
    let _ = writeln!(out, "shots {} seed {}", str(&r["shots"]), str(&r["seed_used"]));
    let _ = writeln!(out, "final probability (exact) {}", num(&r["final_probability_exact"]));
    let _ = writeln!(out, "final frequency           {}", num(&r["final_frequency"]));
}

fn commutator(out: &mut String, r: &Value) {
    if r.get("a").is_some() {
        let _ = writeln!(out, "[{}, {}] = {}", str(&r["a"]), str(&r["b"]), str(&r["commutator"]));
        return;
    }
    let _ = writeln!(
        out,
        "{} ({} algebra, {}-handed)",
        str(&r["relation"]),
        str(&r["algebra"]),
        str(&r["handedness"])
    );
    let _ = writeln!(out, "sign {}", str(&r["sign"]));
    if r["algebra"] == "orbital" {
        let _ = writeln!(out, "[Lx,Ly] = {}", str(&r["commutator"]));
    }
    let _ = writeln!(out, "residual {}", str(&r["residual"]));
}
