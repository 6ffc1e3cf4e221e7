use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numfmt::{cell, num};

use super::{DominanceReport, Spectrum, SpectrumEstimate, StaircaseSpectrum, Verdict};

/// `tau,F` rows: one per jump (value after the jump) or one per grid point.
pub fn spectrum_to_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("tau,F\n");
    match spectrum {
        Spectrum::Staircase(s) => {
            for &(tau, _) in s.jumps() {
                out.push_str(&format!("{},{}\n", cell(tau), cell(s.eval(tau))));
            }
        }
        Spectrum::Estimate(e) => {
            for (&tau, &c) in e.tau_grid.iter().zip(&e.cdf) {
                out.push_str(&format!("{},{}\n", cell(tau), cell(c)));
            }
        }
    }
    out
}

pub fn spectrum_to_json(spectrum: &Spectrum) -> Value {
    match spectrum {
        Spectrum::Staircase(s) => {
            let b = s.bounds();
            json!({
                "kind": "staircase",
                "jumps": s.jumps().iter().map(|&(t, m)| json!([num(t), num(m)])).collect::<Vec<_>>(),
                "inf_entropy": num(b.inf_entropy),
                "sup_entropy": num(b.sup_entropy),
                "entropy_integral": num(s.entropy_integral()),
            })
        }
        Spectrum::Estimate(e) => json!({
            "kind": "estimate",
            "n": e.n,
            "gamma": num(e.gamma),
            "num_samples": e.num_samples,
            "seed": e.seed,
            "alphabet_size": e.alphabet_size,
            "tau": e.tau_grid.iter().map(|&t| num(t)).collect::<Vec<_>>(),
            "cdf": e.cdf.iter().map(|&c| num(c)).collect::<Vec<_>>(),
        }),
    }
}

/// Reads either JSON form back. Staircase masses that sum to 1 only up to
/// the nine-digit output rounding are renormalized.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let v: Value = serde_json::from_str(text)?;
    if let Some(jumps) = v.get("jumps") {
        let jumps = jumps
            .as_array()
            .ok_or_else(|| Error::Parse("jumps must be an array".into()))?
            .iter()
            .map(|j| match j.as_array().map(|a| a.as_slice()) {
                Some([t, m]) => Ok((number(t)?, number(m)?)),
                _ => Err(Error::Parse("each jump must be [tau, mass]".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = jumps.iter().map(|j| j.1).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::Parse(format!("jump masses sum to {total}, not 1")));
        }
        let jumps = jumps.into_iter().map(|(t, m)| (t, m / total)).collect();
        return Ok(Spectrum::Staircase(StaircaseSpectrum::from_jumps(jumps)?));
    }
    let field = |name: &str| v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name}")));
    let uint = |name: &str| -> Result<u64> {
        field(name)?
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("{name} must be a nonnegative integer")))
    };
    let list = |name: &str| -> Result<Vec<f64>> {
        field(name)?
            .as_array()
            .ok_or_else(|| Error::Parse(format!("{name} must be an array")))?
            .iter()
            .map(number)
            .collect()
    };
    let estimate = SpectrumEstimate::from_parts(
        uint("n")? as usize,
        number(field("gamma")?)?,
        uint("num_samples")? as usize,
        uint("seed")?,
        uint("alphabet_size")? as usize,
        list("tau")?,
        list("cdf")?,
    )?;
    Ok(Spectrum::Estimate(estimate))
}

fn number(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Parse(format!("expected a number, got {v}")))
}

/// `{verdict, tau_star, gap, slack, points}`; `tau_star` and `gap` give the
/// worst point whatever the verdict.
pub fn dominance_to_json(report: &DominanceReport) -> Value {
    let verdict = match report.verdict {
        Verdict::Dominates => "dominates",
        Verdict::Violated { .. } => "violated",
    };
    json!({
        "verdict": verdict,
        "tau_star": num(report.worst_tau),
        "gap": num(report.worst_gap),
        "slack": num(report.slack),
        "points": report.points,
    })
}
