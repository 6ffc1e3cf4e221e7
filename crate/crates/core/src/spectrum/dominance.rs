use crate::error::{Error, Result};

use super::{Spectrum, SpectrumEstimate, MERGE_TOL};

/// Grids closer than this are the same grid; covers the nine-digit rounding
/// of grids read back from files.
const GRID_TOL: f64 = 1e-8;

const GAP_TOL: f64 = 1e-12;

/// Confidence level of the default slack.
pub const DKW_ALPHA: f64 = 0.05;

/// DKW radius `sqrt(ln(2/alpha) / (2m))` of an empirical cdf from `m`
/// samples.
pub fn dkw_radius(samples: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * samples as f64)).sqrt()
}

/// Sum of the 95% DKW radii of the estimated sides; 0 for two staircases.
pub fn default_slack(upper: &Spectrum, lower: &Spectrum) -> f64 {
    [upper, lower]
        .iter()
        .filter_map(|s| match s {
            Spectrum::Estimate(e) => Some(dkw_radius(e.num_samples, DKW_ALPHA)),
            Spectrum::Staircase(_) => None,
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Dominates,
    /// `F_lower(tau_star) - F_upper(tau_star) = gap > slack`.
    Violated { tau_star: f64, gap: f64 },
}

/// Outcome of [`dominance_check`]. `worst_tau` and `worst_gap` locate the
/// largest `F_lower - F_upper` over the compared points either way.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub verdict: Verdict,
    pub worst_tau: f64,
    pub worst_gap: f64,
    pub slack: f64,
    pub points: usize,
}

impl DominanceReport {
    pub fn dominates(&self) -> bool {
        self.verdict == Verdict::Dominates
    }
}

/// Checks `F_lower(tau) <= F_upper(tau) + slack` at every jump or grid
/// point. `upper` is the candidate image `Y`, `lower` the source `X`.
pub fn dominance_check(upper: &Spectrum, lower: &Spectrum, slack: f64) -> Result<DominanceReport> {
    if !(slack >= 0.0) {
        return Err(Error::OutOfRange("slack must be nonnegative".into()));
    }
    let points = comparison_points(upper, lower)?;
    // two staircases are read just right of each jump so that jumps closer
    // than the merge tolerance count as coincident
    let shift = match (upper, lower) {
        (Spectrum::Staircase(_), Spectrum::Staircase(_)) => MERGE_TOL,
        _ => 0.0,
    };
    let mut worst_tau = points[0];
    let mut worst_gap = f64::NEG_INFINITY;
    for (i, &tau) in points.iter().enumerate() {
        let gap = value_at(lower, i, tau + shift) - value_at(upper, i, tau + shift);
        if gap > worst_gap {
            worst_gap = gap;
            worst_tau = tau;
        }
    }
    let verdict = if worst_gap > slack + GAP_TOL {
        Verdict::Violated {
            tau_star: worst_tau,
            gap: worst_gap,
        }
    } else {
        Verdict::Dominates
    };
    Ok(DominanceReport {
        verdict,
        worst_tau,
        worst_gap,
        slack,
        points: points.len(),
    })
}

// Estimates are read at their own grid index so that no interpolation is
// involved when both sides share a grid.
fn value_at(s: &Spectrum, index: usize, tau: f64) -> f64 {
    match s {
        Spectrum::Staircase(st) => st.eval(tau),
        Spectrum::Estimate(e) => e.cdf[index],
    }
}

fn comparison_points(upper: &Spectrum, lower: &Spectrum) -> Result<Vec<f64>> {
    match (upper, lower) {
        (Spectrum::Staircase(a), Spectrum::Staircase(b)) => {
            let mut pts: Vec<f64> = a.locations().into_iter().chain(b.locations()).collect();
            pts.sort_by(|x, y| x.total_cmp(y));
            pts.dedup();
            Ok(pts)
        }
        (Spectrum::Estimate(a), Spectrum::Estimate(b)) => {
            same_grid(a, b)?;
            Ok(a.tau_grid.clone())
        }
        (Spectrum::Estimate(e), Spectrum::Staircase(_)) | (Spectrum::Staircase(_), Spectrum::Estimate(e)) => {
            Ok(e.tau_grid.clone())
        }
    }
}

fn same_grid(a: &SpectrumEstimate, b: &SpectrumEstimate) -> Result<()> {
    if a.tau_grid.len() != b.tau_grid.len() {
        return Err(Error::IncomparableGrids(format!(
            "grids have {} and {} points",
            a.tau_grid.len(),
            b.tau_grid.len()
        )));
    }
    if let Some((x, y)) = a
        .tau_grid
        .iter()
        .zip(&b.tau_grid)
        .find(|(x, y)| (*x - *y).abs() > GRID_TOL * x.abs().max(1.0))
    {
        return Err(Error::IncomparableGrids(format!("grid points {x} and {y} differ")));
    }
    Ok(())
}
