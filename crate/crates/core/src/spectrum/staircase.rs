use crate::error::{Error, Result};
use crate::process::{EntropyRateOptions, ProcessModel};

use super::SpectralBounds;

/// Rates closer than this are one jump.
pub const MERGE_TOL: f64 = 1e-9;

const MASS_TOL: f64 = 1e-12;

/// Exact spectrum of a finite mixture, `F(tau) = w({theta : H_theta <= tau})`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseSpectrum {
    jumps: Vec<(f64, f64)>,
}

impl StaircaseSpectrum {
    /// Validated staircase from sorted `(location, mass)` pairs.
    pub fn from_jumps(jumps: Vec<(f64, f64)>) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        for w in jumps.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Parse("jump locations must be strictly increasing".into()));
            }
        }
        if jumps.iter().any(|&(t, m)| !t.is_finite() || t < 0.0 || !(m > 0.0 && m <= 1.0 + MASS_TOL)) {
            return Err(Error::Parse("jumps need finite nonnegative locations and masses in (0, 1]".into()));
        }
        let total: f64 = jumps.iter().map(|j| j.1).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Parse(format!("jump masses sum to {total}, not 1")));
        }
        Ok(StaircaseSpectrum { jumps })
    }

    /// Staircase of weighted atoms `(rate, weight)`: zero weights are
    /// dropped and rates within [`MERGE_TOL`] of their neighbour merge into
    /// one jump at the mass-weighted mean location.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.iter().copied().filter(|a| a.1 > 0.0).collect();
        if atoms.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut jumps: Vec<(f64, f64)> = Vec::new();
        let mut cluster: Vec<(f64, f64)> = Vec::new();
        let flush = |cluster: &mut Vec<(f64, f64)>, jumps: &mut Vec<(f64, f64)>| {
            let mass: f64 = cluster.iter().map(|a| a.1).sum();
            let loc = cluster.iter().map(|a| a.0 * a.1).sum::<f64>() / mass;
            jumps.push((loc, mass));
            cluster.clear();
        };
        for atom in atoms {
            if let Some(last) = cluster.last() {
                if atom.0 - last.0 > MERGE_TOL {
                    flush(&mut cluster, &mut jumps);
                }
            }
            cluster.push(atom);
        }
        flush(&mut cluster, &mut jumps);
        Self::from_jumps(jumps)
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn locations(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.0).collect()
    }

    /// `F(tau)`, right-continuous.
    pub fn eval(&self, tau: f64) -> f64 {
        let idx = self.jumps.partition_point(|j| j.0 <= tau);
        if idx == self.jumps.len() {
            return 1.0;
        }
        self.jumps[..idx].iter().map(|j| j.1).sum::<f64>().min(1.0)
    }

    /// Same number of jumps with locations and masses within `tol`.
    pub fn approx_eq(&self, other: &StaircaseSpectrum, tol: f64) -> bool {
        self.jumps.len() == other.jumps.len()
            && self
                .jumps
                .iter()
                .zip(&other.jumps)
                .all(|(a, b)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol)
    }

    /// `integral_0^inf (1 - F(tau)) dtau`, summed over the constant pieces.
    pub fn entropy_integral(&self) -> f64 {
        let mut area = 0.0;
        let mut left = 0.0;
        let mut cdf = 0.0;
        for &(tau, mass) in &self.jumps {
            area += (1.0 - cdf) * (tau - left);
            left = tau;
            cdf += mass;
        }
        area
    }

    /// Smallest and largest jump location.
    pub fn bounds(&self) -> SpectralBounds {
        SpectralBounds {
            inf_entropy: self.jumps[0].0,
            sup_entropy: self.jumps[self.jumps.len() - 1].0,
        }
    }
}

/// Staircase of a mixture from its component entropy rates. An ergodic model
/// gives a single jump. Factor components need a bracket of width at most
/// [`MERGE_TOL`]; otherwise use [`mixture_spectrum_with_rates`].
pub fn mixture_spectrum(model: &ProcessModel) -> Result<StaircaseSpectrum> {
    mixture_spectrum_opts(model, EntropyRateOptions::default())
}

pub fn mixture_spectrum_opts(model: &ProcessModel, options: EntropyRateOptions) -> Result<StaircaseSpectrum> {
    let mut atoms = Vec::new();
    for (index, (weight, component)) in model.components().into_iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let rate = component
            .entropy_rate(options)
            .map_err(|e| Error::EntropyRateUnavailable { index, reason: e.to_string() })?;
        let value = rate.value_within(MERGE_TOL).ok_or_else(|| Error::EntropyRateUnavailable {
            index,
            reason: format!(
                "bracket [{}, {}] at order {} is wider than {MERGE_TOL}; supply a certified rate",
                rate.lower(),
                rate.upper(),
                options.bracket_order
            ),
        })?;
        atoms.push((value, weight));
    }
    StaircaseSpectrum::from_atoms(&atoms)
}

/// Staircase from caller-certified component rates, one per component.
pub fn mixture_spectrum_with_rates(model: &ProcessModel, rates: &[f64]) -> Result<StaircaseSpectrum> {
    let components = model.components();
    if rates.len() != components.len() {
        return Err(Error::OutOfRange(format!(
            "{} rates for {} components",
            rates.len(),
            components.len()
        )));
    }
    let atoms: Vec<(f64, f64)> = components.iter().zip(rates).map(|(c, &r)| (r, c.0)).collect();
    StaircaseSpectrum::from_atoms(&atoms)
}

/// `integral_0^inf (1 - F(tau)) dtau` of a staircase.
pub fn entropy_integral(spectrum: &StaircaseSpectrum) -> f64 {
    spectrum.entropy_integral()
}
