//! Information spectra.
//!
//! The spectrum of a process is the limiting distribution function of its
//! normalized self-information `(1/n) log2 1/P(X^n)`. For a finite mixture of
//! ergodic components it is the staircase `F(tau) = w({theta : H_theta <= tau})`
//! ([`StaircaseSpectrum`]). At finite `(n, gamma)` the estimator reports
//! `Pr(rate <= tau + gamma)` ([`SpectrumEstimate`]), which is a bona fide
//! right-continuous cdf in `tau`.

mod dominance;
mod estimate;
mod io;
mod staircase;
mod validate;

pub use dominance::{default_slack, dkw_radius, dominance_check, DominanceReport, Verdict, DKW_ALPHA};
pub use estimate::{
    default_grid, empirical_spectrum, exact_tail_check, linear_grid, EstimateConfig, SpectrumEstimate, TailReport,
    DEFAULT_GRID_POINTS,
};
pub use io::{dominance_to_json, parse_spectrum, spectrum_to_csv, spectrum_to_json};
pub use staircase::{
    entropy_integral, mixture_spectrum, mixture_spectrum_opts, mixture_spectrum_with_rates, StaircaseSpectrum,
    MERGE_TOL,
};
pub use validate::{validate_theorem1, Theorem1Config, Theorem1Report};

use crate::error::Result;

/// Spectral inf- and sup-entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub inf_entropy: f64,
    pub sup_entropy: f64,
}

/// Either kind of spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Staircase(StaircaseSpectrum),
    Estimate(SpectrumEstimate),
}

impl Spectrum {
    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            Spectrum::Staircase(s) => s.eval(tau),
            Spectrum::Estimate(e) => e.eval(tau),
        }
    }
}

impl From<StaircaseSpectrum> for Spectrum {
    fn from(s: StaircaseSpectrum) -> Self {
        Spectrum::Staircase(s)
    }
}

impl From<SpectrumEstimate> for Spectrum {
    fn from(e: SpectrumEstimate) -> Self {
        Spectrum::Estimate(e)
    }
}

/// Staircases: extreme jump locations (`epsilon` unused). Estimates: the
/// generalized `epsilon` and `1 - epsilon` quantiles on the grid.
pub fn spectral_bounds(spectrum: &Spectrum, epsilon: f64) -> Result<SpectralBounds> {
    match spectrum {
        Spectrum::Staircase(s) => Ok(s.bounds()),
        Spectrum::Estimate(e) => e.bounds(epsilon),
    }
}
