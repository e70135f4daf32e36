use std::io::Write;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::selectivity::{band_selectivity_time, min_coupled_gap};
use super::statistics::spacing_statistics;
use crate::error::{Error, Result};
use crate::model::{
    sample_goe, transition_table, ChaoticModel, ControlOperator, ControlSpec, FrequencyGenerator, System, Transition,
    DEFAULT_COUPLING_THRESHOLD,
};
use crate::pulses::TransitionTarget;

/// Least-squares fit of ln y = ln(prefactor) + exponent · ln x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub standard_error: f64,
    /// Two-sided 95% confidence interval on the exponent.
    pub ci_low: f64,
    pub ci_high: f64,
    /// ln y − fitted ln y per point.
    pub residuals: Vec<f64>,
}

pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::invalid("curve", "a power-law fit with a confidence band needs three points"));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("curve", "power-law fit needs positive finite values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("curve", "abscissa values are all equal"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residuals: Vec<f64> = lx.iter().zip(&ly).map(|(a, b)| b - (intercept + exponent * a)).collect();
    let dof = m - 2.0;
    let standard_error = (residuals.iter().map(|r| r * r).sum::<f64>() / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::invalid("curve", e.to_string()))?
        .inverse_cdf(0.975);
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        standard_error,
        ci_low: exponent - t * standard_error,
        ci_high: exponent + t * standard_error,
        residuals,
    })
}

/// One ordinate per abscissa, aggregated over seeds by geometric mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCurve {
    pub abscissa_label: String,
    pub ordinate_label: String,
    pub abscissa: Vec<f64>,
    pub ordinate: Vec<f64>,
    pub seeds: Vec<Vec<u64>>,
    pub samples: Vec<Vec<f64>>,
    pub fit: PowerLawFit,
}

impl ScalingCurve {
    pub fn from_samples(
        abscissa_label: &str,
        ordinate_label: &str,
        abscissa: Vec<f64>,
        seeds: Vec<Vec<u64>>,
        samples: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if abscissa.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("abscissa", "must be strictly increasing"));
        }
        if samples.iter().any(|s| s.is_empty()) {
            return Err(Error::invalid("samples", "every point needs at least one seed"));
        }
        let ordinate: Vec<f64> = samples
            .iter()
            .map(|s| (s.iter().map(|v| v.ln()).sum::<f64>() / s.len() as f64).exp())
            .collect();
        let fit = fit_power_law(&abscissa, &ordinate)?;
        Ok(ScalingCurve {
            abscissa_label: abscissa_label.into(),
            ordinate_label: ordinate_label.into(),
            abscissa,
            ordinate,
            seeds,
            samples,
            fit,
        })
    }

    /// CSV `<abscissa>,log2_<abscissa>,<ordinate>,min,max,seeds,residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            self.abscissa_label.clone(),
            format!("log2_{}", self.abscissa_label),
            self.ordinate_label.clone(),
            "min".into(),
            "max".into(),
            "seeds".into(),
            "residual".into(),
        ])?;
        for (k, x) in self.abscissa.iter().enumerate() {
            let s = &self.samples[k];
            w.write_record([
                x.to_string(),
                x.log2().to_string(),
                self.ordinate[k].to_string(),
                s.iter().cloned().fold(f64::INFINITY, f64::min).to_string(),
                s.iter().cloned().fold(f64::NEG_INFINITY, f64::max).to_string(),
                s.len().to_string(),
                self.fit.residuals[k].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integrable model from `generator` with unit ladder control on every variable.
pub fn integrable_system(generator: &FrequencyGenerator, n: usize, d: usize, seed: u64) -> Result<System> {
    let model = generator.generate(n, d, seed)?;
    let control = ControlOperator::structured(&model, &ControlSpec::ladder(vec![1.0; n]))?;
    System::new(model, control)
}

/// Worst band selectivity time over all variables of one model.
pub fn worst_band_selectivity(system: &System, gamma_eff: f64, constant: f64) -> Result<f64> {
    (0..system.basis().variables())
        .map(|j| band_selectivity_time(system, TransitionTarget::Qubit(j), gamma_eff, constant))
        .try_fold(0.0f64, |acc, t| Ok(acc.max(t?)))
}

/// T_sel versus variable count for generated integrable qubit registers.
pub fn integrable_selectivity_curve(
    generator: &FrequencyGenerator,
    sizes: &[usize],
    seeds: &[u64],
    gamma_eff: f64,
    constant: f64,
) -> Result<ScalingCurve> {
    let samples = sizes
        .iter()
        .map(|&n| {
            seeds
                .par_iter()
                .map(|&seed| worst_band_selectivity(&integrable_system(generator, n, 2, seed)?, gamma_eff, constant))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ScalingCurve::from_samples(
        "n",
        "selectivity_time",
        sizes.iter().map(|&n| n as f64).collect(),
        vec![seeds.to_vec(); sizes.len()],
        samples,
    )
}

/// Eigenvalues of a GOE Hamiltonian and the lines of an independent GOE
/// control written in its eigenbasis; both matrices come from one seed.
pub fn chaotic_lines(dim: usize, seed: u64) -> Result<(Vec<f64>, Vec<Transition>)> {
    let model = ChaoticModel::new(dim, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if dim < 2 {
        return Err(Error::invalid("dim", "GOE needs at least two levels"));
    }
    let h = sample_goe(dim, model.sigma(), &mut rng);
    let hc = sample_goe(dim, model.sigma(), &mut rng);
    let eig = h.symmetric_eigen();
    let rotated: DMatrix<f64> = eig.eigenvectors.transpose() * hc * &eig.eigenvectors;
    let control = ControlOperator::from_real(&rotated.symmetric_part())?;
    let lines = transition_table(&eig.eigenvalues, &control, DEFAULT_COUPLING_THRESHOLD);
    Ok((eig.eigenvalues.as_slice().to_vec(), lines))
}

/// Minimal gap between distinct coupled lines versus GOE dimension.
pub fn goe_gap_curve(dims: &[usize], seeds: &[u64]) -> Result<ScalingCurve> {
    let samples = dims
        .iter()
        .map(|&dim| {
            seeds
                .par_iter()
                .map(|&seed| {
                    let (_, lines) = chaotic_lines(dim, seed)?;
                    min_coupled_gap(&lines).ok_or_else(|| Error::invalid("dim", "fewer than two distinct lines"))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ScalingCurve::from_samples(
        "dim",
        "min_gap",
        dims.iter().map(|&d| d as f64).collect(),
        vec![seeds.to_vec(); dims.len()],
        samples,
    )
}

/// Seed-averaged ⟨r⟩ of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEnsemble {
    pub mean: f64,
    pub standard_error: f64,
    pub per_seed: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl RatioEnsemble {
    fn from_values(seeds: &[u64], per_seed: Vec<f64>) -> Self {
        let m = per_seed.len() as f64;
        let mean = per_seed.iter().sum::<f64>() / m;
        let var = if per_seed.len() > 1 {
            per_seed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        RatioEnsemble {
            mean,
            standard_error: (var / m).sqrt(),
            per_seed,
            seeds: seeds.to_vec(),
        }
    }

    /// Two-sided one-sample t-test p-value against `expected`.
    pub fn p_value(&self, expected: f64) -> Result<f64> {
        let dof = self.per_seed.len() as f64 - 1.0;
        if dof < 1.0 || self.standard_error == 0.0 {
            return Err(Error::invalid("ensemble", "needs two or more distinct seeds"));
        }
        let t = (self.mean - expected) / self.standard_error;
        let dist = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::invalid("ensemble", e.to_string()))?;
        Ok(2.0 * (1.0 - dist.cdf(t.abs())))
    }
}

pub fn integrable_ratio_ensemble(
    generator: &FrequencyGenerator,
    n: usize,
    d: usize,
    seeds: &[u64],
) -> Result<RatioEnsemble> {
    if seeds.is_empty() {
        return Err(Error::invalid("seeds", "must not be empty"));
    }
    let values = seeds
        .par_iter()
        .map(|&seed| {
            let model = generator.generate(n, d, seed)?;
            let energies = crate::model::build_hamiltonian(&model);
            Ok(spacing_statistics(energies.as_slice())?.mean_ratio)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RatioEnsemble::from_values(seeds, values))
}

pub fn goe_ratio_ensemble(dim: usize, seeds: &[u64]) -> Result<RatioEnsemble> {
    if seeds.is_empty() {
        return Err(Error::invalid("seeds", "must not be empty"));
    }
    let values = seeds
        .par_iter()
        .map(|&seed| Ok(spacing_statistics(ChaoticModel::new(dim, seed).spectrum()?.as_slice())?.mean_ratio))
        .collect::<Result<Vec<f64>>>()?;
    Ok(RatioEnsemble::from_values(seeds, values))
}
