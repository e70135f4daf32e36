use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// ⟨r⟩ for uncorrelated (Poisson) levels, 2 ln 2 − 1.
pub const POISSON_MEAN_RATIO: f64 = 0.386_294_361_119_890_6;

/// ⟨r⟩ for large GOE matrices.
pub const GOE_MEAN_RATIO: f64 = 0.5307;

/// Spacings below this fraction of the spectral span count as degenerate.
pub const DEGENERATE_SPACING: f64 = 1e-14;

pub const MIN_LEVELS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub spacings: Vec<f64>,
    /// min(s_i, s_{i+1}) / max(s_i, s_{i+1}) over consecutive pairs of
    /// non-degenerate spacings.
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    pub degenerate_spacings: usize,
}

/// Level statistics of a spectrum (any order; sorted internally).
pub fn spacing_statistics(energies: &[f64]) -> Result<SpectralReport> {
    if energies.len() < MIN_LEVELS {
        return Err(Error::invalid(
            "energies",
            format!("need at least {MIN_LEVELS} levels, got {}", energies.len()),
        ));
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::invalid("energies", "contain non-finite values"));
    }
    let mut eigenvalues = energies.to_vec();
    eigenvalues.sort_by(f64::total_cmp);
    let span = eigenvalues[eigenvalues.len() - 1] - eigenvalues[0];
    let floor = DEGENERATE_SPACING * span;
    let spacings: Vec<f64> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    let degenerate_spacings = spacings.iter().filter(|&&s| s <= floor).count();
    let ratios: Vec<f64> = spacings
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| w[0].min(w[1]) / w[0].max(w[1]))
        .collect();
    if ratios.is_empty() {
        return Err(Error::invalid("energies", "no pair of non-degenerate spacings"));
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(SpectralReport {
        eigenvalues,
        spacings,
        ratios,
        mean_ratio,
        degenerate_spacings,
    })
}

impl SpectralReport {
    /// CSV `index,r`.
    pub fn write_ratios_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "r"])?;
        for (i, r) in self.ratios.iter().enumerate() {
            w.write_record([i.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Histogram of spacings in units of the mean spacing, over [0, `max`):
    /// CSV `bin_low,bin_high,count,density`, density normalized to unit area.
    pub fn write_spacing_histogram_csv<W: Write>(&self, out: W, bins: usize, max: f64) -> Result<()> {
        if bins == 0 || !(max > 0.0 && max.is_finite()) {
            return Err(Error::invalid("histogram", "needs at least one bin and a positive range"));
        }
        let mean = self.spacings.iter().sum::<f64>() / self.spacings.len() as f64;
        let width = max / bins as f64;
        let mut counts = vec![0usize; bins];
        for s in &self.spacings {
            let x = s / mean;
            if x < max {
                counts[((x / width) as usize).min(bins - 1)] += 1;
            }
        }
        let total = self.spacings.len() as f64;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_low", "bin_high", "count", "density"])?;
        for (b, &count) in counts.iter().enumerate() {
            w.write_record([
                (b as f64 * width).to_string(),
                ((b + 1) as f64 * width).to_string(),
                count.to_string(),
                (count as f64 / (total * width)).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn picket_fence_has_unit_ratios() {
        let e: Vec<f64> = (0..20).map(|k| 0.5 + 1.25 * k as f64).collect();
        let r = spacing_statistics(&e).unwrap();
        assert!(r.ratios.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!((r.mean_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_levels_are_poissonian() {
        // Monte-Carlo oracle: i.i.d. uniform levels, 20 000 ratios
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let e: Vec<f64> = (0..20_002).map(|_| rng.random::<f64>()).collect();
        let r = spacing_statistics(&e).unwrap();
        assert!((r.mean_ratio - POISSON_MEAN_RATIO).abs() < 0.02, "{}", r.mean_ratio);
    }

    #[test]
    fn degenerate_levels_are_counted_and_skipped() {
        let mut e: Vec<f64> = (0..12).map(|k| k as f64).collect();
        e.push(5.0);
        let r = spacing_statistics(&e).unwrap();
        assert_eq!(r.degenerate_spacings, 1);
        // ratios touching the zero spacing are dropped
        assert_eq!(r.ratios.len(), r.spacings.len() - 1 - 2);
        assert!(r.ratios.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn too_few_levels() {
        assert!(spacing_statistics(&[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn histogram_layout() {
        let e: Vec<f64> = (0..11).map(|k| k as f64).collect();
        let r = spacing_statistics(&e).unwrap();
        let mut buf = Vec::new();
        r.write_spacing_histogram_csv(&mut buf, 2, 2.0).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "bin_low,bin_high,count,density\n0,1,0,0\n1,2,10,1\n"
        );
    }

    proptest! {
        #[test]
        fn ratio_is_affine_invariant(
            levels in prop::collection::vec(-10.0f64..10.0, 12..40),
            a in 0.01f64..100.0,
            b in -50.0f64..50.0,
        ) {
            let base = spacing_statistics(&levels);
            prop_assume!(base.is_ok());
            let base = base.unwrap();
            prop_assume!(base.degenerate_spacings == 0);
            // keep clear of the degeneracy cutoff so both spectra skip the same ratios
            prop_assume!(base.spacings.iter().all(|&s| s > 1e-9));
            let mapped: Vec<f64> = levels.iter().map(|e| a * e + b).collect();
            let m = spacing_statistics(&mapped).unwrap();
            prop_assert!((m.mean_ratio - base.mean_ratio).abs() < 1e-9);
            prop_assert!(m.ratios.iter().all(|r| (0.0..=1.0).contains(r)));
        }
    }
}
