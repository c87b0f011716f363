//! Seeded random parameter sets for the invariant suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fock::FockSpace;
use crate::linalg::C64;
use crate::model::{Mode, ModelParams};

/// Ranges the sampled parameters are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRanges {
    pub alpha: (f64, f64),
    pub omega: (f64, f64),
    /// Upper bound on `|g_k|`; the phase is uniform.
    pub max_coupling: f64,
    pub beta: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            alpha: (0.0, 2.0),
            omega: (0.5, 2.0),
            max_coupling: 1.0,
            beta: 0.0,
        }
    }
}

/// Deterministic stream of parameter sets for a given seed.
#[derive(Debug, Clone)]
pub struct ParamSampler {
    rng: ChaCha8Rng,
    ranges: SampleRanges,
}

impl ParamSampler {
    pub fn new(seed: u64, ranges: SampleRanges) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ranges,
        }
    }

    pub fn sample(&mut self, cutoffs: &[usize]) -> Result<ModelParams> {
        let r = &self.ranges;
        let alpha = self.rng.gen_range(r.alpha.0..=r.alpha.1);
        let modes = cutoffs
            .iter()
            .map(|_| {
                let omega = self.rng.gen_range(r.omega.0..=r.omega.1);
                let magnitude = self.rng.gen_range(0.0..=r.max_coupling);
                let phase = self.rng.gen_range(0.0..std::f64::consts::TAU);
                Mode::new(omega, C64::from_polar(magnitude, phase))
            })
            .collect();
        ModelParams::new(alpha, r.beta, modes, FockSpace::new(cutoffs.to_vec())?)
    }

    /// `n_single` single-mode sets with cutoff `d_single`, then `n_double`
    /// two-mode sets with cutoffs `d_double`.
    pub fn mixed_sets(
        &mut self,
        n_single: usize,
        d_single: usize,
        n_double: usize,
        d_double: (usize, usize),
    ) -> Result<Vec<ModelParams>> {
        let mut out = Vec::with_capacity(n_single + n_double);
        for _ in 0..n_single {
            out.push(self.sample(&[d_single])?);
        }
        for _ in 0..n_double {
            out.push(self.sample(&[d_double.0, d_double.1])?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sets() {
        let a = ParamSampler::new(7, SampleRanges::default()).mixed_sets(3, 6, 2, (3, 3)).unwrap();
        let b = ParamSampler::new(7, SampleRanges::default()).mixed_sets(3, 6, 2, (3, 3)).unwrap();
        assert_eq!(a, b);
        let c = ParamSampler::new(8, SampleRanges::default()).mixed_sets(3, 6, 2, (3, 3)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn samples_respect_ranges() {
        let mut s = ParamSampler::new(1, SampleRanges::default());
        for p in s.mixed_sets(20, 4, 20, (2, 2)).unwrap() {
            assert!((0.0..=2.0).contains(&p.alpha()));
            assert_eq!(p.beta(), 0.0);
            for m in p.modes() {
                assert!((0.5..=2.0).contains(&m.omega));
                assert!(m.coupling.norm() <= 1.0 + 1e-15);
            }
        }
    }
}
