//! Dense statevector simulation of Grover iterations over arbitrary `n >= 1`.
//!
//! This module is the brute-force reference: it tracks all `n` complex
//! amplitudes and applies oracle and diffusion operators directly, with no
//! appeal to the invariant-plane reduction. The diffusion operator fixes the
//! uniform state and multiplies its orthogonal complement by a phase; for
//! power-of-two dimensions it equals the textbook construction
//! `H^l . (phase on every basis state except |0>) . H^l`, which
//! [`StateVector::apply_diffusion_hadamard`] implements as a cross-check.
//!
//! Dimensions are capped at 2^20; beyond that the dense representation stops
//! being a sensible tool.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::subspace::PhasePair;

/// Largest dimension the dense simulator accepts.
pub const MAX_DIMENSION: u64 = 1 << 20;

/// Sorted, deduplicated set of marked indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    indices: Vec<u64>,
}

impl MarkedSet {
    /// Builds a set from arbitrary indices, sorting and deduplicating.
    pub fn from_indices<I: IntoIterator<Item = u64>>(indices: I) -> Self {
        let mut indices: Vec<u64> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    /// The first `t` indices `{0, .., t-1}`.
    pub fn first(t: u64) -> Self {
        Self {
            indices: (0..t).collect(),
        }
    }

    /// Uniformly random `t`-element subset of `{0, .., n-1}`.
    ///
    /// Uses Floyd's sampling over whichever of the set or its complement is
    /// smaller, so the cost is `O(min(t, n - t) * log + n_marked)`.
    pub fn random_subset<R: Rng + ?Sized>(n: u64, t: u64, rng: &mut R) -> Result<Self> {
        if t > n {
            return Err(Error::InvalidInstance {
                total: n,
                marked: t,
            });
        }
        let sample_size = t.min(n - t);
        let mut picked = std::collections::BTreeSet::new();
        for j in (n - sample_size)..n {
            let r = rng.gen_range(0..=j);
            if !picked.insert(r) {
                picked.insert(j);
            }
        }
        let indices: Vec<u64> = if t <= n - t {
            picked.into_iter().collect()
        } else {
            let mut out = Vec::with_capacity(t as usize);
            let mut it = picked.into_iter().peekable();
            for x in 0..n {
                if it.peek() == Some(&x) {
                    it.next();
                } else {
                    out.push(x);
                }
            }
            out
        };
        Ok(Self { indices })
    }

    pub fn len(&self) -> u64 {
        self.indices.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: u64) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Number of marked indices `<= index`.
    pub fn rank(&self, index: u64) -> u64 {
        self.indices.partition_point(|&m| m <= index) as u64
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    fn check_range(&self, dim: u64) -> Result<()> {
        match self.indices.last() {
            Some(&max) if max >= dim => Err(Error::IndexOutOfRange { index: max, dim }),
            _ => Ok(()),
        }
    }
}

/// Dense complex state over `n` basis elements.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition `1/sqrt(n) * (1, .., 1)`.
    pub fn uniform(n: u64) -> Result<Self> {
        Self::check_dimension(n)?;
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(Self {
            amps: vec![amp; n as usize],
        })
    }

    /// Builds a state from explicit amplitudes; rejects empty, oversized, or
    /// non-normalized input.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        Self::check_dimension(amps.len() as u64)?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    fn check_dimension(n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptySearchSpace);
        }
        if n > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge {
                dim: n,
                max: MAX_DIMENSION,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> u64 {
        self.amps.len() as u64
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps[index as usize]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every marked amplitude by `e^{i*phase}`.
    pub fn apply_oracle_phase(&mut self, marked: &MarkedSet, phase: f64) -> Result<()> {
        marked.check_range(self.dim())?;
        let factor = Complex64::from_polar(1.0, phase);
        for &idx in marked.indices() {
            self.amps[idx as usize] *= factor;
        }
        Ok(())
    }

    /// Applies the diffusion operator that fixes the uniform state and
    /// multiplies its orthogonal complement by `e^{i*phase}`:
    /// `psi -> e^{i*phase} * psi + (1 - e^{i*phase}) * mean(psi)`.
    pub fn apply_diffusion(&mut self, phase: f64) {
        let factor = Complex64::from_polar(1.0, phase);
        let mean = self.amps.iter().sum::<Complex64>() / self.dim() as f64;
        let offset = (Complex64::new(1.0, 0.0) - factor) * mean;
        for amp in &mut self.amps {
            *amp = factor * *amp + offset;
        }
    }

    /// Same diffusion built the explicit way for `n = 2^l`: Hadamard on every
    /// qubit, `e^{i*phase}` on each basis state except `|0>`, Hadamard again.
    pub fn apply_diffusion_hadamard(&mut self, phase: f64) -> Result<()> {
        if !self.dim().is_power_of_two() {
            return Err(Error::NotPowerOfTwo { dim: self.dim() });
        }
        self.hadamard_all();
        let factor = Complex64::from_polar(1.0, phase);
        for amp in self.amps.iter_mut().skip(1) {
            *amp *= factor;
        }
        self.hadamard_all();
        Ok(())
    }

    fn hadamard_all(&mut self) {
        let n = self.amps.len();
        let norm = std::f64::consts::FRAC_1_SQRT_2;
        let mut stride = 1;
        while stride < n {
            let mut base = 0;
            while base < n {
                for i in base..base + stride {
                    let a = self.amps[i];
                    let b = self.amps[i + stride];
                    self.amps[i] = (a + b) * norm;
                    self.amps[i + stride] = (a - b) * norm;
                }
                base += 2 * stride;
            }
            stride *= 2;
        }
    }

    /// One generalized Grover iteration: oracle phase, then diffusion.
    pub fn grover_iteration(&mut self, marked: &MarkedSet, phases: PhasePair) -> Result<()> {
        self.apply_oracle_phase(marked, phases.oracle)?;
        self.apply_diffusion(phases.diffusion);
        Ok(())
    }

    /// Total probability mass on the marked indices.
    pub fn marked_mass(&self, marked: &MarkedSet) -> Result<f64> {
        marked.check_range(self.dim())?;
        Ok(marked
            .indices()
            .iter()
            .map(|&i| self.amps[i as usize].norm_sqr())
            .sum())
    }

    /// Coefficients of the state along the uniform-unmarked and uniform-marked
    /// directions: `(sum unmarked / sqrt(n-t), sum marked / sqrt(t))`.
    /// A direction that does not exist contributes a zero coefficient.
    pub fn project_subspace(&self, marked: &MarkedSet) -> Result<(Complex64, Complex64)> {
        marked.check_range(self.dim())?;
        let t = marked.len();
        let n = self.dim();
        let total: Complex64 = self.amps.iter().sum();
        let marked_sum: Complex64 = marked
            .indices()
            .iter()
            .map(|&i| self.amps[i as usize])
            .sum();
        let zero = Complex64::new(0.0, 0.0);
        let amp_marked = if t == 0 {
            zero
        } else {
            marked_sum / (t as f64).sqrt()
        };
        let amp_unmarked = if t == n {
            zero
        } else {
            (total - marked_sum) / ((n - t) as f64).sqrt()
        };
        Ok((amp_unmarked, amp_marked))
    }

    /// Samples a basis index from the measurement distribution `|amp|^2`.
    pub fn measure_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut target: f64 = rng.gen::<f64>();
        for (i, amp) in self.amps.iter().enumerate() {
            target -= amp.norm_sqr();
            if target < 0.0 {
                return i as u64;
            }
        }
        // Rounding can leave a sliver of unassigned mass; attribute it to the
        // last index.
        self.amps.len() as u64 - 1
    }
}

/// Probability of measuring a marked element after `iterations` standard
/// Grover iterations from the uniform state, by direct simulation.
pub fn grover_success_probability(n: u64, marked: &MarkedSet, iterations: u64) -> Result<f64> {
    let mut state = StateVector::uniform(n)?;
    for _ in 0..iterations {
        state.grover_iteration(marked, PhasePair::STANDARD)?;
    }
    state.marked_mass(marked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_complex_eq(a: Complex64, b: Complex64, eps: f64) {
        assert!(
            (a - b).norm() <= eps,
            "complex values differ: {a} vs {b} (eps {eps})"
        );
    }

    #[test]
    fn uniform_state_and_dimension_checks() {
        let state = StateVector::uniform(4).unwrap();
        for i in 0..4 {
            assert_complex_eq(state.amplitude(i), Complex64::new(0.5, 0.0), 1e-15);
        }
        assert_eq!(StateVector::uniform(0), Err(Error::EmptySearchSpace));
        assert!(matches!(
            StateVector::uniform(MAX_DIMENSION + 1),
            Err(Error::DimensionTooLarge { .. })
        ));
        assert!(StateVector::uniform(1).is_ok());
    }

    #[test]
    fn marked_set_sorts_and_dedups() {
        let set = MarkedSet::from_indices([5, 1, 5, 3]);
        assert_eq!(set.indices(), &[1, 3, 5]);
        assert_eq!(set.len(), 3);
        assert!(set.contains(3));
        assert!(!set.contains(2));
        assert_eq!(set.rank(3), 2);
        assert_eq!(set.rank(0), 0);
    }

    #[test]
    fn random_subset_is_valid_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, t) in [(10u64, 0u64), (10, 3), (10, 7), (10, 10), (1000, 999)] {
            let set = MarkedSet::random_subset(n, t, &mut rng).unwrap();
            assert_eq!(set.len(), t);
            assert!(set.indices().windows(2).all(|w| w[0] < w[1]));
            assert!(set.indices().iter().all(|&i| i < n));
        }
        let a = MarkedSet::random_subset(100, 37, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = MarkedSet::random_subset(100, 37, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert!(MarkedSet::random_subset(4, 5, &mut rng).is_err());
    }

    #[test]
    fn oracle_phase_marks_only_selected_indices() {
        let mut state = StateVector::uniform(4).unwrap();
        state
            .apply_oracle_phase(&MarkedSet::from_indices([3]), FRAC_PI_2)
            .unwrap();
        assert_complex_eq(state.amplitude(3), Complex64::new(0.0, 0.5), 1e-15);
        assert_complex_eq(state.amplitude(0), Complex64::new(0.5, 0.0), 1e-15);

        let err = state.apply_oracle_phase(&MarkedSet::from_indices([4]), PI);
        assert_eq!(err, Err(Error::IndexOutOfRange { index: 4, dim: 4 }));
    }

    #[test]
    fn diffusion_fixes_uniform_state_exactly() {
        for phase in [PI, FRAC_PI_2, 0.3] {
            let mut state = StateVector::uniform(6).unwrap();
            let before = state.clone();
            state.apply_diffusion(phase);
            for i in 0..6 {
                assert_complex_eq(state.amplitude(i), before.amplitude(i), 1e-14);
            }
        }
    }

    #[test]
    fn diffusion_matches_hadamard_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for l in 1..=10u32 {
            let n = 1u64 << l;
            let mut amps: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            for phase in [PI, FRAC_PI_2, 1.234] {
                let mut direct = StateVector::from_amplitudes(amps.clone()).unwrap();
                let mut hadamard = direct.clone();
                direct.apply_diffusion(phase);
                hadamard.apply_diffusion_hadamard(phase).unwrap();
                for i in 0..n {
                    assert_complex_eq(direct.amplitude(i), hadamard.amplitude(i), 1e-12);
                }
            }
        }
        let mut state = StateVector::uniform(6).unwrap();
        assert_eq!(
            state.apply_diffusion_hadamard(PI),
            Err(Error::NotPowerOfTwo { dim: 6 })
        );
    }

    #[test]
    fn one_iteration_on_quarter_marked_concentrates_all_mass() {
        let marked = MarkedSet::from_indices([2]);
        let mut state = StateVector::uniform(4).unwrap();
        state
            .grover_iteration(&marked, PhasePair::STANDARD)
            .unwrap();
        assert_abs_diff_eq!(state.marked_mass(&marked).unwrap(), 1.0, epsilon = 1e-12);
        assert_complex_eq(state.amplitude(2), Complex64::new(1.0, 0.0), 1e-12);
    }

    #[test]
    fn success_probability_examples() {
        let p = grover_success_probability(8, &MarkedSet::from_indices([1, 5]), 1).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        let p = grover_success_probability(8, &MarkedSet::from_indices([6]), 2).unwrap();
        assert_abs_diff_eq!(p, 0.9453125, epsilon = 1e-12);
        let p = grover_success_probability(5, &MarkedSet::from_indices([]), 3).unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn within_class_amplitudes_stay_uniform() {
        let marked = MarkedSet::from_indices([0, 3, 11, 12]);
        let mut state = StateVector::uniform(13).unwrap();
        for _ in 0..25 {
            state
                .grover_iteration(&marked, PhasePair::STANDARD)
                .unwrap();
            let m0 = state.amplitude(0);
            let u0 = state.amplitude(1);
            for i in 0..13 {
                let reference = if marked.contains(i) { m0 } else { u0 };
                assert_complex_eq(state.amplitude(i), reference, 1e-10);
            }
        }
    }

    #[test]
    fn projection_recovers_plane_amplitudes() {
        let marked = MarkedSet::from_indices([1, 4]);
        let mut state = StateVector::uniform(8).unwrap();
        state
            .grover_iteration(&marked, PhasePair::STANDARD)
            .unwrap();
        let (u, m) = state.project_subspace(&marked).unwrap();
        // Projection must carry the full norm: the state lives in the plane.
        assert_abs_diff_eq!(u.norm_sqr() + m.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.norm_sqr(), 1.0, epsilon = 1e-12);

        let empty = MarkedSet::from_indices([]);
        let (u, m) = StateVector::uniform(8)
            .unwrap()
            .project_subspace(&empty)
            .unwrap();
        assert_eq!(m, Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(u.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn measurement_follows_the_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);

        // A basis state always yields its own index.
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[2] = Complex64::new(0.0, 1.0);
        let basis = StateVector::from_amplitudes(amps).unwrap();
        for _ in 0..100 {
            assert_eq!(basis.measure_sample(&mut rng), 2);
        }

        // Uniform over 4: each index close to 1/4 of draws.
        let uniform = StateVector::uniform(4).unwrap();
        let mut counts = [0u32; 4];
        let draws = 100_000;
        for _ in 0..draws {
            counts[uniform.measure_sample(&mut rng) as usize] += 1;
        }
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - 0.25).abs() < 0.01,
                "frequency {freq} too far from 0.25"
            );
        }
    }
}
