//! Dense state-vector representation of n qudits of dimension d.
//!
//! Basis-index convention: the composite label of qudits (q_0, ..., q_{n-1})
//! is sum q_i * d^{n-1-i}, i.e. the first qudit is the most significant digit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance for state-norm and state-equality checks.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for comparisons against independent dense oracles.
pub const ORACLE_TOL: f64 = 1e-12;
/// Branches below this probability are treated as genuinely zero.
pub const PROB_FLOOR: f64 = 1e-12;

/// e^{2*pi*i*num/den}, exact on quadrant multiples so that gates like
/// the d=2 Fourier transform and phase gate come out with exact 0/±1 entries.
pub fn phase_exp(num: i64, den: i64) -> Complex64 {
    debug_assert!(den > 0);
    let four = 4 * num.rem_euclid(den);
    if four % den == 0 {
        match four / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        let theta = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
        Complex64::new(theta.cos(), theta.sin())
    }
}

/// A square complex matrix checked for unitarity at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    /// Build from row-major entries; rejects non-unitary input.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Domain(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let gate = Self { dim, entries };
        let dev = gate.unitarity_deviation();
        if dev > STATE_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(gate)
    }

    /// Build without the unitarity check. Used for intermediates that are
    /// checked at a later stage (and by `classify` to inspect arbitrary input).
    pub fn new_unchecked(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Max-entry deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                max = max.max((acc - expect).norm());
            }
        }
        max
    }

    pub fn matmul(&self, other: &GateMatrix) -> GateMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        GateMatrix { dim: n, entries }
    }

    pub fn pow(&self, k: usize) -> GateMatrix {
        let mut acc = GateMatrix::identity(self.dim);
        for _ in 0..k {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Plain matrix-vector product over the full space. Serves as the
    /// independent application route when the matrix covers every qudit.
    pub fn matvec(&self, amps: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(amps.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.get(i, j) * amps[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Outcome of a computational-basis measurement on a subset of qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub qudit_indices: Vec<usize>,
    /// Mixed-radix value of the measured digits, first index most significant.
    pub value: u64,
    /// Squared norm of the projected branch before renormalization.
    pub probability: f64,
}

/// Policy selecting which measurement branch(es) a caller receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurePolicy {
    /// Draw one branch with Born probabilities from the seeded generator.
    Sample { seed: u64 },
    /// Follow the single branch with the given outcome.
    Forced(u64),
    /// Return every branch with probability above the zero floor.
    EnumerateAll,
}

/// Mode for amplitude-wise state comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualMode {
    Exact,
    UpToGlobalPhase,
}

/// Normalized amplitude vector over n qudits of dimension d.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d: usize,
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational-basis state |label> on n qudits.
    pub fn basis_state(d: usize, n: usize, label: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("qudit dimension {d} < 2")));
        }
        let len = d.checked_pow(n as u32).ok_or_else(|| {
            Error::Domain(format!("d^n overflows for d={d}, n={n}"))
        })?;
        if label >= len {
            return Err(Error::Domain(format!(
                "basis label {label} out of range for d={d}, n={n} (d^n = {len})"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[label] = Complex64::new(1.0, 0.0);
        Ok(Self { d, n, amps })
    }

    /// Build from raw amplitudes; rejects wrong length or non-unit norm.
    pub fn from_amplitudes(d: usize, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("qudit dimension {d} < 2")));
        }
        let len = d.pow(n as u32);
        if amps.len() != len {
            return Err(Error::Domain(format!(
                "expected {len} amplitudes for d={d}, n={n}, got {}",
                amps.len()
            )));
        }
        let state = Self { d, n, amps };
        state.check_norm()?;
        Ok(state)
    }

    /// Seeded pseudo-random state with complex-Gaussian amplitudes, normalized.
    pub fn random(seed: u64, d: usize, n: usize) -> Result<Self> {
        let len = d.pow(n as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = rand_distr::StandardNormal;
        let mut amps: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.sample(dist), rng.sample(dist)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(d, n, amps)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_norm(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::NormDrift(n2));
        }
        Ok(())
    }

    /// Digit of basis index `index` at qudit position `qudit`.
    pub fn digit_of(&self, index: usize, qudit: usize) -> usize {
        let weight = self.d.pow((self.n - 1 - qudit) as u32);
        (index / weight) % self.d
    }

    fn target_weights(&self, targets: &[usize]) -> Vec<usize> {
        targets
            .iter()
            .map(|&q| self.d.pow((self.n - 1 - q) as u32))
            .collect()
    }

    fn validate_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(Error::Domain(format!(
                    "target qudit {t} out of range (n = {})",
                    self.n
                )));
            }
            if targets[..i].contains(&t) {
                return Err(Error::Domain(format!("duplicate target qudit {t}")));
            }
        }
        Ok(())
    }

    /// Apply a gate to the listed target qudits (first target = most
    /// significant digit of the gate's basis labels), identity elsewhere.
    pub fn apply_gate(&self, gate: &GateMatrix, targets: &[usize]) -> Result<StateVector> {
        self.validate_targets(targets)?;
        let gdim = self.d.pow(targets.len() as u32);
        if gate.dim() != gdim {
            return Err(Error::Domain(format!(
                "gate dim {} does not match d^{} = {gdim}",
                gate.dim(),
                targets.len()
            )));
        }
        let weights = self.target_weights(targets);
        let t = targets.len();
        // offset of sub-label s within the full index
        let offset = |s: usize| -> usize {
            let mut off = 0;
            let mut rem = s;
            for j in (0..t).rev() {
                off += (rem % self.d) * weights[j];
                rem /= self.d;
            }
            off
        };
        let offsets: Vec<usize> = (0..gdim).map(offset).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for i in 0..self.amps.len() {
            let mut sub = 0usize;
            for (j, &w) in weights.iter().enumerate() {
                sub += ((i / w) % self.d) * self.d.pow((t - 1 - j) as u32);
            }
            let base = i - offsets[sub];
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..gdim {
                let g = gate.get(sub, s);
                if g.norm_sqr() != 0.0 {
                    acc += g * self.amps[base + offsets[s]];
                }
            }
            out[i] = acc;
        }
        let result = Self {
            d: self.d,
            n: self.n,
            amps: out,
        };
        result.check_norm()?;
        Ok(result)
    }

    /// Probability of each joint outcome on the target qudits.
    pub fn outcome_probabilities(&self, targets: &[usize]) -> Result<Vec<f64>> {
        self.validate_targets(targets)?;
        let m = targets.len();
        let outcomes = self.d.pow(m as u32);
        let weights = self.target_weights(targets);
        let mut probs = vec![0.0f64; outcomes];
        for (i, a) in self.amps.iter().enumerate() {
            let mut k = 0usize;
            for (j, &w) in weights.iter().enumerate() {
                k += ((i / w) % self.d) * self.d.pow((m - 1 - j) as u32);
            }
            probs[k] += a.norm_sqr();
        }
        Ok(probs)
    }

    fn collapse(&self, targets: &[usize], k: usize, prob: f64) -> StateVector {
        let m = targets.len();
        let weights = self.target_weights(targets);
        let scale = 1.0 / prob.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut sub = 0usize;
                for (j, &w) in weights.iter().enumerate() {
                    sub += ((i / w) % self.d) * self.d.pow((m - 1 - j) as u32);
                }
                if sub == k {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            d: self.d,
            n: self.n,
            amps,
        }
    }

    /// Measure the target qudits in the computational basis. The measured
    /// qudits stay in the register, projected onto |k>.
    pub fn measure(
        &self,
        targets: &[usize],
        policy: MeasurePolicy,
    ) -> Result<Vec<(MeasurementOutcome, StateVector)>> {
        let probs = self.outcome_probabilities(targets)?;
        let branch = |k: usize| {
            (
                MeasurementOutcome {
                    qudit_indices: targets.to_vec(),
                    value: k as u64,
                    probability: probs[k],
                },
                self.collapse(targets, k, probs[k]),
            )
        };
        match policy {
            MeasurePolicy::EnumerateAll => Ok(probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > PROB_FLOOR)
                .map(|(k, _)| branch(k))
                .collect()),
            MeasurePolicy::Forced(k) => {
                let k = k as usize;
                if k >= probs.len() {
                    return Err(Error::Domain(format!(
                        "forced outcome {k} out of range (d^m = {})",
                        probs.len()
                    )));
                }
                if probs[k] < PROB_FLOOR {
                    return Err(Error::ImpossibleOutcome {
                        value: k as u64,
                        probability: probs[k],
                    });
                }
                Ok(vec![branch(k)])
            }
            MeasurePolicy::Sample { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = probs.len() - 1;
                for (k, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        chosen = k;
                        break;
                    }
                }
                // guard against landing on a rounding-level branch
                if probs[chosen] < PROB_FLOOR {
                    chosen = probs
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.total_cmp(b.1))
                        .map(|(k, _)| k)
                        .unwrap();
                }
                Ok(vec![branch(chosen)])
            }
        }
    }

    /// Tensor-append another register to the right (less significant digits).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.d != other.d {
            return Err(Error::Domain(format!(
                "dimension mismatch in tensor product: {} vs {}",
                self.d, other.d
            )));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self {
            d: self.d,
            n: self.n + other.n,
            amps,
        })
    }

    /// Remove qudits that sit in a definite basis state (e.g. after a
    /// projective measurement). Errors if any listed qudit is still
    /// correlated with the rest.
    pub fn discard(&self, targets: &[usize]) -> Result<StateVector> {
        self.validate_targets(targets)?;
        let m = targets.len();
        let probs = self.outcome_probabilities(targets)?;
        let mut support: Vec<usize> = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > PROB_FLOOR)
            .map(|(k, _)| k)
            .collect();
        if support.len() != 1 {
            return Err(Error::Domain(format!(
                "cannot discard qudits {targets:?}: {} basis values in support",
                support.len()
            )));
        }
        let fixed = support.pop().unwrap();
        let weights = self.target_weights(targets);
        let keep: Vec<usize> = (0..self.n).filter(|q| !targets.contains(q)).collect();
        let new_n = self.n - m;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.d.pow(new_n as u32)];
        for (i, a) in self.amps.iter().enumerate() {
            let mut sub = 0usize;
            for (j, &w) in weights.iter().enumerate() {
                sub += ((i / w) % self.d) * self.d.pow((m - 1 - j) as u32);
            }
            if sub != fixed {
                continue;
            }
            let mut rest = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                rest += self.digit_of(i, q) * self.d.pow((new_n - 1 - j) as u32);
            }
            amps[rest] = *a;
        }
        let out = Self {
            d: self.d,
            n: new_n,
            amps,
        };
        out.check_norm()?;
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Amplitude-wise state comparison, optionally modulo a global phase.
pub fn equal_states(a: &StateVector, b: &StateVector, mode: EqualMode, tol: f64) -> bool {
    if a.d != b.d || a.n != b.n {
        return false;
    }
    match mode {
        EqualMode::Exact => a.max_abs_diff(b) <= tol,
        EqualMode::UpToGlobalPhase => {
            let (idx, mag) = b
                .amps
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap_or((0, 0.0));
            if mag < PROB_FLOOR {
                return a.norm_sqr() < PROB_FLOOR;
            }
            let phase = a.amps[idx] * b.amps[idx].conj();
            if phase.norm() < PROB_FLOOR {
                return false;
            }
            let phase = phase / phase.norm();
            a.amps
                .iter()
                .zip(&b.amps)
                .all(|(x, y)| (x - phase * y).norm() <= tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_places_single_amplitude() {
        let s = StateVector::basis_state(2, 1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let s = StateVector::basis_state(3, 2, 5).unwrap();
        assert_eq!(s.amplitudes().len(), 9);
        for (i, a) in s.amplitudes().iter().enumerate() {
            let expect = if i == 5 { 1.0 } else { 0.0 };
            assert_eq!(a.re, expect);
        }
    }

    #[test]
    fn basis_state_rejects_out_of_range_label() {
        assert!(StateVector::basis_state(2, 2, 4).is_err());
    }

    #[test]
    fn identity_gate_preserves_amplitudes() {
        let s = StateVector::random(7, 2, 3).unwrap();
        let after = s.apply_gate(&GateMatrix::identity(2), &[1]).unwrap();
        assert!(s.max_abs_diff(&after) < 1e-15);
    }

    #[test]
    fn x_gate_flips_qubit() {
        let x = gates::permutation_gate(&[1, 0]).unwrap();
        let s = StateVector::basis_state(2, 1, 0).unwrap();
        let after = s.apply_gate(&x, &[0]).unwrap();
        assert_eq!(after.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn apply_gate_rejects_bad_targets() {
        let s = StateVector::basis_state(2, 2, 0).unwrap();
        let x = gates::permutation_gate(&[1, 0]).unwrap();
        assert!(s.apply_gate(&x, &[2]).is_err());
        assert!(s.apply_gate(&GateMatrix::identity(4), &[0, 0]).is_err());
        assert!(s.apply_gate(&GateMatrix::identity(4), &[0]).is_err());
    }

    #[test]
    fn measure_deterministic_state() {
        let s = StateVector::basis_state(2, 1, 0).unwrap();
        let branches = s.measure(&[0], MeasurePolicy::EnumerateAll).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].0.value, 0);
        assert!((branches[0].0.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_uniform_superposition() {
        let h = gates::qft(2).unwrap();
        let s = StateVector::basis_state(2, 1, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap();
        let branches = s.measure(&[0], MeasurePolicy::EnumerateAll).unwrap();
        assert_eq!(branches.len(), 2);
        for (o, st) in &branches {
            assert!((o.probability - 0.5).abs() < 1e-12);
            assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_zero_probability_branch_errors() {
        let s = StateVector::basis_state(2, 1, 0).unwrap();
        let err = s.measure(&[0], MeasurePolicy::Forced(1)).unwrap_err();
        assert!(matches!(err, Error::ImpossibleOutcome { .. }));
    }

    #[test]
    fn sample_is_deterministic_given_seed() {
        let h = gates::qft(2).unwrap();
        let s = StateVector::basis_state(2, 2, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap()
            .apply_gate(&h, &[1])
            .unwrap();
        let a = s.measure(&[0, 1], MeasurePolicy::Sample { seed: 42 }).unwrap();
        let b = s.measure(&[0, 1], MeasurePolicy::Sample { seed: 42 }).unwrap();
        assert_eq!(a[0].0.value, b[0].0.value);
    }

    #[test]
    fn discard_removes_product_qudit() {
        let s = StateVector::basis_state(2, 2, 0).unwrap();
        let h = gates::qft(2).unwrap();
        // (|0>+|1>)/sqrt2 on qudit 0, |0> on qudit 1
        let s = s.apply_gate(&h, &[0]).unwrap();
        let out = s.discard(&[1]).unwrap();
        assert_eq!(out.num_qudits(), 1);
        assert!((out.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn discard_rejects_entangled_qudit() {
        let h = gates::qft(2).unwrap();
        let cnot = gates::generalized_cnot(2).unwrap();
        let bell = StateVector::basis_state(2, 2, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap()
            .apply_gate(&cnot, &[0, 1])
            .unwrap();
        assert!(bell.discard(&[1]).is_err());
    }

    #[test]
    fn equal_states_modes() {
        let a = StateVector::basis_state(2, 1, 0).unwrap();
        assert!(equal_states(&a, &a, EqualMode::Exact, 1e-10));

        let phase = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let b = StateVector::from_amplitudes(2, 1, vec![phase, c(0.0, 0.0)]).unwrap();
        assert!(!equal_states(&a, &b, EqualMode::Exact, 1e-10));
        assert!(equal_states(&a, &b, EqualMode::UpToGlobalPhase, 1e-10));

        let orth = StateVector::basis_state(2, 1, 1).unwrap();
        assert!(!equal_states(&a, &orth, EqualMode::UpToGlobalPhase, 1e-10));
    }

    #[test]
    fn gate_constructor_rejects_non_unitary() {
        let bad = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(GateMatrix::new(2, bad).is_err());
    }

    #[test]
    fn phase_exp_quadrants_are_exact() {
        assert_eq!(phase_exp(0, 2), c(1.0, 0.0));
        assert_eq!(phase_exp(1, 2), c(-1.0, 0.0));
        assert_eq!(phase_exp(1, 4), c(0.0, 1.0));
        assert_eq!(phase_exp(-1, 4), c(0.0, -1.0));
    }
}
