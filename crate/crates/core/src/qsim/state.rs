use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MeasBasis, QsimError, Sign, SimRng, Spectrum, DEFAULT_PROBE_CAP, EXACT_TOL, MAX_PROBE_CAP};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Outcome of a GHZ-pair measurement on a group of probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzOutcome {
    Plus,
    Minus,
    /// Mass outside `span{|0…0⟩, |1…1⟩}` on the measured probes.
    Invalid,
}

impl GhzOutcome {
    pub fn sign(self) -> Option<Sign> {
        match self {
            GhzOutcome::Plus => Some(Sign::Plus),
            GhzOutcome::Minus => Some(Sign::Minus),
            GhzOutcome::Invalid => None,
        }
    }
}

impl From<Sign> for GhzOutcome {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => GhzOutcome::Plus,
            Sign::Minus => GhzOutcome::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzMeasurement {
    pub outcome: GhzOutcome,
    /// Born probability of the sampled branch.
    pub probability: f64,
}

/// Pure state of `n` probes as `2^n` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_count(n: usize, cap: usize) -> Result<(), QsimError> {
    if cap > MAX_PROBE_CAP {
        return Err(QsimError::CapTooLarge(cap));
    }
    if n == 0 || n > cap {
        return Err(QsimError::ProbeCount { n, cap });
    }
    Ok(())
}

impl JointState {
    /// Computational basis state `|index⟩`.
    pub fn basis_state(n: usize, index: usize, cap: usize) -> Result<Self, QsimError> {
        check_count(n, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index & ((1 << n) - 1)] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// `(|0…0⟩ ± |1…1⟩)/√2`.
    pub fn prepare_noon(n: usize, sign: Sign) -> Result<Self, QsimError> {
        Self::prepare_ghz(n, sign, false, DEFAULT_PROBE_CAP)
    }

    /// `(|0…0⟩ ± c|1…1⟩)/√2` with `c = i` when `imaginary`, else `c = 1`.
    pub fn prepare_ghz(n: usize, sign: Sign, imaginary: bool, cap: usize) -> Result<Self, QsimError> {
        check_count(n, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = ghz_coefficient(sign, imaginary) * FRAC_1_SQRT_2;
        Ok(Self { n, amps })
    }

    /// `|λ_m⟩^⊗n` when `high` is false, `|λ_M⟩^⊗n` otherwise.
    pub fn prepare_energy(n: usize, high: bool) -> Result<Self, QsimError> {
        Self::prepare_energy_capped(n, high, DEFAULT_PROBE_CAP)
    }

    pub fn prepare_energy_capped(n: usize, high: bool, cap: usize) -> Result<Self, QsimError> {
        let index = if high { usize::MAX } else { 0 };
        Self::basis_state(n, index, cap)
    }

    /// Builds a state from raw amplitudes; the length must be a power of two
    /// and the vector is normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QsimError::ProbeCount { n: 0, cap: MAX_PROBE_CAP });
        }
        let n = len.trailing_zeros() as usize;
        check_count(n, MAX_PROBE_CAP)?;
        let mut s = Self { n, amps };
        s.renormalize();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64, QsimError> {
        if self.n != other.n {
            return Err(QsimError::SizeMismatch(self.n, other.n));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> Result<f64, QsimError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn mask_of(&self, probes: &[usize]) -> Result<usize, QsimError> {
        let mut mask = 0usize;
        for &p in probes {
            if p >= self.n {
                return Err(QsimError::ProbeIndex { index: p, n: self.n });
            }
            if mask & (1 << p) != 0 {
                return Err(QsimError::DuplicateProbe(p));
            }
            mask |= 1 << p;
        }
        Ok(mask)
    }

    fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    /// Applies `e^{-iθH}` to each listed probe.
    pub fn apply_phase(&mut self, theta: f64, spectrum: &Spectrum, probes: &[usize]) -> Result<(), QsimError> {
        let mask = self.mask_of(probes)?;
        let low = Complex64::from_polar(1.0, -theta * spectrum.lambda_min());
        let high = Complex64::from_polar(1.0, -theta * spectrum.lambda_max());
        let count = probes.len() as u32;
        // factor depends only on the number of listed probes at level 1
        let factors: Vec<Complex64> = (0..=count)
            .map(|h| low.powu(count - h) * high.powu(h))
            .collect();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= factors[(idx & mask).count_ones() as usize];
        }
        Ok(())
    }

    /// Probabilities `(plus, minus, invalid)` of a GHZ-pair measurement on
    /// `probes`.
    pub fn ghz_probabilities(&self, probes: &[usize], imaginary: bool) -> Result<(f64, f64, f64), QsimError> {
        let mask = self.mask_of(probes)?;
        let (plus, minus) = self.ghz_pair_mass(mask, imaginary);
        let invalid = (self.norm_sqr() - plus - minus).max(0.0);
        Ok((plus, minus, invalid))
    }

    fn ghz_pair_mass(&self, mask: usize, imaginary: bool) -> (f64, f64) {
        let c_plus = ghz_coefficient(Sign::Plus, imaginary);
        let c_minus = ghz_coefficient(Sign::Minus, imaginary);
        let (mut plus, mut minus) = (0.0, 0.0);
        for rest in self.rest_indices(mask) {
            let a0 = self.amps[rest];
            let a1 = self.amps[rest | mask];
            plus += (a0 + c_plus.conj() * a1).norm_sqr() / 2.0;
            minus += (a0 + c_minus.conj() * a1).norm_sqr() / 2.0;
        }
        (plus, minus)
    }

    /// Indices with every bit of `mask` cleared.
    fn rest_indices(&self, mask: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.amps.len()).filter(move |i| i & mask == 0)
    }

    /// Projective measurement onto `(|0…0⟩ ± c|1…1⟩)/√2` on the listed probes,
    /// plus the orthogonal complement reported as [`GhzOutcome::Invalid`].
    pub fn measure_ghz(&mut self, probes: &[usize], imaginary: bool, rng: &mut SimRng) -> Result<GhzMeasurement, QsimError> {
        let mask = self.mask_of(probes)?;
        let (plus, minus) = self.ghz_pair_mass(mask, imaginary);
        let total = self.norm_sqr();
        let invalid = (total - plus - minus).max(0.0);
        let u = rng.uniform() * (plus + minus + invalid);
        let (outcome, probability) = if u < plus {
            (GhzOutcome::Plus, plus)
        } else if u < plus + minus || invalid <= EXACT_TOL {
            (GhzOutcome::Minus, minus)
        } else {
            (GhzOutcome::Invalid, invalid)
        };
        match outcome.sign() {
            Some(sign) => {
                let c = ghz_coefficient(sign, imaginary);
                let rest: Vec<usize> = self.rest_indices(mask).collect();
                let mut next = vec![Complex64::new(0.0, 0.0); self.amps.len()];
                for r in rest {
                    let proj = (self.amps[r] + c.conj() * self.amps[r | mask]) / 2.0;
                    next[r] = proj;
                    next[r | mask] = c * proj;
                }
                self.amps = next;
            }
            None => {
                let rest: Vec<usize> = self.rest_indices(mask).collect();
                for r in rest {
                    self.amps[r] = Complex64::new(0.0, 0.0);
                    self.amps[r | mask] = Complex64::new(0.0, 0.0);
                }
            }
        }
        self.renormalize();
        Ok(GhzMeasurement {
            outcome,
            probability: probability / total,
        })
    }

    /// GHZ-pair measurement on every probe.
    pub fn measure_ghz_all(&mut self, imaginary: bool, rng: &mut SimRng) -> GhzMeasurement {
        let probes: Vec<usize> = (0..self.n).collect();
        self.measure_ghz(&probes, imaginary, rng)
            .expect("all probes are in range")
    }

    /// Computational-basis measurement of the listed probes. Returns one bit
    /// per listed probe, in the order given.
    pub fn measure_energy(&mut self, probes: &[usize], rng: &mut SimRng) -> Result<Vec<bool>, QsimError> {
        let mask = self.mask_of(probes)?;
        let total = self.norm_sqr();
        let mut u = rng.uniform() * total;
        let mut picked = self.amps.len() - 1;
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if u < p {
                picked = idx;
                break;
            }
            u -= p;
        }
        // guard against landing on a zero-amplitude tail through rounding
        if self.amps[picked].norm_sqr() == 0.0 {
            picked = self
                .amps
                .iter()
                .rposition(|a| a.norm_sqr() > 0.0)
                .unwrap_or(0);
        }
        let pattern = picked & mask;
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & mask != pattern {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.renormalize();
        Ok(probes.iter().map(|&p| pattern & (1 << p) != 0).collect())
    }

    /// Full computational-basis measurement; bit `i` is probe `i`.
    pub fn measure_energy_all(&mut self, rng: &mut SimRng) -> Vec<bool> {
        let probes: Vec<usize> = (0..self.n).collect();
        self.measure_energy(&probes, rng)
            .expect("all probes are in range")
    }

    /// Rank-1 projective measurement of one probe.
    ///
    /// Bit `false` is `|0⟩`, `|+⟩` or `|+i⟩` depending on `basis`; bit `true`
    /// is the orthogonal vector. Returns the bit and its Born probability.
    pub fn measure_single_probe(&mut self, probe: usize, basis: MeasBasis, rng: &mut SimRng) -> Result<(bool, f64), QsimError> {
        let mask = self.mask_of(&[probe])?;
        let vectors = single_probe_vectors(basis);
        let total = self.norm_sqr();
        let weight = |state: &Self, v: &[Complex64; 2]| -> f64 {
            state
                .rest_indices(mask)
                .map(|r| (v[0].conj() * state.amps[r] + v[1].conj() * state.amps[r | mask]).norm_sqr())
                .sum()
        };
        let p0 = weight(self, &vectors[0]) / total;
        let bit = rng.uniform() >= p0;
        let v = vectors[bit as usize];
        let rest: Vec<usize> = self.rest_indices(mask).collect();
        for r in rest {
            let proj = v[0].conj() * self.amps[r] + v[1].conj() * self.amps[r | mask];
            self.amps[r] = v[0] * proj;
            self.amps[r | mask] = v[1] * proj;
        }
        self.renormalize();
        Ok((bit, if bit { 1.0 - p0 } else { p0 }))
    }
}

fn ghz_coefficient(sign: Sign, imaginary: bool) -> Complex64 {
    let c = if imaginary {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    c * sign.value()
}

fn single_probe_vectors(basis: MeasBasis) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let h = FRAC_1_SQRT_2;
    match basis {
        MeasBasis::Energy => [[one, zero], [zero, one]],
        MeasBasis::GhzPlusMinus => [
            [one * h, one * h],
            [one * h, -one * h],
        ],
        MeasBasis::GhzPlusMinusI => [
            [one * h, Complex64::new(0.0, h)],
            [one * h, Complex64::new(0.0, -h)],
        ],
    }
}

/// Largest entrywise deviation `|UρU† − ρ|` for `U = e^{-iθH}` on every probe,
/// with `ρ` given entrywise.
fn phase_invariance_defect(n: usize, theta: f64, spectrum: &Spectrum, rho: impl Fn(usize, usize) -> Complex64) -> f64 {
    let dim = 1usize << n;
    let energy = |idx: usize| -> f64 {
        let high = idx.count_ones() as f64;
        high * spectrum.lambda_max() + (n as f64 - high) * spectrum.lambda_min()
    };
    let mut worst = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            let entry = rho(a, b);
            if entry.norm() < EXACT_TOL {
                continue;
            }
            let rotated = entry * Complex64::from_polar(1.0, -theta * (energy(a) - energy(b)));
            worst = worst.max((rotated - entry).norm());
        }
    }
    worst
}

/// Largest entrywise change of Eve's view of the channel under the phase
/// map with angle `theta` on all probes.
///
/// Not knowing Alice's sign, Eve sees `½(|Ψ^+⟩⟨Ψ^+| + |Ψ^-⟩⟨Ψ^-|)`, which
/// equals `½[(|λ_m⟩⟨λ_m|)^⊗n + (|λ_M⟩⟨λ_M|)^⊗n]`. The mixture is built from
/// the two prepared state vectors rather than written down.
pub fn eve_view_density_defect(n: usize, theta: f64, spectrum: &Spectrum) -> Result<f64, QsimError> {
    check_count(n, DEFAULT_PROBE_CAP)?;
    let plus = JointState::prepare_noon(n, Sign::Plus)?;
    let minus = JointState::prepare_noon(n, Sign::Minus)?;
    let rho = |a: usize, b: usize| {
        (plus.amps[a] * plus.amps[b].conj() + minus.amps[a] * minus.amps[b].conj()) * 0.5
    };
    Ok(phase_invariance_defect(n, theta, spectrum, rho))
}

/// True iff [`eve_view_density_defect`] is within [`EXACT_TOL`].
pub fn eve_view_density_invariance_check(n: usize, theta: f64, spectrum: &Spectrum) -> Result<bool, QsimError> {
    Ok(eve_view_density_defect(n, theta, spectrum)? <= EXACT_TOL)
}

/// Same check for the projector of a pure state.
pub fn pure_state_phase_invariance_check(state: &JointState, theta: f64, spectrum: &Spectrum) -> bool {
    let rho = |a: usize, b: usize| state.amps[a] * state.amps[b].conj();
    phase_invariance_defect(state.n, theta, spectrum, rho) <= EXACT_TOL
}
