//! Toy BB84 over single probes and bit-flip key alignment.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{streams, ProtocolError};
use crate::adversary::{AdversaryStrategy, Channel, Leg, Transit};
use crate::qsim::{JointState, MeasBasis, Sign, SimRng, Spectrum};

/// Sampled QBER above which a key exchange is abandoned.
pub const QBER_ABORT_THRESHOLD: f64 = 0.11;

/// One party's copy of a shared key, with the flips applied to align it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyKey {
    pub bits: Vec<bool>,
    pub flips: Vec<usize>,
}

impl PartyKey {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits, flips: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bb84Stats {
    pub sent: usize,
    pub sifted: usize,
    /// Sifted positions where Bob's bit differs from Alice's.
    pub errors: usize,
}

impl Bb84Stats {
    pub fn sift_rate(&self) -> f64 {
        self.sifted as f64 / self.sent as f64
    }

    pub fn qber(&self) -> f64 {
        if self.sifted == 0 {
            0.0
        } else {
            self.errors as f64 / self.sifted as f64
        }
    }
}

/// Raw sifted material from one batch of single-probe exchanges.
#[derive(Clone, Debug, Default)]
pub struct Bb84Batch {
    pub alice: Vec<bool>,
    pub bob: Vec<bool>,
    pub stats: Bb84Stats,
}

/// Sends `qubits` single probes with random bits in random bases (energy or
/// `±`), lets the eavesdropper act in transit, and sifts on basis agreement.
pub fn bb84_exchange<'e>(qubits: usize, rng: &mut SimRng, mut eve: Option<&mut (dyn AdversaryStrategy + 'e)>) -> Result<Bb84Batch, ProtocolError> {
    let mut eve_rng = SimRng::new(rng.next_u64(), streams::EVE);
    let spectrum = Spectrum::default();
    let mut batch = Bb84Batch::default();
    for i in 0..qubits {
        let bit = rng.coin();
        let alice_diag = rng.coin();
        let bob_diag = rng.coin();
        let mut state = if alice_diag {
            JointState::prepare_noon(1, Sign::from_bool(bit))?
        } else {
            JointState::prepare_energy(1, bit)?
        };
        if let Some(eve) = eve.as_deref_mut() {
            for leg in [Leg::ToCharlie, Leg::FromCharlie] {
                let transit = Transit {
                    round: i,
                    leg,
                    probe: 0,
                    probes_per_round: 1,
                };
                let mut channel = Channel::new(&mut state, spectrum, vec![0]);
                eve.on_probe_transit(&transit, &mut channel, &mut eve_rng)?;
            }
        }
        let basis = if bob_diag {
            MeasBasis::GhzPlusMinus
        } else {
            MeasBasis::Energy
        };
        let (got, _) = state.measure_single_probe(0, basis, rng)?;
        batch.stats.sent += 1;
        if alice_diag == bob_diag {
            batch.stats.sifted += 1;
            batch.stats.errors += (got != bit) as usize;
            batch.alice.push(bit);
            batch.bob.push(got);
        }
    }
    Ok(batch)
}

/// A key established between Alice and one recipient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyExchange {
    pub alice: PartyKey,
    pub recipient: PartyKey,
    pub stats: Bb84Stats,
    /// Error rate on the sacrificed sample.
    pub sampled_qber: f64,
}

/// Runs BB84 batches until `length` key bits survive. Every fourth sifted
/// bit is sacrificed to estimate the QBER; the exchange aborts when that
/// estimate exceeds [`QBER_ABORT_THRESHOLD`].
pub fn bb84_keygen<'e>(length: usize, rng: &mut SimRng, mut eve: Option<&mut (dyn AdversaryStrategy + 'e)>) -> Result<KeyExchange, ProtocolError> {
    if length == 0 {
        return Err(ProtocolError::EmptyKey);
    }
    let mut alice = Vec::with_capacity(length);
    let mut recipient = Vec::with_capacity(length);
    let mut stats = Bb84Stats::default();
    let (mut sampled, mut sample_errors) = (0usize, 0usize);
    while alice.len() < length {
        let missing = length - alice.len();
        // 1/2 sift and 3/4 kept: about 8/3 probes per key bit
        let batch = bb84_exchange(missing * 3 + 16, rng, eve.as_deref_mut())?;
        stats.sent += batch.stats.sent;
        stats.sifted += batch.stats.sifted;
        stats.errors += batch.stats.errors;
        for (i, (a, b)) in batch.alice.into_iter().zip(batch.bob).enumerate() {
            if i % 4 == 0 {
                sampled += 1;
                sample_errors += (a != b) as usize;
            } else if alice.len() < length {
                alice.push(a);
                recipient.push(b);
            }
        }
        let qber = sample_errors as f64 / sampled.max(1) as f64;
        if qber > QBER_ABORT_THRESHOLD {
            return Err(ProtocolError::QberAbort {
                qber,
                threshold: QBER_ABORT_THRESHOLD,
            });
        }
    }
    Ok(KeyExchange {
        alice: PartyKey::new(alice),
        recipient: PartyKey::new(recipient),
        stats,
        sampled_qber: sample_errors as f64 / sampled.max(1) as f64,
    })
}

/// Makes every key equal to the first by recording, for each other key, the
/// positions where it differs. Only positions are published, never values.
pub fn align_keys(keys: &[PartyKey]) -> Result<Vec<PartyKey>, ProtocolError> {
    let [reference, rest @ ..] = keys else {
        return Err(ProtocolError::TooFewKeys(0));
    };
    if rest.is_empty() {
        return Err(ProtocolError::TooFewKeys(1));
    }
    let mut out = vec![PartyKey::new(reference.bits.clone())];
    for key in rest {
        if key.len() != reference.len() {
            return Err(ProtocolError::KeyLength(reference.len(), key.len()));
        }
        let flips: Vec<usize> = key
            .bits
            .iter()
            .zip(&reference.bits)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect();
        let mut bits = key.bits.clone();
        for &i in &flips {
            bits[i] = !bits[i];
        }
        out.push(PartyKey { bits, flips });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::basis_guess_intercept_resend;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn identical_keys_need_no_flips() {
        let k = PartyKey::new(bits("1011"));
        let out = align_keys(&[k.clone(), k.clone(), k]).unwrap();
        assert!(out.iter().all(|o| o.flips.is_empty() && o.bits == bits("1011")));
    }

    #[test]
    fn xor_flip_list() {
        let out = align_keys(&[PartyKey::new(bits("1010")), PartyKey::new(bits("1100"))]).unwrap();
        assert_eq!(out[1].flips, vec![1, 2]);
        assert_eq!(out[1].bits, bits("1010"));
    }

    #[test]
    fn alignment_errors() {
        assert!(matches!(align_keys(&[]), Err(ProtocolError::TooFewKeys(0))));
        assert!(matches!(align_keys(&[PartyKey::new(bits("1"))]), Err(ProtocolError::TooFewKeys(1))));
        assert!(matches!(
            align_keys(&[PartyKey::new(bits("10")), PartyKey::new(bits("1"))]),
            Err(ProtocolError::KeyLength(2, 1))
        ));
    }

    proptest! {
        #[test]
        fn aligned_keys_equal_reference(keys in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 32), 2..6)) {
            let input: Vec<PartyKey> = keys.into_iter().map(PartyKey::new).collect();
            let out = align_keys(&input).unwrap();
            for (o, i) in out.iter().zip(&input).skip(1) {
                prop_assert_eq!(&o.bits, &input[0].bits);
                let differing = i.bits.iter().zip(&input[0].bits).filter(|(a, b)| a != b).count();
                prop_assert_eq!(o.flips.len(), differing);
            }
        }
    }

    #[test]
    fn noiseless_key_has_no_errors() {
        let mut rng = SimRng::new(11, 0);
        let k = bb84_keygen(500, &mut rng, None).unwrap();
        assert_eq!(k.alice.len(), 500);
        assert_eq!(k.alice, k.recipient);
        assert_eq!(k.stats.errors, 0);
        assert_eq!(k.sampled_qber, 0.0);
    }

    #[test]
    fn intercept_resend_aborts_keygen() {
        let mut rng = SimRng::new(12, 0);
        let mut eve = basis_guess_intercept_resend();
        let r = bb84_keygen(500, &mut rng, Some(&mut eve));
        assert!(matches!(r, Err(ProtocolError::QberAbort { .. })), "{r:?}");
    }

    #[test]
    fn empty_key_rejected() {
        let mut rng = SimRng::new(1, 0);
        assert!(matches!(bb84_keygen(0, &mut rng, None), Err(ProtocolError::EmptyKey)));
    }
}
