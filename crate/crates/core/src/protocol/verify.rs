use super::transcript::{DecoyCheck, Outcome, Preparation, PrepClass, RoundRecord};
use crate::qsim::{GhzOutcome, MeasBasis, Sign};

/// What the verifier knows about a round at the reveal step where it is
/// checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RevealContext {
    pub preparation: Preparation,
    /// `Some(flip)` once Charlie has revealed the round as a check, with the
    /// sign flip his rotation produced; `None` for phase rounds or before
    /// the reveal.
    pub check_flip: Option<bool>,
}

fn sign_of_bits<'a>(bits: impl Iterator<Item = &'a bool>) -> Sign {
    Sign::from_bool(bits.filter(|&&b| b).count() % 2 == 1)
}

/// Classifies a round against the deterministic outcome it must produce.
///
/// Energy preparations measured in the energy basis must return the
/// prepared level on every probe. GHZ-family preparations under a revealed
/// check rotation, measured in the matching family, must return the
/// prepared sign flipped by the rotation's parity; for product measurements
/// the sign is the parity of all reported bits. An `Invalid` GHZ outcome
/// always fails. Rounds measured in a non-matching basis are not decoys.
pub fn verify_decoy(record: &RoundRecord, ctx: &RevealContext) -> DecoyCheck {
    if record.measurements.is_empty() {
        return DecoyCheck::NotADecoy;
    }
    let prep = ctx.preparation;
    match prep.class() {
        PrepClass::Energy => {
            if record.measurements.iter().any(|m| m.basis != MeasBasis::Energy) {
                return DecoyCheck::NotADecoy;
            }
            let level = prep.energy_bit().expect("energy preparation");
            let all_match = record.measurements.iter().all(|m| match &m.outcome {
                Outcome::Bits(bits) => bits.iter().all(|&b| b == level),
                Outcome::Ghz(_) => false,
            });
            if all_match {
                DecoyCheck::Pass
            } else {
                DecoyCheck::Fail
            }
        }
        class @ (PrepClass::Noon | PrepClass::NoonI) => {
            let Some(flip) = ctx.check_flip else {
                return DecoyCheck::NotADecoy;
            };
            let family = if class == PrepClass::Noon {
                MeasBasis::GhzPlusMinus
            } else {
                MeasBasis::GhzPlusMinusI
            };
            if record.measurements.iter().any(|m| m.basis != family) {
                return DecoyCheck::NotADecoy;
            }
            let prepared = prep.sign().expect("ghz preparation");
            let expected = if flip { prepared.flip() } else { prepared };
            let observed = match record.measurements.as_slice() {
                [single] => match &single.outcome {
                    Outcome::Ghz(GhzOutcome::Invalid) => return DecoyCheck::Fail,
                    Outcome::Ghz(g) => g.sign().expect("valid outcome"),
                    Outcome::Bits(bits) if family == MeasBasis::GhzPlusMinus => sign_of_bits(bits.iter()),
                    Outcome::Bits(_) => return DecoyCheck::NotADecoy,
                },
                many => {
                    if family != MeasBasis::GhzPlusMinus {
                        return DecoyCheck::NotADecoy;
                    }
                    let mut bits = Vec::new();
                    for m in many {
                        match &m.outcome {
                            Outcome::Bits(b) => bits.extend_from_slice(b),
                            Outcome::Ghz(_) => return DecoyCheck::NotADecoy,
                        }
                    }
                    sign_of_bits(bits.iter())
                }
            };
            if observed == expected {
                DecoyCheck::Pass
            } else {
                DecoyCheck::Fail
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::transcript::{CharlieAction, Party, PartyMeasurement};

    fn record(prep: Preparation, m: usize, basis: MeasBasis, outcome: Outcome) -> RoundRecord {
        RoundRecord {
            round: 0,
            preparation: prep,
            charlie_action: CharlieAction { applied_phase: false, m },
            probes_counted: 4,
            adversary_events: vec![],
            measurements: vec![PartyMeasurement {
                party: Party::Alice,
                basis,
                outcome,
            }],
            sift_kept: true,
            decoy_check: DecoyCheck::NotADecoy,
        }
    }

    fn ctx(prep: Preparation, m: usize) -> RevealContext {
        RevealContext {
            preparation: prep,
            check_flip: Some(CharlieAction { applied_phase: false, m }.flips(1.0)),
        }
    }

    #[test]
    fn energy_zero_all_zero_passes() {
        let r = record(Preparation::Energy0, 0, MeasBasis::Energy, Outcome::Bits(vec![false; 4]));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::Energy0, 0)), DecoyCheck::Pass);
        let r = record(Preparation::Energy0, 0, MeasBasis::Energy, Outcome::Bits(vec![true; 4]));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::Energy0, 0)), DecoyCheck::Fail);
    }

    #[test]
    fn odd_check_flips_sign() {
        let r = record(Preparation::NoonPlus, 3, MeasBasis::GhzPlusMinus, Outcome::Ghz(GhzOutcome::Minus));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::NoonPlus, 3)), DecoyCheck::Pass);
    }

    #[test]
    fn even_check_keeps_sign() {
        let r = record(Preparation::NoonPlus, 2, MeasBasis::GhzPlusMinus, Outcome::Ghz(GhzOutcome::Minus));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::NoonPlus, 2)), DecoyCheck::Fail);
    }

    #[test]
    fn invalid_outcome_fails() {
        let r = record(Preparation::NoonMinus, 0, MeasBasis::GhzPlusMinus, Outcome::Ghz(GhzOutcome::Invalid));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::NoonMinus, 0)), DecoyCheck::Fail);
    }

    #[test]
    fn phase_round_is_not_a_decoy() {
        let r = record(Preparation::NoonPlus, 1, MeasBasis::GhzPlusMinus, Outcome::Ghz(GhzOutcome::Plus));
        let c = RevealContext {
            preparation: Preparation::NoonPlus,
            check_flip: None,
        };
        assert_eq!(verify_decoy(&r, &c), DecoyCheck::NotADecoy);
    }

    #[test]
    fn mismatched_basis_is_not_a_decoy() {
        let r = record(Preparation::Energy1, 0, MeasBasis::GhzPlusMinus, Outcome::Ghz(GhzOutcome::Plus));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::Energy1, 0)), DecoyCheck::NotADecoy);
        let r = record(Preparation::NoonPlus, 0, MeasBasis::GhzPlusMinusI, Outcome::Ghz(GhzOutcome::Plus));
        assert_eq!(verify_decoy(&r, &ctx(Preparation::NoonPlus, 0)), DecoyCheck::NotADecoy);
    }

    #[test]
    fn product_parity_across_parties() {
        let mut r = record(Preparation::NoonMinus, 0, MeasBasis::GhzPlusMinus, Outcome::Bits(vec![true, false, false]));
        r.measurements.push(PartyMeasurement {
            party: Party::Recipient(1),
            basis: MeasBasis::GhzPlusMinus,
            outcome: Outcome::Bits(vec![false]),
        });
        assert_eq!(verify_decoy(&r, &ctx(Preparation::NoonMinus, 0)), DecoyCheck::Pass);
        r.measurements[1].outcome = Outcome::Bits(vec![true]);
        assert_eq!(verify_decoy(&r, &ctx(Preparation::NoonMinus, 0)), DecoyCheck::Fail);
    }
}
