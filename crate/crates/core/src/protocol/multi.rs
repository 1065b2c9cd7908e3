use super::keys::{align_keys, bb84_keygen};
use super::params::{ProtocolParams, Scenario};
use super::schedule::RunContext;
use super::streams;
use super::transcript::{
    DecoyCheck, Message, Outcome, Party, PartyMeasurement, PrepClass, Preparation, RoundRecord, Transcript,
};
use super::verify::RevealContext;
use super::ProtocolError;
use crate::adversary::AdversaryStrategy;
use crate::qsim::{MeasBasis, Sign, SimRng};

/// Shared key bits consumed per round to schedule the basis family.
pub const KEY_BITS_PER_ROUND: usize = 16;

fn class_threshold(p_a: f64) -> u32 {
    let scale = (1u32 << KEY_BITS_PER_ROUND) as f64;
    ((p_a * scale).round() as u32).clamp(1, (1 << KEY_BITS_PER_ROUND) - 1)
}

/// Probability that a key block schedules a GHZ round: `P_a` quantized to
/// [`KEY_BITS_PER_ROUND`] bits.
pub fn multi_key_class_probability(p_a: f64) -> f64 {
    class_threshold(p_a) as f64 / (1u32 << KEY_BITS_PER_ROUND) as f64
}

fn recipients(k: usize) -> Vec<Party> {
    std::iter::once(Party::Bob)
        .chain((1..k).map(Party::Recipient))
        .collect()
}

/// Register indices measured by each recipient: Bob holds the `N` probes
/// that crossed Charlie's device, every other recipient one extra probe.
fn probes_of(party: Party, n: usize) -> Vec<usize> {
    match party {
        Party::Bob => (0..n).collect(),
        Party::Recipient(i) => vec![n + i - 1],
        _ => Vec::new(),
    }
}

/// Secret-shared estimation among `k ≥ 2` recipients.
///
/// Alice first runs toy BB84 with each recipient and aligns the keys to
/// one reference by publishing flip positions. Each round then takes
/// [`KEY_BITS_PER_ROUND`] key bits to decide whether she sends
/// `|Φ_N^±⟩` (everyone measures each probe in `±`) or `|Λ_{0/1}⟩`
/// (everyone measures energy). Decoys are verified across all recipients
/// and the reveal schedule mirrors the two-party protocol.
pub fn run_multi_party(params: &ProtocolParams, eve: &mut dyn AdversaryStrategy) -> Result<Transcript, ProtocolError> {
    params.expect_scenario(Scenario::MultiParty)?;
    let n = params.n_probes;
    let size = params.register_size();
    let gap = params.spectrum.gap();
    let parties = recipients(params.k);
    let mut ctx = RunContext::new(params, eve);

    // key agreement with every recipient, then alignment to Bob's key
    let key_len = KEY_BITS_PER_ROUND * params.nu;
    let mut key_rng = SimRng::new(params.seed, streams::KEYS);
    let mut alice_copies = Vec::with_capacity(parties.len());
    let mut recipient_copies = Vec::with_capacity(parties.len());
    for _ in &parties {
        let ex = bb84_keygen(key_len, &mut key_rng, None)?;
        alice_copies.push(ex.alice);
        recipient_copies.push(ex.recipient);
    }
    let aligned = align_keys(&alice_copies)?;
    for (party, key) in parties.iter().zip(&aligned).skip(1) {
        ctx.publish(
            0,
            Party::Alice,
            Message::KeyAlignment {
                recipient: *party,
                flips: key.flips.clone(),
            },
        );
    }
    // each recipient applies the published flips to its own copy
    for (copy, key) in recipient_copies.iter().zip(&aligned).skip(1) {
        let mut mine = copy.bits.clone();
        for &i in &key.flips {
            mine[i] = !mine[i];
        }
        debug_assert_eq!(mine, aligned[0].bits);
    }
    let shared = aligned[0].bits.clone();
    let threshold = class_threshold(params.p_a);

    let mut rounds = Vec::with_capacity(params.nu);
    let mut aborted = None;
    for round in 0..params.nu {
        let block = &shared[round * KEY_BITS_PER_ROUND..(round + 1) * KEY_BITS_PER_ROUND];
        let value = block.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        let ghz_round = value < threshold;
        let preparation = if ghz_round {
            Preparation::noon(Sign::from_bool(ctx.alice.coin()))
        } else {
            Preparation::energy(ctx.alice.coin())
        };
        let charlie_action = ctx.draw_charlie();
        let mut state = preparation.state(size, params.probe_cap)?;
        let (counted, adversary_events) = ctx.transit_round(round, &mut state, charlie_action)?;
        let mut record = RoundRecord {
            round,
            preparation,
            charlie_action,
            probes_counted: counted,
            adversary_events,
            measurements: Vec::new(),
            sift_kept: true,
            decoy_check: DecoyCheck::NotADecoy,
        };
        if counted != n {
            aborted = Some(ctx.probe_count_abort(round, counted));
            rounds.push(record);
            break;
        }
        let basis = if ghz_round {
            MeasBasis::GhzPlusMinus
        } else {
            MeasBasis::Energy
        };
        for &party in &parties {
            let mut bits = Vec::new();
            for probe in probes_of(party, n) {
                bits.push(state.measure_single_probe(probe, basis, &mut ctx.nature)?.0);
            }
            record.measurements.push(PartyMeasurement {
                party,
                basis,
                outcome: Outcome::Bits(bits),
            });
        }
        rounds.push(record);
    }

    let probe_count_violation = aborted.is_some();
    let mut retained = Vec::new();
    if aborted.is_none() {
        aborted = reveal(&mut ctx, &mut rounds, &parties, gap, &mut retained);
    }

    Ok(Transcript {
        scenario: Scenario::MultiParty,
        params: params.clone(),
        rounds,
        aborted,
        probe_count_violation,
        retained_for_estimation: retained,
        reveal_log: ctx.log,
        max_probes_in_flight: ctx.max_in_flight,
        eve_observations: ctx.eve_notes,
    })
}

fn outcomes_of(rounds: &[RoundRecord], party: Party, select: impl Fn(&RoundRecord) -> bool) -> Vec<(usize, Outcome)> {
    rounds
        .iter()
        .filter(|r| select(r))
        .filter_map(|r| r.measurement_of(party).map(|m| (r.round, m.outcome.clone())))
        .collect()
}

fn reveal(
    ctx: &mut RunContext<'_>,
    rounds: &mut [RoundRecord],
    parties: &[Party],
    gap: f64,
    retained: &mut Vec<usize>,
) -> Option<super::Abort> {
    // step 1: energy decoys across all recipients
    let is_energy = |r: &RoundRecord| r.preparation.class() == PrepClass::Energy;
    for &party in parties {
        let rounds_bits = outcomes_of(rounds, party, is_energy)
            .into_iter()
            .filter_map(|(i, o)| match o {
                Outcome::Bits(b) => Some((i, b)),
                Outcome::Ghz(_) => None,
            })
            .collect();
        ctx.publish(1, party, Message::EnergyOutcomes { rounds: rounds_bits });
    }
    let (failures, abort) = ctx.run_checks(rounds, 0, |r| {
        is_energy(r).then_some(RevealContext {
            preparation: r.preparation,
            check_flip: None,
        })
    });
    ctx.publish(
        1,
        Party::Alice,
        Message::CheckVerdict {
            passed: abort.is_none(),
            failures,
        },
    );
    if let Some(a) = abort {
        ctx.publish(1, Party::Alice, Message::Abort { round: a.round, reason: a.reason });
        return Some(a);
    }

    // step 2
    ctx.publish(
        2,
        Party::Charlie,
        Message::CheckRounds {
            rounds: rounds
                .iter()
                .filter(|r| !r.charlie_action.applied_phase)
                .map(|r| (r.round, r.charlie_action.flips(gap)))
                .collect(),
        },
    );

    // step 3: parity checks on GHZ check rounds
    let is_ghz_check = |r: &RoundRecord| r.preparation.class() == PrepClass::Noon && !r.charlie_action.applied_phase;
    for &party in parties {
        let rounds_out = outcomes_of(rounds, party, is_ghz_check);
        ctx.publish(3, party, Message::CheckOutcomes { rounds: rounds_out });
    }
    let (failures, abort) = ctx.run_checks(rounds, failures, |r| {
        is_ghz_check(r).then(|| RevealContext {
            preparation: r.preparation,
            check_flip: Some(r.charlie_action.flips(gap)),
        })
    });
    ctx.publish(
        3,
        Party::Alice,
        Message::CheckVerdict {
            passed: abort.is_none(),
            failures,
        },
    );
    if let Some(a) = abort {
        ctx.publish(3, Party::Alice, Message::Abort { round: a.round, reason: a.reason });
        return Some(a);
    }
    ctx.publish(
        3,
        Party::Charlie,
        Message::PhaseOffsets {
            rounds: rounds
                .iter()
                .filter(|r| r.charlie_action.applied_phase)
                .map(|r| (r.round, r.charlie_action.m))
                .collect(),
        },
    );

    // step 4
    retained.extend(
        rounds
            .iter()
            .filter(|r| r.preparation.class() == PrepClass::Noon && r.charlie_action.applied_phase)
            .map(|r| r.round),
    );
    let signs = retained
        .iter()
        .step_by(2)
        .map(|&i| (i, rounds[i].preparation.sign().expect("noon sign")))
        .collect();
    ctx.publish(4, Party::Alice, Message::PreparationSigns { rounds: signs });
    let odd: Vec<usize> = retained.iter().skip(1).step_by(2).copied().collect();
    for &party in parties {
        let rounds_out = outcomes_of(rounds, party, |r| odd.binary_search(&r.round).is_ok());
        ctx.publish(4, party, Message::MeasurementOutcomes { rounds: rounds_out });
    }
    None
}
