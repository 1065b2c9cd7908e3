use super::params::{ProtocolParams, Scenario};
use super::schedule::RunContext;
use super::transcript::{
    DecoyCheck, Message, Outcome, Party, PartyMeasurement, PrepClass, RoundRecord, Transcript,
};
use super::verify::RevealContext;
use super::ProtocolError;
use crate::adversary::AdversaryStrategy;
use crate::qsim::MeasBasis;

fn basis_class(basis: MeasBasis) -> PrepClass {
    match basis {
        MeasBasis::Energy => PrepClass::Energy,
        MeasBasis::GhzPlusMinus | MeasBasis::GhzPlusMinusI => PrepClass::Noon,
    }
}

/// Alice prepares, Bob measures, Charlie sits in the channel between them.
///
/// Bob measures the GHZ family with probability `η = (1 − P_a)/(1 − P_a P_c)`
/// (or follows a pre-shared key), rounds with mismatched bases are sifted
/// away, and the public reveal runs in four steps:
///
/// 1. bases are compared and energy decoys checked;
/// 2. Charlie names his check rounds;
/// 3. Alice reveals signs on check rounds, Bob verifies, and only then
///    Charlie discloses the `m` values of phase rounds;
/// 4. Alice reveals her sign on even-position retained rounds and Bob his
///    outcome on odd-position ones.
pub fn run_two_party(params: &ProtocolParams, eve: &mut dyn AdversaryStrategy) -> Result<Transcript, ProtocolError> {
    params.expect_scenario(Scenario::TwoParty)?;
    let n = params.n_probes;
    let gap = params.spectrum.gap();
    let eta = params.eta();
    let mut ctx = RunContext::new(params, eve);
    let mut rounds = Vec::with_capacity(params.nu);
    let mut aborted = None;

    for round in 0..params.nu {
        let preparation = ctx.draw_preparation();
        let charlie_action = ctx.draw_charlie();
        let ghz_family = if params.preshared_basis_key {
            preparation.class() == PrepClass::Noon
        } else {
            ctx.bob.bernoulli(eta)
        };
        let basis = match (ghz_family, params.quadrature_split && ghz_family && ctx.bob.coin()) {
            (false, _) => MeasBasis::Energy,
            (true, false) => MeasBasis::GhzPlusMinus,
            (true, true) => MeasBasis::GhzPlusMinusI,
        };
        let mut state = preparation.state(n, params.probe_cap)?;
        let (counted, adversary_events) = ctx.transit_round(round, &mut state, charlie_action)?;
        let mut record = RoundRecord {
            round,
            preparation,
            charlie_action,
            probes_counted: counted,
            adversary_events,
            measurements: Vec::new(),
            sift_kept: basis_class(basis) == preparation.class(),
            decoy_check: DecoyCheck::NotADecoy,
        };
        if counted != n {
            aborted = Some(ctx.probe_count_abort(round, counted));
            rounds.push(record);
            break;
        }
        let outcome = match basis {
            MeasBasis::Energy => Outcome::Bits(state.measure_energy_all(&mut ctx.nature)),
            MeasBasis::GhzPlusMinus => Outcome::Ghz(state.measure_ghz_all(false, &mut ctx.nature).outcome),
            MeasBasis::GhzPlusMinusI => Outcome::Ghz(state.measure_ghz_all(true, &mut ctx.nature).outcome),
        };
        record.measurements.push(PartyMeasurement {
            party: Party::Bob,
            basis,
            outcome,
        });
        rounds.push(record);
    }

    let probe_count_violation = aborted.is_some();
    let mut retained = Vec::new();
    if aborted.is_none() {
        aborted = reveal(&mut ctx, &mut rounds, gap, &mut retained);
    }

    Ok(Transcript {
        scenario: Scenario::TwoParty,
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

fn bob_basis(r: &RoundRecord) -> MeasBasis {
    r.measurements[0].basis
}

fn reveal(ctx: &mut RunContext<'_>, rounds: &mut [RoundRecord], gap: f64, retained: &mut Vec<usize>) -> Option<super::Abort> {
    // step 1: bases, sifting, energy decoys
    ctx.publish(
        1,
        Party::Alice,
        Message::PreparationBases {
            rounds: rounds.iter().map(|r| (r.round, r.preparation.class())).collect(),
        },
    );
    ctx.publish(
        1,
        Party::Bob,
        Message::MeasurementBases {
            rounds: rounds.iter().map(|r| (r.round, bob_basis(r))).collect(),
        },
    );
    ctx.publish(
        1,
        Party::Alice,
        Message::SiftedRounds {
            rounds: rounds.iter().filter(|r| r.sift_kept).map(|r| r.round).collect(),
        },
    );
    let energy_outcomes = rounds
        .iter()
        .filter(|r| r.sift_kept && r.preparation.class() == PrepClass::Energy)
        .filter_map(|r| match &r.measurements[0].outcome {
            Outcome::Bits(b) => Some((r.round, b.clone())),
            Outcome::Ghz(_) => None,
        })
        .collect();
    ctx.publish(1, Party::Bob, Message::EnergyOutcomes { rounds: energy_outcomes });
    let (failures, abort) = ctx.run_checks(rounds, 0, |r| {
        (r.sift_kept && r.preparation.class() == PrepClass::Energy).then_some(RevealContext {
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

    // step 2: Charlie's check rounds
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

    // step 3: signs on check rounds, Bob verifies, then m disclosure
    let is_noon_check =
        |r: &RoundRecord| r.sift_kept && r.preparation.class() == PrepClass::Noon && !r.charlie_action.applied_phase;
    ctx.publish(
        3,
        Party::Alice,
        Message::CheckSigns {
            rounds: rounds
                .iter()
                .filter(|r| is_noon_check(r))
                .map(|r| (r.round, r.preparation.sign().expect("noon sign")))
                .collect(),
        },
    );
    let (failures, abort) = ctx.run_checks(rounds, failures, |r| {
        is_noon_check(r).then(|| RevealContext {
            preparation: r.preparation,
            check_flip: Some(r.charlie_action.flips(gap)),
        })
    });
    ctx.publish(
        3,
        Party::Bob,
        Message::CheckVerdict {
            passed: abort.is_none(),
            failures,
        },
    );
    if let Some(a) = abort {
        ctx.publish(3, Party::Bob, Message::Abort { round: a.round, reason: a.reason });
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

    // step 4: split reveal on retained rounds
    retained.extend(
        rounds
            .iter()
            .filter(|r| r.sift_kept && r.preparation.class() == PrepClass::Noon && r.charlie_action.applied_phase)
            .map(|r| r.round),
    );
    let signs = retained
        .iter()
        .step_by(2)
        .map(|&i| (i, rounds[i].preparation.sign().expect("noon sign")))
        .collect();
    ctx.publish(4, Party::Alice, Message::PreparationSigns { rounds: signs });
    let outcomes = retained
        .iter()
        .skip(1)
        .step_by(2)
        .map(|&i| (i, rounds[i].measurements[0].outcome.clone()))
        .collect();
    ctx.publish(4, Party::Bob, Message::MeasurementOutcomes { rounds: outcomes });
    None
}
