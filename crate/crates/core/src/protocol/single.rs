use super::params::{ProtocolParams, Scenario};
use super::schedule::RunContext;
use super::transcript::{
    DecoyCheck, Message, Outcome, Party, PartyMeasurement, PrepClass, RoundRecord, Transcript,
};
use super::verify::RevealContext;
use super::ProtocolError;
use crate::adversary::AdversaryStrategy;
use crate::qsim::MeasBasis;

/// Alice prepares and measures; Charlie imprints the phase or a check.
///
/// After the quantum rounds Charlie names his check rounds, Alice verifies
/// every deterministic outcome, and only a clean verification releases the
/// `m` values of the phase rounds.
pub fn run_single_party(params: &ProtocolParams, eve: &mut dyn AdversaryStrategy) -> Result<Transcript, ProtocolError> {
    params.expect_scenario(Scenario::SingleParty)?;
    let n = params.n_probes;
    let gap = params.spectrum.gap();
    let mut ctx = RunContext::new(params, eve);
    let mut rounds = Vec::with_capacity(params.nu);
    let mut aborted = None;

    for round in 0..params.nu {
        let preparation = ctx.draw_preparation();
        let charlie_action = ctx.draw_charlie();
        let imaginary = match preparation.class() {
            PrepClass::Noon => params.quadrature_split && ctx.alice.coin(),
            PrepClass::NoonI => true,
            PrepClass::Energy => false,
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
            sift_kept: true,
            decoy_check: DecoyCheck::NotADecoy,
        };
        if counted != n {
            aborted = Some(ctx.probe_count_abort(round, counted));
            rounds.push(record);
            break;
        }
        let measurement = match preparation.class() {
            PrepClass::Energy => PartyMeasurement {
                party: Party::Alice,
                basis: MeasBasis::Energy,
                outcome: Outcome::Bits(state.measure_energy_all(&mut ctx.nature)),
            },
            PrepClass::Noon | PrepClass::NoonI => PartyMeasurement {
                party: Party::Alice,
                basis: if imaginary {
                    MeasBasis::GhzPlusMinusI
                } else {
                    MeasBasis::GhzPlusMinus
                },
                outcome: Outcome::Ghz(state.measure_ghz_all(imaginary, &mut ctx.nature).outcome),
            },
        };
        record.measurements.push(measurement);
        rounds.push(record);
    }

    let probe_count_violation = aborted.is_some();
    let mut retained = Vec::new();
    if aborted.is_none() {
        let checks: Vec<(usize, bool)> = rounds
            .iter()
            .filter(|r| !r.charlie_action.applied_phase)
            .map(|r| (r.round, r.charlie_action.flips(gap)))
            .collect();
        ctx.publish(2, Party::Charlie, Message::CheckRounds { rounds: checks });

        let (failures, abort) = ctx.run_checks(&mut rounds, 0, |r| {
            Some(RevealContext {
                preparation: r.preparation,
                check_flip: (!r.charlie_action.applied_phase).then(|| r.charlie_action.flips(gap)),
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
            aborted = Some(a);
        } else {
            let offsets = rounds
                .iter()
                .filter(|r| r.charlie_action.applied_phase)
                .map(|r| (r.round, r.charlie_action.m))
                .collect();
            ctx.publish(3, Party::Charlie, Message::PhaseOffsets { rounds: offsets });
            retained = rounds
                .iter()
                .filter(|r| r.preparation.class() == PrepClass::Noon && r.charlie_action.applied_phase)
                .map(|r| r.round)
                .collect();
        }
    }

    Ok(Transcript {
        scenario: Scenario::SingleParty,
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
