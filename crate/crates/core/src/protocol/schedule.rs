use super::params::ProtocolParams;
use super::streams;
use super::transcript::{
    Abort, AbortReason, CharlieAction, DecoyCheck, LoggedMessage, Message, Party, Preparation, RoundRecord,
};
use super::verify::{verify_decoy, RevealContext};
use super::ProtocolError;
use crate::adversary::{AdversaryStrategy, Channel, Leg, TamperRecord, Transit};
use crate::qsim::{JointState, Sign, SimRng};

/// Mutable state of one protocol run.
pub(crate) struct RunContext<'a> {
    pub params: &'a ProtocolParams,
    pub alice: SimRng,
    pub charlie: SimRng,
    pub bob: SimRng,
    pub nature: SimRng,
    eve_rng: SimRng,
    eve: &'a mut dyn AdversaryStrategy,
    pub log: Vec<LoggedMessage>,
    pub eve_notes: Vec<String>,
    in_flight: usize,
    pub max_in_flight: usize,
}

impl<'a> RunContext<'a> {
    pub fn new(params: &'a ProtocolParams, eve: &'a mut dyn AdversaryStrategy) -> Self {
        let seed = params.seed;
        Self {
            params,
            alice: SimRng::new(seed, streams::ALICE),
            charlie: SimRng::new(seed, streams::CHARLIE),
            bob: SimRng::new(seed, streams::BOB),
            nature: SimRng::new(seed, streams::NATURE),
            eve_rng: SimRng::new(seed, streams::EVE),
            eve,
            log: Vec::new(),
            eve_notes: Vec::new(),
            in_flight: 0,
            max_in_flight: 0,
        }
    }

    /// `Ψ^±` with probability `P_a/2` each, decoys share the rest.
    pub fn draw_preparation(&mut self) -> Preparation {
        let rng = &mut self.alice;
        if rng.uniform() < self.params.p_a {
            Preparation::noon(Sign::from_bool(rng.coin()))
        } else if self.params.extended_decoys {
            [
                Preparation::Energy0,
                Preparation::Energy1,
                Preparation::NoonPlusI,
                Preparation::NoonMinusI,
            ][rng.below(4)]
        } else {
            Preparation::energy(rng.coin())
        }
    }

    pub fn draw_charlie(&mut self) -> CharlieAction {
        CharlieAction {
            applied_phase: self.charlie.bernoulli(self.params.p_c),
            m: self.charlie.below(self.params.n_probes),
        }
    }

    fn depart(&mut self) {
        self.in_flight += 1;
        self.max_in_flight = self.max_in_flight.max(self.in_flight);
        assert!(self.in_flight <= 1, "two probes of one round in the channel");
    }

    fn arrive(&mut self) {
        self.in_flight -= 1;
    }

    fn eve_transit(&mut self, transit: Transit, state: &mut JointState) -> Result<(Vec<TamperRecord>, usize), ProtocolError> {
        self.depart();
        let held = (0..=transit.probe).collect();
        let mut channel = Channel::new(state, self.params.spectrum, held);
        let events = self.eve.on_probe_transit(&transit, &mut channel, &mut self.eve_rng)?;
        let injected = channel.injected();
        self.arrive();
        Ok((events, injected))
    }

    /// Moves the channel probes (register indices `0..N`) one at a time
    /// through Eve, Charlie's device and Eve again. Returns Charlie's probe
    /// count and the tamper log.
    pub fn transit_round(&mut self, round: usize, state: &mut JointState, action: CharlieAction) -> Result<(usize, Vec<TamperRecord>), ProtocolError> {
        let n = self.params.n_probes;
        let angle = action.angle(self.params);
        let mut counted = 0;
        let mut events = Vec::new();
        for probe in 0..n {
            let mut transit = Transit {
                round,
                leg: Leg::ToCharlie,
                probe,
                probes_per_round: n,
            };
            let (ev, injected) = self.eve_transit(transit, state)?;
            events.extend(ev);
            counted += 1 + injected;
            state.apply_phase(angle, &self.params.spectrum, &[probe])?;
            transit.leg = Leg::FromCharlie;
            let (ev, _) = self.eve_transit(transit, state)?;
            events.extend(ev);
        }
        Ok((counted, events))
    }

    pub fn publish(&mut self, step: u8, sender: Party, message: Message) {
        let entry = LoggedMessage { step, sender, message };
        if let Some(note) = self.eve.on_classical_message(&entry) {
            self.eve_notes.push(note);
        }
        self.log.push(entry);
    }

    /// Verifies every round selected by `context`, in round order, and
    /// returns the failure count and the abort, if the threshold was reached.
    pub fn run_checks(&mut self, rounds: &mut [RoundRecord], failures_so_far: usize, context: impl Fn(&RoundRecord) -> Option<RevealContext>) -> (usize, Option<Abort>) {
        let mut failures = failures_so_far;
        let mut abort = None;
        for record in rounds.iter_mut() {
            let Some(ctx) = context(record) else { continue };
            let verdict = verify_decoy(record, &ctx);
            if verdict == DecoyCheck::NotADecoy {
                continue;
            }
            record.decoy_check = verdict;
            if verdict == DecoyCheck::Fail {
                failures += 1;
                if abort.is_none() && failures >= self.params.abort_threshold {
                    abort = Some(Abort {
                        round: record.round,
                        reason: AbortReason::DecoyMismatch,
                    });
                }
            }
        }
        (failures, abort)
    }

    pub fn probe_count_abort(&mut self, round: usize, counted: usize) -> Abort {
        self.publish(
            0,
            Party::Charlie,
            Message::ProbeCountViolation {
                round,
                counted,
                expected: self.params.n_probes,
            },
        );
        let abort = Abort {
            round,
            reason: AbortReason::ProbeCount,
        };
        self.publish(0, Party::Charlie, Message::Abort { round, reason: abort.reason });
        abort
    }
}
