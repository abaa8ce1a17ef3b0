//! Two-party protocol execution over one global state vector.
//!
//! Both parties act on the same `StateVector`; "distance" is enforced by an
//! ownership tag per qudit. Every gate and measurement is checked against
//! the acting party's holdings at that instant, every transfer flips tags
//! and charges the ledger, and everything is logged into a transcript.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates;
use crate::restricted::{self, RestrictedOperation};
use crate::state::{GateMatrix, MeasurePolicy, MeasurementOutcome, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }
}

/// Which of the paper's three register layouts a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Bob holds the N permuted qudits, Alice holds the M block qudits.
    Split,
    /// Bob holds all N + M qudits; the block qudits travel with the ancillas.
    BobHoldsAll,
    /// M = 0: a pure phase-permutation on Bob's N qudits.
    MZero,
}

/// Directional counters of communicated resources. Counters only increase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ResourceVector {
    pub qudits_b_to_a: u64,
    pub qudits_a_to_b: u64,
    pub cbits_b_to_a: u64,
    pub cbits_a_to_b: u64,
    pub ebits: u64,
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q[b->a]={} q[a->b]={} c[b->a]={} c[a->b]={} ebits={}",
            self.qudits_b_to_a, self.qudits_a_to_b, self.cbits_b_to_a, self.cbits_a_to_b, self.ebits
        )
    }
}

/// One logged protocol event with a ledger snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct EventRecord {
    pub step: u32,
    pub party: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<u64>,
    pub ledger: ResourceVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} [{}] {}", self.step, self.party, self.kind)?;
        if let Some(p) = &self.payload {
            write!(f, " {p}")?;
        }
        if let Some(t) = &self.targets {
            write!(f, " targets={t:?}")?;
        }
        if let Some(o) = self.outcome {
            write!(f, " outcome={o}")?;
        }
        write!(f, " | {}", self.ledger)
    }
}

/// Ordered log of a protocol run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Transcript {
    pub events: Vec<EventRecord>,
}

impl Transcript {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            version: u32,
            events: &'a [EventRecord],
        }
        serde_json::to_string_pretty(&Doc {
            version: 1,
            events: &self.events,
        })
        .expect("serialization cannot fail")
    }
}

/// Number of classical bits needed to name one of d^n outcomes.
pub fn cbits_needed(d: usize, n: usize) -> u64 {
    let outcomes = d.pow(n as u32) as u64;
    if outcomes <= 1 {
        0
    } else {
        64 - (outcomes - 1).leading_zeros() as u64
    }
}

/// Encode an outcome value into the minimal bit string, most significant first.
pub fn encode_outcome(value: u64, d: usize, n: usize) -> Vec<bool> {
    let bits = cbits_needed(d, n);
    (0..bits).rev().map(|i| (value >> i) & 1 == 1).collect()
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn format_state(state: &StateVector, max_terms: usize) -> String {
    let d = state.dimension();
    let n = state.num_qudits();
    let mut terms: Vec<String> = Vec::new();
    let mut shown = 0;
    let mut nonzero = 0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm() < 1e-9 {
            continue;
        }
        nonzero += 1;
        if shown >= max_terms {
            continue;
        }
        shown += 1;
        let mut label = String::new();
        let mut rem = i;
        for q in (0..n).rev() {
            let _ = q;
            label.insert(0, char::from_digit((rem % d) as u32, 10).unwrap());
            rem /= d;
        }
        terms.push(format!("({:+.4}{:+.4}i)|{label}>", a.re, a.im));
    }
    let mut out = terms.join(" + ");
    if nonzero > shown {
        out.push_str(&format!(" + ... ({} more terms)", nonzero - shown));
    }
    out
}

/// A live protocol run: global state, ownership tags, transcript, ledger.
#[derive(Debug, Clone)]
pub struct Session {
    state: StateVector,
    owner: Vec<Party>,
    transcript: Transcript,
    ledger: ResourceVector,
    step: u32,
    record_states: bool,
    rng: ChaCha8Rng,
}

impl Session {
    pub fn new(state: StateVector, owner: Vec<Party>, seed: u64) -> Result<Self> {
        if owner.len() != state.num_qudits() {
            return Err(Error::Domain(format!(
                "ownership list length {} does not match register size {}",
                owner.len(),
                state.num_qudits()
            )));
        }
        Ok(Self {
            state,
            owner,
            transcript: Transcript::default(),
            ledger: ResourceVector::default(),
            step: 0,
            record_states: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn record_states(&mut self, yes: bool) {
        self.record_states = yes;
    }

    pub fn set_step(&mut self, step: u32) {
        self.step = step;
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn owner_of(&self, qudit: usize) -> Party {
        self.owner[qudit]
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn ledger(&self) -> ResourceVector {
        self.ledger
    }

    fn snapshot(&self) -> Option<String> {
        self.record_states.then(|| format_state(&self.state, 8))
    }

    fn log(
        &mut self,
        party: &str,
        kind: &str,
        targets: Option<Vec<usize>>,
        payload: Option<String>,
        outcome: Option<u64>,
    ) {
        let record = EventRecord {
            step: self.step,
            party: party.to_string(),
            kind: kind.to_string(),
            targets,
            payload,
            outcome,
            ledger: self.ledger,
            state: self.snapshot(),
        };
        self.transcript.events.push(record);
    }

    fn check_owned(&self, party: Party, targets: &[usize]) -> Result<()> {
        for &t in targets {
            if t >= self.owner.len() {
                return Err(Error::Domain(format!(
                    "qudit {t} out of range (register size {})",
                    self.owner.len()
                )));
            }
            if self.owner[t] != party {
                return Err(Error::Locality(format!(
                    "{} acted on qudit {t} owned by {}",
                    party.label(),
                    party.other().label()
                )));
            }
        }
        Ok(())
    }

    /// A party introduces a fresh qudit in basis state |label>, appended to
    /// the right end of the register. Returns its index.
    pub fn append(&mut self, party: Party, label: usize) -> Result<usize> {
        let d = self.state.dimension();
        self.state = self.state.tensor(&StateVector::basis_state(d, 1, label)?)?;
        self.owner.push(party);
        let idx = self.owner.len() - 1;
        self.log(
            party.label(),
            "prepare",
            Some(vec![idx]),
            Some(format!("|{label}>")),
            None,
        );
        Ok(idx)
    }

    /// Apply a gate locally; every target must belong to the acting party.
    pub fn apply(
        &mut self,
        party: Party,
        name: &str,
        gate: &GateMatrix,
        targets: &[usize],
    ) -> Result<()> {
        self.check_owned(party, targets)?;
        self.state = self.state.apply_gate(gate, targets)?;
        self.log(
            party.label(),
            "gate",
            Some(targets.to_vec()),
            Some(name.to_string()),
            None,
        );
        Ok(())
    }

    /// Send qudits to the other party; charges the ledger per qudit.
    pub fn transfer(&mut self, from: Party, indices: &[usize]) -> Result<()> {
        self.check_owned(from, indices)?;
        for &i in indices {
            self.owner[i] = from.other();
        }
        match from {
            Party::Bob => self.ledger.qudits_b_to_a += indices.len() as u64,
            Party::Alice => self.ledger.qudits_a_to_b += indices.len() as u64,
        }
        self.log(
            from.label(),
            "transfer",
            Some(indices.to_vec()),
            Some(format!(
                "{} qudit(s) {} -> {}",
                indices.len(),
                from.label(),
                from.other().label()
            )),
            None,
        );
        Ok(())
    }

    /// Send classical bits to the other party.
    pub fn send_cbits(&mut self, from: Party, bits: &[bool]) {
        match from {
            Party::Bob => self.ledger.cbits_b_to_a += bits.len() as u64,
            Party::Alice => self.ledger.cbits_a_to_b += bits.len() as u64,
        }
        self.log(
            from.label(),
            "cbits",
            None,
            Some(format!("bits {}", bits_string(bits))),
            None,
        );
    }

    /// Measure targets held by `party`. Branching is left to the caller:
    /// use `fork` to continue a branch, then `log_measurement` on the fork.
    pub fn measure(
        &self,
        party: Party,
        targets: &[usize],
        policy: MeasurePolicy,
    ) -> Result<Vec<(MeasurementOutcome, StateVector)>> {
        self.check_owned(party, targets)?;
        self.state.measure(targets, policy)
    }

    /// Continue this run with the given post-measurement state.
    pub fn fork(&self, state: StateVector) -> Session {
        let mut s = self.clone();
        s.state = state;
        s
    }

    pub fn log_measurement(&mut self, party: Party, outcome: &MeasurementOutcome) {
        self.log(
            party.label(),
            "measure",
            Some(outcome.qudit_indices.clone()),
            Some(format!("p={:.6}", outcome.probability)),
            Some(outcome.value),
        );
    }

    /// Drop projected qudits from the register. Indices above the removed
    /// positions shift down.
    pub fn discard(&mut self, party: Party, targets: &[usize]) -> Result<()> {
        self.check_owned(party, targets)?;
        self.state = self.state.discard(targets)?;
        let mut sorted: Vec<usize> = targets.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for i in &sorted {
            self.owner.remove(*i);
        }
        self.log(party.label(), "discard", Some(targets.to_vec()), None, None);
        Ok(())
    }

    /// Mint one Bell pair out-of-band: one half to each party, charged as
    /// one ebit. Returns (sender_half, receiver_half) with the receiver
    /// half appended last.
    fn mint_bell_pair(&mut self, source: Party) -> Result<(usize, usize)> {
        let d = self.state.dimension();
        if d != 2 {
            return Err(Error::Domain("entanglement resources are qubit-only".into()));
        }
        self.state = self
            .state
            .tensor(&StateVector::basis_state(2, 2, 0)?)?;
        let e1 = self.owner.len();
        let e2 = e1 + 1;
        self.owner.push(source);
        self.owner.push(source.other());
        // pre-shared entanglement is established outside the metered channel
        self.state = self.state.apply_gate(&gates::qft(2)?, &[e1])?;
        self.state = self.state.apply_gate(&gates::generalized_cnot(2)?, &[e1, e2])?;
        self.ledger.ebits += 1;
        self.log(
            "channel",
            "ebit",
            Some(vec![e1, e2]),
            Some("bell pair shared".to_string()),
            None,
        );
        Ok((e1, e2))
    }

    /// Teleport one qubit to the other party via a freshly minted Bell pair.
    /// The measurement is sampled from the session generator; the outcome is
    /// irrelevant to the final state once corrections are applied. Returns
    /// the index now holding the teleported qubit (the register shrinks by
    /// one below it).
    pub fn teleport(&mut self, source: Party, qudit: usize) -> Result<usize> {
        self.check_owned(source, &[qudit])?;
        let receiver = source.other();
        let (e1, e2) = self.mint_bell_pair(source)?;
        self.apply(source, "CNOT", &gates::generalized_cnot(2)?, &[qudit, e1])?;
        self.apply(source, "H", &gates::qft(2)?, &[qudit])?;
        let seed = self.rng.gen::<u64>();
        let branches = self.measure(source, &[qudit, e1], MeasurePolicy::Sample { seed })?;
        let (outcome, post) = branches.into_iter().next().expect("sample yields one branch");
        self.state = post;
        self.log_measurement(source, &outcome);
        self.discard(source, &[qudit, e1])?;
        let e2 = e2 - 2; // qudit and e1 both sit below e2
        let bits = [(outcome.value >> 1) & 1 == 1, outcome.value & 1 == 1];
        self.send_cbits(source, &bits);
        if bits[1] {
            self.apply(receiver, "X", &gates::pauli_x(), &[e2])?;
        }
        if bits[0] {
            self.apply(receiver, "Z", &gates::pauli_z(), &[e2])?;
        }
        Ok(e2)
    }
}

fn validate_op_input(op: &RestrictedOperation, input: &StateVector) -> Result<()> {
    if input.dimension() != op.dimension() {
        return Err(Error::Domain(format!(
            "input dimension {} does not match operation dimension {}",
            input.dimension(),
            op.dimension()
        )));
    }
    if input.num_qudits() != op.num_qudits() {
        return Err(Error::Domain(format!(
            "input has {} qudits but the operation acts on {}",
            input.num_qudits(),
            op.num_qudits()
        )));
    }
    Ok(())
}

/// Outcome of a branching protocol run.
pub type BranchedRun = (
    Vec<(MeasurementOutcome, StateVector)>,
    Transcript,
    ResourceVector,
);

/// Implement a restricted operation on the joint register without prior
/// entanglement: ancilla copies, ancilla transfer, remote application,
/// Fourier + measurement, a classical message, and Bob's corrections.
///
/// Input layout is B_1..B_N A_1..A_M. Every returned branch carries the
/// final state on that same layout.
pub fn run_remote_restricted(
    op: &RestrictedOperation,
    case: Case,
    input: &StateVector,
    policy: MeasurePolicy,
) -> Result<BranchedRun> {
    run_remote_restricted_recorded(op, case, input, policy, false)
}

/// Same as [`run_remote_restricted`], optionally embedding truncated
/// amplitude listings into every transcript event (for demo output).
pub fn run_remote_restricted_recorded(
    op: &RestrictedOperation,
    case: Case,
    input: &StateVector,
    policy: MeasurePolicy,
    record_states: bool,
) -> Result<BranchedRun> {
    validate_op_input(op, input)?;
    let d = op.dimension();
    let n = op.n_perm();
    let m = op.m_block();
    if case == Case::MZero && m != 0 {
        return Err(Error::Domain(format!(
            "the M = 0 case requires a phase-permutation operation, got M = {m}"
        )));
    }
    let a_start = n;
    let a_owner = match case {
        Case::BobHoldsAll => Party::Bob,
        Case::Split | Case::MZero => Party::Alice,
    };
    let mut owner = vec![Party::Bob; n];
    owner.extend(std::iter::repeat(a_owner).take(m));
    let mut session = Session::new(input.clone(), owner, 0)?;
    session.record_states(record_states);

    // (1) ancilla copies of Bob's register
    session.set_step(1);
    let gcnot = gates::generalized_cnot(d)?;
    let c_start = n + m;
    for i in 0..n {
        let c = session.append(Party::Bob, 0)?;
        debug_assert_eq!(c, c_start + i);
        session.apply(Party::Bob, "GCNOT", &gcnot, &[i, c])?;
    }

    // (2) ancillas travel to Alice; in the all-at-Bob layout the block
    // qudits travel with them
    session.set_step(2);
    let c_indices: Vec<usize> = (c_start..c_start + n).collect();
    let mut outbound = c_indices.clone();
    if case == Case::BobHoldsAll {
        outbound.extend(a_start..a_start + m);
    }
    session.transfer(Party::Bob, &outbound)?;

    // (3) Alice applies the operation to ancillas + block qudits
    session.set_step(3);
    let mut op_targets = c_indices.clone();
    op_targets.extend(a_start..a_start + m);
    session.apply(Party::Alice, "U(f,G)", &restricted::build_matrix(op), &op_targets)?;

    // (4) Fourier transform and measurement of each ancilla
    session.set_step(4);
    let qft = gates::qft(d)?;
    for &c in &c_indices {
        session.apply(Party::Alice, "QFT", &qft, &[c])?;
    }
    let branches = session.measure(Party::Alice, &c_indices, policy)?;

    let s_corr = gates::s_gate(d)?;
    let v_gate = gates::permutation_gate(op.permutation().as_slice())?;
    let mut results = Vec::with_capacity(branches.len());
    let mut first: Option<(Transcript, ResourceVector)> = None;
    for (outcome, post) in branches {
        let mut run = session.fork(post);
        run.log_measurement(Party::Alice, &outcome);
        run.discard(Party::Alice, &c_indices)?;

        // (5) block qudits home (if they travelled) and the classical message
        run.set_step(5);
        if case == Case::BobHoldsAll && m > 0 {
            let a_indices: Vec<usize> = (a_start..a_start + m).collect();
            run.transfer(Party::Alice, &a_indices)?;
        }
        let bits = encode_outcome(outcome.value, d, n);
        run.send_cbits(Party::Alice, &bits);

        // (6) Bob's corrections: V(f), then the phase gate per digit of k
        run.set_step(6);
        let b_indices: Vec<usize> = (0..n).collect();
        run.apply(Party::Bob, "V(f)", &v_gate, &b_indices)?;
        let mut rem = outcome.value;
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            digits[i] = (rem % d as u64) as usize;
            rem /= d as u64;
        }
        for (i, &k) in digits.iter().enumerate() {
            if k > 0 {
                run.apply(Party::Bob, &format!("S^{k}"), &s_corr.pow(k), &[i])?;
            }
        }

        if let Some((_, ledger)) = &first {
            debug_assert_eq!(*ledger, run.ledger());
        } else {
            first = Some((run.transcript().clone(), run.ledger()));
        }
        results.push((outcome, run.state().clone()));
    }
    let (transcript, ledger) = first.ok_or_else(|| {
        Error::Domain("measurement produced no branches above the probability floor".into())
    })?;
    Ok((results, transcript, ledger))
}

/// Baseline: Bob sends everything to Alice, she applies the operation
/// locally and sends everything back. No ancillas, no classical bits.
pub fn run_simple_swap(
    op: &RestrictedOperation,
    input: &StateVector,
) -> Result<(StateVector, Transcript, ResourceVector)> {
    validate_op_input(op, input)?;
    let total = op.num_qudits();
    let mut session = Session::new(input.clone(), vec![Party::Bob; total], 0)?;
    let all: Vec<usize> = (0..total).collect();
    session.set_step(1);
    session.transfer(Party::Bob, &all)?;
    session.set_step(2);
    session.apply(Party::Alice, "U(f,G)", &restricted::build_matrix(op), &all)?;
    session.set_step(3);
    session.transfer(Party::Alice, &all)?;
    Ok((
        session.state().clone(),
        session.transcript().clone(),
        session.ledger(),
    ))
}

/// Baseline: bidirectional quantum state teleportation. All qubits are
/// teleported to Alice, the operation is applied, and they are teleported
/// back. Qubits only.
pub fn run_bqst(
    op: &RestrictedOperation,
    input: &StateVector,
    seed: u64,
) -> Result<(StateVector, Transcript, ResourceVector)> {
    validate_op_input(op, input)?;
    if op.dimension() != 2 {
        return Err(Error::Domain(
            "teleportation baseline is implemented for qubits only".into(),
        ));
    }
    let total = op.num_qudits();
    let mut session = Session::new(input.clone(), vec![Party::Bob; total], seed)?;
    session.set_step(1);
    // teleporting position 0 repeatedly cycles the register while keeping
    // the logical order: after `total` rounds qubit i is back at index i
    for _ in 0..total {
        session.teleport(Party::Bob, 0)?;
    }
    session.set_step(2);
    let all: Vec<usize> = (0..total).collect();
    session.apply(Party::Alice, "U(f,G)", &restricted::build_matrix(op), &all)?;
    session.set_step(3);
    for _ in 0..total {
        session.teleport(Party::Alice, 0)?;
    }
    Ok((
        session.state().clone(),
        session.transcript().clone(),
        session.ledger(),
    ))
}

/// Reconstruction of the entanglement-free multi-controlled-U protocol:
/// Bob folds his controls into one ancilla, sends it, Alice applies the
/// controlled gate and measures the ancilla in the X basis, and Bob undoes
/// the leftover phase with a multi-controlled Z.
///
/// Input layout: controls 0..num_controls at Bob, target at index
/// num_controls at Alice.
pub fn run_yang_cu(
    num_controls: usize,
    u: &GateMatrix,
    input: &StateVector,
    policy: MeasurePolicy,
) -> Result<BranchedRun> {
    if num_controls < 1 {
        return Err(Error::Domain("need at least one control qubit".into()));
    }
    if input.dimension() != 2 {
        return Err(Error::Domain("controlled-U protocol is qubit-only".into()));
    }
    if input.num_qudits() != num_controls + 1 {
        return Err(Error::Domain(format!(
            "input has {} qubits, expected {}",
            input.num_qudits(),
            num_controls + 1
        )));
    }
    let target = num_controls;
    let mut owner = vec![Party::Bob; num_controls];
    owner.push(Party::Alice);
    let mut session = Session::new(input.clone(), owner, 0)?;

    session.set_step(1);
    let anc = session.append(Party::Bob, 0)?;
    let mut mcx_targets: Vec<usize> = (0..num_controls).collect();
    mcx_targets.push(anc);
    let mcx = restricted::build_matrix(&restricted::controlled_u(num_controls, &gates::pauli_x())?);
    session.apply(Party::Bob, "MCX", &mcx, &mcx_targets)?;

    session.set_step(2);
    session.transfer(Party::Bob, &[anc])?;

    session.set_step(3);
    let cu = restricted::build_matrix(&restricted::controlled_u(1, u)?);
    session.apply(Party::Alice, "CU", &cu, &[anc, target])?;

    session.set_step(4);
    session.apply(Party::Alice, "H", &gates::qft(2)?, &[anc])?;
    let branches = session.measure(Party::Alice, &[anc], policy)?;

    let mcz = gates::multi_controlled_z(num_controls)?;
    let controls: Vec<usize> = (0..num_controls).collect();
    let mut results = Vec::with_capacity(branches.len());
    let mut first: Option<(Transcript, ResourceVector)> = None;
    for (outcome, post) in branches {
        let mut run = session.fork(post);
        run.log_measurement(Party::Alice, &outcome);
        run.discard(Party::Alice, &[anc])?;
        run.set_step(5);
        run.send_cbits(Party::Alice, &[outcome.value == 1]);
        run.set_step(6);
        if outcome.value == 1 {
            run.apply(Party::Bob, "MCZ", &mcz, &controls)?;
        }
        if let Some((_, ledger)) = &first {
            debug_assert_eq!(*ledger, run.ledger());
        } else {
            first = Some((run.transcript().clone(), run.ledger()));
        }
        results.push((outcome, run.state().clone()));
    }
    let (transcript, ledger) = first.ok_or_else(|| {
        Error::Domain("measurement produced no branches above the probability floor".into())
    })?;
    Ok((results, transcript, ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restricted::{build_matrix, random_restricted, RestrictedOperation};
    use crate::state::{equal_states, EqualMode};

    fn oracle_apply(op: &RestrictedOperation, input: &StateVector) -> StateVector {
        let amps = build_matrix(op).matvec(input.amplitudes());
        StateVector::from_amplitudes(input.dimension(), input.num_qudits(), amps).unwrap()
    }

    #[test]
    fn u_diag_case_three_both_branches() {
        let op = RestrictedOperation::u_diag(std::f64::consts::FRAC_PI_4);
        let h = gates::qft(2).unwrap();
        let input = StateVector::basis_state(2, 1, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap();
        let (branches, _t, ledger) =
            run_remote_restricted(&op, Case::MZero, &input, MeasurePolicy::EnumerateAll).unwrap();
        assert_eq!(branches.len(), 2);
        let expect = oracle_apply(&op, &input);
        for (_, st) in &branches {
            assert!(equal_states(st, &expect, EqualMode::Exact, 1e-10));
        }
        assert_eq!(
            ledger,
            ResourceVector {
                qudits_b_to_a: 1,
                cbits_a_to_b: 1,
                ..Default::default()
            }
        );
    }

    #[test]
    fn identity_operation_still_charges_full_cost() {
        let op = RestrictedOperation::identity(2, 2, 0).unwrap();
        let input = StateVector::random(3, 2, 2).unwrap();
        let (branches, _t, ledger) =
            run_remote_restricted(&op, Case::MZero, &input, MeasurePolicy::EnumerateAll).unwrap();
        for (_, st) in &branches {
            assert!(equal_states(st, &input, EqualMode::Exact, 1e-10));
        }
        assert_eq!(ledger.qudits_b_to_a, 2);
        assert_eq!(ledger.cbits_a_to_b, 2);
    }

    #[test]
    fn qutrit_split_case_all_nine_branches() {
        let op = random_restricted(17, 3, 2, 1).unwrap();
        let input = StateVector::random(21, 3, 3).unwrap();
        let (branches, _t, ledger) =
            run_remote_restricted(&op, Case::Split, &input, MeasurePolicy::EnumerateAll).unwrap();
        assert_eq!(branches.len(), 9);
        let expect = oracle_apply(&op, &input);
        for (_, st) in &branches {
            assert!(st.max_abs_diff(&expect) < 1e-10);
        }
        assert_eq!(ledger.qudits_b_to_a, 2);
        assert_eq!(ledger.qudits_a_to_b, 0);
        // ceil(2 * log2(3)) = 4
        assert_eq!(ledger.cbits_a_to_b, 4);
        assert_eq!(ledger.ebits, 0);
    }

    #[test]
    fn bob_holds_all_ledger() {
        let op = random_restricted(5, 2, 2, 1).unwrap();
        let input = StateVector::random(6, 2, 3).unwrap();
        let (branches, _t, ledger) =
            run_remote_restricted(&op, Case::BobHoldsAll, &input, MeasurePolicy::EnumerateAll)
                .unwrap();
        let expect = oracle_apply(&op, &input);
        for (_, st) in &branches {
            assert!(st.max_abs_diff(&expect) < 1e-10);
        }
        assert_eq!(ledger.qudits_b_to_a, 3);
        assert_eq!(ledger.qudits_a_to_b, 1);
        assert_eq!(ledger.cbits_a_to_b, 2);
        assert_eq!(ledger.ebits, 0);
    }

    #[test]
    fn forced_branch_matches_enumerated_branch() {
        let op = random_restricted(8, 2, 2, 0).unwrap();
        let input = StateVector::random(9, 2, 2).unwrap();
        let (forced, _t, _l) =
            run_remote_restricted(&op, Case::MZero, &input, MeasurePolicy::Forced(3)).unwrap();
        assert_eq!(forced.len(), 1);
        assert_eq!(forced[0].0.value, 3);
        let expect = oracle_apply(&op, &input);
        assert!(forced[0].1.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn mzero_rejects_block_operations() {
        let op = random_restricted(4, 2, 1, 1).unwrap();
        let input = StateVector::random(2, 2, 2).unwrap();
        let err = run_remote_restricted(&op, Case::MZero, &input, MeasurePolicy::EnumerateAll);
        assert!(err.is_err());
    }

    #[test]
    fn transcript_locality_holds() {
        let op = random_restricted(13, 2, 2, 1).unwrap();
        let input = StateVector::random(14, 2, 3).unwrap();
        let (_b, transcript, _l) =
            run_remote_restricted(&op, Case::Split, &input, MeasurePolicy::Forced(0)).unwrap();
        // gates are logged only after the ownership check passed; verify the
        // log shape instead: every gate/measure event names a party
        for e in &transcript.events {
            if e.kind == "gate" || e.kind == "measure" {
                assert!(e.party == "alice" || e.party == "bob");
                assert!(e.targets.is_some());
            }
        }
    }

    #[test]
    fn locality_violation_is_rejected() {
        let input = StateVector::random(1, 2, 2).unwrap();
        let mut session =
            Session::new(input, vec![Party::Bob, Party::Alice], 0).unwrap();
        let err = session.apply(Party::Alice, "X", &gates::pauli_x(), &[0]);
        assert!(matches!(err, Err(Error::Locality(_))));
    }

    #[test]
    fn simple_swap_state_and_ledger() {
        let op = random_restricted(30, 2, 1, 1).unwrap();
        let input = StateVector::random(31, 2, 2).unwrap();
        let (state, _t, ledger) = run_simple_swap(&op, &input).unwrap();
        let expect = oracle_apply(&op, &input);
        assert!(state.max_abs_diff(&expect) < 1e-10);
        assert_eq!(ledger.qudits_b_to_a, 2);
        assert_eq!(ledger.qudits_a_to_b, 2);
        assert_eq!(ledger.cbits_b_to_a + ledger.cbits_a_to_b, 0);
        assert_eq!(ledger.ebits, 0);
    }

    #[test]
    fn teleport_plus_state() {
        let h = gates::qft(2).unwrap();
        let input = StateVector::basis_state(2, 1, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap();
        let mut session = Session::new(input.clone(), vec![Party::Bob], 123).unwrap();
        let idx = session.teleport(Party::Bob, 0).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(session.owner_of(0), Party::Alice);
        assert!(session.state().max_abs_diff(&input) < 1e-10);
        let ledger = session.ledger();
        assert_eq!(ledger.ebits, 1);
        assert_eq!(ledger.cbits_b_to_a, 2);
        assert_eq!(ledger.cbits_a_to_b, 0);
    }

    #[test]
    fn teleport_preserves_entanglement_with_spectators() {
        // Bell pair between qubits 0 and 1; teleport qubit 1
        let h = gates::qft(2).unwrap();
        let cnot = gates::generalized_cnot(2).unwrap();
        let bell = StateVector::basis_state(2, 2, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap()
            .apply_gate(&cnot, &[0, 1])
            .unwrap();
        for seed in [0u64, 1, 2, 3, 99] {
            let mut session =
                Session::new(bell.clone(), vec![Party::Bob, Party::Bob], seed).unwrap();
            session.teleport(Party::Bob, 1).unwrap();
            assert!(session.state().max_abs_diff(&bell) < 1e-10);
        }
    }

    #[test]
    fn bqst_matches_oracle_and_counts() {
        let op = random_restricted(44, 2, 2, 1).unwrap();
        let input = StateVector::random(45, 2, 3).unwrap();
        let (state, _t, ledger) = run_bqst(&op, &input, 77).unwrap();
        let expect = oracle_apply(&op, &input);
        assert!(state.max_abs_diff(&expect) < 1e-10);
        assert_eq!(ledger.ebits, 6);
        assert_eq!(ledger.cbits_b_to_a, 6);
        assert_eq!(ledger.cbits_a_to_b, 6);
        assert_eq!(ledger.qudits_b_to_a, 0);
        assert_eq!(ledger.qudits_a_to_b, 0);
    }

    #[test]
    fn bqst_single_qubit() {
        let op = RestrictedOperation::u_diag(1.1);
        let input = StateVector::random(50, 2, 1).unwrap();
        let (state, _t, ledger) = run_bqst(&op, &input, 1).unwrap();
        let expect = oracle_apply(&op, &input);
        assert!(state.max_abs_diff(&expect) < 1e-10);
        assert_eq!(ledger.ebits, 2);
        assert_eq!(ledger.cbits_b_to_a, 2);
        assert_eq!(ledger.cbits_a_to_b, 2);
    }

    #[test]
    fn bqst_rejects_qudits() {
        let op = random_restricted(3, 3, 1, 0).unwrap();
        let input = StateVector::random(4, 3, 1).unwrap();
        assert!(run_bqst(&op, &input, 0).is_err());
    }

    #[test]
    fn yang_cu_creates_bell_state() {
        let h = gates::qft(2).unwrap();
        let input = StateVector::basis_state(2, 2, 0)
            .unwrap()
            .apply_gate(&h, &[0])
            .unwrap();
        let (branches, _t, ledger) =
            run_yang_cu(1, &gates::pauli_x(), &input, MeasurePolicy::EnumerateAll).unwrap();
        assert_eq!(branches.len(), 2);
        let cnot = gates::generalized_cnot(2).unwrap();
        let expect = input.apply_gate(&cnot, &[0, 1]).unwrap();
        for (_, st) in &branches {
            assert!(st.max_abs_diff(&expect) < 1e-10);
        }
        assert_eq!(ledger.qudits_b_to_a, 1);
        assert_eq!(ledger.cbits_a_to_b, 1);
        assert_eq!(ledger.ebits, 0);
    }

    #[test]
    fn yang_cu_controls_off_leaves_target() {
        let input = StateVector::random(60, 2, 1).unwrap();
        let zero = StateVector::basis_state(2, 2, 0).unwrap();
        let joint = zero.tensor(&input).unwrap();
        let (branches, _t, _l) =
            run_yang_cu(2, &gates::pauli_x(), &joint, MeasurePolicy::EnumerateAll).unwrap();
        for (_, st) in &branches {
            assert!(st.max_abs_diff(&joint) < 1e-10);
        }
    }

    #[test]
    fn cbits_needed_matches_ceiling_formula() {
        assert_eq!(cbits_needed(2, 3), 3);
        assert_eq!(cbits_needed(3, 2), 4); // ceil(2 log2 3) = 4
        assert_eq!(cbits_needed(3, 1), 2);
        assert_eq!(cbits_needed(5, 2), 5); // ceil(2 log2 5) = 5
    }
}
