//! The six-step remote implementation of a diagonal one-qubit operation,
//! printed as a full transcript.
//!
//! Bob holds one qubit in a superposition; Alice holds the device for
//! U = diag(e^{i pi/4}, e^{-i pi/4}). One qubit travels to Alice, one
//! classical bit travels back, and the operation lands on Bob's qubit.

use remoteop::protocol::run_remote_restricted_recorded;
use remoteop::state::{MeasurePolicy, StateVector};
use remoteop::{build_matrix, Case, RestrictedOperation};

fn main() {
    let op = RestrictedOperation::u_diag(std::f64::consts::FRAC_PI_4);
    let plus = StateVector::from_amplitudes(
        2,
        1,
        vec![
            num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ],
    )
    .unwrap();

    let (branches, transcript, ledger) = run_remote_restricted_recorded(
        &op,
        Case::MZero,
        &plus,
        MeasurePolicy::Sample { seed: 7 },
        true,
    )
    .unwrap();

    for event in &transcript.events {
        println!("{event}");
        if let Some(state) = &event.state {
            println!("    state: {state}");
        }
    }

    let expect_amps = build_matrix(&op).matvec(plus.amplitudes());
    let expect = StateVector::from_amplitudes(2, 1, expect_amps).unwrap();
    let (outcome, final_state) = &branches[0];
    println!("\nmeasured k = {}", outcome.value);
    println!("ledger: {ledger}");
    println!(
        "deviation from U|psi>: {:.3e}",
        final_state.max_abs_diff(&expect)
    );
}
