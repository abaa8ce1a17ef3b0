//! Measured communication ledgers of the four ways to get Alice's
//! operation onto Bob's qubits, on the same random operation.

use remoteop::gates;
use remoteop::state::{MeasurePolicy, StateVector};
use remoteop::{
    random_restricted, run_bqst, run_remote_restricted, run_simple_swap, run_yang_cu, Case,
};

fn main() {
    let (n, m) = (2, 1);
    let op = random_restricted(1, 2, n, m).unwrap();
    let input = StateVector::random(2, 2, n + m).unwrap();

    let (_b, _t, ours) =
        run_remote_restricted(&op, Case::BobHoldsAll, &input, MeasurePolicy::Forced(0)).unwrap();
    let (_s, _t, swap) = run_simple_swap(&op, &input).unwrap();
    let (_s, _t, bqst) = run_bqst(&op, &input, 3).unwrap();

    println!("implementing a random U(f,G) with N={n}, M={m}, all qubits at Bob:");
    println!("  ancilla protocol : {ours}");
    println!("  send-everything  : {swap}");
    println!("  teleport-back-and-forth: {bqst}");

    let cu_input = StateVector::random(4, 2, 3).unwrap();
    let (_b, _t, yang) =
        run_yang_cu(2, &gates::pauli_x(), &cu_input, MeasurePolicy::Forced(0)).unwrap();
    println!("\nToffoli with 2 controls at Bob, target at Alice:");
    println!("  single-ancilla protocol: {yang}");
}
