//! Teleport one half of an entangled pair and watch the joint state survive.

use remoteop::gates;
use remoteop::protocol::{Party, Session};
use remoteop::state::StateVector;

fn main() {
    // Bell pair between Bob's two qubits
    let h = gates::qft(2).unwrap();
    let cnot = gates::generalized_cnot(2).unwrap();
    let bell = StateVector::basis_state(2, 2, 0)
        .unwrap()
        .apply_gate(&h, &[0])
        .unwrap()
        .apply_gate(&cnot, &[0, 1])
        .unwrap();

    let mut session = Session::new(bell.clone(), vec![Party::Bob, Party::Bob], 5).unwrap();
    let new_index = session.teleport(Party::Bob, 1).unwrap();

    println!("teleported qubit now at index {new_index}, owned by alice");
    println!(
        "joint state deviation after teleport: {:.3e}",
        session.state().max_abs_diff(&bell)
    );
    println!("ledger: {}", session.ledger());
    println!("\ntranscript:");
    print!("{}", session.transcript().to_text());
}
