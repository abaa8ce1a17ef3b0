//! Remote implementation of a qutrit operation: d = 3, N = 2 permuted
//! qutrits at Bob, M = 1 block qutrit at Alice. Enumerates all nine
//! measurement branches and shows that every one lands on the same state.

use remoteop::state::{MeasurePolicy, StateVector};
use remoteop::{build_matrix, random_restricted, run_remote_restricted, Case};

fn main() {
    let d = 3;
    let (n, m) = (2, 1);
    let op = random_restricted(42, d, n, m).unwrap();
    let input = StateVector::random(43, d, n + m).unwrap();

    let (branches, _transcript, ledger) =
        run_remote_restricted(&op, Case::Split, &input, MeasurePolicy::EnumerateAll).unwrap();

    let expect_amps = build_matrix(&op).matvec(input.amplitudes());
    let expect = StateVector::from_amplitudes(d, n + m, expect_amps).unwrap();

    println!("d={d} N={n} M={m}, permutation f = {:?}", op.permutation().as_slice());
    println!("{} measurement branches:", branches.len());
    for (outcome, state) in &branches {
        println!(
            "  k={} (p={:.4}) -> deviation from oracle {:.3e}",
            outcome.value,
            outcome.probability,
            state.max_abs_diff(&expect)
        );
    }
    println!("ledger: {ledger}");
    println!("(2 qutrits forward, ceil(2 log2 3) = 4 classical bits back, no ebits)");
}
