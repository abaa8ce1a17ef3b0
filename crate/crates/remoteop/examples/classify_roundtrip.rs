//! Build a random block-permutation operation, serialize it, and recover
//! its structure from the dense matrix.

use remoteop::gates;
use remoteop::{build_matrix, classify, random_restricted, RestrictedOperation};

fn main() {
    let op = random_restricted(2718, 2, 2, 1).unwrap();
    let matrix = build_matrix(&op);
    println!("built an 8x8 matrix from f = {:?}", op.permutation().as_slice());

    let recovered = classify(&matrix, 2, 2, 1).unwrap().expect("block structure");
    println!("classify recovered f = {:?}", recovered.permutation().as_slice());
    println!(
        "max block deviation: {:.3e}",
        recovered
            .blocks()
            .iter()
            .zip(op.blocks())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0f64, f64::max)
    );

    // a generic unitary has no such structure
    let hadamard = gates::qft(2).unwrap();
    println!(
        "classify(Hadamard): {:?}",
        classify(&hadamard, 2, 1, 0).unwrap().map(|_| ())
    );

    let json = op.to_json();
    println!("\nserialized fixture ({} bytes):", json.len());
    println!("{}", &json[..120.min(json.len())]);
    let back = RestrictedOperation::from_json(&json).unwrap();
    assert_eq!(back.permutation(), op.permutation());
    println!("round-trip through JSON preserved the operation");
}
