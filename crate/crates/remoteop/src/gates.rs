//! Gate constructors used by the protocols.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{phase_exp, GateMatrix};

/// Two-qudit gate |x>|y> -> |x>|x - y mod d>, control first.
/// With the target prepared in |0> this copies the control digit.
pub fn generalized_cnot(d: usize) -> Result<GateMatrix> {
    if d < 2 {
        return Err(Error::Domain(format!("qudit dimension {d} < 2")));
    }
    let dim = d * d;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for x in 0..d {
        for y in 0..d {
            let col = x * d + y;
            let row = x * d + (x + d - y) % d;
            entries[row * dim + col] = Complex64::new(1.0, 0.0);
        }
    }
    GateMatrix::new(dim, entries)
}

/// One-qudit quantum Fourier transform, entries [y][x] = e^{2*pi*i*x*y/d}/sqrt(d).
/// At d = 2 this is the Hadamard matrix.
pub fn qft(d: usize) -> Result<GateMatrix> {
    if d < 2 {
        return Err(Error::Domain(format!("qudit dimension {d} < 2")));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for y in 0..d {
        for x in 0..d {
            entries[y * d + x] = phase_exp((x * y) as i64, d as i64) * scale;
        }
    }
    GateMatrix::new(d, entries)
}

/// Diagonal phase gate sum_x e^{-2*pi*i*x/d} |x><x|; equals sigma_z at d = 2.
pub fn s_gate(d: usize) -> Result<GateMatrix> {
    if d < 2 {
        return Err(Error::Domain(format!("qudit dimension {d} < 2")));
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for x in 0..d {
        entries[x * d + x] = phase_exp(-(x as i64), d as i64);
    }
    GateMatrix::new(d, entries)
}

/// Permutation unitary sum_x |map[x]><x|.
pub fn permutation_gate(map: &[usize]) -> Result<GateMatrix> {
    let dim = map.len();
    let mut seen = vec![false; dim];
    for &y in map {
        if y >= dim || seen[y] {
            return Err(Error::Domain(format!("map {map:?} is not a permutation")));
        }
        seen[y] = true;
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (x, &y) in map.iter().enumerate() {
        entries[y * dim + x] = Complex64::new(1.0, 0.0);
    }
    GateMatrix::new(dim, entries)
}

/// Single-qubit Pauli X.
pub fn pauli_x() -> GateMatrix {
    permutation_gate(&[1, 0]).unwrap()
}

/// Single-qubit Pauli Z.
pub fn pauli_z() -> GateMatrix {
    s_gate(2).unwrap()
}

/// Multi-controlled phase flip on qubits: -1 on the all-ones string.
pub fn multi_controlled_z(num_qubits: usize) -> Result<GateMatrix> {
    if num_qubits < 1 {
        return Err(Error::Domain("multi-controlled Z needs >= 1 qubit".into()));
    }
    let dim = 1usize << num_qubits;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for x in 0..dim {
        let v = if x == dim - 1 { -1.0 } else { 1.0 };
        entries[x * dim + x] = Complex64::new(v, 0.0);
    }
    GateMatrix::new(dim, entries)
}
