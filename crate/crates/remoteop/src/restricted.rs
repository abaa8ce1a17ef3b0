//! Block-permutation operations: construction, random sampling,
//! classification, and the special instances used as baselines.
//!
//! An operation here is a d^N x d^N block matrix with exactly one nonzero
//! d^M x d^M unitary block per block-row and block-column, the block
//! positions given by a permutation f. The M = 0 case degenerates to a
//! permutation matrix with unit-modulus phases.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{GateMatrix, STATE_TOL};

/// A block (or entry) counts as nonzero when its max entry magnitude
/// exceeds this; everything below is treated as zero.
pub const CLASSIFY_THRESHOLD: f64 = 1e-9;

/// Bijection on {0, ..., size-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &y in &map {
            if y >= map.len() || seen[y] {
                return Err(Error::Domain(format!(
                    "map {map:?} is not a bijection on 0..{}",
                    map.len()
                )));
            }
            seen[y] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            map: (0..size).collect(),
        }
    }

    /// Uniform random permutation via Fisher-Yates on the given generator.
    pub fn random<R: Rng>(size: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..size).collect();
        for i in (1..size).rev() {
            let j = rng.gen_range(0..=i);
            map.swap(i, j);
        }
        Self { map }
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }
}

/// Permutation f on d^N block labels plus d^N unitary blocks of size d^M.
#[derive(Debug, Clone)]
pub struct RestrictedOperation {
    d: usize,
    n_perm: usize,
    m_block: usize,
    f: Permutation,
    blocks: Vec<GateMatrix>,
}

impl RestrictedOperation {
    pub fn new(
        d: usize,
        n_perm: usize,
        m_block: usize,
        f: Permutation,
        blocks: Vec<GateMatrix>,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("qudit dimension {d} < 2")));
        }
        if n_perm < 1 {
            return Err(Error::Domain("N must be >= 1".into()));
        }
        let outer = d.pow(n_perm as u32);
        let inner = d.pow(m_block as u32);
        if f.size() != outer {
            return Err(Error::Domain(format!(
                "permutation size {} does not match d^N = {outer}",
                f.size()
            )));
        }
        if blocks.len() != outer {
            return Err(Error::Domain(format!(
                "expected {outer} blocks, got {}",
                blocks.len()
            )));
        }
        for b in &blocks {
            if b.dim() != inner {
                return Err(Error::Domain(format!(
                    "block dim {} does not match d^M = {inner}",
                    b.dim()
                )));
            }
            let dev = b.unitarity_deviation();
            if dev > STATE_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(Self {
            d,
            n_perm,
            m_block,
            f,
            blocks,
        })
    }

    /// M = 0 case: a permutation with unit-modulus phases e^{i*phi(x)}.
    pub fn from_phases(d: usize, n_perm: usize, f: Permutation, phases: &[f64]) -> Result<Self> {
        let blocks = phases
            .iter()
            .map(|&phi| GateMatrix::new(1, vec![Complex64::from_polar(1.0, phi)]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, n_perm, 0, f, blocks)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn n_perm(&self) -> usize {
        self.n_perm
    }

    pub fn m_block(&self) -> usize {
        self.m_block
    }

    pub fn permutation(&self) -> &Permutation {
        &self.f
    }

    pub fn blocks(&self) -> &[GateMatrix] {
        &self.blocks
    }

    /// Total qudit count N + M the operation acts on.
    pub fn num_qudits(&self) -> usize {
        self.n_perm + self.m_block
    }

    /// Identity operation of the given shape.
    pub fn identity(d: usize, n_perm: usize, m_block: usize) -> Result<Self> {
        let outer = d.pow(n_perm as u32);
        let inner = d.pow(m_block as u32);
        Self::new(
            d,
            n_perm,
            m_block,
            Permutation::identity(outer),
            vec![GateMatrix::identity(inner); outer],
        )
    }

    /// Diagonal one-qubit operation diag(e^{i*phi}, e^{-i*phi}).
    pub fn u_diag(phi: f64) -> Self {
        Self::from_phases(2, 1, Permutation::identity(2), &[phi, -phi]).unwrap()
    }

    /// Antidiagonal one-qubit operation [[0, e^{i*phi}], [-e^{-i*phi}, 0]].
    pub fn u_anti(phi: f64) -> Self {
        let f = Permutation::new(vec![1, 0]).unwrap();
        // column 0 lands on row 1 with value -e^{-i*phi}
        Self::from_phases(2, 1, f, &[std::f64::consts::PI - phi, phi]).unwrap()
    }
}

/// Dense matrix of the operation: block G(x) at block-row f(x), block-column x.
pub fn build_matrix(op: &RestrictedOperation) -> GateMatrix {
    let bs = op.d.pow(op.m_block as u32);
    let outer = op.f.size();
    let dim = outer * bs;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for x in 0..outer {
        let fx = op.f.apply(x);
        let g = &op.blocks[x];
        for r in 0..bs {
            for c in 0..bs {
                entries[(fx * bs + r) * dim + (x * bs + c)] = g.get(r, c);
            }
        }
    }
    // blocks are unitary and placed bijectively, so this cannot fail
    GateMatrix::new(dim, entries).expect("block-permutation matrix is unitary")
}

/// Inverse of `build_matrix`: recover (f, blocks) when the matrix has exactly
/// one nonzero d^M x d^M block per block-row and block-column, `None` otherwise.
pub fn classify(
    matrix: &GateMatrix,
    d: usize,
    n_perm: usize,
    m_block: usize,
) -> Result<Option<RestrictedOperation>> {
    let outer = d.pow(n_perm as u32);
    let bs = d.pow(m_block as u32);
    if matrix.dim() != outer * bs {
        return Err(Error::Domain(format!(
            "matrix dim {} does not match d^(N+M) = {}",
            matrix.dim(),
            outer * bs
        )));
    }
    let dev = matrix.unitarity_deviation();
    if dev > STATE_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let dim = matrix.dim();
    let block_max = |br: usize, bc: usize| -> f64 {
        let mut max = 0.0f64;
        for r in 0..bs {
            for c in 0..bs {
                max = max.max(matrix.get(br * bs + r, bc * bs + c).norm());
            }
        }
        max
    };
    let _ = dim;
    let mut map = vec![0usize; outer];
    let mut used = vec![false; outer];
    let mut blocks = Vec::with_capacity(outer);
    for x in 0..outer {
        let mut hit = None;
        for br in 0..outer {
            if block_max(br, x) > CLASSIFY_THRESHOLD {
                if hit.is_some() {
                    return Ok(None);
                }
                hit = Some(br);
            }
        }
        let Some(br) = hit else { return Ok(None) };
        if used[br] {
            return Ok(None);
        }
        used[br] = true;
        map[x] = br;
        let mut entries = Vec::with_capacity(bs * bs);
        for r in 0..bs {
            for c in 0..bs {
                entries.push(matrix.get(br * bs + r, x * bs + c));
            }
        }
        match GateMatrix::new(bs, entries) {
            Ok(g) => blocks.push(g),
            Err(_) => return Ok(None),
        }
    }
    let f = Permutation::new(map).expect("per-column uniqueness implies bijection");
    Ok(Some(RestrictedOperation::new(d, n_perm, m_block, f, blocks)?))
}

/// Haar-random unitary of the given dimension: QR of a complex Gaussian
/// matrix with the R diagonal normalized to positive reals (done here via
/// modified Gram-Schmidt, whose R diagonal is positive by construction).
pub fn haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> GateMatrix {
    let normal = rand_distr::StandardNormal;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.sample(normal), rng.sample(normal)))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = cols[k]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..dim {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm: f64 = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut cols[j] {
            *a /= norm;
        }
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            entries[i * dim + j] = v;
        }
    }
    GateMatrix::new(dim, entries).expect("Gram-Schmidt output is unitary")
}

/// Seeded random restricted operation: uniform f, Haar-random blocks.
pub fn random_restricted(seed: u64, d: usize, n_perm: usize, m_block: usize) -> Result<RestrictedOperation> {
    if n_perm < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer = d.pow(n_perm as u32);
    let bs = d.pow(m_block as u32);
    let f = Permutation::random(outer, &mut rng);
    let blocks = (0..outer).map(|_| haar_unitary(bs, &mut rng)).collect();
    RestrictedOperation::new(d, n_perm, m_block, f, blocks)
}

/// Multi-controlled single-qubit gate as a restricted operation:
/// N = num_controls control qubits, M = 1 target, f = identity,
/// G(x) = I except G(2^N - 1) = u.
pub fn controlled_u(num_controls: usize, u: &GateMatrix) -> Result<RestrictedOperation> {
    if num_controls < 1 {
        return Err(Error::Domain("need at least one control qubit".into()));
    }
    if u.dim() != 2 {
        return Err(Error::Domain(format!(
            "controlled_u expects a one-qubit gate, got dim {}",
            u.dim()
        )));
    }
    let outer = 1usize << num_controls;
    let mut blocks = vec![GateMatrix::identity(2); outer];
    blocks[outer - 1] = u.clone();
    RestrictedOperation::new(2, num_controls, 1, Permutation::identity(outer), blocks)
}

#[derive(Serialize, Deserialize)]
struct OperationDoc {
    version: u32,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    f: Vec<usize>,
    blocks: Vec<Vec<[f64; 2]>>,
}

impl RestrictedOperation {
    /// Versioned JSON document {version, d, N, M, f, blocks} with each block
    /// flattened row-major into [re, im] pairs.
    pub fn to_json(&self) -> String {
        let doc = OperationDoc {
            version: 1,
            d: self.d,
            n: self.n_perm,
            m: self.m_block,
            f: self.f.as_slice().to_vec(),
            blocks: self
                .blocks
                .iter()
                .map(|b| b.entries().iter().map(|e| [e.re, e.im]).collect())
                .collect(),
        };
        serde_json::to_string(&doc).expect("serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OperationDoc = serde_json::from_str(text)
            .map_err(|e| Error::Domain(format!("invalid operation document: {e}")))?;
        if doc.version != 1 {
            return Err(Error::Domain(format!(
                "unsupported operation document version {}",
                doc.version
            )));
        }
        let inner = doc.d.pow(doc.m as u32);
        let blocks = doc
            .blocks
            .iter()
            .map(|b| {
                GateMatrix::new(
                    inner,
                    b.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.d, doc.n, doc.m, Permutation::new(doc.f)?, blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use num_complex::Complex64;

    #[test]
    fn u_diag_matrix() {
        let m = build_matrix(&RestrictedOperation::u_diag(std::f64::consts::FRAC_PI_2));
        assert!((m.get(0, 0) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((m.get(1, 1) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(m.get(0, 1).norm() < 1e-15);
        assert!(m.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn u_anti_matrix_at_phi_zero() {
        let m = build_matrix(&RestrictedOperation::u_anti(0.0));
        assert!((m.get(0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((m.get(1, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(m.get(0, 0).norm() < 1e-15);
        assert!(m.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn trivial_operation_builds_exact_identity() {
        for (d, n, m) in [(2, 1, 0), (2, 2, 1), (3, 1, 1)] {
            let op = RestrictedOperation::identity(d, n, m).unwrap();
            let mat = build_matrix(&op);
            let dim = mat.dim();
            for r in 0..dim {
                for c in 0..dim {
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert_eq!(mat.get(r, c), Complex64::new(expect, 0.0));
                }
            }
        }
    }

    #[test]
    fn column_support_matches_permutation() {
        let op = random_restricted(11, 3, 2, 1).unwrap();
        let mat = build_matrix(&op);
        let bs = 3usize;
        for x in 0..op.permutation().size() {
            let fx = op.permutation().apply(x);
            for c in 0..bs {
                for r in 0..mat.dim() {
                    let v = mat.get(r, x * bs + c).norm();
                    if r / bs != fx {
                        assert!(v < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn classify_recovers_u_diag() {
        let m = build_matrix(&RestrictedOperation::u_diag(std::f64::consts::FRAC_PI_2));
        let op = classify(&m, 2, 1, 0).unwrap().expect("should classify");
        assert_eq!(op.permutation().as_slice(), &[0, 1]);
        assert!((op.blocks()[0].get(0, 0) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((op.blocks()[1].get(0, 0) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn classify_rejects_hadamard() {
        let h = gates::qft(2).unwrap();
        assert!(classify(&h, 2, 1, 0).unwrap().is_none());
    }

    #[test]
    fn classify_rejects_non_unitary() {
        let bad = GateMatrix::new_unchecked(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(classify(&bad, 2, 1, 0).is_err());
    }

    #[test]
    fn classify_roundtrips_random_operations() {
        let mut seed = 0u64;
        for d in [2usize, 3] {
            for n in 1..=2usize {
                for m in 0..=1usize {
                    for _ in 0..100 {
                        seed += 1;
                        let op = random_restricted(seed, d, n, m).unwrap();
                        let got = classify(&build_matrix(&op), d, n, m)
                            .unwrap()
                            .expect("round-trip should classify");
                        assert_eq!(got.permutation(), op.permutation());
                        for (a, b) in got.blocks().iter().zip(op.blocks()) {
                            assert!(a.max_abs_diff(b) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_restricted_is_deterministic() {
        let a = random_restricted(99, 2, 2, 1).unwrap();
        let b = random_restricted(99, 2, 2, 1).unwrap();
        assert_eq!(a.permutation(), b.permutation());
        for (x, y) in a.blocks().iter().zip(b.blocks()) {
            assert_eq!(x.max_abs_diff(y), 0.0);
        }
    }

    #[test]
    fn random_blocks_are_unitary() {
        for seed in 0..100 {
            let op = random_restricted(seed, 2, 1, 1).unwrap();
            for b in op.blocks() {
                assert!(b.unitarity_deviation() < 1e-10);
            }
        }
    }

    #[test]
    fn haar_trace_moment() {
        // mean of |tr U|^2 over the Haar measure is 1 for any dimension
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut acc = 0.0;
        let draws = 2000;
        for _ in 0..draws {
            let u = haar_unitary(2, &mut rng);
            let tr = u.get(0, 0) + u.get(1, 1);
            acc += tr.norm_sqr();
        }
        let mean = acc / draws as f64;
        assert!((mean - 1.0).abs() < 0.1, "mean |tr|^2 = {mean}");
    }

    #[test]
    fn controlled_u_builds_cnot_and_toffoli() {
        let cnot = build_matrix(&controlled_u(1, &gates::pauli_x()).unwrap());
        let expect = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(cnot.get(r, c), Complex64::new(expect[r][c], 0.0));
            }
        }

        let toffoli = build_matrix(&controlled_u(2, &gates::pauli_x()).unwrap());
        for r in 0..8 {
            for c in 0..8 {
                let expect = match (r, c) {
                    (6, 7) | (7, 6) => 1.0,
                    _ if r == c && r < 6 => 1.0,
                    _ => 0.0,
                };
                assert_eq!(toffoli.get(r, c), Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn json_roundtrip_preserves_operation() {
        let op = random_restricted(5, 3, 1, 1).unwrap();
        let text = op.to_json();
        assert!(text.contains("\"version\":1"));
        assert!(text.contains("\"N\":1"));
        assert!(text.contains("\"M\":1"));
        let back = RestrictedOperation::from_json(&text).unwrap();
        assert_eq!(back.permutation(), op.permutation());
        for (a, b) in back.blocks().iter().zip(op.blocks()) {
            assert_eq!(a.max_abs_diff(b), 0.0);
        }
    }
}
