//! Uniform random Clifford sampling, synthesis, and random gate sequences.

use rand::Rng;

use crate::circuit::{propagate, Circuit, Operation};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// An n-qubit Clifford unitary `U` (modulo global phase), stored as the
/// signed images `U X_i U†` followed by `U Z_i U†`.
///
/// The symplectic matrix has these images as rows; the phase bits are
/// their signs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordElement {
    n: usize,
    images: Vec<PauliString>,
}

impl CliffordElement {
    pub fn identity(n: usize) -> Self {
        let mut images: Vec<_> = (0..n).map(|q| PauliString::single(n, q, Letter::X)).collect();
        images.extend((0..n).map(|q| PauliString::single(n, q, Letter::Z)));
        Self { n, images }
    }

    /// Builds an element from the 2n signed images; validates the symplectic form.
    pub fn from_images(images: Vec<PauliString>) -> Result<Self> {
        if !images.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter("odd number of Clifford images".into()));
        }
        let n = images.len() / 2;
        if let Some(bad) = images.iter().find(|p| p.num_qubits() != n) {
            return Err(Error::LengthMismatch {
                left: bad.num_qubits(),
                right: n,
            });
        }
        let e = Self { n, images };
        if !e.is_symplectic() {
            return Err(Error::InvalidParameter(
                "images do not preserve the symplectic form".into(),
            ));
        }
        Ok(e)
    }

    /// The action of a Clifford circuit.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        circuit.ensure_clifford()?;
        let identity = Self::identity(circuit.num_qubits());
        let images = identity
            .images
            .iter()
            .map(|p| propagate(circuit, p, 0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: circuit.num_qubits(),
            images,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.images[q]
    }

    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.images[self.n + q]
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    /// Row `j` of the 2n×2n symplectic matrix as `(x | z)` bits.
    pub fn symplectic_row(&self, j: usize) -> Vec<bool> {
        let p = &self.images[j];
        (0..self.n)
            .map(|q| p.x(q))
            .chain((0..self.n).map(|q| p.z(q)))
            .collect()
    }

    pub fn phase_bits(&self) -> Vec<bool> {
        self.images.iter().map(PauliString::is_negative).collect()
    }

    /// `M Λ Mᵀ = Λ`: X images commute among themselves, Z images likewise,
    /// and `U X_i U†` anticommutes with `U Z_j U†` exactly when `i = j`.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|a| {
            (a + 1..2 * n).all(|b| {
                let expect_anti = b == a + n && a < n;
                self.images[a].commutes(&self.images[b]) != expect_anti
            })
        })
    }
}

fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random()).collect()
}

type Mat = Vec<Vec<bool>>;

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (rows, inner, cols) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![false; cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k] {
                for j in 0..cols {
                    out[i][j] ^= b[k][j];
                }
            }
        }
    }
    out
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
fn inverse_unit_lower(l: &Mat) -> Mat {
    let n = l.len();
    let mut inv = vec![vec![false; n]; n];
    for col in 0..n {
        inv[col][col] = true;
        for i in col + 1..n {
            let mut acc = false;
            for k in col..i {
                acc ^= l[i][k] & inv[k][col];
            }
            inv[i][col] = acc;
        }
    }
    inv
}

fn transpose(m: &Mat) -> Mat {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

/// Quantum Mallows sample: Hadamard pattern and qubit permutation.
fn sample_mallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut hadamard = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r: f64 = rng.random();
        let index = (-(r + (1.0 - r) * eps).log2().ceil()) as usize;
        hadamard[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = remaining.remove(k);
    }
    (hadamard, perm)
}

/// Random symmetric matrix with random diagonal.
fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = rng.random();
    }
    for i in 0..n {
        for j in 0..i {
            let b = rng.random();
            m[i][j] = b;
            m[j][i] = b;
        }
    }
    m
}

fn random_unit_lower<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        m[i][i] = true;
        for j in 0..i {
            m[i][j] = rng.random();
        }
    }
    m
}

/// `[[Δ, 0], [ΓΔ, (Δ⁻¹)ᵀ]]`, a Hadamard-free Clifford layer.
fn borel_block(gamma: &Mat, delta: &Mat) -> Mat {
    let n = gamma.len();
    let prod = matmul(gamma, delta);
    let inv_t = transpose(&inverse_unit_lower(delta));
    let mut out = vec![vec![false; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = delta[i][j];
            out[n + i][j] = prod[i][j];
            out[n + i][n + j] = inv_t[i][j];
        }
    }
    out
}

/// Uniformly random n-qubit Clifford (modulo global phase), via the
/// Bruhat-style decomposition `F₁ · H·Π · F₂` with a quantum-Mallows
/// middle layer.
pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordElement> {
    if n == 0 {
        return Err(Error::InvalidParameter("Clifford sampling needs n ≥ 1".into()));
    }
    let (hadamard, perm) = sample_mallows(n, rng);
    let gamma1 = random_symmetric(n, rng);
    let gamma2 = random_symmetric(n, rng);
    let delta1 = random_unit_lower(n, rng);
    let delta2 = random_unit_lower(n, rng);

    let table1 = borel_block(&gamma1, &delta1);
    let table2 = borel_block(&gamma2, &delta2);

    let mut table: Mat = perm
        .iter()
        .map(|&p| table2[p].clone())
        .chain(perm.iter().map(|&p| table2[n + p].clone()))
        .collect();
    for i in 0..n {
        if hadamard[i] {
            table.swap(i, n + i);
        }
    }
    let symp = matmul(&table1, &table);
    let phases = random_bits(rng, 2 * n);

    let images = symp
        .iter()
        .zip(phases)
        .map(|(row, neg)| PauliString::from_bits(&row[..n], &row[n..], neg))
        .collect::<Result<Vec<_>>>()?;
    Ok(CliffordElement { n, images })
}

/// Working state for synthesis: images of the element with gates appended.
struct Reducer {
    images: Vec<PauliString>,
    gates: Vec<Operation>,
}

impl Reducer {
    fn apply(&mut self, op: Operation) {
        for p in &mut self.images {
            p.conjugate_by(&op).expect("unitary");
        }
        self.gates.push(op);
    }

    /// Clears the x letters of row `r` on qubits `> i`, given `x_i = 1`,
    /// folding the support pairwise so each round is one parallel layer.
    fn clear_x_tail(&mut self, r: usize, i: usize, n: usize) {
        let mut live: Vec<usize> = std::iter::once(i)
            .chain((i + 1..n).filter(|&j| self.images[r].x(j)))
            .collect();
        while live.len() > 1 {
            for pair in live.chunks(2) {
                if let [keep, drop] = *pair {
                    self.apply(Operation::CX(keep, drop));
                }
            }
            live = live.iter().copied().step_by(2).collect();
        }
    }

    /// Folds the z letters of row `r` on `qubits` (which carry no x letter
    /// in that row) into a single `Z`, returning its qubit.
    fn fold_z(&mut self, r: usize, qubits: Vec<usize>) -> Option<usize> {
        let mut live = qubits;
        while live.len() > 1 {
            for pair in live.chunks(2) {
                if let [keep, drop] = *pair {
                    self.apply(Operation::CX(drop, keep));
                }
            }
            live = live.iter().copied().step_by(2).collect();
        }
        debug_assert!(live.iter().all(|&q| self.images[r].z(q) && !self.images[r].x(q)));
        live.first().copied()
    }
}

/// Synthesizes a circuit over `{H, S, SDG, CX}` plus a final Pauli layer
/// whose action equals `e`.
///
/// Column-by-column reduction: gates are appended until every image is a
/// signed `X_i` / `Z_i`, then the circuit is the Pauli sign fix followed by
/// the inverse of the reducing gates.
pub fn synthesize(e: &CliffordElement) -> Circuit {
    let n = e.n;
    let mut red = Reducer {
        images: e.images.clone(),
        gates: Vec::new(),
    };
    for i in 0..n {
        let (a, b) = (i, n + i);

        // Row a → ±X_i.
        if !(i..n).any(|j| red.images[a].x(j)) {
            let j = (i..n)
                .find(|&j| red.images[a].z(j))
                .expect("image of X_i is supported on unreduced qubits");
            red.apply(Operation::H(j));
        }
        if !red.images[a].x(i) {
            let j = (i + 1..n).find(|&j| red.images[a].x(j)).unwrap();
            red.apply(Operation::CX(j, i));
        }
        red.clear_x_tail(a, i, n);
        let z_tail: Vec<usize> = (i + 1..n).filter(|&j| red.images[a].z(j)).collect();
        if let Some(w) = red.fold_z(a, z_tail) {
            if !red.images[a].z(i) {
                red.apply(Operation::S(i));
            }
            red.apply(Operation::CX(w, i));
        }
        if red.images[a].z(i) {
            red.apply(Operation::S(i));
        }

        // Row b anticommutes with X_i, so it carries Z or Y on qubit i.
        if red.images[b].weight() == 1 && !red.images[b].x(i) {
            continue;
        }
        red.apply(Operation::H(i));
        red.clear_x_tail(b, i, n);
        let z_tail: Vec<usize> = (i + 1..n).filter(|&j| red.images[b].z(j)).collect();
        if let Some(w) = red.fold_z(b, z_tail) {
            red.apply(Operation::H(w));
            red.apply(Operation::CX(i, w));
        }
        if red.images[b].z(i) {
            red.apply(Operation::S(i));
        }
        red.apply(Operation::H(i));
    }

    let mut circuit = Circuit::new(n);
    for q in 0..n {
        let flip_x_sign = red.images[q].is_negative();
        let flip_z_sign = red.images[n + q].is_negative();
        let letter = match (flip_x_sign, flip_z_sign) {
            (false, false) => Letter::I,
            (true, false) => Letter::Z,
            (false, true) => Letter::X,
            (true, true) => Letter::Y,
        };
        if let Some(op) = Operation::pauli(letter, q) {
            circuit.push(op).unwrap();
        }
    }
    for op in red.gates.iter().rev() {
        let inv = match *op {
            Operation::S(q) => Operation::Sdg(q),
            other => other,
        };
        circuit.push(inv).unwrap();
    }
    circuit
}

/// `s` operations, each uniformly one of `{H, S, CX}` on uniformly chosen
/// (distinct) qubits.
pub fn sample_gate_sequence<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidParameter("gate sequences need n ≥ 2".into()));
    }
    let mut c = Circuit::new(n);
    for _ in 0..s {
        let op = match rng.random_range(0..3u8) {
            0 => Operation::H(rng.random_range(0..n)),
            1 => Operation::S(rng.random_range(0..n)),
            _ => {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                Operation::CX(a, b)
            }
        };
        c.push(op)?;
    }
    Ok(c)
}
