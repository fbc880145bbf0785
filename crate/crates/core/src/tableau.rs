//! Destabilizer/stabilizer tableau for n-qubit stabilizer states.
//!
//! Row `i < n` is destabilizer `i`, row `n + i` is stabilizer `i`. Updates
//! follow the Aaronson–Gottesman rules. This is the exact reference
//! simulator; the Monte-Carlo engine works with Pauli frames instead.

use rand::Rng;

use crate::circuit::{Circuit, Operation};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    rows: Vec<PauliString>,
}

impl StabilizerTableau {
    /// The state `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        rows.extend((0..n).map(|q| PauliString::single(n, q, Letter::X)));
        rows.extend((0..n).map(|q| PauliString::single(n, q, Letter::Z)));
        Self { n, rows }
    }

    /// `C|0…0⟩` for a Clifford circuit `C`.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        let mut t = Self::new(circuit.num_qubits());
        for op in circuit.ops() {
            t.apply_unitary(op)?;
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.rows[..self.n]
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn apply_unitary(&mut self, op: &Operation) -> Result<()> {
        op.validate(self.n)?;
        for row in &mut self.rows {
            row.conjugate_by(op)?;
        }
        Ok(())
    }

    /// Applies a Pauli operator to the state (signs of anticommuting rows flip).
    pub fn apply_pauli(&mut self, p: &PauliString) {
        for row in &mut self.rows {
            if !row.commutes(p) {
                row.negate();
            }
        }
    }

    /// Applies any operation. Returns the outcome for `Measure`.
    pub fn apply<R: Rng + ?Sized>(&mut self, op: &Operation, rng: &mut R) -> Result<Option<bool>> {
        op.validate(self.n)?;
        match *op {
            Operation::Measure(q) => Ok(Some(self.measure(q, rng))),
            Operation::PrepZ(q) => {
                self.reset(q, rng);
                Ok(None)
            }
            Operation::PrepX(q) => {
                self.reset(q, rng);
                self.apply_unitary(&Operation::H(q))?;
                Ok(None)
            }
            _ => {
                self.apply_unitary(op)?;
                Ok(None)
            }
        }
    }

    /// Resets qubit `q` to `|0⟩`.
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) {
        if self.measure(q, rng) {
            self.apply_pauli(&PauliString::single(self.n, q, Letter::X));
        }
    }

    /// Measures `Z_q`. Deterministic outcomes are returned as-is; random
    /// ones are drawn from `rng` and the state collapses accordingly.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        assert!(q < self.n, "measure: qubit {q} out of range");
        let n = self.n;
        match (n..2 * n).find(|&r| self.rows[r].x(q)) {
            Some(p) => {
                let pivot = self.rows[p].clone();
                for r in 0..2 * n {
                    if r != p && self.rows[r].x(q) {
                        self.rows[r].mul_assign(&pivot);
                    }
                }
                let outcome: bool = rng.random();
                self.rows[p - n] = pivot;
                let mut z = PauliString::single(n, q, Letter::Z);
                z.set_negative(outcome);
                self.rows[p] = z;
                outcome
            }
            None => {
                let mut acc = PauliString::identity(n);
                for i in 0..n {
                    if self.rows[i].x(q) {
                        acc.mul_assign(&self.rows[n + i]);
                    }
                }
                acc.is_negative()
            }
        }
    }

    /// Whether `±p` belongs to the stabilizer group.
    ///
    /// `Some(false)` when `p` itself (with its sign) stabilizes the state,
    /// `Some(true)` when `-p` does, `None` when neither does.
    pub fn stabilizer_sign(&self, p: &PauliString) -> Option<bool> {
        assert_eq!(p.num_qubits(), self.n);
        if !self.stabilizers().iter().all(|s| s.commutes(p)) {
            return None;
        }
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if !self.rows[i].commutes(p) {
                acc.mul_assign(&self.rows[self.n + i]);
            }
        }
        debug_assert!(acc.same_letters(p));
        Some(acc.is_negative() != p.is_negative())
    }

    /// True when `p` (including its sign) stabilizes the state.
    pub fn stabilizes(&self, p: &PauliString) -> bool {
        self.stabilizer_sign(p) == Some(false)
    }

    /// Checks the tableau invariants: commutation structure and full rank.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for i in 0..n {
            for j in 0..n {
                if !self.rows[n + i].commutes(&self.rows[n + j]) {
                    return bad(format!("stabilizers {i} and {j} anticommute"));
                }
                if self.rows[i].commutes(&self.rows[n + j]) == (i == j) {
                    return bad(format!("destabilizer {i} / stabilizer {j} relation broken"));
                }
            }
        }
        let vectors: Vec<Vec<u64>> = self.rows.iter().map(|r| r.symplectic_bits()).collect();
        if crate::f2::rank(&vectors, 2 * n) != 2 * n {
            return bad("rows are linearly dependent".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hadamard_turns_z_stabilizer_into_x() {
        let mut t = StabilizerTableau::new(2);
        t.apply_unitary(&Operation::H(0)).unwrap();
        assert_eq!(t.stabilizers()[0].to_string(), "+XI");
        t.validate().unwrap();
    }

    #[test]
    fn measuring_zero_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = StabilizerTableau::new(1);
        for _ in 0..10 {
            assert!(!t.measure(0, &mut rng));
        }
        t.apply_pauli(&"X".parse().unwrap());
        assert!(t.measure(0, &mut rng));
    }

    #[test]
    fn plus_state_measurement_is_fair_then_repeatable() {
        let seeds = 20_000u64;
        let mut ones = 0u64;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = StabilizerTableau::new(1);
            t.apply_unitary(&Operation::H(0)).unwrap();
            let first = t.measure(0, &mut rng);
            let second = t.measure(0, &mut rng);
            assert_eq!(first, second);
            ones += first as u64;
            t.validate().unwrap();
        }
        let freq = ones as f64 / seeds as f64;
        let sigma = (0.25 / seeds as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "frequency {freq}");
    }

    #[test]
    fn bell_pair_correlations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut t = StabilizerTableau::new(2);
            t.apply_unitary(&Operation::H(0)).unwrap();
            t.apply_unitary(&Operation::CX(0, 1)).unwrap();
            assert!(t.stabilizes(&"XX".parse().unwrap()));
            assert!(t.stabilizes(&"ZZ".parse().unwrap()));
            assert!(t.stabilizes(&"-YY".parse().unwrap()));
            assert_eq!(t.stabilizer_sign(&"YY".parse().unwrap()), Some(true));
            assert_eq!(t.stabilizer_sign(&"ZI".parse().unwrap()), None);
            let a = t.measure(0, &mut rng);
            let b = t.measure(1, &mut rng);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn prep_resets_the_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut t = StabilizerTableau::new(2);
        t.apply_unitary(&Operation::H(0)).unwrap();
        t.apply_unitary(&Operation::CX(0, 1)).unwrap();
        t.apply(&Operation::PrepX(1), &mut rng).unwrap();
        assert!(t.stabilizes(&"IX".parse().unwrap()));
        t.apply(&Operation::PrepZ(1), &mut rng).unwrap();
        assert!(t.stabilizes(&"IZ".parse().unwrap()));
        t.validate().unwrap();
    }
}
