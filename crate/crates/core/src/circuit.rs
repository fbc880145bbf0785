//! Circuit IR: operations, circuits, and Heisenberg-picture propagation of
//! Pauli strings through Clifford operations.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// One circuit operation. Controlled-Paulis list the control first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    PrepZ(usize),
    PrepX(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CY(usize, usize),
    CZ(usize, usize),
    Measure(usize),
}

/// Qubits an operation acts on, in operand order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Qubits {
    buf: [usize; 2],
    len: usize,
}

impl Deref for Qubits {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.buf[..self.len]
    }
}

impl Operation {
    pub fn qubits(&self) -> Qubits {
        use Operation::*;
        match *self {
            PrepZ(q) | PrepX(q) | H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) | Measure(q) => {
                Qubits {
                    buf: [q, 0],
                    len: 1,
                }
            }
            CX(a, b) | CY(a, b) | CZ(a, b) => Qubits {
                buf: [a, b],
                len: 2,
            },
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(
            self,
            Operation::CX(..) | Operation::CY(..) | Operation::CZ(..)
        )
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            Operation::PrepZ(_) | Operation::PrepX(_) | Operation::Measure(_)
        )
    }

    pub fn is_prep(&self) -> bool {
        matches!(self, Operation::PrepZ(_) | Operation::PrepX(_))
    }

    pub fn mnemonic(&self) -> &'static str {
        use Operation::*;
        match self {
            PrepZ(_) => "P0",
            PrepX(_) => "P+",
            H(_) => "H",
            S(_) => "S",
            Sdg(_) => "SDG",
            X(_) => "X",
            Y(_) => "Y",
            Z(_) => "Z",
            CX(..) => "CX",
            CY(..) => "CY",
            CZ(..) => "CZ",
            Measure(_) => "M",
        }
    }

    /// Same operation with every qubit index passed through `f`.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Operation {
        use Operation::*;
        match *self {
            PrepZ(q) => PrepZ(f(q)),
            PrepX(q) => PrepX(f(q)),
            H(q) => H(f(q)),
            S(q) => S(f(q)),
            Sdg(q) => Sdg(f(q)),
            X(q) => X(f(q)),
            Y(q) => Y(f(q)),
            Z(q) => Z(f(q)),
            CX(a, b) => CX(f(a), f(b)),
            CY(a, b) => CY(f(a), f(b)),
            CZ(a, b) => CZ(f(a), f(b)),
            Measure(q) => Measure(f(q)),
        }
    }

    /// The controlled-σ gate with control `control` and target `target`.
    pub fn controlled(letter: Letter, control: usize, target: usize) -> Option<Operation> {
        match letter {
            Letter::I => None,
            Letter::X => Some(Operation::CX(control, target)),
            Letter::Y => Some(Operation::CY(control, target)),
            Letter::Z => Some(Operation::CZ(control, target)),
        }
    }

    /// The single-qubit Pauli gate σ on `qubit`.
    pub fn pauli(letter: Letter, qubit: usize) -> Option<Operation> {
        match letter {
            Letter::I => None,
            Letter::X => Some(Operation::X(qubit)),
            Letter::Y => Some(Operation::Y(qubit)),
            Letter::Z => Some(Operation::Z(qubit)),
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in qs.iter() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::RepeatedQubit(self.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())?;
        for q in self.qubits().iter() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// An ordered list of operations on `n` indexed qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Circuit {
    n: usize,
    ops: Vec<Operation>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, ops: Vec::new() }
    }

    pub fn from_ops(n: usize, ops: impl IntoIterator<Item = Operation>) -> Result<Self> {
        let mut c = Self::new(n);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: Operation) -> Result<()> {
        op.validate(self.n)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = Operation>) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    /// Number of operations `s`.
    #[inline]
    pub fn size(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// A Clifford circuit contains only unitary operations.
    pub fn is_clifford(&self) -> bool {
        self.ops.iter().all(Operation::is_unitary)
    }

    pub fn ensure_clifford(&self) -> Result<()> {
        match self.ops.iter().position(|op| !op.is_unitary()) {
            None => Ok(()),
            Some(index) => Err(Error::NotClifford {
                index,
                op: self.ops[index].to_string(),
            }),
        }
    }

    /// Re-indexes qubits into a register of `n` qubits via `map[q]`.
    pub fn embed(&self, n: usize, map: &[usize]) -> Result<Circuit> {
        Circuit::from_ops(n, self.ops.iter().map(|op| op.map_qubits(|q| map[q])))
    }

    /// The inverse of a Clifford circuit.
    pub fn inverse(&self) -> Result<Circuit> {
        self.ensure_clifford()?;
        let ops = self.ops.iter().rev().map(|op| match *op {
            Operation::S(q) => Operation::Sdg(q),
            Operation::Sdg(q) => Operation::S(q),
            other => other,
        });
        Circuit::from_ops(self.n, ops)
    }
}

impl PauliString {
    /// Conjugates this string in place: `P ← U P U†`.
    pub fn conjugate_by(&mut self, op: &Operation) -> Result<()> {
        use Operation::*;
        match *op {
            H(q) => self.apply_h(q),
            S(q) => self.apply_s(q),
            Sdg(q) => self.apply_sdg(q),
            X(q) => {
                if self.z(q) {
                    self.negate();
                }
            }
            Y(q) => {
                if self.x(q) ^ self.z(q) {
                    self.negate();
                }
            }
            Z(q) => {
                if self.x(q) {
                    self.negate();
                }
            }
            CX(c, t) => self.apply_cx(c, t),
            CY(c, t) => {
                self.apply_sdg(t);
                self.apply_cx(c, t);
                self.apply_s(t);
            }
            CZ(a, b) => self.apply_cz(a, b),
            PrepZ(_) | PrepX(_) | Measure(_) => return Err(Error::NotUnitary(op.to_string())),
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_h(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.negate();
        }
        self.set_x(q, z);
        self.set_z(q, x);
    }

    #[inline]
    pub(crate) fn apply_s(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.negate();
        }
        self.set_z(q, z ^ x);
    }

    #[inline]
    pub(crate) fn apply_sdg(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && !z {
            self.negate();
        }
        self.set_z(q, z ^ x);
    }

    #[inline]
    pub(crate) fn apply_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x(c), self.z(c), self.x(t), self.z(t));
        if xc && zt && !(xt ^ zc) {
            self.negate();
        }
        self.set_x(t, xt ^ xc);
        self.set_z(c, zc ^ zt);
    }

    #[inline]
    pub(crate) fn apply_cz(&mut self, a: usize, b: usize) {
        let (xa, za, xb, zb) = (self.x(a), self.z(a), self.x(b), self.z(b));
        if xa && xb && (za ^ zb) {
            self.negate();
        }
        self.set_z(a, za ^ xb);
        self.set_z(b, zb ^ xa);
    }
}

/// Returns `U P U†` for a unitary operation `U`.
pub fn conjugate_through(op: &Operation, p: &PauliString) -> Result<PauliString> {
    for &q in op.qubits().iter() {
        if q >= p.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n: p.num_qubits(),
            });
        }
    }
    let mut out = p.clone();
    out.conjugate_by(op)?;
    Ok(out)
}

/// Conjugates `p` through operations `from_index..` of a Clifford circuit.
pub fn propagate(circuit: &Circuit, p: &PauliString, from_index: usize) -> Result<PauliString> {
    if p.num_qubits() != circuit.num_qubits() {
        return Err(Error::LengthMismatch {
            left: p.num_qubits(),
            right: circuit.num_qubits(),
        });
    }
    if from_index > circuit.size() {
        return Err(Error::IndexOutOfRange {
            index: from_index,
            size: circuit.size(),
        });
    }
    let mut out = p.clone();
    for op in &circuit.ops()[from_index..] {
        out.conjugate_by(op)?;
    }
    Ok(out)
}
