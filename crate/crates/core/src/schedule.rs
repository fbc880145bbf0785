//! ASAP layering and sub-circuit splitting.

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// Greedy as-soon-as-possible layering of a circuit.
///
/// Each layer holds operation indices with pairwise disjoint supports. An
/// operation lands one layer after the latest layer touching any of its
/// qubits, so per-qubit order is preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    n: usize,
    layers: Vec<Vec<usize>>,
}

impl Layering {
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Qubits untouched by layer `index`, in increasing order.
    pub fn idle_qubits(&self, circuit: &Circuit, index: usize) -> Vec<usize> {
        let mut busy = vec![false; self.n];
        for &k in &self.layers[index] {
            for &q in circuit.ops()[k].qubits().iter() {
                busy[q] = true;
            }
        }
        (0..self.n).filter(|&q| !busy[q]).collect()
    }

    /// Total number of (layer, idle qubit) slots.
    pub fn idle_slots(&self, circuit: &Circuit) -> usize {
        self.layers
            .iter()
            .map(|l| {
                self.n
                    - l.iter()
                        .map(|&k| circuit.ops()[k].qubits().len())
                        .sum::<usize>()
            })
            .sum()
    }
}

pub fn schedule_layers(circuit: &Circuit) -> Layering {
    let n = circuit.num_qubits();
    let mut next_free = vec![0usize; n];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (k, op) in circuit.ops().iter().enumerate() {
        let qs = op.qubits();
        let layer = qs.iter().map(|&q| next_free[q]).max().unwrap_or(0);
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(k);
        for &q in qs.iter() {
            next_free[q] = layer + 1;
        }
    }
    Layering { n, layers }
}

/// Sizes of the `t` parts: the first `s mod t` parts get `⌈s/t⌉`
/// operations and the rest one fewer (all equal when `t` divides `s`).
pub fn split_sizes(s: usize, t: usize) -> Result<Vec<usize>> {
    if t < 1 {
        return Err(Error::InvalidParameter(
            "sub-circuit count t must be at least 1".into(),
        ));
    }
    let s0 = s.div_ceil(t);
    let rem = s % t;
    Ok((0..t)
        .map(|i| if rem == 0 || i < rem { s0 } else { s0 - 1 })
        .collect())
}

/// Splits a Clifford circuit into `t` consecutive sub-circuits.
pub fn split_circuit(circuit: &Circuit, t: usize) -> Result<Vec<Circuit>> {
    circuit.ensure_clifford()?;
    let sizes = split_sizes(circuit.size(), t)?;
    let mut parts = Vec::with_capacity(t);
    let mut start = 0;
    for len in sizes {
        let ops = circuit.ops()[start..start + len].iter().copied();
        parts.push(Circuit::from_ops(circuit.num_qubits(), ops)?);
        start += len;
    }
    Ok(parts)
}
