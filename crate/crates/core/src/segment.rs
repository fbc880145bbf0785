//! Precompiled straight-line circuit segments.
//!
//! A protocol is executed as a sequence of segments whose boundaries are the
//! points where classical control happens (restart decisions, Pauli
//! corrections). Each segment is layered once, ASAP, and keeps per-class
//! tables of fault locations so the frame engine can sample faults by
//! geometric skipping instead of one Bernoulli draw per location.

use crate::circuit::{Circuit, Operation};
use crate::error::{Error, Result};
use crate::noise::FaultClass;
use crate::schedule::schedule_layers;

/// Ideal outcome of a measurement in the noiseless reference execution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// The outcome is fixed; a deviation signals a fault.
    Deterministic(bool),
    /// The outcome is uniformly random.
    Random,
}

/// An idle location: qubit `qubit` idles during the layer ending after
/// execution-order operation `after_op`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdleSlot {
    pub after_op: u32,
    pub qubit: u32,
}

#[derive(Clone, Debug)]
pub struct Segment {
    register: usize,
    ops: Vec<Operation>,
    layer_ends: Vec<usize>,
    /// For each op in execution order, its measurement index if it is one.
    measure_index: Vec<Option<u32>>,
    expectations: Vec<Expectation>,
    one_qubit: Vec<u32>,
    two_qubit: Vec<u32>,
    measures: Vec<u32>,
    idle: Vec<IdleSlot>,
    touched: Vec<usize>,
}

impl Segment {
    /// Compiles `circuit` (whose register is the full protocol register).
    ///
    /// `expectations[k]` describes the k-th `Measure` of `circuit` in
    /// program order; outcomes are reported in that order.
    pub fn new(circuit: &Circuit, expectations: Vec<Expectation>) -> Result<Self> {
        let all: Vec<usize> = (0..circuit.num_qubits()).collect();
        Self::with_idle_window(circuit, expectations, &all)
    }

    /// As [`new`](Self::new), but only qubits in `window` accrue idle faults.
    pub fn with_idle_window(
        circuit: &Circuit,
        expectations: Vec<Expectation>,
        window: &[usize],
    ) -> Result<Self> {
        let measure_count = circuit
            .ops()
            .iter()
            .filter(|op| matches!(op, Operation::Measure(_)))
            .count();
        if measure_count != expectations.len() {
            return Err(Error::InvalidParameter(format!(
                "segment has {measure_count} measurements but {} expectations",
                expectations.len()
            )));
        }
        let mut program_measure = Vec::with_capacity(circuit.size());
        let mut next = 0u32;
        for op in circuit.ops() {
            if matches!(op, Operation::Measure(_)) {
                program_measure.push(Some(next));
                next += 1;
            } else {
                program_measure.push(None);
            }
        }

        let register = circuit.num_qubits();
        let layering = schedule_layers(circuit);
        let mut ops = Vec::with_capacity(circuit.size());
        let mut measure_index = Vec::with_capacity(circuit.size());
        let mut layer_ends = Vec::with_capacity(layering.depth());
        let (mut one_qubit, mut two_qubit, mut measures, mut idle) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut touched = vec![false; register];
        let mut in_window = vec![false; register];
        for &q in window {
            if q >= register {
                return Err(Error::QubitOutOfRange { qubit: q, n: register });
            }
            in_window[q] = true;
        }
        for layer in layering.layers() {
            let mut busy = vec![false; register];
            for &k in layer {
                let op = circuit.ops()[k];
                let pos = ops.len() as u32;
                match FaultClass::of(&op) {
                    FaultClass::OneQubit => one_qubit.push(pos),
                    FaultClass::TwoQubit => two_qubit.push(pos),
                    FaultClass::Measure => measures.push(pos),
                    FaultClass::Idle => unreachable!(),
                }
                for &q in op.qubits().iter() {
                    busy[q] = true;
                    touched[q] = true;
                }
                ops.push(op);
                measure_index.push(program_measure[k]);
            }
            let last = (ops.len() - 1) as u32;
            idle.extend(
                (0..register)
                    .filter(|&q| in_window[q] && !busy[q])
                    .map(|q| IdleSlot {
                        after_op: last,
                        qubit: q as u32,
                    }),
            );
            layer_ends.push(ops.len());
        }
        Ok(Self {
            register,
            ops,
            layer_ends,
            measure_index,
            expectations,
            one_qubit,
            two_qubit,
            measures,
            idle,
            touched: (0..register).filter(|&q| touched[q]).collect(),
        })
    }

    /// A segment without measurements.
    pub fn unitary(circuit: &Circuit) -> Result<Self> {
        Self::new(circuit, Vec::new())
    }

    pub fn register(&self) -> usize {
        self.register
    }

    /// Operations in execution (layer) order.
    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.layer_ends.len()
    }

    /// Exclusive end offsets of each layer in [`ops`](Self::ops).
    pub fn layer_ends(&self) -> &[usize] {
        &self.layer_ends
    }

    pub fn measure_index(&self, exec_pos: usize) -> Option<usize> {
        self.measure_index[exec_pos].map(|m| m as usize)
    }

    pub fn expectations(&self) -> &[Expectation] {
        &self.expectations
    }

    pub fn num_measurements(&self) -> usize {
        self.expectations.len()
    }

    /// Execution positions of operations in a fault class.
    pub fn locations(&self, class: FaultClass) -> &[u32] {
        match class {
            FaultClass::OneQubit => &self.one_qubit,
            FaultClass::TwoQubit => &self.two_qubit,
            FaultClass::Measure => &self.measures,
            FaultClass::Idle => &[],
        }
    }

    pub fn idle_slots(&self) -> &[IdleSlot] {
        &self.idle
    }

    /// Qubits acted on by at least one operation.
    pub fn touched(&self) -> &[usize] {
        &self.touched
    }
}
