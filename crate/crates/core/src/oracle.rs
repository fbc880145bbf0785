//! Full stabilizer-tableau execution, used as an independent reference for
//! the frame engine.
//!
//! Faults are drawn per location with plain Bernoulli trials and inserted as
//! explicit Pauli gates; measurements are sampled from the actual state.
//! Logical correctness is judged by entangling the input block with a
//! noiseless reference register and checking that the final state carries
//! the expected Bell-type stabilizers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{propagate, Circuit, Operation};
use crate::error::{Error, Result};
use crate::frame::{Executor, Outcomes, Protocol, ShotRecord};
use crate::noise::{random_letter, sample_fault, sample_idle_faults, Fault, NoiseModel};
use crate::pauli::{Letter, PauliString};
use crate::seed::{rng_for, DOMAIN_SHOT};
use crate::segment::Segment;
use crate::stats::RunStats;
use crate::tableau::StabilizerTableau;

pub struct TableauExecutor {
    tableau: StabilizerTableau,
    register: usize,
    model: NoiseModel,
    rng: ChaCha8Rng,
}

impl TableauExecutor {
    /// `register` protocol qubits followed by `extra` untouched qubits, all
    /// in `|0⟩`.
    pub fn new(register: usize, extra: usize, model: NoiseModel, rng: ChaCha8Rng) -> Self {
        Self {
            tableau: StabilizerTableau::new(register + extra),
            register,
            model,
            rng,
        }
    }

    pub fn tableau(&self) -> &StabilizerTableau {
        &self.tableau
    }

    /// Applies `op` without noise.
    pub fn apply_ideal(&mut self, op: &Operation) -> Result<Option<bool>> {
        self.tableau.apply(op, &mut self.rng)
    }

    fn apply_letter(&mut self, q: usize, l: Letter) {
        if l != Letter::I {
            let p = PauliString::single(self.tableau.num_qubits(), q, l);
            self.tableau.apply_pauli(&p);
        }
    }
}

impl Executor for TableauExecutor {
    fn run_segment(&mut self, seg: &Segment) -> Outcomes {
        let mut reported = vec![false; seg.num_measurements()];
        let mut start = 0;
        let mut idle = seg.idle_slots().iter().peekable();
        for &end in seg.layer_ends() {
            for pos in start..end {
                let op = seg.ops()[pos];
                let outcome = self.tableau.apply(&op, &mut self.rng).expect("valid operation");
                let fault = sample_fault(&op, &self.model, &mut self.rng);
                if let Some(m) = seg.measure_index(pos) {
                    reported[m] = outcome.expect("measurement outcome")
                        ^ matches!(fault, Some(Fault::MeasurementFlip));
                }
                match fault {
                    Some(Fault::Single { qubit, letter }) => self.apply_letter(qubit, letter),
                    Some(Fault::Pair { qubits, letters }) => {
                        self.apply_letter(qubits[0], letters[0]);
                        self.apply_letter(qubits[1], letters[1]);
                    }
                    _ => {}
                }
            }
            while let Some(slot) = idle.next_if(|s| s.after_op as usize == end - 1) {
                if self.model.p_idle > 0.0 && self.rng.random_bool(self.model.p_idle) {
                    let l = random_letter(&mut self.rng);
                    self.apply_letter(slot.qubit as usize, l);
                }
            }
            start = end;
        }
        Outcomes::new(reported)
    }

    fn feedforward(
        &mut self,
        targets: &[usize],
        outcomes: &Outcomes,
        correction: &dyn Fn(&[bool]) -> PauliString,
    ) {
        let c = correction(&outcomes.reported);
        for &q in targets {
            self.apply_letter(q, c.letter(q));
            if self.model.p1 > 0.0 && self.rng.random_bool(self.model.p1) {
                let l = random_letter(&mut self.rng);
                self.apply_letter(q, l);
            }
        }
        for (q, l) in sample_idle_faults(targets, self.register, &self.model, &mut self.rng) {
            self.apply_letter(q, l);
        }
    }
}

/// Expected stabilizers after implementing `circuit` on `input` (the first
/// block, entangled with reference qubits `register..register+n`) and
/// landing on `output`: `C X_i C† ⊗ X_ref_i` and `C Z_i C† ⊗ Z_ref_i`.
pub fn bell_reference_stabilizers(
    circuit: &Circuit,
    register: usize,
    output: &[usize],
) -> Result<Vec<PauliString>> {
    let n = circuit.num_qubits();
    if output.len() != n {
        return Err(Error::LengthMismatch {
            left: output.len(),
            right: n,
        });
    }
    let mut map: Vec<usize> = output.to_vec();
    map.extend(register..register + n);
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for l in [Letter::X, Letter::Z] {
            let image = propagate(circuit, &PauliString::single(n, i, l), 0)?;
            let mut full = image.embed(register + n, &map[..n]);
            full.set_letter(register + i, l);
            out.push(full);
        }
    }
    Ok(out)
}

/// Runs one tableau shot of `protocol` with the input block `input`
/// Bell-paired to reference qubits. Returns the shot record and whether the
/// logical output is wrong.
pub fn tableau_shot<P: Protocol>(
    protocol: &P,
    program: &P::Program,
    input: &[usize],
    expected: &[PauliString],
    model: NoiseModel,
    rng: ChaCha8Rng,
) -> (ShotRecord, bool) {
    let register = protocol.register();
    let mut exec = TableauExecutor::new(register, input.len(), model, rng);
    for (i, &q) in input.iter().enumerate() {
        let r = register + i;
        exec.apply_ideal(&Operation::H(r)).expect("in range");
        exec.apply_ideal(&Operation::CX(r, q)).expect("in range");
    }
    let rec = protocol.execute(program, &mut exec);
    let failed = !rec.aborted && !expected.iter().all(|s| exec.tableau().stabilizes(s));
    (rec, failed)
}

/// Tableau-oracle counterpart of [`run_protocol`](crate::frame::run_protocol):
/// same seeds, same batching, failure judged on the full quantum state.
pub fn run_protocol_tableau<P: Protocol>(
    protocol: &P,
    circuit: &Circuit,
    input: &[usize],
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<RunStats> {
    let model = model.validated()?;
    let expected = bell_reference_stabilizers(circuit, protocol.register(), protocol.output())?;
    let batch = protocol.batch_size().max(1);
    let empty = || RunStats::new(protocol.logical_size(), protocol.qubits_used(), protocol.stages());
    (0..shots.div_ceil(batch))
        .into_par_iter()
        .map(|b| -> Result<RunStats> {
            let program = protocol.program(seed, b)?;
            let lo = b * batch;
            let hi = shots.min(lo.saturating_add(batch));
            Ok((lo..hi)
                .into_par_iter()
                .fold(empty, |mut stats, shot| {
                    let rng = rng_for(seed, &[DOMAIN_SHOT, shot]);
                    let (rec, failed) = tableau_shot(protocol, &program, input, &expected, model, rng);
                    stats.record(rec.ops, failed, &rec.restarts, rec.aborted);
                    stats
                })
                .reduce(empty, RunStats::merge))
        })
        .try_reduce(empty, |a, b| Ok(a.merge(b)))
}

/// Noiselessly runs `protocol` on the input state `prep|0…0⟩` and checks that
/// the output block ends in `circuit · prep |0…0⟩`.
pub fn implements_circuit_on<P: Protocol>(
    protocol: &P,
    program: &P::Program,
    circuit: &Circuit,
    input: &[usize],
    prep: &Circuit,
    rng: ChaCha8Rng,
) -> Result<bool> {
    let n = circuit.num_qubits();
    let register = protocol.register();
    let mut exec = TableauExecutor::new(register, 0, NoiseModel::noiseless(), rng);
    for op in prep.ops() {
        exec.apply_ideal(&op.map_qubits(|q| input[q]))?;
    }
    protocol.execute(program, &mut exec);
    let mut full = prep.clone();
    full.extend(circuit.ops().iter().copied())?;
    let output = protocol.output();
    for i in 0..n {
        let z = propagate(&full, &PauliString::single(n, i, Letter::Z), 0)?;
        if !exec.tableau().stabilizes(&z.embed(register, output)) {
            return Ok(false);
        }
    }
    Ok(true)
}
