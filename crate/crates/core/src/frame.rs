//! Pauli-frame execution of protocols.
//!
//! The frame is the Pauli difference between the noisy run and a noiseless
//! reference run. Measurements report the reference outcome XOR the frame's
//! X component XOR any sampled flip; classically controlled corrections fold
//! `correction(reported) · correction(reference)` into the frame.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::circuit::{Circuit, Operation};
use crate::error::{Error, Result};
use crate::noise::{random_letter, random_letter_pair, FaultClass, NoiseModel};
use crate::pauli::PauliString;
use crate::seed::{rng_for, DOMAIN_SHOT};
use crate::segment::{Expectation, Segment};
use crate::stats::RunStats;

/// Reported outcomes of one segment, plus whatever the backend needs to
/// apply outcome-dependent corrections.
#[derive(Clone, Debug)]
pub struct Outcomes {
    pub reported: Vec<bool>,
    reference: Option<Vec<bool>>,
}

impl Outcomes {
    pub fn new(reported: Vec<bool>) -> Self {
        Self {
            reported,
            reference: None,
        }
    }
}

/// A backend able to run protocol steps under noise.
pub trait Executor {
    /// Runs a segment, including its noise, and returns its outcomes in
    /// program order.
    fn run_segment(&mut self, segment: &Segment) -> Outcomes;

    /// Applies `correction(outcomes)` as one layer of single-qubit gates on
    /// `targets` (identity letters included); qubits of the register not in
    /// `targets` idle during that layer.
    fn feedforward(
        &mut self,
        targets: &[usize],
        outcomes: &Outcomes,
        correction: &dyn Fn(&[bool]) -> PauliString,
    );
}

/// Per-shot result of a protocol execution.
#[derive(Clone, Debug, Default)]
pub struct ShotRecord {
    pub ops: u64,
    /// Restarts per sub-circuit.
    pub restarts: Vec<u32>,
    pub aborted: bool,
}

/// A noisy implementation of a logical circuit, as a program over segments.
pub trait Protocol: Sync {
    /// State that is re-drawn every batch (e.g. the measured checks).
    type Program: Send + Sync;

    fn register(&self) -> usize;
    /// Qubits carrying the logical output at the end of a shot.
    fn output(&self) -> &[usize];
    /// Qubits the protocol ever acts on.
    fn qubits_used(&self) -> usize;
    /// Size of the logical circuit.
    fn logical_size(&self) -> usize;
    fn stages(&self) -> usize {
        1
    }
    /// Shots sharing one program.
    fn batch_size(&self) -> u64 {
        u64::MAX
    }
    fn program(&self, seed: u64, batch: u64) -> Result<Self::Program>;
    fn execute<E: Executor>(&self, program: &Self::Program, exec: &mut E) -> ShotRecord;
}

#[derive(Clone, Copy, Debug)]
enum Event {
    Fault1(u32),
    Fault2(u32),
    Flip(u32),
    Idle(u32),
}

/// Frame-tracking executor for one shot.
pub struct FrameExecutor {
    frame: PauliString,
    rng: ChaCha8Rng,
    model: NoiseModel,
    geometric: [Option<Geometric>; 4],
    events: Vec<(u32, Event)>,
}

impl FrameExecutor {
    pub fn new(register: usize, model: NoiseModel, rng: ChaCha8Rng) -> Self {
        let geometric = FaultClass::ALL.map(|c| {
            let p = model.rate(c);
            (p > 0.0).then(|| Geometric::new(p).expect("validated rate"))
        });
        Self {
            frame: PauliString::identity(register),
            rng,
            model,
            geometric,
            events: Vec::new(),
        }
    }

    pub fn frame(&self) -> &PauliString {
        &self.frame
    }

    /// Injects a Pauli error into the frame.
    pub fn inject(&mut self, error: &PauliString) {
        self.frame.xor_assign(error);
    }

    fn sample_positions(&mut self, class: usize, len: usize, mut emit: impl FnMut(usize)) {
        let Some(geo) = self.geometric[class] else {
            return;
        };
        let mut i = geo.sample(&mut self.rng);
        while i < len as u64 {
            emit(i as usize);
            i = i.saturating_add(1).saturating_add(geo.sample(&mut self.rng));
        }
    }

    fn sample_events(&mut self, seg: &Segment) {
        let mut events = std::mem::take(&mut self.events);
        events.clear();
        let one = seg.locations(FaultClass::OneQubit);
        self.sample_positions(0, one.len(), |i| events.push((one[i], Event::Fault1(one[i]))));
        let two = seg.locations(FaultClass::TwoQubit);
        self.sample_positions(1, two.len(), |i| events.push((two[i], Event::Fault2(two[i]))));
        let meas = seg.locations(FaultClass::Measure);
        self.sample_positions(2, meas.len(), |i| events.push((meas[i], Event::Flip(meas[i]))));
        let idle = seg.idle_slots();
        self.sample_positions(3, idle.len(), |i| {
            events.push((idle[i].after_op, Event::Idle(idle[i].qubit)))
        });
        events.sort_by_key(|e| e.0);
        self.events = events;
    }

    #[inline]
    fn conjugate(&mut self, op: &Operation, pos: usize, seg: &Segment, reported: &mut [bool]) {
        match *op {
            Operation::PrepZ(q) | Operation::PrepX(q) => self.frame.clear(q),
            Operation::Measure(q) => {
                if self.frame.x(q) {
                    let m = seg.measure_index(pos).expect("measurement index");
                    reported[m] ^= true;
                }
            }
            _ => self.frame.conjugate_by(op).expect("unitary"),
        }
    }

    fn apply_event(&mut self, event: Event, seg: &Segment, reported: &mut [bool]) {
        match event {
            Event::Fault1(pos) => {
                let q = seg.ops()[pos as usize].qubits()[0];
                let l = random_letter(&mut self.rng);
                self.frame.xor_letter(q, l);
            }
            Event::Fault2(pos) => {
                let qs = seg.ops()[pos as usize].qubits();
                let [a, b] = random_letter_pair(&mut self.rng);
                self.frame.xor_letter(qs[0], a);
                self.frame.xor_letter(qs[1], b);
            }
            Event::Flip(pos) => {
                let m = seg.measure_index(pos as usize).expect("measurement index");
                reported[m] ^= true;
            }
            Event::Idle(q) => {
                let l = random_letter(&mut self.rng);
                self.frame.xor_letter(q as usize, l);
            }
        }
    }
}

impl Executor for FrameExecutor {
    fn run_segment(&mut self, seg: &Segment) -> Outcomes {
        let reference: Vec<bool> = seg
            .expectations()
            .iter()
            .map(|e| match *e {
                Expectation::Deterministic(b) => b,
                Expectation::Random => self.rng.random(),
            })
            .collect();
        let mut reported = reference.clone();
        self.sample_events(seg);
        let events = std::mem::take(&mut self.events);
        let ops = seg.ops();
        let mut k = 0;
        let mut e = 0;
        while k < ops.len() {
            let end = if e < events.len() {
                events[e].0 as usize + 1
            } else if self.frame.letters_trivial() {
                break;
            } else {
                ops.len()
            };
            // An identity frame is invariant under every operation.
            if !self.frame.letters_trivial() {
                for (pos, op) in ops.iter().enumerate().take(end).skip(k) {
                    self.conjugate(op, pos, seg, &mut reported);
                }
            }
            k = end;
            while e < events.len() && events[e].0 as usize + 1 == end {
                self.apply_event(events[e].1, seg, &mut reported);
                e += 1;
            }
        }
        self.events = events;
        Outcomes {
            reported,
            reference: Some(reference),
        }
    }

    fn feedforward(
        &mut self,
        targets: &[usize],
        outcomes: &Outcomes,
        correction: &dyn Fn(&[bool]) -> PauliString,
    ) {
        let reference = outcomes
            .reference
            .as_deref()
            .expect("outcomes produced by a frame executor");
        if reference != outcomes.reported.as_slice() {
            self.frame.xor_assign(&correction(&outcomes.reported));
            self.frame.xor_assign(&correction(reference));
        }
        let p1 = self.model.p1;
        if p1 > 0.0 {
            for &q in targets {
                if self.rng.random_bool(p1) {
                    let l = random_letter(&mut self.rng);
                    self.frame.xor_letter(q, l);
                }
            }
        }
        let p_idle = self.model.p_idle;
        if p_idle > 0.0 {
            for q in 0..self.frame.num_qubits() {
                if !targets.contains(&q) && self.rng.random_bool(p_idle) {
                    let l = random_letter(&mut self.rng);
                    self.frame.xor_letter(q, l);
                }
            }
        }
    }
}

/// Runs `shots` frame-simulated shots of `protocol`.
///
/// Shot `k` draws from a generator keyed by `(seed, k)` and uses the
/// program of batch `k / batch_size`, so the statistics are independent of
/// the thread count.
pub fn run_protocol<P: Protocol>(
    protocol: &P,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<RunStats> {
    let model = model.validated()?;
    let batch = protocol.batch_size().max(1);
    let batches = shots.div_ceil(batch);
    let empty = || RunStats::new(protocol.logical_size(), protocol.qubits_used(), protocol.stages());
    let per_batch = |b: u64| -> Result<RunStats> {
        let program = protocol.program(seed, b)?;
        let lo = b * batch;
        let hi = shots.min(lo.saturating_add(batch));
        Ok((lo..hi)
            .into_par_iter()
            .fold(empty, |mut stats, shot| {
                let mut exec =
                    FrameExecutor::new(protocol.register(), model, rng_for(seed, &[DOMAIN_SHOT, shot]));
                let rec = protocol.execute(&program, &mut exec);
                let failed = !exec.frame().trivial_on(protocol.output());
                stats.record(rec.ops, failed, &rec.restarts, rec.aborted);
                stats
            })
            .reduce(empty, RunStats::merge))
    };
    (0..batches)
        .into_par_iter()
        .map(per_batch)
        .try_reduce(empty, |a, b| Ok(a.merge(b)))
}

/// The direct implementation: the circuit itself, executed once.
#[derive(Clone, Debug)]
pub struct DirectProtocol {
    segment: Segment,
    output: Vec<usize>,
    size: usize,
    used: usize,
}

impl DirectProtocol {
    pub fn new(circuit: &Circuit) -> Result<Self> {
        circuit.ensure_clifford()?;
        let segment = Segment::unitary(circuit)?;
        Ok(Self {
            used: segment.touched().len(),
            segment,
            output: (0..circuit.num_qubits()).collect(),
            size: circuit.size(),
        })
    }

    pub fn segment(&self) -> &Segment {
        &self.segment
    }
}

impl Protocol for DirectProtocol {
    type Program = ();

    fn register(&self) -> usize {
        self.output.len()
    }

    fn output(&self) -> &[usize] {
        &self.output
    }

    fn qubits_used(&self) -> usize {
        self.used
    }

    fn logical_size(&self) -> usize {
        self.size
    }

    fn program(&self, _seed: u64, _batch: u64) -> Result<()> {
        Ok(())
    }

    fn execute<E: Executor>(&self, _: &(), exec: &mut E) -> ShotRecord {
        exec.run_segment(&self.segment);
        ShotRecord {
            ops: self.segment.len() as u64,
            restarts: Vec::new(),
            aborted: false,
        }
    }
}

/// Frame simulation of the direct implementation of `circuit`.
pub fn run_direct(circuit: &Circuit, model: &NoiseModel, shots: u64, seed: u64) -> Result<RunStats> {
    if circuit.num_qubits() == 0 {
        return Err(Error::InvalidParameter("circuit has no qubits".into()));
    }
    run_protocol(&DirectProtocol::new(circuit)?, model, shots, seed)
}
