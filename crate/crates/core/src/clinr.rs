//! Clifford noise reduction by checked gate teleportation.
//!
//! The register has `3n + 1` qubits: the input block, two resource blocks
//! holding `(I ⊗ Cᵢ)|Φ⟩^⊗n`, and one ancilla for the checks. Each
//! sub-circuit `Cᵢ` is prepared on the resource, `r` random stabilizers of
//! the resource are measured (any unexpected outcome restarts the
//! preparation), and the input is then teleported through the resource.
//! Between stages the first and third blocks trade roles, so no swaps are
//! executed.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{propagate, Circuit, Operation};
use crate::error::{Error, Result};
use crate::f2::{pack, Basis};
use crate::frame::{run_protocol, Executor, Protocol, ShotRecord};
use crate::noise::NoiseModel;
use crate::pauli::{Letter, PauliString};
use crate::schedule::split_circuit;
use crate::seed::{rng_for, DOMAIN_CHECKS};
use crate::segment::{Expectation, Segment};
use crate::stats::RunStats;

/// How checks are drawn from the resource stabilizer group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStrategy {
    /// Uniformly random independent group elements.
    #[default]
    Uniform,
    /// Images of the weight-2 Bell stabilizers `XX`, `YY`, `ZZ`.
    Bell,
}

/// Which waiting qubits accrue idle faults while a resource state is being
/// prepared and checked. Teleportation layers always idle the full register.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdleScope {
    /// Every register qubit, including the data block waiting for the
    /// resource.
    Register,
    /// Only the resource blocks and the check ancilla; the data block is
    /// treated as not yet waiting, as if the resource were prepared ahead of
    /// time.
    #[default]
    Resource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClinrParams {
    pub t: usize,
    pub r: usize,
    pub strategy: CheckStrategy,
    /// Shots between check re-selections.
    pub batch_size: u64,
    /// Restarts allowed per shot before it is aborted.
    pub max_restarts: u32,
    pub idle_scope: IdleScope,
}

impl Default for ClinrParams {
    fn default() -> Self {
        Self {
            t: 1,
            r: 1,
            strategy: CheckStrategy::Uniform,
            batch_size: 1000,
            max_restarts: 10_000,
            idle_scope: IdleScope::default(),
        }
    }
}

impl ClinrParams {
    pub fn new(t: usize, r: usize) -> Self {
        Self {
            t,
            r,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidParameter("t must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be at least 1".into()));
        }
        if self.max_restarts == 0 {
            return Err(Error::InvalidParameter("max_restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Generators of the resource state `(I ⊗ Cᵢ)|Φ⟩^⊗n` on a `3n + 1` register:
/// `X_{n+i} · Cᵢ X_{2n+i} Cᵢ†` for every `i`, then the same with `Z`.
pub fn resource_generators(ci: &Circuit, n: usize) -> Result<Vec<PauliString>> {
    if ci.num_qubits() != n {
        return Err(Error::LengthMismatch {
            left: ci.num_qubits(),
            right: n,
        });
    }
    ci.ensure_clifford()?;
    let reg = 3 * n + 1;
    let block3: Vec<usize> = (2 * n..3 * n).collect();
    let mut gens = Vec::with_capacity(2 * n);
    for l in [Letter::X, Letter::Z] {
        for i in 0..n {
            let image = propagate(ci, &PauliString::single(n, i, l), 0)?;
            let mut g = image.embed(reg, &block3);
            g.set_letter(n + i, l);
            gens.push(g);
        }
    }
    Ok(gens)
}

/// Product of the generators selected by `coeffs`.
fn combine(gens: &[PauliString], coeffs: &[bool]) -> PauliString {
    let mut acc = PauliString::identity(gens[0].num_qubits());
    for (g, &c) in gens.iter().zip(coeffs) {
        if c {
            acc.mul_assign(g);
        }
    }
    acc
}

/// Draws `r` independent elements of the group generated by the commuting,
/// independent `gens`: each element is a uniformly random combination of
/// the generators, resampled while it depends on the earlier ones.
pub fn sample_uniform_checks<R: Rng + ?Sized>(
    gens: &[PauliString],
    r: usize,
    rng: &mut R,
) -> Result<Vec<PauliString>> {
    let k = gens.len();
    if r > k {
        return Err(Error::TooManyChecks { requested: r, rank: k });
    }
    let mut basis = Basis::new(k);
    let mut out = Vec::with_capacity(r);
    while out.len() < r {
        let coeffs: Vec<bool> = (0..k).map(|_| rng.random()).collect();
        if basis.insert(&pack(&coeffs)) {
            out.push(combine(gens, &coeffs));
        }
    }
    Ok(out)
}

/// Draws `r` independent checks among the `3n` images of the Bell-pair
/// stabilizers `XX`, `ZZ` and their product `-YY`, each of weight at most
/// `n + 1`.
pub fn sample_bell_checks<R: Rng + ?Sized>(
    ci: &Circuit,
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<Vec<PauliString>> {
    if r > 2 * n {
        return Err(Error::TooManyChecks {
            requested: r,
            rank: 2 * n,
        });
    }
    let pool = bell_pool(&resource_generators(ci, n)?, n);
    let mut basis = Basis::new(2 * (3 * n + 1));
    let mut out = Vec::with_capacity(r);
    while out.len() < r {
        let p = pool.choose(rng).expect("non-empty pool");
        if basis.insert(&p.symplectic_bits()) {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn bell_pool(gens: &[PauliString], n: usize) -> Vec<PauliString> {
    let mut pool = Vec::with_capacity(3 * n);
    for i in 0..n {
        let (gx, gz) = (&gens[i], &gens[n + i]);
        let mut y = gx.clone();
        y.mul_assign(gz);
        pool.extend([gx.clone(), gz.clone(), y]);
    }
    pool
}

/// Measurement of `p` through `ancilla`: prepare `|+⟩`, apply a controlled
/// Pauli for each letter of `p`, rotate back and measure. The outcome is 1
/// exactly when the state is in the `-1` eigenspace of the unsigned letters.
pub fn check_subcircuit(p: &PauliString, ancilla: usize) -> Result<Vec<Operation>> {
    if p.letters_trivial() {
        return Err(Error::InvalidPauli("cannot measure the identity".into()));
    }
    if ancilla >= p.num_qubits() || p.letter(ancilla) != Letter::I {
        return Err(Error::InvalidParameter(format!(
            "ancilla {ancilla} must lie outside the check support"
        )));
    }
    let mut ops = vec![Operation::PrepX(ancilla)];
    for q in p.support() {
        ops.push(Operation::controlled(p.letter(q), ancilla, q).expect("non-identity letter"));
    }
    ops.extend([Operation::H(ancilla), Operation::Measure(ancilla)]);
    Ok(ops)
}

/// A compiled check measurement.
#[derive(Clone, Debug)]
pub struct Check {
    pub pauli: PauliString,
    pub segment: Segment,
}

impl Check {
    /// Compiles the check; only qubits in `idle_window` accrue idle faults.
    pub fn new(pauli: PauliString, ancilla: usize, idle_window: &[usize]) -> Result<Self> {
        let ops = check_subcircuit(&pauli, ancilla)?;
        let circuit = Circuit::from_ops(pauli.num_qubits(), ops)?;
        let segment = Segment::with_idle_window(
            &circuit,
            vec![Expectation::Deterministic(pauli.is_negative())],
            idle_window,
        )?;
        Ok(Self { pauli, segment })
    }

    fn expected(&self) -> bool {
        self.pauli.is_negative()
    }
}

/// The teleportation correction
/// `Q = ∏ᵢ (Cᵢ X Cᵢ†)_{i}^{o_{n+i}} (Cᵢ Z Cᵢ†)_{i}^{o_i}` on `n` qubits,
/// up to sign.
pub fn q_correction(ci: &Circuit, outcomes: &[bool]) -> Result<PauliString> {
    let n = ci.num_qubits();
    if outcomes.len() != 2 * n {
        return Err(Error::LengthMismatch {
            left: outcomes.len(),
            right: 2 * n,
        });
    }
    let mut q = PauliString::identity(n);
    for i in 0..n {
        if outcomes[n + i] {
            q.mul_assign(&propagate(ci, &PauliString::single(n, i, Letter::X), 0)?);
        }
        if outcomes[i] {
            q.mul_assign(&propagate(ci, &PauliString::single(n, i, Letter::Z), 0)?);
        }
    }
    q.set_negative(false);
    Ok(q)
}

/// Runs one teleportation stage: prepare, check (restarting on a
/// detection), teleport and correct. Returns false when the restart cap is
/// hit.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_stage<E: Executor>(
    exec: &mut E,
    stage: usize,
    resource: &Segment,
    checks: &[Check],
    teleport: &Segment,
    targets: &[usize],
    correction: &dyn Fn(&[bool]) -> PauliString,
    max_restarts: u32,
    record: &mut ShotRecord,
) -> bool {
    loop {
        exec.run_segment(resource);
        record.ops += resource.len() as u64;
        let mut passed = true;
        for check in checks {
            let out = exec.run_segment(&check.segment);
            record.ops += check.segment.len() as u64;
            if out.reported[0] != check.expected() {
                passed = false;
                break;
            }
        }
        if passed {
            break;
        }
        record.restarts[stage] += 1;
        if record.restarts.iter().sum::<u32>() > max_restarts {
            record.aborted = true;
            return false;
        }
    }
    let outcomes = exec.run_segment(teleport);
    exec.feedforward(targets, &outcomes, correction);
    record.ops += (teleport.len() + targets.len()) as u64;
    true
}

#[derive(Clone, Debug)]
struct Stage {
    part: Circuit,
    /// Canonical register position to physical qubit.
    perm: Vec<usize>,
    resource: Segment,
    teleport: Segment,
    block3: Vec<usize>,
    window: Vec<usize>,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
    generators: Vec<PauliString>,
}

/// The CliNR implementation of a Clifford circuit.
#[derive(Clone, Debug)]
pub struct ClinrProtocol {
    n: usize,
    size: usize,
    params: ClinrParams,
    stages: Vec<Stage>,
    input: Vec<usize>,
    output: Vec<usize>,
    used: usize,
}

/// Qubits accruing idle faults during preparation and checks.
pub(crate) fn prep_window(scope: IdleScope, register: usize, resource: &[usize]) -> Vec<usize> {
    match scope {
        IdleScope::Register => (0..register).collect(),
        IdleScope::Resource => {
            let mut w = resource.to_vec();
            w.push(register - 1);
            w.sort_unstable();
            w
        }
    }
}

impl ClinrProtocol {
    pub fn new(circuit: &Circuit, params: ClinrParams) -> Result<Self> {
        params.validate()?;
        let n = circuit.num_qubits();
        if n == 0 {
            return Err(Error::InvalidParameter("circuit has no qubits".into()));
        }
        if params.r > 2 * n {
            return Err(Error::TooManyChecks {
                requested: params.r,
                rank: 2 * n,
            });
        }
        let reg = 3 * n + 1;
        let mut touched = vec![false; reg];
        let mut stages = Vec::with_capacity(params.t);
        for (k, part) in split_circuit(circuit, params.t)?.into_iter().enumerate() {
            let mut perm: Vec<usize> = (0..reg).collect();
            if k % 2 == 1 {
                for i in 0..n {
                    perm.swap(i, 2 * n + i);
                }
            }
            let input: Vec<usize> = (0..n).map(|i| perm[i]).collect();
            let block2: Vec<usize> = (n..2 * n).collect();
            let block3: Vec<usize> = (0..n).map(|i| perm[2 * n + i]).collect();

            let mut res = Circuit::new(reg);
            for i in 0..n {
                res.extend([
                    Operation::PrepX(block2[i]),
                    Operation::PrepZ(block3[i]),
                    Operation::CX(block2[i], block3[i]),
                ])?;
            }
            res.extend(part.embed(reg, &block3)?.ops().iter().copied())?;

            let mut tel = Circuit::new(reg);
            tel.extend((0..n).map(|i| Operation::CX(input[i], block2[i])))?;
            tel.extend(input.iter().map(|&q| Operation::H(q)))?;
            tel.extend(input.iter().chain(&block2).map(|&q| Operation::Measure(q)))?;

            let image = |l: Letter, i: usize| -> Result<PauliString> {
                Ok(propagate(&part, &PauliString::single(n, i, l), 0)?.embed(reg, &block3))
            };
            let x_images = (0..n).map(|i| image(Letter::X, i)).collect::<Result<_>>()?;
            let z_images = (0..n).map(|i| image(Letter::Z, i)).collect::<Result<_>>()?;

            let blocks23: Vec<usize> = block2.iter().chain(&block3).copied().collect();
            let window = prep_window(params.idle_scope, reg, &blocks23);
            let resource = Segment::with_idle_window(&res, vec![], &window)?;
            let teleport = Segment::new(&tel, vec![Expectation::Random; 2 * n])?;
            for &q in resource.touched().iter().chain(teleport.touched()) {
                touched[q] = true;
            }
            if params.r > 0 {
                touched[3 * n] = true;
            }
            stages.push(Stage {
                generators: resource_generators(&part, n)?,
                part,
                perm,
                resource,
                teleport,
                block3,
                window,
                x_images,
                z_images,
            });
        }
        let output = stages.last().expect("t ≥ 1").block3.clone();
        Ok(Self {
            n,
            size: circuit.size(),
            params,
            stages,
            input: (0..n).collect(),
            output,
            used: touched.iter().filter(|&&b| b).count(),
        })
    }

    pub fn params(&self) -> &ClinrParams {
        &self.params
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn input(&self) -> &[usize] {
        &self.input
    }

    pub fn ancilla(&self) -> usize {
        3 * self.n
    }

    /// The sub-circuits, in execution order.
    pub fn parts(&self) -> impl Iterator<Item = &Circuit> {
        self.stages.iter().map(|s| &s.part)
    }

    /// Resource generators of stage `k` in physical qubit positions.
    pub fn stage_generators(&self, k: usize) -> Vec<PauliString> {
        let st = &self.stages[k];
        st.generators.iter().map(|g| g.embed(g.num_qubits(), &st.perm)).collect()
    }

    /// Draws the checks of every stage, already compiled.
    pub fn draw_checks<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Vec<Check>>> {
        let reg = 3 * self.n + 1;
        self.stages
            .iter()
            .map(|st| {
                let canonical = match self.params.strategy {
                    CheckStrategy::Uniform => sample_uniform_checks(&st.generators, self.params.r, rng)?,
                    CheckStrategy::Bell => sample_bell_checks(&st.part, self.n, self.params.r, rng)?,
                };
                canonical
                    .into_iter()
                    .map(|p| Check::new(p.embed(reg, &st.perm), self.ancilla(), &st.window))
                    .collect()
            })
            .collect()
    }

    /// Compiles a fixed set of checks (physical positions) for every stage.
    pub fn checks_from(&self, paulis: Vec<Vec<PauliString>>) -> Result<Vec<Vec<Check>>> {
        paulis
            .into_iter()
            .zip(&self.stages)
            .map(|(ps, st)| ps.into_iter().map(|p| Check::new(p, self.ancilla(), &st.window)).collect())
            .collect()
    }
}

impl Protocol for ClinrProtocol {
    type Program = Vec<Vec<Check>>;

    fn register(&self) -> usize {
        3 * self.n + 1
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

    fn stages(&self) -> usize {
        self.stages.len()
    }

    fn batch_size(&self) -> u64 {
        self.params.batch_size
    }

    fn program(&self, seed: u64, batch: u64) -> Result<Self::Program> {
        self.draw_checks(&mut rng_for(seed, &[DOMAIN_CHECKS, batch]))
    }

    fn execute<E: Executor>(&self, program: &Self::Program, exec: &mut E) -> ShotRecord {
        let mut record = ShotRecord {
            restarts: vec![0; self.stages.len()],
            ..ShotRecord::default()
        };
        let reg = self.register();
        for (k, (st, checks)) in self.stages.iter().zip(program).enumerate() {
            let n = self.n;
            let correction = |o: &[bool]| {
                let mut q = PauliString::identity(reg);
                for i in 0..n {
                    if o[n + i] {
                        q.xor_assign(&st.x_images[i]);
                    }
                    if o[i] {
                        q.xor_assign(&st.z_images[i]);
                    }
                }
                q
            };
            let done = run_stage(
                exec,
                k,
                &st.resource,
                checks,
                &st.teleport,
                &st.block3,
                &correction,
                self.params.max_restarts,
                &mut record,
            );
            if !done {
                break;
            }
        }
        record
    }
}

/// Frame simulation of the CliNR implementation of `circuit`.
pub fn run_clinr(
    circuit: &Circuit,
    params: ClinrParams,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<RunStats> {
    run_protocol(&ClinrProtocol::new(circuit, params)?, model, shots, seed)
}
