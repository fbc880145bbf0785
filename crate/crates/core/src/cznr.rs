//! Noise reduction for CZ circuits through checked graph-state injection.
//!
//! A CZ circuit is the graph-state unitary `U_G` of its edge set (mod 2).
//! The register has `2n + 1` qubits: the input block, the graph-state block
//! and one check ancilla. The graph state is prepared and checked, then the
//! input is one-bit teleported into it by `CX(b₂ᵢ → inᵢ)` and a Z
//! measurement, with correction `X_{b₂ᵢ} ∏_{j∈N(i)} Z_{b₂ⱼ}` for each
//! outcome 1.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::circuit::{Circuit, Operation};
use crate::clinr::{prep_window, run_stage, sample_uniform_checks, Check, ClinrParams};
use crate::error::{Error, Result};
use crate::frame::{run_protocol, Executor, Protocol, ShotRecord};
use crate::noise::NoiseModel;
use crate::pauli::{Letter, PauliString};
use crate::schedule::split_sizes;
use crate::seed::{rng_for, DOMAIN_CHECKS};
use crate::segment::{Expectation, Segment};
use crate::stats::RunStats;

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.toggle_edge(u, v)?;
        }
        Ok(g)
    }

    /// The complete graph, the densest CZ block on `n` qubits.
    pub fn complete(n: usize) -> Self {
        Self {
            n,
            edges: (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        }
    }

    /// Adds the edge if absent, removes it otherwise.
    pub fn toggle_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for q in [u, v] {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
            }
        }
        if u == v {
            return Err(Error::RepeatedQubit(format!("self-loop on vertex {u}")));
        }
        let e = (u.min(v), u.max(v));
        if !self.edges.remove(&e) {
            self.edges.insert(e);
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

impl fmt::Display for Graph {
    /// Edge-list format: a `graph <n>` header then one `edge u v` per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(f, "edge {u} {v}")?;
        }
        Ok(())
    }
}

/// Parses the edge-list format written by `Display`. Repeated edges cancel.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad integer `{s}`")));
        match (fields[0], &graph) {
            ("graph", None) if fields.len() == 2 => graph = Some(Graph::new(num(fields[1])?)),
            ("graph", _) => return Err(err("expected a single `graph <n>` header".into())),
            ("edge", Some(_)) if fields.len() == 3 => {
                let (u, v) = (num(fields[1])?, num(fields[2])?);
                graph
                    .as_mut()
                    .expect("header seen")
                    .toggle_edge(u, v)
                    .map_err(|e| err(e.to_string()))?;
            }
            ("edge", None) => return Err(err("edge before `graph` header".into())),
            _ => return Err(err(format!("unrecognized line `{content}`"))),
        }
    }
    graph.ok_or(Error::Parse {
        line: 0,
        message: "missing `graph <n>` header".into(),
    })
}

/// The graph of a CZ-only circuit, with repeated gates cancelling.
pub fn circuit_to_graph(circuit: &Circuit) -> Result<Graph> {
    let mut g = Graph::new(circuit.num_qubits());
    for op in circuit.ops() {
        match *op {
            Operation::CZ(a, b) => g.toggle_edge(a, b)?,
            other => return Err(Error::NotCzOnly(other.to_string())),
        }
    }
    Ok(g)
}

/// One CZ per edge, in lexicographic edge order.
pub fn graph_to_circuit(g: &Graph) -> Circuit {
    Circuit::from_ops(g.n, g.edges().map(|(u, v)| Operation::CZ(u, v))).expect("edges in range")
}

/// Generators `X_v ∏_{u∈N(v)} Z_u` of the graph state `U_G|+⟩^⊗n`.
pub fn graph_state_stabilizers(g: &Graph) -> Vec<PauliString> {
    (0..g.n)
        .map(|v| {
            let mut p = PauliString::single(g.n, v, Letter::X);
            for u in g.neighbors(v) {
                p.set_letter(u, Letter::Z);
            }
            p
        })
        .collect()
}

/// Correction on the graph block after injection, on a `2n` register whose
/// second half holds the graph state: the product over `i` with `oᵢ = 1` of
/// `X_{n+i} ∏_{j∈N(i)} Z_{n+j}`, up to sign.
pub fn injection_correction(g: &Graph, outcomes: &[bool]) -> Result<PauliString> {
    let n = g.n;
    if outcomes.len() != n {
        return Err(Error::LengthMismatch {
            left: outcomes.len(),
            right: n,
        });
    }
    let block: Vec<usize> = (n..2 * n).collect();
    let mut out = PauliString::identity(2 * n);
    for (p, _) in graph_state_stabilizers(g)
        .iter()
        .zip(outcomes)
        .filter(|(_, &o)| o)
    {
        out.mul_assign(&p.embed(2 * n, &block));
    }
    out.set_negative(false);
    Ok(out)
}

/// Splits a CZ-only circuit into `t` consecutive chunks and reduces each to
/// its graph.
pub fn split_graphs(circuit: &Circuit, t: usize) -> Result<Vec<Graph>> {
    let sizes = split_sizes(circuit.size(), t)?;
    let mut out = Vec::with_capacity(t);
    let mut start = 0;
    for len in sizes {
        let ops = circuit.ops()[start..start + len].iter().copied();
        out.push(circuit_to_graph(&Circuit::from_ops(circuit.num_qubits(), ops)?)?);
        start += len;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Stage {
    graph: Graph,
    /// Graph-state generators on the physical register.
    generators: Vec<PauliString>,
    resource: Segment,
    teleport: Segment,
    block2: Vec<usize>,
    window: Vec<usize>,
    corrections: Vec<PauliString>,
}

/// The CZNR implementation of a CZ circuit.
#[derive(Clone, Debug)]
pub struct CznrProtocol {
    n: usize,
    size: usize,
    params: ClinrParams,
    stages: Vec<Stage>,
    output: Vec<usize>,
    used: usize,
}

impl CznrProtocol {
    pub fn new(circuit: &Circuit, params: ClinrParams) -> Result<Self> {
        params.validate()?;
        let n = circuit.num_qubits();
        if n == 0 {
            return Err(Error::InvalidParameter("circuit has no qubits".into()));
        }
        if params.r > n {
            return Err(Error::TooManyChecks {
                requested: params.r,
                rank: n,
            });
        }
        let reg = 2 * n + 1;
        let mut touched = vec![false; reg];
        let mut stages = Vec::with_capacity(params.t);
        for (k, graph) in split_graphs(circuit, params.t)?.into_iter().enumerate() {
            let (input, block2): (Vec<usize>, Vec<usize>) = if k % 2 == 0 {
                ((0..n).collect(), (n..2 * n).collect())
            } else {
                ((n..2 * n).collect(), (0..n).collect())
            };
            let mut res = Circuit::new(reg);
            res.extend(block2.iter().map(|&q| Operation::PrepX(q)))?;
            res.extend(graph.edges().map(|(u, v)| Operation::CZ(block2[u], block2[v])))?;
            let mut tel = Circuit::new(reg);
            tel.extend((0..n).map(|i| Operation::CX(block2[i], input[i])))?;
            tel.extend(input.iter().map(|&q| Operation::Measure(q)))?;
            let generators: Vec<PauliString> = graph_state_stabilizers(&graph)
                .iter()
                .map(|g| g.embed(reg, &block2))
                .collect();
            let window = prep_window(params.idle_scope, reg, &block2);
            let resource = Segment::with_idle_window(&res, vec![], &window)?;
            let teleport = Segment::new(&tel, vec![Expectation::Random; n])?;
            for &q in resource.touched().iter().chain(teleport.touched()) {
                touched[q] = true;
            }
            if params.r > 0 {
                touched[2 * n] = true;
            }
            stages.push(Stage {
                graph,
                corrections: generators.clone(),
                generators,
                resource,
                teleport,
                block2,
                window,
            });
        }
        let output = stages.last().expect("t ≥ 1").block2.clone();
        Ok(Self {
            n,
            size: circuit.size(),
            params,
            stages,
            output,
            used: touched.iter().filter(|&&b| b).count(),
        })
    }

    /// From a graph directly, as a single CZ block.
    pub fn from_graph(graph: &Graph, params: ClinrParams) -> Result<Self> {
        Self::new(&graph_to_circuit(graph), params)
    }

    pub fn input(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn ancilla(&self) -> usize {
        2 * self.n
    }

    pub fn graphs(&self) -> impl Iterator<Item = &Graph> {
        self.stages.iter().map(|s| &s.graph)
    }

    pub fn draw_checks<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Vec<Check>>> {
        self.stages
            .iter()
            .map(|st| {
                sample_uniform_checks(&st.generators, self.params.r, rng)?
                    .into_iter()
                    .map(|p| Check::new(p, self.ancilla(), &st.window))
                    .collect()
            })
            .collect()
    }
}

impl Protocol for CznrProtocol {
    type Program = Vec<Vec<Check>>;

    fn register(&self) -> usize {
        2 * self.n + 1
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
            let correction = |o: &[bool]| {
                let mut q = PauliString::identity(reg);
                for (c, _) in st.corrections.iter().zip(o).filter(|(_, &b)| b) {
                    q.xor_assign(c);
                }
                q
            };
            let done = run_stage(
                exec,
                k,
                &st.resource,
                checks,
                &st.teleport,
                &st.block2,
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

/// Frame simulation of the CZNR implementation of a CZ circuit.
pub fn run_cznr(
    circuit: &Circuit,
    params: ClinrParams,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<RunStats> {
    run_protocol(&CznrProtocol::new(circuit, params)?, model, shots, seed)
}
