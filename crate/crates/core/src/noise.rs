//! Circuit-level stochastic Pauli noise.
//!
//! Preparations and single-qubit gates are followed by `X`, `Y` or `Z` with
//! probability `p1/3` each; controlled-Paulis by one of the 15 non-identity
//! two-qubit Paulis with probability `p2/15` each; measurement outcomes flip
//! with probability `p_meas`; every qubit idle during a layer suffers `X`,
//! `Y` or `Z` with probability `p_idle/3` each.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Operation;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Every operation fails with rate `p`; idle qubits are noiseless.
    Uniform,
    /// Two-qubit rate `p2`; single-qubit, measurement and idle rates `p2/10`.
    Realistic,
}

/// Fault rates per operation class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub mode: NoiseMode,
    pub p1: f64,
    pub p2: f64,
    pub p_meas: f64,
    pub p_idle: f64,
}

/// Fault classes sharing one rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultClass {
    OneQubit,
    TwoQubit,
    Measure,
    Idle,
}

impl FaultClass {
    pub const ALL: [FaultClass; 4] = [
        FaultClass::OneQubit,
        FaultClass::TwoQubit,
        FaultClass::Measure,
        FaultClass::Idle,
    ];

    pub fn of(op: &Operation) -> FaultClass {
        if op.is_two_qubit() {
            FaultClass::TwoQubit
        } else if matches!(op, Operation::Measure(_)) {
            FaultClass::Measure
        } else {
            FaultClass::OneQubit
        }
    }
}

impl NoiseModel {
    pub fn uniform(p: f64) -> Result<Self> {
        Self {
            mode: NoiseMode::Uniform,
            p1: p,
            p2: p,
            p_meas: p,
            p_idle: 0.0,
        }
        .validated()
    }

    pub fn realistic(p2: f64) -> Result<Self> {
        let p1 = p2 / 10.0;
        Self {
            mode: NoiseMode::Realistic,
            p1,
            p2,
            p_meas: p1,
            p_idle: p1,
        }
        .validated()
    }

    pub fn noiseless() -> Self {
        Self {
            mode: NoiseMode::Uniform,
            p1: 0.0,
            p2: 0.0,
            p_meas: 0.0,
            p_idle: 0.0,
        }
    }

    pub fn validated(self) -> Result<Self> {
        for (name, v) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_meas", self.p_meas),
            ("p_idle", self.p_idle),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "noise rate {name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(self)
    }

    pub fn rate(&self, class: FaultClass) -> f64 {
        match class {
            FaultClass::OneQubit => self.p1,
            FaultClass::TwoQubit => self.p2,
            FaultClass::Measure => self.p_meas,
            FaultClass::Idle => self.p_idle,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        FaultClass::ALL.iter().all(|&c| self.rate(c) == 0.0)
    }
}

/// JSON noise configuration. Explicit rate keys override mode defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<NoiseMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_meas: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_idle: Option<f64>,
}

impl NoiseConfig {
    pub fn build(&self) -> Result<NoiseModel> {
        let mode = self.mode.unwrap_or(NoiseMode::Realistic);
        let mut model = match mode {
            NoiseMode::Uniform => {
                let p = self.p.ok_or_else(|| {
                    Error::InvalidParameter("noise.p is required in uniform mode".into())
                })?;
                NoiseModel::uniform(p)?
            }
            NoiseMode::Realistic => {
                let p2 = self.p2.or(self.p).ok_or_else(|| {
                    Error::InvalidParameter("noise.p2 is required in realistic mode".into())
                })?;
                NoiseModel::realistic(p2)?
            }
        };
        if let Some(v) = self.p1 {
            model.p1 = v;
        }
        if let Some(v) = self.p2 {
            model.p2 = v;
        }
        if let Some(v) = self.p_meas {
            model.p_meas = v;
        }
        if let Some(v) = self.p_idle {
            model.p_idle = v;
        }
        model.validated()
    }
}

/// A sampled fault, placed after the operation it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    Single { qubit: usize, letter: Letter },
    Pair { qubits: [usize; 2], letters: [Letter; 2] },
    MeasurementFlip,
}

impl Fault {
    /// The Pauli error on an `n`-qubit register (identity for a flip).
    pub fn to_pauli(&self, n: usize) -> PauliString {
        let mut p = PauliString::identity(n);
        match *self {
            Fault::Single { qubit, letter } => p.set_letter(qubit, letter),
            Fault::Pair { qubits, letters } => {
                p.set_letter(qubits[0], letters[0]);
                p.set_letter(qubits[1], letters[1]);
            }
            Fault::MeasurementFlip => {}
        }
        p
    }
}

const LETTERS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

/// Uniform non-identity letter.
#[inline]
pub fn random_letter<R: Rng + ?Sized>(rng: &mut R) -> Letter {
    Letter::NON_IDENTITY[rng.random_range(0..3)]
}

/// Uniform non-identity two-qubit letter pair.
#[inline]
pub fn random_letter_pair<R: Rng + ?Sized>(rng: &mut R) -> [Letter; 2] {
    let k = rng.random_range(1..16usize);
    [LETTERS[k / 4], LETTERS[k % 4]]
}

/// Draws the fault following `op`, if any.
pub fn sample_fault<R: Rng + ?Sized>(op: &Operation, model: &NoiseModel, rng: &mut R) -> Option<Fault> {
    let class = FaultClass::of(op);
    let p = model.rate(class);
    if p == 0.0 || !rng.random_bool(p) {
        return None;
    }
    let qs = op.qubits();
    Some(match class {
        FaultClass::Measure => Fault::MeasurementFlip,
        FaultClass::TwoQubit => Fault::Pair {
            qubits: [qs[0], qs[1]],
            letters: random_letter_pair(rng),
        },
        _ => Fault::Single {
            qubit: qs[0],
            letter: random_letter(rng),
        },
    })
}

/// Faults on the qubits of `0..total_qubits` not listed in `active`.
pub fn sample_idle_faults<R: Rng + ?Sized>(
    active: &[usize],
    total_qubits: usize,
    model: &NoiseModel,
    rng: &mut R,
) -> Vec<(usize, Letter)> {
    if model.p_idle == 0.0 {
        return Vec::new();
    }
    let mut busy = vec![false; total_qubits];
    for &q in active {
        busy[q] = true;
    }
    (0..total_qubits)
        .filter(|&q| !busy[q])
        .filter_map(|q| {
            if rng.random_bool(model.p_idle) {
                Some((q, random_letter(rng)))
            } else {
                None
            }
        })
        .collect()
}
