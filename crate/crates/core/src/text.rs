//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 3
//! # comment
//! P0 0
//! H 0
//! CX 0 1
//! M 1
//! ```
//!
//! Mnemonics: `P0 P+ H S SDG X Y Z CX CY CZ M`. Blank lines are ignored and
//! `#` starts a comment anywhere on a line.

use std::fmt::Write;

use crate::circuit::{Circuit, Operation};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a qubit index, found {tok:?}")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(c) = circuit.as_mut() else {
            if toks[0] != "qubits" || toks.len() != 2 {
                return Err(parse_err(line, "expected header `qubits <n>`"));
            }
            let n = toks[1]
                .parse()
                .map_err(|_| parse_err(line, format!("bad qubit count {:?}", toks[1])))?;
            circuit = Some(Circuit::new(n));
            continue;
        };
        let arity = match toks[0] {
            "CX" | "CY" | "CZ" => 2,
            "P0" | "P+" | "H" | "S" | "SDG" | "X" | "Y" | "Z" | "M" => 1,
            "qubits" => return Err(parse_err(line, "duplicate `qubits` header")),
            other => return Err(parse_err(line, format!("unknown mnemonic {other:?}"))),
        };
        if toks.len() != arity + 1 {
            return Err(parse_err(
                line,
                format!(
                    "{} takes {arity} qubit(s), found {}",
                    toks[0],
                    toks.len() - 1
                ),
            ));
        }
        let a = parse_index(toks[1], line)?;
        let b = if arity == 2 {
            parse_index(toks[2], line)?
        } else {
            0
        };
        let op = match toks[0] {
            "P0" => Operation::PrepZ(a),
            "P+" => Operation::PrepX(a),
            "H" => Operation::H(a),
            "S" => Operation::S(a),
            "SDG" => Operation::Sdg(a),
            "X" => Operation::X(a),
            "Y" => Operation::Y(a),
            "Z" => Operation::Z(a),
            "M" => Operation::Measure(a),
            "CX" => Operation::CX(a, b),
            "CY" => Operation::CY(a, b),
            "CZ" => Operation::CZ(a, b),
            _ => unreachable!(),
        };
        c.push(op).map_err(|e| parse_err(line, e.to_string()))?;
    }
    circuit.ok_or_else(|| parse_err(0, "missing `qubits <n>` header"))
}

/// Canonical text form: header, one operation per line, trailing newline.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::with_capacity(8 * circuit.size() + 16);
    writeln!(out, "qubits {}", circuit.num_qubits()).unwrap();
    for op in circuit.ops() {
        writeln!(out, "{op}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_file() {
        let c = parse_circuit("qubits 2\nH 0\nCX 0 1").unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.ops(), &[Operation::H(0), Operation::CX(0, 1)]);
    }

    #[test]
    fn index_out_of_range_reports_line() {
        let err = parse_circuit("qubits 1\nCX 0 1").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("out of range"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_mnemonic_and_bad_arity() {
        assert!(matches!(
            parse_circuit("qubits 2\n\nT 0"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_circuit("qubits 2\nH 0 1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_circuit("qubits 2\nCZ 0"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_circuit("H 0").is_err());
        assert!(parse_circuit("").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\nqubits 2 # two\n\nP+ 1\nM 1  # readout\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.ops(), &[Operation::PrepX(1), Operation::Measure(1)]);
        assert_eq!(serialize_circuit(&c), "qubits 2\nP+ 1\nM 1\n");
    }

    fn arb_op(n: usize) -> impl Strategy<Value = Operation> {
        let q = 0..n;
        let pair = (0..n, 1..n).prop_map(move |(a, d)| (a, (a + d) % n));
        prop_oneof![
            q.clone().prop_map(Operation::PrepZ),
            q.clone().prop_map(Operation::PrepX),
            q.clone().prop_map(Operation::H),
            q.clone().prop_map(Operation::S),
            q.clone().prop_map(Operation::Sdg),
            q.clone().prop_map(Operation::X),
            q.clone().prop_map(Operation::Y),
            q.clone().prop_map(Operation::Z),
            q.prop_map(Operation::Measure),
            pair.clone().prop_map(|(a, b)| Operation::CX(a, b)),
            pair.clone().prop_map(|(a, b)| Operation::CY(a, b)),
            pair.prop_map(|(a, b)| Operation::CZ(a, b)),
        ]
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (2usize..8).prop_flat_map(|n| {
            prop::collection::vec(arb_op(n), 0..40)
                .prop_map(move |ops| Circuit::from_ops(n, ops).unwrap())
        })
    }

    proptest! {
        #[test]
        fn round_trip(c in arb_circuit()) {
            let text = serialize_circuit(&c);
            let back = parse_circuit(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(serialize_circuit(&back), text);
        }

        #[test]
        fn normalization_is_idempotent(c in arb_circuit(), noise in "[ \t]{0,3}") {
            // Sprinkle whitespace and comments; normalizing must recover the canonical form.
            let messy: String = serialize_circuit(&c)
                .lines()
                .map(|l| format!("{noise}{l}{noise} # c\n\n"))
                .collect();
            let normalized = serialize_circuit(&parse_circuit(&messy).unwrap());
            prop_assert_eq!(normalized, serialize_circuit(&c));
        }
    }
}
