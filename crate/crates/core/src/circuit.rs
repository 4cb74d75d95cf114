//! Ordered gate sequences and their execution on a [`StateVector`].
//!
//! Circuits serialize to a line-oriented text form, one instruction per line:
//!
//! ```text
//! qubits 3
//! h | | 0
//! u1 1.5707963267948966 | 1 | 0
//! cx | | 0 2
//! ```
//!
//! Fields are `label params | controls | targets`. Only gates that
//! [`gates::standard_gate`] knows can be parsed back; custom unitaries are
//! written with their label for inspection.

use std::fmt::Write as _;

use crate::error::{QfinError, Result};
use crate::gates::{self, GateMatrix};
use crate::state::StateVector;

#[derive(Clone, Debug)]
pub struct Instruction {
    pub name: String,
    pub params: Vec<f64>,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
    pub gate: GateMatrix,
}

impl Instruction {
    fn qubits(&self) -> impl Iterator<Item = &usize> {
        self.controls.iter().chain(&self.targets)
    }
}

#[derive(Clone, Debug)]
pub struct CircuitSpec {
    num_qubits: usize,
    instructions: Vec<Instruction>,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, instructions: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    fn validate(&self, controls: &[usize], targets: &[usize], gate: &GateMatrix) -> Result<()> {
        if gate.dim() != 1 << targets.len() {
            return Err(QfinError::DimensionMismatch { gate_dim: gate.dim(), num_targets: targets.len() });
        }
        let mut seen = Vec::new();
        for &q in controls.iter().chain(targets) {
            if q >= self.num_qubits {
                return Err(QfinError::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
            if seen.contains(&q) {
                return Err(QfinError::DuplicateQubit(q));
            }
            seen.push(q);
        }
        Ok(())
    }

    /// Appends a named standard gate.
    pub fn push(&mut self, name: &str, params: &[f64], controls: &[usize], targets: &[usize]) -> Result<&mut Self> {
        let gate = gates::standard_gate(name, params)?;
        self.validate(controls, targets, &gate)?;
        self.instructions.push(Instruction {
            name: name.to_ascii_lowercase(),
            params: params.to_vec(),
            controls: controls.to_vec(),
            targets: targets.to_vec(),
            gate,
        });
        Ok(self)
    }

    /// Appends an arbitrary unitary under the given label.
    pub fn push_unitary(&mut self, gate: GateMatrix, controls: &[usize], targets: &[usize]) -> Result<&mut Self> {
        self.validate(controls, targets, &gate)?;
        if !gate.is_unitary() {
            return Err(QfinError::NotUnitary(gate.label().to_string()));
        }
        self.instructions.push(Instruction {
            name: gate.label().to_string(),
            params: Vec::new(),
            controls: controls.to_vec(),
            targets: targets.to_vec(),
            gate,
        });
        Ok(self)
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.push("h", &[], &[], &[q])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.push("x", &[], &[], &[q])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push("x", &[], &[control], &[target])
    }

    pub fn ry(&mut self, angle: f64, q: usize) -> Result<&mut Self> {
        self.push("ry", &[angle], &[], &[q])
    }

    pub fn rz(&mut self, angle: f64, q: usize) -> Result<&mut Self> {
        self.push("rz", &[angle], &[], &[q])
    }

    pub fn rx(&mut self, angle: f64, q: usize) -> Result<&mut Self> {
        self.push("rx", &[angle], &[], &[q])
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push("swap", &[], &[], &[a, b])
    }

    /// Appends every instruction of `other`, remapping its qubit `i` to `mapping[i]`.
    pub fn append_mapped(&mut self, other: &CircuitSpec, mapping: &[usize]) -> Result<&mut Self> {
        if mapping.len() != other.num_qubits {
            return Err(QfinError::LengthMismatch { expected: other.num_qubits, got: mapping.len() });
        }
        for ins in &other.instructions {
            let controls: Vec<usize> = ins.controls.iter().map(|&q| mapping[q]).collect();
            let targets: Vec<usize> = ins.targets.iter().map(|&q| mapping[q]).collect();
            self.validate(&controls, &targets, &ins.gate)?;
            self.instructions.push(Instruction { controls, targets, ..ins.clone() });
        }
        Ok(self)
    }

    /// Appends `other` acting on the same qubit indices.
    pub fn append(&mut self, other: &CircuitSpec) -> Result<&mut Self> {
        let mapping: Vec<usize> = (0..other.num_qubits).collect();
        self.append_mapped(other, &mapping)
    }

    /// The inverse circuit: reversed order, every gate replaced by its adjoint.
    pub fn inverse(&self) -> CircuitSpec {
        let instructions = self
            .instructions
            .iter()
            .rev()
            .map(|ins| {
                let (name, params) = adjoint_name(&ins.name, &ins.params);
                Instruction {
                    name,
                    params,
                    controls: ins.controls.clone(),
                    targets: ins.targets.clone(),
                    gate: ins.gate.adjoint(),
                }
            })
            .collect();
        CircuitSpec { num_qubits: self.num_qubits, instructions }
    }

    /// Total number of instructions.
    pub fn gate_count(&self) -> usize {
        self.instructions.len()
    }

    /// Largest number of instructions touching any single qubit, controls included.
    pub fn width(&self) -> usize {
        let mut per_qubit = vec![0usize; self.num_qubits];
        for ins in &self.instructions {
            for &q in ins.qubits() {
                per_qubit[q] += 1;
            }
        }
        per_qubit.into_iter().max().unwrap_or(0)
    }

    /// Executes the circuit on `input`.
    pub fn run(&self, input: &StateVector) -> Result<StateVector> {
        if input.num_qubits() != self.num_qubits {
            return Err(QfinError::LengthMismatch { expected: self.num_qubits, got: input.num_qubits() });
        }
        let mut state = input.clone();
        for ins in &self.instructions {
            state.apply_controlled(&ins.gate, &ins.controls, &ins.targets)?;
        }
        Ok(state)
    }

    /// Executes the circuit on `|0…0⟩`.
    pub fn run_from_zero(&self) -> Result<StateVector> {
        self.run(&StateVector::zero_state(self.num_qubits)?)
    }

    /// Dense matrix of the whole circuit (column `j` is the image of `|j⟩`).
    pub fn to_matrix(&self) -> Result<GateMatrix> {
        let dim = 1usize << self.num_qubits;
        let mut entries = vec![num_complex::Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let out = self.run(&StateVector::basis_state(self.num_qubits, col)?)?;
            for (row, a) in out.amplitudes().iter().enumerate() {
                entries[row * dim + col] = *a;
            }
        }
        GateMatrix::new("circuit", dim, entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        for ins in &self.instructions {
            let join = |v: &[usize]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
            let mut head = ins.name.clone();
            for p in &ins.params {
                let _ = write!(head, " {p:?}");
            }
            let _ = writeln!(out, "{head} | {} | {}", join(&ins.controls), join(&ins.targets));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<CircuitSpec> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| QfinError::Parse("empty circuit text".into()))?;
        let num_qubits = header
            .strip_prefix("qubits ")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .ok_or_else(|| QfinError::Parse(format!("bad header `{header}`")))?;
        let mut circuit = CircuitSpec::new(num_qubits);
        for line in lines {
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(QfinError::Parse(format!("expected 3 fields in `{line}`")));
            }
            let mut head = fields[0].split_whitespace();
            let name = head.next().ok_or_else(|| QfinError::Parse(format!("missing gate in `{line}`")))?;
            let params = head
                .map(|p| p.parse::<f64>().map_err(|e| QfinError::Parse(format!("{p}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let qubits = |s: &str| -> Result<Vec<usize>> {
                s.split_whitespace()
                    .map(|q| q.parse::<usize>().map_err(|e| QfinError::Parse(format!("{q}: {e}"))))
                    .collect()
            };
            circuit.push(name, &params, &qubits(fields[1])?, &qubits(fields[2])?)?;
        }
        Ok(circuit)
    }
}

fn adjoint_name(name: &str, params: &[f64]) -> (String, Vec<f64>) {
    match name {
        "rx" | "ry" | "rz" | "u1" => (name.to_string(), vec![-params[0]]),
        "s" => ("sdg".into(), vec![]),
        "sdg" => ("s".into(), vec![]),
        "t" => ("tdg".into(), vec![]),
        "tdg" => ("t".into(), vec![]),
        "u3" => ("u3".into(), vec![-params[0], -params[2], -params[1]]),
        "i" | "id" | "x" | "y" | "z" | "h" | "cx" | "cnot" | "cz" | "swap" | "ccx" | "ccnot" | "cswap" => {
            (name.to_string(), params.to_vec())
        }
        // rk, u2, sx and custom unitaries have no parameterized adjoint here;
        // keep the adjoint matrix under a distinct label.
        other => (format!("{other}^dg"), params.to_vec()),
    }
}

/// The two-gate Bell circuit `CNOT·(H⊗I)`.
pub fn bell_circuit() -> CircuitSpec {
    let mut c = CircuitSpec::new(2);
    c.h(0).and_then(|c| c.cx(0, 1)).expect("static circuit");
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_on_basis_inputs() {
        let bell = bell_circuit();
        let out = bell.run_from_zero().unwrap();
        let s = FRAC_1_SQRT_2;
        let expect = |v: [f64; 4], st: &StateVector| {
            for (a, e) in st.amplitudes().iter().zip(v) {
                assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        };
        expect([s, 0.0, 0.0, s], &out);
        let out = bell.run(&StateVector::basis_state(2, 0b10).unwrap()).unwrap();
        expect([s, 0.0, 0.0, -s], &out);
        let out = bell.run(&StateVector::basis_state(2, 0b01).unwrap()).unwrap();
        expect([0.0, s, s, 0.0], &out);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let input = StateVector::from_real(&[0.3, -0.1, 0.7, 0.2]).unwrap();
        assert_eq!(CircuitSpec::new(2).run(&input).unwrap(), input);
    }

    #[test]
    fn width_counts_controls() {
        let mut c = CircuitSpec::new(3);
        c.h(0).unwrap().cx(0, 1).unwrap().cx(0, 2).unwrap().x(2).unwrap();
        assert_eq!(c.gate_count(), 4);
        assert_eq!(c.width(), 3);
    }

    #[test]
    fn validation() {
        let mut c = CircuitSpec::new(2);
        assert!(c.push("x", &[], &[0], &[0]).is_err());
        assert!(c.push("x", &[], &[], &[2]).is_err());
        assert!(c.push("cx", &[], &[], &[0]).is_err());
        assert!(c.push("rx", &[], &[], &[0]).is_err());
        let input = StateVector::zero_state(3).unwrap();
        assert!(c.run(&input).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = CircuitSpec::new(3);
        c.h(0).unwrap().push("u1", &[0.25], &[1], &[0]).unwrap().cx(0, 2).unwrap().ry(-1.5, 1).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("qubits 3\n"));
        assert!(text.contains("u1 0.25 | 1 | 0"));
        let back = CircuitSpec::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        let input = StateVector::from_real(&[1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 0.0, 3.0]).unwrap();
        let (a, b) = (c.run(&input).unwrap(), back.run(&input).unwrap());
        assert!(a.inner(&b).unwrap().norm() > 1.0 - 1e-12);
        assert!(CircuitSpec::from_text("qubits 1\nfoo | | 0").is_err());
        assert!(CircuitSpec::from_text("h | | 0").is_err());
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut c = CircuitSpec::new(2);
        c.h(0).unwrap().push("u3", &[0.3, 1.1, -0.7], &[0], &[1]).unwrap().push("t", &[], &[], &[1]).unwrap();
        let input = StateVector::from_real(&[0.1, 0.5, -0.3, 0.8]).unwrap();
        let back = c.inverse().run(&c.run(&input).unwrap()).unwrap();
        assert!((back.inner(&input).unwrap().norm() - 1.0).abs() < 1e-12);
        // Parameterized adjoints are themselves standard gates.
        let text = c.inverse().to_text();
        assert!(CircuitSpec::from_text(&text).is_ok());
    }
}
