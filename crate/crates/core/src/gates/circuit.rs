use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    beam_splitter, cnot, conditional_displacement, controlled_embed, displacement, ecd, pauli_x, rotation, snap,
    snap_qubit_form,
};
use crate::error::{Error, Result};
use crate::fockcore::ComplexMatrix;

/// A register line: a qubit or a qumode with a fixed Fock cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Wire {
    Qubit,
    Qumode { cutoff: usize },
}

impl Wire {
    pub fn dim(&self) -> usize {
        match self {
            Wire::Qubit => 2,
            Wire::Qumode { cutoff } => *cutoff,
        }
    }
}

fn beta_of(b: [f64; 2]) -> Complex64 {
    Complex64::new(b[0], b[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Rotation {
        theta: f64,
        phi: f64,
    },
    PauliX,
    /// Two-qubit CNOT, first target controls.
    Cnot {
        on_zero: bool,
    },
    Displacement {
        beta: [f64; 2],
    },
    CondDisp {
        beta: [f64; 2],
    },
    Ecd {
        beta: [f64; 2],
    },
    Snap {
        theta: Vec<f64>,
    },
    /// SNAP acting on the qumode when the ancilla qubit is |0⟩.
    SnapQubitForm {
        theta: Vec<f64>,
    },
    BeamSplitter {
        beta: f64,
        phi: f64,
    },
    /// Control qubit followed by the wrapped gate's targets.
    ControlledWrap {
        inner: Box<Gate>,
    },
}

impl Gate {
    /// Matrix on the gate's own targets, in target order.
    pub fn matrix(&self, wires: &[Wire]) -> Result<ComplexMatrix> {
        let need = |n: usize| -> Result<()> {
            if wires.len() != n {
                return Err(Error::InvalidArgument(format!("gate {self:?} expects {n} targets, got {}", wires.len())));
            }
            Ok(())
        };
        let mode = |w: &Wire| -> Result<usize> {
            match w {
                Wire::Qumode { cutoff } => Ok(*cutoff),
                Wire::Qubit => Err(Error::InvalidArgument("expected a qumode target".into())),
            }
        };
        let qubit = |w: &Wire| -> Result<()> {
            match w {
                Wire::Qubit => Ok(()),
                _ => Err(Error::InvalidArgument("expected a qubit target".into())),
            }
        };
        match self {
            Gate::Rotation { theta, phi } => {
                need(1)?;
                qubit(&wires[0])?;
                Ok(rotation(*theta, *phi))
            }
            Gate::PauliX => {
                need(1)?;
                qubit(&wires[0])?;
                Ok(pauli_x())
            }
            Gate::Cnot { on_zero } => {
                need(2)?;
                qubit(&wires[0])?;
                qubit(&wires[1])?;
                Ok(cnot(*on_zero))
            }
            Gate::Displacement { beta } => {
                need(1)?;
                displacement(beta_of(*beta), mode(&wires[0])?)
            }
            Gate::CondDisp { beta } => {
                need(2)?;
                qubit(&wires[0])?;
                conditional_displacement(beta_of(*beta), mode(&wires[1])?)
            }
            Gate::Ecd { beta } => {
                need(2)?;
                qubit(&wires[0])?;
                ecd(beta_of(*beta), mode(&wires[1])?)
            }
            Gate::Snap { theta } => {
                need(1)?;
                snap(theta, mode(&wires[0])?)
            }
            Gate::SnapQubitForm { theta } => {
                need(2)?;
                qubit(&wires[0])?;
                snap_qubit_form(theta, mode(&wires[1])?)
            }
            Gate::BeamSplitter { beta, phi } => {
                need(2)?;
                beam_splitter(*beta, *phi, mode(&wires[0])?, mode(&wires[1])?)
            }
            Gate::ControlledWrap { inner } => {
                if wires.is_empty() {
                    return Err(Error::InvalidArgument("controlled gate needs a control".into()));
                }
                qubit(&wires[0])?;
                controlled_embed(&inner.matrix(&wires[1..])?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitOp {
    /// Position in application order; step 0 acts on the input state first.
    pub step: usize,
    #[serde(flatten)]
    pub gate: Gate,
    pub targets: Vec<usize>,
}

/// Gate list stored in application order (the first op acts first), so the
/// overall unitary is ops[n−1] ··· ops[1] · ops[0].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub wires: Vec<Wire>,
    pub ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(wires: Vec<Wire>) -> Self {
        Self { wires, ops: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate, targets: Vec<usize>) -> &mut Self {
        let step = self.ops.len();
        self.ops.push(CircuitOp { step, gate, targets });
        self
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.wires.iter().map(Wire::dim).product()
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(self.dim());
        let mut ops: Vec<&CircuitOp> = self.ops.iter().collect();
        ops.sort_by_key(|o| o.step);
        for op in ops {
            let ws: Vec<Wire> = op
                .targets
                .iter()
                .map(|&t| self.wires.get(t).copied().ok_or_else(|| Error::IndexOutOfRange(format!("wire {t}"))))
                .collect::<Result<_>>()?;
            let g = op.gate.matrix(&ws)?;
            u = embed(&g, &op.targets, &self.wires)?.matmul(&u);
        }
        Ok(u)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Lifts a gate on `targets` to the full register (wire 0 leftmost factor).
pub fn embed(gate: &ComplexMatrix, targets: &[usize], wires: &[Wire]) -> Result<ComplexMatrix> {
    let dims: Vec<usize> = wires.iter().map(Wire::dim).collect();
    let sub: usize = targets.iter().map(|&t| dims[t]).product();
    if sub != gate.rows() {
        return Err(Error::DimensionMismatch { expected: sub, found: gate.rows() });
    }
    let mut seen = vec![false; wires.len()];
    for &t in targets {
        if std::mem::replace(&mut seen[t], true) {
            return Err(Error::InvalidArgument(format!("wire {t} targeted twice")));
        }
    }
    let total: usize = dims.iter().product();
    let mut out = ComplexMatrix::zeros(total, total);
    let digits = |mut idx: usize| {
        let mut d = vec![0; dims.len()];
        for w in (0..dims.len()).rev() {
            d[w] = idx % dims[w];
            idx /= dims[w];
        }
        d
    };
    let compose = |d: &[usize]| d.iter().zip(&dims).fold(0, |acc, (&x, &n)| acc * n + x);
    let sub_index = |d: &[usize]| targets.iter().fold(0, |acc, &t| acc * dims[t] + d[t]);
    for col in 0..total {
        let dc = digits(col);
        let sc = sub_index(&dc);
        for sr in 0..sub {
            let v = gate[(sr, sc)];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let mut dr = dc.clone();
            let mut rem = sr;
            for &t in targets.iter().rev() {
                dr[t] = rem % dims[t];
                rem /= dims[t];
            }
            out[(compose(&dr), col)] = v;
        }
    }
    Ok(out)
}

/// Controlled-ECD on (control a, qubit b, qumode) as
/// [CD_b(β/4), CNOT a→b, CD_b(−β/4)], in application order.
pub fn compile_controlled_ecd(beta: Complex64, l: usize) -> Result<(Circuit, ComplexMatrix)> {
    let mut c = Circuit::new(vec![Wire::Qubit, Wire::Qubit, Wire::Qumode { cutoff: l }]);
    let q = beta * 0.25;
    c.push(Gate::CondDisp { beta: [q.re, q.im] }, vec![1, 2]);
    c.push(Gate::Cnot { on_zero: false }, vec![0, 1]);
    c.push(Gate::CondDisp { beta: [-q.re, -q.im] }, vec![1, 2]);
    let m = c.matrix()?;
    Ok((c, m))
}

/// Controlled-SNAP on (control, ancilla, qumode): an open-control CNOT onto
/// the ancilla, the qubit-form SNAP, and the same CNOT again. With the
/// ancilla in |0⟩, SNAP acts exactly when the control is |1⟩.
pub fn controlled_snap_circuit(theta: &[f64], l: usize) -> Result<(Circuit, ComplexMatrix)> {
    if theta.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: theta.len() });
    }
    let mut c = Circuit::new(vec![Wire::Qubit, Wire::Qubit, Wire::Qumode { cutoff: l }]);
    c.push(Gate::Cnot { on_zero: true }, vec![0, 1]);
    c.push(Gate::SnapQubitForm { theta: theta.to_vec() }, vec![1, 2]);
    c.push(Gate::Cnot { on_zero: true }, vec![0, 1]);
    let m = c.matrix()?;
    Ok((c, m))
}

/// Rows/columns of a (control, ancilla, qumode) operator with the ancilla in |0⟩.
pub fn ancilla_zero_indices(l: usize) -> Vec<usize> {
    (0..2).flat_map(|c| (0..l).map(move |n| c * 2 * l + n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockcore::kron;
    use crate::gates::{pauli_x, rotation};

    #[test]
    fn controlled_ecd_zero_beta() {
        let (c, m) = compile_controlled_ecd(Complex64::new(0.0, 0.0), 4).unwrap();
        assert_eq!(c.len(), 3);
        let expect = controlled_embed(&ecd(Complex64::new(0.0, 0.0), 4).unwrap()).unwrap();
        assert!(m.approx_eq(&expect, 1e-15));
        let cx = kron(&cnot(false), &ComplexMatrix::identity(4));
        assert!(m.approx_eq(&cx, 1e-15));
    }

    #[test]
    fn controlled_ecd_examples() {
        for beta in [Complex64::new(0.3, 0.1), Complex64::new(-1.2, 0.0)] {
            let (_, m) = compile_controlled_ecd(beta, 8).unwrap();
            let direct = controlled_embed(&ecd(beta, 8).unwrap()).unwrap();
            assert!(m.approx_eq(&direct, 1e-12));
        }
    }

    #[test]
    fn controlled_snap_restriction() {
        let theta = [0.3, -1.1, 2.0, 0.7];
        let (_, m) = controlled_snap_circuit(&theta, 4).unwrap();
        let idx = ancilla_zero_indices(4);
        let expect = controlled_embed(&snap(&theta, 4).unwrap()).unwrap();
        assert!(m.select(&idx, &idx).approx_eq(&expect, 1e-12));
        // the ancilla never leaves |0>
        let others: Vec<usize> = (0..16).filter(|i| !idx.contains(i)).collect();
        assert_eq!(m.select(&others, &idx).max_abs(), 0.0);
        let (_, z) = controlled_snap_circuit(&[0.0; 4], 4).unwrap();
        assert!(z.approx_eq(&ComplexMatrix::identity(16), 0.0));
    }

    #[test]
    fn application_order_is_right_to_left_product() {
        let mut c = Circuit::new(vec![Wire::Qubit]);
        let (a, b, d) = (rotation(0.3, 0.1), rotation(1.1, -0.4), pauli_x());
        c.push(Gate::Rotation { theta: 0.3, phi: 0.1 }, vec![0]);
        c.push(Gate::Rotation { theta: 1.1, phi: -0.4 }, vec![0]);
        c.push(Gate::PauliX, vec![0]);
        let expect = d.matmul(&b).matmul(&a);
        assert!(c.matrix().unwrap().approx_eq(&expect, 1e-15));
        assert!(d.matmul(&b.matmul(&a)).approx_eq(&d.matmul(&b).matmul(&a), 1e-15));
    }

    #[test]
    fn embed_on_reversed_targets() {
        let wires = vec![Wire::Qubit, Wire::Qubit];
        let m = embed(&cnot(false), &[1, 0], &wires).unwrap();
        // control on wire 1, target wire 0: |01> -> |11>
        assert_eq!(m[(3, 1)].re, 1.0);
        assert_eq!(m[(2, 2)].re, 1.0);
    }

    #[test]
    fn json_roundtrip() {
        let (c, _) = compile_controlled_ecd(Complex64::new(0.2, -0.5), 3).unwrap();
        let s = c.to_json().unwrap();
        assert!(s.contains("\"step\""));
        assert_eq!(Circuit::from_json(&s).unwrap(), c);
    }
}
