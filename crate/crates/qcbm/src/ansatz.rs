//! Hardware-efficient circuit layout for the Born machine.
//!
//! A depth-L circuit (L even) alternates single-qubit rotation sequences
//! with entangling layers: SQ₁, E₁, SQ₂, E₂, …, SQ_{L/2}, E_{L/2}. The
//! rotation sequences are reduced so adjacent same-axis rotations never
//! occur: SQ₁ applies (RX, RZ) per qubit, intermediate sequences apply
//! (RZ, RX), and the final sequence applies (RX, RZ, RX). At L = 2 the
//! single SQ₁ is also the last sequence and keeps its (RX, RZ) form.
//! Every entangling layer applies one RXX per topology edge, so circuits
//! always end on an entangling layer.
//!
//! Line topology with the layout above gives P = (3L/2 + 1)·N − L/2
//! parameters for L ≥ 4 and P = 3N − 1 for L = 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{StateVector, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Line,
    AllToAll,
}

impl Topology {
    /// Edges in the order entangling layers emit them: Line walks pairs
    /// (j, j+1) ascending, AllToAll walks unordered pairs lexicographically.
    pub fn edges(self, n_qubits: usize) -> Vec<(usize, usize)> {
        match self {
            Topology::Line => (1..n_qubits).map(|j| (j - 1, j)).collect(),
            Topology::AllToAll => {
                let mut edges = Vec::with_capacity(n_qubits * (n_qubits - 1) / 2);
                for a in 0..n_qubits {
                    for b in a + 1..n_qubits {
                        edges.push((a, b));
                    }
                }
                edges
            }
        }
    }

    pub fn edge_count(self, n_qubits: usize) -> usize {
        match self {
            Topology::Line => n_qubits - 1,
            Topology::AllToAll => n_qubits * (n_qubits - 1) / 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Rx,
    Rz,
    Rxx,
}

/// One gate instance. Single-qubit kinds leave `qubit_b` as None; RXX
/// carries the lower qubit in `qubit_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubit_a: usize,
    pub qubit_b: Option<usize>,
    pub param_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    n_qubits: usize,
    n_layers: usize,
    topology: Topology,
    gates: Vec<Gate>,
}

const DOCUMENT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: GateKind,
    qubits: Vec<usize>,
    param_index: usize,
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    version: u32,
    n_qubits: usize,
    n_layers: usize,
    topology: Topology,
    gates: Vec<GateDoc>,
}

/// Closed-form parameter count for the layout `build_circuit` emits.
pub fn param_count(n_qubits: usize, n_layers: usize, topology: Topology) -> Result<usize> {
    validate_shape(n_qubits, n_layers)?;
    let singles = if n_layers == 2 {
        2 * n_qubits
    } else {
        // SQ₁ (2N) + intermediate sequences (2N each) + final (3N)
        2 * n_qubits + (n_layers / 2 - 2) * 2 * n_qubits + 3 * n_qubits
    };
    Ok(singles + (n_layers / 2) * topology.edge_count(n_qubits))
}

fn validate_shape(n_qubits: usize, n_layers: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCountOutOfRange(n_qubits));
    }
    if n_layers < 2 || n_layers % 2 != 0 {
        return Err(Error::InvalidLayerCount(n_layers));
    }
    Ok(())
}

pub fn build_circuit(n_qubits: usize, n_layers: usize, topology: Topology) -> Result<CircuitSpec> {
    validate_shape(n_qubits, n_layers)?;
    let n_sequences = n_layers / 2;
    let mut gates = Vec::with_capacity(param_count(n_qubits, n_layers, topology)?);
    // Each gate consumes one fresh parameter, so the index is the position.
    for seq in 1..=n_sequences {
        let axes: &[GateKind] = if seq == 1 {
            &[GateKind::Rx, GateKind::Rz]
        } else if seq < n_sequences {
            &[GateKind::Rz, GateKind::Rx]
        } else {
            &[GateKind::Rx, GateKind::Rz, GateKind::Rx]
        };
        for qubit in 0..n_qubits {
            for &axis in axes {
                gates.push(Gate {
                    kind: axis,
                    qubit_a: qubit,
                    qubit_b: None,
                    param_index: gates.len(),
                });
            }
        }
        for (a, b) in topology.edges(n_qubits) {
            gates.push(Gate {
                kind: GateKind::Rxx,
                qubit_a: a,
                qubit_b: Some(b),
                param_index: gates.len(),
            });
        }
    }
    Ok(CircuitSpec {
        n_qubits,
        n_layers,
        topology,
        gates,
    })
}

impl CircuitSpec {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn param_count(&self) -> usize {
        self.gates.len()
    }

    /// Run the circuit on |0⋯0⟩ with the given parameter values (radians).
    pub fn execute(&self, params: &[f64]) -> Result<StateVector> {
        if params.len() != self.gates.len() {
            return Err(Error::ParamCountMismatch {
                expected: self.gates.len(),
                got: params.len(),
            });
        }
        let mut state = StateVector::zero_state(self.n_qubits)?;
        for gate in &self.gates {
            let theta = params[gate.param_index];
            match gate.kind {
                GateKind::Rx => state.apply_rx(gate.qubit_a, theta)?,
                GateKind::Rz => state.apply_rz(gate.qubit_a, theta)?,
                GateKind::Rxx => state.apply_rxx(gate.qubit_a, gate.qubit_b.unwrap(), theta)?,
            }
        }
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        let doc = CircuitDoc {
            version: DOCUMENT_VERSION,
            n_qubits: self.n_qubits,
            n_layers: self.n_layers,
            topology: self.topology,
            gates: self
                .gates
                .iter()
                .map(|g| GateDoc {
                    kind: g.kind,
                    qubits: match g.qubit_b {
                        Some(b) => vec![g.qubit_a, b],
                        None => vec![g.qubit_a],
                    },
                    param_index: g.param_index,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("circuit document serializes")
    }

    /// The gate list is fully determined by (n_qubits, n_layers, topology),
    /// so deserialization rebuilds the canonical layout and rejects any
    /// document whose gates disagree with it.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CircuitDoc = serde_json::from_str(text)?;
        if doc.version != DOCUMENT_VERSION {
            return Err(Error::UnsupportedVersion {
                expected: DOCUMENT_VERSION,
                got: doc.version,
            });
        }
        let canonical = build_circuit(doc.n_qubits, doc.n_layers, doc.topology)?;
        if doc.gates.len() != canonical.gates.len() {
            return Err(Error::MalformedDocument {
                kind: "circuit",
                detail: format!(
                    "expected {} gates for this shape, found {}",
                    canonical.gates.len(),
                    doc.gates.len()
                ),
            });
        }
        for (i, (doc_gate, gate)) in doc.gates.iter().zip(&canonical.gates).enumerate() {
            let qubits_match = match gate.qubit_b {
                Some(b) => doc_gate.qubits == [gate.qubit_a, b],
                None => doc_gate.qubits == [gate.qubit_a],
            };
            if doc_gate.kind != gate.kind
                || !qubits_match
                || doc_gate.param_index != gate.param_index
            {
                return Err(Error::MalformedDocument {
                    kind: "circuit",
                    detail: format!("gate {i} does not match the canonical layout"),
                });
            }
        }
        Ok(canonical)
    }
}
