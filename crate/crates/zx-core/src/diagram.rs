// zx-core - ZX/ZW-calculus diagrams, semantics, and rewriting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The open-graph data model for ZX and ZW diagrams in dimensions 2 and 3.
//!
//! Diagrams are undirected multigraphs of generator nodes with an ordered
//! boundary. Spiders (and the ZW white node) are portless: only their
//! incident-edge multiset matters. The remaining generators carry numbered
//! ports, since their interpretation is not symmetric under leg exchange.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::num::{Complex, Dyadic, RingElement};
use crate::phase::Phase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Calculus {
    Zx,
    Zw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Nonnegative real parameter of a lambda box, dyadic in exact mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lambda {
    Dyadic(Dyadic),
    Real(f64),
}

impl Lambda {
    pub fn value(&self) -> f64 {
        match *self {
            Lambda::Dyadic(d) => d.to_f64(),
            Lambda::Real(x) => x,
        }
    }

    pub fn as_dyadic(&self) -> Option<Dyadic> {
        match *self {
            Lambda::Dyadic(d) => Some(d),
            Lambda::Real(_) => None,
        }
    }
}

/// Complex parameter of a ZW white node, exact when drawn from the
/// Clifford+T ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WParam {
    Exact(RingElement),
    Approx(Complex),
}

impl WParam {
    pub fn value(&self) -> Complex {
        match *self {
            WParam::Exact(r) => crate::num::ring_to_complex(&r),
            WParam::Approx(z) => z,
        }
    }

    pub fn as_ring(&self) -> Option<RingElement> {
        match *self {
            WParam::Exact(r) => Some(r),
            WParam::Approx(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    /// Green spider; `phases` has length `d - 1`.
    ZSpider { phases: Vec<Phase> },
    /// Red spider; `phases` has length `d - 1`.
    XSpider { phases: Vec<Phase> },
    /// Hadamard node. The power is taken mod 2 for qubits (self-inverse)
    /// and mod 4 for qutrits (`H^4 = 1`).
    Hadamard { power: u8 },
    /// The 1 -> 1 generator with matrix [[1, 1], [0, 1]], or its inverse.
    Triangle { inverse: bool },
    /// The 1 -> 1 generator with matrix diag(1, lambda), lambda >= 0.
    LambdaBox { lambda: Lambda },
    /// ZW white node in spider form, matrix |0..0><0..0| + r |1..1><1..1|.
    ZwWhite { r: WParam },
    /// ZW black W node, fixed arity 1 -> 2.
    ZwBlackW,
    /// ZW crossing, fixed arity 2 -> 2 with a -1 on |11>.
    ZwCrossing,
    /// ZW pi node, the NOT matrix.
    ZwPi,
}

impl NodeKind {
    pub fn z(phase: Phase) -> NodeKind {
        NodeKind::ZSpider {
            phases: vec![phase],
        }
    }

    pub fn x(phase: Phase) -> NodeKind {
        NodeKind::XSpider {
            phases: vec![phase],
        }
    }

    pub fn z3(a: i64, b: i64) -> NodeKind {
        NodeKind::ZSpider {
            phases: vec![Phase::z3(a), Phase::z3(b)],
        }
    }

    pub fn x3(a: i64, b: i64) -> NodeKind {
        NodeKind::XSpider {
            phases: vec![Phase::z3(a), Phase::z3(b)],
        }
    }

    pub fn hadamard() -> NodeKind {
        NodeKind::Hadamard { power: 1 }
    }

    pub fn is_spider(&self) -> bool {
        matches!(
            self,
            NodeKind::ZSpider { .. } | NodeKind::XSpider { .. } | NodeKind::ZwWhite { .. }
        )
    }

    /// Port count for port-sensitive kinds; `None` for spiders.
    pub fn port_arity(&self) -> Option<(u16, u16)> {
        match self {
            NodeKind::Hadamard { .. }
            | NodeKind::Triangle { .. }
            | NodeKind::LambdaBox { .. }
            | NodeKind::ZwPi => Some((1, 1)),
            NodeKind::ZwBlackW => Some((1, 2)),
            NodeKind::ZwCrossing => Some((2, 2)),
            _ => None,
        }
    }

    fn legal_in(&self, calculus: Calculus, dimension: u8) -> bool {
        match self {
            NodeKind::ZSpider { phases } | NodeKind::XSpider { phases } => {
                calculus == Calculus::Zx && phases.len() == (dimension - 1) as usize
            }
            NodeKind::Hadamard { power } => {
                calculus == Calculus::Zx
                    && match dimension {
                        2 => *power < 2,
                        _ => *power < 4,
                    }
            }
            NodeKind::Triangle { .. } | NodeKind::LambdaBox { .. } => {
                calculus == Calculus::Zx && dimension == 2
            }
            NodeKind::ZwWhite { .. }
            | NodeKind::ZwBlackW
            | NodeKind::ZwCrossing
            | NodeKind::ZwPi => calculus == Calculus::Zw && dimension == 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    In,
    Out,
}

/// One end of an edge: a node port or a boundary wire.
///
/// For spiders the port number is ignored (use 0 by convention). For
/// port-sensitive kinds, ports `0..n` are the inputs followed by ports
/// `n..n+m` for the outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Port { node: NodeId, port: u16 },
    Boundary { side: Side, index: u16 },
}

impl Endpoint {
    /// Spider endpoint on its input side (the port number only serves as
    /// an orientation flag for spiders).
    pub fn node(node: NodeId) -> Endpoint {
        Endpoint::Port { node, port: 0 }
    }

    /// Spider endpoint on its output side.
    pub fn node_out(node: NodeId) -> Endpoint {
        Endpoint::Port { node, port: 1 }
    }

    pub fn input(index: u16) -> Endpoint {
        Endpoint::Boundary {
            side: Side::In,
            index,
        }
    }

    pub fn output(index: u16) -> Endpoint {
        Endpoint::Boundary {
            side: Side::Out,
            index,
        }
    }

    pub fn node_id(&self) -> Option<NodeId> {
        match self {
            Endpoint::Port { node, .. } => Some(*node),
            Endpoint::Boundary { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiagramError {
    ArityMismatch {
        expected: usize,
        found: usize,
    },
    CalculusMismatch,
    IllegalArity(String),
    Invalid(Vec<String>),
}

/// An open graph of generator nodes with an ordered boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    pub calculus: Calculus,
    pub dimension: u8,
    nodes: BTreeMap<NodeId, NodeKind>,
    edges: Vec<(Endpoint, Endpoint)>,
    n_inputs: usize,
    n_outputs: usize,
    next_id: u32,
}

impl Diagram {
    pub fn new(calculus: Calculus, dimension: u8, n_inputs: usize, n_outputs: usize) -> Diagram {
        Diagram {
            calculus,
            dimension,
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            n_inputs,
            n_outputs,
            next_id: 0,
        }
    }

    /// Qubit ZX diagram.
    pub fn zx(n_inputs: usize, n_outputs: usize) -> Diagram {
        Diagram::new(Calculus::Zx, 2, n_inputs, n_outputs)
    }

    /// Qutrit ZX diagram.
    pub fn zx3(n_inputs: usize, n_outputs: usize) -> Diagram {
        Diagram::new(Calculus::Zx, 3, n_inputs, n_outputs)
    }

    /// Qubit ZW diagram.
    pub fn zw(n_inputs: usize, n_outputs: usize) -> Diagram {
        Diagram::new(Calculus::Zw, 2, n_inputs, n_outputs)
    }

    /// The identity diagram on `n` wires.
    pub fn wires(calculus: Calculus, dimension: u8, n: usize) -> Diagram {
        let mut d = Diagram::new(calculus, dimension, n, n);
        for i in 0..n {
            d.add_edge(Endpoint::input(i as u16), Endpoint::output(i as u16));
        }
        d
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeKind)> {
        self.nodes.iter().map(|(id, k)| (*id, k))
    }

    pub fn kind(&self, id: NodeId) -> Option<&NodeKind> {
        self.nodes.get(&id)
    }

    pub fn kind_mut(&mut self, id: NodeId) -> Option<&mut NodeKind> {
        self.nodes.get_mut(&id)
    }

    pub fn edges(&self) -> &[(Endpoint, Endpoint)] {
        &self.edges
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(id, kind);
        id
    }

    pub fn add_edge(&mut self, a: Endpoint, b: Endpoint) {
        self.edges.push((a, b));
    }

    pub fn remove_node(&mut self, id: NodeId) {
        self.nodes.remove(&id);
        self.edges
            .retain(|(a, b)| a.node_id() != Some(id) && b.node_id() != Some(id));
    }

    /// Endpoints incident to a node, one entry per edge end (self-loops
    /// contribute twice).
    pub fn incident(&self, id: NodeId) -> Vec<(usize, Endpoint)> {
        let mut out = Vec::new();
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if a.node_id() == Some(id) {
                out.push((i, *b));
            }
            if b.node_id() == Some(id) {
                out.push((i, *a));
            }
        }
        out
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.incident(id).len()
    }

    /// Replace every occurrence of endpoint `from` in the edge list with
    /// `to`.
    pub fn reroute(&mut self, from: Endpoint, to: Endpoint) {
        for (a, b) in self.edges.iter_mut() {
            if *a == from {
                *a = to;
            }
            if *b == from {
                *b = to;
            }
        }
    }

    /// Single-generator diagram with `n` inputs and `m` outputs.
    pub fn from_generator(
        kind: NodeKind,
        n: usize,
        m: usize,
        calculus: Calculus,
        dimension: u8,
    ) -> Result<Diagram, DiagramError> {
        if !kind.legal_in(calculus, dimension) {
            return Err(DiagramError::IllegalArity(format!(
                "kind {:?} not legal in {:?} d={}",
                kind, calculus, dimension
            )));
        }
        if let Some((pn, pm)) = kind.port_arity() {
            if (n, m) != (pn as usize, pm as usize) {
                return Err(DiagramError::IllegalArity(format!(
                    "kind {:?} requires arity {} -> {}, got {} -> {}",
                    kind, pn, pm, n, m
                )));
            }
        }
        let mut d = Diagram::new(calculus, dimension, n, m);
        let id = d.add_node(kind.clone());
        match kind.port_arity() {
            Some((pn, _)) => {
                for i in 0..pn {
                    d.add_edge(Endpoint::input(i), Endpoint::Port { node: id, port: i });
                }
                for j in 0..(m as u16) {
                    d.add_edge(
                        Endpoint::Port {
                            node: id,
                            port: pn + j,
                        },
                        Endpoint::output(j),
                    );
                }
            }
            None => {
                for i in 0..(n as u16) {
                    d.add_edge(Endpoint::input(i), Endpoint::node(id));
                }
                for j in 0..(m as u16) {
                    d.add_edge(Endpoint::node_out(id), Endpoint::output(j));
                }
            }
        }
        Ok(d)
    }

    /// Check all structural invariants, returning the list of violations.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        // Boundary endpoints appear exactly once each.
        let mut seen_in = vec![0usize; self.n_inputs];
        let mut seen_out = vec![0usize; self.n_outputs];
        for (a, b) in &self.edges {
            for e in [a, b] {
                match e {
                    Endpoint::Boundary { side: Side::In, index } => {
                        if (*index as usize) < self.n_inputs {
                            seen_in[*index as usize] += 1;
                        } else {
                            out.push(format!("input index {} out of range", index));
                        }
                    }
                    Endpoint::Boundary {
                        side: Side::Out,
                        index,
                    } => {
                        if (*index as usize) < self.n_outputs {
                            seen_out[*index as usize] += 1;
                        } else {
                            out.push(format!("output index {} out of range", index));
                        }
                    }
                    Endpoint::Port { node, port } => match self.nodes.get(node) {
                        None => out.push(format!("edge references missing node {:?}", node)),
                        Some(k) => {
                            if let Some((pn, pm)) = k.port_arity() {
                                if *port >= pn + pm {
                                    out.push(format!(
                                        "port {} out of range for node {:?}",
                                        port, node
                                    ));
                                }
                            }
                        }
                    },
                }
            }
        }
        for (i, n) in seen_in.iter().enumerate() {
            if *n != 1 {
                out.push(format!("input {} used {} times (expected 1)", i, n));
            }
        }
        for (i, n) in seen_out.iter().enumerate() {
            if *n != 1 {
                out.push(format!("output {} used {} times (expected 1)", i, n));
            }
        }
        // Kind/calculus agreement and port coverage.
        for (id, kind) in &self.nodes {
            if !kind.legal_in(self.calculus, self.dimension) {
                out.push(format!("node {:?}: kind/calculus mismatch", id));
            }
            if let Some((pn, pm)) = kind.port_arity() {
                let mut count = vec![0usize; (pn + pm) as usize];
                for (a, b) in &self.edges {
                    for e in [a, b] {
                        if let Endpoint::Port { node, port } = e {
                            if node == id && (*port as usize) < count.len() {
                                count[*port as usize] += 1;
                            }
                        }
                    }
                }
                for (p, n) in count.iter().enumerate() {
                    if *n != 1 {
                        out.push(format!(
                            "node {:?} port {}: unconnected or multiply connected port \
                             (used {} times)",
                            id, p, n
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(DiagramError::Invalid(v))
        }
    }

    /// Parallel composition: `self` on top (most significant wires), `other`
    /// below. `[[result]] = kron([[self]], [[other]])`.
    pub fn compose_par(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if self.calculus != other.calculus || self.dimension != other.dimension {
            return Err(DiagramError::CalculusMismatch);
        }
        let mut out = self.clone();
        let shift = out.next_id;
        out.n_inputs += other.n_inputs;
        out.n_outputs += other.n_outputs;
        let remap = |e: &Endpoint| -> Endpoint {
            match e {
                Endpoint::Port { node, port } => Endpoint::Port {
                    node: NodeId(node.0 + shift),
                    port: *port,
                },
                Endpoint::Boundary {
                    side: Side::In,
                    index,
                } => Endpoint::input(*index + self.n_inputs as u16),
                Endpoint::Boundary {
                    side: Side::Out,
                    index,
                } => Endpoint::output(*index + self.n_outputs as u16),
            }
        };
        for (id, kind) in &other.nodes {
            out.nodes.insert(NodeId(id.0 + shift), kind.clone());
        }
        for (a, b) in &other.edges {
            out.edges.push((remap(a), remap(b)));
        }
        out.next_id = shift + other.next_id;
        Ok(out)
    }

    /// Sequential composition: `self` first, then `other`.
    /// `[[result]] = [[other]] * [[self]]`.
    pub fn compose_seq(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if self.calculus != other.calculus || self.dimension != other.dimension {
            return Err(DiagramError::CalculusMismatch);
        }
        if self.n_outputs != other.n_inputs {
            return Err(DiagramError::ArityMismatch {
                expected: self.n_outputs,
                found: other.n_inputs,
            });
        }
        let mut out = Diagram::new(self.calculus, self.dimension, self.n_inputs, other.n_outputs);
        let shift = self.next_id;
        for (id, kind) in &self.nodes {
            out.nodes.insert(*id, kind.clone());
        }
        for (id, kind) in &other.nodes {
            out.nodes.insert(NodeId(id.0 + shift), kind.clone());
        }
        out.next_id = shift + other.next_id;

        // Junction w: fused boundary wire w in 0..k (self.out(w) joined to
        // other.in(w)). Collect, for every junction, its two attachment
        // points; everything else copies over directly.
        #[derive(Clone, Copy, PartialEq, Eq, Debug)]
        enum End {
            Real(Endpoint),
            Junction(u16),
        }
        let mut pending: Vec<(End, End)> = Vec::new();
        let map_self = |e: &Endpoint| -> End {
            match e {
                Endpoint::Boundary {
                    side: Side::Out,
                    index,
                } => End::Junction(*index),
                other_end => End::Real(*other_end),
            }
        };
        let map_other = |e: &Endpoint| -> End {
            match e {
                Endpoint::Boundary {
                    side: Side::In,
                    index,
                } => End::Junction(*index),
                Endpoint::Boundary {
                    side: Side::Out,
                    index,
                } => End::Real(Endpoint::output(*index)),
                Endpoint::Port { node, port } => End::Real(Endpoint::Port {
                    node: NodeId(node.0 + shift),
                    port: *port,
                }),
            }
        };
        for (a, b) in &self.edges {
            pending.push((map_self(a), map_self(b)));
        }
        for (a, b) in &other.edges {
            pending.push((map_other(a), map_other(b)));
        }

        // Resolve junctions by wire chasing. Each junction has exactly two
        // incident pending edges (by boundary well-formedness).
        let k = self.n_outputs;
        let mut junction_ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
        for (i, (a, b)) in pending.iter().enumerate() {
            if let End::Junction(j) = a {
                junction_ends[*j as usize].push((i, 0));
            }
            if let End::Junction(j) = b {
                junction_ends[*j as usize].push((i, 1));
            }
        }
        let mut consumed = vec![false; pending.len()];
        // Copy over edges without junctions.
        for (i, (a, b)) in pending.iter().enumerate() {
            if let (End::Real(x), End::Real(y)) = (a, b) {
                out.edges.push((*x, *y));
                consumed[i] = true;
            }
        }
        // Chase chains starting from a real endpoint.
        for i in 0..pending.len() {
            if consumed[i] {
                continue;
            }
            let (a, b) = pending[i];
            let (start, mut next_j) = match (a, b) {
                (End::Real(x), End::Junction(j)) => (x, j),
                (End::Junction(j), End::Real(x)) => (x, j),
                _ => continue, // junction-junction edge: handled in a chain or loop
            };
            consumed[i] = true;
            let mut prev_edge = i;
            loop {
                // Move through junction next_j to the other incident edge.
                let ends = &junction_ends[next_j as usize];
                debug_assert_eq!(ends.len(), 2);
                let (e2, _) = if ends[0].0 == prev_edge {
                    ends[1]
                } else {
                    ends[0]
                };
                let (a2, b2) = pending[e2];
                consumed[e2] = true;
                let far = if let End::Junction(j) = a2 {
                    if j == next_j {
                        b2
                    } else {
                        a2
                    }
                } else {
                    a2
                };
                // `far` is whichever end of e2 is not the junction we entered
                // through; careful with edges joining the same junction twice.
                let far = match (a2, b2) {
                    (End::Junction(j1), other_end) if j1 == next_j => other_end,
                    (other_end, End::Junction(j2)) if j2 == next_j => other_end,
                    _ => far,
                };
                match far {
                    End::Real(y) => {
                        out.edges.push((start, y));
                        break;
                    }
                    End::Junction(j2) => {
                        prev_edge = e2;
                        next_j = j2;
                    }
                }
            }
        }
        // Remaining unconsumed edges are closed loops of plain wire; each
        // contributes a scalar factor of d. Materialize each loop as a
        // phase-free spider with a self-loop.
        for i in 0..pending.len() {
            if consumed[i] {
                continue;
            }
            let (a, _) = pending[i];
            let mut j = match a {
                End::Junction(j) => j,
                End::Real(_) => unreachable!(),
            };
            let first = j;
            let mut prev_edge = i;
            consumed[i] = true;
            loop {
                let ends = &junction_ends[j as usize];
                let (e2, _) = if ends[0].0 == prev_edge {
                    ends[1]
                } else {
                    ends[0]
                };
                if consumed[e2] && e2 == i {
                    break;
                }
                consumed[e2] = true;
                let (a2, b2) = pending[e2];
                let far = match (a2, b2) {
                    (End::Junction(j1), End::Junction(j2)) => {
                        if j1 == j {
                            j2
                        } else {
                            j1
                        }
                    }
                    _ => unreachable!("loop contains a real endpoint"),
                };
                if far == first {
                    break;
                }
                prev_edge = e2;
                j = far;
            }
            let phases = vec![Phase::ZERO; (self.dimension - 1) as usize];
            let node = out.add_node(NodeKind::ZSpider { phases });
            out.add_edge(Endpoint::node(node), Endpoint::node(node));
        }
        Ok(out)
    }

    /// Fresh copy with node ids renumbered from 0 in BTreeMap order.
    pub fn compacted(&self) -> Diagram {
        let mut out = Diagram::new(
            self.calculus,
            self.dimension,
            self.n_inputs,
            self.n_outputs,
        );
        let mut map = BTreeMap::new();
        for (id, kind) in &self.nodes {
            let new = out.add_node(kind.clone());
            map.insert(*id, new);
        }
        let remap = |e: &Endpoint| match e {
            Endpoint::Port { node, port } => Endpoint::Port {
                node: map[node],
                port: *port,
            },
            b => *b,
        };
        for (a, b) in &self.edges {
            out.edges.push((remap(a), remap(b)));
        }
        out
    }
}
