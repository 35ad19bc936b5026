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

//! Small builders for wiring diagrams together: gates on selected wires,
//! chains of gates, states, effects and scalar gadgets.

use alloc::vec::Vec;

use crate::diagram::{Calculus, Diagram, Endpoint, NodeKind, Side};
use crate::phase::Phase;

/// Sequential chain: `parts[0]` first.
pub fn chain(parts: &[Diagram]) -> Diagram {
    let mut it = parts.iter();
    let mut acc = it.next().expect("nonempty chain").clone();
    for p in it {
        acc = acc.compose_seq(p).expect("chain arity");
    }
    acc
}

/// Parallel stack: `parts[0]` on the most significant wires.
pub fn pack(parts: &[Diagram]) -> Diagram {
    let mut it = parts.iter();
    let mut acc = it.next().expect("nonempty pack").clone();
    for p in it {
        acc = acc.compose_par(p).expect("pack calculus");
    }
    acc
}

/// Embed a `k -> k` gate into an `n`-wire identity on the given wires.
pub fn embed(gate: &Diagram, n: usize, wires: &[usize]) -> Diagram {
    assert_eq!(gate.n_inputs(), wires.len());
    assert_eq!(gate.n_outputs(), wires.len());
    let mut d = Diagram::new(gate.calculus, gate.dimension, n, n);
    let mut map = alloc::collections::BTreeMap::new();
    for (id, kind) in gate.nodes() {
        map.insert(id, d.add_node(kind.clone()));
    }
    let remap = |e: &Endpoint| -> Endpoint {
        match e {
            Endpoint::Port { node, port } => Endpoint::Port {
                node: map[node],
                port: *port,
            },
            Endpoint::Boundary {
                side: Side::In,
                index,
            } => Endpoint::input(wires[*index as usize] as u16),
            Endpoint::Boundary {
                side: Side::Out,
                index,
            } => Endpoint::output(wires[*index as usize] as u16),
        }
    };
    for (a, b) in gate.edges() {
        d.add_edge(remap(a), remap(b));
    }
    for i in 0..n {
        if !wires.contains(&i) {
            d.add_edge(Endpoint::input(i as u16), Endpoint::output(i as u16));
        }
    }
    d
}

/// Apply a `k`-wire gate to the given wires of an `n`-wire circuit.
pub fn on_wires(circuit: Diagram, gate: &Diagram, wires: &[usize]) -> Diagram {
    let n = circuit.n_outputs();
    circuit
        .compose_seq(&embed(gate, n, wires))
        .expect("gate arity")
}

/// 1 -> 1 green phase gate.
pub fn z_phase(p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::z(p), 1, 1, Calculus::Zx, 2).unwrap()
}

/// 1 -> 1 red phase gate.
pub fn x_phase(p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::x(p), 1, 1, Calculus::Zx, 2).unwrap()
}

pub fn hadamard() -> Diagram {
    Diagram::from_generator(NodeKind::hadamard(), 1, 1, Calculus::Zx, 2).unwrap()
}

pub fn triangle() -> Diagram {
    Diagram::from_generator(NodeKind::Triangle { inverse: false }, 1, 1, Calculus::Zx, 2).unwrap()
}

pub fn triangle_inv() -> Diagram {
    Diagram::from_generator(NodeKind::Triangle { inverse: true }, 1, 1, Calculus::Zx, 2).unwrap()
}

pub fn lambda_box(lambda: crate::diagram::Lambda) -> Diagram {
    Diagram::from_generator(NodeKind::LambdaBox { lambda }, 1, 1, Calculus::Zx, 2).unwrap()
}

/// 0 -> 1 green state `|0> + e^{i p} |1>`.
pub fn z_state(p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::z(p), 0, 1, Calculus::Zx, 2).unwrap()
}

/// 0 -> 1 red state.
pub fn x_state(p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::x(p), 0, 1, Calculus::Zx, 2).unwrap()
}

/// 1 -> 0 green effect.
pub fn z_effect(p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::z(p), 1, 0, Calculus::Zx, 2).unwrap()
}

/// 1 -> 0 red effect.
pub fn x_effect(p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::x(p), 1, 0, Calculus::Zx, 2).unwrap()
}

/// Green spider with arbitrary arity.
pub fn z_spider(n: usize, m: usize, p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::z(p), n, m, Calculus::Zx, 2).unwrap()
}

/// Red spider with arbitrary arity.
pub fn x_spider(n: usize, m: usize, p: Phase) -> Diagram {
    Diagram::from_generator(NodeKind::x(p), n, m, Calculus::Zx, 2).unwrap()
}

/// Wire swap as a 2 -> 2 diagram.
pub fn swap() -> Diagram {
    let mut d = Diagram::zx(2, 2);
    d.add_edge(Endpoint::input(0), Endpoint::output(1));
    d.add_edge(Endpoint::input(1), Endpoint::output(0));
    d
}

/// CNOT as a 2 -> 2 gate (wire 0 control, wire 1 target), exact matrix
/// `sqrt 2` times the permutation; built from a green and a red spider.
pub fn cnot() -> Diagram {
    let mut d = Diagram::zx(2, 2);
    let c = d.add_node(NodeKind::z(Phase::ZERO));
    let t = d.add_node(NodeKind::x(Phase::ZERO));
    d.add_edge(Endpoint::input(0), Endpoint::node(c));
    d.add_edge(Endpoint::node_out(c), Endpoint::output(0));
    d.add_edge(Endpoint::input(1), Endpoint::node(t));
    d.add_edge(Endpoint::node_out(t), Endpoint::output(1));
    d.add_edge(Endpoint::node_out(c), Endpoint::node(t));
    d
}

/// CZ as a 2 -> 2 gate: two green spiders joined through a Hadamard.
pub fn cz() -> Diagram {
    let mut d = Diagram::zx(2, 2);
    let a = d.add_node(NodeKind::z(Phase::ZERO));
    let b = d.add_node(NodeKind::z(Phase::ZERO));
    let h = d.add_node(NodeKind::hadamard());
    d.add_edge(Endpoint::input(0), Endpoint::node(a));
    d.add_edge(Endpoint::node_out(a), Endpoint::output(0));
    d.add_edge(Endpoint::input(1), Endpoint::node(b));
    d.add_edge(Endpoint::node_out(b), Endpoint::output(1));
    d.add_edge(Endpoint::node_out(a), Endpoint::Port { node: h, port: 0 });
    d.add_edge(Endpoint::Port { node: h, port: 1 }, Endpoint::node(b));
    d
}

/// Closed scalar diagram with value `sqrt 2`: a green pi state capped by
/// a red zero effect.
pub fn scalar_sqrt2() -> Diagram {
    chain(&[z_state(Phase::pi()), x_effect(Phase::ZERO)])
}

/// Closed scalar diagram with value 2: a circle.
pub fn scalar_circle() -> Diagram {
    let mut cap = Diagram::zx(0, 2);
    cap.add_edge(Endpoint::output(0), Endpoint::output(1));
    let mut cup = Diagram::zx(2, 0);
    cup.add_edge(Endpoint::input(0), Endpoint::input(1));
    cap.compose_seq(&cup).unwrap()
}

/// Closed scalar with value `(1 + e^{i a})(1 + e^{i b}) / 2`: a loop
/// carrying two Hadamards and two green phases.
pub fn scalar_phase_loop(a: Phase, b: Phase) -> Diagram {
    // trace(Z(a) H Z(b) H)
    let mut d = Diagram::zx(0, 0);
    let za = d.add_node(NodeKind::z(a));
    let zb = d.add_node(NodeKind::z(b));
    let h1 = d.add_node(NodeKind::hadamard());
    let h2 = d.add_node(NodeKind::hadamard());
    d.add_edge(Endpoint::node_out(za), Endpoint::Port { node: h1, port: 0 });
    d.add_edge(Endpoint::Port { node: h1, port: 1 }, Endpoint::node(zb));
    d.add_edge(Endpoint::node_out(zb), Endpoint::Port { node: h2, port: 0 });
    d.add_edge(Endpoint::Port { node: h2, port: 1 }, Endpoint::node(za));
    d
}

/// Closed scalar with value `e^{-i pi/4}`: a loop through H and Z(pi/2).
pub fn scalar_loop_eighth() -> Diagram {
    let mut d = Diagram::zx(0, 0);
    let z = d.add_node(NodeKind::z(Phase::quarter(2)));
    let h = d.add_node(NodeKind::hadamard());
    d.add_edge(Endpoint::node_out(z), Endpoint::Port { node: h, port: 0 });
    d.add_edge(Endpoint::Port { node: h, port: 1 }, Endpoint::node(z));
    d
}

/// Transpose of a 1 -> 1 diagram via cap and cup.
pub fn transpose(gate: &Diagram) -> Diagram {
    assert_eq!(gate.n_inputs(), 1);
    assert_eq!(gate.n_outputs(), 1);
    // (cup (x) 1) . (1 (x) gate (x) 1) . (1 (x) cap): bends the wire
    // around the gate.
    let mut d = Diagram::new(gate.calculus, gate.dimension, 3, 3);
    d.add_edge(Endpoint::input(0), Endpoint::output(0));
    d.add_edge(Endpoint::input(2), Endpoint::output(2));
    let mut map = alloc::collections::BTreeMap::new();
    for (id, kind) in gate.nodes() {
        map.insert(id, d.add_node(kind.clone()));
    }
    for (a, b) in gate.edges() {
        let remap = |e: &Endpoint| -> Endpoint {
            match e {
                Endpoint::Port { node, port } => Endpoint::Port {
                    node: map[node],
                    port: *port,
                },
                Endpoint::Boundary {
                    side: Side::In,
                    index: 0,
                } => Endpoint::input(1),
                Endpoint::Boundary {
                    side: Side::Out,
                    index: 0,
                } => Endpoint::output(1),
                _ => unreachable!(),
            }
        };
        d.add_edge(remap(a), remap(b));
    }
    // cap feeding inputs 1 and 2... spliced via composition:
    let mut cap = Diagram::new(gate.calculus, gate.dimension, 1, 3);
    cap.add_edge(Endpoint::input(0), Endpoint::output(2));
    cap.add_edge(Endpoint::output(0), Endpoint::output(1));
    let mut cup = Diagram::new(gate.calculus, gate.dimension, 3, 1);
    cup.add_edge(Endpoint::input(0), Endpoint::output(0));
    cup.add_edge(Endpoint::input(1), Endpoint::input(2));
    cap.compose_seq(&d).unwrap().compose_seq(&cup).unwrap()
}

/// Permutation diagram sending input `i` to output `perm[i]`.
pub fn permutation(calculus: Calculus, dimension: u8, perm: &[usize]) -> Diagram {
    let n = perm.len();
    let mut d = Diagram::new(calculus, dimension, n, n);
    for (i, p) in perm.iter().enumerate() {
        d.add_edge(Endpoint::input(i as u16), Endpoint::output(*p as u16));
    }
    d
}

/// Repeated parallel copies of a gate.
pub fn tensor_pow(gate: &Diagram, k: usize) -> Diagram {
    let mut parts = Vec::new();
    for _ in 0..k {
        parts.push(gate.clone());
    }
    pack(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{scalar_equiv, Complex, Matrix, TOL};
    use crate::tensor::interpret;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn cnot_matrix() {
        let m = interpret(&cnot()).unwrap();
        let s = core::f64::consts::SQRT_2;
        // CNOT times 1/sqrt2 scalar from the spider pair.
        let mut expect = Matrix::zeros(4, 4);
        expect[(0, 0)] = c(1.0, 0.0);
        expect[(1, 1)] = c(1.0, 0.0);
        expect[(2, 3)] = c(1.0, 0.0);
        expect[(3, 2)] = c(1.0, 0.0);
        let r = scalar_equiv(&m, &expect, TOL).unwrap().unwrap();
        assert!((r.norm() - 1.0 / s).abs() < 1e-9);
    }

    #[test]
    fn cz_matrix() {
        let m = interpret(&cz()).unwrap();
        let mut expect = Matrix::zeros(4, 4);
        expect[(0, 0)] = c(1.0, 0.0);
        expect[(1, 1)] = c(1.0, 0.0);
        expect[(2, 2)] = c(1.0, 0.0);
        expect[(3, 3)] = c(-1.0, 0.0);
        assert!(scalar_equiv(&m, &expect, TOL).unwrap().is_some());
    }

    #[test]
    fn embed_keeps_identity_elsewhere() {
        let g = z_phase(Phase::quarter(2));
        let d = embed(&g, 3, &[1]);
        let m = interpret(&d).unwrap();
        // diag over wire 1 only.
        for idx in 0..8 {
            let bit = (idx >> 1) & 1;
            let expect = if bit == 1 { c(0.0, 1.0) } else { c(1.0, 0.0) };
            assert!((m[(idx, idx)] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn transpose_of_triangle() {
        let t = transpose(&triangle());
        let m = interpret(&t).unwrap();
        let expect = Matrix::from_rows(&[
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(1.0, 0.0), c(1.0, 0.0)],
        ]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn scalar_gadgets() {
        let s2 = crate::tensor::interpret_scalar(&scalar_sqrt2()).unwrap();
        assert!((s2 - c(core::f64::consts::SQRT_2, 0.0)).norm() < 1e-12);
        let circle = crate::tensor::interpret_scalar(&scalar_circle()).unwrap();
        assert!((circle - c(2.0, 0.0)).norm() < 1e-12);
        let eighth = crate::tensor::interpret_scalar(&scalar_loop_eighth()).unwrap();
        assert!((eighth - Complex::from_polar(1.0, -core::f64::consts::FRAC_PI_4)).norm() < 1e-12);
        // (1 + e^{3 i pi/4})(1 + e^{5 i pi/4}) / 2 = 1 - 1/sqrt 2.
        let a = crate::tensor::interpret_scalar(&scalar_phase_loop(
            Phase::quarter(3),
            Phase::quarter(5),
        ))
        .unwrap();
        assert!((a - c(1.0 - core::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn swap_and_permutation() {
        let m = interpret(&swap()).unwrap();
        let mut expect = Matrix::zeros(4, 4);
        expect[(0, 0)] = c(1.0, 0.0);
        expect[(1, 2)] = c(1.0, 0.0);
        expect[(2, 1)] = c(1.0, 0.0);
        expect[(3, 3)] = c(1.0, 0.0);
        assert!(m.approx_eq(&expect, 1e-12));
    }
}
