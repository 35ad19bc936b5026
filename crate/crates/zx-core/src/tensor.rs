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

//! The standard interpretation mapping diagrams to matrices by tensor
//! contraction.
//!
//! Basis ordering is big-endian: boundary index 0 is the most significant
//! digit. Caps and cups (edges between two boundary points or two legs)
//! are the unnormalized Bell pairs `sum_j |jj>`.
//!
//! The contraction engine is generic over the scalar type: `Complex` for
//! the floating interpretation and [`RingElement`] for the exact
//! Clifford+T interpretation (diagrams whose phases are multiples of
//! `pi/4` and whose lambda parameters are dyadic).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::diagram::{Calculus, Diagram, DiagramError, Endpoint, NodeId, NodeKind, Side};
use crate::num::{
    ring_add, ring_mul, Complex, Matrix, RingElement, RingMatrix,
};
use crate::phase::Phase;

/// Largest spider degree that will be materialized as a dense tensor.
const MAX_SPIDER_DEGREE: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum SemanticsError {
    InvalidDiagram(Vec<String>),
    IllegalArity(String),
    SpiderTooLarge { degree: usize },
    /// The diagram leaves the exact Clifford+T fragment.
    NotExact(String),
    DimensionOverflow,
}

impl From<DiagramError> for SemanticsError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::Invalid(v) => SemanticsError::InvalidDiagram(v),
            other => SemanticsError::IllegalArity(format!("{:?}", other)),
        }
    }
}

/// Scalar domain for the contraction engine.
pub trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;
    /// `e^{i phase}`, if representable in this domain.
    fn from_phase(phase: &Phase) -> Option<Self>;
    fn from_f64(x: f64) -> Option<Self>;
    fn from_int(n: i64) -> Self;
    /// `(1/sqrt 2)^k`.
    fn inv_sqrt2_pow(k: u32) -> Self;
}

impl Scalar for Complex {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }
    fn from_phase(phase: &Phase) -> Option<Self> {
        Some(phase.to_complex())
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Complex::new(x, 0.0))
    }
    fn from_int(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
    fn inv_sqrt2_pow(k: u32) -> Self {
        Complex::new(libm::pow(core::f64::consts::FRAC_1_SQRT_2, k as f64), 0.0)
    }
}

impl Scalar for RingElement {
    fn zero() -> Self {
        RingElement::ZERO
    }
    fn one() -> Self {
        RingElement::ONE
    }
    fn add(&self, other: &Self) -> Self {
        ring_add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ring_mul(self, other)
    }
    fn conj(&self) -> Self {
        // conj(w) = w^-1 = -w^3
        RingElement::new(
            self.coeffs[0],
            self.coeffs[3].neg(),
            self.coeffs[2].neg(),
            self.coeffs[1].neg(),
        )
    }
    fn from_phase(phase: &Phase) -> Option<Self> {
        phase.quarter_index().map(RingElement::omega_pow)
    }
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    fn from_int(n: i64) -> Self {
        RingElement::from_int(n)
    }
    fn inv_sqrt2_pow(k: u32) -> Self {
        RingElement::inv_sqrt2_pow(k)
    }
}

/// Generic dense matrix used while assembling generator tensors.
#[derive(Clone, Debug)]
struct GMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> GMatrix<T> {
    fn zeros(rows: usize, cols: usize) -> Self {
        GMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }
    fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }
}

/// `H` matrix for dimension `d` (2 or 3): `(1/sqrt d) xi^{jk}`.
fn hadamard_matrix<T: Scalar>(d: usize) -> Result<GMatrix<T>, SemanticsError> {
    let mut m = GMatrix::zeros(d, d);
    match d {
        2 => {
            let s = T::inv_sqrt2_pow(1);
            m.set(0, 0, s.clone());
            m.set(0, 1, s.clone());
            m.set(1, 0, s.clone());
            m.set(1, 1, s.mul(&T::from_int(-1)));
        }
        3 => {
            let s = T::from_f64(1.0 / libm::sqrt(3.0))
                .ok_or_else(|| SemanticsError::NotExact("qutrit H".into()))?;
            for j in 0..3 {
                for k in 0..3 {
                    let w = T::from_phase(&Phase::z3((j * k) as i64))
                        .ok_or_else(|| SemanticsError::NotExact("qutrit H".into()))?;
                    m.set(j, k, s.mul(&w));
                }
            }
        }
        _ => return Err(SemanticsError::IllegalArity("dimension".into())),
    }
    Ok(m)
}

fn mat_mul<T: Scalar>(a: &GMatrix<T>, b: &GMatrix<T>) -> GMatrix<T> {
    let mut out: GMatrix<T> = GMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let v = a.get(i, k).clone();
            if v == T::zero() {
                continue;
            }
            for j in 0..b.cols {
                let cur = out.get(i, j).add(&v.mul(b.get(k, j)));
                out.set(i, j, cur);
            }
        }
    }
    out
}

/// Base matrix of a port-sensitive generator (ports `0..n` inputs,
/// `n..n+m` outputs), shape `d^m x d^n`.
fn port_kind_matrix<T: Scalar>(
    kind: &NodeKind,
    dimension: usize,
) -> Result<GMatrix<T>, SemanticsError> {
    match kind {
        NodeKind::Hadamard { power } => {
            let h = hadamard_matrix::<T>(dimension)?;
            let mut m = GMatrix::zeros(dimension, dimension);
            for i in 0..dimension {
                m.set(i, i, T::one());
            }
            let p = match dimension {
                2 => power % 2,
                _ => power % 4,
            };
            for _ in 0..p {
                m = mat_mul(&h, &m);
            }
            Ok(m)
        }
        NodeKind::Triangle { inverse } => {
            let mut m = GMatrix::zeros(2, 2);
            m.set(0, 0, T::one());
            m.set(1, 1, T::one());
            m.set(0, 1, if *inverse { T::from_int(-1) } else { T::one() });
            Ok(m)
        }
        NodeKind::LambdaBox { lambda } => {
            let mut m = GMatrix::zeros(2, 2);
            m.set(0, 0, T::one());
            let v = match lambda.as_dyadic() {
                Some(d) => {
                    let mut r = T::from_int(d.numerator());
                    r = r.mul(&T::inv_sqrt2_pow(2 * d.exponent()));
                    r
                }
                None => T::from_f64(lambda.value())
                    .ok_or_else(|| SemanticsError::NotExact("non-dyadic lambda".into()))?,
            };
            m.set(1, 1, v);
            Ok(m)
        }
        NodeKind::ZwPi => {
            let mut m = GMatrix::zeros(2, 2);
            m.set(0, 1, T::one());
            m.set(1, 0, T::one());
            Ok(m)
        }
        NodeKind::ZwBlackW => {
            // 1 -> 2, matrix (0,1; 1,0; 1,0; 0,0): |0> -> |01>+|10>, |1> -> |00>.
            let mut m = GMatrix::zeros(4, 2);
            m.set(0, 1, T::one());
            m.set(1, 0, T::one());
            m.set(2, 0, T::one());
            Ok(m)
        }
        NodeKind::ZwCrossing => {
            // 2 -> 2 swap with a -1 on |11>.
            let mut m = GMatrix::zeros(4, 4);
            m.set(0, 0, T::one());
            m.set(1, 2, T::one());
            m.set(2, 1, T::one());
            m.set(3, 3, T::from_int(-1));
            Ok(m)
        }
        _ => Err(SemanticsError::IllegalArity(
            "spider kinds have no port matrix".into(),
        )),
    }
}

/// The exact matrix of a single generator with `n` inputs and `m`
/// outputs.
pub fn generator_matrix(
    kind: &NodeKind,
    n: usize,
    m: usize,
    dimension: u8,
) -> Result<Matrix, SemanticsError> {
    let calculus = match kind {
        NodeKind::ZwWhite { .. } | NodeKind::ZwBlackW | NodeKind::ZwCrossing | NodeKind::ZwPi => {
            Calculus::Zw
        }
        _ => Calculus::Zx,
    };
    let d = Diagram::from_generator(kind.clone(), n, m, calculus, dimension)?;
    interpret(&d)
}

/// One tensor in the contraction pool. Legs are labelled by half-edge ids
/// (`2 * edge_index + end`) or by boundary slots.
#[derive(Clone, Debug)]
struct Tensor<T> {
    legs: Vec<Leg>,
    data: Vec<T>,
    dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Leg {
    Half(usize),
    BoundIn(u16),
    BoundOut(u16),
}

impl<T: Scalar> Tensor<T> {
    fn rank(&self) -> usize {
        self.legs.len()
    }

    fn scalar(v: T) -> Self {
        Tensor {
            legs: Vec::new(),
            data: vec![v],
            dim: 1,
        }
    }
}

fn index_of(strides: &[usize], idx: &[usize]) -> usize {
    strides.iter().zip(idx).map(|(s, i)| s * i).sum()
}

fn strides(dim: usize, rank: usize) -> Vec<usize> {
    // Big-endian: leg 0 most significant.
    let mut s = vec![1usize; rank];
    for i in (0..rank.saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dim;
    }
    s
}

/// Contract any self-paired legs (both halves of one edge on the same
/// tensor) and return the reduced tensor.
fn trace_self<T: Scalar>(t: Tensor<T>, pair_of: &BTreeMap<usize, usize>) -> Tensor<T> {
    // Find a pair of legs on this tensor which are the two halves of one
    // edge.
    let mut pair: Option<(usize, usize)> = None;
    'outer: for (i, leg) in t.legs.iter().enumerate() {
        if let Leg::Half(h) = leg {
            for (j, leg2) in t.legs.iter().enumerate().skip(i + 1) {
                if let Leg::Half(h2) = leg2 {
                    if pair_of.get(h) == Some(h2) {
                        pair = Some((i, j));
                        break 'outer;
                    }
                }
            }
        }
    }
    let (i, j) = match pair {
        Some(p) => p,
        None => return t,
    };
    let dim = t.dim;
    let rank = t.rank();
    let old_strides = strides(dim, rank);
    let new_legs: Vec<Leg> = t
        .legs
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i && *k != j)
        .map(|(_, l)| *l)
        .collect();
    let new_rank = new_legs.len();
    let new_strides = strides(dim, new_rank);
    let mut data = vec![T::zero(); dim.pow(new_rank as u32)];
    let mut idx = vec![0usize; rank];
    loop {
        if idx[i] == idx[j] {
            let mut nidx = Vec::with_capacity(new_rank);
            for (k, v) in idx.iter().enumerate() {
                if k != i && k != j {
                    nidx.push(*v);
                }
            }
            let dst = index_of(&new_strides, &nidx);
            let src = index_of(&old_strides, &idx);
            data[dst] = data[dst].add(&t.data[src]);
        }
        // Increment multi-index.
        let mut k = rank;
        loop {
            if k == 0 {
                return trace_self(
                    Tensor {
                        legs: new_legs,
                        data,
                        dim,
                    },
                    pair_of,
                );
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Contract two tensors over all edges joining them.
fn contract<T: Scalar>(
    a: &Tensor<T>,
    b: &Tensor<T>,
    pair_of: &BTreeMap<usize, usize>,
) -> Tensor<T> {
    let dim = a.dim.max(b.dim);
    // Legs of a paired with legs of b.
    let mut a_shared = Vec::new();
    let mut b_shared = Vec::new();
    for (i, la) in a.legs.iter().enumerate() {
        if let Leg::Half(h) = la {
            if let Some(h2) = pair_of.get(h) {
                if let Some(j) = b.legs.iter().position(|lb| *lb == Leg::Half(*h2)) {
                    a_shared.push(i);
                    b_shared.push(j);
                }
            }
        }
    }
    let a_free: Vec<usize> = (0..a.rank()).filter(|i| !a_shared.contains(i)).collect();
    let b_free: Vec<usize> = (0..b.rank()).filter(|j| !b_shared.contains(j)).collect();
    let mut legs = Vec::new();
    legs.extend(a_free.iter().map(|i| a.legs[*i]));
    legs.extend(b_free.iter().map(|j| b.legs[*j]));
    let new_rank = legs.len();
    let mut data = vec![T::zero(); dim.pow(new_rank as u32)];
    let sa = strides(dim, a.rank());
    let sb = strides(dim, b.rank());
    let sn = strides(dim, new_rank);

    let shared = a_shared.len();
    let free_a = a_free.len();
    let mut out_idx = vec![0usize; new_rank];
    loop {
        // Sum over shared indices.
        let mut sum_idx = vec![0usize; shared];
        let mut acc = T::zero();
        loop {
            let mut ia = vec![0usize; a.rank()];
            for (t, i) in a_free.iter().enumerate() {
                ia[*i] = out_idx[t];
            }
            for (t, i) in a_shared.iter().enumerate() {
                ia[*i] = sum_idx[t];
            }
            let mut ib = vec![0usize; b.rank()];
            for (t, j) in b_free.iter().enumerate() {
                ib[*j] = out_idx[free_a + t];
            }
            for (t, j) in b_shared.iter().enumerate() {
                ib[*j] = sum_idx[t];
            }
            let va = &a.data[index_of(&sa, &ia)];
            let vb = &b.data[index_of(&sb, &ib)];
            acc = acc.add(&va.mul(vb));
            // Increment shared multi-index.
            let mut k = shared;
            let mut done = true;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                sum_idx[k] += 1;
                if sum_idx[k] < dim {
                    done = false;
                    break;
                }
                sum_idx[k] = 0;
            }
            if done {
                break;
            }
        }
        data[index_of(&sn, &out_idx)] = acc;
        // Increment output multi-index.
        let mut k = new_rank;
        let mut done = true;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            out_idx[k] += 1;
            if out_idx[k] < dim {
                done = false;
                break;
            }
            out_idx[k] = 0;
        }
        if done {
            break;
        }
    }
    Tensor { legs, data, dim }
}

/// Build the tensor of one node. Leg order: ports in increasing order for
/// port-sensitive kinds; incidence order for spiders.
fn node_tensor<T: Scalar>(
    diagram: &Diagram,
    id: NodeId,
    kind: &NodeKind,
) -> Result<Tensor<T>, SemanticsError> {
    let d = diagram.dimension as usize;
    // Gather incident half-edges.
    let mut halves: Vec<(u16, usize, Side)> = Vec::new(); // (port, half-id, direction)
    for (i, (a, b)) in diagram.edges().iter().enumerate() {
        for (end, e) in [(0usize, a), (1usize, b)] {
            if let Endpoint::Port { node, port } = e {
                if *node == id {
                    // Direction flag: for spiders, port 0 marks an input-side
                    // leg and port 1 an output-side leg; immaterial except for
                    // the qutrit X spider.
                    let side = if *port == 0 { Side::In } else { Side::Out };
                    halves.push((*port, 2 * i + end, side));
                }
            }
        }
    }
    if kind.is_spider() {
        let degree = halves.len();
        if degree > MAX_SPIDER_DEGREE {
            return Err(SemanticsError::SpiderTooLarge { degree });
        }
        // Weight per basis index (the j-th term of the spider sum).
        let weights: Vec<T> = match kind {
            NodeKind::ZSpider { phases } | NodeKind::XSpider { phases } => {
                let mut w = vec![T::one()];
                for p in phases {
                    w.push(
                        T::from_phase(p).ok_or_else(|| SemanticsError::NotExact("phase".into()))?,
                    );
                }
                w
            }
            NodeKind::ZwWhite { r } => {
                let rv = match r {
                    crate::diagram::WParam::Exact(e) => ring_to_ring::<T>(e),
                    crate::diagram::WParam::Approx(z) => complex_to_scalar::<T>(*z)
                        .ok_or_else(|| SemanticsError::NotExact("zw parameter".into()))?,
                };
                vec![T::one(), rv]
            }
            _ => unreachable!(),
        };
        let legs: Vec<Leg> = halves.iter().map(|(_, h, _)| Leg::Half(*h)).collect();
        let rank = legs.len();
        let st = strides(d, rank);
        let mut data = vec![T::zero(); d.pow(rank as u32)];
        if matches!(kind, NodeKind::XSpider { .. }) {
            // X spider: H-conjugated delta. Output-side legs take H factors,
            // input-side legs take conj(H). For d = 2 the distinction is
            // immaterial (H is real); for d = 3 it is not.
            let h = hadamard_matrix::<T>(d)?;
            let mut idx = vec![0usize; rank];
            loop {
                let mut total = T::zero();
                for (j, wj) in weights.iter().enumerate().take(d) {
                    let mut term = wj.clone();
                    for (t, (_, _, side)) in halves.iter().enumerate() {
                        let x = idx[t];
                        let f = match side {
                            Side::Out => h.get(x, j).clone(),
                            Side::In => h.get(x, j).conj(),
                        };
                        term = term.mul(&f);
                    }
                    total = total.add(&term);
                }
                if rank == 0 {
                    data[0] = total;
                    break;
                }
                data[index_of(&st, &idx)] = total;
                let mut k = rank;
                let mut done = true;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < d {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if done {
                    break;
                }
            }
        } else {
            // Diagonal delta: all legs equal.
            if rank == 0 {
                let mut total = T::zero();
                for w in weights.iter().take(d) {
                    total = total.add(w);
                }
                data[0] = total;
            } else {
                for (j, w) in weights.iter().enumerate().take(d) {
                    let pos: usize = st.iter().map(|s| s * j).sum();
                    data[pos] = w.clone();
                }
            }
        }
        Ok(Tensor { legs, data, dim: d })
    } else {
        {
            // Port-sensitive kind: reshape the base matrix.
            let (pn, pm) = kind.port_arity().unwrap();
            let m = port_kind_matrix::<T>(kind, d)?;
            halves.sort_by_key(|(p, _, _)| *p);
            let legs: Vec<Leg> = halves.iter().map(|(_, h, _)| Leg::Half(*h)).collect();
            let rank = legs.len();
            debug_assert_eq!(rank, (pn + pm) as usize);
            let st = strides(d, rank);
            let mut data = vec![T::zero(); d.pow(rank as u32)];
            let stin = strides(d, pn as usize);
            let stout = strides(d, pm as usize);
            let mut idx = vec![0usize; rank];
            loop {
                let i_in = index_of(&stin, &idx[..pn as usize]);
                let i_out = index_of(&stout, &idx[pn as usize..]);
                data[index_of(&st, &idx)] = m.get(i_out, i_in).clone();
                let mut k = rank;
                let mut done = true;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < d {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if done {
                    break;
                }
            }
            Ok(Tensor { legs, data, dim: d })
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn ring_to_ring<T: Scalar>(r: &RingElement) -> T {
    // Rebuild r in the target scalar domain from its coefficients.
    let mut acc = T::zero();
    for (k, c) in r.coeffs.iter().enumerate() {
        let w = T::from_phase(&Phase::quarter(k as i64)).expect("omega powers are exact");
        let mut term = T::from_int(c.numerator());
        term = term.mul(&T::inv_sqrt2_pow(2 * c.exponent()));
        acc = acc.add(&w.mul(&term));
    }
    acc
}

fn complex_to_scalar<T: Scalar>(z: Complex) -> Option<T> {
    let re = T::from_f64(z.re)?;
    let im = T::from_f64(z.im)?;
    let i = T::from_phase(&Phase::turns(1, 2))?;
    Some(re.add(&i.mul(&im)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Contract the pair minimizing the resulting tensor rank.
    Greedy,
    /// Contract in node order.
    Sequential,
}

fn interpret_generic<T: Scalar>(
    diagram: &Diagram,
    schedule: Schedule,
) -> Result<GMatrix<T>, SemanticsError> {
    diagram.validate()?;
    let d = diagram.dimension as usize;

    // Edge half-pairing.
    let mut pair_of: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..diagram.n_edges() {
        pair_of.insert(2 * i, 2 * i + 1);
        pair_of.insert(2 * i + 1, 2 * i);
    }

    let mut pool: Vec<Tensor<T>> = Vec::new();
    // Boundary tensors: identity wires exposing one half-edge leg and one
    // boundary leg.
    for (i, (a, b)) in diagram.edges().iter().enumerate() {
        for (end, e) in [(0usize, a), (1usize, b)] {
            if let Endpoint::Boundary { side, index } = e {
                let leg_b = match side {
                    Side::In => Leg::BoundIn(*index),
                    Side::Out => Leg::BoundOut(*index),
                };
                let mut data = vec![T::zero(); d * d];
                for j in 0..d {
                    data[j * d + j] = T::one();
                }
                pool.push(Tensor {
                    legs: vec![Leg::Half(2 * i + end), leg_b],
                    data,
                    dim: d,
                });
            }
        }
    }
    for (id, kind) in diagram.nodes() {
        pool.push(trace_self(node_tensor(diagram, id, kind)?, &pair_of));
    }
    if pool.is_empty() {
        pool.push(Tensor::scalar(T::one()));
    }

    // Contract until no shared edges remain.
    loop {
        // Find candidate pairs sharing at least one edge.
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..pool.len() {
            for j in (i + 1)..pool.len() {
                let mut shared = 0usize;
                for la in &pool[i].legs {
                    if let Leg::Half(h) = la {
                        if let Some(h2) = pair_of.get(h) {
                            if pool[j].legs.contains(&Leg::Half(*h2)) {
                                shared += 1;
                            }
                        }
                    }
                }
                if shared > 0 {
                    let rank = pool[i].rank() + pool[j].rank() - 2 * shared;
                    let better = match (schedule, &best) {
                        (_, None) => true,
                        (Schedule::Greedy, Some((_, _, r))) => rank < *r,
                        (Schedule::Sequential, Some(_)) => false,
                    };
                    if better {
                        best = Some((i, j, rank));
                    }
                }
            }
        }
        match best {
            Some((i, j, _)) => {
                let b = pool.swap_remove(j);
                let a = pool.swap_remove(if i < j { i } else { i - 1 });
                let t = trace_self(contract(&a, &b, &pair_of), &pair_of);
                pool.push(t);
            }
            None => break,
        }
    }

    // Outer product of the remaining disconnected components.
    let mut total = pool.pop().unwrap();
    while let Some(t) = pool.pop() {
        total = contract(&total, &t, &pair_of); // no shared legs: outer product
    }

    // Reorder legs into [out 0.., in 0..] big-endian.
    let rank = total.rank();
    let n_in = diagram.n_inputs();
    let n_out = diagram.n_outputs();
    debug_assert_eq!(rank, n_in + n_out);
    let mut perm = Vec::with_capacity(rank);
    for i in 0..n_out {
        let p = total
            .legs
            .iter()
            .position(|l| *l == Leg::BoundOut(i as u16))
            .expect("missing output leg");
        perm.push(p);
    }
    for i in 0..n_in {
        let p = total
            .legs
            .iter()
            .position(|l| *l == Leg::BoundIn(i as u16))
            .expect("missing input leg");
        perm.push(p);
    }
    let st_old = strides(d, rank);
    let rows = d
        .checked_pow(n_out as u32)
        .ok_or(SemanticsError::DimensionOverflow)?;
    let cols = d
        .checked_pow(n_in as u32)
        .ok_or(SemanticsError::DimensionOverflow)?;
    let mut out = GMatrix::zeros(rows, cols);
    let mut idx = vec![0usize; rank]; // index in output order
    loop {
        let mut old_idx = vec![0usize; rank];
        for (t, p) in perm.iter().enumerate() {
            old_idx[*p] = idx[t];
        }
        let v = total.data[index_of(&st_old, &old_idx)].clone();
        let r = idx[..n_out]
            .iter()
            .fold(0usize, |acc, x| acc * d + x);
        let c = idx[n_out..].iter().fold(0usize, |acc, x| acc * d + x);
        out.set(r, c, v);
        let mut k = rank;
        let mut done = true;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < d {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if done {
            break;
        }
    }
    Ok(out)
}

/// Evaluate the diagram to its matrix, shape `d^outputs x d^inputs`.
pub fn interpret(diagram: &Diagram) -> Result<Matrix, SemanticsError> {
    interpret_with_schedule(diagram, Schedule::Greedy)
}

/// As [`interpret`], with an explicit contraction schedule (the result
/// must not depend on it).
pub fn interpret_with_schedule(
    diagram: &Diagram,
    schedule: Schedule,
) -> Result<Matrix, SemanticsError> {
    let g = interpret_generic::<Complex>(diagram, schedule)?;
    let mut m = Matrix::zeros(g.rows, g.cols);
    for i in 0..g.rows {
        for j in 0..g.cols {
            m[(i, j)] = *g.get(i, j);
        }
    }
    Ok(m)
}

/// Exact interpretation over the ring `T` for qubit diagrams whose phases
/// are multiples of `pi/4` and whose lambda parameters are dyadic.
pub fn interpret_exact(diagram: &Diagram) -> Result<RingMatrix, SemanticsError> {
    if diagram.dimension != 2 {
        return Err(SemanticsError::NotExact("exact mode is qubit-only".into()));
    }
    let g = interpret_generic::<RingElement>(diagram, Schedule::Greedy)?;
    let mut m = RingMatrix::zeros(g.rows, g.cols);
    for i in 0..g.rows {
        for j in 0..g.cols {
            m.set(i, j, g.get(i, j).clone());
        }
    }
    Ok(m)
}

/// Interpret a closed diagram (no inputs or outputs) to its scalar.
pub fn interpret_scalar(diagram: &Diagram) -> Result<Complex, SemanticsError> {
    let m = interpret(diagram)?;
    if m.rows != 1 || m.cols != 1 {
        return Err(SemanticsError::IllegalArity("not a scalar diagram".into()));
    }
    Ok(m[(0, 0)])
}

pub use crate::num::scalar_equiv;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Lambda;
    use crate::num::{kron, TOL};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn z_state_matrix() {
        // Z(alpha) state (0 -> 1): column (1, e^{i alpha})^T.
        let alpha = 0.7;
        let d = Diagram::from_generator(
            NodeKind::z(Phase::radians(alpha)),
            0,
            1,
            Calculus::Zx,
            2,
        )
        .unwrap();
        let m = interpret(&d).unwrap();
        let expect = Matrix::column(&[c(1.0, 0.0), Complex::from_polar(1.0, alpha)]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn cap_matrix() {
        let d = Diagram::from_generator(NodeKind::z(Phase::ZERO), 0, 2, Calculus::Zx, 2).unwrap();
        let m = interpret(&d).unwrap();
        let expect = Matrix::column(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn plain_cap_is_bell() {
        let mut d = Diagram::zx(0, 2);
        d.add_edge(Endpoint::output(0), Endpoint::output(1));
        let m = interpret(&d).unwrap();
        let expect = Matrix::column(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn triangle_matrix() {
        let m = generator_matrix(&NodeKind::Triangle { inverse: false }, 1, 1, 2).unwrap();
        let expect = Matrix::from_rows(&[
            &[c(1.0, 0.0), c(1.0, 0.0)],
            &[c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn hadamard_matrix_value() {
        let m = generator_matrix(&NodeKind::hadamard(), 1, 1, 2).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let expect = Matrix::from_rows(&[
            &[c(s, 0.0), c(s, 0.0)],
            &[c(s, 0.0), c(-s, 0.0)],
        ]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn zw_crossing_matrix() {
        let m = generator_matrix(&NodeKind::ZwCrossing, 2, 2, 2).unwrap();
        assert!((m[(3, 3)] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((m[(1, 2)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m[(2, 1)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zw_w_matrix() {
        let m = generator_matrix(&NodeKind::ZwBlackW, 1, 2, 2).unwrap();
        let expect = Matrix::from_rows(&[
            &[c(0.0, 0.0), c(1.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn closed_circle_is_dimension() {
        // cup . cap = scalar 2 for qubits.
        let mut cap = Diagram::zx(0, 2);
        cap.add_edge(Endpoint::output(0), Endpoint::output(1));
        let mut cup = Diagram::zx(2, 0);
        cup.add_edge(Endpoint::input(0), Endpoint::input(1));
        let circle = cap.compose_seq(&cup).unwrap();
        let z = interpret_scalar(&circle).unwrap();
        assert!((z - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn snake_is_identity() {
        // (1 (x) cup) . (cap (x) 1) = identity wire.
        let mut a = Diagram::zx(1, 3);
        a.add_edge(Endpoint::input(0), Endpoint::output(0));
        a.add_edge(Endpoint::output(1), Endpoint::output(2));
        let mut b = Diagram::zx(3, 1);
        b.add_edge(Endpoint::input(0), Endpoint::input(1));
        b.add_edge(Endpoint::input(2), Endpoint::output(0));
        let snake = a.compose_seq(&b).unwrap();
        let m = interpret(&snake).unwrap();
        assert!(m.approx_eq(&Matrix::identity(2), 1e-12));
    }

    #[test]
    fn seq_semantics_matches_product() {
        // Z(a) then Z(b) on one wire = diag(1, e^{i(a+b)}).
        let a = Diagram::from_generator(NodeKind::z(Phase::radians(0.4)), 1, 1, Calculus::Zx, 2)
            .unwrap();
        let b = Diagram::from_generator(NodeKind::z(Phase::radians(1.1)), 1, 1, Calculus::Zx, 2)
            .unwrap();
        let ab = a.compose_seq(&b).unwrap();
        let m = interpret(&ab).unwrap();
        let expect = Matrix::from_rows(&[
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), Complex::from_polar(1.0, 1.5)],
        ]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn par_semantics_is_kron() {
        let h = Diagram::from_generator(NodeKind::hadamard(), 1, 1, Calculus::Zx, 2).unwrap();
        let hh = h.compose_par(&h).unwrap();
        let m = interpret(&hh).unwrap();
        let hm = generator_matrix(&NodeKind::hadamard(), 1, 1, 2).unwrap();
        let expect = kron(&hm, &hm).unwrap();
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn schedules_agree() {
        // A small random-ish diagram contracted two ways.
        let mut d = Diagram::zx(1, 1);
        let a = d.add_node(NodeKind::z(Phase::radians(0.3)));
        let b = d.add_node(NodeKind::x(Phase::radians(1.2)));
        let h = d.add_node(NodeKind::hadamard());
        d.add_edge(Endpoint::input(0), Endpoint::node(a));
        d.add_edge(Endpoint::node(a), Endpoint::Port { node: h, port: 0 });
        d.add_edge(Endpoint::Port { node: h, port: 1 }, Endpoint::node(b));
        d.add_edge(Endpoint::node(a), Endpoint::node(b));
        d.add_edge(Endpoint::node(b), Endpoint::output(0));
        let m1 = interpret_with_schedule(&d, Schedule::Greedy).unwrap();
        let m2 = interpret_with_schedule(&d, Schedule::Sequential).unwrap();
        assert!(m1.approx_eq(&m2, 1e-12));
    }

    #[test]
    fn colour_change_consistency() {
        // X spider = H tensor ... H . Z . H ... H for a 1 -> 2 spider.
        let alpha = 2.1;
        let x = Diagram::from_generator(
            NodeKind::x(Phase::radians(alpha)),
            1,
            2,
            Calculus::Zx,
            2,
        )
        .unwrap();
        let mx = interpret(&x).unwrap();
        let z = Diagram::from_generator(
            NodeKind::z(Phase::radians(alpha)),
            1,
            2,
            Calculus::Zx,
            2,
        )
        .unwrap();
        let h = Diagram::from_generator(NodeKind::hadamard(), 1, 1, Calculus::Zx, 2).unwrap();
        let hh = h.compose_par(&h).unwrap();
        let hzh = h.compose_seq(&z).unwrap().compose_seq(&hh).unwrap();
        let mz = interpret(&hzh).unwrap();
        assert!(mx.approx_eq(&mz, 1e-12));
    }

    #[test]
    fn qutrit_h_is_dft() {
        let m = generator_matrix(&NodeKind::Hadamard { power: 1 }, 1, 1, 3).unwrap();
        let s = 1.0 / libm::sqrt(3.0);
        for j in 0..3 {
            for k in 0..3 {
                let expect = Complex::from_polar(
                    s,
                    2.0 * core::f64::consts::PI * (j * k) as f64 / 3.0,
                );
                assert!((m[(j, k)] - expect).norm() < 1e-12);
            }
        }
        // H^4 = identity.
        let m4 = generator_matrix(&NodeKind::Hadamard { power: 0 }, 1, 1, 3).unwrap();
        assert!(m4.approx_eq(&Matrix::identity(3), 1e-12));
    }

    #[test]
    fn qutrit_x_spider_orientation() {
        // 1 -> 1 qutrit X spider with zero phases is the identity.
        let d = Diagram::from_generator(NodeKind::x3(0, 0), 1, 1, Calculus::Zx, 3).unwrap();
        let m = interpret(&d).unwrap();
        assert!(m.approx_eq(&Matrix::identity(3), 1e-12));
    }

    #[test]
    fn exact_interpretation_agrees_with_float() {
        let mut d = Diagram::zx(1, 1);
        let a = d.add_node(NodeKind::z(Phase::quarter(1)));
        let h = d.add_node(NodeKind::hadamard());
        let t = d.add_node(NodeKind::Triangle { inverse: false });
        let l = d.add_node(NodeKind::LambdaBox {
            lambda: Lambda::Dyadic(crate::num::Dyadic::new(3, 1)),
        });
        d.add_edge(Endpoint::input(0), Endpoint::node(a));
        d.add_edge(Endpoint::node(a), Endpoint::Port { node: h, port: 0 });
        d.add_edge(Endpoint::Port { node: h, port: 1 }, Endpoint::Port { node: t, port: 0 });
        d.add_edge(Endpoint::Port { node: t, port: 1 }, Endpoint::Port { node: l, port: 0 });
        d.add_edge(Endpoint::Port { node: l, port: 1 }, Endpoint::output(0));
        let exact = interpret_exact(&d).unwrap();
        let float = interpret(&d).unwrap();
        assert!(exact.to_complex().approx_eq(&float, 1e-12));
    }

    #[test]
    fn scalar_equivalence_of_interpretations() {
        let h1 = Diagram::from_generator(NodeKind::hadamard(), 1, 1, Calculus::Zx, 2).unwrap();
        let m1 = interpret(&h1).unwrap();
        let m2 = m1.scale(c(0.0, 3.0));
        let r = scalar_equiv(&m2, &m1, TOL).unwrap().unwrap();
        assert!((r - c(0.0, 3.0)).norm() < 1e-9);
    }
}
