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

//! Qutrit stabilizer engine.
//!
//! Enumerates the 216 single-qutrit local Clifford operators with their
//! unique normal forms, maintains stabilizer states as weighted graph
//! states with local Clifford vertex operators (GS-LC form), implements
//! the graph transformations `*_a v` (a-local complementation) and
//! `o_b v` (vertex scaling) together with their vertex-operator
//! corrections, reduces GS-LC diagrams to the reduced (rGS-LC) form, and
//! decides equality of stabilizer states by comparing simplified pairs.
//!
//! All equalities in this module are projective (up to a nonzero global
//! scalar); vertex operators are stored as indices into the enumerated
//! Clifford table rather than as matrices.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use alloc::{format, string::String, vec};

use crate::num::{scalar_equiv, Complex, Matrix};

/// A pair `(a, b)` of Z_3 labels denoting the phase angles
/// `(2 pi / 3) a` over `(2 pi / 3) b` of a qutrit spider.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Z3Pair {
    pub a: u8,
    pub b: u8,
}

impl Z3Pair {
    pub fn new(a: i64, b: i64) -> Z3Pair {
        Z3Pair {
            a: a.rem_euclid(3) as u8,
            b: b.rem_euclid(3) as u8,
        }
    }

    pub fn add(self, other: Z3Pair) -> Z3Pair {
        Z3Pair::new(
            self.a as i64 + other.a as i64,
            self.b as i64 + other.b as i64,
        )
    }

    /// Membership in `P = {(1,1), (2,2)}`.
    pub fn in_p(self) -> bool {
        self.a == self.b && self.a != 0
    }

    /// Membership in `M = {(0,0), (1,2), (2,1)}`.
    pub fn in_m(self) -> bool {
        (self.a + self.b) % 3 == 0
    }

    /// Membership in `N` (the four mixed pairs).
    pub fn in_n(self) -> bool {
        !self.in_p() && !self.in_m()
    }

    /// Membership in `Q = P u N`.
    pub fn in_q(self) -> bool {
        !self.in_m()
    }

    pub const ZERO: Z3Pair = Z3Pair { a: 0, b: 0 };

    pub fn all() -> [Z3Pair; 9] {
        let mut out = [Z3Pair::ZERO; 9];
        for a in 0..3u8 {
            for b in 0..3u8 {
                out[(a * 3 + b) as usize] = Z3Pair { a, b };
            }
        }
        out
    }

    pub fn p_set() -> [Z3Pair; 2] {
        [Z3Pair { a: 1, b: 1 }, Z3Pair { a: 2, b: 2 }]
    }

    pub fn m_set() -> [Z3Pair; 3] {
        [
            Z3Pair { a: 0, b: 0 },
            Z3Pair { a: 1, b: 2 },
            Z3Pair { a: 2, b: 1 },
        ]
    }
}

/// The unique normal form of a single-qutrit Clifford operator. Gates are
/// listed top to bottom (`top` applied first); the matrix of each form is
/// the product of its factors in reverse order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum C1NormalForm {
    /// `X(bottom) . Z(top)` with both pairs in `A`. 81 elements.
    Form1 { top: Z3Pair, bottom: Z3Pair },
    /// `Z(bottom) . X(mid) . Z(top)` with `top in A`, `mid in P`,
    /// `bottom in Q`. 108 elements.
    Form2 {
        top: Z3Pair,
        mid: Z3Pair,
        bottom: Z3Pair,
    },
    /// `X(bottom) . H^2 . Z(top)` with `top in A`, `bottom in M`.
    /// 27 elements.
    Form3 { top: Z3Pair, bottom: Z3Pair },
}

/// Index of a projective class in the enumerated Clifford table.
pub type ClassId = u16;

fn omega3() -> Complex {
    Complex::new(-0.5, 0.866_025_403_784_438_6)
}

fn w3pow(k: i64) -> Complex {
    match k.rem_euclid(3) {
        0 => Complex::new(1.0, 0.0),
        1 => omega3(),
        _ => omega3().conj(),
    }
}

/// 3x3 matrix of the Z phase gate `diag(1, w^a, w^b)`.
pub fn z_phase_matrix(p: Z3Pair) -> Matrix {
    let mut m = Matrix::zeros(3, 3);
    m[(0, 0)] = Complex::new(1.0, 0.0);
    m[(1, 1)] = w3pow(p.a as i64);
    m[(2, 2)] = w3pow(p.b as i64);
    m
}

/// The qutrit Hadamard `(1/sqrt 3) w^{jk}`.
pub fn h_matrix() -> Matrix {
    let s = 1.0 / libm::sqrt(3.0);
    let mut m = Matrix::zeros(3, 3);
    for j in 0..3 {
        for k in 0..3 {
            m[(j, k)] = w3pow((j * k) as i64).scale(s);
        }
    }
    m
}

/// The X phase gate `H Z(p) H^dagger`.
pub fn x_phase_matrix(p: Z3Pair) -> Matrix {
    let h = h_matrix();
    h.mul(&z_phase_matrix(p))
        .unwrap()
        .mul(&h.dagger())
        .unwrap()
}

fn mat_key(m: &Matrix) -> Vec<(i64, i64)> {
    // Projective fingerprint: normalize by the first entry of modulus
    // above threshold, then quantize.
    let mut pivot = Complex::new(0.0, 0.0);
    for e in m.entries() {
        if e.norm() > 1e-9 {
            pivot = *e;
            break;
        }
    }
    m.entries()
        .iter()
        .map(|e| {
            let z = e / pivot;
            (
                libm::round(z.re * 1e6) as i64,
                libm::round(z.im * 1e6) as i64,
            )
        })
        .collect()
}

/// The enumerated single-qutrit Clifford group modulo global phase,
/// with multiplication table and unique normal forms.
pub struct CliffordTable {
    mats: Vec<Matrix>,
    key_to_id: BTreeMap<Vec<(i64, i64)>, ClassId>,
    mul: Vec<ClassId>,
    forms: Vec<C1NormalForm>,
    /// Decomposition `U ~ Z(pair) . X^shift` for the 27 classes that push
    /// through controlled-Z edges; `None` otherwise.
    diag_shift: Vec<Option<(Z3Pair, u8)>>,
    r_part: Vec<Option<(Option<Z3Pair>, Z3Pair)>>,
    pub id: ClassId,
    pub s_gate: ClassId,
    pub h_gate: ClassId,
    pub h_dagger: ClassId,
    pub h_square: ClassId,
    z_class: BTreeMap<Z3Pair, ClassId>,
    x_class: BTreeMap<Z3Pair, ClassId>,
    /// `U |+>` is the basis state `|j>`: `Some(j)`.
    basis_state: Vec<Option<u8>>,
    /// `U |+> ~ Z(a) |+>`: `Some(a)`.
    green_state: Vec<Option<Z3Pair>>,
}

impl CliffordTable {
    pub fn mat(&self, c: ClassId) -> &Matrix {
        &self.mats[c as usize]
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn class_of(&self, m: &Matrix) -> Option<ClassId> {
        self.key_to_id.get(&mat_key(m)).copied()
    }

    /// Class of the product `g . h` (apply `h` first).
    pub fn compose(&self, g: ClassId, h: ClassId) -> ClassId {
        self.mul[g as usize * 216 + h as usize]
    }

    pub fn form(&self, c: ClassId) -> &C1NormalForm {
        &self.forms[c as usize]
    }

    pub fn forms(&self) -> impl Iterator<Item = (ClassId, &C1NormalForm)> {
        self.forms
            .iter()
            .enumerate()
            .map(|(i, f)| (i as ClassId, f))
    }

    pub fn z_of(&self, p: Z3Pair) -> ClassId {
        self.z_class[&p]
    }

    pub fn x_of(&self, p: Z3Pair) -> ClassId {
        self.x_class[&p]
    }

    /// The Pauli `X^s` (shift by `s`).
    pub fn x_shift(&self, s: u8) -> ClassId {
        match s % 3 {
            0 => self.id,
            1 => self.x_of(Z3Pair::new(2, 1)),
            _ => self.x_of(Z3Pair::new(1, 2)),
        }
    }

    /// The Pauli `Z^k = diag(1, w^k, w^{2k})`.
    pub fn z_pauli(&self, k: u8) -> ClassId {
        self.z_of(Z3Pair::new(k as i64, 2 * k as i64))
    }

    /// `U ~ Z(pair) . X^shift` when the class is in the pushable set.
    pub fn as_diag_shift(&self, c: ClassId) -> Option<(Z3Pair, u8)> {
        self.diag_shift[c as usize]
    }

    /// Class of the inverse element.
    pub fn inverse(&self, c: ClassId) -> ClassId {
        for x in 0..(self.len() as ClassId) {
            if self.compose(c, x) == self.id {
                return x;
            }
        }
        unreachable!("group closure")
    }

    pub fn basis_state_of(&self, c: ClassId) -> Option<u8> {
        self.basis_state[c as usize]
    }

    pub fn green_state_of(&self, c: ClassId) -> Option<Z3Pair> {
        self.green_state[c as usize]
    }

    /// Whether the class is one of the 15 allowed rGS-LC vertex
    /// operators, and if so its red and green parts. Green-only
    /// operators report `(None, a)`; red ones `(Some(p), q)` with
    /// `q - p` in `M`.
    pub fn r_membership(&self, c: ClassId) -> Option<(Option<Z3Pair>, Z3Pair)> {
        self.r_part[c as usize]
    }

    pub fn has_red(&self, c: ClassId) -> bool {
        matches!(self.r_membership(c), Some((Some(_), _)))
    }
}

/// Enumerate the local Clifford group: closure of `{S, H}` under
/// multiplication modulo global phase, together with normal forms.
pub fn enumerate_c1() -> CliffordTable {
    let h = h_matrix();
    let s = z_phase_matrix(Z3Pair::new(0, 1));
    let mut mats: Vec<Matrix> = vec![Matrix::identity(3)];
    let mut key_to_id: BTreeMap<Vec<(i64, i64)>, ClassId> = BTreeMap::new();
    key_to_id.insert(mat_key(&mats[0]), 0);
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for g in [&s, &h] {
            let m = g.mul(&mats[i]).unwrap();
            let k = mat_key(&m);
            if !key_to_id.contains_key(&k) {
                let id = mats.len() as ClassId;
                key_to_id.insert(k, id);
                mats.push(m);
                frontier.push(id as usize);
            }
        }
    }
    let n = mats.len();
    assert_eq!(n, 216, "local Clifford group order");

    let mut mul = vec![0 as ClassId; n * n];
    for g in 0..n {
        for hh in 0..n {
            let m = mats[g].mul(&mats[hh]).unwrap();
            mul[g * n + hh] = key_to_id[&mat_key(&m)];
        }
    }

    // Assign forms by matrix matching; the three shapes partition the
    // group 81 + 108 + 27.
    let mut forms: Vec<Option<C1NormalForm>> = vec![None; n];
    let h2 = h.mul(&h).unwrap();
    for top in Z3Pair::all() {
        for bottom in Z3Pair::all() {
            let m = x_phase_matrix(bottom).mul(&z_phase_matrix(top)).unwrap();
            let id = key_to_id[&mat_key(&m)] as usize;
            debug_assert!(forms[id].is_none());
            forms[id] = Some(C1NormalForm::Form1 { top, bottom });
        }
    }
    for top in Z3Pair::all() {
        for mid in Z3Pair::p_set() {
            for bottom in Z3Pair::all() {
                if !bottom.in_q() {
                    continue;
                }
                let m = z_phase_matrix(bottom)
                    .mul(&x_phase_matrix(mid))
                    .unwrap()
                    .mul(&z_phase_matrix(top))
                    .unwrap();
                let id = key_to_id[&mat_key(&m)] as usize;
                debug_assert!(forms[id].is_none());
                forms[id] = Some(C1NormalForm::Form2 { top, mid, bottom });
            }
        }
    }
    for top in Z3Pair::all() {
        for bottom in Z3Pair::m_set() {
            let m = x_phase_matrix(bottom)
                .mul(&h2)
                .unwrap()
                .mul(&z_phase_matrix(top))
                .unwrap();
            let id = key_to_id[&mat_key(&m)] as usize;
            debug_assert!(forms[id].is_none());
            forms[id] = Some(C1NormalForm::Form3 { top, bottom });
        }
    }
    let forms: Vec<C1NormalForm> = forms.into_iter().map(|f| f.expect("covering")).collect();

    let mut z_class = BTreeMap::new();
    let mut x_class = BTreeMap::new();
    for p in Z3Pair::all() {
        z_class.insert(p, key_to_id[&mat_key(&z_phase_matrix(p))]);
        x_class.insert(p, key_to_id[&mat_key(&x_phase_matrix(p))]);
    }

    // Pushable decomposition U ~ Z(pair) . X^shift.
    let mut diag_shift = vec![None; n];
    let shift1 = x_class[&Z3Pair::new(2, 1)];
    for pair in Z3Pair::all() {
        for sh in 0..3u8 {
            let mut c = z_class[&pair];
            for _ in 0..sh {
                c = mul[c as usize * n + shift1 as usize];
            }
            diag_shift[c as usize] = Some((pair, sh));
        }
    }

    // rGS-LC operator set R: 9 green classes and 6 red ones.
    let mut r_part: Vec<Option<(Option<Z3Pair>, Z3Pair)>> = vec![None; n];
    for a in Z3Pair::all() {
        r_part[z_class[&a] as usize] = Some((None, a));
    }
    for p in Z3Pair::p_set() {
        for m in Z3Pair::m_set() {
            let q = p.add(m);
            let cls = mul[x_class[&p] as usize * n + z_class[&q] as usize];
            r_part[cls as usize] = Some((Some(p), q));
        }
    }

    // Single-vertex states U |+>.
    let plus = {
        let s3 = 1.0 / libm::sqrt(3.0);
        Matrix::column(&[
            Complex::new(s3, 0.0),
            Complex::new(s3, 0.0),
            Complex::new(s3, 0.0),
        ])
    };
    let mut basis_state = vec![None; n];
    let mut green_state = vec![None; n];
    for (i, m) in mats.iter().enumerate() {
        let st = m.mul(&plus).unwrap();
        for j in 0..3 {
            let mut basis = Matrix::zeros(3, 1);
            basis[(j, 0)] = Complex::new(1.0, 0.0);
            if scalar_equiv(&st, &basis, 1e-9).unwrap().is_some() {
                basis_state[i] = Some(j as u8);
            }
        }
        for a in Z3Pair::all() {
            let g = z_phase_matrix(a).mul(&plus).unwrap();
            if scalar_equiv(&st, &g, 1e-9).unwrap().is_some() {
                green_state[i] = Some(a);
            }
        }
    }

    let id = key_to_id[&mat_key(&Matrix::identity(3))];
    let s_gate = key_to_id[&mat_key(&s)];
    let h_gate = key_to_id[&mat_key(&h)];
    let h_dagger = key_to_id[&mat_key(&h.dagger())];
    let h_square = key_to_id[&mat_key(&h2)];

    CliffordTable {
        mats,
        key_to_id,
        mul,
        forms,
        diag_shift,
        r_part,
        id,
        s_gate,
        h_gate,
        h_dagger,
        h_square,
        z_class,
        x_class,
        basis_state,
        green_state,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QutritError {
    VertexOutOfRange,
    ZeroScale,
    VertexCountMismatch,
    TooLarge,
    ReductionFailed(String),
}

/// Z_3-weighted graph: symmetric adjacency matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightedGraph {
    n: usize,
    gamma: Vec<u8>,
}

impl WeightedGraph {
    pub fn empty(n: usize) -> WeightedGraph {
        WeightedGraph {
            n,
            gamma: vec![0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> u8 {
        self.gamma[i * self.n + j]
    }

    pub fn set_weight(&mut self, i: usize, j: usize, w: u8) {
        assert!(i != j, "zero diagonal");
        self.gamma[i * self.n + j] = w % 3;
        self.gamma[j * self.n + i] = w % 3;
    }

    pub fn add_weight(&mut self, i: usize, j: usize, w: u8) {
        if i != j {
            let cur = self.weight(i, j);
            self.set_weight(i, j, (cur + w) % 3);
        }
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&u| u != v && self.weight(v, u) != 0)
            .collect()
    }

    fn push_vertex(&mut self) -> usize {
        let n = self.n;
        let mut g = vec![0u8; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                g[i * (n + 1) + j] = self.gamma[i * n + j];
            }
        }
        self.gamma = g;
        self.n = n + 1;
        n
    }

    fn remove_vertex(&mut self, v: usize) {
        let n = self.n;
        let mut g = vec![0u8; (n - 1) * (n - 1)];
        let map = |i: usize| if i < v { i } else { i - 1 };
        for i in 0..n {
            if i == v {
                continue;
            }
            for j in 0..n {
                if j == v {
                    continue;
                }
                g[map(i) * (n - 1) + map(j)] = self.gamma[i * n + j];
            }
        }
        self.gamma = g;
        self.n = n - 1;
    }
}

/// `a`-local complementation at `v`: `G'_{jk} = G_{jk} + a G_{vj} G_{vk}`
/// (mod 3) for `j != k`, zero diagonal.
pub fn local_comp(g: &WeightedGraph, v: usize, a: u8) -> Result<WeightedGraph, QutritError> {
    if v >= g.n {
        return Err(QutritError::VertexOutOfRange);
    }
    let mut out = g.clone();
    for j in 0..g.n {
        for k in 0..g.n {
            if j != k {
                let w = (g.weight(j, k) + a * g.weight(v, j) * g.weight(v, k)) % 3;
                out.gamma[j * g.n + k] = w;
            }
        }
    }
    Ok(out)
}

/// `o_b v`: multiply row and column `v` by `b` (mod 3), `b` nonzero.
pub fn scale_vertex(g: &WeightedGraph, v: usize, b: u8) -> Result<WeightedGraph, QutritError> {
    if v >= g.n {
        return Err(QutritError::VertexOutOfRange);
    }
    if b % 3 == 0 {
        return Err(QutritError::ZeroScale);
    }
    let mut out = g.clone();
    for k in 0..g.n {
        if k != v {
            let w = (g.weight(v, k) * b) % 3;
            out.gamma[v * g.n + k] = w;
            out.gamma[k * g.n + v] = w;
        }
    }
    Ok(out)
}

/// Normalized state vector of the graph state, dimension `3^n` (vertex 0
/// is the most significant trit).
pub fn graph_state_vector(g: &WeightedGraph) -> Result<Matrix, QutritError> {
    if g.n > 10 {
        return Err(QutritError::TooLarge);
    }
    let dim = 3usize.pow(g.n as u32);
    let amp = 1.0 / libm::pow(libm::sqrt(3.0), g.n as f64);
    let mut v = Matrix::zeros(dim, 1);
    for idx in 0..dim {
        let mut digits = [0u8; 10];
        let mut x = idx;
        for k in (0..g.n).rev() {
            digits[k] = (x % 3) as u8;
            x /= 3;
        }
        let mut w = 0i64;
        for i in 0..g.n {
            for j in (i + 1)..g.n {
                w += g.weight(i, j) as i64 * digits[i] as i64 * digits[j] as i64;
            }
        }
        v[(idx, 0)] = w3pow(w).scale(amp);
    }
    Ok(v)
}

/// Graph state with a local Clifford operator on each output.
#[derive(Clone, Debug, PartialEq)]
pub struct GslcDiagram {
    pub graph: WeightedGraph,
    pub ops: Vec<ClassId>,
}

impl GslcDiagram {
    pub fn new(graph: WeightedGraph, ops: Vec<ClassId>) -> GslcDiagram {
        assert_eq!(graph.n(), ops.len());
        GslcDiagram { graph, ops }
    }

    /// Graph state of `n` vertices with identity operators.
    pub fn plus_states(table: &CliffordTable, n: usize) -> GslcDiagram {
        GslcDiagram {
            graph: WeightedGraph::empty(n),
            ops: vec![table.id; n],
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Dense state vector (for the oracle and tests).
    pub fn state_vector(&self, table: &CliffordTable) -> Result<Matrix, QutritError> {
        let base = graph_state_vector(&self.graph)?;
        let n = self.n();
        let dim = 3usize.pow(n as u32);
        let mut out = Matrix::zeros(dim, 1);
        if n == 0 {
            out[(0, 0)] = base[(0, 0)];
            return Ok(out);
        }
        for idx in 0..dim {
            let mut digits = vec![0u8; n];
            let mut x = idx;
            for k in (0..n).rev() {
                digits[k] = (x % 3) as u8;
                x /= 3;
            }
            let mut acc = Complex::new(0.0, 0.0);
            let mut src = vec![0u8; n];
            loop {
                let mut coeff = Complex::new(1.0, 0.0);
                for v in 0..n {
                    coeff *= table.mat(self.ops[v])[(digits[v] as usize, src[v] as usize)];
                }
                let mut sidx = 0usize;
                for s in src.iter() {
                    sidx = sidx * 3 + *s as usize;
                }
                acc += coeff * base[(sidx, 0)];
                let mut k = n;
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    src[k] += 1;
                    if src[k] < 3 {
                        done = false;
                        break;
                    }
                    src[k] = 0;
                }
                if done {
                    break;
                }
            }
            out[(idx, 0)] = acc;
        }
        Ok(out)
    }
}

/// Either a GS-LC diagram or the zero state (arising only from
/// post-selected basis effects).
#[derive(Clone, Debug, PartialEq)]
pub enum StateOrZero {
    State(GslcDiagram),
    Zero { n: usize },
}

impl StateOrZero {
    pub fn n(&self) -> usize {
        match self {
            StateOrZero::State(d) => d.n(),
            StateOrZero::Zero { n } => *n,
        }
    }
}

/// Clifford generators acting on GS-LC diagrams.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CliffordGate {
    /// S gate at a vertex.
    S(usize),
    /// Hadamard at a vertex.
    H(usize),
    /// Any single-qutrit Clifford class at a vertex.
    Local(usize, ClassId),
    /// SUM (controlled-X) gate: control, target.
    Sum(usize, usize),
    /// Controlled-Z-type edge gate with weight 1 or 2.
    Cz(usize, usize, u8),
    /// Prepare a fresh `|0>` qutrit (appends a vertex).
    PrepZero,
    /// Post-selected computational-basis effect `<q|` at a vertex
    /// (removes it).
    BasisEffect(usize, u8),
}

/// Apply `*_a v` to a GS-LC diagram, adjusting vertex operators so that
/// the represented state is unchanged up to a global scalar: the graph
/// becomes `G *_a v`, `v` gains an X phase and its neighbours gain the
/// matching Z phases.
pub fn apply_local_comp_with_corrections(
    table: &CliffordTable,
    d: &GslcDiagram,
    v: usize,
    a: u8,
) -> Result<GslcDiagram, QutritError> {
    if v >= d.n() {
        return Err(QutritError::VertexOutOfRange);
    }
    let a = a % 3;
    if a == 0 {
        return Ok(d.clone());
    }
    let (x_corr, z_corr) = if a == 1 {
        (Z3Pair::new(1, 1), Z3Pair::new(2, 2))
    } else {
        (Z3Pair::new(2, 2), Z3Pair::new(1, 1))
    };
    let mut out = d.clone();
    let nbrs = d.graph.neighbours(v);
    out.graph = local_comp(&d.graph, v, a)?;
    out.ops[v] = table.compose(out.ops[v], table.x_of(x_corr));
    for u in nbrs {
        out.ops[u] = table.compose(out.ops[u], table.z_of(z_corr));
    }
    Ok(out)
}

/// Apply `o_2 v` with corrections: the graph becomes `G o_2 v` and `v`
/// absorbs a double Hadamard.
pub fn apply_scale_with_corrections(
    table: &CliffordTable,
    d: &GslcDiagram,
    v: usize,
) -> Result<GslcDiagram, QutritError> {
    if v >= d.n() {
        return Err(QutritError::VertexOutOfRange);
    }
    let mut out = d.clone();
    out.graph = scale_vertex(&d.graph, v, 2)?;
    out.ops[v] = table.compose(out.ops[v], table.h_square);
    Ok(out)
}

/// Absorb an `X^s` Pauli from the graph side of `v`'s vertex operator
/// into the graph: `op_v <- op_v . X^{-s}` and each neighbour `u` gains
/// a compensating Z Pauli.
fn absorb_pauli(table: &CliffordTable, d: &mut GslcDiagram, v: usize, s: u8) {
    let s = s % 3;
    if s == 0 {
        return;
    }
    // X^s_v |G> = prod_u Zp_u^{-s Gamma_uv} |G> (graph-state stabilizer).
    d.ops[v] = table.compose(d.ops[v], table.x_shift(3 - s));
    for u in d.graph.neighbours(v) {
        let w = d.graph.weight(v, u);
        let k = ((2 * s as u32 * w as u32) % 3) as u8;
        d.ops[u] = table.compose(d.ops[u], table.z_pauli(k));
    }
}

/// One reduction move at an operand vertex. The `StarNbr` moves apply a
/// local complementation to one of its neighbours, which composes a
/// Z(P) phase onto the operand's operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Star1,
    Star2,
    Double,
    Pauli1,
    Pauli2,
    StarNbr1,
    StarNbr2,
}

const LOCAL_MOVES: [Move; 5] = [
    Move::Star1,
    Move::Star2,
    Move::Double,
    Move::Pauli1,
    Move::Pauli2,
];

const ALL_MOVES: [Move; 7] = [
    Move::Star1,
    Move::Star2,
    Move::Double,
    Move::Pauli1,
    Move::Pauli2,
    Move::StarNbr1,
    Move::StarNbr2,
];

fn move_right_factor(table: &CliffordTable, m: Move) -> ClassId {
    match m {
        Move::Star1 => table.x_of(Z3Pair::new(1, 1)),
        Move::Star2 => table.x_of(Z3Pair::new(2, 2)),
        Move::Double => table.h_square,
        Move::Pauli1 => table.x_shift(2),
        Move::Pauli2 => table.x_shift(1),
        Move::StarNbr1 => table.z_of(Z3Pair::new(2, 2)),
        Move::StarNbr2 => table.z_of(Z3Pair::new(1, 1)),
    }
}

fn apply_move(
    table: &CliffordTable,
    d: &mut GslcDiagram,
    v: usize,
    m: Move,
    avoid: Option<usize>,
) -> Result<(), QutritError> {
    match m {
        Move::Star1 => *d = apply_local_comp_with_corrections(table, d, v, 1)?,
        Move::Star2 => *d = apply_local_comp_with_corrections(table, d, v, 2)?,
        Move::Double => *d = apply_scale_with_corrections(table, d, v)?,
        Move::Pauli1 => absorb_pauli(table, d, v, 1),
        Move::Pauli2 => absorb_pauli(table, d, v, 2),
        Move::StarNbr1 | Move::StarNbr2 => {
            // Any neighbour supplies the same right factor on v; prefer
            // one whose own operator we are not trying to protect.
            let nbrs = d.graph.neighbours(v);
            let u = nbrs
                .iter()
                .find(|u| Some(**u) != avoid)
                .or_else(|| nbrs.first())
                .copied()
                .ok_or_else(|| QutritError::ReductionFailed("no neighbour".into()))?;
            let a = if m == Move::StarNbr1 { 1 } else { 2 };
            *d = apply_local_comp_with_corrections(table, d, u, a)?;
        }
    }
    Ok(())
}

/// Shortest word of reduction moves whose right factors bring `c` into
/// `target`.
fn reduction_word(
    table: &CliffordTable,
    c: ClassId,
    with_neighbour_moves: bool,
    target: impl Fn(ClassId) -> bool,
) -> Option<Vec<Move>> {
    if target(c) {
        return Some(Vec::new());
    }
    let moves: &[Move] = if with_neighbour_moves {
        &ALL_MOVES
    } else {
        &LOCAL_MOVES
    };
    let mut prev: BTreeMap<ClassId, (ClassId, Move)> = BTreeMap::new();
    let mut frontier = vec![c];
    prev.insert(c, (c, Move::Star1));
    loop {
        let mut next = Vec::new();
        for &u in &frontier {
            for &m in moves {
                let nu = table.compose(u, move_right_factor(table, m));
                if let alloc::collections::btree_map::Entry::Vacant(e) = prev.entry(nu) {
                    e.insert((u, m));
                    if target(nu) {
                        let mut word = vec![m];
                        let mut cur = u;
                        while cur != c {
                            let (p, pm) = prev[&cur];
                            word.push(pm);
                            cur = p;
                        }
                        word.reverse();
                        return Some(word);
                    }
                    next.push(nu);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        frontier = next;
    }
}

/// Bring `v`'s operator into the target set. Words over vertex-local
/// moves are preferred; neighbour moves (which compose an X phase onto
/// the neighbour's operator) are used only when allowed and necessary.
fn reduce_vertex(
    table: &CliffordTable,
    d: &mut GslcDiagram,
    v: usize,
    allow_neighbour_moves: bool,
    target: impl Fn(ClassId) -> bool,
) -> Result<(), QutritError> {
    reduce_vertex_avoiding(table, d, v, allow_neighbour_moves, None, target)
}

/// As [`reduce_vertex`], preferring not to disturb `avoid` with
/// neighbour moves.
fn reduce_vertex_avoiding(
    table: &CliffordTable,
    d: &mut GslcDiagram,
    v: usize,
    allow_neighbour_moves: bool,
    avoid: Option<usize>,
    target: impl Fn(ClassId) -> bool,
) -> Result<(), QutritError> {
    let with_nbr = allow_neighbour_moves && !d.graph.neighbours(v).is_empty();
    let word = reduction_word(table, d.ops[v], false, &target)
        .or_else(|| {
            if with_nbr {
                reduction_word(table, d.ops[v], true, &target)
            } else {
                None
            }
        })
        .ok_or_else(|| QutritError::ReductionFailed(format!("vertex {}", v)))?;
    for m in word {
        apply_move(table, d, v, m, avoid)?;
    }
    Ok(())
}

/// Apply one Clifford generator, keeping the state in GS-LC form.
pub fn apply_clifford_generator(
    table: &CliffordTable,
    state: &StateOrZero,
    gate: CliffordGate,
) -> Result<StateOrZero, QutritError> {
    let d = match state {
        StateOrZero::Zero { n } => {
            let n = match gate {
                CliffordGate::PrepZero => n + 1,
                CliffordGate::BasisEffect(v, _) => {
                    if v >= *n {
                        return Err(QutritError::VertexOutOfRange);
                    }
                    n - 1
                }
                _ => *n,
            };
            return Ok(StateOrZero::Zero { n });
        }
        StateOrZero::State(d) => d,
    };
    match gate {
        CliffordGate::S(v) => {
            check_vertex(d, v)?;
            let mut out = d.clone();
            out.ops[v] = table.compose(table.s_gate, out.ops[v]);
            Ok(StateOrZero::State(out))
        }
        CliffordGate::H(v) => {
            check_vertex(d, v)?;
            let mut out = d.clone();
            out.ops[v] = table.compose(table.h_gate, out.ops[v]);
            Ok(StateOrZero::State(out))
        }
        CliffordGate::Local(v, c) => {
            check_vertex(d, v)?;
            let mut out = d.clone();
            out.ops[v] = table.compose(c, out.ops[v]);
            Ok(StateOrZero::State(out))
        }
        CliffordGate::PrepZero => {
            let mut out = d.clone();
            out.graph.push_vertex();
            out.ops.push(table.h_dagger);
            Ok(StateOrZero::State(out))
        }
        CliffordGate::Sum(c, t) => {
            check_vertex(d, c)?;
            check_vertex(d, t)?;
            if c == t {
                return Err(QutritError::VertexOutOfRange);
            }
            // SUM = (I (x) H^dagger) CZ (I (x) H).
            let mut out = d.clone();
            out.ops[t] = table.compose(table.h_gate, out.ops[t]);
            let mut st = apply_cz(table, &out, c, t, 1)?;
            st.ops[t] = table.compose(table.h_dagger, st.ops[t]);
            Ok(StateOrZero::State(st))
        }
        CliffordGate::Cz(a, b, w) => {
            check_vertex(d, a)?;
            check_vertex(d, b)?;
            if a == b || w % 3 == 0 {
                return Err(QutritError::VertexOutOfRange);
            }
            Ok(StateOrZero::State(apply_cz(table, d, a, b, w % 3)?))
        }
        CliffordGate::BasisEffect(v, q) => {
            check_vertex(d, v)?;
            apply_basis_effect(table, d, v, q % 3)
        }
    }
}

fn check_vertex(d: &GslcDiagram, v: usize) -> Result<(), QutritError> {
    if v >= d.n() {
        Err(QutritError::VertexOutOfRange)
    } else {
        Ok(())
    }
}

/// Apply `CZ^w` between vertices `a` and `b`, restoring GS-LC form.
fn apply_cz(
    table: &CliffordTable,
    d: &GslcDiagram,
    a: usize,
    b: usize,
    w: u8,
) -> Result<GslcDiagram, QutritError> {
    let mut out = d.clone();
    // A vertex whose state is a computational basis state |j> turns the
    // CZ edge into a plain Z phase on the partner.
    if out.graph.neighbours(a).is_empty() {
        if let Some(j) = table.basis_state_of(out.ops[a]) {
            let k = (j as u32 * w as u32 % 3) as u8;
            out.ops[b] = table.compose(table.z_pauli(k), out.ops[b]);
            return Ok(out);
        }
        // Isolated non-basis states have an equivalent green operator.
        if let Some(g) = table.green_state_of(out.ops[a]) {
            out.ops[a] = table.z_of(g);
        }
    }
    if out.graph.neighbours(b).is_empty() {
        if let Some(j) = table.basis_state_of(out.ops[b]) {
            let k = (j as u32 * w as u32 % 3) as u8;
            out.ops[a] = table.compose(table.z_pauli(k), out.ops[a]);
            return Ok(out);
        }
        if let Some(g) = table.green_state_of(out.ops[b]) {
            out.ops[b] = table.z_of(g);
        }
    }
    // Bring both operators into the pushable set Z(pair) . X^shift.
    // Reducing one operand can compose phases onto the other when they
    // are adjacent; a few sequential passes settle most configurations.
    // Some states admit no presentation with both operators pushable at
    // all, so fall back to tableau resynthesis when the dance stalls.
    let pushable = |c: ClassId| table.as_diag_shift(c).is_some();
    for _ in 0..6 {
        if !pushable(out.ops[a]) {
            reduce_vertex_avoiding(table, &mut out, a, true, Some(b), pushable)?;
        }
        if !pushable(out.ops[b]) {
            reduce_vertex_avoiding(table, &mut out, b, true, Some(a), pushable)?;
        }
        if pushable(out.ops[a]) && pushable(out.ops[b]) {
            break;
        }
    }
    if !(pushable(out.ops[a]) && pushable(out.ops[b])) {
        return apply_cz_tableau(table, &out, a, b, w);
    }
    let (pa, sa) = table.as_diag_shift(out.ops[a]).unwrap();
    let (pb, sb) = table.as_diag_shift(out.ops[b]).unwrap();
    // CZ^w (X^sa (x) X^sb) = (X^sa Zp^{w sb} (x) Zp^{w sa} X^sb) CZ^w,
    // and Z parts commute with CZ. Rebuild the operators with the extra
    // Z Paulis on the graph side.
    let za = (w as u32 * sb as u32 % 3) as u8;
    let zb = (w as u32 * sa as u32 % 3) as u8;
    out.ops[a] = table.compose(
        table.compose(table.z_of(pa), table.x_shift(sa)),
        table.z_pauli(za),
    );
    out.ops[b] = table.compose(
        table.compose(table.z_of(pb), table.x_shift(sb)),
        table.z_pauli(zb),
    );
    out.graph.add_weight(a, b, w);
    Ok(out)
}

/// Post-selected `<q|` at `v`.
fn apply_basis_effect(
    table: &CliffordTable,
    d: &GslcDiagram,
    v: usize,
    q: u8,
) -> Result<StateOrZero, QutritError> {
    let mut out = d.clone();
    if out.graph.neighbours(v).is_empty() {
        // <q| U |+>: zero iff the state is a basis state distinct from q.
        let st = table
            .mat(out.ops[v])
            .mul(&Matrix::column(&[
                Complex::new(1.0, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(1.0, 0.0),
            ]))
            .unwrap();
        let amp = st[(q as usize, 0)];
        out.graph.remove_vertex(v);
        out.ops.remove(v);
        if amp.norm() < 1e-9 {
            return Ok(StateOrZero::Zero { n: out.n() });
        }
        return Ok(StateOrZero::State(out));
    }
    reduce_vertex(table, &mut out, v, true, |c| table.as_diag_shift(c).is_some())?;
    let (_, s) = table.as_diag_shift(out.ops[v]).unwrap();
    // <q| Z(pair) X^s = phase . <q - s|.
    let qq = ((q as i64 - s as i64).rem_euclid(3)) as u8;
    for u in out.graph.neighbours(v) {
        let k = (qq as u32 * out.graph.weight(v, u) as u32 % 3) as u8;
        out.ops[u] = table.compose(out.ops[u], table.z_pauli(k));
    }
    out.graph.remove_vertex(v);
    out.ops.remove(v);
    Ok(StateOrZero::State(out))
}

/// The canonical rGS-LC operator for each of the 12 single-qutrit
/// stabilizer states (used for isolated vertices).
fn canonical_isolated_op(table: &CliffordTable, c: ClassId) -> ClassId {
    if let Some(a) = table.green_state_of(c) {
        return table.z_of(a);
    }
    if let Some(j) = table.basis_state_of(c) {
        let p = Z3Pair::new(1, 1);
        for m in Z3Pair::m_set() {
            let q = p.add(m);
            let cand = table.compose(table.x_of(p), table.z_of(q));
            if table.basis_state_of(cand) == Some(j) {
                return cand;
            }
        }
    }
    unreachable!("single-qutrit stabilizer states are exhausted by 9 + 3")
}

/// Reduce a GS-LC diagram to reduced GS-LC form: all vertex operators in
/// the 15-element set `R`, no two adjacent vertices both carrying red
/// operators, and isolated vertices in canonical form.
pub fn to_rgslc(table: &CliffordTable, d: &GslcDiagram) -> Result<GslcDiagram, QutritError> {
    let mut out = d.clone();
    normalize_ops(table, &mut out)?;
    let n = out.n();
    let cap = 24 * (n * n + n + 8);
    let mut rounds = 0;
    loop {
        let mut pair = None;
        'search: for a in 0..n {
            if !table.has_red(out.ops[a]) {
                continue;
            }
            for b in out.graph.neighbours(a) {
                if table.has_red(out.ops[b]) {
                    pair = Some((a, b));
                    break 'search;
                }
            }
        }
        let (a, b) = match pair {
            None => break,
            Some(p) => p,
        };
        remove_red(table, &mut out, b, a)?;
        normalize_ops(table, &mut out)?;
        rounds += 1;
        if rounds > cap {
            return Err(QutritError::ReductionFailed(
                "red-red elimination did not settle".into(),
            ));
        }
    }
    Ok(out)
}

/// Bring every vertex operator into `R` (canonical form for isolated
/// vertices).
fn normalize_ops(table: &CliffordTable, d: &mut GslcDiagram) -> Result<(), QutritError> {
    let n = d.n();
    let cap = 24 * (n * n + n + 8);
    let mut rounds = 0;
    loop {
        let mut dirty = false;
        for v in 0..n {
            if d.graph.neighbours(v).is_empty() {
                let canon = canonical_isolated_op(table, d.ops[v]);
                if d.ops[v] != canon {
                    d.ops[v] = canon;
                }
            } else if table.r_membership(d.ops[v]).is_none() {
                reduce_vertex(table, d, v, false, |c| table.r_membership(c).is_some())?;
                dirty = true;
            }
        }
        if !dirty {
            return Ok(());
        }
        rounds += 1;
        if rounds > cap {
            return Err(QutritError::ReductionFailed(
                "operator normalization did not settle".into(),
            ));
        }
    }
}

/// Clear the red component from `v`'s operator; `v` must have a
/// neighbour (`partner` is used for the local complementations that
/// supply the missing right factors).
fn remove_red(
    table: &CliffordTable,
    d: &mut GslcDiagram,
    v: usize,
    partner: usize,
) -> Result<(), QutritError> {
    let green = |c: ClassId| matches!(table.r_membership(c), Some((None, _)));
    if green(d.ops[v]) {
        return Ok(());
    }
    if d.graph.weight(v, partner) == 0 {
        return Err(QutritError::ReductionFailed(
            "red removal partner not adjacent".into(),
        ));
    }
    // Breadth-first search over short move words at v and its partner.
    let mut frontier = vec![(d.clone(), ())];
    let mut seen = alloc::collections::BTreeSet::new();
    seen.insert((d.ops[v], d.ops[partner]));
    for _depth in 0..8 {
        let mut next = Vec::new();
        for (node, ()) in &frontier {
            for (site, m) in [
                (v, Move::Star1),
                (v, Move::Star2),
                (v, Move::Double),
                (v, Move::Pauli1),
                (v, Move::Pauli2),
                (partner, Move::Star1),
                (partner, Move::Star2),
            ] {
                let mut nd = node.clone();
                apply_move(table, &mut nd, site, m, None)?;
                if green(nd.ops[v]) {
                    *d = nd;
                    return Ok(());
                }
                if seen.insert((nd.ops[v], nd.ops[partner])) {
                    next.push((nd, ()));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Err(QutritError::ReductionFailed(
        "red removal search exhausted".into(),
    ))
}

/// Decide equality (up to a nonzero scalar) of two stabilizer states in
/// GS-LC form, by reduction to a simplified pair of rGS-LC diagrams and
/// structural comparison.
pub fn equal_states(
    table: &CliffordTable,
    d1: &StateOrZero,
    d2: &StateOrZero,
) -> Result<bool, QutritError> {
    if d1.n() != d2.n() {
        return Err(QutritError::VertexCountMismatch);
    }
    let (a, b) = match (d1, d2) {
        (StateOrZero::Zero { .. }, StateOrZero::Zero { .. }) => return Ok(true),
        (StateOrZero::Zero { .. }, _) | (_, StateOrZero::Zero { .. }) => return Ok(false),
        (StateOrZero::State(a), StateOrZero::State(b)) => (a, b),
    };
    let mut r1 = to_rgslc(table, a)?;
    let mut r2 = to_rgslc(table, b)?;
    // Simplify the pair: no vertex pair (x, y), adjacent in either graph,
    // may have a red operator on x in exactly one diagram and on y in
    // exactly the other.
    let n = r1.n();
    let cap = 8 * (n * n + 4);
    let mut rounds = 0;
    loop {
        let mut acted = false;
        'outer: for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                if r1.graph.weight(x, y) == 0 && r2.graph.weight(x, y) == 0 {
                    continue;
                }
                let red1x = table.has_red(r1.ops[x]);
                let red2x = table.has_red(r2.ops[x]);
                let red1y = table.has_red(r1.ops[y]);
                let red2y = table.has_red(r2.ops[y]);
                if red1x && !red2x && red2y && !red1y {
                    // Move the red toward the partner inside whichever
                    // diagram has the adjacency.
                    if r1.graph.weight(x, y) != 0 {
                        remove_red(table, &mut r1, x, y)?;
                        normalize_ops(table, &mut r1)?;
                        r1 = to_rgslc(table, &r1)?;
                    } else {
                        remove_red(table, &mut r2, y, x)?;
                        normalize_ops(table, &mut r2)?;
                        r2 = to_rgslc(table, &r2)?;
                    }
                    acted = true;
                    break 'outer;
                }
            }
        }
        if !acted {
            break;
        }
        rounds += 1;
        if rounds > cap {
            return Err(QutritError::ReductionFailed(
                "pair simplification did not settle".into(),
            ));
        }
    }
    Ok(r1.graph == r2.graph && r1.ops == r2.ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::TOL;
    use crate::rng::Rng;

    fn table() -> CliffordTable {
        enumerate_c1()
    }

    #[test]
    fn c1_order_and_partition() {
        let t = table();
        assert_eq!(t.len(), 216);
        let mut counts = [0usize; 3];
        for c in 0..216u16 {
            match t.form(c) {
                C1NormalForm::Form1 { .. } => counts[0] += 1,
                C1NormalForm::Form2 { .. } => counts[1] += 1,
                C1NormalForm::Form3 { .. } => counts[2] += 1,
            }
        }
        assert_eq!(counts, [81, 108, 27]);
    }

    #[test]
    fn identity_is_form1_zero() {
        let t = table();
        match t.form(t.id) {
            C1NormalForm::Form1 { top, bottom } => {
                assert_eq!(*top, Z3Pair::ZERO);
                assert_eq!(*bottom, Z3Pair::ZERO);
            }
            _ => panic!("identity should be Form1(0,0)"),
        }
    }

    #[test]
    fn local_comp_identity_at_zero() {
        let mut g = WeightedGraph::empty(3);
        g.set_weight(0, 1, 1);
        g.set_weight(1, 2, 1);
        let g2 = local_comp(&g, 1, 0).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn local_comp_path_gains_edge() {
        // Path 0-1-2 with weights 1: *_1 at vertex 1 adds edge {0,2}
        // with weight 1.
        let mut g = WeightedGraph::empty(3);
        g.set_weight(0, 1, 1);
        g.set_weight(1, 2, 1);
        let g2 = local_comp(&g, 1, 1).unwrap();
        assert_eq!(g2.weight(0, 2), 1);
        assert_eq!(g2.weight(0, 1), 1);
    }

    #[test]
    fn double_star_is_star2() {
        let mut rng = Rng::new(5);
        for _ in 0..20 {
            let n = 4;
            let mut g = WeightedGraph::empty(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    g.set_weight(i, j, (rng.below(3)) as u8);
                }
            }
            let v = rng.below(n as u64) as usize;
            let a = local_comp(&local_comp(&g, v, 1).unwrap(), v, 1).unwrap();
            let b = local_comp(&g, v, 2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn scale_vertex_involutive() {
        let mut g = WeightedGraph::empty(2);
        g.set_weight(0, 1, 1);
        let g2 = scale_vertex(&g, 0, 2).unwrap();
        assert_eq!(g2.weight(0, 1), 2);
        let g4 = scale_vertex(&g2, 0, 2).unwrap();
        assert_eq!(g, g4);
        assert_eq!(scale_vertex(&g, 0, 0), Err(QutritError::ZeroScale));
    }

    #[test]
    fn graph_state_small_cases() {
        let g = WeightedGraph::empty(1);
        let v = graph_state_vector(&g).unwrap();
        let s = 1.0 / libm::sqrt(3.0);
        for k in 0..3 {
            assert!((v[(k, 0)] - Complex::new(s, 0.0)).norm() < 1e-12);
        }
        let mut g = WeightedGraph::empty(2);
        g.set_weight(0, 1, 1);
        let v = graph_state_vector(&g).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expect = w3pow((j * k) as i64).scale(1.0 / 3.0);
                assert!((v[(3 * j + k, 0)] - expect).norm() < 1e-12);
            }
        }
    }

    fn random_gslc(t: &CliffordTable, rng: &mut Rng, n: usize) -> GslcDiagram {
        let mut g = WeightedGraph::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.set_weight(i, j, rng.below(3) as u8);
            }
        }
        let ops = (0..n).map(|_| rng.below(216) as ClassId).collect();
        GslcDiagram::new(g, ops)
    }

    #[test]
    fn local_comp_corrections_preserve_state() {
        let t = table();
        let mut rng = Rng::new(9);
        for _ in 0..30 {
            let n = 1 + rng.below(4) as usize;
            let d = random_gslc(&t, &mut rng, n);
            let v = rng.below(n as u64) as usize;
            let a = 1 + rng.below(2) as u8;
            let d2 = apply_local_comp_with_corrections(&t, &d, v, a).unwrap();
            let s1 = d.state_vector(&t).unwrap();
            let s2 = d2.state_vector(&t).unwrap();
            assert!(scalar_equiv(&s1, &s2, TOL).unwrap().is_some());
        }
    }

    #[test]
    fn scale_corrections_preserve_state() {
        let t = table();
        let mut rng = Rng::new(13);
        for _ in 0..20 {
            let n = 1 + rng.below(4) as usize;
            let d = random_gslc(&t, &mut rng, n);
            let v = rng.below(n as u64) as usize;
            let d2 = apply_scale_with_corrections(&t, &d, v).unwrap();
            let s1 = d.state_vector(&t).unwrap();
            let s2 = d2.state_vector(&t).unwrap();
            assert!(scalar_equiv(&s1, &s2, TOL).unwrap().is_some());
        }
    }

    #[test]
    fn pauli_absorption_preserves_state() {
        let t = table();
        let mut rng = Rng::new(17);
        for _ in 0..20 {
            let n = 2 + rng.below(3) as usize;
            let mut d = random_gslc(&t, &mut rng, n);
            let before = d.state_vector(&t).unwrap();
            let v = rng.below(n as u64) as usize;
            absorb_pauli(&t, &mut d, v, 1 + rng.below(2) as u8);
            let after = d.state_vector(&t).unwrap();
            assert!(scalar_equiv(&before, &after, TOL).unwrap().is_some());
        }
    }

    #[test]
    fn generators_match_oracle() {
        let t = table();
        let mut rng = Rng::new(23);
        for case in 0..40 {
            let n = 2 + rng.below(2) as usize;
            let d = random_gslc(&t, &mut rng, n);
            let before = d.state_vector(&t).unwrap();
            let gate = match case % 4 {
                0 => CliffordGate::S(rng.below(n as u64) as usize),
                1 => CliffordGate::H(rng.below(n as u64) as usize),
                2 => {
                    let c = rng.below(n as u64) as usize;
                    let tt = (c + 1 + rng.below((n - 1) as u64) as usize) % n;
                    CliffordGate::Sum(c, tt)
                }
                _ => {
                    let c = rng.below(n as u64) as usize;
                    let tt = (c + 1 + rng.below((n - 1) as u64) as usize) % n;
                    CliffordGate::Cz(c, tt, 1 + rng.below(2) as u8)
                }
            };
            let out = apply_clifford_generator(&t, &StateOrZero::State(d), gate).unwrap();
            let d2 = match out {
                StateOrZero::State(d2) => d2,
                StateOrZero::Zero { .. } => panic!("unitary gate cannot produce zero"),
            };
            let after = d2.state_vector(&t).unwrap();
            // Oracle: gate matrix times old state.
            let gm = gate_matrix(&t, n, gate);
            let expect = gm.mul(&before).unwrap();
            assert!(
                scalar_equiv(&after, &expect, TOL).unwrap().is_some(),
                "case {} gate {:?}",
                case,
                gate
            );
        }
    }

    fn gate_matrix(t: &CliffordTable, n: usize, gate: CliffordGate) -> Matrix {
        let dim = 3usize.pow(n as u32);
        let mut m = Matrix::zeros(dim, dim);
        let w = |k: i64| w3pow(k);
        match gate {
            CliffordGate::S(v) => {
                for idx in 0..dim {
                    let dv = (idx / 3usize.pow((n - 1 - v) as u32)) % 3;
                    m[(idx, idx)] = if dv == 2 { w(1) } else { Complex::new(1.0, 0.0) };
                }
            }
            CliffordGate::H(v) | CliffordGate::Local(v, _) => {
                let base = match gate {
                    CliffordGate::H(_) => h_matrix(),
                    CliffordGate::Local(_, c) => t.mat(c).clone(),
                    _ => unreachable!(),
                };
                for row in 0..dim {
                    for col in 0..dim {
                        let rv = (row / 3usize.pow((n - 1 - v) as u32)) % 3;
                        let cv = (col / 3usize.pow((n - 1 - v) as u32)) % 3;
                        let rrest = row - rv * 3usize.pow((n - 1 - v) as u32);
                        let crest = col - cv * 3usize.pow((n - 1 - v) as u32);
                        if rrest == crest {
                            m[(row, col)] = base[(rv, cv)];
                        }
                    }
                }
            }
            CliffordGate::Sum(c, tt) => {
                for col in 0..dim {
                    let dc = (col / 3usize.pow((n - 1 - c) as u32)) % 3;
                    let dt = (col / 3usize.pow((n - 1 - tt) as u32)) % 3;
                    let nt = (dt + dc) % 3;
                    let row = col - dt * 3usize.pow((n - 1 - tt) as u32)
                        + nt * 3usize.pow((n - 1 - tt) as u32);
                    m[(row, col)] = Complex::new(1.0, 0.0);
                }
            }
            CliffordGate::Cz(a, b, wt) => {
                for idx in 0..dim {
                    let da = (idx / 3usize.pow((n - 1 - a) as u32)) % 3;
                    let db = (idx / 3usize.pow((n - 1 - b) as u32)) % 3;
                    m[(idx, idx)] = w((da * db * wt as usize) as i64);
                }
            }
            _ => unreachable!(),
        }
        m
    }

    #[test]
    fn basis_effect_matches_oracle() {
        let t = table();
        let _ = &t;
        let mut rng = Rng::new(31);
        let mut zeros = 0;
        for _ in 0..30 {
            let n = 2 + rng.below(2) as usize;
            let d = random_gslc(&t, &mut rng, n);
            let before = d.state_vector(&t).unwrap();
            let v = rng.below(n as u64) as usize;
            let q = rng.below(3) as u8;
            let out =
                apply_clifford_generator(&t, &StateOrZero::State(d), CliffordGate::BasisEffect(v, q))
                    .unwrap();
            // Oracle: contract <q| at site v.
            let dim = 3usize.pow((n - 1) as u32);
            let mut expect = Matrix::zeros(dim, 1);
            for idx in 0..dim {
                // insert digit q at position v
                let hi = idx / 3usize.pow((n - 1 - v) as u32);
                let lo = idx % 3usize.pow((n - 1 - v) as u32);
                let full = hi * 3usize.pow((n - v) as u32)
                    + q as usize * 3usize.pow((n - 1 - v) as u32)
                    + lo;
                expect[(idx, 0)] = before[(full, 0)];
            }
            match out {
                StateOrZero::Zero { n: nn } => {
                    assert_eq!(nn, n - 1);
                    assert!(expect.max_norm() < 1e-9);
                    zeros += 1;
                }
                StateOrZero::State(d2) => {
                    let after = d2.state_vector(&t).unwrap();
                    assert!(scalar_equiv(&after, &expect, TOL).unwrap().is_some());
                }
            }
        }
        let _ = zeros;
    }

    #[test]
    fn rgslc_preserves_state_and_satisfies_conditions() {
        let t = table();
        let mut rng = Rng::new(37);
        for _ in 0..25 {
            let n = 1 + rng.below(4) as usize;
            let d = random_gslc(&t, &mut rng, n);
            let before = d.state_vector(&t).unwrap();
            let r = to_rgslc(&t, &d).unwrap();
            let after = r.state_vector(&t).unwrap();
            assert!(scalar_equiv(&before, &after, TOL).unwrap().is_some());
            for v in 0..n {
                assert!(t.r_membership(r.ops[v]).is_some(), "op not in R");
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    if r.graph.weight(x, y) != 0 {
                        assert!(
                            !(t.has_red(r.ops[x]) && t.has_red(r.ops[y])),
                            "adjacent red pair survived"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn equal_states_agrees_with_oracle_smoke() {
        let t = table();
        let mut rng = Rng::new(41);
        for case in 0..40 {
            let n = 1 + rng.below(3) as usize;
            // Build a random circuit state two ways.
            let mut s1 = StateOrZero::State(GslcDiagram::plus_states(&t, n));
            for _ in 0..6 {
                s1 = apply_clifford_generator(&t, &s1, random_gate(&mut rng, n)).unwrap();
            }
            let mut s2 = s1.clone();
            let positive = case % 2 == 0;
            if !positive {
                // Perturb with one extra random gate.
                s2 = apply_clifford_generator(&t, &s2, random_gate(&mut rng, n)).unwrap();
            }
            let eq = equal_states(&t, &s1, &s2).unwrap();
            let v1 = match &s1 {
                StateOrZero::State(d) => d.state_vector(&t).unwrap(),
                StateOrZero::Zero { n } => Matrix::zeros(3usize.pow(*n as u32), 1),
            };
            let v2 = match &s2 {
                StateOrZero::State(d) => d.state_vector(&t).unwrap(),
                StateOrZero::Zero { n } => Matrix::zeros(3usize.pow(*n as u32), 1),
            };
            let oracle = scalar_equiv(&v1, &v2, TOL).unwrap().is_some();
            assert_eq!(eq, oracle, "case {}", case);
        }
    }

    fn random_gate(rng: &mut Rng, n: usize) -> CliffordGate {
        match rng.below(4) {
            0 => CliffordGate::S(rng.below(n as u64) as usize),
            1 => CliffordGate::H(rng.below(n as u64) as usize),
            2 if n >= 2 => {
                let c = rng.below(n as u64) as usize;
                let t = (c + 1 + rng.below((n - 1) as u64) as usize) % n;
                CliffordGate::Sum(c, t)
            }
            _ if n >= 2 => {
                let c = rng.below(n as u64) as usize;
                let t = (c + 1 + rng.below((n - 1) as u64) as usize) % n;
                CliffordGate::Cz(c, t, 1 + rng.below(2) as u8)
            }
            _ => CliffordGate::S(0),
        }
    }
}

#[cfg(test)]
mod dev_tests {
    use super::*;
    use crate::num::TOL;
    use crate::rng::Rng;

    #[test]
    fn reduce_to_pushable_works() {
        let t = enumerate_c1();
        let mut rng = Rng::new(77);
        for case in 0..60 {
            let n = 2 + rng.below(3) as usize;
            let mut g = WeightedGraph::empty(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    g.set_weight(i, j, rng.below(3) as u8);
                }
            }
            let ops = (0..n).map(|_| rng.below(216) as ClassId).collect();
            let mut d = GslcDiagram::new(g, ops);
            let v = rng.below(n as u64) as usize;
            if d.graph.neighbours(v).is_empty() {
                continue;
            }
            let before = d.state_vector(&t).unwrap();
            let r = reduce_vertex(&t, &mut d, v, true, |c| t.as_diag_shift(c).is_some());
            assert!(r.is_ok(), "case {}: {:?}", case, r);
            assert!(t.as_diag_shift(d.ops[v]).is_some(), "case {} not in D", case);
            let after = d.state_vector(&t).unwrap();
            assert!(
                scalar_equiv(&before, &after, TOL).unwrap().is_some(),
                "case {} state changed",
                case
            );
        }
    }
}


#[cfg(test)]
mod dev_tests3 {
    use super::*;
    use crate::num::TOL;

    #[test]
    fn reduce_every_class_to_pushable() {
        let t = enumerate_c1();
        for c in 0..216u16 {
            let mut g = WeightedGraph::empty(2);
            g.set_weight(0, 1, 1);
            let mut d = GslcDiagram::new(g, alloc::vec![c, t.id]);
            let before = d.state_vector(&t).unwrap();
            reduce_vertex(&t, &mut d, 0, true, |x| t.as_diag_shift(x).is_some()).unwrap();
            assert!(
                t.as_diag_shift(d.ops[0]).is_some(),
                "class {} not reduced: got {}",
                c,
                d.ops[0]
            );
            let after = d.state_vector(&t).unwrap();
            assert!(
                scalar_equiv(&before, &after, TOL).unwrap().is_some(),
                "class {} state broken",
                c
            );
        }
    }
}

// ---------------------------------------------------------------------
// Stabilizer tableau over Z_3 and GS-LC resynthesis.
//
// Each stabilizer generator is w^delta X^{x_1}Z^{z_1} (x) ... recorded as
// (x, z, delta) over Z_3. The graph-state form has X block = identity and
// Z block equal to the adjacency matrix; resynthesis tracks the local
// Cliffords it peels off and returns a GS-LC diagram. This is the general
// fallback for edge gates whose operand operators cannot be brought into
// the pushable set by graph transformations.

#[derive(Clone, Debug)]
struct Tableau {
    n: usize,
    /// Row-major n x n blocks.
    x: Vec<u8>,
    z: Vec<u8>,
    /// Phase exponent of w per generator.
    delta: Vec<u8>,
}

/// Symplectic action of a single-qutrit Clifford: images of X and Z as
/// phased Paulis (a, b, phase) meaning `w^phase X^a Z^b`.
#[derive(Clone, Copy, Debug)]
pub struct PauliImage {
    pub xa: u8,
    pub xb: u8,
    pub xphase: u8,
    pub za: u8,
    pub zb: u8,
    pub zphase: u8,
}

fn pauli_matrix(a: u8, b: u8, phase: u8) -> Matrix {
    // w^phase X^a Z^b with X|j> = |j+1>, Z|j> = w^j |j>.
    let mut m = Matrix::zeros(3, 3);
    for j in 0..3usize {
        let ph = (phase as i64) + (b as i64) * (j as i64);
        m[((j + a as usize) % 3, j)] = w3pow(ph);
    }
    m
}

impl CliffordTable {
    /// Conjugation data `U P U^dagger` for the Pauli generators.
    pub fn pauli_image(&self, c: ClassId) -> PauliImage {
        let u = self.mat(c);
        let ud = u.dagger();
        let find = |p: &Matrix| -> (u8, u8, u8) {
            let img = u.mul(p).unwrap().mul(&ud).unwrap();
            for a in 0..3u8 {
                for b in 0..3u8 {
                    for ph in 0..3u8 {
                        if img.approx_eq(&pauli_matrix(a, b, ph), 1e-8) {
                            return (a, b, ph);
                        }
                    }
                }
            }
            unreachable!("Clifford conjugation must send Paulis to Paulis")
        };
        let x = pauli_matrix(1, 0, 0);
        let z = pauli_matrix(0, 1, 0);
        let (xa, xb, xphase) = find(&x);
        let (za, zb, zphase) = find(&z);
        PauliImage {
            xa,
            xb,
            xphase,
            za,
            zb,
            zphase,
        }
    }
}

impl Tableau {
    /// Stabilizer tableau of a GS-LC diagram.
    fn from_gslc(table: &CliffordTable, d: &GslcDiagram) -> Tableau {
        let n = d.n();
        let mut t = Tableau {
            n,
            x: vec![0; n * n],
            z: vec![0; n * n],
            delta: vec![0; n],
        };
        // Graph-state stabilizers X_v prod_u Z_u^{Gamma_uv}.
        for v in 0..n {
            t.x[v * n + v] = 1;
            for u in 0..n {
                if u != v {
                    t.z[v * n + u] = d.graph.weight(u, v);
                }
            }
        }
        // Conjugate by the vertex operators.
        for (v, op) in d.ops.iter().enumerate() {
            t.apply_local(table, *v_ref(&v), *op);
        }
        t
    }

    fn apply_local(&mut self, table: &CliffordTable, v: usize, c: ClassId) {
        let im = table.pauli_image(c);
        let n = self.n;
        for r in 0..n {
            let x = self.x[r * n + v];
            let z = self.z[r * n + v];
            // U X^x Z^z U^dagger.
            // (w^p X^A Z^B)^k = w^{kp + AB k(k-1)/2} X^{kA} Z^{kB}.
            let pow = |aa: u8, bb: u8, pp: u8, k: u8| -> (u8, u8, u8) {
                let kk = k as i64;
                let ph = (kk * pp as i64 + aa as i64 * bb as i64 * kk * (kk - 1) / 2)
                    .rem_euclid(3) as u8;
                (
                    ((aa as i64 * kk).rem_euclid(3)) as u8,
                    ((bb as i64 * kk).rem_euclid(3)) as u8,
                    ph,
                )
            };
            let (xa, xb, xp) = pow(im.xa, im.xb, im.xphase, x);
            let (za, zb, zp) = pow(im.za, im.zb, im.zphase, z);
            // (X^xa Z^xb)(X^za Z^zb) = w^{xb * za} X^{xa+za} Z^{xb+zb}.
            let ph = ((xp as u16 + zp as u16 + (xb as u16 * za as u16) % 3) % 3) as u8;
            self.x[r * n + v] = (xa + za) % 3;
            self.z[r * n + v] = (xb + zb) % 3;
            self.delta[r] = ((self.delta[r] as u16 + ph as u16) % 3) as u8;
        }
    }

    fn apply_cz_gate(&mut self, a: usize, b: usize, w: u8) {
        let n = self.n;
        for r in 0..n {
            let xa = self.x[r * n + a];
            let xb = self.x[r * n + b];
            self.z[r * n + b] = ((self.z[r * n + b] as u16 + w as u16 * xa as u16) % 3) as u8;
            self.z[r * n + a] = ((self.z[r * n + a] as u16 + w as u16 * xb as u16) % 3) as u8;
            // Reordering the emitted Z factors into canonical per-site
            // order introduces w^{w xa xb}.
            self.delta[r] =
                ((self.delta[r] as u16 + w as u16 * xa as u16 * xb as u16) % 3) as u8;
        }
    }

    /// Multiply generator `dst` by `src^k`.
    fn row_mul_add(&mut self, dst: usize, src: usize, k: u8) {
        if k == 0 {
            return;
        }
        let n = self.n;
        for _ in 0..k {
            // g_dst <- g_dst * g_src with phase correction w^{z_dst . x_src}.
            let mut corr: u16 = 0;
            for v in 0..n {
                corr += self.z[dst * n + v] as u16 * self.x[src * n + v] as u16;
            }
            self.delta[dst] =
                ((self.delta[dst] as u16 + self.delta[src] as u16 + corr) % 3) as u8;
            for v in 0..n {
                self.x[dst * n + v] = (self.x[dst * n + v] + self.x[src * n + v]) % 3;
                self.z[dst * n + v] = (self.z[dst * n + v] + self.z[src * n + v]) % 3;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.n;
        for v in 0..n {
            self.x.swap(i * n + v, j * n + v);
            self.z.swap(i * n + v, j * n + v);
        }
        self.delta.swap(i, j);
    }

    /// Resynthesize a GS-LC diagram. The tracked local operators are the
    /// inverses of the gates applied during reduction.
    fn to_gslc(mut self, table: &CliffordTable) -> Result<GslcDiagram, QutritError> {
        let n = self.n;
        // Gates applied to the state during reduction, per vertex, in
        // application order.
        let mut applied: Vec<Vec<ClassId>> = vec![Vec::new(); n];
        // 1. Make the X block invertible by applying H at deficient
        // columns, then Gauss-reduce it to the identity by row ops.
        for col in 0..n {
            // Find a pivot in rows >= col.
            let mut pivot = None;
            for r in col..n {
                if self.x[r * n + col] != 0 {
                    pivot = Some(r);
                    break;
                }
            }
            if pivot.is_none() {
                // Apply H at this vertex: swaps the roles of X and Z.
                self.apply_local(table, col, table.h_gate);
                applied[col].push(table.h_gate);
                for r in col..n {
                    if self.x[r * n + col] != 0 {
                        pivot = Some(r);
                        break;
                    }
                }
            }
            let pivot = pivot.ok_or_else(|| {
                QutritError::ReductionFailed("tableau X block irreducible".into())
            })?;
            self.swap_rows(col, pivot);
            // Normalize pivot to 1 (multiply row by inverse: 2*2=4=1 mod 3).
            if self.x[col * n + col] == 2 {
                let mut t2 = self.clone();
                t2.row_mul_add(col, col, 1); // g^2
                self = t2;
            }
            // Clear the column elsewhere.
            for r in 0..n {
                if r != col {
                    let k = self.x[r * n + col];
                    if k != 0 {
                        self.row_mul_add(r, col, (3 - k) % 3);
                    }
                }
            }
        }
        // X block is now the identity. The Z block must be symmetric;
        // clear its diagonal with S-type gates and capture the graph.
        for v in 0..n {
            let dz = self.z[v * n + v];
            if dz != 0 {
                // Find k with the S-type gate action z_v += k x_v per row.
                // s_gate = diag(1, 1, w): X -> w^? X Z^g for some g.
                let im = table.pauli_image(table.s_gate);
                debug_assert_eq!(im.xa, 1);
                let g = im.xb;
                debug_assert!(g != 0);
                // Want dz + k g = 0 mod 3.
                let mut k = 0u8;
                for kk in 1..3u8 {
                    if (dz + kk * g) % 3 == 0 {
                        k = kk;
                    }
                }
                for _ in 0..k {
                    self.apply_local(table, v, table.s_gate);
                    applied[v].push(table.s_gate);
                }
            }
        }
        // Kill phases with Z Paulis: conjugating by Z_v^k maps the
        // generator with X_v to w^{-k}-shifted phase.
        for v in 0..n {
            let dph = self.delta[v];
            if dph != 0 {
                // Z^k X Z^{-k} = w^k X, so conjugate by Z^{-delta}.
                let zp = table.z_pauli((3 - dph) % 3);
                self.apply_local(table, v, zp);
                applied[v].push(zp);
            }
        }
        // Extract the graph.
        let mut graph = WeightedGraph::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let w = self.z[i * n + j];
                    if self.z[j * n + i] != w {
                        return Err(QutritError::ReductionFailed(
                            "asymmetric Z block".into(),
                        ));
                    }
                    if i < j {
                        graph.set_weight(i, j, w);
                    }
                }
            }
        }
        for v in 0..n {
            if self.delta[v] != 0 {
                return Err(QutritError::ReductionFailed("residual phase".into()));
            }
        }
        // The state equals (prod applied)^{-1} |G>; vertex operators are
        // the inverses of the applied gates in reverse order.
        let mut ops = vec![table.id; n];
        for v in 0..n {
            let mut inv = table.id;
            for g in applied[v].iter() {
                // (g_k ... g_1)^{-1} = g_1^{-1} ... g_k^{-1}.
                inv = table.compose(inv, table.inverse(*g));
            }
            ops[v] = inv;
        }
        Ok(GslcDiagram::new(graph, ops))
    }
}

fn v_ref(v: &usize) -> &usize {
    v
}

/// Apply `CZ^w` via tableau resynthesis (general fallback).
fn apply_cz_tableau(
    table: &CliffordTable,
    d: &GslcDiagram,
    a: usize,
    b: usize,
    w: u8,
) -> Result<GslcDiagram, QutritError> {
    let mut t = Tableau::from_gslc(table, d);
    t.apply_cz_gate(a, b, w);
    t.to_gslc(table)
}

#[cfg(test)]
mod tableau_tests {
    use super::*;
    use crate::num::TOL;
    use crate::rng::Rng;

    #[test]
    fn tableau_roundtrip_preserves_state() {
        let t = enumerate_c1();
        let mut rng = Rng::new(53);
        for _ in 0..30 {
            let n = 1 + rng.below(4) as usize;
            let mut g = WeightedGraph::empty(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    g.set_weight(i, j, rng.below(3) as u8);
                }
            }
            let ops = (0..n).map(|_| rng.below(216) as ClassId).collect();
            let d = GslcDiagram::new(g, ops);
            let before = d.state_vector(&t).unwrap();
            let tab = Tableau::from_gslc(&t, &d);
            let d2 = tab.to_gslc(&t).unwrap();
            let after = d2.state_vector(&t).unwrap();
            assert!(
                scalar_equiv(&before, &after, TOL).unwrap().is_some(),
                "tableau roundtrip changed the state"
            );
        }
    }

    #[test]
    fn tableau_cz_matches_oracle() {
        let t = enumerate_c1();
        let mut rng = Rng::new(59);
        for _ in 0..30 {
            let n = 2 + rng.below(3) as usize;
            let mut g = WeightedGraph::empty(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    g.set_weight(i, j, rng.below(3) as u8);
                }
            }
            let ops = (0..n).map(|_| rng.below(216) as ClassId).collect();
            let d = GslcDiagram::new(g, ops);
            let a = rng.below(n as u64) as usize;
            let b = (a + 1 + rng.below((n - 1) as u64) as usize) % n;
            let w = 1 + rng.below(2) as u8;
            let before = d.state_vector(&t).unwrap();
            let d2 = apply_cz_tableau(&t, &d, a, b, w).unwrap();
            let after = d2.state_vector(&t).unwrap();
            // Oracle: CZ^w matrix on (a, b).
            let dim = 3usize.pow(n as u32);
            let mut expect = Matrix::zeros(dim, 1);
            for idx in 0..dim {
                let da = (idx / 3usize.pow((n - 1 - a) as u32)) % 3;
                let db = (idx / 3usize.pow((n - 1 - b) as u32)) % 3;
                expect[(idx, 0)] = before[(idx, 0)] * w3pow((da * db * w as usize) as i64);
            }
            assert!(
                scalar_equiv(&after, &expect, TOL).unwrap().is_some(),
                "tableau CZ disagrees with oracle"
            );
        }
    }
}
