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

//! Core data structures and algorithms for ZX- and ZW-calculus diagrams.
//!
//! - [`num`]: dense complex matrices, scalar-equivalence comparison, and
//!   exact arithmetic in the ring `Z[1/2, e^{i pi/4}]`.
//! - [`diagram`]: the open-graph model of ZX/ZW diagrams for qubits and
//!   qutrits, with parallel and sequential composition.
//! - [`tensor`]: the standard interpretation mapping diagrams to matrices
//!   by tensor contraction, in floating-point and exact modes.
//! - [`rules`]: the rewrite-rule catalogs and the semantic soundness
//!   verifier that checks every rule against its interpretation.
//! - [`rewrite`]: pattern matching, rule application and a
//!   semantics-preserving simplifier.
//! - [`translate`]: translations between ZX and ZW diagrams, plus
//!   decompositions of the triangle and lambda generators.
//! - [`euler`]: closed-form colour swap of phase triples (ZXZ <-> XZX).
//! - [`qutrit`]: the qutrit stabilizer engine: local Clifford normal
//!   forms, weighted graph states, local complementation, GS-LC and
//!   rGS-LC reduction, and the equality decision procedure.
//! - [`gallery`]: concrete circuits and identities (Toffoli, UMA,
//!   W/GHZ states, two-qubit relation set) with equivalence checking.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod circuit;
pub mod diagram;
pub mod euler;
pub mod gallery;
pub mod num;
pub mod phase;
pub mod qutrit;
pub mod rewrite;
pub mod rng;
pub mod rules;
pub mod tensor;
pub mod translate;

pub use diagram::{Diagram, NodeKind};
pub use num::{Complex, Matrix};
pub use phase::Phase;
