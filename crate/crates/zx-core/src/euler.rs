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

//! Colour swap of generalized phase triples in closed form, and the
//! ZXZ -> XZX Euler-angle conversion.
//!
//! A generalized green phase with parameter `a` has matrix `diag(1, a)`;
//! a generalized red phase with parameter `b` has matrix
//! `[[1+b, 1-b], [1-b, 1+b]]`. The colour-swap law turns
//! `Z(l3) X(l2) Z(l1)` into `X(s3) Z(s2) X(s1)` up to a nonzero scalar;
//! restricted to unit-modulus parameters it becomes the angle conversion
//! used by the (P) rule.

use crate::num::{Complex, Matrix};
use crate::phase::Phase;

const EPS: f64 = 1e-12;

/// Generalized Z-X-Z phase triple; `l1` is applied first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralTriple {
    pub l1: Complex,
    pub l2: Complex,
    pub l3: Complex,
}

/// Euler angle triple in `[0, 2 pi)`; `alpha` is applied first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AngleTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> AngleTriple {
        let tau = core::f64::consts::TAU;
        AngleTriple {
            alpha: alpha.rem_euclid(tau),
            beta: beta.rem_euclid(tau),
            gamma: gamma.rem_euclid(tau),
        }
    }

    pub fn phases(&self) -> (Phase, Phase, Phase) {
        (
            Phase::radians(self.alpha),
            Phase::radians(self.beta),
            Phase::radians(self.gamma),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EulerError {
    /// The closed-form colour swap hits a removable singularity; the
    /// caller should fall back to matrix-level checks.
    DegenerateDecomposition,
}

/// `diag(1, a)`.
pub fn green_phase_matrix(a: Complex) -> Matrix {
    let mut m = Matrix::zeros(2, 2);
    m[(0, 0)] = Complex::new(1.0, 0.0);
    m[(1, 1)] = a;
    m
}

/// `[[1+b, 1-b], [1-b, 1+b]]`.
pub fn red_phase_matrix(b: Complex) -> Matrix {
    let one = Complex::new(1.0, 0.0);
    Matrix::from_rows(&[&[one + b, one - b], &[one - b, one + b]])
}

/// `Z(l3) X(l2) Z(l1)` as a 2x2 matrix (`l1` applied first).
pub fn zxz_matrix(t: &GeneralTriple) -> Matrix {
    green_phase_matrix(t.l3)
        .mul(&red_phase_matrix(t.l2))
        .unwrap()
        .mul(&green_phase_matrix(t.l1))
        .unwrap()
}

/// `X(s3) Z(s2) X(s1)` as a 2x2 matrix (`s1` applied first).
pub fn xzx_matrix(t: &GeneralTriple) -> Matrix {
    red_phase_matrix(t.l3)
        .mul(&green_phase_matrix(t.l2))
        .unwrap()
        .mul(&red_phase_matrix(t.l1))
        .unwrap()
}

/// General phases colour-swap law: given `(l1, l2, l3)` produce
/// `(s1, s2, s3)` with `X(s3) Z(s2) X(s1) ~ Z(l3) X(l2) Z(l1)`.
pub fn color_swap_general(t: &GeneralTriple) -> Result<GeneralTriple, EulerError> {
    let one = Complex::new(1.0, 0.0);
    let (l1, l2, l3) = (t.l1, t.l2, t.l3);
    let tau = (one - l2) * (l1 + l3) + (one + l2) * (one + l1 * l3);
    let u = (one + l2) * (l1 * l3 - one);
    let v = (one - l2) * (l1 - l3);
    let s = (one - l2) * (l1 + l3) - (one + l2) * (one + l1 * l3);
    let t_big = tau * (u * u - v * v);
    if s.norm() <= EPS || t_big.norm() <= EPS {
        return Err(EulerError::DegenerateDecomposition);
    }
    let i = Complex::new(0.0, 1.0);
    let rst = (s / t_big).sqrt();
    let rts = (t_big / s).sqrt();
    let s1 = -i * (u + v) * rst;
    let s2 = (tau + i * rts) / (tau - i * rts);
    let s3 = -i * (u - v) * rst;
    Ok(GeneralTriple {
        l1: s1,
        l2: s2,
        l3: s3,
    })
}

fn arg_or_zero(z: Complex) -> f64 {
    if z.norm() < EPS {
        0.0
    } else {
        z.arg()
    }
}

/// ZXZ -> XZX Euler angle conversion: returns `(alpha2, beta2, gamma2)`
/// with `X(gamma2) Z(beta2) X(alpha2) ~ Z(gamma1) X(beta1) Z(alpha1)`.
///
/// The closed-form expressions have removable singularities when the
/// composite is diagonal or antidiagonal; those branches return the
/// exact limits.
pub fn zxz_to_xzx(t: &AngleTriple) -> AngleTriple {
    let (a1, b1, g1) = (t.alpha, t.beta, t.gamma);
    let z = Complex::new(
        libm::cos(b1 / 2.0) * libm::cos((a1 + g1) / 2.0),
        libm::sin(b1 / 2.0) * libm::cos((a1 - g1) / 2.0),
    );
    let z1 = Complex::new(
        libm::cos(b1 / 2.0) * libm::sin((a1 + g1) / 2.0),
        -libm::sin(b1 / 2.0) * libm::sin((a1 - g1) / 2.0),
    );
    if z1.norm() < EPS {
        // Composite is diagonal in the X basis: no middle Z phase.
        let a = arg_or_zero(z);
        return AngleTriple::new(a, 0.0, a);
    }
    if z.norm() < EPS {
        // Composite is antidiagonal: middle Z phase of pi.
        let a = arg_or_zero(z1);
        return AngleTriple::new(
            a + core::f64::consts::FRAC_PI_2,
            core::f64::consts::PI,
            core::f64::consts::FRAC_PI_2 - a,
        );
    }
    let az = z.arg();
    let az1 = z1.arg();
    let beta2 = 2.0 * Complex::new((z / z1).norm(), 1.0).arg();
    AngleTriple::new(az + az1, beta2, az - az1)
}

/// `Z(gamma) X(beta) Z(alpha)` for ordinary phases (`alpha` first).
pub fn zxz_phase_matrix(t: &AngleTriple) -> Matrix {
    let e = |x: f64| Complex::from_polar(1.0, x);
    zxz_matrix(&GeneralTriple {
        l1: e(t.alpha),
        l2: e(t.beta),
        l3: e(t.gamma),
    })
}

/// `X(gamma) Z(beta) X(alpha)` for ordinary phases (`alpha` first).
pub fn xzx_phase_matrix(t: &AngleTriple) -> Matrix {
    let e = |x: f64| Complex::from_polar(1.0, x);
    xzx_matrix(&GeneralTriple {
        l1: e(t.alpha),
        l2: e(t.beta),
        l3: e(t.gamma),
    })
}
