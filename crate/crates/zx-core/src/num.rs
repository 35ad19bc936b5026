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

//! Complex scalars, dense matrices, scalar-equivalence comparison, and
//! exact arithmetic in the ring `T = Z[1/2, e^{i pi/4}] = Z[i, 1/sqrt 2]`.

use alloc::vec;
use alloc::vec::Vec;

pub use num_complex::Complex64 as Complex;

/// Default tolerance for approximate comparisons. All desk-scale matrices
/// here are small with entries of modest modulus, so a fixed tolerance is
/// adequate.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumError {
    /// Matrix shapes are incompatible with the requested operation.
    ShapeMismatch,
    /// A shape product overflowed.
    DimensionOverflow,
}

/// Dense complex matrix in row-major order.
///
/// Diagram semantics use shape `d^m x d^n` for a diagram with `n` inputs
/// and `m` outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Complex>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            entries: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex]]) -> Matrix {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// 1x1 matrix holding a scalar.
    pub fn scalar(z: Complex) -> Matrix {
        let mut m = Matrix::zeros(1, 1);
        m[(0, 0)] = z;
        m
    }

    /// Column vector.
    pub fn column(v: &[Complex]) -> Matrix {
        let mut m = Matrix::zeros(v.len(), 1);
        for (i, z) in v.iter().enumerate() {
            m[(i, 0)] = *z;
        }
        m
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn dagger(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, c: Complex) -> Matrix {
        let mut m = self.clone();
        for e in m.entries.iter_mut() {
            *e *= c;
        }
        m
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, NumError> {
        if self.cols != rhs.rows {
            return Err(NumError::ShapeMismatch);
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.entries[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.entries[i * self.cols + j]
    }
}

/// Kronecker product. Index convention: the left factor supplies the most
/// significant digit, matching the big-endian basis ordering used by the
/// diagram interpretation.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix, NumError> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or(NumError::DimensionOverflow)?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or(NumError::DimensionOverflow)?;
    let mut out = Matrix::zeros(rows, cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let v = a[(i1, j1)];
            if v == Complex::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out[(i1 * b.rows + i2, j1 * b.cols + j2)] = v * b[(i2, j2)];
                }
            }
        }
    }
    Ok(out)
}

/// Decide whether `a = c * b` for some nonzero complex `c`, and return the
/// scalar if so.
///
/// The candidate scalar is computed from the largest-modulus entry of `b`,
/// which keeps the division away from near-zero entries. Two all-zero
/// matrices count as equivalent with `c = 1`; a zero matrix is never
/// equivalent to a nonzero one.
pub fn scalar_equiv(a: &Matrix, b: &Matrix, tol: f64) -> Result<Option<Complex>, NumError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(NumError::ShapeMismatch);
    }
    let na = a.max_norm();
    let nb = b.max_norm();
    let scale = f64::max(1.0, na);
    if nb <= tol {
        // b is zero: equivalent only if a is zero too.
        return Ok(if na <= tol * scale {
            Some(Complex::new(1.0, 0.0))
        } else {
            None
        });
    }
    // Pivot at the largest entry of b.
    let mut pivot = 0;
    let mut best = -1.0;
    for (k, z) in b.entries.iter().enumerate() {
        let n = z.norm();
        if n > best {
            best = n;
            pivot = k;
        }
    }
    let c = a.entries[pivot] / b.entries[pivot];
    if c.norm() <= tol {
        return Ok(None);
    }
    for (x, y) in a.entries.iter().zip(b.entries.iter()) {
        if (x - c * y).norm() > tol * scale {
            return Ok(None);
        }
    }
    Ok(Some(c))
}

/// Dyadic rational `numerator / 2^exponent` in canonical form: the
/// numerator is odd or zero, and the exponent is zero when the numerator
/// is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(mut num: i64, mut exp: u32) -> Dyadic {
        if num == 0 {
            return Dyadic::ZERO;
        }
        while num % 2 == 0 && exp > 0 {
            num /= 2;
            exp -= 1;
        }
        Dyadic { num, exp }
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic::new(n, 0)
    }

    /// `1 / 2^k`.
    pub fn half_pow(k: u32) -> Dyadic {
        Dyadic::new(1, k)
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }

    pub fn add(self, other: Dyadic) -> Dyadic {
        let e = self.exp.max(other.exp);
        let a = self.num << (e - self.exp);
        let b = other.num << (e - other.exp);
        Dyadic::new(a + b, e)
    }

    pub fn neg(self) -> Dyadic {
        Dyadic::new(-self.num, self.exp)
    }

    pub fn sub(self, other: Dyadic) -> Dyadic {
        self.add(other.neg())
    }

    pub fn mul(self, other: Dyadic) -> Dyadic {
        Dyadic::new(self.num * other.num, self.exp + other.exp)
    }
}

/// Exact element of `T = Z[1/2, e^{i pi/4}]`, stored in the unique
/// representation `a0 + a1 w + a2 w^2 + a3 w^3` with `w = e^{i pi/4}`
/// (so `w^4 = -1`) and dyadic coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub coeffs: [Dyadic; 4],
}

impl RingElement {
    pub const ZERO: RingElement = RingElement {
        coeffs: [Dyadic::ZERO; 4],
    };
    pub const ONE: RingElement = RingElement {
        coeffs: [Dyadic::ONE, Dyadic::ZERO, Dyadic::ZERO, Dyadic::ZERO],
    };

    pub fn new(a0: Dyadic, a1: Dyadic, a2: Dyadic, a3: Dyadic) -> RingElement {
        RingElement {
            coeffs: [a0, a1, a2, a3],
        }
    }

    pub fn from_int(n: i64) -> RingElement {
        RingElement::new(Dyadic::from_int(n), Dyadic::ZERO, Dyadic::ZERO, Dyadic::ZERO)
    }

    /// The primitive eighth root of unity `w = e^{i pi/4}`.
    pub fn omega() -> RingElement {
        RingElement::new(Dyadic::ZERO, Dyadic::ONE, Dyadic::ZERO, Dyadic::ZERO)
    }

    /// `w^k` for any integer `k`.
    pub fn omega_pow(k: i64) -> RingElement {
        let k = k.rem_euclid(8) as usize;
        let mut c = [Dyadic::ZERO; 4];
        if k < 4 {
            c[k] = Dyadic::ONE;
        } else {
            c[k - 4] = Dyadic::from_int(-1);
        }
        RingElement { coeffs: c }
    }

    /// `1 / sqrt 2 = (w - w^3) / 2`.
    pub fn inv_sqrt2() -> RingElement {
        RingElement::new(
            Dyadic::ZERO,
            Dyadic::new(1, 1),
            Dyadic::ZERO,
            Dyadic::new(-1, 1),
        )
    }

    /// `(1/sqrt 2)^k`.
    pub fn inv_sqrt2_pow(k: u32) -> RingElement {
        let mut out = RingElement::ONE;
        for _ in 0..k {
            out = ring_mul(&out, &RingElement::inv_sqrt2());
        }
        out
    }

    pub fn from_dyadic(d: Dyadic) -> RingElement {
        RingElement::new(d, Dyadic::ZERO, Dyadic::ZERO, Dyadic::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, d: Dyadic) -> RingElement {
        RingElement {
            coeffs: [
                self.coeffs[0].mul(d),
                self.coeffs[1].mul(d),
                self.coeffs[2].mul(d),
                self.coeffs[3].mul(d),
            ],
        }
    }
}

pub fn ring_add(r: &RingElement, s: &RingElement) -> RingElement {
    RingElement {
        coeffs: [
            r.coeffs[0].add(s.coeffs[0]),
            r.coeffs[1].add(s.coeffs[1]),
            r.coeffs[2].add(s.coeffs[2]),
            r.coeffs[3].add(s.coeffs[3]),
        ],
    }
}

pub fn ring_neg(r: &RingElement) -> RingElement {
    RingElement {
        coeffs: [
            r.coeffs[0].neg(),
            r.coeffs[1].neg(),
            r.coeffs[2].neg(),
            r.coeffs[3].neg(),
        ],
    }
}

/// Product in `T`, reduced to the four-coefficient basis via `w^4 = -1`.
pub fn ring_mul(r: &RingElement, s: &RingElement) -> RingElement {
    let mut acc = [Dyadic::ZERO; 4];
    for i in 0..4 {
        if r.coeffs[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if s.coeffs[j].is_zero() {
                continue;
            }
            let term = r.coeffs[i].mul(s.coeffs[j]);
            let k = i + j;
            if k < 4 {
                acc[k] = acc[k].add(term);
            } else {
                acc[k - 4] = acc[k - 4].sub(term);
            }
        }
    }
    RingElement { coeffs: acc }
}

/// Evaluate with `w = (sqrt 2 / 2)(1 + i)`.
pub fn ring_to_complex(r: &RingElement) -> Complex {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let w = [
        Complex::new(1.0, 0.0),
        Complex::new(s, s),
        Complex::new(0.0, 1.0),
        Complex::new(-s, s),
    ];
    let mut z = Complex::new(0.0, 0.0);
    for k in 0..4 {
        z += Complex::new(r.coeffs[k].to_f64(), 0.0) * w[k];
    }
    z
}

/// Dense matrix over the exact ring, used by the exact interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<RingElement>,
}

impl RingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RingMatrix {
        RingMatrix {
            rows,
            cols,
            entries: vec![RingElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> RingMatrix {
        let mut m = RingMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = RingElement::ONE;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn to_complex(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = ring_to_complex(self.get(i, j));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn kron_basis_case() {
        // |0> (x) |1> = (0, 1, 0, 0)^T
        let ket0 = Matrix::column(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let ket1 = Matrix::column(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let out = kron(&ket0, &ket1).unwrap();
        assert_eq!(out.rows, 4);
        assert_eq!(out.cols, 1);
        let expect = Matrix::column(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(out.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn kron_identity_case() {
        let i2 = Matrix::identity(2);
        let i4 = kron(&i2, &i2).unwrap();
        assert!(i4.approx_eq(&Matrix::identity(4), 1e-15));
    }

    #[test]
    fn kron_associativity_exact() {
        // Dyadic entries keep every product exact in f64, so the two
        // association orders agree bit for bit.
        let mut rng = crate::rng::Rng::new(42);
        let mut rand_mat = |r: usize, cl: usize| {
            let mut m = Matrix::zeros(r, cl);
            for i in 0..r {
                for j in 0..cl {
                    m[(i, j)] = c(rng.int(8) as f64 / 8.0, rng.int(8) as f64 / 8.0);
                }
            }
            m
        };
        let a = rand_mat(2, 3);
        let b = rand_mat(3, 2);
        let cm = rand_mat(2, 2);
        let left = kron(&kron(&a, &b).unwrap(), &cm).unwrap();
        let right = kron(&a, &kron(&b, &cm).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn scalar_equiv_scaling_case() {
        let i2 = Matrix::identity(2);
        let two = i2.scale(c(2.0, 0.0));
        let r = scalar_equiv(&i2, &two, TOL).unwrap().unwrap();
        assert!((r - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn scalar_equiv_inequivalent() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let h = Matrix::from_rows(&[
            &[c(s, 0.0), c(s, 0.0)],
            &[c(s, 0.0), c(-s, 0.0)],
        ]);
        let zphase = Matrix::from_rows(&[
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 1.0)],
        ]);
        assert!(scalar_equiv(&h, &zphase, TOL).unwrap().is_none());
    }

    #[test]
    fn scalar_equiv_zero_conventions() {
        let z = Matrix::zeros(2, 2);
        let r = scalar_equiv(&z, &z, TOL).unwrap().unwrap();
        assert_eq!(r, c(1.0, 0.0));
        assert!(scalar_equiv(&z, &Matrix::identity(2), TOL)
            .unwrap()
            .is_none());
        assert!(scalar_equiv(&Matrix::identity(2), &z, TOL)
            .unwrap()
            .is_none());
    }

    #[test]
    fn scalar_equiv_shape_error() {
        let a = Matrix::zeros(2, 2);
        let b = Matrix::zeros(2, 3);
        assert_eq!(scalar_equiv(&a, &b, TOL), Err(NumError::ShapeMismatch));
    }

    #[test]
    fn ring_omega_fourth_is_minus_one() {
        let w = RingElement::omega();
        let w3 = RingElement::omega_pow(3);
        let p = ring_mul(&w, &w3);
        assert_eq!(p, RingElement::from_int(-1));
    }

    #[test]
    fn ring_omega_squared_is_i() {
        let w = RingElement::omega();
        let p = ring_mul(&w, &w);
        assert_eq!(p, RingElement::omega_pow(2));
        let z = ring_to_complex(&p);
        assert!((z - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn inv_sqrt2_squares_to_half() {
        // (0, 1/2, 0, -1/2)^2 = (1/2, 0, 0, 0)
        let r = RingElement::inv_sqrt2();
        let p = ring_mul(&r, &r);
        assert_eq!(p, RingElement::from_dyadic(Dyadic::new(1, 1)));
    }

    #[test]
    fn ring_to_complex_basis() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((ring_to_complex(&RingElement::ONE) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((ring_to_complex(&RingElement::omega()) - c(s, s)).norm() < 1e-15);
        assert!((ring_to_complex(&RingElement::omega_pow(2)) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn dyadic_canonical() {
        assert_eq!(Dyadic::new(4, 2), Dyadic::from_int(1));
        assert_eq!(Dyadic::new(0, 5), Dyadic::ZERO);
        assert_eq!(Dyadic::new(6, 1), Dyadic::from_int(3));
        assert_eq!(Dyadic::new(3, 2).to_f64(), 0.75);
    }

    #[test]
    fn ring_homomorphism_random() {
        let mut rng = crate::rng::Rng::new(11);
        for _ in 0..200 {
            let rand_elem = |r: &mut crate::rng::Rng| {
                RingElement::new(
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                )
            };
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let lhs = ring_to_complex(&ring_mul(&a, &b));
            let rhs = ring_to_complex(&a) * ring_to_complex(&b);
            // Coefficients up to 2^10: products stay well within f64 range.
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn distinct_ring_elements_are_separated() {
        // Uniqueness of the representation: distinct canonical elements with
        // small coefficients never evaluate to nearly-equal complex numbers.
        let mut rng = crate::rng::Rng::new(3);
        for _ in 0..500 {
            let rand_elem = |r: &mut crate::rng::Rng| {
                RingElement::new(
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                    Dyadic::new(r.int(1 << 10), r.below(7) as u32),
                )
            };
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            if a != b {
                let za = ring_to_complex(&a);
                let zb = ring_to_complex(&b);
                assert!((za - zb).norm() > 1e-12);
            }
        }
    }
}
