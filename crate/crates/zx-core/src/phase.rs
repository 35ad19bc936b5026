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

//! Spider phase angles: exact rational multiples of pi, or floats.

use crate::num::Complex;

/// An angle in `[0, 2 pi)`.
///
/// `ExactTurn { k, m }` means `k * pi / m` and is kept reduced with
/// `0 <= k < 2m`. Clifford+T phases use `m = 4`; qutrit stabilizer phases
/// are multiples of `2 pi / 3`, i.e. `ExactTurn { k: 2a, m: 3 }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    ExactTurn { k: i64, m: i64 },
    Float { radians: f64 },
}

impl Phase {
    pub const ZERO: Phase = Phase::ExactTurn { k: 0, m: 1 };

    pub fn pi() -> Phase {
        Phase::ExactTurn { k: 1, m: 1 }
    }

    /// `k * pi / m`, normalized into `[0, 2 pi)`.
    pub fn turns(k: i64, m: i64) -> Phase {
        assert!(m > 0);
        let k = k.rem_euclid(2 * m);
        let g = gcd(k, m);
        if g > 1 {
            Phase::ExactTurn { k: k / g, m: m / g }
        } else {
            Phase::ExactTurn { k, m }
        }
    }

    /// `k * pi / 4`.
    pub fn quarter(k: i64) -> Phase {
        Phase::turns(k, 4)
    }

    /// `a * 2 pi / 3` for qutrit stabilizer phases, `a` taken mod 3.
    pub fn z3(a: i64) -> Phase {
        Phase::turns(2 * a.rem_euclid(3), 3)
    }

    pub fn radians(radians: f64) -> Phase {
        Phase::Float {
            radians: radians.rem_euclid(core::f64::consts::TAU),
        }
    }

    pub fn to_radians(&self) -> f64 {
        match *self {
            Phase::ExactTurn { k, m } => k as f64 * core::f64::consts::PI / m as f64,
            Phase::Float { radians } => radians,
        }
    }

    /// `e^{i phase}`.
    pub fn to_complex(&self) -> Complex {
        match *self {
            // Hit the exact values for the multiples of pi/2.
            Phase::ExactTurn { k, m } if (2 * k) % m == 0 => {
                match ((2 * k / m).rem_euclid(4)) as u8 {
                    0 => Complex::new(1.0, 0.0),
                    1 => Complex::new(0.0, 1.0),
                    2 => Complex::new(-1.0, 0.0),
                    _ => Complex::new(0.0, -1.0),
                }
            }
            _ => Complex::from_polar(1.0, self.to_radians()),
        }
    }

    pub fn add(&self, other: &Phase) -> Phase {
        match (*self, *other) {
            (Phase::ExactTurn { k: k1, m: m1 }, Phase::ExactTurn { k: k2, m: m2 }) => {
                Phase::turns(k1 * m2 + k2 * m1, m1 * m2)
            }
            _ => Phase::radians(self.to_radians() + other.to_radians()),
        }
    }

    pub fn neg(&self) -> Phase {
        match *self {
            Phase::ExactTurn { k, m } => Phase::turns(-k, m),
            Phase::Float { radians } => Phase::radians(-radians),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Phase::ExactTurn { k, .. } => k == 0,
            Phase::Float { radians } => radians == 0.0,
        }
    }

    /// True when the angle is an exact multiple of `pi / 4`.
    pub fn is_quarter_multiple(&self) -> bool {
        match *self {
            Phase::ExactTurn { k: _, m } => 4 % m == 0,
            Phase::Float { .. } => false,
        }
    }

    /// The integer `k` with angle `k * pi / 4`, when exact.
    pub fn quarter_index(&self) -> Option<i64> {
        match *self {
            Phase::ExactTurn { k, m } if 4 % m == 0 => Some((k * (4 / m)).rem_euclid(8)),
            _ => None,
        }
    }

    /// The integer `a` with angle `a * 2 pi / 3`, when exact.
    pub fn z3_index(&self) -> Option<i64> {
        match *self {
            Phase::ExactTurn { k, m } if k == 0 => {
                let _ = m;
                Some(0)
            }
            Phase::ExactTurn { k, m } if m == 3 && k % 2 == 0 => Some((k / 2).rem_euclid(3)),
            _ => None,
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}
