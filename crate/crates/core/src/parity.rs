//! Z₂ grading.

use std::fmt;
use std::ops::Add;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: usize) -> Parity {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        self + Parity::Odd
    }

    /// `(−1)^{ab}` as a float.
    pub fn sign(a: Parity, b: Parity) -> f64 {
        if a.is_odd() && b.is_odd() {
            -1.0
        } else {
            1.0
        }
    }

    /// `(−1)^{a}` as a float.
    pub fn sign1(self) -> f64 {
        if self.is_odd() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn both() -> [Parity; 2] {
        [Parity::Even, Parity::Odd]
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, o: Parity) -> Parity {
        if self == o {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}
