//! Weights in fundamental-weight coordinates and doubled ε-coordinates.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Integral weight in the fundamental-weight basis.
///
/// Every weight of a finite-dimensional module has integer fundamental
/// coordinates (spin weights included), so no scaling is needed here;
/// half-integers only show up in ε-coordinates, see [`EpsCoords`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub SmallVec<[i32; 8]>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(SmallVec::from_elem(0, rank))
    }

    pub fn from_slice(v: &[i32]) -> Self {
        Weight(SmallVec::from_slice(v))
    }

    /// The fundamental weight ω_i, 1-based.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut w = Self::zero(rank);
        w.0[i - 1] = 1;
        w
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i32) -> Self {
        Weight(self.0.iter().map(|&c| c * k).collect())
    }

    /// Coordinate sum (the S-value of a dominant weight).
    pub fn s_value(&self) -> i64 {
        self.0.iter().map(|&c| c as i64).sum()
    }

    /// Number of nonzero coordinates (the L-value).
    pub fn l_value(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn reversed(&self) -> Self {
        Weight(self.0.iter().rev().copied().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &i32> {
        self.0.iter()
    }

    /// Compact label string: single digits run together, larger labels
    /// in parentheses, e.g. `000000(10)`.
    pub fn compact(&self) -> String {
        let mut s = String::new();
        for &c in &self.0 {
            if (0..10).contains(&c) {
                s.push(char::from(b'0' + c as u8));
            } else {
                s.push_str(&format!("({c})"));
            }
        }
        s
    }

    /// Inverse of [`Weight::compact`].
    pub fn parse_compact(s: &str) -> Option<Self> {
        let mut out = SmallVec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c == '(' {
                let mut num = String::new();
                for d in chars.by_ref() {
                    if d == ')' {
                        break;
                    }
                    num.push(d);
                }
                out.push(num.parse().ok()?);
            } else {
                out.push(c.to_digit(10)? as i32);
            }
        }
        Some(Weight(out))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Index<usize> for Weight {
    type Output = i32;
    fn index(&self, i: usize) -> &i32 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Weight {
    fn index_mut(&mut self, i: usize) -> &mut i32 {
        &mut self.0[i]
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(o.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(o.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<i32>> for Weight {
    fn from(v: Vec<i32>) -> Self {
        Weight(SmallVec::from_vec(v))
    }
}

impl From<&[i32]> for Weight {
    fn from(v: &[i32]) -> Self {
        Weight::from_slice(v)
    }
}

/// ε-coordinates stored doubled, so `(½,…,½)` is `(1,…,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EpsCoords(pub Vec<i64>);

impl EpsCoords {
    pub fn doubled(&self) -> &[i64] {
        &self.0
    }

    /// True value of coordinate `i` as a (numerator, denominator) pair.
    pub fn coord(&self, i: usize) -> (i64, i64) {
        let v = self.0[i];
        if v % 2 == 0 {
            (v / 2, 1)
        } else {
            (v, 2)
        }
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|v| v % 2 == 0)
    }
}

impl fmt::Display for EpsCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.0.len())
            .map(|i| match self.coord(i) {
                (n, 1) => n.to_string(),
                (n, d) => format!("{n}/{d}"),
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}
