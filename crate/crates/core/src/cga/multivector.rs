//! Dense multivectors of the conformal algebra Cl(4,1).
//!
//! A multivector holds 32 coefficients, one per basis blade. Blade `i` is the
//! product of the basis vectors whose bits are set in `i` (bit `k` set means
//! `e{k+1}` is present), taken in ascending index order. Index 0 is the scalar
//! and index 31 the pseudoscalar `e12345`.
//!
//! The metric is `e1² = e2² = e3² = e4² = +1` and `e5² = −1`. With
//! `eo = 0.5(e5 − e4)` and `einf = e4 + e5` both null vectors square to zero
//! and `eo · einf = −1`.

use std::fmt;
use std::ops::{Add, AddAssign, BitOr, BitXor, Index, IndexMut, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of basis blades in Cl(4,1).
pub const BLADE_COUNT: usize = 32;

/// Blade indices for the symbols that appear in formulas.
pub mod blade {
    pub const SCALAR: usize = 0;
    pub const E1: usize = 0b00001;
    pub const E2: usize = 0b00010;
    pub const E3: usize = 0b00100;
    pub const E4: usize = 0b01000;
    pub const E5: usize = 0b10000;
    pub const E12: usize = E1 | E2;
    pub const E13: usize = E1 | E3;
    pub const E23: usize = E2 | E3;
    pub const E45: usize = E4 | E5;
    pub const E12345: usize = 0b11111;
}

/// Bit of the single basis vector with negative square.
const NEGATIVE_AXES: usize = blade::E5;

/// Sign of the product of two basis blades, as a lookup table.
///
/// The sign combines the parity of transpositions needed to bring `a·b` into
/// canonical order with the squares of the shared basis vectors.
const PRODUCT_SIGN: [[i8; BLADE_COUNT]; BLADE_COUNT] = build_sign_table();

const fn reorder_is_odd(a: usize, b: usize) -> bool {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    swaps & 1 == 1
}

const fn build_sign_table() -> [[i8; BLADE_COUNT]; BLADE_COUNT] {
    let mut table = [[0i8; BLADE_COUNT]; BLADE_COUNT];
    let mut i = 0;
    while i < BLADE_COUNT {
        let mut j = 0;
        while j < BLADE_COUNT {
            let mut sign: i8 = if reorder_is_odd(i, j) { -1 } else { 1 };
            if (i & j & NEGATIVE_AXES).count_ones() & 1 == 1 {
                sign = -sign;
            }
            table[i][j] = sign;
            j += 1;
        }
        i += 1;
    }
    table
}

/// Sign of the geometric product of basis blades `a` and `b`; the result blade
/// is `a ^ b`.
#[inline]
pub fn blade_product_sign(a: usize, b: usize) -> f64 {
    PRODUCT_SIGN[a][b] as f64
}

/// Grade (number of basis vectors) of a blade index.
#[inline]
pub fn blade_grade(index: usize) -> u32 {
    index.count_ones()
}

/// Name of a blade, e.g. `e135`; the scalar blade is the empty string.
pub fn blade_name(index: usize) -> String {
    if index == 0 {
        return String::new();
    }
    let mut name = String::from("e");
    for k in 0..5 {
        if index & (1 << k) != 0 {
            name.push(char::from(b'1' + k as u8));
        }
    }
    name
}

/// Parses a canonical blade name (`e1`, `e23`, `e12345`, ...). Digits must be
/// strictly ascending and within 1..=5.
pub fn blade_from_name(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('e')?;
    if digits.is_empty() {
        return None;
    }
    let mut index = 0usize;
    let mut last = 0u8;
    for b in digits.bytes() {
        if !(b'1'..=b'5').contains(&b) || b <= last {
            return None;
        }
        last = b;
        index |= 1 << (b - b'1');
    }
    Some(index)
}

#[derive(Clone, Copy, PartialEq)]
pub struct Multivector {
    coeffs: [f64; BLADE_COUNT],
}

/// Serialized as a map from blade name to coefficient, nonzero terms only,
/// with `"1"` for the scalar: `{"1": 1.0, "e14": -1.0}`.
impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<_> = self.terms().collect();
        let mut map = serializer.serialize_map(Some(terms.len()))?;
        for (index, coeff) in terms {
            let key = if index == 0 { "1".to_owned() } else { blade_name(index) };
            map.serialize_entry(&key, &coeff)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = std::collections::BTreeMap::<String, f64>::deserialize(deserializer)?;
        let mut mv = Multivector::zero();
        for (key, coeff) in map {
            let index = if key == "1" {
                0
            } else {
                blade_from_name(&key).ok_or_else(|| D::Error::custom(format!("unknown blade `{key}`")))?
            };
            mv.coeffs[index] = coeff;
        }
        Ok(mv)
    }
}

impl Default for Multivector {
    fn default() -> Self {
        Self::zero()
    }
}

impl Multivector {
    pub const fn zero() -> Self {
        Self {
            coeffs: [0.0; BLADE_COUNT],
        }
    }

    pub const fn from_coeffs(coeffs: [f64; BLADE_COUNT]) -> Self {
        Self { coeffs }
    }

    pub fn scalar(value: f64) -> Self {
        Self::blade(blade::SCALAR, value)
    }

    /// `value` times the basis blade at `index`.
    pub fn blade(index: usize, value: f64) -> Self {
        let mut mv = Self::zero();
        mv.coeffs[index] = value;
        mv
    }

    /// Unit basis blade.
    pub fn basis(index: usize) -> Self {
        Self::blade(index, 1.0)
    }

    /// Euclidean vector `x e1 + y e2 + z e3`.
    pub fn vector(x: f64, y: f64, z: f64) -> Self {
        let mut mv = Self::zero();
        mv.coeffs[blade::E1] = x;
        mv.coeffs[blade::E2] = y;
        mv.coeffs[blade::E3] = z;
        mv
    }

    /// Conformal origin `eo = 0.5(e5 − e4)`.
    pub fn eo() -> Self {
        let mut mv = Self::zero();
        mv.coeffs[blade::E4] = -0.5;
        mv.coeffs[blade::E5] = 0.5;
        mv
    }

    /// Point at infinity `einf = e4 + e5`.
    pub fn einf() -> Self {
        let mut mv = Self::zero();
        mv.coeffs[blade::E4] = 1.0;
        mv.coeffs[blade::E5] = 1.0;
        mv
    }

    pub fn coeffs(&self) -> &[f64; BLADE_COUNT] {
        &self.coeffs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.coeffs[index]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[blade::SCALAR]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Sum of squared coefficients. This is the Euclidean norm of the
    /// coefficient array, not the (indefinite) algebra norm, and is used to
    /// scale tolerances.
    pub fn coeff_norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Keeps only the blades of the given grade.
    pub fn grade(&self, grade: u32) -> Self {
        let mut out = Self::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if blade_grade(i) == grade {
                out.coeffs[i] = *c;
            }
        }
        out
    }

    /// Reversion: reverses the order of basis vectors in every blade.
    pub fn reverse(&self) -> Self {
        let mut out = *self;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let g = blade_grade(i);
            if (g * g.saturating_sub(1) / 2) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Sums `sign·a·b` over blade pairs accepted by `keep`, into blade
    /// `i ^ j`. Each blade is accumulated with Neumaier compensation so
    /// structurally cancelling terms (such as `T·T⁻¹`) cancel exactly.
    fn product_with(&self, rhs: &Self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut sum = [0.0; BLADE_COUNT];
        let mut comp = [0.0; BLADE_COUNT];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if *b == 0.0 || !keep(i, j) {
                    continue;
                }
                let k = i ^ j;
                let v = PRODUCT_SIGN[i][j] as f64 * a * b;
                let t = sum[k] + v;
                comp[k] += if sum[k].abs() >= v.abs() {
                    (sum[k] - t) + v
                } else {
                    (v - t) + sum[k]
                };
                sum[k] = t;
            }
        }
        for (s, c) in sum.iter_mut().zip(comp) {
            *s += c;
        }
        Self { coeffs: sum }
    }

    pub fn geometric_product(&self, rhs: &Self) -> Self {
        self.product_with(rhs, |_, _| true)
    }

    /// Outer (wedge) product: the part of the geometric product between
    /// blades that share no basis vector.
    pub fn outer_product(&self, rhs: &Self) -> Self {
        self.product_with(rhs, |i, j| i & j == 0)
    }

    /// Left contraction `self ⌋ rhs`: for basis blades `A ⌋ B` is the
    /// geometric product when `A ⊆ B` and zero otherwise. For a conformal
    /// point `P`, `P ⌋ e2` is its y coordinate.
    pub fn inner_product(&self, rhs: &Self) -> Self {
        self.product_with(rhs, |i, j| i & j == i)
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Nonzero terms as `(blade index, coefficient)` in index order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| (i, *c))
    }
}

impl Index<usize> for Multivector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.coeffs[index]
    }
}

impl IndexMut<usize> for Multivector {
    fn index_mut(&mut self, index: usize) -> &mut f64 {
        &mut self.coeffs[index]
    }
}

impl Add for Multivector {
    type Output = Multivector;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += b;
        }
    }
}

impl Sub for Multivector {
    type Output = Multivector;

    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;

    fn mul(mut self, rhs: f64) -> Self {
        for c in self.coeffs.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

impl Mul<Multivector> for f64 {
    type Output = Multivector;

    fn mul(self, rhs: Multivector) -> Multivector {
        rhs * self
    }
}

impl Mul for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: Self) -> Self {
        self.geometric_product(&rhs)
    }
}

impl BitXor for Multivector {
    type Output = Multivector;

    fn bitxor(self, rhs: Self) -> Self {
        self.outer_product(&rhs)
    }
}

impl BitOr for Multivector {
    type Output = Multivector;

    fn bitor(self, rhs: Self) -> Self {
        self.inner_product(&rhs)
    }
}

impl From<f64> for Multivector {
    fn from(value: f64) -> Self {
        Self::scalar(value)
    }
}

/// Renders `a + b e1 - c e12 ...` with nonzero blades in index order.
impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.terms() {
            let name = blade_name(i);
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c < 0.0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            if !name.is_empty() {
                write!(f, " {name}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent product of two blades: multiply the basis vectors one at a
    /// time, bubbling each into place and cancelling squares.
    fn slow_blade_product(a: usize, b: usize) -> (f64, usize) {
        let mut factors: Vec<usize> = (0..5).filter(|k| a & (1 << k) != 0).collect();
        factors.extend((0..5).filter(|k| b & (1 << k) != 0));
        let square = [1.0, 1.0, 1.0, 1.0, -1.0];
        let mut sign = 1.0;
        // bubble sort with sign flips, contracting equal neighbours
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < factors.len() {
                if factors[i] > factors[i + 1] {
                    factors.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if factors[i] == factors[i + 1] {
                    sign *= square[factors[i]];
                    factors.drain(i..i + 2);
                    changed = true;
                    continue;
                }
                i += 1;
            }
            if !changed {
                break;
            }
        }
        let index = factors.iter().fold(0, |acc, k| acc | (1 << k));
        (sign, index)
    }

    #[test]
    fn sign_table_matches_bubble_sort_oracle() {
        for a in 0..BLADE_COUNT {
            for b in 0..BLADE_COUNT {
                let (sign, index) = slow_blade_product(a, b);
                assert_eq!(index, a ^ b);
                assert_eq!(blade_product_sign(a, b), sign, "a={a:05b} b={b:05b}");
            }
        }
    }

    #[test]
    fn basis_squares() {
        let e1 = Multivector::basis(blade::E1);
        assert_eq!(e1 * e1, Multivector::scalar(1.0));
        let e4 = Multivector::basis(blade::E4);
        assert_eq!(e4 * e4, Multivector::scalar(1.0));
        let e5 = Multivector::basis(blade::E5);
        assert_eq!(e5 * e5, Multivector::scalar(-1.0));
    }

    #[test]
    fn orthogonal_vectors_anticommute() {
        let e1 = Multivector::basis(blade::E1);
        let e2 = Multivector::basis(blade::E2);
        assert_eq!(e1 * e2, Multivector::basis(blade::E12));
        assert_eq!(e2 * e1, Multivector::blade(blade::E12, -1.0));
    }

    #[test]
    fn null_vectors() {
        let eo = Multivector::eo();
        let einf = Multivector::einf();
        assert_eq!(eo * eo, Multivector::zero());
        assert_eq!(einf * einf, Multivector::zero());
        assert_eq!(eo * einf + einf * eo, Multivector::scalar(-2.0));
    }

    #[test]
    fn wedge_basics() {
        let e1 = Multivector::basis(blade::E1);
        let e2 = Multivector::basis(blade::E2);
        assert_eq!(e1 ^ e1, Multivector::zero());
        assert_eq!(e1 ^ e2, Multivector::basis(blade::E12));
        // einf ∧ eo is exactly e45
        assert_eq!(
            Multivector::einf() ^ Multivector::eo(),
            Multivector::basis(blade::E45)
        );
    }

    #[test]
    fn left_contraction_basics() {
        let e1 = Multivector::basis(blade::E1);
        let e2 = Multivector::basis(blade::E2);
        let e12 = Multivector::basis(blade::E12);
        assert_eq!(e1 | e1, Multivector::scalar(1.0));
        // a bivector cannot contract onto a vector
        assert_eq!(e12 | e2, Multivector::zero());
        // e2 ⌋ e12 = e2 e1 e2 = -e1
        assert_eq!(e2 | e12, Multivector::blade(blade::E1, -1.0));
    }

    #[test]
    fn blade_names_round_trip() {
        for i in 1..BLADE_COUNT {
            assert_eq!(blade_from_name(&blade_name(i)), Some(i));
        }
        assert_eq!(blade_from_name("e21"), None);
        assert_eq!(blade_from_name("e6"), None);
        assert_eq!(blade_from_name("e11"), None);
        assert_eq!(blade_from_name("e"), None);
    }

    #[test]
    fn display_form() {
        let mv = Multivector::scalar(1.0) + Multivector::blade(blade::E12, -0.5)
            + Multivector::blade(blade::E12345, 2.0);
        assert_eq!(mv.to_string(), "1 - 0.5 e12 + 2 e12345");
        assert_eq!(Multivector::zero().to_string(), "0");
    }

    #[test]
    fn reverse_signs_by_grade() {
        let mut all = Multivector::zero();
        for i in 0..BLADE_COUNT {
            all[i] = 1.0;
        }
        let rev = all.reverse();
        for i in 0..BLADE_COUNT {
            let expected = match blade_grade(i) % 4 {
                0 | 1 => 1.0,
                _ => -1.0,
            };
            assert_eq!(rev[i], expected, "blade {i}");
        }
    }
}
