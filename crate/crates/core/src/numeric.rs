//! Exact rational scalars and small dense rational matrices.
//!
//! Every constant that appears in a scheme (matrix entries, scale factors)
//! is a [`Rational`]. There is no floating-point type anywhere in the core.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {lhs_rows}x{lhs_cols} times {rhs_rows}x{rhs_cols}")]
    DimensionMismatch {
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {actual}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("invalid rational literal {0:?}")]
    Parse(String),
}

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds `num/den`, reducing to canonical form.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, NumericError> {
        let den = den.into();
        if den.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    /// `num / 2^frac_bits`.
    pub fn from_scaled(num: BigInt, frac_bits: u32) -> Self {
        Rational(BigRational::new(num, BigInt::one() << frac_bits))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, NumericError> {
        if rhs.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational, NumericError> {
        Rational::one().checked_div(self)
    }

    pub fn square(&self) -> Rational {
        Rational(&self.0 * &self.0)
    }

    /// Truncates toward zero.
    pub fn trunc_to_integer(&self) -> BigInt {
        self.0.to_integer()
    }

    pub fn classify(&self) -> ConstClass {
        classify_constant(self)
    }

    /// Parses decimal notation such as `-0.375` exactly.
    pub fn from_decimal_str(s: &str) -> Result<Self, NumericError> {
        let err = || NumericError::Parse(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let mantissa: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| err())?
        };
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = Rational(BigRational::new(mantissa, den));
        Ok(if neg { -r } else { r })
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl FromStr for Rational {
    type Err = NumericError;

    /// Accepts `p` or `p/q` with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NumericError::Parse(s.to_string());
        let t = s.trim();
        let parse_int = |x: &str| -> Result<BigInt, NumericError> {
            let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(err());
            }
            x.parse::<BigInt>().map_err(|_| err())
        };
        match t.split_once('/') {
            None => Ok(Rational::from_integer(parse_int(t)?)),
            Some((n, d)) => {
                let n = parse_int(n)?;
                if d.starts_with(['-', '+']) {
                    return Err(err());
                }
                let d = parse_int(d)?;
                Rational::new(n, d).map_err(|_| err())
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Cost-relevant class of a constant coefficient. The sign is not part of
/// the class: negation is free in the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstClass {
    Zero,
    PlusMinusOne,
    /// `|c| = 2^k` with `k != 0`.
    PowerOfTwo(i64),
    General,
}

pub fn classify_constant(c: &Rational) -> ConstClass {
    if c.is_zero() {
        return ConstClass::Zero;
    }
    let n = c.numer().abs();
    let d = c.denom();
    let is_pow2 = |x: &BigInt| x.is_positive() && (x & (x - BigInt::one())).is_zero();
    if n.is_one() && d.is_one() {
        ConstClass::PlusMinusOne
    } else if d.is_one() && is_pow2(&n) {
        ConstClass::PowerOfTwo(n.bits() as i64 - 1)
    } else if n.is_one() && is_pow2(d) {
        ConstClass::PowerOfTwo(-(d.bits() as i64 - 1))
    } else {
        ConstClass::General
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, NumericError> {
        if rows == 0 || cols == 0 {
            return Err(NumericError::EmptyMatrix { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(NumericError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        Ok(RMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from integer rows.
    ///
    /// Panics on ragged or empty input; intended for literal tables.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(
            rows.iter().all(|r| r.as_ref().len() == cols),
            "ragged matrix literal"
        );
        let entries = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| Rational::from(v)))
            .collect();
        RMatrix::new(rows.len(), cols, entries).expect("empty matrix literal")
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, NumericError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(NumericError::EntryCount {
                    rows: r,
                    cols: c,
                    expected: r * c,
                    actual: entries.len() + row.len(),
                });
            }
            entries.extend(row);
        }
        RMatrix::new(r, c, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![Rational::one(); n])
    }

    pub fn diag(values: &[Rational]) -> Self {
        let n = values.len();
        let mut entries = vec![Rational::zero(); n * n];
        for (i, v) in values.iter().enumerate() {
            entries[i * n + i] = v.clone();
        }
        RMatrix::new(n, n, entries).expect("empty diagonal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix::new(rows, cols, vec![Rational::zero(); rows * cols]).expect("empty zero matrix")
    }

    /// Column of `n` ones.
    pub fn ones_column(n: usize) -> Self {
        RMatrix::new(n, 1, vec![Rational::one(); n]).expect("empty ones column")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.cols)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn mat_mul(&self, rhs: &RMatrix) -> Result<RMatrix, NumericError> {
        if self.cols != rhs.rows {
            return Err(NumericError::DimensionMismatch {
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                out.push(
                    (0..self.cols)
                        .filter(|&k| !self.get(i, k).is_zero())
                        .map(|k| self.get(i, k) * rhs.get(k, j))
                        .sum(),
                );
            }
        }
        RMatrix::new(self.rows, rhs.cols, out)
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i, j] * rhs`.
    pub fn kron(&self, rhs: &RMatrix) -> RMatrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = vec![Rational::zero(); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k) * cols + j * rhs.cols + l] = a * rhs.get(k, l);
                    }
                }
            }
        }
        RMatrix::new(rows, cols, out).expect("kron of non-empty matrices")
    }

    /// Block-diagonal `[self 0; 0 rhs]`.
    pub fn block_diag(&self, rhs: &RMatrix) -> RMatrix {
        let rows = self.rows + rhs.rows;
        let cols = self.cols + rhs.cols;
        let mut out = vec![Rational::zero(); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i * cols + j] = self.get(i, j).clone();
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out[(self.rows + i) * cols + self.cols + j] = rhs.get(i, j).clone();
            }
        }
        RMatrix::new(rows, cols, out).expect("block_diag of non-empty matrices")
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "matrix-vector width mismatch");
        self.row_iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, x)| c * x)
                    .sum()
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RMatrix{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for (r, row) in cells.chunks(self.cols).enumerate() {
            if r > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{cell:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Number of bits needed for `|n|` (0 for zero).
pub fn magnitude_bits(n: &BigInt) -> u64 {
    n.bits()
}

/// `true` when `n` lies in the symmetric signed range `|n| < 2^(word_bits-1)`.
pub fn fits_signed(n: &BigInt, word_bits: u32) -> bool {
    n.magnitude().bits() < u64::from(word_bits)
}

pub(crate) fn div_trunc(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_rem(d).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
        assert_eq!(q(2, 4) * Rational::from(2), Rational::one());
        assert_eq!(q(2, 4).to_string(), "1/2");
        assert_eq!(
            Rational::one().checked_div(&Rational::zero()),
            Err(NumericError::DivisionByZero)
        );
        assert_eq!(Rational::new(1, 0), Err(NumericError::DivisionByZero));
    }

    #[test]
    fn zero_is_canonical() {
        let z = q(0, 7);
        assert!(z.denom().is_one());
        assert_eq!(z.to_string(), "0");
        assert!((q(3, 5) - q(3, 5)).denom().is_one());
    }

    #[test]
    fn negative_denominator_normalized() {
        let r = q(3, -6);
        assert_eq!(r.to_string(), "-1/2");
        assert!(r.denom().is_positive());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("1/4".parse::<Rational>().unwrap(), q(1, 4));
        assert_eq!("-6/8".parse::<Rational>().unwrap(), q(-3, 4));
        assert_eq!("17".parse::<Rational>().unwrap(), Rational::from(17));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("0.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
        assert_eq!(Rational::from_decimal_str("-0.375").unwrap(), q(-3, 8));
        assert_eq!(Rational::from_decimal_str("2.").unwrap(), Rational::from(2));
        assert_eq!(Rational::from_decimal_str(".5").unwrap(), q(1, 2));
        assert!(Rational::from_decimal_str(".").is_err());
        assert!(Rational::from_decimal_str("1e3").is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_constant(&q(1, 4)), ConstClass::PowerOfTwo(-2));
        assert_eq!(
            classify_constant(&Rational::from(-1)),
            ConstClass::PlusMinusOne
        );
        assert_eq!(classify_constant(&q(3, 5)), ConstClass::General);
        assert_eq!(classify_constant(&Rational::zero()), ConstClass::Zero);
        assert_eq!(
            classify_constant(&Rational::from(-8)),
            ConstClass::PowerOfTwo(3)
        );
        assert_eq!(
            classify_constant(&Rational::from(2)),
            ConstClass::PowerOfTwo(1)
        );
        assert_eq!(classify_constant(&Rational::from(6)), ConstClass::General);
        assert_eq!(classify_constant(&q(-1, 2)), ConstClass::PowerOfTwo(-1));
        assert_eq!(classify_constant(&q(3, 4)), ConstClass::General);
    }

    #[test]
    fn mat_mul_examples() {
        let a2 = RMatrix::from_ints(&[[1, 0], [-1, 1]]);
        let t23 = RMatrix::from_ints(&[[1, 1, 0], [0, 0, 1]]);
        assert_eq!(
            a2.mat_mul(&t23).unwrap(),
            RMatrix::from_ints(&[[1, 1, 0], [-1, -1, 1]])
        );

        let x = RMatrix::from_ints(&[[1, 2], [3, 4], [5, 6]]);
        assert_eq!(RMatrix::identity(3).mat_mul(&x).unwrap(), x);

        let m = RMatrix::from_ints(&[[1, 2, 3], [4, 5, 6]]);
        assert!(matches!(
            m.mat_mul(&m),
            Err(NumericError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kron_examples() {
        let h2 = RMatrix::from_ints(&[[1, 1], [1, -1]]);
        let h6 = RMatrix::identity(3).kron(&h2);
        let expected = RMatrix::from_ints(&[
            [1, 1, 0, 0, 0, 0],
            [1, -1, 0, 0, 0, 0],
            [0, 0, 1, 1, 0, 0],
            [0, 0, 1, -1, 0, 0],
            [0, 0, 0, 0, 1, 1],
            [0, 0, 0, 0, 1, -1],
        ]);
        assert_eq!(h6, expected);

        let stack = RMatrix::ones_column(2).kron(&RMatrix::identity(4));
        let mut rows = Vec::new();
        for _ in 0..2 {
            for i in 0..4 {
                let mut r = [0i64; 4];
                r[i] = 1;
                rows.push(r);
            }
        }
        assert_eq!(stack, RMatrix::from_ints(&rows));

        let x = RMatrix::from_ints(&[[1, 2, 3], [4, 5, 6]]);
        assert_eq!(RMatrix::identity(1).kron(&x), x);
    }

    #[test]
    fn matrix_construction_errors() {
        assert!(matches!(
            RMatrix::new(0, 2, vec![]),
            Err(NumericError::EmptyMatrix { .. })
        ));
        assert!(matches!(
            RMatrix::new(2, 2, vec![Rational::one()]),
            Err(NumericError::EntryCount { .. })
        ));
        assert!(RMatrix::zeros(2, 3).entries().iter().all(Rational::is_zero));
    }

    #[test]
    fn fits_signed_boundaries() {
        assert!(fits_signed(&BigInt::from(127), 8));
        assert!(fits_signed(&BigInt::from(-127), 8));
        assert!(!fits_signed(&BigInt::from(128), 8));
        assert!(!fits_signed(&BigInt::from(-128), 8));
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..200).prop_map(|(n, d)| q(n, d))
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = RMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                RMatrix::new(r, c, v.into_iter().map(Rational::from).collect()).unwrap()
            })
        })
    }

    fn canonical(r: &Rational) -> bool {
        r.denom().is_positive() && num_integer::gcd(r.numer().clone(), r.denom().clone()).is_one()
    }

    proptest! {
        #[test]
        fn results_are_canonical(a in rational(), b in rational()) {
            prop_assert!(canonical(&(&a + &b)));
            prop_assert!(canonical(&(&a - &b)));
            prop_assert!(canonical(&(&a * &b)));
            if !b.is_zero() {
                prop_assert!(canonical(&a.checked_div(&b).unwrap()));
            }
        }

        #[test]
        fn field_axioms(a in rational(), b in rational(), c in rational()) {
            prop_assert_eq!((&a + &b) + c.clone(), &a + &(&b + &c));
            prop_assert_eq!((&a * &b) * c.clone(), &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a - &a, Rational::zero());
        }

        #[test]
        fn display_parse_round_trip(a in rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn kron_dimension_law(a in small_matrix(3), b in small_matrix(3)) {
            let k = a.kron(&b);
            prop_assert_eq!(k.rows(), a.rows() * b.rows());
            prop_assert_eq!(k.cols(), a.cols() * b.cols());
        }

        #[test]
        fn kron_mixed_product(
            (a, c) in (1usize..3, 1usize..3, 1usize..3).prop_flat_map(|(r, k, m)| {
                (
                    proptest::collection::vec(-2i64..3, r * k),
                    proptest::collection::vec(-2i64..3, k * m),
                ).prop_map(move |(x, y)| (
                    RMatrix::new(r, k, x.into_iter().map(Rational::from).collect()).unwrap(),
                    RMatrix::new(k, m, y.into_iter().map(Rational::from).collect()).unwrap(),
                ))
            }),
            (b, d) in (1usize..3, 1usize..3, 1usize..3).prop_flat_map(|(r, k, m)| {
                (
                    proptest::collection::vec(-2i64..3, r * k),
                    proptest::collection::vec(-2i64..3, k * m),
                ).prop_map(move |(x, y)| (
                    RMatrix::new(r, k, x.into_iter().map(Rational::from).collect()).unwrap(),
                    RMatrix::new(k, m, y.into_iter().map(Rational::from).collect()).unwrap(),
                ))
            }),
        ) {
            let lhs = a.kron(&b).mat_mul(&c.kron(&d)).unwrap();
            let rhs = a.mat_mul(&c).unwrap().kron(&b.mat_mul(&d).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
