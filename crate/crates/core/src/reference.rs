//! Direct complex and scalar arithmetic used as ground truth by the verifier.

use std::cell::Cell;

use thiserror::Error;

use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("complex division by zero")]
pub struct ZeroDivisor;

/// `re + j·im`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComplexPair {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexPair {
    pub fn new(re: impl Into<Rational>, im: impl Into<Rational>) -> Self {
        ComplexPair {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

pub fn complex_square(z: &ComplexPair) -> ComplexPair {
    let two = Rational::from(2);
    ComplexPair {
        re: z.re.square() - z.im.square(),
        im: &two * &(&z.re * &z.im),
    }
}

/// Schoolbook product: four multiplications, two additions.
pub fn complex_mul(z1: &ComplexPair, z2: &ComplexPair) -> ComplexPair {
    ComplexPair {
        re: &z1.re * &z2.re - &z1.im * &z2.im,
        im: &z1.re * &z2.im + &z1.im * &z2.re,
    }
}

/// Real multiplications and additions spent by one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub multiplications: usize,
    pub additions: usize,
}

#[derive(Default)]
struct Counter {
    muls: Cell<usize>,
    adds: Cell<usize>,
}

impl Counter {
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        self.muls.set(self.muls.get() + 1);
        a * b
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        self.adds.set(self.adds.get() + 1);
        a + b
    }

    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        self.adds.set(self.adds.get() + 1);
        a - b
    }

    fn counts(&self) -> OpCounts {
        OpCounts {
            multiplications: self.muls.get(),
            additions: self.adds.get(),
        }
    }
}

/// Three-multiplication complex product:
/// `m1 = a2(a1+b1)`, `m2 = a1(b2-a2)`, `m3 = b1(a2+b2)`,
/// `re = m1 - m3`, `im = m1 + m2`.
pub fn complex_mul_gauss(z1: &ComplexPair, z2: &ComplexPair) -> ComplexPair {
    complex_mul_gauss_counted(z1, z2).0
}

pub fn complex_mul_gauss_counted(z1: &ComplexPair, z2: &ComplexPair) -> (ComplexPair, OpCounts) {
    let k = Counter::default();
    let (a1, b1, a2, b2) = (&z1.re, &z1.im, &z2.re, &z2.im);
    let m1 = k.mul(a2, &k.add(a1, b1));
    let m2 = k.mul(a1, &k.sub(b2, a2));
    let m3 = k.mul(b1, &k.add(a2, b2));
    let re = k.sub(&m1, &m3);
    let im = k.add(&m1, &m2);
    (ComplexPair { re, im }, k.counts())
}

/// Quotient via multiplication by the conjugate of the divisor.
pub fn complex_div(z1: &ComplexPair, z2: &ComplexPair) -> Result<ComplexPair, ZeroDivisor> {
    let den = z2.re.square() + z2.im.square();
    if den.is_zero() {
        return Err(ZeroDivisor);
    }
    let re = &z1.re * &z2.re + &z1.im * &z2.im;
    let im = &z2.re * &z1.im - &z1.re * &z2.im;
    Ok(ComplexPair {
        re: re.checked_div(&den).map_err(|_| ZeroDivisor)?,
        im: im.checked_div(&den).map_err(|_| ZeroDivisor)?,
    })
}

/// `ab = ((a+b)^2 - a^2 - b^2) / 2`.
pub fn logan_product(a: &Rational, b: &Rational) -> Rational {
    let half = Rational::new(1, 2).expect("nonzero");
    half * ((a + b).square() - a.square() - b.square())
}

/// `ab = ((a+b)^2 - (a-b)^2) / 4`.
pub fn quarter_square_product(a: &Rational, b: &Rational) -> Rational {
    let quarter = Rational::new(1, 4).expect("nonzero");
    quarter * ((a + b).square() - (a - b).square())
}
