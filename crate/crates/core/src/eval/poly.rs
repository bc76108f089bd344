//! Sparse multivariate polynomials over exact rationals and their quotients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::numeric::{NumericError, Rational};

/// Sparse polynomial keyed by exponent vector. Zero coefficients are never
/// stored, so equal polynomials have identical term maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: Arc<[String]>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(vars: Arc<[String]>) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Arc<[String]>, c: Rational) -> Self {
        let n = vars.len();
        Self::from_terms(vars, [(vec![0; n], c)])
    }

    pub fn var(vars: Arc<[String]>, idx: usize) -> Self {
        assert!(idx < vars.len(), "variable index out of range");
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::from_terms(vars, [(e, Rational::one())])
    }

    /// Sums the given terms; repeated exponent vectors are combined.
    pub fn from_terms(
        vars: Arc<[String]>,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Self {
        let mut p = Polynomial::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn check_vars(&self, rhs: &Polynomial) {
        assert!(
            self.vars == rhs.vars,
            "polynomials over different variable lists"
        );
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Polynomial) -> Polynomial {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.vars.clone());
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        self.check_vars(rhs);
        let mut out = Polynomial::zero(self.vars.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn square(&self) -> Polynomial {
        self.mul(self)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "evaluation point arity");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .filter(|(k, _)| **k > 0)
                    .fold(c.clone(), |acc, (k, x)| (0..*k).fold(acc, |acc, _| acc * x))
            })
            .sum()
    }

    /// Terms in display order: higher total degree first, then
    /// lexicographically larger exponent vectors first.
    pub fn ordered_terms(&self) -> Vec<(&Vec<u32>, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    /// `Some(c)` with `self == c * other`, when such a constant exists.
    pub fn ratio_to(&self, other: &Polynomial) -> Option<Rational> {
        self.check_vars(other);
        if other.is_zero() || self.terms.len() != other.terms.len() {
            return None;
        }
        let (e, c_other) = other.terms.iter().next().unwrap();
        let c_self = self.terms.get(e)?;
        let ratio = c_self.checked_div(c_other).ok()?;
        (other.scale(&ratio) == *self).then_some(ratio)
    }
}

fn fmt_monomial(vars: &[String], e: &[u32]) -> String {
    e.iter()
        .zip(vars)
        .filter(|(k, _)| **k > 0)
        .map(|(k, v)| {
            if *k == 1 {
                v.clone()
            } else {
                format!("{v}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.ordered_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mono = fmt_monomial(&self.vars, e);
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.vars == other.vars).then(|| self.terms.cmp(&other.terms))
    }
}

/// Quotient of two polynomials. Not reduced by polynomial GCD; the only
/// normalization is folding a constant denominator into the numerator, so a
/// polynomial value always has denominator `1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFn {
    pub fn from_poly(p: Polynomial) -> Self {
        let one = Polynomial::constant(p.vars().clone(), Rational::one());
        RationalFn { num: p, den: one }
    }

    /// Fails when `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, NumericError> {
        if den.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(RationalFn { num, den }.normalized())
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return RationalFn::from_poly(self.num);
        }
        match self.den.as_constant() {
            Some(c) if !c.is_one() => {
                let inv = c.recip().expect("denominator is never zero");
                RationalFn::from_poly(self.num.scale(&inv))
            }
            _ => self,
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    pub fn add(&self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            RationalFn {
                num: self.num.add(&rhs.num),
                den: self.den.clone(),
            }
            .normalized()
        } else {
            RationalFn {
                num: self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
                den: self.den.mul(&rhs.den),
            }
            .normalized()
        }
    }

    pub fn scale(&self, c: &Rational) -> RationalFn {
        RationalFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn mul(&self, rhs: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        }
        .normalized()
    }

    pub fn square(&self) -> RationalFn {
        self.mul(self)
    }

    pub fn div(&self, rhs: &RationalFn) -> Result<RationalFn, NumericError> {
        if rhs.num.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(RationalFn {
            num: self.num.mul(&rhs.den),
            den: self.den.mul(&rhs.num),
        }
        .normalized())
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, NumericError> {
        self.num.eval(point).checked_div(&self.den.eval(point))
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

pub fn var_list(labels: &[String]) -> Arc<[String]> {
    labels.to_vec().into()
}
