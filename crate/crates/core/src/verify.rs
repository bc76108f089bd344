//! Equivalence checking of schemes against direct complex arithmetic.
//!
//! Two independent paths decide the same question:
//! [`verify_symbolic`] expands the scheme into rational functions and tests
//! the residual polynomial for identical zero, and [`verify_exhaustive`]
//! compares point evaluations on an integer grid against
//! [`crate::reference`].

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eval::poly::var_list;
use crate::eval::{
    eval_exact, eval_symbolic, grid_point, grid_size, EvalError, Polynomial, RationalFn,
};
use crate::numeric::Rational;
use crate::reference::{self, ComplexPair};
use crate::scheme::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    ComplexSquare,
    ComplexMul,
    ComplexDiv,
    ScalarProduct,
}

impl ReferenceKind {
    /// Argument names in reference order.
    pub fn arguments(self) -> &'static [&'static str] {
        match self {
            ReferenceKind::ComplexSquare => &["re", "im"],
            ReferenceKind::ComplexMul | ReferenceKind::ComplexDiv => &["re1", "im1", "re2", "im2"],
            ReferenceKind::ScalarProduct => &["x", "y"],
        }
    }

    pub fn output_arity(self) -> usize {
        match self {
            ReferenceKind::ScalarProduct => 1,
            _ => 2,
        }
    }

    pub fn parse(s: &str) -> Option<ReferenceKind> {
        Some(match s {
            "square" => ReferenceKind::ComplexSquare,
            "mul" => ReferenceKind::ComplexMul,
            "div" => ReferenceKind::ComplexDiv,
            "product" => ReferenceKind::ScalarProduct,
            _ => return None,
        })
    }
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::ComplexSquare => "square",
            ReferenceKind::ComplexMul => "mul",
            ReferenceKind::ComplexDiv => "div",
            ReferenceKind::ScalarProduct => "product",
        })
    }
}

/// A reference function together with the map from its arguments to the
/// scheme's inputs: argument `k` is scheme input `binding[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReferenceId {
    kind: ReferenceKind,
    binding: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("binding {binding:?} is not a permutation of the {arity} arguments of {kind}")]
    Binding {
        kind: ReferenceKind,
        arity: usize,
        binding: Vec<usize>,
    },
    #[error("unknown input label {0:?} in binding")]
    UnknownLabel(String),
    #[error("scheme has {scheme_inputs} inputs and {scheme_outputs} outputs; {kind} needs {inputs} and {outputs}")]
    Arity {
        kind: ReferenceKind,
        scheme_inputs: usize,
        scheme_outputs: usize,
        inputs: usize,
        outputs: usize,
    },
    #[error("exhaustive radius must be at least 1")]
    Radius,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl ReferenceId {
    pub fn new(kind: ReferenceKind, binding: Vec<usize>) -> Result<Self, VerifyError> {
        let arity = kind.arguments().len();
        let mut seen = vec![false; arity];
        let ok = binding.len() == arity
            && binding
                .iter()
                .all(|&i| i < arity && !std::mem::replace(&mut seen[i], true));
        if !ok {
            return Err(VerifyError::Binding {
                kind,
                arity,
                binding,
            });
        }
        Ok(ReferenceId { kind, binding })
    }

    pub fn identity(kind: ReferenceKind) -> Self {
        ReferenceId {
            kind,
            binding: (0..kind.arguments().len()).collect(),
        }
    }

    /// Binding by label: `order[k]` names the scheme input feeding
    /// reference argument `k`.
    pub fn from_labels(
        kind: ReferenceKind,
        scheme_inputs: &[String],
        order: &[&str],
    ) -> Result<Self, VerifyError> {
        let binding = order
            .iter()
            .map(|l| {
                scheme_inputs
                    .iter()
                    .position(|s| s == l)
                    .ok_or_else(|| VerifyError::UnknownLabel(l.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ReferenceId::new(kind, binding)
    }

    pub fn kind(&self) -> ReferenceKind {
        self.kind
    }

    pub fn binding(&self) -> &[usize] {
        &self.binding
    }

    fn check_arity(&self, s: &Scheme) -> Result<(), VerifyError> {
        let inputs = self.binding.len();
        let outputs = self.kind.output_arity();
        if s.input_width() != inputs || s.output_width() != outputs {
            return Err(VerifyError::Arity {
                kind: self.kind,
                scheme_inputs: s.input_width(),
                scheme_outputs: s.output_width(),
                inputs,
                outputs,
            });
        }
        Ok(())
    }

    /// Reference outputs as rational functions over the scheme's inputs.
    pub fn symbolic(&self, input_labels: &[String]) -> Vec<RationalFn> {
        let vars = var_list(input_labels);
        let arg = |k: usize| Polynomial::var(vars.clone(), self.binding[k]);
        let two = Rational::from(2);
        let poly = RationalFn::from_poly;
        match self.kind {
            ReferenceKind::ComplexSquare => {
                let (a, b) = (arg(0), arg(1));
                vec![
                    poly(a.square().sub(&b.square())),
                    poly(a.mul(&b).scale(&two)),
                ]
            }
            ReferenceKind::ComplexMul => {
                let (a1, b1, a2, b2) = (arg(0), arg(1), arg(2), arg(3));
                vec![
                    poly(a1.mul(&a2).sub(&b1.mul(&b2))),
                    poly(a1.mul(&b2).add(&b1.mul(&a2))),
                ]
            }
            ReferenceKind::ComplexDiv => {
                let (a1, b1, a2, b2) = (arg(0), arg(1), arg(2), arg(3));
                let den = a2.square().add(&b2.square());
                let re = a1.mul(&a2).add(&b1.mul(&b2));
                let im = a2.mul(&b1).sub(&a1.mul(&b2));
                vec![
                    RationalFn::new(re, den.clone()).expect("nonzero denominator"),
                    RationalFn::new(im, den).expect("nonzero denominator"),
                ]
            }
            ReferenceKind::ScalarProduct => vec![poly(arg(0).mul(&arg(1)))],
        }
    }

    /// Reference outputs at a point given in scheme input order. `None`
    /// where the reference is undefined (zero divisor).
    pub fn evaluate(&self, inputs: &[Rational]) -> Option<Vec<Rational>> {
        let a = |k: usize| inputs[self.binding[k]].clone();
        match self.kind {
            ReferenceKind::ComplexSquare => {
                let z = reference::complex_square(&ComplexPair { re: a(0), im: a(1) });
                Some(vec![z.re, z.im])
            }
            ReferenceKind::ComplexMul => {
                let z = reference::complex_mul(
                    &ComplexPair { re: a(0), im: a(1) },
                    &ComplexPair { re: a(2), im: a(3) },
                );
                Some(vec![z.re, z.im])
            }
            ReferenceKind::ComplexDiv => reference::complex_div(
                &ComplexPair { re: a(0), im: a(1) },
                &ComplexPair { re: a(2), im: a(3) },
            )
            .ok()
            .map(|z| vec![z.re, z.im]),
            ReferenceKind::ScalarProduct => Some(vec![&a(0) * &a(1)]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// `scheme - reference` for one output, written as a single fraction
/// `numerator / denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub output: usize,
    pub label: String,
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        self.numerator
            .eval(point)
            .checked_div(&self.denominator.eval(point))
            .ok()
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numerator.is_zero() || self.denominator.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

/// Subtracts `r/t` from `p/q`. When one denominator is a constant multiple
/// of the other the larger-coefficient one is kept as the common
/// denominator; otherwise the denominators are cross-multiplied.
fn residual(output: usize, label: &str, scheme: &RationalFn, reference: &RationalFn) -> Residual {
    let (p, q) = (scheme.num(), scheme.den());
    let (r, t) = (reference.num(), reference.den());
    let (numerator, denominator) = if let Some(c) = q.ratio_to(t) {
        // q = c t, so p/q - r/t = (p - c r) / q
        (p.sub(&r.scale(&c)), q.clone())
    } else if let Some(c) = t.ratio_to(q) {
        (p.scale(&c).sub(r), t.clone())
    } else {
        (p.mul(t).sub(&r.mul(q)), q.mul(t))
    };
    Residual {
        output,
        label: label.to_string(),
        numerator,
        denominator,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub point: Vec<i64>,
    pub scheme: Vec<Rational>,
    pub reference: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridStats {
    pub radius: u32,
    pub points_tested: usize,
    pub points_skipped: usize,
    /// Lowest failing point in lexicographic grid order.
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyResult {
    pub verdict: Verdict,
    /// One entry per output (symbolic mode only).
    pub residuals: Vec<Residual>,
    /// Present in exhaustive mode.
    pub grid: Option<GridStats>,
}

impl VerifyResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub fn verify_symbolic(s: &Scheme, reference: &ReferenceId) -> Result<VerifyResult, VerifyError> {
    reference.check_arity(s)?;
    let got = eval_symbolic(s)?;
    let want = reference.symbolic(&s.input_labels);
    let residuals: Vec<Residual> = got
        .iter()
        .zip(&want)
        .enumerate()
        .map(|(k, (g, w))| residual(k, &s.output_labels[k], g, w))
        .collect();
    let verdict = if residuals.iter().all(Residual::is_zero) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(VerifyResult {
        verdict,
        residuals,
        grid: None,
    })
}

enum GridOutcome {
    Skipped,
    Agree,
    Differ(Counterexample),
}

pub fn verify_exhaustive(
    s: &Scheme,
    reference: &ReferenceId,
    radius: u32,
) -> Result<VerifyResult, VerifyError> {
    if radius == 0 {
        return Err(VerifyError::Radius);
    }
    reference.check_arity(s)?;
    s.ensure_valid().map_err(EvalError::from)?;
    let n = s.input_width();
    let outcomes: Vec<GridOutcome> = (0..grid_size(n, radius))
        .into_par_iter()
        .map(|i| {
            let point = grid_point(i, n, radius);
            let x: Vec<Rational> = point.iter().map(|&v| Rational::from(v)).collect();
            let Some(want) = reference.evaluate(&x) else {
                return Ok(GridOutcome::Skipped);
            };
            let got = match eval_exact(s, &x) {
                Ok(v) => v,
                Err(EvalError::DivisionByZero { .. }) => return Ok(GridOutcome::Skipped),
                Err(e) => return Err(e),
            };
            Ok(if got == want {
                GridOutcome::Agree
            } else {
                GridOutcome::Differ(Counterexample {
                    point,
                    scheme: got,
                    reference: want,
                })
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let mut stats = GridStats {
        radius,
        points_tested: 0,
        points_skipped: 0,
        counterexample: None,
    };
    for o in outcomes {
        match o {
            GridOutcome::Skipped => stats.points_skipped += 1,
            GridOutcome::Agree => stats.points_tested += 1,
            GridOutcome::Differ(c) => {
                stats.points_tested += 1;
                stats.counterexample.get_or_insert(c);
            }
        }
    }
    Ok(VerifyResult {
        verdict: if stats.counterexample.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        residuals: Vec::new(),
        grid: Some(stats),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{BinaryOp, Stage};

    #[test]
    fn binding_must_be_a_permutation() {
        assert!(ReferenceId::new(ReferenceKind::ComplexMul, vec![0, 2, 1, 3]).is_ok());
        assert!(ReferenceId::new(ReferenceKind::ComplexMul, vec![0, 0, 1, 3]).is_err());
        assert!(ReferenceId::new(ReferenceKind::ComplexMul, vec![0, 1, 2]).is_err());
        assert!(ReferenceId::new(ReferenceKind::ScalarProduct, vec![0, 2]).is_err());
        let labels: Vec<String> = ["a1", "a2", "b1", "b2"].map(String::from).to_vec();
        let r = ReferenceId::from_labels(
            ReferenceKind::ComplexDiv,
            &labels,
            &["a1", "b1", "a2", "b2"],
        )
        .unwrap();
        assert_eq!(r.binding(), &[0, 2, 1, 3]);
        assert!(matches!(
            ReferenceId::from_labels(ReferenceKind::ComplexDiv, &labels, &["a1", "x", "a2", "b2"]),
            Err(VerifyError::UnknownLabel(_))
        ));
    }

    #[test]
    fn arity_mismatch_reported() {
        let s = Scheme::identity(&["x", "y"]);
        assert!(matches!(
            verify_symbolic(&s, &ReferenceId::identity(ReferenceKind::ComplexMul)),
            Err(VerifyError::Arity { .. })
        ));
        assert!(matches!(
            verify_exhaustive(&s, &ReferenceId::identity(ReferenceKind::ComplexSquare), 0),
            Err(VerifyError::Radius)
        ));
    }

    #[test]
    fn product_scheme_passes_both_modes() {
        let s = Scheme::new(
            "p",
            &["x", "y"],
            &["p"],
            vec![Stage::Binary(vec![BinaryOp::Mul(0, 1)])],
        );
        let r = ReferenceId::identity(ReferenceKind::ScalarProduct);
        assert!(verify_symbolic(&s, &r).unwrap().passed());
        let e = verify_exhaustive(&s, &r, 2).unwrap();
        assert!(e.passed());
        assert_eq!(e.grid.unwrap().points_tested, 25);
    }

    #[test]
    fn wrong_scheme_gets_residual_and_counterexample() {
        // x + y instead of x * y
        let s = Scheme::new(
            "s",
            &["x", "y"],
            &["p"],
            vec![Stage::linear_ints(&[[1, 1]])],
        );
        let r = ReferenceId::identity(ReferenceKind::ScalarProduct);
        let sym = verify_symbolic(&s, &r).unwrap();
        assert_eq!(sym.verdict, Verdict::Fail);
        assert_eq!(sym.residuals[0].to_string(), "-x*y + x + y");
        let ex = verify_exhaustive(&s, &r, 1).unwrap();
        let c = ex.grid.unwrap().counterexample.unwrap();
        assert_eq!(c.point, vec![-1, -1]);
        assert_eq!(c.scheme, vec![Rational::from(-2)]);
        assert_eq!(c.reference, vec![Rational::from(1)]);
    }

    #[test]
    fn unrelated_denominators_cross_multiply() {
        let labels: Vec<String> = ["x", "y"].map(String::from).to_vec();
        let vars = var_list(&labels);
        let x = Polynomial::var(vars.clone(), 0);
        let y = Polynomial::var(vars.clone(), 1);
        let one = Polynomial::constant(vars, Rational::one());
        let a = RationalFn::new(one.clone(), x.clone()).unwrap();
        let b = RationalFn::new(one, y.clone()).unwrap();
        let res = residual(0, "o", &a, &b);
        assert_eq!(res.numerator, y.sub(&x));
        assert_eq!(res.denominator, x.mul(&y));
    }
}
