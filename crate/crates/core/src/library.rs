//! Built-in scheme catalog.
//!
//! The three squarer-based factorizations are reproduced with their
//! published matrices verbatim (two of them carry a `known_erratum`), next
//! to corrected variants, the direct baselines, and the two scalar
//! square-summing identities.

use thiserror::Error;

use crate::cost::{CostReport, CostTable, Operation};
use crate::numeric::{RMatrix, Rational};
use crate::scheme::{compose, parallel, BinaryOp, Scheme, Stage, UnaryOp};
use crate::verify::{ReferenceId, ReferenceKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown built-in scheme {0:?}")]
pub struct UnknownScheme(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectedVerdict {
    Pass,
    /// Symbolic residual of output `output`, in [`crate::verify::Residual`]
    /// display form.
    Fail {
        output: usize,
        residual: &'static str,
    },
}

#[derive(Debug, Clone)]
pub struct BuiltinEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub scheme: Scheme,
    pub reference: ReferenceId,
    pub expected_verdict: ExpectedVerdict,
    pub expected_cost: CostReport,
    /// Published table column this scheme reproduces, if any.
    pub table_column: Option<(CostTable, Operation)>,
}

const CATALOG: [&str; 12] = [
    "square_direct",
    "square_eq6_as_printed",
    "square_logan_corrected",
    "mul_direct",
    "mul_gauss",
    "mul_eq7",
    "div_direct",
    "div_eq8_as_printed",
    "div_logan_corrected",
    "div_via_conjugate_mul",
    "scalar_logan",
    "scalar_quarter_square",
];

pub fn list_builtins() -> Vec<&'static str> {
    CATALOG.to_vec()
}

pub fn builtin(name: &str) -> Result<BuiltinEntry, UnknownScheme> {
    use ReferenceKind::*;
    let mul_ref = ReferenceId::identity(ComplexMul);
    // inputs [a1, a2, b1, b2]: re1 = a1, im1 = b1, re2 = a2, im2 = b2
    let interleaved_div_ref =
        ReferenceId::new(ComplexDiv, vec![0, 2, 1, 3]).expect("valid permutation");
    let costs = |a, s, m, d, shifts| CostReport {
        shifts,
        ..CostReport::table(a, s, m, d)
    };

    let entry = match name {
        "square_direct" => BuiltinEntry {
            name: "square_direct",
            description: "direct complex square: a^2 - b^2 and 2ab with one multiplier",
            scheme: square_direct(),
            reference: ReferenceId::identity(ComplexSquare),
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(1, 2, 1, 0, 1),
            table_column: Some((CostTable::Direct, Operation::Squaring)),
        },
        "square_eq6_as_printed" => BuiltinEntry {
            name: "square_eq6_as_printed",
            description: "squarer-based complex square, published T3x2/T2x3/A2 matrices verbatim",
            scheme: square_eq6_as_printed(),
            reference: ReferenceId::identity(ComplexSquare),
            expected_verdict: ExpectedVerdict::Fail {
                output: 0,
                residual: "2*b1^2",
            },
            expected_cost: costs(3, 3, 0, 0, 0),
            table_column: Some((CostTable::Proposed, Operation::Squaring)),
        },
        "square_logan_corrected" => BuiltinEntry {
            name: "square_logan_corrected",
            description: "squarer-based complex square with corrected post-squaring combination",
            scheme: square_logan_corrected(),
            reference: ReferenceId::identity(ComplexSquare),
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(4, 3, 0, 0, 0),
            table_column: None,
        },
        "mul_direct" => BuiltinEntry {
            name: "mul_direct",
            description: "schoolbook complex product: four multipliers, two adders",
            scheme: mul_direct(),
            reference: mul_ref,
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(2, 0, 4, 0, 0),
            table_column: Some((CostTable::Direct, Operation::Multiplication)),
        },
        "mul_gauss" => BuiltinEntry {
            name: "mul_gauss",
            description: "Gauss complex product: three multipliers, five adders",
            scheme: mul_gauss(),
            reference: mul_ref,
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(5, 0, 3, 0, 0),
            table_column: None,
        },
        "mul_eq7" => BuiltinEntry {
            name: "mul_eq7",
            description: "quarter-square complex product with six squarers (I3 (x) H2 butterflies)",
            scheme: mul_eq7(),
            reference: mul_ref,
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(14, 6, 0, 0, 2),
            table_column: Some((CostTable::Proposed, Operation::Multiplication)),
        },
        "div_direct" => BuiltinEntry {
            name: "div_direct",
            description: "conjugate-method complex quotient with four multipliers and two squarers",
            scheme: div_direct(),
            reference: ReferenceId::identity(ComplexDiv),
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(3, 2, 4, 2, 0),
            table_column: Some((CostTable::Direct, Operation::Division)),
        },
        "div_eq8_as_printed" => BuiltinEntry {
            name: "div_eq8_as_printed",
            description:
                "squarer-based complex quotient, published P/A8/A4x8/A3x4/A2x3 chain verbatim",
            scheme: div_eq8_as_printed(),
            reference: interleaved_div_ref,
            expected_verdict: ExpectedVerdict::Fail {
                output: 1,
                residual: "(-2*a1^2 - 2*b2^2) / (2*a2^2 + 2*b2^2)",
            },
            expected_cost: costs(11, 8, 0, 2, 1),
            table_column: Some((CostTable::Proposed, Operation::Division)),
        },
        "div_logan_corrected" => BuiltinEntry {
            name: "div_logan_corrected",
            description:
                "squarer-based complex quotient, A8 kept, corrected post-squaring combination",
            scheme: div_logan_corrected(),
            reference: interleaved_div_ref,
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(13, 8, 0, 2, 1),
            table_column: None,
        },
        "div_via_conjugate_mul" => BuiltinEntry {
            name: "div_via_conjugate_mul",
            description: "quotient as mul_eq7 by the conjugate, then divide by a2^2 + b2^2",
            scheme: div_via_conjugate_mul(),
            reference: ReferenceId::identity(ComplexDiv),
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(15, 8, 0, 2, 2),
            table_column: None,
        },
        "scalar_logan" => BuiltinEntry {
            name: "scalar_logan",
            description: "real product via ((a+b)^2 - a^2 - b^2) / 2",
            scheme: scalar_logan(),
            reference: ReferenceId::identity(ScalarProduct),
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(3, 3, 0, 0, 1),
            table_column: None,
        },
        "scalar_quarter_square" => BuiltinEntry {
            name: "scalar_quarter_square",
            description: "real product via ((a+b)^2 - (a-b)^2) / 4",
            scheme: scalar_quarter_square(),
            reference: ReferenceId::identity(ScalarProduct),
            expected_verdict: ExpectedVerdict::Pass,
            expected_cost: costs(3, 2, 0, 0, 1),
            table_column: None,
        },
        other => return Err(UnknownScheme(other.to_string())),
    };
    debug_assert!(entry.scheme.validate().is_ok(), "{name} must validate");
    Ok(entry)
}

fn quarter() -> Rational {
    Rational::new(1, 4).expect("nonzero")
}

fn square_direct() -> Scheme {
    Scheme::new(
        "square_direct",
        &["a1", "b1"],
        &["c1", "d1"],
        vec![
            Stage::Binary(vec![
                BinaryOp::Copy(0),
                BinaryOp::Copy(1),
                BinaryOp::Mul(0, 1),
            ]),
            Stage::Unary(vec![
                UnaryOp::Square(0),
                UnaryOp::Square(1),
                UnaryOp::Copy(2),
            ]),
            Stage::linear_ints(&[[1, -1, 0], [0, 0, 2]]),
        ],
    )
}

/// `A2 · T2x3 · [T3x2 · X]^2`.
fn square_eq6_as_printed() -> Scheme {
    Scheme::new(
        "square_eq6_as_printed",
        &["a1", "b1"],
        &["c1", "d1"],
        vec![
            Stage::linear_ints(&[[1, 0], [0, 1], [1, 1]]),
            Stage::square_all(3),
            Stage::linear_ints(&[[1, 1, 0], [0, 0, 1]]),
            Stage::linear_ints(&[[1, 0], [-1, 1]]),
        ],
    )
    .with_erratum(
        "printed matrices give a1^2 + b1^2 as the real part instead of a1^2 - b1^2 \
         (residual 2*b1^2); see square_logan_corrected",
    )
}

fn square_logan_corrected() -> Scheme {
    Scheme::new(
        "square_logan_corrected",
        &["a1", "b1"],
        &["c1", "d1"],
        vec![
            Stage::linear_ints(&[[1, 0], [0, 1], [1, 1]]),
            Stage::square_all(3),
            Stage::linear_ints(&[[1, -1, 0], [-1, -1, 1]]),
        ],
    )
}

fn mul_direct() -> Scheme {
    Scheme::new(
        "mul_direct",
        &["a1", "b1", "a2", "b2"],
        &["c1", "d1"],
        vec![
            Stage::Binary(vec![
                BinaryOp::Mul(0, 2),
                BinaryOp::Mul(1, 3),
                BinaryOp::Mul(0, 3),
                BinaryOp::Mul(1, 2),
            ]),
            Stage::linear_ints(&[[1, -1, 0, 0], [0, 0, 1, 1]]),
        ],
    )
}

fn mul_gauss() -> Scheme {
    Scheme::new(
        "mul_gauss",
        &["a1", "b1", "a2", "b2"],
        &["c1", "d1"],
        vec![
            // [a1+b1, b2-a2, a2+b2, a2, a1, b1]
            Stage::linear_ints(&[
                [1, 1, 0, 0],
                [0, 0, -1, 1],
                [0, 0, 1, 1],
                [0, 0, 1, 0],
                [1, 0, 0, 0],
                [0, 1, 0, 0],
            ]),
            // m1 = a2(a1+b1), m2 = a1(b2-a2), m3 = b1(a2+b2)
            Stage::Binary(vec![
                BinaryOp::Mul(0, 3),
                BinaryOp::Mul(4, 1),
                BinaryOp::Mul(5, 2),
            ]),
            Stage::linear_ints(&[[1, 0, -1], [1, 1, 0]]),
        ],
    )
}

pub(crate) fn h2() -> RMatrix {
    RMatrix::from_ints(&[[1, 1], [1, -1]])
}

/// `D2 · A2x3 · A3x6 · [H6 · A6x4 · X]^2` with `H6 = I3 ⊗ H2`.
fn mul_eq7() -> Scheme {
    Scheme::new(
        "mul_eq7",
        &["a1", "b1", "a2", "b2"],
        &["c1", "d1"],
        vec![
            Stage::linear_ints(&[
                [0, 0, 1, -1],
                [1, 0, 0, 0],
                [0, 0, 1, 1],
                [0, 1, 0, 0],
                [0, 0, 0, 1],
                [1, -1, 0, 0],
            ]),
            Stage::Linear(RMatrix::identity(3).kron(&h2())),
            Stage::square_all(6),
            Stage::linear_ints(&[
                [1, -1, 0, 0, 0, 0],
                [0, 0, 1, -1, 0, 0],
                [0, 0, 0, 0, 1, -1],
            ]),
            Stage::linear_ints(&[[1, 0, 1], [0, 1, 1]]),
            Stage::Unary(vec![
                UnaryOp::Scale(0, quarter()),
                UnaryOp::Scale(1, quarter()),
            ]),
        ],
    )
}

fn div_direct() -> Scheme {
    Scheme::new(
        "div_direct",
        &["a1", "b1", "a2", "b2"],
        &["c3", "d3"],
        vec![
            // [a1a2, b1b2, a2b1, a1b2, a2, b2]
            Stage::Binary(vec![
                BinaryOp::Mul(0, 2),
                BinaryOp::Mul(1, 3),
                BinaryOp::Mul(2, 1),
                BinaryOp::Mul(0, 3),
                BinaryOp::Copy(2),
                BinaryOp::Copy(3),
            ]),
            Stage::Unary(vec![
                UnaryOp::Copy(0),
                UnaryOp::Copy(1),
                UnaryOp::Copy(2),
                UnaryOp::Copy(3),
                UnaryOp::Square(4),
                UnaryOp::Square(5),
            ]),
            Stage::linear_ints(&[[1, 1, 0, 0, 0, 0], [0, 0, 1, -1, 0, 0], [0, 0, 0, 0, 1, 1]]),
            Stage::Binary(vec![
                BinaryOp::Div { num: 0, den: 2 },
                BinaryOp::Div { num: 1, den: 2 },
            ]),
        ],
    )
}

/// `P8x4 = 1_2 ⊗ I4`: two stacked copies of the input.
pub(crate) fn duplication() -> RMatrix {
    RMatrix::ones_column(2).kron(&RMatrix::identity(4))
}

/// The 8x8 pre-squaring matrix: `[a1+a2, b1+b2, a2+b1, a1+b2]` on the first
/// copy and a permutation `[a1, b1, a2, b2]` of the second.
pub(crate) fn a8() -> RMatrix {
    let top = RMatrix::from_ints(&[[1, 1, 0, 0], [0, 0, 1, 1], [0, 1, 1, 0], [1, 0, 0, 1]]);
    let bottom = RMatrix::from_ints(&[[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]);
    top.block_diag(&bottom)
}

fn div_eq8_as_printed() -> Scheme {
    Scheme::new(
        "div_eq8_as_printed",
        &["a1", "a2", "b1", "b2"],
        &["c3", "d3"],
        vec![
            Stage::Linear(duplication()),
            Stage::Linear(a8()),
            Stage::square_all(8),
            Stage::linear_ints(&[
                [1, 1, 0, 0, 0, 0, 0, 0],
                [0, 0, 1, -1, 0, 0, 0, 0],
                [0, 0, 0, 0, 1, 1, 0, 0],
                [0, 0, 0, 0, 0, 0, 1, 1],
            ]),
            // A3x4 plus a passthrough row keeping a2^2 + b2^2 for the divisor
            Stage::linear_ints(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]]),
            // A2x3 plus the doubled divisor 2(a2^2 + b2^2)
            Stage::linear_ints(&[[1, 0, -1, 0], [0, 1, -1, 0], [0, 0, 0, 2]]),
            Stage::Binary(vec![BinaryOp::Div { num: 0, den: 2 }, BinaryOp::Div { num: 1, den: 2 }]),
        ],
    )
    .with_erratum(
        "printed post-squaring matrices give imaginary numerator 2(a2*b1 - a1*b2) - 2(a1^2 + b2^2); \
         residual -2(a1^2 + b2^2) over 2(a2^2 + b2^2); see div_logan_corrected",
    )
}

fn div_logan_corrected() -> Scheme {
    Scheme::new(
        "div_logan_corrected",
        &["a1", "a2", "b1", "b2"],
        &["c3", "d3"],
        vec![
            Stage::Linear(duplication()),
            Stage::Linear(a8()),
            Stage::square_all(8),
            // [v1 = s1+s2, v2 = s3-s4, e1 = s5+s8, e2 = s6+s7, den = s7+s8]
            Stage::linear_ints(&[
                [1, 1, 0, 0, 0, 0, 0, 0],
                [0, 0, 1, -1, 0, 0, 0, 0],
                [0, 0, 0, 0, 1, 0, 0, 1],
                [0, 0, 0, 0, 0, 1, 1, 0],
                [0, 0, 0, 0, 0, 0, 1, 1],
            ]),
            // [v1 - e1 - e2, v2 + e1 - e2, 2 den]
            Stage::linear_ints(&[[1, 0, -1, -1, 0], [0, 1, 1, -1, 0], [0, 0, 0, 0, 2]]),
            Stage::Binary(vec![
                BinaryOp::Div { num: 0, den: 2 },
                BinaryOp::Div { num: 1, den: 2 },
            ]),
        ],
    )
}

fn div_via_conjugate_mul() -> Scheme {
    let fanout = Scheme::new(
        "conjugate_fanout",
        &["a1", "b1", "a2", "b2"],
        &["a1", "b1", "a2", "-b2", "x", "y"],
        vec![Stage::linear_ints(&[
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, -1],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ])],
    );
    let norm = Scheme::new(
        "norm",
        &["x", "y"],
        &["n"],
        vec![Stage::square_all(2), Stage::linear_ints(&[[1, 1]])],
    );
    let quotient = Scheme::new(
        "quotient",
        &["c1", "d1", "n"],
        &["c3", "d3"],
        vec![Stage::Binary(vec![
            BinaryOp::Div { num: 0, den: 2 },
            BinaryOp::Div { num: 1, den: 2 },
        ])],
    );
    let body = parallel(&mul_eq7(), &norm).expect("disjoint labels");
    let mut s = compose(&compose(&fanout, &body).expect("widths"), &quotient).expect("widths");
    s.name = "div_via_conjugate_mul".into();
    s
}

fn scalar_logan() -> Scheme {
    Scheme::new(
        "scalar_logan",
        &["a", "b"],
        &["p"],
        vec![
            Stage::linear_ints(&[[1, 0], [0, 1], [1, 1]]),
            Stage::square_all(3),
            Stage::linear_ints(&[[-1, -1, 1]]),
            Stage::Unary(vec![UnaryOp::Scale(
                0,
                Rational::new(1, 2).expect("nonzero"),
            )]),
        ],
    )
}

fn scalar_quarter_square() -> Scheme {
    Scheme::new(
        "scalar_quarter_square",
        &["a", "b"],
        &["p"],
        vec![
            Stage::Linear(h2()),
            Stage::square_all(2),
            Stage::linear_ints(&[[1, -1]]),
            Stage::Unary(vec![UnaryOp::Scale(0, quarter())]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_twelve_valid_entries() {
        let names = list_builtins();
        assert_eq!(names.len(), 12);
        for n in names {
            let e = builtin(n).unwrap();
            assert_eq!(e.name, n);
            assert_eq!(e.scheme.name, n);
            assert!(
                e.scheme.validate().is_ok(),
                "{n}: {:?}",
                e.scheme.validate()
            );
        }
    }

    #[test]
    fn unknown_name_rejected() {
        assert_eq!(builtin("cube").unwrap_err(), UnknownScheme("cube".into()));
    }

    #[test]
    fn mul_eq7_has_six_stages_and_chained_widths() {
        let s = builtin("mul_eq7").unwrap().scheme;
        assert_eq!(s.stages.len(), 6);
        assert_eq!(s.wire_widths(), vec![4, 6, 6, 6, 3, 2, 2]);
    }

    #[test]
    fn eq6_expected_to_fail() {
        assert!(matches!(
            builtin("square_eq6_as_printed").unwrap().expected_verdict,
            ExpectedVerdict::Fail { output: 0, .. }
        ));
        assert!(builtin("square_eq6_as_printed")
            .unwrap()
            .scheme
            .known_erratum
            .is_some());
    }

    #[test]
    fn duplication_is_eight_by_four_stack() {
        let p = duplication();
        assert_eq!((p.rows(), p.cols()), (8, 4));
        for r in 0..8 {
            for c in 0..4 {
                let want = if r % 4 == c { 1 } else { 0 };
                assert_eq!(p.get(r, c), &Rational::from(want));
            }
        }
    }
}
