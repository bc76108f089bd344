//! Scheme execution: exact rational, symbolic, and fixed-point.

mod fixed;
pub mod poly;
mod symbolic;

pub use fixed::{
    eval_fixed, sweep, DivRounding, FailedPoint, FixedPointConfig, OverflowPolicy, SweepReport,
    WidthReport,
};
pub use poly::{Polynomial, RationalFn};
pub use symbolic::eval_symbolic;

use thiserror::Error;

use crate::cost::UnitKind;
use crate::numeric::Rational;
use crate::scheme::{BinaryOp, Scheme, SchemeError, Stage, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Invalid(#[from] SchemeError),
    #[error("expected {expected} inputs, got {actual}")]
    InputArity { expected: usize, actual: usize },
    #[error("division by zero at stage {stage}, wire {wire}")]
    DivisionByZero { stage: usize, wire: usize },
    #[error("denominator is identically zero at stage {stage}, wire {wire}")]
    DenominatorIdenticallyZero { stage: usize, wire: usize },
    #[error(
        "overflow at stage {stage}, wire {wire} ({unit} output needs {bits} magnitude bits, word is {word_bits} bits)"
    )]
    Overflow {
        stage: usize,
        wire: usize,
        unit: UnitKind,
        bits: u64,
        word_bits: u32,
    },
    #[error("input {input} = {value} is not representable in the fixed-point format")]
    Unrepresentable { input: usize, value: Rational },
    #[error("invalid fixed-point configuration: {0}")]
    Config(String),
}

fn check_inputs(s: &Scheme, n: usize) -> Result<(), EvalError> {
    s.ensure_valid()?;
    if n != s.input_width() {
        return Err(EvalError::InputArity {
            expected: s.input_width(),
            actual: n,
        });
    }
    Ok(())
}

/// Exact stage-by-stage evaluation.
pub fn eval_exact(s: &Scheme, inputs: &[Rational]) -> Result<Vec<Rational>, EvalError> {
    check_inputs(s, inputs.len())?;
    let mut wires = inputs.to_vec();
    for (idx, stage) in s.stages.iter().enumerate() {
        wires = match stage {
            Stage::Linear(m) => m.apply(&wires),
            Stage::Unary(ops) => ops
                .iter()
                .map(|op| match op {
                    UnaryOp::Copy(src) => wires[*src].clone(),
                    UnaryOp::Square(src) => wires[*src].square(),
                    UnaryOp::Scale(src, c) => &wires[*src] * c,
                })
                .collect(),
            Stage::Binary(ops) => {
                ops.iter()
                    .enumerate()
                    .map(|(k, op)| match op {
                        BinaryOp::Copy(src) => Ok(wires[*src].clone()),
                        BinaryOp::Mul(l, r) => Ok(&wires[*l] * &wires[*r]),
                        BinaryOp::Div { num, den } => wires[*num]
                            .checked_div(&wires[*den])
                            .map_err(|_| EvalError::DivisionByZero {
                                stage: idx,
                                wire: k,
                            }),
                    })
                    .collect::<Result<_, _>>()?
            }
        };
    }
    Ok(wires)
}

/// Number of points in the integer grid `[-radius, radius]^n`.
pub fn grid_size(n: usize, radius: u32) -> usize {
    (2 * radius as usize + 1).pow(n as u32)
}

/// The `index`-th point of `[-radius, radius]^n` in lexicographic order,
/// first coordinate most significant.
pub fn grid_point(index: usize, n: usize, radius: u32) -> Vec<i64> {
    let side = 2 * radius as usize + 1;
    let mut rest = index;
    let mut p = vec![0i64; n];
    for slot in p.iter_mut().rev() {
        *slot = (rest % side) as i64 - i64::from(radius);
        rest /= side;
    }
    p
}
