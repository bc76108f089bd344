use super::poly::{var_list, Polynomial, RationalFn};
use super::EvalError;
use crate::scheme::{BinaryOp, Scheme, Stage, UnaryOp};

/// Each output wire as a rational function of the scheme's input labels.
pub fn eval_symbolic(s: &Scheme) -> Result<Vec<RationalFn>, EvalError> {
    s.ensure_valid()?;
    let vars = var_list(&s.input_labels);
    let zero = RationalFn::from_poly(Polynomial::zero(vars.clone()));
    let mut wires: Vec<RationalFn> = (0..vars.len())
        .map(|i| RationalFn::from_poly(Polynomial::var(vars.clone(), i)))
        .collect();

    for (idx, stage) in s.stages.iter().enumerate() {
        wires = match stage {
            Stage::Linear(m) => m
                .row_iter()
                .map(|row| {
                    row.iter()
                        .zip(&wires)
                        .filter(|(c, _)| !c.is_zero())
                        .fold(zero.clone(), |acc, (c, w)| acc.add(&w.scale(c)))
                })
                .collect(),
            Stage::Unary(ops) => ops
                .iter()
                .map(|op| match op {
                    UnaryOp::Copy(src) => wires[*src].clone(),
                    UnaryOp::Square(src) => wires[*src].square(),
                    UnaryOp::Scale(src, c) => wires[*src].scale(c),
                })
                .collect(),
            Stage::Binary(ops) => ops
                .iter()
                .enumerate()
                .map(|(k, op)| match op {
                    BinaryOp::Copy(src) => Ok(wires[*src].clone()),
                    BinaryOp::Mul(l, r) => Ok(wires[*l].mul(&wires[*r])),
                    BinaryOp::Div { num, den } => wires[*num].div(&wires[*den]).map_err(|_| {
                        EvalError::DenominatorIdenticallyZero {
                            stage: idx,
                            wire: k,
                        }
                    }),
                })
                .collect::<Result<_, _>>()?,
        };
    }
    Ok(wires)
}
