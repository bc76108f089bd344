//! Fixed-point simulation for hardware sizing.
//!
//! Every wire holds a scaled integer `x * 2^f`. A value fits the word when
//! its magnitude is below `2^(W-1)`. Any intermediate that does not fit is an
//! error; there is no wraparound or saturation.
//!
//! Intermediates checked: every shift/constant-multiplier term and every
//! partial sum of a `Linear` row, and every unit output. The raw
//! double-width product inside a squarer or multiplier and the pre-scaled
//! dividend inside a divider are internal to the unit and are not checked.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_inputs, eval_exact, grid_point, grid_size, EvalError};
use crate::cost::UnitKind;
use crate::numeric::{div_trunc, fits_signed, magnitude_bits, ConstClass, Rational};
use crate::scheme::{BinaryOp, Scheme, Stage, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OverflowPolicy {
    #[default]
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DivRounding {
    #[default]
    TruncateTowardZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedPointConfig {
    pub word_bits: u32,
    pub frac_bits: u32,
    pub overflow_policy: OverflowPolicy,
    pub div_rounding: DivRounding,
}

impl FixedPointConfig {
    pub fn new(word_bits: u32, frac_bits: u32) -> Result<Self, EvalError> {
        if word_bits < 2 {
            return Err(EvalError::Config(format!(
                "word width must be at least 2 bits, got {word_bits}"
            )));
        }
        if frac_bits >= word_bits {
            return Err(EvalError::Config(format!(
                "fraction bits ({frac_bits}) must be below word width ({word_bits})"
            )));
        }
        Ok(FixedPointConfig {
            word_bits,
            frac_bits,
            overflow_policy: OverflowPolicy::Error,
            div_rounding: DivRounding::TruncateTowardZero,
        })
    }

    /// Scaled integer for `x`, if `x * 2^f` is an integer that fits the word.
    pub fn to_scaled(&self, x: &Rational) -> Option<BigInt> {
        let scaled = x * &Rational::from_integer(BigInt::from(1) << self.frac_bits);
        if !scaled.is_integer() {
            return None;
        }
        let n = scaled.numer().clone();
        fits_signed(&n, self.word_bits).then_some(n)
    }

    pub fn from_scaled(&self, n: &BigInt) -> Rational {
        Rational::from_scaled(n.clone(), self.frac_bits)
    }
}

/// Maximum observed magnitude bits per wire. `stages[i][k]` is output wire
/// `k` of stage `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct WidthReport {
    pub inputs: Vec<u64>,
    pub stages: Vec<Vec<u64>>,
}

impl WidthReport {
    fn empty_for(s: &Scheme) -> Self {
        WidthReport {
            inputs: vec![0; s.input_width()],
            stages: s
                .stages
                .iter()
                .map(|st| vec![0; st.output_width()])
                .collect(),
        }
    }

    /// Per-wire maximum of two reports over the same scheme.
    pub fn merge(&mut self, other: &WidthReport) {
        fn max_into(a: &mut [u64], b: &[u64]) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = (*x).max(*y);
            }
        }
        max_into(&mut self.inputs, &other.inputs);
        for (a, b) in self.stages.iter_mut().zip(&other.stages) {
            max_into(a, b);
        }
    }

    pub fn max_bits(&self) -> u64 {
        self.inputs
            .iter()
            .chain(self.stages.iter().flatten())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Smallest signed word width holding every observed wire value.
    pub fn required_word_bits(&self) -> u64 {
        self.max_bits() + 1
    }
}

struct Sim<'a> {
    cfg: &'a FixedPointConfig,
    stage: usize,
}

impl Sim<'_> {
    fn check(&self, wire: usize, unit: UnitKind, v: BigInt) -> Result<BigInt, EvalError> {
        if fits_signed(&v, self.cfg.word_bits) {
            Ok(v)
        } else {
            Err(EvalError::Overflow {
                stage: self.stage,
                wire,
                unit,
                bits: magnitude_bits(&v),
                word_bits: self.cfg.word_bits,
            })
        }
    }

    /// Constant times wire, truncated toward zero. `±1` is a plain wire.
    fn scaled(&self, wire: usize, x: &BigInt, c: &Rational) -> Result<BigInt, EvalError> {
        let unit = match c.classify() {
            ConstClass::Zero => return Ok(BigInt::zero()),
            ConstClass::PlusMinusOne => return Ok(if c.is_negative() { -x } else { x.clone() }),
            ConstClass::PowerOfTwo(_) => UnitKind::Shift,
            ConstClass::General => UnitKind::ConstMultiplier,
        };
        let exact = &Rational::from_integer(x.clone()) * c;
        self.check(wire, unit, exact.trunc_to_integer())
    }

    fn rescale(&self, product: BigInt) -> BigInt {
        div_trunc(&product, &(BigInt::from(1) << self.cfg.frac_bits))
    }
}

/// Evaluates `s` on scaled integers. Returns the outputs converted back to
/// rationals and the magnitude bits seen on every wire.
pub fn eval_fixed(
    s: &Scheme,
    cfg: &FixedPointConfig,
    inputs: &[Rational],
) -> Result<(Vec<Rational>, WidthReport), EvalError> {
    check_inputs(s, inputs.len())?;
    let mut widths = WidthReport::empty_for(s);
    let mut wires: Vec<BigInt> = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            cfg.to_scaled(x).ok_or_else(|| EvalError::Unrepresentable {
                input: i,
                value: x.clone(),
            })
        })
        .collect::<Result<_, _>>()?;
    for (w, v) in widths.inputs.iter_mut().zip(&wires) {
        *w = magnitude_bits(v);
    }

    for (idx, stage) in s.stages.iter().enumerate() {
        let sim = Sim { cfg, stage: idx };
        let next: Vec<BigInt> = match stage {
            Stage::Linear(m) => m
                .row_iter()
                .enumerate()
                .map(|(k, row)| {
                    let mut acc: Option<BigInt> = None;
                    for (c, x) in row.iter().zip(&wires) {
                        if c.is_zero() {
                            continue;
                        }
                        let term = sim.scaled(k, x, c)?;
                        acc = Some(match acc {
                            None => term,
                            Some(a) => sim.check(k, UnitKind::Adder, a + term)?,
                        });
                    }
                    Ok(acc.unwrap_or_default())
                })
                .collect::<Result<_, EvalError>>()?,
            Stage::Unary(ops) => ops
                .iter()
                .enumerate()
                .map(|(k, op)| match op {
                    UnaryOp::Copy(src) => Ok(wires[*src].clone()),
                    UnaryOp::Square(src) => {
                        let x = &wires[*src];
                        sim.check(k, UnitKind::Squarer, sim.rescale(x * x))
                    }
                    UnaryOp::Scale(src, c) => sim.scaled(k, &wires[*src], c),
                })
                .collect::<Result<_, EvalError>>()?,
            Stage::Binary(ops) => ops
                .iter()
                .enumerate()
                .map(|(k, op)| match op {
                    BinaryOp::Copy(src) => Ok(wires[*src].clone()),
                    BinaryOp::Mul(l, r) => sim.check(
                        k,
                        UnitKind::Multiplier,
                        sim.rescale(&wires[*l] * &wires[*r]),
                    ),
                    BinaryOp::Div { num, den } => {
                        let d = &wires[*den];
                        if d.is_zero() {
                            return Err(EvalError::DivisionByZero {
                                stage: idx,
                                wire: k,
                            });
                        }
                        let n = &wires[*num] << cfg.frac_bits;
                        sim.check(k, UnitKind::Divider, div_trunc(&n, d))
                    }
                })
                .collect::<Result<_, EvalError>>()?,
        };
        for (w, v) in widths.stages[idx].iter_mut().zip(&next) {
            *w = magnitude_bits(v);
        }
        wires = next;
    }

    Ok((wires.iter().map(|v| cfg.from_scaled(v)).collect(), widths))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailedPoint {
    pub point: Vec<i64>,
    pub error: String,
}

/// Result of running [`eval_fixed`] against [`eval_exact`] on every point
/// of an integer grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub radius: u32,
    pub points: usize,
    /// Points where exact evaluation divides by zero.
    pub skipped: usize,
    /// Points where the fixed-point run failed (overflow, or a divisor
    /// that truncated to zero).
    pub failures: Vec<FailedPoint>,
    /// Per-output maximum of `|fixed - exact|` over successful points.
    #[serde(serialize_with = "ser_rationals")]
    pub max_abs_error: Vec<Rational>,
    pub widths: WidthReport,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

enum PointOutcome {
    Skipped,
    Failed(FailedPoint),
    Ok {
        errors: Vec<Rational>,
        widths: WidthReport,
    },
}

/// Sweeps the integer grid `[-radius, radius]^n`. Points are evaluated in
/// parallel and merged in grid order, so the report does not depend on how
/// the work was partitioned.
pub fn sweep(s: &Scheme, cfg: &FixedPointConfig, radius: u32) -> Result<SweepReport, EvalError> {
    s.ensure_valid()?;
    let n = s.input_width();
    let total = grid_size(n, radius);
    let outcomes: Vec<PointOutcome> = (0..total)
        .into_par_iter()
        .map(|i| {
            let point = grid_point(i, n, radius);
            let x: Vec<Rational> = point.iter().map(|&v| Rational::from(v)).collect();
            let exact = match eval_exact(s, &x) {
                Ok(v) => v,
                Err(EvalError::DivisionByZero { .. }) => return PointOutcome::Skipped,
                Err(e) => {
                    return PointOutcome::Failed(FailedPoint {
                        point,
                        error: e.to_string(),
                    })
                }
            };
            match eval_fixed(s, cfg, &x) {
                Ok((fixed, widths)) => PointOutcome::Ok {
                    errors: fixed
                        .iter()
                        .zip(&exact)
                        .map(|(f, e)| (f - e).abs())
                        .collect(),
                    widths,
                },
                Err(e) => PointOutcome::Failed(FailedPoint {
                    point,
                    error: e.to_string(),
                }),
            }
        })
        .collect();

    let mut report = SweepReport {
        radius,
        points: total,
        skipped: 0,
        failures: Vec::new(),
        max_abs_error: vec![Rational::zero(); s.output_width()],
        widths: WidthReport::empty_for(s),
    };
    for o in outcomes {
        match o {
            PointOutcome::Skipped => report.skipped += 1,
            PointOutcome::Failed(p) => report.failures.push(p),
            PointOutcome::Ok { errors, widths } => {
                for (m, e) in report.max_abs_error.iter_mut().zip(errors) {
                    if e > *m {
                        *m = e;
                    }
                }
                report.widths.merge(&widths);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::Stage;

    fn square_one() -> Scheme {
        Scheme::new("sq", &["x"], &["y"], vec![Stage::square_all(1)])
    }

    #[test]
    fn config_validation() {
        assert!(FixedPointConfig::new(1, 0).is_err());
        assert!(FixedPointConfig::new(8, 8).is_err());
        assert!(FixedPointConfig::new(8, 7).is_ok());
    }

    #[test]
    fn squaring_127_overflows_eight_bits() {
        let cfg = FixedPointConfig::new(8, 0).unwrap();
        let err = eval_fixed(&square_one(), &cfg, &[Rational::from(127)]).unwrap_err();
        assert!(matches!(
            err,
            EvalError::Overflow {
                stage: 0,
                wire: 0,
                unit: UnitKind::Squarer,
                ..
            }
        ));
        let (out, w) = eval_fixed(&square_one(), &cfg, &[Rational::from(11)]).unwrap();
        assert_eq!(out, vec![Rational::from(121)]);
        assert_eq!(w.stages[0][0], 7);
        assert_eq!(w.required_word_bits(), 8);
    }

    #[test]
    fn unrepresentable_inputs_rejected() {
        let cfg = FixedPointConfig::new(16, 2).unwrap();
        let s = square_one();
        assert!(matches!(
            eval_fixed(&s, &cfg, &[Rational::new(1, 8).unwrap()]),
            Err(EvalError::Unrepresentable { input: 0, .. })
        ));
        assert!(matches!(
            eval_fixed(&s, &cfg, &[Rational::from(1 << 13)]),
            Err(EvalError::Unrepresentable { .. })
        ));
        let (out, _) = eval_fixed(&s, &cfg, &[Rational::new(3, 4).unwrap()]).unwrap();
        // (3/4)^2 = 9/16 truncates to 2/4 at two fraction bits
        assert_eq!(out, vec![Rational::new(1, 2).unwrap()]);
    }

    #[test]
    fn division_truncates_toward_zero() {
        let s = Scheme::new(
            "d",
            &["x", "y"],
            &["q"],
            vec![Stage::Binary(vec![BinaryOp::Div { num: 0, den: 1 }])],
        );
        let cfg = FixedPointConfig::new(16, 2).unwrap();
        let (out, _) = eval_fixed(&s, &cfg, &[Rational::from(-1), Rational::from(3)]).unwrap();
        assert_eq!(out, vec![Rational::new(-1, 4).unwrap()]);
        assert!(matches!(
            eval_fixed(&s, &cfg, &[Rational::from(1), Rational::zero()]),
            Err(EvalError::DivisionByZero { stage: 0, wire: 0 })
        ));
    }

    #[test]
    fn partial_sums_are_checked() {
        let s = Scheme::new(
            "a",
            &["x", "y"],
            &["s"],
            vec![Stage::linear_ints(&[[1, 1]])],
        );
        let cfg = FixedPointConfig::new(8, 0).unwrap();
        assert!(matches!(
            eval_fixed(&s, &cfg, &[Rational::from(100), Rational::from(100)]),
            Err(EvalError::Overflow {
                unit: UnitKind::Adder,
                ..
            })
        ));
    }

    #[test]
    fn width_reports_merge_by_max() {
        let mut a = WidthReport {
            inputs: vec![1, 5],
            stages: vec![vec![3]],
        };
        let b = WidthReport {
            inputs: vec![4, 2],
            stages: vec![vec![7]],
        };
        a.merge(&b);
        assert_eq!(a.inputs, vec![4, 5]);
        assert_eq!(a.stages, vec![vec![7]]);
    }
}
