//! Dataflow representation of a computation scheme.
//!
//! A [`Scheme`] is a straight pipeline of [`Stage`]s. Each stage maps the
//! current wire vector to a new one: `Linear` multiplies by a rational
//! matrix, `Unary` applies one single-input op per output wire, and
//! `Binary` applies one two-input op per output wire.

mod dot;
mod json;

pub use dot::{export_dot, DataflowGraph, NodeKind};
pub use json::{from_json, to_json, JsonError};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::numeric::{RMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Copy(usize),
    Square(usize),
    Scale(usize, Rational),
}

impl UnaryOp {
    pub fn src(&self) -> usize {
        match self {
            UnaryOp::Copy(s) | UnaryOp::Square(s) | UnaryOp::Scale(s, _) => *s,
        }
    }

    fn shifted(&self, by: usize) -> UnaryOp {
        match self {
            UnaryOp::Copy(s) => UnaryOp::Copy(s + by),
            UnaryOp::Square(s) => UnaryOp::Square(s + by),
            UnaryOp::Scale(s, c) => UnaryOp::Scale(s + by, c.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Copy(usize),
    Mul(usize, usize),
    Div { num: usize, den: usize },
}

impl BinaryOp {
    pub fn sources(&self) -> Vec<usize> {
        match self {
            BinaryOp::Copy(s) => vec![*s],
            BinaryOp::Mul(l, r) => vec![*l, *r],
            BinaryOp::Div { num, den } => vec![*num, *den],
        }
    }

    fn shifted(&self, by: usize) -> BinaryOp {
        match self {
            BinaryOp::Copy(s) => BinaryOp::Copy(s + by),
            BinaryOp::Mul(l, r) => BinaryOp::Mul(l + by, r + by),
            BinaryOp::Div { num, den } => BinaryOp::Div {
                num: num + by,
                den: den + by,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stage {
    Linear(RMatrix),
    Unary(Vec<UnaryOp>),
    Binary(Vec<BinaryOp>),
}

impl Stage {
    pub fn linear_ints<R: AsRef<[i64]>>(rows: &[R]) -> Stage {
        Stage::Linear(RMatrix::from_ints(rows))
    }

    pub fn square_all(width: usize) -> Stage {
        Stage::Unary((0..width).map(UnaryOp::Square).collect())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Stage::Linear(_) => "linear",
            Stage::Unary(_) => "unary",
            Stage::Binary(_) => "binary",
        }
    }

    pub fn output_width(&self) -> usize {
        match self {
            Stage::Linear(m) => m.rows(),
            Stage::Unary(ops) => ops.len(),
            Stage::Binary(ops) => ops.len(),
        }
    }

    /// Input width a `Linear` stage demands; `None` for op-list stages,
    /// which accept any width covering their wire references.
    pub fn fixed_input_width(&self) -> Option<usize> {
        match self {
            Stage::Linear(m) => Some(m.cols()),
            _ => None,
        }
    }

    /// Same stage acting on `before` extra leading wires and `after` extra
    /// trailing wires, which are passed through unchanged.
    fn with_passthrough(&self, before: usize, in_width: usize, after: usize) -> Stage {
        match self {
            Stage::Linear(m) => {
                let mut out = m.clone();
                if before > 0 {
                    out = RMatrix::identity(before).block_diag(&out);
                }
                if after > 0 {
                    out = out.block_diag(&RMatrix::identity(after));
                }
                Stage::Linear(out)
            }
            Stage::Unary(ops) => Stage::Unary(
                (0..before)
                    .map(UnaryOp::Copy)
                    .chain(ops.iter().map(|op| op.shifted(before)))
                    .chain((0..after).map(|i| UnaryOp::Copy(before + in_width + i)))
                    .collect(),
            ),
            Stage::Binary(ops) => Stage::Binary(
                (0..before)
                    .map(BinaryOp::Copy)
                    .chain(ops.iter().map(|op| op.shifted(before)))
                    .chain((0..after).map(|i| BinaryOp::Copy(before + in_width + i)))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    pub name: String,
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    pub stages: Vec<Stage>,
    pub known_erratum: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    /// Stage `stage` receives `actual` wires but needs `expected`.
    /// `stage == stages.len()` refers to the output label list.
    WidthMismatch {
        stage: usize,
        expected: usize,
        actual: usize,
    },
    WireOutOfRange {
        stage: usize,
        op: usize,
        wire: usize,
        width: usize,
    },
    DuplicateInputLabel(String),
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::WidthMismatch {
                stage,
                expected,
                actual,
            } => write!(
                f,
                "width mismatch at stage {stage}: expected {expected} wires, got {actual}"
            ),
            ValidationIssue::WireOutOfRange {
                stage,
                op,
                wire,
                width,
            } => write!(
                f,
                "stage {stage} op {op} references wire {wire}, but only {width} wires are available"
            ),
            ValidationIssue::DuplicateInputLabel(l) => write!(f, "duplicate input label {l:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn first_width_violation(&self) -> Option<&ValidationIssue> {
        self.issues
            .iter()
            .find(|i| matches!(i, ValidationIssue::WidthMismatch { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("invalid scheme {name:?}: {}", join_issues(.issues))]
    Invalid {
        name: String,
        issues: Vec<ValidationIssue>,
    },
    #[error(
        "cannot compose: {first:?} produces {produced} wires but {second:?} consumes {consumed}"
    )]
    ComposeWidth {
        first: String,
        second: String,
        produced: usize,
        consumed: usize,
    },
    #[error("input label {0:?} appears in both halves of a parallel scheme")]
    LabelClash(String),
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Scheme {
    pub fn new(
        name: impl Into<String>,
        inputs: &[&str],
        outputs: &[&str],
        stages: Vec<Stage>,
    ) -> Scheme {
        Scheme {
            name: name.into(),
            input_labels: inputs.iter().map(|s| s.to_string()).collect(),
            output_labels: outputs.iter().map(|s| s.to_string()).collect(),
            stages,
            known_erratum: None,
        }
    }

    pub fn with_erratum(mut self, note: impl Into<String>) -> Scheme {
        self.known_erratum = Some(note.into());
        self
    }

    /// Single identity `Linear` stage over `labels`.
    pub fn identity(labels: &[&str]) -> Scheme {
        Scheme::new(
            format!("identity{}", labels.len()),
            labels,
            labels,
            vec![Stage::Linear(RMatrix::identity(labels.len()))],
        )
    }

    pub fn input_width(&self) -> usize {
        self.input_labels.len()
    }

    pub fn output_width(&self) -> usize {
        self.output_labels.len()
    }

    /// Width of the wire vector entering each stage, followed by the final
    /// output width. Only meaningful on a valid scheme.
    pub fn wire_widths(&self) -> Vec<usize> {
        std::iter::once(self.input_width())
            .chain(self.stages.iter().map(Stage::output_width))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let mut seen = HashSet::new();
        for l in &self.input_labels {
            if !seen.insert(l.as_str()) {
                issues.push(ValidationIssue::DuplicateInputLabel(l.clone()));
            }
        }

        let mut width = self.input_width();
        let mut chain_ok = true;
        for (idx, stage) in self.stages.iter().enumerate() {
            match stage {
                Stage::Linear(m) => {
                    if m.cols() != width {
                        issues.push(ValidationIssue::WidthMismatch {
                            stage: idx,
                            expected: m.cols(),
                            actual: width,
                        });
                        chain_ok = false;
                        break;
                    }
                }
                Stage::Unary(ops) => {
                    for (op, u) in ops.iter().enumerate() {
                        if u.src() >= width {
                            issues.push(ValidationIssue::WireOutOfRange {
                                stage: idx,
                                op,
                                wire: u.src(),
                                width,
                            });
                        }
                    }
                }
                Stage::Binary(ops) => {
                    for (op, b) in ops.iter().enumerate() {
                        for wire in b.sources() {
                            if wire >= width {
                                issues.push(ValidationIssue::WireOutOfRange {
                                    stage: idx,
                                    op,
                                    wire,
                                    width,
                                });
                            }
                        }
                    }
                }
            }
            width = stage.output_width();
        }
        if chain_ok && width != self.output_width() {
            issues.push(ValidationIssue::WidthMismatch {
                stage: self.stages.len(),
                expected: self.output_width(),
                actual: width,
            });
        }
        ValidationReport { issues }
    }

    pub fn ensure_valid(&self) -> Result<(), SchemeError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(SchemeError::Invalid {
                name: self.name.clone(),
                issues: report.issues,
            })
        }
    }

    pub fn has_div(&self) -> bool {
        self.stages.iter().any(|s| {
            matches!(s, Stage::Binary(ops) if ops.iter().any(|o| matches!(o, BinaryOp::Div { .. })))
        })
    }
}

/// Pipeline concatenation: `second` runs on the outputs of `first`.
pub fn compose(first: &Scheme, second: &Scheme) -> Result<Scheme, SchemeError> {
    first.ensure_valid()?;
    second.ensure_valid()?;
    if first.output_width() != second.input_width() {
        return Err(SchemeError::ComposeWidth {
            first: first.name.clone(),
            second: second.name.clone(),
            produced: first.output_width(),
            consumed: second.input_width(),
        });
    }
    let known_erratum = match (&first.known_erratum, &second.known_erratum) {
        (Some(a), Some(b)) => Some(format!("{a}; {b}")),
        (Some(a), None) | (None, Some(a)) => Some(a.clone()),
        (None, None) => None,
    };
    Ok(Scheme {
        name: format!("{}+{}", first.name, second.name),
        input_labels: first.input_labels.clone(),
        output_labels: second.output_labels.clone(),
        stages: first.stages.iter().chain(&second.stages).cloned().collect(),
        known_erratum,
    })
}

/// Side-by-side combination: inputs are `top`'s followed by `bottom`'s, and
/// likewise for outputs. `top`'s stages run first with `bottom`'s inputs
/// passed through, then `bottom`'s stages run with `top`'s outputs passed
/// through. No unit is added beyond those of the two parts.
pub fn parallel(top: &Scheme, bottom: &Scheme) -> Result<Scheme, SchemeError> {
    top.ensure_valid()?;
    bottom.ensure_valid()?;
    if let Some(l) = top
        .input_labels
        .iter()
        .find(|l| bottom.input_labels.contains(l))
    {
        return Err(SchemeError::LabelClash(l.clone()));
    }

    let mut stages = Vec::with_capacity(top.stages.len() + bottom.stages.len());
    let top_widths = top.wire_widths();
    for (i, st) in top.stages.iter().enumerate() {
        stages.push(st.with_passthrough(0, top_widths[i], bottom.input_width()));
    }
    let bottom_widths = bottom.wire_widths();
    for (i, st) in bottom.stages.iter().enumerate() {
        stages.push(st.with_passthrough(top.output_width(), bottom_widths[i], 0));
    }

    Ok(Scheme {
        name: format!("{}|{}", top.name, bottom.name),
        input_labels: top
            .input_labels
            .iter()
            .chain(&bottom.input_labels)
            .cloned()
            .collect(),
        output_labels: top
            .output_labels
            .iter()
            .chain(&bottom.output_labels)
            .cloned()
            .collect(),
        stages,
        known_erratum: None,
    })
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme {}", self.name)?;
        writeln!(f, "inputs:  {}", self.input_labels.join(", "))?;
        writeln!(f, "outputs: {}", self.output_labels.join(", "))?;
        if let Some(e) = &self.known_erratum {
            writeln!(f, "erratum: {e}")?;
        }
        for (i, st) in self.stages.iter().enumerate() {
            match st {
                Stage::Linear(m) => {
                    writeln!(f, "stage {i}: linear {}x{}", m.rows(), m.cols())?;
                    for line in m.to_string().lines() {
                        writeln!(f, "  {line}")?;
                    }
                }
                Stage::Unary(ops) => {
                    let items: Vec<String> = ops
                        .iter()
                        .map(|op| match op {
                            UnaryOp::Copy(s) => format!("copy({s})"),
                            UnaryOp::Square(s) => format!("square({s})"),
                            UnaryOp::Scale(s, c) => format!("scale({s}, {c})"),
                        })
                        .collect();
                    writeln!(f, "stage {i}: unary [{}]", items.join(", "))?;
                }
                Stage::Binary(ops) => {
                    let items: Vec<String> = ops
                        .iter()
                        .map(|op| match op {
                            BinaryOp::Copy(s) => format!("copy({s})"),
                            BinaryOp::Mul(l, r) => format!("mul({l}, {r})"),
                            BinaryOp::Div { num, den } => format!("div({num}, {den})"),
                        })
                        .collect();
                    writeln!(f, "stage {i}: binary [{}]", items.join(", "))?;
                }
            }
        }
        Ok(())
    }
}
