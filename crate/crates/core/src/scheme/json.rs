//! JSON document format for schemes. Rationals travel as strings (`"p/q"`
//! or `"p"`), never as JSON numbers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BinaryOp, Scheme, Stage, UnaryOp};
use crate::numeric::{RMatrix, Rational};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed scheme document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("at {path}: {message}")]
    Content { path: String, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeDoc {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    erratum: Option<String>,
    stages: Vec<StageDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum StageDoc {
    Linear {
        rows: usize,
        cols: usize,
        entries: Vec<Vec<String>>,
    },
    Unary {
        ops: Vec<UnaryDoc>,
    },
    Binary {
        ops: Vec<BinaryDoc>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum UnaryDoc {
    Square { src: usize },
    Copy { src: usize },
    Scale { src: usize, c: String },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum BinaryDoc {
    Mul { lhs: usize, rhs: usize },
    Div { num: usize, den: usize },
    Copy { src: usize },
}

pub fn to_json(s: &Scheme) -> String {
    let doc = SchemeDoc {
        name: s.name.clone(),
        inputs: s.input_labels.clone(),
        outputs: s.output_labels.clone(),
        erratum: s.known_erratum.clone(),
        stages: s.stages.iter().map(stage_to_doc).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("scheme documents always serialize")
}

fn stage_to_doc(st: &Stage) -> StageDoc {
    match st {
        Stage::Linear(m) => StageDoc::Linear {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .row_iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
        },
        Stage::Unary(ops) => StageDoc::Unary {
            ops: ops
                .iter()
                .map(|op| match op {
                    UnaryOp::Copy(src) => UnaryDoc::Copy { src: *src },
                    UnaryOp::Square(src) => UnaryDoc::Square { src: *src },
                    UnaryOp::Scale(src, c) => UnaryDoc::Scale {
                        src: *src,
                        c: c.to_string(),
                    },
                })
                .collect(),
        },
        Stage::Binary(ops) => StageDoc::Binary {
            ops: ops
                .iter()
                .map(|op| match op {
                    BinaryOp::Copy(src) => BinaryDoc::Copy { src: *src },
                    BinaryOp::Mul(lhs, rhs) => BinaryDoc::Mul {
                        lhs: *lhs,
                        rhs: *rhs,
                    },
                    BinaryOp::Div { num, den } => BinaryDoc::Div {
                        num: *num,
                        den: *den,
                    },
                })
                .collect(),
        },
    }
}

/// Parses a scheme document. Structural problems (bad rationals, matrix
/// shapes that disagree with `rows`/`cols`) are rejected here; width-chain
/// checks are left to [`Scheme::validate`].
pub fn from_json(text: &str) -> Result<Scheme, JsonError> {
    let doc: SchemeDoc = serde_json::from_str(text)?;
    let stages = doc
        .stages
        .into_iter()
        .enumerate()
        .map(|(i, st)| stage_from_doc(i, st))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Scheme {
        name: doc.name,
        input_labels: doc.inputs,
        output_labels: doc.outputs,
        stages,
        known_erratum: doc.erratum,
    })
}

fn content(path: String, message: impl Into<String>) -> JsonError {
    JsonError::Content {
        path,
        message: message.into(),
    }
}

fn parse_rational(path: String, s: &str) -> Result<Rational, JsonError> {
    s.parse::<Rational>()
        .map_err(|e| content(path, e.to_string()))
}

fn stage_from_doc(idx: usize, st: StageDoc) -> Result<Stage, JsonError> {
    Ok(match st {
        StageDoc::Linear {
            rows,
            cols,
            entries,
        } => {
            if entries.len() != rows {
                return Err(content(
                    format!("stages[{idx}].entries"),
                    format!("declared {rows} rows, found {}", entries.len()),
                ));
            }
            let mut flat = Vec::with_capacity(rows * cols);
            for (r, row) in entries.iter().enumerate() {
                if row.len() != cols {
                    return Err(content(
                        format!("stages[{idx}].entries[{r}]"),
                        format!("declared {cols} columns, found {}", row.len()),
                    ));
                }
                for (c, e) in row.iter().enumerate() {
                    flat.push(parse_rational(
                        format!("stages[{idx}].entries[{r}][{c}]"),
                        e,
                    )?);
                }
            }
            let m = RMatrix::new(rows, cols, flat)
                .map_err(|e| content(format!("stages[{idx}]"), e.to_string()))?;
            Stage::Linear(m)
        }
        StageDoc::Unary { ops } => Stage::Unary(
            ops.into_iter()
                .enumerate()
                .map(|(k, op)| {
                    Ok(match op {
                        UnaryDoc::Copy { src } => UnaryOp::Copy(src),
                        UnaryDoc::Square { src } => UnaryOp::Square(src),
                        UnaryDoc::Scale { src, c } => UnaryOp::Scale(
                            src,
                            parse_rational(format!("stages[{idx}].ops[{k}].c"), &c)?,
                        ),
                    })
                })
                .collect::<Result<_, JsonError>>()?,
        ),
        StageDoc::Binary { ops } => Stage::Binary(
            ops.into_iter()
                .map(|op| match op {
                    BinaryDoc::Copy { src } => BinaryOp::Copy(src),
                    BinaryDoc::Mul { lhs, rhs } => BinaryOp::Mul(lhs, rhs),
                    BinaryDoc::Div { num, den } => BinaryOp::Div { num, den },
                })
                .collect(),
        ),
    })
}
