//! Expansion of a scheme into a unit-level dataflow graph, and Graphviz
//! DOT rendering of that graph.
//!
//! A `Linear` row with `k` nonzero entries becomes a left-to-right chain of
//! `k - 1` two-input adders. Entries of `±1` are plain wires (a negative
//! sign is carried on the edge), `±2^j` entries become shift nodes, and any
//! other constant becomes a constant-multiplier node.

use std::fmt::Write;

use super::{BinaryOp, Scheme, SchemeError, Stage, UnaryOp};
use crate::numeric::{ConstClass, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Input,
    Output,
    Adder,
    Squarer,
    Shift,
    ConstMultiplier,
    Multiplier,
    Divider,
    /// Constant zero produced by an all-zero row or a zero scale.
    Zero,
}

impl NodeKind {
    fn id_prefix(self) -> &'static str {
        match self {
            NodeKind::Input => "in",
            NodeKind::Output => "out",
            NodeKind::Adder => "add",
            NodeKind::Squarer => "sq",
            NodeKind::Shift => "shift",
            NodeKind::ConstMultiplier => "cmul",
            NodeKind::Multiplier => "mul",
            NodeKind::Divider => "div",
            NodeKind::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub negated: bool,
    pub port: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DataflowGraph {
    pub name: String,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// A wire value: the node producing it and whether it is negated.
#[derive(Debug, Clone, Copy)]
struct Signal {
    node: usize,
    negated: bool,
}

impl Signal {
    fn negate_if(self, neg: bool) -> Signal {
        Signal {
            node: self.node,
            negated: self.negated ^ neg,
        }
    }
}

impl DataflowGraph {
    pub fn from_scheme(s: &Scheme) -> Result<DataflowGraph, SchemeError> {
        s.ensure_valid()?;
        let mut g = DataflowGraph {
            name: s.name.clone(),
            ..Default::default()
        };
        let mut counters = std::collections::HashMap::new();

        let mut wires: Vec<Signal> = s
            .input_labels
            .iter()
            .map(|l| {
                let n = g.add_node(&mut counters, NodeKind::Input, l.clone());
                Signal {
                    node: n,
                    negated: false,
                }
            })
            .collect();

        for stage in &s.stages {
            wires = match stage {
                Stage::Linear(m) => m
                    .row_iter()
                    .map(|row| {
                        let terms: Vec<Signal> = row
                            .iter()
                            .zip(&wires)
                            .filter(|(c, _)| !c.is_zero())
                            .map(|(c, w)| g.scaled(&mut counters, *w, c))
                            .collect();
                        g.sum_chain(&mut counters, &terms)
                    })
                    .collect(),
                Stage::Unary(ops) => ops
                    .iter()
                    .map(|op| match op {
                        UnaryOp::Copy(src) => wires[*src],
                        UnaryOp::Square(src) => {
                            let n = g.add_node(&mut counters, NodeKind::Squarer, "sq".into());
                            g.connect(wires[*src], n, None);
                            Signal {
                                node: n,
                                negated: false,
                            }
                        }
                        UnaryOp::Scale(src, c) => {
                            if c.is_zero() {
                                g.zero(&mut counters)
                            } else {
                                g.scaled(&mut counters, wires[*src], c)
                            }
                        }
                    })
                    .collect(),
                Stage::Binary(ops) => ops
                    .iter()
                    .map(|op| match op {
                        BinaryOp::Copy(src) => wires[*src],
                        BinaryOp::Mul(l, r) => {
                            let n = g.add_node(&mut counters, NodeKind::Multiplier, "*".into());
                            g.connect(wires[*l], n, None);
                            g.connect(wires[*r], n, None);
                            Signal {
                                node: n,
                                negated: false,
                            }
                        }
                        BinaryOp::Div { num, den } => {
                            let n = g.add_node(&mut counters, NodeKind::Divider, "/".into());
                            g.connect(wires[*num], n, Some("num"));
                            g.connect(wires[*den], n, Some("den"));
                            Signal {
                                node: n,
                                negated: false,
                            }
                        }
                    })
                    .collect(),
            };
        }

        for (label, w) in s.output_labels.iter().zip(wires) {
            let n = g.add_node(&mut counters, NodeKind::Output, label.clone());
            g.connect(w, n, None);
        }
        Ok(g)
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    fn add_node(
        &mut self,
        counters: &mut std::collections::HashMap<NodeKind, usize>,
        kind: NodeKind,
        label: String,
    ) -> usize {
        let k = counters.entry(kind).or_insert(0);
        let id = format!("{}{}", kind.id_prefix(), k);
        *k += 1;
        self.nodes.push(Node { id, kind, label });
        self.nodes.len() - 1
    }

    fn connect(&mut self, from: Signal, to: usize, port: Option<&'static str>) {
        self.edges.push(Edge {
            from: from.node,
            to,
            negated: from.negated,
            port,
        });
    }

    fn zero(&mut self, counters: &mut std::collections::HashMap<NodeKind, usize>) -> Signal {
        let n = self.add_node(counters, NodeKind::Zero, "0".into());
        Signal {
            node: n,
            negated: false,
        }
    }

    fn scaled(
        &mut self,
        counters: &mut std::collections::HashMap<NodeKind, usize>,
        w: Signal,
        c: &Rational,
    ) -> Signal {
        let kind = match c.classify() {
            ConstClass::Zero => return self.zero(counters),
            ConstClass::PlusMinusOne => return w.negate_if(c.is_negative()),
            ConstClass::PowerOfTwo(_) => NodeKind::Shift,
            ConstClass::General => NodeKind::ConstMultiplier,
        };
        let n = self.add_node(counters, kind, format!("x{}", c.abs()));
        self.connect(w, n, None);
        Signal {
            node: n,
            negated: c.is_negative(),
        }
    }

    fn sum_chain(
        &mut self,
        counters: &mut std::collections::HashMap<NodeKind, usize>,
        terms: &[Signal],
    ) -> Signal {
        let Some((&first, rest)) = terms.split_first() else {
            return self.zero(counters);
        };
        rest.iter().fold(first, |acc, &t| {
            let n = self.add_node(counters, NodeKind::Adder, "+".into());
            self.connect(acc, n, None);
            self.connect(t, n, None);
            Signal {
                node: n,
                negated: false,
            }
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", quote(&self.name)).unwrap();
        writeln!(out, "  rankdir=LR;").unwrap();
        for n in &self.nodes {
            let shape = match n.kind {
                NodeKind::Input | NodeKind::Output => "plaintext",
                NodeKind::Adder | NodeKind::Shift | NodeKind::ConstMultiplier => "circle",
                NodeKind::Squarer => "square",
                NodeKind::Multiplier | NodeKind::Divider => "box",
                NodeKind::Zero => "point",
            };
            writeln!(
                out,
                "  {} [label={}, shape={}];",
                n.id,
                quote(&n.label),
                shape
            )
            .unwrap();
        }
        for e in &self.edges {
            let mut label = String::new();
            if e.negated {
                label.push('-');
            }
            if let Some(p) = e.port {
                label.push_str(p);
            }
            let from = &self.nodes[e.from].id;
            let to = &self.nodes[e.to].id;
            if label.is_empty() {
                writeln!(out, "  {from} -> {to};").unwrap();
            } else {
                writeln!(out, "  {from} -> {to} [label={}];", quote(&label)).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            q.push('\\');
        }
        q.push(ch);
    }
    q.push('"');
    q
}

pub fn export_dot(s: &Scheme) -> Result<String, SchemeError> {
    Ok(DataflowGraph::from_scheme(s)?.to_dot())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scheme_has_no_operation_nodes() {
        let g = DataflowGraph::from_scheme(&Scheme::identity(&["x", "y"])).unwrap();
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.count(NodeKind::Input), 2);
        assert_eq!(g.count(NodeKind::Output), 2);
        assert_eq!(g.edges.len(), 2);
        let dot = g.to_dot();
        assert!(dot.contains("in0 -> out0;"));
        assert!(dot.contains("in1 -> out1;"));
    }

    #[test]
    fn row_with_three_terms_expands_to_two_adders() {
        let s = Scheme::new(
            "r",
            &["x", "y", "z"],
            &["s"],
            vec![Stage::linear_ints(&[[1, -1, 4]])],
        );
        let g = DataflowGraph::from_scheme(&s).unwrap();
        assert_eq!(g.count(NodeKind::Adder), 2);
        assert_eq!(g.count(NodeKind::Shift), 1);
        let dot = g.to_dot();
        assert!(dot.contains("in1 -> add0 [label=\"-\"];"), "{dot}");
    }

    #[test]
    fn invalid_scheme_refused() {
        let s = Scheme::new("bad", &["x"], &["y"], vec![Stage::linear_ints(&[[1, 1]])]);
        assert!(export_dot(&s).is_err());
    }

    #[test]
    fn labels_are_escaped() {
        let s = Scheme::identity(&["a\"b"]);
        assert!(export_dot(&s).unwrap().contains(r#"label="a\"b""#));
    }
}
