//! Cross-module invariants on randomly generated schemes.

use cxsq::cost::audit;
use cxsq::eval::{eval_exact, eval_fixed, eval_symbolic, FixedPointConfig};
use cxsq::library::{builtin, list_builtins};
use cxsq::numeric::{RMatrix, Rational};
use cxsq::scheme::{
    compose, from_json, parallel, to_json, BinaryOp, DataflowGraph, NodeKind, Scheme, Stage,
    UnaryOp,
};
use proptest::prelude::*;

fn constant(int_only: bool) -> BoxedStrategy<Rational> {
    if int_only {
        prop::sample::select(vec![-3i64, -2, -1, 0, 1, 2, 3, 4])
            .prop_map(Rational::from)
            .boxed()
    } else {
        prop::sample::select(vec![
            (-3, 1),
            (-1, 1),
            (0, 1),
            (1, 1),
            (2, 1),
            (1, 4),
            (-1, 2),
            (3, 5),
        ])
        .prop_map(|(p, q)| Rational::new(p, q).unwrap())
        .boxed()
    }
}

fn stage(width: usize, int_only: bool, allow_div: bool) -> BoxedStrategy<Stage> {
    let linear = (1..=4usize)
        .prop_flat_map(move |rows| {
            prop::collection::vec(constant(int_only), rows * width)
                .prop_map(move |e| Stage::Linear(RMatrix::new(rows, width, e).unwrap()))
        })
        .boxed();
    let unary_op = prop_oneof![
        (0..width).prop_map(UnaryOp::Copy),
        (0..width).prop_map(UnaryOp::Square),
        (0..width, constant(int_only)).prop_map(|(s, c)| UnaryOp::Scale(s, c)),
    ];
    let unary = prop::collection::vec(unary_op, 1..=4)
        .prop_map(Stage::Unary)
        .boxed();
    let binary_op = if allow_div {
        prop_oneof![
            (0..width).prop_map(BinaryOp::Copy),
            (0..width, 0..width).prop_map(|(l, r)| BinaryOp::Mul(l, r)),
            (0..width, 0..width).prop_map(|(num, den)| BinaryOp::Div { num, den }),
        ]
        .boxed()
    } else {
        prop_oneof![
            (0..width).prop_map(BinaryOp::Copy),
            (0..width, 0..width).prop_map(|(l, r)| BinaryOp::Mul(l, r)),
        ]
        .boxed()
    };
    let binary = prop::collection::vec(binary_op, 1..=4)
        .prop_map(Stage::Binary)
        .boxed();
    prop_oneof![linear, unary, binary].boxed()
}

/// A valid scheme with `inputs` inputs and up to `depth` stages.
fn scheme(inputs: usize, depth: usize, int_only: bool, allow_div: bool) -> BoxedStrategy<Scheme> {
    let labels: Vec<String> = (0..inputs).map(|i| format!("x{i}")).collect();
    let start = Just(Scheme {
        name: "random".into(),
        input_labels: labels.clone(),
        output_labels: labels,
        stages: Vec::new(),
        known_erratum: None,
    })
    .boxed();
    (0..depth).fold(start, move |acc, _| {
        acc.prop_flat_map(move |s| {
            let w = s.wire_widths().last().copied().unwrap_or(inputs);
            (Just(s), stage(w, int_only, allow_div)).prop_map(|(mut s, st)| {
                s.stages.push(st);
                let w = s.wire_widths().last().copied().unwrap();
                s.output_labels = (0..w).map(|i| format!("y{i}")).collect();
                s
            })
        })
        .boxed()
    })
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(-6i64..=6, n).prop_map(|v| v.into_iter().map(Rational::from).collect())
}

fn dot_counts_match_audit(s: &Scheme) {
    let g = DataflowGraph::from_scheme(s).unwrap();
    let c = audit(s).unwrap();
    assert_eq!(g.count(NodeKind::Adder), c.adders);
    assert_eq!(g.count(NodeKind::Squarer), c.squarers);
    assert_eq!(g.count(NodeKind::Multiplier), c.multipliers);
    assert_eq!(g.count(NodeKind::Divider), c.dividers);
    assert_eq!(g.count(NodeKind::Shift), c.shifts);
    assert_eq!(g.count(NodeKind::ConstMultiplier), c.const_multipliers);
    assert_eq!(g.count(NodeKind::Input), s.input_width());
    assert_eq!(g.count(NodeKind::Output), s.output_width());
}

#[test]
fn builtin_graphs_agree_with_audit() {
    for name in list_builtins() {
        dot_counts_match_audit(&builtin(name).unwrap().scheme);
    }
}

#[test]
fn builtin_expected_costs_hold() {
    for name in list_builtins() {
        let e = builtin(name).unwrap();
        assert_eq!(audit(&e.scheme).unwrap(), e.expected_cost, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_schemes_validate(s in scheme(3, 4, false, true)) {
        prop_assert!(s.validate().is_ok(), "{:?}", s.validate());
    }

    #[test]
    fn json_round_trip(s in scheme(3, 4, false, true)) {
        prop_assert_eq!(from_json(&to_json(&s)).unwrap(), s);
    }

    #[test]
    fn graph_counts_equal_audit(s in scheme(3, 4, false, true)) {
        dot_counts_match_audit(&s);
    }

    #[test]
    fn audit_is_additive_under_compose(
        (a, b) in scheme(2, 3, false, true).prop_flat_map(|a| {
            let w = a.output_width();
            (Just(a), scheme(w, 3, false, true))
        })
    ) {
        let ab = compose(&a, &b).unwrap();
        prop_assert_eq!(audit(&ab).unwrap(), audit(&a).unwrap() + audit(&b).unwrap());
    }

    #[test]
    fn parallel_evaluates_both_halves(
        a in scheme(2, 3, false, false),
        b in scheme(2, 3, false, false),
        x in point(4),
    ) {
        let mut b = b;
        b.input_labels = vec!["z0".into(), "z1".into()];
        b.output_labels = b.output_labels.iter().map(|l| format!("{l}b")).collect();
        let ab = parallel(&a, &b).unwrap();
        prop_assert_eq!(audit(&ab).unwrap(), audit(&a).unwrap() + audit(&b).unwrap());
        let mut want = eval_exact(&a, &x[..2]).unwrap();
        want.extend(eval_exact(&b, &x[2..]).unwrap());
        prop_assert_eq!(eval_exact(&ab, &x).unwrap(), want);
    }

    #[test]
    fn symbolic_agrees_with_exact(s in scheme(3, 4, false, false), x in point(3)) {
        let fns = eval_symbolic(&s).unwrap();
        let exact = eval_exact(&s, &x).unwrap();
        let sym: Vec<Rational> = fns.iter().map(|f| f.eval(&x).unwrap()).collect();
        prop_assert_eq!(sym, exact);
    }

    #[test]
    fn integer_fixed_point_is_exact_when_it_fits(s in scheme(2, 3, true, false), x in point(2)) {
        let cfg = FixedPointConfig::new(4096, 0).unwrap();
        let (fixed, widths) = eval_fixed(&s, &cfg, &x).unwrap();
        prop_assert_eq!(fixed, eval_exact(&s, &x).unwrap());
        prop_assert!(widths.required_word_bits() <= 4096);
    }
}
