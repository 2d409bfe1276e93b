//! Property tests for the structural invariants: printer/parser round-trip
//! over generated ASTs, transform bijectivity, and weight shift invariance.

use bayesmux::density::{build_parameter_space, from_unconstrained, to_unconstrained, Dataset};
use bayesmux::dsl::{
    parse_model, pretty_print, ArrayLen, BinOp, DataDecl, Dist, Expr, GoalDecl, NumKind, ParamDecl,
    ParsedModel, SamplingStatement,
};
use bayesmux::ensemble::snis_weights;
use proptest::prelude::*;

const RESERVED: &[&str] = &[
    "data",
    "params",
    "model",
    "goal",
    "int",
    "real",
    "in",
    "lower",
    "upper",
    "normal",
    "student_t",
    "uniform",
    "beta",
    "gamma",
    "exponential",
    "bernoulli",
    "binomial",
];

fn name_strategy() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}".prop_filter("reserved word", |s| !RESERVED.contains(&s.as_str()))
}

fn literal_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        (-50i32..50).prop_map(f64::from),
        Just(0.0),
        Just(0.5),
    ]
}

/// Expressions in canonical form: negation never wraps a bare literal (the
/// parser folds that case into the literal itself).
fn expr_strategy(names: Vec<String>) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        literal_strategy().prop_map(Expr::Number),
        proptest::sample::select(names).prop_map(Expr::Name),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (
                prop_oneof![
                    Just(BinOp::Add),
                    Just(BinOp::Sub),
                    Just(BinOp::Mul),
                    Just(BinOp::Div)
                ],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| Expr::Bin(op, Box::new(l), Box::new(r))),
            inner.prop_filter_map("literal negation folds", |e| match e {
                Expr::Number(_) => None,
                other => Some(Expr::Neg(Box::new(other))),
            }),
        ]
    })
}

fn dist_strategy() -> impl Strategy<Value = Dist> {
    proptest::sample::select(Dist::all().to_vec())
}

fn bounds_strategy() -> impl Strategy<Value = (Option<f64>, Option<f64>)> {
    prop_oneof![
        Just((None, None)),
        (-100.0..100.0f64).prop_map(|l| (Some(l), None)),
        (-100.0..100.0f64).prop_map(|u| (None, Some(u))),
        (-100.0..100.0f64, 0.001..100.0f64).prop_map(|(l, w)| (Some(l), Some(l + w))),
    ]
}

prop_compose! {
    fn model_strategy()(
        all_names in proptest::collection::hash_set(name_strategy(), 3..8),
        bounds in proptest::collection::vec(bounds_strategy(), 8),
        kinds in proptest::collection::vec(prop_oneof![Just(NumKind::Int), Just(NumKind::Real)], 8),
        lens in proptest::collection::vec(proptest::option::of(1u64..6), 8),
        seed_exprs in proptest::collection::vec(literal_strategy(), 8),
    ) -> (Vec<String>, Vec<(Option<f64>, Option<f64>)>, Vec<NumKind>, Vec<Option<u64>>, Vec<f64>) {
        let mut names: Vec<String> = all_names.into_iter().collect();
        names.sort();
        (names, bounds, kinds, lens, seed_exprs)
    }
}

fn full_model_strategy() -> impl Strategy<Value = ParsedModel> {
    model_strategy().prop_flat_map(|(names, bounds, kinds, lens, _seed)| {
        let n_data = names.len() / 2;
        let data_names: Vec<String> = names[..n_data].to_vec();
        let param_names: Vec<String> = names[n_data..].to_vec();

        let data_decls: Vec<DataDecl> = data_names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let kind = kinds[i % kinds.len()];
                DataDecl {
                    name: n.clone(),
                    kind,
                    len: lens[i % lens.len()].map(ArrayLen::Literal),
                    zero_one: kind == NumKind::Int && i % 3 == 0,
                }
            })
            .collect();
        let params: Vec<ParamDecl> = param_names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let (lower, upper) = bounds[i % bounds.len()];
                ParamDecl {
                    name: n.clone(),
                    len: lens[(i + 3) % lens.len()].map(ArrayLen::Literal),
                    lower,
                    upper,
                }
            })
            .collect();

        let all: Vec<String> = data_names
            .iter()
            .chain(param_names.iter())
            .cloned()
            .collect();
        let stmt = (
            proptest::sample::select(all.clone()),
            dist_strategy(),
            proptest::collection::vec(expr_strategy(all.clone()), 3),
        )
            .prop_map(|(target, dist, args)| SamplingStatement {
                target,
                dist,
                args: args.into_iter().take(dist.arity()).collect(),
            });
        let goal =
            (name_strategy(), expr_strategy(all)).prop_map(|(name, expr)| GoalDecl { name, expr });

        (
            proptest::collection::vec(stmt, 0..4),
            proptest::collection::vec(goal, 0..3),
        )
            .prop_map(move |(statements, mut goals)| {
                // goal names must be unique
                goals.sort_by(|a, b| a.name.cmp(&b.name));
                goals.dedup_by(|a, b| a.name == b.name);
                ParsedModel {
                    data_decls: data_decls.clone(),
                    params: params.clone(),
                    statements,
                    goals,
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printer_parser_roundtrip(model in full_model_strategy()) {
        let printed = pretty_print(&model);
        let reparsed = parse_model(&printed)
            .map_err(|e| TestCaseError::fail(format!("canonical text failed to parse: {e}\n{printed}")))?;
        prop_assert_eq!(model, reparsed, "round-trip changed the AST:\n{}", printed);
    }

    #[test]
    fn transforms_are_bijective(
        lower in -50.0..50.0f64,
        width in 0.01..100.0f64,
        u in -8.0..8.0f64,
        frac in 0.001..0.999f64,
        flavor in 0..4usize,
    ) {
        // generate the constrained point directly, so the round-trip runs in
        // the numerically well-conditioned direction for every bound flavor
        let (decl, v) = match flavor {
            0 => ("real x;".to_string(), u * 6.0),
            1 => (format!("real<lower={lower}> x;"), lower + u.exp()),
            2 => (format!("real<upper={lower}> x;"), lower - u.exp()),
            _ => (
                format!("real<lower={lower},upper={}> x;", lower + width),
                lower + width * frac,
            ),
        };
        let m = parse_model(&format!(
            "params{{{decl}}} model{{x ~ normal(0,1);}} goal{{z = x;}}"
        )).unwrap();
        let space = build_parameter_space(&m, &Dataset::new()).unwrap();
        let y = to_unconstrained(&space, &[v]).unwrap();
        let (back, _) = from_unconstrained(&space, &y);
        prop_assert!((back[0] - v).abs() <= 1e-9 * (1.0 + v.abs()),
            "v {} -> y {} -> v' {}", v, y[0], back[0]);
    }

    #[test]
    fn snis_weights_shift_invariant(
        scores in proptest::collection::vec(-200.0..200.0f64, 2..7),
        shift in -500.0..500.0f64,
    ) {
        let a = snis_weights(&scores).unwrap();
        let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
        let b = snis_weights(&shifted).unwrap();
        for (x, y) in a.weights.iter().zip(b.weights.iter()) {
            prop_assert!((x - y).abs() < 1e-9, "{} vs {} under shift {}", x, y, shift);
        }
        let total: f64 = a.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
