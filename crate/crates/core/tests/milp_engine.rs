use minorcast::milp::{export_lp, solve, LinearConstraint, Model, SolveLimits, SolveStatus, VarId};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Spec {
    num_vars: usize,
    rows: Vec<(Vec<(i64, usize)>, Option<i64>, Option<i64>)>,
    objective: Option<Vec<(i64, usize)>>,
}

fn build(spec: &Spec) -> Model {
    let mut m = Model::new();
    for i in 0..spec.num_vars {
        m.add_var(format!("x{i}")).unwrap();
    }
    for (terms, lo, hi) in &spec.rows {
        let terms = terms.iter().map(|&(c, v)| (c, VarId(v))).collect();
        m.add_constraint(LinearConstraint::new(terms, *lo, *hi, "r")).unwrap();
    }
    if let Some(obj) = &spec.objective {
        m.set_objective(obj.iter().map(|&(c, v)| (c, VarId(v))).collect()).unwrap();
    }
    m
}

/// Best objective over all `2^v` assignments, `Some(None)` when feasible
/// without objective, `None` when infeasible.
fn enumerate(spec: &Spec) -> Option<Option<i64>> {
    let mut best: Option<Option<i64>> = None;
    let a = vec![false; spec.num_vars];
    let mut a = a;
    for mask in 0u32..(1u32 << spec.num_vars) {
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = mask & (1 << i) != 0;
        }
        let ok = spec.rows.iter().all(|(terms, lo, hi)| {
            let s: i64 = terms.iter().filter(|(_, v)| a[*v]).map(|(c, _)| c).sum();
            lo.is_none_or(|l| s >= l) && hi.is_none_or(|h| s <= h)
        });
        if !ok {
            continue;
        }
        match &spec.objective {
            None => return Some(None),
            Some(obj) => {
                let val: i64 = obj.iter().filter(|(_, v)| a[*v]).map(|(c, _)| c).sum();
                best = Some(Some(best.flatten().map_or(val, |b: i64| b.min(val))));
            }
        }
    }
    best
}

fn arb_spec(max_vars: usize, max_rows: usize) -> impl Strategy<Value = Spec> {
    (1..=max_vars).prop_flat_map(move |n| {
        let term = (-4i64..=4, 0..n);
        let row = (proptest::collection::vec(term.clone(), 1..=5), -3i64..=4, 0u8..3).prop_map(|(terms, b, kind)| {
            let sum_pos: i64 = terms.iter().map(|t| t.0.max(0)).sum();
            match kind {
                0 => (terms, Some(b), None),
                1 => (terms, None, Some(b)),
                _ => (terms, Some(b.min(sum_pos)), Some(b.min(sum_pos) + 2)),
            }
        });
        let objective = proptest::option::weighted(0.8, proptest::collection::vec(term, 1..=n.max(1)));
        (Just(n), proptest::collection::vec(row, 0..=max_rows), objective)
            .prop_map(|(num_vars, rows, objective)| Spec { num_vars, rows, objective })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engine_matches_enumeration(spec in arb_spec(10, 12)) {
        let model = build(&spec);
        let out = solve(&model, &SolveLimits::default()).unwrap();
        match enumerate(&spec) {
            None => {
                prop_assert_eq!(out.status, SolveStatus::Infeasible);
                prop_assert!(out.assignment.is_none());
            }
            Some(None) => {
                prop_assert_eq!(out.status, SolveStatus::Feasible);
                prop_assert!(model.is_feasible(out.assignment.as_ref().unwrap()));
            }
            Some(Some(best)) => {
                prop_assert_eq!(out.status, SolveStatus::Optimal);
                prop_assert_eq!(out.objective_value, Some(best));
                prop_assert_eq!(out.best_bound, best);
                prop_assert!(model.is_feasible(out.assignment.as_ref().unwrap()));
            }
        }
    }

    #[test]
    fn adding_a_row_never_improves_the_optimum(spec in arb_spec(8, 8), extra in proptest::collection::vec((-3i64..=3, 0usize..8), 1..4), rhs in -2i64..3) {
        prop_assume!(spec.objective.is_some());
        let before = solve(&build(&spec), &SolveLimits::default()).unwrap();
        prop_assume!(before.status == SolveStatus::Optimal);
        let mut tighter = spec.clone();
        let extra: Vec<_> = extra.into_iter().map(|(c, v)| (c, v % spec.num_vars)).collect();
        tighter.rows.push((extra, Some(rhs), None));
        let after = solve(&build(&tighter), &SolveLimits::default()).unwrap();
        if after.status == SolveStatus::Optimal {
            prop_assert!(after.objective_value.unwrap() >= before.objective_value.unwrap());
        } else {
            prop_assert_eq!(after.status, SolveStatus::Infeasible);
        }
    }

    #[test]
    fn lp_export_is_deterministic(spec in arb_spec(6, 6)) {
        let a = export_lp(&build(&spec));
        prop_assert_eq!(&a, &export_lp(&build(&spec)));
        prop_assert!(a.ends_with("End\n"));
    }
}

#[test]
fn hint_survives_added_rows() {
    let mut m = Model::new();
    let x: Vec<_> = (0..3).map(|i| m.add_var(format!("x{i}")).unwrap()).collect();
    m.add_constraint(LinearConstraint::at_least(x.iter().map(|&v| (1, v)).collect(), 1, "cover")).unwrap();
    m.set_objective(vec![(3, x[0]), (2, x[1]), (1, x[2])]).unwrap();
    m.set_hint(vec![false, false, true]).unwrap();
    m.add_constraint(LinearConstraint::at_most(vec![(1, x[2])], 0, "ban")).unwrap();
    let out = solve(&m, &SolveLimits::default()).unwrap();
    assert_eq!(out.objective_value, Some(2));
    assert_eq!(out.assignment, Some(vec![false, true, false]));
}

#[test]
fn node_limit_reports_timeout() {
    // Pigeonhole: 8 pigeons, 7 holes.
    let (p, h) = (8, 7);
    let mut m = Model::new();
    let v: Vec<Vec<_>> = (0..p).map(|i| (0..h).map(|j| m.add_var(format!("p{i}_{j}")).unwrap()).collect()).collect();
    for row in &v {
        m.add_constraint(LinearConstraint::at_least(row.iter().map(|&x| (1, x)).collect(), 1, "pigeon")).unwrap();
    }
    for j in 0..h {
        m.add_constraint(LinearConstraint::at_most(v.iter().map(|r| (1, r[j])).collect(), 1, "hole")).unwrap();
    }
    let out = solve(&m, &SolveLimits { node_limit: Some(10), ..Default::default() }).unwrap();
    assert_eq!(out.status, SolveStatus::Timeout);
    assert!(out.assignment.is_none());
}
