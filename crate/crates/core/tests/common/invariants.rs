//! Module invariants as proptest runs. Each entry draws its own cases; the
//! property test target runs them one per test, the acceptance harness runs
//! them all and counts cases.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use faultinject::corpus::Corpus;
use faultinject::evaluator::{
    build_kill_matrix, detection_ratio, is_coupled, kendall_tau_b, ochiai, pearson_r, vargha_delaney_a12, wilcoxon,
    KillMatrix, WilcoxonMode,
};
use faultinject::injector::{inject, InjectionConfig, Mutant};
use faultinject::minij::ast::{BinOp, ExprKind, Item};
use faultinject::minij::locate::{statements, stmt_at_mut};
use faultinject::minij::{
    check_replacement, parse, run_tests_budgeted, typecheck, unparse_unit, Program, StepBudget, Symbols, Unit,
};
use faultinject::patterns::{
    apply_pattern, match_statement, node_at, node_at_mut, Catalog, Edit, MatchContext, PatternApplication, PatternKind,
};
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gen::Gen;
use super::rank_sum_enumerated;

const PATH: &str = "src/gen.mj";

pub struct Invariant {
    pub name: &'static str,
    pub cases: u32,
    pub run: fn(u32) -> Result<(), String>,
}

pub const ALL: &[Invariant] = &[
    Invariant { name: "parse/unparse fixpoint", cases: 2_000, run: parse_unparse_fixpoint },
    Invariant { name: "interpreter determinism", cases: 500, run: interpreter_is_deterministic },
    Invariant { name: "single-edit mutants, pure apply", cases: 1_500, run: mutants_are_single_edits },
    Invariant { name: "operator replacement twice restores", cases: 1_000, run: operator_replacement_twice_restores },
    Invariant { name: "ochiai symmetry, bounds, coupling", cases: 2_000, run: ochiai_symmetric_and_bounded },
    Invariant { name: "a12 complement law", cases: 2_000, run: a12_complement_law },
    Invariant { name: "tau and r invariances", cases: 1_000, run: correlation_invariances },
    Invariant { name: "rank-sum exact on tiny samples", cases: 500, run: rank_sum_tiny },
    Invariant { name: "matrix column permutation", cases: 500, run: matrix_column_permutation },
    Invariant { name: "kill matrix follows mutant order", cases: 24, run: kill_matrix_follows_mutant_order },
];

pub fn find(name: &str) -> &'static Invariant {
    ALL.iter().find(|i| i.name == name).unwrap_or_else(|| panic!("no invariant '{name}'"))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn drive<S: Strategy>(
    cases: u32,
    strategy: S,
    body: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, body).map_err(|e| e.to_string())
}

pub fn generated(seed: u64) -> Unit {
    let text = Gen::new(seed).program();
    parse(&text).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"))
}

fn checked(unit: Unit) -> (Program, Symbols) {
    let mut program = Program::single(PATH, unit);
    let symbols = program.check().expect("generated program type checks");
    (program, symbols)
}

fn parse_unparse_fixpoint(cases: u32) -> Result<(), String> {
    drive(cases, any::<u64>(), |seed| {
        let unit = generated(seed);
        let once = unparse_unit(&unit);
        let reparsed = parse(&once).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&reparsed, &unit);
        prop_assert_eq!(unparse_unit(&reparsed), once);
        let before = typecheck(&Program::single(PATH, unit));
        let after = typecheck(&Program::single(PATH, reparsed));
        prop_assert!(before.is_ok());
        prop_assert_eq!(before.is_ok(), after.is_ok());
        Ok(())
    })
}

fn interpreter_is_deterministic(cases: u32) -> Result<(), String> {
    drive(cases, any::<u64>(), |seed| {
        let (program, _) = checked(generated(seed));
        let tests = vec![("test_gen".to_string(), StepBudget { max_steps: 20_000 })];
        let first = run_tests_budgeted(&program, &tests).unwrap();
        let second = run_tests_budgeted(&program, &tests).unwrap();
        prop_assert_eq!(first, second);
        Ok(())
    })
}

fn all_applications(program: &Program, symbols: &Symbols) -> Vec<PatternApplication> {
    let unit = program.unit(PATH).unwrap();
    let cx = MatchContext::new(PATH, unit, symbols);
    let catalog = Catalog::builtin();
    (0..cx.statement_count()).flat_map(|i| match_statement(&cx, &catalog, i)).collect()
}

fn item_texts(unit: &Unit) -> Vec<String> {
    unit.items.iter().map(|i: &Item| unparse_unit(&Unit { items: vec![i.clone()] })).collect()
}

fn mutants_are_single_edits(cases: u32) -> Result<(), String> {
    drive(cases, (any::<u64>(), any::<Index>()), |(seed, pick)| {
        let (program, symbols) = checked(generated(seed));
        let unit = program.unit(PATH).unwrap();
        let apps = all_applications(&program, &symbols);
        prop_assume!(!apps.is_empty());
        let app = &apps[pick.index(apps.len())];

        let snapshot = unit.clone();
        let first = apply_pattern(unit, app);
        prop_assert_eq!(&first, &apply_pattern(unit, app));
        prop_assert_eq!(unit, &snapshot);
        let Ok(mutated) = first else { return Ok(()) };
        prop_assert_ne!(unparse_unit(&mutated), unparse_unit(unit));

        // Only the function holding the statement changes.
        let (before, after) = (item_texts(unit), item_texts(&mutated));
        prop_assert_eq!(before.len(), after.len());
        let changed: Vec<usize> = (0..before.len()).filter(|&i| before[i] != after[i]).collect();
        prop_assert_eq!(changed, vec![app.location.item]);

        // An expression edit is undone by putting the old node back.
        if let Edit::ReplaceExpr { path, .. } = &app.edit {
            let old = node_at(statements(unit)[app.statement.index].1, path).unwrap().clone();
            let mut restored = mutated.clone();
            let stmt = stmt_at_mut(&mut restored, &app.location).unwrap();
            *node_at_mut(stmt, path).unwrap() = old;
            prop_assert_eq!(&restored, unit);
        }
        Ok(())
    })
}

const OPERATOR_ROWS: [PatternKind; 5] = [
    PatternKind::ArithmeticOperator,
    PatternKind::RelationalOperator,
    PatternKind::ConditionalOperator,
    PatternKind::BitwiseOperator,
    PatternKind::ChangeConditionalOperator,
];

fn operator_replacement_twice_restores(cases: u32) -> Result<(), String> {
    drive(cases, (any::<u64>(), any::<Index>()), |(seed, pick)| {
        let (program, symbols) = checked(generated(seed));
        let unit = program.unit(PATH).unwrap();
        let apps: Vec<_> =
            all_applications(&program, &symbols).into_iter().filter(|a| OPERATOR_ROWS.contains(&a.kind)).collect();
        prop_assume!(!apps.is_empty());
        let app = &apps[pick.index(apps.len())];
        let stmt = statements(unit)[app.statement.index].1;
        let Some(ExprKind::Binary { op, .. }) = node_at(stmt, &app.node).map(|e| &e.kind) else {
            return Err(TestCaseError::fail("operator row matched a non-binary node"));
        };
        let original: BinOp = *op;

        let Ok(mut mutated) = apply_pattern(unit, app) else { return Ok(()) };
        prop_assume!(check_replacement(PATH, &mut mutated, &symbols).is_ok());
        let cx = MatchContext::new(PATH, &mutated, &symbols);
        let back = match_statement(&cx, &Catalog::builtin(), app.statement.index)
            .into_iter()
            .find(|b| b.kind == app.kind && b.node == app.node && b.donor.as_deref() == Some(original.symbol()))
            .ok_or_else(|| TestCaseError::fail(format!("no way back to '{}'", original.symbol())))?;
        let restored = apply_pattern(&mutated, &back).unwrap();
        prop_assert_eq!(&restored, unit);
        Ok(())
    })
}

fn detection() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
    (1usize..24).prop_flat_map(|n| (prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n)))
}

fn ochiai_symmetric_and_bounded(cases: u32) -> Result<(), String> {
    drive(cases, detection(), |(m, f)| {
        let a = ochiai(&m, &f).unwrap();
        let b = ochiai(&f, &m).unwrap();
        prop_assert!((a - b).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a == 1.0, m == f && m.iter().any(|&x| x));
        if is_coupled(&m, &f).unwrap() {
            let nf = f.iter().filter(|&&x| x).count() as f64;
            prop_assert!(a >= 1.0 / nf.sqrt() - 1e-12);
            prop_assert!(a > 0.0);
        }
        Ok(())
    })
}

fn small_group() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..8).prop_map(f64::from), 1..10)
}

fn a12_complement_law(cases: u32) -> Result<(), String> {
    drive(cases, (small_group(), small_group()), |(g1, g2)| {
        let ab = vargha_delaney_a12(&g1, &g2).unwrap();
        let ba = vargha_delaney_a12(&g2, &g1).unwrap();
        prop_assert!((ab + ba - 1.0).abs() < 1e-12);
        prop_assert!((vargha_delaney_a12(&g1, &g1).unwrap() - 0.5).abs() < 1e-12);
        Ok(())
    })
}

fn correlation_invariances(cases: u32) -> Result<(), String> {
    let strategy = (prop::collection::vec((-20i32..20, -20i32..20), 2..16), 0.5f64..4.0, -10.0f64..10.0);
    drive(cases, strategy, |(pairs, scale, shift)| {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        if let Ok(tau) = kendall_tau_b(&x, &y) {
            let cubed: Vec<f64> = x.iter().map(|v| v * v * v + shift).collect();
            prop_assert!((kendall_tau_b(&cubed, &y).unwrap() - tau).abs() < 1e-12);
            let flipped: Vec<f64> = y.iter().map(|v| -v).collect();
            prop_assert!((kendall_tau_b(&x, &flipped).unwrap() + tau).abs() < 1e-12);
            prop_assert!((kendall_tau_b(&y, &x).unwrap() - tau).abs() < 1e-12);
        }
        if let Ok(r) = pearson_r(&x, &y) {
            let affine: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            prop_assert!((pearson_r(&affine, &y).unwrap() - r).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&r));
        }
        Ok(())
    })
}

fn rank_sum_tiny(cases: u32) -> Result<(), String> {
    let group = || prop::collection::vec((0i32..5).prop_map(f64::from), 1..4);
    drive(cases, (group(), group()), |(g1, g2)| {
        let got = wilcoxon(&g1, &g2, WilcoxonMode::RankSum).unwrap();
        prop_assert!((got - rank_sum_enumerated(&g1, &g2)).abs() < 1e-12);
        let swapped = wilcoxon(&g2, &g1, WilcoxonMode::RankSum).unwrap();
        prop_assert!((got - swapped).abs() < 1e-12);
        Ok(())
    })
}

fn synthetic_matrix() -> impl Strategy<Value = (KillMatrix, Vec<usize>, BTreeSet<usize>)> {
    (1usize..10, 1usize..8).prop_flat_map(|(tests, subjects)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), subjects), tests),
            Just((0..subjects).collect::<Vec<usize>>()).prop_shuffle(),
            prop::collection::btree_set(0..tests, 0..=tests),
        )
            .prop_map(move |(detect, order, subset)| {
                let matrix = KillMatrix {
                    tests: (0..tests).map(|t| format!("test_{t}")).collect(),
                    subjects: (0..subjects).map(|s| format!("m{s}")).collect(),
                    detect,
                };
                (matrix, order, subset)
            })
    })
}

fn permute_columns(m: &KillMatrix, order: &[usize]) -> KillMatrix {
    KillMatrix {
        tests: m.tests.clone(),
        subjects: order.iter().map(|&s| m.subjects[s].clone()).collect(),
        detect: m.detect.iter().map(|row| order.iter().map(|&s| row[s]).collect()).collect(),
    }
}

fn matrix_column_permutation(cases: u32) -> Result<(), String> {
    drive(cases, synthetic_matrix(), |(m, order, subset)| {
        let p = permute_columns(&m, &order);
        let subset: BTreeSet<String> = subset.iter().map(|t| m.tests[*t].clone()).collect();
        for id in &m.subjects {
            prop_assert_eq!(m.column_of(id), p.column_of(id));
        }
        let all: Vec<usize> = (0..m.subjects.len()).collect();
        prop_assert!((detection_ratio(&m, &all, &subset) - detection_ratio(&p, &all, &subset)).abs() < 1e-15);
        for (i, &s) in order.iter().enumerate() {
            prop_assert_eq!(detection_ratio(&m, &[s], &subset), detection_ratio(&p, &[i], &subset));
        }
        Ok(())
    })
}

fn p1_mutants() -> &'static (Corpus, Vec<Mutant>, KillMatrix) {
    static CELL: OnceLock<(Corpus, Vec<Mutant>, KillMatrix)> = OnceLock::new();
    CELL.get_or_init(|| {
        let corpus = super::seeded().project("P1").unwrap().clone();
        let report = corpus.report("R1").unwrap();
        let mutants = inject(&corpus, report, &InjectionConfig::new(12, 0)).unwrap();
        let matrix = build_kill_matrix(&corpus, &mutants, corpus.fault("F1").unwrap(), 1).unwrap();
        (corpus, mutants, matrix)
    })
}

fn kill_matrix_follows_mutant_order(cases: u32) -> Result<(), String> {
    drive(cases, any::<u64>(), |shuffle_seed| {
        let (corpus, mutants, reference) = p1_mutants();
        let mut order = mutants.clone();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let m = build_kill_matrix(corpus, &order, corpus.fault("F1").unwrap(), 2).unwrap();
        let ids: Vec<&str> = order.iter().map(|x| x.mutant_id.as_str()).collect();
        prop_assert_eq!(&m.subjects[..ids.len()], &ids[..]);
        prop_assert_eq!(&m.tests, &reference.tests);
        for id in &reference.subjects {
            prop_assert_eq!(m.column_of(id), reference.column_of(id));
        }
        Ok(())
    })
}
