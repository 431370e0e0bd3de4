mod common;

use std::collections::{BTreeSet, HashSet};

use faultinject::corpus::{Corpus, StatementId};
use faultinject::injector::{
    inject, inject_baseline, read_mutants, write_mutants, InjectError, InjectionConfig, Mutant, MutantSource,
    MutantStatus,
};
use faultinject::irloc::Localizer;
use faultinject::minij::ast::ExprKind;
use faultinject::minij::{check_replacement, parse, typecheck, unparse_unit, Program};
use faultinject::patterns::{apply_pattern, match_statement, Catalog, Edit, MatchContext, PatternKind};

fn project(name: &str) -> Corpus {
    common::seeded().project(name).unwrap().clone()
}

fn ibir(corpus: &Corpus, report: &str, n: usize) -> Vec<Mutant> {
    let report = corpus.report(report).unwrap();
    inject(corpus, report, &InjectionConfig::new(n, 0)).unwrap()
}

#[test]
fn five_viable_mutants_inside_the_top_files() {
    let corpus = project("P1");
    let mutants = ibir(&corpus, "R1", 5);
    assert_eq!(mutants.len(), 5);
    let localizer = Localizer::new(&corpus).unwrap();
    let report = corpus.report("R1").unwrap();
    let top: BTreeSet<String> =
        localizer.localize(report, 20, 50, None).unwrap().into_iter().map(|l| l.statement.path).collect();
    for (i, m) in mutants.iter().enumerate() {
        assert_eq!(m.status, MutantStatus::Viable);
        assert_eq!(m.rank, i + 1);
        assert_eq!(m.mutant_id, format!("ibir-0-{}", i + 1));
        assert!(top.contains(m.path()), "{} outside the ranked files", m.path());
    }
}

/// The candidate list the injector walks, rebuilt from public parts.
fn candidate_keys(corpus: &Corpus, report: &str) -> Vec<(StatementId, Vec<usize>, String, Option<String>)> {
    let report = corpus.report(report).unwrap();
    let ranked = Localizer::new(corpus).unwrap().localize(report, 20, 50, None).unwrap();
    let catalog = Catalog::builtin();
    let mut keys = Vec::new();
    for loc in ranked {
        let unit = corpus.unit(&loc.statement.path).unwrap();
        let cx = MatchContext::new(&loc.statement.path, unit, &corpus.symbols);
        let mut apps = match_statement(&cx, &catalog, loc.statement.index);
        apps.sort_by_key(|a| (a.priority, a.bfs_index, a.donor_index));
        keys.extend(apps.into_iter().map(|a| (a.pattern_id().to_string(), a)).map(|(id, a)| (a.statement, a.node, id, a.donor)));
    }
    keys
}

#[test]
fn mutants_follow_rank_priority_bfs_donor_order() {
    for name in ["P1", "P4", "P9"] {
        let corpus = project(name);
        let report = corpus.reports[0].id.clone();
        let keys = candidate_keys(&corpus, &report);
        let mutants = ibir(&corpus, &report, 60);
        let mut last = None;
        for m in &mutants {
            let key = (m.statement.clone(), m.node.clone(), m.pattern_id.clone(), m.donor.clone());
            let pos = keys.iter().position(|k| *k == key).expect("mutant comes from a candidate");
            assert!(last.map_or(true, |l| pos > l), "{} out of order", m.mutant_id);
            last = Some(pos);
        }
        let ranks: Vec<usize> = mutants.iter().map(|m| m.location_rank.unwrap()).collect();
        assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn no_two_mutants_share_a_diff() {
    let corpus = project("P3");
    let mutants = ibir(&corpus, "R3", 100);
    let diffs: HashSet<&str> = mutants.iter().map(|m| m.diff.as_str()).collect();
    assert_eq!(diffs.len(), mutants.len());
}

#[test]
fn every_mutant_type_checks_and_changes_the_source() {
    let corpus = project("P2");
    for m in ibir(&corpus, "R2", 100) {
        let original = unparse_unit(corpus.unit(m.path()).unwrap());
        assert_ne!(original, m.mutated_source, "{}", m.mutant_id);
        let program = corpus.program.with_unit(m.path(), parse(&m.mutated_source).unwrap());
        typecheck(&program).unwrap_or_else(|e| panic!("{}: {e}", m.mutant_id));
    }
}

#[test]
fn injection_is_reproducible_across_thread_counts() {
    let corpus = project("P10");
    let report = corpus.report("R10").unwrap();
    let run = |jobs| {
        let mut config = InjectionConfig::new(80, 3);
        config.jobs = jobs;
        inject(&corpus, report, &config).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(8));
    assert_eq!(one, run(1));
    let baseline = |jobs| {
        let mut config = InjectionConfig::new(80, 3);
        config.jobs = jobs;
        inject_baseline(&corpus, &config).unwrap()
    };
    assert_eq!(baseline(1), baseline(8));
}

#[test]
fn scope_keeps_mutants_in_the_chosen_files() {
    let corpus = project("P1");
    let report = corpus.report("R1").unwrap();
    let path = corpus.fault("F1").unwrap().fixed_statements[0].path.clone();
    let mut config = InjectionConfig::new(40, 0);
    config.scope = Some(BTreeSet::from([path.clone()]));
    let mutants = inject(&corpus, report, &config).unwrap();
    assert!(!mutants.is_empty());
    assert!(mutants.iter().all(|m| m.path() == path));
    let base = inject_baseline(&corpus, &config).unwrap();
    assert!(base.iter().all(|m| m.path() == path));
}

#[test]
fn baseline_spreads_over_several_files() {
    let corpus = project("P5");
    let mutants = inject_baseline(&corpus, &InjectionConfig::new(100, 0)).unwrap();
    assert_eq!(mutants.len(), 100);
    let files: BTreeSet<&str> = mutants.iter().map(|m| m.path()).collect();
    assert!(files.len() >= 2, "{files:?}");
    let classical: Vec<&str> = PatternKind::BASELINE.iter().map(|k| k.id()).collect();
    assert!(mutants.iter().all(|m| classical.contains(&m.pattern_id.as_str())));
    assert!(mutants.iter().all(|m| m.source == MutantSource::Baseline && m.location_rank.is_none()));
    let other_seed = inject_baseline(&corpus, &InjectionConfig::new(100, 1)).unwrap();
    assert_ne!(
        mutants.iter().map(|m| &m.diff).collect::<Vec<_>>(),
        other_seed.iter().map(|m| &m.diff).collect::<Vec<_>>()
    );
}

#[test]
fn exhausted_candidates_return_fewer_mutants() {
    let corpus = project("P6");
    let report = corpus.report("R6").unwrap();
    let mut config = InjectionConfig::new(10_000, 0);
    config.top_statements = 3;
    let mutants = inject(&corpus, report, &config).unwrap();
    assert!(!mutants.is_empty() && mutants.len() < 10_000);
    let nothing = InjectionConfig { catalog: Catalog::builtin().restricted_to(&[]), ..InjectionConfig::new(5, 0) };
    assert_eq!(inject(&corpus, report, &nothing), Err(InjectError::NoViableMutants));
    assert!(matches!(
        inject(&corpus, report, &InjectionConfig::new(0, 0)),
        Err(InjectError::InvalidConfig(_))
    ));
}

#[test]
fn ill_typed_replacement_is_stillborn() {
    let src = "int f(int v, int w, string s) {\n    return v + 1;\n}\n";
    let mut program = Program::single("src/a.mj", parse(src).unwrap());
    let symbols = program.check().unwrap();
    let unit = program.unit("src/a.mj").unwrap();
    let cx = MatchContext::new("src/a.mj", unit, &symbols);
    let mut app = match_statement(&cx, &Catalog::builtin(), 0)
        .into_iter()
        .find(|a| a.kind == PatternKind::ReplaceVariable)
        .unwrap();
    let Edit::ReplaceExpr { with, .. } = &mut app.edit else { panic!("variable replacement edits an expression") };
    assert_ne!(with.kind, ExprKind::Var("s".into()), "matcher offers only same-typed donors");
    with.kind = ExprKind::Var("s".into());
    with.ty = None;
    let mut mutated = apply_pattern(unit, &app).unwrap();
    assert!(check_replacement("src/a.mj", &mut mutated, &symbols).is_err());
}

#[test]
fn mutant_directories_round_trip() {
    let corpus = project("P7");
    let mutants = ibir(&corpus, "R7", 7);
    let dir = tempfile::tempdir().unwrap();
    write_mutants(dir.path(), &mutants, 7).unwrap();
    let loaded = read_mutants(dir.path()).unwrap();
    assert_eq!(loaded.len(), 7);
    for ((m, requested), original) in loaded.iter().zip(&mutants) {
        assert_eq!(*requested, 7);
        assert_eq!(m, original);
    }
}
