use std::path::{Path, PathBuf};

use crisis_sim::engine::{apply_events, run_ensemble, run_ensemble_range};
use crisis_sim::params::Params;
use crisis_sim::report::{self, EnsembleStats, RankKey, DEFAULT_QUANTILES};
use crisis_sim::scenario::{DebtEvent, DebtFlavor};
use crisis_sim::{Error, FxRegime, Scenario, ScenarioSet, StateVector};
use proptest::prelude::*;

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn shipped() -> Vec<Scenario> {
    ScenarioSet::from_file(scenario_dir().join("grid29.cfg")).unwrap().load_scenarios().unwrap()
}

fn named(name: &str) -> Scenario {
    shipped().into_iter().find(|s| s.name == name).unwrap()
}

#[test]
fn every_shipped_scenario_loads_and_validates() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap() == "grid29.cfg" {
            continue;
        }
        let s = Scenario::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        s.check(40).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(format!("{}.cfg", s.name), path.file_name().unwrap().to_string_lossy());
        n += 1;
    }
    assert_eq!(n, 30);
}

#[test]
fn grid_lists_twenty_nine_distinct_strategies() {
    let list = shipped();
    assert_eq!(list.len(), 29);
    assert!(list.iter().all(|s| s.name != "baseline"));
}

#[test]
fn path_count_linearity() {
    let p = Params::reference();
    let s = named("Shock-6+Deval");
    let whole = run_ensemble(&s, &p, 7, 12, 20).unwrap();
    let mut parts = run_ensemble_range(&s, &p, 7, 0..5, 20).unwrap();
    parts.extend(run_ensemble_range(&s, &p, 7, 5..12, 20).unwrap());
    assert_eq!(whole, parts);
}

#[test]
fn event_application_is_idempotent_per_quarter() {
    let p = Params::reference();
    let s = named("PSI30+IFI1.5");
    let q = s.debt_events[0].quarter;
    let state = StateVector::initial(&p, FxRegime::Fixed);
    let (once, outcome) = apply_events(&state, &s, q, &p).unwrap();
    assert!(!outcome.events.is_empty());
    assert!(matches!(apply_events(&once, &s, q, &p), Err(Error::EventsAlreadyApplied(t)) if t == q));
    let (next, _) = apply_events(&once, &s, q + 1, &p).unwrap();
    assert_eq!(next.b, once.b);
}

#[test]
fn emitted_series_are_monotone_in_level() {
    let p = Params::reference();
    for name in ["Crawl15%+CFM8q", "Shock-12", "AggRecomp_GI+TR_hiDebt_IFI_Deval"] {
        let paths = run_ensemble(&named(name), &p, 3, 60, 40).unwrap();
        let stats = EnsembleStats::from_paths(&paths, &DEFAULT_QUANTILES).unwrap();
        for series in &stats.series {
            for (t, row) in series.values.iter().enumerate() {
                assert!(row.windows(2).all(|w| w[0] <= w[1]), "{name} {} at {t}: {row:?}", series.variable);
            }
        }
    }
}

fn small_grid(seed: u64) -> Vec<EnsembleStats> {
    let p = Params::reference();
    shipped()
        .iter()
        .take(6)
        .map(|s| EnsembleStats::from_paths(&run_ensemble(s, &p, seed, 20, 16).unwrap(), &DEFAULT_QUANTILES).unwrap())
        .collect()
}

#[test]
fn reruns_are_byte_identical() {
    let a = small_grid(11);
    let b = small_grid(11);
    assert_eq!(report::render_tables(&a).unwrap(), report::render_tables(&b).unwrap());
    assert_eq!(report::render_plot_data(&a).unwrap(), report::render_plot_data(&b).unwrap());

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let files_a = report::emit_all(&a, dir_a.path()).unwrap();
    report::emit_all(&b, dir_b.path()).unwrap();
    for f in files_a {
        let name = f.file_name().unwrap();
        assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(dir_b.path().join(name)).unwrap());
    }
}

#[test]
fn ranking_covers_the_whole_grid() {
    let rows: Vec<_> = small_grid(5).into_iter().map(|s| s.summary).collect();
    for key in [RankKey::Debt, RankKey::Welfare] {
        let mut ranked: Vec<String> = report::rank_strategies(&rows, key).into_iter().map(|r| r.scenario).collect();
        let mut input: Vec<String> = rows.iter().map(|r| r.scenario.clone()).collect();
        ranked.sort();
        input.sort();
        assert_eq!(ranked, input);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn split_point_never_matters(n in 1u64..8, m in 1u64..8, seed in any::<u64>()) {
        let p = Params::reference();
        let s = Scenario::baseline("split");
        let whole = run_ensemble(&s, &p, seed, n + m, 8).unwrap();
        let mut parts = run_ensemble_range(&s, &p, seed, 0..n, 8).unwrap();
        parts.extend(run_ensemble_range(&s, &p, seed, n..n + m, 8).unwrap());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn haircut_lowers_debt_by_its_fraction(h in 0.0f64..0.9, q in 0u32..10) {
        let p = Params::reference();
        let mut s = Scenario::baseline("haircut");
        s.debt_events.push(DebtEvent { quarter: q, haircut: h, rate_relief: 0.0, flavor: DebtFlavor::Psi, fx_share: None });
        let state = StateVector::initial(&p, FxRegime::Fixed);
        let (after, _) = apply_events(&state, &s, q, &p).unwrap();
        prop_assert!((after.b - state.b * (1.0 - h)).abs() <= 1e-15);
        prop_assert!(apply_events(&after, &s, q, &p).is_err());
    }
}
