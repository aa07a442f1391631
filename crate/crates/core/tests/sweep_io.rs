use proptest::option;
use proptest::prelude::*;

use qdchain::family::StateFamily;
use qdchain::model::Convention;
use qdchain::sweep::{read_table, run_sweep, to_csv_string, to_json_string, SweepConfig, SweepRow, SweepTable};
use qdchain::xy::{xy_discord_profile, XYPoint};
use qdchain::Boundary;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

fn row() -> impl Strategy<Value = SweepRow> {
    (
        (option::of(finite()), prop_oneof![Just(StateFamily::Thermal), Just(StateFamily::Broken), Just(StateFamily::ClosedForm)]),
        (option::of(1usize..20), finite(), 1usize..10),
        proptest::collection::vec(option::of(finite()), 16),
        option::of(any::<bool>()),
        option::of("[a-z ,\"]{1,12}".prop_filter("not the null marker", |s| s != "null")),
    )
        .prop_map(|((gamma, family), (n_sites, h, r), v, upper_bound, error)| SweepRow {
            preset: "xy".into(),
            gamma,
            delta: None,
            convention: Convention::Pauli,
            family,
            n_sites,
            boundary: n_sites.map(|_| Boundary::Periodic),
            hx: v[15],
            h,
            r,
            mutual_information: v[0],
            classical_correlation: v[1],
            discord: v[2],
            symmetric_discord: v[3],
            concurrence: v[4],
            witness_norm: v[5],
            gx: v[6],
            gz: v[7],
            gxx: v[8],
            gyy: v[9],
            gzz: v[10],
            gxz: v[11],
            energy_density: v[12],
            gap: v[13],
            theta: v[14],
            phi: None,
            upper_bound,
            error,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_and_json_round_trip(rows in proptest::collection::vec(row(), 0..6)) {
        let table = SweepTable::from_rows(rows);
        let from_csv = read_table(&to_csv_string(&table)).unwrap();
        prop_assert_eq!(&from_csv, &table);
        let from_json = read_table(&to_json_string(&table)).unwrap();
        prop_assert_eq!(&from_json, &table);
        prop_assert_eq!(to_csv_string(&from_json), to_csv_string(&table));
    }
}

const CONFIG: &str = "
preset = xy
gamma = 0.7
hgrid = 0.5:0.9:0.1
n_sites = 6
family = thermal, broken, closed_form
rmax = 2
hx = 1e-3
";

#[test]
fn sweeps_are_deterministic_and_hashed() {
    let cfg = SweepConfig::parse(CONFIG).unwrap();
    let a = SweepTable::new(&cfg, run_sweep(&cfg).unwrap());
    let b = SweepTable::new(&cfg, run_sweep(&cfg).unwrap());
    assert_eq!(to_csv_string(&a), to_csv_string(&b));
    assert_eq!(a.rows.len(), 5 * 2 * 3);
    let text = to_csv_string(&a);
    assert!(text.starts_with(&format!("# config_sha256 = {}", cfg.sha256())));
    let back = read_table(&text).unwrap();
    assert_eq!(back, a);
}

#[test]
fn closed_form_rows_match_the_library() {
    let cfg = SweepConfig::parse(CONFIG).unwrap();
    let rows = run_sweep(&cfg).unwrap();
    for row in rows.iter().filter(|r| r.family == StateFamily::ClosedForm) {
        assert_eq!(row.n_sites, None);
        let profile = xy_discord_profile(&XYPoint::new(0.7, row.h).unwrap(), 2).unwrap();
        let q = profile[row.r - 1].discord;
        assert!((row.discord.unwrap() - q).abs() < 1e-8, "h = {} r = {}", row.h, row.r);
    }
}

#[test]
fn bad_configs_are_rejected() {
    assert!(SweepConfig::parse("preset = xy\ngamma = 2\nhgrid = 0.5").is_err());
    assert!(SweepConfig::parse("preset = nonsense\nhgrid = 0.5").is_err());
    assert!(SweepConfig::parse("preset = xy\ngamma = 0.5\nhgrid = 0.5\nfrobnicate = 1").is_err());
    assert!(SweepConfig::parse("preset = ising\nhgrid = 0.5\nn_sites = 40").is_err());
}
