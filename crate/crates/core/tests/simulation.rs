use hw_staffing::erlang::erlang_c_integer;
use hw_staffing::mmn_oracle::{simulate_mmn, simulate_replications, SimConfig};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

#[test]
fn ci_covers_analytic_value_for_most_seeds() {
    let exact = erlang_c_integer(5, 4.0).unwrap().value;
    let covered = (0..20u64)
        .filter(|&seed| {
            let est = simulate_mmn(&SimConfig::new(5, 4.0, 1.0, 200_000, 1000 + seed)).unwrap();
            est.covers(exact)
        })
        .count();
    assert!(covered >= 18, "{covered} of 20");
}

#[test]
fn doubling_arrivals_shrinks_halfwidth_like_sqrt_two() {
    let halfwidths = |arrivals: u64| {
        let cfg = SimConfig::new(5, 4.0, 1.0, arrivals, 7);
        simulate_replications(&cfg, 16)
            .unwrap()
            .into_iter()
            .map(|e| e.ci_halfwidth)
            .collect::<Vec<_>>()
    };
    let ratio = median(halfwidths(100_000)) / median(halfwidths(200_000));
    assert!((1.25..=1.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn mm1_wait_probability_is_rho() {
    let est = simulate_mmn(&SimConfig::new(1, 0.5, 1.0, 400_000, 3)).unwrap();
    assert!(est.covers(0.5), "{est:?}");
}

#[test]
fn replications_are_reproducible() {
    let cfg = SimConfig::new(3, 2.0, 1.0, 20_000, 11);
    let first = simulate_replications(&cfg, 4).unwrap();
    let second = simulate_replications(&cfg, 4).unwrap();
    assert_eq!(first, second);
    assert_ne!(first[0], first[1]);
}
