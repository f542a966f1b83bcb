//! Fixed reference figures.

use lcpk_core::bench::{memory_wall, DEFAULT_BUDGET_BYTES};
use lcpk_core::landauer::LandauerGap;
use lcpk_core::landauer_limit_per_bit;

fn within(actual: f64, expected: f64, rel: f64) -> bool {
    ((actual - expected) / expected).abs() <= rel
}

#[test]
fn landauer_limit_at_320_kelvin() {
    let e = landauer_limit_per_bit(320.0);
    assert!(within(e, 3.06e-21, 0.01), "{e}");
}

#[test]
fn landauer_limit_at_300_kelvin() {
    let e = landauer_limit_per_bit(300.0);
    assert!(within(e, 2.87e-21, 0.01), "{e}");
}

#[test]
fn landauer_gap_of_a_joule_scale_query() {
    let gap = LandauerGap::from_joules(4.46, 1_000_000, 320.0).unwrap();
    assert!(within(gap.gap_ratio, 1.46e15, 0.01), "{}", gap.gap_ratio);
}

#[test]
fn materialization_table() {
    let rows = [
        (100_000, "18.63 GiB", true),
        (200_000, "74.51 GiB", true),
        (500_000, "465.66 GiB", false),
        (1_000_000, "1.86 TiB", false),
    ];
    for (n, size, feasible) in rows {
        let est = memory_wall(n, DEFAULT_BUDGET_BYTES).unwrap();
        assert_eq!(est.display_size(), size);
        assert_eq!(est.feasible, feasible);
    }
    // 18.63 GiB within display rounding
    let gib = memory_wall(100_000, DEFAULT_BUDGET_BYTES).unwrap().materialization_gib();
    assert!((gib - 18.63).abs() <= 0.01);
}
