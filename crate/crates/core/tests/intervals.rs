//! Region queries against independent oracles: exact areas, an exact CDF of
//! the binomial cascade and nestedness under deeper budgets.

use std::f64::consts::PI;

use proptest::prelude::*;

use conelab::constructions::{binomial_measure, lebesgue, BinomialSpec};
use conelab::geometry::Point;
use conelab::measure::{MeasureTree, RegionQuery};
use std::sync::OnceLock;

fn leb2() -> &'static MeasureTree {
    static T: OnceLock<MeasureTree> = OnceLock::new();
    T.get_or_init(|| lebesgue(2, 2).unwrap())
}

fn cascade() -> &'static MeasureTree {
    static T: OnceLock<MeasureTree> = OnceLock::new();
    T.get_or_init(|| binomial_measure(BinomialSpec::default()).unwrap())
}

/// `μ([0, y))` for the cascade with right-child weight `1/(i + 2)` at depth `i`,
/// summed digit by digit.
fn cascade_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let (mut y, mut above, mut f) = (y, 1.0, 0.0);
    for i in 1..=60 {
        let q = 1.0 / (i as f64 + 2.0);
        y *= 2.0;
        if y >= 1.0 {
            f += above * (1.0 - q);
            above *= q;
            y -= 1.0;
        } else {
            above *= 1.0 - q;
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disk_area_is_enclosed(x in 0.2f64..0.8, y in 0.2f64..0.8, r in 0.01f64..0.19) {
        let t = leb2();
        let q = RegionQuery::ball(Point::new(vec![x, y]).unwrap(), r);
        let coarse = t.region_measure(&q, t.level_for_radius(r) + 3).unwrap();
        let fine = t.region_measure(&q, t.level_for_radius(r) + 6).unwrap();
        let area = PI * r * r;
        prop_assert!(coarse.lo <= coarse.hi && fine.lo <= fine.hi);
        prop_assert!(fine.lo >= coarse.lo - 1e-12 && fine.hi <= coarse.hi + 1e-12);
        prop_assert!(fine.lo <= area + 1e-12 && area <= fine.hi + 1e-12);
    }

    #[test]
    fn cascade_interval_matches_the_cdf(x in 0.0f64..1.0, r in 1e-4f64..0.3) {
        let t = cascade();
        let q = RegionQuery::ball(Point::new(vec![x]).unwrap(), r);
        let m = t.region_measure(&q, t.level_for_radius(r) + 12).unwrap();
        let exact = cascade_cdf(x + r) - cascade_cdf(x - r);
        prop_assert!(m.lo <= m.hi);
        prop_assert!(m.lo <= exact + 1e-12 && exact <= m.hi + 1e-12, "{exact} not in [{}, {}]", m.lo, m.hi);
    }
}

#[test]
fn cdf_oracle_matches_the_first_split() {
    assert!((cascade_cdf(0.5) - 2.0 / 3.0).abs() < 1e-15);
    assert!((cascade_cdf(0.25) - 2.0 / 3.0 * 3.0 / 4.0).abs() < 1e-15);
}
