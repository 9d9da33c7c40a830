use hydroleg::resistance::{default_pressures, default_speeds, Dominance};
use hydroleg::resistance::{
    efficiency_report, fit_surface, ingest_grid, monotonicity_check, seal_current,
    sensitivity_report, viscous_current, GridKind, ResistanceGrid, ResistanceSample, SyntheticLaws,
};
use proptest::prelude::*;

fn grid_from(
    kind: GridKind,
    speeds: &[f64],
    pressures: &[f64],
    f: impl Fn(f64, f64) -> f64,
) -> ResistanceGrid {
    let samples = speeds
        .iter()
        .flat_map(|&n| pressures.iter().map(move |&p| (n, p)))
        .map(|(n, p)| ResistanceSample {
            speed: n,
            pressure: p,
            current: f(n, p),
        })
        .collect();
    ResistanceGrid::new(kind, samples).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..5.0f64, n)
}

proptest! {
    #[test]
    fn differencing_inverts_construction(base in values(5), delta in values(25), sdelta in values(25)) {
        let (speeds, pressures) = (default_speeds(), default_pressures());
        let dry = grid_from(GridKind::Dry, &speeds, &[0.0], |n, _| base[(n / 2.0) as usize - 1]);
        let idx = |n: f64, p: f64| ((n / 2.0) as usize - 1) * 5 + (p / 2.5) as usize;
        let oil = grid_from(GridKind::OilNoSeal, &speeds, &pressures, |n, p| dry.get(n, 0.0).unwrap() + delta[idx(n, p)]);
        let seal = grid_from(GridKind::OilSeal, &speeds, &pressures, |n, p| oil.get(n, p).unwrap() + sdelta[idx(n, p)]);
        let v = viscous_current(&oil, &dry).unwrap();
        let s = seal_current(&seal, &oil).unwrap();
        for x in v.samples() {
            prop_assert!((x.current - delta[idx(x.speed, x.pressure)]).abs() <= 1e-12);
        }
        for x in s.samples() {
            prop_assert!((x.current - sdelta[idx(x.speed, x.pressure)]).abs() <= 1e-12);
        }
    }

    #[test]
    fn common_offset_cancels(offset in 0.0..20.0f64) {
        let set = SyntheticLaws::expected_laws().synthesize(&default_speeds(), &default_pressures()).unwrap();
        let (dry, oil, seal) = set.require_all().unwrap();
        let (dry2, oil2, seal2) = (dry.offset(offset).unwrap(), oil.offset(offset).unwrap(), seal.offset(offset).unwrap());
        let pairs = [
            (viscous_current(oil, dry).unwrap(), viscous_current(&oil2, &dry2).unwrap()),
            (seal_current(seal, oil).unwrap(), seal_current(&seal2, &oil2).unwrap()),
        ];
        for (a, b) in pairs {
            for (x, y) in a.samples().iter().zip(b.samples()) {
                prop_assert!((x.current - y.current).abs() <= 1e-12 * (1.0 + offset));
            }
        }
    }

    #[test]
    fn surface_reproduces_its_own_predictions(
        c in prop::array::uniform6(-1.0..1.0f64),
        quadratic in any::<bool>(),
    ) {
        let law = |n: f64, p: f64| {
            c[0] + c[1] * n + c[2] * p + c[3] * n * p
                + if quadratic { c[4] * n * n + c[5] * p * p } else { 0.0 }
        };
        let g = grid_from(GridKind::Viscous, &default_speeds(), &default_pressures(), law);
        let s = fit_surface(&g, quadratic).unwrap();
        let resampled = grid_from(GridKind::Viscous, &[1.0, 3.0, 5.5, 9.0], &[0.5, 4.0, 8.0], |n, p| s.evaluate(n, p));
        let again = fit_surface(&resampled, quadratic).unwrap();
        prop_assert!((again.fit_cod - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn efficiency_and_loss_sum_to_one(loss in 0.0..50.0f64, rated in 0.1..50.0f64) {
        let r = efficiency_report(loss, rated).unwrap();
        prop_assert_eq!(r.efficiency + r.loss_fraction, 1.0);
    }
}

fn analyse(laws: SyntheticLaws) -> (bool, bool, bool, bool, bool) {
    let set = laws
        .synthesize(&default_speeds(), &default_pressures())
        .unwrap();
    let set = ingest_grid(&set.to_records()).unwrap();
    let (dry, oil, seal) = set.require_all().unwrap();
    let v = viscous_current(oil, dry).unwrap();
    let s = seal_current(seal, oil).unwrap();
    let (mv, ms) = (
        monotonicity_check(&v).unwrap(),
        monotonicity_check(&s).unwrap(),
    );
    let r = sensitivity_report(
        &fit_surface(&v, false).unwrap(),
        &fit_surface(&s, false).unwrap(),
        None,
    )
    .unwrap();
    assert_ne!(r.viscous.dominant, Dominance::Tie);
    (
        mv.increasing_in_speed && mv.increasing_in_pressure,
        ms.increasing_in_speed && ms.increasing_in_pressure,
        r.viscous.dominant == Dominance::Speed,
        r.seal.dominant == Dominance::Pressure,
        r.expected_ordering_holds,
    )
}

#[test]
fn expected_laws_are_confirmed() {
    assert_eq!(
        analyse(SyntheticLaws::expected_laws()),
        (true, true, true, true, true)
    );
}

#[test]
fn inverted_laws_are_rejected() {
    assert_eq!(
        analyse(SyntheticLaws::inverted_laws()),
        (false, false, false, false, false)
    );
}
