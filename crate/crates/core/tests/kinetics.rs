use proptest::prelude::*;
use rydyn::kinetics::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

prop_compose! {
    fn typical_regime()(
        r2 in 1.0..500.0f64,
        a_r in 3e3..6e4f64,
        a_s in 1e4..6e4f64,
        gamma in 1e3..6e5f64,
        gamma_s in 0.0..300.0f64,
        gamma_r in 0.0..20.0f64,
        r3 in 0.0..1e7f64,
        fraction in 0.0..(1.0 / 3.0),
        exchange_rate in 0.0..1e7f64,
    ) -> KineticsParams {
        KineticsParams {
            r2, r3, a_r, a_s, gamma, gamma_r, gamma_s,
            load_rate: 5e7,
            gamma_0: 1.0,
            dark: DarkCompartment { fraction, exchange_rate },
        }
    }
}

proptest! {
    #[test]
    fn product_form_tracks_exact_loss(p in typical_regime()) {
        let l = trap_loss_increase(&p).unwrap();
        if l.exact > 1e-12 {
            prop_assert!(rel(l.approximate, l.exact) < 0.05, "{l:?}");
        }
    }

    #[test]
    fn loss_falls_and_counts_rise_with_probe(p in typical_regime(), a in 0.0..1e6f64, b in 0.0..1e6f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let g = DetectionGeometry::default();
        let (pl, ph) = (p.with_r3(lo), p.with_r3(hi));
        prop_assert!(trap_loss_increase(&ph).unwrap().exact <= trap_loss_increase(&pl).unwrap().exact * (1.0 + 1e-12));
        let cl = probe_count_rate(&pl, &g).unwrap();
        let ch = probe_count_rate(&ph, &g).unwrap();
        prop_assert!(ch >= cl * (1.0 - 1e-12));
        prop_assert!(ch <= p.r2 * g.factor() * (1.0 + 1e-12));
    }

    #[test]
    fn observables_linear_in_pump(p in typical_regime()) {
        let g = DetectionGeometry::default();
        let q = p.with_r2(2.0 * p.r2);
        let (lp, lq) = (trap_loss_increase(&p).unwrap(), trap_loss_increase(&q).unwrap());
        prop_assert!(rel(lq.exact, 2.0 * lp.exact) < 1e-13);
        prop_assert!(rel(lq.approximate, 2.0 * lp.approximate) < 1e-13);
        let (cp, cq) = (cascade_count_rate(&p, &g, 1e7, 2e4).unwrap(), cascade_count_rate(&q, &g, 1e7, 2e4).unwrap());
        prop_assert!(rel(cq, 2.0 * cp) < 1e-13);
    }

    #[test]
    fn dark_capacity_keeps_loss_at_infinite_probe(p in typical_regime()) {
        let p = p.with_r3(1e18);
        let loss = trap_loss_increase(&p).unwrap().exact;
        if p.dark.fraction > 1e-3 && p.dark.exchange_rate > 1.0 && p.gamma_s > 1.0 {
            prop_assert!(loss > 0.0);
        }
        let bright = KineticsParams { dark: DarkCompartment::default(), ..p };
        prop_assert!(trap_loss_increase(&bright).unwrap().exact < 1e-9);
    }
}

#[test]
fn order_ten_thousand_rydberg_atoms() {
    let ss = steady_state(&KineticsParams::reference_28d()).unwrap();
    assert!(ss.n_r > 3e3 && ss.n_r < 1e5, "{}", ss.n_r);
}

#[test]
fn reference_probe_off_loss() {
    let l = trap_loss_increase(&KineticsParams::reference_28d()).unwrap();
    assert!(l.approximate > 0.64 && l.approximate < 0.96, "{l:?}");
}

#[test]
fn probe_knee_near_1e5() {
    let p = KineticsParams::reference_28d();
    let knee = p.a_r + p.gamma;
    assert!(knee > 0.5e5 && knee < 2.5e5);
}
