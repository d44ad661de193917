use proptest::prelude::*;
use relaynet::channel::{ChannelRealization, FadingProfile};
use relaynet::protocols::{
    anc_snr, mutual_information, tdbc_snr, tdbc_snr_with_powers, CombiningWeight, PowerAllocation, Protocol,
    SnrMode, SnrPair,
};

fn gain() -> impl Strategy<Value = f64> {
    1e-3..50.0f64
}

fn energy() -> impl Strategy<Value = f64> {
    0.1..1e4f64
}

fn profile(e: f64) -> FadingProfile {
    FadingProfile::new(1.0, 1.0, 1.0, e).unwrap()
}

proptest! {
    #[test]
    fn anc_swapping_sources_swaps_snrs(x in gain(), y in gain(), a in 0.01..0.98f64, b in 0.01..0.98f64, e in energy()) {
        prop_assume!(a + b < 0.99);
        let p = profile(e);
        let alloc = PowerAllocation::from_simplex(a, b, &p).unwrap();
        let mirrored = PowerAllocation { e1: alloc.e2, e2: alloc.e1, er: alloc.er };
        for mode in [SnrMode::Approximate, SnrMode::Exact] {
            let s = anc_snr(&ChannelRealization::new(x, y, 0.0).unwrap(), &alloc, mode);
            let t = anc_snr(&ChannelRealization::new(y, x, 0.0).unwrap(), &mirrored, mode);
            prop_assert!((s.gamma1 - t.gamma2).abs() <= 1e-12 * s.gamma1.max(1e-300));
            prop_assert!((s.gamma2 - t.gamma1).abs() <= 1e-12 * s.gamma2.max(1e-300));
        }
    }

    #[test]
    fn tdbc_weight_trades_one_flow_for_the_other(
        x in gain(), y in gain(), z in 0.0..5.0f64, e in energy(), lo in 0.0..1.0f64, hi in 0.0..1.0f64,
    ) {
        prop_assume!(lo < hi);
        let p = profile(e);
        let r = ChannelRealization::new(x, y, z).unwrap();
        for mode in [SnrMode::Approximate, SnrMode::Exact] {
            let a = tdbc_snr(&r, &p, CombiningWeight::new(lo).unwrap(), mode);
            let b = tdbc_snr(&r, &p, CombiningWeight::new(hi).unwrap(), mode);
            prop_assert!(b.gamma1 <= a.gamma1 * (1.0 + 1e-12));
            prop_assert!(b.gamma2 >= a.gamma2 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn tdbc_boundary_weights(x in gain(), y in gain(), z in 0.0..5.0f64, e in energy()) {
        let p = profile(e);
        let r = ChannelRealization::new(x, y, z).unwrap();
        let at = |xi: f64| tdbc_snr(&r, &p, CombiningWeight::new(xi).unwrap(), SnrMode::Approximate);
        let (s0, s1) = (at(0.0), at(1.0));
        prop_assert_eq!(s0.gamma1, s1.gamma2);
        prop_assert_eq!(s1.gamma1, e * z);
        prop_assert_eq!(s0.gamma2, e * z);
    }

    #[test]
    fn exact_snr_bounded_by_approximate(
        x in gain(), y in gain(), z in 0.0..5.0f64, e in energy(), xi in 0.0..1.0f64,
    ) {
        let p = profile(e);
        let r = ChannelRealization::new(x, y, z).unwrap();
        let alloc = PowerAllocation::equal(&p);
        let w = CombiningWeight::new(xi).unwrap();
        // ANC only gains a noise term. In TDBC each eta_i^2 shrinks by
        // a_i = E g_i / (E g_i + 1), which can favour one flow by at most
        // a_j / a_i <= 1 + 1 / (E min(x, y)).
        let eps = 1.0 / (e * x.min(y));
        let pairs = [
            (anc_snr(&r, &alloc, SnrMode::Exact), anc_snr(&r, &alloc, SnrMode::Approximate), 0.0),
            (tdbc_snr_with_powers(&r, &alloc, w, SnrMode::Exact), tdbc_snr_with_powers(&r, &alloc, w, SnrMode::Approximate), eps),
        ];
        for (exact, approx, slack) in pairs {
            prop_assert!(exact.gamma1 <= approx.gamma1 * (1.0 + slack) * (1.0 + 1e-12));
            prop_assert!(exact.gamma2 <= approx.gamma2 * (1.0 + slack) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mutual_information_increases_with_snr(g1 in 0.0..1e6f64, g2 in 0.0..1e6f64, k in 1.0001..10.0f64) {
        for protocol in [Protocol::Anc, Protocol::Tdbc] {
            let a = mutual_information(&SnrPair { gamma1: g1, gamma2: g2 }, protocol);
            let b = mutual_information(&SnrPair { gamma1: g1 * k + 1e-9, gamma2: g2 }, protocol);
            prop_assert!(b.i1 > a.i1);
            prop_assert_eq!(b.i2, a.i2);
            prop_assert!((a.total - (a.i1 + a.i2)).abs() <= 1e-12 * a.total.max(1.0));
        }
    }
}

#[test]
fn exact_and_approximate_converge_at_high_snr() {
    let r = ChannelRealization::new(0.7, 1.3, 0.4).unwrap();
    let mut previous = f64::INFINITY;
    for e in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5] {
        let p = profile(e);
        let a = PowerAllocation::equal(&p);
        let w = CombiningWeight::HALF;
        let gaps = [
            (anc_snr(&r, &a, SnrMode::Exact), anc_snr(&r, &a, SnrMode::Approximate)),
            (tdbc_snr(&r, &p, w, SnrMode::Exact), tdbc_snr(&r, &p, w, SnrMode::Approximate)),
        ]
        .iter()
        .map(|(x, y)| (1.0 - x.min() / y.min()).abs())
        .fold(0.0, f64::max);
        assert!(gaps < previous, "E={e}: {gaps} vs {previous}");
        previous = gaps;
    }
    assert!(previous < 1e-4);
}
