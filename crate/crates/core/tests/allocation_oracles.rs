use relaynet::channel::{ChannelRealization, ChannelSampler, FadingProfile};
use relaynet::optimize::{
    anc_closed_form, anc_optimal_allocation, tdbc_closed_form, tdbc_joint_numerical, tdbc_optimal_xi,
};
use relaynet::protocols::{anc_snr, mutual_information, Protocol, SnrMode};
use relaynet::validate::{anc_simplex_grid, tdbc_xi_grid};

#[test]
fn worked_allocation_beats_fine_grid() {
    let p = FadingProfile::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let a = anc_optimal_allocation(2.0, 1.0, &p).unwrap();
    assert!((a.e1 - 0.5).abs() < 1e-15 && (a.e2 - 1.0).abs() < 1e-15 && a.er == 1.5);
    let r = ChannelRealization::from_magnitudes(2.0, 1.0, 0.0).unwrap();
    let got = anc_snr(&r, &a, SnrMode::Approximate).min();
    let g = anc_simplex_grid(&r, &p, 400).unwrap();
    assert!(got >= g.best_minimax - 2.0 / 400.0 * (g.best_minimax - g.worst_minimax));
}

#[test]
fn anc_closed_form_matches_simplex_grid_under_both_objectives() {
    let p = FadingProfile::from_geometry(0.3, 4.0, 5.0).unwrap();
    let n = 100;
    let mut located = 0;
    for r in ChannelSampler::new(&p, 3).range(0..100) {
        let best = anc_closed_form(&r, &p).unwrap();
        let a = anc_optimal_allocation(r.mag_h(), r.mag_f(), &p).unwrap();
        let (alpha, beta) = a.simplex(&p);
        let g = anc_simplex_grid(&r, &p, n).unwrap();
        let slack = 2.0 / n as f64;
        assert!(best.objective_minimax >= g.best_minimax - slack * (g.best_minimax - g.worst_minimax));
        assert!(best.objective_total_mi >= g.best_total_mi - slack * (g.best_total_mi - g.worst_total_mi));
        // No grid point beats the closed form. Where the objective is flat in
        // one direction the grid maximizer can sit several cells away, so its
        // location is not compared.
        assert!(best.objective_minimax >= g.best_minimax * (1.0 - 1e-12), "{r:?}");
        assert!(best.objective_total_mi >= g.best_total_mi * (1.0 - 1e-12), "{r:?}");
        let near = |(ga, gb): (f64, f64)| (ga - alpha).abs() < 2.0 / n as f64 && (gb - beta).abs() < 2.0 / n as f64;
        located += usize::from(near(g.argmax_minimax) && near(g.argmax_total_mi));
    }
    assert!(located >= 90, "grid maximizers next to the closed form on {located}/100 draws");
}

#[test]
fn closed_forms_are_scale_invariant() {
    let p = FadingProfile::new(1.0, 1.0, 1.0, 4.0).unwrap();
    let q = p.with_energy(40.0).unwrap();
    for (h, f) in [(0.3, 1.7), (2.0, 2.0), (5.0, 0.1)] {
        for k in [0.01, 3.0, 1e3] {
            let a = tdbc_optimal_xi(h, f).unwrap().xi();
            let b = tdbc_optimal_xi(k * h, k * f).unwrap().xi();
            assert!((a - b).abs() < 1e-15);
            let x = anc_optimal_allocation(h, f, &p).unwrap();
            let y = anc_optimal_allocation(k * h, k * f, &q).unwrap();
            for (u, v) in [(x.e1 / 4.0, y.e1 / 40.0), (x.e2 / 4.0, y.e2 / 40.0), (x.er / 4.0, y.er / 40.0)] {
                assert!((u - v).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn xi_star_is_the_unique_crossing_and_grid_optimum() {
    let p = FadingProfile::from_geometry(0.7, 4.0, 20.0).unwrap();
    for r in ChannelSampler::new(&p, 4).range(0..50) {
        let w = tdbc_optimal_xi(r.mag_h(), r.mag_f()).unwrap();
        let g = tdbc_xi_grid(&r, &p, 10_001).unwrap();
        assert_eq!(g.sign_changes, 1);
        assert!((g.argmax_minimax - w.xi()).abs() <= 1e-4);
        assert!((g.argmax_total_mi - w.xi()).abs() <= 1e-4);
        let c = tdbc_closed_form(&r, &p).unwrap();
        assert!(c.objective_minimax >= g.best_minimax * (1.0 - 1e-12));
        assert!(c.objective_total_mi >= g.best_total_mi - 1e-12);
    }
}

#[test]
fn joint_optimum_dominates_closed_form_and_refines_monotonically() {
    let p = FadingProfile::from_geometry(0.5, 4.0, 10.0).unwrap();
    for r in ChannelSampler::new(&p, 5).range(0..30) {
        let heur = tdbc_closed_form(&r, &p).unwrap();
        let coarse = tdbc_joint_numerical(&r, &p, 8, 20).unwrap();
        let fine = tdbc_joint_numerical(&r, &p, 16, 20).unwrap();
        for j in [coarse, fine] {
            assert!(j.minimax.objective_minimax >= heur.objective_minimax);
            assert!(j.total_mi.objective_total_mi >= heur.objective_total_mi);
        }
        let tol = 1e-9;
        assert!(fine.minimax.objective_minimax >= coarse.minimax.objective_minimax * (1.0 - tol));
        assert!(fine.total_mi.objective_total_mi >= coarse.total_mi.objective_total_mi * (1.0 - tol));
        assert_eq!(fine, tdbc_joint_numerical(&r, &p, 16, 20).unwrap());
    }
}

#[test]
fn joint_optimum_total_mi_consistent_with_protocol_kernel() {
    let p = FadingProfile::from_geometry(0.5, 4.0, 10.0).unwrap();
    let r = ChannelSampler::new(&p, 6).sample(0);
    let j = tdbc_joint_numerical(&r, &p, 12, 20).unwrap();
    if let relaynet::optimize::Argument::Joint(a, w) = j.total_mi.argument {
        let s = relaynet::protocols::tdbc_snr_with_powers(&r, &a, w, SnrMode::Approximate);
        assert_eq!(mutual_information(&s, Protocol::Tdbc).total, j.total_mi.objective_total_mi);
    } else {
        panic!("expected a joint argument");
    }
}
