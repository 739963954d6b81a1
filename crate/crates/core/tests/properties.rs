use proptest::prelude::*;

use rdp_dbar::dbar_solver::SolutionField;
use rdp_dbar::descend::SurfaceFunction;
use rdp_dbar::descend::{full_fiber, push_down_a, symmetrize_a, symmetrize_push_down_d};
use rdp_dbar::geometry::{apply_p, apply_q, deck, ev, pi_n, Covering, Point2, C64};
use rdp_dbar::harness::hoelder_seminorm;
use rdp_dbar::inequalities::*;

fn point(r: f64) -> impl Strategy<Value = Point2> {
    prop::array::uniform4(-r..r).prop_map(Point2::from_reals)
}

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn smooth(z: &Point2) -> C64 {
    (z.z1 * C64::new(0.3, 0.8) + z.z2.conj() * z.z1).exp() + z.z2 * z.z2.conj()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn a2_sides_are_homogeneous_of_degree_two(z in point(1.0), zeta in point(1.0), t in 0.1f64..10.0) {
        let a = check_lemma_a2(&z, &zeta);
        let b = check_lemma_a2(&(z * t), &(zeta * t));
        prop_assert!((b.lhs - t * t * a.lhs).abs() <= 1e-12 * (1.0 + b.lhs));
        prop_assert!((b.rhs - t * t * a.rhs).abs() <= 1e-12 * (1.0 + b.rhs));
        prop_assert!(!a.violated());
    }

    #[test]
    fn enforced_hypotheses_hold_exactly(z in point(1.0), zeta in point(1.0), n in 2u32..9) {
        let flipped = enforce_a2(&z, &zeta);
        prop_assert!((z - flipped).norm() <= (z + flipped).norm());
        let rep = rdp_dbar::geometry::closest_in_orbit(n, &z, &zeta);
        let d = (z - rep).norm_inf();
        for k in 1..=n as i64 {
            prop_assert!((z - deck(n, k, &rep)).norm_inf() >= d);
        }
        let m = 2 * n.min(5);
        let (x, w) = (pi_n(m, &z), pi_n(m, &zeta));
        let r = final_representative(&x, &w);
        prop_assert!(apply_q(&(w - apply_p(&r))).norm() >= apply_q(&(w - r)).norm());
    }

    #[test]
    fn lemmas_hold_on_random_pairs(z in point(1.5), zeta in point(1.5), n in 2u32..9) {
        prop_assert!(!check_lemma_general(n, n, &z, &zeta).violated());
        prop_assert!(!check_lemma_general(n, ev(n) / 2, &z, &zeta).violated());
        let r = z.norm().max(zeta.norm()).max(1e-9);
        prop_assert!(!check_ball_corollary(n, r, &z, &zeta).violated());
    }

    #[test]
    fn surface_lemmas_hold_on_random_pairs(z in point(1.0), zeta in point(1.0), n in 2u32..6) {
        let (x, w) = (pi_n(2 * n, &z), pi_n(2 * n, &zeta));
        let rho = x.norm().max(w.norm()).max(1e-9);
        prop_assert!(!check_lemma_final(n, &x, &w, rho).unwrap().violated());
        prop_assert!(!check_final_intermediate(n, &x, &w, rho).unwrap().violated());
    }

    #[test]
    fn j_sets_are_large_and_far(a in complex(1.0), s in complex(1.0), n in 2u32..10) {
        let j = build_j(n, a, s);
        prop_assert!(j.len() >= j_required(n));
        prop_assert!(j_bound_margin(n, a, s, &j) >= -MARGIN_TOLERANCE);
    }

    #[test]
    fn averages_are_invariant_and_descend(z in point(0.9), n in 2u32..7) {
        let avg = symmetrize_a(n, &SolutionField::new(1.0, "smooth", smooth));
        let v = avg.eval(&z);
        for k in 1..=n as i64 {
            prop_assert!((avg.eval(&deck(n, k, &z)) - v).norm() <= 1e-10 * (1.0 + v.norm()));
        }
        let h = push_down_a(n, &avg).unwrap();
        let x = pi_n(n, &z);
        prop_assert!((h.eval(&x).unwrap() - v).norm() <= 1e-10 * (1.0 + v.norm()));
        for zeta in full_fiber(&Covering::a(n).unwrap(), &x).unwrap() {
            prop_assert!((pi_n(n, &zeta) - x).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn d_tower_agrees_with_the_plane_group_average(z in point(0.9)) {
        let g = SolutionField::new(1.0, "smooth", smooth);
        let h = push_down_a(4, &symmetrize_a(4, &g)).unwrap();
        let f = symmetrize_push_down_d(2, &h).unwrap();
        let cov = Covering::d(2).unwrap();
        let mut direct = C64::new(0.0, 0.0);
        for w in [z, Point2::new(z.z2, -z.z1)] {
            for k in 1..=4 {
                direct += g.eval(&deck(4, k, &w));
            }
        }
        direct /= 8.0;
        prop_assert!((f.eval(&cov.apply(&z)).unwrap() - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hoelder_reports_are_well_formed(beta in 0.1f64..1.0, seed in 0u64..1000) {
        let h = SurfaceFunction::restriction(Covering::a(3).unwrap(), 1.0, |x| x.x3.conj() * x.x1);
        let r = hoelder_seminorm(&h, beta, 2000, seed).unwrap();
        prop_assert!(r.seminorm >= 0.0);
        prop_assert!(r.stability_ratio >= 1.0);
        prop_assert!(r.seminorm_doubled >= r.seminorm);
    }
}
