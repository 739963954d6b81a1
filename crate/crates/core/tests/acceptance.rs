//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::io::Write;
use std::time::Instant;

use rdp_dbar::dbar_solver::{bmk_solve, dbar_residual_at, solve, QuadratureSpec, SolveMethod, SolveOptions};
use rdp_dbar::descend::{push_down_a, sample_surface, solve_on_d, solve_on_surface, symmetrize_a};
use rdp_dbar::fields::{Cutoff, CutoffPoly, Poly};
use rdp_dbar::forms::{pairing_integral, pullback, PlaneForm01, TestForm20};
use rdp_dbar::geometry::{deck, ev, fiber_d, Covering, Point2, Point3, SurfaceKind, C64};
use rdp_dbar::harness::{
    build_case, hoelder_seminorm, lambda_sup_norm, oracle_error, origin_excluding_probes, run_commute_check,
    shipped_case, smooth_test_form, ManufacturedCase, TermSpec, SHIPPED_CASES,
};
use rdp_dbar::inequalities::{check_j_sets, run_suite, standard_suite};
use rdp_dbar::sampling;

const SEED: u64 = 20240611;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

fn line(text: &str) {
    // written past the test harness capture so the verdicts always show
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

fn verdict(id: usize, name: &str, o: &Outcome, secs: f64) -> bool {
    line(&format!("criterion {id} [{}] {name} ({secs:.1} s)", if o.passed { "PASS" } else { "FAIL" }));
    for l in &o.lines {
        line(&format!("    {l}"));
    }
    o.passed
}

fn lemma_suites() -> Outcome {
    let t = Instant::now();
    let reports = run_suite(&standard_suite(1_000_000, 100, SEED)).expect("suite runs");
    let secs = t.elapsed().as_secs_f64();
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let worst = reports.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
    let mut lines = vec![format!(
        "{} configurations, 1e6 samples + 100 restarts each, violations {violations}, worst margin {worst:.3e}, {secs:.0} s",
        reports.len()
    )];
    for r in reports.iter().filter(|r| !r.passed()) {
        lines.push(format!("violated: {} N={} radius={} worst {:.3e}", r.lemma, r.n, r.radius, r.worst_margin));
    }
    Outcome { passed: violations == 0 && secs <= 300.0, lines }
}

fn j_sets() -> Outcome {
    let r = check_j_sets(100_000, SEED);
    Outcome {
        passed: r.passed(),
        lines: vec![format!(
            "1e5 samples, size violations {}, bound violations {}, min surplus {}, worst margin {:.3e}",
            r.size_violations, r.bound_violations, r.min_surplus, r.worst_margin
        )],
    }
}

fn kernel_oracle() -> Outcome {
    let bump = CutoffPoly::new(
        Cutoff::new(0.2, 0.7).unwrap(),
        Poly::<2>::constant(C64::new(1.0, 0.0)).plus(Poly::term(C64::new(0.5, -0.25), [1, 0], [0, 1])),
    );
    let b = bump.clone();
    let mu = PlaneForm01::exact(1.0, 0.7, move |z| b.dbar(&[z.z1, z.z2]));
    let quad = QuadratureSpec::new(1.0, 32).unwrap();
    let mut rng = sampling::chunk_rng(SEED, 3);
    let probes: Vec<Point2> = (0..100).map(|_| sampling::uniform_ball(&mut rng, 0.9)).collect();
    let rel = |q: &QuadratureSpec, sign: f64| {
        let g = bmk_solve(&mu, q).expect("bump data is closed");
        let (mut e, mut top): (f64, f64) = (0.0, 0.0);
        let values: Vec<C64> = probes.iter().map(|z| g.eval(z)).collect();
        for (z, v) in probes.iter().zip(&values) {
            let want = bump.value(&[z.z1, z.z2]) * sign;
            e = e.max((v - want).norm());
            top = top.max(want.norm());
        }
        e / top
    };
    let base = rel(&quad, 1.0);
    let flipped = rel(&quad, -1.0);
    let finer = rel(&quad.refined(), 1.0);
    let ratio = base / finer;
    Outcome {
        passed: base <= 0.05 && ratio >= 1.5 && flipped > 1.0,
        lines: vec![format!(
            "relative sup error {base:.3e} at h={}, {finer:.3e} at h={} (reduction {ratio:.1}x); error against -F {flipped:.2}",
            quad.step(),
            quad.refined().step()
        )],
    }
}

fn pipeline_a() -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for n in 2..=4 {
        let cov = Covering::a(n).unwrap();
        let quad = QuadratureSpec::default_for(&cov, 1.0).unwrap();
        for name in SHIPPED_CASES {
            let case = shipped_case(name, cov, 1.0).unwrap();
            let (lam, exact) = build_case(&case).unwrap();
            let mu = pullback(&lam).unwrap();
            let g = solve(&mu, &quad, &SolveOptions::default()).unwrap();
            let avg = symmetrize_a(n, &g);
            let h = push_down_a(n, &avg).unwrap();
            let points = sample_surface(&cov, 1.0, 100, SEED);
            let err = oracle_error(&h, &exact, &points).unwrap();
            let mut deck_err: f64 = 0.0;
            for z in origin_excluding_probes(1.0, 20, SEED + 1) {
                let v = avg.eval(&z);
                for k in 1..n as i64 {
                    deck_err = deck_err.max((avg.eval(&deck(n, k, &z)) - v).norm());
                }
            }
            let probes = origin_excluding_probes(1.0, 32, SEED + 2);
            let res_h = dbar_residual_at(&avg, &mu, &probes, quad.step());
            let res_g = dbar_residual_at(&g, &mu, &probes, quad.step());
            let ok = err <= 0.05 && deck_err <= 1e-10 && res_h <= 10.0 * res_g;
            passed &= ok;
            lines.push(format!(
                "{} {name}: oracle {err:.3e}, deck {deck_err:.1e}, residual {res_h:.3e} vs solver {res_g:.3e}{}",
                cov.surface_name(),
                if ok { "" } else { "  <-- fails" }
            ));
        }
    }
    Outcome { passed, lines }
}

fn pipeline_d() -> Outcome {
    let cov = Covering::d(2).unwrap();
    let quad = QuadratureSpec::default_for(&cov, 1.0).unwrap();
    let case = shipped_case("bump_u3", cov, 1.0).unwrap();
    let (lam, exact) = build_case(&case).unwrap();
    let f = solve_on_d(&lam, &quad, &SolveOptions::default()).unwrap();
    let points = sample_surface(&cov, 1.0, 100, SEED);
    let err = oracle_error(&f, &exact, &points).unwrap();
    let mut p_err: f64 = 0.0;
    for z in origin_excluding_probes(1.0, 20, SEED + 3) {
        let a = f.pullback_eval(&z).unwrap();
        let b = f.pullback_eval(&Point2::new(z.z2, -z.z1)).unwrap();
        p_err = p_err.max((a - b).norm());
    }
    let mut axis_ok = true;
    for y1 in [C64::new(0.5, 0.0), C64::new(-0.3, 0.7), C64::new(0.0, 1.25)] {
        let fiber = fiber_d(2, &Point3::new(y1, C64::new(0.0, 0.0), C64::new(0.0, 0.0))).unwrap();
        let want = [
            Point3::new(2.0 * y1, C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
            Point3::new(C64::new(0.0, 0.0), 2.0 * y1, C64::new(0.0, 0.0)),
        ];
        axis_ok &= fiber.len() == 2 && fiber.iter().zip(want).all(|(a, b)| *a == b);
    }
    Outcome {
        passed: err <= 0.05 && p_err <= 1e-10 && axis_ok,
        lines: vec![format!(
            "Y_2 bump_u3 at {} nodes/axis: oracle {err:.3e}, P-invariance {p_err:.1e}, axis fibers exact: {axis_ok}",
            quad.nodes_per_axis
        )],
    }
}

fn hoelder() -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    let covers = [Covering::a(2), Covering::a(3), Covering::a(4), Covering::d(2)].map(Result::unwrap);
    for cov in covers {
        let beta = match cov.kind {
            SurfaceKind::A => 1.0 / ev(cov.n) as f64,
            SurfaceKind::D => 1.0 / (4 * cov.n) as f64,
        };
        let quad = QuadratureSpec::new(1.0, 32).unwrap();
        for name in ["bump_u0", "bump_u3"] {
            let (lam, _) = build_case(&shipped_case(name, cov, 1.0).unwrap()).unwrap();
            let h = solve_on_surface(&lam, &quad, &SolveOptions { method: SolveMethod::Table, ..Default::default() })
                .unwrap();
            let r = hoelder_seminorm(&h, beta, 100_000, SEED)
                .unwrap()
                .with_lambda(lambda_sup_norm(&lam, 100_000, SEED), "sampled");
            let ok = r.seminorm.is_finite() && r.stability_ratio <= 1.1 && r.bound_holds == Some(true);
            passed &= ok;
            lines.push(format!(
                "{} {name} beta={beta:.4}: seminorm {:.4}, doubling ratio {:.4}, sup {:.4}, C {:.3}, bound {}",
                cov.surface_name(),
                r.seminorm,
                r.stability_ratio,
                r.sup_norm,
                r.constant.unwrap_or(f64::NAN),
                r.bound_holds == Some(true)
            ));
        }
    }
    Outcome { passed, lines }
}

fn commute() -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for cov in [Covering::a(2), Covering::a(3), Covering::a(4), Covering::d(2)].map(Result::unwrap) {
        let r = run_commute_check(&smooth_test_form(cov, 1.0), 0.1, 4).unwrap();
        let ok = r.min_order >= 1.9;
        passed &= ok;
        lines.push(format!(
            "{}: residuals {:?}, orders {:?}",
            r.surface,
            r.residuals.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>(),
            r.orders.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>()
        ));
    }
    Outcome { passed, lines }
}

// Monomial data with radial cutoffs pair to exactly zero on the symmetric
// lattice at every resolution, so both sides mix several charges.
fn mixed_case(cov: Covering) -> ManufacturedCase {
    let t = |coeff: [f64; 2], holo: [u32; 3], anti: [u32; 3]| TermSpec { coeff, holo, anti };
    let mut case = shipped_case("bump_u0", cov, 1.0).unwrap();
    case.name = "mixed".into();
    case.potential = vec![
        t([1.0, 0.0], [0; 3], [0; 3]),
        t([0.5, -0.3], [1, 0, 0], [0; 3]),
        t([0.0, 0.7], [0; 3], [0, 1, 0]),
        t([0.4, 0.2], [0, 0, 1], [1, 0, 0]),
        t([-0.6, 0.1], [0; 3], [0, 0, 1]),
    ];
    case
}

fn test_forms(cov: Covering) -> Vec<TestForm20> {
    let img = cov.image_radius(1.0);
    let term = |c: (f64, f64), holo: [u32; 3], anti: [u32; 3]| Poly::<3>::term(C64::new(c.0, c.1), holo, anti);
    let polys = [
        term((1.0, 0.0), [0; 3], [0; 3]).plus(term((0.5, 0.5), [0, 1, 0], [0; 3])),
        term((1.0, 0.0), [1, 0, 0], [0; 3]).plus(term((0.2, 0.0), [0; 3], [0, 0, 1])),
        term((0.0, 1.0), [0; 3], [0, 1, 0]).plus(term((1.0, 0.0), [0, 0, 1], [0; 3])),
        term((1.0, 0.5), [0, 0, 2], [0; 3]).plus(term((0.3, 0.0), [0; 3], [1, 0, 0])).plus(term(
            (0.4, 0.0),
            [0; 3],
            [0; 3],
        )),
        term((0.5, -1.0), [1, 0, 0], [0, 0, 1]).plus(term((0.7, 0.0), [0, 1, 0], [0; 3])),
    ];
    polys
        .into_iter()
        .map(|p| TestForm20::from_cutoff_poly(cov, CutoffPoly::new(Cutoff::new(0.1 * img, 0.7 * img).unwrap(), p)))
        .collect()
}

fn pairing() -> Outcome {
    let cov = Covering::d(2).unwrap();
    let (lam, _) = build_case(&mixed_case(cov)).unwrap();
    let lam_norm = lambda_sup_norm(&lam, 100_000, SEED);
    let quad = QuadratureSpec::default_for(&cov, 1.0).unwrap();
    let mut passed = true;
    let mut lines = vec![format!(
        "closed mixed case on {}, {} -> {} nodes/axis",
        cov.surface_name(),
        quad.nodes_per_axis,
        2 * quad.nodes_per_axis
    )];
    for (i, sig) in test_forms(cov).iter().enumerate() {
        let scale = lam_norm * sig.scale;
        let base = pairing_integral(&lam, sig, &quad, None).unwrap().norm() / scale;
        let finer = pairing_integral(&lam, sig, &quad.refined(), None).unwrap().norm() / scale;
        let ok = base <= 1e-3 && finer < base;
        passed &= ok;
        lines.push(format!("sigma {i}: |pairing|/(|lambda||sigma|) {base:.3e} -> {finer:.3e} under refinement"));
    }
    Outcome { passed, lines }
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("lemma suites", lemma_suites),
        ("J-set construction", j_sets),
        ("kernel oracle", kernel_oracle),
        ("A-surface pipeline", pipeline_a),
        ("D-surface pipeline", pipeline_d),
        ("Hölder estimates", hoelder),
        ("commutation", commute),
        ("weak pairing", pairing),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !verdict(i + 1, name, &o, t.elapsed().as_secs_f64()) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
