use nls_scatter::bracket::{
    bracket_pi_closed_form, bracket_pi_direct, bracket_pi_fd, bracket_pi_h1, bump_mass, canonical_bracket,
    fd_functional_derivative, h1_kernel, h2_kernel, kernel_check, pair_bump, pi_value, variational_jost, JostTarget,
    Pairing, Wrt,
};
use nls_scatter::flows::{flow_derivative, FlowKind, FlowSigns, FD_EPS};
use nls_scatter::potentials::parse_potential_spec;
use nls_scatter::suite::{FD_BRACKET_HALF_WIDTH, FD_BRACKET_PANEL};
use nls_scatter::{hamiltonians, make_potential, Grid, Potential, C64};
use proptest::prelude::*;

fn pot(s: &str) -> Potential {
    let (k, p) = parse_potential_spec(s).unwrap();
    make_potential(k, &p, Grid::default()).unwrap()
}

fn rel(u: C64, v: C64) -> f64 {
    (u - v).norm() / v.norm().max(1e-12)
}

#[test]
fn vjs_kernels_vanish_on_the_excluded_half_line() {
    let p = pot("sech:A=0.5");
    let x = 0.4;
    let g = *p.grid();
    for k in variational_jost(&p, x, C64::new(1.0, 1.0)).unwrap() {
        for (i, y) in g.nodes().enumerate() {
            let excluded = match k.target {
                JostTarget::PlusTwo => y <= x,
                JostTarget::MinusOne => y >= x,
            };
            if excluded {
                assert_eq!(k.kernel[0].values()[i].norm() + k.kernel[1].values()[i].norm(), 0.0);
            }
        }
    }
}

#[test]
fn free_plus_kernel_wrt_psi_vanishes() {
    // j_+^1 = 0 for the free column, so both terms of d j_+ / d psi drop out
    let p = pot("zero");
    let ks = variational_jost(&p, 0.0, C64::new(0.5, 1.0)).unwrap();
    let k = ks.iter().find(|k| k.target == JostTarget::PlusTwo && k.wrt == Wrt::Psi).unwrap();
    assert!(k.kernel.iter().all(|f| f.max_abs() == 0.0));
}

#[test]
fn vjs_kernels_match_finite_differences() {
    let l = C64::new(1.0, 1.0);
    for spec in ["zero", "sech:A=0.5"] {
        let p = pot(spec);
        let plus = kernel_check(&p, JostTarget::PlusTwo, 0.2, 1.0, l).unwrap();
        let minus = kernel_check(&p, JostTarget::MinusOne, 0.2, -0.9, l).unwrap();
        assert!(plus.residual < 1e-5 && minus.residual < 1e-5, "{spec}: {plus:?} {minus:?}");
    }
}

#[test]
fn h1_functional_derivative() {
    let p = pot("chirped_sech:A=0.5,c=1");
    let g = *p.grid();
    let y0 = g.x(g.nearest(0.37));
    let (dpsi, dbar) = fd_functional_derivative(|q| Ok([C64::new(hamiltonians(q)?.h1, 0.0)]), &p, y0).unwrap();
    // bump averages of conj(psi)/2 and psi/2 from the closed-form profile
    let psi = |y: f64| C64::from_polar(0.5 / y.cosh(), y);
    let mass = bump_mass(&g, y0);
    let want_psi = pair_bump(&g, y0, Pairing::Simpson, |y| Ok(psi(y).conj() * 0.5)).unwrap() / mass;
    let want_bar = pair_bump(&g, y0, Pairing::Simpson, |y| Ok(psi(y) * 0.5)).unwrap() / mass;
    assert!((dpsi[0] - want_psi).norm() < 1e-6, "{} vs {want_psi}", dpsi[0]);
    assert!((dbar[0] - want_bar).norm() < 1e-6);
    // a quadrature functional sees the bump through the Simpson weights, so
    // renormalized by that mass the pointwise value comes back
    let simpson_mass = pair_bump(&g, y0, Pairing::Simpson, |_| Ok(C64::new(1.0, 0.0))).unwrap();
    let pointwise = dbar[0] * mass / simpson_mass;
    assert!((pointwise - psi(y0) * 0.5).norm() < 1e-4, "{pointwise} vs {}", psi(y0) * 0.5);
}

#[test]
fn quadratic_brackets() {
    let p = pot("chirped_sech:A=0.5,c=1");
    let (k1, k2) = (h1_kernel(&p), h2_kernel(&p));
    assert!(canonical_bracket(&k1, &k1).unwrap().norm() < 1e-15);
    assert!(canonical_bracket(&k1, &k2).unwrap().norm() < 1e-6);
    let ab = canonical_bracket(&k1, &k2).unwrap();
    let ba = canonical_bracket(&k2, &k1).unwrap();
    assert!((ab + ba).norm() < 1e-14);
    let other = make_potential(
        nls_scatter::PotentialKind::Sech,
        &parse_potential_spec("sech:A=0.5").unwrap().1,
        Grid::new(-30.0, 30.0, 4096).unwrap(),
    )
    .unwrap();
    assert!(canonical_bracket(&k1, &h1_kernel(&other)).is_err());
}

#[test]
fn pi_h1_bracket_is_the_x1_derivative() {
    let p = pot("sech:A=0.5");
    let signs = FlowSigns::calibrate(&p).unwrap();
    let (x, l) = (0.3, C64::new(0.7, 0.9));
    let closed = bracket_pi_h1(&p, x, l).unwrap();
    let flow: Vec<C64> = flow_derivative(&p, FlowKind::X1, &signs, FD_EPS, |q| Ok(vec![pi_value(q, x, l)?])).unwrap();
    assert!((closed - flow[0]).norm() < 1e-5, "{closed} vs {}", flow[0]);
}

#[test]
fn pi_bracket_examples() {
    let (l, m) = (C64::new(0.5, 1.0), C64::new(1.0, 0.5));
    assert_eq!(bracket_pi_closed_form(&pot("zero"), 0.0, l, m).unwrap().norm(), 0.0);
    assert!(bracket_pi_direct(&pot("zero"), 0.0, l, m).unwrap().norm() < 1e-14);

    let p = pot("sech:A=0.5");
    let c = bracket_pi_closed_form(&p, 0.0, l, m).unwrap();
    let r = bracket_pi_closed_form(&p, 0.0, m, l).unwrap();
    assert!((c + r).norm() < 1e-10 * c.norm().max(1.0));
    let d = bracket_pi_direct(&p, 0.0, l, m).unwrap();
    assert!(rel(d, c) < 1e-4, "{d} vs {c}");
    assert!(bracket_pi_closed_form(&p, 0.0, l, l.conj()).is_err());
}

#[test]
fn pi_bracket_matches_the_finite_difference_oracle() {
    let p = pot("sech:A=0.5");
    let (x, l, m) = (0.0, C64::new(0.5, 1.0), C64::new(1.0, 0.5));
    let fd = bracket_pi_fd(&p, x, l, m, FD_BRACKET_PANEL, FD_BRACKET_HALF_WIDTH).unwrap();
    let c = bracket_pi_closed_form(&p, x, l, m).unwrap();
    assert!(rel(fd, c) < 1e-3, "{fd} vs {c}");
}

#[test]
fn pi_bracket_is_regular_at_coalescence() {
    let p = pot("chirped_sech:A=0.5,c=1");
    let l = C64::new(0.8, 0.9);
    let vals: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eta| bracket_pi_closed_form(&p, 0.2, l, l + C64::from_polar(eta, 0.7)).unwrap().norm())
        .collect();
    let top = vals.iter().cloned().fold(0.0, f64::max);
    assert!(vals.iter().all(|v| v.is_finite()) && top < 2.0 * vals[0], "{vals:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn closed_form_matches_direct(
        lr in -1.5..1.5f64, li in 0.4..1.5f64, mr in -1.5..1.5f64, mi in 0.4..1.5f64, x in -1.0..1.0f64,
    ) {
        let (l, m) = (C64::new(lr, li), C64::new(mr, mi));
        prop_assume!((l - m).norm() > 0.1);
        let p = pot("chirped_sech:A=0.5,c=1");
        let c = bracket_pi_closed_form(&p, x, l, m).unwrap();
        let d = bracket_pi_direct(&p, x, l, m).unwrap();
        prop_assert!(rel(d, c) < 1e-4, "{} vs {}", d, c);
        let e = bracket_pi_direct(&p, x, m, l).unwrap();
        prop_assert!((d + e).norm() < 1e-10 * d.norm().max(1.0));
    }
}
