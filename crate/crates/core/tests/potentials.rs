use nls_scatter::grid::DEFAULT_DECAY_TOL;
use nls_scatter::potentials::{parse_potential_spec, Params};
use nls_scatter::{hamiltonians, make_potential, ComplexField, Grid, Potential, PotentialKind, C64};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::default()
}

fn spec(s: &str) -> Potential {
    let (k, p) = parse_potential_spec(s).unwrap();
    make_potential(k, &p, grid()).unwrap()
}

#[test]
fn catalogue_samples() {
    assert!(spec("zero").is_zero());
    let s = spec("sech:A=0.5");
    let c = spec("chirped_sech:A=0.5,c=1");
    for i in (0..grid().n()).step_by(101) {
        let x = grid().x(i);
        assert!((s.values()[i] - C64::new(0.5 / x.cosh(), 0.0)).norm() < 1e-15);
        let want = C64::from_polar(0.5 / x.cosh(), x);
        assert!((c.values()[i] - want).norm() < 1e-15);
    }
}

#[test]
fn hamiltonian_examples() {
    let h = hamiltonians(&spec("zero")).unwrap();
    assert_eq!((h.h1, h.h2, h.h3), (0.0, 0.0, 0.0));
    let h = hamiltonians(&spec("sech:A=0.5")).unwrap();
    assert!((h.h1 - 0.25).abs() < 1e-10);
    assert!(h.h2.abs() < 1e-12);
    // unit chirp: conj(psi) psi' = i |psi|^2 + (real, odd), so H2 = H1
    let h = hamiltonians(&spec("chirped_sech:A=0.5,c=1")).unwrap();
    assert!((h.h2 - 0.25).abs() < 1e-8);
    // H3 = 1/2 int A^2 (sech^2 tanh^2 + c^2 sech^2) + A^4 sech^4 = A^2 (1/3 + 1) + 2 A^4 / 3
    let want = 0.25 * (1.0 / 3.0 + 1.0) + 2.0 * 0.0625 / 3.0;
    assert!((h.h3 - want).abs() < 1e-8, "{} vs {want}", h.h3);
}

#[test]
fn hamiltonians_are_nonnegative_across_kinds() {
    for k in PotentialKind::ALL {
        let p = make_potential(k, &k.default_params(), Grid::default()).unwrap();
        let h = hamiltonians(&p).unwrap();
        assert!(h.h1 >= 0.0 && h.h3 >= 0.0, "{}", k.name());
    }
}

#[test]
fn rejects_support_beyond_the_grid() {
    let mut p = Params::new();
    p.insert("A".into(), 0.5);
    p.insert("x0".into(), 29.0);
    assert!(make_potential(PotentialKind::Sech, &p, grid()).is_err());
    let (k, bad) = parse_potential_spec("sech:B=1").unwrap();
    assert!(make_potential(k, &bad, grid()).is_err());
    assert!(parse_potential_spec("nope").is_err());
}

#[test]
fn csv_round_trip() {
    let p = spec("chirped_sech:A=0.5,c=1");
    let mut buf = Vec::new();
    p.psi().write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"x,re,im\n"));
    let back = ComplexField::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.values(), p.values());
    let q = Potential::from_field(back, "reloaded", DEFAULT_DECAY_TOL);
    assert!(q.decay_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonians_are_phase_invariant(theta in 0.0..std::f64::consts::TAU, c in -1.5..1.5f64) {
        let p = spec(&format!("chirped_sech:A=0.6,c={c}"));
        let rot = C64::from_polar(1.0, theta);
        let q = p.with_values(p.values().iter().map(|v| v * rot).collect(), "rotated").unwrap();
        let (a, b) = (hamiltonians(&p).unwrap(), hamiltonians(&q).unwrap());
        prop_assert!((a.h1 - b.h1).abs() < 1e-13);
        prop_assert!((a.h2 - b.h2).abs() < 1e-13);
        prop_assert!((a.h3 - b.h3).abs() < 1e-13);
    }

    #[test]
    fn hamiltonians_are_translation_invariant(s in -3.0..3.0f64) {
        let p = spec("chirped_sech:A=0.5,c=0.7");
        let q = spec(&format!("chirped_sech:A=0.5,c=0.7,x0={s}"));
        // the chirp phase is not centred, so q is p moved by s times a constant phase
        let (a, b) = (hamiltonians(&p).unwrap(), hamiltonians(&q).unwrap());
        prop_assert!((a.h1 - b.h1).abs() < 1e-10);
        prop_assert!((a.h2 - b.h2).abs() < 1e-10);
        prop_assert!((a.h3 - b.h3).abs() < 1e-10);
    }
}
