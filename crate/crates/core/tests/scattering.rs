use nls_scatter::linalg::{sigma1_conj, Mat2};
use nls_scatter::potentials::parse_potential_spec;
use nls_scatter::scattering::{
    asymptotic_coefficients, gluing_check, jost_column, jost_column_with, jost_solutions, scattering_coefficients,
    trace_along_ray, transfer_matrix, JostColumn,
};
use nls_scatter::{hamiltonians, make_potential, Grid, Potential, C64};
use proptest::prelude::*;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn pot(s: &str) -> Potential {
    let (k, p) = parse_potential_spec(s).unwrap();
    make_potential(k, &p, Grid::default()).unwrap()
}

/// `exp(t A)` for traceless `A` through `A^2 = -det(A) I`.
fn expm_traceless(a: Mat2, t: f64) -> Mat2 {
    let s = (-a.det()).sqrt();
    let (c, sh) = ((s * t).cosh(), if s.norm() < 1e-300 { C64::new(t, 0.0) } else { (s * t).sinh() / s });
    Mat2::IDENTITY.scale(c) + a.scale(sh)
}

fn v_matrix(lambda: C64, q: C64) -> Mat2 {
    Mat2::new(-I * lambda * 0.5, q.conj(), q, I * lambda * 0.5)
}

/// |b| for `A sech x`, which is reflectionless nowhere in the defocusing case.
fn sech_abs_b(amp: f64, lambda: f64) -> f64 {
    (std::f64::consts::PI * amp).sinh() / (std::f64::consts::PI * lambda / 2.0).cosh()
}

#[test]
fn free_transfer_matrix_is_diagonal_exponential() {
    let p = pot("zero");
    let l = C64::new(0.8, -0.4);
    let m = transfer_matrix(&p, l, -2.0, 3.0).unwrap().m;
    let d = Mat2::diag((-I * l * 2.5).exp(), (I * l * 2.5).exp());
    assert!((m - d).max_abs() < 1e-11 * d.max_abs());
}

#[test]
fn transfer_across_a_flat_box_matches_the_matrix_exponential() {
    let q0 = C64::from_polar(0.5, 0.3);
    let p = pot("box_smoothed:q0=0.5,l=6,delta=0.05,phase=0.3");
    for l in [C64::new(0.7, 0.0), C64::new(-1.3, 0.4), C64::new(0.2, -0.9)] {
        let m = transfer_matrix(&p, l, -1.5, 1.0).unwrap().m;
        let want = expm_traceless(v_matrix(l, q0), 2.5);
        assert!((m - want).max_abs() < 1e-9, "lambda = {l}: {:e}", (m - want).max_abs());
    }
}

#[test]
fn box_scattering_converges_to_the_sharp_box() {
    // sharp box on [-2, 2]: a = e^{i lambda l/2} exp(l V)_{11}
    let q0 = C64::new(0.5, 0.0);
    let lambdas = [-1.5, 0.0, 0.4, 2.0];
    let exact: Vec<C64> = lambdas
        .iter()
        .map(|&l| {
            let l = C64::new(l, 0.0);
            (I * l * 2.0).exp() * expm_traceless(v_matrix(l, q0), 4.0).get(0, 0)
        })
        .collect();
    let err = |delta: f64| {
        let p = pot(&format!("box_smoothed:q0=0.5,l=4,delta={delta}"));
        let sd = scattering_coefficients(&p, &lambdas).unwrap();
        sd.a.iter().zip(&exact).map(|(a, e)| (a - e).norm()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(0.08), err(0.04));
    // the symmetric mollifier leaves an O(delta^2) error
    assert!(fine < 1e-2 && coarse / fine > 3.0, "{coarse:e} {fine:e}");
    // Richardson in delta removes it to the stated accuracy
    let p = |d: f64| {
        scattering_coefficients(&pot(&format!("box_smoothed:q0=0.5,l=4,delta={d}")), &lambdas).unwrap()
    };
    let (c, f) = (p(0.08), p(0.04));
    for k in 0..lambdas.len() {
        let extrap = (f.a[k] * 4.0 - c.a[k]) / 3.0;
        assert!((extrap - exact[k]).norm() < 1e-4, "lambda = {}", lambdas[k]);
    }
}

#[test]
fn transfer_matrix_is_unimodular() {
    let t = transfer_matrix(&pot("sech:A=0.5"), C64::new(1.0, 0.5), -10.0, 10.0).unwrap();
    assert!(t.det_defect() < 1e-10);
}

#[test]
fn jost_conjugation_symmetry() {
    // sigma1 conj j_-^(1)(x, lambda) = j_-^(2)(x, conj lambda)
    let p = pot("sech:A=0.5");
    let l = C64::new(1.0, 1.0);
    let j = jost_column(&p, l, JostColumn::MinusOne).unwrap();
    let k = jost_column(&p, l.conj(), JostColumn::MinusTwo).unwrap();
    for i in (2000..4200).step_by(50) {
        let d = sigma1_conj(j.value(i));
        let e = k.value(i);
        assert!((d[0] - e[0]).norm() + (d[1] - e[1]).norm() < 1e-10 * (1.0 + e[1].norm()));
    }
}

#[test]
fn jost_solution_is_step_converged() {
    let p = pot("sech:A=0.5");
    let l = C64::new(2.0, 1.0);
    let (a, b) = jost_solutions(&p, l).unwrap();
    for (j, c) in [(a, JostColumn::MinusOne), (b, JostColumn::PlusTwo)] {
        let half = jost_column_with(&p, l, c, 0.05).unwrap();
        let err = j
            .reduced()
            .iter()
            .zip(half.reduced())
            .map(|(u, v)| (u[0] - v[0]).norm().max((u[1] - v[1]).norm()))
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{c:?}: {err:e}");
        assert!(j.boundary_defect() < 1e-9);
    }
}

#[test]
fn scattering_examples() {
    let grid: Vec<f64> = (0..257).map(|k| -8.0 + 16.0 * k as f64 / 256.0).collect();
    let z = scattering_coefficients(&pot("zero"), &grid).unwrap();
    assert!(z.a.iter().all(|a| *a == ONE) && z.b.iter().all(|b| b.norm() == 0.0));
    let s = scattering_coefficients(&pot("sech:A=0.5"), &grid).unwrap();
    assert!(s.unitarity_defect() < 1e-8);
    assert!(s.a.iter().all(|a| a.norm() >= 1.0 - 1e-12));
    assert!(s.wronskian_spread < 1e-8);
    for (l, b) in grid.iter().zip(&s.b).step_by(16) {
        let want = sech_abs_b(0.5, *l);
        assert!((b.norm() - want).abs() < 1e-9 * (1.0 + want), "lambda = {l}");
    }
    // |b(+-8)| is about 1.6e-5 at A = 0.5: small, but not below 1e-6
    assert!((s.b[0].norm() - 1.605e-5).abs() < 1e-8);
}

#[test]
fn gluing_examples() {
    let z = gluing_check(&pot("zero"), 0.7).unwrap();
    assert!(z.rh == 0.0 && z.arh == 0.0);
    let s = gluing_check(&pot("sech:A=0.5"), 1.0).unwrap();
    assert!(s.rh < 1e-7 && s.arh < 1e-7);
    let c = gluing_check(&pot("chirped_sech:A=0.5,c=1"), -2.0).unwrap();
    assert!(c.rh < 1e-7 && c.arh < 1e-7);
}

#[test]
fn trace_examples() {
    let ray: Vec<C64> = [8.0, 16.0, 32.0].iter().map(|&r| C64::new(0.0, r)).collect();
    let z = pot("zero");
    let rep = trace_along_ray(&z, &ray, &hamiltonians(&z).unwrap()).unwrap();
    assert!(rep.samples.iter().all(|s| s.p_inf.norm() == 0.0 && s.truncation == [0.0; 3]));
    let p = pot("sech:A=0.5");
    let h = hamiltonians(&p).unwrap();
    let rep = trace_along_ray(&p, &ray, &h).unwrap();
    let lead: Vec<f64> = rep.samples.iter().map(|s| (s.lambda * s.p_inf + h.h1).norm()).collect();
    // H2 = 0 for a real potential, so the remainder is H3 / lambda^2 + ...
    // and each doubling of R quarters it
    for w in lead.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.3, "{lead:?}");
    }
    assert!(rep.min_im_p_inf >= 0.0);
}

#[test]
fn asymptotic_coefficient_examples() {
    let ray: Vec<C64> = [16.0, 32.0, 64.0, 128.0].iter().map(|&v| C64::new(0.0, v)).collect();
    let z = asymptotic_coefficients(&pot("zero"), 0.3, &ray).unwrap();
    assert!(z.g1.norm() + z.k1.norm() + z.f1.norm() + z.h1.norm() < 1e-14);
    let s = asymptotic_coefficients(&pot("sech:A=0.5"), 0.0, &ray).unwrap();
    assert!((s.k1 - C64::new(0.0, 0.25)).norm() < 1e-4);
    let p = pot("chirped_sech:A=0.5,c=1");
    let c = asymptotic_coefficients(&p, 0.7, &ray).unwrap();
    assert!((c.g1 + I * p.at(0.7).conj()).norm() < 1e-4);
    assert!(c.max_error() < 1e-4);
}

fn arg_b_shift(b0: &[C64], b1: &[C64]) -> Vec<f64> {
    b0.iter().zip(b1).map(|(u, v)| (v / u).arg()).collect()
}

#[test]
fn translation_shifts_arg_b_linearly() {
    let lambdas = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let s0 = scattering_coefficients(&pot("sech:A=0.5"), &lambdas).unwrap();
    let s1 = scattering_coefficients(&pot("sech:A=0.5,x0=1"), &lambdas).unwrap();
    for k in 0..lambdas.len() {
        assert!((s0.a[k].norm() - s1.a[k].norm()).abs() < 1e-8);
        assert!((s0.b[k].norm() - s1.b[k].norm()).abs() < 1e-8);
    }
    // b(lambda) picks up e^{-i lambda s} for psi(x - s)
    let d = arg_b_shift(&s0.b, &s1.b);
    for (l, v) in lambdas.iter().zip(&d) {
        assert!((C64::from_polar(1.0, *v) - C64::from_polar(1.0, -*l)).norm() < 1e-8, "lambda = {l}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reduced_transfer_conjugation_symmetry(re in -3.0..3.0f64, im in 0.05..1.5f64) {
        let p = pot("chirped_sech:A=0.5,c=1");
        let l = C64::new(re, im);
        let t = transfer_matrix(&p, l, -4.0, 5.0).unwrap().reduced();
        let tb = transfer_matrix(&p, l.conj(), -4.0, 5.0).unwrap().reduced();
        let lhs = Mat2::sigma1() * tb * Mat2::sigma1();
        prop_assert!((lhs - t.conj()).max_abs() < 1e-10 * (1.0 + t.max_abs()));
    }

    #[test]
    fn phase_covariance(theta in 0.0..std::f64::consts::TAU) {
        let p = pot("chirped_sech:A=0.5,c=1");
        let rot = C64::from_polar(1.0, theta);
        let q = p.with_values(p.values().iter().map(|v| v * rot).collect(), "rotated").unwrap();
        let lambdas = [-2.0, -0.3, 0.0, 1.1, 2.5];
        let (s0, s1) = (scattering_coefficients(&p, &lambdas).unwrap(), scattering_coefficients(&q, &lambdas).unwrap());
        let shift = arg_b_shift(&s0.b, &s1.b);
        for k in 0..lambdas.len() {
            prop_assert!((s0.a[k] - s1.a[k]).norm() < 1e-8);
            prop_assert!((s0.b[k].norm() - s1.b[k].norm()).abs() < 1e-8);
            // a single global phase, theta itself
            prop_assert!((C64::from_polar(1.0, shift[k]) - rot).norm() < 1e-8);
        }
    }
}
