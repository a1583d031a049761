//! Transfer matrices, Jost solutions and the scattering coefficients a, b.
//!
//! Jost columns are stored in reduced form `r = e^{-s i lambda x / 2} j`
//! with `s = +1` for the second columns and `s = -1` for the first ones.
//! Each column is integrated from its normalization end, which is the
//! direction in which the reduced solution stays bounded for `lambda` in
//! the column's half-plane of analyticity.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fmt17, segment_integral, Grid, C64};
use crate::linalg::{vnorm, vsub, wronskian, Mat2, Vec2};
use crate::ode::{Coefficient, DEFAULT_STEP_SCALE};
use crate::potentials::{Hamiltonians, Potential};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Half-plane of a spectral parameter, or the bank of the cut for real ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    #[default]
    Upper,
    Lower,
}

impl HalfPlane {
    /// `Upper` for `Im lambda >= 0`.
    pub fn of(lambda: C64) -> Self {
        if lambda.im >= 0.0 {
            HalfPlane::Upper
        } else {
            HalfPlane::Lower
        }
    }

    pub fn flip(self) -> Self {
        match self {
            HalfPlane::Upper => HalfPlane::Lower,
            HalfPlane::Lower => HalfPlane::Upper,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }
}

/// Which Jost column: `PlusTwo` is `j_+^(2)`, normalized to `f_->` at `+inf`, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JostColumn {
    PlusOne,
    PlusTwo,
    MinusOne,
    MinusTwo,
}

impl JostColumn {
    pub const ALL: [JostColumn; 4] = [
        JostColumn::PlusOne,
        JostColumn::PlusTwo,
        JostColumn::MinusOne,
        JostColumn::MinusTwo,
    ];

    /// Normalized at `x -> +inf`.
    pub fn at_plus_infinity(self) -> bool {
        matches!(self, JostColumn::PlusOne | JostColumn::PlusTwo)
    }

    /// Exponent sign `s` in `j = e^{s i lambda x / 2} r`.
    pub fn phase_sign(self) -> f64 {
        match self {
            JostColumn::PlusTwo | JostColumn::MinusTwo => 1.0,
            JostColumn::PlusOne | JostColumn::MinusOne => -1.0,
        }
    }

    fn start(self) -> Vec2 {
        if self.phase_sign() > 0.0 {
            [ZERO, ONE]
        } else {
            [ONE, ZERO]
        }
    }

    /// Half-plane where the column is analytic in `lambda`.
    pub fn analytic_half(self) -> HalfPlane {
        match self {
            JostColumn::PlusTwo | JostColumn::MinusOne => HalfPlane::Upper,
            JostColumn::PlusOne | JostColumn::MinusTwo => HalfPlane::Lower,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JostColumn::PlusOne => "plus1",
            JostColumn::PlusTwo => "plus2",
            JostColumn::MinusOne => "minus1",
            JostColumn::MinusTwo => "minus2",
        }
    }
}

/// `e^{s i lambda x / 2}`.
pub(crate) fn phase(lambda: C64, s: f64, x: f64) -> C64 {
    (I * lambda * (0.5 * s * x)).exp()
}

fn reduced_coefficient(p: &Potential, lambda: C64, column: JostColumn) -> Coefficient<'_> {
    if column.phase_sign() > 0.0 {
        Coefficient::new(p, -I * lambda, ZERO)
    } else {
        Coefficient::new(p, ZERO, I * lambda)
    }
}

fn check_lambda(lambda: C64) -> Result<()> {
    if lambda.re.is_finite() && lambda.im.is_finite() {
        Ok(())
    } else {
        Err(Error::bad_lambda(lambda, "not finite"))
    }
}

/// A Jost column sampled on every grid node.
#[derive(Debug, Clone)]
pub struct JostSolution {
    potential: Potential,
    lambda: C64,
    column: JostColumn,
    half_plane: HalfPlane,
    step_scale: f64,
    reduced: Vec<Vec2>,
}

impl JostSolution {
    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn column(&self) -> JostColumn {
        self.column
    }

    pub fn half_plane(&self) -> HalfPlane {
        self.half_plane
    }

    pub fn grid(&self) -> &Grid {
        self.potential.grid()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Reduced samples `e^{-s i lambda x / 2} j(x_i)`.
    pub fn reduced(&self) -> &[Vec2] {
        &self.reduced
    }

    pub fn phase_sign(&self) -> f64 {
        self.column.phase_sign()
    }

    /// Full value at node `i`. Overflows only when `|Im lambda| x` is huge;
    /// use the reduced samples for that regime.
    pub fn value(&self, i: usize) -> Vec2 {
        let e = phase(self.lambda, self.phase_sign(), self.grid().x(i));
        [self.reduced[i][0] * e, self.reduced[i][1] * e]
    }

    pub fn values(&self) -> Vec<Vec2> {
        (0..self.reduced.len()).map(|i| self.value(i)).collect()
    }

    /// Reduced value at an arbitrary point, propagated from the nearest node.
    pub fn reduced_at(&self, x: f64) -> Result<Vec2> {
        let g = self.grid();
        g.check_contains(x)?;
        let i = g.nearest(x);
        let coef = reduced_coefficient(&self.potential, self.lambda, self.column);
        Ok(coef.propagator(g.x(i), x, self.step_scale).apply(self.reduced[i]))
    }

    pub fn at(&self, x: f64) -> Result<Vec2> {
        let r = self.reduced_at(x)?;
        let e = phase(self.lambda, self.phase_sign(), x);
        Ok([r[0] * e, r[1] * e])
    }

    /// Max over nodes of the distance between the reduced solution and its
    /// normalization vector at the normalization end.
    pub fn boundary_defect(&self) -> f64 {
        let i = if self.column.at_plus_infinity() {
            self.reduced.len() - 1
        } else {
            0
        };
        vnorm(vsub(self.reduced[i], self.column.start()))
    }
}

/// Integrates one Jost column across the grid.
pub fn jost_column(p: &Potential, lambda: C64, column: JostColumn) -> Result<JostSolution> {
    jost_column_with(p, lambda, column, DEFAULT_STEP_SCALE)
}

pub fn jost_column_with(
    p: &Potential,
    lambda: C64,
    column: JostColumn,
    step_scale: f64,
) -> Result<JostSolution> {
    check_lambda(lambda)?;
    let coef = reduced_coefficient(p, lambda, column);
    let reduced = coef.sweep(column.at_plus_infinity(), column.start(), step_scale);
    if reduced.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
        return Err(Error::Numerical(format!(
            "Jost column {} overflowed at lambda = {lambda}",
            column.name()
        )));
    }
    let half_plane = if lambda.im == 0.0 {
        column.analytic_half()
    } else {
        HalfPlane::of(lambda)
    };
    Ok(JostSolution {
        potential: p.clone(),
        lambda,
        column,
        half_plane,
        step_scale,
        reduced,
    })
}

/// The pair of Jost columns analytic in the half-plane of `lambda`:
/// `(j_-^(1), j_+^(2))` above the axis, `(j_+^(1), j_-^(2))` below. Real
/// `lambda` is read as `lambda + i0`.
pub fn jost_solutions(p: &Potential, lambda: C64) -> Result<(JostSolution, JostSolution)> {
    jost_solutions_on(p, lambda, HalfPlane::of(lambda))
}

/// Same as [`jost_solutions`] with an explicit bank for real `lambda`.
pub fn jost_solutions_on(
    p: &Potential,
    lambda: C64,
    bank: HalfPlane,
) -> Result<(JostSolution, JostSolution)> {
    let (c1, c2) = match bank {
        HalfPlane::Upper => (JostColumn::MinusOne, JostColumn::PlusTwo),
        HalfPlane::Lower => (JostColumn::PlusOne, JostColumn::MinusTwo),
    };
    let (a, b) = rayon::join(|| jost_column(p, lambda, c1), || jost_column(p, lambda, c2));
    let (mut a, mut b) = (a?, b?);
    a.half_plane = bank;
    b.half_plane = bank;
    Ok((a, b))
}

/// Reduced value of one Jost column at a single point, integrating only
/// from the normalization end to `x`.
pub fn jost_reduced_at(p: &Potential, lambda: C64, column: JostColumn, x: f64) -> Result<Vec2> {
    jost_reduced_at_with(p, lambda, column, x, DEFAULT_STEP_SCALE)
}

pub fn jost_reduced_at_with(
    p: &Potential,
    lambda: C64,
    column: JostColumn,
    x: f64,
    step_scale: f64,
) -> Result<Vec2> {
    check_lambda(lambda)?;
    let g = p.grid();
    g.check_contains(x)?;
    let from = if column.at_plus_infinity() { g.x_max() } else { g.x_min() };
    let coef = reduced_coefficient(p, lambda, column);
    let r = coef.propagator(from, x, step_scale).apply(column.start());
    if !(r[0].is_finite() && r[1].is_finite()) {
        return Err(Error::Numerical(format!("Jost column overflowed at lambda = {lambda}")));
    }
    Ok(r)
}

/// `M(x, y, lambda)` with `M' = V M`, `M(y, y) = I`.
#[derive(Debug, Clone, Copy)]
pub struct TransferMatrix {
    pub m: Mat2,
    pub lambda: C64,
    pub x_from: f64,
    pub x_to: f64,
}

impl TransferMatrix {
    pub fn det_defect(&self) -> f64 {
        (self.m.det() - ONE).norm()
    }

    /// `T(x, y) = E(-lambda x / 2) M(x, y) E(lambda y / 2)` with
    /// `E(t) = exp(-i t sigma3)`.
    pub fn reduced(&self) -> Mat2 {
        let e = |t: f64| {
            let z = -I * self.lambda * (0.5 * t);
            Mat2::diag(z.exp(), (-z).exp())
        };
        e(-self.x_to) * self.m * e(self.x_from)
    }
}

/// Unimodularity is checked, never imposed.
pub const DET_TOL: f64 = 1e-10;

pub fn transfer_matrix(p: &Potential, lambda: C64, y: f64, x: f64) -> Result<TransferMatrix> {
    transfer_matrix_with(p, lambda, y, x, DEFAULT_STEP_SCALE)
}

pub fn transfer_matrix_with(
    p: &Potential,
    lambda: C64,
    y: f64,
    x: f64,
    step_scale: f64,
) -> Result<TransferMatrix> {
    check_lambda(lambda)?;
    let g = p.grid();
    g.check_contains(y)?;
    g.check_contains(x)?;
    if y > x {
        return Err(Error::param("y", "transfer matrix needs y <= x"));
    }
    let m = Coefficient::dirac(p, lambda).propagator(y, x, step_scale);
    let t = TransferMatrix {
        m,
        lambda,
        x_from: y,
        x_to: x,
    };
    let scale = m.max_abs().max(1.0);
    if !(t.det_defect() <= DET_TOL * scale * scale) {
        return Err(Error::Numerical(format!(
            "transfer matrix lost unimodularity (|det - 1| = {:.3e}) at lambda = {lambda}",
            t.det_defect()
        )));
    }
    Ok(t)
}

/// `a(lambda) = j_-^(1)T J j_+^(2)` for `Im lambda >= 0`, extended below
/// the axis by `a*(lambda) = conj(a(conj lambda))`. Also returns the
/// spread of the Wronskian between the grid centre and `x_max`.
pub fn a_coefficient(p: &Potential, lambda: C64) -> Result<(C64, f64)> {
    if lambda.im < 0.0 {
        let (a, spread) = a_coefficient(p, lambda.conj())?;
        return Ok((a.conj(), spread));
    }
    let g = p.grid();
    let mid = g.x(g.n() / 2);
    let coef = reduced_coefficient(p, lambda, JostColumn::MinusOne);
    let v_mid = coef
        .propagator(g.x_min(), mid, DEFAULT_STEP_SCALE)
        .apply(JostColumn::MinusOne.start());
    let w_mid = jost_reduced_at(p, lambda, JostColumn::PlusTwo, mid)?;
    let v_end = coef.propagator(mid, g.x_max(), DEFAULT_STEP_SCALE).apply(v_mid);
    let a_mid = wronskian(v_mid, w_mid);
    let a_end = v_end[0];
    Ok((a_mid, (a_mid - a_end).norm()))
}

/// Scattering data over a real grid plus `a` at upper half-plane samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub lambda_grid: Vec<f64>,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub a_upper: Vec<(C64, C64)>,
    /// Largest spread of the Wronskian over x seen while computing `a`.
    pub wronskian_spread: f64,
}

impl ScatteringData {
    /// `max | |a|^2 - |b|^2 - 1 |` over the real grid.
    pub fn unitarity_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `T = [[a, conj b], [b, conj a]]` at grid index `i`.
    pub fn t_matrix(&self, i: usize) -> Mat2 {
        let (a, b) = (self.a[i], self.b[i]);
        Mat2::new(a, b.conj(), b, a.conj())
    }

    /// `S = (1/a) [[1, conj b], [-b, 1]]`.
    pub fn s_matrix(&self, i: usize) -> Mat2 {
        s_matrix(self.a[i], self.b[i])
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["lambda", "re_a", "im_a", "re_b", "im_b"])?;
        for ((l, a), b) in self.lambda_grid.iter().zip(&self.a).zip(&self.b) {
            wr.write_record([fmt17(*l), fmt17(a.re), fmt17(a.im), fmt17(b.re), fmt17(b.im)])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = |z: &C64| serde_json::json!([z.re, z.im]);
        serde_json::json!({
            "lambda": self.lambda_grid,
            "a": self.a.iter().map(c).collect::<Vec<_>>(),
            "b": self.b.iter().map(c).collect::<Vec<_>>(),
            "a_upper": self.a_upper.iter().map(|(l, a)| serde_json::json!({"lambda": c(l), "a": c(a)})).collect::<Vec<_>>(),
        })
    }
}

pub fn s_matrix(a: C64, b: C64) -> Mat2 {
    Mat2::new(ONE, b.conj(), -b, ONE).scale(ONE / a)
}

/// Tolerance on the x-dependence of the Wronskian.
pub const SC_TOL: f64 = 1e-8;

/// `a` and `b` on a real grid: `a` from the Wronskian, `b` from the
/// scattering rule `j_-^(1) ~ a f_<- + b f_->` at `x_max`.
pub fn scattering_coefficients(p: &Potential, lambda_grid: &[f64]) -> Result<ScatteringData> {
    scattering_coefficients_with_upper(p, lambda_grid, &[])
}

pub fn scattering_coefficients_with_upper(
    p: &Potential,
    lambda_grid: &[f64],
    upper: &[C64],
) -> Result<ScatteringData> {
    let g = *p.grid();
    let real: Vec<(C64, C64, f64)> = lambda_grid
        .par_iter()
        .map(|&l| real_ab(p, l))
        .collect::<Result<_>>()?;
    for &l in upper {
        if l.im <= 0.0 {
            return Err(Error::bad_lambda(l, "a_upper samples need Im lambda > 0"));
        }
    }
    let up: Vec<(C64, f64)> = upper
        .par_iter()
        .map(|&l| a_coefficient(p, l))
        .collect::<Result<_>>()?;
    let spread = real
        .iter()
        .map(|r| r.2)
        .chain(up.iter().map(|u| u.1))
        .fold(0.0, f64::max);
    if spread > SC_TOL {
        log::warn!(
            "Wronskian varies by {spread:.3e} over x on [{}, {}]; the grid may be too coarse",
            g.x_min(),
            g.x_max()
        );
    }
    Ok(ScatteringData {
        lambda_grid: lambda_grid.to_vec(),
        a: real.iter().map(|r| r.0).collect(),
        b: real.iter().map(|r| r.1).collect(),
        a_upper: upper.iter().copied().zip(up.iter().map(|u| u.0)).collect(),
        wronskian_spread: spread,
    })
}

fn real_ab(p: &Potential, lambda: f64) -> Result<(C64, C64, f64)> {
    if !lambda.is_finite() {
        return Err(Error::bad_lambda(C64::new(lambda, 0.0), "not finite"));
    }
    let l = C64::new(lambda, 0.0);
    let g = p.grid();
    let mid = g.x(g.n() / 2);
    let coef = reduced_coefficient(p, l, JostColumn::MinusOne);
    let v_mid = coef
        .propagator(g.x_min(), mid, DEFAULT_STEP_SCALE)
        .apply(JostColumn::MinusOne.start());
    let v_end = coef.propagator(mid, g.x_max(), DEFAULT_STEP_SCALE).apply(v_mid);
    let w_mid = jost_reduced_at(p, l, JostColumn::PlusTwo, mid)?;
    let a = wronskian(v_mid, w_mid);
    // j_-^(1)(x_max) = e^{-i l x/2} v = a f_<- + b f_->, so b = e^{-i l x_max} v_2.
    let b = v_end[1] * phase(l, -2.0, g.x_max());
    Ok((a, b, (a - v_end[0]).norm()))
}

/// Max-norm residuals of the gluing condition `H_- = H_+ S` and of its
/// dual `H_-^* = S^{-1} H_+^*` over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GluingReport {
    pub lambda: f64,
    pub a: C64,
    pub b: C64,
    pub rh: f64,
    pub arh: f64,
}

pub fn gluing_check(p: &Potential, lambda: f64) -> Result<GluingReport> {
    let l = C64::new(lambda, 0.0);
    let cols: Vec<JostSolution> = JostColumn::ALL
        .par_iter()
        .map(|&c| jost_column(p, l, c))
        .collect::<Result<_>>()?;
    let [p1, p2, m1, m2] = [&cols[0], &cols[1], &cols[2], &cols[3]];
    let n = p.grid().n();
    let (a, b, _) = real_ab(p, lambda)?;
    let s = s_matrix(a, b);
    let s_inv = Mat2::new(ONE, -b.conj(), b, ONE).scale(ONE / a.conj());
    let minus_sigma3 = Mat2::diag(-ONE, ONE);
    let mut rh: f64 = 0.0;
    let mut arh: f64 = 0.0;
    for i in 0..n {
        let h_plus = Mat2::from_columns(m1.value(i), p2.value(i));
        let h_minus = Mat2::from_columns(p1.value(i), m2.value(i));
        rh = rh.max((h_minus - h_plus * s).max_abs());
        let star_plus = minus_sigma3 * Mat2::sigma1() * h_plus.transpose().scale(ONE / a);
        let star_minus = minus_sigma3 * Mat2::sigma1() * h_minus.transpose().scale(ONE / a.conj());
        arh = arh.max((star_minus - s_inv * star_plus).max_abs());
    }
    Ok(GluingReport {
        lambda,
        a,
        b,
        rh,
        arh,
    })
}

/// One sample of the trace expansion along a ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub lambda: C64,
    pub a: C64,
    pub p_inf: C64,
    /// `|p + H1/l|`, `|p + H1/l + H2/l^2|`, `|p + H1/l + H2/l^2 + H3/l^3|`.
    pub truncation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub samples: Vec<TraceSample>,
    pub min_im_p_inf: f64,
}

/// `p_inf = (i/2) log a` along a ray, continued from its far end, and the
/// truncation errors of the `-H1/l - H2/l^2 - H3/l^3` expansion.
pub fn p_infinity_and_trace(samples: &[(C64, C64)], h: &Hamiltonians) -> Result<TraceReport> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| samples[j].0.norm().total_cmp(&samples[i].0.norm()));
    let mut logs = vec![ZERO; samples.len()];
    let mut prev: Option<(usize, C64)> = None;
    for &k in &order {
        let (l, a) = samples[k];
        if l.im < 0.0 {
            return Err(Error::bad_lambda(l, "trace expansion needs Im lambda >= 0"));
        }
        let mut z = a.ln();
        if let Some((pk, pz)) = prev {
            let turns = ((pz.im - z.im) / (2.0 * PI)).round();
            z.im += 2.0 * PI * turns;
            let jump = (z.im - pz.im).abs();
            if jump > PI / 2.0 {
                return Err(Error::Branch {
                    from: pk,
                    to: k,
                    jump,
                });
            }
        } else if z.im.abs() > PI / 2.0 {
            return Err(Error::Branch {
                from: k,
                to: k,
                jump: z.im.abs(),
            });
        }
        logs[k] = z;
        prev = Some((k, z));
    }
    let out: Vec<TraceSample> = samples
        .iter()
        .zip(&logs)
        .map(|(&(l, a), &lg)| {
            let p_inf = I * 0.5 * lg;
            let t1 = p_inf + h.h1 / l;
            let t2 = t1 + h.h2 / (l * l);
            let t3 = t2 + h.h3 / (l * l * l);
            TraceSample {
                lambda: l,
                a,
                p_inf,
                truncation: [t1.norm(), t2.norm(), t3.norm()],
            }
        })
        .collect();
    let min_im = out.iter().map(|s| s.p_inf.im).fold(f64::INFINITY, f64::min);
    Ok(TraceReport {
        samples: out,
        min_im_p_inf: min_im,
    })
}

/// Computes `a` on the ray and runs [`p_infinity_and_trace`].
pub fn trace_along_ray(p: &Potential, ray: &[C64], h: &Hamiltonians) -> Result<TraceReport> {
    let samples: Vec<(C64, C64)> = ray
        .par_iter()
        .map(|&l| a_coefficient(p, l).map(|(a, _)| (l, a)))
        .collect::<Result<_>>()?;
    p_infinity_and_trace(&samples, h)
}

/// Extracted and closed-form first-order coefficients of the Jost
/// expansions `e^{-i l x/2} j_+^(2) = (g, k)` and `e^{i l x/2} j_-^(1) = (h, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub x: f64,
    pub g1: C64,
    pub k1: C64,
    pub f1: C64,
    pub h1: C64,
    pub g1_exact: C64,
    pub k1_exact: C64,
    pub f1_exact: C64,
    pub h1_exact: C64,
    /// Difference between the two highest-order extrapolants, a convergence gauge.
    pub extrapolation_spread: f64,
}

impl AsymptoticReport {
    pub fn max_error(&self) -> f64 {
        [
            (self.g1 - self.g1_exact).norm(),
            (self.k1 - self.k1_exact).norm(),
            (self.f1 - self.f1_exact).norm(),
            (self.h1 - self.h1_exact).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Polynomial extrapolation to `t = 0` through `(t_k, c_k)` (Neville).
/// Returns the extrapolant and the difference to the next-lower order.
pub fn extrapolate_to_zero(t: &[C64], c: &[C64]) -> (C64, f64) {
    let n = t.len();
    let mut p = c.to_vec();
    let mut lower = c[n - 1];
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (p[i + 1] * t[i] - p[i] * t[i + m]) / (t[i] - t[i + m]);
        }
        if m == n - 2 {
            lower = p[1];
        }
    }
    (p[0], (p[0] - lower).norm())
}

pub fn asymptotic_coefficients(p: &Potential, x: f64, ray: &[C64]) -> Result<AsymptoticReport> {
    if ray.len() < 2 {
        return Err(Error::param("ray", "needs at least two samples"));
    }
    for &l in ray {
        if l.im <= 0.0 {
            return Err(Error::bad_lambda(l, "ray must lie in the upper half-plane"));
        }
    }
    p.grid().check_contains(x)?;
    let vals: Vec<[C64; 4]> = ray
        .par_iter()
        .map(|&l| -> Result<[C64; 4]> {
            let w = jost_reduced_at(p, l, JostColumn::PlusTwo, x)?;
            let v = jost_reduced_at(p, l, JostColumn::MinusOne, x)?;
            Ok([l * w[0], l * (w[1] - ONE), l * v[1], l * (v[0] - ONE)])
        })
        .collect::<Result<_>>()?;
    let t: Vec<C64> = ray.iter().map(|l| ONE / l).collect();
    let mut out = [ZERO; 4];
    let mut spread: f64 = 0.0;
    for k in 0..4 {
        let c: Vec<C64> = vals.iter().map(|v| v[k]).collect();
        let (e, s) = extrapolate_to_zero(&t, &c);
        out[k] = e;
        spread = spread.max(s);
    }
    let g = p.grid();
    let dens: Vec<C64> = p.values().iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    let right = segment_integral(g, &dens, x, g.x_max());
    let left = segment_integral(g, &dens, g.x_min(), x);
    let psi = p.at(x);
    Ok(AsymptoticReport {
        x,
        g1: out[0],
        k1: out[1],
        f1: out[2],
        h1: out[3],
        g1_exact: -I * psi.conj(),
        k1_exact: I * right,
        f1_exact: I * psi,
        h1_exact: I * left,
        extrapolation_spread: spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_potential, Params, PotentialKind};

    fn zero() -> Potential {
        make_potential(PotentialKind::Zero, &Params::new(), Grid::default()).unwrap()
    }

    #[test]
    fn free_jost_columns_are_exponentials() {
        let p = zero();
        let l = C64::new(0.7, 0.3);
        let (m1, p2) = jost_solutions(&p, l).unwrap();
        for i in (0..p.grid().n()).step_by(517) {
            let x = p.grid().x(i);
            let v = m1.value(i);
            let w = p2.value(i);
            assert!((v[0] - (-I * l * x * 0.5).exp()).norm() < 1e-12);
            assert!(v[1].norm() < 1e-14 && w[0].norm() < 1e-14);
            assert!((w[1] - (I * l * x * 0.5).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn free_scattering_data() {
        let sd = scattering_coefficients(&zero(), &[-3.0, 0.0, 2.5]).unwrap();
        for (a, b) in sd.a.iter().zip(&sd.b) {
            assert!((a - ONE).norm() < 1e-14 && b.norm() < 1e-14);
        }
    }

    #[test]
    fn neville_recovers_polynomial() {
        let t: Vec<C64> = [0.5, 0.25, 0.125].iter().map(|&v| C64::new(v, 0.0)).collect();
        let c: Vec<C64> = t.iter().map(|t| ONE * 3.0 + t * 2.0 - t * t).collect();
        let (e, _) = extrapolate_to_zero(&t, &c);
        assert!((e - ONE * 3.0).norm() < 1e-13);
    }
}
