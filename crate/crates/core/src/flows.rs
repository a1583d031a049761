//! The first two hierarchy flows (phase rotation and translation), the
//! split-step NLS flow, and their action on Jost solutions and on the
//! S-divisor.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::cover::{cover_functions, Sheet, SpectralPoint};
use crate::error::{Error, Result};
use crate::grid::{C64, DEFAULT_DECAY_TOL};
use crate::linalg::Vec2;
use crate::potentials::{hamiltonians, Hamiltonians, Potential};
use crate::scattering::{jost_column, scattering_coefficients, HalfPlane, JostColumn};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Tolerance on Hamiltonian drift along the split-step flow.
pub const FLOW_TOL: f64 = 1e-7;
/// Base increment for centred finite-difference flow derivatives.
pub const FD_EPS: f64 = 1e-4;
/// Largest split-step time increment.
pub const MAX_NLS_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    X1,
    X2,
    Nls,
}

impl FlowKind {
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::X1 => "x1",
            FlowKind::X2 => "x2",
            FlowKind::Nls => "nls",
        }
    }
}

impl std::str::FromStr for FlowKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x1" => Ok(FlowKind::X1),
            "x2" => Ok(FlowKind::X2),
            "nls" | "x3" => Ok(FlowKind::Nls),
            _ => Err(Error::param("which", format!("unknown flow `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub which: FlowKind,
    pub t: f64,
    /// Split-step count for the NLS flow; ignored by X1 and X2.
    pub steps: usize,
}

impl FlowSpec {
    pub fn new(which: FlowKind, t: f64) -> Self {
        Self {
            which,
            t,
            steps: nls_steps_for(t),
        }
    }
}

/// Smallest step count keeping the split-step increment at or below [`MAX_NLS_DT`].
pub fn nls_steps_for(t: f64) -> usize {
    ((t.abs() / MAX_NLS_DT).ceil() as usize).max(1)
}

/// Signs of the flows: `X1` rotates `psi -> e^{i sigma1 t} psi`, `X2`
/// translates `psi(x) -> psi(x + sigma2 s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSigns {
    pub sigma1: f64,
    pub sigma2: f64,
    /// Residual of the chosen sign against the Jost action table.
    pub residual1: f64,
    /// Residual of the chosen sign against `X2 X = X'` for the Weyl function.
    pub residual2: f64,
}

impl Default for FlowSigns {
    fn default() -> Self {
        Self {
            sigma1: -1.0,
            sigma2: 1.0,
            residual1: 0.0,
            residual2: 0.0,
        }
    }
}

/// Point used by [`FlowSigns::calibrate`].
pub const CALIBRATION_LAMBDA: C64 = C64 { re: 1.0, im: 1.0 };
pub const CALIBRATION_X: f64 = 0.3;

impl FlowSigns {
    /// Fixes `sigma1` from the action of `X1` on the Jost solutions and
    /// `sigma2` from the action of `X2` on the Weyl function of `j_+`. The
    /// potential must be nonzero.
    pub fn calibrate(p: &Potential) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::param("potential", "calibration needs a nonzero potential"));
        }
        let lambda = CALIBRATION_LAMBDA;
        let x = CALIBRATION_X;
        let mut r1 = [0.0; 2];
        let mut r2 = [0.0; 2];
        for (k, sigma) in [1.0, -1.0].into_iter().enumerate() {
            let signs = FlowSigns {
                sigma1: sigma,
                sigma2: sigma,
                ..Default::default()
            };
            r1[k] = jost_action_x1(p, x, lambda, &signs)?.residual;
            r2[k] = weyl_action_x2(p, x, lambda, &signs)?.residual;
        }
        let pick = |r: [f64; 2]| if r[0] <= r[1] { (1.0, r[0]) } else { (-1.0, r[1]) };
        let (sigma1, residual1) = pick(r1);
        let (sigma2, residual2) = pick(r2);
        log::info!("flow calibration: sigma1 = {sigma1} ({residual1:.2e}), sigma2 = {sigma2} ({residual2:.2e})");
        if residual1 > 1e-5 || residual2 > 1e-5 {
            return Err(Error::Numerical(format!(
                "flow calibration inconclusive: residuals {residual1:.3e}, {residual2:.3e}"
            )));
        }
        Ok(Self {
            sigma1,
            sigma2,
            residual1,
            residual2,
        })
    }
}

/// `psi -> e^{i sigma1 t} psi`.
pub fn flow_x1(p: &Potential, t: f64, signs: &FlowSigns) -> Potential {
    let r = (I * signs.sigma1 * t).exp();
    let v = p.values().iter().map(|z| z * r).collect();
    p.with_values(v, p.label()).expect("same grid")
}

/// `psi(x) -> psi(x + sigma2 s)`.
pub fn flow_x2(p: &Potential, s: f64, signs: &FlowSigns) -> Result<Potential> {
    translate(p, signs.sigma2 * s)
}

fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let period = n as f64 * dx;
    (0..n)
        .map(|k| {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * m / period
        })
        .collect()
}

/// Band-limited shift `psi(x) -> psi(x + s)` through the FFT. Fails when the
/// shifted field no longer decays at the grid ends.
pub fn translate(p: &Potential, s: f64) -> Result<Potential> {
    if s == 0.0 {
        return Ok(p.clone());
    }
    let g = p.grid();
    let n = g.n();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut data = p.values().to_vec();
    fwd.process(&mut data);
    let k = wavenumbers(n, g.dx());
    for (j, z) in data.iter_mut().enumerate() {
        if n % 2 == 0 && j == n / 2 {
            // Nyquist mode: keep the real (cosine) part of the shift.
            *z *= (k[j] * s).cos();
        } else {
            *z *= (I * k[j] * s).exp();
        }
    }
    inv.process(&mut data);
    let scale = 1.0 / n as f64;
    let values: Vec<C64> = data.into_iter().map(|z| z * scale).collect();
    let out = p.with_values(values, p.label())?;
    if !p.is_zero() {
        let b = out.psi().boundary_magnitude();
        if b > DEFAULT_DECAY_TOL {
            return Err(Error::NotDecaying {
                magnitude: b,
                tolerance: DEFAULT_DECAY_TOL,
            });
        }
    }
    Ok(out)
}

/// Strang split-step for `i psi_t = -psi'' + 2 |psi|^2 psi` on the periodic
/// grid: half linear step in Fourier space, full nonlinear phase step, half
/// linear step. Aborts when `H1` drifts by more than [`FLOW_TOL`].
pub fn flow_nls(p: &Potential, t: f64, steps: usize) -> Result<Potential> {
    if steps == 0 {
        return Err(Error::param("steps", "must be positive"));
    }
    if p.is_zero() || t == 0.0 {
        return Ok(p.clone());
    }
    let g = p.grid();
    let n = g.n();
    let dt = t / steps as f64;
    let k = wavenumbers(n, g.dx());
    let kmax = k.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if dt.abs() * p.max_abs().powi(2) > 0.1 {
        log::warn!("split step: dt |psi|^2 = {:.3e} is coarse", dt.abs() * p.max_abs().powi(2));
    }
    log::debug!("split step: dt = {dt:.3e}, dt kmax^2 = {:.3e}", dt.abs() * kmax * kmax);
    let half: Vec<C64> = k.iter().map(|k| (-I * k * k * (dt * 0.5)).exp()).collect();
    let h0 = hamiltonians(p)?;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;
    let mut u = p.values().to_vec();
    let linear = |u: &mut Vec<C64>| {
        fwd.process(u);
        for (z, m) in u.iter_mut().zip(&half) {
            *z *= m * scale;
        }
        inv.process(u);
    };
    for _ in 0..steps {
        linear(&mut u);
        for z in u.iter_mut() {
            *z *= (-I * (2.0 * z.norm_sqr() * dt)).exp();
        }
        linear(&mut u);
    }
    let out = p.with_values(u, p.label())?;
    let h1 = hamiltonians(&out)?;
    let drift = (h1.h1 - h0.h1).abs();
    if drift > FLOW_TOL {
        return Err(Error::Numerical(format!("H1 drifted by {drift:.3e} along the NLS flow")));
    }
    Ok(out)
}

/// Applies a flow with the given signs.
pub fn run_flow(p: &Potential, spec: &FlowSpec, signs: &FlowSigns) -> Result<Potential> {
    match spec.which {
        FlowKind::X1 => Ok(flow_x1(p, spec.t, signs)),
        FlowKind::X2 => flow_x2(p, spec.t, signs),
        FlowKind::Nls => flow_nls(p, spec.t, spec.steps),
    }
}

/// Richardson-refined centred derivative `d/dt F(flow(t))` at `t = 0`.
pub fn flow_derivative<T, F>(p: &Potential, kind: FlowKind, signs: &FlowSigns, eps: f64, f: F) -> Result<T>
where
    T: FdValue + Send,
    F: Fn(&Potential) -> Result<T> + Sync,
{
    let apply = |t: f64| -> Result<T> {
        let spec = FlowSpec {
            which: kind,
            t,
            steps: nls_steps_for(t).max(4),
        };
        f(&run_flow(p, &spec, signs)?)
    };
    let ts = [eps, -eps, eps * 0.5, -eps * 0.5];
    let vals: Vec<T> = ts.par_iter().map(|&t| apply(t)).collect::<Result<_>>()?;
    let d1 = vals[0].diff(&vals[1], 2.0 * eps);
    let d2 = vals[2].diff(&vals[3], eps);
    Ok(d2.richardson(&d1))
}

/// Values that can be differenced componentwise.
pub trait FdValue: Sized {
    /// `(self - other) / h`.
    fn diff(&self, other: &Self, h: f64) -> Self;
    /// `(4 fine - coarse) / 3`.
    fn richardson(&self, coarse: &Self) -> Self;
}

impl FdValue for f64 {
    fn diff(&self, other: &Self, h: f64) -> Self {
        (self - other) / h
    }
    fn richardson(&self, coarse: &Self) -> Self {
        (4.0 * self - coarse) / 3.0
    }
}

impl FdValue for C64 {
    fn diff(&self, other: &Self, h: f64) -> Self {
        (self - other) / h
    }
    fn richardson(&self, coarse: &Self) -> Self {
        (self * 4.0 - coarse) / 3.0
    }
}

impl<T: FdValue> FdValue for Vec<T> {
    fn diff(&self, other: &Self, h: f64) -> Self {
        self.iter().zip(other).map(|(a, b)| a.diff(b, h)).collect()
    }
    fn richardson(&self, coarse: &Self) -> Self {
        self.iter().zip(coarse).map(|(a, b)| a.richardson(b)).collect()
    }
}

/// Finite-difference `X1` derivatives of the Jost columns against the table
/// `X1 j_+^1 = i j_+^1`, `X1 j_+^2 = 0`, `X1 j_-^1 = 0`, `X1 j_-^2 = -i j_-^2`
/// (upper index = component; `j_+ = j_+^(2)`, `j_- = j_-^(1)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JostActionReport {
    pub x: f64,
    pub lambda: C64,
    /// `[j_+^1, j_+^2, j_-^1, j_-^2]` at `x`.
    pub values: [C64; 4],
    pub derivatives: [C64; 4],
    pub expected: [C64; 4],
    /// Max over components of `|derivative - expected|`.
    pub residual: f64,
}

pub const X1_MULTIPLIERS: [C64; 4] = [I, ZERO, ZERO, C64 { re: 0.0, im: -1.0 }];

fn upper_columns(p: &Potential, x: f64, lambda: C64) -> Result<Vec<C64>> {
    let jp = jost_column(p, lambda, JostColumn::PlusTwo)?.at(x)?;
    let jm = jost_column(p, lambda, JostColumn::MinusOne)?.at(x)?;
    Ok(vec![jp[0], jp[1], jm[0], jm[1]])
}

pub fn jost_action_x1(p: &Potential, x: f64, lambda: C64, signs: &FlowSigns) -> Result<JostActionReport> {
    let values = upper_columns(p, x, lambda)?;
    let d = flow_derivative(p, FlowKind::X1, signs, FD_EPS, |q| upper_columns(q, x, lambda))?;
    let mut out = JostActionReport {
        x,
        lambda,
        values: [ZERO; 4],
        derivatives: [ZERO; 4],
        expected: [ZERO; 4],
        residual: 0.0,
    };
    for k in 0..4 {
        out.values[k] = values[k];
        out.derivatives[k] = d[k];
        out.expected[k] = X1_MULTIPLIERS[k] * values[k];
        out.residual = out.residual.max((d[k] - out.expected[k]).norm());
    }
    Ok(out)
}

/// `V(x, lambda) j` for the Dirac system `j' = V j`.
fn dirac_rhs(p: &Potential, x: f64, lambda: C64, j: Vec2) -> Vec2 {
    let psi = p.at(x);
    let h = I * lambda * 0.5;
    [-h * j[0] + psi.conj() * j[1], psi * j[0] + h * j[1]]
}

/// `X2` acting on `j_+ = j_+^(2)` and on its Weyl function `X = j^2 / j^1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationActionReport {
    pub x: f64,
    pub lambda: C64,
    pub value: [C64; 2],
    pub derivative: [C64; 2],
    /// `j_+'` from the Dirac system.
    pub x_derivative: [C64; 2],
    /// `max |X2 j_+ - j_+'|`.
    pub lemma_residual: f64,
    /// `max |X2 j_+ - (j_+' - (i lambda / 2) sigma2 j_+)|`: the action up to
    /// the renormalization at `+infinity`.
    pub projective_residual: f64,
    /// `X`, or `1/X` when `inverted`. Both obey the same law since `X2` and
    /// `d/dx` are derivations; the smaller one is kept (`X = inf` at `psi = 0`).
    pub weyl: C64,
    pub weyl_derivative: C64,
    pub weyl_x_derivative: C64,
    pub inverted: bool,
    /// `|X2 X - X'|`.
    pub residual: f64,
}

pub fn weyl_action_x2(p: &Potential, x: f64, lambda: C64, signs: &FlowSigns) -> Result<TranslationActionReport> {
    let j = jost_column(p, lambda, JostColumn::PlusTwo)?.at(x)?;
    let (num, den) = if j[0].norm() >= j[1].norm() { (1, 0) } else { (0, 1) };
    let at = |q: &Potential| -> Result<Vec<C64>> {
        let j = jost_column(q, lambda, JostColumn::PlusTwo)?.at(x)?;
        Ok(vec![j[0], j[1], j[num] / j[den]])
    };
    let v = at(p)?;
    let d = flow_derivative(p, FlowKind::X2, signs, FD_EPS, at)?;
    let jx = dirac_rhs(p, x, lambda, j);
    let wx = (jx[num] * j[den] - jx[den] * j[num]) / (j[den] * j[den]);
    let shift = I * lambda * 0.5 * signs.sigma2;
    let mut lemma: f64 = 0.0;
    let mut proj: f64 = 0.0;
    for k in 0..2 {
        lemma = lemma.max((d[k] - jx[k]).norm());
        proj = proj.max((d[k] - (jx[k] - shift * j[k])).norm());
    }
    Ok(TranslationActionReport {
        x,
        lambda,
        value: j,
        derivative: [d[0], d[1]],
        x_derivative: jx,
        lemma_residual: lemma,
        projective_residual: proj,
        weyl: v[2],
        weyl_derivative: d[2],
        weyl_x_derivative: wx,
        inverted: num == 0,
        residual: (d[2] - wx * signs.sigma2).norm(),
    })
}

/// `|j_-^1|^2 - |j_-^2|^2 - 1` and `|j_+^1|^2 - |j_+^2|^2 + 1`, maximised over
/// the grid, at real `lambda`.
pub fn modulus_identities(p: &Potential, lambda: f64) -> Result<(f64, f64)> {
    let l = C64::new(lambda, 0.0);
    let (jp, jm) = rayon::join(
        || jost_column(p, l, JostColumn::PlusTwo),
        || jost_column(p, l, JostColumn::MinusOne),
    );
    let (jp, jm) = (jp?, jm?);
    let f = |r: &Vec2| r[0].norm_sqr() - r[1].norm_sqr();
    let zut = jm.reduced().iter().map(|r| (f(r) - 1.0).abs()).fold(0.0, f64::max);
    let mir = jp.reduced().iter().map(|r| (f(r) + 1.0).abs()).fold(0.0, f64::max);
    Ok((zut, mir))
}

/// Closed-form divisor velocities at real `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorVelocity {
    pub x: f64,
    pub lambda: f64,
    pub xi: f64,
    pub omega: f64,
    /// `sinh(omega) / (|a| e^{xi~})`.
    pub x1: f64,
    /// `sign(omega) e^{-xi~} sqrt(cos^2 xi - 1/|a|^2)`.
    pub x1_radical: f64,
    /// `(1/|j_-|^2 - 1/|j_+|^2) / 2`.
    pub x1_moduli: f64,
    /// `(-lambda + 2 Im psi(x)) X1 xi`.
    pub x2: f64,
    /// Largest pairwise gap between the three `X1` expressions.
    pub x1_spread: f64,
}

/// Relative gap `|u - v| / max(|u|, |v|, floor)`.
pub fn relative_gap(u: f64, v: f64, floor: f64) -> f64 {
    (u - v).abs() / u.abs().max(v.abs()).max(floor)
}

pub fn divisor_velocity(p: &Potential, x: f64, lambda: f64) -> Result<DivisorVelocity> {
    let cv = cover_functions(p, x, SpectralPoint::on_bank(C64::new(lambda, 0.0), Sheet::Plus, HalfPlane::Upper))?;
    let abs_a = cv.w.norm();
    let xi = cv.pi.arg();
    let xi_t = cv.pi.norm().ln();
    let omega = cv.upsilon.norm().ln();
    let x1 = omega.sinh() / (abs_a * xi_t.exp());
    let rad = (xi.cos().powi(2) - 1.0 / (abs_a * abs_a)).max(0.0).sqrt();
    let sgn = if omega > 0.0 {
        1.0
    } else if omega < 0.0 {
        -1.0
    } else {
        0.0
    };
    let x1_radical = sgn * (-xi_t).exp() * rad;
    let x1_moduli = 0.5 * (1.0 / cv.jf_dual.norm_sqr() - 1.0 / cv.jf.norm_sqr());
    let spread = [
        (x1 - x1_radical).abs(),
        (x1 - x1_moduli).abs(),
        (x1_radical - x1_moduli).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let x2 = (-lambda + 2.0 * p.at(x).im) * x1;
    Ok(DivisorVelocity {
        x,
        lambda,
        xi,
        omega,
        x1,
        x1_radical,
        x1_moduli,
        x2,
        x1_spread: spread,
    })
}

/// `xi(x, lambda + i0) = arg Pi`.
pub fn divisor_xi(p: &Potential, x: f64, lambda: f64) -> Result<f64> {
    let cv = cover_functions(p, x, SpectralPoint::on_bank(C64::new(lambda, 0.0), Sheet::Plus, HalfPlane::Upper))?;
    Ok(cv.pi.arg())
}

/// Closed-form velocities next to centred finite-difference flow derivatives of `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityCheck {
    pub velocity: DivisorVelocity,
    pub fd_x1: f64,
    pub fd_x2: f64,
    /// Relative gaps with floor `1e-8`.
    pub residual_x1: f64,
    pub residual_x2: f64,
}

pub const VELOCITY_FLOOR: f64 = 1e-8;

pub fn velocity_check(p: &Potential, x: f64, lambda: f64, signs: &FlowSigns) -> Result<VelocityCheck> {
    let velocity = divisor_velocity(p, x, lambda)?;
    let xi = |q: &Potential| divisor_xi(q, x, lambda);
    let (fd_x1, fd_x2) = rayon::join(
        || flow_derivative(p, FlowKind::X1, signs, FD_EPS, xi),
        || flow_derivative(p, FlowKind::X2, signs, FD_EPS, xi),
    );
    let (fd_x1, fd_x2) = (fd_x1?, fd_x2?);
    Ok(VelocityCheck {
        velocity,
        fd_x1,
        fd_x2,
        residual_x1: relative_gap(velocity.x1, fd_x1, VELOCITY_FLOOR),
        residual_x2: relative_gap(velocity.x2, fd_x2, VELOCITY_FLOOR),
    })
}

/// `xi` after `X1(eps) X2(eps)` and after `X2(eps) X1(eps)`.
pub fn commutation_gap(p: &Potential, x: f64, lambda: f64, eps: f64, signs: &FlowSigns) -> Result<f64> {
    let a = flow_x2(&flow_x1(p, eps, signs), eps, signs)?;
    let b = flow_x1(&flow_x2(p, eps, signs)?, eps, signs);
    Ok((divisor_xi(&a, x, lambda)? - divisor_xi(&b, x, lambda)?).abs())
}

/// Drift of scattering data and Hamiltonians along one flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub flow: FlowSpec,
    pub abs_a_drift: f64,
    pub abs_b_drift: f64,
    /// `max |a(t) - a(0)|`: `a` itself is invariant, not only its modulus.
    pub a_drift: f64,
    pub h_before: Hamiltonians,
    pub h_after: Hamiltonians,
}

impl DriftReport {
    pub fn hamiltonian_drift(&self) -> f64 {
        let (u, v) = (&self.h_before, &self.h_after);
        (u.h1 - v.h1).abs().max((u.h2 - v.h2).abs()).max((u.h3 - v.h3).abs())
    }
}

pub fn isospectrality_check(
    p: &Potential,
    flow: &FlowSpec,
    signs: &FlowSigns,
    lambda_grid: &[f64],
) -> Result<DriftReport> {
    let q = run_flow(p, flow, signs)?;
    let (s0, s1) = rayon::join(
        || scattering_coefficients(p, lambda_grid),
        || scattering_coefficients(&q, lambda_grid),
    );
    let (s0, s1) = (s0?, s1?);
    let mut out = DriftReport {
        flow: *flow,
        abs_a_drift: 0.0,
        abs_b_drift: 0.0,
        a_drift: 0.0,
        h_before: hamiltonians(p)?,
        h_after: hamiltonians(&q)?,
    };
    for i in 0..lambda_grid.len() {
        out.abs_a_drift = out.abs_a_drift.max((s0.a[i].norm() - s1.a[i].norm()).abs());
        out.abs_b_drift = out.abs_b_drift.max((s0.b[i].norm() - s1.b[i].norm()).abs());
        out.a_drift = out.a_drift.max((s0.a[i] - s1.a[i]).norm());
    }
    Ok(out)
}

/// Self-convergence of the split step: the defects `|psi_N - psi_2N|` and
/// `|psi_2N - psi_4N|` in the max norm, and their ratio (4 for a
/// second-order scheme).
pub fn split_step_convergence(p: &Potential, t: f64, steps: usize) -> Result<(f64, f64, f64)> {
    let runs: Vec<Potential> = [steps, 2 * steps, 4 * steps]
        .par_iter()
        .map(|&m| flow_nls(p, t, m))
        .collect::<Result<_>>()?;
    let gap = |u: &Potential, v: &Potential| {
        u.values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let d1 = gap(&runs[0], &runs[1]);
    let d2 = gap(&runs[1], &runs[2]);
    Ok((d1, d2, d1 / d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::potentials::{make_potential, Params, PotentialKind};

    fn sech() -> Potential {
        make_potential(PotentialKind::Sech, &Params::new(), Grid::new(-30.0, 30.0, 2048).unwrap()).unwrap()
    }

    #[test]
    fn zero_time_flows_are_identities() {
        let p = sech();
        let s = FlowSigns::default();
        assert_eq!(flow_x1(&p, 0.0, &s).values(), p.values());
        assert_eq!(flow_x2(&p, 0.0, &s).unwrap().values(), p.values());
        assert_eq!(flow_nls(&p, 0.0, 3).unwrap().values(), p.values());
    }

    #[test]
    fn translation_moves_the_peak() {
        let p = sech();
        let q = translate(&p, 1.5).unwrap();
        // psi(x + 1.5) peaks at x = -1.5
        let gap = p
            .grid()
            .nodes()
            .zip(q.values())
            .map(|(x, v)| (v - 0.5 / (x + 1.5).cosh()).norm())
            .fold(0.0, f64::max);
        assert!(gap < 1e-12, "{gap:e}");
    }

    #[test]
    fn flow_kind_parses() {
        assert_eq!("x2".parse::<FlowKind>().unwrap(), FlowKind::X2);
        assert!("x4".parse::<FlowKind>().is_err());
    }
}
