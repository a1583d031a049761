//! The scattering curve, the S-divisor, the identities linking `a`, `b` to
//! the logarithms of `Pi` and `Upsilon` on the real axis, the continuum Abel
//! map and the recovery of `b` from `Pi` and `Upsilon`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{cover_functions, CoverSweep, CoverValues, Sheet, SpectralPoint};
use crate::error::{Error, Result};
use crate::flows::translate;
use crate::grid::{fmt17, hilbert_transform, ComplexField, Grid, C64};
use crate::potentials::Potential;
use crate::scattering::{phase, scattering_coefficients, HalfPlane, ScatteringData, SC_TOL};

/// Width of the band around an oval endpoint where `sign omega` is reported as zero.
pub const BRANCH_TOL: f64 = 1e-7;
/// Below this `|b|` the Abel-map residuals are skipped.
pub const B_FLOOR: f64 = 1e-3;

/// Principal value of an angle in `(-pi, pi]`.
pub fn circle_residual(d: f64) -> f64 {
    let r = d - 2.0 * PI * (d / (2.0 * PI)).round();
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// `h(lambda) = arccos(1 / |a(lambda)|)`, the half-height of the real oval.
pub fn oval_half_height(abs_a: f64) -> Result<f64> {
    if !(abs_a >= 1.0 - SC_TOL) {
        return Err(Error::Numerical(format!("|a| = {abs_a} is below 1")));
    }
    Ok((1.0 / abs_a).min(1.0).acos())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCurve {
    pub lambda_grid: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn scattering_curve(sd: &ScatteringData) -> Result<ScatteringCurve> {
    let h = sd.a.iter().map(|a| oval_half_height(a.norm())).collect::<Result<_>>()?;
    Ok(ScatteringCurve {
        lambda_grid: sd.lambda_grid.clone(),
        h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSign {
    Plus,
    Minus,
    Zero,
}

impl OmegaSign {
    pub fn value(self) -> f64 {
        match self {
            OmegaSign::Plus => 1.0,
            OmegaSign::Minus => -1.0,
            OmegaSign::Zero => 0.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            OmegaSign::Plus => "+",
            OmegaSign::Minus => "-",
            OmegaSign::Zero => "0",
        }
    }
}

/// One point `(xi, sign omega)` of the S-divisor over a real `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub lambda: f64,
    pub xi: f64,
    pub sign_omega: OmegaSign,
}

/// The cover data at a real `(x, lambda)` on the upper bank, with `a`, `b`.
///
/// `xi = arg Pi` and `omega = log |Upsilon|` need no continuation on the
/// real axis (`|xi| <= h < pi / 2`); `omega_tilde` is `arg Upsilon` and is
/// only meaningful modulo `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealPoint {
    pub x: f64,
    pub lambda: f64,
    pub a: C64,
    pub b: C64,
    pub pi: C64,
    pub upsilon: C64,
    pub xi: f64,
    pub xi_tilde: f64,
    pub omega: f64,
    pub omega_tilde: f64,
    /// `1^T j_+^(2)(x)` and `1^T j_-^(1)(x)`.
    pub j_plus: C64,
    pub j_minus: C64,
}

impl RealPoint {
    fn new(cv: &CoverValues, lambda: f64, b: C64) -> Self {
        Self {
            x: cv.x,
            lambda,
            a: cv.w,
            b,
            pi: cv.pi,
            upsilon: cv.upsilon,
            xi: cv.pi.arg(),
            xi_tilde: cv.pi.norm().ln(),
            omega: cv.upsilon.norm().ln(),
            omega_tilde: cv.upsilon.arg(),
            j_plus: cv.jf,
            j_minus: cv.jf_dual,
        }
    }

    pub fn h(&self) -> Result<f64> {
        oval_half_height(self.a.norm())
    }

    pub fn divisor_point(&self) -> Result<DivisorPoint> {
        let h = self.h()?;
        let sign_omega = if (self.xi.abs() - h).abs() < BRANCH_TOL || self.omega == 0.0 {
            OmegaSign::Zero
        } else if self.omega > 0.0 {
            OmegaSign::Plus
        } else {
            OmegaSign::Minus
        };
        Ok(DivisorPoint {
            lambda: self.lambda,
            xi: self.xi,
            sign_omega,
        })
    }
}

/// Both upper-bank Jost columns at one real `lambda`, swept over the grid.
#[derive(Debug, Clone)]
pub struct RealSweep {
    lambda: f64,
    b: C64,
    sweep: CoverSweep,
}

impl RealSweep {
    pub fn new(p: &Potential, lambda: f64) -> Result<Self> {
        let l = C64::new(lambda, 0.0);
        let sweep = CoverSweep::new(p, SpectralPoint::on_bank(l, Sheet::Plus, HalfPlane::Upper))?;
        let g = p.grid();
        // the dual column is j_-^(1): b = e^{-i lambda x_max} v_2(x_max)
        let v_end = sweep.dual().reduced()[g.n() - 1];
        let b = v_end[1] * phase(l, -2.0, g.x_max());
        Ok(Self { lambda, b, sweep })
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn at(&self, x: f64) -> Result<RealPoint> {
        Ok(RealPoint::new(&self.sweep.at(x)?, self.lambda, self.b))
    }
}

pub fn real_point(p: &Potential, x: f64, lambda: f64) -> Result<RealPoint> {
    RealSweep::new(p, lambda)?.at(x)
}

pub fn divisor_point(p: &Potential, x: f64, lambda: f64) -> Result<DivisorPoint> {
    real_point(p, x, lambda)?.divisor_point()
}

/// The divisor over a real grid at fixed `x`, with the oval heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorSweep {
    pub x: f64,
    pub points: Vec<DivisorPoint>,
    pub h: Vec<f64>,
}

impl DivisorSweep {
    /// Columns `(lambda, xi, sign, h)`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["lambda", "xi", "sign", "h"])?;
        for (d, h) in self.points.iter().zip(&self.h) {
            wr.write_record([fmt17(d.lambda), fmt17(d.xi), d.sign_omega.symbol().to_string(), fmt17(*h)])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Largest `|xi| - h`, positive when a point leaves its oval.
    pub fn containment_excess(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.h)
            .map(|(d, h)| d.xi.abs() - h)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn divisor_sweep(p: &Potential, x: f64, lambda_grid: &[f64]) -> Result<DivisorSweep> {
    let pts: Vec<RealPoint> = lambda_grid
        .par_iter()
        .map(|&l| real_point(p, x, l))
        .collect::<Result<_>>()?;
    Ok(DivisorSweep {
        x,
        points: pts.iter().map(|r| r.divisor_point()).collect::<Result<_>>()?,
        h: pts.iter().map(|r| r.h()).collect::<Result<_>>()?,
    })
}

/// Residuals of the real-axis identities at one `(x, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub x: f64,
    pub lambda: f64,
    /// `| |a| e^{-i xi} + b e^{i omega~} - e^{-omega} |`.
    pub first: f64,
    /// `| |a| e^{-i xi} - e^{omega} - conj(b) e^{-i omega~} |`.
    pub second: f64,
    /// `| |a| cos xi - cosh omega |`.
    pub mce: f64,
    /// Circle residual of `arg b = -omega~ + phi`, `phi` the arcsine branch.
    pub vam: Option<f64>,
    /// Circle residual of `arg b = -omega~ + sign(sin xi) arccos(-sinh omega / |b|)`.
    pub third: Option<f64>,
    /// Why `vam` / `third` were skipped.
    pub skipped: Option<String>,
    pub abs_b: f64,
}

/// The angle `phi = arg b + omega~` on the oval: `arcsin(|a| sin xi / |b|)`
/// while `omega <= 0`, `pi - arcsin(..)` while `omega > 0`. `None` when the
/// arcsine argument leaves `[-1, 1]` by more than rounding.
pub fn vam_angle(abs_a: f64, abs_b: f64, xi: f64, omega: f64) -> Option<f64> {
    let s = abs_a * xi.sin() / abs_b;
    if !s.is_finite() || s.abs() > 1.0 + 1e-12 {
        return None;
    }
    let asn = s.clamp(-1.0, 1.0).asin();
    Some(if omega <= 0.0 { asn } else { PI - asn })
}

fn third_angle(abs_b: f64, xi: f64, omega: f64) -> Option<f64> {
    let c = -omega.sinh() / abs_b;
    if !c.is_finite() || c.abs() > 1.0 + 1e-12 {
        return None;
    }
    let sign = if xi.sin() < 0.0 { -1.0 } else { 1.0 };
    Some(sign * c.clamp(-1.0, 1.0).acos())
}

pub fn identity_residuals(r: &RealPoint) -> IdentityResiduals {
    let i = C64::new(0.0, 1.0);
    let abs_a = r.a.norm();
    let abs_b = r.b.norm();
    let lhs = (-i * r.xi).exp() * abs_a;
    let eiw = (i * r.omega_tilde).exp();
    let first = (lhs + r.b * eiw - (-r.omega).exp()).norm();
    let second = (lhs - r.omega.exp() - r.b.conj() * eiw.conj()).norm();
    let mce = (abs_a * r.xi.cos() - r.omega.cosh()).abs();
    let mut out = IdentityResiduals {
        x: r.x,
        lambda: r.lambda,
        first,
        second,
        mce,
        vam: None,
        third: None,
        skipped: None,
        abs_b,
    };
    if abs_b < B_FLOOR {
        out.skipped = Some(format!("|b| = {abs_b:.3e} below b_floor"));
        return out;
    }
    let arg_b = r.b.arg();
    match vam_angle(abs_a, abs_b, r.xi, r.omega) {
        Some(phi) => out.vam = Some(circle_residual(arg_b - (-r.omega_tilde + phi)).abs()),
        None => out.skipped = Some("arcsine argument outside [-1, 1]".into()),
    }
    match third_angle(abs_b, r.xi, r.omega) {
        Some(phi) => out.third = Some(circle_residual(arg_b - (-r.omega_tilde + phi)).abs()),
        None => out.skipped = Some("arccosine argument outside [-1, 1]".into()),
    }
    out
}

pub fn identity_suite(p: &Potential, x: f64, lambda: f64) -> Result<IdentityResiduals> {
    Ok(identity_residuals(&real_point(p, x, lambda)?))
}

/// Identity residuals over an `xs` x `lambdas` sweep, one grid sweep per `lambda`.
pub fn identity_sweep(p: &Potential, xs: &[f64], lambdas: &[f64]) -> Result<Vec<IdentityResiduals>> {
    let per: Vec<Vec<IdentityResiduals>> = lambdas
        .par_iter()
        .map(|&l| {
            let sw = RealSweep::new(p, l)?;
            xs.iter().map(|&x| Ok(identity_residuals(&sw.at(x)?))).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// `| |a| cos xi - cosh omega |` with `xi`, `omega` from the lower bank.
pub fn mce_lower_bank(p: &Potential, x: f64, lambda: f64) -> Result<f64> {
    let l = C64::new(lambda, 0.0);
    let cv = cover_functions(p, x, SpectralPoint::on_bank(l, Sheet::Plus, HalfPlane::Lower))?;
    let xi = cv.pi.arg();
    let omega = cv.upsilon.norm().ln();
    Ok((cv.w.norm() * xi.cos() - omega.cosh()).abs())
}

/// `b` from `|j|^2 = -(b/a) j^2 + Pi` with `j^2 / a = Pi Upsilon` and
/// `|j|^2 = |a| |Pi Upsilon|`.
pub fn recover_b(pi: C64, jsq_over_a: C64, abs_a: f64) -> C64 {
    (pi - jsq_over_a.norm() * abs_a) / jsq_over_a
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredB {
    pub lambda: f64,
    pub xs: Vec<f64>,
    pub recovered: Vec<C64>,
    /// `b` from the scattering rule.
    pub b: C64,
    /// `max |recovered - b|`.
    pub error: f64,
    /// Largest gap between recovered values at different `x`.
    pub x_spread: f64,
    /// `x_spread > SC_TOL`.
    pub x_dependent: bool,
}

pub fn recover_b_at(p: &Potential, xs: &[f64], lambda: f64) -> Result<RecoveredB> {
    let sw = RealSweep::new(p, lambda)?;
    let mut recovered = Vec::with_capacity(xs.len());
    for &x in xs {
        let r = sw.at(x)?;
        recovered.push(recover_b(r.pi, r.pi * r.upsilon, r.a.norm()));
    }
    let b = sw.b();
    let error = recovered.iter().map(|v| (v - b).norm()).fold(0.0, f64::max);
    let mut spread: f64 = 0.0;
    for u in &recovered {
        for v in &recovered {
            spread = spread.max((u - v).norm());
        }
    }
    if spread > SC_TOL {
        log::warn!("recovered b varies by {spread:.3e} over x at lambda = {lambda}");
    }
    Ok(RecoveredB {
        lambda,
        xs: xs.to_vec(),
        recovered,
        b,
        error,
        x_spread: spread,
        x_dependent: spread > SC_TOL,
    })
}

/// The continuum Abel map in geometric form at every `lambda` of a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricAbel {
    pub x: f64,
    pub x0: f64,
    pub lambda: Vec<f64>,
    /// `sign(omega) arccosh(|a| cos xi)` minus its value at `x0`.
    pub first_integral: Vec<f64>,
    /// `omega - omega_0`, computed directly.
    pub omega_diff: Vec<f64>,
    /// `-(phi - phi_0)`, the integral of `d sin xi / sqrt(cos^2 xi - 1/|a|^2)`.
    pub second_integral: Vec<Option<f64>>,
    /// `-H[first_integral] + second_integral`.
    pub abel: Vec<Option<f64>>,
    /// `arg b - arg b~` with `b~` from the potential translated by `x - x0`.
    pub target: Vec<f64>,
    pub abs_b: Vec<f64>,
    /// Circle residual of `abel - target`.
    pub residual: Vec<Option<f64>>,
    /// Circle residual of `abel` against the direct Abel-map difference
    /// `-[(phi - omega~) - (phi_0 - omega~_0)] - lambda (x - x0)`.
    pub vam_consistency: Vec<Option<f64>>,
}

impl GeometricAbel {
    fn max_over(&self, v: &[Option<f64>], b_min: f64) -> f64 {
        v.iter()
            .zip(&self.abs_b)
            .filter(|(_, b)| **b > b_min)
            .filter_map(|(r, _)| *r)
            .fold(0.0, f64::max)
    }

    /// Largest residual where `|b| > b_min`.
    pub fn max_residual(&self, b_min: f64) -> f64 {
        self.max_over(&self.residual, b_min)
    }

    pub fn max_vam_consistency(&self, b_min: f64) -> f64 {
        self.max_over(&self.vam_consistency, b_min)
    }

    /// `max |first_integral - omega_diff|` where `|b| > b_min`. Elsewhere the
    /// ovals are thin and `arccosh` near 1 amplifies rounding in `|a| cos xi`.
    pub fn first_integral_error(&self, b_min: f64) -> f64 {
        self.first_integral
            .iter()
            .zip(&self.omega_diff)
            .zip(&self.abs_b)
            .filter(|(_, b)| **b > b_min)
            .map(|((a, b), _)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// One row per `lambda`; skipped values are empty cells.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["lambda", "abs_b", "first_integral", "omega_diff", "abel", "target", "residual"])?;
        for i in 0..self.lambda.len() {
            wr.write_record([
                fmt17(self.lambda[i]),
                fmt17(self.abs_b[i]),
                fmt17(self.first_integral[i]),
                fmt17(self.omega_diff[i]),
                opt(self.abel[i]),
                fmt17(self.target[i]),
                opt(self.residual[i]),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Number of `lambda` where the residual was skipped.
    pub fn skipped(&self) -> usize {
        self.residual.iter().filter(|r| r.is_none()).count()
    }
}

/// Uniform grid spanning the given `lambda` samples.
fn lambda_axis(lambda_grid: &[f64]) -> Result<Grid> {
    let n = lambda_grid.len();
    if n < 16 {
        return Err(Error::param("lambda_grid", "need at least 16 points"));
    }
    let g = Grid::new(lambda_grid[0], lambda_grid[n - 1], n)?;
    let tol = 1e-9 * g.dx();
    if lambda_grid.iter().enumerate().any(|(i, l)| (l - g.x(i)).abs() > tol) {
        return Err(Error::param("lambda_grid", "must be uniform and increasing"));
    }
    Ok(g)
}

/// Hilbert transform on `[-L, L]` of a real function that decays like
/// `alpha / t^2 + beta / t^3`. The tail model `alpha / (1 + t^2) +
/// beta t / (1 + t^2)^2` is fitted at the two ends, subtracted, and its exact
/// transform added back.
pub fn hilbert_with_tail(axis: &Grid, f: &[f64]) -> Result<Vec<f64>> {
    let n = f.len();
    let (tl, tr) = (axis.x(0), axis.x(n - 1));
    let e = |t: f64| 1.0 / (1.0 + t * t);
    let o = |t: f64| t / (1.0 + t * t).powi(2);
    // [e(tl) o(tl); e(tr) o(tr)] [alpha; beta] = [f0; fn]
    let det = e(tl) * o(tr) - o(tl) * e(tr);
    let (alpha, beta) = if det.abs() < 1e-300 {
        (0.0, 0.0)
    } else {
        (
            (f[0] * o(tr) - o(tl) * f[n - 1]) / det,
            (e(tl) * f[n - 1] - f[0] * e(tr)) / det,
        )
    };
    let rest: Vec<C64> = (0..n)
        .map(|i| {
            let t = axis.x(i);
            let mut v = f[i] - alpha * e(t) - beta * o(t);
            if i == 0 || i == n - 1 {
                v = 0.0;
            }
            C64::new(v, 0.0)
        })
        .collect();
    let hr = hilbert_transform(&ComplexField::new(*axis, rest)?, f64::INFINITY)?;
    Ok((0..n)
        .map(|i| {
            let t = axis.x(i);
            let he = -t / (1.0 + t * t);
            let ho = (1.0 - t * t) / (2.0 * (1.0 + t * t).powi(2));
            hr.values()[i].re + alpha * he + beta * ho
        })
        .collect())
}

/// Geometric form of the continuum Abel map between the divisors of `p` at
/// `x0` and at `x`. `lambda_grid` must be uniform and wide enough for
/// `omega` to have reached its algebraic tail.
pub fn geometric_abel(p: &Potential, x: f64, x0: f64, lambda_grid: &[f64]) -> Result<GeometricAbel> {
    let axis = lambda_axis(lambda_grid)?;
    p.grid().check_contains(x)?;
    p.grid().check_contains(x0)?;
    let shifted = translate(p, x - x0)?;
    let data: Vec<(RealPoint, RealPoint)> = lambda_grid
        .par_iter()
        .map(|&l| {
            let sw = RealSweep::new(p, l)?;
            Ok((sw.at(x)?, sw.at(x0)?))
        })
        .collect::<Result<_>>()?;
    // b of the translated potential, only where the residual is evaluated
    let keep: Vec<usize> = (0..data.len()).filter(|&k| data[k].0.b.norm() >= B_FLOOR).collect();
    let kept: Vec<f64> = keep.iter().map(|&k| lambda_grid[k]).collect();
    let mut b_shift = vec![C64::new(0.0, 0.0); data.len()];
    for (k, b) in keep.iter().zip(scattering_coefficients(&shifted, &kept)?.b) {
        b_shift[*k] = b;
    }
    let n = lambda_grid.len();
    let arc = |r: &RealPoint| {
        let c = (r.a.norm() * r.xi.cos()).max(1.0);
        r.omega.signum() * c.acosh()
    };
    let mut out = GeometricAbel {
        x,
        x0,
        lambda: lambda_grid.to_vec(),
        first_integral: Vec::with_capacity(n),
        omega_diff: Vec::with_capacity(n),
        second_integral: Vec::with_capacity(n),
        abel: Vec::with_capacity(n),
        target: Vec::with_capacity(n),
        abs_b: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
        vam_consistency: Vec::with_capacity(n),
    };
    for (k, (r, r0)) in data.iter().enumerate() {
        out.first_integral.push(arc(r) - arc(r0));
        out.omega_diff.push(r.omega - r0.omega);
        let abs_b = r.b.norm();
        out.abs_b.push(abs_b);
        out.target.push(if abs_b >= B_FLOOR {
            circle_residual(r.b.arg() - b_shift[k].arg())
        } else {
            0.0
        });
        let phis = if abs_b < B_FLOOR {
            None
        } else {
            vam_angle(r.a.norm(), abs_b, r.xi, r.omega).zip(vam_angle(r0.a.norm(), abs_b, r0.xi, r0.omega))
        };
        out.second_integral.push(phis.map(|(phi, phi0)| -(phi - phi0)));
    }
    let h = hilbert_with_tail(&axis, &out.first_integral)?;
    for (k, (r, r0)) in data.iter().enumerate() {
        let second = out.second_integral[k];
        let abel = second.map(|s| -h[k] + s);
        out.abel.push(abel);
        out.residual.push(abel.map(|g| circle_residual(g - out.target[k]).abs()));
        let direct = second.map(|s| s + (r.omega_tilde - r0.omega_tilde) - r.lambda * (x - x0));
        out.vam_consistency
            .push(abel.zip(direct).map(|(g, d)| circle_residual(g - d).abs()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_residual_is_principal() {
        assert!((circle_residual(2.0 * PI + 0.1) - 0.1).abs() < 1e-15);
        assert_eq!(circle_residual(PI), PI);
        assert_eq!(circle_residual(-PI), PI);
        assert!((circle_residual(-0.3 - 4.0 * PI) + 0.3).abs() < 1e-14);
    }

    #[test]
    fn oval_height_rejects_small_a() {
        assert_eq!(oval_half_height(1.0).unwrap(), 0.0);
        assert!(oval_half_height(0.9).is_err());
        assert!((oval_half_height(2.0).unwrap() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn recover_b_free_case() {
        // Pi = 1, Upsilon = e^{i lambda x}, |a| = 1
        let up = C64::new(0.0, 0.7).exp();
        assert_eq!(recover_b(C64::new(1.0, 0.0), up, 1.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn tail_transform_is_exact_on_the_model() {
        let axis = Grid::new(-40.0, 40.0, 1601).unwrap();
        let f: Vec<f64> = axis.nodes().map(|t| 0.3 / (1.0 + t * t) - 0.7 * t / (1.0 + t * t).powi(2)).collect();
        let h = hilbert_with_tail(&axis, &f).unwrap();
        for (i, t) in axis.nodes().enumerate() {
            let exact = -0.3 * t / (1.0 + t * t) - 0.7 * (1.0 - t * t) / (2.0 * (1.0 + t * t).powi(2));
            assert!((h[i] - exact).abs() < 1e-12, "{t}: {} vs {exact}", h[i]);
        }
    }
}
