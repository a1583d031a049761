//! The two-sheeted spectral cover, the lifted Jost function and the cover
//! functions W, P, Pi, Upsilon, their logarithms and the resolvent kernel.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{antiderivative_d, cumulative, fmt17, ComplexField, C64, DEFAULT_DECAY_TOL};
use crate::linalg::{sum, wronskian, Mat2, Vec2};
use crate::potentials::Potential;
use crate::scattering::{
    extrapolate_to_zero, jost_column, jost_reduced_at, phase, HalfPlane, JostColumn, JostSolution,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn flip(self) -> Self {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sheet::Plus => '+',
            Sheet::Minus => '-',
        }
    }
}

/// `Gamma_R` or `Gamma_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Right,
    Left,
}

/// A point `Q = (lambda, sheet)` of the cover. Real `lambda` carries a bank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    lambda: C64,
    sheet: Sheet,
    half: HalfPlane,
    component: Component,
}

impl SpectralPoint {
    /// Real `lambda` is placed on the upper bank.
    pub fn new(lambda: C64, sheet: Sheet) -> Self {
        Self::on_bank(lambda, sheet, HalfPlane::Upper)
    }

    /// `bank` is used only when `lambda` is real.
    pub fn on_bank(lambda: C64, sheet: Sheet, bank: HalfPlane) -> Self {
        let half = if lambda.im == 0.0 {
            bank
        } else {
            HalfPlane::of(lambda)
        };
        let component = match (sheet, half) {
            (Sheet::Plus, HalfPlane::Upper) | (Sheet::Minus, HalfPlane::Lower) => Component::Right,
            _ => Component::Left,
        };
        Self {
            lambda,
            sheet,
            half,
            component,
        }
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn sheet(&self) -> Sheet {
        self.sheet
    }

    pub fn half_plane(&self) -> HalfPlane {
        self.half
    }

    pub fn component(&self) -> Component {
        self.component
    }

    /// The Jost column that the lifted function uses at this point.
    pub fn column(&self) -> JostColumn {
        match (self.sheet, self.half) {
            (Sheet::Plus, HalfPlane::Upper) => JostColumn::PlusTwo,
            (Sheet::Plus, HalfPlane::Lower) => JostColumn::MinusTwo,
            (Sheet::Minus, HalfPlane::Upper) => JostColumn::MinusOne,
            (Sheet::Minus, HalfPlane::Lower) => JostColumn::PlusOne,
        }
    }
}

/// `epsilon_pm: (lambda, +-) -> (lambda, -+)`.
pub fn involution_pm(q: SpectralPoint) -> SpectralPoint {
    SpectralPoint::on_bank(q.lambda, q.sheet.flip(), q.half)
}

/// `epsilon_a: (lambda, +-) -> (conj lambda, -+)`.
pub fn involution_a(q: SpectralPoint) -> SpectralPoint {
    SpectralPoint::on_bank(q.lambda.conj(), q.sheet.flip(), q.half.flip())
}

/// The lifted Jost function `j(x, Q)` sampled on the grid.
pub fn lift_jost(p: &Potential, q: SpectralPoint) -> Result<JostSolution> {
    jost_column(p, q.lambda, q.column())
}

/// Weyl function `X = j_2 / j_1` over the grid; `None` where `|j_1|` is
/// negligible against `|j_2|`.
pub fn weyl_function(j: &JostSolution) -> Vec<Option<C64>> {
    j.reduced()
        .iter()
        .map(|r| weyl_ratio(*r))
        .collect()
}

/// Relative size of `j_1` below which the Weyl function is marked invalid.
pub const WEYL_GUARD: f64 = 1e-12;

fn weyl_ratio(r: Vec2) -> Option<C64> {
    if r[0].norm() <= WEYL_GUARD * r[1].norm() || r[0].norm() == 0.0 {
        None
    } else {
        Some(r[1] / r[0])
    }
}

/// `W`, `P`, `Pi`, `Upsilon` and the Weyl function at `(x, Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverValues {
    pub x: f64,
    pub q: SpectralPoint,
    pub pi: C64,
    pub upsilon: C64,
    pub w: C64,
    pub p: C64,
    pub weyl: Option<C64>,
    /// `Upsilon e^{-s i lambda x}` with `s = +1` on the plus sheet.
    pub upsilon_reduced: C64,
    /// `1^T j(x, Q)` and `1^T j(x, eps_pm Q)`.
    pub jf: C64,
    pub jf_dual: C64,
}

fn sheet_sign(q: &SpectralPoint) -> f64 {
    q.column().phase_sign()
}

/// Assembles the cover values from reduced Jost vectors at `x`.
pub(crate) fn cover_from_reduced(x: f64, q: SpectralPoint, rq: Vec2, re: Vec2) -> Result<CoverValues> {
    let s = sheet_sign(&q);
    let (sq, se) = (sum(rq), sum(re));
    if sq == ZERO || se == ZERO || !(sq.is_finite() && se.is_finite()) {
        return Err(Error::Numerical(format!(
            "1^T j vanished at x = {x}, lambda = {}",
            q.lambda
        )));
    }
    let w = wronskian(re, rq);
    let p = sq * se;
    let ur = sq / se;
    Ok(CoverValues {
        x,
        q,
        pi: p / w,
        upsilon: ur * phase(q.lambda, 2.0 * s, x),
        w,
        p,
        weyl: weyl_ratio(rq),
        upsilon_reduced: ur,
        jf: sq * phase(q.lambda, s, x),
        jf_dual: se * phase(q.lambda, -s, x),
    })
}

pub fn cover_functions(p: &Potential, x: f64, q: SpectralPoint) -> Result<CoverValues> {
    let e = involution_pm(q);
    let (rq, re) = rayon::join(
        || jost_reduced_at(p, q.lambda, q.column(), x),
        || jost_reduced_at(p, e.lambda, e.column(), x),
    );
    cover_from_reduced(x, q, rq?, re?)
}

/// Both lifted columns at one `Q`, swept over the grid, for evaluating the
/// cover functions at many `x`.
#[derive(Debug, Clone)]
pub struct CoverSweep {
    q: SpectralPoint,
    jq: JostSolution,
    je: JostSolution,
}

impl CoverSweep {
    pub fn new(p: &Potential, q: SpectralPoint) -> Result<Self> {
        let e = involution_pm(q);
        let (jq, je) = rayon::join(|| lift_jost(p, q), || lift_jost(p, e));
        Ok(Self { q, jq: jq?, je: je? })
    }

    pub fn point(&self) -> SpectralPoint {
        self.q
    }

    pub fn jost(&self) -> &JostSolution {
        &self.jq
    }

    pub fn dual(&self) -> &JostSolution {
        &self.je
    }

    pub fn at(&self, x: f64) -> Result<CoverValues> {
        cover_from_reduced(x, self.q, self.jq.reduced_at(x)?, self.je.reduced_at(x)?)
    }

    pub fn at_node(&self, i: usize) -> Result<CoverValues> {
        let x = self.jq.grid().x(i);
        cover_from_reduced(x, self.q, self.jq.reduced()[i], self.je.reduced()[i])
    }
}

/// Residuals of the involution table at one `(x, Q)`, each scaled by
/// `max(1, |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvolutionResiduals {
    pub x: f64,
    pub q: SpectralPoint,
    /// `W(e+- Q) = -W(Q)`, `W(e_a Q) = -conj W(Q)`.
    pub w: [f64; 2],
    /// `P(e+- Q) = P(Q)`, `P(e_a Q) = conj P(Q)`.
    pub p: [f64; 2],
    /// `Pi(e+- Q) = -Pi(Q)`, `Pi(e_a Q) = -conj Pi(Q)`, `Pi(conj l) = conj Pi(l)`.
    pub pi: [f64; 3],
    /// `Upsilon(e+- Q) Upsilon(Q) = 1`, `Upsilon(e_a Q) = conj Upsilon(Q)`,
    /// `Upsilon(conj l) conj Upsilon(l) = 1`.
    pub upsilon: [f64; 3],
    /// `X(e_a Q) conj X(Q) = 1` when both Weyl values are finite.
    pub weyl: Option<f64>,
}

impl InvolutionResiduals {
    pub fn max(&self) -> f64 {
        self.w
            .iter()
            .chain(&self.p)
            .chain(&self.pi)
            .chain(&self.upsilon)
            .chain(self.weyl.iter())
            .fold(0.0, |m, v| m.max(*v))
    }
}

fn scaled(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

pub fn involution_residuals(p: &Potential, x: f64, q: SpectralPoint) -> Result<InvolutionResiduals> {
    if q.lambda.im == 0.0 {
        return Err(Error::bad_lambda(q.lambda, "involution table needs Im lambda != 0"));
    }
    let pts = [q, involution_pm(q), involution_a(q), involution_pm(involution_a(q))];
    let v: Vec<CoverValues> = pts
        .par_iter()
        .map(|&pt| cover_functions(p, x, pt))
        .collect::<Result<_>>()?;
    // v[3] sits over conj(lambda) on the sheet of q
    let (c, e, a, bar) = (&v[0], &v[1], &v[2], &v[3]);
    let weyl = match (a.weyl, c.weyl) {
        (Some(wa), Some(wc)) => Some(scaled(wa * wc.conj(), ONE)),
        _ => None,
    };
    Ok(InvolutionResiduals {
        x,
        q,
        w: [scaled(e.w, -c.w), scaled(a.w, -c.w.conj())],
        p: [scaled(e.p, c.p), scaled(a.p, c.p.conj())],
        pi: [scaled(e.pi, -c.pi), scaled(a.pi, -c.pi.conj()), scaled(bar.pi, c.pi.conj())],
        upsilon: [
            scaled(e.upsilon * c.upsilon, ONE),
            scaled(a.upsilon, c.upsilon.conj()),
            scaled(bar.upsilon * c.upsilon.conj(), ONE),
        ],
        weyl,
    })
}

/// Extracted `1/lambda` coefficients of `Pi` and `Upsilon e^{-i lambda x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsCheck {
    pub x: f64,
    pub pi_coef: C64,
    pub pi_exact: C64,
    pub upsilon_coef: C64,
    pub upsilon_exact: C64,
    /// Same extraction along the conjugate ray; recorded, not asserted.
    pub lower_pi_coef: C64,
    pub lower_upsilon_coef: C64,
    pub extrapolation_spread: f64,
}

impl AsymptoticsCheck {
    pub fn max_error(&self) -> f64 {
        (self.pi_coef - self.pi_exact)
            .norm()
            .max((self.upsilon_coef - self.upsilon_exact).norm())
    }
}

pub fn pi_upsilon_asymptotics_check(p: &Potential, x: f64, ray: &[C64]) -> Result<AsymptoticsCheck> {
    if ray.len() < 2 {
        return Err(Error::param("ray", "needs at least two samples"));
    }
    for &l in ray {
        if l.im <= 0.0 {
            return Err(Error::bad_lambda(l, "ray must lie in the upper half-plane"));
        }
    }
    let extract = |lower: bool| -> Result<(C64, C64, f64)> {
        let vals: Vec<(C64, C64)> = ray
            .par_iter()
            .map(|&l0| {
                let l = if lower { l0.conj() } else { l0 };
                let cv = cover_functions(p, x, SpectralPoint::new(l, Sheet::Plus))?;
                Ok((l * (cv.pi - ONE), l * (cv.upsilon_reduced - ONE)))
            })
            .collect::<Result<_>>()?;
        let t: Vec<C64> = ray
            .iter()
            .map(|l| ONE / if lower { l.conj() } else { *l })
            .collect();
        let (a, sa) = extrapolate_to_zero(&t, &vals.iter().map(|v| v.0).collect::<Vec<_>>());
        let (b, sb) = extrapolate_to_zero(&t, &vals.iter().map(|v| v.1).collect::<Vec<_>>());
        Ok((a, b, sa.max(sb)))
    };
    let (pi_coef, upsilon_coef, spread) = extract(false)?;
    let (lower_pi_coef, lower_upsilon_coef, _) = extract(true)?;
    let psi = p.at(x);
    let dens = p.psi().map(|v| C64::new(v.norm_sqr(), 0.0));
    let dinv = antiderivative_d(&dens, DEFAULT_DECAY_TOL).interpolate(x);
    Ok(AsymptoticsCheck {
        x,
        pi_coef,
        pi_exact: I * psi - I * psi.conj(),
        upsilon_coef,
        upsilon_exact: -I * psi - I * psi.conj() - 2.0 * I * dinv,
        lower_pi_coef,
        lower_upsilon_coef,
        extrapolation_spread: spread,
    })
}

/// `Upsilon = e^{omega + i omega~}`, `Pi = e^{xi~ + i xi}` along a contour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBranches {
    pub x: f64,
    pub contour: Vec<C64>,
    pub bank: HalfPlane,
    pub omega: Vec<f64>,
    pub omega_tilde: Vec<f64>,
    pub xi: Vec<f64>,
    pub xi_tilde: Vec<f64>,
    /// `max |e^Xi - Pi|` and `max |e^Omega - Upsilon| / |Upsilon|` along the contour.
    pub roundtrip: f64,
}

impl LogBranches {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_log_branches_csv(std::slice::from_ref(self), w)
    }

    /// Index of the contour node equal to `lambda`, if any.
    pub fn find(&self, lambda: C64) -> Option<usize> {
        self.contour.iter().position(|&l| l == lambda)
    }
}

/// Several contours in one table, one row per node, tagged by bank.
pub fn write_log_branches_csv<W: Write>(all: &[LogBranches], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "bank", "re_lambda", "im_lambda", "omega", "omega_tilde", "xi", "xi_tilde"])?;
    for lb in all {
        let bank = match lb.bank {
            HalfPlane::Upper => "upper",
            HalfPlane::Lower => "lower",
        };
        for (k, l) in lb.contour.iter().enumerate() {
            wr.write_record([
                fmt17(lb.x),
                bank.to_string(),
                fmt17(l.re),
                fmt17(l.im),
                fmt17(lb.omega[k]),
                fmt17(lb.omega_tilde[k]),
                fmt17(lb.xi[k]),
                fmt17(lb.xi_tilde[k]),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Largest admissible branch jump between neighbouring contour nodes.
pub const MAX_BRANCH_JUMP: f64 = PI;

fn continue_log(prev: Option<(usize, f64)>, k: usize, z: C64) -> Result<C64> {
    let mut l = z.ln();
    if let Some((pk, pim)) = prev {
        l.im += 2.0 * PI * ((pim - l.im) / (2.0 * PI)).round();
        let jump = (l.im - pim).abs();
        if jump > MAX_BRANCH_JUMP {
            return Err(Error::Branch { from: pk, to: k, jump });
        }
    }
    Ok(l)
}

/// Polyline from `i R` (`-i R` for the lower bank) to `lambda_max`, then
/// along the real axis through every point of `real_grid` in decreasing
/// order. `R = max |lambda|`; `refine` extra nodes are put between
/// neighbouring real points and `arc_nodes` on the descent.
pub fn standard_contour(real_grid: &[f64], bank: HalfPlane, arc_nodes: usize, refine: usize) -> Vec<C64> {
    let mut real: Vec<f64> = real_grid.to_vec();
    real.sort_by(|a, b| b.total_cmp(a));
    real.dedup();
    let top = real[0];
    let r = real.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let anchor = C64::new(0.0, bank.sign() * r);
    let end = C64::new(top, 0.0);
    let mut out = Vec::new();
    for k in 0..arc_nodes {
        let t = k as f64 / arc_nodes as f64;
        out.push(anchor + (end - anchor) * t);
    }
    for (i, &l) in real.iter().enumerate() {
        out.push(C64::new(l, 0.0));
        if let Some(&next) = real.get(i + 1) {
            for k in 1..=refine {
                let t = k as f64 / (refine + 1) as f64;
                out.push(C64::new(l + (next - l) * t, 0.0));
            }
        }
    }
    out
}

/// Continuous logarithms of `Pi` and `Upsilon` on the plus sheet along a
/// contour seeded at its first node. Real nodes use `bank`.
pub fn log_branches(p: &Potential, x: f64, contour: &[C64], bank: HalfPlane) -> Result<LogBranches> {
    let vals: Vec<CoverValues> = contour
        .par_iter()
        .map(|&l| cover_functions(p, x, SpectralPoint::on_bank(l, Sheet::Plus, bank)))
        .collect::<Result<_>>()?;
    branches_from_values(x, contour, bank, &vals)
}

/// [`log_branches`] at many `x` with one pair of sweeps per contour node.
pub fn log_branches_multi(
    p: &Potential,
    xs: &[f64],
    contour: &[C64],
    bank: HalfPlane,
) -> Result<Vec<LogBranches>> {
    for &x in xs {
        p.grid().check_contains(x)?;
    }
    let per_node: Vec<Vec<CoverValues>> = contour
        .par_iter()
        .map(|&l| {
            let sw = CoverSweep::new(p, SpectralPoint::on_bank(l, Sheet::Plus, bank))?;
            xs.iter().map(|&x| sw.at(x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    xs.iter()
        .enumerate()
        .map(|(j, &x)| {
            let vals: Vec<CoverValues> = per_node.iter().map(|v| v[j]).collect();
            branches_from_values(x, contour, bank, &vals)
        })
        .collect()
}

fn branches_from_values(x: f64, contour: &[C64], bank: HalfPlane, vals: &[CoverValues]) -> Result<LogBranches> {
    let n = contour.len();
    let mut out = LogBranches {
        x,
        contour: contour.to_vec(),
        bank,
        omega: Vec::with_capacity(n),
        omega_tilde: Vec::with_capacity(n),
        xi: Vec::with_capacity(n),
        xi_tilde: Vec::with_capacity(n),
        roundtrip: 0.0,
    };
    let mut prev_xi: Option<(usize, f64)> = None;
    let mut prev_up: Option<(usize, f64)> = None;
    for (k, cv) in vals.iter().enumerate() {
        let xi = continue_log(prev_xi, k, cv.pi)?;
        let up = continue_log(prev_up, k, cv.upsilon_reduced)?;
        prev_xi = Some((k, xi.im));
        prev_up = Some((k, up.im));
        let omega = up + I * cv.q.lambda() * x;
        out.xi_tilde.push(xi.re);
        out.xi.push(xi.im);
        out.omega.push(omega.re);
        out.omega_tilde.push(omega.im);
        let e1 = (xi.exp() - cv.pi).norm();
        let e2 = (up.exp() - cv.upsilon_reduced).norm() / cv.upsilon_reduced.norm();
        out.roundtrip = out.roundtrip.max(e1).max(e2);
    }
    Ok(out)
}

/// `R(x, y, lambda)` for `Im lambda != 0`. At `y == x` the `y <= x` branch is used.
pub fn resolvent_kernel(p: &Potential, x: f64, y: f64, lambda: C64) -> Result<Mat2> {
    resolvent_kernel_sided(p, x, y, lambda, y <= x)
}

/// `below = true` selects the `y <= x` formula.
pub fn resolvent_kernel_sided(p: &Potential, x: f64, y: f64, lambda: C64, below: bool) -> Result<Mat2> {
    if lambda.im == 0.0 {
        return Err(Error::bad_lambda(lambda, "resolvent kernel needs Im lambda != 0"));
    }
    let q = SpectralPoint::new(lambda, Sheet::Plus);
    let e = involution_pm(q);
    let full = |pt: SpectralPoint, at: f64| -> Result<Vec2> {
        let r = jost_reduced_at(p, pt.lambda(), pt.column(), at)?;
        let ph = phase(pt.lambda(), pt.column().phase_sign(), at);
        Ok([r[0] * ph, r[1] * ph])
    };
    let (a, sign) = if lambda.im > 0.0 {
        (crate::scattering::a_coefficient(p, lambda)?.0, ONE)
    } else {
        (crate::scattering::a_coefficient(p, lambda)?.0, -ONE)
    };
    let (u, v) = match (lambda.im > 0.0, below) {
        (true, true) | (false, false) => (full(q, x)?, full(e, y)?),
        (true, false) | (false, true) => (full(e, x)?, full(q, y)?),
    };
    Ok(outer_i_sigma1(u, v).scale(sign / a))
}

/// `u v^T i sigma1`.
fn outer_i_sigma1(u: Vec2, v: Vec2) -> Mat2 {
    Mat2::new(u[0] * v[1], u[0] * v[0], u[1] * v[1], u[1] * v[0]).scale(I)
}

/// Sum of the four entries of a 2x2 matrix, `1^T R 1`.
pub fn entry_sum(m: &Mat2) -> C64 {
    m.0[0][0] + m.0[0][1] + m.0[1][0] + m.0[1][1]
}

/// `|1^T R(x, x - 0, lambda) 1 - s i Pi(x, lambda)|` with `s = sign Im lambda`.
pub fn resolvent_coincidence(p: &Potential, x: f64, lambda: C64) -> Result<f64> {
    let (r, cv) = rayon::join(
        || resolvent_kernel_sided(p, x, x, lambda, true),
        || cover_functions(p, x, SpectralPoint::new(lambda, Sheet::Plus)),
    );
    let s = lambda.im.signum();
    Ok((entry_sum(&r?) - I * cv?.pi * s).norm())
}

/// `f = R(lambda) e` on the grid, integrating the kernel against `e`
/// separately on `y <= x` and `y >= x`.
pub fn apply_resolvent(p: &Potential, lambda: C64, e: &[Vec2]) -> Result<Vec<Vec2>> {
    let g = *p.grid();
    if e.len() != g.n() {
        return Err(Error::GridMismatch);
    }
    if lambda.im == 0.0 {
        return Err(Error::bad_lambda(lambda, "resolvent needs Im lambda != 0"));
    }
    let sw = CoverSweep::new(p, SpectralPoint::new(lambda, Sheet::Plus))?;
    let jq = sw.jost().values();
    let je = sw.dual().values();
    let a = crate::scattering::a_coefficient(p, lambda)?.0;
    let (sign, left, right) = if lambda.im > 0.0 {
        (ONE, (&jq, &je), (&je, &jq))
    } else {
        (-ONE, (&je, &jq), (&jq, &je))
    };
    // f(x) = sign/a [ L0(x) int_{-inf}^x L1^T i s1 e + R0(x) int_x^inf R1^T i s1 e ]
    let dot = |v: &Vec2, w: &Vec2| I * (v[1] * w[0] + v[0] * w[1]);
    let li: Vec<C64> = left.1.iter().zip(e).map(|(v, w)| dot(v, w)).collect();
    let ri: Vec<C64> = right.1.iter().zip(e).map(|(v, w)| dot(v, w)).collect();
    let cl = cumulative(&g, &li);
    let cr = cumulative(&g, &ri);
    let total_r = cr[g.n() - 1];
    Ok((0..g.n())
        .map(|i| {
            let lo = cl[i];
            let hi = total_r - cr[i];
            let s = sign / a;
            [
                (left.0[i][0] * lo + right.0[i][0] * hi) * s,
                (left.0[i][1] * lo + right.0[i][1] * hi) * s,
            ]
        })
        .collect())
}

/// `(D - lambda/2) f` with `D = i sigma3 d/dx + [[0, -i conj psi], [i psi, 0]]`,
/// using fourth-order differences.
pub fn apply_dirac_minus(p: &Potential, lambda: C64, f: &[Vec2]) -> Vec<Vec2> {
    let g = p.grid();
    let comp = |c: usize| {
        crate::potentials::derivative(
            &ComplexField::new(*g, f.iter().map(|v| v[c]).collect()).expect("grid"),
        )
    };
    let (d0, d1) = (comp(0), comp(1));
    let psi = p.values();
    (0..g.n())
        .map(|i| {
            let (f0, f1) = (f[i][0], f[i][1]);
            [
                I * d0.values()[i] - I * psi[i].conj() * f1 - lambda * 0.5 * f0,
                -I * d1.values()[i] + I * psi[i] * f0 - lambda * 0.5 * f1,
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::potentials::{make_potential, Params, PotentialKind};

    #[test]
    fn involutions_act_on_coordinates() {
        let q = SpectralPoint::new(C64::new(2.0, 1.0), Sheet::Plus);
        let e = involution_a(q);
        assert_eq!(e.lambda(), C64::new(2.0, -1.0));
        assert_eq!(e.sheet(), Sheet::Minus);
        assert_eq!(involution_pm(involution_pm(q)), q);
        assert_eq!(q.component(), Component::Right);
        assert_eq!(e.component(), Component::Right);
        assert_eq!(involution_pm(q).component(), Component::Left);
    }

    #[test]
    fn free_cover_values() {
        let p = make_potential(PotentialKind::Zero, &Params::new(), Grid::default()).unwrap();
        let l = C64::new(0.8, 0.4);
        let cv = cover_functions(&p, 1.3, SpectralPoint::new(l, Sheet::Plus)).unwrap();
        assert!((cv.pi - ONE).norm() < 1e-15);
        assert!((cv.w - ONE).norm() < 1e-15);
        assert!((cv.upsilon - (I * l * 1.3).exp()).norm() < 1e-14);
        assert!(cv.weyl.is_none());
    }
}
