//! Variational derivatives of the Jost solutions, the canonical bracket
//! `{A, B} = 2i int (dA/dpsi_bar dB/dpsi - dA/dpsi dB/dpsi_bar)`, and the
//! bracket of `Pi` with itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{cover_functions, Sheet, SpectralPoint};
use crate::error::{Error, Result};
use crate::grid::{segment_integral, ComplexField, Grid, C64};
use crate::linalg::{sum, wronskian, Vec2};
use crate::potentials::{derivative, Potential};
use crate::scattering::{jost_column, jost_reduced_at, phase, JostColumn};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Below this `|mu - lambda|` the closed form switches to divided differences.
pub const COALESCENCE_TOL: f64 = 1e-3;
/// Bracket tolerance for exactly quadratic functionals.
pub const PB_TOL: f64 = 1e-6;
/// Relative tolerance for the brackets of `Pi`.
pub const PB_REL_TOL: f64 = 1e-4;
/// Tolerance of the finite-difference functional oracle.
pub const FD_TOL: f64 = 1e-5;
/// Increments tried by the oracle, largest first.
pub const FD_LADDER: [f64; 3] = [1e-3, 1e-4, 1e-5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wrt {
    Psi,
    PsiBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JostTarget {
    /// `j_+^(2)(x)`, kernels supported on `y > x`.
    PlusTwo,
    /// `j_-^(1)(x)`, kernels supported on `y < x`.
    MinusOne,
}

/// `delta j(x) / delta psi(y)` (or `psi_bar`) for both components of `j`,
/// zero on the excluded half-line.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalDerivative {
    pub target: JostTarget,
    pub wrt: Wrt,
    pub x: f64,
    pub lambda: C64,
    pub kernel: [ComplexField; 2],
}

/// Jost data at one `lambda` in the upper half-plane: `j_-^(1)`, `j_+^(2)`
/// on the grid and at `x`, and `a`.
#[derive(Debug, Clone)]
pub struct JostPair {
    pub x: f64,
    pub lambda: C64,
    pub minus: Vec<Vec2>,
    pub plus: Vec<Vec2>,
    pub minus_x: Vec2,
    pub plus_x: Vec2,
    pub a: C64,
    grid: Grid,
}

impl JostPair {
    pub fn new(p: &Potential, x: f64, lambda: C64) -> Result<Self> {
        if lambda.im <= 0.0 {
            return Err(Error::bad_lambda(lambda, "variational formulas need Im lambda > 0"));
        }
        let (jm, jp) = rayon::join(
            || jost_column(p, lambda, JostColumn::MinusOne),
            || jost_column(p, lambda, JostColumn::PlusTwo),
        );
        let (jm, jp) = (jm?, jp?);
        let minus_x = jm.at(x)?;
        let plus_x = jp.at(x)?;
        Ok(Self {
            x,
            lambda,
            minus: jm.values(),
            plus: jp.values(),
            minus_x,
            plus_x,
            a: wronskian(minus_x, plus_x),
            grid: *p.grid(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `1^T j_+(x)` and `1^T j_-(x)`.
    pub fn frak_plus(&self) -> C64 {
        sum(self.plus_x)
    }

    pub fn frak_minus(&self) -> C64 {
        sum(self.minus_x)
    }

    pub fn pi(&self) -> C64 {
        self.frak_plus() * self.frak_minus() / self.a
    }

    pub fn upsilon(&self) -> C64 {
        self.frak_plus() / self.frak_minus()
    }
}

/// Kernel formulas for `j_+^(2)(x)` at one `y`, given `j_-(y)`, `j_+(y)`.
fn plus_kernels(pr: &JostPair, m: Vec2, q: Vec2) -> (Vec2, Vec2) {
    let a = pr.a;
    let (jp, jm) = (pr.plus_x, pr.minus_x);
    let c1 = -m[0] * q[0] / a;
    let c2 = q[0] * q[0] / a;
    let d1 = q[1] * m[1] / a;
    let d2 = -q[1] * q[1] / a;
    (
        [c1 * jp[0] + c2 * jm[0], c1 * jp[1] + c2 * jm[1]],
        [d1 * jp[0] + d2 * jm[0], d1 * jp[1] + d2 * jm[1]],
    )
}

/// Kernel formulas for `j_-^(1)(x)` at one `y`.
fn minus_kernels(pr: &JostPair, m: Vec2, q: Vec2) -> (Vec2, Vec2) {
    let a = pr.a;
    let (jp, jm) = (pr.plus_x, pr.minus_x);
    let c1 = -m[0] * q[0] / a;
    let c2 = m[0] * m[0] / a;
    let d1 = q[1] * m[1] / a;
    let d2 = -m[1] * m[1] / a;
    (
        [c1 * jm[0] + c2 * jp[0], c1 * jm[1] + c2 * jp[1]],
        [d1 * jm[0] + d2 * jp[0], d1 * jm[1] + d2 * jp[1]],
    )
}

/// All nonzero kernels of the lemma on the variational derivatives of
/// `j_+^(2)(x)` and `j_-^(1)(x)`, for `Im lambda > 0`.
pub fn variational_jost(p: &Potential, x: f64, lambda: C64) -> Result<Vec<VariationalDerivative>> {
    let pr = JostPair::new(p, x, lambda)?;
    let g = *p.grid();
    let n = g.n();
    let mut buf = vec![[vec![ZERO; n], vec![ZERO; n]]; 4];
    for i in 0..n {
        let y = g.x(i);
        let (m, q) = (pr.minus[i], pr.plus[i]);
        if y > x {
            let (kp, kb) = plus_kernels(&pr, m, q);
            for c in 0..2 {
                buf[0][c][i] = kp[c];
                buf[1][c][i] = kb[c];
            }
        }
        if y < x {
            let (kp, kb) = minus_kernels(&pr, m, q);
            for c in 0..2 {
                buf[2][c][i] = kp[c];
                buf[3][c][i] = kb[c];
            }
        }
    }
    let meta = [
        (JostTarget::PlusTwo, Wrt::Psi),
        (JostTarget::PlusTwo, Wrt::PsiBar),
        (JostTarget::MinusOne, Wrt::Psi),
        (JostTarget::MinusOne, Wrt::PsiBar),
    ];
    buf.into_iter()
        .zip(meta)
        .map(|([k0, k1], (target, wrt))| {
            Ok(VariationalDerivative {
                target,
                wrt,
                x,
                lambda,
                kernel: [ComplexField::new(g, k0)?, ComplexField::new(g, k1)?],
            })
        })
        .collect()
}

/// Pointwise kernel of a functional, given by separate smooth formulas on
/// either side of an optional split point. Both formulas are sampled on the
/// whole grid so that each side integrates to high order up to the split.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalKernel {
    pub split: Option<f64>,
    /// `[below, above]` samples of `dF/dpsi`.
    pub psi: [Vec<C64>; 2],
    /// `[below, above]` samples of `dF/dpsi_bar`.
    pub psi_bar: [Vec<C64>; 2],
    pub grid: Grid,
}

impl FunctionalKernel {
    pub fn uniform(grid: Grid, psi: Vec<C64>, psi_bar: Vec<C64>) -> Self {
        Self {
            split: None,
            psi: [psi.clone(), psi],
            psi_bar: [psi_bar.clone(), psi_bar],
            grid,
        }
    }

    fn side(&self, mid: f64) -> usize {
        match self.split {
            Some(s) if mid > s => 1,
            _ => 0,
        }
    }

    /// Value at a grid node; nodes on the split use the upper formula.
    pub fn at_node(&self, i: usize, wrt: Wrt) -> C64 {
        let y = self.grid.x(i);
        let s = match self.split {
            Some(s) if y >= s => 1,
            _ => 0,
        };
        match wrt {
            Wrt::Psi => self.psi[s][i],
            Wrt::PsiBar => self.psi_bar[s][i],
        }
    }
}

/// `H1 = 1/2 int |psi|^2`: `dH1/dpsi = conj(psi)/2`, `dH1/dpsi_bar = psi/2`.
pub fn h1_kernel(p: &Potential) -> FunctionalKernel {
    let v = p.values();
    FunctionalKernel::uniform(
        *p.grid(),
        v.iter().map(|z| z.conj() * 0.5).collect(),
        v.iter().map(|z| z * 0.5).collect(),
    )
}

/// `H2 = 1/(2i) int conj(psi) psi'`: `dH2/dpsi_bar = psi' / (2i)`,
/// `dH2/dpsi = -conj(psi)' / (2i)`.
pub fn h2_kernel(p: &Potential) -> FunctionalKernel {
    let d = derivative(p.psi());
    let two_i = C64::new(0.0, 2.0);
    FunctionalKernel::uniform(
        *p.grid(),
        d.values().iter().map(|z| -z.conj() / two_i).collect(),
        d.values().iter().map(|z| z / two_i).collect(),
    )
}

/// Kernels of `a(lambda)`: `da/dpsi = -j_-^1 j_+^1`, `da/dpsi_bar = j_+^2 j_-^2`.
pub fn a_kernel(pr: &JostPair) -> FunctionalKernel {
    FunctionalKernel::uniform(
        pr.grid,
        pr.minus.iter().zip(&pr.plus).map(|(m, q)| -m[0] * q[0]).collect(),
        pr.minus.iter().zip(&pr.plus).map(|(m, q)| q[1] * m[1]).collect(),
    )
}

/// Kernels of `Pi(x, lambda) = j_+ j_- / a` (sums of components), from
/// `dPi = Pi (dj_+/j_+ + dj_-/j_- - da/a)`.
pub fn pi_kernel(pr: &JostPair) -> FunctionalKernel {
    let n = pr.minus.len();
    let (fp, fm) = (pr.frak_plus(), pr.frak_minus());
    let pi = pr.pi();
    let mut out = FunctionalKernel {
        split: Some(pr.x),
        psi: [vec![ZERO; n], vec![ZERO; n]],
        psi_bar: [vec![ZERO; n], vec![ZERO; n]],
        grid: pr.grid,
    };
    for i in 0..n {
        let (m, q) = (pr.minus[i], pr.plus[i]);
        let ka = (-m[0] * q[0], q[1] * m[1]);
        let (ap, ab) = plus_kernels(pr, m, q);
        let (bp, bb) = minus_kernels(pr, m, q);
        out.psi[1][i] = pi * (sum(ap) / fp - ka.0 / pr.a);
        out.psi_bar[1][i] = pi * (sum(ab) / fp - ka.1 / pr.a);
        out.psi[0][i] = pi * (sum(bp) / fm - ka.0 / pr.a);
        out.psi_bar[0][i] = pi * (sum(bb) / fm - ka.1 / pr.a);
    }
    out
}

/// `{F, G} = 2i int (dF/dpsi_bar dG/dpsi - dF/dpsi dG/dpsi_bar) dy`,
/// integrated piecewise between split points.
pub fn canonical_bracket(f: &FunctionalKernel, g: &FunctionalKernel) -> Result<C64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid;
    let mut cuts = vec![grid.x_min(), grid.x_max()];
    for s in [f.split, g.split].into_iter().flatten() {
        grid.check_contains(s)?;
        cuts.push(s);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let n = grid.n();
    let mut total = ZERO;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (sf, sg) = (f.side(mid), g.side(mid));
        let integrand: Vec<C64> = (0..n)
            .map(|i| f.psi_bar[sf][i] * g.psi[sg][i] - f.psi[sf][i] * g.psi_bar[sg][i])
            .collect();
        total += segment_integral(&grid, &integrand, lo, hi);
    }
    Ok(total * C64::new(0.0, 2.0))
}

/// The closed form of `{Pi(lambda), Pi(mu)}` at fixed `x`.
pub fn bracket_pi_closed_form(p: &Potential, x: f64, lambda: C64, mu: C64) -> Result<C64> {
    let (l, m) = rayon::join(|| JostPair::new(p, x, lambda), || JostPair::new(p, x, mu));
    let (l, m) = (l?, m?);
    let d = mu - lambda;
    if d.norm() >= COALESCENCE_TOL {
        return Ok(closed_form_from(&l, &m));
    }
    if d.norm() == 0.0 {
        return Err(Error::bad_lambda(mu, "bracket of Pi with itself at coincident points"));
    }
    // One-sided divided differences of the Wronskian factor along the
    // approach direction, interpolated to the actual separation.
    let dir = d / d.norm();
    let (d1, d2) = (dir * COALESCENCE_TOL, dir * (2.0 * COALESCENCE_TOL));
    let (m1, m2) = rayon::join(
        || JostPair::new(p, x, lambda + d1),
        || JostPair::new(p, x, lambda + d2),
    );
    let (m1, m2) = (m1?, m2?);
    let q1 = numerator(&l, &m1) / d1;
    let q2 = numerator(&l, &m2) / d2;
    let q = q1 + (d - d1) * (q2 - q1) / (d2 - d1);
    Ok(prefactor(&l, &m) * q)
}

fn prefactor(l: &JostPair, m: &JostPair) -> C64 {
    2.0 * l.pi() * m.pi() / (l.a * m.a)
}

fn numerator(l: &JostPair, m: &JostPair) -> C64 {
    let wm = wronskian(l.minus_x, m.minus_x);
    let wp = wronskian(l.plus_x, m.plus_x);
    l.upsilon() * m.upsilon() * wm * wm - wp * wp / (l.upsilon() * m.upsilon())
}

fn closed_form_from(l: &JostPair, m: &JostPair) -> C64 {
    prefactor(l, m) * numerator(l, m) / (m.lambda - l.lambda)
}

/// `{Pi(lambda), Pi(mu)}` by quadrature of the canonical bracket with the
/// assembled kernels.
pub fn bracket_pi_direct(p: &Potential, x: f64, lambda: C64, mu: C64) -> Result<C64> {
    let (l, m) = rayon::join(|| JostPair::new(p, x, lambda), || JostPair::new(p, x, mu));
    let (l, m) = (l?, m?);
    let dx = p.grid().dx();
    let fastest = lambda.re.abs().max(mu.re.abs());
    if fastest > 0.0 && 2.0 * std::f64::consts::PI / fastest < 8.0 * dx {
        log::warn!("bracket quadrature: kernels oscillate faster than 8 points per period");
    }
    canonical_bracket(&pi_kernel(&l), &pi_kernel(&m))
}

/// The smooth compact bump `exp(1 - 1 / (1 - u^2))`, `u = (y - y0) / (2 dx)`,
/// sampled on the grid.
pub fn bump(grid: &Grid, y0: f64) -> Vec<C64> {
    let r = 2.0 * grid.dx();
    grid.nodes()
        .map(|y| {
            let u = (y - y0) / r;
            if u.abs() < 1.0 {
                C64::new((1.0 - 1.0 / (1.0 - u * u)).exp(), 0.0)
            } else {
                ZERO
            }
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, six points.
const GL6: [(f64, f64); 6] = [
    (0.033_765_242_898_423_99, 0.085_662_246_189_585_17),
    (0.169_395_306_766_867_74, 0.180_380_786_524_069_3),
    (0.380_690_406_958_401_5, 0.233_956_967_286_345_5),
    (0.619_309_593_041_598_5, 0.233_956_967_286_345_5),
    (0.830_604_693_233_132_3, 0.180_380_786_524_069_3),
    (0.966_234_757_101_576, 0.085_662_246_189_585_17),
];

/// How a functional sees a perturbation sampled on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Through the sixth-order interpolant (every ODE-based functional).
    Interpolant,
    /// Through the composite Simpson weights (quadrature functionals).
    Simpson,
}

fn bump_cells(grid: &Grid, y0: f64) -> (usize, usize) {
    let c = grid.nearest(y0);
    (c.saturating_sub(6), (c + 6).min(grid.n() - 1))
}

/// `int phi~`, the mass of the interpolated bump.
pub fn bump_mass(grid: &Grid, y0: f64) -> C64 {
    pair_bump(grid, y0, Pairing::Interpolant, |_| Ok(C64::new(1.0, 0.0))).expect("infallible")
}

/// `int K phi~` (or its Simpson analogue) for a kernel given pointwise.
pub fn pair_bump(grid: &Grid, y0: f64, pairing: Pairing, k: impl Fn(f64) -> Result<C64>) -> Result<C64> {
    let phi = bump(grid, y0);
    let (lo, hi) = bump_cells(grid, y0);
    match pairing {
        Pairing::Interpolant => {
            let field = ComplexField::new(*grid, phi)?;
            let h = grid.dx();
            let mut acc = ZERO;
            for c in lo..hi {
                for (t, w) in GL6 {
                    let y = grid.x(c) + t * h;
                    acc += k(y)? * field.interpolate(y) * (w * h);
                }
            }
            Ok(acc)
        }
        Pairing::Simpson => {
            let w = simpson_weights(grid.n(), grid.dx());
            let mut acc = ZERO;
            for i in lo..=hi {
                if phi[i] != ZERO {
                    acc += k(grid.x(i))? * phi[i] * w[i];
                }
            }
            Ok(acc)
        }
    }
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if intervals % 2 == 1 {
        let j = n - 4;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[j + k] += c * 3.0 * h / 8.0;
        }
    }
    w
}

/// `(dF/dpsi, dF/dpsi_bar)` averaged over a bump at `y0`, with `psi` and
/// `psi_bar` treated as independent: `F` is perturbed along `phi` and
/// `i phi` and the two directional derivatives are disentangled. Both are
/// normalized by the interpolated bump mass.
pub fn fd_functional_derivative<T, F>(f: F, p: &Potential, y0: f64) -> Result<(Vec<C64>, Vec<C64>)>
where
    T: AsRef<[C64]> + Send,
    F: Fn(&Potential) -> Result<T> + Sync,
{
    let grid = *p.grid();
    grid.check_contains(y0)?;
    let mass = bump_mass(&grid, y0);
    let phi: Vec<C64> = bump(&grid, y0).iter().map(|v| v / mass).collect();
    let mut last_gap = f64::INFINITY;
    for &eps in &FD_LADDER {
        let dirs = [C64::new(1.0, 0.0), I];
        let steps = [eps, -eps, 0.5 * eps, -0.5 * eps];
        let jobs: Vec<(usize, f64)> = (0..2).flat_map(|d| steps.iter().map(move |&s| (d, s))).collect();
        let vals: Vec<Vec<C64>> = jobs
            .par_iter()
            .map(|&(d, s)| f(&p.perturbed(&phi, dirs[d] * s)).map(|v| v.as_ref().to_vec()))
            .collect::<Result<_>>()?;
        let m = vals[0].len();
        let mut dpsi = vec![ZERO; m];
        let mut dbar = vec![ZERO; m];
        let mut gap: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for k in 0..m {
            let mut dd = [ZERO; 2];
            for d in 0..2 {
                let v = &vals[4 * d..4 * d + 4];
                let coarse = (v[0][k] - v[1][k]) / (2.0 * eps);
                let fine = (v[2][k] - v[3][k]) / eps;
                dd[d] = (fine * 4.0 - coarse) / 3.0;
                gap = gap.max((fine - coarse).norm());
                scale = scale.max(fine.norm());
            }
            dpsi[k] = (dd[0] - I * dd[1]) * 0.5;
            dbar[k] = (dd[0] + I * dd[1]) * 0.5;
        }
        if gap <= FD_TOL * scale {
            return Ok((dpsi, dbar));
        }
        last_gap = gap / scale;
        log::debug!("functional derivative: eps = {eps:e} too nonlinear (relative gap {last_gap:.3e})");
    }
    Err(Error::Numerical(format!(
        "finite-difference functional derivative stayed nonlinear (relative gap {last_gap:.3e})"
    )))
}

/// Kernel comparison at one bump position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub target: JostTarget,
    pub x: f64,
    pub y0: f64,
    pub lambda: C64,
    /// `[dj^1/dpsi, dj^2/dpsi, dj^1/dpsi_bar, dj^2/dpsi_bar]` bump averages.
    pub kernel: [C64; 4],
    pub fd: [C64; 4],
    pub residual: f64,
}

/// Compares the lemma's kernels for `target` with the finite-difference
/// oracle at a bump centred on `y0`.
pub fn kernel_check(p: &Potential, target: JostTarget, x: f64, y0: f64, lambda: C64) -> Result<KernelCheck> {
    let col = match target {
        JostTarget::PlusTwo => JostColumn::PlusTwo,
        JostTarget::MinusOne => JostColumn::MinusOne,
    };
    let pr = JostPair::new(p, x, lambda)?;
    let grid = *p.grid();
    let (jm, jp) = rayon::join(
        || jost_column(p, lambda, JostColumn::MinusOne),
        || jost_column(p, lambda, JostColumn::PlusTwo),
    );
    let (jm, jp) = (jm?, jp?);
    let mass = bump_mass(&grid, y0);
    let mut kernel = [ZERO; 4];
    for (slot, kernel_slot) in kernel.iter_mut().enumerate() {
        let comp = slot % 2;
        let bar = slot >= 2;
        let v = pair_bump(&grid, y0, Pairing::Interpolant, |y| {
            let (m, q) = (jm.at(y)?, jp.at(y)?);
            let inside = match target {
                JostTarget::PlusTwo => y > x,
                JostTarget::MinusOne => y < x,
            };
            if !inside {
                return Ok(ZERO);
            }
            let (kp, kb) = match target {
                JostTarget::PlusTwo => plus_kernels(&pr, m, q),
                JostTarget::MinusOne => minus_kernels(&pr, m, q),
            };
            Ok(if bar { kb[comp] } else { kp[comp] })
        })?;
        *kernel_slot = v / mass;
    }
    let (dpsi, dbar) = fd_functional_derivative(
        |q| {
            let r = jost_reduced_at(q, lambda, col, x)?;
            let e = phase(lambda, col.phase_sign(), x);
            Ok([r[0] * e, r[1] * e])
        },
        p,
        y0,
    )?;
    let fd = [dpsi[0], dpsi[1], dbar[0], dbar[1]];
    let residual = kernel
        .iter()
        .zip(&fd)
        .map(|(k, f)| (k - f).norm())
        .fold(0.0, f64::max);
    Ok(KernelCheck {
        target,
        x,
        y0,
        lambda,
        kernel,
        fd,
        residual,
    })
}

/// `Pi(x, lambda)` on the plus sheet.
pub fn pi_value(p: &Potential, x: f64, lambda: C64) -> Result<C64> {
    Ok(cover_functions(p, x, SpectralPoint::new(lambda, Sheet::Plus))?.pi)
}

/// `{Pi(lambda), Pi(mu)}` with both kernels from the finite-difference
/// oracle, integrated by six-point Gauss-Legendre on panels of width `panel`
/// covering `[x - half_width, x + half_width]`, split at `x`.
///
/// The oracle is evaluated only at grid nodes, where the sampled bump is
/// symmetric. A cubic through four nodes gives the bump average at each
/// quadrature point and its second derivative, which removes the
/// `m2 K'' / 2` smoothing of the bump.
pub fn bracket_pi_fd(p: &Potential, x: f64, lambda: C64, mu: C64, panel: f64, half_width: f64) -> Result<C64> {
    let g = p.grid();
    let panels = (half_width / panel).ceil() as usize;
    let margin = 4.0 * g.dx();
    let mut quad = Vec::with_capacity(12 * panels);
    for k in 0..panels {
        for side in [-1.0, 1.0] {
            let start = x + side * k as f64 * panel;
            for (t, w) in GL6 {
                let y = start + side * t * panel;
                // four-node stencil kept clear of the jump at x (bump plus
                // interpolation stencil reach about 5 dx)
                let (i, _) = g.locate(y);
                let clear = 6.0 * g.dx();
                let first_above = g.nearest(x + clear) + 1;
                let last_below = g.nearest(x - clear).saturating_sub(1);
                let j0 = if side > 0.0 { i.saturating_sub(1).max(first_above) } else { i.saturating_sub(1).min(last_below.saturating_sub(3)) };
                if j0 == 0 || g.x(j0) - margin < g.x_min() || g.x(j0 + 3) + margin > g.x_max() {
                    continue;
                }
                let t = (y - g.x(j0 + 1)) / g.dx();
                quad.push((j0 + 1, t, w * panel));
            }
        }
    }
    let mut nodes: Vec<usize> = quad.iter().flat_map(|&(i, _, _)| i - 1..=i + 2).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let samples: Vec<[C64; 4]> = nodes
        .par_iter()
        .map(|&i| {
            let f = |q: &Potential| -> Result<[C64; 2]> { Ok([pi_value(q, x, lambda)?, pi_value(q, x, mu)?]) };
            let (dpsi, dbar) = fd_functional_derivative(f, p, g.x(i))?;
            Ok([dpsi[0], dbar[0], dpsi[1], dbar[1]])
        })
        .collect::<Result<_>>()?;
    let at = |i: usize| samples[nodes.binary_search(&i).expect("sampled node")];
    let m2 = bump_second_moment(g, nodes[nodes.len() / 2]);
    let h2 = g.dx() * g.dx();
    let mut acc = ZERO;
    for &(i, t, w) in &quad {
        // Lagrange cubic on nodes -1, 0, 1, 2 at offset t, and its second derivative
        let l = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        let d2 = [-(t - 1.0), 3.0 * t - 2.0, -(3.0 * t - 1.0), t];
        let s = [at(i - 1), at(i), at(i + 1), at(i + 2)];
        let mut k = [ZERO; 4];
        for (c, kc) in k.iter_mut().enumerate() {
            let v: C64 = (0..4).map(|j| s[j][c] * l[j]).sum();
            let v2: C64 = (0..4).map(|j| s[j][c] * d2[j]).sum::<C64>() / h2;
            *kc = v - v2 * (0.5 * m2);
        }
        acc += (k[1] * k[2] - k[0] * k[3]) * w;
    }
    Ok(acc * C64::new(0.0, 2.0))
}

/// Second moment of the interpolated bump centred on node `i`, per unit mass.
fn bump_second_moment(grid: &Grid, i: usize) -> f64 {
    let y0 = grid.x(i);
    let m = pair_bump(grid, y0, Pairing::Interpolant, |y| Ok(C64::new((y - y0) * (y - y0), 0.0))).expect("infallible");
    (m / bump_mass(grid, y0)).re
}

/// `{Pi(x, lambda), H1}` from the kernels: the `X1` derivative of `Pi`.
pub fn bracket_pi_h1(p: &Potential, x: f64, lambda: C64) -> Result<C64> {
    let pr = JostPair::new(p, x, lambda)?;
    canonical_bracket(&pi_kernel(&pr), &h1_kernel(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_weights_integrate_polynomials() {
        for n in [17, 18] {
            let g = Grid::new(0.0, 1.0, n).unwrap();
            let w = simpson_weights(n, g.dx());
            let s: f64 = g.nodes().zip(&w).map(|(x, w)| x.powi(3) * w).sum();
            assert!((s - 0.25).abs() < 1e-14, "{n}: {s}");
        }
    }

    #[test]
    fn gauss_legendre_weights_sum_to_one() {
        let s: f64 = GL6.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-15);
        let m5: f64 = GL6.iter().map(|(t, w)| w * t.powi(10)).sum();
        assert!((m5 - 1.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn bump_is_compact() {
        let g = Grid::new(-1.0, 1.0, 201).unwrap();
        let b = bump(&g, 0.0);
        assert_eq!(b.iter().filter(|v| v.re > 0.0).count(), 3);
        assert_eq!(b[100].re, 1.0);
    }
}
