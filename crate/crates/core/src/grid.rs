//! Uniform real-line grids, complex fields sampled on them, and the
//! quadrature / antiderivative / Hilbert-transform primitives that every
//! other module is built on.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const DEFAULT_X_MIN: f64 = -30.0;
pub const DEFAULT_X_MAX: f64 = 30.0;
pub const DEFAULT_N: usize = 6144;
pub const DEFAULT_DECAY_TOL: f64 = 1e-10;
pub const MIN_NODES: usize = 16;

/// Uniform grid on `[x_min, x_max]` with `n` nodes, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes, got {n}"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    pub fn check_contains(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfGrid {
                x,
                x_min: self.x_min,
                x_max: self.x_max,
            })
        }
    }

    /// Cell index `i` and fractional offset `u in [0, 1]` with `x = x_i + u dx`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.x_min) / self.dx();
        let i = (s.floor().max(0.0) as usize).min(self.n - 2);
        (i, s - i as f64)
    }

    pub fn nearest(&self, x: f64) -> usize {
        let s = ((x - self.x_min) / self.dx()).round();
        (s.max(0.0) as usize).min(self.n - 1)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            x_min: DEFAULT_X_MIN,
            x_max: DEFAULT_X_MAX,
            n: DEFAULT_N,
        }
    }
}

/// Complex samples, one per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Arc<[C64]>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            values: values.into(),
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.n()].into(),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect::<Vec<_>>().into(),
        }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect::<Vec<_>>().into(),
        }
    }

    pub fn boundary_magnitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.values.len() - 1].norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Sixth-order Lagrange interpolation at an arbitrary point of the grid.
    pub fn interpolate(&self, x: f64) -> C64 {
        interpolate(&self.grid, &self.values, x)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "re", "im"])?;
        for (x, v) in self.grid.nodes().zip(self.values.iter()) {
            wtr.write_record([fmt17(x), fmt17(v.re), fmt17(v.im)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads `x, re, im` rows. The nodes must form a uniform grid.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Config(format!("missing column {k}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad number in column {k}: {e}")))
            };
            xs.push(num(0)?);
            vals.push(C64::new(num(1)?, num(2)?));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGrid("field file has fewer than 2 rows".into()));
        }
        let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
        let dx = grid.dx();
        for (i, &x) in xs.iter().enumerate() {
            if (x - grid.x(i)).abs() > 1e-9 * dx.max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "node {i} at {x} is not on a uniform grid"
                )));
            }
        }
        ComplexField::new(grid, vals)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": { "x_min": self.grid.x_min, "x_max": self.grid.x_max, "n": self.grid.n },
            "re": self.values.iter().map(|v| v.re).collect::<Vec<_>>(),
            "im": self.values.iter().map(|v| v.im).collect::<Vec<_>>(),
        })
    }
}

/// Float formatting used by every exporter: 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub(crate) fn interpolate(grid: &Grid, values: &[C64], x: f64) -> C64 {
    let n = values.len();
    let (i, u) = grid.locate(x);
    if u == 0.0 {
        return values[i];
    }
    let s = i.saturating_sub(2).min(n - 6);
    let t = (i - s) as f64 + u;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..6 {
        let mut w = 1.0;
        for m in 0..6 {
            if m != k {
                w *= (t - m as f64) / (k as f64 - m as f64);
            }
        }
        acc += values[s + k] * w;
    }
    acc
}

/// Composite Simpson rule over the whole grid (3/8 rule on the last three
/// intervals when the interval count is odd).
pub fn quadrature(f: &ComplexField) -> Result<C64> {
    simpson(f.grid(), f.values())
}

pub(crate) fn simpson(grid: &Grid, v: &[C64]) -> Result<C64> {
    let n = v.len();
    if n < 3 {
        return Err(Error::InvalidGrid("quadrature needs at least 3 nodes".into()));
    }
    if n != grid.n() {
        return Err(Error::GridMismatch);
    }
    let h = grid.dx();
    let intervals = n - 1;
    let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
    let mut acc = C64::new(0.0, 0.0);
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += (v[i] + v[i + 1] * 4.0 + v[i + 2]) * (h / 3.0);
        i += 2;
    }
    if intervals % 2 == 1 {
        let j = n - 4;
        acc += (v[j] + v[j + 1] * 3.0 + v[j + 2] * 3.0 + v[j + 3]) * (3.0 * h / 8.0);
    }
    Ok(acc)
}

/// Antiderivatives of the cubic Lagrange basis on nodes u = 0, 1, 2, 3.
fn cubic_basis_anti(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    [
        -(u4 / 4.0 - 2.0 * u3 + 5.5 * u2 - 6.0 * u) / 6.0,
        (u4 / 4.0 - 5.0 * u3 / 3.0 + 3.0 * u2) / 2.0,
        -(u4 / 4.0 - 4.0 * u3 / 3.0 + 1.5 * u2) / 2.0,
        (u4 / 4.0 - u3 + u2) / 6.0,
    ]
}

/// Integral over `[x_i + a dx, x_i + b dx]` of the cubic through four nodes
/// bracketing cell `i`.
fn cell_integral(grid: &Grid, v: &[C64], i: usize, a: f64, b: f64) -> C64 {
    let n = v.len();
    let s = i.saturating_sub(1).min(n - 4);
    let off = (i - s) as f64;
    let fa = cubic_basis_anti(off + a);
    let fb = cubic_basis_anti(off + b);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..4 {
        acc += v[s + k] * (fb[k] - fa[k]);
    }
    acc * grid.dx()
}

/// Fourth-order integral of nodal samples between two arbitrary points of
/// the grid. Only samples within two nodes of `[lo, hi]` are touched.
pub fn segment_integral(grid: &Grid, v: &[C64], lo: f64, hi: f64) -> C64 {
    if hi < lo {
        return -segment_integral(grid, v, hi, lo);
    }
    let (il, ul) = grid.locate(lo);
    let (ih, uh) = grid.locate(hi);
    if il == ih {
        return cell_integral(grid, v, il, ul, uh);
    }
    let mut acc = cell_integral(grid, v, il, ul, 1.0);
    for i in il + 1..ih {
        acc += cell_integral(grid, v, i, 0.0, 1.0);
    }
    acc + cell_integral(grid, v, ih, 0.0, uh)
}

/// Running integral `C(x_i) = int_{x_min}^{x_i} f` at every node.
pub fn cumulative(grid: &Grid, v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(v.len());
    let mut acc = C64::new(0.0, 0.0);
    out.push(acc);
    for i in 0..v.len() - 1 {
        acc += cell_integral(grid, v, i, 0.0, 1.0);
        out.push(acc);
    }
    out
}

/// `D^{-1} f(x) = 1/2 [ int_{-inf}^x f - int_x^{+inf} f ]`.
pub fn antiderivative_d(f: &ComplexField, decay_tol: f64) -> ComplexField {
    let b = f.boundary_magnitude();
    if b > decay_tol {
        log::warn!(
            "antiderivative: boundary magnitude {b:.3e} exceeds {decay_tol:.3e}; truncation bias expected"
        );
    }
    let c = cumulative(f.grid(), f.values());
    let half_total = c[c.len() - 1] * 0.5;
    ComplexField {
        grid: *f.grid(),
        values: c.into_iter().map(|v| v - half_total).collect::<Vec<_>>().into(),
    }
}

/// Hilbert transform `H[f](t) = (1/pi) p.v. int f(s) / (s - t) ds`.
///
/// With this sign, boundary values `u + i v` of a function analytic in the
/// upper half-plane and decaying at infinity satisfy `u = H[v]` and
/// `v = -H[u]`. The principal value is taken with the odd-offset rule: the
/// singular node is excluded and only nodes at odd offsets contribute, with
/// weight `2 dx`. The sum is evaluated as an FFT correlation.
pub fn hilbert_transform(f: &ComplexField, decay_tol: f64) -> Result<ComplexField> {
    let b = f.boundary_magnitude();
    if b > decay_tol {
        return Err(Error::NotDecaying {
            magnitude: b,
            tolerance: decay_tol,
        });
    }
    let n = f.grid().n();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut data = vec![C64::new(0.0, 0.0); m];
    data[..n].copy_from_slice(f.values());
    // out_i = sum_j f_j K(j - i), K(d) = 2 / (pi d) for odd d; convolve with g(d) = -K(d).
    let mut kern = vec![C64::new(0.0, 0.0); m];
    for d in 1..n {
        if d % 2 == 1 {
            let k = 2.0 / (PI * d as f64);
            kern[d] = C64::new(-k, 0.0);
            kern[m - d] = C64::new(k, 0.0);
        }
    }
    fwd.process(&mut data);
    fwd.process(&mut kern);
    for (a, k) in data.iter_mut().zip(kern.iter()) {
        *a *= *k;
    }
    inv.process(&mut data);
    let scale = 1.0 / m as f64;
    let values: Vec<C64> = data[..n].iter().map(|v| v * scale).collect();
    ComplexField::new(*f.grid(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g20() -> Grid {
        Grid::new(-20.0, 20.0, 4096).unwrap()
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(1.0, 1.0, 100).is_err());
        assert!(Grid::new(2.0, 1.0, 100).is_err());
        assert!(Grid::new(-1.0, 1.0, 15).is_err());
        let g = Grid::new(-1.0, 1.0, 16).unwrap();
        assert!(g.dx() > 0.0);
        assert_eq!(g.x(15), 1.0);
    }

    #[test]
    fn quadrature_of_zero_and_sech2() {
        let g = g20();
        assert_eq!(quadrature(&ComplexField::zeros(g)).unwrap(), C64::new(0.0, 0.0));
        let f = ComplexField::from_real_fn(g, |x| 1.0 / x.cosh().powi(2));
        assert!((quadrature(&f).unwrap().re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_of_gaussian_matches_sqrt_pi() {
        let f = ComplexField::from_real_fn(g20(), |x| (-x * x).exp());
        assert!((quadrature(&f).unwrap().re - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn cell_weights_reduce_to_four_point_rule() {
        let g = Grid::new(0.0, 15.0, 16).unwrap();
        // interior cell [1, 2] of the stencil should use (-1, 13, 13, -1)/24
        let mut v = vec![C64::new(0.0, 0.0); 16];
        for (k, w) in [-1.0, 13.0, 13.0, -1.0].iter().enumerate() {
            v.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            v[4 + k] = C64::new(1.0, 0.0);
            let c = cell_integral(&g, &v, 5, 0.0, 1.0);
            assert!((c.re - w / 24.0).abs() < 1e-14, "{k}: {c}");
        }
    }

    #[test]
    fn antiderivative_of_sech2_is_tanh() {
        let g = g20();
        let f = ComplexField::from_real_fn(g, |x| 1.0 / x.cosh().powi(2));
        let d = antiderivative_d(&f, DEFAULT_DECAY_TOL);
        for (x, v) in g.nodes().zip(d.values()) {
            assert!((v.re - x.tanh()).abs() < 1e-8, "x = {x}");
        }
        let z = antiderivative_d(&ComplexField::zeros(g), DEFAULT_DECAY_TOL);
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn segment_integral_matches_closed_form() {
        let g = g20();
        let f = ComplexField::from_real_fn(g, |x| x.cos());
        let s = segment_integral(&g, f.values(), -0.37, 2.913);
        assert!((s.re - (2.913f64.sin() - (-0.37f64).sin())).abs() < 1e-10);
        let r = segment_integral(&g, f.values(), 1.0, 1.003);
        assert!((r.re - (1.003f64.sin() - 1.0f64.sin())).abs() < 1e-13);
    }

    #[test]
    fn interpolation_is_accurate() {
        let f = ComplexField::from_fn(g20(), |x| C64::new(0.0, x).exp() / x.cosh());
        for &x in &[-19.997, -3.21, 0.001, 0.5, 7.77, 19.999] {
            let e = C64::new(0.0, x).exp() / x.cosh();
            assert!((f.interpolate(x) - e).norm() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn hilbert_rejects_non_decaying_input() {
        let f = ComplexField::from_real_fn(g20(), |_| 1.0);
        assert!(matches!(
            hilbert_transform(&f, DEFAULT_DECAY_TOL),
            Err(Error::NotDecaying { .. })
        ));
    }

    #[test]
    fn hilbert_of_zero_is_zero() {
        let h = hilbert_transform(&ComplexField::zeros(g20()), 1e-10).unwrap();
        assert!(h.max_abs() < 1e-300);
    }

    #[test]
    fn csv_round_trip() {
        let f = ComplexField::from_fn(Grid::new(-2.0, 2.0, 17).unwrap(), |x| C64::new(x.sin(), x * x));
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = ComplexField::read_csv(&buf[..]).unwrap();
        assert_eq!(f.values(), g.values());
        assert_eq!(f.grid(), g.grid());
    }
}
