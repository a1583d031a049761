//! Test potentials on the real line and the first three conserved
//! Hamiltonians of the defocusing NLS hierarchy.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{simpson, ComplexField, Grid, C64, DEFAULT_DECAY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    Sech,
    Gaussian,
    BoxSmoothed,
    ChirpedSech,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 5] = [
        PotentialKind::Zero,
        PotentialKind::Sech,
        PotentialKind::Gaussian,
        PotentialKind::BoxSmoothed,
        PotentialKind::ChirpedSech,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::Zero => "zero",
            PotentialKind::Sech => "sech",
            PotentialKind::Gaussian => "gaussian",
            PotentialKind::BoxSmoothed => "box_smoothed",
            PotentialKind::ChirpedSech => "chirped_sech",
        }
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self {
            PotentialKind::Zero => &[],
            PotentialKind::Sech => &["A", "x0", "w"],
            PotentialKind::Gaussian => &["A", "x0", "w", "c"],
            PotentialKind::BoxSmoothed => &["q0", "l", "x0", "delta", "phase"],
            PotentialKind::ChirpedSech => &["A", "x0", "w", "c"],
        }
    }

    /// Catalogue defaults: amplitudes stay at or below one so that a(lambda) is O(1).
    pub fn default_params(&self) -> Params {
        let kv: &[(&str, f64)] = match self {
            PotentialKind::Zero => &[],
            PotentialKind::Sech => &[("A", 0.5), ("x0", 0.0), ("w", 1.0)],
            PotentialKind::Gaussian => &[("A", 0.5), ("x0", 0.0), ("w", 1.0), ("c", 0.0)],
            PotentialKind::BoxSmoothed => &[
                ("q0", 0.5),
                ("l", 4.0),
                ("x0", 0.0),
                ("delta", 0.25),
                ("phase", 0.0),
            ],
            PotentialKind::ChirpedSech => &[("A", 0.5), ("x0", 0.0), ("w", 1.0), ("c", 1.0)],
        };
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PotentialKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param("kind", format!("unknown potential `{s}`")))
    }
}

pub type Params = BTreeMap<String, f64>;

/// A sampled potential psi(x): one point of the phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    psi: ComplexField,
    label: String,
    decay_ok: bool,
    max_abs: f64,
}

impl Potential {
    /// Wraps a sampled field; `decay_ok` records whether |psi| is below
    /// `decay_tol` at both ends.
    pub fn from_field(psi: ComplexField, label: impl Into<String>, decay_tol: f64) -> Self {
        let decay_ok = psi.boundary_magnitude() <= decay_tol;
        Self::build(psi, label.into(), decay_ok)
    }

    fn build(psi: ComplexField, label: String, decay_ok: bool) -> Self {
        let max_abs = psi.max_abs();
        Self {
            psi,
            label,
            decay_ok,
            max_abs,
        }
    }

    pub fn psi(&self) -> &ComplexField {
        &self.psi
    }

    pub fn grid(&self) -> &Grid {
        self.psi.grid()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decay_ok(&self) -> bool {
        self.decay_ok
    }

    pub fn values(&self) -> &[C64] {
        self.psi.values()
    }

    pub fn at(&self, x: f64) -> C64 {
        self.psi.interpolate(x)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs == 0.0
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn with_values(&self, values: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        Ok(Self::from_field(
            ComplexField::new(*self.grid(), values)?,
            label,
            DEFAULT_DECAY_TOL,
        ))
    }

    /// `psi + eps * phi` for a perturbation sampled on the same grid.
    pub fn perturbed(&self, phi: &[C64], eps: C64) -> Self {
        let values = self
            .values()
            .iter()
            .zip(phi)
            .map(|(p, f)| p + eps * f)
            .collect::<Vec<_>>();
        Self::build(
            ComplexField::new(*self.grid(), values).expect("same grid"),
            format!("{}+pert", self.label),
            self.decay_ok,
        )
    }
}

fn sech(x: f64) -> f64 {
    if x.abs() > 700.0 {
        0.0
    } else {
        1.0 / x.cosh()
    }
}

/// Samples a catalogue potential. Missing parameters take the catalogue
/// defaults; unknown ones are rejected, as is anything that fails to decay
/// to `decay_tol` at the grid ends.
pub fn make_potential(kind: PotentialKind, params: &Params, grid: Grid) -> Result<Potential> {
    make_potential_with_tol(kind, params, grid, DEFAULT_DECAY_TOL)
}

pub fn make_potential_with_tol(
    kind: PotentialKind,
    params: &Params,
    grid: Grid,
    decay_tol: f64,
) -> Result<Potential> {
    for k in params.keys() {
        if !kind.allowed().contains(&k.as_str()) {
            return Err(Error::param(k, format!("not a parameter of `{kind}`")));
        }
    }
    let mut p = kind.default_params();
    p.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    for (k, v) in &p {
        if !v.is_finite() {
            return Err(Error::param(k, "must be finite"));
        }
    }
    let get = |k: &str| p[k];
    let positive = |k: &str| -> Result<f64> {
        let v = get(k);
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::param(k, "must be positive"))
        }
    };

    let field = match kind {
        PotentialKind::Zero => ComplexField::zeros(grid),
        PotentialKind::Sech => {
            let (a, x0, w) = (get("A"), get("x0"), positive("w")?);
            ComplexField::from_real_fn(grid, |x| a * sech((x - x0) / w))
        }
        PotentialKind::Gaussian => {
            let (a, x0, w, c) = (get("A"), get("x0"), positive("w")?, get("c"));
            ComplexField::from_fn(grid, |x| {
                let s = (x - x0) / w;
                C64::from_polar(a * (-s * s).exp(), c * x)
            })
        }
        PotentialKind::ChirpedSech => {
            let (a, x0, w, c) = (get("A"), get("x0"), positive("w")?, get("c"));
            ComplexField::from_fn(grid, |x| C64::from_polar(a * sech((x - x0) / w), c * x))
        }
        PotentialKind::BoxSmoothed => {
            let (q0, l, x0, d) = (get("q0"), positive("l")?, get("x0"), positive("delta")?);
            let phase = get("phase");
            let (left, right) = (x0 - l / 2.0, x0 + l / 2.0);
            ComplexField::from_fn(grid, |x| {
                let m = 0.5 * (((x - left) / d).tanh() - ((x - right) / d).tanh());
                C64::from_polar(q0 * m, phase)
            })
        }
    };
    let b = field.boundary_magnitude();
    if b > decay_tol {
        return Err(Error::NotDecaying {
            magnitude: b,
            tolerance: decay_tol,
        });
    }
    Ok(Potential::build(field, kind.name().to_string(), true))
}

/// Parses `name` or `name:key=value,key=value`.
pub fn parse_potential_spec(spec: &str) -> Result<(PotentialKind, Params)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let kind: PotentialKind = name.trim().parse()?;
    let mut params = Params::new();
    if let Some(rest) = rest {
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::param(kv, "expected key=value"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::param(k.trim(), format!("`{v}` is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
    }
    Ok((kind, params))
}

/// The default test trio used by every suite.
pub fn default_catalogue(grid: Grid) -> Result<Vec<Potential>> {
    [PotentialKind::Zero, PotentialKind::Sech, PotentialKind::ChirpedSech]
        .iter()
        .map(|k| make_potential(*k, &Params::new(), grid))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonians {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

/// Fourth-order centred derivative; samples beyond the ends are taken as zero.
pub fn derivative(f: &ComplexField) -> ComplexField {
    let v = f.values();
    let n = v.len();
    let h = f.grid().dx();
    let at = |i: isize| -> C64 {
        if i < 0 || i >= n as isize {
            C64::new(0.0, 0.0)
        } else {
            v[i as usize]
        }
    };
    let d = (0..n as isize)
        .map(|i| (at(i - 2) - at(i - 1) * 8.0 + at(i + 1) * 8.0 - at(i + 2)) / (12.0 * h))
        .collect();
    ComplexField::new(*f.grid(), d).expect("same grid")
}

/// `H1 = 1/2 int |psi|^2`, `H2 = 1/(2i) int conj(psi) psi'`,
/// `H3 = 1/2 int |psi'|^2 + |psi|^4`.
pub fn hamiltonians(p: &Potential) -> Result<Hamiltonians> {
    let g = p.grid();
    let psi = p.values();
    let dpsi = derivative(p.psi());
    let dv = dpsi.values();
    let dens1: Vec<C64> = psi.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    let dens2: Vec<C64> = psi.iter().zip(dv).map(|(v, d)| v.conj() * d).collect();
    let dens3: Vec<C64> = psi
        .iter()
        .zip(dv)
        .map(|(v, d)| C64::new(d.norm_sqr() + v.norm_sqr().powi(2), 0.0))
        .collect();
    let h1 = 0.5 * simpson(g, &dens1)?.re;
    let h2 = (simpson(g, &dens2)? / C64::new(0.0, 2.0)).re;
    let h3 = 0.5 * simpson(g, &dens3)?.re;
    Ok(Hamiltonians { h1, h2, h3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::default()
    }

    #[test]
    fn zero_potential_is_identically_zero() {
        let p = make_potential(PotentialKind::Zero, &Params::new(), grid()).unwrap();
        assert!(p.is_zero());
        let h = hamiltonians(&p).unwrap();
        assert_eq!((h.h1, h.h2, h.h3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sech_and_chirped_samples() {
        let g = grid();
        let mut params = Params::new();
        params.insert("A".into(), 0.5);
        let p = make_potential(PotentialKind::Sech, &params, g).unwrap();
        let q = make_potential(PotentialKind::ChirpedSech, &Params::new(), g).unwrap();
        for (i, x) in g.nodes().enumerate().step_by(97) {
            assert!((p.values()[i].re - 0.5 / x.cosh()).abs() < 1e-15);
            let e = C64::from_polar(0.5 / x.cosh(), x);
            assert!((q.values()[i] - e).norm() < 1e-15);
        }
    }

    #[test]
    fn sech_hamiltonians() {
        let p = make_potential(PotentialKind::Sech, &Params::new(), grid()).unwrap();
        let h = hamiltonians(&p).unwrap();
        assert!((h.h1 - 0.25).abs() < 1e-10);
        assert!(h.h2.abs() < 1e-12);
        // 1/2 [A^2 * 2/3 + A^4 * 4/3]
        assert!((h.h3 - 0.5 * (0.25 * 2.0 / 3.0 + 0.0625 * 4.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn chirped_sech_hamiltonians_match_closed_form() {
        // psi = A sech(x) e^{icx}: H2 = c A^2 / 2 and
        // H3 = 1/2 [A^2 (2/3) + c^2 A^2 (2) + A^4 (4/3)].
        let p = make_potential(PotentialKind::ChirpedSech, &Params::new(), grid()).unwrap();
        let h = hamiltonians(&p).unwrap();
        assert!((h.h1 - 0.25).abs() < 1e-10);
        assert!((h.h2 - 0.25).abs() < 1e-9, "h2 = {}", h.h2);
        // fourth-order psi' leaves an O(dx^4) bias in H3
        assert!((h.h3 - 0.375).abs() < 1e-8, "h3 = {}", h.h3);
    }

    #[test]
    fn rejects_non_decaying_parameters() {
        let mut params = Params::new();
        params.insert("w".into(), 5.0);
        assert!(matches!(
            make_potential(PotentialKind::Sech, &params, grid()),
            Err(Error::NotDecaying { .. })
        ));
        params.clear();
        params.insert("bogus".into(), 1.0);
        assert!(make_potential(PotentialKind::Sech, &params, grid()).is_err());
        params.clear();
        params.insert("w".into(), -1.0);
        assert!(make_potential(PotentialKind::Gaussian, &params, grid()).is_err());
    }

    #[test]
    fn parses_specs() {
        let (k, p) = parse_potential_spec("chirped_sech:A=0.3,c=2").unwrap();
        assert_eq!(k, PotentialKind::ChirpedSech);
        assert_eq!(p["A"], 0.3);
        assert_eq!(p["c"], 2.0);
        assert!(parse_potential_spec("nope").is_err());
        assert!(parse_potential_spec("sech:A").is_err());
    }

    #[test]
    fn box_is_flat_in_the_middle() {
        let p = make_potential(PotentialKind::BoxSmoothed, &Params::new(), grid()).unwrap();
        assert!((p.at(0.0).re - 0.5).abs() < 1e-6);
        assert!(p.at(5.0).norm() < 1e-6);
    }
}
