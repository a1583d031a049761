//! Shared fixtures for the benchmarks.

use nls_scatter::potentials::parse_potential_spec;
use nls_scatter::{make_potential, Grid, Potential};

/// A potential from a spec string on a uniform grid of `n` nodes over `[-30, 30]`.
pub fn potential(spec: &str, n: usize) -> Potential {
    let (kind, params) = parse_potential_spec(spec).expect("valid spec");
    let grid = Grid::new(-30.0, 30.0, n).expect("valid grid");
    make_potential(kind, &params, grid).expect("potential builds")
}

/// `n` evenly spaced real spectral points over `[-8, 8]`.
pub fn lambda_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| -8.0 + 16.0 * k as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(potential("sech:A=0.5", 512).grid().n(), 512);
        let l = lambda_grid(5);
        assert_eq!((l[0], l[2], l[4]), (-8.0, 0.0, 8.0));
    }
}
