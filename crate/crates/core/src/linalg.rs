//! Small fixed-size complex linear algebra: 2x2 matrices and 2-vectors.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

pub type Vec2 = [C64; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    /// Matrix whose columns are `c0` and `c1`.
    pub fn from_columns(c0: Vec2, c1: Vec2) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn sigma1() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma3() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// The skew form `J = [[0, 1], [-1, 0]]` used in every Wronskian.
    pub fn j() -> Self {
        Mat2([[ZERO, ONE], [-ONE, ZERO]])
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn column(&self, c: usize) -> Vec2 {
        [self.0[0][c], self.0[1][c]]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn conj(&self) -> Self {
        Mat2([
            [self.0[0][0].conj(), self.0[0][1].conj()],
            [self.0[1][0].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2([
            [self.0[0][0] * s, self.0[0][1] * s],
            [self.0[1][0] * s, self.0[1][1] * s],
        ])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(Mat2([[self.0[1][1], -self.0[0][1]], [-self.0[1][0], self.0[0][0]]]).scale(1.0 / d))
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Closed-form exponential: `exp(tau I + N) = e^tau (cosh s I + sinh(s)/s N)`
    /// with `N` traceless and `s^2 = -det N`.
    pub fn expm(&self) -> Mat2 {
        if self.0[0][1] == ZERO && self.0[1][0] == ZERO {
            return Mat2::diag(self.0[0][0].exp(), self.0[1][1].exp());
        }
        let tau = self.trace() * 0.5;
        let n = *self - Mat2::IDENTITY.scale(tau);
        let s2 = n.0[0][0] * n.0[0][0] + n.0[0][1] * n.0[1][0];
        let s = s2.sqrt();
        let (ch, shc) = if s.norm() < 1e-8 {
            (ONE + s2 * 0.5, ONE + s2 / 6.0)
        } else {
            (s.cosh(), s.sinh() / s)
        };
        (Mat2::IDENTITY.scale(ch) + n.scale(shc)).scale(tau.exp())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2([
            [self.0[0][0] + o.0[0][0], self.0[0][1] + o.0[0][1]],
            [self.0[1][0] + o.0[1][0], self.0[1][1] + o.0[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(C64::new(s, 0.0))
    }
}

/// `u^T J v = u0 v1 - u1 v0`.
pub fn wronskian(u: Vec2, v: Vec2) -> C64 {
    u[0] * v[1] - u[1] * v[0]
}

pub fn sum(v: Vec2) -> C64 {
    v[0] + v[1]
}

pub fn scale(v: Vec2, s: C64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

pub fn vsub(u: Vec2, v: Vec2) -> Vec2 {
    [u[0] - v[0], u[1] - v[1]]
}

pub fn vnorm(v: Vec2) -> f64 {
    v[0].norm().max(v[1].norm())
}

/// `sigma1 conj(v)`.
pub fn sigma1_conj(v: Vec2) -> Vec2 {
    [v[1].conj(), v[0].conj()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_expm(m: &Mat2) -> Mat2 {
        // scaling and squaring with a long Taylor series
        let k = 10;
        let small = m.scale(C64::new(1.0 / f64::powi(2.0, k), 0.0));
        let mut term = Mat2::IDENTITY;
        let mut acc = Mat2::IDENTITY;
        for j in 1..30 {
            term = (term * small).scale(C64::new(1.0 / j as f64, 0.0));
            acc = acc + term;
        }
        for _ in 0..k {
            acc = acc * acc;
        }
        acc
    }

    #[test]
    fn expm_matches_taylor() {
        let m = Mat2::new(
            C64::new(0.3, -1.2),
            C64::new(0.5, 0.1),
            C64::new(-0.7, 0.4),
            C64::new(-0.1, 0.9),
        );
        assert!((m.expm() - taylor_expm(&m)).max_abs() < 1e-12);
        let z = Mat2::diag(C64::new(0.0, 2.0), C64::new(0.0, -2.0));
        assert!((z.expm() - taylor_expm(&z)).max_abs() < 1e-12);
        let tiny = Mat2::new(C64::new(1e-10, 0.0), C64::new(2e-10, 0.0), ZERO, C64::new(-1e-10, 0.0));
        // upper triangular: exact exponential is known in closed form
        let e = 1e-10_f64;
        let exact = Mat2::new(
            C64::new(e.exp(), 0.0),
            C64::new(2e-10 * e.sinh() / e, 0.0),
            ZERO,
            C64::new((-e).exp(), 0.0),
        );
        assert!((tiny.expm() - exact).max_abs() < 1e-16);
    }

    #[test]
    fn wronskian_of_free_columns_is_one() {
        assert_eq!(wronskian([ONE, ZERO], [ZERO, ONE]), ONE);
        assert_eq!(Mat2::j().det(), ONE);
    }
}
