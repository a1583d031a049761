//! Residual suites: every verified identity becomes one or more
//! [`CheckRecord`]s over the configured potentials.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::{
    bracket_pi_closed_form, bracket_pi_direct, bracket_pi_fd, bracket_pi_h1, canonical_bracket, h1_kernel,
    h2_kernel, kernel_check, pi_value, JostTarget,
};
use crate::config::SuiteConfig;
use crate::cover::{
    involution_residuals, log_branches, pi_upsilon_asymptotics_check, resolvent_coincidence, standard_contour,
    Sheet, SpectralPoint,
};
use crate::divisor::{divisor_sweep, geometric_abel, identity_sweep, mce_lower_bank, recover_b_at};
use crate::error::{Error, Result};
use crate::flows::{
    commutation_gap, flow_derivative, flow_nls, isospectrality_check, jost_action_x1, modulus_identities,
    nls_steps_for, split_step_convergence, velocity_check, weyl_action_x2, FlowKind, FlowSigns, FlowSpec, FD_EPS,
};
use crate::grid::C64;
use crate::potentials::{hamiltonians, Potential};
use crate::report::{CheckRecord, Environment, SuiteReport};
use crate::scattering::{
    asymptotic_coefficients, gluing_check, scattering_coefficients, trace_along_ray,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Scattering,
    Cover,
    Divisor,
    Abel,
    Flows,
    Bracket,
    All,
}

impl SuiteName {
    pub const PARTS: [SuiteName; 6] = [
        SuiteName::Scattering,
        SuiteName::Cover,
        SuiteName::Divisor,
        SuiteName::Abel,
        SuiteName::Flows,
        SuiteName::Bracket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Scattering => "scattering",
            SuiteName::Cover => "cover",
            SuiteName::Divisor => "divisor",
            SuiteName::Abel => "abel",
            SuiteName::Flows => "flows",
            SuiteName::Bracket => "bracket",
            SuiteName::All => "all",
        }
    }

    pub fn groups(self) -> Vec<CheckGroup> {
        match self {
            SuiteName::All => CheckGroup::ALL.to_vec(),
            s => CheckGroup::ALL.iter().copied().filter(|g| g.suite() == s).collect(),
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::PARTS
            .iter()
            .chain(&[SuiteName::All])
            .copied()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Identity strings carried by the records.
pub mod anchor {
    pub const UNITARITY: &str = "unitarity |a|^2 - |b|^2 = 1";
    pub const GLUING: &str = "gluing condition H_- = H_+ S";
    pub const DUAL_GLUING: &str = "dual gluing condition H_-^* = S^-1 H_+^*";
    pub const TRACE: &str = "trace expansion lambda p_inf(lambda) = -H1 - H2/lambda - H3/lambda^2";
    pub const JOST_ASYMPTOTICS: &str = "first-order Jost coefficients g1, k1, f1, h1";
    pub const INVOLUTIONS: &str = "cover function involution table (W, P, Pi, Upsilon, Weyl)";
    pub const RESOLVENT: &str = "resolvent coincidence 1^T R(x, x-0) 1 = +-i Pi(x)";
    pub const COVER_ASYMPTOTICS: &str = "1/lambda asymptotics of Pi and Upsilon";
    pub const BANKS: &str = "bank relations of xi, xi~, omega, omega~ across the cut";
    pub const LOG_ROUNDTRIP: &str = "exp(Xi) = Pi, exp(Omega) = Upsilon along the contour";
    pub const FIRST: &str = "first identity |a| e^{-i xi} = -b e^{i omega~} + e^{-omega}";
    pub const SECOND: &str = "second identity |a| e^{-i xi} = e^{omega} + conj(b) e^{-i omega~}";
    pub const MCE: &str = "|a| cos xi = cosh omega";
    pub const VAM: &str = "continuum Abel map arg b = -omega~ + arcsin(|a/b| sin xi)";
    pub const THIRD: &str = "third identity arg b = -omega~ + arccos(-sinh omega / |b|)";
    pub const CONTAINMENT: &str = "oval containment |xi| <= h(lambda)";
    pub const RECOVER_B: &str = "b recovered from Pi and Upsilon, independent of x";
    pub const GEOMETRIC_ABEL: &str = "geometric Abel map with the Hilbert transform";
    pub const FIRST_OVAL_INTEGRAL: &str = "first oval integral equals omega - omega_0";
    pub const X1_VELOCITY: &str = "X1 xi = sinh omega / (|a| e^{xi~})";
    pub const X2_VELOCITY: &str = "X2 xi = (-lambda + 2 Im psi) X1 xi";
    pub const VELOCITY_FORMS: &str = "equivalent forms of X1 xi";
    pub const COMMUTATION: &str = "X1 and X2 commute on the divisor";
    pub const X1_JOST: &str = "X1 on Jost solutions: multipliers {i, 0, 0, -i}";
    pub const X2_JOST: &str = "X2 on Jost solutions: X2 j_+ = j_+' (up to renormalization)";
    pub const MODULUS: &str = "|j_-^1|^2 - |j_-^2|^2 = 1 and |j_+^1|^2 - |j_+^2|^2 = -1";
    pub const ISOSPECTRAL: &str = "isospectrality X a(lambda) = 0";
    pub const INTEGRALS: &str = "H1, H2, H3 conserved by the NLS flow";
    pub const SPLIT_STEP: &str = "second-order convergence of the split step";
    pub const VJS: &str = "variational derivatives of the Jost solutions";
    pub const PBPI: &str = "closed-form bracket {Pi(lambda), Pi(mu)}";
    pub const ANTISYMMETRY: &str = "antisymmetry of the bracket";
    pub const COALESCENCE: &str = "bracket bounded as mu -> lambda";
    pub const COMMUTING: &str = "{H1, H2} = 0";
    pub const PI_H1: &str = "{Pi, H1} = X1 Pi";
    pub const FD_BRACKET: &str = "bracket by double functional perturbation";

    pub const ALL: [&str; 36] = [
        UNITARITY, GLUING, DUAL_GLUING, TRACE, JOST_ASYMPTOTICS, INVOLUTIONS, RESOLVENT, COVER_ASYMPTOTICS,
        BANKS, LOG_ROUNDTRIP, FIRST, SECOND, MCE, VAM, THIRD, CONTAINMENT, RECOVER_B, GEOMETRIC_ABEL,
        FIRST_OVAL_INTEGRAL, X1_VELOCITY, X2_VELOCITY, VELOCITY_FORMS, COMMUTATION, X1_JOST, X2_JOST, MODULUS,
        ISOSPECTRAL, INTEGRALS, SPLIT_STEP, VJS, PBPI, ANTISYMMETRY, COALESCENCE, COMMUTING, PI_H1, FD_BRACKET,
    ];
}

/// Floor for relative residuals of quantities that vanish identically.
pub const REL_FLOOR: f64 = 1e-8;

/// `|u - reference| / max(|reference|, REL_FLOOR)`.
pub fn rel(u: C64, reference: C64) -> f64 {
    (u - reference).norm() / reference.norm().max(REL_FLOOR)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn fold_max<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Validated configuration with its sampled potentials.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: SuiteConfig,
    pub potentials: Vec<(String, Potential)>,
}

impl Context {
    /// Validates `cfg` and samples its potentials. Every error here is a
    /// configuration error.
    pub fn new(cfg: SuiteConfig) -> Result<Self> {
        cfg.validate()?;
        let potentials = cfg.potentials()?;
        Ok(Self { cfg, potentials })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }

    fn nonzero(&self) -> impl Iterator<Item = &(String, Potential)> {
        self.potentials.iter().filter(|(_, p)| !p.is_zero())
    }
}

/// A named set of checks. Each acceptance criterion maps onto one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckGroup {
    Unitarity,
    Gluing,
    Trace,
    JostAsymptotics,
    Involutions,
    Resolvent,
    CoverAsymptotics,
    LogBranches,
    Identities,
    RecoverB,
    Abel,
    Velocities,
    JostActions,
    Isospectrality,
    Kernels,
    Pbpi,
    Brackets,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 17] = [
        CheckGroup::Unitarity,
        CheckGroup::Gluing,
        CheckGroup::Trace,
        CheckGroup::JostAsymptotics,
        CheckGroup::Involutions,
        CheckGroup::Resolvent,
        CheckGroup::CoverAsymptotics,
        CheckGroup::LogBranches,
        CheckGroup::Identities,
        CheckGroup::RecoverB,
        CheckGroup::Abel,
        CheckGroup::Velocities,
        CheckGroup::JostActions,
        CheckGroup::Isospectrality,
        CheckGroup::Kernels,
        CheckGroup::Pbpi,
        CheckGroup::Brackets,
    ];

    pub fn suite(self) -> SuiteName {
        use CheckGroup::*;
        match self {
            Unitarity | Gluing | Trace | JostAsymptotics => SuiteName::Scattering,
            Involutions | Resolvent | CoverAsymptotics | LogBranches => SuiteName::Cover,
            Identities | RecoverB => SuiteName::Divisor,
            Abel => SuiteName::Abel,
            Velocities | JostActions | Isospectrality => SuiteName::Flows,
            Kernels | Pbpi | Brackets => SuiteName::Bracket,
        }
    }

    pub fn name(self) -> &'static str {
        use CheckGroup::*;
        match self {
            Unitarity => "unitarity",
            Gluing => "gluing",
            Trace => "trace",
            JostAsymptotics => "jost_asymptotics",
            Involutions => "involutions",
            Resolvent => "resolvent",
            CoverAsymptotics => "cover_asymptotics",
            LogBranches => "log_branches",
            Identities => "identities",
            RecoverB => "recover_b",
            Abel => "abel",
            Velocities => "velocities",
            JostActions => "jost_actions",
            Isospectrality => "isospectrality",
            Kernels => "kernels",
            Pbpi => "pbpi",
            Brackets => "brackets",
        }
    }

    pub fn run(self, ctx: &Context) -> Result<Vec<CheckRecord>> {
        use CheckGroup::*;
        let t = Instant::now();
        let out = match self {
            Unitarity => unitarity(ctx),
            Gluing => gluing(ctx),
            Trace => trace(ctx),
            JostAsymptotics => jost_asymptotics(ctx),
            Involutions => involutions(ctx),
            Resolvent => resolvent(ctx),
            CoverAsymptotics => cover_asymptotics(ctx),
            LogBranches => banks(ctx),
            Identities => identities(ctx),
            RecoverB => recover_b(ctx),
            Abel => abel(ctx),
            Velocities => velocities(ctx),
            JostActions => jost_actions(ctx),
            Isospectrality => isospectrality(ctx),
            Kernels => kernels(ctx),
            Pbpi => pbpi(ctx),
            Brackets => brackets(ctx),
        };
        log::info!("group {} finished in {:.2?}", self.name(), t.elapsed());
        out
    }
}

/// Record builder for one group.
struct Rec<'a> {
    suite: &'static str,
    group: &'static str,
    cfg: &'a SuiteConfig,
    out: Vec<CheckRecord>,
}

impl<'a> Rec<'a> {
    fn new(g: CheckGroup, cfg: &'a SuiteConfig) -> Self {
        Self {
            suite: g.suite().name(),
            group: g.name(),
            cfg,
            out: Vec::new(),
        }
    }

    fn push(&mut self, check: &str, pot: &str, anchor: &str, residual: f64, tol_key: &str) {
        let tol = self.cfg.tol(tol_key);
        self.push_tol(check, pot, anchor, residual, tol);
    }

    fn push_tol(&mut self, check: &str, pot: &str, anchor: &str, residual: f64, tol: f64) {
        let id = format!("{}/{}/{}/{}", self.suite, self.group, check, pot);
        self.out.push(CheckRecord::new(self.suite, id, anchor, residual, tol));
    }
}

fn signs_for(p: &Potential) -> Result<FlowSigns> {
    if p.is_zero() {
        Ok(FlowSigns::default())
    } else {
        FlowSigns::calibrate(p)
    }
}

fn unitarity(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Unitarity, &ctx.cfg);
    let grid = ctx.cfg.lambda_range.points();
    for (name, p) in &ctx.potentials {
        let sd = scattering_coefficients(p, &grid)?;
        r.push("defect", name, anchor::UNITARITY, sd.unitarity_defect(), "unitarity");
    }
    Ok(r.out)
}

/// Nine real lambda values across the configured range.
fn gluing_lambdas(ctx: &Context) -> Vec<f64> {
    let r = &ctx.cfg.lambda_range;
    linspace(r.min * 0.5, r.max * 0.5, 9)
}

fn gluing(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Gluing, &ctx.cfg);
    let ls = gluing_lambdas(ctx);
    for (name, p) in &ctx.potentials {
        let reps = ls
            .par_iter()
            .map(|&l| gluing_check(p, l))
            .collect::<Result<Vec<_>>>()?;
        r.push("rh", name, anchor::GLUING, fold_max(reps.iter().map(|g| g.rh)), "gluing");
        r.push("arh", name, anchor::DUAL_GLUING, fold_max(reps.iter().map(|g| g.arh)), "gluing");
    }
    Ok(r.out)
}

fn trace(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Trace, &ctx.cfg);
    let ray = [C64::new(0.0, 16.0), C64::new(0.0, 32.0)];
    for (name, p) in &ctx.potentials {
        let h = hamiltonians(p)?;
        let rep = trace_along_ray(p, &ray, &h)?;
        let at = |im: f64| {
            rep.samples
                .iter()
                .find(|s| s.lambda.im == im)
                .copied()
                .ok_or_else(|| Error::Numerical("trace sample missing".into()))
        };
        let (s16, s32) = (at(16.0)?, at(32.0)?);
        let lead = (s32.lambda * s32.p_inf + h.h1).norm();
        let estimate = h.h2.abs() / 32.0 + h.h3.abs() / (32.0 * 32.0);
        r.push_tol("leading", name, anchor::TRACE, lead, (4.0 * estimate).max(1e-12));
        // below this the truncation error is rounding and the ratio is meaningless
        let decay = if s16.truncation[2] < 1e-13 {
            s32.truncation[2]
        } else {
            s32.truncation[2] / s16.truncation[2]
        };
        r.push("decay_ratio", name, anchor::TRACE, decay, "trace_decay");
    }
    Ok(r.out)
}

fn jost_asymptotics(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::JostAsymptotics, &ctx.cfg);
    let ray: Vec<C64> = [16.0, 32.0, 64.0, 128.0].iter().map(|&v| C64::new(0.0, v)).collect();
    for (name, p) in &ctx.potentials {
        let errs = [-1.0, 0.0, 0.7]
            .par_iter()
            .map(|&x| asymptotic_coefficients(p, x, &ray).map(|a| a.max_error()))
            .collect::<Result<Vec<_>>>()?;
        r.push("coefficients", name, anchor::JOST_ASYMPTOTICS, fold_max(errs), "assu");
    }
    Ok(r.out)
}

fn involutions(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Involutions, &ctx.cfg);
    let mut rng = ctx.rng(5);
    let samples: Vec<(f64, SpectralPoint)> = (0..12)
        .map(|_| {
            let x = rng.random_range(-3.0..3.0);
            let re = rng.random_range(-2.0..2.0);
            let im = rng.random_range(0.3..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let sheet = if rng.random_bool(0.5) { Sheet::Plus } else { Sheet::Minus };
            (x, SpectralPoint::new(C64::new(re, im), sheet))
        })
        .collect();
    for (name, p) in &ctx.potentials {
        let res = samples
            .par_iter()
            .map(|&(x, q)| involution_residuals(p, x, q).map(|v| v.max()))
            .collect::<Result<Vec<_>>>()?;
        r.push("table", name, anchor::INVOLUTIONS, fold_max(res), "involution");
    }
    Ok(r.out)
}

fn resolvent(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Resolvent, &ctx.cfg);
    let mut rng = ctx.rng(6);
    let draw = |rng: &mut ChaCha8Rng, sign: f64| -> Vec<(f64, C64)> {
        (0..6)
            .map(|_| {
                let x = rng.random_range(-2.0..2.0);
                let l = C64::new(rng.random_range(-2.0..2.0), sign * rng.random_range(0.3..1.5));
                (x, l)
            })
            .collect()
    };
    let upper = draw(&mut rng, 1.0);
    let lower = draw(&mut rng, -1.0);
    for (name, p) in &ctx.potentials {
        for (label, set) in [("upper", &upper), ("lower", &lower)] {
            let res = set
                .par_iter()
                .map(|&(x, l)| resolvent_coincidence(p, x, l))
                .collect::<Result<Vec<_>>>()?;
            r.push(label, name, anchor::RESOLVENT, fold_max(res), "resolvent");
        }
    }
    Ok(r.out)
}

fn cover_asymptotics(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::CoverAsymptotics, &ctx.cfg);
    let ray: Vec<C64> = [16.0, 32.0, 64.0, 128.0].iter().map(|&v| C64::new(0.0, v)).collect();
    for (name, p) in &ctx.potentials {
        let errs = [0.0, 0.5]
            .par_iter()
            .map(|&x| pi_upsilon_asymptotics_check(p, x, &ray).map(|a| a.max_error()))
            .collect::<Result<Vec<_>>>()?;
        r.push("coefficients", name, anchor::COVER_ASYMPTOTICS, fold_max(errs), "asymptotics");
    }
    Ok(r.out)
}

fn banks(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::LogBranches, &ctx.cfg);
    let lr = &ctx.cfg.lambda_range;
    let real = linspace(lr.min, lr.max, 65);
    let spec = ctx.cfg.contour;
    let halves = spec.banks.half_planes();
    for (name, p) in &ctx.potentials {
        for x in [-1.0, 0.5] {
            let per_bank = halves
                .par_iter()
                .map(|&h| {
                    let c = standard_contour(&real, h, spec.arc_nodes, spec.refine);
                    log_branches(p, x, &c, h)
                })
                .collect::<Result<Vec<_>>>()?;
            let tag = format!("{name}/x={x}");
            r.push(
                "roundtrip",
                &tag,
                anchor::LOG_ROUNDTRIP,
                fold_max(per_bank.iter().map(|b| b.roundtrip)),
                "log_roundtrip",
            );
            if let [u, l] = per_bank.as_slice() {
                let start = spec.arc_nodes;
                let n = u.xi.len();
                let m = fold_max((start..n).map(|k| {
                    (u.xi[k] + l.xi[k])
                        .abs()
                        .max((u.xi_tilde[k] - l.xi_tilde[k]).abs())
                        .max((u.omega[k] + l.omega[k]).abs())
                        .max((u.omega_tilde[k] - l.omega_tilde[k]).abs())
                }));
                r.push("relations", &tag, anchor::BANKS, m, "bank");
            }
        }
    }
    Ok(r.out)
}

fn identities(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Identities, &ctx.cfg);
    let xs = linspace(-3.0, 3.0, 21);
    let ls = linspace(-4.0, 4.0, 33);
    for (name, p) in &ctx.potentials {
        let res = identity_sweep(p, &xs, &ls)?;
        r.push("first", name, anchor::FIRST, fold_max(res.iter().map(|v| v.first)), "identity");
        r.push("second", name, anchor::SECOND, fold_max(res.iter().map(|v| v.second)), "identity");
        r.push("mce", name, anchor::MCE, fold_max(res.iter().map(|v| v.mce)), "identity");
        let big_b = || res.iter().filter(|v| v.abs_b > 0.05);
        r.push("vam", name, anchor::VAM, fold_max(big_b().filter_map(|v| v.vam)), "vam");
        r.push("third", name, anchor::THIRD, fold_max(big_b().filter_map(|v| v.third)), "third");
        let lower = [(-1.0, 0.7), (0.3, -1.5), (1.2, 2.5)]
            .par_iter()
            .map(|&(x, l)| mce_lower_bank(p, x, l))
            .collect::<Result<Vec<_>>>()?;
        r.push("mce_lower_bank", name, anchor::MCE, fold_max(lower), "identity");
        let excess = [-2.0, 0.0, 1.5]
            .par_iter()
            .map(|&x| divisor_sweep(p, x, &ls).map(|s| s.containment_excess().max(0.0)))
            .collect::<Result<Vec<_>>>()?;
        r.push("containment", name, anchor::CONTAINMENT, fold_max(excess), "containment");
    }
    Ok(r.out)
}

fn recover_b(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::RecoverB, &ctx.cfg);
    let xs = [-2.0, 0.0, 3.0];
    for (name, p) in &ctx.potentials {
        for l in [0.6, -1.2] {
            let rb = recover_b_at(p, &xs, l)?;
            let tag = format!("{name}/lambda={l}");
            r.push("error", &tag, anchor::RECOVER_B, rb.error, "recover_b");
            r.push("x_spread", &tag, anchor::RECOVER_B, rb.x_spread, "recover_b");
        }
    }
    Ok(r.out)
}

/// Spectral window of the geometric Abel check.
pub fn abel_lambda_grid() -> Vec<f64> {
    linspace(-16.0, 16.0, 513)
}

fn abel(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Abel, &ctx.cfg);
    let grid = abel_lambda_grid();
    for (name, p) in &ctx.potentials {
        let g = geometric_abel(p, 0.5, -0.5, &grid)?;
        r.push("residual", name, anchor::GEOMETRIC_ABEL, g.max_residual(0.05), "abel");
        r.push("vam_consistency", name, anchor::GEOMETRIC_ABEL, g.max_vam_consistency(0.05), "abel");
        r.push(
            "first_integral",
            name,
            anchor::FIRST_OVAL_INTEGRAL,
            g.first_integral_error(0.05),
            "abel_first_integral",
        );
    }
    Ok(r.out)
}

/// Fifteen seeded `(x, lambda)` samples for the velocity checks.
pub fn velocity_samples(seed_rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..15)
        .map(|_| (seed_rng.random_range(-1.5..1.5), seed_rng.random_range(-2.0..2.0)))
        .collect()
}

fn velocities(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Velocities, &ctx.cfg);
    let samples = velocity_samples(&mut ctx.rng(9));
    for (name, p) in &ctx.potentials {
        let signs = signs_for(p)?;
        let checks = samples
            .par_iter()
            .map(|&(x, l)| velocity_check(p, x, l, &signs))
            .collect::<Result<Vec<_>>>()?;
        r.push("x1", name, anchor::X1_VELOCITY, fold_max(checks.iter().map(|c| c.residual_x1)), "velocity");
        r.push("x2", name, anchor::X2_VELOCITY, fold_max(checks.iter().map(|c| c.residual_x2)), "velocity");
        r.push(
            "forms",
            name,
            anchor::VELOCITY_FORMS,
            fold_max(checks.iter().map(|c| c.velocity.x1_spread)),
            "velocity_forms",
        );
        let eps = 1e-3;
        let gap = commutation_gap(p, 0.4, 0.8, eps, &signs)?;
        r.push_tol("commutation", name, anchor::COMMUTATION, gap, eps * eps);
    }
    Ok(r.out)
}

fn jost_actions(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::JostActions, &ctx.cfg);
    let l = C64::new(1.0, 1.0);
    for (name, p) in &ctx.potentials {
        let signs = signs_for(p)?;
        let x1 = jost_action_x1(p, 0.3, l, &signs)?;
        r.push("x1_table", name, anchor::X1_JOST, x1.residual, "jost_action");
        let x2 = weyl_action_x2(p, 0.3, l, &signs)?;
        r.push("x2_projective", name, anchor::X2_JOST, x2.projective_residual, "jost_action");
        r.push("x2_weyl", name, anchor::X2_JOST, x2.residual, "jost_action");
        let m = [-1.5, 0.3, 2.0]
            .par_iter()
            .map(|&l| modulus_identities(p, l).map(|(z, m)| z.max(m)))
            .collect::<Result<Vec<_>>>()?;
        r.push("modulus", name, anchor::MODULUS, fold_max(m), "modulus");
    }
    Ok(r.out)
}

fn isospectrality(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Isospectrality, &ctx.cfg);
    let grid = ctx.cfg.lambda_range.points();
    for (name, p) in &ctx.potentials {
        let signs = signs_for(p)?;
        let specs = [
            FlowSpec::new(FlowKind::X1, 1.0),
            FlowSpec::new(FlowKind::X2, 1.0),
            FlowSpec::new(FlowKind::Nls, 0.5),
        ];
        let reps = specs
            .par_iter()
            .map(|s| isospectrality_check(p, s, &signs, &grid))
            .collect::<Result<Vec<_>>>()?;
        for (spec, d) in specs.iter().zip(&reps) {
            let (key, check_b) = match spec.which {
                FlowKind::Nls => ("drift_nls", false),
                _ => ("drift_x", true),
            };
            let flow = spec.which.name();
            r.push(&format!("{flow}_abs_a"), name, anchor::ISOSPECTRAL, d.abs_a_drift, key);
            if check_b {
                r.push(&format!("{flow}_abs_b"), name, anchor::ISOSPECTRAL, d.abs_b_drift, key);
            }
        }
        let q = flow_nls(p, 1.0, nls_steps_for(1.0))?;
        let (h0, h1) = (hamiltonians(p)?, hamiltonians(&q)?);
        let drift = (h0.h1 - h1.h1).abs().max((h0.h2 - h1.h2).abs()).max((h0.h3 - h1.h3).abs());
        r.push("nls_integrals", name, anchor::INTEGRALS, drift, "hamiltonian_drift");
        let (d1, _, ratio) = split_step_convergence(p, 0.5, 100)?;
        let conv = if d1 < 1e-13 { 0.0 } else { (ratio - 4.0).abs() / 4.0 };
        r.push("split_step", name, anchor::SPLIT_STEP, conv, "split_step");
    }
    Ok(r.out)
}

/// `(target, x, y0, lambda)`: four bump positions per column, on both
/// sides of `x`.
pub fn kernel_samples() -> Vec<(JostTarget, f64, f64, C64)> {
    let l1 = C64::new(0.5, 1.0);
    let l2 = C64::new(-0.8, 0.6);
    vec![
        (JostTarget::PlusTwo, 0.0, 0.8, l1),
        (JostTarget::PlusTwo, 0.0, -0.8, l1),
        (JostTarget::PlusTwo, 0.5, 1.7, l2),
        (JostTarget::PlusTwo, -0.5, -1.3, l2),
        (JostTarget::MinusOne, 0.0, -0.8, l1),
        (JostTarget::MinusOne, 0.0, 0.8, l1),
        (JostTarget::MinusOne, 0.5, -0.4, l2),
        (JostTarget::MinusOne, -0.5, 1.1, l2),
    ]
}

fn kernels(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Kernels, &ctx.cfg);
    let samples = kernel_samples();
    for (name, p) in &ctx.potentials {
        let res = samples
            .par_iter()
            .map(|&(t, x, y0, l)| kernel_check(p, t, x, y0, l).map(|k| k.residual))
            .collect::<Result<Vec<_>>>()?;
        for (target, label) in [(JostTarget::PlusTwo, "plus_two"), (JostTarget::MinusOne, "minus_one")] {
            let m = fold_max(samples.iter().zip(&res).filter(|(s, _)| s.0 == target).map(|(_, v)| *v));
            r.push(label, name, anchor::VJS, m, "kernel");
        }
    }
    Ok(r.out)
}

fn pbpi(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Pbpi, &ctx.cfg);
    let pairs = &ctx.cfg.bracket_pairs;
    let x = 0.0;
    for (name, p) in &ctx.potentials {
        let vals = pairs
            .par_iter()
            .map(|&(l, m)| -> Result<(C64, C64, C64)> {
                let c = bracket_pi_closed_form(p, x, l, m)?;
                let back = bracket_pi_closed_form(p, x, m, l)?;
                let d = bracket_pi_direct(p, x, l, m)?;
                Ok((c, back, d))
            })
            .collect::<Result<Vec<_>>>()?;
        r.push("direct", name, anchor::PBPI, fold_max(vals.iter().map(|(c, _, d)| rel(*d, *c))), "pbpi");
        r.push(
            "antisymmetry",
            name,
            anchor::ANTISYMMETRY,
            fold_max(vals.iter().map(|(c, b, _)| (c + b).norm())),
            "antisymmetry",
        );
        // bounded approach to coalescence: never larger than at separation 0.1
        let l = pairs[0].0;
        let dir = C64::from_polar(1.0, 0.7);
        let near = [1e-1, 1e-2, 1e-3]
            .par_iter()
            .map(|&eta| bracket_pi_closed_form(p, x, l, l + dir * eta).map(|v| v.norm()))
            .collect::<Result<Vec<_>>>()?;
        r.push_tol("coalescence", name, anchor::COALESCENCE, near[1].max(near[2]), near[0].max(1e-12));
    }
    Ok(r.out)
}

/// Panel width and half-width of the double-perturbation bracket.
pub const FD_BRACKET_PANEL: f64 = 2.0;
pub const FD_BRACKET_HALF_WIDTH: f64 = 8.0;

fn brackets(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let mut r = Rec::new(CheckGroup::Brackets, &ctx.cfg);
    let (x, l) = (0.0, C64::new(0.5, 1.0));
    for (name, p) in &ctx.potentials {
        let hh = canonical_bracket(&h1_kernel(p), &h2_kernel(p))?;
        r.push("h1_h2", name, anchor::COMMUTING, hh.norm(), "pb");
        let signs = signs_for(p)?;
        let (b, fd) = rayon::join(
            || bracket_pi_h1(p, x, l),
            || flow_derivative(p, FlowKind::X1, &signs, FD_EPS, |q| pi_value(q, x, l)),
        );
        r.push("pi_h1", name, anchor::PI_H1, rel(b?, fd?), "pi_h1");
    }
    let (l, m) = ctx.cfg.bracket_pairs[0];
    for (name, p) in ctx.nonzero() {
        let (c, fd) = rayon::join(
            || bracket_pi_closed_form(p, x, l, m),
            || bracket_pi_fd(p, x, l, m, FD_BRACKET_PANEL, FD_BRACKET_HALF_WIDTH),
        );
        r.push("fd_bracket", name, anchor::FD_BRACKET, rel(fd?, c?), "fd_bracket");
    }
    Ok(r.out)
}

/// Runs every group of `name` over the configured potentials.
pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let ctx = Context::new(cfg.clone())?;
    run_groups(name.name(), &name.groups(), &ctx)
}

pub fn run_groups(label: &str, groups: &[CheckGroup], ctx: &Context) -> Result<SuiteReport> {
    let t = Instant::now();
    let mut records = Vec::new();
    for g in groups {
        records.extend(g.run(ctx)?);
    }
    let mut report = SuiteReport::new(label, records, Environment::capture(ctx.cfg.to_map()));
    report.wall_time = Some(t.elapsed());
    Ok(report)
}
