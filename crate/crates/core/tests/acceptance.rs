//! One pass/fail line per acceptance criterion, on the default configuration.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nls_scatter::report::CheckRecord;
use nls_scatter::suite::{run_groups, CheckGroup, Context};
use nls_scatter::SuiteConfig;

struct Criterion {
    number: usize,
    title: &'static str,
    group: CheckGroup,
    budget: Duration,
}

const fn c(number: usize, title: &'static str, group: CheckGroup, secs: u64) -> Criterion {
    Criterion {
        number,
        title,
        group,
        budget: Duration::from_secs(secs),
    }
}

const CRITERIA: [Criterion; 12] = [
    c(1, "unitarity", CheckGroup::Unitarity, 30),
    c(2, "gluing conditions", CheckGroup::Gluing, 30),
    c(3, "trace expansion", CheckGroup::Trace, 10),
    c(4, "Jost asymptotic coefficients", CheckGroup::JostAsymptotics, 60),
    c(5, "cover involution table", CheckGroup::Involutions, 30),
    c(6, "resolvent coincidence", CheckGroup::Resolvent, 20),
    c(7, "real-axis identities", CheckGroup::Identities, 120),
    c(8, "b recovery", CheckGroup::RecoverB, 20),
    c(9, "divisor velocities", CheckGroup::Velocities, 180),
    c(10, "isospectrality", CheckGroup::Isospectrality, 120),
    c(11, "variational kernels", CheckGroup::Kernels, 180),
    c(12, "closed-form Pi bracket", CheckGroup::Pbpi, 300),
];

const FREE_BOUND: f64 = 1e-12;
const FREE_BUDGET: Duration = Duration::from_secs(10);

fn worst(records: &[CheckRecord]) -> Option<&CheckRecord> {
    records
        .iter()
        .max_by(|a, b| (a.residual / a.tol).total_cmp(&(b.residual / b.tol)))
}

fn line(n: usize, title: &str, ok: bool, detail: &str) -> bool {
    println!("criterion {n:>2} {:<30} {}  {detail}", title, if ok { "PASS" } else { "FAIL" });
    ok
}

fn main() -> ExitCode {
    let ctx = match Context::new(SuiteConfig::default()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut all_ok = true;
    let total = Instant::now();
    for cr in &CRITERIA {
        let t = Instant::now();
        let out = cr.group.run(&ctx);
        let dt = t.elapsed();
        let ok = match &out {
            Ok(recs) => {
                let fails: Vec<&CheckRecord> = recs.iter().filter(|r| !r.pass).collect();
                let w = worst(recs);
                let detail = format!(
                    "{} records, {} failed, worst {} = {:.3e} (tol {:.1e}), {:.1} s / {} s",
                    recs.len(),
                    fails.len(),
                    w.map_or("-", |r| r.id.as_str()),
                    w.map_or(0.0, |r| r.residual),
                    w.map_or(0.0, |r| r.tol),
                    dt.as_secs_f64(),
                    cr.budget.as_secs(),
                );
                for f in &fails {
                    eprintln!("  FAIL {} residual {:.3e} tol {:.1e}", f.id, f.residual, f.tol);
                }
                line(cr.number, cr.title, fails.is_empty() && !recs.is_empty() && dt <= cr.budget, &detail)
            }
            Err(e) => line(cr.number, cr.title, false, &format!("error: {e}")),
        };
        all_ok &= ok;
    }

    // free field: every group, every residual below the bound
    let mut free_cfg = SuiteConfig::default();
    free_cfg.set("potentials", "zero").expect("valid key");
    let t = Instant::now();
    let free = Context::new(free_cfg).and_then(|ctx| run_groups("all", &CheckGroup::ALL, &ctx));
    let dt = t.elapsed();
    let ok = match &free {
        Ok(rep) => {
            let above: Vec<&CheckRecord> = rep.records.iter().filter(|r| !(r.residual < FREE_BOUND)).collect();
            for r in &above {
                eprintln!("  ABOVE {} residual {:.3e}", r.id, r.residual);
            }
            let detail = format!(
                "{} records, {} at or above {FREE_BOUND:.0e}, max {:.3e}, {:.1} s / {} s",
                rep.records.len(),
                above.len(),
                rep.max_residual(),
                dt.as_secs_f64(),
                FREE_BUDGET.as_secs(),
            );
            line(13, "free-field regression", above.is_empty() && dt <= FREE_BUDGET, &detail)
        }
        Err(e) => line(13, "free-field regression", false, &format!("error: {e}")),
    };
    all_ok &= ok;
    println!("total {:.1} s", total.elapsed().as_secs_f64());
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
