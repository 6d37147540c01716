//! Fast release gate: one quick check per module, each timed.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::anyon::{af_energy, gradient_check, AfFunctional, AfParams, Grid, GridField2D, TrapPotential};
use crate::coulomb_gas::{bathtub, radial_cells, Potential};
use crate::definetti::{definetti_error, SymmetricState};
use crate::jellium::{field_energy_eta, scaling_check, PeriodicChargeConfig, SmearedCharge};
use crate::tf_vortex::{critical_speed_by_bisection, first_critical_speed};
use crate::variational_1d::{
    curvature_constants, scattering_length, soft_ball_length, theta0, Gl1dGrid, HalfLineGrid, ScatteringPotential,
};

type Outcome = std::result::Result<String, String>;

pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    run: Box<dyn Fn() -> Outcome + Send + Sync>,
}

impl Check {
    pub fn new(module: &'static str, name: &'static str, run: impl Fn() -> Outcome + Send + Sync + 'static) -> Self {
        Self { module, name, run: Box::new(run) }
    }
}

/// `|value − expected| ≤ tol`, reported either way.
fn close(value: f64, expected: f64, tol: f64) -> Outcome {
    let msg = format!("{value:.12} vs {expected:.12}");
    if (value - expected).abs() <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(value: f64, lo: f64, hi: f64) -> Outcome {
    let msg = format!("{value:.6} in [{lo}, {hi}]");
    if (lo..=hi).contains(&value) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fail(e: crate::Error) -> String {
    e.to_string()
}

/// `Ω₁(2)` against `expected`; the default list uses `√π`.
pub fn critical_speed_check(expected: f64) -> Check {
    Check::new("tf_vortex", "critical speed s = 2", move || {
        let closed = first_critical_speed(2.0).map_err(fail)?;
        let bis = critical_speed_by_bisection(2.0, 1e-12).map_err(fail)?;
        close(bis, closed, 1e-6)?;
        close(closed, expected, 1e-10)
    })
}

pub fn default_checks() -> Vec<Check> {
    vec![
        critical_speed_check(PI.sqrt()),
        Check::new("variational_1d", "inverse de Gennes constant", || {
            within(1.0 / theta0(HalfLineGrid::default()).map_err(fail)?.theta0, 1.68, 1.72)
        }),
        Check::new("variational_1d", "GL energy identity b = 1.4", || {
            let c = curvature_constants(1.4, Gl1dGrid::default()).map_err(fail)?;
            within(c.c1_identity_error(), 0.0, 1e-3)
        }),
        Check::new("variational_1d", "soft-ball scattering length", || {
            let a = scattering_length(&ScatteringPotential::soft_ball(3.0), 1.0).map_err(fail)?.a;
            close(a, soft_ball_length(3.0, 1.0), 1e-8)?;
            let hard = scattering_length(&ScatteringPotential::HardSphere, 1.5).map_err(fail)?.a;
            close(hard, 1.5, 1e-8)
        }),
        Check::new("coulomb_gas", "bath-tub energy", || {
            let cells = radial_cells(&Potential::harmonic(), 2.0, 4000);
            close(bathtub(&cells, 1.0 / (2.0 * PI), 1.0).map_err(fail)?.energy, 1.0, 1e-6)
        }),
        Check::new("jellium", "triangular below square, scaling", || {
            let sc = SmearedCharge::uniform(0.1);
            let tri = field_energy_eta(&PeriodicChargeConfig::triangular(1.0).map_err(fail)?, &sc).map_err(fail)?.w_eta;
            let sq = field_energy_eta(&PeriodicChargeConfig::square(1.0).map_err(fail)?, &sc).map_err(fail)?.w_eta;
            if tri >= sq {
                return Err(format!("W(triangular) = {tri} ≥ W(square) = {sq}"));
            }
            let rep = scaling_check(&PeriodicChargeConfig::square(1.0).map_err(fail)?, &sc, 4.0).map_err(fail)?;
            within(rep.difference.abs(), 0.0, 1e-8)
        }),
        Check::new("definetti", "trace-norm bound N = 8", || {
            let g = SymmetricState::random_mixed(8, 2, 1).map_err(fail)?;
            let e = definetti_error(&g, 1).map_err(fail)?;
            within(e.trace_distance, 0.0, e.bound)
        }),
        Check::new("anyon", "harmonic energy and gradient", || {
            let p = AfParams { beta: 0.0, radius: 0.25, potential: TrapPotential::Harmonic };
            let grid = Grid::new(48, p.default_box()).map_err(fail)?;
            let u = GridField2D::from_fn(grid, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp() / PI.sqrt(), 0.0));
            close(af_energy(&u, &p).map_err(fail)?, 2.0, 0.01)?;
            let q = AfParams { beta: 1.0, ..p };
            let f = AfFunctional::new(q, grid).map_err(fail)?;
            let v = GridField2D::from_fn(grid, |x, y| Complex64::new(1.0 + 0.3 * x, 0.4 * y) * (-(x * x + y * y) / 2.0).exp());
            within(gradient_check(&f, &v, 3).map_err(fail)?, 0.0, 1e-5)
        }),
    ]
}

pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

pub struct Report {
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failing_modules(&self) -> Vec<&'static str> {
        let mut m: Vec<&'static str> = self.results.iter().filter(|r| !r.passed).map(|r| r.module).collect();
        m.dedup();
        m
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<6} {:<16} {:<36} {:>10}  detail", "status", "module", "check", "time")?;
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            let ms = r.elapsed.as_secs_f64() * 1e3;
            writeln!(f, "{status:<6} {:<16} {:<36} {ms:>8.1}ms  {}", r.module, r.name, r.detail)?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        write!(f, "{} checks, {failed} failed", self.results.len())
    }
}

pub fn run_checks(checks: &[Check]) -> Report {
    let results = checks
        .iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)();
            let elapsed = start.elapsed();
            let (passed, detail) = match outcome {
                Ok(s) => (true, s),
                Err(s) => (false, s),
            };
            CheckResult { module: c.module, name: c.name, passed, detail, elapsed }
        })
        .collect();
    Report { results }
}
