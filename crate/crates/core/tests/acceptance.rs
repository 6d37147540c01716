//! Release acceptance suite: one line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the table is always shown.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use meanfield_lab::anyon::{
    af_energy, gauge_field, gradient_check, minimize_af, AfFunctional, AfParams, Grid, GridField2D, MinimizeOptions,
    TrapPotential,
};
use meanfield_lab::coulomb_gas::{
    bathtub, bl_distance, default_bandwidth, equilibrium_measure_radial, laughlin_sampler, radial_cells, run_chains,
    LaughlinPlasmaSpec, Potential, RadialHistogram, SamplerOptions,
};
use meanfield_lab::definetti::{
    ckmr_formula, definetti_error, lower_symbol, SphereQuadrature, SymmetricState,
};
use meanfield_lab::jellium::{field_energy_eta, field_energy_real_space, scaling_check, PeriodicChargeConfig, SmearedCharge};
use meanfield_lab::numerics::quadrature::gauss_legendre;
use meanfield_lab::numerics::special::bessel_i0_scaled;
use meanfield_lab::tf_vortex::{critical_speed_by_bisection, first_critical_speed, tf_profile, vortex_density, VortexGrid};
use meanfield_lab::variational_1d::{
    curvature_constants, scattering_length, soft_ball_length, theta0, Gl1dGrid, HalfLineGrid, ScatteringPotential,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn lib<T>(r: meanfield_lab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn critical_speed() -> Outcome {
    let closed = lib(first_critical_speed(2.0))?;
    let bis = lib(critical_speed_by_bisection(2.0, 1e-12))?;
    let msg = format!("Ω₁ = {closed:.15}, |Ω₁ − √π| = {:.1e}, bisection gap {:.1e}", (closed - PI.sqrt()).abs(), (bis - closed).abs());
    ensure((closed - PI.sqrt()).abs() <= 1e-10 && (bis - closed).abs() <= 1e-6, msg)
}

fn vortex_density_shape() -> Outcome {
    let p = lib(tf_profile(2.0))?;
    let omega1 = lib(first_critical_speed(2.0))?;
    let below = lib(vortex_density(&p, 0.99 * omega1, VortexGrid::default()))?;
    let zero = below.mu_star.iter().all(|&v| v == 0.0);
    let fast = lib(vortex_density(&p, 100.0, VortexGrid::default()))?;
    let flat = fast.flatness(100.0, 0.8).ok_or("no support at Ω₀ = 100")?;
    ensure(zero && flat <= 0.05, format!("μ* ≡ 0 below Ω₁: {zero}; sup |μ*/2Ω₀ − 1| = {flat:.4} at Ω₀ = 100"))
}

fn de_gennes_constant() -> Outcome {
    let t = lib(theta0(HalfLineGrid::default()))?;
    let inv = 1.0 / t.theta0;
    ensure(
        (1.68..=1.72).contains(&inv) && t.refinement_change <= 1e-5,
        format!("Θ₀⁻¹ = {inv:.6}, refinement change {:.1e}", t.refinement_change),
    )
}

fn gl_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut c2 = 0.0;
    for b in [1.2, 1.4, 1.65] {
        let c = lib(curvature_constants(b, Gl1dGrid::default()))?;
        worst = worst.max(c.c1_identity_error());
        c2 = c.c2;
    }
    ensure(worst <= 1e-3 && c2 > 0.0, format!("max relative identity error {worst:.1e}; C₂(1.65) = {c2:.6e}"))
}

fn scattering() -> Outcome {
    let hard = lib(scattering_length(&ScatteringPotential::HardSphere, 1.3))?.a;
    let mut soft_err = 0.0f64;
    for (v0, r0) in [(0.5, 1.0), (4.0, 0.7), (50.0, 2.0), (1e3, 1.0)] {
        let a = lib(scattering_length(&ScatteringPotential::soft_ball(v0), r0))?.a;
        soft_err = soft_err.max((a - soft_ball_length(v0, r0)).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_ratio = 0.0f64;
    for i in 0..20 {
        let r0 = rng.random_range(0.5..2.0);
        let w = if i % 2 == 0 {
            let shells = rng.random_range(1..8);
            ScatteringPotential::Steps((0..shells).map(|_| rng.random_range(0.0..20.0)).collect())
        } else {
            let (amp, pw) = (rng.random_range(0.1..30.0), rng.random_range(0.5..3.0));
            ScatteringPotential::Function(std::sync::Arc::new(move |r: f64| amp * (1.0 - (r / r0).powi(2)).max(0.0).powf(pw)))
        };
        let a = lib(scattering_length(&w, r0))?.a;
        worst_ratio = worst_ratio.max(8.0 * PI * a / w.integral(r0));
    }
    ensure(
        (hard - 1.3).abs() <= 1e-8 && soft_err <= 1e-8 && worst_ratio <= 1.0,
        format!("hard |a − R₀| = {:.1e}; soft-ball error {soft_err:.1e}; max 8πa/∫w = {worst_ratio:.4} over 20 potentials", (hard - 1.3).abs()),
    )
}

fn circular_law() -> Outcome {
    let n = 100;
    let v = Potential::harmonic();
    let mu0 = lib(equilibrium_measure_radial(&v, 2, 1.0))?;
    let opts = SamplerOptions { sweeps: 1_000_000, warmup: 2_000, thin: 100, chains: 4, seed: 2024 };
    let run = lib(run_chains(2, n, 4.0, v, &opts))?;
    let hist = RadialHistogram::from_radii(&run.radii(), 2, 3.0, 600).smoothed(default_bandwidth(n));
    let bl = bl_distance(&hist, &mu0);
    ensure(bl <= 0.1, format!("bounded-Lipschitz distance {bl:.4} after 10⁶ sweeps (acceptance {:.3})", run.acceptance))
}

fn laughlin_incompressibility() -> Outcome {
    let opts = SamplerOptions { sweeps: 100_000, warmup: 2_000, thin: 20, chains: 4, seed: 7 };
    let flat = lib(laughlin_sampler(&LaughlinPlasmaSpec { n: 100, ell: 2, m: 0 }, &opts))?;
    let max = flat.max_smoothed_density();
    let hole = lib(laughlin_sampler(&LaughlinPlasmaSpec { n: 100, ell: 2, m: 100 }, &opts))?;
    let (r1, r2) = hole.annulus_radii();
    let ok = max <= 1.15 / (2.0 * PI) && (r1 - 1.0).abs() <= 0.1 && (r2 / 3f64.sqrt() - 1.0).abs() <= 0.1;
    ensure(ok, format!("max density × 2π = {:.4}; quasi-hole annulus [{r1:.4}, {r2:.4}]", max * 2.0 * PI))
}

fn bath_tub() -> Outcome {
    let cells = radial_cells(&Potential::harmonic(), 2.0, 4000);
    let e = lib(bathtub(&cells, 1.0 / (2.0 * PI), 1.0))?.energy;
    ensure((e - 1.0).abs() <= 1e-6, format!("E = {e:.15}"))
}

fn jellium() -> Outcome {
    let sc = SmearedCharge::uniform(0.1);
    let sq = lib(PeriodicChargeConfig::square(1.0))?;
    let ewald = lib(field_energy_eta(&sq, &sc))?.w_eta;
    let direct = lib(field_energy_real_space(&sq, &sc, 80.0))?;
    let tri = lib(PeriodicChargeConfig::triangular(1.0))?;
    let mut gaps = Vec::new();
    for eta in [0.1, 0.05] {
        let s = SmearedCharge::uniform(eta);
        gaps.push(lib(field_energy_eta(&sq, &s))?.w_eta - lib(field_energy_eta(&tri, &s))?.w_eta);
    }
    let s2 = lib(scaling_check(&sq, &sc, 4.0))?.difference.abs();
    let s3 = lib(scaling_check(&lib(PeriodicChargeConfig::bcc(1.0))?, &sc, 8.0))?.difference.abs();
    let ok = (ewald - direct).abs() <= 1e-6 && gaps.iter().all(|&g| g > 0.0) && s2 <= 1e-8 && s3 <= 1e-8;
    ensure(
        ok,
        format!(
            "Ewald − direct = {:.1e}; W(square) − W(triangular) = {:.5}, {:.5}; scaling residuals {s2:.1e} (2D), {s3:.1e} (3D)",
            ewald - direct,
            gaps[0],
            gaps[1]
        ),
    )
}

fn de_finetti() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut worst_gap = 0.0f64;
    for n in [4, 8, 16] {
        for k in [1, 2] {
            let quad = lib(SphereQuadrature::exact(2, n + k))?;
            for seed in 0..100 {
                let g = lib(SymmetricState::random_mixed(n, 2, 1000 * n as u64 + seed))?;
                let e = lib(definetti_error(&g, k))?;
                worst_ratio = worst_ratio.max(e.trace_distance / e.bound);
                let direct = lib(lib(lower_symbol(&g, &quad))?.moment(k))?;
                worst_gap = worst_gap.max((lib(ckmr_formula(&g, k))? - direct).norm());
            }
        }
    }
    // fixed family: the product states u^{⊗N}
    let u = [Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)];
    let mut slopes = Vec::new();
    for k in [1, 2] {
        let pts: Vec<(f64, f64)> = [4usize, 8, 16]
            .iter()
            .map(|&n| {
                let e = lib(definetti_error(&lib(SymmetricState::product(n, &u))?, k))?.trace_distance;
                Ok(((n as f64).ln(), e.ln()))
            })
            .collect::<Result<_, String>>()?;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        slopes.push(num / den);
    }
    let ok = worst_ratio <= 1.0 && worst_gap <= 1e-6 && slopes.iter().all(|s| (-1.3..=-0.7).contains(s));
    ensure(
        ok,
        format!(
            "max error/bound {worst_ratio:.4} over 600 states; formula vs quadrature {worst_gap:.1e}; slopes {:.3} (k=1), {:.3} (k=2)",
            slopes[0], slopes[1]
        ),
    )
}

fn smeared_gaussian(radius: f64, r: f64) -> f64 {
    let (s, w) = gauss_legendre(60, 0.0, radius);
    let acc: f64 =
        s.iter().zip(&w).map(|(si, wi)| wi * 2.0 * si * (-(r - si).powi(2)).exp() * bessel_i0_scaled(2.0 * r * si)).sum();
    acc / (PI * radius * radius)
}

fn anyon() -> Outcome {
    let opts = MinimizeOptions { restarts: 1, ..Default::default() };
    let params = |beta: f64| AfParams { beta, radius: 0.25, potential: TrapPotential::Harmonic };
    let grid = |p: &AfParams| Grid::new(64, p.default_box());

    let p0 = params(0.0);
    let e0 = lib(minimize_af(&p0, lib(grid(&p0))?, &opts))?.energy;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut grad = 0.0f64;
    for beta in [0.5, 1.0, 2.0] {
        let p = params(beta);
        let g = lib(grid(&p))?;
        let f = lib(AfFunctional::new(p, g))?;
        let c: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))).collect();
        let mut u = GridField2D::from_fn(g, |x, y| {
            let z = Complex64::new(x, y);
            (Complex64::new(1.0, 0.0) + c[0] * z + c[1] * z.conj() + c[2] * z * z + c[3] * z.conj() * z.conj())
                * (-(x * x + y * y) / 2.0).exp()
        });
        u.normalize();
        grad = grad.max(lib(gradient_check(&f, &u, 3))?);
        let e = lib(af_energy(&u, &p))?;
        let abs_u = GridField2D { grid: g, values: u.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect() };
        if e < lib(af_energy(&abs_u, &params(0.0)))? {
            return Err(format!("diamagnetic inequality fails at β = {beta}"));
        }
    }

    let radius = 0.5;
    let g = lib(Grid::new(128, 6.0))?;
    let rho: Vec<f64> = (0..g.len())
        .map(|k| {
            let (x, y) = g.point(k);
            (-(x * x + y * y)).exp() / PI
        })
        .collect();
    let curl = lib(gauge_field(&rho, g, radius))?.curl();
    let (mut num, mut den) = (0.0, 0.0);
    for (k, c) in curl.iter().enumerate().filter(|(_, c)| !c.is_nan()) {
        let (x, y) = g.point(k);
        let expect = 2.0 * PI * smeared_gaussian(radius, x.hypot(y));
        num += (c - expect).powi(2);
        den += expect * expect;
    }
    let curl_err = (num / den).sqrt();

    let mut lowest_gap = f64::INFINITY;
    let mut parity = 0.0f64;
    for beta in [0.5, 1.0, 2.0] {
        let p = params(beta);
        let g = lib(grid(&p))?;
        let plus = lib(minimize_af(&p, g, &opts))?.energy;
        let minus = lib(minimize_af(&params(-beta), g, &opts))?.energy;
        lowest_gap = lowest_gap.min(plus - e0);
        parity = parity.max((plus - minus).abs() / plus);
    }
    let ok = (e0 - 2.0).abs() <= 0.02 && grad <= 1e-5 && curl_err <= 1e-3 && lowest_gap >= 0.0 && parity <= 1e-6;
    ensure(
        ok,
        format!(
            "E(β=0) = {e0:.8}; gradient residual {grad:.1e}; curl error {curl_err:.1e}; min E(β) − E(0) = {lowest_gap:.4}; max |E(β) − E(−β)|/E = {parity:.1e}"
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("run");
    let out_s = out.to_string_lossy().into_owned();
    let commands: [&[&str]; 9] = [
        &["tf-vortex", "--omega0", "5"],
        &["gl1d", "--b", "1.3", "--scan-b", "1.2:1.4:2"],
        &["scatlen", "--potential", "soft", "--V0", "3"],
        &["coulomb-mc", "--n", "30", "--sweeps", "4000", "--chains", "2"],
        &["laughlin", "--N", "30", "--m", "30", "--sweeps", "4000", "--chains", "2"],
        &["bathtub"],
        &["jellium", "--lattice", "fcc", "--eta", "0.05"],
        &["definetti", "--N", "6", "--k", "2", "--dump-matrices"],
        &["anyon", "--beta", "1", "--grid", "48", "--restarts", "2"],
    ];
    for cmd in commands {
        let mut args = vec!["meanfield-lab"];
        args.extend_from_slice(cmd);
        args.extend_from_slice(&["--seed", "17", "--threads", "1", "--out", &out_s]);
        let mut runs = Vec::new();
        for _ in 0..2 {
            let _ = fs::remove_dir_all(&out);
            let code = meanfield_lab::cli::run_quiet(&args);
            if code != 0 {
                return Err(format!("{} exited with {code}", cmd[0]));
            }
            runs.push(snapshot(&out));
        }
        if runs[0].is_empty() || runs[0] != runs[1] {
            return Err(format!("{} outputs differ between identical runs", cmd[0]));
        }
    }
    Ok(format!("{} subcommands byte-identical on rerun with --threads 1", commands.len()))
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("critical speed", Duration::from_secs(1), critical_speed),
        ("vortex density", Duration::from_secs(1), vortex_density_shape),
        ("de Gennes constant", Duration::from_secs(10), de_gennes_constant),
        ("GL energy identity", Duration::from_secs(30), gl_identity),
        ("scattering length", Duration::from_secs(5), scattering),
        ("circular law", Duration::from_secs(120), circular_law),
        ("Laughlin incompressibility", Duration::from_secs(300), laughlin_incompressibility),
        ("bath-tub energy", Duration::from_secs(1), bath_tub),
        ("jellium", Duration::from_secs(60), jellium),
        ("de Finetti", Duration::from_secs(120), de_finetti),
        ("anyon functional", Duration::from_secs(180), anyon),
        ("determinism", Duration::from_secs(300), determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    println!();
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (mut pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let slow = elapsed > budget;
        pass &= !slow;
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name:<27} {:>7.2}s/{:<4}s {detail}{}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if slow { " (over time budget)" } else { "" }
        );
    }
    println!("\nacceptance: {failures} failed");
    if failures > 0 {
        std::process::exit(1);
    }
}
