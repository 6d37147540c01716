//! One argument struct per subcommand. Field names double as config-file
//! keys: the serde names are exactly the long flag names.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::output::{matrix_dump, read_matrix, sample_dump, RunOutput};
use crate::anyon::{gauge_field, minimize_af, AfParams, Grid, MinimizeOptions, TrapPotential};
use crate::coulomb_gas::{
    bathtub, bl_distance, default_bandwidth, equilibrium_measure_radial, laughlin_sampler, quasihole_mf_density,
    radial_cells, radial_w1_distance, run_chains, LaughlinPlasmaSpec, Potential, QuasiholeGrid, RadialHistogram,
    SamplerOptions,
};
use crate::definetti::{
    ckmr_moments, definetti_error, lower_symbol, reduced_dm, sym_dim, SphereQuadrature, SymmetricState,
};
use crate::jellium::{field_energy_eta, kappa_constants, PeriodicChargeConfig, Profile, SmearedCharge};
use crate::tf_vortex::{critical_speed_by_bisection, first_critical_speed, tf_profile, vortex_density, VortexGrid};
use crate::variational_1d::{
    curvature_constants, minimize_gl1d, scattering_length, soft_ball_length, theta0, Gl1dGrid, GlParams,
    HalfLineGrid, ScatteringPotential,
};
use crate::{Error, Result};

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
    pub emit_plot_data: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TfVortexArgs {
    /// Trap exponent, V = |x|^s with s ≥ 2.
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Rescaled rotation speed Ω₀.
    #[arg(long, default_value_t = 3.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = 2001)]
    pub grid_points: usize,
    /// Relative distance to the Thomas-Fermi edge excluded from the grid.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
}

impl TfVortexArgs {
    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let p = tf_profile(self.s)?;
        let m = vortex_density(&p, self.omega0, VortexGrid { points: self.grid_points, delta: self.delta })?;
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "lambda_tf": p.lambda_tf,
                "r_tf": p.r_tf,
                "omega1": first_critical_speed(self.s)?,
                "omega1_bisection": critical_speed_by_bisection(self.s, 1e-12)?,
                "I_tf": p.scaled_energy(),
                "omega0": self.omega0,
                "support_radius": m.support_radius(),
                "flatness_inner_80": m.flatness(self.omega0, 0.8),
            }),
        )?;
        if ctx.emit_plot_data {
            let cost = crate::tf_vortex::cost_function(&p, self.omega0)?;
            let rho: Vec<f64> = m.r.iter().map(|&r| p.eval(r)).collect();
            let f: Vec<f64> = m.r.iter().map(|&r| cost.f_tf_exact(r)).collect();
            out.csv("profile.csv", &["r", "rho_tf", "F_tf", "H_tf", "mu_star"], &[&m.r, &rho, &f, &m.h_tf, &m.mu_star]);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Gl1dArgs {
    /// Field ratio b ∈ (1, Θ₀⁻¹).
    #[arg(long, default_value_t = 1.4)]
    pub b: f64,
    /// Boundary curvature.
    #[arg(long, default_value_t = 0.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Domain length factor: curved problems live on [0, c0 |log eps|].
    #[arg(long, default_value_t = 2.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 120)]
    pub nodes: usize,
    /// Domain length of the flat problem.
    #[arg(long, default_value_t = 12.0)]
    pub t_flat: f64,
    /// Also tabulate the flat problem for `n` values of b in [lo, hi], as `lo:hi:n`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_b: Option<String>,
}

fn parse_scan(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::invalid(format!("scan {spec:?} is not of the form lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    })
}

impl Gl1dArgs {
    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let grid = Gl1dGrid { nodes: self.nodes, t_flat: self.t_flat };
        let th = theta0(HalfLineGrid::default())?;
        let p = GlParams { b: self.b, k: self.k, eps: self.eps, c0: self.c0 };
        let min = minimize_gl1d(&p, grid)?;
        let cc = curvature_constants(self.b, grid)?;
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "theta0": th.theta0,
                "theta0_inverse": 1.0 / th.theta0,
                "E1D": min.energy,
                "alpha": min.profile.alpha,
                "C1": cc.c1,
                "C2": cc.c2,
                "C1_identity_error": cc.c1_identity_error(),
                "C2_corr": cc.c2_corr,
                "newton_iterations": min.newton_iterations,
            }),
        )?;
        if ctx.emit_plot_data {
            out.csv("profile.csv", &["t", "f"], &[&min.profile.t, &min.profile.f]);
        }
        if let Some(spec) = &self.scan_b {
            let bs = parse_scan(spec)?;
            let mut cols = vec![Vec::new(); 5];
            for &b in &bs {
                let c = curvature_constants(b, grid)?;
                for (col, v) in cols.iter_mut().zip([b, c.e0, c.alpha0, c.c1, c.c2]) {
                    col.push(v);
                }
            }
            let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
            out.csv("scan.csv", &["b", "E1D", "alpha", "C1", "C2"], &refs);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScatteringKind {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScatlenArgs {
    #[arg(long, value_enum, default_value_t = ScatteringKind::Soft)]
    pub potential: ScatteringKind,
    /// Range of the potential.
    #[arg(long = "R0", default_value_t = 1.0)]
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Height of the soft ball.
    #[arg(long = "V0", default_value_t = 1.0)]
    #[serde(rename = "V0")]
    pub v0: f64,
}

impl ScatlenArgs {
    pub fn run(&self, _ctx: &Context) -> Result<RunOutput> {
        let (w, exact) = match self.potential {
            ScatteringKind::Hard => (ScatteringPotential::HardSphere, self.r0),
            ScatteringKind::Soft => (ScatteringPotential::soft_ball(self.v0), soft_ball_length(self.v0, self.r0)),
        };
        let res = scattering_length(&w, self.r0)?;
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "a": res.a,
                "a_closed_form": exact,
                "energy": res.energy,
                "eight_pi_a": 8.0 * PI * res.a,
                "integral_w": w.integral(self.r0),
            }),
        )?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CoulombArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 4.0)]
    pub beta: f64,
    /// Exponent of the trap V = |x|^s.
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Production sweeps summed over chains.
    #[arg(long, default_value_t = 20_000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 2_000)]
    pub warmup: usize,
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
    #[arg(long, default_value_t = 300)]
    pub bins: usize,
    #[arg(long, default_value_t = 3.0)]
    pub r_max: f64,
}

impl CoulombArgs {
    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let v = Potential::Power { s: self.s, scale: 1.0 };
        let mu0 = equilibrium_measure_radial(&v, self.d, 1.0)?;
        let opts = SamplerOptions {
            sweeps: self.sweeps,
            warmup: self.warmup,
            thin: self.thin,
            chains: self.chains,
            seed: ctx.seed,
        };
        let run = run_chains(self.d, self.n, self.beta, v, &opts)?;
        let h = default_bandwidth(self.n);
        let hist = RadialHistogram::from_radii(&run.radii(), self.d, self.r_max, self.bins);
        let smooth = hist.smoothed(h);
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "energy_mean": run.energy_mean(),
                "energy_variance": run.energy_variance(),
                "acceptance": run.acceptance,
                "samples": run.count(),
                "bandwidth": h,
                "bl_distance": bl_distance(&smooth, &mu0),
                "w1_distance": radial_w1_distance(&smooth, &mu0),
                "support": mu0.support(),
            }),
        )?;
        if ctx.emit_plot_data {
            let r = hist.centers();
            let eq: Vec<f64> = r.iter().map(|&x| mu0.density(x)).collect();
            out.csv("histogram.csv", &["r", "density", "smoothed", "equilibrium"], &[&r, &hist.density(), &smooth.density(), &eq]);
            out.bytes("samples.bin", sample_dump(self.n, self.d, &run.samples.points));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LaughlinArgs {
    /// Number of particles.
    #[arg(long = "N", default_value_t = 100)]
    #[serde(rename = "N")]
    pub n: usize,
    /// Laughlin exponent ℓ.
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    /// Quasi-hole degree m.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    #[arg(long, default_value_t = 40_000)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 2_000)]
    pub warmup: usize,
    #[arg(long, default_value_t = 20)]
    pub thin: usize,
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
}

impl LaughlinArgs {
    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let spec = LaughlinPlasmaSpec { n: self.n, ell: self.ell, m: self.m };
        let opts = SamplerOptions {
            sweeps: self.sweeps,
            warmup: self.warmup,
            thin: self.thin,
            chains: self.chains,
            seed: ctx.seed,
        };
        let run = laughlin_sampler(&spec, &opts)?;
        let mf = quasihole_mf_density(self.n, self.m as u64, self.ell, &QuasiholeGrid::default())?;
        let (r1, r2) = run.annulus_radii();
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "energy_mean": run.summary.energy_mean(),
                "energy_variance": run.summary.energy_variance(),
                "acceptance": run.summary.acceptance,
                "samples": run.summary.count(),
                "max_smoothed_density": run.max_smoothed_density(),
                "incompressibility_cap": run.cap(),
                "annulus_inner": r1,
                "annulus_outer": r2,
                "mean_field_support": mf.support(),
                "radial_excess_kurtosis": run.radial_excess_kurtosis(),
            }),
        )?;
        if ctx.emit_plot_data {
            let r = run.smoothed.centers();
            let mfd: Vec<f64> = r.iter().map(|&x| mf.density(x)).collect();
            out.csv("density.csv", &["r", "sampled", "smoothed", "mean_field"], &[&r, &run.histogram.density(), &run.smoothed.density(), &mfd]);
            out.bytes("samples.bin", sample_dump(self.n, 2, &run.summary.samples.points));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BathtubArgs {
    /// Exponent of V = r^s.
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Density cap; the default is 1/(2π).
    #[arg(long, default_value_t = 1.0 / (2.0 * PI))]
    pub cap: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 4000)]
    pub cells: usize,
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
}

impl BathtubArgs {
    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let v = Potential::Power { s: self.s, scale: 1.0 };
        let cells = radial_cells(&v, self.r_max, self.cells);
        let res = bathtub(&cells, self.cap, self.mass)?;
        // the minimizer is cap·𝟙 on the disc of area mass/cap
        let radius = (self.mass / (PI * self.cap)).sqrt();
        let exact = 2.0 * PI * self.cap * radius.powf(self.s + 2.0) / (self.s + 2.0);
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({ "energy": res.energy, "energy_closed_form": exact, "level": res.level, "radius": radius }),
        )?;
        if ctx.emit_plot_data {
            let edges = cells.radial_edges.clone().unwrap_or_default();
            let mid: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            out.csv("density.csv", &["r", "rho"], &[&mid, &res.rho]);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Square,
    Triangular,
    Cubic,
    Bcc,
    Fcc,
    /// Read from `--basis`.
    Custom,
}

/// Contents of a `--basis` file (TOML).
#[derive(Debug, Deserialize)]
struct CellFile {
    basis: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
    multiplicities: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct JelliumArgs {
    #[arg(long, value_enum, default_value_t = LatticeKind::Triangular)]
    pub lattice: LatticeKind,
    /// Smearing radius η.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Background density.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Dimension; checked against the lattice when given.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// TOML cell with `basis`, `points` and optional `multiplicities`; rescaled to density m.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<PathBuf>,
    /// Charge profile: `uniform` or `bump:k` for (1 − r²)^k.
    #[arg(long, default_value = "uniform")]
    pub profile: String,
}

fn parse_profile(s: &str) -> Result<Profile> {
    if s == "uniform" {
        return Ok(Profile::UniformBall);
    }
    s.strip_prefix("bump:")
        .and_then(|k| k.parse().ok())
        .map(Profile::Bump)
        .ok_or_else(|| Error::invalid(format!("profile {s:?} is neither uniform nor bump:<k>")))
}

impl JelliumArgs {
    fn cell(&self) -> Result<PeriodicChargeConfig> {
        let cfg = match self.lattice {
            LatticeKind::Custom => {
                let path = self.basis.as_ref().ok_or_else(|| Error::invalid("--lattice custom needs --basis <file>"))?;
                let text = fs::read_to_string(path)?;
                let file: CellFile = toml::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
                let mult = file.multiplicities.unwrap_or_else(|| vec![1; file.points.len()]);
                let unit = PeriodicChargeConfig {
                    d: file.basis.len(),
                    basis: file.basis.clone(),
                    points: file.points.clone(),
                    multiplicities: mult.clone(),
                    m: 1.0,
                };
                let charge = mult.iter().map(|&n| n as f64).sum::<f64>();
                PeriodicChargeConfig::new(file.basis, file.points, mult, charge / unit.volume())?.with_density(self.m)?
            }
            kind => {
                let name = kind.to_possible_value().expect("named lattice").get_name().to_string();
                PeriodicChargeConfig::named(&name, self.m)?
            }
        };
        if let Some(d) = self.d {
            if d != cfg.d {
                return Err(Error::invalid(format!("--d {d} does not match the {}-dimensional lattice", cfg.d)));
            }
        }
        Ok(cfg)
    }

    pub fn run(&self, _ctx: &Context) -> Result<RunOutput> {
        let cfg = self.cell()?;
        let sc = SmearedCharge { eta: self.eta, profile: parse_profile(&self.profile)? };
        let e = field_energy_eta(&cfg, &sc)?;
        let kc = kappa_constants(sc, cfg.d)?;
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "d": cfg.d,
                "W_eta": e.w_eta,
                "field_energy": e.field_energy,
                "kappa_d": kc.kappa,
                "gamma2": kc.gamma2,
                "ewald": {
                    "alpha": e.alpha,
                    "real_cutoff": e.real_cutoff,
                    "reciprocal_cutoff": e.reciprocal_cutoff,
                    "real_terms": e.real_terms,
                    "reciprocal_terms": e.reciprocal_terms,
                },
                "min_distance": e.min_distance,
            }),
        )?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DefinettiArgs {
    /// One-body dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of particles.
    #[arg(long = "N", default_value_t = 8)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// `product`, `mixed` (uses --seed), `mixed:<seed>` or `file:<path>` (complex matrix dump).
    #[arg(long, default_value = "mixed")]
    pub state: String,
    /// Write the state and both k-body matrices as complex matrix dumps.
    #[arg(long)]
    pub dump_matrices: bool,
}

impl DefinettiArgs {
    fn state(&self, seed: u64) -> Result<SymmetricState> {
        let s = self.state.as_str();
        if s == "product" {
            let u = vec![Complex64::new(1.0, 0.0); self.d];
            return SymmetricState::product(self.n, &u);
        }
        if s == "mixed" {
            return SymmetricState::random_mixed(self.n, self.d, seed);
        }
        if let Some(seed) = s.strip_prefix("mixed:") {
            let seed = seed.parse().map_err(|_| Error::invalid(format!("bad seed in {s:?}")))?;
            return SymmetricState::random_mixed(self.n, self.d, seed);
        }
        if let Some(path) = s.strip_prefix("file:") {
            return SymmetricState::new(self.n, self.d, read_matrix(&fs::read(path)?)?);
        }
        Err(Error::invalid(format!("state {s:?} is not product, mixed[:seed] or file:<path>")))
    }

    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let g = self.state(ctx.seed)?;
        let err = definetti_error(&g, self.k)?;
        let quad = SphereQuadrature::exact(self.d, self.n + self.k)?;
        let mu = lower_symbol(&g, &quad)?;
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "trace_distance": err.trace_distance,
                "bound": err.bound,
                "quadrature_mass": mu.mass(),
                "quadrature_nodes": quad.len(),
                "sym_dim": sym_dim(self.n, self.d)?,
            }),
        )?;
        if self.dump_matrices {
            out.bytes("state.cmat", matrix_dump(&g.matrix));
            out.bytes("gamma_k.cmat", matrix_dump(&reduced_dm(&g, self.k)?.matrix));
            out.bytes("gamma_tilde_k.cmat", matrix_dump(&ckmr_moments(&g, self.k)?));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnyonArgs {
    /// Scaled statistics parameter β.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Radius of the extended anyons.
    #[arg(long = "R", default_value_t = 0.25)]
    #[serde(rename = "R")]
    pub radius: f64,
    /// Trap: `harmonic` or `power:<s>` for |x|^s.
    #[arg(long = "V", default_value = "harmonic")]
    #[serde(rename = "V")]
    pub potential: String,
    /// Grid points per side (even).
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Box half-width; chosen from the trap and β when omitted.
    #[arg(long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 2)]
    pub restarts: usize,
    #[arg(long = "max-iter", default_value_t = 5000)]
    #[serde(rename = "max-iter")]
    pub max_iter: usize,
}

fn parse_trap(s: &str) -> Result<TrapPotential> {
    if s == "harmonic" {
        return Ok(TrapPotential::Harmonic);
    }
    s.strip_prefix("power:")
        .and_then(|x| x.parse().ok())
        .map(TrapPotential::Power)
        .ok_or_else(|| Error::invalid(format!("trap {s:?} is neither harmonic nor power:<s>")))
}

impl AnyonArgs {
    pub fn params(&self) -> Result<AfParams> {
        let p = AfParams { beta: self.beta, radius: self.radius, potential: parse_trap(&self.potential)? };
        p.validate()?;
        Ok(p)
    }

    /// Fills in the box half-width.
    pub fn resolve(&mut self) -> Result<()> {
        if self.l.is_none() {
            self.l = Some(self.params()?.default_box());
        }
        Ok(())
    }

    pub fn run(&self, ctx: &Context) -> Result<RunOutput> {
        let p = self.params()?;
        let grid = Grid::new(self.grid, self.l.unwrap_or_else(|| p.default_box()))?;
        let opts = MinimizeOptions { tol: self.tol, restarts: self.restarts, seed: ctx.seed, max_iter: self.max_iter };
        let min = minimize_af(&p, grid, &opts)?;
        let rho = min.u.density();
        let a = gauge_field(&rho, grid, p.radius)?;
        let mut out = RunOutput::default();
        out.json(
            "summary.json",
            &json!({
                "E_af": min.energy,
                "iterations": min.iterations,
                "gradient_check_residual": min.gradient_residual,
                "restart_energies": min.restart_energies,
                "L": grid.l,
                "h": grid.h(),
                "boundary_ratio": min.u.boundary_ratio(),
                "angular_spread": min.u.angular_spread(&[0.5, 1.0, 1.5]),
                "max_field": a.ax.iter().zip(&a.ay).map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max),
            }),
        )?;
        if ctx.emit_plot_data {
            let (xs, ys): (Vec<f64>, Vec<f64>) = (0..grid.len()).map(|k| grid.point(k)).unzip();
            out.csv("density.csv", &["x", "y", "rho"], &[&xs, &ys, &rho]);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings() {
        let b = parse_scan("1.2:1.6:3").unwrap();
        assert!(b.len() == 3 && (b[1] - 1.4).abs() < 1e-15);
        assert!(parse_scan("1:2").is_err());
        assert_eq!(parse_profile("bump:3").unwrap(), Profile::Bump(3));
        assert!(parse_profile("cone").is_err());
        assert_eq!(parse_trap("power:4").unwrap(), TrapPotential::Power(4.0));
        assert!(parse_trap("power:x").is_err());
    }

    #[test]
    fn bathtub_closed_form() {
        let ctx = Context { seed: 0, emit_plot_data: false };
        let args = BathtubArgs { s: 2.0, cap: 1.0 / (2.0 * PI), mass: 1.0, cells: 4000, r_max: 2.0 };
        let out = args.run(&ctx).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.files[0].1).unwrap();
        assert!((v["energy"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((v["energy_closed_form"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    }
}
