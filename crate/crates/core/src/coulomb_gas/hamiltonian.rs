use crate::{Error, Result};

/// `n` points in `ℝ^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfiguration {
    pub d: usize,
    pub points: Vec<f64>,
}

impl ParticleConfiguration {
    pub fn new(d: usize, points: Vec<f64>) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(Error::invalid(format!("dimension {d} not supported (2 or 3)")));
        }
        if points.is_empty() || points.len() % d != 0 {
            return Err(Error::invalid("need n ≥ 1 points with d coordinates each"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        Ok(ParticleConfiguration { d, points })
    }

    pub fn n(&self) -> usize {
        self.points.len() / self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.point(i).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(|i| self.radius(i))
    }
}

/// Radial one-body potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Zero,
    /// `scale · |x|^s`
    Power { s: f64, scale: f64 },
    /// `scale · (|x|² − 2γ log|x|)`, 2D only.
    LogPerturbed { gamma: f64, scale: f64 },
}

impl Potential {
    pub fn harmonic() -> Self {
        Potential::Power { s: 2.0, scale: 1.0 }
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Power { s, scale } => scale * r.powf(s),
            Potential::LogPerturbed { gamma, scale } => {
                if gamma == 0.0 {
                    scale * r * r
                } else {
                    scale * (r * r - 2.0 * gamma * r.ln())
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_radius(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Growth condition: `V → ∞` (d ≥ 3) or `V/2 − log|x| → ∞` (d = 2).
    pub fn check_confining(&self, d: usize) -> Result<()> {
        let ok = match *self {
            Potential::Zero => false,
            Potential::Power { s, scale } => s > 0.0 && scale > 0.0,
            Potential::LogPerturbed { gamma, scale } => d == 2 && scale > 0.0 && gamma >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("potential {self:?} is not confining in d = {d}")))
        }
    }
}

/// Pair interaction `w`: `−log r` in 2D, `1/r` in 3D.
pub(crate) fn pair_w(d: usize, r: f64) -> f64 {
    if d == 2 {
        -r.ln()
    } else {
        1.0 / r
    }
}

/// `H_n = Σ_{i≠j} w(x_i − x_j) + n Σ V(x_i)` over ordered pairs.
pub fn hamiltonian(cfg: &ParticleConfiguration, v: &Potential) -> Result<f64> {
    let n = cfg.n();
    let mut pairs = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = dist(cfg.point(i), cfg.point(j));
            if r == 0.0 {
                return Err(Error::invalid(format!("points {i} and {j} coincide")));
            }
            pairs += pair_w(cfg.d, r);
        }
    }
    let one_body: f64 = (0..n).map(|i| v.eval(cfg.point(i))).sum();
    Ok(2.0 * pairs + n as f64 * one_body)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
