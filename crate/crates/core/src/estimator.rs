//! Piecewise-constant kernel estimator attaining the sup-norm minimax rate
//! over Hölder classes on a compact surface.
//!
//! Given `n` noisy samples, the estimator picks `m` roughly equidistant
//! centres among the design points, averages the responses around each centre
//! with the kernel `(1 - (κ ρ)^β)_+`, and extends each average to the
//! Voronoi cell of its centre.
//!
//! The constants follow the sharp asymptotics:
//!
//! * `ψ_n = (log n / n)^{β/(2β+d)}`
//! * `C_0 = L^{d/(2β+d)} (σ² vol M (β+d) d² / (vol S^{d-1} β²))^{β/(2β+d)}`
//! * `κ = (C_0 ψ_n / L)^{-1/β}`
//! * `m = ⌊C_1 (L (2β+d) / (δ C_0 d ψ_n))^{d/β}⌋`, clamped to `[1, n]`, with
//!   `C_1 = d vol M / vol S^{d-1}` from the covering-radius bound.

use crate::error::{Error, Result};
use crate::mesh::{equidistant_points, sphere_surface_volume, ManifoldKind, Point};
use crate::synth::SeededStream;

/// Default `δ` in the centre-count formula.
pub const DEFAULT_DELTA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Hölder exponent, in `(0, 1]`.
    pub beta: f64,
    /// Hölder constant `L`.
    pub lipschitz: f64,
    /// Noise standard deviation.
    pub sigma: f64,
    pub delta: f64,
    pub manifold: ManifoldKind,
    /// Sample size.
    pub n: usize,
}

impl EstimatorConfig {
    pub fn new(beta: f64, lipschitz: f64, sigma: f64, delta: f64, manifold: ManifoldKind, n: usize) -> Result<Self> {
        let cfg = EstimatorConfig { beta, lipschitz, sigma, delta, manifold, n };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::invalid(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        for (name, v) in [("L", self.lipschitz), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        // sigma = 0 is the noiseless limit: C_0 = 0, κ = ∞, every design point its own centre
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be non-negative, got {}", self.sigma)));
        }
        if self.n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    /// `ψ_n` at this configuration's sample size.
    pub fn psi(&self) -> Result<f64> {
        rate_psi(self.n, self.beta, self.dim())
    }
}

/// `ψ_n = (log n / n)^{β/(2β+d)}`.
pub fn rate_psi(n: usize, beta: f64, d: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("rate needs n >= 2, got {n}")));
    }
    if beta.is_nan() || beta <= 0.0 || d == 0 {
        return Err(Error::invalid("rate needs beta > 0 and d >= 1"));
    }
    let n = n as f64;
    Ok((n.ln() / n).powf(beta / (2.0 * beta + d as f64)))
}

/// The sharp constant `C_0`.
pub fn constant_c0(cfg: &EstimatorConfig) -> f64 {
    let (b, d) = (cfg.beta, cfg.dim() as f64);
    let sphere = sphere_surface_volume(cfg.dim()).expect("dimension is positive");
    let inner = cfg.sigma * cfg.sigma * cfg.manifold.volume() * (b + d) * d * d / (sphere * b * b);
    cfg.lipschitz.powf(d / (2.0 * b + d)) * inner.powf(b / (2.0 * b + d))
}

/// `C_1 = d vol M / vol S^{d-1}`.
pub fn constant_c1(m: &ManifoldKind) -> f64 {
    m.dim() as f64 * m.volume() / sphere_surface_volume(m.dim()).expect("dimension is positive")
}

fn check_psi(psi: f64) -> Result<()> {
    if !(psi > 0.0 && psi <= 1.0) {
        return Err(Error::invalid(format!("psi must lie in (0, 1], got {psi}")));
    }
    Ok(())
}

/// `κ = (C_0 ψ / L)^{-1/β}`; the kernel support radius is `1/κ`.
pub fn bandwidth_kappa(cfg: &EstimatorConfig, psi: f64) -> Result<f64> {
    check_psi(psi)?;
    Ok((constant_c0(cfg) * psi / cfg.lipschitz).powf(-1.0 / cfg.beta))
}

/// Number of centres, clamped to `[1, n]`.
pub fn center_count_m(cfg: &EstimatorConfig, psi: f64) -> Result<usize> {
    check_psi(psi)?;
    let (b, d) = (cfg.beta, cfg.dim() as f64);
    let ratio = cfg.lipschitz * (2.0 * b + d) / (cfg.delta * constant_c0(cfg) * d * psi);
    let raw = (constant_c1(&cfg.manifold) * ratio.powf(d / b)).floor();
    Ok(if raw.is_nan() { 1 } else { raw.clamp(1.0, cfg.n as f64) as usize })
}

/// `(1 - (κ ρ(center, w))^β)_+`, equal to 1 at `ρ = 0` even when `κ = ∞`.
pub fn kernel_weight(kappa: f64, beta: f64, center: &Point, w: &Point, m: &ManifoldKind) -> f64 {
    let rho = m.rho(center, w);
    if rho == 0.0 {
        return 1.0;
    }
    (1.0 - (kappa * rho).powf(beta)).max(0.0)
}

/// Design points with their responses.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSample {
    pub points: Vec<Point>,
    pub responses: Vec<f64>,
}

impl DesignSample {
    pub fn new(m: &ManifoldKind, points: Vec<Point>, responses: Vec<f64>) -> Result<Self> {
        if points.len() != responses.len() {
            return Err(Error::invalid(format!(
                "{} points but {} responses",
                points.len(),
                responses.len()
            )));
        }
        for p in &points {
            m.validate(p)?;
        }
        if let Some(i) = responses.iter().position(|y| !y.is_finite()) {
            return Err(Error::invalid(format!("non-finite response at row {i}")));
        }
        Ok(DesignSample { points, responses })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A fitted piecewise-constant function.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorModel {
    pub config: EstimatorConfig,
    pub kappa: f64,
    /// Centre count from the formula, before collisions were dropped.
    pub requested_m: usize,
    pub centers: Vec<Point>,
    pub values: Vec<f64>,
}

impl EstimatorModel {
    /// Index of the nearest centre, lowest index on ties.
    pub fn cell_index(&self, x: &Point) -> usize {
        let m = &self.config.manifold;
        let mut best = (0usize, f64::INFINITY);
        for (j, c) in self.centers.iter().enumerate() {
            let d = m.rho(c, x);
            if d < best.1 {
                best = (j, d);
            }
        }
        best.0
    }

    pub fn evaluate(&self, x: &Point) -> f64 {
        self.values[self.cell_index(x)]
    }

    pub fn m(&self) -> usize {
        self.centers.len()
    }
}

pub fn evaluate(model: &EstimatorModel, x: &Point) -> f64 {
    model.evaluate(x)
}

fn nearest_index(m: &ManifoldKind, target: &Point, pts: &[Point]) -> usize {
    let mut best = (0usize, f64::INFINITY);
    for (i, p) in pts.iter().enumerate() {
        let d = m.rho(target, p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Fits the estimator with the centre count given by the formula.
pub fn fit(cfg: &EstimatorConfig, sample: &DesignSample) -> Result<EstimatorModel> {
    cfg.validate()?;
    if sample.len() < 2 {
        return Err(Error::invalid(format!("fit needs at least 2 samples, got {}", sample.len())));
    }
    if sample.len() != cfg.n {
        return Err(Error::invalid(format!(
            "config expects n = {} but the sample has {} rows",
            cfg.n,
            sample.len()
        )));
    }
    let psi = cfg.psi()?;
    let m = center_count_m(cfg, psi)?;
    fit_with_center_count(cfg, sample, m)
}

/// Fits with an explicit centre count `m` (before deduplication).
///
/// Ideal equidistant points are snapped to their nearest design points;
/// collisions are dropped, so the model may end up with fewer than `m` cells.
pub fn fit_with_center_count(cfg: &EstimatorConfig, sample: &DesignSample, m: usize) -> Result<EstimatorModel> {
    cfg.validate()?;
    if sample.len() < 2 {
        return Err(Error::invalid(format!("fit needs at least 2 samples, got {}", sample.len())));
    }
    if m == 0 || m > sample.len() {
        return Err(Error::invalid(format!("centre count {m} outside [1, {}]", sample.len())));
    }
    let manifold = &cfg.manifold;
    let kappa = bandwidth_kappa(cfg, rate_psi(sample.len(), cfg.beta, cfg.dim())?)?;

    let mut chosen = vec![false; sample.len()];
    let mut center_ids = Vec::with_capacity(m);
    for ideal in equidistant_points(manifold, m)? {
        let i = nearest_index(manifold, &ideal, &sample.points);
        if !chosen[i] {
            chosen[i] = true;
            center_ids.push(i);
        }
    }

    let centers: Vec<Point> = center_ids.iter().map(|&i| sample.points[i]).collect();
    // averaged as offsets from the centre's own response, which is exact on constant data
    let values = center_ids
        .iter()
        .map(|&ci| {
            let (c, base) = (&sample.points[ci], sample.responses[ci]);
            let (mut num, mut den) = (0.0, 0.0);
            for (x, y) in sample.points.iter().zip(&sample.responses) {
                let w = kernel_weight(kappa, cfg.beta, c, x, manifold);
                num += w * (y - base);
                den += w;
            }
            base + num / den
        })
        .collect();

    Ok(EstimatorModel {
        config: *cfg,
        kappa,
        requested_m: m,
        centers,
        values,
    })
}

/// `max_p |f̂(p) − f(p)|` over a probe set standing in for the supremum.
pub fn sup_norm_error(model: &EstimatorModel, truth: impl Fn(&Point) -> f64, probes: &[Point]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::invalid("sup-norm error needs at least one probe"));
    }
    Ok(probes
        .iter()
        .map(|p| (model.evaluate(p) - truth(p)).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderReport {
    pub holds: bool,
    /// Largest observed `|f(x) − f(z)| / ρ(x, z)^β`.
    pub max_ratio: f64,
}

/// Samples `trials` uniform random pairs and checks
/// `|f(x) − f(z)| <= L ρ(x, z)^β` on each.
pub fn holder_check(
    f: impl Fn(&Point) -> f64,
    m: &ManifoldKind,
    beta: f64,
    lipschitz: f64,
    trials: usize,
    seed: u64,
) -> Result<HolderReport> {
    if trials == 0 {
        return Err(Error::invalid("holder check needs at least one trial"));
    }
    let mut rng = SeededStream::new(seed, 0);
    let mut max_ratio: f64 = 0.0;
    let mut holds = true;
    for _ in 0..trials {
        let x = crate::synth::random_point(m, &mut rng);
        let z = crate::synth::random_point(m, &mut rng);
        let dist = m.rho(&x, &z).powf(beta);
        let diff = (f(&x) - f(&z)).abs();
        if dist > 0.0 {
            max_ratio = max_ratio.max(diff / dist);
        }
        // relative slack for rounding in f
        if diff > lipschitz * dist + 1e-12 {
            holds = false;
        }
    }
    Ok(HolderReport { holds, max_ratio })
}
