//! Test functions, design sampling and Gaussian noise.
//!
//! All randomness comes from [`SeededStream`]: ChaCha8 keyed by
//! `rand_core::SeedableRng::seed_from_u64(seed)` with the ChaCha stream id set
//! to `stream`. Uniforms are `(next_u64 >> 11) * 2^-53`; normals come from the
//! Box–Muller transform, consuming two uniforms `u1, u2` per pair and emitting
//! `sqrt(-2 ln(1 - u1)) cos(2π u2)` followed by the matching `sin` term.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::io::{format_f64, format_manifold, parse_f64, parse_manifold};
use crate::mesh::{equidistant_points, ManifoldKind, Point};

pub struct SeededStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededStream { rng, spare: None }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * PI * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }
}

/// Area-uniform random point on `m`.
pub fn random_point(m: &ManifoldKind, rng: &mut SeededStream) -> Point {
    match *m {
        ManifoldKind::Disk { radius } => loop {
            let x = radius * (2.0 * rng.uniform() - 1.0);
            let y = radius * (2.0 * rng.uniform() - 1.0);
            if x * x + y * y <= radius * radius {
                return Point::Planar([x, y]);
            }
        },
        ManifoldKind::Sphere2 => loop {
            let v = [rng.normal(), rng.normal(), rng.normal()];
            if v.iter().map(|c| c * c).sum::<f64>() > 1e-24 {
                return ManifoldKind::sphere_point(v);
            }
        },
        ManifoldKind::Torus2 { l1, l2 } => Point::Toroidal([rng.uniform() * l1, rng.uniform() * l2]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignScheme {
    Equidistant,
    UniformRandom,
}

impl std::str::FromStr for DesignScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equidistant" => Ok(DesignScheme::Equidistant),
            "uniform" | "uniform-random" => Ok(DesignScheme::UniformRandom),
            other => Err(Error::invalid(format!("unknown design scheme '{other}'"))),
        }
    }
}

impl DesignScheme {
    pub fn name(&self) -> &'static str {
        match self {
            DesignScheme::Equidistant => "equidistant",
            DesignScheme::UniformRandom => "uniform-random",
        }
    }
}

pub fn sample_design_with(m: &ManifoldKind, n: usize, scheme: DesignScheme, rng: &mut SeededStream) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::invalid("design size must be at least 1"));
    }
    match scheme {
        DesignScheme::Equidistant => equidistant_points(m, n),
        DesignScheme::UniformRandom => Ok((0..n).map(|_| random_point(m, rng)).collect()),
    }
}

pub fn sample_design(m: &ManifoldKind, n: usize, scheme: DesignScheme, seed: u64) -> Result<Vec<Point>> {
    sample_design_with(m, n, scheme, &mut SeededStream::new(seed, 0))
}

pub fn add_noise_with(values: &[f64], sigma: f64, rng: &mut SeededStream) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("noise level must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(values.to_vec());
    }
    Ok(values.iter().map(|v| v + sigma * rng.normal()).collect())
}

pub fn add_noise(values: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    add_noise_with(values, sigma, &mut SeededStream::new(seed, 0))
}

/// `height * (1 - (ρ(center, x) / width)^beta)_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub center: Point,
    pub height: f64,
    pub width: f64,
    pub beta: f64,
}

impl BumpSpec {
    pub fn new(center: Point, height: f64, width: f64, beta: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::invalid(format!("bump width must be positive, got {width}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::invalid(format!("bump exponent must lie in (0, 1], got {beta}")));
        }
        if !height.is_finite() {
            return Err(Error::invalid("bump height must be finite"));
        }
        Ok(BumpSpec { center, height, width, beta })
    }

    fn value(&self, m: &ManifoldKind, x: &Point) -> f64 {
        let t = m.rho(&self.center, x) / self.width;
        self.height * (1.0 - t.powf(self.beta)).max(0.0)
    }
}

/// Radius of the disk carrying the two-bump and unimodal fixtures.
pub const FIXTURE_DISK_RADIUS: f64 = 10.0;

/// Two-bump calibration: biweight bumps `h (1 - (r/w)^2)^2_+` of heights 2
/// and 1.4 at `(∓3, 0)`, both of width 4.7. The peaks sit at the centres
/// because each centre is outside the other bump's support, and the saddle on
/// the segment between them lies near 1.09.
pub const TWO_BUMP: [(f64, f64, f64); 2] = [(-3.0, 2.0, 4.7), (3.0, 1.4, 4.7)];
pub const TWO_BUMP_WIDTH: f64 = 4.7;
/// Levels below the saddle, between saddle and lower peak, and between the
/// two peaks: one, two and one holes respectively.
pub const TWO_BUMP_DISPLAY_LEVELS: [f64; 3] = [0.5, 1.25, 1.7];
/// Support radius of the unimodal comparator.
pub const UNIMODAL_WIDTH: f64 = 8.0;

fn biweight(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        let s = 1.0 - t * t;
        s * s
    }
}

/// The regression functions used by tests and experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// Calibrated two-bump function on the disk of radius 10, max 2.
    TwoBump,
    /// Single biweight bump of the given height at the disk centre, zero near
    /// the boundary.
    UnimodalRadial { max: f64 },
    /// `Σ θ_j bump_j` on any supported manifold.
    BumpMixture {
        manifold: ManifoldKind,
        terms: Vec<(f64, BumpSpec)>,
        disjoint: bool,
    },
    Constant { value: f64 },
}

impl FunctionSpec {
    pub fn bump_mixture(manifold: ManifoldKind, terms: Vec<(f64, BumpSpec)>, disjoint: bool) -> Result<Self> {
        for (theta, b) in &terms {
            if theta.is_nan() || theta.abs() > 1.0 {
                return Err(Error::invalid(format!("mixture coefficient {theta} outside [-1, 1]")));
            }
            manifold.validate(&b.center)?;
        }
        if disjoint {
            for (i, (_, a)) in terms.iter().enumerate() {
                for (_, b) in &terms[i + 1..] {
                    if manifold.rho(&a.center, &b.center) <= a.width + b.width {
                        return Err(Error::invalid("mixture flagged disjoint has overlapping supports"));
                    }
                }
            }
        }
        Ok(FunctionSpec::BumpMixture { manifold, terms, disjoint })
    }

    /// Manifold the function lives on; `None` for constants.
    pub fn manifold(&self) -> Option<ManifoldKind> {
        match self {
            FunctionSpec::TwoBump | FunctionSpec::UnimodalRadial { .. } => {
                Some(ManifoldKind::Disk { radius: FIXTURE_DISK_RADIUS })
            }
            FunctionSpec::BumpMixture { manifold, .. } => Some(*manifold),
            FunctionSpec::Constant { .. } => None,
        }
    }

    /// Nominal Hölder exponent and constant `(β, L)` of the fixture.
    pub fn holder_constants(&self) -> (f64, f64) {
        match self {
            // max gradient of the two-bump sum is about 0.655
            FunctionSpec::TwoBump => (1.0, 1.0),
            // biweight slope peaks at 8/(3√3) per unit width
            FunctionSpec::UnimodalRadial { max } => (1.0, max.abs() * 8.0 / (3.0 * 3f64.sqrt()) / UNIMODAL_WIDTH),
            FunctionSpec::BumpMixture { terms, disjoint, .. } => {
                let beta = terms.iter().map(|(_, b)| b.beta).fold(1.0, f64::min);
                // a bump of exponent b >= beta is also beta-Hölder on scales up to its width
                let consts = terms.iter().map(|(theta, b)| theta.abs() * b.height.abs() / b.width.powf(beta));
                let l = if *disjoint {
                    2f64.powf(1.0 - beta) * consts.fold(0.0, f64::max)
                } else {
                    consts.sum()
                };
                (beta, l)
            }
            FunctionSpec::Constant { .. } => (1.0, 0.0),
        }
    }

    /// Evaluates without checking that `x` lies on the manifold.
    pub(crate) fn value(&self, x: &Point) -> f64 {
        match self {
            FunctionSpec::TwoBump => {
                let Point::Planar([px, py]) = x else { return f64::NAN };
                TWO_BUMP
                    .iter()
                    .map(|&(cx, h, w)| h * biweight((px - cx).hypot(*py) / w))
                    .sum()
            }
            FunctionSpec::UnimodalRadial { max } => {
                let Point::Planar([px, py]) = x else { return f64::NAN };
                max * biweight(px.hypot(*py) / UNIMODAL_WIDTH)
            }
            FunctionSpec::BumpMixture { manifold, terms, .. } => {
                terms.iter().map(|(theta, b)| theta * b.value(manifold, x)).sum()
            }
            FunctionSpec::Constant { value } => *value,
        }
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        if let Some(m) = self.manifold() {
            m.validate(x)?;
        }
        Ok(self.value(x))
    }

    /// `key = value` serialization, one item per line.
    pub fn to_kv(&self) -> String {
        match self {
            FunctionSpec::TwoBump => "kind = two-bump\n".to_string(),
            FunctionSpec::UnimodalRadial { max } => format!("kind = unimodal\nmax = {}\n", format_f64(*max)),
            FunctionSpec::Constant { value } => format!("kind = constant\nvalue = {}\n", format_f64(*value)),
            FunctionSpec::BumpMixture { manifold, terms, disjoint } => {
                let mut s = format!(
                    "kind = bump-mixture\nmanifold = {}\ndisjoint = {}\n",
                    format_manifold(manifold),
                    disjoint
                );
                for (theta, b) in terms {
                    let coords: Vec<String> = b.center.coords().iter().map(|&c| format_f64(c)).collect();
                    s.push_str(&format!(
                        "bump = {} {} {} {} {}\n",
                        format_f64(*theta),
                        format_f64(b.height),
                        format_f64(b.width),
                        format_f64(b.beta),
                        coords.join(" ")
                    ));
                }
                s
            }
        }
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut keys: BTreeMap<String, String> = BTreeMap::new();
        let mut bumps: Vec<(usize, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim().to_string());
            if k == "bump" {
                bumps.push((i + 1, v));
            } else {
                keys.insert(k.to_string(), v);
            }
        }
        Self::from_keys(&keys, &bumps)
    }

    pub(crate) fn from_keys(keys: &BTreeMap<String, String>, bumps: &[(usize, String)]) -> Result<Self> {
        let get = |k: &str| keys.get(k).ok_or_else(|| Error::invalid(format!("fixture is missing '{k}'")));
        let num = |k: &str| get(k).and_then(|v| parse_f64(v).map_err(|e| Error::invalid(format!("{k}: {e}"))));
        match get("kind")?.as_str() {
            "two-bump" => Ok(FunctionSpec::TwoBump),
            "unimodal" => Ok(FunctionSpec::UnimodalRadial { max: num("max")? }),
            "constant" => Ok(FunctionSpec::Constant { value: num("value")? }),
            "bump-mixture" => {
                let manifold = parse_manifold(get("manifold")?)?;
                let disjoint = match keys.get("disjoint").map(String::as_str) {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(other) => return Err(Error::invalid(format!("disjoint must be true/false, got '{other}'"))),
                };
                let mut terms = Vec::new();
                for (line, b) in bumps {
                    let nums: Vec<f64> = b
                        .split_whitespace()
                        .map(parse_f64)
                        .collect::<Result<_>>()
                        .map_err(|e| Error::parse(*line, e.to_string()))?;
                    if nums.len() != 4 + manifold.chart_len() {
                        return Err(Error::parse(*line, "bump needs theta height width beta and center coordinates"));
                    }
                    let center = manifold.point(&nums[4..]).map_err(|e| Error::parse(*line, e.to_string()))?;
                    let spec = BumpSpec::new(center, nums[1], nums[2], nums[3]).map_err(|e| Error::parse(*line, e.to_string()))?;
                    terms.push((nums[0], spec));
                }
                FunctionSpec::bump_mixture(manifold, terms, disjoint)
            }
            other => Err(Error::invalid(format!("unknown fixture kind '{other}'"))),
        }
    }
}

pub fn eval_function(spec: &FunctionSpec, x: &Point) -> Result<f64> {
    spec.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_unimodal_values() {
        let c = FunctionSpec::Constant { value: 3.0 };
        assert_eq!(c.eval(&Point::Spherical([0.0, 0.0, 1.0])).unwrap(), 3.0);
        let g = FunctionSpec::UnimodalRadial { max: 2.2 };
        assert_eq!(g.eval(&Point::Planar([0.0, 0.0])).unwrap(), 2.2);
        assert_eq!(g.eval(&Point::Planar([9.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn off_manifold_points_are_rejected() {
        assert!(FunctionSpec::TwoBump.eval(&Point::Planar([11.0, 0.0])).is_err());
        assert!(FunctionSpec::TwoBump.eval(&Point::Spherical([0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn single_bump_peak() {
        let m = ManifoldKind::Sphere2;
        let c = m.point(&[0.0, 1.0, 0.0]).unwrap();
        let spec = FunctionSpec::bump_mixture(m, vec![(1.0, BumpSpec::new(c, 0.7, 0.5, 0.5).unwrap())], true).unwrap();
        assert_eq!(spec.eval(&c).unwrap(), 0.7);
    }

    #[test]
    fn two_bump_peaks_and_saddle() {
        let f = |x: f64| FunctionSpec::TwoBump.value(&Point::Planar([x, 0.0]));
        assert_eq!(f(-3.0), 2.0);
        assert_eq!(f(3.0), 1.4);
        let saddle = (0..=6000).map(|i| f(-3.0 + i as f64 * 1e-3)).fold(f64::INFINITY, f64::min);
        assert!((saddle - 1.0905).abs() < 1e-3, "saddle {saddle}");
        assert!(TWO_BUMP_DISPLAY_LEVELS[0] < saddle && saddle < TWO_BUMP_DISPLAY_LEVELS[1]);
        assert_eq!(f(9.0), 0.0);
    }

    #[test]
    fn streams_are_reproducible_and_independent() {
        let a: Vec<f64> = (0..5).map({ let mut s = SeededStream::new(7, 0); move |_| s.uniform() }).collect();
        let b: Vec<f64> = (0..5).map({ let mut s = SeededStream::new(7, 0); move |_| s.uniform() }).collect();
        let c: Vec<f64> = (0..5).map({ let mut s = SeededStream::new(7, 1); move |_| s.uniform() }).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn noise_contract() {
        let v = vec![1.0, 2.0, 3.0];
        assert_eq!(add_noise(&v, 0.0, 1).unwrap(), v);
        assert_eq!(add_noise(&v, 0.5, 9).unwrap(), add_noise(&v, 0.5, 9).unwrap());
        assert!(add_noise(&v, -1.0, 9).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let draws = add_noise(&vec![0.0; 100_000], 1.0, 2024).unwrap();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn designs() {
        let m = ManifoldKind::Sphere2;
        assert_eq!(
            sample_design(&m, 10, DesignScheme::Equidistant, 1).unwrap(),
            sample_design(&m, 10, DesignScheme::Equidistant, 2).unwrap()
        );
        assert_eq!(
            sample_design(&m, 10, DesignScheme::UniformRandom, 5).unwrap(),
            sample_design(&m, 10, DesignScheme::UniformRandom, 5).unwrap()
        );
        for p in sample_design(&m, 100, DesignScheme::UniformRandom, 5).unwrap() {
            m.validate(&p).unwrap();
        }
        let d = ManifoldKind::disk(2.0).unwrap();
        for p in sample_design(&d, 100, DesignScheme::UniformRandom, 5).unwrap() {
            d.validate(&p).unwrap();
        }
    }

    #[test]
    fn torus_quadrants_are_balanced() {
        let m = ManifoldKind::torus(1.0, 1.0).unwrap();
        let n = 10_000;
        let pts = sample_design(&m, n, DesignScheme::UniformRandom, 11).unwrap();
        let mut counts = [0usize; 4];
        for p in pts {
            let c = p.coords();
            counts[(c[0] >= 0.5) as usize * 2 + (c[1] >= 0.5) as usize] += 1;
        }
        // binomial(n, 1/4): sd = sqrt(n * 3/16)
        let sd = (n as f64 * 3.0 / 16.0).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 4.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn kv_round_trip() {
        let m = ManifoldKind::torus(1.0, 2.0).unwrap();
        let mix = FunctionSpec::bump_mixture(
            m,
            vec![
                (1.0, BumpSpec::new(m.point(&[0.2, 0.2]).unwrap(), 0.3, 0.1, 1.0).unwrap()),
                (-0.5, BumpSpec::new(m.point(&[0.7, 1.3]).unwrap(), 0.3, 0.1, 0.5).unwrap()),
            ],
            true,
        )
        .unwrap();
        for spec in [
            FunctionSpec::TwoBump,
            FunctionSpec::UnimodalRadial { max: 2.2 },
            FunctionSpec::Constant { value: -0.1 },
            mix,
        ] {
            assert_eq!(FunctionSpec::from_kv(&spec.to_kv()).unwrap(), spec);
        }
        assert!(FunctionSpec::from_kv("kind = nope\n").is_err());
    }

    #[test]
    fn overlapping_disjoint_mixture_is_rejected() {
        let m = ManifoldKind::Sphere2;
        let p = m.point(&[0.0, 0.0, 1.0]).unwrap();
        let b = BumpSpec::new(p, 1.0, 0.3, 1.0).unwrap();
        assert!(FunctionSpec::bump_mixture(m, vec![(1.0, b), (1.0, b)], true).is_err());
        assert!(FunctionSpec::bump_mixture(m, vec![(2.0, b)], false).is_err());
    }
}
