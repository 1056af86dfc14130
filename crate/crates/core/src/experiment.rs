//! Monte Carlo harness: sample, fit, compare diagrams, and check
//! `d_B(D(f̂), D(f)) <= ‖f̂ − f‖_∞` on every replicate.
//!
//! Replicate `r` at sample size `n` draws from [`SeededStream`] with the plan
//! seed and stream id `(n << 32) | r`, so records do not depend on thread
//! count or scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bottleneck::bottleneck_all_degrees;
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::estimator::{constant_c0, fit, DesignSample, EstimatorConfig, DEFAULT_DELTA};
use crate::filtration::{lower_star_filtration, VertexField};
use crate::io::{format_f64, format_manifold, parse_f64, parse_manifold};
use crate::mesh::{triangulate, ManifoldKind, Mesh, Point};
use crate::persistence::{compute_persistence, PersistenceDiagram};
use crate::synth::{add_noise_with, sample_design_with, DesignScheme, FunctionSpec, SeededStream};

/// Slack allowed in the runtime stability assertion.
pub const STABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub fixture: FunctionSpec,
    pub manifold: ManifoldKind,
    pub beta: f64,
    pub lipschitz: f64,
    pub sigma: f64,
    pub delta: f64,
    pub resolution: usize,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub design: DesignScheme,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::invalid("plan needs at least one sample size"));
        }
        if self.sample_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sample sizes must be strictly increasing"));
        }
        if self.sample_sizes[0] < 2 {
            return Err(Error::invalid("sample sizes must be at least 2"));
        }
        if let Some(m) = self.fixture.manifold() {
            if m != self.manifold {
                return Err(Error::invalid(format!(
                    "fixture lives on {} but the plan uses {}",
                    format_manifold(&m),
                    format_manifold(&self.manifold)
                )));
            }
        }
        self.config(self.sample_sizes[0])?;
        Ok(())
    }

    pub fn config(&self, n: usize) -> Result<EstimatorConfig> {
        EstimatorConfig::new(self.beta, self.lipschitz, self.sigma, self.delta, self.manifold, n)
    }

    /// Parses the `key = value` plan format. Fixture keys carry a `fixture.`
    /// prefix (`fixture.kind = two-bump`, `fixture.bump = ...`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut fixture_keys: BTreeMap<String, String> = BTreeMap::new();
        let mut bumps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim().to_string());
            match k.strip_prefix("fixture.") {
                Some("bump") => bumps.push((i + 1, v)),
                Some(fk) => {
                    fixture_keys.insert(fk.to_string(), v);
                }
                None => {
                    if keys.insert(k.to_string(), (i + 1, v)).is_some() {
                        return Err(Error::parse(i + 1, format!("duplicate key '{k}'")));
                    }
                }
            }
        }
        let fixture = FunctionSpec::from_keys(&fixture_keys, &bumps)?;

        let known = [
            "manifold", "beta", "lipschitz", "sigma", "delta", "resolution", "sample_sizes", "replicates", "seed",
            "design",
        ];
        if let Some((k, (line, _))) = keys.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::parse(*line, format!("unknown plan key '{k}'")));
        }
        let raw = |k: &str| keys.get(k).map(|(l, v)| (*l, v.as_str()));
        let required = |k: &str| raw(k).ok_or_else(|| Error::invalid(format!("plan is missing '{k}'")));
        let float = |k: &str| -> Result<Option<f64>> {
            raw(k)
                .map(|(l, v)| parse_f64(v).map_err(|e| Error::parse(l, e.to_string())))
                .transpose()
        };
        let int = |(l, v): (usize, &str)| -> Result<u64> {
            v.parse().map_err(|_| Error::parse(l, format!("expected an integer, got '{v}'")))
        };

        let manifold = match (raw("manifold"), fixture.manifold()) {
            (Some((l, v)), _) => parse_manifold(v).map_err(|e| Error::parse(l, e.to_string()))?,
            (None, Some(m)) => m,
            (None, None) => return Err(Error::invalid("plan needs 'manifold' for this fixture")),
        };
        let (nominal_beta, nominal_l) = fixture.holder_constants();
        let beta = float("beta")?.unwrap_or(nominal_beta);
        let lipschitz = float("lipschitz")?.unwrap_or(if nominal_l > 0.0 { nominal_l } else { 1.0 });
        let sigma = float("sigma")?.ok_or_else(|| Error::invalid("plan is missing 'sigma'"))?;
        let delta = float("delta")?.unwrap_or(DEFAULT_DELTA);
        let resolution = int(required("resolution")?)? as usize;
        let (l, sizes) = required("sample_sizes")?;
        let sample_sizes = sizes
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(l, format!("bad sample size list '{sizes}'")))?;
        let replicates = int(required("replicates")?)? as usize;
        let seed = raw("seed").map(int).transpose()?.unwrap_or(0);
        let design = match raw("design") {
            Some((l, v)) => v.parse().map_err(|e: Error| Error::parse(l, e.to_string()))?,
            None => DesignScheme::Equidistant,
        };
        let plan = ExperimentPlan {
            fixture,
            manifold,
            beta,
            lipschitz,
            sigma,
            delta,
            resolution,
            sample_sizes,
            replicates,
            seed,
            design,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for line in self.fixture.to_kv().lines() {
            let _ = writeln!(s, "fixture.{line}");
        }
        let sizes: Vec<String> = self.sample_sizes.iter().map(usize::to_string).collect();
        let _ = write!(
            s,
            "manifold = {}\nbeta = {}\nlipschitz = {}\nsigma = {}\ndelta = {}\nresolution = {}\nsample_sizes = {}\nreplicates = {}\nseed = {}\ndesign = {}\n",
            format_manifold(&self.manifold),
            format_f64(self.beta),
            format_f64(self.lipschitz),
            format_f64(self.sigma),
            format_f64(self.delta),
            self.resolution,
            sizes.join(","),
            self.replicates,
            self.seed,
            self.design.name()
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub stream: u64,
    pub m: usize,
    pub kappa: f64,
    pub sup_norm_error: f64,
    /// Bottleneck distance per homological degree `0..=d`.
    pub bottleneck: Vec<f64>,
    pub bottleneck_max: f64,
    pub c0_psi: f64,
    pub stability_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub replicates: usize,
    pub mean_sup_norm_error: f64,
    pub mean_bottleneck: f64,
    pub c0_psi: f64,
    /// `mean_sup_norm_error / (C_0 ψ_n)`.
    pub error_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Everything that does not depend on the replicate.
struct Stage {
    mesh: Mesh,
    complex: SimplicialComplex,
    probes: Vec<Point>,
    truth_probes: Vec<f64>,
    truth_diagram: PersistenceDiagram,
}

pub fn diagram_of(complex: &SimplicialComplex, values: Vec<f64>) -> Result<PersistenceDiagram> {
    let field = VertexField::new(complex, values)?;
    compute_persistence(&lower_star_filtration(&field))
}

/// Mesh vertices followed by triangle barycentres.
pub fn probe_points(mesh: &Mesh) -> Vec<Point> {
    let mut probes = mesh.vertices.clone();
    probes.extend(mesh.barycenters());
    probes
}

pub fn stream_id(n: usize, replicate: usize) -> u64 {
    ((n as u64) << 32) | replicate as u64
}

fn run_record(plan: &ExperimentPlan, stage: &Stage, n: usize, replicate: usize) -> Result<ExperimentRecord> {
    let cfg = plan.config(n)?;
    let stream = stream_id(n, replicate);
    let mut rng = SeededStream::new(plan.seed, stream);
    let points = sample_design_with(&plan.manifold, n, plan.design, &mut rng)?;
    let clean: Vec<f64> = points.iter().map(|p| plan.fixture.value(p)).collect();
    let responses = add_noise_with(&clean, plan.sigma, &mut rng)?;
    let sample = DesignSample::new(&plan.manifold, points, responses)?;
    let model = fit(&cfg, &sample)?;

    let fitted: Vec<f64> = stage.probes.iter().map(|p| model.evaluate(p)).collect();
    let sup_norm_error = fitted
        .iter()
        .zip(&stage.truth_probes)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let nv = stage.mesh.vertices.len();
    let fitted_diagram = diagram_of(&stage.complex, fitted[..nv].to_vec())?;
    let distances = bottleneck_all_degrees(&fitted_diagram, &stage.truth_diagram);
    let mut bottleneck = vec![0.0; plan.manifold.dim() + 1];
    for (k, d) in distances.per_degree {
        if k < bottleneck.len() {
            bottleneck[k] = d;
        }
    }
    let c0_psi = constant_c0(&cfg) * cfg.psi()?;
    Ok(ExperimentRecord {
        n,
        replicate,
        seed: plan.seed,
        stream,
        m: model.m(),
        kappa: model.kappa,
        sup_norm_error,
        bottleneck,
        bottleneck_max: distances.max,
        c0_psi,
        stability_ok: distances.max <= sup_norm_error + STABILITY_SLACK,
    })
}

/// Runs every `(n, replicate)` pair, in parallel when `threads` allows, and
/// returns records sorted by `(n, replicate)`.
///
/// Fails with [`Error::StabilityViolation`] if any record breaks the
/// stability inequality.
pub fn run_experiment(plan: &ExperimentPlan, threads: Option<usize>) -> Result<ExperimentResult> {
    plan.validate()?;
    let mesh = triangulate(&plan.manifold, plan.resolution)?;
    let complex = SimplicialComplex::from_mesh(&mesh);
    let probes = probe_points(&mesh);
    let truth_probes: Vec<f64> = probes.iter().map(|p| plan.fixture.value(p)).collect();
    let truth_diagram = diagram_of(&complex, truth_probes[..mesh.vertices.len()].to_vec())?;
    let stage = Stage { mesh, complex, probes, truth_probes, truth_diagram };

    let jobs: Vec<(usize, usize)> = plan
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..plan.replicates).map(move |r| (n, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
    let records: Vec<ExperimentRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, r)| run_record(plan, &stage, n, r))
            .collect::<Result<_>>()
    })?;

    if let Some(bad) = records.iter().find(|r| !r.stability_ok) {
        return Err(Error::StabilityViolation(format!(
            "n = {}, replicate = {}, stream = {}: bottleneck {} exceeds sup-norm error {}\n{}",
            bad.n,
            bad.replicate,
            bad.stream,
            format_f64(bad.bottleneck_max),
            format_f64(bad.sup_norm_error),
            write_records(std::slice::from_ref(bad))
        )));
    }

    let summary = plan
        .sample_sizes
        .iter()
        .map(|&n| {
            let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.n == n).collect();
            let k = rows.len() as f64;
            let mean_sup_norm_error = rows.iter().map(|r| r.sup_norm_error).sum::<f64>() / k;
            let mean_bottleneck = rows.iter().map(|r| r.bottleneck_max).sum::<f64>() / k;
            let c0_psi = rows[0].c0_psi;
            SummaryRow {
                n,
                replicates: rows.len(),
                mean_sup_norm_error,
                mean_bottleneck,
                c0_psi,
                error_ratio: mean_sup_norm_error / c0_psi,
            }
        })
        .collect();
    Ok(ExperimentResult { records, summary })
}

pub fn write_records(records: &[ExperimentRecord]) -> String {
    let degrees = records.first().map_or(3, |r| r.bottleneck.len());
    let mut s = String::from("n,replicate,seed,stream,m,kappa,sup_norm_error,");
    for k in 0..degrees {
        let _ = write!(s, "bottleneck_h{k},");
    }
    s.push_str("bottleneck_max,c0_psi,stability_ok\n");
    for r in records {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},",
            r.n,
            r.replicate,
            r.seed,
            r.stream,
            r.m,
            format_f64(r.kappa),
            format_f64(r.sup_norm_error)
        );
        for d in &r.bottleneck {
            let _ = write!(s, "{},", format_f64(*d));
        }
        let _ = writeln!(s, "{},{},{}", format_f64(r.bottleneck_max), format_f64(r.c0_psi), r.stability_ok);
    }
    s
}

pub fn write_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::from("n,replicates,mean_sup_norm_error,mean_bottleneck,c0_psi,error_ratio\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.n,
            r.replicates,
            format_f64(r.mean_sup_norm_error),
            format_f64(r.mean_bottleneck),
            format_f64(r.c0_psi),
            format_f64(r.error_ratio)
        );
    }
    s
}
