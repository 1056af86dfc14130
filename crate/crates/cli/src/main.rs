use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use sublevelstat::bottleneck::{bottleneck_all_degrees, bottleneck_distance};
use sublevelstat::estimator::{fit, EstimatorConfig, DEFAULT_DELTA};
use sublevelstat::experiment::{diagram_of, run_experiment, write_records, write_summary, ExperimentPlan};
use sublevelstat::io;
use sublevelstat::mesh::{triangulate, ManifoldKind, Mesh};
use sublevelstat::persistence::PersistenceDiagram;
use sublevelstat::synth::{add_noise_with, sample_design_with, DesignScheme, FunctionSpec, SeededStream, FIXTURE_DISK_RADIUS};
use sublevelstat::complex::SimplicialComplex;

#[derive(Parser)]
#[command(name = "sublevelstat", version, about = "Persistence diagrams of sublevel sets and their estimation from noisy samples")]
struct Cli {
    /// Base seed for random sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Disk,
    Sphere,
    Torus,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a manifold and write the mesh file.
    Mesh {
        variant: Variant,
        resolution: usize,
        output: PathBuf,
        /// Disk radius.
        #[arg(long, default_value_t = FIXTURE_DISK_RADIUS)]
        radius: f64,
        /// Torus side lengths.
        #[arg(long, num_args = 2, value_names = ["L1", "L2"], default_values_t = [1.0, 1.0])]
        lengths: Vec<f64>,
    },
    /// Persistence diagram of a field or fixture on a mesh.
    Diagram {
        mesh: PathBuf,
        #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
        field: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Diagram CSV (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bottleneck distance between two diagram CSV files.
    Bottleneck {
        a: PathBuf,
        b: PathBuf,
        /// Single homological degree (default: every degree present).
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Draw a noisy sample of a fixture.
    Sample {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value = "equidistant")]
        design: DesignScheme,
        /// Required for fixtures that do not fix a manifold, e.g. "sphere".
        #[arg(long)]
        manifold: Option<String>,
        output: PathBuf,
    },
    /// Fit the estimator to a sample and evaluate it on a mesh.
    Estimate {
        sample: PathBuf,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        lipschitz: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long)]
        model: PathBuf,
        /// Fitted vertex field, ready for `diagram --field`.
        #[arg(long)]
        field: PathBuf,
    },
    /// Run a Monte Carlo plan; writes records.csv and summary.csv.
    Experiment { plan: PathBuf },
}

struct Ctx {
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

impl Ctx {
    fn path(&self, p: &Path) -> PathBuf {
        match &self.out {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn write(&self, p: &Path, text: &str) -> Result<()> {
        let p = self.path(p);
        if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        io::write_file(&p, text)?;
        Ok(())
    }
}

fn read(p: &Path) -> Result<String> {
    Ok(io::read_to_string(p)?)
}

fn load_mesh(p: &Path) -> Result<Mesh> {
    io::read_mesh(&read(p)?).with_context(|| format!("reading mesh {}", p.display()))
}

fn load_diagram(p: &Path) -> Result<PersistenceDiagram> {
    io::read_diagram(&read(p)?).with_context(|| format!("reading diagram {}", p.display()))
}

fn load_fixture(p: &Path) -> Result<FunctionSpec> {
    FunctionSpec::from_kv(&read(p)?).with_context(|| format!("reading fixture {}", p.display()))
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx { seed: cli.seed, out: cli.out, threads: cli.threads };
    match cli.command {
        Command::Mesh { variant, resolution, output, radius, lengths } => {
            let m = match variant {
                Variant::Disk => ManifoldKind::disk(radius)?,
                Variant::Sphere => ManifoldKind::Sphere2,
                Variant::Torus => ManifoldKind::torus(lengths[0], lengths[1])?,
            };
            let mesh = triangulate(&m, resolution)?;
            ctx.write(&output, &io::write_mesh(&mesh))
        }
        Command::Diagram { mesh, field, fixture, output, svg } => {
            let mesh = load_mesh(&mesh)?;
            let values = match (field, fixture) {
                (Some(f), _) => io::read_field(&read(&f)?, &mesh).with_context(|| format!("reading field {}", f.display()))?,
                (None, Some(f)) => {
                    let spec = load_fixture(&f)?;
                    mesh.vertices.iter().map(|v| spec.eval(v)).collect::<sublevelstat::Result<_>>()?
                }
                (None, None) => unreachable!("clap requires --field or --fixture"),
            };
            let complex = SimplicialComplex::from_mesh(&mesh);
            let diagram = diagram_of(&complex, values)?;
            let csv = io::write_diagram(&diagram);
            match output {
                Some(p) => ctx.write(&p, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(p) = svg {
                ctx.write(&p, &diagram_svg(&diagram))?;
            }
            Ok(())
        }
        Command::Bottleneck { a, b, degree } => {
            let (da, db) = (load_diagram(&a)?, load_diagram(&b)?);
            let (rows, max) = match degree {
                Some(k) => {
                    let d = bottleneck_distance(&da, &db, k);
                    (vec![(k, d)], d)
                }
                None => {
                    let all = bottleneck_all_degrees(&da, &db);
                    (all.per_degree, all.max)
                }
            };
            let mut s = String::new();
            for (k, d) in rows {
                let _ = writeln!(s, "{k}\t{}", io::format_f64(d));
            }
            let _ = writeln!(s, "max\t{}", io::format_f64(max));
            print!("{s}");
            Ok(())
        }
        Command::Sample { fixture, n, sigma, design, manifold, output } => {
            let spec = load_fixture(&fixture)?;
            let m = match (manifold, spec.manifold()) {
                (Some(s), _) => io::parse_manifold(&s)?,
                (None, Some(m)) => m,
                (None, None) => bail!("this fixture needs --manifold"),
            };
            let mut rng = SeededStream::new(ctx.seed.unwrap_or(0), 0);
            let points = sample_design_with(&m, n, design, &mut rng)?;
            let clean: Vec<f64> = points.iter().map(|p| spec.eval(p)).collect::<sublevelstat::Result<_>>()?;
            let responses = add_noise_with(&clean, sigma, &mut rng)?;
            let sample = sublevelstat::estimator::DesignSample::new(&m, points, responses)?;
            ctx.write(&output, &io::write_sample(&m, &sample))
        }
        Command::Estimate { sample, mesh, beta, lipschitz, sigma, delta, model, field } => {
            let mesh = load_mesh(&mesh)?;
            let m = mesh.manifold;
            let sample = io::read_sample(&read(&sample)?, &m).with_context(|| format!("reading sample {}", sample.display()))?;
            let cfg = EstimatorConfig::new(beta, lipschitz, sigma, delta, m, sample.points.len())?;
            let fitted = fit(&cfg, &sample)?;
            let values: Vec<f64> = mesh.vertices.iter().map(|v| fitted.evaluate(v)).collect();
            ctx.write(&model, &io::write_model(&fitted))?;
            ctx.write(&field, &io::write_field(&mesh, &values))
        }
        Command::Experiment { plan } => {
            let mut plan = ExperimentPlan::parse(&read(&plan)?).with_context(|| format!("reading plan {}", plan.display()))?;
            if let Some(seed) = ctx.seed {
                plan.seed = seed;
            }
            let result = run_experiment(&plan, ctx.threads)?;
            ctx.write(Path::new("records.csv"), &write_records(&result.records))?;
            let summary = write_summary(&result.summary);
            ctx.write(Path::new("summary.csv"), &summary)?;
            print!("{summary}");
            Ok(())
        }
    }
}

/// Birth/death scatter with the diagonal; essential classes sit on a dashed
/// line above the plot area.
fn diagram_svg(d: &PersistenceDiagram) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
    let finite: Vec<f64> = d
        .pairs()
        .iter()
        .flat_map(|p| [p.birth, p.death])
        .filter(|v| v.is_finite())
        .collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi <= lo {
        (lo - 0.5, lo + 0.5)
    } else {
        (lo, hi)
    };
    let span = hi - lo;
    let inner = SIZE - 2.0 * PAD;
    let x = |v: f64| PAD + (v - lo) / span * inner;
    let y = |v: f64| SIZE - PAD - (v - lo) / span * inner;
    let inf_y = PAD / 2.0;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, SIZE - PAD, SIZE - PAD, SIZE - PAD);
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{}" x2="{PAD}" y2="{PAD}" stroke="black"/>"#, SIZE - PAD);
    let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray"/>"#, x(lo), y(lo), x(hi), y(hi));
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{inf_y}" x2="{}" y2="{inf_y}" stroke="gray" stroke-dasharray="4 3"/>"#, SIZE - PAD);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">birth</text>"#, SIZE / 2.0, SIZE - 8.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">death</text>"#, SIZE / 2.0, SIZE / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, PAD, SIZE - PAD + 14.0, io::format_f64(lo));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#, SIZE - PAD, SIZE - PAD + 14.0, io::format_f64(hi));
    for p in d.pairs() {
        let color = COLORS[p.degree.min(COLORS.len() - 1)];
        let cy = if p.is_essential() { inf_y } else { y(p.death) };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="{color}"><title>H{} ({}, {}) x{}</title></circle>"#,
            x(p.birth),
            cy,
            p.degree,
            io::format_f64(p.birth),
            io::format_f64(p.death),
            p.multiplicity
        );
    }
    s.push_str("</svg>\n");
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
