//! Text formats shared with the command line tool.
//!
//! Every float is written with 17 significant digits in the style of C's
//! `%.17g`, which round-trips `f64` exactly; `+∞` is written `inf`.
//!
//! * Mesh: `sublevelstat-mesh v1 <variant> [params] resolution <r>`, a
//!   `V E F` line, `V` vertex lines of chart coordinates, then `F` lines of
//!   three 0-based vertex ids.
//! * Vertex field: `sublevelstat-field v1`, the 64-bit FNV-1a hash of the
//!   mesh file bytes in lowercase hex, then one value per line.
//! * Diagram CSV: `degree,birth,death,multiplicity`, sorted by
//!   `(degree, birth, death)`.
//! * Sample CSV: `x1,x2[,x3],y`.
//! * Model dump: `sublevelstat-model v1` followed by `key value` lines and one
//!   `center <coords...> <value>` line per cell.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::estimator::{DesignSample, EstimatorConfig, EstimatorModel};
use crate::mesh::{ManifoldKind, Mesh};
use crate::persistence::{PersistenceDiagram, PersistencePair};

const MESH_MAGIC: &str = "sublevelstat-mesh v1";
const FIELD_MAGIC: &str = "sublevelstat-field v1";
const MODEL_MAGIC: &str = "sublevelstat-model v1";

/// `%.17g`-style formatting.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if x < 0.0 { "-" } else { "" };
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..17).contains(&exp) {
        let body = if exp >= 0 {
            let (int, frac) = digits.split_at(exp as usize + 1);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        format!("{sign}{}", trim(body))
    } else {
        let body = trim(format!("{}.{}", &digits[..1], &digits[1..]));
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{body}e{esign}{:02}", exp.abs())
    }
}

/// Parses a float; accepts `inf`/`-inf`, rejects NaN.
pub fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("not a number: '{s}'")))?,
    };
    if v.is_nan() {
        return Err(Error::invalid("NaN is not accepted"));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("not a nonnegative integer: '{s}'")))
}

/// `disk <R>`, `sphere` or `torus <l1> <l2>`.
pub fn format_manifold(m: &ManifoldKind) -> String {
    match *m {
        ManifoldKind::Disk { radius } => format!("disk {}", format_f64(radius)),
        ManifoldKind::Sphere2 => "sphere".to_string(),
        ManifoldKind::Torus2 { l1, l2 } => format!("torus {} {}", format_f64(l1), format_f64(l2)),
    }
}

pub fn parse_manifold(s: &str) -> Result<ManifoldKind> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    match tokens.as_slice() {
        ["disk", r] => ManifoldKind::disk(parse_f64(r)?),
        ["sphere"] => Ok(ManifoldKind::Sphere2),
        ["torus", a, b] => ManifoldKind::torus(parse_f64(a)?, parse_f64(b)?),
        _ => Err(Error::invalid(format!("unknown manifold '{s}'"))),
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn join_floats(xs: &[f64], sep: &str) -> String {
    xs.iter().map(|&x| format_f64(x)).collect::<Vec<_>>().join(sep)
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = format!(
        "{MESH_MAGIC} {} resolution {}\n{} {} {}\n",
        format_manifold(&mesh.manifold),
        mesh.resolution,
        mesh.vertices.len(),
        mesh.edges().len(),
        mesh.triangles.len()
    );
    for v in &mesh.vertices {
        s.push_str(&join_floats(v.coords(), " "));
        s.push('\n');
    }
    for [a, b, c] in &mesh.triangles {
        let _ = writeln!(s, "{a} {b} {c}");
    }
    s
}

/// Lines with 1-based numbers, skipping blanks.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidInput(msg) => Error::parse(line, msg),
        other => other,
    })
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = numbered_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty mesh file"))?;
    let rest = header
        .strip_prefix(MESH_MAGIC)
        .ok_or_else(|| Error::parse(ln, format!("expected '{MESH_MAGIC}' header")))?;
    let (manifold_spec, resolution) = rest
        .rsplit_once("resolution")
        .ok_or_else(|| Error::parse(ln, "header lacks resolution"))?;
    let manifold = at_line(ln, parse_manifold(manifold_spec))?;
    let resolution = at_line(ln, parse_usize(resolution))?;

    let (ln, counts) = lines.next().ok_or_else(|| Error::parse(ln + 1, "missing counts line"))?;
    let counts: Vec<usize> = at_line(ln, counts.split_whitespace().map(parse_usize).collect())?;
    let [nv, ne, nf] = counts[..] else {
        return Err(Error::parse(ln, "counts line must be 'V E F'"));
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| Error::parse(ln, "truncated vertex list"))?;
        let coords: Vec<f64> = at_line(ln, l.split_whitespace().map(parse_f64).collect())?;
        vertices.push(at_line(ln, manifold.point(&coords))?);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| Error::parse(ln, "truncated face list"))?;
        let ids: Vec<usize> = at_line(ln, l.split_whitespace().map(parse_usize).collect())?;
        let [a, b, c] = ids[..] else {
            return Err(Error::parse(ln, "face lines need three vertex ids"));
        };
        triangles.push([a, b, c]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "trailing content after faces"));
    }
    let mesh = Mesh { manifold, vertices, triangles, resolution };
    mesh.check_invariants()?;
    if mesh.edges().len() != ne {
        return Err(Error::invalid(format!("header declares {ne} edges, faces give {}", mesh.edges().len())));
    }
    Ok(mesh)
}

/// Hash of the canonical mesh file, as 16 lowercase hex digits.
pub fn mesh_hash(mesh: &Mesh) -> String {
    format!("{:016x}", fnv1a64(write_mesh(mesh).as_bytes()))
}

pub fn write_field(mesh: &Mesh, values: &[f64]) -> String {
    let mut s = format!("{FIELD_MAGIC}\n{}\n", mesh_hash(mesh));
    for &v in values {
        s.push_str(&format_f64(v));
        s.push('\n');
    }
    s
}

/// Reads a vertex field and checks it against `mesh`.
pub fn read_field(text: &str, mesh: &Mesh) -> Result<Vec<f64>> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, l)) if l == FIELD_MAGIC => {}
        Some((ln, _)) => return Err(Error::parse(ln, format!("expected '{FIELD_MAGIC}' header"))),
        None => return Err(Error::parse(1, "empty field file")),
    }
    let (_, hash) = lines.next().ok_or_else(|| Error::parse(2, "missing mesh hash"))?;
    let actual = mesh_hash(mesh);
    if hash != actual {
        return Err(Error::HashMismatch { expected: hash.to_string(), actual });
    }
    let values: Vec<f64> = lines
        .map(|(ln, l)| at_line(ln, parse_f64(l)))
        .collect::<Result<_>>()?;
    if values.len() != mesh.vertices.len() {
        return Err(Error::invalid(format!(
            "field has {} values for {} vertices",
            values.len(),
            mesh.vertices.len()
        )));
    }
    // reuse the field validation (finite values, one per vertex)
    crate::filtration::VertexField::new(&SimplicialComplex::from_mesh(mesh), values.clone())?;
    Ok(values)
}

pub fn write_diagram(d: &PersistenceDiagram) -> String {
    let mut s = String::from("degree,birth,death,multiplicity\n");
    for p in d.pairs() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            p.degree,
            format_f64(p.birth),
            format_f64(p.death),
            p.multiplicity
        );
    }
    s
}

/// Reads a diagram CSV verbatim (no essential/finite reinterpretation).
pub fn read_diagram(text: &str) -> Result<PersistenceDiagram> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, l)) if l.replace(' ', "") == "degree,birth,death,multiplicity" => {}
        Some((ln, _)) => return Err(Error::parse(ln, "expected header 'degree,birth,death,multiplicity'")),
        None => return Ok(PersistenceDiagram::empty()),
    }
    let mut pairs = Vec::new();
    for (ln, l) in lines {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        let [k, b, d, m] = fields[..] else {
            return Err(Error::parse(ln, "diagram rows need 4 fields"));
        };
        let pair = PersistencePair {
            degree: at_line(ln, parse_usize(k))?,
            birth: at_line(ln, parse_f64(b))?,
            death: at_line(ln, parse_f64(d))?,
            multiplicity: at_line(ln, parse_usize(m))?,
        };
        // validate row by row to report the line number
        at_line(ln, PersistenceDiagram::new([pair]))?;
        pairs.push(pair);
    }
    PersistenceDiagram::new(pairs)
}

pub fn write_sample(m: &ManifoldKind, sample: &DesignSample) -> String {
    let names: Vec<String> = (1..=m.chart_len()).map(|i| format!("x{i}")).collect();
    let mut s = format!("{},y\n", names.join(","));
    for (p, y) in sample.points.iter().zip(&sample.responses) {
        let _ = writeln!(s, "{},{}", join_floats(p.coords(), ","), format_f64(*y));
    }
    s
}

pub fn read_sample(text: &str, m: &ManifoldKind) -> Result<DesignSample> {
    let mut lines = numbered_lines(text);
    let names: Vec<String> = (1..=m.chart_len()).map(|i| format!("x{i}")).collect();
    let header = format!("{},y", names.join(","));
    match lines.next() {
        Some((_, l)) if l.replace(' ', "") == header => {}
        Some((ln, _)) => return Err(Error::parse(ln, format!("expected header '{header}'"))),
        None => return Err(Error::parse(1, "empty sample file")),
    }
    let (mut points, mut responses) = (Vec::new(), Vec::new());
    for (ln, l) in lines {
        let vals: Vec<f64> = at_line(ln, l.split(',').map(parse_f64).collect())?;
        if vals.len() != m.chart_len() + 1 {
            return Err(Error::parse(ln, format!("expected {} fields, got {}", m.chart_len() + 1, vals.len())));
        }
        points.push(at_line(ln, m.point(&vals[..m.chart_len()]))?);
        let y = vals[m.chart_len()];
        if !y.is_finite() {
            return Err(Error::parse(ln, "response must be finite"));
        }
        responses.push(y);
    }
    DesignSample::new(m, points, responses)
}

pub fn write_model(model: &EstimatorModel) -> String {
    let c = &model.config;
    let mut s = format!(
        "{MODEL_MAGIC}\nmanifold {}\nbeta {}\nlipschitz {}\nsigma {}\ndelta {}\nn {}\nkappa {}\nrequested_m {}\nm {}\n",
        format_manifold(&c.manifold),
        format_f64(c.beta),
        format_f64(c.lipschitz),
        format_f64(c.sigma),
        format_f64(c.delta),
        c.n,
        format_f64(model.kappa),
        model.requested_m,
        model.centers.len()
    );
    for (p, v) in model.centers.iter().zip(&model.values) {
        let _ = writeln!(s, "center {} {}", join_floats(p.coords(), " "), format_f64(*v));
    }
    s
}

pub fn read_model(text: &str) -> Result<EstimatorModel> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, l)) if l == MODEL_MAGIC => {}
        Some((ln, _)) => return Err(Error::parse(ln, format!("expected '{MODEL_MAGIC}' header"))),
        None => return Err(Error::parse(1, "empty model file")),
    }
    let mut next = |key: &str| -> Result<(usize, String)> {
        let (ln, l) = lines.next().ok_or_else(|| Error::invalid(format!("model is missing '{key}'")))?;
        let value = l
            .strip_prefix(key)
            .filter(|v| v.starts_with(' '))
            .ok_or_else(|| Error::parse(ln, format!("expected '{key}'")))?;
        Ok((ln, value.trim().to_string()))
    };
    let (ln, m) = next("manifold")?;
    let manifold = at_line(ln, parse_manifold(&m))?;
    let mut num = |key: &str| next(key).and_then(|(ln, v)| at_line(ln, parse_f64(&v)));
    let (beta, lipschitz, sigma, delta) = (num("beta")?, num("lipschitz")?, num("sigma")?, num("delta")?);
    let (ln, n) = next("n")?;
    let n = at_line(ln, parse_usize(&n))?;
    let (ln, kappa) = next("kappa")?;
    let kappa = at_line(ln, parse_f64(&kappa))?;
    let (ln, rm) = next("requested_m")?;
    let requested_m = at_line(ln, parse_usize(&rm))?;
    let (ln, m) = next("m")?;
    let m = at_line(ln, parse_usize(&m))?;
    let config = EstimatorConfig::new(beta, lipschitz, sigma, delta, manifold, n)?;
    let (mut centers, mut values) = (Vec::with_capacity(m), Vec::with_capacity(m));
    for _ in 0..m {
        let (ln, rest) = next("center")?;
        let nums: Vec<f64> = at_line(ln, rest.split_whitespace().map(parse_f64).collect())?;
        if nums.len() != manifold.chart_len() + 1 {
            return Err(Error::parse(ln, "center line has the wrong number of fields"));
        }
        centers.push(at_line(ln, manifold.point(&nums[..manifold.chart_len()]))?);
        values.push(nums[manifold.chart_len()]);
    }
    if m == 0 {
        return Err(Error::invalid("model has no cells"));
    }
    Ok(EstimatorModel { config, kappa, requested_m, centers, values })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
