//! Plain-text point formats.
//!
//! One point per line, whitespace-separated reals, `#` starts a comment.
//! Header comments carry `key=value` pairs and bare flags:
//!
//! ```text
//! # fixture=hemisphere
//! # dim=3 codim=1
//! 0.1 0.2 0.97 0.1 0.2 0.97
//! ```
//!
//! Bare clouds have `n` columns, oriented samples `2n` (point, normal),
//! framed samples `n + r n` (point, then the `r` frame vectors). Weight
//! files add the solved pipeline on top of an oriented block, plus a
//! base-index column for tubes and a trailing `tau` column.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use layerquad_core::geometry::{FramedSample, OrientedSample, PointCloud, SurfaceKind, SurfaceSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Header(String),
    #[error(transparent)]
    Core(#[from] layerquad_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// Header flags and `key=value` pairs collected from comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    pub flags: Vec<String>,
    pub values: BTreeMap<String, String>,
}

impl Header {
    pub fn has(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| FormatError::Header(format!("bad number for {key}: {v}")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| FormatError::Header(format!("bad integer for {key}: {v}")))
            })
            .transpose()
    }

    fn require_f64(&self, key: &str) -> Result<f64> {
        self.get_f64(key)?
            .ok_or_else(|| FormatError::Header(format!("missing header value {key}")))
    }

    fn require_usize(&self, key: &str) -> Result<usize> {
        self.get_usize(key)?
            .ok_or_else(|| FormatError::Header(format!("missing header value {key}")))
    }
}

/// Rows of a table file, all of the same width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Header,
    pub width: usize,
    pub values: Vec<f64>,
}

impl Table {
    pub fn rows(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.values.len() / self.width
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    /// Columns `range` of every row, concatenated.
    pub fn columns(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        (0..self.rows())
            .flat_map(|i| self.row(i)[range.clone()].iter().copied())
            .collect()
    }
}

pub fn parse_table(text: &str) -> Result<Table> {
    let mut header = Header::default();
    let mut width = None;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                match token.split_once('=') {
                    Some((k, v)) => {
                        header.values.insert(k.to_string(), v.to_string());
                    }
                    None => header.flags.push(token.to_string()),
                }
            }
            continue;
        }
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| FormatError::Parse {
                line: idx + 1,
                msg: format!("not a number: {tok}"),
            })?;
            values.push(v);
        }
        let w = values.len() - before;
        match width {
            None => width = Some(w),
            Some(expected) if expected != w => {
                return Err(FormatError::Parse {
                    line: idx + 1,
                    msg: format!("expected {expected} columns, found {w}"),
                })
            }
            _ => {}
        }
    }
    Ok(Table {
        header,
        width: width.unwrap_or(0),
        values,
    })
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_table(&text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `{}` prints the shortest string that parses back to the same `f64`.
fn push_row(out: &mut String, parts: &[&[f64]]) {
    let mut first = true;
    for part in parts {
        for v in part.iter() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
    }
    out.push('\n');
}

/// Fixture name and parameters as written in `# fixture=` headers and CLI flags.
pub fn fixture_name(kind: &SurfaceKind) -> String {
    match *kind {
        SurfaceKind::Sphere => "fixture=sphere".into(),
        SurfaceKind::Ellipsoid { a, b, c } => format!("fixture=ellipsoid a={a} b={b} c={c}"),
        SurfaceKind::Hemisphere => "fixture=hemisphere".into(),
        SurfaceKind::CircleR3 => "fixture=circle-r3".into(),
        SurfaceKind::S2Cap { alpha } => format!("fixture=s2-cap alpha={alpha}"),
    }
}

/// Reads the fixture back from a header, if one was recorded.
pub fn fixture_from_header(header: &Header) -> Result<Option<SurfaceSpec>> {
    let Some(name) = header.get("fixture") else {
        return Ok(None);
    };
    let spec = match name {
        "sphere" => SurfaceSpec::sphere(),
        "hemisphere" => SurfaceSpec::hemisphere(),
        "circle-r3" => SurfaceSpec::circle_r3(),
        "ellipsoid" => SurfaceSpec::ellipsoid(
            header.require_f64("a")?,
            header.require_f64("b")?,
            header.require_f64("c")?,
        )?,
        "s2-cap" => SurfaceSpec::s2_cap(header.require_f64("alpha")?)?,
        other => return Err(FormatError::Header(format!("unknown fixture {other}"))),
    };
    Ok(Some(spec))
}

/// A sample file as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleData {
    Cloud(PointCloud),
    Oriented(OrientedSample),
    Framed(FramedSample),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleFile {
    pub fixture: Option<SurfaceSpec>,
    /// Conormals on the unit `S^2` rather than normals in `R^n`.
    pub manifold_s2: bool,
    pub data: SampleData,
}

impl SampleFile {
    pub fn cloud(&self) -> &PointCloud {
        match &self.data {
            SampleData::Cloud(c) => c,
            SampleData::Oriented(s) => s.cloud(),
            SampleData::Framed(s) => s.cloud(),
        }
    }
}

pub fn format_sample(file: &SampleFile) -> String {
    let mut out = String::new();
    if let Some(spec) = &file.fixture {
        let _ = writeln!(out, "# {}", fixture_name(&spec.kind));
    }
    if file.manifold_s2 {
        out.push_str("# manifold=s2\n");
    }
    match &file.data {
        SampleData::Cloud(c) => {
            let _ = writeln!(out, "# dim={} codim=0", c.dim());
            for p in c.iter() {
                push_row(&mut out, &[p]);
            }
        }
        SampleData::Oriented(s) => {
            let _ = writeln!(out, "# dim={} codim=1", s.dim());
            for j in 0..s.len() {
                push_row(&mut out, &[s.point(j), s.normal(j)]);
            }
        }
        SampleData::Framed(s) => {
            let _ = writeln!(out, "# dim={} codim={}", s.dim(), s.codim());
            let w = s.codim() * s.dim();
            for j in 0..s.len() {
                push_row(&mut out, &[s.point(j), &s.frames()[j * w..(j + 1) * w]]);
            }
        }
    }
    out
}

/// Layout from the header when present, otherwise from the column count
/// (`n` or `2n` with `n = 3`).
pub fn sample_from_table(table: &Table) -> Result<SampleFile> {
    let h = &table.header;
    let width = table.width;
    let dim = match h.get_usize("dim")? {
        Some(d) => d,
        None if width == 3 || width == 6 => 3,
        None => return Err(FormatError::Header("missing # dim=<n> header".into())),
    };
    if dim == 0 || width % dim != 0 {
        return Err(FormatError::Header(format!("{width} columns do not fit dim={dim}")));
    }
    let codim = match h.get_usize("codim")? {
        Some(r) => r,
        None => width / dim - 1,
    };
    if width != dim * (1 + codim) {
        return Err(FormatError::Header(format!(
            "{width} columns do not match dim={dim} codim={codim}"
        )));
    }
    let cloud = PointCloud::new(dim, table.columns(0..dim))?;
    let data = match codim {
        0 => SampleData::Cloud(cloud),
        1 if !h.has("framed") => SampleData::Oriented(OrientedSample::new(cloud, table.columns(dim..width))?),
        r => SampleData::Framed(FramedSample::new(cloud, r, table.columns(dim..width))?),
    };
    Ok(SampleFile {
        fixture: fixture_from_header(h)?,
        manifold_s2: h.get("manifold") == Some("s2"),
        data,
    })
}

pub fn read_sample(path: &Path) -> Result<SampleFile> {
    sample_from_table(&read_table(path)?)
}

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    Ok(sample_from_table(&read_table(path)?)?.cloud().clone())
}

/// Which reduction produced a weight file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pipeline {
    Closed,
    Collar { epsilon: f64 },
    Tube { codim: usize, q: usize, epsilon: f64 },
    S2Cap,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::Collar { .. } => "collar",
            Self::Tube { .. } => "tube",
            Self::S2Cap => "s2-cap",
        }
    }
}

/// Solved elements together with the boundary sample they belong to.
///
/// Collar files list the front face then the back face; tube files list
/// point `i` of base point `j` at row `j q + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsFile {
    pub pipeline: Pipeline,
    pub boundary: OrientedSample,
    pub base_index: Option<Vec<usize>>,
    pub tau: Vec<f64>,
    pub offset: Option<f64>,
    pub softening: f64,
    pub lambda: f64,
    pub residual: f64,
}

pub fn format_weights(w: &WeightsFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pipeline={}", w.pipeline.name());
    match w.pipeline {
        Pipeline::Collar { epsilon } => {
            let _ = writeln!(out, "# collar eps={epsilon}");
        }
        Pipeline::Tube { codim, q, epsilon } => {
            let _ = writeln!(out, "# tube r={codim} q={q} eps={epsilon}");
        }
        Pipeline::S2Cap => out.push_str("# manifold=s2\n"),
        Pipeline::Closed => {}
    }
    if let Some(c) = w.offset {
        let _ = writeln!(out, "# offset={c}");
    }
    let _ = writeln!(
        out,
        "# softening={} lambda={} residual={}",
        w.softening, w.lambda, w.residual
    );
    let _ = writeln!(out, "# dim={} codim=1", w.boundary.dim());
    out.push_str("# tau\n");
    for j in 0..w.boundary.len() {
        let tau = [w.tau[j]];
        match &w.base_index {
            Some(b) => push_row(
                &mut out,
                &[w.boundary.point(j), w.boundary.normal(j), &[b[j] as f64], &tau],
            ),
            None => push_row(&mut out, &[w.boundary.point(j), w.boundary.normal(j), &tau]),
        }
    }
    out
}

pub fn weights_from_table(table: &Table) -> Result<WeightsFile> {
    let h = &table.header;
    if !h.has("tau") {
        return Err(FormatError::Header("not a weight file (missing # tau)".into()));
    }
    let pipeline = match h.get("pipeline") {
        Some("closed") | None => Pipeline::Closed,
        Some("collar") => Pipeline::Collar {
            epsilon: h.require_f64("eps")?,
        },
        Some("tube") => Pipeline::Tube {
            codim: h.require_usize("r")?,
            q: h.require_usize("q")?,
            epsilon: h.require_f64("eps")?,
        },
        Some("s2-cap") => Pipeline::S2Cap,
        Some(other) => return Err(FormatError::Header(format!("unknown pipeline {other}"))),
    };
    let dim = h.require_usize("dim")?;
    let tube = matches!(pipeline, Pipeline::Tube { .. });
    let expected = 2 * dim + usize::from(tube) + 1;
    if table.width != expected {
        return Err(FormatError::Header(format!(
            "weight file needs {expected} columns, found {}",
            table.width
        )));
    }
    let cloud = PointCloud::new(dim, table.columns(0..dim))?;
    let boundary = OrientedSample::new(cloud, table.columns(dim..2 * dim))?;
    let base_index = tube.then(|| {
        (0..table.rows())
            .map(|i| table.row(i)[2 * dim] as usize)
            .collect()
    });
    Ok(WeightsFile {
        pipeline,
        boundary,
        base_index,
        tau: table.columns(expected - 1..expected),
        offset: h.get_f64("offset")?,
        softening: h.get_f64("softening")?.unwrap_or(0.0),
        lambda: h.get_f64("lambda")?.unwrap_or(f64::NAN),
        residual: h.get_f64("residual")?.unwrap_or(f64::NAN),
    })
}

pub fn read_weights(path: &Path) -> Result<WeightsFile> {
    weights_from_table(&read_table(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use layerquad_core::geometry::{gen_circle_r3, gen_fibonacci_sphere};

    #[test]
    fn oriented_round_trip() {
        let s = gen_fibonacci_sphere(50).unwrap();
        let file = SampleFile {
            fixture: Some(SurfaceSpec::sphere()),
            manifold_s2: false,
            data: SampleData::Oriented(s),
        };
        let text = format_sample(&file);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 50);
        let back = sample_from_table(&parse_table(&text).unwrap()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn framed_round_trip_and_header() {
        let s = gen_circle_r3(10).unwrap();
        let file = SampleFile {
            fixture: Some(SurfaceSpec::circle_r3()),
            manifold_s2: false,
            data: SampleData::Framed(s),
        };
        let text = format_sample(&file);
        assert!(text.contains("# dim=3 codim=2"));
        assert_eq!(sample_from_table(&parse_table(&text).unwrap()).unwrap(), file);
    }

    #[test]
    fn bare_cloud_without_header() {
        let t = parse_table("# a comment\n0 0 0\n1 2 3\n\n").unwrap();
        match sample_from_table(&t).unwrap().data {
            SampleData::Cloud(c) => assert_eq!(c.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = parse_table("0 0 0\n1 2\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }));
        assert!(parse_table("0 0 x\n").is_err());
    }

    #[test]
    fn weights_round_trip() {
        let s = gen_fibonacci_sphere(8).unwrap();
        let w = WeightsFile {
            pipeline: Pipeline::Tube {
                codim: 2,
                q: 4,
                epsilon: 0.05,
            },
            boundary: s,
            base_index: Some((0..8).map(|k| k / 4).collect()),
            tau: (0..8).map(|k| 0.1 * k as f64 + 1e-17).collect(),
            offset: Some(0.25),
            softening: 0.0,
            lambda: 1.5e-6,
            residual: 3.25e-9,
        };
        let back = weights_from_table(&parse_table(&format_weights(&w)).unwrap()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn fixture_headers() {
        let h = parse_table("# fixture=ellipsoid a=1 b=2 c=3\n").unwrap().header;
        let spec = fixture_from_header(&h).unwrap().unwrap();
        assert_eq!(spec.kind, SurfaceKind::Ellipsoid { a: 1.0, b: 2.0, c: 3.0 });
        let h = parse_table("# fixture=torus\n").unwrap().header;
        assert!(fixture_from_header(&h).is_err());
    }
}
