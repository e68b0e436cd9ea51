//! In-memory datasets and their text serialization.
//!
//! File layout (UTF-8):
//!
//! ```text
//! format=sphere d=<int> n=<int>
//! <y> <x_1> ... <x_d>          (n rows, y ∈ {+1, -1}, 17 significant digits)
//! ```
//!
//! Hypercube datasets use `format=cube`, integer coordinates ±1 and `y ∈ {0, 1}`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{check_dims, check_finite, norm, LabeledExample, SignLabel, UnitVector, REL_TOL};
use crate::simulate::SimulatorConfig;

/// Where a dataset came from. Not part of the file format and ignored by equality.
#[derive(Debug, Clone, Default)]
pub enum Provenance {
    #[default]
    Constructed,
    Simulated(SimulatorConfig),
    HardInstance { d: usize, s_star: usize, seed: u64 },
    File(PathBuf),
}

/// Labeled points on the unit sphere, stored row-major.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    d: usize,
    features: Vec<f64>,
    labels: Vec<SignLabel>,
    pub provenance: Provenance,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
            && self.labels == other.labels
            && self.features.len() == other.features.len()
            && self
                .features
                .iter()
                .zip(&other.features)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Dataset {
    pub fn new(d: usize) -> Self {
        Dataset {
            d,
            ..Default::default()
        }
    }

    pub fn with_capacity(d: usize, n: usize) -> Self {
        Dataset {
            d,
            features: Vec::with_capacity(d * n),
            labels: Vec::with_capacity(n),
            provenance: Provenance::Constructed,
        }
    }

    pub fn from_examples(d: usize, examples: Vec<LabeledExample>) -> Result<Self> {
        let mut ds = Dataset::with_capacity(d, examples.len());
        for ex in examples {
            check_dims(d, ex.x.dim())?;
            ds.push_row(ex.x.as_slice(), ex.y);
        }
        Ok(ds)
    }

    /// Appends a row, checking dimension and unit norm.
    pub fn push(&mut self, x: &[f64], y: SignLabel) -> Result<()> {
        check_dims(self.d, x.len())?;
        check_finite(x, "dataset row")?;
        let n = norm(x);
        if (n - 1.0).abs() > REL_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        self.push_row(x, y);
        Ok(())
    }

    pub(crate) fn push_row(&mut self, x: &[f64], y: SignLabel) {
        debug_assert_eq!(x.len(), self.d);
        self.features.extend_from_slice(x);
        self.labels.push(y);
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn label(&self, i: usize) -> SignLabel {
        self.labels[i]
    }

    pub fn labels(&self) -> &[SignLabel] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], SignLabel)> + '_ {
        self.features
            .chunks_exact(self.d.max(1))
            .zip(self.labels.iter().copied())
    }

    pub fn examples(&self) -> Vec<LabeledExample> {
        self.rows()
            .map(|(x, y)| LabeledExample {
                x: UnitVector::from_vec_unchecked(x.to_vec()),
                y,
            })
            .collect()
    }

    /// Rows `[0, n)` and `[n, len)`.
    pub fn split_at(&self, n: usize) -> (Dataset, Dataset) {
        let n = n.min(self.len());
        let head = Dataset {
            d: self.d,
            features: self.features[..n * self.d].to_vec(),
            labels: self.labels[..n].to_vec(),
            provenance: self.provenance.clone(),
        };
        let tail = Dataset {
            d: self.d,
            features: self.features[n * self.d..].to_vec(),
            labels: self.labels[n..].to_vec(),
            provenance: self.provenance.clone(),
        };
        (head, tail)
    }
}

/// Labeled hypercube points `x ∈ {±1}^d` with 0/1 labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CubeDataset {
    d: usize,
    coords: Vec<i8>,
    labels: Vec<u8>,
}

impl CubeDataset {
    pub fn new(d: usize) -> Self {
        CubeDataset {
            d,
            ..Default::default()
        }
    }

    pub fn push(&mut self, x: &[i8], y: u8) -> Result<()> {
        check_dims(self.d, x.len())?;
        if x.iter().any(|&c| c != 1 && c != -1) || y > 1 {
            return Err(crate::error::out_of_range("cube row", format!("{x:?} / {y}"), "{±1}^d × {0,1}"));
        }
        self.coords.extend_from_slice(x);
        self.labels.push(y);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[i8], u8)> + '_ {
        self.coords
            .chunks_exact(self.d.max(1))
            .zip(self.labels.iter().copied())
    }
}

/// A dataset read from disk, tagged by its header format.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetFile {
    Sphere(Dataset),
    Cube(CubeDataset),
}

impl DatasetFile {
    pub fn format_name(&self) -> &'static str {
        match self {
            DatasetFile::Sphere(_) => "sphere",
            DatasetFile::Cube(_) => "cube",
        }
    }
}

fn fmt_label(y: SignLabel) -> &'static str {
    match y {
        SignLabel::Positive => "+1",
        SignLabel::Negative => "-1",
    }
}

pub fn write_sphere<W: Write>(dataset: &Dataset, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "format=sphere d={} n={}", dataset.dim(), dataset.len())?;
    let mut line = String::new();
    for (x, y) in dataset.rows() {
        line.clear();
        line.push_str(fmt_label(y));
        for c in x {
            // 17 significant digits round-trip every f64 exactly.
            let _ = write!(line, " {c:.16e}");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

pub fn write_cube<W: Write>(dataset: &CubeDataset, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "format=cube d={} n={}", dataset.dim(), dataset.len())?;
    for (x, y) in dataset.rows() {
        write!(out, "{y}")?;
        for c in x {
            write!(out, " {c}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_sphere(dataset, fs::File::create(path)?)?;
    Ok(())
}

pub fn write_cube_dataset(dataset: &CubeDataset, path: impl AsRef<Path>) -> Result<()> {
    write_cube(dataset, fs::File::create(path)?)?;
    Ok(())
}

struct Header {
    format: String,
    d: usize,
    n: usize,
}

fn parse_header(line: &str) -> std::result::Result<Header, String> {
    let mut format = None;
    let mut d = None;
    let mut n = None;
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("malformed header token `{tok}`"))?;
        match k {
            "format" => format = Some(v.to_string()),
            "d" => d = Some(v.parse::<usize>().map_err(|e| format!("bad d: {e}"))?),
            "n" => n = Some(v.parse::<usize>().map_err(|e| format!("bad n: {e}"))?),
            other => return Err(format!("unknown header key `{other}`")),
        }
    }
    match (format, d, n) {
        (Some(format), Some(d), Some(n)) if d >= 1 => Ok(Header { format, d, n }),
        (_, Some(0), _) => Err("d must be positive".into()),
        _ => Err("header must be `format=<sphere|cube> d=<int> n=<int>`".into()),
    }
}

pub fn read_dataset_from<R: BufRead>(reader: R, path: &Path) -> Result<DatasetFile> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(l) => l?,
        None => return Err(perr(1, "missing header".into())),
    };
    let header = parse_header(&header).map_err(|m| perr(1, m))?;
    let d = header.d;

    let mut sphere = (header.format == "sphere").then(|| Dataset::with_capacity(d, header.n));
    let mut cube = (header.format == "cube").then(|| CubeDataset::new(d));
    if sphere.is_none() && cube.is_none() {
        return Err(perr(1, format!("unknown format `{}`", header.format)));
    }

    let mut rows = 0usize;
    let mut xs = Vec::with_capacity(d);
    let mut cs = Vec::with_capacity(d);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != d + 1 {
            return Err(perr(lineno, format!("expected {} fields (label + {d} coordinates), found {}", d + 1, toks.len())));
        }
        if let Some(ds) = sphere.as_mut() {
            let y = toks[0]
                .parse::<i64>()
                .ok()
                .and_then(SignLabel::from_int)
                .ok_or_else(|| perr(lineno, format!("label `{}` is not +1 or -1", toks[0])))?;
            xs.clear();
            for t in &toks[1..] {
                xs.push(t.parse::<f64>().map_err(|e| perr(lineno, format!("coordinate `{t}`: {e}")))?);
            }
            ds.push(&xs, y).map_err(|e| perr(lineno, e.to_string()))?;
        } else if let Some(ds) = cube.as_mut() {
            let y = match toks[0] {
                "0" => 0,
                "1" => 1,
                t => return Err(perr(lineno, format!("label `{t}` is not 0 or 1"))),
            };
            cs.clear();
            for t in &toks[1..] {
                cs.push(match *t {
                    "1" | "+1" => 1i8,
                    "-1" => -1i8,
                    _ => return Err(perr(lineno, format!("coordinate `{t}` is not ±1"))),
                });
            }
            ds.push(&cs, y).map_err(|e| perr(lineno, e.to_string()))?;
        }
        rows += 1;
    }
    if rows != header.n {
        return Err(perr(1, format!("header declares n={} but {rows} rows follow", header.n)));
    }
    Ok(match (sphere, cube) {
        (Some(mut ds), _) => {
            ds.provenance = Provenance::File(path.to_path_buf());
            DatasetFile::Sphere(ds)
        }
        (_, Some(ds)) => DatasetFile::Cube(ds),
        _ => unreachable!(),
    })
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<DatasetFile> {
    let path = path.as_ref();
    let file = fs::File::open(path)?;
    read_dataset_from(BufReader::new(file), path)
}
