//! File formats.
//!
//! All files are JSON except the CSV mirror of experiment tables. JSON
//! numbers use the shortest representation that round-trips the `f64`
//! exactly (never more than 17 significant digits); CSV cells are rounded to
//! 12 significant digits. Every write goes to a temporary file in the target
//! directory that is then renamed over the destination.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Vector2};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::amalgam::{AmalgamReport, AmalgamResult, VFormation};
use crate::error::{Error, Result};
use crate::geometry::{LinearMap, Polytope2D};
use crate::incarnation::IncarnatingSet;
use crate::symmetry::FiniteOrthogonalGroup;

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_string(value)?.as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// `x` rounded to 12 significant digits, printed without trailing noise.
pub fn csv_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    // Adding zero turns -0 into +0.
    (rounded + 0.0).to_string()
}

/// Writes a CSV table; numeric cells should already be formatted with
/// [`csv_number`].
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}

/// `ambient_p` as written in files: a number, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Tag(InfTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

impl PValue {
    pub fn from_f64(p: f64) -> Self {
        if p.is_infinite() {
            PValue::Tag(InfTag::Inf)
        } else {
            PValue::Number(p)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            PValue::Number(p) => p,
            PValue::Tag(InfTag::Inf) => f64::INFINITY,
        }
    }
}

/// `{"dim", "ambient_p", "convention", "generators"}`.
///
/// `"half"` lists one representative per antipodal pair; `"full"` lists
/// the whole symmetric set, which is halved on reading.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSetFile {
    pub dim: usize,
    pub ambient_p: PValue,
    #[serde(default = "half")]
    pub convention: String,
    pub generators: Vec<Vec<f64>>,
}

fn half() -> String {
    "half".into()
}

impl GeneratorSetFile {
    pub fn from_set(k: &IncarnatingSet) -> Self {
        Self {
            dim: k.dim(),
            ambient_p: PValue::from_f64(k.ambient_p()),
            convention: half(),
            generators: k
                .generators()
                .iter()
                .map(|g| g.iter().cloned().collect())
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<IncarnatingSet> {
        let raw: Vec<DVector<f64>> = self
            .generators
            .iter()
            .map(|g| DVector::from_row_slice(g))
            .collect();
        let raw = match self.convention.as_str() {
            "half" => raw,
            "full" => halve_full_set(raw)?,
            other => return Err(Error::Format(format!("unknown convention {other:?}"))),
        };
        IncarnatingSet::new(self.dim, raw, self.ambient_p.to_f64())
    }
}

/// Keeps one vector of every antipodal pair of a full symmetric list.
fn halve_full_set(raw: Vec<DVector<f64>>) -> Result<Vec<DVector<f64>>> {
    let scale = raw.iter().map(|v| v.amax()).fold(0.0, f64::max);
    let eps = 1e-9 * scale;
    let mut used = vec![false; raw.len()];
    let mut out = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = (i + 1..raw.len()).find(|&j| !used[j] && (&raw[j] + &raw[i]).amax() <= eps);
        match partner {
            Some(j) => used[j] = true,
            None => return Err(Error::Asymmetric),
        }
        out.push(raw[i].clone());
    }
    Ok(out)
}

pub fn read_generator_set(path: &Path) -> Result<IncarnatingSet> {
    read_json::<GeneratorSetFile>(path)?.to_set()
}

pub fn write_generator_set(path: &Path, k: &IncarnatingSet) -> Result<()> {
    write_json(path, &GeneratorSetFile::from_set(k))
}

/// `{"vertices": [[x, y], ...]}` in counter-clockwise order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonFile {
    pub fn from_polygon(p: &Polytope2D) -> Self {
        Self {
            vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
        }
    }

    pub fn to_polygon(&self) -> Result<Polytope2D> {
        Polytope2D::from_ccw(
            self.vertices
                .iter()
                .map(|v| Vector2::new(v[0], v[1]))
                .collect(),
        )
    }
}

pub fn read_polygon(path: &Path) -> Result<Polytope2D> {
    read_json::<PolygonFile>(path)?.to_polygon()
}

pub fn write_polygon(path: &Path, p: &Polytope2D) -> Result<()> {
    write_json(path, &PolygonFile::from_polygon(p))
}

pub fn matrix_rows(m: &LinearMap) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().cloned().collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>], cols_if_empty: usize) -> Result<LinearMap> {
    let cols = rows.first().map_or(cols_if_empty, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VFormationFile {
    pub root_dim: usize,
    #[serde(rename = "K_Y")]
    pub k_y: GeneratorSetFile,
    #[serde(rename = "K_Z")]
    pub k_z: GeneratorSetFile,
    #[serde(rename = "i_Y")]
    pub i_y: Vec<Vec<f64>>,
    #[serde(rename = "i_Z")]
    pub i_z: Vec<Vec<f64>>,
}

impl VFormationFile {
    pub fn from_vformation(v: &VFormation) -> Self {
        Self {
            root_dim: v.root_dim,
            k_y: GeneratorSetFile::from_set(&v.k_y),
            k_z: GeneratorSetFile::from_set(&v.k_z),
            i_y: matrix_rows(&v.i_y),
            i_z: matrix_rows(&v.i_z),
        }
    }

    pub fn to_vformation(&self) -> Result<VFormation> {
        VFormation::new(
            self.root_dim,
            self.k_y.to_set()?,
            self.k_z.to_set()?,
            matrix_from_rows(&self.i_y, self.root_dim)?,
            matrix_from_rows(&self.i_z, self.root_dim)?,
        )
    }
}

pub fn read_vformation(path: &Path) -> Result<VFormation> {
    read_json::<VFormationFile>(path)?.to_vformation()
}

/// Generator-set JSON of `K_W` extended with the two embeddings and an
/// optional verification report.
#[derive(Debug, Clone, Serialize)]
pub struct AmalgamFile {
    #[serde(flatten)]
    pub k_w: GeneratorSetFile,
    #[serde(rename = "j_Y")]
    pub j_y: Vec<Vec<f64>>,
    #[serde(rename = "j_Z")]
    pub j_z: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<AmalgamReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl AmalgamFile {
    pub fn new(a: &AmalgamResult, report: Option<AmalgamReport>, meta: Option<Value>) -> Self {
        Self {
            k_w: GeneratorSetFile::from_set(&a.k_w),
            j_y: matrix_rows(&a.j_y),
            j_z: matrix_rows(&a.j_z),
            report,
            meta,
        }
    }
}

/// Reading side of [`AmalgamFile`]; any stored report is ignored.
#[derive(Debug, Clone, Deserialize)]
pub struct AmalgamInput {
    #[serde(flatten)]
    pub k_w: GeneratorSetFile,
    #[serde(rename = "j_Y")]
    pub j_y: Vec<Vec<f64>>,
    #[serde(rename = "j_Z")]
    pub j_z: Vec<Vec<f64>>,
}

/// Reads an amalgam file back into an [`AmalgamResult`] with an empty summary.
pub fn read_amalgam(path: &Path) -> Result<AmalgamResult> {
    let f: AmalgamInput = read_json(path)?;
    let k_w = f.k_w.to_set()?;
    Ok(AmalgamResult {
        j_y: matrix_from_rows(&f.j_y, 0)?,
        j_z: matrix_from_rows(&f.j_z, 0)?,
        k_w,
        summary: Default::default(),
    })
}

/// Subspace description for incarnation: `basis` is `ambient_dim × m`, one
/// row per ambient coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncarnateFile {
    pub ambient_p: PValue,
    pub ambient_dim: usize,
    pub basis: Vec<Vec<f64>>,
}

pub fn read_incarnate(path: &Path) -> Result<(f64, usize, LinearMap)> {
    let f: IncarnateFile = read_json(path)?;
    let basis = matrix_from_rows(&f.basis, 0)?;
    Ok((f.ambient_p.to_f64(), f.ambient_dim, basis))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub n: usize,
    pub elements: Vec<Vec<Vec<f64>>>,
}

impl GroupFile {
    pub fn from_group(g: &FiniteOrthogonalGroup) -> Self {
        Self {
            n: g.n(),
            elements: g.elements().iter().map(matrix_rows).collect(),
        }
    }

    pub fn to_group(&self) -> Result<FiniteOrthogonalGroup> {
        let elements = self
            .elements
            .iter()
            .map(|e| matrix_from_rows(e, self.n))
            .collect::<Result<Vec<_>>>()?;
        FiniteOrthogonalGroup::from_elements(self.n, elements)
    }
}

pub fn read_group(path: &Path) -> Result<FiniteOrthogonalGroup> {
    read_json::<GroupFile>(path)?.to_group()
}
