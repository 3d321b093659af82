//! Problem JSON and target-vector files, plus the versioned report envelope
//! shared by every CLI output.
//!
//! Complex numbers are always `[re, im]` pairs; matrices are lists of rows.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::hhl::HhlProblem;
use crate::lde::LdeProblem;
use crate::linalg::{c, CMatrix};
use crate::prep::TargetState;
use crate::{Error, Result};

/// Bumped whenever a report field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

pub type Pair = [f64; 2];

pub fn serialize_cvec<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

pub fn to_pairs(v: &[Complex64]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(v: &[Pair]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| c(*re, *im)).collect()
}

pub fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<CMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            actual: bad.len(),
        });
    }
    Ok(CMatrix::from_fn(n, cols, |i, j| {
        let [re, im] = rows[i][j];
        c(re, im)
    }))
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdeProblemFile {
    #[serde(rename = "M")]
    pub m: Vec<Vec<Pair>>,
    pub b: Vec<Pair>,
    pub x0: Vec<Pair>,
    pub t: f64,
    pub k: usize,
}

impl LdeProblemFile {
    pub fn into_problem(self) -> Result<LdeProblem> {
        LdeProblem::new(
            matrix_from_rows(&self.m)?,
            from_pairs(&self.b),
            from_pairs(&self.x0),
            self.t,
            self.k,
        )
    }

    pub fn from_problem(p: &LdeProblem) -> Self {
        Self {
            m: matrix_to_rows(&p.m),
            b: to_pairs(&p.b),
            x0: to_pairs(&p.x0),
            t: p.t,
            k: p.k,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HhlProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<Pair>>,
    pub b: Vec<Pair>,
    pub m: usize,
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(rename = "C", default)]
    pub c: Option<f64>,
}

impl HhlProblemFile {
    pub fn into_problem(self) -> Result<HhlProblem> {
        HhlProblem::new(matrix_from_rows(&self.a)?, from_pairs(&self.b), self.m, self.t0, self.c)
    }

    pub fn from_problem(p: &HhlProblem) -> Self {
        Self {
            a: matrix_to_rows(&p.a),
            b: to_pairs(&p.b),
            m: p.m,
            t0: Some(p.t0),
            c: Some(p.c_const),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_lde_problem(path: &Path) -> Result<LdeProblem> {
    read_json::<LdeProblemFile>(path)?.into_problem()
}

pub fn load_hhl_problem(path: &Path) -> Result<HhlProblem> {
    read_json::<HhlProblemFile>(path)?.into_problem()
}

#[derive(Debug, Deserialize)]
struct AmplitudeRow {
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Loads an amplitude vector from a `.csv` file with header `re,im` (the
/// `im` column may be omitted) or from a JSON list of `[re, im]` pairs, and
/// normalizes it.
pub fn load_target(path: &Path) -> Result<TargetState> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let amps = if is_csv {
        if !path.is_file() {
            return Err(Error::File {
                path: path.display().to_string(),
                source: std::io::Error::from(std::io::ErrorKind::NotFound),
            });
        }
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        reader
            .deserialize::<AmplitudeRow>()
            .map(|row| row.map(|r| c(r.re, r.im)))
            .collect::<std::result::Result<Vec<_>, _>>()?
    } else {
        from_pairs(&read_json::<Vec<Pair>>(path)?)
    };
    TargetState::normalized(&amps)
}

/// Envelope wrapped around every emitted JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(schema: &'static str, seed: Option<u64>, config: Value, result: T) -> Self {
        Self {
            schema,
            schema_version: SCHEMA_VERSION,
            tool_version: crate::VERSION,
            seed,
            config,
            result,
        }
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `contents` to a temporary sibling of `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidProblem(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Renders rows as CSV text with the given header.
pub fn csv_string<R: Serialize>(header: &[&str], rows: &[R]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn tmpdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("qcost-io-{}-{}", std::process::id(), rand::random::<u32>()));
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn lde_problem_round_trip() {
        let p = crate::lde::pauli_x_problem(3);
        let text = serde_json::to_string(&LdeProblemFile::from_problem(&p)).unwrap();
        assert!(text.contains("\"M\":[[[0.0,0.0],[0.5,0.0]]"));
        let back = serde_json::from_str::<LdeProblemFile>(&text).unwrap().into_problem().unwrap();
        assert_eq!(back.m, p.m);
        assert_eq!(back.k, 3);
    }

    #[test]
    fn hhl_problem_defaults() {
        let text = r#"{"A": [[[2,0],[0,0]],[[0,0],[1,0]]], "b": [[1,0],[1,0]], "m": 2}"#;
        let p = serde_json::from_str::<HhlProblemFile>(text).unwrap().into_problem().unwrap();
        let (scaled, _) = p.scaled_spectrum();
        assert!((scaled[1] - 3.0).abs() < 1e-12);
        assert!((p.c_const - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ragged_matrix_rejected() {
        let rows = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[1.0, 0.0]]];
        assert!(matrix_from_rows(&rows).is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        let text = r#"{"A": [[[1,0]]], "b": [[1,0]], "m": 2, "extra": 1}"#;
        assert!(serde_json::from_str::<HhlProblemFile>(text).is_err());
    }

    #[test]
    fn targets_from_csv_and_json() {
        let d = tmpdir();
        let csv_path = d.join("t.csv");
        fs::write(&csv_path, "re,im\n3,0\n0,4\n").unwrap();
        let t = load_target(&csv_path).unwrap();
        assert_eq!(t.amplitudes(), &[c(0.6, 0.0), c(0.0, 0.8)]);
        let real_only = d.join("r.csv");
        fs::write(&real_only, "re\n1\n1\n").unwrap();
        assert_eq!(load_target(&real_only).unwrap().amplitudes().len(), 2);
        let json_path = d.join("t.json");
        fs::write(&json_path, "[[1,0],[0,0],[0,0],[0,0]]").unwrap();
        assert_eq!(load_target(&json_path).unwrap().amplitudes()[0], ONE);
        fs::write(&json_path, "[[0,0],[0,0]]").unwrap();
        assert!(load_target(&json_path).is_err());
        fs::remove_dir_all(d).unwrap();
    }

    #[test]
    fn atomic_write_replaces() {
        let d = tmpdir();
        let p = d.join("sub/out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(d.join("sub")).unwrap().count(), 1);
        fs::remove_dir_all(d).unwrap();
    }

    #[test]
    fn report_envelope() {
        let r = Report::new("test", Some(4), serde_json::json!({"k": 1}), vec![ZERO]);
        let v: Value = serde_json::from_str(&r.to_json_pretty().unwrap()).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["seed"], 4);
    }

    #[test]
    fn csv_rendering() {
        let s = csv_string(&["n", "p"], &[(8u32, 0.5f64), (16, 0.25)]).unwrap();
        assert_eq!(s, "n,p\n8,0.5\n16,0.25\n");
    }
}
