//! CSV and JSON writers. Numbers are printed with 17 significant digits so
//! files round-trip exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chiral_ladder_core::{DdiMatrix, Intensities, SeparationSweep, SpectrumResult};
use serde::Serialize;

use crate::error::CliError;

fn num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").unwrap();
}

/// Rows of `delta,T,R,Tt,Rt,loss`. Every row must have solved.
pub fn spectrum_csv(result: &SpectrumResult) -> String {
    let mut out = String::from("# delta in units of Gamma0; intensities dimensionless\n");
    out.push_str("delta,T,R,Tt,Rt,loss\n");
    for (&d, row) in result.deltas.iter().zip(&result.rows) {
        let i: &Intensities = row
            .as_ref()
            .expect("spectrum rows are checked before writing");
        for (k, x) in [d, i.t, i.r, i.tt, i.rt, i.loss].into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            num(&mut out, x);
        }
        out.push('\n');
    }
    out
}

/// Long format `delta,L_nm,Tt,T`, spacing-major.
pub fn sweep_csv(sweep: &SeparationSweep) -> String {
    let mut out =
        String::from("# delta in units of Gamma0; L_nm in nanometres; intensities dimensionless\n");
    out.push_str("delta,L_nm,Tt,T\n");
    for (d, l, row) in sweep.cells() {
        let i = row
            .as_ref()
            .expect("sweep cells are checked before writing");
        for (k, x) in [d, l, i.tt, i.t].into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            num(&mut out, x);
        }
        out.push('\n');
    }
    out
}

/// Plain N×N matrix of J_ij in units of Gamma0, no header.
pub fn ddi_csv(ddi: &DdiMatrix) -> String {
    let mut out = String::new();
    for row in ddi.rows() {
        for (k, &x) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            num(&mut out, x);
        }
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// `dir/stem.<suffix>` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes via a temporary sibling and a rename, so readers never see a
/// half-written file.
pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|source| {
        let _ = std::fs::remove_file(&tmp);
        io(source)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -241.53, 5e-324, 0.0, 1.0 - f64::EPSILON] {
            let mut s = String::new();
            num(&mut s, x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn sibling_replaces_extension() {
        assert_eq!(
            sibling(Path::new("a/b/run.csv"), "peaks.json"),
            Path::new("a/b/run.peaks.json")
        );
        assert_eq!(
            sibling(Path::new("run"), "manifest.json"),
            Path::new("run.manifest.json")
        );
    }

    #[test]
    fn ddi_dump_has_n_rows_of_n() {
        let m = DdiMatrix::from_offsets(3, &[2.0, 0.5]);
        let csv = ddi_csv(&m);
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows, [[0.0, 2.0, 0.5], [2.0, 0.0, 2.0], [0.5, 2.0, 0.0]]);
    }
}
