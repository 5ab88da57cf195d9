use std::io::{BufRead, BufReader, Read};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::LassoInstance;

/// `A = I₂`, `b = (1, 1)`, `c = 1`; the minimizer is `(½, ½)` with value 3/2.
pub fn toy_lasso() -> LassoInstance {
    LassoInstance {
        a: DMatrix::identity(2, 2),
        b: DVector::from_vec(vec![1.0, 1.0]),
        c: 1.0,
        x_star: Some(DVector::from_vec(vec![0.5, 0.5])),
        v_star: Some(1.5),
        params: None,
    }
}

/// Small non-separable binary classification set: `label f1 f2 f3 f4` per line.
pub const LOGISTIC_FIXTURE: &str = "\
# label features...
 1  0.80  0.10 -0.30  1.20
 1  1.10 -0.40  0.20  0.90
 1  0.30  0.70  0.50  1.50
 1 -0.20  0.90  1.10  0.40
 1  0.90  0.20 -0.60  0.70
 1  0.50 -0.10  0.40 -0.30
-1 -0.70  0.30  0.20 -1.10
-1 -1.20 -0.50  0.60 -0.40
-1 -0.40 -0.80 -0.90  0.20
-1  0.10 -0.60 -0.30 -1.30
-1 -0.90  0.40 -0.20 -0.60
-1  0.60  0.50  0.10 -0.20
";

/// Reads whitespace-separated rows `label x_1 … x_p`; labels must be ±1.
pub fn read_dense_text<R: Read>(r: R) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let loc = |entry: usize| format!("line {}, entry {entry}", idx + 1);
        let vals: Vec<f64> = t
            .split_whitespace()
            .enumerate()
            .map(|(e, tok)| {
                tok.parse::<f64>().map_err(|err| Error::Parse {
                    location: loc(e + 1),
                    message: format!("'{tok}': {err}"),
                })
            })
            .collect::<Result<_>>()?;
        if vals[0] != 1.0 && vals[0] != -1.0 {
            return Err(Error::Parse {
                location: loc(1),
                message: format!("label {} is not ±1", vals[0]),
            });
        }
        if let Some(first) = rows.first() {
            if first.len() != vals.len() - 1 {
                return Err(Error::Validation(format!(
                    "line {} has {} features, expected {}",
                    idx + 1,
                    vals.len() - 1,
                    first.len()
                )));
            }
        }
        labels.push(vals[0]);
        rows.push(vals[1..].to_vec());
    }
    if rows.is_empty() {
        return Err(Error::Validation("no samples".into()));
    }
    let p = rows[0].len();
    let features = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
    Ok((features, DVector::from_vec(labels)))
}

pub fn logistic_fixture() -> (DMatrix<f64>, DVector<f64>) {
    read_dense_text(LOGISTIC_FIXTURE.as_bytes()).expect("embedded fixture parses")
}
