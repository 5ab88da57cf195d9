//! Directory layout: `A.mtx` (Matrix Market array, column-major), `b.txt`,
//! optional `x_star.txt` (one value per line), and `meta.json`.
//!
//! Floats are written in Rust's shortest round-trip exponent form, so a
//! save/load cycle reproduces every bit.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{GeneratorParams, LassoInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub m: usize,
    pub n: usize,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_star: Option<f64>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

pub fn write_matrix_market<W: Write>(mut w: W, a: &DMatrix<f64>) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.nrows(), a.ncols())?;
    for v in a.iter() {
        writeln!(w, "{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a real general Matrix Market file in array or coordinate format.
pub fn read_matrix_market<R: Read>(r: R, name: &str) -> Result<DMatrix<f64>> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(format!("{name} line 1"), "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(format!("{name} line 1"), format!("not a Matrix Market header: '{header}'")));
    }
    let coordinate = match tokens[2].as_str() {
        "array" => false,
        "coordinate" => true,
        f => return Err(parse_err(format!("{name} line 1"), format!("unsupported format '{f}'"))),
    };
    if !matches!(tokens[3].as_str(), "real" | "double" | "integer") {
        return Err(parse_err(format!("{name} line 1"), format!("unsupported field '{}'", tokens[3])));
    }
    if tokens[4] != "general" {
        return Err(parse_err(format!("{name} line 1"), format!("unsupported symmetry '{}'", tokens[4])));
    }

    // remaining non-comment tokens, tagged with their line number
    let mut body = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((idx + 1, t.to_string()));
    }
    let mut rows = body.into_iter();
    let (size_line, size) = rows
        .next()
        .ok_or_else(|| parse_err(format!("{name} size line"), "missing size line (short read)"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(format!("{name} line {size_line}"), format!("bad size line: {e}")))?;
    let expected_dims = if coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(parse_err(
            format!("{name} line {size_line}"),
            format!("size line needs {expected_dims} integers"),
        ));
    }
    let (m, n) = (dims[0], dims[1]);
    let parse_f = |line: usize, entry: usize, s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| parse_err(format!("{name} line {line}, entry {entry}"), format!("'{s}': {e}")))
    };

    if !coordinate {
        let total = m * n;
        let mut data = Vec::with_capacity(total);
        for (line, text) in rows {
            for tok in text.split_whitespace() {
                if data.len() == total {
                    return Err(parse_err(format!("{name} line {line}"), format!("more than {total} entries")));
                }
                data.push(parse_f(line, data.len() + 1, tok)?);
            }
        }
        if data.len() < total {
            return Err(parse_err(
                format!("{name} entry {}", data.len() + 1),
                format!("short read: expected {total} entries, found {}", data.len()),
            ));
        }
        return Ok(DMatrix::from_vec(m, n, data));
    }

    let nnz = dims[2];
    let mut a = DMatrix::zeros(m, n);
    let mut count = 0;
    for (line, text) in rows {
        count += 1;
        if count > nnz {
            return Err(parse_err(format!("{name} line {line}"), format!("more than {nnz} entries")));
        }
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(format!("{name} line {line}, entry {count}"), "expected 'i j value'"));
        }
        let idx = |s: &str, bound: usize| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|e| parse_err(format!("{name} line {line}, entry {count}"), format!("'{s}': {e}")))?;
            if v == 0 || v > bound {
                return Err(parse_err(
                    format!("{name} line {line}, entry {count}"),
                    format!("index {v} outside 1..={bound}"),
                ));
            }
            Ok(v - 1)
        };
        let (i, j) = (idx(parts[0], m)?, idx(parts[1], n)?);
        a[(i, j)] += parse_f(line, count, parts[2])?;
    }
    if count < nnz {
        return Err(parse_err(
            format!("{name} entry {}", count + 1),
            format!("short read: expected {nnz} entries, found {count}"),
        ));
    }
    Ok(a)
}

pub fn write_vector<W: Write>(mut w: W, v: &DVector<f64>) -> Result<()> {
    for x in v.iter() {
        writeln!(w, "{x:e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_vector<R: Read>(r: R, name: &str) -> Result<DVector<f64>> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        for tok in t.split_whitespace() {
            out.push(tok.parse::<f64>().map_err(|e| {
                parse_err(format!("{name} line {}, entry {}", idx + 1, out.len() + 1), format!("'{tok}': {e}"))
            })?);
        }
    }
    Ok(DVector::from_vec(out))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn save_instance(inst: &LassoInstance, dir: &Path) -> Result<()> {
    inst.validate()?;
    fs::create_dir_all(dir)?;
    write_matrix_market(create(&dir.join("A.mtx"))?, &inst.a)?;
    write_vector(create(&dir.join("b.txt"))?, &inst.b)?;
    let xs = dir.join("x_star.txt");
    match &inst.x_star {
        Some(x) => write_vector(create(&xs)?, x)?,
        None if xs.exists() => fs::remove_file(&xs)?,
        None => {}
    }
    let meta = InstanceMeta {
        m: inst.m(),
        n: inst.n(),
        c: inst.c,
        density: inst.params.as_ref().map(|p| p.density),
        seed: inst.params.as_ref().map(|p| p.seed),
        scale: inst.params.as_ref().map(|p| p.scale),
        v_star: inst.v_star,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Validation(e.to_string()))?;
    fs::write(dir.join("meta.json"), json + "\n")?;
    Ok(())
}

pub fn load_instance(dir: &Path) -> Result<LassoInstance> {
    let meta_text = fs::read_to_string(dir.join("meta.json"))?;
    let meta: InstanceMeta = serde_json::from_str(&meta_text).map_err(|e| {
        parse_err(format!("meta.json line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    let a = read_matrix_market(File::open(dir.join("A.mtx"))?, "A.mtx")?;
    let b = read_vector(File::open(dir.join("b.txt"))?, "b.txt")?;
    let xs = dir.join("x_star.txt");
    let x_star = if xs.exists() {
        Some(read_vector(File::open(&xs)?, "x_star.txt")?)
    } else {
        None
    };
    if a.nrows() != meta.m || a.ncols() != meta.n {
        return Err(Error::Validation(format!(
            "meta.json says {}×{} but A.mtx is {}×{}",
            meta.m,
            meta.n,
            a.nrows(),
            a.ncols()
        )));
    }
    let params = match (meta.density, meta.seed, meta.scale) {
        (Some(density), Some(seed), Some(scale)) => Some(GeneratorParams {
            m: meta.m,
            n: meta.n,
            density,
            c: meta.c,
            seed,
            scale,
        }),
        _ => None,
    };
    let inst = LassoInstance {
        a,
        b,
        c: meta.c,
        x_star,
        v_star: meta.v_star,
        params,
    };
    inst.validate()?;
    Ok(inst)
}
