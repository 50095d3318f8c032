//! JSON instance files.
//!
//! ```text
//! {"n": 3, "a": [..], "c": [..], "Q": [[1, 1, 4.0], [1, 2, -1.0], ...],
//!  "offset": 0.0, "meta": {"y": [..], "M": 2.5}}
//! ```
//!
//! `Q` triplets are one-based with `i <= j` and describe `(1/2) x'Qx`. Keys
//! are written in the order above; the reader accepts any order, and `offset`
//! and `meta` may be omitted.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Entry, Instance, Meta};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    a: Vec<f64>,
    c: Vec<f64>,
    #[serde(rename = "Q")]
    q: Vec<(usize, usize, f64)>,
    #[serde(default)]
    offset: f64,
    #[serde(default)]
    meta: RawMeta,
}

#[derive(Serialize, Deserialize, Default)]
struct RawMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<Vec<f64>>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn from_raw(raw: RawInstance) -> Result<Instance> {
    let n = raw.n;
    if n == 0 {
        return Err(Error::parse("n", "must be >= 1"));
    }
    if raw.a.len() != n {
        return Err(Error::parse("a", format!("expected {n} entries, found {}", raw.a.len())));
    }
    if raw.c.len() != n {
        return Err(Error::parse("c", format!("expected {n} entries, found {}", raw.c.len())));
    }
    if let Some(y) = &raw.meta.y {
        if y.len() != n {
            return Err(Error::parse("meta.y", format!("expected {n} entries, found {}", y.len())));
        }
    }
    let mut q = Vec::with_capacity(raw.q.len());
    for (k, &(i, j, v)) in raw.q.iter().enumerate() {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::parse(format!("Q[{k}]"), format!("index ({i}, {j}) outside 1..={n}")));
        }
        if i > j {
            return Err(Error::parse(format!("Q[{k}]"), format!("lower-triangle entry ({i}, {j})")));
        }
        q.push(Entry { i: i - 1, j: j - 1, v });
    }
    Ok(Instance::new(raw.a, raw.c, q)?.with_offset(raw.offset).with_meta(Meta {
        y: raw.meta.y,
        big_m: raw.meta.m,
    }))
}

fn to_raw(inst: &Instance) -> RawInstance {
    RawInstance {
        n: inst.n,
        a: inst.a.clone(),
        c: inst.c.clone(),
        q: inst.q.iter().map(|e| (e.i + 1, e.j + 1, e.v)).collect(),
        offset: inst.offset,
        meta: RawMeta {
            y: inst.meta.y.clone(),
            m: inst.meta.big_m,
        },
    }
}

pub fn from_json_str(s: &str) -> Result<Instance> {
    from_raw(serde_json::from_str(s).map_err(json_error)?)
}

pub fn to_json_string(inst: &Instance) -> String {
    serde_json::to_string(&to_raw(inst)).expect("instance serialization cannot fail")
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let reader = BufReader::new(File::open(path)?);
    from_raw(serde_json::from_reader(reader).map_err(json_error)?)
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &to_raw(inst)).map_err(json_error)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
