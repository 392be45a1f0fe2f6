//! Text checkpoint of trained parameters.
//!
//! Layout (UTF-8, `\n` line endings):
//!
//! ```text
//! slgad-checkpoint v1
//! d <D>
//! d_hidden <D'>
//! config_hash <16 hex digits>
//! w_enc
//! <D rows of D' tab-separated values>
//! w_dec
//! <D' rows of D values>
//! w_s
//! <D' rows of D' values>
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a reload
//! reproduces every parameter bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const MAGIC: &str = "slgad-checkpoint v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub config_hash: String,
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "d {}", p.n_features());
        let _ = writeln!(out, "d_hidden {}", p.d_hidden());
        let _ = writeln!(out, "config_hash {}", self.config_hash);
        for (name, m) in p.named() {
            let _ = writeln!(out, "{name}");
            for row in m.rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join("\t"));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Checkpoint(format!("truncated before {what}")))
        };
        if next("header")? != MAGIC {
            return Err(Error::Checkpoint("not a v1 checkpoint".into()));
        }
        let field = |line: &str, key: &str| -> Result<String> {
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::Checkpoint(format!("expected `{key} ...`, found {line:?}")))
        };
        let dim = |s: String| {
            s.parse::<usize>()
                .map_err(|_| Error::Checkpoint(format!("bad dimension {s:?}")))
        };
        let d = dim(field(next("d")?, "d")?)?;
        let h = dim(field(next("d_hidden")?, "d_hidden")?)?;
        let config_hash = field(next("config_hash")?, "config_hash")?;

        let mut matrix = |name: &str, rows: usize, cols: usize| -> Result<Array2<f64>> {
            if next(name)? != name {
                return Err(Error::Checkpoint(format!("expected section {name}")));
            }
            let mut values = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                let line = next(name)?;
                let before = values.len();
                for tok in line.split('\t') {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| Error::Checkpoint(format!("{name} row {r}: bad value {tok:?}")))?;
                    values.push(v);
                }
                if values.len() - before != cols {
                    return Err(Error::Checkpoint(format!(
                        "{name} row {r}: expected {cols} values"
                    )));
                }
            }
            Ok(Array2::from_shape_vec((rows, cols), values).expect("counted"))
        };
        let w_enc = matrix("w_enc", d, h)?;
        let w_dec = matrix("w_dec", h, d)?;
        let w_s = matrix("w_s", h, h)?;
        let params = ModelParams::from_matrices(w_enc, w_dec, w_s)?;
        Ok(Checkpoint {
            params,
            config_hash,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Checkpoint::parse(&text)
    }
}
