//! Self-describing binary model files.
//!
//! Layout: a text header of `key=value` lines terminated by `end`, followed by
//! little-endian IEEE-754 doubles: the training inputs row-major (`n·p`), the
//! coefficient matrix column-major (`rows·d`), then the `d` eigenvalues.
//!
//! ```text
//! nlsdr-model
//! version=1
//! kind=gsave
//! n=200
//! p=10
//! d=1
//! coeff_rows=201
//! gamma_x=0.0473...
//! eps_x=0.01
//! gamma_y=0.71...
//! eps_y=0.001
//! slices=10
//! gsave_exponent=derivation
//! end
//! ```
//!
//! Hyperparameters are written with Rust's shortest round-trip formatting so a
//! save/load cycle is bit-exact.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{FittedModel, GsaveExponent, Hyper, MethodKind};
use crate::data::DataMatrix;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "nlsdr-model";

impl FittedModel {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let h = &self.hyper;
        let header = format!(
            "{MAGIC}\nversion={FORMAT_VERSION}\nkind={}\nn={}\np={}\nd={}\ncoeff_rows={}\n\
             gamma_x={:?}\neps_x={:?}\ngamma_y={:?}\neps_y={:?}\nslices={}\ngsave_exponent={}\nend\n",
            self.kind,
            self.train_x.nrows(),
            self.train_x.ncols(),
            self.d(),
            self.coeffs.nrows(),
            h.gamma_x,
            h.eps_x,
            h.gamma_y,
            h.eps_y,
            h.slices,
            h.gsave_exponent.as_str(),
        );
        w.write_all(header.as_bytes())?;
        let values = self
            .train_x
            .to_row_major()
            .into_iter()
            .chain(self.coeffs.iter().copied())
            .chain(self.eigvals.iter().copied());
        for v in values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut line = String::new();
        r.read_line(&mut line)?;
        if line.trim_end() != MAGIC {
            return Err(Error::Format("missing `nlsdr-model` header line".into()));
        }
        let mut fields = BTreeMap::new();
        loop {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Format("header is not terminated by `end`".into()));
            }
            let l = line.trim_end();
            if l == "end" {
                break;
            }
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header line `{l}`")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Format(format!("header field `{k}` missing")))
        };
        let version: u32 = parse(get("version")?, "version")?;
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let kind: MethodKind = get("kind")?.parse()?;
        let n: usize = parse(get("n")?, "n")?;
        let p: usize = parse(get("p")?, "p")?;
        let d: usize = parse(get("d")?, "d")?;
        let rows: usize = parse(get("coeff_rows")?, "coeff_rows")?;
        let expected_rows = if kind.uses_intercept() { n + 1 } else { n };
        if rows != expected_rows {
            return Err(Error::Format(format!(
                "{kind} model with n={n} must have {expected_rows} coefficient rows, header says {rows}"
            )));
        }
        let hyper = Hyper {
            gamma_x: parse(get("gamma_x")?, "gamma_x")?,
            eps_x: parse(get("eps_x")?, "eps_x")?,
            gamma_y: parse(get("gamma_y")?, "gamma_y")?,
            eps_y: parse(get("eps_y")?, "eps_y")?,
            d,
            slices: parse(get("slices")?, "slices")?,
            gsave_exponent: get("gsave_exponent")?.parse::<GsaveExponent>()?,
        };
        hyper.validate()?;

        let x = read_f64s(&mut r, n * p)?;
        let coeffs = read_f64s(&mut r, rows * d)?;
        let eig = read_f64s(&mut r, d)?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after eigenvalues".into()));
        }
        Ok(FittedModel {
            kind,
            hyper,
            train_x: DataMatrix::from_row_major(n, p, &x)?,
            coeffs: DMatrix::from_column_slice(rows, d, &coeffs),
            eigvals: DVector::from_vec(eig),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(File::open(path)?)
    }
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("cannot parse {what} from `{s}`")))
}

fn read_f64s<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; count * 8];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Format(format!("payload truncated, expected {count} more doubles")))?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(kind: MethodKind) -> FittedModel {
        let n = 3;
        let rows = if kind.uses_intercept() { n + 1 } else { n };
        FittedModel {
            kind,
            hyper: Hyper::new(0.1 + 0.2, 0.01, 1.0 / 3.0, 0.001, 2)
                .with_gsave_exponent(GsaveExponent::Printed),
            train_x: DataMatrix::from_row_major(3, 2, &[0.1, -2.5, 1e-300, 7.0, f64::MIN_POSITIVE, 3.0]).unwrap(),
            coeffs: DMatrix::from_fn(rows, 2, |i, j| (i as f64 + 0.3) / (j as f64 + 7.0)),
            eigvals: DVector::from_vec(vec![0.9, 1.0 / 7.0]),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for kind in MethodKind::ALL {
            let m = sample(kind);
            let mut buf = Vec::new();
            m.write_to(&mut buf).unwrap();
            let back = FittedModel::read_from(buf.as_slice()).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.hyper.gamma_x.to_bits(), m.hyper.gamma_x.to_bits());
        }
    }

    #[test]
    fn version_mismatch_names_both_versions() {
        let mut buf = Vec::new();
        sample(MethodKind::Gsir).write_to(&mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf).replacen("version=1", "version=7", 1);
        let err = FittedModel::read_from(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: 7, expected: 1 }));
        let msg = err.to_string();
        assert!(msg.contains('7') && msg.contains('1'));
    }

    #[test]
    fn unknown_kind_and_truncation() {
        let mut buf = Vec::new();
        sample(MethodKind::Kcca).write_to(&mut buf).unwrap();
        let swapped: Vec<u8> = String::from_utf8_lossy(&buf).replacen("kind=kcca", "kind=pca", 1).into();
        // lossy conversion garbles the payload but the header is checked first
        assert!(matches!(FittedModel::read_from(swapped.as_slice()), Err(Error::UnknownMethod(_))));
        buf.truncate(buf.len() - 3);
        assert!(matches!(FittedModel::read_from(buf.as_slice()), Err(Error::Format(_))));
    }
}
