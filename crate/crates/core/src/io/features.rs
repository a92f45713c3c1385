use std::collections::HashMap;
use std::path::Path;

use crate::dataset::Manifest;
use crate::error::{Error, Result};

/// `BIRF` read as a little-endian u32.
pub const FEATURE_MAGIC: u32 = u32::from_le_bytes(*b"BIRF");
pub const FEATURE_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

/// Identifier columns of a text feature line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureKey {
    pub image_path: String,
    pub identity: u64,
    pub camera: u32,
}

/// A set of equal-length vectors, optionally keyed by image.
///
/// Binary files carry no keys and align positionally with a manifest. Text
/// files carry `image_path,identity,camera,v1,...,vd` per line and are
/// matched by path. Values are held as `f64`; the binary payload is `f32`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub dim: usize,
    pub keys: Option<Vec<FeatureKey>>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn new(dim: usize, rows: Vec<Vec<f64>>, keys: Option<Vec<FeatureKey>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::dims(dim, bad.len()));
        }
        if let Some(k) = &keys {
            if k.len() != rows.len() {
                return Err(Error::dims(rows.len(), k.len()));
            }
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite feature value".into()));
        }
        Ok(Self { dim, keys, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.rows.len() * self.dim * 4);
        for word in [
            FEATURE_MAGIC,
            FEATURE_VERSION,
            self.rows.len() as u32,
            self.dim as u32,
        ] {
            out.extend_from_slice(&word.to_le_bytes());
        }
        for v in self.rows.iter().flatten() {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8], origin: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidData(format!("{origin}: {reason}"));
        if bytes.len() < HEADER_LEN {
            return Err(bad("truncated header".into()));
        }
        let word =
            |i: usize| u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().expect("4 bytes"));
        if word(0) != FEATURE_MAGIC {
            return Err(bad("bad magic".into()));
        }
        if word(1) != FEATURE_VERSION {
            return Err(bad(format!("unsupported version {}", word(1))));
        }
        let (count, dim) = (word(2) as usize, word(3) as usize);
        let expected = count
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| bad("size overflow".into()))?;
        if bytes.len() != expected {
            return Err(bad(format!(
                "expected {expected} bytes, found {}",
                bytes.len()
            )));
        }
        let values: Vec<f64> = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))))
            .collect();
        let rows = if dim == 0 {
            vec![Vec::new(); count]
        } else {
            values.chunks(dim).map(<[f64]>::to_vec).collect()
        };
        Self::new(dim, rows, None)
    }

    pub fn to_text(&self) -> Result<String> {
        let keys = self
            .keys
            .as_ref()
            .ok_or_else(|| Error::InvalidData("text feature files need image keys".into()))?;
        let mut out = String::new();
        for (key, row) in keys.iter().zip(&self.rows) {
            if key.image_path.contains([',', '\n', '\r']) {
                return Err(Error::InvalidData(format!(
                    "path {:?} contains a comma or newline",
                    key.image_path
                )));
            }
            out.push_str(&format!(
                "{},{},{}",
                key.image_path, key.identity, key.camera
            ));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse_text(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, reason: String| Error::Parse {
            path: origin.to_string(),
            line,
            reason,
        };
        let mut keys = Vec::new();
        let mut rows = Vec::new();
        let mut dim = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() < 4 {
                return Err(err(
                    i + 1,
                    "expected image_path,identity,camera,values...".into(),
                ));
            }
            let identity = cols[1]
                .parse()
                .map_err(|e| err(i + 1, format!("identity: {e}")))?;
            let camera = cols[2]
                .parse()
                .map_err(|e| err(i + 1, format!("camera: {e}")))?;
            let row = cols[3..]
                .iter()
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| err(i + 1, format!("`{c}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(err(
                        i + 1,
                        format!("expected {d} values, found {}", row.len()),
                    ))
                }
                _ => {}
            }
            if cols[0].is_empty() {
                return Err(err(i + 1, "empty image path".into()));
            }
            keys.push(FeatureKey {
                image_path: cols[0].to_string(),
                identity,
                camera,
            });
            rows.push(row);
        }
        Self::new(dim.unwrap_or(0), rows, Some(keys))
    }

    /// Reads either format, telling them apart by the binary magic.
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let origin = path.display().to_string();
        if bytes.len() >= 4 && bytes[..4] == FEATURE_MAGIC.to_le_bytes() {
            Self::from_binary(&bytes, &origin)
        } else {
            let text = String::from_utf8(bytes).map_err(|_| {
                Error::InvalidData(format!("{origin}: neither binary features nor UTF-8 text"))
            })?;
            Self::parse_text(&text, &origin)
        }
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_binary()).map_err(|e| Error::io(path, e))
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    /// Rows in manifest order: by path for keyed tables, by position otherwise.
    pub fn aligned_to(&self, manifest: &Manifest) -> Result<Vec<Vec<f64>>> {
        match &self.keys {
            None => {
                if self.rows.len() != manifest.len() {
                    return Err(Error::dims(
                        format!("{} rows (one per manifest record)", manifest.len()),
                        self.rows.len(),
                    ));
                }
                Ok(self.rows.clone())
            }
            Some(keys) => {
                let index: HashMap<&str, usize> = keys
                    .iter()
                    .enumerate()
                    .map(|(i, k)| (k.image_path.as_str(), i))
                    .collect();
                manifest
                    .records
                    .iter()
                    .map(|r| {
                        index
                            .get(r.image_path.as_str())
                            .map(|&i| self.rows[i].clone())
                            .ok_or_else(|| {
                                Error::InvalidData(format!("no features for `{}`", r.image_path))
                            })
                    })
                    .collect()
            }
        }
    }
}
