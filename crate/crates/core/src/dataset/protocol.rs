use std::fmt;
use std::str::FromStr;

use super::{derive_seed, mix_random_selection, Manifest, SegAvailability, Variant};
use crate::error::{Error, Result};

/// Ablation protocols: which images each split is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// Original images everywhere.
    Baseline,
    /// Raw segmentation everywhere, no post-processing gate.
    Seg,
    /// Post-processed segmentation everywhere, gate rejects fall back to Original.
    SegPost,
    /// Train as `SegPost`, test on untouched originals.
    TrainSTestN,
    /// Each capable record segmented with probability `k`, train and test alike.
    RandomK(f64),
}

impl Protocol {
    /// Row label used in result tables.
    pub fn label(&self) -> String {
        match self {
            Protocol::Baseline => "Baseline".into(),
            Protocol::Seg => "Seg".into(),
            Protocol::SegPost => "Seg+Post".into(),
            Protocol::TrainSTestN => "TrainS+TestN".into(),
            Protocol::RandomK(k) => format_k(*k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Protocol::RandomK(k) if !(0.0..=1.0).contains(k) => {
                Err(Error::param("k", format!("{k} not in [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// Shortest decimal rendering of `k`, e.g. `0.1`, `0.25`, `1`.
fn format_k(k: f64) -> String {
    let s = format!("{:.6}", k);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Baseline => f.write_str("baseline"),
            Protocol::Seg => f.write_str("seg"),
            Protocol::SegPost => f.write_str("seg-post"),
            Protocol::TrainSTestN => f.write_str("trains-testn"),
            Protocol::RandomK(k) => write!(f, "random-{}", format_k(*k)),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let protocol = match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Protocol::Baseline,
            "seg" => Protocol::Seg,
            "seg-post" | "segpost" | "seg+post" => Protocol::SegPost,
            "trains-testn" | "trains_testn" | "trains+testn" => Protocol::TrainSTestN,
            other => match other.strip_prefix("random-") {
                Some(k) => Protocol::RandomK(
                    k.parse()
                        .map_err(|_| Error::param("variant", format!("bad k in `{s}`")))?,
                ),
                None => return Err(Error::param("variant", format!("unknown variant `{s}`"))),
            },
        };
        protocol.validate()?;
        Ok(protocol)
    }
}

fn all_segmented(manifest: &Manifest) -> Manifest {
    let mut out = manifest.clone();
    for r in &mut out.records {
        r.variant = Variant::Segmented;
    }
    out
}

fn segmented_where_kept(manifest: &Manifest) -> Manifest {
    let mut out = manifest.clone();
    for r in &mut out.records {
        r.variant = if r.availability == SegAvailability::Kept {
            Variant::Segmented
        } else {
            Variant::Original
        };
    }
    out
}

fn all_original(manifest: &Manifest) -> Manifest {
    let mut out = manifest.clone();
    for r in &mut out.records {
        r.variant = Variant::Original;
    }
    out
}

/// Builds the train and test manifests for one protocol row.
///
/// For `RandomK` the train and test draws use distinct seeds derived from
/// `seed`, so the two splits never share a Bernoulli stream.
pub fn assemble_protocol(
    protocol: Protocol,
    train: &Manifest,
    test: &Manifest,
    seed: u64,
) -> Result<(Manifest, Manifest)> {
    protocol.validate()?;
    Ok(match protocol {
        Protocol::Baseline => (train.clone(), test.clone()),
        Protocol::Seg => (all_segmented(train), all_segmented(test)),
        Protocol::SegPost => (segmented_where_kept(train), segmented_where_kept(test)),
        Protocol::TrainSTestN => (segmented_where_kept(train), all_original(test)),
        Protocol::RandomK(k) => (
            mix_random_selection(train, k, derive_seed(seed, 0))?,
            mix_random_selection(test, k, derive_seed(seed, 1))?,
        ),
    })
}
