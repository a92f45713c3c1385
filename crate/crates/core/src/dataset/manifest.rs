use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;
const MANIFEST_MAGIC: &str = "#bir-manifest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    TestQuery,
    TestGallery,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::TestQuery => "test_query",
            Split::TestGallery => "test_gallery",
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "test_query" => Ok(Split::TestQuery),
            "test_gallery" => Ok(Split::TestGallery),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Which image of a record is fed to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    #[default]
    Original,
    Segmented,
}

/// Whether a post-processed segmentation exists for a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SegAvailability {
    /// Never paired with a mask outcome.
    #[default]
    Unpaired,
    /// Passed post-processing; the record is Segmented-capable.
    Kept,
    /// Rejected by post-processing; the record falls back to Original.
    Discarded,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageRecord {
    pub image_path: String,
    pub identity: u64,
    pub camera: u32,
    pub split: Split,
    pub variant: Variant,
    pub availability: SegAvailability,
}

impl ImageRecord {
    pub fn new(image_path: impl Into<String>, identity: u64, camera: u32, split: Split) -> Self {
        Self {
            image_path: image_path.into(),
            identity,
            camera,
            split,
            variant: Variant::Original,
            availability: SegAvailability::Unpaired,
        }
    }

    pub fn segmented_capable(&self) -> bool {
        self.availability == SegAvailability::Kept
    }

    fn variant_token(&self) -> String {
        let variant = match self.variant {
            Variant::Original => "original",
            Variant::Segmented => "segmented",
        };
        match self.availability {
            SegAvailability::Unpaired => variant.to_string(),
            SegAvailability::Kept => format!("{variant}:kept"),
            SegAvailability::Discarded => format!("{variant}:discarded"),
        }
    }

    fn parse_variant_token(token: &str) -> Result<(Variant, SegAvailability), String> {
        let (variant, availability) = match token.split_once(':') {
            Some((v, a)) => (v, Some(a)),
            None => (token, None),
        };
        let variant = match variant {
            "original" => Variant::Original,
            "segmented" => Variant::Segmented,
            other => return Err(format!("unknown variant `{other}`")),
        };
        let availability = match availability {
            None => SegAvailability::Unpaired,
            Some("kept") => SegAvailability::Kept,
            Some("discarded") => SegAvailability::Discarded,
            Some(other) => return Err(format!("unknown segmentation status `{other}`")),
        };
        Ok((variant, availability))
    }
}

/// Ordered list of image records plus the seed that produced it.
///
/// On disk: a header line `#bir-manifest<TAB>version=1<TAB>seed=N<TAB>root=R`
/// followed by one `image_path<TAB>identity<TAB>camera<TAB>split<TAB>variant`
/// line per record. The variant column is `original` or `segmented`,
/// optionally suffixed with `:kept` or `:discarded` once the record has been
/// paired with a post-processing outcome.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub records: Vec<ImageRecord>,
    pub seed: u64,
    /// Directory the record paths are relative to.
    pub root: String,
}

impl Manifest {
    pub fn new(records: Vec<ImageRecord>, seed: u64) -> Self {
        Self {
            records,
            seed,
            root: ".".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct identities in ascending order.
    pub fn identities(&self) -> Vec<u64> {
        let set: std::collections::BTreeSet<u64> =
            self.records.iter().map(|r| r.identity).collect();
        set.into_iter().collect()
    }

    pub fn labels(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.identity).collect()
    }

    pub fn count_variant(&self, variant: Variant) -> usize {
        self.records.iter().filter(|r| r.variant == variant).count()
    }

    pub fn count_availability(&self, availability: SegAvailability) -> usize {
        self.records
            .iter()
            .filter(|r| r.availability == availability)
            .count()
    }

    /// Records of one split, keeping their order.
    pub fn split(&self, split: Split) -> Manifest {
        Manifest {
            records: self
                .records
                .iter()
                .filter(|r| r.split == split)
                .cloned()
                .collect(),
            seed: self.seed,
            root: self.root.clone(),
        }
    }

    pub fn resolve(&self, record: &ImageRecord) -> PathBuf {
        Path::new(&self.root).join(&record.image_path)
    }

    fn validate_record(record: &ImageRecord) -> Result<(), String> {
        if record.image_path.is_empty() {
            return Err("empty image path".into());
        }
        if record.image_path.contains(['\t', '\n', '\r']) {
            return Err(format!(
                "image path {:?} contains a tab or newline",
                record.image_path
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.root.is_empty() || self.root.contains(['\t', '\n', '\r']) {
            return Err(Error::InvalidData(format!(
                "invalid manifest root {:?}",
                self.root
            )));
        }
        for record in &self.records {
            Self::validate_record(record).map_err(Error::InvalidData)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{MANIFEST_MAGIC}\tversion={MANIFEST_VERSION}\tseed={}\troot={}\n",
            self.seed, self.root
        );
        for r in &self.records {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.image_path,
                r.identity,
                r.camera,
                r.split.as_str(),
                r.variant_token()
            ));
        }
        out
    }

    /// Parses manifest text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, reason: String| Error::Parse {
            path: origin.to_string(),
            line,
            reason,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let mut fields = header.split('\t');
        if fields.next() != Some(MANIFEST_MAGIC) {
            return Err(err(1, format!("expected `{MANIFEST_MAGIC}` header")));
        }
        let mut version = None;
        let mut seed = None;
        let mut root = None;
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(1, format!("malformed header field `{field}`")))?;
            match key {
                "version" => {
                    version = Some(value.parse::<u32>().map_err(|e| err(1, e.to_string()))?)
                }
                "seed" => seed = Some(value.parse::<u64>().map_err(|e| err(1, e.to_string()))?),
                "root" => root = Some(value.to_string()),
                other => return Err(err(1, format!("unknown header field `{other}`"))),
            }
        }
        match version {
            Some(MANIFEST_VERSION) => {}
            Some(v) => return Err(err(1, format!("unsupported manifest version {v}"))),
            None => return Err(err(1, "missing version".into())),
        }
        let seed = seed.ok_or_else(|| err(1, "missing seed".into()))?;
        let root = root.unwrap_or_else(|| ".".into());

        let mut records = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(err(
                    lineno,
                    format!("expected 5 columns, found {}", cols.len()),
                ));
            }
            let identity = cols[1]
                .parse::<u64>()
                .map_err(|e| err(lineno, format!("identity: {e}")))?;
            let camera = cols[2]
                .parse::<u32>()
                .map_err(|e| err(lineno, format!("camera: {e}")))?;
            let split = cols[3].parse().map_err(|e| err(lineno, e))?;
            let (variant, availability) =
                ImageRecord::parse_variant_token(cols[4]).map_err(|e| err(lineno, e))?;
            let record = ImageRecord {
                image_path: cols[0].to_string(),
                identity,
                camera,
                split,
                variant,
                availability,
            };
            Self::validate_record(&record).map_err(|e| err(lineno, e))?;
            records.push(record);
        }
        Ok(Manifest {
            records,
            seed,
            root,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.validate()?;
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
