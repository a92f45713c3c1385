use crate::error::{Error, Result};

/// Detector crops smaller than this on either side are dropped.
pub const MIN_CROP_SIDE: u32 = 256;

/// A detected vehicle box inside a source frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CropRecord {
    pub source_path: String,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl CropRecord {
    /// Checks the box is non-empty and lies inside a `width`×`height` frame.
    pub fn validate(&self, width: u32, height: u32) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::InvalidData(format!(
                "{}: empty crop",
                self.source_path
            )));
        }
        let inside = u64::from(self.x) + u64::from(self.w) <= u64::from(width)
            && u64::from(self.y) + u64::from(self.h) <= u64::from(height);
        if !inside {
            return Err(Error::InvalidData(format!(
                "{}: crop {}x{}+{}+{} outside {width}x{height}",
                self.source_path, self.w, self.h, self.x, self.y
            )));
        }
        Ok(())
    }
}

/// Keeps crops at least `min_w` wide and `min_h` tall, in input order.
pub fn filter_crops(crops: &[CropRecord], min_w: u32, min_h: u32) -> Vec<CropRecord> {
    crops
        .iter()
        .filter(|c| c.w >= min_w && c.h >= min_h)
        .cloned()
        .collect()
}
