//! Binary mask morphology and compositing.
//!
//! Masks are row-major grids of `0` (background) and `1` (vehicle). The
//! post-processing chain is [`fill_holes`], then [`keep_largest_component`],
//! then the area gate in [`postprocess`].

mod components;
mod composite;
mod edges;
mod morphology;
mod postprocess;

pub use components::{keep_largest_component, label_components, ComponentLabeling, Connectivity};
pub use composite::{apply_mask, Rgb, BLACK};
pub use edges::{gradient_magnitude, refine_with_edges};
pub use morphology::fill_holes;
pub use postprocess::{
    area_ratio, postprocess, DiscardReason, PostprocessOutcome, DEFAULT_AREA_THRESHOLD,
};

use crate::error::{Error, Result};

/// Per-pixel vehicle/background raster.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![0; width * height],
        })
    }

    pub fn filled(width: usize, height: usize) -> Result<Self> {
        let mut mask = Self::new(width, height)?;
        mask.data.fill(1);
        Ok(mask)
    }

    /// Builds a mask from row-major values; every element must be 0 or 1.
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::dims(width * height, data.len()));
        }
        if let Some(bad) = data.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidData(format!(
                "mask value {bad} is not 0 or 1"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a mask from rows of `.`/`#` characters (`#` = vehicle).
    pub fn from_ascii(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut data = Vec::with_capacity(width * height);
        for row in rows {
            if row.chars().count() != width {
                return Err(Error::InvalidData("ragged ascii mask".into()));
            }
            for c in row.chars() {
                data.push(match c {
                    '#' => 1,
                    '.' => 0,
                    other => {
                        return Err(Error::InvalidData(format!(
                            "unexpected mask char {other:?}"
                        )))
                    }
                });
            }
        }
        Self::from_vec(width, height, data)
    }

    /// Treats any nonzero value as vehicle.
    pub fn from_gray(width: usize, height: usize, gray: &[u8]) -> Result<Self> {
        Self::from_vec(
            width,
            height,
            gray.iter().map(|&v| u8::from(v != 0)).collect(),
        )
    }

    fn check_dims(width: usize, height: usize) -> Result<()> {
        if width == 0 || height == 0 {
            return Err(Error::param(
                "mask size",
                format!("{width}x{height} is empty"),
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] == 1
    }

    pub fn set(&mut self, x: usize, y: usize, vehicle: bool) {
        self.data[y * self.width + x] = u8::from(vehicle);
    }

    pub fn vehicle_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Grayscale rendering used on disk: 0 background, 255 vehicle.
    pub fn to_gray(&self) -> Vec<u8> {
        self.data.iter().map(|&v| v * 255).collect()
    }

    pub fn to_ascii(&self) -> Vec<String> {
        self.data
            .chunks(self.width)
            .map(|row| {
                row.iter()
                    .map(|&v| if v == 1 { '#' } else { '.' })
                    .collect()
            })
            .collect()
    }
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{}", self.width, self.height)?;
        for row in self.to_ascii() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// 8-bit, 3-channel row-major image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(
                "image size",
                format!("{width}x{height} is empty"),
            ));
        }
        if data.len() != width * height * 3 {
            return Err(Error::dims(width * height * 3, data.len()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn uniform(width: usize, height: usize, color: Rgb) -> Result<Self> {
        Self::from_vec(width, height, color.repeat(width * height))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put_pixel(&mut self, x: usize, y: usize, color: Rgb) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&color);
    }
}

pub(crate) fn check_same_size(mask: &BinaryMask, image: &RgbImage) -> Result<()> {
    if mask.width() != image.width() || mask.height() != image.height() {
        return Err(Error::dims(
            format!("{}x{}", mask.width(), mask.height()),
            format!("{}x{}", image.width(), image.height()),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_invariants_enforced() {
        assert!(BinaryMask::new(0, 3).is_err());
        assert!(BinaryMask::from_vec(2, 2, vec![0, 1, 1]).is_err());
        assert!(BinaryMask::from_vec(2, 1, vec![0, 2]).is_err());
        let m = BinaryMask::from_gray(2, 1, &[0, 17]).unwrap();
        assert_eq!(m.data(), &[0, 1]);
        assert_eq!(m.to_gray(), vec![0, 255]);
    }

    #[test]
    fn ascii_round_trip() {
        let rows = ["#..", ".##"];
        let m = BinaryMask::from_ascii(&rows).unwrap();
        assert_eq!(m.to_ascii(), rows);
        assert!(m.get(0, 0) && !m.get(1, 0) && m.get(2, 1));
    }

    #[test]
    fn image_size_checked() {
        assert!(RgbImage::from_vec(2, 2, vec![0; 11]).is_err());
        let img = RgbImage::uniform(2, 2, [1, 2, 3]).unwrap();
        assert_eq!(img.pixel(1, 1), [1, 2, 3]);
    }
}
