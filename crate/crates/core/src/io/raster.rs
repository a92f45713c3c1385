use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RgbImage};

fn open(path: &Path) -> Result<image::DynamicImage> {
    image::open(path).map_err(|source| match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    })
}

/// Reads a single-channel mask; any nonzero value is vehicle.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let gray = open(path)?.into_luma8();
    let (w, h) = gray.dimensions();
    BinaryMask::from_gray(w as usize, h as usize, gray.as_raw())
}

/// Writes a mask as an 8-bit PNG with values 0 and 255.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let buf = image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, mask.to_gray())
        .expect("buffer matches dimensions");
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let rgb = open(path)?.into_rgb8();
    let (w, h) = rgb.dimensions();
    RgbImage::from_vec(w as usize, h as usize, rgb.into_raw())
}

pub fn write_rgb(path: &Path, image: &RgbImage) -> Result<()> {
    let buf = image::RgbImage::from_raw(
        image.width() as u32,
        image.height() as u32,
        image.data().to_vec(),
    )
    .expect("buffer matches dimensions");
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}
