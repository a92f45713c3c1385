use super::{check_same_size, BinaryMask, RgbImage};
use crate::error::Result;

pub type Rgb = [u8; 3];

pub const BLACK: Rgb = [0, 0, 0];

/// Copies vehicle pixels from `image` and paints background with `fill`.
pub fn apply_mask(image: &RgbImage, mask: &BinaryMask, fill: Rgb) -> Result<RgbImage> {
    check_same_size(mask, image)?;
    let data = image
        .data()
        .chunks_exact(3)
        .zip(mask.data())
        .flat_map(|(px, &m)| if m == 1 { [px[0], px[1], px[2]] } else { fill })
        .collect();
    RgbImage::from_vec(image.width(), image.height(), data)
}
