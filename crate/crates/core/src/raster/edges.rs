use super::{check_same_size, BinaryMask, RgbImage};
use crate::error::Result;

/// Edge pixels are those whose gradient magnitude reaches this fraction of
/// the image maximum.
const STRONG_EDGE_FRACTION: f64 = 0.5;

const DIRECTIONS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn luminance(image: &RgbImage, x: usize, y: usize) -> f64 {
    let [r, g, b] = image.pixel(x, y);
    0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)
}

/// Sobel gradient magnitude of the luminance, with edge-replicated borders.
pub fn gradient_magnitude(image: &RgbImage) -> Vec<f64> {
    let (w, h) = (image.width(), image.height());
    let lum: Vec<f64> = (0..w * h).map(|i| luminance(image, i % w, i / w)).collect();
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        let y = y.clamp(0, h as isize - 1) as usize;
        lum[y * w + x]
    };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x - 1, y)
                - at(x - 1, y + 1);
            let gy = at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2.0 * at(x, y - 1)
                - at(x + 1, y - 1);
            out.push(gx.hypot(gy));
        }
    }
    out
}

/// Snaps the mask boundary outward onto nearby strong image edges.
///
/// From every vehicle pixel, a ray is cast in each of the eight directions
/// through background pixels for at most `radius` steps. If the ray meets a
/// strong edge pixel before hitting vehicle or leaving the image, every
/// pixel it crossed (edge included) becomes vehicle. Rays are cast from the
/// input mask only, so the result does not depend on scan order. Vehicle
/// pixels are never removed, and `radius == 0` returns the input.
pub fn refine_with_edges(mask: &BinaryMask, image: &RgbImage, radius: usize) -> Result<BinaryMask> {
    check_same_size(mask, image)?;
    let mut out = mask.clone();
    if radius == 0 {
        return Ok(out);
    }
    let magnitude = gradient_magnitude(image);
    let max = magnitude.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Ok(out);
    }
    let cutoff = STRONG_EDGE_FRACTION * max;
    let strong: Vec<bool> = magnitude.iter().map(|&m| m >= cutoff).collect();

    let (w, h) = (mask.width() as isize, mask.height() as isize);
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x as usize, y as usize) {
                continue;
            }
            for &(dx, dy) in &DIRECTIONS {
                let mut reached = None;
                for step in 1..=radius as isize {
                    let (px, py) = (x + dx * step, y + dy * step);
                    if px < 0 || py < 0 || px >= w || py >= h {
                        break;
                    }
                    if mask.get(px as usize, py as usize) {
                        break;
                    }
                    if strong[(py * w + px) as usize] {
                        reached = Some(step);
                        break;
                    }
                }
                if let Some(steps) = reached {
                    for step in 1..=steps {
                        out.set((x + dx * step) as usize, (y + dy * step) as usize, true);
                    }
                }
            }
        }
    }
    Ok(out)
}
