use super::BinaryMask;

/// Fills every background region that is not 4-connected to the border.
///
/// Flood fill is seeded from all background border pixels and spreads
/// through background with 4-connectivity; whatever it never reaches is an
/// enclosed hole and becomes vehicle.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let data = mask.data();
    let mut outside = vec![false; data.len()];
    let mut stack = Vec::new();

    let seed = |i: usize, outside: &mut Vec<bool>, stack: &mut Vec<usize>| {
        if data[i] == 0 && !outside[i] {
            outside[i] = true;
            stack.push(i);
        }
    };
    for x in 0..w {
        seed(x, &mut outside, &mut stack);
        seed((h - 1) * w + x, &mut outside, &mut stack);
    }
    for y in 0..h {
        seed(y * w, &mut outside, &mut stack);
        seed(y * w + w - 1, &mut outside, &mut stack);
    }

    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if data[j] == 0 && !outside[j] {
                outside[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < h {
            visit(i + w);
        }
    }

    let filled = outside.iter().map(|&o| u8::from(!o)).collect();
    BinaryMask::from_vec(w, h, filled).expect("same dimensions")
}
