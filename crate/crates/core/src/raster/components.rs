use std::collections::BTreeMap;

use super::BinaryMask;

/// Which neighbours of a pixel count as connected to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// N, S, E and W neighbours.
    Four,
    /// All eight neighbours.
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Connected vehicle regions of a mask.
///
/// Labels run `1..=n` in the order each component's first pixel is met in
/// a raster scan; `0` marks background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub component_sizes: BTreeMap<u32, usize>,
}

impl ComponentLabeling {
    pub fn num_components(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Label of the largest component, ties going to the smallest label.
    pub fn largest(&self) -> Option<u32> {
        self.component_sizes
            .iter()
            .fold(
                None,
                |best: Option<(u32, usize)>, (&label, &size)| match best {
                    Some((_, s)) if s >= size => best,
                    _ => Some((label, size)),
                },
            )
            .map(|(label, _)| label)
    }
}

pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> ComponentLabeling {
    let (w, h) = (mask.width(), mask.height());
    let data = mask.data();
    let mut labels = vec![0u32; data.len()];
    let mut sizes = BTreeMap::new();
    let mut next = 0u32;
    let mut stack = Vec::new();

    for start in 0..data.len() {
        if data[start] == 0 || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if data[j] == 1 && labels[j] == 0 {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
        sizes.insert(next, size);
    }

    ComponentLabeling {
        width: w,
        height: h,
        labels,
        component_sizes: sizes,
    }
}

/// Keeps only the largest 8-connected component; an empty mask stays empty.
pub fn keep_largest_component(mask: &BinaryMask) -> BinaryMask {
    let labeling = label_components(mask, Connectivity::Eight);
    let keep = labeling.largest();
    let data = labeling
        .labels
        .iter()
        .map(|&l| u8::from(l != 0 && Some(l) == keep))
        .collect();
    BinaryMask::from_vec(mask.width(), mask.height(), data).expect("same dimensions")
}
