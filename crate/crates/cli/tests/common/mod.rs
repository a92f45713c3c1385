#![allow(dead_code)]

use std::path::{Path, PathBuf};

use bir_core::io::{write_mask, write_rgb};
use bir_core::raster::{BinaryMask, RgbImage};

pub const SIDE: usize = 20;

/// One crafted mask with its vehicle pixel count after post-processing,
/// worked out from the construction rather than by running the pipeline.
pub struct Case {
    pub stem: String,
    pub mask: BinaryMask,
    pub expected_pixels: usize,
}

impl Case {
    pub fn expected_ratio(&self) -> f64 {
        self.expected_pixels as f64 / (SIDE * SIDE) as f64
    }

    /// Integer form of `pixels / total >= 0.60`.
    pub fn expected_kept(&self) -> bool {
        self.expected_pixels > 0 && self.expected_pixels * 5 >= SIDE * SIDE * 3
    }
}

fn block(mask: &mut BinaryMask, x0: usize, y0: usize, w: usize, h: usize) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            mask.set(x, y, true);
        }
    }
}

/// Full-width bands, hollow rectangles (holes get filled) and blocks with a
/// detached 2×2 speck (the speck gets dropped).
pub fn crafted_corpus() -> Vec<Case> {
    let mut cases = Vec::new();
    for rows in 0..=SIDE {
        let mut mask = BinaryMask::new(SIDE, SIDE).unwrap();
        block(&mut mask, 0, 0, SIDE, rows);
        cases.push(Case {
            stem: format!("band_{rows:02}"),
            mask,
            expected_pixels: rows * SIDE,
        });
    }
    let rings = [
        (18, 14),
        (18, 13),
        (16, 15),
        (17, 14),
        (18, 18),
        (10, 10),
        (15, 16),
        (18, 17),
        (12, 12),
        (14, 17),
        (13, 18),
        (16, 16),
        (8, 18),
        (17, 15),
        (3, 3),
    ];
    for (i, &(w, h)) in rings.iter().enumerate() {
        let mut mask = BinaryMask::new(SIDE, SIDE).unwrap();
        block(&mut mask, 1, 1, w, h);
        for y in 2..h {
            for x in 2..w {
                mask.set(x, y, false);
            }
        }
        cases.push(Case {
            stem: format!("ring_{i:02}"),
            mask,
            expected_pixels: w * h,
        });
    }
    let specks = [
        (16, 15),
        (16, 16),
        (15, 16),
        (16, 14),
        (14, 17),
        (16, 20),
        (12, 20),
        (15, 15),
        (16, 17),
        (10, 10),
        (5, 5),
        (16, 18),
        (13, 19),
        (11, 20),
    ];
    for (i, &(w, h)) in specks.iter().enumerate() {
        let mut mask = BinaryMask::new(SIDE, SIDE).unwrap();
        block(&mut mask, 0, 0, w, h);
        block(&mut mask, 18, 18, 2, 2);
        cases.push(Case {
            stem: format!("speck_{i:02}"),
            mask,
            expected_pixels: w * h,
        });
    }
    cases
}

fn image_for(index: usize) -> RgbImage {
    let mut img = RgbImage::uniform(SIDE, SIDE, [40, 90, 160]).unwrap();
    for y in 0..SIDE {
        for x in 0..SIDE {
            let v = ((x * 13 + y * 7 + index * 31) % 256) as u8;
            img.put_pixel(x, y, [v, v / 2, 255 - v]);
        }
    }
    img
}

/// Writes `masks/` and `images/` under `root`, paired by stem.
pub fn write_corpus(root: &Path, cases: &[&Case]) -> (PathBuf, PathBuf) {
    let masks = root.join("masks");
    let images = root.join("images");
    std::fs::create_dir_all(&masks).unwrap();
    std::fs::create_dir_all(&images).unwrap();
    for (i, case) in cases.iter().enumerate() {
        write_mask(&masks.join(format!("{}.png", case.stem)), &case.mask).unwrap();
        write_rgb(&images.join(format!("{}.png", case.stem)), &image_for(i)).unwrap();
    }
    (masks, images)
}

pub fn run(args: &[&str]) -> bir_cli::Output {
    let mut full = vec!["bir"];
    full.extend_from_slice(args);
    match bir_cli::run_from(full) {
        Ok(out) => out,
        Err(e) => panic!("bir {args:?} failed: {e}"),
    }
}

pub fn run_err(args: &[&str]) -> bir_cli::CliError {
    let mut full = vec!["bir"];
    full.extend_from_slice(args);
    match bir_cli::run_from(full) {
        Ok(out) => panic!("bir {args:?} unexpectedly succeeded: {}", out.stdout),
        Err(e) => e,
    }
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// Synthetic corpus written by `bir synth`, returned as its directory.
pub fn synth(root: &Path, extra: &[&str]) -> PathBuf {
    let dir = root.join("corpus");
    let mut args = vec!["synth", "--out", p(&dir)];
    args.extend_from_slice(extra);
    run(&args);
    dir
}
