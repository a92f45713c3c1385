//! Image manifests and the variant-selection rules built on them.

mod crops;
mod manifest;
mod protocol;
mod selection;

pub use crops::{filter_crops, CropRecord, MIN_CROP_SIDE};
pub use manifest::{ImageRecord, Manifest, SegAvailability, Split, Variant, MANIFEST_VERSION};
pub use protocol::{assemble_protocol, Protocol};
pub use selection::{mix_random_selection, pair_segmented, MaskVerdict};

/// Derives an independent child seed; used so that adding a consumer of a
/// root seed never shifts the streams of the others.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    // splitmix64 finaliser over a golden-ratio spaced counter
    let mut z = root ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::BTreeSet<_> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
