//! Small bit-twiddling helpers shared by the table kernels.

/// Iterates the positions of set bits in ascending order.
pub fn iter_ones(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(i)
    })
}

/// `LOW_HALF[b]` selects positions `0..64` whose bit `b` is clear.
pub const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// `WEIGHT_MASK[w]` selects positions `0..64` whose index has popcount `w`.
pub const WEIGHT_MASK: [u64; 7] = weight_masks();

const fn weight_masks() -> [u64; 7] {
    let mut out = [0u64; 7];
    let mut pos = 0;
    while pos < 64 {
        let w = (pos as u64).count_ones() as usize;
        out[w] |= 1u64 << pos;
        pos += 1;
    }
    out
}
