use crate::eval::Image;

pub const TEST_CARD_SIZE: u32 = 64;

/// Patch colors of the top half, 8 per row. Greens sit well inside or well
/// outside the keep_green window so no pixel lands on a decision edge.
const PATCHES: [[u8; 4]; 32] = [
    [255, 0, 0, 255],
    [0, 255, 0, 255],
    [0, 0, 255, 255],
    [255, 255, 255, 255],
    [0, 0, 0, 255],
    [255, 255, 0, 255],
    [0, 255, 255, 255],
    [255, 0, 255, 255],
    [128, 128, 128, 255],
    [64, 64, 64, 255],
    [192, 192, 192, 255],
    [255, 128, 0, 255],
    [128, 0, 255, 255],
    [0, 128, 128, 255],
    [255, 128, 192, 255],
    [128, 64, 0, 255],
    // hue 120, 100, 140, ~85 (out), ~155 (out)
    [40, 200, 40, 255],
    [100, 200, 50, 255],
    [50, 200, 100, 255],
    [138, 200, 50, 255],
    [50, 200, 138, 255],
    // saturation 0.1 (out), 0.2 (in), dark green
    [180, 200, 180, 255],
    [160, 200, 160, 255],
    [0, 100, 0, 255],
    [30, 60, 30, 255],
    [128, 128, 0, 255],
    [90, 255, 200, 255],
    [200, 255, 200, 255],
    [10, 20, 10, 255],
    [224, 172, 105, 255],
    [135, 206, 235, 255],
    [0, 255, 0, 128],
];

/// The standard 64x64 card: 8x8-pixel color patches on the top half, a gray
/// ramp, then a red-blue ramp with a green tint gradient on the bottom.
pub fn test_card() -> Image {
    Image::from_fn(TEST_CARD_SIZE, TEST_CARD_SIZE, |x, row| match row {
        0..=31 => PATCHES[(row / 8 * 8 + x / 8) as usize],
        32..=47 => {
            let v = (x * 4 + 2) as u8;
            [v, v, v, 255]
        }
        _ => [(255 - x * 4) as u8, ((63 - row) * 4) as u8, (x * 4) as u8, 255],
    })
    .expect("fixed dimensions")
}
