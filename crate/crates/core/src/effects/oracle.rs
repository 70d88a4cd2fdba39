//! Closed-form reference implementations, in f64 and without any use of the
//! interpreter, so they can serve as ground truth for it.

use crate::eval::Image;

use super::{Effect, UnknownEffect};

const LUMA: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Rows of the protanopia simulation matrix.
const PROTAN: [[f64; 3]; 3] = [[0.56667, 0.43333, 0.0], [0.55833, 0.44167, 0.0], [0.0, 0.24167, 0.75833]];

/// Applies an effect to a texture that is `rgba` everywhere.
pub fn oracle_apply(name: &str, rgba: [f64; 4], uv: [f64; 2], time: f64) -> Result<[f64; 4], UnknownEffect> {
    oracle_apply_sampled(name, &|_| rgba, uv, time)
}

/// Applies an effect at `uv`, reading the texture through `sample`.
pub fn oracle_apply_sampled(
    name: &str,
    sample: &dyn Fn([f64; 2]) -> [f64; 4],
    uv: [f64; 2],
    time: f64,
) -> Result<[f64; 4], UnknownEffect> {
    let effect: Effect = name.parse()?;
    if effect == Effect::Underwater {
        let shifted = [uv[0] + 0.01 * (40.0 * uv[1] + 2.0 * time).sin(), uv[1]];
        let c = sample(shifted);
        return Ok([c[0] * 0.6, c[1] * 0.8, c[2], c[3]]);
    }
    let c = sample(uv);
    let [r, g, b, a] = c;
    let y = LUMA[0] * r + LUMA[1] * g + LUMA[2] * b;
    Ok(match effect {
        Effect::Passthrough => c,
        Effect::Invert => [1.0 - r, 1.0 - g, 1.0 - b, a],
        Effect::Grayscale => [y, y, y, a],
        Effect::Protanopia => {
            let row = |m: [f64; 3]| m[0] * r + m[1] * g + m[2] * b;
            [row(PROTAN[0]), row(PROTAN[1]), row(PROTAN[2]), a]
        }
        Effect::KeepGreen => {
            let (hue, sat) = hsv_hue_saturation(r, g, b);
            if (90.0..=150.0).contains(&hue) && sat >= 0.15 {
                c
            } else {
                [y, y, y, a]
            }
        }
        Effect::HeatVision => [y, 0.0, 1.0 - y, a],
        Effect::Underwater => unreachable!("handled above"),
    })
}

/// Textbook RGB to HSV hue (degrees, [0, 360)) and saturation.
pub fn hsv_hue_saturation(r: f64, g: f64, b: f64) -> (f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    let sat = if max > 0.0 { d / max } else { 0.0 };
    if d == 0.0 {
        return (0.0, sat);
    }
    let h = if max == r {
        ((g - b) / d).rem_euclid(6.0)
    } else if max == g {
        (b - r) / d + 2.0
    } else {
        (r - g) / d + 4.0
    };
    (60.0 * h, sat)
}

/// Bilinear, clamp-to-edge sample written as a weighted sum over the four
/// neighbouring texel centers.
pub fn oracle_sample(img: &Image, uv: [f64; 2]) -> [f64; 4] {
    let (w, h) = (f64::from(img.width()), f64::from(img.height()));
    let px = uv[0] * w - 0.5;
    let py = uv[1] * h - 0.5;
    let (x0, y0) = (px.floor(), py.floor());
    let (tx, ty) = (px - x0, py - y0);
    let mut out = [0.0; 4];
    for (dx, wx) in [(0.0, 1.0 - tx), (1.0, tx)] {
        for (dy, wy) in [(0.0, 1.0 - ty), (1.0, ty)] {
            let i = (x0 + dx).clamp(0.0, w - 1.0) as u32;
            let j = (y0 + dy).clamp(0.0, h - 1.0) as u32;
            // j counts from the bottom; data rows from the top.
            let texel = img.pixel(i, img.height() - 1 - j);
            for k in 0..4 {
                out[k] += wx * wy * f64::from(texel[k]) / 255.0;
            }
        }
    }
    out
}

fn to_byte(c: f64) -> u8 {
    if c.is_nan() {
        0
    } else {
        (c.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
    }
}

/// Whole-frame oracle with the renderer's pixel-center and quantization rules.
pub fn oracle_render(name: &str, img: &Image, time: f64) -> Result<Image, UnknownEffect> {
    let _: Effect = name.parse()?;
    let (w, h) = (img.width(), img.height());
    let mut out = img.clone();
    for row in 0..h {
        let y = h - 1 - row;
        for x in 0..w {
            let uv = [(f64::from(x) + 0.5) / f64::from(w), (f64::from(y) + 0.5) / f64::from(h)];
            let c = oracle_apply_sampled(name, &|p| oracle_sample(img, p), uv, time)?;
            out.set_pixel(x, row, c.map(to_byte));
        }
    }
    Ok(out)
}
