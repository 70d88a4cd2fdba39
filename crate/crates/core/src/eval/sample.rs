use super::Image;

/// Bilinear texture lookup with clamp-to-edge addressing. Texel (i, j) has
/// its center at ((i+0.5)/W, (j+0.5)/H), j counted from the bottom row.
pub fn sample_texture(img: &Image, uv: [f32; 2]) -> [f32; 4] {
    let (w, h) = (img.width(), img.height());
    let (i0, i1, fx) = axis(uv[0], w);
    let (j0, j1, fy) = axis(uv[1], h);
    let t = |i, j| img.texel(i, j).map(|b| f32::from(b) / 255.0);
    let (a, b, c, d) = (t(i0, j0), t(i1, j0), t(i0, j1), t(i1, j1));
    let mut out = [0.0; 4];
    for k in 0..4 {
        let bottom = a[k] + (b[k] - a[k]) * fx;
        let top = c[k] + (d[k] - c[k]) * fx;
        out[k] = bottom + (top - bottom) * fy;
    }
    out
}

/// Neighbouring texel indices and blend weight along one axis.
fn axis(coord: f32, size: u32) -> (u32, u32, f32) {
    let x = coord * size as f32 - 0.5;
    // NaN coordinates fall back to the first texel.
    let x = if x.is_nan() { 0.0 } else { x };
    let max = (size - 1) as f32;
    let base = x.floor();
    let frac = x - base;
    let clamp = |v: f32| v.clamp(0.0, max) as u32;
    (clamp(base), clamp(base + 1.0), if frac.is_finite() { frac } else { 0.0 })
}
