use rayon::prelude::*;
use thiserror::Error;

use crate::lang::ValidatedShader;

use super::{eval_fragment, EvalError, Image, UniformSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pixel ({x}, {y}): {source}")]
pub struct RenderError {
    /// Column, and row counted from the bottom as the shader sees it.
    pub x: u32,
    pub y: u32,
    pub source: EvalError,
}

/// Renders one frame on the global rayon pool.
pub fn render_frame(shader: &ValidatedShader, input: &Image, time: f32) -> Result<Image, RenderError> {
    render_with(shader, &UniformSet::new(input, time))
}

/// Renders on a dedicated pool of `threads` workers. Output is identical for
/// every thread count.
pub fn render_frame_with_threads(
    shader: &ValidatedShader,
    input: &Image,
    time: f32,
    threads: usize,
) -> Result<Image, RenderError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool construction");
    pool.install(|| render_with(shader, &UniformSet::new(input, time)))
}

pub fn render_with(shader: &ValidatedShader, uniforms: &UniformSet<'_>) -> Result<Image, RenderError> {
    let (w, h) = (uniforms.main_tex.width(), uniforms.main_tex.height());
    let mut data = vec![0u8; w as usize * h as usize * 4];
    let row_bytes = w as usize * 4;
    // Each row records its first failure; the lowest data row wins, so the
    // reported pixel does not depend on scheduling.
    let failures: Vec<Option<RenderError>> = data
        .par_chunks_mut(row_bytes)
        .enumerate()
        .map(|(row, out)| {
            let y = h - 1 - row as u32;
            for x in 0..w {
                let uv = [(x as f32 + 0.5) / w as f32, (y as f32 + 0.5) / h as f32];
                match eval_fragment(shader, uv, uniforms) {
                    Ok(c) => {
                        let i = x as usize * 4;
                        out[i..i + 4].copy_from_slice(&c.map(quantize));
                    }
                    Err(source) => return Some(RenderError { x, y, source }),
                }
            }
            None
        })
        .collect();
    if let Some(err) = failures.into_iter().flatten().next() {
        return Err(err);
    }
    Ok(Image::new(w, h, data).expect("dimensions copied from a valid image"))
}

/// round(clamp(c, 0, 1) * 255) with halves rounding up; NaN maps to 0.
pub fn quantize(c: f32) -> u8 {
    if c.is_nan() {
        return 0;
    }
    (c.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}
