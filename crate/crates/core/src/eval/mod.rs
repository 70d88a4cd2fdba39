//! CPU reference renderer: evaluates a validated shader once per pixel.

mod image;
mod interp;
mod render;
mod sample;
mod value;

pub use image::{Image, ImageError};
pub use interp::{eval_fragment, EvalError, UniformSet};
pub use render::{quantize, render_frame, render_frame_with_threads, render_with, RenderError};
pub use sample::sample_texture;
pub use value::Value;
