//! Core of the shaderlens toolchain.
//!
//! * [`lang`]: lexer, parser and static checker for MiniFrag, the GLSL ES 1.00
//!   fragment subset every generated shader must conform to.
//! * [`eval`]: deterministic CPU reference interpreter and frame renderer.
//! * [`effects`]: canonical effect sources with closed-form pixel oracles.
//! * [`prompt`]: system, user and repair prompt assembly for the generator.

pub mod effects;
pub mod eval;
pub mod lang;
pub mod prompt;
pub mod testkit;

pub use effects::{Effect, EffectEntry, UnknownEffect};
pub use eval::{render_frame, Image, ImageError, RenderError, UniformSet, Value};
pub use lang::{
    validate, Diagnostic, DiagnosticCode, InterfaceContract, Pos, Severity, ShaderAst, TypeTag,
    ValidatedShader,
};
