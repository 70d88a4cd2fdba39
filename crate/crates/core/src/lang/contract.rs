use serde::{Deserialize, Serialize};

use super::ast::TypeTag;

/// What an interface binding feeds the shader at render time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingRole {
    MainTexture,
    Time,
    Resolution,
    TexCoord,
    FragColor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub name: String,
    pub ty: TypeTag,
    pub role: BindingRole,
    pub description: String,
}

impl Binding {
    fn new(name: &str, ty: TypeTag, role: BindingRole, description: &str) -> Self {
        Binding { name: name.to_owned(), ty, role, description: description.to_owned() }
    }
}

/// The fixed names and types a shader may use to talk to the host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceContract {
    pub output: Binding,
    pub uniforms: Vec<Binding>,
    pub varyings: Vec<Binding>,
}

impl Default for InterfaceContract {
    fn default() -> Self {
        InterfaceContract {
            output: Binding::new(
                "gl_FragColor",
                TypeTag::Vec4,
                BindingRole::FragColor,
                "output color, write-only",
            ),
            uniforms: vec![
                Binding::new("uMainTex", TypeTag::Sampler2D, BindingRole::MainTexture, "the input camera frame"),
                Binding::new("uTime", TypeTag::Float, BindingRole::Time, "seconds since the effect was applied"),
                Binding::new("uResolution", TypeTag::Vec2, BindingRole::Resolution, "frame size in pixels"),
            ],
            varyings: vec![Binding::new(
                "vUv",
                TypeTag::Vec2,
                BindingRole::TexCoord,
                "texture coordinate in [0,1]^2, origin at the bottom-left",
            )],
        }
    }
}

impl InterfaceContract {
    pub fn uniform(&self, name: &str) -> Option<&Binding> {
        self.uniforms.iter().find(|b| b.name == name)
    }

    pub fn varying(&self, name: &str) -> Option<&Binding> {
        self.varyings.iter().find(|b| b.name == name)
    }

    pub fn describe_uniforms(&self) -> String {
        list(&self.uniforms)
    }

    pub fn describe_varyings(&self) -> String {
        list(&self.varyings)
    }
}

fn list(bindings: &[Binding]) -> String {
    bindings
        .iter()
        .map(|b| format!("{} ({})", b.name, b.ty))
        .collect::<Vec<_>>()
        .join(", ")
}
