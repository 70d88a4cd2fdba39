use std::fmt;

use crate::lang::TypeTag;

/// Runtime value. All float arithmetic is 32-bit. Matrices are stored
/// column-major, as in GLSL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Float(f32),
    Int(i32),
    Bool(bool),
    Vec2([f32; 2]),
    Vec3([f32; 3]),
    Vec4([f32; 4]),
    Mat3([f32; 9]),
}

impl Value {
    pub fn type_tag(&self) -> TypeTag {
        match self {
            Value::Float(_) => TypeTag::Float,
            Value::Int(_) => TypeTag::Int,
            Value::Bool(_) => TypeTag::Bool,
            Value::Vec2(_) => TypeTag::Vec2,
            Value::Vec3(_) => TypeTag::Vec3,
            Value::Vec4(_) => TypeTag::Vec4,
            Value::Mat3(_) => TypeTag::Mat3,
        }
    }

    /// Zero of a value type; declarations without an initializer start here.
    pub fn zero(ty: TypeTag) -> Value {
        match ty {
            TypeTag::Int => Value::Int(0),
            TypeTag::Bool => Value::Bool(false),
            TypeTag::Vec2 => Value::Vec2([0.0; 2]),
            TypeTag::Vec3 => Value::Vec3([0.0; 3]),
            TypeTag::Vec4 => Value::Vec4([0.0; 4]),
            TypeTag::Mat3 => Value::Mat3([0.0; 9]),
            TypeTag::Float | TypeTag::Sampler2D | TypeTag::Void => Value::Float(0.0),
        }
    }

    /// Float lanes of a float scalar or vector.
    pub fn lanes(&self) -> Option<([f32; 4], usize)> {
        Some(match *self {
            Value::Float(x) => ([x, 0.0, 0.0, 0.0], 1),
            Value::Vec2([a, b]) => ([a, b, 0.0, 0.0], 2),
            Value::Vec3([a, b, c]) => ([a, b, c, 0.0], 3),
            Value::Vec4(v) => (v, 4),
            _ => return None,
        })
    }

    pub fn from_lanes(lanes: [f32; 4], width: usize) -> Value {
        match width {
            1 => Value::Float(lanes[0]),
            2 => Value::Vec2([lanes[0], lanes[1]]),
            3 => Value::Vec3([lanes[0], lanes[1], lanes[2]]),
            _ => Value::Vec4(lanes),
        }
    }

    /// Scalar components in constructor order (matrices column by column),
    /// converted to float.
    pub fn flatten(&self, out: &mut Vec<f32>) {
        match *self {
            Value::Float(x) => out.push(x),
            Value::Int(i) => out.push(i as f32),
            Value::Bool(b) => out.push(if b { 1.0 } else { 0.0 }),
            Value::Vec2(v) => out.extend_from_slice(&v),
            Value::Vec3(v) => out.extend_from_slice(&v),
            Value::Vec4(v) => out.extend_from_slice(&v),
            Value::Mat3(m) => out.extend_from_slice(&m),
        }
    }

    pub fn as_f32(&self) -> Option<f32> {
        match *self {
            Value::Float(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_vec4(&self) -> Option<[f32; 4]> {
        match *self {
            Value::Vec4(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Vec2(v) => write!(f, "vec2({}, {})", v[0], v[1]),
            Value::Vec3(v) => write!(f, "vec3({}, {}, {})", v[0], v[1], v[2]),
            Value::Vec4(v) => write!(f, "vec4({}, {}, {}, {})", v[0], v[1], v[2], v[3]),
            Value::Mat3(m) => write!(f, "mat3({m:?})"),
        }
    }
}
