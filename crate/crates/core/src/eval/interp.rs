//! Tree-walking interpreter over the checked IR.

use thiserror::Error;

use crate::lang::ir::{ArithOp, Builtin, CmpOp, Expr, Function, Lanes, Program, Stmt, Target};
use crate::lang::{BindingRole, TypeTag, ValidatedShader, STATEMENT_BUDGET};

use super::{sample_texture, Image, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("EvalBudgetExceeded: more than {limit} statements executed for one fragment")]
    BudgetExceeded { limit: u64 },
    /// Value shapes disagreed with the checked types. Indicates a checker bug.
    #[error("internal evaluator fault: {0}")]
    Fault(String),
}

/// Host values bound to the contract uniforms.
#[derive(Debug, Clone, Copy)]
pub struct UniformSet<'a> {
    pub time: f32,
    pub resolution: [f32; 2],
    pub main_tex: &'a Image,
}

impl<'a> UniformSet<'a> {
    /// Resolution defaults to the texture dimensions.
    pub fn new(main_tex: &'a Image, time: f32) -> Self {
        UniformSet { time, resolution: [main_tex.width() as f32, main_tex.height() as f32], main_tex }
    }

    pub fn with_resolution(mut self, resolution: [f32; 2]) -> Self {
        self.resolution = resolution;
        self
    }
}

pub fn eval_fragment(shader: &ValidatedShader, uv: [f32; 2], uniforms: &UniformSet<'_>) -> Result<[f32; 4], EvalError> {
    eval_program(shader.program(), uv, uniforms, STATEMENT_BUDGET)
}

pub(crate) fn eval_program(
    program: &Program,
    uv: [f32; 2],
    uniforms: &UniformSet<'_>,
    budget: u64,
) -> Result<[f32; 4], EvalError> {
    let mut m = Machine { program, uniforms, uv, frag_color: [0.0; 4], executed: 0, budget };
    m.call(program.main, Vec::new())?;
    Ok(m.frag_color)
}

fn fault<T>(what: &str) -> Result<T, EvalError> {
    Err(EvalError::Fault(what.to_owned()))
}

enum Flow {
    Next,
    Return(Option<Value>),
}

struct Machine<'p, 'u> {
    program: &'p Program,
    uniforms: &'u UniformSet<'u>,
    uv: [f32; 2],
    frag_color: [f32; 4],
    executed: u64,
    budget: u64,
}

impl Machine<'_, '_> {
    fn call(&mut self, index: usize, args: Vec<Value>) -> Result<Option<Value>, EvalError> {
        let program = self.program;
        let Some(func) = program.functions.get(index) else { return fault("call to unknown function") };
        let mut frame = args;
        frame.resize(func.slot_count.max(func.param_count), Value::Float(0.0));
        match self.block(func, &func.body, &mut frame)? {
            Flow::Return(v) => Ok(v),
            Flow::Next if func.return_type == TypeTag::Void => Ok(None),
            Flow::Next => fault("non-void function fell off its end"),
        }
    }

    fn block(&mut self, func: &Function, stmts: &[Stmt], frame: &mut Vec<Value>) -> Result<Flow, EvalError> {
        for s in stmts {
            if let Flow::Return(v) = self.stmt(func, s, frame)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Next)
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.executed += 1;
        if self.executed > self.budget {
            return Err(EvalError::BudgetExceeded { limit: self.budget });
        }
        Ok(())
    }

    fn stmt(&mut self, func: &Function, stmt: &Stmt, frame: &mut Vec<Value>) -> Result<Flow, EvalError> {
        self.tick()?;
        match stmt {
            Stmt::Let { slot, value } => {
                let v = self.expr(value, frame)?;
                set_slot(frame, *slot, v)?;
            }
            Stmt::Assign { target, lanes, op, value } => {
                let rhs = self.expr(value, frame)?;
                let current = match target {
                    Target::Local(slot) => *frame.get(*slot).ok_or_else(|| EvalError::Fault("bad slot".into()))?,
                    Target::FragColor => Value::Vec4(self.frag_color),
                };
                let new = store(current, *lanes, *op, rhs)?;
                match target {
                    Target::Local(slot) => set_slot(frame, *slot, new)?,
                    Target::FragColor => match new {
                        Value::Vec4(c) => self.frag_color = c,
                        _ => return fault("gl_FragColor assigned a non-vec4"),
                    },
                }
            }
            Stmt::Eval(e) => {
                self.expr(e, frame)?;
            }
            Stmt::If { cond, then_body, else_body } => {
                let taken = match self.expr(cond, frame)? {
                    Value::Bool(b) => b,
                    _ => return fault("non-bool condition"),
                };
                return self.block(func, if taken { then_body } else { else_body }, frame);
            }
            Stmt::Loop { slot, start, step, trips, body } => {
                let mut i = *start;
                for _ in 0..*trips {
                    set_slot(frame, *slot, Value::Int(i))?;
                    if let Flow::Return(v) = self.block(func, body, frame)? {
                        return Ok(Flow::Return(v));
                    }
                    i = i.wrapping_add(*step);
                }
            }
            Stmt::Return(value) => {
                let v = match value {
                    Some(e) => Some(self.expr(e, frame)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            Stmt::Block(body) => return self.block(func, body, frame),
        }
        Ok(Flow::Next)
    }

    fn expr(&mut self, expr: &Expr, frame: &mut Vec<Value>) -> Result<Value, EvalError> {
        Ok(match expr {
            Expr::Const(v) => *v,
            Expr::Local(slot) => *frame.get(*slot).ok_or_else(|| EvalError::Fault("bad slot".into()))?,
            Expr::Input(role) => match role {
                BindingRole::Time => Value::Float(self.uniforms.time),
                BindingRole::Resolution => Value::Vec2(self.uniforms.resolution),
                BindingRole::TexCoord => Value::Vec2(self.uv),
                BindingRole::MainTexture | BindingRole::FragColor => return fault("non-value input read"),
            },
            Expr::Swizzle { base, lanes } => swizzle(self.expr(base, frame)?, *lanes)?,
            Expr::Arith { op, lhs, rhs } => {
                let (l, r) = (self.expr(lhs, frame)?, self.expr(rhs, frame)?);
                arith(*op, l, r)?
            }
            Expr::Compare { op, lhs, rhs } => {
                let (l, r) = (self.expr(lhs, frame)?, self.expr(rhs, frame)?);
                Value::Bool(compare(*op, l, r)?)
            }
            Expr::And(l, r) => Value::Bool(self.bool(l, frame)? && self.bool(r, frame)?),
            Expr::Or(l, r) => Value::Bool(self.bool(l, frame)? || self.bool(r, frame)?),
            Expr::Not(e) => Value::Bool(!self.bool(e, frame)?),
            Expr::Neg(e) => match self.expr(e, frame)? {
                Value::Int(i) => Value::Int(i.wrapping_neg()),
                v => map_lanes(v, |x| -x)?,
            },
            Expr::Select { cond, then_expr, else_expr } => {
                if self.bool(cond, frame)? {
                    self.expr(then_expr, frame)?
                } else {
                    self.expr(else_expr, frame)?
                }
            }
            Expr::MatVecMul(m, v) => match (self.expr(m, frame)?, self.expr(v, frame)?) {
                (Value::Mat3(m), Value::Vec3(v)) => {
                    let mut out = [0.0f32; 3];
                    for (r, o) in out.iter_mut().enumerate() {
                        *o = m[r] * v[0] + m[3 + r] * v[1] + m[6 + r] * v[2];
                    }
                    Value::Vec3(out)
                }
                _ => return fault("mat3 * vec3 operands"),
            },
            Expr::Call { func, args } => {
                let args = args.iter().map(|a| self.expr(a, frame)).collect::<Result<Vec<_>, _>>()?;
                match self.call(*func, args)? {
                    Some(v) => v,
                    None => Value::Float(0.0),
                }
            }
            Expr::Builtin { func, args } => {
                let args = args.iter().map(|a| self.expr(a, frame)).collect::<Result<Vec<_>, _>>()?;
                builtin(*func, &args)?
            }
            Expr::Texture(uv) => match self.expr(uv, frame)? {
                Value::Vec2(uv) => Value::Vec4(sample_texture(self.uniforms.main_tex, uv)),
                _ => return fault("texture2D coordinate"),
            },
            Expr::Construct { ty, args } => {
                let args = args.iter().map(|a| self.expr(a, frame)).collect::<Result<Vec<_>, _>>()?;
                construct(*ty, &args)?
            }
        })
    }

    fn bool(&mut self, e: &Expr, frame: &mut Vec<Value>) -> Result<bool, EvalError> {
        match self.expr(e, frame)? {
            Value::Bool(b) => Ok(b),
            _ => fault("expected bool"),
        }
    }
}

fn set_slot(frame: &mut [Value], slot: usize, v: Value) -> Result<(), EvalError> {
    match frame.get_mut(slot) {
        Some(s) => {
            *s = v;
            Ok(())
        }
        None => fault("bad slot"),
    }
}

/// Applies an (optionally compound, optionally swizzled) assignment.
fn store(current: Value, lanes: Option<Lanes>, op: Option<ArithOp>, rhs: Value) -> Result<Value, EvalError> {
    let Some(lanes) = lanes else {
        return match op {
            Some(op) => arith(op, current, rhs),
            None => Ok(rhs),
        };
    };
    let selected = swizzle(current, lanes)?;
    let new = match op {
        Some(op) => arith(op, selected, rhs)?,
        None => rhs,
    };
    let (Some((mut dst, width)), Some((src, _))) = (current.lanes(), new.lanes()) else {
        return fault("swizzle assignment on a non-vector");
    };
    for (k, &i) in lanes.as_slice().iter().enumerate() {
        dst[i as usize] = src[k];
    }
    Ok(Value::from_lanes(dst, width))
}

fn swizzle(v: Value, lanes: Lanes) -> Result<Value, EvalError> {
    let Some((src, width)) = v.lanes() else { return fault("swizzle of a non-vector") };
    let mut out = [0.0; 4];
    for (k, &i) in lanes.as_slice().iter().enumerate() {
        if i as usize >= width {
            return fault("swizzle lane out of range");
        }
        out[k] = src[i as usize];
    }
    Ok(Value::from_lanes(out, lanes.len as usize))
}

fn map_lanes(v: Value, f: impl Fn(f32) -> f32) -> Result<Value, EvalError> {
    let Some((mut l, w)) = v.lanes() else { return fault("component-wise op on a non-float value") };
    for x in &mut l[..w] {
        *x = f(*x);
    }
    Ok(Value::from_lanes(l, w))
}

/// Component-wise combination where a float operand is broadcast.
fn zip_lanes(a: Value, b: Value, f: impl Fn(f32, f32) -> f32) -> Result<Value, EvalError> {
    let (Some((la, wa)), Some((lb, wb))) = (a.lanes(), b.lanes()) else {
        return fault("component-wise op on a non-float value");
    };
    let w = wa.max(wb);
    if wa != wb && wa != 1 && wb != 1 {
        return fault("component-wise width mismatch");
    }
    let pick = |l: &[f32; 4], wl: usize, k: usize| if wl == 1 { l[0] } else { l[k] };
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate().take(w) {
        *o = f(pick(&la, wa, k), pick(&lb, wb, k));
    }
    Ok(Value::from_lanes(out, w))
}

fn zip3_lanes(a: Value, b: Value, c: Value, f: impl Fn(f32, f32, f32) -> f32) -> Result<Value, EvalError> {
    let (Some((la, wa)), Some((lb, wb)), Some((lc, wc))) = (a.lanes(), b.lanes(), c.lanes()) else {
        return fault("component-wise op on a non-float value");
    };
    let w = wa.max(wb).max(wc);
    if [wa, wb, wc].iter().any(|&x| x != w && x != 1) {
        return fault("component-wise width mismatch");
    }
    let pick = |l: &[f32; 4], wl: usize, k: usize| if wl == 1 { l[0] } else { l[k] };
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate().take(w) {
        *o = f(pick(&la, wa, k), pick(&lb, wb, k), pick(&lc, wc, k));
    }
    Ok(Value::from_lanes(out, w))
}

fn arith(op: ArithOp, l: Value, r: Value) -> Result<Value, EvalError> {
    if let (Value::Int(a), Value::Int(b)) = (l, r) {
        // Integer arithmetic wraps; division by zero yields 0.
        return Ok(Value::Int(match op {
            ArithOp::Add => a.wrapping_add(b),
            ArithOp::Sub => a.wrapping_sub(b),
            ArithOp::Mul => a.wrapping_mul(b),
            ArithOp::Div => a.checked_div(b).unwrap_or(0),
        }));
    }
    zip_lanes(l, r, |a, b| match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a / b,
    })
}

fn compare(op: CmpOp, l: Value, r: Value) -> Result<bool, EvalError> {
    let ord = |a: f64, b: f64| match op {
        CmpOp::Lt => a < b,
        CmpOp::Gt => a > b,
        CmpOp::Le => a <= b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    };
    match (op, l, r) {
        (_, Value::Float(a), Value::Float(b)) => Ok(ord(f64::from(a), f64::from(b))),
        (_, Value::Int(a), Value::Int(b)) => Ok(ord(f64::from(a), f64::from(b))),
        (CmpOp::Eq, a, b) => Ok(a == b),
        (CmpOp::Ne, a, b) => Ok(a != b),
        _ => fault("ordering comparison on non-scalars"),
    }
}

fn glsl_min(a: f32, b: f32) -> f32 {
    if b < a {
        b
    } else {
        a
    }
}

fn glsl_max(a: f32, b: f32) -> f32 {
    if a < b {
        b
    } else {
        a
    }
}

fn dot(a: Value, b: Value) -> Result<f32, EvalError> {
    let (Some((la, wa)), Some((lb, wb))) = (a.lanes(), b.lanes()) else { return fault("dot operands") };
    if wa != wb {
        return fault("dot width mismatch");
    }
    Ok((0..wa).map(|k| la[k] * lb[k]).sum())
}

fn builtin(func: Builtin, args: &[Value]) -> Result<Value, EvalError> {
    use Builtin::*;
    match (func, args) {
        (Sin, [x]) => map_lanes(*x, f32::sin),
        (Cos, [x]) => map_lanes(*x, f32::cos),
        (Abs, [x]) => map_lanes(*x, f32::abs),
        (Floor, [x]) => map_lanes(*x, f32::floor),
        (Fract, [x]) => map_lanes(*x, |v| v - v.floor()),
        (Exp, [x]) => map_lanes(*x, f32::exp),
        (Sqrt, [x]) => map_lanes(*x, f32::sqrt),
        (Normalize, [x]) => {
            let len = dot(*x, *x)?.sqrt();
            map_lanes(*x, |v| v / len)
        }
        (Length, [x]) => Ok(Value::Float(dot(*x, *x)?.sqrt())),
        (Dot, [a, b]) => Ok(Value::Float(dot(*a, *b)?)),
        (Distance, [a, b]) => {
            let d = zip_lanes(*a, *b, |x, y| x - y)?;
            Ok(Value::Float(dot(d, d)?.sqrt()))
        }
        (Pow, [a, b]) => zip_lanes(*a, *b, f32::powf),
        (Mod, [a, b]) => zip_lanes(*a, *b, |x, y| x - y * (x / y).floor()),
        (Min, [a, b]) => zip_lanes(*a, *b, glsl_min),
        (Max, [a, b]) => zip_lanes(*a, *b, glsl_max),
        (Step, [e, x]) => zip_lanes(*e, *x, |e, x| if x < e { 0.0 } else { 1.0 }),
        (Clamp, [x, lo, hi]) => zip3_lanes(*x, *lo, *hi, |x, lo, hi| glsl_min(glsl_max(x, lo), hi)),
        (Mix, [x, y, a]) => zip3_lanes(*x, *y, *a, |x, y, a| x * (1.0 - a) + y * a),
        (Smoothstep, [e0, e1, x]) => zip3_lanes(*e0, *e1, *x, |e0, e1, x| {
            let t = glsl_min(glsl_max((x - e0) / (e1 - e0), 0.0), 1.0);
            t * t * (3.0 - 2.0 * t)
        }),
        _ => fault("builtin arity"),
    }
}

fn construct(ty: TypeTag, args: &[Value]) -> Result<Value, EvalError> {
    if ty.is_scalar() {
        let Some(first) = args.first() else { return fault("empty constructor") };
        return Ok(match (ty, *first) {
            (TypeTag::Int, Value::Int(i)) => Value::Int(i),
            (TypeTag::Int, Value::Bool(b)) => Value::Int(i32::from(b)),
            // Truncation toward zero; out-of-range values saturate, NaN gives 0.
            (TypeTag::Int, v) => Value::Int(first_component(v)? as i32),
            (TypeTag::Bool, Value::Int(i)) => Value::Bool(i != 0),
            (TypeTag::Bool, Value::Bool(b)) => Value::Bool(b),
            (TypeTag::Bool, v) => Value::Bool(first_component(v)? != 0.0),
            (_, Value::Int(i)) => Value::Float(i as f32),
            (_, v) => Value::Float(first_component(v)?),
        });
    }
    let n = ty.component_count();
    if let [single] = args {
        if single.type_tag().is_scalar() {
            let mut c = Vec::with_capacity(1);
            single.flatten(&mut c);
            let x = c[0];
            return Ok(match ty {
                TypeTag::Mat3 => Value::Mat3([x, 0.0, 0.0, 0.0, x, 0.0, 0.0, 0.0, x]),
                _ => Value::from_lanes([x; 4], n),
            });
        }
        if single.type_tag() == ty {
            return Ok(*single);
        }
    }
    let mut comps = Vec::with_capacity(16);
    for a in args {
        a.flatten(&mut comps);
    }
    if comps.len() < n {
        return fault("constructor short of components");
    }
    Ok(match ty {
        TypeTag::Mat3 => {
            let mut m = [0.0; 9];
            m.copy_from_slice(&comps[..9]);
            Value::Mat3(m)
        }
        _ => {
            let mut l = [0.0; 4];
            l[..n].copy_from_slice(&comps[..n]);
            Value::from_lanes(l, n)
        }
    })
}

fn first_component(v: Value) -> Result<f32, EvalError> {
    let mut c = Vec::with_capacity(16);
    v.flatten(&mut c);
    match c.first() {
        Some(x) => Ok(*x),
        None => fault("empty value"),
    }
}
