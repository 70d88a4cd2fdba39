//! Resolved, typed form of a checked shader. Names are replaced by frame
//! slots, overloads by concrete operations, and for-loops by trip counts.
//! Only the checker builds it, so the interpreter can assume it is well typed.

use crate::eval::Value;

use super::ast::TypeTag;
use super::contract::BindingRole;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub functions: Vec<Function>,
    pub main: usize,
    /// Upper bound on statements executed per fragment.
    pub statement_bound: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: String,
    pub param_count: usize,
    pub slot_count: usize,
    pub return_type: TypeTag,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Local(usize),
    FragColor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lanes {
    pub index: [u8; 4],
    pub len: u8,
}

impl Lanes {
    pub fn as_slice(&self) -> &[u8] {
        &self.index[..self.len as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Let { slot: usize, value: Expr },
    Assign { target: Target, lanes: Option<Lanes>, op: Option<ArithOp>, value: Expr },
    Eval(Expr),
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt> },
    Loop { slot: usize, start: i32, step: i32, trips: u32, body: Vec<Stmt> },
    Return(Option<Expr>),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Sin,
    Cos,
    Abs,
    Floor,
    Fract,
    Mod,
    Pow,
    Exp,
    Sqrt,
    Min,
    Max,
    Clamp,
    Mix,
    Step,
    Smoothstep,
    Dot,
    Length,
    Distance,
    Normalize,
}

impl Builtin {
    pub const ALL: [Builtin; 19] = [
        Builtin::Sin,
        Builtin::Cos,
        Builtin::Abs,
        Builtin::Floor,
        Builtin::Fract,
        Builtin::Mod,
        Builtin::Pow,
        Builtin::Exp,
        Builtin::Sqrt,
        Builtin::Min,
        Builtin::Max,
        Builtin::Clamp,
        Builtin::Mix,
        Builtin::Step,
        Builtin::Smoothstep,
        Builtin::Dot,
        Builtin::Length,
        Builtin::Distance,
        Builtin::Normalize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Abs => "abs",
            Builtin::Floor => "floor",
            Builtin::Fract => "fract",
            Builtin::Mod => "mod",
            Builtin::Pow => "pow",
            Builtin::Exp => "exp",
            Builtin::Sqrt => "sqrt",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Clamp => "clamp",
            Builtin::Mix => "mix",
            Builtin::Step => "step",
            Builtin::Smoothstep => "smoothstep",
            Builtin::Dot => "dot",
            Builtin::Length => "length",
            Builtin::Distance => "distance",
            Builtin::Normalize => "normalize",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Value),
    Local(usize),
    Input(BindingRole),
    Swizzle { base: Box<Expr>, lanes: Lanes },
    Arith { op: ArithOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Compare { op: CmpOp, lhs: Box<Expr>, rhs: Box<Expr> },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Select { cond: Box<Expr>, then_expr: Box<Expr>, else_expr: Box<Expr> },
    MatVecMul(Box<Expr>, Box<Expr>),
    Call { func: usize, args: Vec<Expr> },
    Builtin { func: Builtin, args: Vec<Expr> },
    Texture(Box<Expr>),
    Construct { ty: TypeTag, args: Vec<Expr> },
}

impl Program {
    pub fn main(&self) -> &Function {
        &self.functions[self.main]
    }
}

/// Worst-case statement count of each function, in definition order.
/// Callees are always defined before callers, so one forward pass suffices.
pub(crate) fn statement_bounds(functions: &[Function]) -> Vec<u64> {
    let mut bounds: Vec<u64> = Vec::with_capacity(functions.len());
    for f in functions {
        let b = block_cost(&f.body, &bounds);
        bounds.push(b);
    }
    bounds
}

fn block_cost(stmts: &[Stmt], fns: &[u64]) -> u64 {
    stmts.iter().fold(0u64, |acc, s| acc.saturating_add(stmt_cost(s, fns)))
}

fn stmt_cost(stmt: &Stmt, fns: &[u64]) -> u64 {
    let inner = match stmt {
        Stmt::Let { value, .. } | Stmt::Eval(value) => expr_cost(value, fns),
        Stmt::Assign { value, .. } => expr_cost(value, fns),
        Stmt::Return(value) => value.as_ref().map_or(0, |e| expr_cost(e, fns)),
        Stmt::If { cond, then_body, else_body } => expr_cost(cond, fns)
            .saturating_add(block_cost(then_body, fns).max(block_cost(else_body, fns))),
        Stmt::Loop { trips, body, .. } => u64::from(*trips).saturating_mul(block_cost(body, fns)),
        Stmt::Block(body) => block_cost(body, fns),
    };
    inner.saturating_add(1)
}

fn expr_cost(expr: &Expr, fns: &[u64]) -> u64 {
    match expr {
        Expr::Const(_) | Expr::Local(_) | Expr::Input(_) => 0,
        Expr::Swizzle { base, .. } | Expr::Not(base) | Expr::Neg(base) | Expr::Texture(base) => {
            expr_cost(base, fns)
        }
        Expr::Arith { lhs, rhs, .. }
        | Expr::Compare { lhs, rhs, .. }
        | Expr::And(lhs, rhs)
        | Expr::Or(lhs, rhs)
        | Expr::MatVecMul(lhs, rhs) => expr_cost(lhs, fns).saturating_add(expr_cost(rhs, fns)),
        Expr::Select { cond, then_expr, else_expr } => expr_cost(cond, fns)
            .saturating_add(expr_cost(then_expr, fns).max(expr_cost(else_expr, fns))),
        Expr::Builtin { args, .. } | Expr::Construct { args, .. } => {
            args.iter().fold(0u64, |acc, a| acc.saturating_add(expr_cost(a, fns)))
        }
        Expr::Call { func, args } => {
            let args = args.iter().fold(0u64, |acc, a| acc.saturating_add(expr_cost(a, fns)));
            args.saturating_add(fns.get(*func).copied().unwrap_or(u64::MAX))
        }
    }
}
