//! MiniFrag syntax tree. Every node carries the position of the lexeme that
//! best identifies it (operator for binary expressions, name for calls and
//! declarations).

use std::fmt;

use serde::{Deserialize, Serialize};

use super::diag::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TypeTag {
    Float,
    Int,
    Bool,
    Vec2,
    Vec3,
    Vec4,
    Mat3,
    Sampler2D,
    Void,
}

impl TypeTag {
    pub fn from_keyword(word: &str) -> Option<TypeTag> {
        Some(match word {
            "float" => TypeTag::Float,
            "int" => TypeTag::Int,
            "bool" => TypeTag::Bool,
            "vec2" => TypeTag::Vec2,
            "vec3" => TypeTag::Vec3,
            "vec4" => TypeTag::Vec4,
            "mat3" => TypeTag::Mat3,
            "sampler2D" => TypeTag::Sampler2D,
            "void" => TypeTag::Void,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            TypeTag::Float => "float",
            TypeTag::Int => "int",
            TypeTag::Bool => "bool",
            TypeTag::Vec2 => "vec2",
            TypeTag::Vec3 => "vec3",
            TypeTag::Vec4 => "vec4",
            TypeTag::Mat3 => "mat3",
            TypeTag::Sampler2D => "sampler2D",
            TypeTag::Void => "void",
        }
    }

    /// Component count of a float vector type, 1 for `float`.
    pub fn float_width(self) -> Option<usize> {
        match self {
            TypeTag::Float => Some(1),
            TypeTag::Vec2 => Some(2),
            TypeTag::Vec3 => Some(3),
            TypeTag::Vec4 => Some(4),
            _ => None,
        }
    }

    pub fn vector(width: usize) -> Option<TypeTag> {
        match width {
            1 => Some(TypeTag::Float),
            2 => Some(TypeTag::Vec2),
            3 => Some(TypeTag::Vec3),
            4 => Some(TypeTag::Vec4),
            _ => None,
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, TypeTag::Vec2 | TypeTag::Vec3 | TypeTag::Vec4)
    }

    pub fn is_scalar(self) -> bool {
        matches!(self, TypeTag::Float | TypeTag::Int | TypeTag::Bool)
    }

    /// float, vec2, vec3 or vec4: the operand types of the component-wise builtins.
    pub fn is_gen_type(self) -> bool {
        self.float_width().is_some()
    }

    /// Number of scalar components, as counted by constructors.
    pub fn component_count(self) -> usize {
        match self {
            TypeTag::Float | TypeTag::Int | TypeTag::Bool => 1,
            TypeTag::Vec2 => 2,
            TypeTag::Vec3 => 3,
            TypeTag::Vec4 => 4,
            TypeTag::Mat3 => 9,
            TypeTag::Sampler2D | TypeTag::Void => 0,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Lowp,
    Mediump,
    Highp,
}

impl Precision {
    pub fn from_keyword(word: &str) -> Option<Precision> {
        match word {
            "lowp" => Some(Precision::Lowp),
            "mediump" => Some(Precision::Mediump),
            "highp" => Some(Precision::Highp),
            _ => None,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Precision::Lowp => "lowp",
            Precision::Mediump => "mediump",
            Precision::Highp => "highp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ShaderAst {
    pub precision: Vec<PrecisionDecl>,
    pub globals: Vec<GlobalDecl>,
    pub functions: Vec<FunctionDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionDecl {
    pub precision: Precision,
    pub ty: TypeTag,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageQualifier {
    Uniform,
    Varying,
}

impl StorageQualifier {
    pub fn keyword(self) -> &'static str {
        match self {
            StorageQualifier::Uniform => "uniform",
            StorageQualifier::Varying => "varying",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalDecl {
    pub storage: StorageQualifier,
    pub ty: TypeTag,
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDef {
    pub return_type: TypeTag,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub ty: TypeTag,
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StmtKind {
    VarDecl(VarDecl),
    Assign { target: LValue, op: AssignOp, value: Expr },
    Expr(Expr),
    If { cond: Expr, then_branch: Box<Stmt>, else_branch: Option<Box<Stmt>> },
    For(Box<ForLoop>),
    Return(Option<Expr>),
    Block(Block),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarDecl {
    pub is_const: bool,
    pub ty: TypeTag,
    pub declarators: Vec<Declarator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Declarator {
    pub name: String,
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub name: String,
    pub swizzle: Option<SwizzleSel>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwizzleSel {
    pub components: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
        }
    }

    /// The arithmetic operator a compound assignment applies.
    pub fn binary(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Set => None,
            AssignOp::Add => Some(BinaryOp::Add),
            AssignOp::Sub => Some(BinaryOp::Sub),
            AssignOp::Mul => Some(BinaryOp::Mul),
            AssignOp::Div => Some(BinaryOp::Div),
        }
    }
}

/// `for (int i = <init>; <cond>; <update>) body`. The checker enforces the
/// literal-bound shape; the parser only enforces the outline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForLoop {
    pub init: Stmt,
    pub cond: Expr,
    pub update: ForUpdate,
    pub body: Stmt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForUpdate {
    pub var: String,
    pub step: LoopStep,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LoopStep {
    Increment,
    Decrement,
    AddAssign(Expr),
    SubAssign(Expr),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Literal {
    Float(f32),
    Int(i32),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExprKind {
    Literal(Literal),
    Var(String),
    Swizzle { base: Box<Expr>, components: String },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
    Ternary { cond: Box<Expr>, then_expr: Box<Expr>, else_expr: Box<Expr> },
    Call { name: String, args: Vec<Expr> },
    Constructor { ty: TypeTag, args: Vec<Expr> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn from_symbol(sym: &str) -> Option<BinaryOp> {
        Some(match sym {
            "||" => BinaryOp::Or,
            "&&" => BinaryOp::And,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            ">" => BinaryOp::Gt,
            "<=" => BinaryOp::Le,
            ">=" => BinaryOp::Ge,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    /// C binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 2,
            BinaryOp::And => 3,
            BinaryOp::Eq | BinaryOp::Ne => 4,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 5,
            BinaryOp::Add | BinaryOp::Sub => 6,
            BinaryOp::Mul | BinaryOp::Div => 7,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }
}

impl ShaderAst {
    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Copy with every position reset, for structural comparison.
    pub fn without_positions(&self) -> ShaderAst {
        let mut ast = self.clone();
        ast.clear_positions();
        ast
    }

    fn clear_positions(&mut self) {
        for p in &mut self.precision {
            p.pos = Pos::default();
        }
        for g in &mut self.globals {
            g.pos = Pos::default();
        }
        for f in &mut self.functions {
            f.pos = Pos::default();
            for p in &mut f.params {
                p.pos = Pos::default();
            }
            clear_block(&mut f.body);
        }
    }
}

fn clear_block(block: &mut Block) {
    block.pos = Pos::default();
    block.stmts.iter_mut().for_each(clear_stmt);
}

fn clear_stmt(stmt: &mut Stmt) {
    stmt.pos = Pos::default();
    match &mut stmt.kind {
        StmtKind::VarDecl(decl) => {
            for d in &mut decl.declarators {
                d.pos = Pos::default();
                if let Some(e) = &mut d.init {
                    clear_expr(e);
                }
            }
        }
        StmtKind::Assign { target, value, .. } => {
            target.pos = Pos::default();
            if let Some(sel) = &mut target.swizzle {
                sel.pos = Pos::default();
            }
            clear_expr(value);
        }
        StmtKind::Expr(e) => clear_expr(e),
        StmtKind::If { cond, then_branch, else_branch } => {
            clear_expr(cond);
            clear_stmt(then_branch);
            if let Some(e) = else_branch {
                clear_stmt(e);
            }
        }
        StmtKind::For(l) => {
            clear_stmt(&mut l.init);
            clear_expr(&mut l.cond);
            l.update.pos = Pos::default();
            if let LoopStep::AddAssign(e) | LoopStep::SubAssign(e) = &mut l.update.step {
                clear_expr(e);
            }
            clear_stmt(&mut l.body);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                clear_expr(e);
            }
        }
        StmtKind::Block(b) => clear_block(b),
    }
}

fn clear_expr(expr: &mut Expr) {
    expr.pos = Pos::default();
    match &mut expr.kind {
        ExprKind::Literal(_) | ExprKind::Var(_) => {}
        ExprKind::Swizzle { base, .. } => clear_expr(base),
        ExprKind::Binary { lhs, rhs, .. } => {
            clear_expr(lhs);
            clear_expr(rhs);
        }
        ExprKind::Unary { operand, .. } => clear_expr(operand),
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            clear_expr(cond);
            clear_expr(then_expr);
            clear_expr(else_expr);
        }
        ExprKind::Call { args, .. } | ExprKind::Constructor { args, .. } => {
            args.iter_mut().for_each(clear_expr)
        }
    }
}
