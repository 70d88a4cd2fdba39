//! Static semantic checks for MiniFrag, producing the typed IR on success.
//!
//! Checks, by code:
//! E001 entry point, E002 output written, E003 name resolution, E004 typing,
//! E005 subset limits (loops, reserved names, budget), E006 swizzles,
//! E007 constructors, E008 interface contract, E009 recursion.

use std::collections::{HashMap, HashSet};

use crate::eval::Value;

use super::ast::{self, BinaryOp, ExprKind, Literal, LoopStep, StmtKind, TypeTag, UnaryOp};
use super::contract::{BindingRole, InterfaceContract};
use super::diag::{Diagnostic, DiagnosticCode, Pos};
use super::ir::{self, ArithOp, Builtin, CmpOp, Lanes};

/// Per-fragment statement budget shared by the checker and the interpreter.
pub const STATEMENT_BUDGET: u64 = 1_000_000;

pub fn check(ast: &ast::ShaderAst, contract: &InterfaceContract) -> Vec<Diagnostic> {
    analyze(ast, contract).0
}

/// Runs every check; the program is only returned when no diagnostic fired.
pub(crate) fn analyze(
    ast: &ast::ShaderAst,
    contract: &InterfaceContract,
) -> (Vec<Diagnostic>, Option<ir::Program>) {
    let mut checker = Checker::new(contract);
    checker.globals(ast);
    checker.signatures(ast);
    let mut functions = Vec::with_capacity(ast.functions.len());
    for (index, func) in ast.functions.iter().enumerate() {
        functions.push(checker.function(index, func));
    }
    let main = checker.entry_point(ast);
    checker.call_graph(ast, main);

    let mut diags = super::diag::finish(checker.diags);
    if !diags.is_empty() {
        return (diags, None);
    }
    let main = main.expect("entry point verified above");
    let functions: Vec<ir::Function> = functions.into_iter().map(|f| f.expect("no errors")).collect();
    let statement_bound = ir::statement_bounds(&functions)[main];
    if statement_bound > STATEMENT_BUDGET {
        diags.push(Diagnostic::error(
            DiagnosticCode::E005,
            ast.functions[main].pos,
            format!(
                "unsupported construct: main may execute up to {statement_bound} statements per pixel \
                 (limit {STATEMENT_BUDGET}); reduce loop bounds"
            ),
        ));
        return (diags, None);
    }
    (diags, Some(ir::Program { functions, main, statement_bound }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GlobalKind {
    Input(BindingRole),
    Sampler,
    Output,
}

#[derive(Debug, Clone, Copy)]
struct GlobalSym {
    ty: TypeTag,
    kind: GlobalKind,
}

#[derive(Debug, Clone)]
struct Signature {
    index: usize,
    return_type: TypeTag,
    params: Vec<TypeTag>,
}

#[derive(Debug, Clone, Copy)]
struct LocalSym {
    ty: TypeTag,
    slot: usize,
    is_const: bool,
    is_loop_var: bool,
}

/// Expression check result: type, lowered form and whether it is a
/// constant expression.
struct Typed {
    ty: TypeTag,
    ir: ir::Expr,
    constant: bool,
}

/// `None` means an error was already reported for this subtree.
type Checked = Option<Typed>;

struct Checker<'c> {
    contract: &'c InterfaceContract,
    diags: Vec<Diagnostic>,
    globals: HashMap<String, GlobalSym>,
    signatures: HashMap<String, Signature>,
    /// Call edges per function: (callee index, call position).
    calls: Vec<Vec<(usize, Pos)>>,
    writes_output: Vec<bool>,
    // state of the function being checked
    current: usize,
    return_type: TypeTag,
    scopes: Vec<HashMap<String, LocalSym>>,
    slot_count: usize,
}

impl<'c> Checker<'c> {
    fn new(contract: &'c InterfaceContract) -> Self {
        let mut globals = HashMap::new();
        globals.insert(
            contract.output.name.clone(),
            GlobalSym { ty: contract.output.ty, kind: GlobalKind::Output },
        );
        Checker {
            contract,
            diags: Vec::new(),
            globals,
            signatures: HashMap::new(),
            calls: Vec::new(),
            writes_output: Vec::new(),
            current: 0,
            return_type: TypeTag::Void,
            scopes: Vec::new(),
            slot_count: 0,
        }
    }

    fn error(&mut self, code: DiagnosticCode, pos: Pos, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, pos, message));
    }

    fn globals(&mut self, ast: &ast::ShaderAst) {
        for decl in &ast.globals {
            let binding = match decl.storage {
                ast::StorageQualifier::Uniform => self.contract.uniform(&decl.name),
                ast::StorageQualifier::Varying => self.contract.varying(&decl.name),
            };
            let kind = match binding {
                Some(b) if b.ty == decl.ty => {
                    if b.role == BindingRole::MainTexture {
                        GlobalKind::Sampler
                    } else {
                        GlobalKind::Input(b.role)
                    }
                }
                Some(b) => {
                    self.error(
                        DiagnosticCode::E008,
                        decl.pos,
                        format!(
                            "{} '{}' must have type {}, not {}",
                            decl.storage.keyword(),
                            decl.name,
                            b.ty,
                            decl.ty
                        ),
                    );
                    continue;
                }
                None => {
                    let allowed = match decl.storage {
                        ast::StorageQualifier::Uniform => self.contract.describe_uniforms(),
                        ast::StorageQualifier::Varying => self.contract.describe_varyings(),
                    };
                    self.error(
                        DiagnosticCode::E008,
                        decl.pos,
                        format!(
                            "{} '{}' ({}) is not part of the interface contract; allowed: {allowed}",
                            decl.storage.keyword(),
                            decl.name,
                            decl.ty
                        ),
                    );
                    // Keep it resolvable so uses do not cascade into E003.
                    self.globals.insert(
                        decl.name.clone(),
                        GlobalSym { ty: decl.ty, kind: GlobalKind::Input(BindingRole::Time) },
                    );
                    continue;
                }
            };
            if self.globals.contains_key(&decl.name) {
                self.error(DiagnosticCode::E004, decl.pos, format!("redeclaration of '{}'", decl.name));
                continue;
            }
            self.globals.insert(decl.name.clone(), GlobalSym { ty: decl.ty, kind });
        }
    }

    fn signatures(&mut self, ast: &ast::ShaderAst) {
        for (index, func) in ast.functions.iter().enumerate() {
            self.calls.push(Vec::new());
            self.writes_output.push(false);
            if Builtin::from_name(&func.name).is_some() || func.name == "texture2D" {
                self.error(
                    DiagnosticCode::E005,
                    func.pos,
                    format!("unsupported construct: redefinition of built-in function '{}'", func.name),
                );
                continue;
            }
            if func.name.starts_with("gl_") {
                self.error(
                    DiagnosticCode::E005,
                    func.pos,
                    format!("unsupported construct: '{}' uses the reserved gl_ prefix", func.name),
                );
                continue;
            }
            if self.signatures.contains_key(&func.name) {
                self.error(
                    DiagnosticCode::E005,
                    func.pos,
                    format!("unsupported construct: function '{}' is defined more than once (overloading is not supported)", func.name),
                );
                continue;
            }
            if func.return_type == TypeTag::Sampler2D {
                self.error(DiagnosticCode::E005, func.pos, "unsupported construct: function returning sampler2D");
            }
            for param in &func.params {
                match param.ty {
                    TypeTag::Sampler2D => self.error(
                        DiagnosticCode::E005,
                        param.pos,
                        format!("unsupported construct: sampler2D parameter '{}' (use uMainTex directly)", param.name),
                    ),
                    TypeTag::Void => self.error(
                        DiagnosticCode::E004,
                        param.pos,
                        format!("parameter '{}' cannot have type void", param.name),
                    ),
                    _ => {}
                }
            }
            self.signatures.insert(
                func.name.clone(),
                Signature {
                    index,
                    return_type: func.return_type,
                    params: func.params.iter().map(|p| p.ty).collect(),
                },
            );
        }
    }

    fn entry_point(&mut self, ast: &ast::ShaderAst) -> Option<usize> {
        let Some(index) = ast.functions.iter().position(|f| f.name == "main") else {
            self.error(DiagnosticCode::E001, Pos::START, "missing entry point `void main()`");
            return None;
        };
        let main = &ast.functions[index];
        if main.return_type != TypeTag::Void || !main.params.is_empty() {
            self.error(
                DiagnosticCode::E001,
                main.pos,
                "entry point must be declared exactly as `void main()`",
            );
            return None;
        }
        Some(index)
    }

    /// Recursion (E009), use-before-definition (E003) and output reachability (E002).
    fn call_graph(&mut self, ast: &ast::ShaderAst, main: Option<usize>) {
        let cyclic = cyclic_functions(&self.calls);
        let mut reported = Vec::new();
        for (caller, edges) in self.calls.iter().enumerate() {
            for &(callee, pos) in edges {
                let name = &ast.functions[callee].name;
                if cyclic.contains(&caller) && cyclic.contains(&callee) && same_cycle(&self.calls, caller, callee) {
                    let message = if caller == callee {
                        format!("recursion: '{name}' calls itself")
                    } else {
                        format!("recursion: '{}' and '{name}' call each other", ast.functions[caller].name)
                    };
                    reported.push(Diagnostic::error(DiagnosticCode::E009, pos, message));
                } else if callee > caller {
                    reported.push(Diagnostic::error(
                        DiagnosticCode::E003,
                        pos,
                        format!("undeclared identifier '{name}' (functions must be defined before they are called)"),
                    ));
                }
            }
        }
        self.diags.extend(reported);

        let Some(main) = main else { return };
        let mut seen = HashSet::new();
        let mut stack = vec![main];
        let mut writes = false;
        while let Some(f) = stack.pop() {
            if !seen.insert(f) {
                continue;
            }
            writes |= self.writes_output[f];
            stack.extend(self.calls[f].iter().map(|&(callee, _)| callee));
        }
        if !writes {
            self.error(
                DiagnosticCode::E002,
                ast.functions[main].pos,
                format!("{} is never assigned by main or any function it calls", self.contract.output.name),
            );
        }
    }

    // ---- functions and statements ----

    fn function(&mut self, index: usize, func: &ast::FunctionDef) -> Option<ir::Function> {
        self.current = index;
        self.return_type = func.return_type;
        self.scopes = vec![HashMap::new()];
        self.slot_count = 0;
        let mut ok = true;
        for param in &func.params {
            ok &= self.declare(&param.name, param.ty, param.pos, false, false).is_some();
        }
        let body = self.stmts(&func.body.stmts);
        if func.return_type != TypeTag::Void && !always_returns(&func.body.stmts) {
            self.error(
                DiagnosticCode::E004,
                func.pos,
                format!("function '{}' must return a {} on every path", func.name, func.return_type),
            );
            ok = false;
        }
        Some(ir::Function {
            name: func.name.clone(),
            param_count: func.params.len(),
            slot_count: self.slot_count,
            return_type: func.return_type,
            body: body.filter(|_| ok)?,
        })
    }

    fn declare(&mut self, name: &str, ty: TypeTag, pos: Pos, is_const: bool, is_loop_var: bool) -> Option<usize> {
        if name.starts_with("gl_") {
            self.error(
                DiagnosticCode::E005,
                pos,
                format!("unsupported construct: '{name}' uses the reserved gl_ prefix"),
            );
            return None;
        }
        let scope = self.scopes.last_mut().expect("inside a function");
        if scope.contains_key(name) {
            self.error(DiagnosticCode::E004, pos, format!("redeclaration of '{name}'"));
            return None;
        }
        let slot = self.slot_count;
        self.slot_count += 1;
        scope.insert(name.to_owned(), LocalSym { ty, slot, is_const, is_loop_var });
        Some(slot)
    }

    fn lookup_local(&self, name: &str) -> Option<LocalSym> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    /// Checks a statement list; `None` if anything inside failed.
    fn stmts(&mut self, stmts: &[ast::Stmt]) -> Option<Vec<ir::Stmt>> {
        let mut out = Vec::with_capacity(stmts.len());
        let mut ok = true;
        for stmt in stmts {
            match self.stmt(stmt) {
                Some(s) => out.extend(s),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn scoped_stmt(&mut self, stmt: &ast::Stmt) -> Option<Vec<ir::Stmt>> {
        self.scopes.push(HashMap::new());
        let out = self.stmt(stmt);
        self.scopes.pop();
        out
    }

    /// One AST statement lowers to zero or more IR statements (a declaration
    /// with several declarators lowers to one `Let` each).
    fn stmt(&mut self, stmt: &ast::Stmt) -> Option<Vec<ir::Stmt>> {
        match &stmt.kind {
            StmtKind::VarDecl(decl) => self.var_decl(decl),
            StmtKind::Assign { target, op, value } => self.assign(target, *op, value).map(|s| vec![s]),
            StmtKind::Expr(expr) => self.expr(expr).map(|t| vec![ir::Stmt::Eval(t.ir)]),
            StmtKind::If { cond, then_branch, else_branch } => {
                let cond = self.condition(cond, "if");
                let then_body = self.scoped_stmt(then_branch);
                let else_body = match else_branch {
                    Some(e) => self.scoped_stmt(e),
                    None => Some(Vec::new()),
                };
                Some(vec![ir::Stmt::If { cond: cond?, then_body: then_body?, else_body: else_body? }])
            }
            StmtKind::For(l) => self.for_loop(l, stmt.pos).map(|s| vec![s]),
            StmtKind::Return(value) => self.ret(value.as_ref(), stmt.pos).map(|s| vec![s]),
            StmtKind::Block(block) => {
                self.scopes.push(HashMap::new());
                let body = self.stmts(&block.stmts);
                self.scopes.pop();
                Some(vec![ir::Stmt::Block(body?)])
            }
        }
    }

    fn var_decl(&mut self, decl: &ast::VarDecl) -> Option<Vec<ir::Stmt>> {
        let mut out = Vec::new();
        let mut ok = true;
        for d in &decl.declarators {
            match decl.ty {
                TypeTag::Void => {
                    self.error(DiagnosticCode::E004, d.pos, format!("variable '{}' cannot have type void", d.name));
                    ok = false;
                    continue;
                }
                TypeTag::Sampler2D => {
                    self.error(
                        DiagnosticCode::E005,
                        d.pos,
                        format!("unsupported construct: local sampler2D '{}' (use uMainTex directly)", d.name),
                    );
                    ok = false;
                    continue;
                }
                _ => {}
            }
            let value = match &d.init {
                Some(init) => match self.expr(init) {
                    Some(t) if t.ty != decl.ty => {
                        self.error(
                            DiagnosticCode::E004,
                            init.pos,
                            format!(
                                "cannot initialize '{}' of type {} with a value of type {}{}",
                                d.name,
                                decl.ty,
                                t.ty,
                                int_float_hint(decl.ty, t.ty)
                            ),
                        );
                        None
                    }
                    Some(t) if decl.is_const && !t.constant => {
                        self.error(
                            DiagnosticCode::E004,
                            init.pos,
                            format!("initializer of const '{}' is not a constant expression", d.name),
                        );
                        None
                    }
                    other => other.map(|t| t.ir),
                },
                None if decl.is_const => {
                    self.error(DiagnosticCode::E004, d.pos, format!("const '{}' requires an initializer", d.name));
                    None
                }
                None => Some(ir::Expr::Const(Value::zero(decl.ty))),
            };
            let slot = self.declare(&d.name, decl.ty, d.pos, decl.is_const, false);
            match (slot, value) {
                (Some(slot), Some(value)) => out.push(ir::Stmt::Let { slot, value }),
                _ => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn assign(&mut self, target: &ast::LValue, op: ast::AssignOp, value: &ast::Expr) -> Option<ir::Stmt> {
        let (ir_target, base_ty) = self.assign_target(target)?;
        if ir_target == ir::Target::FragColor && op != ast::AssignOp::Set {
            self.error(
                DiagnosticCode::E005,
                target.pos,
                format!(
                    "unsupported construct: '{}' reads {} (it is write-only; compute the color in a local vec4)",
                    op.symbol(),
                    target.name
                ),
            );
            return None;
        }
        let lanes = match &target.swizzle {
            Some(sel) => {
                let lanes = self.swizzle_lanes(base_ty, &sel.components, sel.pos)?;
                let mut seen = [false; 4];
                for &i in lanes.as_slice() {
                    if std::mem::replace(&mut seen[i as usize], true) {
                        self.error(
                            DiagnosticCode::E006,
                            sel.pos,
                            format!("invalid swizzle: '{}' repeats a component and cannot be assigned", sel.components),
                        );
                        return None;
                    }
                }
                Some(lanes)
            }
            None => None,
        };
        let target_ty = match lanes {
            Some(l) => TypeTag::vector(l.len as usize).expect("1..=4 lanes"),
            None => base_ty,
        };
        let rhs = self.expr(value)?;
        let arith = op.binary().map(|b| arith_op(b).expect("compound ops are arithmetic"));
        let result_ty = match op.binary() {
            None => rhs.ty,
            Some(bin) => match arith_result(bin, target_ty, rhs.ty) {
                Some((ty, false)) => ty,
                _ => TypeTag::Void,
            },
        };
        if result_ty != target_ty {
            self.error(
                DiagnosticCode::E004,
                value.pos,
                format!(
                    "cannot assign a value of type {} to '{}' of type {target_ty} with '{}'{}",
                    rhs.ty,
                    target.name,
                    op.symbol(),
                    int_float_hint(target_ty, rhs.ty)
                ),
            );
            return None;
        }
        Some(ir::Stmt::Assign { target: ir_target, lanes, op: arith, value: rhs.ir })
    }

    fn assign_target(&mut self, target: &ast::LValue) -> Option<(ir::Target, TypeTag)> {
        if let Some(local) = self.lookup_local(&target.name) {
            if local.is_loop_var {
                self.error(
                    DiagnosticCode::E005,
                    target.pos,
                    format!("unsupported construct: loop variable '{}' cannot be modified inside the loop", target.name),
                );
                return None;
            }
            if local.is_const {
                self.error(DiagnosticCode::E004, target.pos, format!("cannot assign to const '{}'", target.name));
                return None;
            }
            return Some((ir::Target::Local(local.slot), local.ty));
        }
        match self.globals.get(&target.name).copied() {
            Some(GlobalSym { ty, kind: GlobalKind::Output }) => {
                self.writes_output[self.current] = true;
                Some((ir::Target::FragColor, ty))
            }
            Some(_) => {
                self.error(
                    DiagnosticCode::E004,
                    target.pos,
                    format!("cannot assign to read-only input '{}'", target.name),
                );
                None
            }
            None => {
                self.error(DiagnosticCode::E003, target.pos, format!("undeclared identifier '{}'", target.name));
                None
            }
        }
    }

    fn condition(&mut self, cond: &ast::Expr, what: &str) -> Option<ir::Expr> {
        let t = self.expr(cond)?;
        if t.ty != TypeTag::Bool {
            self.error(
                DiagnosticCode::E004,
                cond.pos,
                format!("{what} condition must be bool, found {}", t.ty),
            );
            return None;
        }
        Some(t.ir)
    }

    fn ret(&mut self, value: Option<&ast::Expr>, pos: Pos) -> Option<ir::Stmt> {
        match (value, self.return_type) {
            (None, TypeTag::Void) => Some(ir::Stmt::Return(None)),
            (None, ty) => {
                self.error(DiagnosticCode::E004, pos, format!("missing return value of type {ty}"));
                None
            }
            (Some(v), TypeTag::Void) => {
                self.error(DiagnosticCode::E004, v.pos, "void function cannot return a value");
                None
            }
            (Some(v), ty) => {
                let t = self.expr(v)?;
                if t.ty != ty {
                    self.error(
                        DiagnosticCode::E004,
                        v.pos,
                        format!("returning {} from a function declared to return {ty}{}", t.ty, int_float_hint(ty, t.ty)),
                    );
                    return None;
                }
                Some(ir::Stmt::Return(Some(t.ir)))
            }
        }
    }

    fn for_loop(&mut self, l: &ast::ForLoop, pos: Pos) -> Option<ir::Stmt> {
        const SHAPE: &str = "for-loop must have the form `for (int i = <int>; i < <int>; i++)`";
        let unsupported = |this: &mut Self, p: Pos, what: &str| {
            this.error(DiagnosticCode::E005, p, format!("unsupported construct: {what}"));
            None
        };

        let StmtKind::VarDecl(decl) = &l.init.kind else {
            return unsupported(self, pos, SHAPE);
        };
        let [d] = decl.declarators.as_slice() else {
            return unsupported(self, l.init.pos, "for-loop must declare exactly one loop variable");
        };
        if decl.ty != TypeTag::Int || decl.is_const {
            return unsupported(self, d.pos, "for-loop variable must be a non-const int");
        }
        let Some(start) = d.init.as_ref().and_then(int_literal) else {
            let p = d.init.as_ref().map_or(d.pos, |e| e.pos);
            return unsupported(self, p, "for-loop start must be an integer literal");
        };

        let ExprKind::Binary { op, lhs, rhs } = &l.cond.kind else {
            return unsupported(self, l.cond.pos, "for-loop condition must be `i < <int>` or `i <= <int>`");
        };
        let inclusive = match op {
            BinaryOp::Lt => false,
            BinaryOp::Le => true,
            _ => return unsupported(self, l.cond.pos, "for-loop condition must use < or <="),
        };
        if !matches!(&lhs.kind, ExprKind::Var(v) if *v == d.name) {
            return unsupported(self, lhs.pos, "for-loop condition must test the loop variable");
        }
        let Some(bound) = int_literal(rhs) else {
            return unsupported(self, rhs.pos, "non-constant for-loop bound (use an integer literal)");
        };

        if l.update.var != d.name {
            return unsupported(self, l.update.pos, "for-loop update must modify the loop variable");
        }
        let step = match &l.update.step {
            LoopStep::Increment => 1,
            LoopStep::Decrement => -1,
            LoopStep::AddAssign(e) | LoopStep::SubAssign(e) => {
                let Some(k) = int_literal(e) else {
                    return unsupported(self, e.pos, "for-loop step must be an integer literal");
                };
                if matches!(l.update.step, LoopStep::SubAssign(_)) {
                    k.checked_neg().unwrap_or(0)
                } else {
                    k
                }
            }
        };

        let Some(trips) = trip_count(start, bound, inclusive, step) else {
            return unsupported(self, l.update.pos, "for-loop never terminates");
        };
        let Ok(trips) = u32::try_from(trips) else {
            return unsupported(self, rhs.pos, "for-loop iteration count is too large");
        };

        self.scopes.push(HashMap::new());
        let slot = self.declare(&d.name, TypeTag::Int, d.pos, false, true);
        self.scopes.push(HashMap::new());
        let body = self.stmt(&l.body);
        self.scopes.pop();
        self.scopes.pop();
        Some(ir::Stmt::Loop { slot: slot?, start, step, trips, body: body? })
    }

    // ---- expressions ----

    fn expr(&mut self, expr: &ast::Expr) -> Checked {
        let pos = expr.pos;
        match &expr.kind {
            ExprKind::Literal(lit) => {
                let (ty, value) = match *lit {
                    Literal::Float(x) => (TypeTag::Float, Value::Float(x)),
                    Literal::Int(i) => (TypeTag::Int, Value::Int(i)),
                    Literal::Bool(b) => (TypeTag::Bool, Value::Bool(b)),
                };
                Some(Typed { ty, ir: ir::Expr::Const(value), constant: true })
            }
            ExprKind::Var(name) => self.var(name, pos),
            ExprKind::Swizzle { base, components } => {
                let base = self.expr(base)?;
                let lanes = self.swizzle_lanes(base.ty, components, pos)?;
                Some(Typed {
                    ty: TypeTag::vector(lanes.len as usize).expect("1..=4 lanes"),
                    ir: ir::Expr::Swizzle { base: Box::new(base.ir), lanes },
                    constant: base.constant,
                })
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs);
                let r = self.expr(rhs);
                self.binary(*op, l?, r?, pos)
            }
            ExprKind::Unary { op, operand } => {
                let t = self.expr(operand)?;
                let ok = match op {
                    UnaryOp::Neg | UnaryOp::Plus => t.ty == TypeTag::Int || t.ty.is_gen_type(),
                    UnaryOp::Not => t.ty == TypeTag::Bool,
                };
                if !ok {
                    self.error(
                        DiagnosticCode::E004,
                        pos,
                        format!("operator '{}' cannot be applied to {}", op.symbol(), t.ty),
                    );
                    return None;
                }
                let ir = match op {
                    UnaryOp::Plus => t.ir,
                    UnaryOp::Neg => ir::Expr::Neg(Box::new(t.ir)),
                    UnaryOp::Not => ir::Expr::Not(Box::new(t.ir)),
                };
                Some(Typed { ty: t.ty, ir, constant: t.constant })
            }
            ExprKind::Ternary { cond, then_expr, else_expr } => {
                let c = self.condition(cond, "?:");
                let a = self.expr(then_expr);
                let b = self.expr(else_expr);
                let (c, a, b) = (c?, a?, b?);
                let constant = a.constant && b.constant && cond_is_constant(cond);
                if a.ty != b.ty {
                    self.error(
                        DiagnosticCode::E004,
                        pos,
                        format!("branches of ?: have different types ({} and {})", a.ty, b.ty),
                    );
                    return None;
                }
                Some(Typed {
                    ty: a.ty,
                    ir: ir::Expr::Select { cond: Box::new(c), then_expr: Box::new(a.ir), else_expr: Box::new(b.ir) },
                    constant,
                })
            }
            ExprKind::Call { name, args } => self.call(name, args, pos),
            ExprKind::Constructor { ty, args } => self.constructor(*ty, args, pos),
        }
    }

    fn var(&mut self, name: &str, pos: Pos) -> Checked {
        if let Some(local) = self.lookup_local(name) {
            return Some(Typed { ty: local.ty, ir: ir::Expr::Local(local.slot), constant: local.is_const });
        }
        match self.globals.get(name).copied() {
            Some(GlobalSym { ty, kind: GlobalKind::Input(role) }) => {
                Some(Typed { ty, ir: ir::Expr::Input(role), constant: false })
            }
            Some(GlobalSym { kind: GlobalKind::Output, .. }) => {
                self.error(
                    DiagnosticCode::E005,
                    pos,
                    format!("unsupported construct: reading {name} (it is write-only; keep the color in a local vec4)"),
                );
                None
            }
            Some(GlobalSym { kind: GlobalKind::Sampler, .. }) => {
                self.error(
                    DiagnosticCode::E004,
                    pos,
                    format!("sampler2D '{name}' can only be used as the first argument of texture2D"),
                );
                None
            }
            None => {
                self.error(DiagnosticCode::E003, pos, format!("undeclared identifier '{name}'"));
                None
            }
        }
    }

    fn swizzle_lanes(&mut self, base: TypeTag, components: &str, pos: Pos) -> Option<Lanes> {
        let Some(width) = base.float_width().filter(|_| base.is_vector()) else {
            self.error(
                DiagnosticCode::E006,
                pos,
                format!("invalid swizzle: cannot select '.{components}' from a value of type {base}"),
            );
            return None;
        };
        const SETS: [&str; 2] = ["xyzw", "rgba"];
        let set = SETS.iter().find(|set| components.chars().all(|c| set.contains(c)));
        let mut lanes = Lanes { index: [0; 4], len: 0 };
        let valid = match set {
            Some(set) if (1..=4).contains(&components.len()) => {
                for (i, c) in components.chars().enumerate() {
                    lanes.index[i] = set.find(c).expect("member") as u8;
                }
                lanes.len = components.len() as u8;
                lanes.as_slice().iter().all(|&i| (i as usize) < width)
            }
            _ => false,
        };
        if !valid {
            self.error(
                DiagnosticCode::E006,
                pos,
                format!(
                    "invalid swizzle '.{components}' on {base}: use 1-4 components from one of xyzw or rgba, within the first {width}"
                ),
            );
            return None;
        }
        Some(lanes)
    }

    fn binary(&mut self, op: BinaryOp, l: Typed, r: Typed, pos: Pos) -> Checked {
        let constant = l.constant && r.constant;
        let (lhs, rhs) = (Box::new(l.ir), Box::new(r.ir));
        let mismatch = |this: &mut Self| {
            this.error(
                DiagnosticCode::E004,
                pos,
                format!(
                    "operator '{}' cannot combine {} and {}{}",
                    op.symbol(),
                    l.ty,
                    r.ty,
                    int_float_hint(l.ty, r.ty)
                ),
            );
            None
        };
        let (ty, ir) = match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => match arith_result(op, l.ty, r.ty) {
                Some((ty, true)) => (ty, ir::Expr::MatVecMul(lhs, rhs)),
                Some((ty, false)) => (ty, ir::Expr::Arith { op: arith_op(op).expect("arith"), lhs, rhs }),
                None => return mismatch(self),
            },
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => {
                if l.ty != r.ty || !matches!(l.ty, TypeTag::Float | TypeTag::Int) {
                    return mismatch(self);
                }
                (TypeTag::Bool, ir::Expr::Compare { op: cmp_op(op), lhs, rhs })
            }
            BinaryOp::Eq | BinaryOp::Ne => {
                if l.ty != r.ty {
                    return mismatch(self);
                }
                (TypeTag::Bool, ir::Expr::Compare { op: cmp_op(op), lhs, rhs })
            }
            BinaryOp::And | BinaryOp::Or => {
                if l.ty != TypeTag::Bool || r.ty != TypeTag::Bool {
                    return mismatch(self);
                }
                let ir = if op == BinaryOp::And { ir::Expr::And(lhs, rhs) } else { ir::Expr::Or(lhs, rhs) };
                (TypeTag::Bool, ir)
            }
        };
        Some(Typed { ty, ir, constant })
    }

    fn call(&mut self, name: &str, args: &[ast::Expr], pos: Pos) -> Checked {
        if name == "texture2D" {
            return self.texture2d(args, pos);
        }
        let typed: Vec<Checked> = args.iter().map(|a| self.expr(a)).collect();
        let typed: Vec<Typed> = typed.into_iter().collect::<Option<_>>()?;

        if let Some(builtin) = Builtin::from_name(name) {
            let arg_types: Vec<TypeTag> = typed.iter().map(|t| t.ty).collect();
            let ty = match builtin_result(builtin, &arg_types) {
                Ok(ty) => ty,
                Err(expected) => {
                    let got = arg_types.iter().map(|t| t.keyword()).collect::<Vec<_>>().join(", ");
                    self.error(
                        DiagnosticCode::E004,
                        pos,
                        format!("no matching call to {name}({got}); expected {expected}"),
                    );
                    return None;
                }
            };
            let constant = typed.iter().all(|t| t.constant);
            let args = typed.into_iter().map(|t| t.ir).collect();
            return Some(Typed { ty, ir: ir::Expr::Builtin { func: builtin, args }, constant });
        }

        let Some(sig) = self.signatures.get(name).cloned() else {
            let message = if self.lookup_local(name).is_some() || self.globals.contains_key(name) {
                format!("'{name}' is not a function")
            } else {
                format!("undeclared identifier '{name}' (not a MiniFrag built-in or a function defined in this shader)")
            };
            self.error(DiagnosticCode::E003, pos, message);
            return None;
        };
        self.calls[self.current].push((sig.index, pos));
        let arg_types: Vec<TypeTag> = typed.iter().map(|t| t.ty).collect();
        if arg_types != sig.params {
            let got = arg_types.iter().map(|t| t.keyword()).collect::<Vec<_>>().join(", ");
            let want = sig.params.iter().map(|t| t.keyword()).collect::<Vec<_>>().join(", ");
            self.error(
                DiagnosticCode::E004,
                pos,
                format!("no matching call to {name}({got}); it takes ({want})"),
            );
            return None;
        }
        let args = typed.into_iter().map(|t| t.ir).collect();
        Some(Typed { ty: sig.return_type, ir: ir::Expr::Call { func: sig.index, args }, constant: false })
    }

    fn texture2d(&mut self, args: &[ast::Expr], pos: Pos) -> Checked {
        let [sampler, uv] = args else {
            self.error(
                DiagnosticCode::E004,
                pos,
                format!("texture2D takes (sampler2D, vec2), got {} argument(s)", args.len()),
            );
            return None;
        };
        let sampler_ok = matches!(&sampler.kind, ExprKind::Var(n)
            if self.lookup_local(n).is_none()
                && matches!(self.globals.get(n), Some(GlobalSym { kind: GlobalKind::Sampler, .. })));
        if !sampler_ok {
            let known = match &sampler.kind {
                ExprKind::Var(n) => self.lookup_local(n).is_some() || self.globals.contains_key(n),
                _ => true,
            };
            if known {
                self.error(
                    DiagnosticCode::E004,
                    sampler.pos,
                    "first argument of texture2D must be the declared sampler uMainTex",
                );
            } else if let ExprKind::Var(n) = &sampler.kind {
                self.error(DiagnosticCode::E003, sampler.pos, format!("undeclared identifier '{n}'"));
            }
            return None;
        }
        let uv_t = self.expr(uv)?;
        if uv_t.ty != TypeTag::Vec2 {
            self.error(
                DiagnosticCode::E004,
                uv.pos,
                format!("texture2D coordinate must be vec2, found {}", uv_t.ty),
            );
            return None;
        }
        Some(Typed { ty: TypeTag::Vec4, ir: ir::Expr::Texture(Box::new(uv_t.ir)), constant: false })
    }

    fn constructor(&mut self, ty: TypeTag, args: &[ast::Expr], pos: Pos) -> Checked {
        let typed: Vec<Checked> = args.iter().map(|a| self.expr(a)).collect();
        let typed: Vec<Typed> = typed.into_iter().collect::<Option<_>>()?;
        let shape = |this: &mut Self, msg: String| {
            this.error(DiagnosticCode::E007, pos, msg);
            None
        };
        if ty == TypeTag::Void || ty == TypeTag::Sampler2D {
            return shape(self, format!("{ty} has no constructor"));
        }
        if typed.is_empty() {
            return shape(self, format!("{ty} constructor needs at least one argument"));
        }
        for t in &typed {
            if !(t.ty.is_scalar() || t.ty.is_vector() || t.ty == TypeTag::Mat3) {
                return shape(self, format!("{ty} constructor cannot take a {}", t.ty));
            }
        }
        let needed = ty.component_count();
        let arg_desc = || typed.iter().map(|t| t.ty.keyword()).collect::<Vec<_>>().join(", ");
        if ty.is_scalar() {
            if typed.len() != 1 || typed[0].ty == TypeTag::Mat3 {
                return shape(self, format!("{ty} constructor takes exactly one scalar or vector, got ({})", arg_desc()));
            }
        } else if typed.len() == 1 && (typed[0].ty.is_scalar() || typed[0].ty == ty) {
            // broadcast / diagonal, or identity
        } else {
            let mut have = 0usize;
            for (i, t) in typed.iter().enumerate() {
                if have >= needed {
                    return shape(
                        self,
                        format!("{ty} constructor has too many arguments ({}): argument {} is unused", arg_desc(), i + 1),
                    );
                }
                if t.ty == TypeTag::Mat3 {
                    return shape(self, format!("{ty} constructor cannot take a mat3 among other arguments"));
                }
                have += t.ty.component_count();
            }
            if have < needed {
                let hint = match ty {
                    TypeTag::Vec2 => "vec2 needs 1 or 2 scalars, or a larger vector",
                    TypeTag::Vec3 => "vec3 needs 1 or 3 scalars, or vec2+scalar",
                    TypeTag::Vec4 => "vec4 needs 1 or 4 scalars, or e.g. vec3+scalar",
                    _ => "mat3 needs 1 or 9 scalars, or three vec3 columns",
                };
                return shape(
                    self,
                    format!("{ty} constructor got {have} component(s) from ({}): {hint}", arg_desc()),
                );
            }
        }
        let constant = typed.iter().all(|t| t.constant);
        let args = typed.into_iter().map(|t| t.ir).collect();
        Some(Typed { ty, ir: ir::Expr::Construct { ty, args }, constant })
    }
}

/// Result type of an arithmetic operator; the flag marks matrix-vector products.
fn arith_result(op: BinaryOp, l: TypeTag, r: TypeTag) -> Option<(TypeTag, bool)> {
    use TypeTag::*;
    if !op.is_arithmetic() {
        return None;
    }
    match (l, r) {
        (Mat3, Vec3) if op == BinaryOp::Mul => Some((Vec3, true)),
        (Int, Int) => Some((Int, false)),
        (a, b) if a == b && a.is_gen_type() => Some((a, false)),
        (Float, v) | (v, Float) if v.is_vector() => Some((v, false)),
        _ => None,
    }
}

fn arith_op(op: BinaryOp) -> Option<ArithOp> {
    Some(match op {
        BinaryOp::Add => ArithOp::Add,
        BinaryOp::Sub => ArithOp::Sub,
        BinaryOp::Mul => ArithOp::Mul,
        BinaryOp::Div => ArithOp::Div,
        _ => return None,
    })
}

fn cmp_op(op: BinaryOp) -> CmpOp {
    match op {
        BinaryOp::Lt => CmpOp::Lt,
        BinaryOp::Gt => CmpOp::Gt,
        BinaryOp::Le => CmpOp::Le,
        BinaryOp::Ge => CmpOp::Ge,
        BinaryOp::Eq => CmpOp::Eq,
        _ => CmpOp::Ne,
    }
}

fn int_float_hint(a: TypeTag, b: TypeTag) -> &'static str {
    let is_float_family = |t: TypeTag| t.is_gen_type();
    if (a == TypeTag::Int && is_float_family(b)) || (b == TypeTag::Int && is_float_family(a)) {
        " (there is no implicit int-to-float conversion; write 1.0 instead of 1)"
    } else {
        ""
    }
}

/// Result type of a builtin call, or a description of the accepted signatures.
fn builtin_result(func: Builtin, args: &[TypeTag]) -> Result<TypeTag, &'static str> {
    use Builtin::*;
    let gen = |t: TypeTag| t.is_gen_type();
    let float = |t: TypeTag| t == TypeTag::Float;
    match (func, args) {
        (Sin | Cos | Abs | Floor | Fract | Exp | Sqrt | Normalize, [x]) if gen(*x) => Ok(*x),
        (Sin | Cos | Abs | Floor | Fract | Exp | Sqrt | Normalize, _) => Err("(genType)"),
        (Length, [x]) if gen(*x) => Ok(TypeTag::Float),
        (Length, _) => Err("(genType)"),
        (Dot | Distance, [x, y]) if gen(*x) && x == y => Ok(TypeTag::Float),
        (Dot | Distance, _) => Err("(genType, genType) of the same type"),
        (Pow, [x, y]) if gen(*x) && x == y => Ok(*x),
        (Pow, _) => Err("(genType, genType) of the same type"),
        (Mod | Min | Max, [x, y]) if gen(*x) && (x == y || float(*y)) => Ok(*x),
        (Mod | Min | Max, _) => Err("(genType, genType) or (genType, float)"),
        (Step, [e, x]) if gen(*x) && (e == x || float(*e)) => Ok(*x),
        (Step, _) => Err("(genType edge, genType x) or (float edge, genType x)"),
        (Clamp, [x, lo, hi]) if gen(*x) && ((lo == x && hi == x) || (float(*lo) && float(*hi))) => Ok(*x),
        (Clamp, _) => Err("(genType, genType, genType) or (genType, float, float)"),
        (Mix, [x, y, a]) if gen(*x) && x == y && (a == x || float(*a)) => Ok(*x),
        (Mix, _) => Err("(genType, genType, genType) or (genType, genType, float)"),
        (Smoothstep, [e0, e1, x]) if gen(*x) && ((e0 == x && e1 == x) || (float(*e0) && float(*e1))) => Ok(*x),
        (Smoothstep, _) => Err("(genType, genType, genType) or (float, float, genType)"),
    }
}

/// Signed integer literal: `3` or `-3`.
fn int_literal(expr: &ast::Expr) -> Option<i32> {
    match &expr.kind {
        ExprKind::Literal(Literal::Int(i)) => Some(*i),
        ExprKind::Unary { op: UnaryOp::Neg, operand } => match operand.kind {
            ExprKind::Literal(Literal::Int(i)) => i.checked_neg(),
            _ => None,
        },
        ExprKind::Unary { op: UnaryOp::Plus, operand } => int_literal(operand),
        _ => None,
    }
}

/// Iterations of `for (i = start; i < / <= bound; i += step)`, or `None`
/// if the loop would never stop.
fn trip_count(start: i32, bound: i32, inclusive: bool, step: i32) -> Option<u64> {
    let (start, bound, step) = (i64::from(start), i64::from(bound), i64::from(step));
    let runs = if inclusive { start <= bound } else { start < bound };
    if !runs {
        return Some(0);
    }
    if step <= 0 {
        return None;
    }
    let span = if inclusive { bound - start + 1 } else { bound - start };
    Some(((span + step - 1) / step) as u64)
}

fn cond_is_constant(cond: &ast::Expr) -> bool {
    matches!(cond.kind, ExprKind::Literal(_))
}

fn always_returns(stmts: &[ast::Stmt]) -> bool {
    stmts.iter().any(stmt_always_returns)
}

fn stmt_always_returns(stmt: &ast::Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return(_) => true,
        StmtKind::Block(b) => always_returns(&b.stmts),
        StmtKind::If { then_branch, else_branch: Some(e), .. } => {
            stmt_always_returns(then_branch) && stmt_always_returns(e)
        }
        _ => false,
    }
}

/// Functions that sit on a call cycle.
fn cyclic_functions(calls: &[Vec<(usize, Pos)>]) -> HashSet<usize> {
    (0..calls.len()).filter(|&f| reaches(calls, f, f)).collect()
}

fn same_cycle(calls: &[Vec<(usize, Pos)>], a: usize, b: usize) -> bool {
    reaches(calls, b, a)
}

/// Whether `to` is reachable from `from` by following at least one edge.
fn reaches(calls: &[Vec<(usize, Pos)>], from: usize, to: usize) -> bool {
    let mut seen = HashSet::new();
    let mut stack: Vec<usize> = calls[from].iter().map(|&(c, _)| c).collect();
    while let Some(f) = stack.pop() {
        if f == to {
            return true;
        }
        if seen.insert(f) {
            stack.extend(calls[f].iter().map(|&(c, _)| c));
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parser::parse, token::tokenize};

    const HEADER: &str = "precision mediump float;\nuniform sampler2D uMainTex;\nuniform float uTime;\nuniform vec2 uResolution;\nvarying vec2 vUv;\n";

    fn diags(body: &str) -> Vec<Diagnostic> {
        let src = format!("{HEADER}{body}");
        let ast = parse(&tokenize(&src).unwrap()).unwrap_or_else(|d| panic!("{d:?}"));
        check(&ast, &InterfaceContract::default())
    }

    fn codes(body: &str) -> Vec<DiagnosticCode> {
        diags(body).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn passthrough_is_clean() {
        assert!(diags("void main(){ gl_FragColor = texture2D(uMainTex, vUv); }").is_empty());
    }

    #[test]
    fn undeclared_identifier() {
        let d = diags("void main(){ gl_FragColor = vec4(col, 1.0); }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, DiagnosticCode::E003);
        assert_eq!(d[0].message, "undeclared identifier 'col'");
    }

    #[test]
    fn uniform_outside_contract() {
        assert_eq!(codes("uniform vec3 uFoo;\nvoid main(){ gl_FragColor = vec4(1.0); }"), [DiagnosticCode::E008]);
        assert_eq!(codes("uniform vec3 uTime;\nvoid main(){ gl_FragColor = vec4(1.0); }"), [DiagnosticCode::E008]);
        assert_eq!(codes("varying vec3 vNormal;\nvoid main(){ gl_FragColor = vec4(1.0); }"), [DiagnosticCode::E008]);
    }

    #[test]
    fn direct_and_mutual_recursion() {
        let d = codes("float f(float x){ return f(x); }\nvoid main(){ gl_FragColor = vec4(f(1.0)); }");
        assert_eq!(d, [DiagnosticCode::E009]);
        let d = codes(
            "float a(float x){ return b(x); }\nfloat b(float x){ return a(x); }\nvoid main(){ gl_FragColor = vec4(a(1.0)); }",
        );
        assert!(d.iter().all(|c| *c == DiagnosticCode::E009) && !d.is_empty(), "{d:?}");
    }

    #[test]
    fn forward_reference_is_undeclared() {
        let d = codes("void main(){ gl_FragColor = vec4(g(1.0)); }\nfloat g(float x){ return x; }");
        assert_eq!(d, [DiagnosticCode::E003]);
    }

    #[test]
    fn float_to_vec4_mismatch() {
        assert_eq!(codes("void main(){ gl_FragColor = uTime; }"), [DiagnosticCode::E004]);
    }

    #[test]
    fn int_float_mixing_is_rejected() {
        assert_eq!(codes("void main(){ float x = 1; gl_FragColor = vec4(x); }"), [DiagnosticCode::E004]);
        assert_eq!(codes("void main(){ float x = 2.0 * 3; gl_FragColor = vec4(x); }"), [DiagnosticCode::E004]);
    }

    #[test]
    fn constructor_arity() {
        let d = diags("void main(){ vec3 c = vec3(1.0, 0.0); gl_FragColor = vec4(c, 1.0); }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, DiagnosticCode::E007);
        assert_eq!((d[0].line, d[0].col), (6, 23));
        assert_eq!(codes("void main(){ gl_FragColor = vec4(vec4(1.0), 1.0); }"), [DiagnosticCode::E007]);
        assert!(codes("void main(){ vec2 a = vec2(1.0); gl_FragColor = vec4(a, a); }").is_empty());
        assert!(codes("void main(){ vec3 c = vec3(vec4(1.0)); gl_FragColor = vec4(c, 1.0); }").is_empty());
        assert!(codes("void main(){ mat3 m = mat3(vec3(1.0), vec3(0.0), vec3(2.0)); gl_FragColor = vec4(m * vec3(1.0), 1.0); }").is_empty());
    }

    #[test]
    fn swizzle_rules() {
        assert_eq!(codes("void main(){ vec4 c = vec4(1.0); gl_FragColor = vec4(c.xyzq); }"), [DiagnosticCode::E006]);
        assert_eq!(codes("void main(){ vec4 c = vec4(1.0); gl_FragColor = vec4(c.xg, 1.0, 1.0); }"), [DiagnosticCode::E006]);
        assert_eq!(codes("void main(){ vec2 c = vec2(1.0); gl_FragColor = vec4(c.xyz, 1.0); }"), [DiagnosticCode::E006]);
        assert_eq!(codes("void main(){ float f = 1.0; gl_FragColor = vec4(f.x); }"), [DiagnosticCode::E006]);
        assert_eq!(codes("void main(){ gl_FragColor = vec4(1.0); gl_FragColor.rr = vec2(0.0); }"), [DiagnosticCode::E006]);
        assert!(codes("void main(){ vec4 c = vec4(1.0); gl_FragColor = c.bgra; gl_FragColor.a = 1.0; }").is_empty());
    }

    #[test]
    fn missing_main_and_missing_output() {
        assert_eq!(codes(""), [DiagnosticCode::E001]);
        assert_eq!(codes("vec4 main(){ return vec4(1.0); }"), [DiagnosticCode::E001]);
        assert_eq!(codes("void main(){ vec4 c = vec4(1.0); }"), [DiagnosticCode::E002]);
        // a helper writing the output counts
        assert!(codes("void paint(){ gl_FragColor = vec4(1.0); }\nvoid main(){ paint(); }").is_empty());
    }

    #[test]
    fn for_loop_rules() {
        let ok = "void main(){ float s = 0.0; for (int i = 0; i < 4; i++) { s += 0.25; } gl_FragColor = vec4(s); }";
        assert!(codes(ok).is_empty());
        let bad = [
            "void main(){ int n = 4; for (int i = 0; i < n; i++) { } gl_FragColor = vec4(1.0); }",
            "void main(){ for (float i = 0.0; i < 4.0; i++) { } gl_FragColor = vec4(1.0); }",
            "void main(){ for (int i = 0; i < 4; i--) { } gl_FragColor = vec4(1.0); }",
            "void main(){ for (int i = 0; i < 4; i++) { i = 2; } gl_FragColor = vec4(1.0); }",
            "void main(){ for (int i = 0; i > 4; i++) { } gl_FragColor = vec4(1.0); }",
        ];
        for src in bad {
            assert_eq!(codes(src), [DiagnosticCode::E005], "{src}");
        }
        // a loop that never starts may count down
        assert!(codes("void main(){ for (int i = 5; i < 4; i--) { } gl_FragColor = vec4(1.0); }").is_empty());
    }

    #[test]
    fn statement_budget() {
        let src = "void main(){ float s = 0.0; for (int i = 0; i < 1000; i++) { for (int j = 0; j < 1000; j++) { s += 1.0; } } gl_FragColor = vec4(s); }";
        assert_eq!(codes(src), [DiagnosticCode::E005]);
    }

    #[test]
    fn output_is_write_only() {
        assert_eq!(codes("void main(){ gl_FragColor = vec4(1.0); vec4 c = gl_FragColor; }"), [DiagnosticCode::E005]);
        assert_eq!(codes("void main(){ gl_FragColor = vec4(1.0); gl_FragColor.rgb *= 0.5; }"), [DiagnosticCode::E005]);
    }

    #[test]
    fn read_only_inputs() {
        assert_eq!(codes("void main(){ uTime = 1.0; gl_FragColor = vec4(1.0); }"), [DiagnosticCode::E004]);
        assert_eq!(codes("void main(){ const float k = 1.0; k = 2.0; gl_FragColor = vec4(k); }"), [DiagnosticCode::E004]);
        assert_eq!(codes("void main(){ const float k = uTime; gl_FragColor = vec4(k); }"), [DiagnosticCode::E004]);
    }

    #[test]
    fn builtin_signatures() {
        assert!(codes("void main(){ vec3 c = mix(vec3(0.0), vec3(1.0), 0.5); gl_FragColor = vec4(clamp(c, 0.0, 1.0), 1.0); }").is_empty());
        assert_eq!(codes("void main(){ gl_FragColor = vec4(mix(1.0, vec3(1.0), 0.5), 1.0); }"), [DiagnosticCode::E004]);
        assert_eq!(codes("void main(){ gl_FragColor = vec4(atan(1.0)); }"), [DiagnosticCode::E003]);
        assert_eq!(codes("void main(){ gl_FragColor = texture2D(uMainTex, vec3(1.0)); }"), [DiagnosticCode::E004]);
    }

    #[test]
    fn missing_return_path() {
        assert_eq!(
            codes("float f(float x){ if (x > 0.0) { return x; } }\nvoid main(){ gl_FragColor = vec4(f(1.0)); }"),
            [DiagnosticCode::E004]
        );
        assert!(codes("float f(float x){ if (x > 0.0) { return x; } else { return 0.0; } }\nvoid main(){ gl_FragColor = vec4(f(1.0)); }").is_empty());
    }

    #[test]
    fn shadowing_and_redeclaration() {
        assert!(codes("void main(){ float a = 1.0; { float a = 2.0; } gl_FragColor = vec4(a); }").is_empty());
        assert_eq!(codes("void main(){ float a = 1.0; float a = 2.0; gl_FragColor = vec4(a); }"), [DiagnosticCode::E004]);
    }

    #[test]
    fn trip_counts() {
        assert_eq!(trip_count(0, 4, false, 1), Some(4));
        assert_eq!(trip_count(0, 4, true, 1), Some(5));
        assert_eq!(trip_count(0, 10, false, 3), Some(4));
        assert_eq!(trip_count(5, 4, false, -1), Some(0));
        assert_eq!(trip_count(0, 4, false, 0), None);
        assert_eq!(trip_count(i32::MAX - 1, i32::MAX, true, 1), Some(2));
    }
}
