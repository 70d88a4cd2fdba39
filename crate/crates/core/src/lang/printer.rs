//! Source printer. Output re-parses to the same tree; parentheses are
//! inserted only where precedence requires them.

use std::fmt::Write;

use super::ast::*;

pub fn print(ast: &ShaderAst) -> String {
    let mut p = Printer { out: String::new(), indent: 0 };
    for decl in &ast.precision {
        p.line(&format!("precision {} {};", decl.precision.keyword(), decl.ty));
    }
    for g in &ast.globals {
        p.line(&format!("{} {} {};", g.storage.keyword(), g.ty, g.name));
    }
    for f in &ast.functions {
        p.out.push('\n');
        let params: Vec<String> = f.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
        p.open(&format!("{} {}({})", f.return_type, f.name, params.join(", ")));
        p.stmts(&f.body.stmts);
        p.close();
    }
    p.out
}

pub fn print_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn pad(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
    }

    fn line(&mut self, text: &str) {
        self.pad();
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn open(&mut self, head: &str) {
        self.pad();
        self.out.push_str(head);
        self.out.push_str(" {\n");
        self.indent += 1;
    }

    fn close(&mut self) {
        self.indent -= 1;
        self.line("}");
    }

    fn stmts(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    /// Body of an `if`/`for`: blocks keep their braces, anything else is
    /// indented on its own line.
    fn body(&mut self, head: &str, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Block(b) => {
                self.open(head);
                self.stmts(&b.stmts);
                self.close();
            }
            _ => {
                self.line(head);
                self.indent += 1;
                self.stmt(stmt);
                self.indent -= 1;
            }
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::If { cond, then_branch, else_branch } => {
                self.body(&format!("if ({})", print_expr(cond)), then_branch);
                if let Some(e) = else_branch {
                    self.body("else", e);
                }
            }
            StmtKind::For(l) => {
                let head = format!(
                    "for ({}; {}; {})",
                    simple_stmt(&l.init),
                    print_expr(&l.cond),
                    update(&l.update)
                );
                self.body(&head, &l.body);
            }
            StmtKind::Block(b) => {
                self.open("");
                self.stmts(&b.stmts);
                self.close();
            }
            _ => self.line(&format!("{};", simple_stmt(stmt))),
        }
    }
}

/// Declarations, assignments, expression statements and returns, without `;`.
fn simple_stmt(stmt: &Stmt) -> String {
    match &stmt.kind {
        StmtKind::VarDecl(decl) => {
            let mut s = String::new();
            if decl.is_const {
                s.push_str("const ");
            }
            s.push_str(decl.ty.keyword());
            for (i, d) in decl.declarators.iter().enumerate() {
                s.push_str(if i == 0 { " " } else { ", " });
                s.push_str(&d.name);
                if let Some(init) = &d.init {
                    s.push_str(" = ");
                    write_expr(&mut s, init);
                }
            }
            s
        }
        StmtKind::Assign { target, op, value } => {
            let mut s = target.name.clone();
            if let Some(sel) = &target.swizzle {
                s.push('.');
                s.push_str(&sel.components);
            }
            let _ = write!(s, " {} ", op.symbol());
            write_expr(&mut s, value);
            s
        }
        StmtKind::Expr(e) => print_expr(e),
        StmtKind::Return(None) => "return".to_owned(),
        StmtKind::Return(Some(e)) => format!("return {}", print_expr(e)),
        StmtKind::If { .. } | StmtKind::For(_) | StmtKind::Block(_) => {
            unreachable!("compound statements are printed by Printer::stmt")
        }
    }
}

fn update(u: &ForUpdate) -> String {
    match &u.step {
        LoopStep::Increment => format!("{}++", u.var),
        LoopStep::Decrement => format!("{}--", u.var),
        LoopStep::AddAssign(e) => format!("{} += {}", u.var, print_expr(e)),
        LoopStep::SubAssign(e) => format!("{} -= {}", u.var, print_expr(e)),
    }
}

/// Binding strength used for parenthesization; higher binds tighter.
fn strength(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Ternary { .. } => 1,
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => 8,
        _ => 9,
    }
}

fn write_operand(out: &mut String, expr: &Expr, min: u8) {
    if strength(expr) < min {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}

fn write_args(out: &mut String, args: &[Expr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn write_expr(out: &mut String, expr: &Expr) {
    match &expr.kind {
        ExprKind::Literal(Literal::Float(x)) => {
            let _ = write!(out, "{x:?}");
        }
        ExprKind::Literal(Literal::Int(i)) => {
            let _ = write!(out, "{i}");
        }
        ExprKind::Literal(Literal::Bool(b)) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Swizzle { base, components } => {
            // Literals are wrapped so `1.0.x` never has to be lexed.
            let min = if matches!(base.kind, ExprKind::Literal(_)) { 10 } else { 9 };
            write_operand(out, base, min);
            out.push('.');
            out.push_str(components);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            write_operand(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(out, rhs, prec + 1);
        }
        ExprKind::Unary { op, operand } => {
            out.push_str(op.symbol());
            // `- -x` must not become the `--` token.
            write_operand(out, operand, 9);
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            write_operand(out, cond, 2);
            out.push_str(" ? ");
            write_expr(out, then_expr);
            out.push_str(" : ");
            write_expr(out, else_expr);
        }
        ExprKind::Call { name, args } => {
            out.push_str(name);
            write_args(out, args);
        }
        ExprKind::Constructor { ty, args } => {
            out.push_str(ty.keyword());
            write_args(out, args);
        }
    }
}
