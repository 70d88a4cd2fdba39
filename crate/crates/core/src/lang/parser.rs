//! Recursive-descent parser for MiniFrag.
//!
//! Grammar outline:
//!
//! ```text
//! program  := (precision | global | function)*
//! global   := ("uniform"|"varying") precision? type ident ";"
//! function := type ident "(" params? ")" block
//! stmt     := decl | assign | exprStmt | if | for | return | block
//! decl     := "const"? precision? type ident ("=" expr)? ("," ident ("=" expr)?)* ";"
//! assign   := ident ("." ident)? ("="|"+="|"-="|"*="|"/=") expr ";"
//! for      := "for" "(" decl expr ";" update ")" stmt
//! expr     := ternary, then || && ==/!= relational +- */ unary postfix primary
//! ```
//!
//! Constructs GLSL has but MiniFrag excludes are still recognized so they can
//! be reported as E005 rather than as a generic syntax error. After an error
//! the parser skips to the next statement boundary and keeps going until the
//! diagnostic cap is reached.

use super::ast::*;
use super::diag::{Diagnostic, DiagnosticCode, Pos, MAX_DIAGNOSTICS};
use super::token::{Token, TokenKind};

const UNSUPPORTED_TYPES: &[&str] = &[
    "mat2", "mat4", "ivec2", "ivec3", "ivec4", "bvec2", "bvec3", "bvec4", "samplerCube",
];
const UNSUPPORTED_STATEMENTS: &[&str] =
    &["while", "do", "switch", "case", "default", "discard", "break", "continue", "struct"];
const UNSUPPORTED_OPERATORS: &[&str] = &["%", "&", "|", "^", "<<", ">>", "^^"];

/// Marker: a diagnostic has been recorded and the caller should recover.
struct Abort;

type PResult<T> = Result<T, Abort>;

pub fn parse(tokens: &[Token]) -> Result<ShaderAst, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let tokens = strip_directives(tokens, &mut diags);
    let mut parser = Parser { tokens, idx: 0, diags };
    let ast = parser.program();
    if parser.diags.is_empty() {
        Ok(ast)
    } else {
        Err(super::diag::finish(parser.diags))
    }
}

/// Drops every `#...` line, reporting each directive once.
fn strip_directives(tokens: &[Token], diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut skip_line = None;
    for tok in tokens {
        if skip_line == Some(tok.line) {
            continue;
        }
        if tok.kind == TokenKind::Punctuation && tok.is("#") {
            diags.push(Diagnostic::error(
                DiagnosticCode::E005,
                tok.pos(),
                "unsupported construct: #-directive (the preprocessor is not available)",
            ));
            skip_line = Some(tok.line);
            continue;
        }
        skip_line = None;
        out.push(tok.clone());
    }
    out
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.idx + n)
    }

    fn peek_is(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn peek_at_is(&self, n: usize, text: &str) -> bool {
        self.peek_at(n).is_some_and(|t| t.is(text))
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.idx).cloned();
        if tok.is_some() {
            self.idx += 1;
        }
        tok
    }

    fn full(&self) -> bool {
        self.diags.len() >= MAX_DIAGNOSTICS
    }

    /// Position for errors at the current token, or at the last token on EOF.
    fn here(&self) -> Pos {
        self.peek()
            .or_else(|| self.tokens.last())
            .map(Token::pos)
            .unwrap_or(Pos::START)
    }

    fn error<T>(&mut self, code: DiagnosticCode, pos: Pos, message: impl Into<String>) -> PResult<T> {
        self.diags.push(Diagnostic::error(code, pos, message));
        Err(Abort)
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let pos = self.here();
        let message = match self.peek() {
            Some(tok) => format!("syntax error: expected {expected}, found '{}'", tok.text),
            None => format!("syntax error: expected {expected}, found end of input"),
        };
        self.error(DiagnosticCode::E010, pos, message)
    }

    fn expect(&mut self, text: &str) -> PResult<Token> {
        if self.peek_is(text) {
            Ok(self.bump().expect("peeked"))
        } else {
            self.unexpected(&format!("'{text}'"))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => Ok(self.bump().expect("peeked")),
            _ => self.unexpected(what),
        }
    }

    fn unsupported<T>(&mut self, pos: Pos, what: &str) -> PResult<T> {
        self.error(DiagnosticCode::E005, pos, format!("unsupported construct: {what}"))
    }

    /// Skips to the end of the current statement: past a `;` or a balanced
    /// `{...}` at depth zero, or up to (not past) an unmatched `}`.
    fn recover_statement(&mut self) {
        let mut depth = 0usize;
        while let Some(tok) = self.peek() {
            match tok.text.as_str() {
                "{" | "(" | "[" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                "}" => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        return;
                    }
                }
                ";" if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Top-level recovery: like [`recover_statement`] but also consumes a
    /// stray `}` so the outer loop always makes progress.
    fn recover_top_level(&mut self) {
        let start = self.idx;
        self.recover_statement();
        if self.idx == start {
            self.bump();
        }
    }

    fn program(&mut self) -> ShaderAst {
        let mut ast = ShaderAst::default();
        while self.peek().is_some() && !self.full() {
            match self.top_level_item(&mut ast) {
                Ok(()) => {}
                Err(Abort) => self.recover_top_level(),
            }
        }
        ast
    }

    fn top_level_item(&mut self, ast: &mut ShaderAst) -> PResult<()> {
        let tok = self.peek().expect("caller checked").clone();
        match tok.text.as_str() {
            "precision" => {
                let decl = self.precision_decl()?;
                ast.precision.push(decl);
                Ok(())
            }
            "uniform" | "varying" => {
                let decl = self.global_decl()?;
                ast.globals.push(decl);
                Ok(())
            }
            "attribute" => self.unsupported(tok.pos(), "attribute (fragment shaders read varyings)"),
            "struct" => self.unsupported(tok.pos(), "struct"),
            "invariant" => self.unsupported(tok.pos(), "invariant qualifier"),
            "const" => self.unsupported(
                tok.pos(),
                "global constant (declare constants inside a function)",
            ),
            _ => {
                let func = self.function_or_global_var()?;
                ast.functions.push(func);
                Ok(())
            }
        }
    }

    fn precision_decl(&mut self) -> PResult<PrecisionDecl> {
        let kw = self.expect("precision")?;
        let precision = match self.peek().and_then(|t| Precision::from_keyword(&t.text)) {
            Some(p) => {
                self.bump();
                p
            }
            None => return self.unexpected("precision qualifier (lowp, mediump, highp)"),
        };
        let ty = self.parse_type()?;
        self.expect(";")?;
        Ok(PrecisionDecl { precision, ty, pos: kw.pos() })
    }

    fn skip_precision_qualifier(&mut self) {
        if self.peek().is_some_and(|t| Precision::from_keyword(&t.text).is_some()) {
            self.bump();
        }
    }

    fn global_decl(&mut self) -> PResult<GlobalDecl> {
        let kw = self.bump().expect("caller peeked");
        let storage = if kw.is("uniform") { StorageQualifier::Uniform } else { StorageQualifier::Varying };
        self.skip_precision_qualifier();
        let ty = self.parse_type()?;
        let name = self.expect_ident("identifier")?;
        if self.peek_is("[") {
            let pos = self.here();
            return self.unsupported(pos, "array declarator");
        }
        if self.peek_is("=") {
            let pos = self.here();
            return self.error(
                DiagnosticCode::E010,
                pos,
                format!("syntax error: {} '{}' cannot have an initializer", storage.keyword(), name.text),
            );
        }
        self.expect(";")?;
        Ok(GlobalDecl { storage, ty, pos: name.pos(), name: name.text })
    }

    fn parse_type(&mut self) -> PResult<TypeTag> {
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("type");
        };
        if let Some(ty) = TypeTag::from_keyword(&tok.text) {
            self.bump();
            return Ok(ty);
        }
        if UNSUPPORTED_TYPES.contains(&tok.text.as_str()) {
            return self.unsupported(tok.pos(), &format!("type '{}'", tok.text));
        }
        if tok.is("struct") {
            return self.unsupported(tok.pos(), "struct");
        }
        self.unexpected("type")
    }

    fn function_or_global_var(&mut self) -> PResult<FunctionDef> {
        self.skip_precision_qualifier();
        let return_type = self.parse_type()?;
        let name = self.expect_ident("function name")?;
        if !self.peek_is("(") {
            return self.unsupported(
                name.pos(),
                &format!(
                    "global variable '{}' (only uniform and varying declarations are allowed at global scope)",
                    name.text
                ),
            );
        }
        self.bump();
        let params = self.params()?;
        self.expect(")")?;
        if self.peek_is(";") {
            return self.unsupported(
                name.pos(),
                &format!("function prototype for '{}' (define the function before its first use)", name.text),
            );
        }
        let body = self.block()?;
        Ok(FunctionDef { return_type, pos: name.pos(), name: name.text, params, body })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.peek_is(")") {
            return Ok(params);
        }
        if self.peek_is("void") && self.peek_at_is(1, ")") {
            self.bump();
            return Ok(params);
        }
        loop {
            if let Some(tok) = self.peek().filter(|t| t.is("out") || t.is("inout")).cloned() {
                return self.unsupported(tok.pos(), &format!("'{}' parameter (parameters are passed by value)", tok.text));
            }
            if self.peek_is("const") {
                self.bump();
            }
            if self.peek_is("in") {
                self.bump();
            }
            self.skip_precision_qualifier();
            let ty = self.parse_type()?;
            let name = self.expect_ident("parameter name")?;
            if self.peek_is("[") {
                let pos = self.here();
                return self.unsupported(pos, "array parameter");
            }
            params.push(Param { ty, pos: name.pos(), name: name.text });
            if self.peek_is(",") {
                self.bump();
            } else {
                return Ok(params);
            }
        }
    }

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect("{")?;
        let mut stmts = Vec::new();
        loop {
            if self.full() {
                return Err(Abort);
            }
            match self.peek() {
                None => return self.unexpected("'}'"),
                Some(t) if t.is("}") => {
                    self.bump();
                    return Ok(Block { stmts, pos: open.pos() });
                }
                Some(_) => match self.statement() {
                    Ok(stmt) => stmts.push(stmt),
                    Err(Abort) => self.recover_statement(),
                },
            }
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("statement");
        };
        let pos = tok.pos();
        let word = tok.text.as_str();

        if UNSUPPORTED_STATEMENTS.contains(&word) {
            return self.unsupported(pos, word);
        }
        if UNSUPPORTED_TYPES.contains(&word) {
            return self.unsupported(pos, &format!("type '{word}'"));
        }
        match word {
            "{" => {
                let block = self.block()?;
                Ok(Stmt { kind: StmtKind::Block(block), pos })
            }
            ";" => {
                self.bump();
                Ok(Stmt { kind: StmtKind::Block(Block { stmts: Vec::new(), pos }), pos })
            }
            "if" => self.if_statement(),
            "for" => self.for_statement(),
            "return" => {
                self.bump();
                let value = if self.peek_is(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                Ok(Stmt { kind: StmtKind::Return(value), pos })
            }
            "++" | "--" => self.unsupported(pos, &format!("'{word}' outside a for-loop update")),
            "uniform" | "varying" | "attribute" => {
                self.unsupported(pos, &format!("{word} declaration inside a function"))
            }
            "const" | "lowp" | "mediump" | "highp" => self.declaration(),
            _ if TypeTag::from_keyword(word).is_some() && !self.peek_at_is(1, "(") => self.declaration(),
            _ if tok.kind == TokenKind::Identifier => self.assign_or_expr_statement(),
            _ => {
                let expr = self.expr()?;
                self.expect(";")?;
                Ok(Stmt { kind: StmtKind::Expr(expr), pos })
            }
        }
    }

    fn declaration(&mut self) -> PResult<Stmt> {
        let pos = self.here();
        let is_const = if self.peek_is("const") {
            self.bump();
            true
        } else {
            false
        };
        self.skip_precision_qualifier();
        let ty = self.parse_type()?;
        let mut declarators = Vec::new();
        loop {
            let name = self.expect_ident("variable name")?;
            if self.peek_is("[") {
                let pos = self.here();
                return self.unsupported(pos, "array declarator");
            }
            let init = if self.peek_is("=") {
                self.bump();
                Some(self.expr()?)
            } else {
                None
            };
            declarators.push(Declarator { pos: name.pos(), name: name.text, init });
            if self.peek_is(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(";")?;
        Ok(Stmt { kind: StmtKind::VarDecl(VarDecl { is_const, ty, declarators }), pos })
    }

    fn assign_op(&self) -> Option<AssignOp> {
        Some(match self.peek()?.text.as_str() {
            "=" => AssignOp::Set,
            "+=" => AssignOp::Add,
            "-=" => AssignOp::Sub,
            "*=" => AssignOp::Mul,
            "/=" => AssignOp::Div,
            _ => return None,
        })
    }

    fn assign_or_expr_statement(&mut self) -> PResult<Stmt> {
        let start = self.idx;
        let name = self.bump().expect("caller peeked");
        let pos = name.pos();
        let mut swizzle = None;
        if self.peek_is(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump();
            let sel = self.bump().expect("peeked");
            swizzle = Some(SwizzleSel { pos: sel.pos(), components: sel.text });
        }
        if self.peek_is("[") {
            let p = self.here();
            return self.unsupported(p, "array indexing");
        }
        if let Some(t) = self.peek().filter(|t| t.is("++") || t.is("--")).cloned() {
            return self.unsupported(t.pos(), &format!("'{}' outside a for-loop update", t.text));
        }
        if let Some(op) = self.assign_op() {
            self.bump();
            let value = self.expr()?;
            self.expect(";")?;
            let target = LValue { name: name.text, swizzle, pos };
            return Ok(Stmt { kind: StmtKind::Assign { target, op, value }, pos });
        }
        self.idx = start;
        let expr = self.expr()?;
        if let Some(t) = self.peek().filter(|_| self.assign_op().is_some()).cloned() {
            return self.error(
                DiagnosticCode::E010,
                t.pos(),
                format!("syntax error: '{}' can only assign to a variable or a swizzle of one", t.text),
            );
        }
        self.expect(";")?;
        Ok(Stmt { kind: StmtKind::Expr(expr), pos })
    }

    fn if_statement(&mut self) -> PResult<Stmt> {
        let kw = self.expect("if")?;
        self.expect("(")?;
        let cond = self.expr()?;
        self.expect(")")?;
        let then_branch = Box::new(self.statement()?);
        let else_branch = if self.peek_is("else") {
            self.bump();
            Some(Box::new(self.statement()?))
        } else {
            None
        };
        Ok(Stmt { kind: StmtKind::If { cond, then_branch, else_branch }, pos: kw.pos() })
    }

    fn for_statement(&mut self) -> PResult<Stmt> {
        let kw = self.expect("for")?;
        self.expect("(")?;
        let starts_decl = self.peek().is_some_and(|t| {
            TypeTag::from_keyword(&t.text).is_some()
                || UNSUPPORTED_TYPES.contains(&t.text.as_str())
                || t.is("const")
                || Precision::from_keyword(&t.text).is_some()
        });
        if !starts_decl {
            let pos = self.here();
            return self.unsupported(pos, "for-loop without an 'int' loop variable declaration");
        }
        let init = self.declaration()?;
        let cond = self.expr()?;
        self.expect(";")?;
        let update = self.for_update()?;
        self.expect(")")?;
        let body = self.statement()?;
        Ok(Stmt { kind: StmtKind::For(Box::new(ForLoop { init, cond, update, body })), pos: kw.pos() })
    }

    fn for_update(&mut self) -> PResult<ForUpdate> {
        if let Some(op) = self.peek().filter(|t| t.is("++") || t.is("--")).cloned() {
            self.bump();
            let var = self.expect_ident("loop variable")?;
            let step = if op.is("++") { LoopStep::Increment } else { LoopStep::Decrement };
            return Ok(ForUpdate { pos: var.pos(), var: var.text, step });
        }
        let var = self.expect_ident("loop variable update")?;
        let Some(op) = self.peek().cloned() else {
            return self.unexpected("'++', '--', '+=' or '-='");
        };
        let step = match op.text.as_str() {
            "++" => {
                self.bump();
                LoopStep::Increment
            }
            "--" => {
                self.bump();
                LoopStep::Decrement
            }
            "+=" => {
                self.bump();
                LoopStep::AddAssign(self.expr()?)
            }
            "-=" => {
                self.bump();
                LoopStep::SubAssign(self.expr()?)
            }
            _ => {
                return self.unsupported(
                    op.pos(),
                    "for-loop update (use i++, i--, i += <int> or i -= <int>)",
                )
            }
        };
        Ok(ForUpdate { pos: var.pos(), var: var.text, step })
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let cond = self.binary(2)?;
        if !self.peek_is("?") {
            return Ok(cond);
        }
        let q = self.bump().expect("peeked");
        let then_expr = self.expr()?;
        self.expect(":")?;
        let else_expr = self.expr()?;
        Ok(Expr::new(
            ExprKind::Ternary {
                cond: Box::new(cond),
                then_expr: Box::new(then_expr),
                else_expr: Box::new(else_expr),
            },
            q.pos(),
        ))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let Some(tok) = self.peek().cloned() else { break };
            if tok.kind == TokenKind::Operator && UNSUPPORTED_OPERATORS.contains(&tok.text.as_str()) {
                return self.unsupported(tok.pos(), &format!("operator '{}'", tok.text));
            }
            let Some(op) = BinaryOp::from_symbol(&tok.text).filter(|_| tok.kind == TokenKind::Operator) else {
                break;
            };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, tok.pos());
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("expression");
        };
        let op = match tok.text.as_str() {
            "-" => UnaryOp::Neg,
            "+" => UnaryOp::Plus,
            "!" => UnaryOp::Not,
            "~" => return self.unsupported(tok.pos(), "operator '~'"),
            "++" | "--" => return self.unsupported(tok.pos(), &format!("'{}' outside a for-loop update", tok.text)),
            _ => return self.postfix(),
        };
        self.bump();
        let operand = self.unary()?;
        Ok(Expr::new(ExprKind::Unary { op, operand: Box::new(operand) }, tok.pos()))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        loop {
            let Some(tok) = self.peek().cloned() else { break };
            match tok.text.as_str() {
                "." => {
                    self.bump();
                    let sel = self.expect_ident("swizzle components")?;
                    expr = Expr::new(
                        ExprKind::Swizzle { base: Box::new(expr), components: sel.text.clone() },
                        sel.pos(),
                    );
                }
                "[" => return self.unsupported(tok.pos(), "array indexing"),
                "++" | "--" => {
                    return self.unsupported(tok.pos(), &format!("'{}' outside a for-loop update", tok.text))
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.peek_is(")") {
            self.bump();
            return Ok(args);
        }
        if self.peek_is("void") && self.peek_at_is(1, ")") {
            self.bump();
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.peek_is(",") {
                self.bump();
                continue;
            }
            self.expect(")")?;
            return Ok(args);
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("expression");
        };
        let pos = tok.pos();
        match tok.kind {
            TokenKind::FloatLiteral => {
                self.bump();
                let value: f32 = tok.text.parse().expect("lexer validated float literal");
                Ok(Expr::new(ExprKind::Literal(Literal::Float(value)), pos))
            }
            TokenKind::IntLiteral => {
                self.bump();
                let value: i32 = tok.text.parse().expect("lexer validated int literal");
                Ok(Expr::new(ExprKind::Literal(Literal::Int(value)), pos))
            }
            TokenKind::Identifier => {
                self.bump();
                if self.peek_is("(") {
                    let args = self.call_args()?;
                    Ok(Expr::new(ExprKind::Call { name: tok.text, args }, pos))
                } else {
                    Ok(Expr::new(ExprKind::Var(tok.text), pos))
                }
            }
            TokenKind::Keyword => match tok.text.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::new(ExprKind::Literal(Literal::Bool(tok.is("true"))), pos))
                }
                word if UNSUPPORTED_TYPES.contains(&word) => self.unsupported(pos, &format!("type '{word}'")),
                word => match TypeTag::from_keyword(word) {
                    Some(ty) if self.peek_at_is(1, "(") => {
                        self.bump();
                        let args = self.call_args()?;
                        Ok(Expr::new(ExprKind::Constructor { ty, args }, pos))
                    }
                    _ => self.unexpected("expression"),
                },
            },
            TokenKind::Punctuation if tok.is("(") => {
                self.bump();
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            _ => self.unexpected("expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::token::tokenize;

    fn parse_src(src: &str) -> Result<ShaderAst, Vec<Diagnostic>> {
        parse(&tokenize(src).unwrap())
    }

    const PASSTHROUGH: &str = "uniform sampler2D uMainTex;\nvarying vec2 vUv;\nvoid main(){ gl_FragColor = texture2D(uMainTex, vUv); }";

    #[test]
    fn contract_passthrough() {
        let ast = parse_src(PASSTHROUGH).unwrap();
        assert_eq!(ast.functions.len(), 1);
        assert_eq!(ast.globals.len(), 2);
        assert_eq!(ast.functions[0].body.stmts.len(), 1);
    }

    #[test]
    fn while_is_unsupported() {
        let diags = parse_src("void main(){ while(true){} gl_FragColor = vec4(1.0); }").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::E005);
        assert_eq!(diags[0].message, "unsupported construct: while");
        assert_eq!((diags[0].line, diags[0].col), (1, 14));
    }

    #[test]
    fn unsupported_constructs_are_e005() {
        for src in [
            "void main(){ do { } while(true); }",
            "void main(){ switch(1){ } }",
            "struct S { float a; };",
            "void main(){ float a[3]; }",
            "#version 100\nvoid main(){}",
            "void main(){ discard; }",
            "void main(){ float x = 5.0 % 2.0; }",
            "void f(out float x){ }",
            "void main(){ int i = 0; i++; }",
            "float g;",
            "mat4 m;",
        ] {
            let diags = parse_src(src).unwrap_err();
            assert!(diags.iter().any(|d| d.code == DiagnosticCode::E005), "{src}: {diags:?}");
        }
    }

    #[test]
    fn directive_line_is_dropped() {
        let diags = parse_src("#define X 1.0\nvoid main(){ gl_FragColor = vec4(1.0); }").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!((diags[0].line, diags[0].col), (1, 1));
    }

    #[test]
    fn recovery_collects_several_errors() {
        let src = "void main(){\n float a = ;\n float b = 1.0 +;\n gl_FragColor = vec4(1.0);\n}";
        let diags = parse_src(src).unwrap_err();
        assert_eq!(diags.len(), 2);
        assert_eq!(diags[0].line, 2);
        assert_eq!(diags[1].line, 3);
    }

    #[test]
    fn error_cap() {
        let body: String = (0..30).map(|_| " float a = ;\n").collect();
        let diags = parse_src(&format!("void main(){{\n{body}}}")).unwrap_err();
        assert_eq!(diags.len(), MAX_DIAGNOSTICS);
    }

    #[test]
    fn precedence_is_c_like() {
        let ast = parse_src("void main(){ float x = 1.0 + 2.0 * 3.0 - 4.0; }").unwrap();
        let StmtKind::VarDecl(decl) = &ast.functions[0].body.stmts[0].kind else { panic!() };
        let init = decl.declarators[0].init.as_ref().unwrap();
        // ((1 + (2*3)) - 4)
        let ExprKind::Binary { op: BinaryOp::Sub, lhs, .. } = &init.kind else { panic!("{init:?}") };
        let ExprKind::Binary { op: BinaryOp::Add, rhs, .. } = &lhs.kind else { panic!() };
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::Mul, .. }));
    }

    #[test]
    fn swizzle_assignment() {
        let ast = parse_src("void main(){ gl_FragColor.rgb = vec3(1.0); }").unwrap();
        let StmtKind::Assign { target, .. } = &ast.functions[0].body.stmts[0].kind else { panic!() };
        assert_eq!(target.swizzle.as_ref().unwrap().components, "rgb");
    }

    #[test]
    fn for_loop_outline() {
        let ast = parse_src("void main(){ for (int i = 0; i < 4; i++) { } }").unwrap();
        assert!(matches!(ast.functions[0].body.stmts[0].kind, StmtKind::For(_)));
        assert!(parse_src("void main(){ for (;;) { } }").is_err());
    }

    #[test]
    fn empty_source_parses_to_empty_program() {
        assert_eq!(parse_src("").unwrap(), ShaderAst::default());
    }

    #[test]
    fn missing_semicolon_at_eof_points_at_last_token() {
        let diags = parse_src("void main(){ gl_FragColor = vec4(1.0)").unwrap_err();
        assert_eq!(diags[0].code, DiagnosticCode::E010);
        assert_eq!(diags[0].col, 37);
    }
}
