//! MiniFrag front end: [`validate`] runs lexing, parsing and checking and
//! either returns a [`ValidatedShader`] ready for the interpreter or the
//! diagnostics that explain why the source was rejected.

mod ast;
mod check;
mod contract;
mod diag;
pub mod ir;
mod parser;
mod printer;
mod token;

pub use ast::*;
pub use check::{check, STATEMENT_BUDGET};
pub use contract::{Binding, BindingRole, InterfaceContract};
pub use diag::{Diagnostic, DiagnosticCode, Pos, Severity, MAX_DIAGNOSTICS};
pub use parser::parse;
pub use printer::{print, print_expr};
pub use token::{tokenize, Token, TokenKind};

/// A shader that passed every check, together with its lowered form.
#[derive(Debug, Clone)]
pub struct ValidatedShader {
    source: String,
    ast: ShaderAst,
    program: ir::Program,
}

impl ValidatedShader {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &ShaderAst {
        &self.ast
    }

    pub fn program(&self) -> &ir::Program {
        &self.program
    }

    /// Worst-case statements executed per fragment.
    pub fn statement_bound(&self) -> u64 {
        self.program.statement_bound
    }
}

pub fn validate(source: &str, contract: &InterfaceContract) -> Result<ValidatedShader, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|d| vec![d])?;
    let ast = parse(&tokens)?;
    match check::analyze(&ast, contract) {
        (_, Some(program)) => Ok(ValidatedShader { source: source.to_owned(), ast, program }),
        (diags, None) => Err(diags),
    }
}
