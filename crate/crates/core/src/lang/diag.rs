use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of diagnostics collected in one validation run.
pub const MAX_DIAGNOSTICS: usize = 10;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub const START: Pos = Pos { line: 1, col: 1 };

    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// The fixed diagnostic catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    /// Missing `void main()` entry point.
    E001,
    /// `gl_FragColor` is never written from main's call graph.
    E002,
    /// Undeclared identifier.
    E003,
    /// Type mismatch.
    E004,
    /// Construct outside the MiniFrag subset.
    E005,
    /// Invalid swizzle.
    E006,
    /// Constructor arity or shape.
    E007,
    /// Uniform or varying outside the interface contract.
    E008,
    /// Recursion, direct or mutual.
    E009,
    /// Syntax error.
    E010,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 10] = [
        DiagnosticCode::E001,
        DiagnosticCode::E002,
        DiagnosticCode::E003,
        DiagnosticCode::E004,
        DiagnosticCode::E005,
        DiagnosticCode::E006,
        DiagnosticCode::E007,
        DiagnosticCode::E008,
        DiagnosticCode::E009,
        DiagnosticCode::E010,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::E001 => "E001",
            DiagnosticCode::E002 => "E002",
            DiagnosticCode::E003 => "E003",
            DiagnosticCode::E004 => "E004",
            DiagnosticCode::E005 => "E005",
            DiagnosticCode::E006 => "E006",
            DiagnosticCode::E007 => "E007",
            DiagnosticCode::E008 => "E008",
            DiagnosticCode::E009 => "E009",
            DiagnosticCode::E010 => "E010",
        }
    }

    /// One-line description of what the code catches.
    pub fn summary(self) -> &'static str {
        match self {
            DiagnosticCode::E001 => "missing entry point `void main()`",
            DiagnosticCode::E002 => "gl_FragColor is never assigned",
            DiagnosticCode::E003 => "undeclared identifier",
            DiagnosticCode::E004 => "type mismatch",
            DiagnosticCode::E005 => "unsupported construct",
            DiagnosticCode::E006 => "invalid swizzle",
            DiagnosticCode::E007 => "constructor arity or shape",
            DiagnosticCode::E008 => "uniform or varying outside the interface contract",
            DiagnosticCode::E009 => "recursion",
            DiagnosticCode::E010 => "syntax error",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub line: u32,
    pub col: u32,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            line: pos.line.max(1),
            col: pos.col.max(1),
            severity: Severity::Error,
        }
    }

    pub fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }
}

impl fmt::Display for Diagnostic {
    /// `line L, col C: [Ecode] message`, the form used in repair prompts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}: [{}] {}", self.line, self.col, self.code, self.message)
    }
}

/// Sorts by position (stable for equal positions) and applies the cap.
pub(crate) fn finish(mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    diags.sort_by_key(|d| (d.line, d.col));
    diags.dedup();
    diags.truncate(MAX_DIAGNOSTICS);
    diags
}
