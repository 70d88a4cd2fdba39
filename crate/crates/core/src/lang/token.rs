//! MiniFrag lexer.

use serde::{Deserialize, Serialize};

use super::diag::{Diagnostic, DiagnosticCode, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    FloatLiteral,
    IntLiteral,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub col: u32,
}

impl Token {
    pub fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }
}

/// Every word the lexer classifies as a keyword, supported or not. Words
/// outside the subset still lex as keywords so the parser can reject them
/// with a precise message instead of an undeclared-identifier cascade.
pub const KEYWORDS: &[&str] = &[
    "void", "float", "int", "bool", "vec2", "vec3", "vec4", "mat3", "sampler2D", "uniform",
    "varying", "const", "if", "else", "for", "return", "true", "false", "precision", "lowp",
    "mediump", "highp", "in",
    // recognized but outside the subset
    "while", "do", "switch", "case", "default", "struct", "discard", "break", "continue", "out",
    "inout", "attribute", "mat2", "mat4", "ivec2", "ivec3", "ivec4", "bvec2", "bvec3", "bvec4",
    "samplerCube", "invariant",
];

const OPERATORS_2: &[&str] = &[
    "+=", "-=", "*=", "/=", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "<<", ">>", "^^",
];
const OPERATORS_1: &[char] = &['+', '-', '*', '/', '=', '<', '>', '!', '?', ':', '%', '&', '|', '^', '~'];
const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', '#'];

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }
}

/// Splits `source` into tokens, skipping whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor { chars: source.chars().peekable(), line: 1, col: 1 };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if c == '/' && cur.peek2() == Some('*') {
            cur.bump();
            cur.bump();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                if c == '*' && cur.peek() == Some('/') {
                    cur.bump();
                    closed = true;
                    break;
                }
            }
            if !closed {
                return Err(Diagnostic::error(
                    DiagnosticCode::E010,
                    start,
                    "syntax error: unterminated block comment",
                ));
            }
            continue;
        }

        let push = |tokens: &mut Vec<Token>, kind, text: String| {
            tokens.push(Token { kind, text, line: start.line, col: start.col })
        };

        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                text.push(c);
                cur.bump();
            }
            let kind = if KEYWORDS.contains(&text.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            push(&mut tokens, kind, text);
            continue;
        }

        if c.is_ascii_digit() || (c == '.' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) {
            let (kind, text) = lex_number(&mut cur, start)?;
            push(&mut tokens, kind, text);
            continue;
        }

        if let Some(n) = cur.peek2() {
            let pair: String = [c, n].iter().collect();
            if OPERATORS_2.contains(&pair.as_str()) {
                cur.bump();
                cur.bump();
                push(&mut tokens, TokenKind::Operator, pair);
                continue;
            }
        }
        if OPERATORS_1.contains(&c) {
            cur.bump();
            push(&mut tokens, TokenKind::Operator, c.to_string());
            continue;
        }
        if PUNCTUATION.contains(&c) {
            cur.bump();
            push(&mut tokens, TokenKind::Punctuation, c.to_string());
            continue;
        }

        return Err(Diagnostic::error(
            DiagnosticCode::E010,
            start,
            format!("syntax error: illegal character '{}'", c.escape_default()),
        ));
    }

    Ok(tokens)
}

fn lex_number(cur: &mut Cursor<'_>, start: Pos) -> Result<(TokenKind, String), Diagnostic> {
    let mut text = String::new();
    let mut is_float = false;
    let digits = |cur: &mut Cursor<'_>, text: &mut String| {
        while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
            text.push(d);
            cur.bump();
        }
    };

    digits(cur, &mut text);
    if cur.peek() == Some('.') {
        is_float = true;
        text.push('.');
        cur.bump();
        digits(cur, &mut text);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        is_float = true;
        text.push(cur.bump().unwrap_or('e'));
        if let Some(sign) = cur.peek().filter(|c| *c == '+' || *c == '-') {
            text.push(sign);
            cur.bump();
        }
        let before = text.len();
        digits(cur, &mut text);
        if text.len() == before {
            return Err(bad_number(start, &text));
        }
    }
    // A literal must not run straight into a letter (`1.0f`, `0x1F`, `2u`).
    if let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
        text.push(c);
        return Err(bad_number(start, &text));
    }

    if is_float {
        let value: f32 = text.parse().map_err(|_| bad_number(start, &text))?;
        if !value.is_finite() {
            return Err(Diagnostic::error(
                DiagnosticCode::E010,
                start,
                format!("syntax error: float literal '{text}' is out of range"),
            ));
        }
        Ok((TokenKind::FloatLiteral, text))
    } else {
        if text.len() > 1 && text.starts_with('0') {
            return Err(Diagnostic::error(
                DiagnosticCode::E010,
                start,
                format!("syntax error: integer literal '{text}' has a leading zero (octal is not supported)"),
            ));
        }
        if text.parse::<i32>().is_err() {
            return Err(Diagnostic::error(
                DiagnosticCode::E010,
                start,
                format!("syntax error: integer literal '{text}' is out of range"),
            ));
        }
        Ok((TokenKind::IntLiteral, text))
    }
}

fn bad_number(start: Pos, text: &str) -> Diagnostic {
    Diagnostic::error(
        DiagnosticCode::E010,
        start,
        format!("syntax error: invalid numeric literal '{text}'"),
    )
}
