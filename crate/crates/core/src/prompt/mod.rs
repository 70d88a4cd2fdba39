//! Prompt assembly. Templates are plain text with `{{placeholder}}` slots;
//! the built-in set can be overridden file by file from a directory.

use std::path::Path;

use thiserror::Error;

use crate::effects::{self, EffectEntry};
use crate::lang::ir::Builtin;
use crate::lang::{Diagnostic, DiagnosticCode, InterfaceContract};

/// Upper bound on the default system prompt, in bytes.
pub const SYSTEM_PROMPT_LIMIT: usize = 16 * 1024;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("at least one few-shot example is required")]
    EmptyFewshot,
    #[error("intent is blank")]
    BlankIntent,
    #[error("a repair prompt needs at least one diagnostic")]
    NoDiagnostics,
    #[error("reading prompt template {path}: {source}")]
    Template { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
    /// 1 for the initial request, then one more per repair round.
    pub attempt: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    pub system: String,
    pub user: String,
    pub repair: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            system: include_str!("templates/system.txt").to_owned(),
            user: include_str!("templates/user.txt").to_owned(),
            repair: include_str!("templates/repair.txt").to_owned(),
        }
    }
}

impl PromptTemplates {
    /// Built-in templates, with `system.txt`, `user.txt` and `repair.txt`
    /// replaced by the files of the same name in `dir` when present.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut t = PromptTemplates::default();
        for (file, slot) in [("system.txt", &mut t.system), ("user.txt", &mut t.user), ("repair.txt", &mut t.repair)] {
            let path = dir.join(file);
            match std::fs::read_to_string(&path) {
                Ok(text) => *slot = text,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(source) => return Err(PromptError::Template { path: path.display().to_string(), source }),
            }
        }
        Ok(t)
    }

    pub fn system_prompt(
        &self,
        contract: &InterfaceContract,
        fewshot: &[&EffectEntry],
        pitfalls: &[String],
    ) -> Result<String, PromptError> {
        if fewshot.is_empty() {
            return Err(PromptError::EmptyFewshot);
        }
        let pitfalls = pitfalls.iter().map(|p| format!("- {p}")).collect::<Vec<_>>().join("\n");
        let examples = fewshot
            .iter()
            .map(|e| format!("### {} ({})\n\n```glsl\n{}```", e.title, e.name, with_newline(e.source)))
            .collect::<Vec<_>>()
            .join("\n\n");
        Ok(fill(
            &self.system,
            &[
                ("contract", &describe_contract(contract)),
                ("subset", &subset_summary()),
                ("pitfalls", &pitfalls),
                ("examples", &examples),
            ],
        ))
    }

    pub fn user_prompt(&self, intent: &str) -> Result<String, PromptError> {
        let intent = intent.trim();
        if intent.is_empty() {
            return Err(PromptError::BlankIntent);
        }
        Ok(fill(&self.user, &[("intent", intent)]))
    }

    pub fn repair_prompt(&self, previous_source: &str, diagnostics: &[Diagnostic]) -> Result<String, PromptError> {
        if diagnostics.is_empty() {
            return Err(PromptError::NoDiagnostics);
        }
        let mut sorted = diagnostics.to_vec();
        sorted.sort_by_key(|d| (d.line, d.col));
        let lines = sorted.iter().map(|d| format!("- {d}")).collect::<Vec<_>>().join("\n");
        Ok(fill(&self.repair, &[("source", previous_source.trim_end_matches('\n')), ("diagnostics", &lines)]))
    }
}

fn with_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_owned()
    } else {
        format!("{s}\n")
    }
}

/// Substitutes `{{key}}` slots in one pass, so inserted text is never
/// rescanned. Unknown slots are left as written.
fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find("}}") {
            Some(end) => {
                let key = after[..end].trim();
                match vars.iter().find(|(k, _)| *k == key) {
                    Some((_, v)) => out.push_str(v),
                    None => out.push_str(&rest[start..start + 2 + end + 2]),
                }
                rest = &after[end + 2..];
            }
            None => {
                out.push_str(&rest[start..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn describe_contract(contract: &InterfaceContract) -> String {
    let mut lines = Vec::new();
    for u in &contract.uniforms {
        lines.push(format!("- `uniform {} {};` {}", u.ty, u.name, u.description));
    }
    for v in &contract.varyings {
        lines.push(format!("- `varying {} {};` {}", v.ty, v.name, v.description));
    }
    lines.push(format!(
        "- `{}` ({}) is the {}. Assign it at least once in main; never read it.",
        contract.output.name, contract.output.ty, contract.output.description
    ));
    lines.join("\n")
}

fn subset_summary() -> String {
    let builtins = Builtin::ALL.iter().map(|b| b.name()).collect::<Vec<_>>().join(", ");
    format!(
        "- Optional `precision mediump float;`, then uniform/varying declarations, then functions. The entry point is `void main()`.\n\
         - Types: float, int, bool, vec2, vec3, vec4, mat3; sampler2D only for the uMainTex uniform.\n\
         - Statements: local declarations (optionally const), assignment with = += -= *= /= to a variable or a swizzle of it, \
           expression statements, if/else, for, return, blocks.\n\
         - for-loops must look like `for (int i = 0; i < 8; i++)`: an int loop variable, integer literal start and bound, \
           < or <=, and i++, i--, i += <int> or i -= <int>. The body must not assign the loop variable.\n\
         - Expressions: literals, variables, swizzles (.xyzw or .rgba, up to 4 components), + - * / with float-vector broadcasting, \
           comparisons on scalars, == !=, && || !, ?:, function calls and constructors (float, int, bool, vec2, vec3, vec4, mat3).\n\
         - Built-ins: {builtins}; texture2D(uMainTex, vec2) returns vec4; mat3 * vec3 returns vec3. mat3 is column-major.\n\
         - Helper functions are allowed if defined above their first use; parameters are passed by value; no recursion.\n\
         - Not available: while, do, switch, break, continue, discard, struct, arrays, #define or any preprocessor directive, \
           ++ or -- outside a for update, implicit int-to-float conversion."
    )
}

/// Prose form of the diagnostic catalog.
pub fn default_pitfalls() -> Vec<String> {
    DiagnosticCode::ALL
        .iter()
        .map(|code| {
            let text = match code {
                DiagnosticCode::E001 => "Forgetting the entry point: the shader must define exactly `void main()` with no parameters.",
                DiagnosticCode::E002 => "Never writing the output: main (or a function it calls) must assign gl_FragColor.",
                DiagnosticCode::E003 => "Using a name that is not declared above its use, including helper functions defined after their caller and GLSL built-ins outside the list (such as atan or texture).",
                DiagnosticCode::E004 => "Mixing types: write 1.0 not 1 in float math, assign vec4 to gl_FragColor, match argument types of built-ins, and return a value on every path.",
                DiagnosticCode::E005 => "Using unsupported constructs: while/do loops, loops with non-literal bounds, arrays, structs, discard, #define, or reading gl_FragColor.",
                DiagnosticCode::E006 => "Bad swizzles: mixing sets like .xg, selecting components the vector lacks like .z on a vec2, or more than 4 components.",
                DiagnosticCode::E007 => "Wrong constructor arguments: vec3 needs 1 or 3 scalars (or vec2 + float), vec4 needs e.g. vec3 + float, and no argument may be left over.",
                DiagnosticCode::E008 => "Declaring uniforms or varyings outside the contract, or with the wrong type (uTime is float, uResolution is vec2, vUv is vec2).",
                DiagnosticCode::E009 => "Recursion: a function may not call itself directly or through other functions.",
                DiagnosticCode::E010 => "Syntax errors: missing semicolons or braces, float suffixes like 1.0f, and extra text or markdown inside the shader.",
            };
            format!("[{}] {text}", code.as_str())
        })
        .collect()
}

/// The default few-shot pair: passthrough and grayscale.
pub fn default_fewshot() -> Vec<&'static EffectEntry> {
    ["passthrough", "grayscale"]
        .into_iter()
        .map(|n| effects::entry(n).expect("bundled effect"))
        .collect()
}

pub fn build_system_prompt(
    contract: &InterfaceContract,
    fewshot: &[&EffectEntry],
    pitfalls: &[String],
) -> Result<String, PromptError> {
    PromptTemplates::default().system_prompt(contract, fewshot, pitfalls)
}

pub fn default_system_prompt() -> String {
    build_system_prompt(&InterfaceContract::default(), &default_fewshot(), &default_pitfalls())
        .expect("default few-shot set is non-empty")
}

pub fn build_user_prompt(intent: &str) -> Result<String, PromptError> {
    PromptTemplates::default().user_prompt(intent)
}

pub fn build_repair_prompt(previous_source: &str, diagnostics: &[Diagnostic]) -> Result<String, PromptError> {
    PromptTemplates::default().repair_prompt(previous_source, diagnostics)
}
