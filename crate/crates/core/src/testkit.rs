//! Test support shared by the unit, integration and acceptance suites:
//! random images, validity-filtered shader mutants and the pitfall corpus.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::effects;
use crate::eval::Image;
use crate::lang::{
    self, BinaryOp, Diagnostic, DiagnosticCode, Expr, ExprKind, FunctionDef, InterfaceContract, Literal, Param, Pos,
    ShaderAst, Stmt, StmtKind, TypeTag,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Image of random size (1..=max_dim on each side) and random bytes.
pub fn random_image(rng: &mut impl Rng, max_dim: u32) -> Image {
    let w = rng.random_range(1..=max_dim);
    let h = rng.random_range(1..=max_dim);
    let data = (0..w * h * 4).map(|_| rng.random::<u8>()).collect();
    Image::new(w, h, data).expect("sized to match")
}

/// Times worth probing, including non-finite ones.
pub const EDGE_TIMES: [f32; 7] = [0.0, 1.7, -3.25, 12345.678, 1e30, f32::INFINITY, f32::NAN];

/// `count` distinct mutants of the library effects that still validate.
pub fn mutants(seed: u64, count: usize) -> Vec<String> {
    let mut rng = rng(seed);
    let contract = InterfaceContract::default();
    let bases: Vec<ShaderAst> = effects::entries()
        .iter()
        .map(|e| lang::validate(e.source, &contract).expect("library effect validates").ast().clone())
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < count * 200, "mutant generator stalled at {} of {count}", out.len());
        let mut ast = bases.choose(&mut rng).expect("non-empty").clone();
        for _ in 0..rng.random_range(1..=4) {
            mutate(&mut ast, &mut rng);
        }
        let source = lang::print(&ast);
        if lang::validate(&source, &contract).is_ok() && seen.insert(source.clone()) {
            out.push(source);
        }
    }
    out
}

fn lit(x: f32) -> Expr {
    Expr::new(ExprKind::Literal(Literal::Float(x)), Pos::default())
}

fn var(name: &str) -> Expr {
    Expr::new(ExprKind::Var(name.to_owned()), Pos::default())
}

fn call(name: &str, args: Vec<Expr>) -> Expr {
    Expr::new(ExprKind::Call { name: name.to_owned(), args }, Pos::default())
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, Pos::default())
}

fn stmt(kind: StmtKind) -> Stmt {
    Stmt { kind, pos: Pos::default() }
}

fn block(stmts: Vec<Stmt>) -> Stmt {
    stmt(StmtKind::Block(lang::Block { stmts, pos: Pos::default() }))
}

/// Applies one random, possibly type-breaking, edit. Callers filter by validate.
pub fn mutate(ast: &mut ShaderAst, rng: &mut impl Rng) {
    match rng.random_range(0..10) {
        0..=5 => {
            let total: usize = ast.functions.iter().map(|f| count_exprs_block(&f.body.stmts)).sum();
            if total == 0 {
                return;
            }
            let mut target = rng.random_range(0..total);
            for f in &mut ast.functions {
                if visit_block(&mut f.body.stmts, &mut target, &mut |e| mutate_expr(e, rng)) {
                    break;
                }
            }
        }
        6 | 7 => {
            let Some(main) = ast.functions.iter_mut().find(|f| f.name == "main") else { return };
            if main.body.stmts.is_empty() {
                return;
            }
            let i = rng.random_range(0..main.body.stmts.len());
            let original = main.body.stmts[i].clone();
            main.body.stmts[i] = if rng.random_bool(0.5) {
                for_loop(rng.random_range(0..5), block(vec![original]))
            } else {
                let cond = binary(
                    BinaryOp::Lt,
                    Expr::new(ExprKind::Swizzle { base: Box::new(var("vUv")), components: "x".into() }, Pos::default()),
                    lit(rng.random_range(0.0..1.0)),
                );
                stmt(StmtKind::If {
                    cond,
                    then_branch: Box::new(block(vec![original.clone()])),
                    else_branch: Some(Box::new(block(vec![original]))),
                })
            };
        }
        _ => add_helper(ast, rng),
    }
}

fn for_loop(trips: i32, body: Stmt) -> Stmt {
    let init = stmt(StmtKind::VarDecl(lang::VarDecl {
        is_const: false,
        ty: TypeTag::Int,
        declarators: vec![lang::Declarator {
            name: "mutI".into(),
            init: Some(Expr::new(ExprKind::Literal(Literal::Int(0)), Pos::default())),
            pos: Pos::default(),
        }],
    }));
    let cond = binary(BinaryOp::Lt, var("mutI"), Expr::new(ExprKind::Literal(Literal::Int(trips)), Pos::default()));
    stmt(StmtKind::For(Box::new(lang::ForLoop {
        init,
        cond,
        update: lang::ForUpdate { var: "mutI".into(), step: lang::LoopStep::Increment, pos: Pos::default() },
        body,
    })))
}

/// Prepends `float helperN(float x) { ... }` and routes one float literal through it.
fn add_helper(ast: &mut ShaderAst, rng: &mut impl Rng) {
    let name = format!("helper{}", ast.functions.len());
    let k = rng.random_range(0.5f32..2.0);
    let body = vec![stmt(StmtKind::Return(Some(binary(BinaryOp::Mul, var("x"), lit(k)))))];
    let helper = FunctionDef {
        return_type: TypeTag::Float,
        name: name.clone(),
        params: vec![Param { ty: TypeTag::Float, name: "x".into(), pos: Pos::default() }],
        body: lang::Block { stmts: body, pos: Pos::default() },
        pos: Pos::default(),
    };
    let total: usize = ast.functions.iter().map(|f| count_exprs_block(&f.body.stmts)).sum();
    if total > 0 {
        let mut target = rng.random_range(0..total);
        for f in &mut ast.functions {
            let done = visit_block(&mut f.body.stmts, &mut target, &mut |e| {
                if let ExprKind::Literal(Literal::Float(x)) = e.kind {
                    *e = call(&name, vec![lit(x / k)]);
                }
            });
            if done {
                break;
            }
        }
    }
    ast.functions.insert(0, helper);
}

fn mutate_expr(e: &mut Expr, rng: &mut impl Rng) {
    const UNARY: [&str; 8] = ["sin", "cos", "abs", "fract", "floor", "sqrt", "exp", "normalize"];
    let original = e.clone();
    match (&mut e.kind, rng.random_range(0..6)) {
        (ExprKind::Literal(Literal::Float(x)), 0 | 1) => *x *= rng.random_range(0.25f32..4.0),
        (ExprKind::Binary { op, .. }, 0 | 1) if op.is_arithmetic() => {
            *op = *[BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div].choose(rng).expect("non-empty");
        }
        (ExprKind::Swizzle { components, .. }, 0 | 1) => {
            let set = if rng.random_bool(0.5) { "xyzw" } else { "rgba" };
            let len = components.len();
            *components = (0..len).map(|_| set.as_bytes()[rng.random_range(0..4)] as char).collect();
        }
        (_, 2) => *e = call(UNARY.choose(rng).expect("non-empty"), vec![original]),
        (_, 3) => *e = call("clamp", vec![original, lit(0.0), lit(1.0)]),
        (_, 4) => *e = binary(BinaryOp::Div, original, lit(0.0)),
        _ => {
            let cond = binary(BinaryOp::Gt, var("uTime"), lit(rng.random_range(0.0..3.0)));
            *e = Expr::new(
                ExprKind::Ternary {
                    cond: Box::new(cond),
                    then_expr: Box::new(call("mix", vec![original.clone(), original.clone(), lit(0.5)])),
                    else_expr: Box::new(original),
                },
                Pos::default(),
            );
        }
    }
}

fn count_exprs_block(stmts: &[Stmt]) -> usize {
    let mut n = usize::MAX;
    let mut dummy = stmts.to_vec();
    visit_block(&mut dummy, &mut n, &mut |_| {});
    usize::MAX - n
}

/// Visits expressions in pre-order, decrementing `target`; applies `f` to the
/// one reached at zero and returns true once it has.
fn visit_block(stmts: &mut [Stmt], target: &mut usize, f: &mut dyn FnMut(&mut Expr)) -> bool {
    stmts.iter_mut().any(|s| visit_stmt(s, target, f))
}

fn visit_stmt(s: &mut Stmt, target: &mut usize, f: &mut dyn FnMut(&mut Expr)) -> bool {
    match &mut s.kind {
        StmtKind::VarDecl(d) => d.declarators.iter_mut().filter_map(|d| d.init.as_mut()).any(|e| visit_expr(e, target, f)),
        StmtKind::Assign { value, .. } => visit_expr(value, target, f),
        StmtKind::Expr(e) | StmtKind::Return(Some(e)) => visit_expr(e, target, f),
        StmtKind::Return(None) => false,
        StmtKind::If { cond, then_branch, else_branch } => {
            visit_expr(cond, target, f)
                || visit_stmt(then_branch, target, f)
                || else_branch.as_mut().is_some_and(|e| visit_stmt(e, target, f))
        }
        StmtKind::For(l) => visit_stmt(&mut l.body, target, f),
        StmtKind::Block(b) => visit_block(&mut b.stmts, target, f),
    }
}

fn visit_expr(e: &mut Expr, target: &mut usize, f: &mut dyn FnMut(&mut Expr)) -> bool {
    if *target == 0 {
        f(e);
        return true;
    }
    *target -= 1;
    match &mut e.kind {
        ExprKind::Literal(_) | ExprKind::Var(_) => false,
        ExprKind::Swizzle { base, .. } => visit_expr(base, target, f),
        ExprKind::Unary { operand, .. } => visit_expr(operand, target, f),
        ExprKind::Binary { lhs, rhs, .. } => visit_expr(lhs, target, f) || visit_expr(rhs, target, f),
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            visit_expr(cond, target, f) || visit_expr(then_expr, target, f) || visit_expr(else_expr, target, f)
        }
        ExprKind::Call { args, .. } | ExprKind::Constructor { args, .. } => args.iter_mut().any(|a| visit_expr(a, target, f)),
    }
}

/// One malformed shader and what the validator must say about it.
#[derive(Debug, Clone)]
pub struct PitfallCase {
    pub name: String,
    pub source: String,
    pub code: DiagnosticCode,
    /// Text of the offending lexeme; the diagnostic must point inside it.
    pub lexeme: String,
}

/// Loads `*.frag` files whose first line is `// expect: <code> <lexeme>`.
pub fn load_pitfall_corpus(dir: &Path) -> std::io::Result<Vec<PitfallCase>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "frag"))
        .collect();
    paths.sort();
    let mut cases = Vec::new();
    for path in paths {
        let source = std::fs::read_to_string(&path)?;
        let bad = || std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: bad expect header", path.display()));
        let header = source.lines().next().and_then(|l| l.strip_prefix("// expect:")).ok_or_else(bad)?;
        let (code, lexeme) = header.trim().split_once(' ').ok_or_else(bad)?;
        let code = DiagnosticCode::ALL.into_iter().find(|c| c.as_str() == code).ok_or_else(bad)?;
        let lexeme = lexeme.trim().to_owned();
        cases.push(PitfallCase {
            name: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            source,
            code,
            lexeme,
        });
    }
    Ok(cases)
}

/// Ok when the case is rejected with its code at a position inside an
/// occurrence of its lexeme.
pub fn check_pitfall(case: &PitfallCase) -> Result<Diagnostic, String> {
    let diags = match lang::validate(&case.source, &InterfaceContract::default()) {
        Ok(_) => return Err("accepted".into()),
        Err(d) => d,
    };
    let Some(d) = diags.iter().find(|d| d.code == case.code) else {
        let got: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(format!("expected {}, got {got:?}", case.code.as_str()));
    };
    let line: Vec<char> = case.source.lines().nth(d.line as usize - 1).unwrap_or("").chars().collect();
    let lex: Vec<char> = case.lexeme.chars().collect();
    let col = d.col as usize - 1;
    let inside = (0..line.len())
        .filter(|&s| line[s..].starts_with(&lex))
        .any(|s| s <= col && col < s + lex.len());
    if inside {
        Ok(d.clone())
    } else {
        Err(format!("{d} does not point inside '{}'", case.lexeme))
    }
}
