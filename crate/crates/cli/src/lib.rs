//! The `shaderlens` command. [`run`] parses arguments, executes one
//! command and returns the process exit status; output goes to the given
//! writers so the whole CLI can be driven in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use shaderlens_core::effects::{entries, entry};
use shaderlens_core::{render_frame, validate, Diagnostic, InterfaceContract, ValidatedShader};
use shaderlens_pipeline::{generator_from_config, Config, GenerationError, Store, StoreError};
use shaderlens_server::codec::{decode_png, encode_png};
use uuid::Uuid;

/// Stable exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION_FAILED: i32 = 1;
    pub const GENERATION_FAILED: i32 = 2;
    pub const IO_ERROR: i32 = 3;
    pub const BAD_ARGUMENTS: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "shaderlens", version, about = "Generate, check and render MiniFrag shaders")]
struct Cli {
    /// Print a single JSON document on stdout; human text goes to stderr.
    #[arg(long, global = true)]
    json: bool,
    /// TOML config file (SHADERLENS_* variables override it).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Artifact store directory.
    #[arg(long, global = true, value_name = "DIR")]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a shader from a description and store it.
    Generate {
        intent: String,
        /// Replay numbered responses from this directory instead of calling an LLM.
        #[arg(long, value_name = "FIXDIR")]
        mock: Option<PathBuf>,
        #[arg(long)]
        max_attempts: Option<u32>,
    },
    /// Check a shader file and print its diagnostics.
    Validate { file: PathBuf },
    /// Render one frame.
    Render {
        #[command(flatten)]
        shader: ShaderArg,
        #[arg(long = "in", value_name = "PNG")]
        input: PathBuf,
        #[arg(long = "out", value_name = "PNG")]
        output: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        time: f32,
    },
    /// Render frames 0..N at time = frame / fps into a directory.
    RenderSeq {
        #[command(flatten)]
        shader: ShaderArg,
        #[arg(long = "in", value_name = "PNG")]
        input: PathBuf,
        #[arg(long = "out-dir", value_name = "DIR")]
        out_dir: PathBuf,
        #[arg(long)]
        frames: u32,
        #[arg(long)]
        fps: f32,
    },
    /// Built-in effect library.
    Effects {
        #[command(subcommand)]
        action: EffectsAction,
    },
    /// Manage stored artifacts.
    Store {
        #[command(subcommand)]
        action: StoreAction,
    },
    /// Run the HTTP server.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, value_name = "FIXDIR")]
        mock: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ShaderArg {
    /// Shader source file.
    file: Option<PathBuf>,
    /// Stored artifact id.
    #[arg(long)]
    id: Option<Uuid>,
}

#[derive(Debug, Subcommand)]
enum EffectsAction {
    List,
    Emit { name: String },
}

#[derive(Debug, Subcommand)]
enum StoreAction {
    List,
    Save { id: Uuid },
    Rm { id: Uuid },
}

/// A failed command: exit status, message and any diagnostics to report.
#[derive(Debug)]
struct Failure {
    status: i32,
    kind: &'static str,
    message: String,
    diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn new(status: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { status, kind, message: message.into(), diagnostics: Vec::new() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure::new(exit::IO_ERROR, "io_error", message)
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(exit::BAD_ARGUMENTS, "bad_arguments", message)
    }

    fn invalid(diagnostics: Vec<Diagnostic>) -> Self {
        let n = diagnostics.len();
        Failure { diagnostics, ..Failure::new(exit::VALIDATION_FAILED, "validation_failed", format!("{n} diagnostic(s)")) }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::io(e.to_string())
    }
}

/// What a successful command reports: text for humans and a JSON document.
struct Report {
    human: String,
    json: Value,
}

type CmdResult = Result<Report, Failure>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::BAD_ARGUMENTS,
            };
            let text = e.render().to_string();
            let _ = if status == exit::SUCCESS { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return status;
        }
    };
    let json_mode = cli.json;
    match execute(cli, err) {
        Ok(report) => {
            let _ = if json_mode {
                writeln!(out, "{}", report.json)
            } else {
                out.write_all(report.human.as_bytes())
            };
            exit::SUCCESS
        }
        Err(f) => {
            if json_mode {
                let doc = json!({
                    "error": { "kind": f.kind, "message": f.message },
                    "diagnostics": f.diagnostics,
                });
                let _ = writeln!(out, "{doc}");
            }
            let _ = writeln!(err, "error: {}", f.message);
            if !f.diagnostics.is_empty() {
                let _ = err.write_all(diagnostics_table(&f.diagnostics).as_bytes());
            }
            f.status
        }
    }
}

/// One row per diagnostic, sorted by position.
pub fn diagnostics_table(diags: &[Diagnostic]) -> String {
    let mut sorted = diags.to_vec();
    sorted.sort_by_key(|d| (d.line, d.col));
    let mut s = format!("{:>5} {:>4}  {:<5} {}\n", "LINE", "COL", "CODE", "MESSAGE");
    for d in &sorted {
        s.push_str(&format!("{:>5} {:>4}  {:<5} {}\n", d.line, d.col, d.code.as_str(), d.message));
    }
    s
}

fn execute(cli: Cli, err: &mut dyn Write) -> CmdResult {
    let mut cfg = Config::load(cli.config.as_deref()).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(store) = cli.store {
        cfg.store = store;
    }
    match cli.command {
        Command::Generate { intent, mock, max_attempts } => {
            if let Some(dir) = mock {
                cfg.use_mock(dir);
            }
            if let Some(n) = max_attempts {
                cfg.max_attempts = n;
            }
            generate(&cfg, &intent, err)
        }
        Command::Validate { file } => validate_file(&file),
        Command::Render { shader, input, output, time } => {
            let shader = load_shader(&cfg, &shader)?;
            let img = render_one(&shader, &read_png(&input)?, time)?;
            write_png(&output, &img)?;
            Ok(Report {
                human: format!("wrote {} ({}x{})\n", output.display(), img.width(), img.height()),
                json: json!({ "output": output, "width": img.width(), "height": img.height(), "time": time }),
            })
        }
        Command::RenderSeq { shader, input, out_dir, frames, fps } => {
            if !(fps.is_finite() && fps > 0.0) {
                return Err(Failure::usage(format!("--fps must be positive, got {fps}")));
            }
            let shader = load_shader(&cfg, &shader)?;
            let src = read_png(&input)?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Failure::io(format!("{}: {e}", out_dir.display())))?;
            let mut written = Vec::new();
            for frame in 0..frames {
                let img = render_one(&shader, &src, frame as f32 / fps)?;
                let path = out_dir.join(format!("frame_{frame:04}.png"));
                write_png(&path, &img)?;
                written.push(path);
            }
            Ok(Report {
                human: format!("wrote {frames} frames to {}\n", out_dir.display()),
                json: json!({ "frames": written, "fps": fps }),
            })
        }
        Command::Effects { action: EffectsAction::List } => {
            let list = entries();
            let human = list.iter().map(|e| format!("{:<12} {}\n", e.name, e.title)).collect();
            let json = list.iter().map(|e| json!({ "name": e.name, "title": e.title, "tags": e.tags })).collect();
            Ok(Report { human, json: Value::Array(json) })
        }
        Command::Effects { action: EffectsAction::Emit { name } } => {
            let e = entry(&name).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(Report { human: e.source.to_owned(), json: json!({ "name": e.name, "source": e.source }) })
        }
        Command::Store { action } => store_command(&cfg, action),
        Command::Serve { port, mock } => {
            if let Some(dir) = mock {
                cfg.use_mock(dir);
            }
            if let Some(p) = port {
                cfg.bind.set_port(p);
            }
            serve(&cfg, err)
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    tokio::runtime::Runtime::new().map_err(|e| Failure::io(format!("starting runtime: {e}")))
}

fn generate(cfg: &Config, intent: &str, err: &mut dyn Write) -> CmdResult {
    if intent.trim().is_empty() {
        return Err(Failure::usage("intent must not be blank"));
    }
    let generator = generator_from_config(cfg).map_err(|e| Failure::usage(e.to_string()))?;
    let store = Store::open(&cfg.store)?;
    let (job, result) = runtime()?.block_on(generator.generate(intent, &store));
    let snap = job.snapshot();
    let _ = writeln!(err, "job {} {} after {} attempt(s), {:.1} ms", snap.id, snap.status.as_str(), snap.attempt, snap.total_ms);
    match result {
        Ok(a) => {
            let path = store.root().join(a.id.to_string()).join(shaderlens_pipeline::store::SOURCE_FILE);
            Ok(Report {
                human: format!("{}\n{}\n", a.id, path.display()),
                json: json!({
                    "id": a.id,
                    "source_path": path,
                    "title": a.title,
                    "attempts_used": a.attempts_used,
                    "job": snap,
                }),
            })
        }
        Err(GenerationError::GenerationFailed { attempts, diagnostics }) => Err(Failure {
            diagnostics,
            ..Failure::new(exit::GENERATION_FAILED, "generation_failed", format!("generation failed after {attempts} attempts"))
        }),
        Err(GenerationError::Store(e)) => Err(e.into()),
        Err(e) => Err(Failure::new(exit::GENERATION_FAILED, "generation_failed", e.to_string())),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn validate_file(path: &Path) -> CmdResult {
    let source = read_text(path)?;
    match validate(&source, &InterfaceContract::default()) {
        Ok(shader) => Ok(Report {
            human: "OK\n".to_owned(),
            json: json!({ "file": path, "ok": true, "diagnostics": [], "statement_bound": shader.statement_bound() }),
        }),
        Err(diags) => Err(Failure::invalid(diags)),
    }
}

fn load_shader(cfg: &Config, arg: &ShaderArg) -> Result<ValidatedShader, Failure> {
    let source = match (&arg.file, arg.id) {
        (Some(file), _) => read_text(file)?,
        (None, Some(id)) => Store::open(&cfg.store)?.load(id)?.source,
        (None, None) => return Err(Failure::usage("a shader file or --id is required")),
    };
    validate(&source, &InterfaceContract::default()).map_err(Failure::invalid)
}

fn read_png(path: &Path) -> Result<shaderlens_core::Image, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    decode_png(&bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write_png(path: &Path, img: &shaderlens_core::Image) -> Result<(), Failure> {
    std::fs::write(path, encode_png(img)).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn render_one(shader: &ValidatedShader, img: &shaderlens_core::Image, time: f32) -> Result<shaderlens_core::Image, Failure> {
    render_frame(shader, img, time).map_err(|e| Failure::new(exit::VALIDATION_FAILED, "render_failed", e.to_string()))
}

fn store_command(cfg: &Config, action: StoreAction) -> CmdResult {
    let store = Store::open(&cfg.store)?;
    match action {
        StoreAction::List => {
            let list = store.list()?;
            let human = list
                .iter()
                .map(|s| {
                    let flag = if s.saved { "saved" } else { "-" };
                    format!("{}  {:<5}  {}  {}\n", s.id, flag, s.created_at.to_rfc3339(), s.title)
                })
                .collect();
            Ok(Report { human, json: serde_json::to_value(list).expect("summaries serialize") })
        }
        StoreAction::Save { id } => {
            let a = store.mark_saved(id)?;
            Ok(Report { human: format!("saved {id}\n"), json: json!({ "id": a.id, "saved": a.saved }) })
        }
        StoreAction::Rm { id } => {
            store.delete(id)?;
            Ok(Report { human: format!("removed {id}\n"), json: json!({ "id": id, "removed": true }) })
        }
    }
}

fn serve(cfg: &Config, err: &mut dyn Write) -> CmdResult {
    let rt = runtime()?;
    let addr = rt.block_on(async {
        let server = shaderlens_server::Server::bind(cfg).await.map_err(|e| match e {
            shaderlens_server::ServerError::Bind { .. } | shaderlens_server::ServerError::Store(_) => Failure::io(e.to_string()),
            other => Failure::usage(other.to_string()),
        })?;
        let addr = server.local_addr();
        let _ = writeln!(err, "listening on http://{addr}");
        let _ = err.flush();
        server
            .run_until(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Failure::io(e.to_string()))?;
        Ok::<_, Failure>(addr)
    })?;
    Ok(Report { human: String::new(), json: json!({ "stopped": addr.to_string() }) })
}
