use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use shaderlens_core::effects::{effect_source, list_effects, test_card};
use shaderlens_core::{render_frame, validate, Image, InterfaceContract};
use shaderlens_pipeline::write_fixture_script;
use shaderlens_server::codec::{decode_png, encode_png};

const BIN: &str = env!("CARGO_BIN_EXE_shaderlens");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cmd(args: &[&str]) -> Command {
    let mut c = Command::new(BIN);
    c.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("SHADERLENS_")) {
        c.env_remove(k);
    }
    c
}

fn run(args: &[&str]) -> Output {
    cmd(args).output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8(b.to_vec()).unwrap()
}

fn transcript(out: &Output) -> String {
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", out.status.code().unwrap(), text(&out.stdout), text(&out.stderr))
}

/// Compares against `tests/golden/<name>.txt`; set UPDATE_GOLDEN=1 to rewrite.
fn golden(name: &str, args: &[&str]) {
    let out = transcript(&run(args));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(out, want, "golden {name} differs");
}

fn write_png(path: &Path, img: &Image) {
    std::fs::write(path, encode_png(img)).unwrap();
}

fn read_png(path: &Path) -> Image {
    decode_png(&std::fs::read(path).unwrap()).unwrap()
}

fn fenced(src: &str) -> String {
    format!("```glsl\n{src}```\n")
}

#[test]
fn golden_transcripts() {
    let e003 = data("e003.frag");
    let multi = data("multi.frag");
    golden("effects_list", &["effects", "list"]);
    golden("effects_list_json", &["--json", "effects", "list"]);
    golden("effects_emit_passthrough", &["effects", "emit", "passthrough"]);
    golden("effects_emit_unknown", &["effects", "emit", "sepia"]);
    golden("validate_e003", &["validate", e003.to_str().unwrap()]);
    golden("validate_e003_json", &["--json", "validate", e003.to_str().unwrap()]);
    golden("validate_multi", &["validate", multi.to_str().unwrap()]);
    golden("generate_missing_intent", &["generate"]);
}

#[test]
fn transcripts_are_repeatable() {
    let file = data("multi.frag");
    let args = ["--json", "validate", file.to_str().unwrap()];
    assert_eq!(transcript(&run(&args)), transcript(&run(&args)));
}

#[test]
fn validate_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = tmp.path().join("ok.frag");
    std::fs::write(&ok, effect_source("passthrough").unwrap()).unwrap();
    let out = run(&["validate", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "OK\n");

    let out = run(&["validate", data("e003.frag").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let rows: Vec<_> = text(&out.stderr).lines().filter(|l| l.contains("E003")).map(str::to_owned).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].split_whitespace().take(2).eq(["7", "25"]), "{}", rows[0]);

    assert_eq!(run(&["validate", "/definitely/missing.frag"]).status.code(), Some(3));
}

#[test]
fn help_version_and_bad_arguments() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["generate", "validate", "render", "render-seq", "effects", "store", "serve"] {
        assert!(text(&out.stdout).contains(sub), "help lists {sub}");
    }
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["render", "--help"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(4));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(run(&["render", "--in", "a.png", "--out", "b.png"]).status.code(), Some(4), "shader required");
    assert_eq!(run(&["store", "rm", "not-a-uuid"]).status.code(), Some(4));
    let out = run(&["generate"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(text(&out.stderr).contains("Usage"));
}

#[test]
fn render_identity_and_grayscale() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let pass = dir.join("pass.frag");
    let gray = dir.join("gray.frag");
    std::fs::write(&pass, effect_source("passthrough").unwrap()).unwrap();
    std::fs::write(&gray, effect_source("grayscale").unwrap()).unwrap();

    let photo = Image::from_fn(97, 61, |x, y| [(x * 3) as u8, (y * 4) as u8, (x ^ y) as u8, 255]).unwrap();
    write_png(&dir.join("in.png"), &photo);
    let out = run(&["render", pass.to_str().unwrap(), "--in", dir.join("in.png").to_str().unwrap(), "--out", dir.join("out.png").to_str().unwrap(), "--time", "2.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(read_png(&dir.join("out.png")).data(), photo.data());

    let card = Image::new(2, 2, vec![255, 0, 0, 255, 0, 255, 0, 255, 0, 0, 255, 255, 255, 255, 255, 255]).unwrap();
    write_png(&dir.join("card.png"), &card);
    let out = run(&["--json", "render", gray.to_str().unwrap(), "--in", dir.join("card.png").to_str().unwrap(), "--out", dir.join("g.png").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((doc["width"].as_u64(), doc["height"].as_u64()), (Some(2), Some(2)));
    let g = read_png(&dir.join("g.png"));
    let px: Vec<[u8; 4]> = (0..4).map(|i| g.pixel(i % 2, i / 2)).collect();
    assert_eq!(px, [[54, 54, 54, 255], [182, 182, 182, 255], [18, 18, 18, 255], [255, 255, 255, 255]]);

    let out = run(&["render", data("e003.frag").to_str().unwrap(), "--in", dir.join("card.png").to_str().unwrap(), "--out", dir.join("x.png").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.join("x.png").exists());

    std::fs::write(dir.join("bad.png"), b"nope").unwrap();
    let out = run(&["render", pass.to_str().unwrap(), "--in", dir.join("bad.png").to_str().unwrap(), "--out", dir.join("y.png").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn render_seq_uses_frame_over_fps() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = effect_source("underwater").unwrap();
    std::fs::write(dir.join("u.frag"), src).unwrap();
    write_png(&dir.join("card.png"), &test_card());
    let frames = dir.join("frames");
    let out = run(&[
        "render-seq",
        dir.join("u.frag").to_str().unwrap(),
        "--in",
        dir.join("card.png").to_str().unwrap(),
        "--out-dir",
        frames.to_str().unwrap(),
        "--frames",
        "3",
        "--fps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let shader = validate(src, &InterfaceContract::default()).unwrap();
    for k in 0..3 {
        let want = render_frame(&shader, &test_card(), k as f32 / 4.0).unwrap();
        assert_eq!(read_png(&frames.join(format!("frame_{k:04}.png"))), want, "frame {k}");
    }
    assert!(!frames.join("frame_0003.png").exists());
    assert_eq!(run(&["render-seq", "x.frag", "--in", "a", "--out-dir", "b", "--frames", "1", "--fps", "0"]).status.code(), Some(4));
}

#[test]
fn generate_and_manage_store() {
    let tmp = tempfile::tempdir().unwrap();
    let store = tmp.path().join("store");
    let fx = tmp.path().join("fx");
    write_fixture_script(&fx, &[fenced(effect_source("invert").unwrap())]).unwrap();
    let s = store.to_str().unwrap();

    let out = run(&["generate", "invert everything", "--mock", fx.to_str().unwrap(), "--store", s]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let mut lines = stdout.lines();
    let id = lines.next().unwrap().to_owned();
    let path = PathBuf::from(lines.next().unwrap());
    uuid::Uuid::parse_str(&id).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), effect_source("invert").unwrap().trim_end());

    let list: Value = serde_json::from_slice(&run(&["--json", "store", "list", "--store", s]).stdout).unwrap();
    assert_eq!(list[0]["id"], id.as_str());
    assert_eq!(list[0]["saved"], false);
    assert_eq!(run(&["store", "save", &id, "--store", s]).status.code(), Some(0));
    let list: Value = serde_json::from_slice(&run(&["--json", "store", "list", "--store", s]).stdout).unwrap();
    assert_eq!(list[0]["saved"], true);
    assert!(text(&run(&["store", "list", "--store", s]).stdout).contains("invert everything"));

    write_png(&tmp.path().join("c.png"), &test_card());
    let out = run(&["render", "--id", &id, "--store", s, "--in", tmp.path().join("c.png").to_str().unwrap(), "--out", tmp.path().join("o.png").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(read_png(&tmp.path().join("o.png")).pixel(4, 4), [0, 255, 255, 255]);

    assert_eq!(run(&["store", "rm", &id, "--store", s]).status.code(), Some(0));
    assert_eq!(run(&["store", "rm", &id, "--store", s]).status.code(), Some(3));
    assert_eq!(run(&["store", "save", &id, "--store", s]).status.code(), Some(3));
}

#[test]
fn generate_exhaustion_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = tmp.path().join("fx");
    let broken = std::fs::read_to_string(data("e003.frag")).unwrap();
    write_fixture_script(&fx, &[fenced(&broken), fenced(&broken), fenced(&broken)]).unwrap();
    let store = tmp.path().join("store");
    let args = ["generate", "x", "--mock", fx.to_str().unwrap(), "--store", store.to_str().unwrap()];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = text(&out.stderr);
    assert!(err.contains("after 3 attempts") && err.contains("E003"), "{err}");

    let mut json_args = vec!["--json"];
    json_args.extend(args);
    let out = run(&json_args);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], "generation_failed");
    assert_eq!(doc["diagnostics"][0]["code"], "E003");

    let out = run(&["generate", "x", "--mock", fx.to_str().unwrap(), "--store", store.to_str().unwrap(), "--max-attempts", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("after 1 attempts"));
}

#[test]
fn json_mode_prints_one_document() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["--json", "effects", "list"],
        vec!["--json", "effects", "emit", "keep_green"],
        vec!["--json", "effects", "emit", "nope"],
        vec!["--json", "validate", "/missing.frag"],
        vec!["--json", "store", "list", "--store", s],
        vec!["--json", "store", "rm", "6f1c2a9e-1111-4222-8333-444455556666", "--store", s],
    ];
    for args in cases {
        let out = run(&args);
        let stdout = text(&out.stdout);
        let mut docs = serde_json::Deserializer::from_str(&stdout).into_iter::<Value>();
        assert!(docs.next().unwrap().is_ok(), "{args:?}: {stdout}");
        assert!(docs.next().is_none(), "{args:?}: more than one document");
    }
    let emitted: Value = serde_json::from_slice(&run(&["--json", "effects", "emit", "keep_green"]).stdout).unwrap();
    assert_eq!(emitted["source"], effect_source("keep_green").unwrap());
    let listed: Value = serde_json::from_slice(&run(&["--json", "effects", "list"]).stdout).unwrap();
    let names: Vec<_> = listed.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, list_effects());
}

#[test]
fn config_file_is_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = tmp.path().join("fx");
    write_fixture_script(&fx, &[fenced(effect_source("grayscale").unwrap())]).unwrap();
    let cfg = tmp.path().join("shaderlens.toml");
    let store = tmp.path().join("from-config");
    std::fs::write(
        &cfg,
        format!("store = {:?}\n[provider]\nkind = \"mock\"\nfixtures = {:?}\n", store.to_str().unwrap(), fx.to_str().unwrap()),
    )
    .unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "generate", "gray"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(std::fs::read_dir(&store).unwrap().count(), 1);

    std::fs::write(&cfg, "nonsense = true\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "effects", "list"]).status.code(), Some(4));
    let out = cmd(&["--store", tmp.path().to_str().unwrap(), "generate", "x"]).env("SHADERLENS_PROVIDER", "mock").output().unwrap();
    assert_eq!(out.status.code(), Some(4), "mock without fixtures is a bad argument");
}

#[test]
fn serve_answers_shader_listing() {
    let tmp = tempfile::tempdir().unwrap();
    let mut child = cmd(&["serve", "--port", "0", "--store", tmp.path().to_str().unwrap()])
        .stderr(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let base = line.trim().strip_prefix("listening on ").unwrap_or_else(|| panic!("{line}")).to_owned();
    let rt = tokio::runtime::Runtime::new().unwrap();
    let (status, body) = rt.block_on(async {
        let r = reqwest::get(format!("{base}/api/shaders")).await.unwrap();
        (r.status(), r.text().await.unwrap())
    });
    let _ = child.kill();
    let _ = child.wait();
    assert_eq!(status, 200);
    assert_eq!(body, "[]");
}
