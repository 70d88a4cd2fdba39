//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs offline against mock providers and loopback only.

use std::collections::HashMap;
use std::io::Cursor;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use reqwest::multipart::{Form, Part};
use reqwest::{Client, Method, StatusCode};
use serde_json::{json, Value};
use shaderlens_core::effects::{effect_source, entries, oracle_render, test_card};
use shaderlens_core::eval::{eval_fragment, render_frame_with_threads, UniformSet};
use shaderlens_core::prompt::PromptTemplates;
use shaderlens_core::testkit::{check_pitfall, load_pitfall_corpus, mutants, random_image, rng, EDGE_TIMES};
use shaderlens_core::{render_frame, validate, DiagnosticCode, Image, InterfaceContract};
use shaderlens_pipeline::{
    write_fixture_script, Config, GenerationError, Generator, JobHandle, JobQueue, JobStatus, LlmClient, ProviderConfig,
    ShaderArtifact, Store,
};
use shaderlens_server::codec::{decode_png, encode_png};
use shaderlens_server::{ApiError, Server};

/// Per-channel tolerance against the closed-form oracles.
const BYTE_TOL: u8 = 1;
/// Wall-clock budget for the full oracle sweep.
const ORACLE_BUDGET: Duration = Duration::from_secs(5);
/// Wall-clock budget for one offline `generate` invocation.
const E2E_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_TIMES: [f32; 2] = [0.0, 1.7];
const MUTANT_COUNT: usize = 100;
const MIN_PITFALLS: usize = 20;

const BIN: &str = env!("CARGO_BIN_EXE_shaderlens");
const PITFALL_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/pitfalls");

const BROKEN_E003: &str = "precision mediump float;
uniform sampler2D uMainTex;
varying vec2 vUv;
void main() {
    gl_FragColor = vec4(col.rgb, 1.0);
}
";

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("passthrough identity", passthrough_identity),
        ("pitfall corpus", pitfall_corpus),
        ("repair loop", repair_loop),
        ("end-to-end offline", end_to_end_offline),
        ("api contract", api_contract),
        ("determinism and concurrency", determinism_and_concurrency),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn max_delta(a: &Image, b: &Image) -> u8 {
    a.data().iter().zip(b.data()).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}

fn fenced(src: &str) -> String {
    format!("Here is your shader.\n\n```glsl\n{src}```\n")
}

fn generator(fixtures: &Path, max_attempts: u32) -> Generator {
    Generator::new(LlmClient::new(ProviderConfig::mock(fixtures)).unwrap(), PromptTemplates::default(), max_attempts).unwrap()
}

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap()
}

fn cli(args: &[&str]) -> std::process::Output {
    let mut c = Command::new(BIN);
    c.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("SHADERLENS_")) {
        c.env_remove(k);
    }
    c.output().unwrap()
}

fn oracle_equivalence() -> Outcome {
    let card = test_card();
    let start = Instant::now();
    let mut worst = 0;
    for e in entries() {
        let shader = validate(e.source, &InterfaceContract::default()).map_err(|d| format!("{}: {d:?}", e.name))?;
        for t in ORACLE_TIMES {
            let got = render_frame(&shader, &card, t).map_err(|err| format!("{} t={t}: {err}", e.name))?;
            let want = oracle_render(e.name, &card, t as f64).map_err(|err| err.to_string())?;
            let d = max_delta(&got, &want);
            ensure!(d <= BYTE_TOL, "{} at t={t}: max delta {d} > {BYTE_TOL}", e.name);
            worst = worst.max(d);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < ORACLE_BUDGET, "took {elapsed:?}, budget {ORACLE_BUDGET:?}");
    Ok(format!("{} effects x {} times, max delta {worst}, {:.2?}", entries().len(), ORACLE_TIMES.len(), elapsed))
}

/// Smooth gradients, sinusoidal texture and hashed grain, standing in for a
/// camera photo.
fn photo(w: u32, h: u32) -> Image {
    Image::from_fn(w, h, |x, y| {
        let (fx, fy) = (x as f32 / w as f32, y as f32 / h as f32);
        let grain = ((x.wrapping_mul(73_856_093) ^ y.wrapping_mul(19_349_663)) % 23) as f32;
        let r = 60.0 + 150.0 * fx + 20.0 * (fy * 17.0).sin() + grain;
        let g = 40.0 + 120.0 * (1.0 - fy) + 30.0 * (fx * 11.0 + fy * 5.0).cos() + grain;
        let b = 90.0 + 80.0 * (fx * fy) + 40.0 * ((fx - 0.5).powi(2) + (fy - 0.4).powi(2)).sqrt() + grain;
        [r.clamp(0.0, 255.0) as u8, g.clamp(0.0, 255.0) as u8, b.clamp(0.0, 255.0) as u8, 255]
    })
    .unwrap()
}

fn passthrough_identity() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let frag = tmp.path().join("passthrough.frag");
    std::fs::write(&frag, effect_source("passthrough").unwrap()).unwrap();
    let opaque_card = Image::from_fn(64, 64, |x, y| {
        let p = test_card().pixel(x, y);
        [p[0], p[1], p[2], 255]
    })
    .unwrap();
    let images = [("1x1", Image::filled(1, 1, [200, 17, 99, 255]).unwrap()), ("640x480 photo", photo(640, 480)), ("test card", opaque_card)];
    for (label, img) in &images {
        let input = tmp.path().join("in.png");
        let output = tmp.path().join("out.png");
        std::fs::write(&input, encode_png(img)).unwrap();
        let out = cli(&["render", frag.to_str().unwrap(), "--in", input.to_str().unwrap(), "--out", output.to_str().unwrap(), "--time", "3.3"]);
        ensure!(out.status.success(), "{label}: render failed: {}", String::from_utf8_lossy(&out.stderr));
        let got = decode_png(&std::fs::read(&output).unwrap()).map_err(|e| e.to_string())?;
        ensure!(got.width() == img.width() && got.height() == img.height(), "{label}: size changed");
        ensure!(got.data() == img.data(), "{label}: pixels differ");
    }
    Ok("3 PNGs byte-identical through `shaderlens render`".into())
}

fn pitfall_corpus() -> Outcome {
    let cases = load_pitfall_corpus(Path::new(PITFALL_DIR)).map_err(|e| e.to_string())?;
    ensure!(cases.len() >= MIN_PITFALLS, "only {} cases", cases.len());
    let mut per_code: HashMap<DiagnosticCode, usize> = HashMap::new();
    for c in &cases {
        check_pitfall(c).map_err(|e| format!("{}: {e}", c.name))?;
        *per_code.entry(c.code).or_default() += 1;
    }
    for code in DiagnosticCode::ALL {
        ensure!(per_code.get(&code).copied().unwrap_or(0) >= 2, "{code} covered fewer than twice");
    }

    // Everything the checker accepts must also run without faulting.
    let contract = InterfaceContract::default();
    let mut sources: Vec<(String, String)> = entries().iter().map(|e| (e.name.to_owned(), e.source.to_owned())).collect();
    let muts = mutants(0xacce, MUTANT_COUNT);
    ensure!(muts.len() == MUTANT_COUNT, "generated {} mutants", muts.len());
    sources.extend(muts.into_iter().enumerate().map(|(i, m)| (format!("mutant {i}"), m)));
    let mut r = rng(0xacce);
    for (label, src) in &sources {
        let shader = validate(src, &contract).map_err(|d| format!("{label} rejected: {}", d[0]))?;
        for &t in &EDGE_TIMES {
            let img = random_image(&mut r, 5);
            render_frame(&shader, &img, t).map_err(|e| format!("{label} faulted at t={t}: {e}"))?;
        }
        let img = random_image(&mut r, 3);
        let u = UniformSet::new(&img, 0.25);
        for uv in [[f32::NAN, 0.5], [f32::INFINITY, f32::NEG_INFINITY], [-1e30, 1e30]] {
            eval_fragment(&shader, uv, &u).map_err(|e| format!("{label} faulted at uv={uv:?}: {e}"))?;
        }
    }
    Ok(format!("{} malformed shaders rejected at their lexeme; 0 false accepts over {} valid programs", cases.len(), sources.len()))
}

fn repair_loop() -> Outcome {
    let rt = runtime();
    let tmp = tempfile::tempdir().unwrap();
    let store = Store::open(tmp.path().join("store")).unwrap();

    let fx = tmp.path().join("repair");
    write_fixture_script(&fx, &[fenced(BROKEN_E003), fenced(effect_source("grayscale").unwrap())]).unwrap();
    let gen = generator(&fx, 3);
    let job = JobHandle::new("grayscale", 3);
    let mut session = gen.client().session();
    let artifact = rt.block_on(gen.run(&job, &mut session, &store)).map_err(|e| e.to_string())?;
    ensure!(job.snapshot().status == JobStatus::Done, "status {:?}", job.snapshot().status);
    ensure!(artifact.attempts_used == 2, "attempts_used = {}", artifact.attempts_used);
    let expected = validate(BROKEN_E003, &InterfaceContract::default()).unwrap_err();
    let e003 = expected.iter().find(|d| d.code == DiagnosticCode::E003).ok_or("fixture lacks E003")?;
    let sent = session.sent();
    ensure!(sent.len() == 2, "{} requests", sent.len());
    ensure!(sent[1].user.contains(&e003.to_string()), "repair prompt lacks {e003}");

    let fx = tmp.path().join("exhaust");
    write_fixture_script(&fx, &[fenced(BROKEN_E003), fenced(BROKEN_E003), fenced(BROKEN_E003)]).unwrap();
    let (job, result) = rt.block_on(generator(&fx, 3).generate("grayscale", &store));
    match result {
        Err(GenerationError::GenerationFailed { attempts: 3, diagnostics }) if !diagnostics.is_empty() => {}
        other => return Err(format!("expected GenerationFailed after 3 attempts, got {other:?}")),
    }
    ensure!(job.snapshot().status == JobStatus::Failed, "exhausted job not failed");
    Ok(format!("done after 2 attempts with \"{e003}\" in the repair prompt; 3 broken -> GenerationFailed"))
}

fn end_to_end_offline() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let fx = tmp.path().join("fx");
    let keep_green = effect_source("keep_green").unwrap();
    write_fixture_script(&fx, &[fenced(keep_green)]).unwrap();
    let store_dir = tmp.path().join("store");

    let start = Instant::now();
    let out = cli(&["--json", "generate", "grayscale except green", "--mock", fx.to_str().unwrap(), "--store", store_dir.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure!(out.status.success(), "generate failed: {}", String::from_utf8_lossy(&out.stderr));
    ensure!(elapsed < E2E_BUDGET, "generate took {elapsed:?}");
    let doc: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let id = doc["id"].as_str().ok_or("no id in output")?.to_owned();

    let store = Store::open(&store_dir).unwrap();
    let artifact = store.load(uuid::Uuid::parse_str(&id).unwrap()).map_err(|e| e.to_string())?;
    let manifest: Value = serde_json::from_slice(&std::fs::read(store_dir.join(&id).join("manifest.json")).unwrap()).unwrap();
    let expected = json!({
        "id": artifact.id, "intent": "grayscale except green", "title": "grayscale except green",
        "created_at": artifact.created_at, "attempts_used": 1, "saved": false,
    });
    ensure!(manifest == expected, "manifest {manifest} != {expected}");
    let copy = Store::open(tmp.path().join("copy")).unwrap();
    copy.save(&artifact).unwrap();
    ensure!(copy.load(artifact.id).map_err(|e| e.to_string())? == artifact, "manifest does not round-trip");
    let reparsed: ShaderArtifact = serde_json::from_value(serde_json::to_value(&artifact).unwrap()).unwrap();
    ensure!(reparsed == artifact, "artifact JSON does not round-trip");
    ensure!(artifact.source.trim_end() == keep_green.trim_end(), "stored source differs from fixture");

    let card = test_card();
    let card_png = tmp.path().join("card.png");
    let out_png = tmp.path().join("out.png");
    std::fs::write(&card_png, encode_png(&card)).unwrap();
    let out = cli(&["render", "--id", &id, "--store", store_dir.to_str().unwrap(), "--in", card_png.to_str().unwrap(), "--out", out_png.to_str().unwrap()]);
    ensure!(out.status.success(), "render failed: {}", String::from_utf8_lossy(&out.stderr));
    let got = decode_png(&std::fs::read(&out_png).unwrap()).map_err(|e| e.to_string())?;
    let want = oracle_render("keep_green", &card, 0.0).unwrap();
    let d = max_delta(&got, &want);
    ensure!(d <= BYTE_TOL, "keep_green render max delta {d}");

    // Patch centres: red at column 0, green at column 1 of the first row.
    let (red_in, red_out) = (card.pixel(4, 4), got.pixel(4, 4));
    let (green_in, green_out) = (card.pixel(12, 4), got.pixel(12, 4));
    ensure!(red_in == [255, 0, 0, 255], "card layout changed: {red_in:?}");
    let spread = red_out[..3].iter().max().unwrap() - red_out[..3].iter().min().unwrap();
    ensure!(spread <= BYTE_TOL, "red patch not desaturated: {red_out:?}");
    let green_delta = green_in.iter().zip(green_out).map(|(a, b)| a.abs_diff(b)).max().unwrap();
    ensure!(green_delta <= BYTE_TOL, "green patch changed: {green_in:?} -> {green_out:?}");
    Ok(format!("generate in {elapsed:.2?}; red {red_in:?} -> {red_out:?}, green preserved; oracle delta {d}"))
}

fn wav() -> Vec<u8> {
    let spec = hound::WavSpec { channels: 1, sample_rate: 16_000, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut out = Cursor::new(Vec::new());
    let mut w = hound::WavWriter::new(&mut out, spec).unwrap();
    for i in 0..400 {
        w.write_sample(((i as f32 * 0.05).sin() * 8000.0) as i16).unwrap();
    }
    w.finalize().unwrap();
    out.into_inner()
}

enum Body {
    None,
    Json(Value),
    Raw(&'static str),
    Form(Vec<(&'static str, FormValue)>),
}

#[derive(Clone)]
enum FormValue {
    Text(String),
    File(Vec<u8>),
}

struct Probe {
    method: Method,
    path: String,
    body: Body,
    status: u16,
    /// Expected ApiError code for error responses.
    code: Option<&'static str>,
}

fn probe(method: Method, path: impl Into<String>, body: Body, status: u16, code: Option<&'static str>) -> Probe {
    Probe { method, path: path.into(), body, status, code }
}

async fn send(http: &Client, base: &str, p: &Probe) -> reqwest::Response {
    let req = http.request(p.method.clone(), format!("{base}{}", p.path));
    let req = match &p.body {
        Body::None => req,
        Body::Json(v) => req.json(v),
        Body::Raw(s) => req.header("content-type", "application/json").body(*s),
        Body::Form(fields) => {
            let mut form = Form::new();
            for (name, v) in fields {
                form = match v.clone() {
                    FormValue::Text(t) => form.text(*name, t),
                    FormValue::File(b) => form.part(*name, Part::bytes(b).file_name("upload.bin")),
                };
            }
            req.multipart(form)
        }
    };
    req.send().await.unwrap()
}

async fn sse_statuses(http: &Client, base: &str, job: &str) -> Result<Vec<String>, String> {
    let r = http.get(format!("{base}/api/jobs/{job}/events")).send().await.map_err(|e| e.to_string())?;
    let text = tokio::time::timeout(Duration::from_secs(10), r.text()).await.map_err(|_| "SSE did not close")?.map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for block in text.split("\n\n") {
        if !block.lines().any(|l| l.trim() == "event: status") {
            continue;
        }
        let data: String = block.lines().filter_map(|l| l.strip_prefix("data:")).map(str::trim_start).collect();
        let v: Value = serde_json::from_str(&data).map_err(|e| format!("bad SSE data: {e}"))?;
        out.push(v["status"].as_str().unwrap_or_default().to_owned());
    }
    Ok(out)
}

fn api_contract() -> Outcome {
    let rt = runtime();
    rt.block_on(async {
        let tmp = tempfile::tempdir().unwrap();
        let fx = tmp.path().join("fx");
        write_fixture_script(&fx, &[fenced(BROKEN_E003), fenced(effect_source("heat_vision").unwrap())]).unwrap();
        std::fs::write(fx.join("transcript.txt"), "heat vision").unwrap();
        let mut cfg = Config { bind: "127.0.0.1:0".parse().unwrap(), store: tmp.path().join("store"), ..Config::default() };
        cfg.use_mock(&fx);
        let server = Server::bind(&cfg).await.map_err(|e| e.to_string())?;
        let base = format!("http://{}", server.local_addr());
        tokio::spawn(server.run());
        let http = Client::new();

        // Mocked two-attempt job: exact transition sequence over SSE.
        let r = http.post(format!("{base}/api/generate")).json(&json!({"intent": "heat vision"})).send().await.unwrap();
        ensure!(r.status() == StatusCode::ACCEPTED, "generate returned {}", r.status());
        let job = r.json::<Value>().await.unwrap()["job_id"].as_str().unwrap().to_owned();
        let seq = sse_statuses(&http, &base, &job).await?;
        let expected = ["generating", "validating", "repairing", "generating", "validating", "done"];
        ensure!(seq == expected, "SSE sequence {seq:?}");
        let snap: Value = http.get(format!("{base}/api/jobs/{job}")).send().await.unwrap().json().await.unwrap();
        let shader = snap["artifact_id"].as_str().unwrap().to_owned();

        let missing = uuid::Uuid::new_v4();
        let png = encode_png(&test_card());
        let pass = effect_source("passthrough").unwrap().to_owned();
        let e004 = "uniform sampler2D uMainTex; varying vec2 vUv; void main(){ gl_FragColor = 1.0; }".to_owned();
        let file = |b: &[u8]| FormValue::File(b.to_vec());
        let text = |s: &str| FormValue::Text(s.to_owned());
        use Method as M;
        let probes = vec![
            probe(M::POST, "/api/generate", Body::Json(json!({"intent": "underwater"})), 202, None),
            probe(M::POST, "/api/generate", Body::Json(json!({"intent": ""})), 400, Some("blank_intent")),
            probe(M::POST, "/api/generate", Body::Raw("{oops"), 400, Some("invalid_json")),
            probe(M::GET, "/api/generate", Body::None, 405, Some("method_not_allowed")),
            probe(M::GET, format!("/api/jobs/{job}"), Body::None, 200, None),
            probe(M::GET, format!("/api/jobs/{missing}"), Body::None, 404, Some("not_found")),
            probe(M::GET, format!("/api/jobs/{job}/events"), Body::None, 200, None),
            probe(M::GET, format!("/api/jobs/{missing}/events"), Body::None, 404, Some("not_found")),
            probe(M::GET, "/api/shaders", Body::None, 200, None),
            probe(M::GET, format!("/api/shaders/{shader}"), Body::None, 200, None),
            probe(M::GET, format!("/api/shaders/{missing}"), Body::None, 404, Some("not_found")),
            probe(M::POST, format!("/api/shaders/{shader}/save"), Body::None, 200, None),
            probe(M::POST, format!("/api/shaders/{missing}/save"), Body::None, 404, Some("not_found")),
            probe(M::POST, "/api/validate", Body::Json(json!({"source": pass})), 200, None),
            probe(M::POST, "/api/validate", Body::Json(json!({"source": "x".repeat(2 << 20)})), 413, Some("payload_too_large")),
            probe(M::POST, "/api/validate", Body::Json(json!({})), 400, Some("invalid_json")),
            probe(M::POST, "/api/render", Body::Form(vec![("source", text(&pass)), ("image", file(&png)), ("time", text("1.7"))]), 200, None),
            probe(M::POST, "/api/render", Body::Form(vec![("shader_id", text(&shader)), ("image", file(&png))]), 200, None),
            probe(M::POST, "/api/render", Body::Form(vec![("source", text(&pass)), ("image", file(b"junk"))]), 400, Some("invalid_png")),
            probe(M::POST, "/api/render", Body::Form(vec![("shader_id", text(&missing.to_string())), ("image", file(&png))]), 404, Some("not_found")),
            probe(M::POST, "/api/render", Body::Form(vec![("source", text(&e004)), ("image", file(&png))]), 422, Some("shader_invalid")),
            probe(M::POST, "/api/transcribe", Body::Form(vec![("audio", file(&wav()))]), 200, None),
            probe(M::POST, "/api/transcribe", Body::Form(vec![("audio", file(b""))]), 400, Some("unsupported_audio")),
            probe(M::GET, "/api/unknown", Body::None, 404, Some("not_found")),
            probe(M::DELETE, format!("/api/shaders/{shader}"), Body::None, 200, None),
            probe(M::DELETE, format!("/api/shaders/{shader}"), Body::None, 404, Some("not_found")),
        ];
        let mut errors = 0;
        for p in &probes {
            let r = send(&http, &base, p).await;
            let status = r.status().as_u16();
            let ctype = r.headers().get("content-type").and_then(|v| v.to_str().ok()).unwrap_or("").to_owned();
            let label = format!("{} {}", p.method, p.path);
            ensure!(status == p.status, "{label}: status {status}, expected {}", p.status);
            let bytes = r.bytes().await.unwrap();
            match p.code {
                Some(code) => {
                    errors += 1;
                    ensure!(ctype.starts_with("application/json"), "{label}: error content-type {ctype}");
                    let body: ApiError = serde_json::from_slice(&bytes)
                        .map_err(|e| format!("{label}: not an ApiError ({e}): {}", String::from_utf8_lossy(&bytes)))?;
                    ensure!(body.status == status && body.code == code, "{label}: got {body:?}");
                }
                None if ctype.starts_with("image/png") => {
                    decode_png(&bytes).map_err(|e| format!("{label}: {e}"))?;
                }
                None if ctype.starts_with("text/event-stream") => {}
                None => {
                    serde_json::from_slice::<Value>(&bytes).map_err(|e| format!("{label}: invalid JSON ({e})"))?;
                }
            }
        }
        Ok(format!("{} probes ({errors} error cases) matched; SSE {}", probes.len(), expected.join("->")))
    })
}

fn determinism_and_concurrency() -> Outcome {
    let card = test_card();
    let mut r = rng(0xd1ce);
    let extra = random_image(&mut r, 48);
    for e in entries() {
        let shader = validate(e.source, &InterfaceContract::default()).unwrap();
        for img in [&card, &extra] {
            let one = render_frame_with_threads(&shader, img, 1.7, 1).map_err(|x| x.to_string())?;
            for n in [2, 4, 8] {
                let many = render_frame_with_threads(&shader, img, 1.7, n).map_err(|x| x.to_string())?;
                ensure!(one.data() == many.data(), "{}: 1 vs {n} threads differ", e.name);
            }
        }
    }

    let rt = runtime();
    let tmp = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::open(tmp.path().join("store")).unwrap());
    let script = |name: &str, effect: &str| -> PathBuf {
        let dir = tmp.path().join(name);
        write_fixture_script(&dir, &[fenced(BROKEN_E003), fenced(effect_source(effect).unwrap())]).unwrap();
        dir
    };
    let (fa, fb) = (script("a", "protanopia"), script("b", "underwater"));
    let (ga, gb) = (generator(&fa, 3), generator(&fb, 3));
    let (ra, rb) = rt.block_on(async { tokio::join!(ga.generate("colorblind", &store), gb.generate("under the ocean", &store)) });
    let (a, b) = (ra.1.map_err(|e| e.to_string())?, rb.1.map_err(|e| e.to_string())?);
    ensure!(a.id != b.id, "artifact ids collide");
    for (art, effect, intent) in [(&a, "protanopia", "colorblind"), (&b, "underwater", "under the ocean")] {
        let loaded = store.load(art.id).map_err(|e| e.to_string())?;
        ensure!(loaded.intent == intent && loaded.attempts_used == 2, "{effect}: {loaded:?}");
        let shader = validate(&loaded.source, &InterfaceContract::default()).unwrap();
        let got = render_frame(&shader, &card, 0.0).unwrap();
        let d = max_delta(&got, &oracle_render(effect, &card, 0.0).unwrap());
        ensure!(d <= BYTE_TOL, "{effect} artifact renders off-oracle by {d}");
    }

    // Same script through the shared worker pool: each job keeps its own cursor.
    let queue = JobQueue::new(Arc::new(generator(&fa, 3)), store.clone(), 2, 32);
    let (ja, jb) = rt.block_on(async {
        let x = queue.submit("first").unwrap();
        let y = queue.submit("second").unwrap();
        tokio::join!(x.finished(), y.finished())
    });
    for j in [&ja, &jb] {
        ensure!(j.status == JobStatus::Done && j.attempt == 2, "queued job {:?} attempt {}", j.status, j.attempt);
    }
    ensure!(ja.artifact_id != jb.artifact_id, "queued jobs share an artifact");
    ensure!(store.list().unwrap().len() == 4, "expected 4 stored artifacts");
    Ok("1/2/4/8-thread renders identical for 7 effects; 2+2 concurrent mocked jobs produced independent artifacts".into())
}
