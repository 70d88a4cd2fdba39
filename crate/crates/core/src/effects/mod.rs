//! Canonical effect shaders and their closed-form oracles.
//!
//! Sources live next to this module as `.frag` files and are listed in
//! `shaders/manifest.txt` (`name | title | tags`).

mod card;
mod oracle;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

pub use card::{test_card, TEST_CARD_SIZE};
pub use oracle::{hsv_hue_saturation, oracle_apply, oracle_apply_sampled, oracle_render, oracle_sample};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown effect '{0}'")]
pub struct UnknownEffect(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effect {
    Passthrough,
    Invert,
    Grayscale,
    Protanopia,
    KeepGreen,
    HeatVision,
    Underwater,
}

impl Effect {
    pub const ALL: [Effect; 7] = [
        Effect::Passthrough,
        Effect::Invert,
        Effect::Grayscale,
        Effect::Protanopia,
        Effect::KeepGreen,
        Effect::HeatVision,
        Effect::Underwater,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Effect::Passthrough => "passthrough",
            Effect::Invert => "invert",
            Effect::Grayscale => "grayscale",
            Effect::Protanopia => "protanopia",
            Effect::KeepGreen => "keep_green",
            Effect::HeatVision => "heat_vision",
            Effect::Underwater => "underwater",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Effect::Passthrough => include_str!("shaders/passthrough.frag"),
            Effect::Invert => include_str!("shaders/invert.frag"),
            Effect::Grayscale => include_str!("shaders/grayscale.frag"),
            Effect::Protanopia => include_str!("shaders/protanopia.frag"),
            Effect::KeepGreen => include_str!("shaders/keep_green.frag"),
            Effect::HeatVision => include_str!("shaders/heat_vision.frag"),
            Effect::Underwater => include_str!("shaders/underwater.frag"),
        }
    }

    fn oracle_description(self) -> &'static str {
        match self {
            Effect::Passthrough => "rgba' = rgba",
            Effect::Invert => "rgb' = 1 - rgb, alpha kept",
            Effect::Grayscale => "rgb' = (Y, Y, Y), Y = dot(rgb, (0.2126, 0.7152, 0.0722)), alpha kept",
            Effect::Protanopia => {
                "rgb' = M rgb, M rows (0.56667, 0.43333, 0), (0.55833, 0.44167, 0), (0, 0.24167, 0.75833), alpha kept"
            }
            Effect::KeepGreen => {
                "rgb kept if HSV hue in [90, 150] degrees and saturation >= 0.15, else (Y, Y, Y); alpha kept"
            }
            Effect::HeatVision => "rgb' = mix((0, 0, 1), (1, 0, 0), Y), alpha kept",
            Effect::Underwater => {
                "uv' = uv + (0.01 sin(40 uv.y + 2 t), 0); rgb' = sample(uv').rgb * (0.6, 0.8, 1.0), alpha of sample(uv')"
            }
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Effect {
    type Err = UnknownEffect;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Effect::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| UnknownEffect(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectEntry {
    pub effect: Effect,
    pub name: &'static str,
    pub title: String,
    pub source: &'static str,
    /// Human-readable statement of what the oracle computes.
    pub oracle: &'static str,
    pub tags: Vec<String>,
}

const MANIFEST: &str = include_str!("shaders/manifest.txt");

/// The catalog, in manifest order.
pub fn entries() -> &'static [EffectEntry] {
    static ENTRIES: OnceLock<Vec<EffectEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| parse_manifest(MANIFEST).expect("bundled manifest is well formed"))
}

fn parse_manifest(text: &str) -> Result<Vec<EffectEntry>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        let [name, title, tags] = cols.as_slice() else {
            return Err(format!("manifest line {}: expected 3 columns", n + 1));
        };
        let effect: Effect = name.parse().map_err(|e: UnknownEffect| format!("manifest line {}: {e}", n + 1))?;
        out.push(EffectEntry {
            effect,
            name: effect.name(),
            title: (*title).to_owned(),
            source: effect.source(),
            oracle: effect.oracle_description(),
            tags: tags.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::to_owned).collect(),
        });
    }
    Ok(out)
}

pub fn list_effects() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

pub fn entry(name: &str) -> Result<&'static EffectEntry, UnknownEffect> {
    entries().iter().find(|e| e.name == name).ok_or_else(|| UnknownEffect(name.to_owned()))
}

pub fn effect_source(name: &str) -> Result<&'static str, UnknownEffect> {
    entry(name).map(|e| e.source)
}
