//! Canonical fixture set with content hashes: the supersingular base
//! displays, the reference lift, and sample isogenies. Generation is
//! deterministic, so regeneration with the same seed is byte-identical
//! and tampering is caught by the manifest.

use crate::grammar;
use crate::json::{self, DisplayJson, MorphismJson};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use wittcalc_core::display::Morphism;
use wittcalc_core::frame::witt_frame;
use wittcalc_core::ring::Ring;
use wittcalc_core::selftest;

#[derive(Serialize, Deserialize, Debug)]
pub struct Manifest {
    pub seed: u64,
    pub files: BTreeMap<String, String>,
}

/// FNV-1a 64-bit content hash, hex encoded.
pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[derive(Serialize)]
struct HeightExample {
    src: DisplayJson,
    dst: DisplayJson,
    #[serde(rename = "M")]
    m: MorphismJson,
}

fn build_files(seed: u64) -> Result<Vec<(String, String)>, String> {
    let f2 = Ring::prime_field(2).map_err(|e| e.to_string())?;
    let f4 = Ring::finite_field(2, 2).map_err(|e| e.to_string())?;
    let mut out = Vec::new();

    for (name, ring, prec) in [
        ("supersingular_f2.display.json", &f2, 6usize),
        ("supersingular_f4.display.json", &f4, 6),
        ("reference_lift.display.json", &f4, 12),
    ] {
        let frame = witt_frame(ring, prec).map_err(|e| e.to_string())?;
        let d = selftest::supersingular(&frame).map_err(|e| e.to_string())?;
        out.push((
            name.to_string(),
            serde_json::to_string_pretty(&json::display_to_json(&d)).unwrap(),
        ));
    }

    let frame = witt_frame(&f4, 6).map_err(|e| e.to_string())?;
    let base = selftest::supersingular(&frame).map_err(|e| e.to_string())?;
    let v_iso = selftest::verschiebung_isogeny(&frame).map_err(|e| e.to_string())?;
    out.push((
        "verschiebung_isogeny.morphism.json".into(),
        serde_json::to_string_pretty(&json::morphism_to_json(&frame, &v_iso)).unwrap(),
    ));
    let p_id = Morphism::scalar(&base, 2).map_err(|e| e.to_string())?;
    out.push((
        "p_identity.morphism.json".into(),
        serde_json::to_string_pretty(&json::morphism_to_json(&frame, &p_id)).unwrap(),
    ));
    // packaged height example: p·identity between supersingular displays
    let he = HeightExample {
        src: json::display_to_json(&base),
        dst: json::display_to_json(&base),
        m: json::morphism_to_json(&frame, &p_id),
    };
    out.push((
        "height_example.json".into(),
        serde_json::to_string_pretty(&he).unwrap(),
    ));
    // a randomized sample isogeny (seeded, hence reproducible)
    let mut rng = wittcalc_core::rng::SplitMix64::new(seed);
    let frame9 = witt_frame(&f4, 9).map_err(|e| e.to_string())?;
    let base9 = selftest::supersingular(&frame9).map_err(|e| e.to_string())?;
    let (p_new, m) =
        selftest::sample_isogeny(&mut rng, &frame9, &base9, 1, None).map_err(|e| e.to_string())?;
    let se = HeightExample {
        src: json::display_to_json(&p_new),
        dst: json::display_to_json(&base9),
        m: json::morphism_to_json(&frame9, &m),
    };
    out.push((
        "sample_isogeny.json".into(),
        serde_json::to_string_pretty(&se).unwrap(),
    ));
    Ok(out)
}

pub fn generate(dir: &Path, seed: u64) -> Result<Manifest, String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let files = build_files(seed)?;
    let mut manifest = Manifest {
        seed,
        files: BTreeMap::new(),
    };
    for (name, contents) in &files {
        fs::write(dir.join(name), contents).map_err(|e| e.to_string())?;
        manifest
            .files
            .insert(name.clone(), fnv1a64(contents.as_bytes()));
    }
    let manifest_text = serde_json::to_string_pretty(&manifest).unwrap();
    fs::write(dir.join("manifest.json"), manifest_text).map_err(|e| e.to_string())?;
    Ok(manifest)
}

pub fn verify(dir: &Path) -> Result<Manifest, String> {
    let manifest_text = fs::read_to_string(dir.join("manifest.json")).map_err(|e| e.to_string())?;
    let manifest: Manifest = serde_json::from_str(&manifest_text).map_err(|e| e.to_string())?;
    for (name, expected) in &manifest.files {
        let contents = fs::read(dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let got = fnv1a64(&contents);
        if &got != expected {
            return Err(format!("hash mismatch for {name}: {got} != {expected}"));
        }
    }
    // fixture payloads must also parse and re-verify
    let he_text = fs::read_to_string(dir.join("height_example.json")).map_err(|e| e.to_string())?;
    let he: serde_json::Value = serde_json::from_str(&he_text).map_err(|e| e.to_string())?;
    let src: DisplayJson = serde_json::from_value(he["src"].clone()).map_err(|e| e.to_string())?;
    let _ = json::display_from_json(&src)?;
    Ok(manifest)
}

pub fn regenerate_matches(dir: &Path, seed: u64) -> Result<bool, String> {
    let files = build_files(seed)?;
    for (name, contents) in &files {
        let existing = fs::read(dir.join(name)).map_err(|e| e.to_string())?;
        if existing != contents.as_bytes() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub use grammar::Result as GrammarResult;
