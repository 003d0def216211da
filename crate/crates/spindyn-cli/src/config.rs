//! `key = value` run-configuration file: parsing, validation, serialization.
//!
//! Keys use a compact vocabulary so existing input decks port over by
//! renaming nothing:
//! `id` Hilbert-space dimension, `ig`/`ie` 1-based qubit level indices,
//! `nm` number of vibration modes, `ic` number of field blocks, `nd`
//! directions per block, `temp` (K), `sfgw` Gaussian-width scale, `top`/`ttp`
//! one-/two-phonon contribution report thresholds (%), `geme` Γem,add (μs⁻¹),
//! `gabe` Γab,add (μs⁻¹, −1 selects detailed balance), `tmage` Γmag,add,
//! `gfi` free-ion Landé factor, `bcm` |B1| (mT), `firr` drive frequency
//! (GHz), `alp` drive out-of-plane angle (degrees), `nang` ε-average count,
//! `esta`/`eend`/`npe` τ sweep (μs, μs, points), `ro11`..`ro12i` initial
//! state, `nsa` number of sequence steps.

use std::collections::HashMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};

/// Parsed and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub ig: usize,
    pub ie: usize,
    pub nm: usize,
    pub n_fields: usize,
    pub n_dirs: usize,
    pub temp: f64,
    pub sfgw: f64,
    pub top: f64,
    pub ttp: f64,
    pub geme: f64,
    pub gabe: f64,
    pub tmage: f64,
    pub gfi: f64,
    pub bcm: f64,
    pub firr: f64,
    /// Drive out-of-plane angle α, stored in radians (degrees in the file).
    pub alpha: f64,
    pub nang: usize,
    pub esta: f64,
    pub eend: f64,
    pub npe: usize,
    pub ro11: f64,
    pub ro22: f64,
    pub ro12r: f64,
    pub ro12i: f64,
    pub nsa: usize,
}

const REQUIRED: &[&str] = &[
    "id", "ig", "ie", "nm", "ic", "nd", "temp", "sfgw", "geme", "gabe", "tmage", "gfi", "bcm",
    "firr", "alp", "nang", "esta", "eend", "npe", "ro11", "ro22", "ro12r", "ro12i", "nsa",
];

impl RunConfig {
    /// Parses the `key = value` format (`#` starts a comment; decimal point
    /// is always `.`; scientific notation accepted).
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: HashMap<String, f64> = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`, got {raw:?}", lineno + 1);
            };
            let key = key.trim().to_string();
            let value: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("config line {}: bad number {:?}", lineno + 1, value.trim()))?;
            if !matches!(key.as_str(), k if REQUIRED.contains(&k) || k == "top" || k == "ttp") {
                bail!("config line {}: unknown key {key:?}", lineno + 1);
            }
            if map.insert(key.clone(), value).is_some() {
                bail!("config line {}: duplicate key {key:?}", lineno + 1);
            }
        }
        let missing: Vec<&str> = REQUIRED
            .iter()
            .copied()
            .filter(|k| !map.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            bail!("config missing keys: {}", missing.join(", "));
        }
        let get = |k: &str| map[k];
        let get_usize = |k: &str| -> Result<usize> {
            let v = map[k];
            if v < 0.0 || v.fract() != 0.0 {
                bail!("config key {k} must be a non-negative integer, got {v}");
            }
            Ok(v as usize)
        };
        let cfg = Self {
            dim: get_usize("id")?,
            ig: get_usize("ig")?,
            ie: get_usize("ie")?,
            nm: get_usize("nm")?,
            n_fields: get_usize("ic")?,
            n_dirs: get_usize("nd")?,
            temp: get("temp"),
            sfgw: get("sfgw"),
            top: map.get("top").copied().unwrap_or(0.0),
            ttp: map.get("ttp").copied().unwrap_or(0.0),
            geme: get("geme"),
            gabe: get("gabe"),
            tmage: get("tmage"),
            gfi: get("gfi"),
            bcm: get("bcm"),
            firr: get("firr"),
            alpha: get("alp").to_radians(),
            nang: get_usize("nang")?,
            esta: get("esta"),
            eend: get("eend"),
            npe: get_usize("npe")?,
            ro11: get("ro11"),
            ro22: get("ro22"),
            ro12r: get("ro12r"),
            ro12i: get("ro12i"),
            nsa: get_usize("nsa")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.ig == 0 || self.ie <= self.ig || self.ie > self.dim {
            bail!(
                "qubit indices must satisfy 1 <= ig < ie <= id (ig={}, ie={}, id={})",
                self.ig,
                self.ie,
                self.dim
            );
        }
        if self.n_fields == 0 || self.n_dirs == 0 {
            bail!("ic and nd must be >= 1");
        }
        if (self.ro11 + self.ro22 - 1.0).abs() > 1e-9 {
            bail!("ro11 + ro22 must be 1, got {}", self.ro11 + self.ro22);
        }
        if self.gabe < 0.0 && self.gabe != -1.0 {
            bail!("gabe must be >= 0 or exactly -1 (detailed balance), got {}", self.gabe);
        }
        if self.temp <= 0.0 {
            bail!("temp must be positive");
        }
        if self.nang == 0 {
            bail!("nang must be >= 1");
        }
        if self.nsa == 0 {
            bail!("nsa must be >= 1");
        }
        Ok(())
    }

    /// True when the additive absorption rate follows detailed balance.
    pub fn detailed_balance(&self) -> bool {
        self.gabe == -1.0
    }

    /// Serializes back into the `key = value` format (round-trip identity
    /// with [`RunConfig::parse`]).
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: f64| {
            let _ = writeln!(s, "{k} = {}", fmt_f64(v));
        };
        kv("id", self.dim as f64);
        kv("ig", self.ig as f64);
        kv("ie", self.ie as f64);
        kv("nm", self.nm as f64);
        kv("ic", self.n_fields as f64);
        kv("nd", self.n_dirs as f64);
        kv("temp", self.temp);
        kv("sfgw", self.sfgw);
        kv("top", self.top);
        kv("ttp", self.ttp);
        kv("geme", self.geme);
        kv("gabe", self.gabe);
        kv("tmage", self.tmage);
        kv("gfi", self.gfi);
        kv("bcm", self.bcm);
        kv("firr", self.firr);
        kv("alp", self.alpha.to_degrees());
        kv("nang", self.nang as f64);
        kv("esta", self.esta);
        kv("eend", self.eend);
        kv("npe", self.npe as f64);
        kv("ro11", self.ro11);
        kv("ro22", self.ro22);
        kv("ro12r", self.ro12r);
        kv("ro12i", self.ro12i);
        kv("nsa", self.nsa as f64);
        s
    }
}

/// Shortest round-trippable decimal representation.
pub fn fmt_f64(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains(['.', 'e', 'E', 'n', 'i']) {
        s.push_str(".0");
    }
    s
}
