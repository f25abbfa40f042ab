//! Run configuration: an INI-style file with fixed sections and a closed key
//! set per section (unknown keys are errors). `echo` emits the canonical
//! form that re-parses to the identical configuration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dynamics::{IntegratorConfig, MinimizerConfig};
use crate::error::{Error, Result};
use crate::potentials::{EamPotential, LjPotential, PairTable, PotentialModel};
use crate::weighting::{KernelKind, WeightingFunction};

/// Allowed sections and keys.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "potential",
        &[
            "kind",
            "cutoff",
            "lj_quad_coeff",
            "lj_const_coeff",
            "eam_pair_scale",
            "eam_pair_decay",
            "eam_density_decay",
            "eam_embed_scale",
            "table_path",
        ],
    ),
    ("weighting", &["kind", "r_w", "epsilon", "gaussian_cutoff"]),
    (
        "md",
        &["dt", "steps", "stride", "seed", "temperature", "skin"],
    ),
    ("minimize", &["ftol", "maxiter", "max_step"]),
    ("grid", &["origin", "spacing", "counts"]),
    (
        "experiment",
        &[
            "cells",
            "cells_z",
            "temperature",
            "equil_steps",
            "measure_steps",
            "dt",
            "stride",
            "seed",
            "sigma",
            "hole_radius_lattice",
            "kernel_radius_lattice",
            "plane_samples",
            "ladder",
            "unit_system",
            "paper_geometry",
        ],
    ),
];

/// Parsed configuration: section -> key -> raw value text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        Error::config(format!("line {}: unterminated section header", lineno + 1))
                    })?
                    .trim()
                    .to_string();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(Error::config(format!(
                        "line {}: unknown section [{name}]",
                        lineno + 1
                    )));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let section = current.clone().ok_or_else(|| {
                Error::config(format!("line {}: key outside any section", lineno + 1))
            })?;
            let allowed = SCHEMA
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, keys)| *keys)
                .unwrap();
            if !allowed.contains(&key.as_str()) {
                return Err(Error::config(format!(
                    "line {}: unknown key '{key}' in section [{section}]",
                    lineno + 1
                )));
            }
            sections.get_mut(&section).unwrap().insert(key, value);
        }
        Ok(RunConfig { sections })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    /// Canonical text form: sections and keys in sorted order.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (section, keys) in &self.sections {
            out.push_str(&format!("[{section}]\n"));
            for (k, v) in keys {
                out.push_str(&format!("{k} = {v}\n"));
            }
            out.push('\n');
        }
        out
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }

    /// Sets a value (used to resolve defaults before echoing).
    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    /// Fills a default when the key is absent; returns the resolved value.
    pub fn resolve(&mut self, section: &str, key: &str, default: impl Into<String>) -> String {
        if self.get(section, key).is_none() {
            self.set(section, key, default);
        }
        self.get(section, key).unwrap().to_string()
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::config(format!("[{section}] {key}: bad number {v:?}"))),
        }
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::config(format!("[{section}] {key}: bad count {v:?}"))),
        }
    }

    pub fn get_u64(&self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Error::config(format!("[{section}] {key}: bad integer {v:?}"))),
        }
    }

    /// Builds the potential model from [potential] (default: modified LJ).
    pub fn potential(&self) -> Result<PotentialModel> {
        let kind = self.get("potential", "kind").unwrap_or("lj");
        match kind {
            "lj" => {
                let mut p = LjPotential::default();
                if let Some(c) = self.get_f64("potential", "cutoff")? {
                    p.cutoff = c;
                }
                if let Some(c) = self.get_f64("potential", "lj_quad_coeff")? {
                    p.quad_coeff = c;
                }
                if let Some(c) = self.get_f64("potential", "lj_const_coeff")? {
                    p.const_coeff = c;
                }
                Ok(PotentialModel::Lj(p))
            }
            "eam" => {
                let mut p = EamPotential::default();
                if let Some(c) = self.get_f64("potential", "cutoff")? {
                    p.cutoff = c;
                }
                if let Some(c) = self.get_f64("potential", "eam_pair_scale")? {
                    p.pair_scale = c;
                }
                if let Some(c) = self.get_f64("potential", "eam_pair_decay")? {
                    p.pair_decay = c;
                }
                if let Some(c) = self.get_f64("potential", "eam_density_decay")? {
                    p.density_decay = c;
                }
                if let Some(c) = self.get_f64("potential", "eam_embed_scale")? {
                    p.embed_scale = c;
                }
                Ok(PotentialModel::Eam(p))
            }
            "pair-table" => {
                let path = self
                    .get("potential", "table_path")
                    .ok_or_else(|| Error::config("[potential] pair-table needs table_path"))?;
                let text = std::fs::read_to_string(path)?;
                Ok(PotentialModel::PairTable(PairTable::parse_csv(&text)?))
            }
            other => Err(Error::config(format!(
                "[potential] unknown kind {other:?} (lj | eam | pair-table)"
            ))),
        }
    }

    /// Builds the weighting function from [weighting]
    /// (default: constant-mollified, r_w = 1.5).
    pub fn weighting(&self) -> Result<WeightingFunction> {
        let kind = self.get("weighting", "kind").unwrap_or("constant-mollified");
        let r_w = self.get_f64("weighting", "r_w")?.unwrap_or(1.5);
        match kind {
            "constant" => WeightingFunction::constant(r_w),
            "constant-mollified" => {
                let epsilon = self
                    .get_f64("weighting", "epsilon")?
                    .unwrap_or(crate::weighting::DEFAULT_MOLLIFIER_FRACTION * r_w);
                WeightingFunction::new(KernelKind::ConstantMollified { epsilon }, r_w)
            }
            "gaussian" => {
                let cutoff_mult = self
                    .get_f64("weighting", "gaussian_cutoff")?
                    .unwrap_or(crate::weighting::DEFAULT_GAUSSIAN_CUTOFF);
                WeightingFunction::new(KernelKind::Gaussian { cutoff_mult }, r_w)
            }
            "quartic-spline" => WeightingFunction::quartic_spline(r_w),
            other => Err(Error::config(format!(
                "[weighting] unknown kind {other:?} (constant | constant-mollified | gaussian | quartic-spline)"
            ))),
        }
    }

    /// Builds the integrator config from [md].
    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let mut cfg = IntegratorConfig::default();
        if let Some(v) = self.get_f64("md", "dt")? {
            cfg.dt = v;
        }
        if let Some(v) = self.get_usize("md", "steps")? {
            cfg.steps = v;
        }
        if let Some(v) = self.get_usize("md", "stride")? {
            cfg.snapshot_stride = v;
        }
        if let Some(v) = self.get_u64("md", "seed")? {
            cfg.seed = v;
        }
        if let Some(v) = self.get_f64("md", "skin")? {
            cfg.skin = v;
        }
        Ok(cfg)
    }

    pub fn minimizer(&self) -> Result<MinimizerConfig> {
        let mut cfg = MinimizerConfig::default();
        if let Some(v) = self.get_f64("minimize", "ftol")? {
            cfg.force_tolerance = v;
        }
        if let Some(v) = self.get_usize("minimize", "maxiter")? {
            cfg.max_iterations = v;
        }
        if let Some(v) = self.get_f64("minimize", "max_step")? {
            cfg.max_step = v;
        }
        Ok(cfg)
    }

    /// Parses a whitespace-separated numeric triple.
    pub fn get_triple(&self, section: &str, key: &str) -> Result<Option<[f64; 3]>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => {
                let parts: Vec<f64> = v
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::config(format!("[{section}] {key}: bad triple {v:?}")))?;
                if parts.len() != 3 {
                    return Err(Error::config(format!(
                        "[{section}] {key}: expected three numbers, got {}",
                        parts.len()
                    )));
                }
                Ok(Some([parts[0], parts[1], parts[2]]))
            }
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}
