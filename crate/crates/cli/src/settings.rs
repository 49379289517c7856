//! Resolved run configuration.
//!
//! A config file is flat TOML. Top-level keys apply to every subcommand;
//! a `[<subcommand>]` table overrides them for that subcommand only.
//! Command-line flags override both. Every value read, including
//! defaults, is recorded for the manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use anyhow::{bail, Result};
use ptwalk_core::operators::config::{angle, is_walk_key, walk_spec_from_table};
use ptwalk_core::spectrum::SpectrumOptions;
use ptwalk_core::WalkSpec;
use serde_json::{json, Value as Json};
use toml::{Table, Value};

pub const SUBCOMMANDS: &[&str] = &[
    "dispersion",
    "phase-diagram",
    "spectrum",
    "edge-map",
    "delta-sweep",
    "ep-find",
    "disorder",
    "evolve",
    "infer-edges",
];

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k_res: Option<usize>,
    pub sites: Option<usize>,
    pub steps: Option<usize>,
}

impl Overrides {
    fn entries(&self) -> Vec<(&'static str, Value)> {
        let mut v = Vec::new();
        if let Some(s) = self.seed {
            v.push(("seed", Value::Integer(s as i64)));
        }
        if let Some(k) = self.k_res {
            v.push(("k_res", Value::Integer(k as i64)));
        }
        if let Some(n) = self.sites {
            v.push(("sites", Value::Integer(n as i64)));
        }
        if let Some(t) = self.steps {
            v.push(("steps", Value::Integer(t as i64)));
        }
        v
    }
}

pub struct Settings {
    table: Table,
    from_flags: BTreeSet<String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, Json>,
}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ptwalk_core::Error::Config(msg.into()).into()
}

impl Settings {
    /// Settings for `subcommand` from config text (possibly empty).
    pub fn new(text: &str, subcommand: &str, overrides: &Overrides) -> Result<Self> {
        let file: Table = text.parse().map_err(|e: toml::de::Error| config_error(e.to_string()))?;
        let mut table = Table::new();
        let mut section = None;
        for (k, v) in file {
            match v {
                Value::Table(t) => {
                    if !SUBCOMMANDS.contains(&k.as_str()) {
                        return Err(config_error(format!("unknown section [{k}]")));
                    }
                    if k == subcommand {
                        section = Some(t);
                    }
                }
                v => {
                    table.insert(k, v);
                }
            }
        }
        table.extend(section.unwrap_or_default());
        let mut from_flags = BTreeSet::new();
        for (k, v) in overrides.entries() {
            table.insert(k.to_string(), v);
            from_flags.insert(k.to_string());
        }
        Ok(Self { table, from_flags, used: BTreeSet::new(), resolved: BTreeMap::new() })
    }

    fn take(&mut self, key: &str) -> Option<&Value> {
        self.used.insert(key.to_string());
        self.table.get(key)
    }

    fn record(&mut self, key: &str, v: Json) {
        self.resolved.insert(key.to_string(), v);
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = match self.take(key) {
            None => default,
            Some(Value::Float(f)) => *f,
            Some(Value::Integer(i)) => *i as f64,
            Some(v) => bail!(config_error(format!("{key}: expected a number, got {v}"))),
        };
        if !v.is_finite() {
            bail!(config_error(format!("{key} must be finite")));
        }
        self.record(key, json!(v));
        Ok(v)
    }

    fn integer(&mut self, key: &str) -> Result<Option<i64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(v) => Err(config_error(format!("{key}: expected an integer, got {v}"))),
        }
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = match self.integer(key)? {
            None => default,
            Some(i) => usize::try_from(i).map_err(|_| config_error(format!("{key} must be >= 0, got {i}")))?,
        };
        self.record(key, json!(v));
        Ok(v)
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        Ok(self.usize(key, default as usize)? as u64)
    }

    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        let v = match self.take(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(v) => bail!(config_error(format!("{key}: expected true or false, got {v}"))),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    pub fn string(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let v = match self.take(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => bail!(config_error(format!("{key}: expected a string, got {v}"))),
        };
        if !allowed.contains(&v.as_str()) {
            bail!(config_error(format!("{key} must be one of {allowed:?}, got {v:?}")));
        }
        self.record(key, json!(v));
        Ok(v)
    }

    pub fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let v = match self.take(key) {
            None => return Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| match x {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    v => Err(config_error(format!("{key}: expected numbers, got {v}"))),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(v) => bail!(config_error(format!("{key}: expected a list, got {v}"))),
        };
        self.record(key, json!(v));
        Ok(Some(v))
    }

    pub fn usize_list(&mut self, key: &str) -> Result<Vec<usize>> {
        let v = match self.take(key) {
            None => Vec::new(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| match x {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    v => Err(config_error(format!("{key}: expected non-negative integers, got {v}"))),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(v) => bail!(config_error(format!("{key}: expected a list, got {v}"))),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    /// Angle in radians from `name` or `name_over_pi`; recorded as a
    /// multiple of π.
    pub fn angle(&mut self, name: &str, default_over_pi: Option<f64>) -> Result<f64> {
        let over = format!("{name}_over_pi");
        self.used.insert(name.to_string());
        self.used.insert(over.clone());
        let v = match (angle(&self.table, name)?, default_over_pi) {
            (Some(v), _) => v,
            (None, Some(d)) => d * PI,
            (None, None) => bail!(config_error(format!("missing {name} (or {over})"))),
        };
        self.record(&over, json!(v / PI));
        Ok(v)
    }

    /// Walk fields; see `ptwalk_core::operators::config`.
    pub fn walk(&mut self, default_sites: usize) -> Result<WalkSpec> {
        let keys: Vec<String> = self.table.keys().filter(|k| is_walk_key(k)).cloned().collect();
        self.used.extend(keys);
        let spec = walk_spec_from_table(&self.table, default_sites)?;
        self.record("walk", serde_json::to_value(spec)?);
        Ok(spec)
    }

    pub fn spectrum_options(&mut self) -> Result<SpectrumOptions> {
        let d = SpectrumOptions::default();
        Ok(SpectrumOptions {
            max_sites: self.usize("max_sites", d.max_sites)?,
            tol_edge: self.f64("tol_edge", d.tol_edge)?,
            tol_real: self.f64("tol_real", d.tol_real)?,
            window: self.usize("window", d.window)?,
            weight_fraction: self.f64("weight_fraction", d.weight_fraction)?,
            defect_window: self.f64("defect_window", d.defect_window)?,
            near_defective_cond: self.f64("near_defective_cond", d.near_defective_cond)?,
        })
    }

    /// Fails on keys the subcommand never read. Flags a subcommand has no
    /// use for are ignored.
    pub fn check(&self) -> Result<()> {
        if let Some(k) = self.table.keys().find(|k| !self.used.contains(*k) && !self.from_flags.contains(*k)) {
            bail!(config_error(format!("unknown key {k:?}")));
        }
        Ok(())
    }

    pub fn finish(self) -> Result<Json> {
        self.check()?;
        Ok(serde_json::to_value(self.resolved)?)
    }
}
