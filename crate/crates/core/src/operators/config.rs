//! Flat text form of [`WalkSpec`].
//!
//! One `key = value` pair per line (TOML syntax, no tables):
//!
//! ```text
//! kind = "three_step_perturbed"   # see WalkKind::name
//! sites = 801
//! boundary = "periodic"           # or "open"
//! gamma = 0.1
//! delta = 0.05
//! layout = "inner_outer"          # homogeneous | inner_outer | left_right
//! half_width = 50
//! theta1_inner_over_pi = 0.4
//! theta2_inner_over_pi = 0.1
//! theta1_outer_over_pi = -0.2
//! theta2_outer_over_pi = 0.3
//! disorder_amplitude = 0.0
//! disorder_seed = 0
//! ```
//!
//! Every angle `<name>` may be given either in radians as `<name>` or as a
//! multiple of pi as `<name>_over_pi`, not both. Angle names per layout:
//! `theta1, theta2` (homogeneous); `theta{1,2}_inner, theta{1,2}_outer`
//! (inner_outer); `theta{1,2}_left, theta{1,2}_right` (left_right).

use std::f64::consts::PI;
use std::fmt::Write as _;

use toml::{Table, Value};

use super::build::{WalkKind, WalkSpec};
use super::coin::{CoinAngles, CoinProfile, Layout};
use super::lattice::{Boundary, Lattice};
use crate::error::{Error, Result};

pub const WALK_KEYS: &[&str] =
    &["kind", "sites", "boundary", "gamma", "delta", "layout", "half_width", "disorder_amplitude", "disorder_seed"];

const ANGLE_KEYS: &[&str] = &[
    "theta1",
    "theta2",
    "theta1_inner",
    "theta2_inner",
    "theta1_outer",
    "theta2_outer",
    "theta1_left",
    "theta2_left",
    "theta1_right",
    "theta2_right",
];

/// True if `key` names a walk field (including `_over_pi` angle forms).
pub fn is_walk_key(key: &str) -> bool {
    WALK_KEYS.contains(&key) || ANGLE_KEYS.iter().any(|a| key == *a || key.strip_suffix("_over_pi") == Some(a))
}

fn number(table: &Table, key: &str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Float(f)) => Ok(Some(*f)),
        Some(Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(v) => Err(Error::Config(format!("{key}: expected a number, got {v}"))),
    }
}

fn integer(table: &Table, key: &str) -> Result<Option<i64>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Integer(i)) => Ok(Some(*i)),
        Some(v) => Err(Error::Config(format!("{key}: expected an integer, got {v}"))),
    }
}

fn string<'a>(table: &'a Table, key: &str) -> Result<Option<&'a str>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(v) => Err(Error::Config(format!("{key}: expected a string, got {v}"))),
    }
}

/// Angle in radians from `name` or `name_over_pi`.
pub fn angle(table: &Table, name: &str) -> Result<Option<f64>> {
    let over = format!("{name}_over_pi");
    match (number(table, name)?, number(table, &over)?) {
        (Some(_), Some(_)) => Err(Error::Config(format!("both {name} and {over} given"))),
        (Some(r), None) => Ok(Some(r)),
        (None, Some(p)) => Ok(Some(p * PI)),
        (None, None) => Ok(None),
    }
}

fn required_angle(table: &Table, name: &str) -> Result<f64> {
    angle(table, name)?.ok_or_else(|| Error::Config(format!("missing {name} (or {name}_over_pi)")))
}

fn pair(table: &Table, suffix: &str) -> Result<CoinAngles> {
    Ok(CoinAngles::new(
        required_angle(table, &format!("theta1{suffix}"))?,
        required_angle(table, &format!("theta2{suffix}"))?,
    ))
}

fn nonnegative(table: &Table, key: &str) -> Result<Option<usize>> {
    integer(table, key)?
        .map(|v| usize::try_from(v).map_err(|_| Error::Config(format!("{key} must be >= 0, got {v}"))))
        .transpose()
}

/// Parses walk fields from a flat table, ignoring keys that are not walk
/// fields. `default_sites` applies when `sites` is absent.
pub fn walk_spec_from_table(table: &Table, default_sites: usize) -> Result<WalkSpec> {
    let kind = match string(table, "kind")? {
        Some(k) => WalkKind::from_name(k).ok_or_else(|| Error::Config(format!("unknown kind {k:?}")))?,
        None => WalkKind::ThreeStep,
    };
    let sites = nonnegative(table, "sites")?.unwrap_or(default_sites);
    let boundary = match string(table, "boundary")? {
        None | Some("periodic") => Boundary::Periodic,
        Some("open") => Boundary::Open,
        Some(b) => return Err(Error::Config(format!("unknown boundary {b:?}"))),
    };
    let layout = match string(table, "layout")? {
        None | Some("homogeneous") => Layout::Homogeneous(pair(table, "")?),
        Some("inner_outer") => Layout::InnerOuter {
            half_width: nonnegative(table, "half_width")?
                .ok_or_else(|| Error::Config("inner_outer layout needs half_width".into()))?,
            inner: pair(table, "_inner")?,
            outer: pair(table, "_outer")?,
        },
        Some("left_right") => Layout::LeftRight { left: pair(table, "_left")?, right: pair(table, "_right")? },
        Some(l) => return Err(Error::Config(format!("unknown layout {l:?}"))),
    };
    let coins = CoinProfile {
        layout,
        delta: number(table, "delta")?.unwrap_or(0.0),
        disorder_amplitude: number(table, "disorder_amplitude")?.unwrap_or(0.0),
        disorder_seed: integer(table, "disorder_seed")?.unwrap_or(0) as u64,
    };
    let spec = WalkSpec::new(Lattice::new(sites, boundary)?, coins, number(table, "gamma")?.unwrap_or(0.0), kind);
    spec.validate()?;
    Ok(spec)
}

pub fn parse_walk_spec(text: &str) -> Result<WalkSpec> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    if let Some(k) = table.keys().find(|k| !is_walk_key(k)) {
        return Err(Error::Config(format!("unknown key {k:?}")));
    }
    let sites = nonnegative(&table, "sites")?.ok_or_else(|| Error::Config("missing sites".into()))?;
    walk_spec_from_table(&table, sites)
}

/// Writes `spec` in the flat form. Angles are written in radians with
/// round-trip precision.
pub fn format_walk_spec(spec: &WalkSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind = \"{}\"", spec.kind.name());
    let _ = writeln!(s, "sites = {}", spec.lattice.num_sites());
    let b = match spec.lattice.boundary() {
        Boundary::Periodic => "periodic",
        Boundary::Open => "open",
    };
    let _ = writeln!(s, "boundary = \"{b}\"");
    let _ = writeln!(s, "gamma = {:?}", spec.gamma);
    let _ = writeln!(s, "delta = {:?}", spec.coins.delta);
    let angles = |s: &mut String, suffix: &str, a: CoinAngles| {
        let _ = writeln!(s, "theta1{suffix} = {:?}", a.theta1);
        let _ = writeln!(s, "theta2{suffix} = {:?}", a.theta2);
    };
    match spec.coins.layout {
        Layout::Homogeneous(a) => {
            let _ = writeln!(s, "layout = \"homogeneous\"");
            angles(&mut s, "", a);
        }
        Layout::InnerOuter { half_width, inner, outer } => {
            let _ = writeln!(s, "layout = \"inner_outer\"");
            let _ = writeln!(s, "half_width = {half_width}");
            angles(&mut s, "_inner", inner);
            angles(&mut s, "_outer", outer);
        }
        Layout::LeftRight { left, right } => {
            let _ = writeln!(s, "layout = \"left_right\"");
            angles(&mut s, "_left", left);
            angles(&mut s, "_right", right);
        }
    }
    let _ = writeln!(s, "disorder_amplitude = {:?}", spec.coins.disorder_amplitude);
    let _ = writeln!(s, "disorder_seed = {}", spec.coins.disorder_seed);
    s
}
