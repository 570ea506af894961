//! Parsers for the text and JSON inputs accepted by the command line:
//! simulation configs, dimension ranges and Bell index lists.
//!
//! All of them take untrusted input and report failures as
//! [`Error::Parse`] or [`Error::InvalidConfig`]; none of them panic.

use serde::Deserialize;

use crate::cerf::CloneParams;
use crate::error::{Error, Result};
use crate::qudit::Dim;
use crate::sim::ProtocolConfig;

/// Largest dimension the command line accepts.
pub const MAX_CLI_DIM: usize = 16;

/// Relative slack allowed on the normalization of a user-supplied attack
/// before it is rescaled onto the constraint surface.
pub const ATTACK_NORM_SLACK: f64 = 1e-3;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttack {
    v: f64,
    x: f64,
    y: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    rounds: u64,
    #[serde(default = "uniform_weights")]
    basis_weights: Vec<f64>,
    #[serde(default)]
    attack: Option<RawAttack>,
    seed: u64,
}

fn uniform_weights() -> Vec<f64> {
    vec![0.25; 4]
}

/// Reads a flat JSON config:
/// `{"n": 3, "rounds": 100000, "basis_weights": [..4..], "attack": {"v":..,"x":..,"y":..} | null, "seed": 42}`.
///
/// Attack parameters printed to a handful of digits are rescaled onto the
/// normalization surface when within [`ATTACK_NORM_SLACK`] of it.
pub fn parse_config(text: &str) -> Result<ProtocolConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = Dim::new(raw.n).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if raw.n > MAX_CLI_DIM {
        return Err(Error::InvalidConfig(format!("n = {} exceeds {MAX_CLI_DIM}", raw.n)));
    }
    let basis_weights: [f64; 4] = raw
        .basis_weights
        .try_into()
        .map_err(|w: Vec<f64>| Error::InvalidConfig(format!("expected 4 basis weights, got {}", w.len())))?;
    let attack = match raw.attack {
        None => None,
        Some(RawAttack { v, x, y }) => {
            let nf = raw.n as f64;
            let norm = v * v + (nf - 1.0) * x * x + nf * (nf - 1.0) * y * y;
            if !norm.is_finite() || (norm - 1.0).abs() > ATTACK_NORM_SLACK {
                return Err(Error::InvalidConfig(format!(
                    "attack v^2 + (N-1)x^2 + N(N-1)y^2 = {norm}, expected 1"
                )));
            }
            Some(CloneParams::normalized(n, v, x, y).map_err(|e| Error::InvalidConfig(e.to_string()))?)
        }
    };
    let cfg = ProtocolConfig { n, rounds: raw.rounds, basis_weights, attack, seed: raw.seed };
    cfg.validate()?;
    Ok(cfg)
}

/// Inclusive range `a..b` (or a single `a`) with 2 ≤ a ≤ b ≤ 16.
pub fn parse_dim_range(text: &str) -> Result<Vec<Dim>> {
    let text = text.trim();
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (text, text),
    };
    let lo: usize = lo.trim().parse().map_err(|_| Error::Parse(format!("bad range start in {text:?}")))?;
    let hi: usize = hi.trim().parse().map_err(|_| Error::Parse(format!("bad range end in {text:?}")))?;
    if lo < 2 || hi > MAX_CLI_DIM || lo > hi {
        return Err(Error::Parse(format!("range {lo}..{hi} violates 2 <= n_min <= n_max <= {MAX_CLI_DIM}")));
    }
    (lo..=hi).map(Dim::new).collect()
}

/// Comma-separated Bell labels `i,j,k,l`, each below N.
pub fn parse_bell_indices(text: &str, dim: Dim) -> Result<[usize; 4]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("expected 4 comma-separated indices, got {}", parts.len())));
    }
    let mut out = [0usize; 4];
    for (slot, p) in out.iter_mut().zip(&parts) {
        let v: usize = p.parse().map_err(|_| Error::Parse(format!("bad index {p:?}")))?;
        if v >= dim.get() {
            return Err(Error::Parse(format!("index {v} out of range for N = {dim}")));
        }
        *slot = v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_fields() {
        let cfg = parse_config(
            r#"{"n": 3, "rounds": 1000, "basis_weights": [0.25,0.25,0.25,0.25],
                "attack": {"v": 0.8, "x": 0.3, "y": 0.1}, "seed": 9}"#,
        );
        // 0.64 + 2*0.09 + 6*0.01 = 0.88: far off the surface
        assert!(matches!(cfg, Err(Error::InvalidConfig(_))));

        let y: f64 = 0.1;
        let x: f64 = 0.3;
        let v = (1.0 - 2.0 * x * x - 6.0 * y * y).sqrt();
        let text = format!(r#"{{"n":3,"rounds":1000,"attack":{{"v":{v:.6},"x":{x},"y":{y}}},"seed":9}}"#);
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.n.get(), 3);
        assert_eq!(cfg.basis_weights, [0.25; 4]);
        assert!(cfg.attack.is_some());
    }

    #[test]
    fn config_rejections() {
        assert!(parse_config("").is_err());
        assert!(parse_config("{}").is_err());
        assert!(parse_config(r#"{"n":1,"rounds":5,"seed":1}"#).is_err());
        assert!(parse_config(r#"{"n":99,"rounds":5,"seed":1}"#).is_err());
        assert!(parse_config(r#"{"n":3,"rounds":0,"seed":1}"#).is_err());
        assert!(parse_config(r#"{"n":3,"rounds":5,"seed":1,"basis_weights":[1]}"#).is_err());
        assert!(parse_config(r#"{"n":3,"rounds":5,"seed":1,"extra":true}"#).is_err());
        assert!(parse_config(r#"{"n":3,"rounds":5,"seed":1,"attack":null}"#).is_ok());
    }

    #[test]
    fn ranges() {
        let r = parse_dim_range("2..3").unwrap();
        assert_eq!(r.iter().map(|d| d.get()).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(parse_dim_range("5").unwrap().len(), 1);
        assert_eq!(parse_dim_range("2..=4").unwrap().len(), 3);
        for bad in ["1..2", "3..2", "2..17", "", "a..b", "..", "2..3..4"] {
            assert!(parse_dim_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn bell_indices() {
        let d = Dim::new(3).unwrap();
        assert_eq!(parse_bell_indices("0, 1,2,0", d).unwrap(), [0, 1, 2, 0]);
        assert!(parse_bell_indices("0,1,3,0", d).is_err());
        assert!(parse_bell_indices("0,1,2", d).is_err());
        assert!(parse_bell_indices("0,1,2,-1", d).is_err());
    }
}
