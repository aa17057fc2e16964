//! Plain-text `key = value` run configuration.
//!
//! ```text
//! # 2x2 half filling
//! nx = 2
//! ny = 2
//! u = 4
//! ansatz = vipsa
//! max_epochs = 30
//! ```
//!
//! Blank lines and `#` comments are ignored. Every key may appear once;
//! unknown keys are rejected. See [`KEYS`] for the full schema.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hva::HvaConfig;
use crate::lattice::{Boundary, GridSpec};
use crate::vipsa::VipsaConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ansatz {
    Vipsa,
    Hva,
}

impl Ansatz {
    pub fn tag(self) -> &'static str {
        match self {
            Ansatz::Vipsa => "vipsa",
            Ansatz::Hva => "hva",
        }
    }
}

/// Recognised keys with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    ("nx", "sites along x (required)"),
    ("ny", "sites along y (required)"),
    ("bc_x", "open | periodic (default: open for length 2, periodic otherwise)"),
    ("bc_y", "open | periodic (same default rule)"),
    ("t", "hopping amplitude (default 1)"),
    ("u", "on-site interaction (required)"),
    ("n_up", "spin-up electrons (default ceil(N/2))"),
    ("n_down", "spin-down electrons (default floor(N/2))"),
    ("occupied_up", "comma-separated mode indices choosing a degenerate Fermi sea"),
    ("occupied_down", "as occupied_up, for spin down"),
    ("ansatz", "vipsa | hva (default vipsa)"),
    ("r", "VIPSA selection ratio (default 0.1)"),
    ("eps1", "VIPSA terminal gradient tolerance (default 1e-2)"),
    ("eps2", "VIPSA per-step energy tolerance for epoch convergence (default 1e-2)"),
    ("max_epochs", "VIPSA epoch limit (default 30)"),
    ("max_inner_steps", "VIPSA ADAM steps per epoch (default 2000)"),
    ("warm_start", "VIPSA keeps ADAM moments between epochs (default true)"),
    ("layers", "HVA layers S (default 10)"),
    ("hva_tol", "HVA per-step energy tolerance (default 1e-8)"),
    ("max_steps", "HVA ADAM step limit (default 2000)"),
    ("jitter", "HVA kick half-width for a stationary start (default 1e-3)"),
    ("seed", "HVA jitter seed (default 7)"),
    ("lr", "ADAM learning rate (default 1e-2)"),
    ("beta1", "ADAM first-moment decay (default 0.9)"),
    ("beta2", "ADAM second-moment decay (default 0.999)"),
    ("adam_epsilon", "ADAM stabilizer (default 1e-8)"),
    ("convergence_window", "consecutive quiet steps for convergence (default 10)"),
    ("output_dir", "artifact directory (default runs/<grid>-u<U>-<ansatz>)"),
    ("cache", "reuse cached ground spaces (default true)"),
    ("cache_dir", "ground-space cache directory (default <output_dir>/../cache)"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub n_up: usize,
    pub n_down: usize,
    pub occupied_up: Option<Vec<usize>>,
    pub occupied_down: Option<Vec<usize>>,
    pub ansatz: Ansatz,
    pub vipsa: VipsaConfig,
    pub hva: HvaConfig,
    pub output_dir: PathBuf,
    pub cache: bool,
    pub cache_dir: PathBuf,
}

/// Default particle numbers: `(ceil(N/2), floor(N/2))`.
pub fn default_filling(grid: &GridSpec) -> (usize, usize) {
    let n = grid.n_sites();
    (n.div_ceil(2), n / 2)
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<(usize, T)>> {
        let Some((line, raw)) = self.values.remove(key) else {
            return Ok(None);
        };
        raw.parse::<T>()
            .map(|v| Some((line, v)))
            .map_err(|_| Error::Config { line, message: format!("invalid value {raw:?} for {key}") })
    }

    fn get<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.take(key)?.map_or(default, |(_, v)| v))
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some((line, raw)) = self.values.remove(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| Error::Config { line, message: format!("invalid index list {raw:?} for {key}") })
    }
}

fn parse_entries(text: &str) -> Result<Entries> {
    let mut values = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config { line, message: format!("expected 'key = value', got {content:?}") });
        };
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim().to_string());
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(Error::Config { line, message: format!("unknown key {key:?}") });
        }
        if value.is_empty() {
            return Err(Error::Config { line, message: format!("missing value for {key}") });
        }
        if let Some((first, _)) = values.get(&key) {
            return Err(Error::Config { line, message: format!("{key} already set on line {first}") });
        }
        values.insert(key, (line, value));
    }
    Ok(Entries { values })
}

impl ExperimentConfig {
    /// Parses and fully validates a configuration.
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = parse_entries(text)?;
        let last_line = text.lines().count().max(1);
        let required = |v: Option<(usize, usize)>, key: &str| {
            v.ok_or_else(|| Error::Config { line: last_line, message: format!("missing required key {key}") })
        };
        let (nx_line, nx) = required(e.take("nx")?, "nx")?;
        let (_, ny) = required(e.take("ny")?, "ny")?;
        let (u_line, u) = e
            .take::<f64>("u")?
            .ok_or_else(|| Error::Config { line: last_line, message: "missing required key u".into() })?;
        let t = e.get("t", 1.0)?;
        let bc_x = e.get("bc_x", Boundary::default_for(nx))?;
        let bc_y = e.get("bc_y", Boundary::default_for(ny))?;
        let grid = GridSpec::with_boundaries(nx, ny, bc_x, bc_y, t, u)
            .map_err(|err| Error::Config { line: nx_line.max(u_line), message: err.to_string() })?;

        let (du, dd) = default_filling(&grid);
        let n_up = e.take("n_up")?;
        let n_down = e.take("n_down")?;
        for (entry, name) in [(&n_up, "n_up"), (&n_down, "n_down")] {
            if let Some((line, n)) = entry {
                if *n > grid.n_sites() {
                    return Err(Error::Config {
                        line: *line,
                        message: format!("{name} = {n} exceeds {} modes", grid.n_sites()),
                    });
                }
            }
        }
        let n_up = n_up.map_or(du, |v| v.1);
        let n_down = n_down.map_or(dd, |v| v.1);
        let occupied_up = e.list("occupied_up")?;
        let occupied_down = e.list("occupied_down")?;

        let ansatz = match e.take::<String>("ansatz")? {
            None => Ansatz::Vipsa,
            Some((_, s)) if s == "vipsa" => Ansatz::Vipsa,
            Some((_, s)) if s == "hva" => Ansatz::Hva,
            Some((line, s)) => {
                return Err(Error::Config { line, message: format!("unknown ansatz {s:?} (vipsa | hva)") })
            }
        };

        let dv = VipsaConfig::default();
        let dh = HvaConfig::default();
        let lr = e.get("lr", dv.lr)?;
        let beta1 = e.get("beta1", dv.beta1)?;
        let beta2 = e.get("beta2", dv.beta2)?;
        let adam_epsilon = e.get("adam_epsilon", dv.adam_epsilon)?;
        let convergence_window = e.get("convergence_window", dv.convergence_window)?;
        let vipsa = VipsaConfig {
            r: e.get("r", dv.r)?,
            eps1: e.get("eps1", dv.eps1)?,
            eps2: e.get("eps2", dv.eps2)?,
            lr,
            beta1,
            beta2,
            adam_epsilon,
            max_epochs: e.get("max_epochs", dv.max_epochs)?,
            max_inner_steps: e.get("max_inner_steps", dv.max_inner_steps)?,
            convergence_window,
            warm_start: e.get("warm_start", dv.warm_start)?,
        };
        let hva = HvaConfig {
            layers: e.get("layers", dh.layers)?,
            lr,
            beta1,
            beta2,
            adam_epsilon,
            tol: e.get("hva_tol", dh.tol)?,
            convergence_window,
            max_steps: e.get("max_steps", dh.max_steps)?,
            jitter: e.get("jitter", dh.jitter)?,
            seed: e.get("seed", dh.seed)?,
        };
        let default_dir = PathBuf::from("runs").join(format!("{}-u{}-{}", grid.shape_tag(), u, ansatz.tag()));
        let output_dir = e.take::<PathBuf>("output_dir")?.map_or(default_dir, |v| v.1);
        let cache = e.get("cache", true)?;
        let cache_dir = e
            .take::<PathBuf>("cache_dir")?
            .map_or_else(|| output_dir.parent().unwrap_or(&output_dir).join("cache"), |v| v.1);
        debug_assert!(e.values.is_empty(), "every key is consumed");

        let config = ExperimentConfig {
            grid,
            n_up,
            n_down,
            occupied_up,
            occupied_down,
            ansatz,
            vipsa,
            hva,
            output_dir,
            cache,
            cache_dir,
        };
        config.validate().map_err(|err| match err {
            Error::Config { .. } => err,
            other => Error::Config { line: last_line, message: other.to_string() },
        })?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        match self.ansatz {
            Ansatz::Vipsa => self.vipsa.validate()?,
            Ansatz::Hva => self.hva.validate()?,
        }
        for (occ, n, name) in
            [(&self.occupied_up, self.n_up, "occupied_up"), (&self.occupied_down, self.n_down, "occupied_down")]
        {
            if let Some(list) = occ {
                if list.len() != n {
                    return Err(Error::Invalid(format!("{name} lists {} modes for {n} electrons", list.len())));
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = ExperimentConfig::parse("nx = 3\nny = 3\nu = 2 # coupling\n\nansatz = hva\nlayers = 4\n").unwrap();
        assert_eq!((c.n_up, c.n_down), (5, 4));
        assert_eq!(c.grid.bc_x, Boundary::Periodic);
        assert_eq!(c.ansatz, Ansatz::Hva);
        assert_eq!(c.hva.layers, 4);
        assert_eq!(c.vipsa, VipsaConfig::default());
        let c = ExperimentConfig::parse("nx=2\nny=4\nu=2\nbc_y = open\n").unwrap();
        assert_eq!(c.grid.bc_y, Boundary::Open);
        assert_eq!((c.n_up, c.n_down), (4, 4));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("nx = 2\nny = 2\nu = 4\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 4, .. }), "{err}");
        let err = ExperimentConfig::parse("nx = 2\nny = two\nu = 4\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("nx = 2\nny = 2\nu = 4\nnx = 3\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 4, .. }), "{err}");
        let err = ExperimentConfig::parse("nx = 2\nny = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }), "{err}");
        let err = ExperimentConfig::parse("nx 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }), "{err}");
        let err = ExperimentConfig::parse("nx = 2\nny = 2\nu = 4\nr = 0\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }), "{err}");
    }
}
