//! Named color centers and protocol rows, built in or loaded from TOML.
//!
//! A preset file may hold any number of `[[center]]` and `[[protocol]]`
//! tables. Entries loaded later replace earlier ones with the same name.

use crate::protocol::{location_presets, rate_presets, ProtocolPreset};
use crate::spin::{builtin_centers, ColorCenter};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Environment variable naming an extra preset directory.
pub const PRESETS_ENV: &str = "TRANSDUCTION_PRESETS";

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetFile {
    #[serde(default)]
    pub center: Vec<ColorCenter>,
    #[serde(default)]
    pub protocol: Vec<ProtocolPreset>,
}

impl PresetFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: PresetFile = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        for c in &file.center {
            c.validate().map_err(|e| Error::config(format!("center `{}`: {e}", c.name)))?;
        }
        for p in &file.protocol {
            p.validate().map_err(|e| Error::config(format!("protocol `{}`: {e}", p.name)))?;
        }
        Ok(file)
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    centers: Vec<ColorCenter>,
    protocols: Vec<ProtocolPreset>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Catalog {
    pub fn builtin() -> Self {
        let mut protocols = rate_presets();
        protocols.extend(location_presets());
        Self { centers: builtin_centers(), protocols }
    }

    /// Built-in catalog extended by the directory in [`PRESETS_ENV`], if set.
    pub fn from_env() -> Result<Self> {
        let mut cat = Self::builtin();
        if let Some(dir) = std::env::var_os(PRESETS_ENV) {
            cat.load_dir(Path::new(&dir))?;
        }
        Ok(cat)
    }

    /// Loads every `*.toml` file in `dir`, in file-name order.
    pub fn load_dir(&mut self, dir: &Path) -> Result<()> {
        let mut paths = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "toml") {
                paths.push(path);
            }
        }
        paths.sort();
        for path in paths {
            let text = std::fs::read_to_string(&path)?;
            let file = PresetFile::parse(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
            self.merge(file);
        }
        Ok(())
    }

    pub fn merge(&mut self, file: PresetFile) {
        for c in file.center {
            match self.centers.iter_mut().find(|x| x.name == c.name) {
                Some(slot) => *slot = c,
                None => self.centers.push(c),
            }
        }
        for p in file.protocol {
            match self.protocols.iter_mut().find(|x| x.name == p.name) {
                Some(slot) => *slot = p,
                None => self.protocols.push(p),
            }
        }
    }

    pub fn centers(&self) -> &[ColorCenter] {
        &self.centers
    }

    pub fn protocols(&self) -> &[ProtocolPreset] {
        &self.protocols
    }

    pub fn center(&self, name: &str) -> Result<&ColorCenter> {
        self.centers
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::config(format!("unknown center preset `{name}`")))
    }

    pub fn protocol(&self, name: &str) -> Result<&ProtocolPreset> {
        self.protocols
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::config(format!("unknown protocol preset `{name}`")))
    }
}
