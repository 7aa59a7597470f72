//! Declarative pipeline configuration: a TOML file plus flag overrides,
//! flags winning.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use geosocial::Scalar;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    #[serde(default)]
    pub params: Params,
    pub output: Output,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Raw line-delimited archive.
    pub archive: PathBuf,
    pub hierarchy: PathBuf,
    pub aliases: Option<PathBuf>,
    pub male_names: PathBuf,
    pub female_names: PathBuf,
    pub stopwords: PathBuf,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub bin_width: i64,
    pub keep_fraction: f64,
    pub damping: Scalar,
    pub tolerance: Scalar,
    pub max_iter: usize,
    pub window: usize,
    pub top_k_keywords: usize,
    pub top_k_terms: usize,
    pub cell_size: Scalar,
    pub min_count: u64,
    /// `[latitude, longitude]`; defaults to the median coordinates.
    pub hex_origin: Option<(Scalar, Scalar)>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            bin_width: 300,
            keep_fraction: 0.001,
            damping: 0.85,
            tolerance: 1e-10,
            max_iter: 200,
            window: 7,
            top_k_keywords: 50,
            top_k_terms: 25,
            cell_size: 500.0,
            min_count: 20,
            hex_origin: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub directory: PathBuf,
}

/// Flag-level overrides for `run`; every set field beats the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub bin_width: Option<i64>,
    pub keep_fraction: Option<f64>,
    pub damping: Option<Scalar>,
    pub tolerance: Option<Scalar>,
    pub max_iter: Option<usize>,
    pub window: Option<usize>,
    pub top_k_keywords: Option<usize>,
    pub top_k_terms: Option<usize>,
    pub cell_size: Option<Scalar>,
    pub min_count: Option<u64>,
    pub hex_origin: Option<(Scalar, Scalar)>,
}

impl PipelineConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<PipelineConfig, String> {
        let data = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut config: PipelineConfig =
            toml::from_str(&data).map_err(|e| format!("bad config {}: {e}", path.display()))?;

        // paths in the file are relative to the file's directory
        if let Some(base) = path.parent() {
            let anchor = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&p);
                }
            };
            anchor(&mut config.inputs.archive);
            anchor(&mut config.inputs.hierarchy);
            if let Some(aliases) = config.inputs.aliases.as_mut() {
                anchor(aliases);
            }
            anchor(&mut config.inputs.male_names);
            anchor(&mut config.inputs.female_names);
            anchor(&mut config.inputs.stopwords);
            anchor(&mut config.output.directory);
        }

        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    fn apply(&mut self, overrides: &Overrides) {
        let p = &mut self.params;
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = overrides.$field {
                    p.$field = v;
                }
            };
        }
        take!(bin_width);
        take!(keep_fraction);
        take!(damping);
        take!(tolerance);
        take!(max_iter);
        take!(window);
        take!(top_k_keywords);
        take!(top_k_terms);
        take!(cell_size);
        take!(min_count);
        if overrides.hex_origin.is_some() {
            p.hex_origin = overrides.hex_origin;
        }
        if let Some(dir) = &overrides.out_dir {
            self.output.directory = dir.clone();
        }
    }

    fn validate(&self) -> Result<(), String> {
        let must_exist: [(&str, &Path); 5] = [
            ("archive", &self.inputs.archive),
            ("hierarchy", &self.inputs.hierarchy),
            ("male_names", &self.inputs.male_names),
            ("female_names", &self.inputs.female_names),
            ("stopwords", &self.inputs.stopwords),
        ];
        for (name, path) in must_exist {
            if !path.is_file() {
                return Err(format!("{name} file not found: {}", path.display()));
            }
        }
        if let Some(aliases) = &self.inputs.aliases {
            if !aliases.is_file() {
                return Err(format!("aliases file not found: {}", aliases.display()));
            }
        }

        let p = &self.params;
        if p.bin_width <= 0 {
            return Err(format!("bin_width must be positive, got {}", p.bin_width));
        }
        if !(p.keep_fraction > 0.0 && p.keep_fraction <= 1.0) {
            return Err(format!("keep_fraction must be in (0, 1], got {}", p.keep_fraction));
        }
        if !(0.0..1.0).contains(&p.damping) {
            return Err(format!("damping must be in [0, 1), got {}", p.damping));
        }
        if p.tolerance.is_nan() || p.tolerance <= 0.0 {
            return Err(format!("tolerance must be positive, got {}", p.tolerance));
        }
        if p.max_iter == 0 {
            return Err("max_iter must be at least 1".to_string());
        }
        if p.top_k_keywords == 0 || p.top_k_terms == 0 {
            return Err("top-k values must be at least 1".to_string());
        }
        if p.cell_size.is_nan() || p.cell_size <= 0.0 {
            return Err(format!("cell_size must be positive, got {}", p.cell_size));
        }
        if p.min_count == 0 {
            return Err("min_count must be at least 1".to_string());
        }
        if let Some((lat, lon)) = p.hex_origin {
            if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                return Err(format!("hex_origin out of range: ({lat}, {lon})"));
            }
        }
        Ok(())
    }
}

/// Parses a `lat,lon` pair for `--origin`.
pub fn parse_lat_lon(s: &str) -> Result<(Scalar, Scalar), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected lat,lon but got {s:?}"));
    }
    let lat: Scalar = parts[0].trim().parse().map_err(|e| format!("bad latitude: {e}"))?;
    let lon: Scalar = parts[1].trim().parse().map_err(|e| format!("bad longitude: {e}"))?;
    Ok((lat, lon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_inputs(dir: &Path) {
        for name in ["a.jsonl", "h.csv", "m.txt", "f.txt", "s.txt"] {
            std::fs::write(dir.join(name), "x").unwrap();
        }
    }

    fn base_toml() -> &'static str {
        "[inputs]\narchive = \"a.jsonl\"\nhierarchy = \"h.csv\"\nmale_names = \"m.txt\"\n\
         female_names = \"f.txt\"\nstopwords = \"s.txt\"\n\n[output]\ndirectory = \"out\"\n"
    }

    #[test]
    fn loads_with_defaults_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        write_inputs(dir.path());
        let config_path = dir.path().join("run.toml");
        let mut f = std::fs::File::create(&config_path).unwrap();
        write!(f, "{}", base_toml()).unwrap();

        let config = PipelineConfig::load(&config_path, &Overrides::default()).unwrap();
        assert_eq!(config.params.bin_width, 300);
        assert_eq!(config.params.top_k_keywords, 50);
        assert!(config.inputs.archive.ends_with("a.jsonl"));
        assert!(config.inputs.archive.is_absolute() || config.inputs.archive.starts_with(dir.path()));
    }

    #[test]
    fn overrides_beat_file_values() {
        let dir = tempfile::tempdir().unwrap();
        write_inputs(dir.path());
        let config_path = dir.path().join("run.toml");
        std::fs::write(&config_path, format!("{}\n[params]\nwindow = 3\n", base_toml())).unwrap();

        let overrides = Overrides { window: Some(11), ..Default::default() };
        let config = PipelineConfig::load(&config_path, &overrides).unwrap();
        assert_eq!(config.params.window, 11);
    }

    #[test]
    fn missing_input_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        write_inputs(dir.path());
        std::fs::remove_file(dir.path().join("h.csv")).unwrap();
        let config_path = dir.path().join("run.toml");
        std::fs::write(&config_path, base_toml()).unwrap();
        let err = PipelineConfig::load(&config_path, &Overrides::default()).unwrap_err();
        assert!(err.contains("hierarchy"), "{err}");
    }

    #[test]
    fn rejects_out_of_range_params() {
        let dir = tempfile::tempdir().unwrap();
        write_inputs(dir.path());
        let config_path = dir.path().join("run.toml");
        std::fs::write(
            &config_path,
            format!("{}\n[params]\nkeep_fraction = 1.5\n", base_toml()),
        )
        .unwrap();
        let err = PipelineConfig::load(&config_path, &Overrides::default()).unwrap_err();
        assert!(err.contains("keep_fraction"), "{err}");
    }

    #[test]
    fn lat_lon_parsing() {
        assert_eq!(parse_lat_lon("-33.45,-70.67").unwrap(), (-33.45, -70.67));
        assert_eq!(parse_lat_lon(" -33.45 , -70.67 ").unwrap(), (-33.45, -70.67));
        assert!(parse_lat_lon("1,2,3").is_err());
        assert!(parse_lat_lon("abc,1").is_err());
    }
}
