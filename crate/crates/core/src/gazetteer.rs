//! Toponym gazetteer: template expansion over an administrative hierarchy
//! and exact-key resolution of free-text profile locations.
//!
//! The hierarchy is a tree commune → province → region → country. For every
//! unit the builder emits the applicable whole-string templates
//! (`comuna`, `comuna, provincia`, `comuna, país`, `comuna de país`, the
//! analogous province and region forms, and the bare country name), each
//! passed through [`normalize_text`] with whitespace collapsed. Matching is
//! exact on the whole canonical string; there is no substring search.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_text, Corpus};
use crate::Scalar;

pub use crate::stats::pearson_log_correlation;

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("hierarchy has no country-level unit")]
    NoCountry,
    #[error("hierarchy has multiple country-level units ({0} and {1})")]
    MultipleCountries(u32, u32),
    #[error("unit {unit_id} ({name}) has a missing or wrong-level parent")]
    BadParent { unit_id: u32, name: String },
    #[error("unit {unit_id} has an empty name")]
    EmptyName { unit_id: u32 },
    #[error("duplicate unit id {0}")]
    DuplicateUnit(u32),
    #[error("alias {alias:?} references unknown unit {unit_id}")]
    UnknownAliasUnit { alias: String, unit_id: u32 },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad row in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// Administrative levels, most specific first. The derived order is the
/// collision tie-break order: a commune beats a province for the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Commune,
    Province,
    Region,
    Country,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Commune => "commune",
            Level::Province => "province",
            Level::Region => "region",
            Level::Country => "country",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdminUnit {
    pub unit_id: u32,
    pub name: String,
    pub level: Level,
    pub parent_id: Option<u32>,
    pub population: Option<u64>,
}

/// Outcome of resolving one free-text location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Resolved { unit_id: u32, level: Level },
    Undetermined,
    EmptyLocation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeoResolution {
    pub user_id: u64,
    pub outcome: Resolution,
}

/// Canonical form shared by gazetteer keys and lookup queries: normalized,
/// trimmed, internal whitespace runs collapsed to single spaces.
pub fn canonical_key(s: &str) -> String {
    normalize_text(s).split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: HashMap<String, (u32, Level)>,
    hierarchy: BTreeMap<u32, AdminUnit>,
}

/// Keeps the better of two candidates for one key: most specific level
/// first, then larger population, then lower unit id.
fn prefer(
    current: Option<(u32, Level)>,
    candidate: (u32, Level),
    units: &BTreeMap<u32, AdminUnit>,
) -> (u32, Level) {
    let Some(cur) = current else { return candidate };
    let pop = |id: u32| units[&id].population.unwrap_or(0);
    let key = |(id, level): (u32, Level)| (level, std::cmp::Reverse(pop(id)), id);
    if key(candidate) < key(cur) {
        candidate
    } else {
        cur
    }
}

impl Gazetteer {
    /// Expands the 12 templates over a validated hierarchy.
    pub fn build(units: Vec<AdminUnit>) -> Result<Gazetteer, GazetteerError> {
        let mut hierarchy = BTreeMap::new();
        for unit in units {
            if unit.name.trim().is_empty() {
                return Err(GazetteerError::EmptyName { unit_id: unit.unit_id });
            }
            let id = unit.unit_id;
            if hierarchy.insert(id, unit).is_some() {
                return Err(GazetteerError::DuplicateUnit(id));
            }
        }

        let mut country: Option<&AdminUnit> = None;
        for unit in hierarchy.values() {
            if unit.level == Level::Country {
                if let Some(first) = country {
                    return Err(GazetteerError::MultipleCountries(first.unit_id, unit.unit_id));
                }
                country = Some(unit);
            }
        }
        let country = country.ok_or(GazetteerError::NoCountry)?;

        // Validate the commune → province → region → country chain.
        let parent_of = |unit: &AdminUnit, expected: Level| -> Result<u32, GazetteerError> {
            let bad = || GazetteerError::BadParent {
                unit_id: unit.unit_id,
                name: unit.name.clone(),
            };
            let pid = unit.parent_id.ok_or_else(bad)?;
            let parent = hierarchy.get(&pid).ok_or_else(bad)?;
            if parent.level != expected {
                return Err(bad());
            }
            Ok(pid)
        };

        let mut entries: HashMap<String, (u32, Level)> = HashMap::new();
        let add = |entries: &mut HashMap<String, (u32, Level)>, text: String, unit: &AdminUnit| {
            let key = canonical_key(&text);
            let cur = entries.get(&key).copied();
            entries.insert(key, prefer(cur, (unit.unit_id, unit.level), &hierarchy));
        };

        let country_name = country.name.clone();
        for unit in hierarchy.values() {
            match unit.level {
                Level::Commune => {
                    let pid = parent_of(unit, Level::Province)?;
                    let province = &hierarchy[&pid];
                    parent_of(province, Level::Region)?;
                    add(&mut entries, unit.name.clone(), unit);
                    add(&mut entries, format!("{}, {}", unit.name, province.name), unit);
                    add(&mut entries, format!("{}, {}", unit.name, country_name), unit);
                    add(&mut entries, format!("{} de {}", unit.name, country_name), unit);
                }
                Level::Province => {
                    let rid = parent_of(unit, Level::Region)?;
                    let region = &hierarchy[&rid];
                    add(&mut entries, unit.name.clone(), unit);
                    add(&mut entries, format!("{}, {}", unit.name, region.name), unit);
                    add(&mut entries, format!("{}, {}", unit.name, country_name), unit);
                    add(&mut entries, format!("{} de {}", unit.name, country_name), unit);
                }
                Level::Region => {
                    parent_of(unit, Level::Country)?;
                    add(&mut entries, unit.name.clone(), unit);
                    add(&mut entries, format!("{}, {}", unit.name, country_name), unit);
                    add(&mut entries, format!("{} de {}", unit.name, country_name), unit);
                }
                Level::Country => {
                    if unit.parent_id.is_some() {
                        return Err(GazetteerError::BadParent {
                            unit_id: unit.unit_id,
                            name: unit.name.clone(),
                        });
                    }
                    add(&mut entries, unit.name.clone(), unit);
                }
            }
        }

        Ok(Gazetteer { entries, hierarchy })
    }

    /// Merges manual alias entries. An alias always overrides a
    /// template-generated key; conflicting aliases for the same key fall
    /// back to the standard tie-break.
    pub fn merge_aliases(
        &mut self,
        aliases: impl IntoIterator<Item = (String, u32)>,
    ) -> Result<(), GazetteerError> {
        let mut merged: HashMap<String, (u32, Level)> = HashMap::new();
        for (alias, unit_id) in aliases {
            let unit = self
                .hierarchy
                .get(&unit_id)
                .ok_or_else(|| GazetteerError::UnknownAliasUnit { alias: alias.clone(), unit_id })?;
            let key = canonical_key(&alias);
            let cur = merged.get(&key).copied();
            merged.insert(key, prefer(cur, (unit.unit_id, unit.level), &self.hierarchy));
        }
        self.entries.extend(merged);
        Ok(())
    }

    /// Exact lookup of a free-text location.
    pub fn resolve_location(&self, location_text: &str) -> Resolution {
        if location_text.trim().is_empty() {
            return Resolution::EmptyLocation;
        }
        match self.entries.get(&canonical_key(location_text)) {
            Some(&(unit_id, level)) => Resolution::Resolved { unit_id, level },
            None => Resolution::Undetermined,
        }
    }

    /// Resolves every profile in the corpus, ordered by user id.
    pub fn resolve_users(&self, corpus: &Corpus) -> Vec<GeoResolution> {
        corpus
            .users
            .values()
            .map(|u| GeoResolution {
                user_id: u.user_id,
                outcome: self.resolve_location(&u.location_text),
            })
            .collect()
    }

    pub fn unit(&self, unit_id: u32) -> Option<&AdminUnit> {
        self.hierarchy.get(&unit_id)
    }

    pub fn units(&self) -> impl Iterator<Item = &AdminUnit> {
        self.hierarchy.values()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u32, Level)> {
        self.entries.iter().map(|(k, &(id, level))| (k.as_str(), id, level))
    }

    /// Region ancestor of a unit: itself for regions, the region ancestor
    /// for communes and provinces, `None` for the country.
    pub fn region_of(&self, unit_id: u32) -> Option<u32> {
        let mut current = self.hierarchy.get(&unit_id)?;
        loop {
            match current.level {
                Level::Region => return Some(current.unit_id),
                Level::Country => return None,
                _ => current = self.hierarchy.get(&current.parent_id?)?,
            }
        }
    }

    /// Region ids, ascending. The canonical region ordering for matrices
    /// and per-region output files.
    pub fn region_ids(&self) -> Vec<u32> {
        self.hierarchy
            .values()
            .filter(|u| u.level == Level::Region)
            .map(|u| u.unit_id)
            .collect()
    }

    /// Rolls resolutions up to regions: commune- and province-level users
    /// are attributed to their ancestor region; country-level and
    /// unresolved users are excluded.
    pub fn region_assignment(&self, resolutions: &[GeoResolution]) -> BTreeMap<u64, u32> {
        let mut assignment = BTreeMap::new();
        for r in resolutions {
            if let Resolution::Resolved { unit_id, .. } = r.outcome {
                if let Some(region) = self.region_of(unit_id) {
                    assignment.insert(r.user_id, region);
                }
            }
        }
        assignment
    }
}

/// Aggregation bucket of [`coverage_table`]: one row per administrative
/// level plus one for everything unresolved (empty locations included).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageBucket {
    Level(Level),
    Undetermined,
}

impl CoverageBucket {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverageBucket::Level(level) => level.as_str(),
            CoverageBucket::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub bucket: CoverageBucket,
    pub user_count: usize,
    pub user_share: Scalar,
    pub tweet_count: usize,
    pub tweet_share: Scalar,
}

/// Per-level user and tweet counts, country first, undetermined last.
/// Shares are over all resolved-or-not users / their tweets and sum to 1.
pub fn coverage_table(resolutions: &[GeoResolution], corpus: &Corpus) -> Vec<CoverageRow> {
    let mut tweets_by_author: HashMap<u64, usize> = HashMap::new();
    for tweet in &corpus.tweets {
        *tweets_by_author.entry(tweet.author_id).or_insert(0) += 1;
    }

    let buckets = [
        CoverageBucket::Level(Level::Country),
        CoverageBucket::Level(Level::Region),
        CoverageBucket::Level(Level::Province),
        CoverageBucket::Level(Level::Commune),
        CoverageBucket::Undetermined,
    ];
    let index = |outcome: Resolution| match outcome {
        Resolution::Resolved { level: Level::Country, .. } => 0,
        Resolution::Resolved { level: Level::Region, .. } => 1,
        Resolution::Resolved { level: Level::Province, .. } => 2,
        Resolution::Resolved { level: Level::Commune, .. } => 3,
        Resolution::Undetermined | Resolution::EmptyLocation => 4,
    };

    let mut user_counts = [0usize; 5];
    let mut tweet_counts = [0usize; 5];
    for r in resolutions {
        let i = index(r.outcome);
        user_counts[i] += 1;
        tweet_counts[i] += tweets_by_author.get(&r.user_id).copied().unwrap_or(0);
    }

    let total_users: usize = user_counts.iter().sum();
    let total_tweets: usize = tweet_counts.iter().sum();
    let share = |count: usize, total: usize| {
        if total == 0 {
            0.0
        } else {
            count as Scalar / total as Scalar
        }
    };

    buckets
        .iter()
        .enumerate()
        .map(|(i, &bucket)| CoverageRow {
            bucket,
            user_count: user_counts[i],
            user_share: share(user_counts[i], total_users),
            tweet_count: tweet_counts[i],
            tweet_share: share(tweet_counts[i], total_tweets),
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct HierarchyRow {
    unit_id: u32,
    level: Level,
    name: String,
    parent_id: Option<u32>,
    population: Option<u64>,
}

/// Reads a hierarchy CSV (`unit_id,level,name,parent_id,population`,
/// header row required).
pub fn load_hierarchy_csv(path: &Path) -> Result<Vec<AdminUnit>, GazetteerError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => GazetteerError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => GazetteerError::Csv { path: path.to_path_buf(), source: e },
    })?;
    let mut units = Vec::new();
    for row in reader.deserialize() {
        let row: HierarchyRow =
            row.map_err(|source| GazetteerError::Csv { path: path.to_path_buf(), source })?;
        units.push(AdminUnit {
            unit_id: row.unit_id,
            name: row.name,
            level: row.level,
            parent_id: row.parent_id,
            population: row.population,
        });
    }
    Ok(units)
}

#[derive(Debug, Deserialize)]
struct AliasRow {
    alias: String,
    unit_id: u32,
}

/// Reads an alias CSV (`alias,unit_id`, header row required).
pub fn load_aliases_csv(path: &Path) -> Result<Vec<(String, u32)>, GazetteerError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => GazetteerError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => GazetteerError::Csv { path: path.to_path_buf(), source: e },
    })?;
    let mut aliases = Vec::new();
    for row in reader.deserialize() {
        let row: AliasRow =
            row.map_err(|source| GazetteerError::Csv { path: path.to_path_buf(), source })?;
        aliases.push((row.alias, row.unit_id));
    }
    Ok(aliases)
}
