//! Seeded synthetic-corpus generator with a ground-truth manifest.
//!
//! The generator writes a raw line-delimited archive in the ingest wire
//! format and returns exactly what it planted: one exclusive vocabulary
//! term per region, a term shared by all regions, the full mention
//! origin-destination tally, registration spike dates, and geotagged
//! clusters centered on known hexagonal cells. Downstream stages are
//! expected to recover these values; the manifest is the test oracle.
//!
//! Every user's region and gender in the manifest is what the gazetteer
//! and lexicon actually resolve, so collisions and ambiguous names cannot
//! desynchronize the truth from the pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_text, tokenize, TokenKind, TIMESTAMP_FORMAT};
use crate::gazetteer::{AdminUnit, Gazetteer, GazetteerError, Level, Resolution};
use crate::geospatial::{hex_center, unproject, HexGridSpec};

/// 2012-10-28 10:00:00 UTC, the start of the event window.
pub const EVENT_START: i64 = 1_351_418_400;
/// 14 hours of event coverage.
pub const EVENT_SECONDS: i64 = 50_400;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Gazetteer(#[from] GazetteerError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no unambiguous seed location found for region {0}")]
    NoSeedLocation(u32),
    #[error("need at least {minimum} records for {users} users over {regions} regions")]
    TooFewRecords { minimum: usize, users: usize, regions: usize },
}

#[derive(Debug, Clone)]
pub struct SynthParams {
    pub seed: u64,
    pub users: usize,
    pub records: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams { seed: 1, users: 1000, records: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoCluster {
    pub lat: f64,
    pub lon: f64,
    pub cell: (i64, i64),
    pub count: u64,
}

/// Everything the generator planted, for use as a test oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub user_count: usize,
    pub record_count: usize,
    pub retweet_count: usize,
    /// Region ids in matrix order (ascending).
    pub regions: Vec<u32>,
    /// Region id → term that appears in original tweets of that region only.
    pub planted_terms: BTreeMap<u32, String>,
    /// Term present in original tweets of every region.
    pub global_term: String,
    /// Mention origin-destination tally, indexed like `regions`.
    pub od_matrix: Vec<Vec<u64>>,
    pub registration_spikes: Vec<NaiveDate>,
    pub hex_origin: (f64, f64),
    pub hex_cell_size: f64,
    pub geo_clusters: Vec<GeoCluster>,
    pub geo_tweet_count: u64,
    pub male_users: usize,
    pub female_users: usize,
    pub undetermined_users: usize,
    pub located_users: usize,
}

impl GroundTruth {
    pub fn save(&self, path: &Path) -> Result<(), SynthError> {
        let file = File::create(path)
            .map_err(|source| SynthError::Io { path: path.to_path_buf(), source })?;
        let mut writer = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut writer, self)
            .map_err(|e| SynthError::Io { path: path.to_path_buf(), source: e.into() })?;
        writer
            .flush()
            .map_err(|source| SynthError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<GroundTruth, SynthError> {
        let data = std::fs::read_to_string(path)
            .map_err(|source| SynthError::Io { path: path.to_path_buf(), source })?;
        serde_json::from_str(&data)
            .map_err(|e| SynthError::Io { path: path.to_path_buf(), source: e.into() })
    }
}

// Wire shapes for the archive lines, field order fixed for byte-stable output.

#[derive(Serialize)]
struct OutUser<'a> {
    id: u64,
    name: &'a str,
    screen_name: &'a str,
    location: &'a str,
    description: &'a str,
    created_at: String,
}

#[derive(Serialize)]
struct OutCoordinates {
    coordinates: [f64; 2], // [lon, lat]
}

#[derive(Serialize)]
struct OutRetweeted {
    id: u64,
}

#[derive(Serialize)]
struct OutTweet<'a> {
    id: u64,
    text: &'a str,
    created_at: String,
    user: OutUser<'a>,
    coordinates: Option<OutCoordinates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    retweeted_status: Option<OutRetweeted>,
}

const FILLER_WORDS: &[&str] = &[
    "vota", "votar", "mesa", "urna", "local", "fila", "conteo", "resultado", "resultados",
    "candidata", "candidato", "alcalde", "alcaldesa", "concejal", "municipio", "comuna",
    "ciudad", "barrio", "plaza", "calle", "gente", "vecinos", "manana", "tarde", "noche",
    "ahora", "recien", "luego", "gana", "pierde", "triunfo", "derrota", "sorpresa",
    "esperando", "celebrando", "mirando", "escuchando", "radio", "television", "noticia",
    "noticias", "debate", "discurso", "aplausos", "bandera", "papel", "lapiz", "credencial",
    "vocal", "apoderado", "recuento", "escrutinio", "porcentaje", "ventaja", "empate",
    "segunda", "vuelta", "campana", "afiche", "puerta", "casa", "trabajo", "oficina",
    "almuerzo", "cafe", "pan", "lluvia", "sol", "frio", "calor", "viento", "dia",
    "historico", "importante", "tranquilo", "lento", "rapido", "largo", "corto",
];

const GARBAGE_LOCATIONS: &[&str] = &[
    "mi casa", "en todas partes", "el mundo", "ciudad gotica", "ninguna parte",
    "por ahi", "internet", "tu corazon", "el sur del mundo", "aqui y alla",
];

const SURNAMES: &[&str] = &[
    "Perez", "Gonzalez", "Munoz", "Rojas", "Diaz", "Soto", "Contreras", "Silva",
    "Martinez", "Sepulveda", "Morales", "Rodriguez", "Lopez", "Fuentes", "Hernandez",
    "Torres", "Araya", "Flores", "Espinoza", "Valenzuela", "Castillo", "Tapia",
    "Reyes", "Gutierrez", "Castro", "Pizarro", "Alvarez", "Vasquez", "Sanchez", "Fernandez",
];

const ORG_PREFIXES: &[&str] =
    &["Radio", "Diario", "Noticias", "Club", "Municipalidad", "Universidad", "Canal"];

const BIO_WORDS: &[&str] = &[
    "estudiante", "ingeniero", "ingeniera", "periodista", "profesor", "profesora",
    "musica", "futbol", "cine", "libros", "fotografia", "viajes", "cocina", "padre",
    "madre", "hincha", "fanatico", "fanatica", "amante", "vida", "feliz", "trabajo",
    "universidad", "derecho", "historia", "ciencia", "arte", "teatro", "deporte",
    "corazon", "familia", "amigos", "naturaleza", "montana", "mar", "sur", "norte",
    "de", "la", "el", "y", "en",
];

struct SynthUser {
    id: u64,
    name: String,
    screen_name: String,
    location: String,
    bio: String,
    registered: NaiveDate,
    /// Region index in matrix order, as the gazetteer actually resolves it.
    region: Option<usize>,
}

/// A location string for one guaranteed user per region: the first commune
/// of the region whose bare name resolves back into the region.
fn seed_location(
    gazetteer: &Gazetteer,
    region_id: u32,
    communes: &[&AdminUnit],
) -> Result<String, SynthError> {
    for commune in communes {
        if let Resolution::Resolved { unit_id, .. } = gazetteer.resolve_location(&commune.name) {
            if gazetteer.region_of(unit_id) == Some(region_id) {
                return Ok(commune.name.clone());
            }
        }
    }
    Err(SynthError::NoSeedLocation(region_id))
}

fn format_timestamp(epoch: i64) -> String {
    DateTime::<Utc>::from_timestamp(epoch, 0)
        .expect("epoch seconds in range")
        .format(TIMESTAMP_FORMAT)
        .to_string()
}

/// Generates the archive at `archive_path` and returns the ground truth.
/// Same seed and parameters produce identical bytes.
pub fn generate(
    params: &SynthParams,
    hierarchy: Vec<AdminUnit>,
    male_names: &[String],
    female_names: &[String],
    archive_path: &Path,
) -> Result<GroundTruth, SynthError> {
    let gazetteer = Gazetteer::build(hierarchy)?;
    let regions = gazetteer.region_ids();
    let region_index: HashMap<u32, usize> =
        regions.iter().enumerate().map(|(i, &r)| (r, i)).collect();

    let minimum = 2 * regions.len() + params.users + 1;
    if params.records < minimum {
        return Err(SynthError::TooFewRecords {
            minimum,
            users: params.users,
            regions: regions.len(),
        });
    }

    let lexicon = crate::demographics::GenderLexicon::new(
        male_names.iter().cloned(),
        female_names.iter().cloned(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // region population weights drive the location distribution
    let communes_by_region: BTreeMap<u32, Vec<&AdminUnit>> = {
        let mut map: BTreeMap<u32, Vec<&AdminUnit>> = BTreeMap::new();
        for unit in gazetteer.units() {
            if unit.level == Level::Commune {
                if let Some(region) = gazetteer.region_of(unit.unit_id) {
                    map.entry(region).or_default().push(unit);
                }
            }
        }
        map
    };
    let region_weights: Vec<f64> = regions
        .iter()
        .map(|r| gazetteer.unit(*r).and_then(|u| u.population).unwrap_or(1) as f64)
        .collect();
    let region_dist = rand::distributions::WeightedIndex::new(&region_weights).unwrap();

    // registration span with five spike dates well apart
    let reg_start = NaiveDate::from_ymd_opt(2006, 3, 21).unwrap();
    let reg_end = NaiveDate::from_ymd_opt(2012, 10, 27).unwrap();
    let span_days = (reg_end - reg_start).num_days();
    let registration_spikes: Vec<NaiveDate> = [0.30f64, 0.45, 0.60, 0.75, 0.90]
        .iter()
        .map(|f| {
            let jitter = rng.gen_range(-10..=10i64);
            reg_start + chrono::Days::new(((span_days as f64 * f) as i64 + jitter) as u64)
        })
        .collect();

    // ---- users ----
    let mut users: Vec<SynthUser> = Vec::with_capacity(params.users);
    let mut male_users = 0usize;
    let mut female_users = 0usize;
    let mut undetermined_users = 0usize;

    for uid in 1..=params.users as u64 {
        let region_slot = (uid - 1) as usize;
        let location = if region_slot < regions.len() {
            // one guaranteed resolvable user per region
            let region_id = regions[region_slot];
            seed_location(&gazetteer, region_id, &communes_by_region[&region_id])?
        } else {
            match rng.gen_range(0..100u32) {
                0..=11 => String::new(),
                12..=21 => GARBAGE_LOCATIONS[rng.gen_range(0..GARBAGE_LOCATIONS.len())].to_string(),
                22..=26 => "Chile".to_string(),
                _ => {
                    let region_id = regions[region_dist.sample(&mut rng)];
                    let communes = &communes_by_region[&region_id];
                    let commune = communes[rng.gen_range(0..communes.len())];
                    let region_name = &gazetteer.unit(region_id).unwrap().name;
                    let text = match rng.gen_range(0..6u32) {
                        0 => commune.name.clone(),
                        1 => format!("{}, Chile", commune.name),
                        2 => format!("{} de Chile", commune.name),
                        3 => region_name.clone(),
                        4 => {
                            let province = gazetteer.unit(commune.parent_id.unwrap()).unwrap();
                            format!("{}, {}", commune.name, province.name)
                        }
                        _ => format!("{}, Chile", region_name),
                    };
                    match rng.gen_range(0..4u32) {
                        0 => text.to_uppercase(),
                        1 => text.to_lowercase(),
                        _ => text,
                    }
                }
            }
        };

        let region = match gazetteer.resolve_location(&location) {
            Resolution::Resolved { unit_id, .. } => {
                gazetteer.region_of(unit_id).map(|r| region_index[&r])
            }
            _ => None,
        };

        let name = match rng.gen_range(0..100u32) {
            0..=44 => format!(
                "{} {}",
                capitalize(&male_names[rng.gen_range(0..male_names.len())]),
                SURNAMES[rng.gen_range(0..SURNAMES.len())]
            ),
            45..=79 => format!(
                "{} {}",
                capitalize(&female_names[rng.gen_range(0..female_names.len())]),
                SURNAMES[rng.gen_range(0..SURNAMES.len())]
            ),
            _ => format!(
                "{} {}{}",
                ORG_PREFIXES[rng.gen_range(0..ORG_PREFIXES.len())],
                capitalize(FILLER_WORDS[rng.gen_range(0..FILLER_WORDS.len())]),
                rng.gen_range(1..99u32)
            ),
        };
        match lexicon.classify(&name) {
            crate::demographics::Gender::Male => male_users += 1,
            crate::demographics::Gender::Female => female_users += 1,
            crate::demographics::Gender::Undetermined => undetermined_users += 1,
        }

        let bio = if rng.gen_bool(0.25) {
            String::new()
        } else {
            let n = rng.gen_range(3..=8);
            (0..n)
                .map(|_| BIO_WORDS[rng.gen_range(0..BIO_WORDS.len())])
                .collect::<Vec<_>>()
                .join(" ")
        };

        let registered = if rng.gen_bool(0.30) {
            registration_spikes[rng.gen_range(0..registration_spikes.len())]
        } else {
            reg_start + chrono::Days::new(rng.gen_range(0..=span_days) as u64)
        };

        users.push(SynthUser {
            id: uid,
            name,
            screen_name: format!("user{uid}"),
            location,
            bio,
            registered,
            region,
        });
    }

    let located: Vec<usize> = (0..users.len()).filter(|&i| users[i].region.is_some()).collect();
    let located_by_region: Vec<Vec<usize>> = {
        let mut by_region = vec![Vec::new(); regions.len()];
        for &i in &located {
            by_region[users[i].region.unwrap()].push(i);
        }
        by_region
    };
    // normalized screen name → region index, as the mention resolver sees it
    let mention_region: HashMap<String, usize> = located
        .iter()
        .map(|&i| (normalize_text(&users[i].screen_name), users[i].region.unwrap()))
        .collect();

    // ---- planted vocabulary ----
    let planted_terms: BTreeMap<u32, String> =
        regions.iter().map(|&r| (r, format!("distintivo{r}"))).collect();
    let global_term = "sufragio".to_string();

    // geotagged clusters on known cells around Santiago
    let hex_origin = (-33.45, -70.67);
    let hex_cell_size = 500.0;
    let spec = HexGridSpec::new(hex_origin, hex_cell_size);
    let cluster_cells: [(i64, i64); 3] = [(0, 0), (5, 3), (-4, 6)];
    let mut cluster_counts = [0u64; 3];
    let cluster_dist = rand::distributions::WeightedIndex::new([5, 3, 2]).unwrap();

    // ---- tweets ----
    let file = File::create(archive_path)
        .map_err(|source| SynthError::Io { path: archive_path.to_path_buf(), source })?;
    let mut out = BufWriter::new(file);
    let mut od = vec![vec![0u64; regions.len()]; regions.len()];
    let mut originals: Vec<(u64, usize, String)> = Vec::new(); // (id, author index, text)
    let mut retweet_count = 0usize;
    let mut geo_tweet_count = 0u64;
    let mut next_id = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn emit(
        out: &mut BufWriter<File>,
        archive_path: &Path,
        user: &SynthUser,
        id: u64,
        at: i64,
        text: &str,
        coordinates: Option<(f64, f64)>,
        retweeted: Option<u64>,
    ) -> Result<(), SynthError> {
        let line = OutTweet {
            id,
            text,
            created_at: format_timestamp(at),
            user: OutUser {
                id: user.id,
                name: &user.name,
                screen_name: &user.screen_name,
                location: &user.location,
                description: &user.bio,
                created_at: format_timestamp(
                    user.registered.and_hms_opt(11, 30, 0).unwrap().and_utc().timestamp(),
                ),
            },
            coordinates: coordinates.map(|(lat, lon)| OutCoordinates { coordinates: [lon, lat] }),
            retweeted_status: retweeted.map(|id| OutRetweeted { id }),
        };
        serde_json::to_writer(&mut *out, &line)
            .map_err(|e| SynthError::Io { path: archive_path.to_path_buf(), source: e.into() })?;
        out.write_all(b"\n")
            .map_err(|source| SynthError::Io { path: archive_path.to_path_buf(), source })
    }

    // destination regions under the same rules the matrix builder applies:
    // distinct regions of resolved text mentions plus the retweeted author
    let tally = |od: &mut Vec<Vec<u64>>,
                 author: &SynthUser,
                 text: &str,
                 retweet_author_region: Option<usize>| {
        let Some(source) = author.region else { return };
        let mut destinations: BTreeSet<usize> = tokenize(text)
            .into_iter()
            .filter(|t| t.kind == TokenKind::Mention)
            .filter_map(|t| mention_region.get(t.surface.trim_start_matches('@')).copied())
            .collect();
        destinations.extend(retweet_author_region);
        for dest in destinations {
            od[source][dest] += 1;
        }
    };

    // guarantee every region document contains the shared term and its own
    // exclusive term
    for (r, region_users) in located_by_region.iter().enumerate() {
        let region_id = regions[r];
        for _ in 0..2 {
            next_id += 1;
            let author = &users[region_users[rng.gen_range(0..region_users.len())]];
            let text = format!(
                "{} {} {} {}",
                global_term,
                planted_terms[&region_id],
                FILLER_WORDS[rng.gen_range(0..FILLER_WORDS.len())],
                FILLER_WORDS[rng.gen_range(0..FILLER_WORDS.len())],
            );
            let at = EVENT_START + rng.gen_range(0..EVENT_SECONDS);
            emit(&mut out, archive_path, author, next_id, at, &text, None, None)?;
            tally(&mut od, author, &text, None);
            originals.push((next_id, region_users[0], text));
        }
    }

    // one original per user so every generated profile reaches the corpus
    let compose_original = |rng: &mut ChaCha8Rng, author: &SynthUser| -> String {
        let mut parts: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(2..=6) {
            parts.push(FILLER_WORDS[rng.gen_range(0..FILLER_WORDS.len())].to_string());
        }
        if let Some(region) = author.region {
            if rng.gen_bool(0.30) {
                parts.push(planted_terms[&regions[region]].clone());
            }
            if rng.gen_bool(0.05) {
                parts.push(format!("#zona{}", regions[region]));
            }
        }
        if rng.gen_bool(0.10) {
            parts.push(global_term.clone());
        }
        if rng.gen_bool(0.15) {
            parts.push("#eleccionlocal".to_string());
        }
        if rng.gen_bool(0.25) && !located.is_empty() {
            for _ in 0..rng.gen_range(1..=2) {
                // mentions lean toward the author's own region
                let target = match author.region {
                    Some(region) if rng.gen_bool(0.5) => {
                        let pool = &located_by_region[region];
                        pool[rng.gen_range(0..pool.len())]
                    }
                    _ => located[rng.gen_range(0..located.len())],
                };
                parts.push(format!("@{}", users[target].screen_name));
            }
        }
        if rng.gen_bool(0.03) {
            parts.push(format!("@fantasma{}", rng.gen_range(0..1000u32)));
        }
        parts.join(" ")
    };

    for (author_index, author) in users.iter().enumerate() {
        next_id += 1;
        let text = compose_original(&mut rng, author);
        let at = EVENT_START + rng.gen_range(0..EVENT_SECONDS);
        emit(&mut out, archive_path, author, next_id, at, &text, None, None)?;
        tally(&mut od, author, &text, None);
        originals.push((next_id, author_index, text));
    }

    // remaining records: a mix of originals, retweets and geotagged posts
    while (next_id as usize) < params.records {
        next_id += 1;
        let author_index = rng.gen_range(0..params.users);
        let at = EVENT_START + rng.gen_range(0..EVENT_SECONDS);

        let coordinates = if rng.gen_bool(0.08) {
            let cluster = cluster_dist.sample(&mut rng);
            cluster_counts[cluster] += 1;
            geo_tweet_count += 1;
            let (cq, cr) = cluster_cells[cluster];
            let center = hex_center(cq, cr, hex_cell_size);
            // uniform in a 200 m disk: always inside the 433 m inradius
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let radius = 200.0 * rng.gen_range(0.0f64..1.0).sqrt();
            let point =
                unproject((center.0 + radius * angle.cos(), center.1 + radius * angle.sin()), &spec);
            Some(point)
        } else {
            None
        };

        if rng.gen_bool(0.30) {
            let (orig_id, orig_author, orig_text) =
                &originals[rng.gen_range(0..originals.len())];
            let text = format!("RT @{}: {}", users[*orig_author].screen_name, orig_text);
            let author = &users[author_index];
            emit(&mut out, archive_path, author, next_id, at, &text, coordinates, Some(*orig_id))?;
            tally(&mut od, author, &text, users[*orig_author].region);
            retweet_count += 1;
        } else {
            let text = compose_original(&mut rng, &users[author_index]);
            let author = &users[author_index];
            emit(&mut out, archive_path, author, next_id, at, &text, coordinates, None)?;
            tally(&mut od, author, &text, None);
            originals.push((next_id, author_index, text));
        }
    }
    out.flush()
        .map_err(|source| SynthError::Io { path: archive_path.to_path_buf(), source })?;

    let geo_clusters = cluster_cells
        .iter()
        .zip(cluster_counts)
        .map(|(&(q, r), count)| {
            let (lat, lon) = unproject(hex_center(q, r, hex_cell_size), &spec);
            GeoCluster { lat, lon, cell: (q, r), count }
        })
        .collect();

    Ok(GroundTruth {
        seed: params.seed,
        user_count: params.users,
        record_count: params.records,
        retweet_count,
        regions,
        planted_terms,
        global_term,
        od_matrix: od,
        registration_spikes,
        hex_origin,
        hex_cell_size,
        geo_clusters,
        geo_tweet_count,
        male_users,
        female_users,
        undetermined_users,
        located_users: located.len(),
    })
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::demographics::{classify_users, Gender};
    use crate::gazetteer::load_hierarchy_csv;
    use crate::geospatial::{hexbin_aggregate, HexGridSpec};
    use crate::interactions::{mention_region_index, od_matrix};
    use std::path::PathBuf;

    fn fixture(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
    }

    fn load_inputs() -> (Vec<AdminUnit>, Vec<String>, Vec<String>) {
        let hierarchy = load_hierarchy_csv(&fixture("chile_hierarchy.csv")).unwrap();
        let male = crate::demographics::load_word_list(&fixture("male_names.txt")).unwrap();
        let female = crate::demographics::load_word_list(&fixture("female_names.txt")).unwrap();
        (hierarchy, male, female)
    }

    #[test]
    fn generation_is_deterministic() {
        let (hierarchy, male, female) = load_inputs();
        let dir = tempfile::tempdir().unwrap();
        let params = SynthParams { seed: 7, users: 120, records: 600 };

        let a_path = dir.path().join("a.jsonl");
        let b_path = dir.path().join("b.jsonl");
        let truth_a = generate(&params, hierarchy.clone(), &male, &female, &a_path).unwrap();
        let truth_b = generate(&params, hierarchy, &male, &female, &b_path).unwrap();
        assert_eq!(truth_a, truth_b);
        assert_eq!(std::fs::read(&a_path).unwrap(), std::fs::read(&b_path).unwrap());
    }

    #[test]
    fn archive_ingests_cleanly_and_matches_truth() {
        let (hierarchy, male, female) = load_inputs();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("archive.jsonl");
        let params = SynthParams { seed: 3, users: 200, records: 1500 };
        let truth = generate(&params, hierarchy.clone(), &male, &female, &path).unwrap();

        let report = corpus::ingest(&path).unwrap();
        assert!(report.skipped.is_empty(), "skipped: {:?}", report.skipped);
        let c = report.corpus;
        assert_eq!(c.tweets.len(), truth.record_count);
        assert_eq!(c.users.len(), truth.user_count);
        assert_eq!(
            c.tweets.iter().filter(|t| t.is_retweet).count(),
            truth.retweet_count
        );

        // gender tallies match the classifier over the ingested corpus
        let lexicon = crate::demographics::GenderLexicon::new(male, female);
        let genders = classify_users(&lexicon, &c);
        let count = |g: Gender| genders.iter().filter(|r| r.gender == g).count();
        assert_eq!(count(Gender::Male), truth.male_users);
        assert_eq!(count(Gender::Female), truth.female_users);
        assert_eq!(count(Gender::Undetermined), truth.undetermined_users);

        // location resolutions match
        let gazetteer = Gazetteer::build(hierarchy).unwrap();
        let assignment = gazetteer.region_assignment(&gazetteer.resolve_users(&c));
        assert_eq!(assignment.len(), truth.located_users);

        // the planted OD matrix is recovered cell for cell
        let mentions = mention_region_index(&c, &assignment);
        let build = od_matrix(&c, &assignment, &mentions, &truth.regions);
        assert_eq!(build.matrix.cells, truth.od_matrix);

        // geotagged tweets land on the planted cells
        let geo = hexbin_aggregate(&c, &HexGridSpec::new(truth.hex_origin, truth.hex_cell_size), 1);
        let total: u64 = geo.iter().map(|b| b.count).sum();
        assert_eq!(total, truth.geo_tweet_count);
        for cluster in &truth.geo_clusters {
            if cluster.count > 0 {
                let bin = geo
                    .iter()
                    .find(|b| (b.q, b.r) == cluster.cell)
                    .unwrap_or_else(|| panic!("missing cell {:?}", cluster.cell));
                assert_eq!(bin.count, cluster.count);
            }
        }

        // every planted registration spike is a detected peak
        let series = crate::temporal::registration_series(&c).unwrap();
        let peaks = crate::temporal::detect_peaks(&series, 7);
        for spike in &truth.registration_spikes {
            assert!(
                peaks.iter().any(|p| p.date == *spike),
                "spike {spike} not detected among {} peaks",
                peaks.len()
            );
        }
    }

    #[test]
    fn records_floor_is_enforced() {
        let (hierarchy, male, female) = load_inputs();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        let params = SynthParams { seed: 1, users: 100, records: 50 };
        assert!(matches!(
            generate(&params, hierarchy, &male, &female, &path),
            Err(SynthError::TooFewRecords { .. })
        ));
    }
}
