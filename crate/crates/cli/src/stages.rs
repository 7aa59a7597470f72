//! Stage implementations shared by the standalone subcommands and `run`:
//! each takes in-memory inputs and writes the stage's CSV files with fixed
//! column orders, UTF-8 and RFC-4180 quoting, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use geosocial::content::{BinnedSeries, TermStats};
use geosocial::corpus::Corpus;
use geosocial::demographics::BioKeyword;
use geosocial::gazetteer::{Gazetteer, GeoResolution, Resolution};
use geosocial::geospatial::HexBin;
use geosocial::interactions::{FlowEdge, FlowStats, ODMatrix};
use geosocial::temporal::{DailySeries, DecileRow, Peak};
use geosocial::Scalar;

fn open_csv(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

/// `user_id,outcome,unit_id,level,region_id`; unit fields are empty unless
/// resolved, and `region_id` is empty for country-level resolutions.
pub fn write_geolocate_csv(
    path: &Path,
    resolutions: &[GeoResolution],
    gazetteer: &Gazetteer,
) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["user_id", "outcome", "unit_id", "level", "region_id"])?;
    for r in resolutions {
        match r.outcome {
            Resolution::Resolved { unit_id, level } => {
                let region = gazetteer
                    .region_of(unit_id)
                    .map(|r| r.to_string())
                    .unwrap_or_default();
                w.write_record([
                    r.user_id.to_string(),
                    "resolved".to_string(),
                    unit_id.to_string(),
                    level.as_str().to_string(),
                    region,
                ])?;
            }
            Resolution::Undetermined => {
                w.write_record([&r.user_id.to_string(), "undetermined", "", "", ""])?;
            }
            Resolution::EmptyLocation => {
                w.write_record([&r.user_id.to_string(), "empty_location", "", "", ""])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a geolocate CSV back into a user → region assignment plus the
/// sorted list of regions present.
pub fn read_assignment_csv(path: &Path) -> Result<(BTreeMap<u64, u32>, Vec<u32>)> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut assignment = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let region = record.get(4).unwrap_or("");
        if region.is_empty() {
            continue;
        }
        let user_id: u64 = record.get(0).unwrap_or("").parse()?;
        assignment.insert(user_id, region.parse::<u32>()?);
    }
    let regions: Vec<u32> = {
        let mut r: Vec<u32> = assignment.values().copied().collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    Ok((assignment, regions))
}

pub fn write_demographics_csv(path: &Path, rows: &[BioKeyword]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record([
        "rank",
        "word",
        "pagerank",
        "tendency",
        "user_share",
        "male_users",
        "female_users",
    ])?;
    for (i, row) in rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            row.word.clone(),
            row.pagerank_score.to_string(),
            row.tendency.to_string(),
            row.user_share.to_string(),
            row.male_users.to_string(),
            row.female_users.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `series.csv`, `peaks.csv` and `deciles.csv`; returns the paths.
pub fn write_temporal(
    dir: &Path,
    series: &DailySeries,
    peaks: &[Peak],
    top_decile: &[Peak],
    deciles: &[DecileRow],
) -> Result<Vec<PathBuf>> {
    let series_path = dir.join("series.csv");
    let mut w = open_csv(&series_path)?;
    w.write_record(["date", "count"])?;
    for (i, &count) in series.counts.iter().enumerate() {
        w.write_record([series.date_at(i).to_string(), count.to_string()])?;
    }
    w.flush()?;

    let peaks_path = dir.join("peaks.csv");
    let mut w = open_csv(&peaks_path)?;
    w.write_record(["date", "volume", "significance", "top_decile"])?;
    for p in peaks {
        let is_top = top_decile.iter().any(|t| t.date == p.date);
        w.write_record([
            p.date.to_string(),
            p.volume.to_string(),
            p.significance.to_string(),
            if is_top { "true".to_string() } else { "false".to_string() },
        ])?;
    }
    w.flush()?;

    let deciles_path = dir.join("deciles.csv");
    let mut w = open_csv(&deciles_path)?;
    w.write_record(["percent", "date", "days_since_previous"])?;
    for row in deciles {
        w.write_record([
            row.percent.to_string(),
            row.date.to_string(),
            row.days_since_previous.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    Ok(vec![series_path, peaks_path, deciles_path])
}

/// Writes `volume.csv` (`region_id,bin_start,count,normalized`).
pub fn write_volume_csv(path: &Path, series: &[BinnedSeries]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["region_id", "bin_start", "count", "normalized"])?;
    for s in series {
        let normalized: Vec<Scalar> = geosocial::content::normalize_series(&s.counts);
        for (i, (&count, norm)) in s.counts.iter().zip(&normalized).enumerate() {
            w.write_record([
                s.region_id.to_string(),
                (s.start + i as i64 * s.bin_width).to_string(),
                count.to_string(),
                norm.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `profile.csv` (`bin_start,mean,std`).
pub fn write_profile_csv(
    path: &Path,
    start: i64,
    bin_width: i64,
    profile: &[(Scalar, Scalar)],
) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["bin_start", "mean", "std"])?;
    for (i, (mean, std)) in profile.iter().enumerate() {
        w.write_record([
            (start + i as i64 * bin_width).to_string(),
            mean.to_string(),
            std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `popular.csv` (`kind,term,count`), mentions before hashtags.
pub fn write_popular_csv(
    path: &Path,
    mentions: &[TermStats],
    hashtags: &[TermStats],
) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["kind", "term", "count"])?;
    for t in mentions {
        w.write_record(["mention", &t.term, &t.tweet_count.to_string()])?;
    }
    for t in hashtags {
        w.write_record(["hashtag", &t.term, &t.tweet_count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `tfidf.csv` (`region_id,rank,term,weight`).
pub fn write_tfidf_csv(path: &Path, top_terms: &[(u32, Vec<(String, Scalar)>)]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["region_id", "rank", "term", "weight"])?;
    for (region_id, terms) in top_terms {
        for (rank, (term, weight)) in terms.iter().enumerate() {
            w.write_record([
                region_id.to_string(),
                (rank + 1).to_string(),
                term.clone(),
                weight.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `matrix.csv` as a square table with a header row and column of
/// region ids.
pub fn write_matrix_csv(path: &Path, matrix: &ODMatrix) -> Result<()> {
    let mut w = open_csv(path)?;
    let mut header = vec!["region_id".to_string()];
    header.extend(matrix.regions.iter().map(|r| r.to_string()));
    w.write_record(&header)?;
    for (i, row) in matrix.cells.iter().enumerate() {
        let mut record = vec![matrix.regions[i].to_string()];
        record.extend(row.iter().map(|c| c.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `stats.csv` (`region_id,in,out,ratio,intra_share`); undefined
/// ratios are empty fields.
pub fn write_flow_stats_csv(path: &Path, stats: &[FlowStats]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["region_id", "in", "out", "ratio", "intra_share"])?;
    for s in stats {
        w.write_record([
            s.region_id.to_string(),
            s.incoming.to_string(),
            s.outgoing.to_string(),
            s.in_out_ratio.map(|r| r.to_string()).unwrap_or_default(),
            s.intra_share.map(|r| r.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `edges.csv` (`source,destination,count`).
pub fn write_edges_csv(path: &Path, edges: &[FlowEdge]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["source", "destination", "count"])?;
    for e in edges {
        w.write_record([e.source.to_string(), e.destination.to_string(), e.count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `q,r,center_lat,center_lon,count`.
pub fn write_hexbin_csv(path: &Path, bins: &[HexBin]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["q", "r", "center_lat", "center_lon", "count"])?;
    for b in bins {
        w.write_record([
            b.q.to_string(),
            b.r.to_string(),
            b.center.0.to_string(),
            b.center.1.to_string(),
            b.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a canonical corpus file written by `ingest --out`.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("cannot load corpus {}", path.display()))
}
