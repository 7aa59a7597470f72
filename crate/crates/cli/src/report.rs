//! The consolidated run report: output manifest, run metadata, warning
//! tallies and headline summary values. Timestamps live only in `timing`,
//! so everything else is byte-stable across reruns on identical inputs.

use serde::Serialize;

use geosocial::corpus::CorpusStats;
use geosocial::gazetteer::CoverageRow;
use geosocial::geospatial::GeoSummary;
use geosocial::interactions::FlowSummary;
use geosocial::Scalar;

use crate::config::Params;

#[derive(Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    /// The only fields that vary between identical runs.
    pub timing: Timing,
    pub parameters: Params,
    pub warnings: Warnings,
    /// Output files written, sorted by name; all exist on completion.
    pub manifest: Vec<String>,
    pub summary: Summary,
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct Timing {
    pub started_utc: String,
    pub finished_utc: String,
    pub duration_seconds: f64,
}

#[derive(Serialize, Default)]
pub struct Warnings {
    pub skipped_lines: usize,
    pub unresolved_mentions: u64,
    pub unresolved_retweets: u64,
    pub pagerank_converged: bool,
}

#[derive(Serialize)]
pub struct Summary {
    pub corpus: CorpusStats,
    pub coverage: Vec<CoverageOut>,
    /// Pearson correlation of log physical vs log virtual region
    /// populations; null when undefined.
    pub pearson_log_population: Option<Scalar>,
    pub flow: Option<FlowOut>,
    pub geo: GeoOut,
}

#[derive(Serialize)]
pub struct CoverageOut {
    pub bucket: &'static str,
    pub user_count: usize,
    pub user_share: Scalar,
    pub tweet_count: usize,
    pub tweet_share: Scalar,
}

impl From<&CoverageRow> for CoverageOut {
    fn from(row: &CoverageRow) -> Self {
        CoverageOut {
            bucket: row.bucket.as_str(),
            user_count: row.user_count,
            user_share: row.user_share,
            tweet_count: row.tweet_count,
            tweet_share: row.tweet_share,
        }
    }
}

#[derive(Serialize)]
pub struct FlowOut {
    pub ratio_mean: Scalar,
    pub ratio_std: Scalar,
    pub intra_mean: Scalar,
    pub intra_std: Scalar,
}

impl From<&FlowSummary> for FlowOut {
    fn from(s: &FlowSummary) -> Self {
        FlowOut {
            ratio_mean: s.ratio_mean,
            ratio_std: s.ratio_std,
            intra_mean: s.intra_mean,
            intra_std: s.intra_std,
        }
    }
}

#[derive(Serialize)]
pub struct GeoOut {
    pub geo_tweet_count: usize,
    pub geo_share: Scalar,
    pub median_lat: Option<Scalar>,
    pub median_lon: Option<Scalar>,
}

impl From<&GeoSummary> for GeoOut {
    fn from(s: &GeoSummary) -> Self {
        GeoOut {
            geo_tweet_count: s.geo_tweet_count,
            geo_share: s.geo_share,
            median_lat: s.median_lat,
            median_lon: s.median_lon,
        }
    }
}
