//! Full-pipeline orchestration: ingest → geolocate → demographics →
//! temporal → content → interactions → hexbin, sequentially, each stage
//! writing only its own files into the output directory. Any stage failure
//! aborts the run with the stage name.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use chrono::Utc;

use geosocial::content::{
    aggregate_profiles, normalize_series, popular_terms, tfidf_vectors, top_terms_per_region,
    volume_series,
};
use geosocial::corpus::{corpus_stats, ingest, Corpus, TokenKind};
use geosocial::demographics::{
    load_word_list, top_bio_keywords, BioKeywordParams, GenderLexicon, PageRankOptions,
};
use geosocial::gazetteer::{
    coverage_table, load_aliases_csv, load_hierarchy_csv, pearson_log_correlation, Gazetteer,
};
use geosocial::geospatial::{geo_summary, hexbin_aggregate, HexGridSpec};
use geosocial::interactions::{
    flow_diagram_export, flow_stats, flow_summary, mention_region_index, od_matrix,
};
use geosocial::temporal::{detect_peaks, registration_deciles, registration_series, top_decile_peaks};
use geosocial::Scalar;

use crate::config::PipelineConfig;
use crate::report::{Report, Summary, Timing, ToolInfo, Warnings};
use crate::stages;

/// A failure inside one pipeline stage; the stage name goes to stderr and
/// the process exits with status 1.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub source: anyhow::Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {} failed: {:#}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {}

fn stage<T>(name: &'static str, result: Result<T>) -> Result<T, StageError> {
    result.map_err(|source| StageError { stage: name, source })
}

pub fn run_pipeline(config: &PipelineConfig, quiet: bool) -> Result<Report, StageError> {
    let started = Utc::now();
    let clock = Instant::now();
    let out_dir = &config.output.directory;
    stage(
        "setup",
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create {}", out_dir.display())),
    )?;

    let mut manifest: Vec<PathBuf> = Vec::new();
    let mut warnings = Warnings { pagerank_converged: true, ..Warnings::default() };

    // ingest
    let report = stage("ingest", ingest(&config.inputs.archive).map_err(Into::into))?;
    let corpus: Corpus = report.corpus;
    warnings.skipped_lines = report.skipped.len();
    if !quiet {
        for skip in report.skipped.iter().take(10) {
            eprintln!("warning: skipped line {}: {}", skip.line, skip.reason);
        }
        if report.skipped.len() > 10 {
            eprintln!("warning: {} malformed lines skipped in total", report.skipped.len());
        }
    }
    let stats = corpus_stats(&corpus);

    // geolocate
    let (gazetteer, resolutions, assignment, regions) = stage("geolocate", (|| {
        let hierarchy = load_hierarchy_csv(&config.inputs.hierarchy)?;
        let mut gazetteer = Gazetteer::build(hierarchy)?;
        if let Some(aliases_path) = &config.inputs.aliases {
            gazetteer.merge_aliases(load_aliases_csv(aliases_path)?)?;
        }
        let resolutions = gazetteer.resolve_users(&corpus);
        let assignment = gazetteer.region_assignment(&resolutions);
        let regions = gazetteer.region_ids();
        let path = out_dir.join("geolocate.csv");
        stages::write_geolocate_csv(&path, &resolutions, &gazetteer)?;
        manifest.push(path);
        anyhow::Ok((gazetteer, resolutions, assignment, regions))
    })())?;
    let coverage = coverage_table(&resolutions, &corpus);

    let pearson = {
        let pairs: Vec<(Scalar, Scalar)> = regions
            .iter()
            .filter_map(|&region| {
                let physical = gazetteer.unit(region)?.population? as Scalar;
                let virtual_pop =
                    assignment.values().filter(|&&r| r == region).count() as Scalar;
                (physical > 0.0 && virtual_pop > 0.0).then_some((physical, virtual_pop))
            })
            .collect();
        pearson_log_correlation(&pairs).ok()
    };

    // demographics
    stage("demographics", (|| {
        let lexicon = GenderLexicon::load(&config.inputs.male_names, &config.inputs.female_names)?;
        let stopwords: HashSet<String> =
            load_word_list(&config.inputs.stopwords)?.into_iter().collect();
        let params = BioKeywordParams {
            top_k: config.params.top_k_keywords,
            keep_fraction: config.params.keep_fraction,
            pagerank: PageRankOptions {
                damping: config.params.damping,
                tolerance: config.params.tolerance,
                max_iter: config.params.max_iter,
            },
        };
        let keywords = top_bio_keywords(&corpus, &lexicon, &stopwords, &params);
        warnings.pagerank_converged = keywords.pagerank_converged;
        let path = out_dir.join("demographics.csv");
        stages::write_demographics_csv(&path, &keywords.rows)?;
        manifest.push(path);
        anyhow::Ok(())
    })())?;

    // temporal
    stage("temporal", (|| {
        let series = registration_series(&corpus)?;
        let peaks = detect_peaks(&series, config.params.window);
        let top = top_decile_peaks(&peaks);
        let deciles = registration_deciles(&corpus)?;
        manifest.extend(stages::write_temporal(out_dir, &series, &peaks, &top, &deciles)?);
        anyhow::Ok(())
    })())?;

    // content
    stage("content", (|| {
        let series = volume_series(&corpus, &assignment, &regions, config.params.bin_width);
        let volume_path = out_dir.join("volume.csv");
        stages::write_volume_csv(&volume_path, &series)?;
        manifest.push(volume_path);

        let profile_path = out_dir.join("profile.csv");
        if series.is_empty() {
            stages::write_profile_csv(&profile_path, 0, config.params.bin_width, &[])?;
        } else {
            let normalized: Vec<Vec<Scalar>> =
                series.iter().map(|s| normalize_series(&s.counts)).collect();
            let profile = aggregate_profiles(&normalized)?;
            stages::write_profile_csv(
                &profile_path,
                series[0].start,
                config.params.bin_width,
                &profile,
            )?;
        }
        manifest.push(profile_path);

        let mentions = popular_terms(&corpus, TokenKind::Mention, config.params.top_k_terms);
        let hashtags = popular_terms(&corpus, TokenKind::Hashtag, config.params.top_k_terms);
        let popular_path = out_dir.join("popular.csv");
        stages::write_popular_csv(&popular_path, &mentions, &hashtags)?;
        manifest.push(popular_path);

        let vectors = tfidf_vectors(&corpus, &assignment)?;
        let top_terms = top_terms_per_region(&vectors, config.params.top_k_terms);
        let tfidf_path = out_dir.join("tfidf.csv");
        stages::write_tfidf_csv(&tfidf_path, &top_terms)?;
        manifest.push(tfidf_path);
        anyhow::Ok(())
    })())?;

    // interactions
    let flow = stage("interactions", (|| {
        let mention_regions = mention_region_index(&corpus, &assignment);
        let build = od_matrix(&corpus, &assignment, &mention_regions, &regions);
        warnings.unresolved_mentions = build.diagnostics.unresolved_mentions;
        warnings.unresolved_retweets = build.diagnostics.unresolved_retweets;

        let matrix_path = out_dir.join("matrix.csv");
        stages::write_matrix_csv(&matrix_path, &build.matrix)?;
        manifest.push(matrix_path);

        let stats = flow_stats(&build.matrix);
        let stats_path = out_dir.join("stats.csv");
        stages::write_flow_stats_csv(&stats_path, &stats)?;
        manifest.push(stats_path);

        let edges_path = out_dir.join("edges.csv");
        stages::write_edges_csv(&edges_path, &flow_diagram_export(&build.matrix))?;
        manifest.push(edges_path);

        // a matrix without any flow has no summary; that is not a failure
        anyhow::Ok(flow_summary(&stats).ok())
    })())?;

    // hexbin
    let geo = geo_summary(&corpus);
    stage("hexbin", (|| {
        let origin = config
            .params
            .hex_origin
            .or_else(|| geo.median_lat.zip(geo.median_lon))
            .unwrap_or((0.0, 0.0));
        let spec = HexGridSpec::new(origin, config.params.cell_size);
        let bins = hexbin_aggregate(&corpus, &spec, config.params.min_count);
        let path = out_dir.join("hexbin.csv");
        stages::write_hexbin_csv(&path, &bins)?;
        manifest.push(path);
        anyhow::Ok(())
    })())?;

    // report
    let mut manifest_names: Vec<String> = manifest
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    manifest_names.sort();

    let finished = Utc::now();
    let report = Report {
        tool: ToolInfo { name: "geosocial", version: env!("CARGO_PKG_VERSION") },
        timing: Timing {
            started_utc: started.to_rfc3339(),
            finished_utc: finished.to_rfc3339(),
            duration_seconds: clock.elapsed().as_secs_f64(),
        },
        parameters: config.params.clone(),
        warnings,
        manifest: manifest_names,
        summary: Summary {
            corpus: stats,
            coverage: coverage.iter().map(Into::into).collect(),
            pearson_log_population: pearson,
            flow: flow.as_ref().map(Into::into),
            geo: (&geo).into(),
        },
    };
    stage("report", (|| {
        let path = out_dir.join("report.json");
        let file = std::fs::File::create(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &report)?;
        anyhow::Ok(())
    })())?;

    Ok(report)
}
