//! `geosocial` — batch characterization of a geotagged social-media corpus.
//!
//! Subcommands mirror the pipeline stages (`ingest`, `geolocate`,
//! `demographics`, `temporal`, `content`, `interactions`, `hexbin`), plus
//! `run` for the whole pipeline from one config file and `synth` for the
//! seeded test-corpus generator. Exit codes: 0 success, 1 stage failure,
//! 2 configuration error.

mod config;
mod pipeline;
mod report;
mod stages;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use geosocial::content::{
    aggregate_profiles, normalize_series, popular_terms, tfidf_vectors, top_terms_per_region,
    volume_series,
};
use geosocial::corpus::{corpus_stats, ingest, TokenKind};
use geosocial::demographics::{
    load_word_list, top_bio_keywords, BioKeywordParams, GenderLexicon, PageRankOptions,
};
use geosocial::gazetteer::{load_aliases_csv, load_hierarchy_csv, Gazetteer};
use geosocial::geospatial::{geo_summary, hexbin_aggregate, HexGridSpec};
use geosocial::interactions::{flow_diagram_export, flow_stats, mention_region_index, od_matrix};
use geosocial::synth::{generate, SynthParams};
use geosocial::temporal::{
    detect_peaks, registration_deciles, registration_series, top_decile_peaks,
};
use geosocial::Scalar;

use config::{parse_lat_lon, Overrides, PipelineConfig};

#[derive(Parser)]
#[command(name = "geosocial", version, about = "Geotagged social-media corpus characterization")]
struct Cli {
    /// Suppress warnings and progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw line-delimited archive into a canonical corpus file.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print the corpus summary as JSON on stdout.
        #[arg(long)]
        stats: bool,
    },
    /// Resolve profile locations against an administrative hierarchy.
    Geolocate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        hierarchy: PathBuf,
        #[arg(long)]
        aliases: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gender classification and biography keyword ranking.
    Demographics {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        male: PathBuf,
        #[arg(long)]
        female: PathBuf,
        #[arg(long)]
        stopwords: PathBuf,
        #[arg(long, default_value_t = 50)]
        top_k: usize,
        #[arg(long, default_value_t = 0.001)]
        keep_fraction: f64,
        #[arg(long, default_value_t = 0.85)]
        damping: Scalar,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: Scalar,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Registration series, peaks and deciles.
    Temporal {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 7)]
        window: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Per-region volume series, popularity tables and TF-IDF vocabulary.
    Content {
        #[arg(long)]
        corpus: PathBuf,
        /// Geolocate output CSV providing the user → region assignment.
        #[arg(long)]
        regions: PathBuf,
        #[arg(long, default_value_t = 300)]
        bin: i64,
        #[arg(long, default_value_t = 25)]
        top_k: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Mention origin-destination matrix and flow statistics.
    Interactions {
        #[arg(long)]
        corpus: PathBuf,
        /// Geolocate output CSV providing the user → region assignment.
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Hexagonal aggregation of geotagged tweets.
    Hexbin {
        #[arg(long)]
        corpus: PathBuf,
        /// Grid origin as `lat,lon`; defaults to the median coordinates.
        #[arg(long, value_parser = parse_lat_lon, allow_hyphen_values = true)]
        origin: Option<(Scalar, Scalar)>,
        #[arg(long, default_value_t = 500.0)]
        cell: Scalar,
        #[arg(long, default_value_t = 20)]
        min_count: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline from a config file; flags override the file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        bin: Option<i64>,
        #[arg(long)]
        keep_fraction: Option<f64>,
        #[arg(long)]
        damping: Option<Scalar>,
        #[arg(long)]
        tolerance: Option<Scalar>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        top_k_keywords: Option<usize>,
        #[arg(long)]
        top_k_terms: Option<usize>,
        #[arg(long)]
        cell: Option<Scalar>,
        #[arg(long)]
        min_count: Option<u64>,
        #[arg(long, value_parser = parse_lat_lon, allow_hyphen_values = true)]
        origin: Option<(Scalar, Scalar)>,
    },
    /// Generate a seeded synthetic archive plus its ground-truth manifest.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        users: usize,
        #[arg(long, default_value_t = 5000)]
        tweets: usize,
        #[arg(long)]
        hierarchy: PathBuf,
        #[arg(long)]
        male: PathBuf,
        #[arg(long)]
        female: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

enum CliError {
    /// Bad arguments or unusable input files: exit code 2.
    Config(String),
    /// A processing stage failed: exit code 1, stage name on stderr.
    Stage { stage: &'static str, source: anyhow::Error },
}

impl CliError {
    fn stage(stage: &'static str) -> impl FnOnce(anyhow::Error) -> CliError {
        move |source| CliError::Stage { stage, source }
    }
}

fn require_file(name: &str, path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} file not found: {}", path.display())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Stage { stage, source }) => {
            eprintln!("geosocial: stage {stage} failed: {source:#}");
            ExitCode::from(1)
        }
        Err(CliError::Config(message)) => {
            eprintln!("geosocial: configuration error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { input, out, stats } => {
            require_file("input", &input)?;
            let report = ingest(&input).map_err(Into::into).map_err(CliError::stage("ingest"))?;
            if !cli.quiet {
                for skip in report.skipped.iter().take(10) {
                    eprintln!("warning: skipped line {}: {}", skip.line, skip.reason);
                }
                if report.skipped.len() > 10 {
                    eprintln!("warning: {} malformed lines skipped", report.skipped.len());
                }
            }
            report
                .corpus
                .save(&out)
                .map_err(Into::into)
                .map_err(CliError::stage("ingest"))?;
            if stats {
                let summary = corpus_stats(&report.corpus);
                println!("{}", serde_json::to_string(&summary).expect("stats serialize"));
            }
            Ok(())
        }

        Command::Geolocate { corpus, hierarchy, aliases, out } => {
            require_file("corpus", &corpus)?;
            require_file("hierarchy", &hierarchy)?;
            if let Some(aliases) = &aliases {
                require_file("aliases", aliases)?;
            }
            let fail = CliError::stage("geolocate");
            (|| {
                let corpus = stages::load_corpus(&corpus)?;
                let units = load_hierarchy_csv(&hierarchy)?;
                let mut gazetteer = Gazetteer::build(units)?;
                if let Some(aliases) = &aliases {
                    gazetteer.merge_aliases(load_aliases_csv(aliases)?)?;
                }
                let resolutions = gazetteer.resolve_users(&corpus);
                stages::write_geolocate_csv(&out, &resolutions, &gazetteer)
            })()
            .map_err(fail)
        }

        Command::Demographics {
            corpus,
            male,
            female,
            stopwords,
            top_k,
            keep_fraction,
            damping,
            tolerance,
            max_iter,
            out,
        } => {
            require_file("corpus", &corpus)?;
            require_file("male", &male)?;
            require_file("female", &female)?;
            require_file("stopwords", &stopwords)?;
            if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
                return Err(CliError::Config(format!(
                    "keep_fraction must be in (0, 1], got {keep_fraction}"
                )));
            }
            if !(0.0..1.0).contains(&damping) {
                return Err(CliError::Config(format!("damping must be in [0, 1), got {damping}")));
            }
            let fail = CliError::stage("demographics");
            (|| {
                let corpus = stages::load_corpus(&corpus)?;
                let lexicon = GenderLexicon::load(&male, &female)?;
                let stopwords: HashSet<String> =
                    load_word_list(&stopwords)?.into_iter().collect();
                let params = BioKeywordParams {
                    top_k,
                    keep_fraction,
                    pagerank: PageRankOptions { damping, tolerance, max_iter },
                };
                let keywords = top_bio_keywords(&corpus, &lexicon, &stopwords, &params);
                if !keywords.pagerank_converged && !cli.quiet {
                    eprintln!("warning: pagerank did not converge within {max_iter} iterations");
                }
                stages::write_demographics_csv(&out, &keywords.rows)
            })()
            .map_err(fail)
        }

        Command::Temporal { corpus, window, out_dir } => {
            require_file("corpus", &corpus)?;
            let fail = CliError::stage("temporal");
            (|| {
                std::fs::create_dir_all(&out_dir)
                    .with_context(|| format!("cannot create {}", out_dir.display()))?;
                let corpus = stages::load_corpus(&corpus)?;
                let series = registration_series(&corpus)?;
                let peaks = detect_peaks(&series, window);
                let top = top_decile_peaks(&peaks);
                let deciles = registration_deciles(&corpus)?;
                stages::write_temporal(&out_dir, &series, &peaks, &top, &deciles)?;
                anyhow::Ok(())
            })()
            .map_err(fail)
        }

        Command::Content { corpus, regions, bin, top_k, out_dir } => {
            require_file("corpus", &corpus)?;
            require_file("regions", &regions)?;
            if bin <= 0 {
                return Err(CliError::Config(format!("bin width must be positive, got {bin}")));
            }
            let fail = CliError::stage("content");
            (|| {
                std::fs::create_dir_all(&out_dir)
                    .with_context(|| format!("cannot create {}", out_dir.display()))?;
                let corpus = stages::load_corpus(&corpus)?;
                let (assignment, region_list) = stages::read_assignment_csv(&regions)?;

                let series = volume_series(&corpus, &assignment, &region_list, bin);
                stages::write_volume_csv(&out_dir.join("volume.csv"), &series)?;
                if series.is_empty() {
                    stages::write_profile_csv(&out_dir.join("profile.csv"), 0, bin, &[])?;
                } else {
                    let normalized: Vec<Vec<Scalar>> =
                        series.iter().map(|s| normalize_series(&s.counts)).collect();
                    let profile = aggregate_profiles(&normalized)?;
                    stages::write_profile_csv(
                        &out_dir.join("profile.csv"),
                        series[0].start,
                        bin,
                        &profile,
                    )?;
                }

                let mentions = popular_terms(&corpus, TokenKind::Mention, top_k);
                let hashtags = popular_terms(&corpus, TokenKind::Hashtag, top_k);
                stages::write_popular_csv(&out_dir.join("popular.csv"), &mentions, &hashtags)?;

                let vectors = tfidf_vectors(&corpus, &assignment)?;
                let top_terms = top_terms_per_region(&vectors, top_k);
                stages::write_tfidf_csv(&out_dir.join("tfidf.csv"), &top_terms)?;
                anyhow::Ok(())
            })()
            .map_err(fail)
        }

        Command::Interactions { corpus, regions, out_dir } => {
            require_file("corpus", &corpus)?;
            require_file("regions", &regions)?;
            let fail = CliError::stage("interactions");
            (|| {
                std::fs::create_dir_all(&out_dir)
                    .with_context(|| format!("cannot create {}", out_dir.display()))?;
                let corpus = stages::load_corpus(&corpus)?;
                let (assignment, region_list) = stages::read_assignment_csv(&regions)?;
                let mention_regions = mention_region_index(&corpus, &assignment);
                let build = od_matrix(&corpus, &assignment, &mention_regions, &region_list);
                if !cli.quiet {
                    let d = &build.diagnostics;
                    if d.unresolved_mentions + d.unresolved_retweets > 0 {
                        eprintln!(
                            "note: {} mentions and {} retweets had no resolvable region",
                            d.unresolved_mentions, d.unresolved_retweets
                        );
                    }
                }
                stages::write_matrix_csv(&out_dir.join("matrix.csv"), &build.matrix)?;
                let stats = flow_stats(&build.matrix);
                stages::write_flow_stats_csv(&out_dir.join("stats.csv"), &stats)?;
                stages::write_edges_csv(
                    &out_dir.join("edges.csv"),
                    &flow_diagram_export(&build.matrix),
                )?;
                anyhow::Ok(())
            })()
            .map_err(fail)
        }

        Command::Hexbin { corpus, origin, cell, min_count, out } => {
            require_file("corpus", &corpus)?;
            if cell <= 0.0 {
                return Err(CliError::Config(format!("cell size must be positive, got {cell}")));
            }
            let fail = CliError::stage("hexbin");
            (|| {
                let corpus = stages::load_corpus(&corpus)?;
                let summary = geo_summary(&corpus);
                let origin = origin
                    .or_else(|| summary.median_lat.zip(summary.median_lon))
                    .unwrap_or((0.0, 0.0));
                let spec = HexGridSpec::new(origin, cell);
                let bins = hexbin_aggregate(&corpus, &spec, min_count);
                stages::write_hexbin_csv(&out, &bins)
            })()
            .map_err(fail)
        }

        Command::Run {
            config,
            out_dir,
            bin,
            keep_fraction,
            damping,
            tolerance,
            max_iter,
            window,
            top_k_keywords,
            top_k_terms,
            cell,
            min_count,
            origin,
        } => {
            let overrides = Overrides {
                out_dir,
                bin_width: bin,
                keep_fraction,
                damping,
                tolerance,
                max_iter,
                window,
                top_k_keywords,
                top_k_terms,
                cell_size: cell,
                min_count,
                hex_origin: origin,
            };
            let config = PipelineConfig::load(&config, &overrides).map_err(CliError::Config)?;
            let report = pipeline::run_pipeline(&config, cli.quiet)
                .map_err(|e| CliError::Stage { stage: e.stage, source: e.source })?;
            if !cli.quiet {
                eprintln!(
                    "pipeline finished: {} files in {}",
                    report.manifest.len(),
                    config.output.directory.display()
                );
            }
            Ok(())
        }

        Command::Synth { seed, users, tweets, hierarchy, male, female, out_dir } => {
            require_file("hierarchy", &hierarchy)?;
            require_file("male", &male)?;
            require_file("female", &female)?;
            let fail = CliError::stage("synth");
            (|| {
                std::fs::create_dir_all(&out_dir)
                    .with_context(|| format!("cannot create {}", out_dir.display()))?;
                let units = load_hierarchy_csv(&hierarchy)?;
                let male = load_word_list(&male)?;
                let female = load_word_list(&female)?;
                let params = SynthParams { seed, users, records: tweets };
                let archive = out_dir.join("archive.jsonl");
                let truth = generate(&params, units, &male, &female, &archive)?;
                truth.save(&out_dir.join("ground_truth.json"))?;
                anyhow::Ok(())
            })()
            .map_err(fail)
        }
    }
}
