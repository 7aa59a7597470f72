//! Per-region content: binned tweet-volume series, normalized volume
//! profiles, global mention/hashtag popularity and TF-IDF characteristic
//! vocabularies.
//!
//! Each region is treated as one document whose content is every tweet
//! authored there; term weights are `freq(w, r) × ln(|R| / df(w))` where
//! `freq` counts region-`r` tweets containing the term and `df` counts the
//! regions whose document contains it. Terms shared by all regions weigh
//! zero and are dropped.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Float;
use thiserror::Error;

use crate::corpus::{tokenize, Corpus, TokenKind, TweetRecord};
use crate::stats::mean_std;
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ContentError {
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no series to aggregate")]
    NoSeries,
    #[error("TF-IDF needs at least 2 regions with tweets, got {0}")]
    TooFewRegions(usize),
}

/// Tweet counts for one region in fixed-width time bins. All series of one
/// analysis share `start` (epoch seconds aligned down to the bin width) and
/// length.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSeries {
    pub region_id: u32,
    pub bin_width: i64,
    pub start: i64,
    pub counts: Vec<u64>,
}

/// One tweet-volume series per region over the common time span of all
/// region-assigned tweets (retweets included). Tweets by authors without a
/// region are excluded; regions without tweets get all-zero series.
pub fn volume_series(
    corpus: &Corpus,
    assignment: &BTreeMap<u64, u32>,
    regions: &[u32],
    bin_width: i64,
) -> Vec<BinnedSeries> {
    assert!(bin_width > 0, "bin width must be positive");
    let located: Vec<(&TweetRecord, u32)> = corpus
        .tweets
        .iter()
        .filter_map(|t| assignment.get(&t.author_id).map(|&r| (t, r)))
        .collect();
    let Some(min_t) = located.iter().map(|(t, _)| t.timestamp).min() else {
        return Vec::new();
    };
    let max_t = located.iter().map(|(t, _)| t.timestamp).max().unwrap();

    let start = min_t.div_euclid(bin_width) * bin_width;
    let bins = ((max_t - start).div_euclid(bin_width) + 1) as usize;

    let mut by_region: BTreeMap<u32, Vec<u64>> =
        regions.iter().map(|&r| (r, vec![0u64; bins])).collect();
    for (tweet, region) in located {
        let bin = ((tweet.timestamp - start).div_euclid(bin_width)) as usize;
        if let Some(counts) = by_region.get_mut(&region) {
            counts[bin] += 1;
        }
    }

    by_region
        .into_iter()
        .map(|(region_id, counts)| BinnedSeries { region_id, bin_width, start, counts })
        .collect()
}

/// Divides every bin by the series maximum, mapping counts into [0, 1];
/// an all-zero series stays all-zero.
pub fn normalize_series<F: Float>(counts: &[u64]) -> Vec<F> {
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![F::zero(); counts.len()];
    }
    let max = F::from(max).unwrap();
    counts.iter().map(|&c| F::from(c).unwrap() / max).collect()
}

/// Per-bin mean and population standard deviation across series of equal
/// length.
pub fn aggregate_profiles<F: Float>(series: &[Vec<F>]) -> Result<Vec<(F, F)>, ContentError> {
    let Some(first) = series.first() else {
        return Err(ContentError::NoSeries);
    };
    for s in series {
        if s.len() != first.len() {
            return Err(ContentError::LengthMismatch { left: first.len(), right: s.len() });
        }
    }
    Ok((0..first.len())
        .map(|bin| {
            let column: Vec<F> = series.iter().map(|s| s[bin]).collect();
            mean_std(&column)
        })
        .collect())
}

/// A term and the number of tweets containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermStats {
    pub term: String,
    pub tweet_count: usize,
}

/// Most-mentioned accounts or most-used hashtags over the whole corpus,
/// retweets included. Counting is per tweet: repeating a term inside one
/// tweet counts once. Ranked by count descending, then lexicographically.
pub fn popular_terms(corpus: &Corpus, kind: TokenKind, k: usize) -> Vec<TermStats> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for tweet in &corpus.tweets {
        let terms = match kind {
            TokenKind::Hashtag => &tweet.hashtags,
            TokenKind::Mention => &tweet.mentions,
            TokenKind::Word => panic!("popular_terms takes TokenKind::Mention or TokenKind::Hashtag"),
        };
        let distinct: BTreeSet<&str> = terms.iter().map(String::as_str).collect();
        for term in distinct {
            *counts.entry(term).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<TermStats> = counts
        .into_iter()
        .map(|(term, tweet_count)| TermStats { term: term.to_string(), tweet_count })
        .collect();
    ranked.sort_by(|a, b| b.tweet_count.cmp(&a.tweet_count).then_with(|| a.term.cmp(&b.term)));
    ranked.truncate(k);
    ranked
}

/// Sparse TF-IDF vector of one region; only strictly positive weights are
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionVector {
    pub region_id: u32,
    pub weights: BTreeMap<String, Scalar>,
}

/// Distinct terms of one tweet: words, hashtags and mentions alike.
fn tweet_terms(tweet: &TweetRecord) -> BTreeSet<String> {
    tokenize(&tweet.text).into_iter().map(|t| t.surface).collect()
}

/// TF-IDF vectors over the region documents. Retweets are excluded so
/// duplicated text cannot swamp the regional signal; `|R|` counts the
/// regions with at least one original tweet.
pub fn tfidf_vectors(
    corpus: &Corpus,
    assignment: &BTreeMap<u64, u32>,
) -> Result<Vec<RegionVector>, ContentError> {
    // freq(w, r): tweets from region r containing w
    let mut freq: BTreeMap<u32, HashMap<String, usize>> = BTreeMap::new();
    for tweet in &corpus.tweets {
        if tweet.is_retweet {
            continue;
        }
        let Some(&region) = assignment.get(&tweet.author_id) else { continue };
        let terms = tweet_terms(tweet);
        let region_freq = freq.entry(region).or_default();
        for term in terms {
            *region_freq.entry(term).or_insert(0) += 1;
        }
    }

    let region_count = freq.len();
    if region_count < 2 {
        return Err(ContentError::TooFewRegions(region_count));
    }

    let mut document_frequency: HashMap<&str, usize> = HashMap::new();
    for region_freq in freq.values() {
        for term in region_freq.keys() {
            *document_frequency.entry(term).or_insert(0) += 1;
        }
    }

    let total = region_count as Scalar;
    Ok(freq
        .iter()
        .map(|(&region_id, region_freq)| {
            let weights = region_freq
                .iter()
                .filter_map(|(term, &count)| {
                    let df = document_frequency[term.as_str()];
                    if df == region_count {
                        return None; // ln(|R|/|R|) = 0
                    }
                    let weight = count as Scalar * (total / df as Scalar).ln();
                    Some((term.clone(), weight))
                })
                .collect();
            RegionVector { region_id, weights }
        })
        .collect())
}

/// Top-`k` terms of each region by TF-IDF weight, ties broken
/// lexicographically.
pub fn top_terms_per_region(
    vectors: &[RegionVector],
    k: usize,
) -> Vec<(u32, Vec<(String, Scalar)>)> {
    vectors
        .iter()
        .map(|v| {
            let mut terms: Vec<(String, Scalar)> =
                v.weights.iter().map(|(t, &w)| (t.clone(), w)).collect();
            terms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
            terms.truncate(k);
            (v.region_id, terms)
        })
        .collect()
}
