//! Corpus ingestion, text normalization and tokenization.
//!
//! The input is a UTF-8 line-delimited archive, one JSON record per line in
//! the classic API export shape (`id`, `text`, `created_at`, `user {...}`,
//! `coordinates` or null, `retweeted_status` or absent). Malformed lines are
//! skipped and reported, never fatal. The resulting [`Corpus`] is immutable
//! and sorted by `(timestamp, tweet_id)`, so two ingests of the same file
//! serialize to identical bytes.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

/// Timestamp format of the classic API archives, e.g.
/// `Sun Oct 28 14:23:01 +0000 2012`.
pub const TIMESTAMP_FORMAT: &str = "%a %b %d %H:%M:%S %z %Y";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed corpus file {path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// One post. `hashtags` and `mentions` hold the normalized tokens extracted
/// from `text`, in order of appearance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: u64,
    pub author_id: u64,
    /// UTC epoch seconds.
    pub timestamp: i64,
    pub text: String,
    pub hashtags: Vec<String>,
    pub mentions: Vec<String>,
    /// `(latitude, longitude)` in degrees when the post carried a GPS fix.
    pub coordinates: Option<(f64, f64)>,
    pub is_retweet: bool,
    pub retweeted_id: Option<u64>,
}

/// One account, as self-reported in the profile at collection time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: u64,
    pub screen_name: String,
    pub display_name: String,
    pub location_text: String,
    pub bio_text: String,
    /// Registration date (UTC).
    pub created_at: NaiveDate,
}

/// Immutable collection of tweets plus the profiles of their authors.
///
/// Tweets are sorted ascending by `(timestamp, tweet_id)`; every
/// `author_id` has an entry in `users`. When a user appears on several
/// records, the profile snapshot of the latest record in sort order wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub tweets: Vec<TweetRecord>,
    pub users: BTreeMap<u64, UserProfile>,
    pub collection_date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
}

/// A vocabulary element: a lowercase, accent-stripped surface string.
/// Hashtags keep their `#` prefix and mentions their `@` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    fn word(surface: String) -> Self {
        Token { surface, kind: TokenKind::Word }
    }
}

/// Lowercases and strips Spanish accents: `á é í ó ú ü → a e i o u u`,
/// `ñ → n`. Every other character passes through unchanged, so the function
/// is total and idempotent.
pub fn normalize_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        for lc in c.to_lowercase() {
            out.push(match lc {
                'á' => 'a',
                'é' => 'e',
                'í' => 'i',
                'ó' => 'o',
                'ú' | 'ü' => 'u',
                'ñ' => 'n',
                other => other,
            });
        }
    }
    out
}

/// Splits normalized text into word, hashtag and mention tokens.
///
/// Anything outside `[a-z0-9_#@]` separates tokens; `#` and `@` always start
/// a new token, even mid-run. Sigil tokens with an empty body (a bare `#` or
/// `@`) are dropped.
pub fn tokenize(text: &str) -> Vec<Token> {
    let norm = normalize_text(text);
    let mut tokens = Vec::new();
    let mut current = String::new();

    let flush = |current: &mut String, tokens: &mut Vec<Token>| {
        if current.is_empty() {
            return;
        }
        let tok = std::mem::take(current);
        match tok.as_bytes()[0] {
            b'#' if tok.len() > 1 => tokens.push(Token { surface: tok, kind: TokenKind::Hashtag }),
            b'@' if tok.len() > 1 => tokens.push(Token { surface: tok, kind: TokenKind::Mention }),
            b'#' | b'@' => {} // bare sigil, no body
            _ => tokens.push(Token::word(tok)),
        }
    };

    for c in norm.chars() {
        match c {
            'a'..='z' | '0'..='9' | '_' => current.push(c),
            '#' | '@' => {
                flush(&mut current, &mut tokens);
                current.push(c);
            }
            _ => flush(&mut current, &mut tokens),
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

/// Summary of a corpus. `tweet_count` excludes retweets; `vocabulary_size`
/// counts distinct token surfaces of all kinds; `hashtag_tweet_share` is the
/// fraction of non-retweet tweets with at least one hashtag (0 on an empty
/// corpus).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub tweet_count: usize,
    pub retweet_count: usize,
    pub participant_count: usize,
    pub vocabulary_size: usize,
    pub hashtag_tweet_share: Scalar,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut tweet_count = 0usize;
    let mut retweet_count = 0usize;
    let mut with_hashtag = 0usize;
    let mut authors = HashSet::new();
    let mut vocabulary = HashSet::new();

    for tweet in &corpus.tweets {
        if tweet.is_retweet {
            retweet_count += 1;
        } else {
            tweet_count += 1;
            if !tweet.hashtags.is_empty() {
                with_hashtag += 1;
            }
        }
        authors.insert(tweet.author_id);
        for token in tokenize(&tweet.text) {
            vocabulary.insert(token.surface);
        }
    }

    let share = if tweet_count == 0 {
        0.0
    } else {
        with_hashtag as Scalar / tweet_count as Scalar
    };
    CorpusStats {
        tweet_count,
        retweet_count,
        participant_count: authors.len(),
        vocabulary_size: vocabulary.len(),
        hashtag_tweet_share: share,
    }
}

/// A line the parser had to skip, with its 1-based line number.
#[derive(Debug, Clone)]
pub struct LineSkip {
    pub line: usize,
    pub reason: String,
}

/// Result of [`ingest`]: the corpus plus a record of skipped lines.
#[derive(Debug)]
pub struct IngestReport {
    pub corpus: Corpus,
    pub skipped: Vec<LineSkip>,
}

// Wire shapes of the archive lines.

#[derive(Deserialize)]
struct RawTweet {
    id: u64,
    text: String,
    created_at: String,
    user: RawUser,
    #[serde(default)]
    coordinates: Option<RawCoordinates>,
    #[serde(default)]
    retweeted_status: Option<RawRetweetedStatus>,
}

#[derive(Deserialize)]
struct RawUser {
    id: u64,
    name: String,
    screen_name: String,
    #[serde(default)]
    location: Option<String>,
    #[serde(default)]
    description: Option<String>,
    created_at: String,
}

#[derive(Deserialize)]
struct RawCoordinates {
    /// `[longitude, latitude]`, GeoJSON axis order.
    coordinates: [f64; 2],
}

#[derive(Deserialize)]
struct RawRetweetedStatus {
    id: u64,
}

pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, chrono::ParseError> {
    DateTime::parse_from_str(s, TIMESTAMP_FORMAT).map(|dt| dt.with_timezone(&Utc))
}

fn parse_line(line: &str) -> Result<(TweetRecord, UserProfile), String> {
    let raw: RawTweet = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let timestamp = parse_timestamp(&raw.created_at)
        .map_err(|e| format!("bad created_at {:?}: {e}", raw.created_at))?;
    let registered = parse_timestamp(&raw.user.created_at)
        .map_err(|e| format!("bad user.created_at {:?}: {e}", raw.user.created_at))?;

    let coordinates = match raw.coordinates {
        None => None,
        Some(c) => {
            let (lon, lat) = (c.coordinates[0], c.coordinates[1]);
            if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                return Err(format!("coordinates out of range: ({lat}, {lon})"));
            }
            Some((lat, lon))
        }
    };

    let tokens = tokenize(&raw.text);
    let hashtags = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Hashtag)
        .map(|t| t.surface.clone())
        .collect();
    let mentions = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Mention)
        .map(|t| t.surface.clone())
        .collect();

    let tweet = TweetRecord {
        tweet_id: raw.id,
        author_id: raw.user.id,
        timestamp: timestamp.timestamp(),
        text: raw.text,
        hashtags,
        mentions,
        coordinates,
        is_retweet: raw.retweeted_status.is_some(),
        retweeted_id: raw.retweeted_status.map(|r| r.id),
    };
    let user = UserProfile {
        user_id: raw.user.id,
        screen_name: raw.user.screen_name,
        display_name: raw.user.name,
        location_text: raw.user.location.unwrap_or_default(),
        bio_text: raw.user.description.unwrap_or_default(),
        created_at: registered.date_naive(),
    };
    Ok((tweet, user))
}

/// Builds a [`Corpus`] from parsed records: sorts by `(timestamp, tweet_id)`
/// and keeps, per user, the profile attached to the latest record.
pub fn assemble(mut records: Vec<(TweetRecord, UserProfile)>) -> Corpus {
    records.sort_by_key(|(t, _)| (t.timestamp, t.tweet_id));
    let collection_date = records
        .last()
        .map(|(t, _)| {
            DateTime::<Utc>::from_timestamp(t.timestamp, 0)
                .expect("epoch seconds in range")
                .date_naive()
        })
        .unwrap_or(NaiveDate::from_ymd_opt(1970, 1, 1).unwrap());

    let mut users = BTreeMap::new();
    let mut tweets = Vec::with_capacity(records.len());
    for (tweet, user) in records {
        users.insert(user.user_id, user);
        tweets.push(tweet);
    }
    Corpus { tweets, users, collection_date }
}

/// Reads a line-delimited archive. Malformed lines are skipped and reported
/// in the returned [`IngestReport`]; only an unreadable file is fatal.
pub fn ingest(path: &Path) -> Result<IngestReport, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line) {
            Ok(rec) => records.push(rec),
            Err(reason) => skipped.push(LineSkip { line: idx + 1, reason }),
        }
    }

    Ok(IngestReport { corpus: assemble(records), skipped })
}

impl Corpus {
    /// Writes the canonical serialized form: a single JSON document with
    /// tweets in sort order and users keyed ascending, so identical corpora
    /// produce identical bytes.
    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let file = File::create(path).map_err(|source| CorpusError::Write {
            path: path.to_path_buf(),
            source,
        })?;
        let mut writer = BufWriter::new(file);
        serde_json::to_writer(&mut writer, self).map_err(|e| CorpusError::Write {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        writer.flush().map_err(|source| CorpusError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Corpus, CorpusError> {
        let data = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&data).map_err(|source| CorpusError::Format {
            path: path.to_path_buf(),
            source,
        })
    }
}
