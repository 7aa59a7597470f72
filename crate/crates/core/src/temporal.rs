//! Registration time series, peak detection and registration deciles.

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::stats::nearest_rank;
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum TemporalError {
    #[error("corpus has no users")]
    EmptyCorpus,
}

/// Daily counts from `start_date` on, contiguous with zero-filled gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    pub start_date: NaiveDate,
    pub counts: Vec<u64>,
}

impl DailySeries {
    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + chrono::Days::new(index as u64)
    }
}

/// A strict local maximum of the registration series. `significance` is the
/// count's excess over the mean of its window neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub date: NaiveDate,
    pub volume: u64,
    pub significance: Scalar,
}

/// Number of registrations per day, from the earliest to the latest
/// registration date.
pub fn registration_series(corpus: &Corpus) -> Result<DailySeries, TemporalError> {
    let mut dates: Vec<NaiveDate> = corpus.users.values().map(|u| u.created_at).collect();
    if dates.is_empty() {
        return Err(TemporalError::EmptyCorpus);
    }
    dates.sort();
    let start_date = dates[0];
    let span = (dates[dates.len() - 1] - start_date).num_days() as usize + 1;
    let mut counts = vec![0u64; span];
    for d in dates {
        counts[(d - start_date).num_days() as usize] += 1;
    }
    Ok(DailySeries { start_date, counts })
}

/// Days whose count strictly exceeds every other day within `window` days
/// on both sides (truncated at the boundaries) and whose excess over the
/// neighborhood mean is positive. Output is in date order.
pub fn detect_peaks(series: &DailySeries, window: usize) -> Vec<Peak> {
    let counts = &series.counts;
    let mut peaks = Vec::new();
    for i in 0..counts.len() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(counts.len() - 1);
        let mut neighborhood_sum = 0u64;
        let mut neighborhood_len = 0usize;
        let mut strict_max = true;
        for j in lo..=hi {
            if j == i {
                continue;
            }
            if counts[j] >= counts[i] {
                strict_max = false;
                break;
            }
            neighborhood_sum += counts[j];
            neighborhood_len += 1;
        }
        if !strict_max {
            continue;
        }
        let mean = if neighborhood_len == 0 {
            0.0
        } else {
            neighborhood_sum as Scalar / neighborhood_len as Scalar
        };
        let significance = counts[i] as Scalar - mean;
        if significance > 0.0 {
            peaks.push(Peak { date: series.date_at(i), volume: counts[i], significance });
        }
    }
    peaks
}

/// Keeps the peaks in the top volume decile: the cutoff is the volume of
/// the ceil(0.1 × n)-th peak in descending order, ties included.
pub fn top_decile_peaks(peaks: &[Peak]) -> Vec<Peak> {
    if peaks.is_empty() {
        return Vec::new();
    }
    let mut volumes: Vec<u64> = peaks.iter().map(|p| p.volume).collect();
    volumes.sort_unstable_by(|a, b| b.cmp(a));
    let cutoff = volumes[nearest_rank(0.1, volumes.len()) - 1];
    peaks.iter().filter(|p| p.volume >= cutoff).cloned().collect()
}

/// One row of the decile table: the date by which `percent`% of the
/// accounts had registered.
#[derive(Debug, Clone, PartialEq)]
pub struct DecileRow {
    pub percent: u8,
    pub date: NaiveDate,
    pub days_since_previous: Option<i64>,
}

/// Registration dates at 0%, 10%, …, 100% of the population in ascending
/// registration order, with the day gap between consecutive rows.
pub fn registration_deciles(corpus: &Corpus) -> Result<Vec<DecileRow>, TemporalError> {
    let mut dates: Vec<NaiveDate> = corpus.users.values().map(|u| u.created_at).collect();
    if dates.is_empty() {
        return Err(TemporalError::EmptyCorpus);
    }
    dates.sort();
    let n = dates.len();

    let mut rows: Vec<DecileRow> = Vec::with_capacity(11);
    for step in 0..=10u8 {
        let percent = step * 10;
        let rank = nearest_rank(percent as f64 / 100.0, n);
        let date = dates[rank - 1];
        let days_since_previous = rows.last().map(|prev: &DecileRow| (date - prev.date).num_days());
        rows.push(DecileRow { percent, date, days_since_previous });
    }
    Ok(rows)
}
