//! Region-to-region information flow: the mention origin-destination matrix
//! and its in/out and intra-region statistics.
//!
//! Cell `(i, j)` counts tweets authored in region `i` that mention at least
//! one account located in region `j`; a tweet contributes at most once per
//! destination region no matter how many accounts it mentions there.
//! Retweets count as a mention of the original tweet's author.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::corpus::{normalize_text, Corpus};
use crate::stats::mean_std;
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum InteractionsError {
    #[error("matrix has no defined flow ratios or intra shares")]
    AllUndefined,
}

/// Dense region × region interaction counts; `cells[i][j]` follows the
/// order of `regions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ODMatrix {
    pub regions: Vec<u32>,
    pub cells: Vec<Vec<u64>>,
}

impl ODMatrix {
    pub fn zero(regions: Vec<u32>) -> Self {
        let n = regions.len();
        ODMatrix { regions, cells: vec![vec![0; n]; n] }
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn out_sum(&self, i: usize) -> u64 {
        self.cells[i].iter().sum()
    }

    pub fn in_sum(&self, j: usize) -> u64 {
        self.cells.iter().map(|row| row[j]).sum()
    }
}

/// What the matrix build skipped: mention tokens that matched no located
/// account and retweets of tweets outside the corpus or by unlocated
/// authors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ODDiagnostics {
    pub unresolved_mentions: u64,
    pub unresolved_retweets: u64,
}

#[derive(Debug, Clone)]
pub struct ODMatrixBuild {
    pub matrix: ODMatrix,
    pub diagnostics: ODDiagnostics,
}

/// Maps normalized screen names of region-located users to their region, so
/// mention tokens (`@name`) can be resolved to destinations.
pub fn mention_region_index(
    corpus: &Corpus,
    assignment: &BTreeMap<u64, u32>,
) -> HashMap<String, u32> {
    let mut index = HashMap::new();
    for user in corpus.users.values() {
        if let Some(&region) = assignment.get(&user.user_id) {
            index.insert(normalize_text(&user.screen_name), region);
        }
    }
    index
}

/// Builds the origin-destination matrix over `regions` (which fixes the
/// row/column order). Tweets by unlocated authors are skipped entirely.
pub fn od_matrix(
    corpus: &Corpus,
    assignment: &BTreeMap<u64, u32>,
    mention_regions: &HashMap<String, u32>,
    regions: &[u32],
) -> ODMatrixBuild {
    let index_of: HashMap<u32, usize> =
        regions.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let author_of_tweet: HashMap<u64, u64> =
        corpus.tweets.iter().map(|t| (t.tweet_id, t.author_id)).collect();

    let mut matrix = ODMatrix::zero(regions.to_vec());
    let mut diagnostics = ODDiagnostics::default();

    for tweet in &corpus.tweets {
        let Some(&source_region) = assignment.get(&tweet.author_id) else { continue };
        let Some(&source) = index_of.get(&source_region) else { continue };

        let mut destinations: BTreeSet<usize> = BTreeSet::new();
        for mention in &tweet.mentions {
            let name = mention.trim_start_matches('@');
            match mention_regions.get(name).and_then(|r| index_of.get(r)) {
                Some(&dest) => {
                    destinations.insert(dest);
                }
                None => diagnostics.unresolved_mentions += 1,
            }
        }
        if let Some(retweeted_id) = tweet.retweeted_id {
            let dest = author_of_tweet
                .get(&retweeted_id)
                .and_then(|author| assignment.get(author))
                .and_then(|r| index_of.get(r));
            match dest {
                Some(&dest) => {
                    destinations.insert(dest);
                }
                None => diagnostics.unresolved_retweets += 1,
            }
        }

        for dest in destinations {
            matrix.cells[source][dest] += 1;
        }
    }

    ODMatrixBuild { matrix, diagnostics }
}

/// Per-region totals and ratios. Ratios are `None` where the denominator
/// is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowStats {
    pub region_id: u32,
    pub incoming: u64,
    pub outgoing: u64,
    pub in_out_ratio: Option<Scalar>,
    pub intra_share: Option<Scalar>,
}

/// `in(i)` is the column sum, `out(i)` the row sum, both including the
/// diagonal; `intra_share` is the diagonal over `in(i)`.
pub fn flow_stats(matrix: &ODMatrix) -> Vec<FlowStats> {
    (0..matrix.regions.len())
        .map(|i| {
            let incoming = matrix.in_sum(i);
            let outgoing = matrix.out_sum(i);
            FlowStats {
                region_id: matrix.regions[i],
                incoming,
                outgoing,
                in_out_ratio: (outgoing > 0)
                    .then(|| incoming as Scalar / outgoing as Scalar),
                intra_share: (incoming > 0)
                    .then(|| matrix.cells[i][i] as Scalar / incoming as Scalar),
            }
        })
        .collect()
}

/// Mean and population standard deviation of the defined ratios and intra
/// shares.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub ratio_mean: Scalar,
    pub ratio_std: Scalar,
    pub intra_mean: Scalar,
    pub intra_std: Scalar,
}

pub fn flow_summary(stats: &[FlowStats]) -> Result<FlowSummary, InteractionsError> {
    let ratios: Vec<Scalar> = stats.iter().filter_map(|s| s.in_out_ratio).collect();
    let intras: Vec<Scalar> = stats.iter().filter_map(|s| s.intra_share).collect();
    if ratios.is_empty() || intras.is_empty() {
        return Err(InteractionsError::AllUndefined);
    }
    let (ratio_mean, ratio_std) = mean_std(&ratios);
    let (intra_mean, intra_std) = mean_std(&intras);
    Ok(FlowSummary { ratio_mean, ratio_std, intra_mean, intra_std })
}

/// One nonzero matrix cell as a plot-ready edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEdge {
    pub source: u32,
    pub destination: u32,
    pub count: u64,
}

/// All nonzero cells, heaviest first, then by (source, destination).
pub fn flow_diagram_export(matrix: &ODMatrix) -> Vec<FlowEdge> {
    let mut edges = Vec::new();
    for (i, row) in matrix.cells.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count > 0 {
                edges.push(FlowEdge {
                    source: matrix.regions[i],
                    destination: matrix.regions[j],
                    count,
                });
            }
        }
    }
    edges.sort_by(|a, b| {
        b.count.cmp(&a.count).then_with(|| (a.source, a.destination).cmp(&(b.source, b.destination)))
    });
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{assemble, tokenize, TokenKind, TweetRecord, UserProfile};
    use chrono::NaiveDate;

    fn record(
        id: u64,
        author: u64,
        text: &str,
        retweet_of: Option<u64>,
    ) -> (TweetRecord, UserProfile) {
        let tokens = tokenize(text);
        let tweet = TweetRecord {
            tweet_id: id,
            author_id: author,
            timestamp: 1_351_425_600 + id as i64,
            text: text.to_string(),
            hashtags: vec![],
            mentions: tokens
                .iter()
                .filter(|t| t.kind == TokenKind::Mention)
                .map(|t| t.surface.clone())
                .collect(),
            coordinates: None,
            is_retweet: retweet_of.is_some(),
            retweeted_id: retweet_of,
        };
        let user = UserProfile {
            user_id: author,
            screen_name: format!("user{author}"),
            display_name: format!("User {author}"),
            location_text: String::new(),
            bio_text: String::new(),
            created_at: NaiveDate::from_ymd_opt(2010, 1, 4).unwrap(),
        };
        (tweet, user)
    }

    fn setup(
        records: Vec<(TweetRecord, UserProfile)>,
        assignment: &[(u64, u32)],
        regions: &[u32],
    ) -> ODMatrixBuild {
        let corpus = assemble(records);
        let assignment: BTreeMap<u64, u32> = assignment.iter().copied().collect();
        let mentions = mention_region_index(&corpus, &assignment);
        od_matrix(&corpus, &assignment, &mentions, regions)
    }

    #[test]
    fn one_tweet_counts_once_per_destination_region() {
        // users 1,2 in region 10; 3,4 in region 20; 5 in region 30
        let assignment = [(1, 10), (2, 10), (3, 20), (4, 20), (5, 30)];
        let regions = [10, 20, 30];

        // two mentions into the same region: one increment
        let build = setup(
            vec![
                record(1, 1, "hola @user3 @user4", None),
                record(2, 3, "x", None),
                record(3, 4, "x", None),
                record(4, 5, "x", None),
                record(5, 2, "x", None),
            ],
            &assignment,
            &regions,
        );
        assert_eq!(build.matrix.cells[0][1], 1);
        assert_eq!(build.matrix.total(), 1);

        // mentions into two regions: both cells increment
        let build = setup(
            vec![
                record(1, 1, "hola @user3 @user5", None),
                record(2, 3, "x", None),
                record(3, 5, "x", None),
            ],
            &assignment,
            &regions,
        );
        assert_eq!(build.matrix.cells[0][1], 1);
        assert_eq!(build.matrix.cells[0][2], 1);
    }

    #[test]
    fn retweets_reach_the_original_author() {
        let assignment = [(1, 10), (3, 20)];
        let build = setup(
            vec![record(7, 3, "contenido original", None), record(8, 1, "rt", Some(7))],
            &assignment,
            &[10, 20],
        );
        assert_eq!(build.matrix.cells[0][1], 1);
        assert_eq!(build.diagnostics.unresolved_retweets, 0);

        // retweet of an unknown tweet is tallied, not counted
        let build = setup(vec![record(8, 1, "rt", Some(999))], &assignment, &[10, 20]);
        assert_eq!(build.matrix.total(), 0);
        assert_eq!(build.diagnostics.unresolved_retweets, 1);
    }

    #[test]
    fn unresolved_mentions_are_tallied() {
        let assignment = [(1, 10)];
        let build = setup(
            vec![record(1, 1, "@desconocido @user9 hola", None)],
            &assignment,
            &[10],
        );
        assert_eq!(build.matrix.total(), 0);
        assert_eq!(build.diagnostics.unresolved_mentions, 2);
    }

    #[test]
    fn matrix_matches_brute_force_tally() {
        // deterministic planted pattern over 4 regions
        let regions = [1u32, 2, 3, 4];
        let assignment: Vec<(u64, u32)> = (1..=20u64).map(|u| (u, regions[(u % 4) as usize])).collect();
        let mut records = Vec::new();
        for i in 0..200u64 {
            let author = i % 20 + 1;
            let a = i % 19 + 1;
            let b = (i * 7) % 17 + 1;
            let text = format!("hola @user{a} y @user{b}");
            records.push(record(i + 1, author, &text, None));
        }

        // independent tally from the construction intent
        let region_of = |u: u64| regions[(u % 4) as usize];
        let mut expected: HashMap<(u32, u32), u64> = HashMap::new();
        for i in 0..200u64 {
            let author = i % 20 + 1;
            let a = i % 19 + 1;
            let b = (i * 7) % 17 + 1;
            let mut dests: BTreeSet<u32> = BTreeSet::new();
            dests.insert(region_of(a));
            dests.insert(region_of(b));
            for d in dests {
                *expected.entry((region_of(author), d)).or_insert(0) += 1;
            }
        }

        let build = setup(records, &assignment, &regions);
        for (i, &ri) in regions.iter().enumerate() {
            for (j, &rj) in regions.iter().enumerate() {
                assert_eq!(
                    build.matrix.cells[i][j],
                    expected.get(&(ri, rj)).copied().unwrap_or(0),
                    "cell ({ri}, {rj})"
                );
            }
        }
        assert_eq!(build.diagnostics.unresolved_mentions, 0);
    }

    #[test]
    fn relabeling_regions_permutes_the_matrix() {
        let records = || {
            vec![
                record(1, 1, "@user2", None),
                record(2, 2, "@user1 @user2", None),
                record(3, 1, "@user1", None),
            ]
        };
        let forward = setup(records(), &[(1, 10), (2, 20)], &[10, 20]);
        let swapped = setup(records(), &[(1, 20), (2, 10)], &[10, 20]);
        assert_eq!(forward.matrix.cells[0][1], swapped.matrix.cells[1][0]);
        assert_eq!(forward.matrix.cells[0][0], swapped.matrix.cells[1][1]);
        assert_eq!(forward.matrix.total(), swapped.matrix.total());
    }

    fn matrix(regions: &[u32], cells: &[&[u64]]) -> ODMatrix {
        ODMatrix {
            regions: regions.to_vec(),
            cells: cells.iter().map(|row| row.to_vec()).collect(),
        }
    }

    #[test]
    fn symmetric_matrix_has_unit_ratios() {
        let m = matrix(&[1, 2, 3], &[&[5, 2, 1], &[2, 0, 4], &[1, 4, 9]]);
        for s in flow_stats(&m) {
            assert_eq!(s.in_out_ratio, Some(1.0));
        }
        let total_in: u64 = (0..3).map(|i| m.in_sum(i)).sum();
        let total_out: u64 = (0..3).map(|i| m.out_sum(i)).sum();
        assert_eq!(total_in, m.total());
        assert_eq!(total_out, m.total());
    }

    #[test]
    fn undefined_ratios_are_none() {
        let m = matrix(&[1, 2], &[&[0, 0], &[3, 0]]);
        let stats = flow_stats(&m);
        // region 1 emits nothing but receives 3
        assert_eq!(stats[0].in_out_ratio, None);
        assert_eq!(stats[0].intra_share, Some(0.0));
        // region 2 receives nothing
        assert_eq!(stats[1].intra_share, None);
        assert_eq!(stats[1].in_out_ratio, Some(0.0));
    }

    #[test]
    fn diagonal_matrix_is_fully_intra() {
        let m = matrix(&[1, 2], &[&[4, 0], &[0, 7]]);
        for s in flow_stats(&m) {
            assert_eq!(s.in_out_ratio, Some(1.0));
            assert_eq!(s.intra_share, Some(1.0));
        }
    }

    #[test]
    fn summary_mean_and_std() {
        let m = matrix(&[1, 2], &[&[2, 2], &[2, 2]]);
        let summary = flow_summary(&flow_stats(&m)).unwrap();
        assert_eq!(summary.ratio_mean, 1.0);
        assert_eq!(summary.ratio_std, 0.0);
        assert_eq!(summary.intra_mean, 0.5);
        assert_eq!(summary.intra_std, 0.0);

        // hand-built 3-region fixture
        let m = matrix(&[1, 2, 3], &[&[4, 1, 1], &[2, 2, 0], &[0, 1, 1]]);
        let stats = flow_stats(&m);
        let summary = flow_summary(&stats).unwrap();
        // in = [6, 4, 2], out = [6, 4, 2] -> ratios all 1
        assert_eq!(summary.ratio_mean, 1.0);
        assert_eq!(summary.ratio_std, 0.0);
        // intra = [4/6, 2/4, 1/2]
        let expected_mean = (4.0 / 6.0 + 0.5 + 0.5) / 3.0;
        assert!((summary.intra_mean - expected_mean).abs() < 1e-12);
        let var = [(4.0 / 6.0 as Scalar), 0.5, 0.5]
            .iter()
            .map(|v| (v - expected_mean) * (v - expected_mean))
            .sum::<Scalar>()
            / 3.0;
        assert!((summary.intra_std - var.sqrt()).abs() < 1e-12);

        let zero = matrix(&[1], &[&[0]]);
        assert_eq!(flow_summary(&flow_stats(&zero)), Err(InteractionsError::AllUndefined));
    }

    #[test]
    fn edge_export_is_sorted_and_complete() {
        let zero = matrix(&[1, 2], &[&[0, 0], &[0, 0]]);
        assert!(flow_diagram_export(&zero).is_empty());

        let single = matrix(&[1, 2], &[&[0, 3], &[0, 0]]);
        assert_eq!(
            flow_diagram_export(&single),
            vec![FlowEdge { source: 1, destination: 2, count: 3 }]
        );

        let m = matrix(&[1, 2, 3], &[&[4, 1, 1], &[2, 2, 0], &[0, 1, 1]]);
        let edges = flow_diagram_export(&m);
        let checksum: u64 = edges.iter().map(|e| e.count).sum();
        assert_eq!(checksum, m.total());
        assert!(edges.windows(2).all(|w| w[0].count >= w[1].count));
    }
}
