//! Gender classification from name lexica and biography-vocabulary analysis.
//!
//! Biographies of gender-classified users become word sets; the sets induce
//! a co-occurrence graph whose edge weight is the fraction of biographies
//! containing both endpoint words. The graph is cut to its heaviest edges
//! (top 0.1% by default) and ranked with PageRank; each surviving word
//! carries a gender tendency in [-1, 1].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use num_traits::Float;
use thiserror::Error;

use crate::corpus::{normalize_text, tokenize, Corpus, TokenKind};
use crate::stats::nearest_rank;
use crate::Scalar;

#[derive(Debug, Error)]
pub enum DemographicsError {
    #[error("word {0:?} is not used by any classified user")]
    WordUnused(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    Male,
    Female,
    Undetermined,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenderResolution {
    pub user_id: u64,
    pub gender: Gender,
}

/// Known first names per gender, normalized single tokens.
#[derive(Debug, Clone, Default)]
pub struct GenderLexicon {
    male: HashSet<String>,
    female: HashSet<String>,
}

impl GenderLexicon {
    /// Normalizes entries; multi-token entries are ignored since
    /// classification only ever looks at the first name.
    pub fn new(
        male: impl IntoIterator<Item = String>,
        female: impl IntoIterator<Item = String>,
    ) -> Self {
        let clean = |names: &mut dyn Iterator<Item = String>| {
            names
                .map(|n| normalize_text(&n))
                .filter(|n| !n.is_empty() && !n.contains(char::is_whitespace))
                .collect()
        };
        GenderLexicon {
            male: clean(&mut male.into_iter()),
            female: clean(&mut female.into_iter()),
        }
    }

    pub fn load(male_path: &Path, female_path: &Path) -> Result<Self, DemographicsError> {
        let male = load_word_list(male_path)?;
        let female = load_word_list(female_path)?;
        Ok(GenderLexicon::new(male, female))
    }

    pub fn male_count(&self) -> usize {
        self.male.len()
    }

    pub fn female_count(&self) -> usize {
        self.female.len()
    }

    /// Swapped lexica; a word's tendency under the swap is the exact
    /// negation of its original tendency.
    pub fn swapped(&self) -> GenderLexicon {
        GenderLexicon { male: self.female.clone(), female: self.male.clone() }
    }

    /// Classifies by the first whitespace-delimited token of the normalized
    /// display name. Names in both lists, in neither, or empty names are
    /// undetermined.
    pub fn classify(&self, display_name: &str) -> Gender {
        let normalized = normalize_text(display_name);
        let Some(first) = normalized.split_whitespace().next() else {
            return Gender::Undetermined;
        };
        match (self.male.contains(first), self.female.contains(first)) {
            (true, false) => Gender::Male,
            (false, true) => Gender::Female,
            _ => Gender::Undetermined,
        }
    }
}

/// Classifies every profile, ordered by user id.
pub fn classify_users(lexicon: &GenderLexicon, corpus: &Corpus) -> Vec<GenderResolution> {
    corpus
        .users
        .values()
        .map(|u| GenderResolution {
            user_id: u.user_id,
            gender: lexicon.classify(&u.display_name),
        })
        .collect()
}

/// Reads a one-entry-per-line UTF-8 list; `#` starts a comment. Entries are
/// normalized.
pub fn load_word_list(path: &Path) -> Result<Vec<String>, DemographicsError> {
    let data = std::fs::read_to_string(path)
        .map_err(|source| DemographicsError::Io { path: path.to_path_buf(), source })?;
    Ok(data
        .lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(normalize_text)
        .collect())
}

/// Distinct normalized word tokens of each classified user's biography,
/// minus stopwords. Hashtag and mention tokens are excluded; empty sets are
/// retained because they count toward the biography total.
pub fn bio_word_sets(
    corpus: &Corpus,
    genders: &[GenderResolution],
    stopwords: &HashSet<String>,
) -> BTreeMap<u64, BTreeSet<String>> {
    let mut sets = BTreeMap::new();
    for resolution in genders {
        if resolution.gender == Gender::Undetermined {
            continue;
        }
        let Some(user) = corpus.users.get(&resolution.user_id) else { continue };
        let words: BTreeSet<String> = tokenize(&user.bio_text)
            .into_iter()
            .filter(|t| t.kind == TokenKind::Word)
            .map(|t| t.surface)
            .filter(|w| !stopwords.contains(w))
            .collect();
        sets.insert(resolution.user_id, words);
    }
    sets
}

/// Undirected word co-occurrence graph. Edge keys are ordered pairs
/// `(a, b)` with `a < b`; weights are fractions of biographies in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), Scalar>,
    pub total_bios: usize,
}

impl CooccurrenceGraph {
    pub fn empty() -> Self {
        CooccurrenceGraph { nodes: BTreeSet::new(), edges: BTreeMap::new(), total_bios: 0 }
    }
}

/// Connects every unordered word pair that shares at least one biography;
/// weight is the sharing-biography count over the total biography count.
pub fn build_cooccurrence(word_sets: &BTreeMap<u64, BTreeSet<String>>) -> CooccurrenceGraph {
    assert!(!word_sets.is_empty(), "co-occurrence graph needs at least one word set");
    let total_bios = word_sets.len();
    let mut pair_counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut nodes = BTreeSet::new();

    for words in word_sets.values() {
        let words: Vec<&String> = words.iter().collect();
        for w in &words {
            nodes.insert((*w).clone());
        }
        for i in 0..words.len() {
            for j in (i + 1)..words.len() {
                // BTreeSet iteration is ascending, so (i, j) is already ordered
                let key = (words[i].clone(), words[j].clone());
                *pair_counts.entry(key).or_insert(0) += 1;
            }
        }
    }

    let edges = pair_counts
        .into_iter()
        .map(|(pair, count)| (pair, count as Scalar / total_bios as Scalar))
        .collect();
    CooccurrenceGraph { nodes, edges, total_bios }
}

/// Keeps the heaviest `keep_fraction` of edges: the cutoff is the weight of
/// the ceil(fraction × edge count)-th edge in descending order and every
/// edge at or above it survives, ties included. Nodes left without edges
/// are dropped.
pub fn filter_top_edges(graph: &CooccurrenceGraph, keep_fraction: f64) -> CooccurrenceGraph {
    assert!(
        keep_fraction > 0.0 && keep_fraction <= 1.0,
        "keep_fraction out of range: {keep_fraction}"
    );
    if graph.edges.is_empty() {
        return CooccurrenceGraph { total_bios: graph.total_bios, ..CooccurrenceGraph::empty() };
    }
    let mut weights: Vec<Scalar> = graph.edges.values().copied().collect();
    weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cutoff = weights[nearest_rank(keep_fraction, weights.len()) - 1];

    let edges: BTreeMap<(String, String), Scalar> = graph
        .edges
        .iter()
        .filter(|(_, &w)| w >= cutoff)
        .map(|(k, &w)| (k.clone(), w))
        .collect();
    let nodes = edges.keys().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    CooccurrenceGraph { nodes, edges, total_bios: graph.total_bios }
}

#[derive(Debug, Clone, Copy)]
pub struct PageRankOptions<F> {
    pub damping: F,
    pub tolerance: F,
    pub max_iter: usize,
}

impl<F: Float> Default for PageRankOptions<F> {
    fn default() -> Self {
        PageRankOptions {
            damping: F::from(0.85).unwrap(),
            tolerance: F::from(1e-10).unwrap(),
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PageRankOutcome<F> {
    pub scores: Vec<F>,
    pub converged: bool,
    pub iterations: usize,
}

/// Power iteration over an undirected weighted graph given as an edge list;
/// each edge is walked in both directions with transition probability
/// proportional to its weight. Nodes without edges spread their mass
/// uniformly. Starts uniform and stops when the L1 step change drops below
/// the tolerance; scores always sum to 1.
pub fn pagerank_weighted<F: Float>(
    node_count: usize,
    edges: &[(usize, usize, F)],
    opts: &PageRankOptions<F>,
) -> PageRankOutcome<F> {
    if node_count == 0 {
        return PageRankOutcome { scores: Vec::new(), converged: true, iterations: 0 };
    }
    let n = F::from(node_count).unwrap();
    let mut incident: Vec<Vec<(usize, F)>> = vec![Vec::new(); node_count];
    for &(u, v, w) in edges {
        incident[u].push((v, w));
        incident[v].push((u, w));
    }
    let out_sum: Vec<F> = incident
        .iter()
        .map(|adj| adj.iter().fold(F::zero(), |acc, &(_, w)| acc + w))
        .collect();

    let uniform = F::one() / n;
    let mut scores = vec![uniform; node_count];
    let mut next = vec![F::zero(); node_count];
    let teleport = (F::one() - opts.damping) / n;

    for iteration in 1..=opts.max_iter {
        let dangling = scores
            .iter()
            .zip(&out_sum)
            .filter(|(_, &ws)| ws == F::zero())
            .fold(F::zero(), |acc, (&s, _)| acc + s);
        let base = teleport + opts.damping * dangling / n;
        next.iter_mut().for_each(|s| *s = base);

        for u in 0..node_count {
            if out_sum[u] > F::zero() {
                let factor = opts.damping * scores[u] / out_sum[u];
                for &(v, w) in &incident[u] {
                    next[v] = next[v] + factor * w;
                }
            }
        }

        let diff = scores
            .iter()
            .zip(&next)
            .fold(F::zero(), |acc, (&a, &b)| acc + (a - b).abs());
        std::mem::swap(&mut scores, &mut next);
        if diff < opts.tolerance {
            return PageRankOutcome { scores, converged: true, iterations: iteration };
        }
    }
    PageRankOutcome { scores, converged: false, iterations: opts.max_iter }
}

#[derive(Debug, Clone)]
pub struct PageRank {
    pub scores: BTreeMap<String, Scalar>,
    pub converged: bool,
    pub iterations: usize,
}

/// PageRank over a co-occurrence graph, keyed by word.
pub fn pagerank(graph: &CooccurrenceGraph, opts: &PageRankOptions<Scalar>) -> PageRank {
    let index: BTreeMap<&String, usize> =
        graph.nodes.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let edges: Vec<(usize, usize, Scalar)> =
        graph.edges.iter().map(|((a, b), &w)| (index[a], index[b], w)).collect();
    let outcome = pagerank_weighted(graph.nodes.len(), &edges, opts);
    PageRank {
        scores: graph
            .nodes
            .iter()
            .zip(&outcome.scores)
            .map(|(w, &s)| (w.clone(), s))
            .collect(),
        converged: outcome.converged,
        iterations: outcome.iterations,
    }
}

/// Per-word male/female usage counts over classified users' biographies.
#[derive(Debug, Clone, Default)]
pub struct BioIndex {
    usage: HashMap<String, (usize, usize)>,
    pub classified_users: usize,
}

impl BioIndex {
    pub fn build(
        word_sets: &BTreeMap<u64, BTreeSet<String>>,
        genders: &[GenderResolution],
    ) -> BioIndex {
        let by_user: HashMap<u64, Gender> =
            genders.iter().map(|g| (g.user_id, g.gender)).collect();
        let mut usage: HashMap<String, (usize, usize)> = HashMap::new();
        for (user_id, words) in word_sets {
            let gender = by_user.get(user_id).copied().unwrap_or(Gender::Undetermined);
            for word in words {
                let entry = usage.entry(word.clone()).or_insert((0, 0));
                match gender {
                    Gender::Male => entry.0 += 1,
                    Gender::Female => entry.1 += 1,
                    Gender::Undetermined => {}
                }
            }
        }
        BioIndex { usage, classified_users: word_sets.len() }
    }

    pub fn counts(&self, word: &str) -> Option<(usize, usize)> {
        self.usage.get(word).copied()
    }

    /// `(male_users − female_users) / (male_users + female_users)`, over
    /// classified users only.
    pub fn tendency(&self, word: &str) -> Result<Scalar, DemographicsError> {
        match self.counts(word) {
            Some((m, f)) if m + f > 0 => Ok((m as Scalar - f as Scalar) / ((m + f) as Scalar)),
            _ => Err(DemographicsError::WordUnused(word.to_string())),
        }
    }
}

/// One row of the characteristic-vocabulary table.
#[derive(Debug, Clone, PartialEq)]
pub struct BioKeyword {
    pub word: String,
    pub pagerank_score: Scalar,
    pub tendency: Scalar,
    pub user_share: Scalar,
    pub male_users: usize,
    pub female_users: usize,
}

#[derive(Debug, Clone)]
pub struct BioKeywordParams {
    pub top_k: usize,
    pub keep_fraction: f64,
    pub pagerank: PageRankOptions<Scalar>,
}

impl Default for BioKeywordParams {
    fn default() -> Self {
        BioKeywordParams { top_k: 50, keep_fraction: 0.001, pagerank: PageRankOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct TopKeywords {
    pub rows: Vec<BioKeyword>,
    pub pagerank_converged: bool,
}

/// Full biography pipeline: classify, build word sets, cut the graph to its
/// top edges, rank with PageRank, and annotate each word with its tendency
/// and usage share (denominators are classified users).
pub fn top_bio_keywords(
    corpus: &Corpus,
    lexicon: &GenderLexicon,
    stopwords: &HashSet<String>,
    params: &BioKeywordParams,
) -> TopKeywords {
    let genders = classify_users(lexicon, corpus);
    let word_sets = bio_word_sets(corpus, &genders, stopwords);
    if word_sets.is_empty() {
        return TopKeywords { rows: Vec::new(), pagerank_converged: true };
    }
    let graph = build_cooccurrence(&word_sets);
    let filtered = filter_top_edges(&graph, params.keep_fraction);
    if filtered.nodes.is_empty() {
        return TopKeywords { rows: Vec::new(), pagerank_converged: true };
    }
    let ranked = pagerank(&filtered, &params.pagerank);
    let index = BioIndex::build(&word_sets, &genders);

    let mut ordered: Vec<(&String, Scalar)> = ranked.scores.iter().map(|(w, &s)| (w, s)).collect();
    ordered.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));

    let rows = ordered
        .into_iter()
        .take(params.top_k)
        .map(|(word, score)| {
            let (male_users, female_users) = index.counts(word).unwrap_or((0, 0));
            let total = male_users + female_users;
            let tendency = if total > 0 {
                (male_users as Scalar - female_users as Scalar) / total as Scalar
            } else {
                0.0
            };
            BioKeyword {
                word: word.clone(),
                pagerank_score: score,
                tendency,
                user_share: total as Scalar / index.classified_users as Scalar,
                male_users,
                female_users,
            }
        })
        .collect();
    TopKeywords { rows, pagerank_converged: ranked.converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{assemble, TweetRecord, UserProfile};
    use chrono::NaiveDate;

    fn lexicon() -> GenderLexicon {
        GenderLexicon::new(
            ["eduardo", "juan", "alexis", "José"].map(String::from),
            ["maria", "carla", "alexis", "Josefa"].map(String::from),
        )
    }

    #[test]
    fn classify_by_first_name() {
        let lex = lexicon();
        assert_eq!(lex.classify("Eduardo Pérez"), Gender::Male);
        assert_eq!(lex.classify("Carla Soto"), Gender::Female);
        assert_eq!(lex.classify("Alexis Soto"), Gender::Undetermined);
        assert_eq!(lex.classify(""), Gender::Undetermined);
        assert_eq!(lex.classify("Zutano"), Gender::Undetermined);
        // case and accents do not matter
        assert_eq!(lex.classify("EDUARDO"), Gender::Male);
        assert_eq!(lex.classify("JOSÉ luis"), Gender::Male);
        // compound first names classify by the first token
        assert_eq!(lex.classify("María José"), Gender::Female);
    }

    #[test]
    fn word_list_files_allow_comments() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write as _;
        writeln!(f, "# comment line").unwrap();
        writeln!(f, "Eduardo").unwrap();
        writeln!(f, "  María   # inline").unwrap();
        writeln!(f).unwrap();
        let words = load_word_list(f.path()).unwrap();
        assert_eq!(words, vec!["eduardo".to_string(), "maria".to_string()]);
    }

    fn user(uid: u64, name: &str, bio: &str) -> (TweetRecord, UserProfile) {
        let tweet = TweetRecord {
            tweet_id: uid,
            author_id: uid,
            timestamp: 1_351_425_600 + uid as i64,
            text: "hola".to_string(),
            hashtags: vec![],
            mentions: vec![],
            coordinates: None,
            is_retweet: false,
            retweeted_id: None,
        };
        let profile = UserProfile {
            user_id: uid,
            screen_name: format!("u{uid}"),
            display_name: name.to_string(),
            location_text: String::new(),
            bio_text: bio.to_string(),
            created_at: NaiveDate::from_ymd_opt(2010, 1, 4).unwrap(),
        };
        (tweet, profile)
    }

    #[test]
    fn bio_word_sets_filter_and_dedup() {
        let corpus = assemble(vec![
            user(1, "Eduardo", "Estudiante de la vida, estudiante."),
            user(2, "Carla", ""),
            user(3, "Zutano", "palabras de nadie"),
            user(4, "Juan", "fan de @cuenta y #tag musica"),
        ]);
        let genders = classify_users(&lexicon(), &corpus);
        let stopwords: HashSet<String> = ["de", "la", "y"].map(String::from).into();
        let sets = bio_word_sets(&corpus, &genders, &stopwords);

        assert_eq!(sets.len(), 3); // user 3 is undetermined
        let expected: BTreeSet<String> = ["estudiante", "vida"].map(String::from).into();
        assert_eq!(sets[&1], expected);
        assert!(sets[&2].is_empty());
        let expected: BTreeSet<String> = ["fan", "musica"].map(String::from).into();
        assert_eq!(sets[&4], expected);
    }

    fn sets_of(bios: &[&[&str]]) -> BTreeMap<u64, BTreeSet<String>> {
        bios.iter()
            .enumerate()
            .map(|(i, words)| (i as u64, words.iter().map(|w| w.to_string()).collect()))
            .collect()
    }

    #[test]
    fn cooccurrence_weights() {
        let g = build_cooccurrence(&sets_of(&[&["a", "b"], &["a", "b"]]));
        assert_eq!(g.total_bios, 2);
        assert_eq!(g.edges[&("a".into(), "b".into())], 1.0);

        let g = build_cooccurrence(&sets_of(&[&["a", "b"], &["a", "c"], &["a"], &[]]));
        assert_eq!(g.total_bios, 4);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[&("a".into(), "b".into())], 0.25);
        assert_eq!(g.edges[&("a".into(), "c".into())], 0.25);

        let g = build_cooccurrence(&sets_of(&[&["a"], &["b"], &["c"]]));
        assert!(g.edges.is_empty());
        assert_eq!(g.nodes.len(), 3);
    }

    fn graph_with_weights(weights: &[Scalar]) -> CooccurrenceGraph {
        // disjoint edges with prescribed weights
        let mut edges = BTreeMap::new();
        let mut nodes = BTreeSet::new();
        for (i, &w) in weights.iter().enumerate() {
            let a = format!("l{i:06}");
            let b = format!("r{i:06}");
            nodes.insert(a.clone());
            nodes.insert(b.clone());
            edges.insert((a, b), w);
        }
        CooccurrenceGraph { nodes, edges, total_bios: weights.len().max(1) }
    }

    #[test]
    fn filter_keeps_ceil_fraction_and_ties() {
        // 10000 distinct weights, keep 0.1% -> exactly 10
        let weights: Vec<Scalar> = (1..=10_000).map(|i| i as Scalar / 10_000.0).collect();
        let g = graph_with_weights(&weights);
        let kept = filter_top_edges(&g, 0.001);
        assert_eq!(kept.edges.len(), 10);
        let min_kept = kept.edges.values().cloned().fold(Scalar::INFINITY, Scalar::min);
        assert!(min_kept >= 0.9991);

        // 5 edges: ceil(0.005) = 1
        let g = graph_with_weights(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(filter_top_edges(&g, 0.001).edges.len(), 1);

        // 1000 edges with a 3-way tie at the cutoff
        let mut weights: Vec<Scalar> = (1..=997).map(|i| i as Scalar / 2000.0).collect();
        weights.extend([0.9, 0.9, 0.9]);
        let g = graph_with_weights(&weights);
        let kept = filter_top_edges(&g, 0.001);
        assert_eq!(kept.edges.len(), 3);
        assert!(kept.edges.values().all(|&w| w == 0.9));
    }

    #[test]
    fn filter_is_monotone_and_drops_isolated_nodes() {
        let g = build_cooccurrence(&sets_of(&[&["a", "b"], &["a", "b"], &["c", "d"], &["x"]]));
        let kept = filter_top_edges(&g, 0.25);
        let max_dropped = g
            .edges
            .iter()
            .filter(|(k, _)| !kept.edges.contains_key(*k))
            .map(|(_, &w)| w)
            .fold(0.0, Scalar::max);
        let min_kept = kept.edges.values().cloned().fold(Scalar::INFINITY, Scalar::min);
        assert!(min_kept >= max_dropped);
        assert!(!kept.nodes.contains("x"));
        assert!(!kept.nodes.contains("c"));

        let empty = filter_top_edges(&CooccurrenceGraph::empty(), 0.5);
        assert!(empty.nodes.is_empty() && empty.edges.is_empty());
    }

    #[test]
    fn pagerank_triangle_is_uniform() {
        let g = build_cooccurrence(&sets_of(&[&["a", "b", "c"], &["a", "b", "c"]]));
        let pr = pagerank(&g, &PageRankOptions::default());
        assert!(pr.converged);
        for s in pr.scores.values() {
            assert!((s - 1.0 / 3.0).abs() < 1e-9);
        }
        let total: Scalar = pr.scores.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pagerank_path_matches_closed_form() {
        // path a - b - c with equal weights; solving (I - dM^T)s = (1-d)/3
        // with s_a = s_c gives s_a = (1 + d/2) / (3 (1 + d))
        let g = build_cooccurrence(&sets_of(&[&["a", "b"], &["b", "c"]]));
        let opts = PageRankOptions { damping: 0.85, tolerance: 1e-14, max_iter: 500 };
        let pr = pagerank(&g, &opts);
        let d: Scalar = 0.85;
        let side = (1.0 + d / 2.0) / (3.0 * (1.0 + d));
        let mid = (1.0 + 2.0 * d) / (3.0 * (1.0 + d));
        assert!((pr.scores["a"] - side).abs() < 1e-8);
        assert!((pr.scores["c"] - side).abs() < 1e-8);
        assert!((pr.scores["b"] - mid).abs() < 1e-8);
    }

    #[test]
    fn pagerank_single_node() {
        let g = build_cooccurrence(&sets_of(&[&["solo"]]));
        let pr = pagerank(&g, &PageRankOptions::default());
        assert_eq!(pr.scores.len(), 1);
        assert!((pr.scores["solo"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pagerank_flags_non_convergence() {
        let g = build_cooccurrence(&sets_of(&[&["a", "b"], &["b", "c"]]));
        let opts = PageRankOptions { damping: 0.85, tolerance: 1e-15, max_iter: 1 };
        let pr = pagerank(&g, &opts);
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 1);
        // the last iterate is still a distribution
        let total: Scalar = pr.scores.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn cooccurrence_weights_stay_in_unit_interval(
            bios in proptest::collection::vec(
                proptest::collection::btree_set("[a-f]", 0..5usize),
                1..20,
            )
        ) {
            let sets: BTreeMap<u64, BTreeSet<String>> =
                bios.into_iter().enumerate().map(|(i, b)| (i as u64, b)).collect();
            let g = build_cooccurrence(&sets);
            let n = g.nodes.len();
            proptest::prop_assert!(g.edges.len() <= n * n.saturating_sub(1) / 2);
            for &w in g.edges.values() {
                proptest::prop_assert!(w > 0.0 && w <= 1.0);
            }
        }
    }

    #[test]
    fn tendency_formula() {
        let mut genders = Vec::new();
        let mut sets = BTreeMap::new();
        for uid in 0..10u64 {
            genders.push(GenderResolution { user_id: uid, gender: Gender::Male });
            sets.insert(uid, ["futbol"].map(String::from).into());
        }
        for uid in 10..15u64 {
            genders.push(GenderResolution { user_id: uid, gender: Gender::Female });
            sets.insert(uid, ["vida"].map(String::from).into());
        }
        for uid in 15..20u64 {
            genders.push(GenderResolution { user_id: uid, gender: Gender::Male });
            sets.insert(uid, ["vida"].map(String::from).into());
        }
        let index = BioIndex::build(&sets, &genders);
        assert_eq!(index.tendency("futbol").unwrap(), 1.0);
        assert_eq!(index.tendency("vida").unwrap(), 0.0);
        assert!(matches!(index.tendency("inexistente"), Err(DemographicsError::WordUnused(_))));
    }

    #[test]
    fn planted_pair_tops_keywords() {
        let mut records = Vec::new();
        let mut uid = 0u64;
        // 60 classified users share the planted pair
        for _ in 0..30 {
            records.push(user(uid, "Eduardo", "nucleo planta"));
            uid += 1;
            records.push(user(uid, "Carla", "nucleo planta"));
            uid += 1;
        }
        // background: unique filler words, pairwise distinct
        for i in 0..40 {
            records.push(user(uid, "Juan", &format!("fondo{i} ruido{i}")));
            uid += 1;
        }
        let corpus = assemble(records);
        let out =
            top_bio_keywords(&corpus, &lexicon(), &HashSet::new(), &BioKeywordParams::default());
        assert!(out.pagerank_converged);
        let top2: BTreeSet<&str> = out.rows.iter().take(2).map(|r| r.word.as_str()).collect();
        assert_eq!(top2, BTreeSet::from(["nucleo", "planta"]));
        assert!((out.rows[0].user_share - 0.6).abs() < 1e-12);
        assert_eq!(out.rows[0].tendency, 0.0);
    }

    #[test]
    fn empty_bios_yield_no_keywords() {
        let corpus = assemble(vec![user(1, "Eduardo", ""), user(2, "Carla", "")]);
        let out =
            top_bio_keywords(&corpus, &lexicon(), &HashSet::new(), &BioKeywordParams::default());
        assert!(out.rows.is_empty());
    }
}
