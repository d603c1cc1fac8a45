use std::collections::{BTreeMap, BTreeSet};

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use super::{
    candidate_id, Band, Blocking, Features, LinkageConfig, LinkageError, MatchCandidate, Thresholds, Weights, WorkStub,
};

/// Letters that mark ʿayn/ʾalaph or elision in romanized titles; removed
/// without splitting the word.
const ELIDED: &[char] = &['\'', '\u{2019}', '\u{2018}', '\u{02BE}', '\u{02BF}'];

/// Tokenizes a title or incipit for matching: decomposes, strips combining
/// marks (diacritics, Syriac vowel points), recomposes, lowercases, and
/// splits on whitespace and punctuation.
pub fn normalize_title(text: &str, _lang: &str) -> Vec<String> {
    let stripped: String = text.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect();
    let mut cleaned = String::with_capacity(stripped.len());
    for c in stripped.chars() {
        if ELIDED.contains(&c) {
            continue;
        }
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase());
        } else {
            cleaned.push(' ');
        }
    }
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// An unscored pair of stub ids, `left < right`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidatePair {
    pub candidate_id: String,
    pub left: String,
    pub right: String,
}

struct Prepared<'a> {
    stub: &'a WorkStub,
    titles: Vec<BTreeSet<String>>,
    incipit: Option<Vec<String>>,
}

fn prepare(stub: &WorkStub) -> Prepared<'_> {
    Prepared {
        stub,
        titles: stub
            .titles
            .iter()
            .map(|(lang, text)| normalize_title(text, lang).into_iter().collect::<BTreeSet<_>>())
            .filter(|t| !t.is_empty())
            .collect(),
        incipit: stub.incipit.as_ref().map(|(lang, text)| normalize_title(text, lang)),
    }
}

fn block_keys(p: &Prepared, blocking: &Blocking) -> BTreeSet<String> {
    let mut keys = BTreeSet::new();
    if let Some(a) = &p.stub.author_uri {
        keys.insert(format!("a:{a}"));
    }
    for t in &p.titles {
        for tok in t.iter().filter(|t| t.chars().count() >= blocking.min_title_token_len) {
            keys.insert(format!("t:{tok}"));
        }
    }
    if let Some(inc) = &p.incipit {
        if inc.len() >= blocking.incipit_prefix_tokens {
            keys.insert(format!("i:{}", inc[..blocking.incipit_prefix_tokens].join(" ")));
        }
    }
    keys
}

/// Pairs of stubs sharing at least one block key, sorted by candidate id.
///
/// Stubs with equal ids are never paired with each other.
pub fn candidate_pairs(stubs: &[WorkStub], blocking: &Blocking) -> Vec<CandidatePair> {
    let mut blocks: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in stubs.iter().enumerate() {
        for k in block_keys(&prepare(s), blocking) {
            blocks.entry(k).or_default().push(i);
        }
    }
    let mut pairs = BTreeSet::new();
    for members in blocks.values() {
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                pairs.insert((i.min(j), i.max(j)));
            }
        }
    }
    let mut out: Vec<CandidatePair> = pairs
        .into_iter()
        .filter_map(|(i, j)| {
            let (a, b) = (&stubs[i].stub_id, &stubs[j].stub_id);
            if a == b {
                return None;
            }
            let (left, right) = if a < b { (a, b) } else { (b, a) };
            Some(CandidatePair { candidate_id: candidate_id(a, b), left: left.clone(), right: right.clone() })
        })
        .collect();
    out.sort();
    out.dedup_by(|a, b| a.candidate_id == b.candidate_id);
    out
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn features(a: &Prepared, b: &Prepared) -> Features {
    let title_sim = (!a.titles.is_empty() && !b.titles.is_empty())
        .then(|| a.titles.iter().flat_map(|x| b.titles.iter().map(move |y| jaccard(x, y))).fold(0.0, f64::max));
    let author_match = match (&a.stub.author_uri, &b.stub.author_uri) {
        (Some(x), Some(y)) => Some(if x == y { 1.0 } else { 0.0 }),
        _ => None,
    };
    let incipit_sim = match (&a.incipit, &b.incipit) {
        (Some(x), Some(y)) => Some(strsim::normalized_levenshtein(&x.join(" "), &y.join(" "))),
        _ => None,
    };
    Features { title_sim, author_match, incipit_sim }
}

/// Weighted mean over present features; `None` when none is present.
pub fn combine_features(f: &Features, w: &Weights) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (v, wi) in [(f.title_sim, w.title), (f.author_match, w.author), (f.incipit_sim, w.incipit)] {
        if let Some(v) = v {
            num += wi * v;
            den += wi;
        }
    }
    (den > 0.0).then(|| (num / den).clamp(0.0, 1.0))
}

/// Weighted mean of the features present on both sides.
pub fn score_pair(a: &WorkStub, b: &WorkStub, weights: &Weights) -> Result<(f64, Features), LinkageError> {
    let f = features(&prepare(a), &prepare(b));
    let score =
        combine_features(&f, weights).ok_or_else(|| LinkageError::NoFeatures(a.stub_id.clone(), b.stub_id.clone()))?;
    Ok((score, f))
}

pub fn classify_candidate(score: f64, thresholds: &Thresholds) -> Result<Band, LinkageError> {
    if thresholds.auto <= thresholds.review {
        return Err(LinkageError::Config(format!(
            "auto threshold {} must exceed review threshold {}",
            thresholds.auto, thresholds.review
        )));
    }
    Ok(if score >= thresholds.auto {
        Band::Auto
    } else if score >= thresholds.review {
        Band::Review
    } else {
        Band::Reject
    })
}

/// Scores and bands the given pairs.
pub fn score_candidates(
    stubs: &[WorkStub],
    pairs: &[CandidatePair],
    config: &LinkageConfig,
) -> Result<Vec<MatchCandidate>, LinkageError> {
    let by_id: BTreeMap<&str, Prepared> = stubs.iter().map(|s| (s.stub_id.as_str(), prepare(s))).collect();
    let mut unknown: Vec<String> = Vec::new();
    let mut out = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (Some(a), Some(b)) = (by_id.get(p.left.as_str()), by_id.get(p.right.as_str())) else {
            unknown.push(p.candidate_id.clone());
            continue;
        };
        let f = features(a, b);
        let score = combine_features(&f, &config.weights)
            .ok_or_else(|| LinkageError::NoFeatures(p.left.clone(), p.right.clone()))?;
        out.push(MatchCandidate {
            candidate_id: p.candidate_id.clone(),
            left: p.left.clone(),
            right: p.right.clone(),
            score,
            features: f,
            band: classify_candidate(score, &config.thresholds)?,
        });
    }
    if !unknown.is_empty() {
        return Err(LinkageError::UnknownCandidates(unknown));
    }
    Ok(out)
}

/// Blocking followed by scoring.
pub fn generate_candidates(stubs: &[WorkStub], config: &LinkageConfig) -> Result<Vec<MatchCandidate>, LinkageError> {
    config.validate()?;
    score_candidates(stubs, &candidate_pairs(stubs, &config.blocking), config)
}
