//! Word sense disambiguation in the simplified Lesk style: score each sense
//! by the overlap between its gloss signature and the words surrounding the
//! comparison, preferring the most frequent sense on ties.

use std::collections::BTreeSet;

use crate::lexicon::{Lexicon, PosFilter, SynsetId};
use crate::scalar::Scalar;
use crate::text::{jaro_winkler, tokenize_identifier, StopwordList};

/// Default similarity a signature/context word pair must exceed to count as
/// overlapping.
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.5;

/// The words surrounding a comparison, lowercased, stopword-filtered and
/// deduplicated. The ordered set makes iteration (and therefore overlap
/// counting) independent of construction order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    words: BTreeSet<String>,
}

impl Context {
    pub fn build<'a, I>(words: I, stopwords: &StopwordList) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let words = words
            .into_iter()
            .map(str::to_lowercase)
            .filter(|w| !w.is_empty() && !stopwords.contains(w))
            .collect();
        Self { words }
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// The signature of a sense: its gloss words plus its member lemmas,
/// stopword-filtered and deduplicated in first-occurrence order. Glosses are
/// tokenized (example sentences included); lemmas are kept whole, so a
/// multi-word lemma like `banking_concern` stays one unit instead of leaking
/// its pieces into the overlap count.
pub fn sense_signature(
    lexicon: &Lexicon,
    sense: SynsetId,
    stopwords: &StopwordList,
) -> Vec<String> {
    let Some(synset) = lexicon.synset(sense) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |token: String| {
        if !token.is_empty() && !stopwords.contains(&token) && seen.insert(token.clone()) {
            out.push(token);
        }
    };
    for token in tokenize_identifier(&synset.gloss) {
        push(token);
    }
    for word in &synset.words {
        push(word.to_lowercase());
    }
    out
}

/// Counts signature/context word pairs whose Jaro-Winkler similarity
/// strictly exceeds `threshold`, so near-matches like singular/plural forms
/// still contribute.
pub fn compute_overlap<F: Scalar>(signature: &[String], context: &Context, threshold: F) -> usize {
    compute_overlap_with(signature, context, threshold, &mut |a, b| {
        jaro_winkler(a, b)
    })
}

/// [`compute_overlap`] with a caller-supplied word scorer, letting callers
/// memoize the underlying metric without changing the counting rule.
pub fn compute_overlap_with<F, S>(
    signature: &[String],
    context: &Context,
    threshold: F,
    word_metric: &mut S,
) -> usize
where
    F: Scalar,
    S: FnMut(&str, &str) -> F,
{
    let mut count = 0;
    for sig_word in signature {
        for ctx_word in context.words() {
            if word_metric(sig_word, ctx_word) > threshold {
                count += 1;
            }
        }
    }
    count
}

/// Picks the sense of `word` whose signature overlaps the context most,
/// considering only senses admitted by `pos_filter`. Returns `None` when the
/// word is out of vocabulary (under that filter).
pub fn disambiguate<F: Scalar>(
    lexicon: &Lexicon,
    word: &str,
    context: &Context,
    pos_filter: PosFilter,
    stopwords: &StopwordList,
    threshold: F,
) -> Option<SynsetId> {
    let senses = lexicon.lookup(word, pos_filter);
    disambiguate_senses(lexicon, &senses, context, stopwords, threshold)
}

/// [`disambiguate`] over an already-resolved sense list. `senses` must be in
/// most-frequent-first order: the first sense starts as the best and is only
/// displaced by a strictly higher overlap, so an empty or unrelated context
/// yields the most frequent sense.
pub fn disambiguate_senses<F: Scalar>(
    lexicon: &Lexicon,
    senses: &[SynsetId],
    context: &Context,
    stopwords: &StopwordList,
    threshold: F,
) -> Option<SynsetId> {
    disambiguate_with(
        senses,
        context,
        threshold,
        &mut |sense| sense_signature(lexicon, sense, stopwords),
        &mut |a, b| jaro_winkler(a, b),
    )
}

/// [`disambiguate_senses`] with caller-supplied signature and metric
/// providers, so repeated comparisons can reuse cached signatures and word
/// scores.
pub fn disambiguate_with<F, Sig, S>(
    senses: &[SynsetId],
    context: &Context,
    threshold: F,
    signature_of: &mut Sig,
    word_metric: &mut S,
) -> Option<SynsetId>
where
    F: Scalar,
    Sig: FnMut(SynsetId) -> Vec<String>,
    S: FnMut(&str, &str) -> F,
{
    let (&first, rest) = senses.split_first()?;
    let mut best = first;
    let mut best_overlap =
        compute_overlap_with(&signature_of(first), context, threshold, word_metric);
    for &sense in rest {
        let overlap = compute_overlap_with(&signature_of(sense), context, threshold, word_metric);
        if overlap > best_overlap {
            best = sense;
            best_overlap = overlap;
        }
    }
    Some(best)
}
