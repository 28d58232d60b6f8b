//! The layered similarity pipeline: words, then sentences, then parameter
//! sets, then operations, then whole services. Each layer aggregates the one
//! below it with the set matching from [`crate::hausdorff`].

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::hausdorff::{set_similarity, SimMatrix};
use crate::lexicon::{Lexicon, PosFilter, SynsetId};
use crate::scalar::Scalar;
use crate::text::{jaro_winkler, tokenize_identifier, StopwordList};
use crate::wsd::{self, Context};
use crate::wsdl::{FlattenedParamSet, OperationDef, Sentence, ServiceDescription};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("weights must be finite, non-negative, and sum to a positive value")]
pub struct WeightError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("sentence similarity requires non-empty sentences")]
pub struct EmptySentenceError;

/// Weights for the three facets of an operation comparison: input
/// parameters, output parameters, and operation names.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights<F> {
    p1: F,
    p2: F,
    p3: F,
}

impl<F: Scalar> Default for Weights<F> {
    /// Names weigh twice as much as each parameter set.
    fn default() -> Self {
        Self {
            p1: F::one(),
            p2: F::one(),
            p3: F::from_ratio(2, 1),
        }
    }
}

impl<F: Scalar> Weights<F> {
    pub fn new(p1: F, p2: F, p3: F) -> Result<Self, WeightError> {
        let valid = |w: F| w.is_finite() && w >= F::zero();
        if !(valid(p1) && valid(p2) && valid(p3)) || p1 + p2 + p3 <= F::zero() {
            return Err(WeightError);
        }
        Ok(Self { p1, p2, p3 })
    }

    /// The weighted mean `(p1*input + p2*output + p3*name) / (p1+p2+p3)`,
    /// clamped into `[0, 1]`.
    pub fn combine(&self, input_sim: F, output_sim: F, name_sim: F) -> F {
        let numerator = self.p1 * input_sim + self.p2 * output_sim + self.p3 * name_sim;
        (numerator / (self.p1 + self.p2 + self.p3))
            .min(F::one())
            .max(F::zero())
    }
}

/// Per-engine memoization. Words and contexts are interned so hot lookups
/// key on small ids; every cached value is a pure function of its key, so
/// caching never changes a score.
struct Caches<F> {
    word_ids: HashMap<String, u32>,
    senses: HashMap<String, Rc<Vec<SynsetId>>>,
    signatures: HashMap<SynsetId, Rc<Vec<String>>>,
    context_ids: HashMap<Context, u32>,
    /// (context id, word id) -> chosen sense.
    chosen: HashMap<(u32, u32), Option<SynsetId>>,
    wu_palmer: HashMap<(SynsetId, SynsetId), F>,
    /// (word id, word id), smaller id first -> Jaro-Winkler score.
    metric: HashMap<(u32, u32), F>,
}

impl<F> Default for Caches<F> {
    fn default() -> Self {
        Self {
            word_ids: HashMap::new(),
            senses: HashMap::new(),
            signatures: HashMap::new(),
            context_ids: HashMap::new(),
            chosen: HashMap::new(),
            wu_palmer: HashMap::new(),
            metric: HashMap::new(),
        }
    }
}

/// A similarity scorer bound to a lexicon and a stopword list.
///
/// The engine is cheap to construct; its caches fill as comparisons run.
/// It is deliberately not `Sync`: give each worker thread its own engine
/// over the same shared [`Lexicon`].
pub struct Engine<'a, F: Scalar> {
    lexicon: &'a Lexicon,
    stopwords: &'a StopwordList,
    weights: Weights<F>,
    wsd_threshold: F,
    caches: RefCell<Caches<F>>,
}

impl<'a, F: Scalar> Engine<'a, F> {
    pub fn new(lexicon: &'a Lexicon, stopwords: &'a StopwordList) -> Self {
        Self {
            lexicon,
            stopwords,
            weights: Weights::default(),
            wsd_threshold: F::from_config(wsd::DEFAULT_OVERLAP_THRESHOLD),
            caches: RefCell::new(Caches::default()),
        }
    }

    pub fn with_weights(mut self, weights: Weights<F>) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_wsd_threshold(mut self, threshold: F) -> Self {
        self.wsd_threshold = threshold;
        self
    }

    pub fn weights(&self) -> Weights<F> {
        self.weights
    }

    /// The disambiguation context for comparing two operations: every name
    /// and parameter word from both sides, minus stopwords.
    pub fn comparison_context(&self, a: &OperationDef, b: &OperationDef) -> Context {
        let mut words: Vec<String> = Vec::new();
        for op in [a, b] {
            words.extend(tokenize_identifier(&op.name));
            for tree in [&op.input, &op.output] {
                for sentence in FlattenedParamSet::from_tree(tree).sentences {
                    words.extend(sentence);
                }
            }
        }
        Context::build(words.iter().map(String::as_str), self.stopwords)
    }

    /// Similarity of two single words under a disambiguation context.
    ///
    /// Words that both have noun or verb senses are compared by Wu-Palmer
    /// over their chosen senses; everything else (unknown words, or a
    /// noun/verb mismatch after disambiguation) falls back to Jaro-Winkler
    /// on the raw strings.
    pub fn word_sim(&self, a: &str, b: &str, context: &Context) -> F {
        if a == b {
            return F::one();
        }
        let senses_a = self.senses(a);
        let senses_b = self.senses(b);
        if senses_a.is_empty() || senses_b.is_empty() {
            return self.metric(a, b);
        }
        let chosen_a = self.choose_sense(a, &senses_a, context);
        let chosen_b = self.choose_sense(b, &senses_b, context);
        match (chosen_a, chosen_b) {
            (Some(sa), Some(sb)) if sa.pos == sb.pos => self.wu_palmer(sa, sb),
            _ => self.metric(a, b),
        }
    }

    /// Sentence similarity: best-match averaging over the two *sets* of
    /// words, so duplicates and word order never matter. Fails on empty
    /// sentences; flattening never produces them, and callers comparing
    /// possibly-absent things apply their own conventions first.
    pub fn sentence_sim(
        &self,
        a: &Sentence,
        b: &Sentence,
        context: &Context,
    ) -> Result<F, EmptySentenceError> {
        if a.is_empty() || b.is_empty() {
            return Err(EmptySentenceError);
        }
        let dedup = |s: &Sentence| -> Vec<String> {
            let set: BTreeSet<&String> = s.iter().collect();
            set.into_iter().cloned().collect()
        };
        let (a, b) = (dedup(a), dedup(b));
        Ok(set_similarity(&a, &b, &mut |x: &String, y: &String| {
            self.word_sim(x, y, context)
        })
        .expect("deduplicated sentences stay non-empty"))
    }

    /// Parameter set similarity: best-match averaging over sentences. The
    /// same empty-side conventions as for sentences apply, so two
    /// parameterless messages are identical.
    pub fn set_sim(&self, a: &FlattenedParamSet, b: &FlattenedParamSet, context: &Context) -> F {
        if a.is_empty() && b.is_empty() {
            return F::one();
        }
        if a.is_empty() || b.is_empty() {
            return F::zero();
        }
        set_similarity(
            &a.sentences,
            &b.sentences,
            &mut |x: &Sentence, y: &Sentence| {
                self.sentence_sim(x, y, context)
                    .expect("flattened sentences are never empty")
            },
        )
        .expect("sets checked non-empty")
    }

    /// Operation similarity: the weighted mean of input set, output set and
    /// name similarity, all under one shared context.
    pub fn op_sim(&self, a: &OperationDef, b: &OperationDef) -> F {
        let context = self.comparison_context(a, b);
        let input_sim = self.set_sim(
            &FlattenedParamSet::from_tree(&a.input),
            &FlattenedParamSet::from_tree(&b.input),
            &context,
        );
        let output_sim = self.set_sim(
            &FlattenedParamSet::from_tree(&a.output),
            &FlattenedParamSet::from_tree(&b.output),
            &context,
        );
        let name_a = tokenize_identifier(&a.name);
        let name_b = tokenize_identifier(&b.name);
        let name_sim = match (name_a.is_empty(), name_b.is_empty()) {
            (true, true) => F::one(),
            (true, false) | (false, true) => F::zero(),
            (false, false) => self
                .sentence_sim(&name_a, &name_b, &context)
                .expect("names checked non-empty"),
        };
        self.weights.combine(input_sim, output_sim, name_sim)
    }

    /// Every pairwise operation score between two services, in declaration
    /// order.
    pub fn op_matrix(&self, a: &ServiceDescription, b: &ServiceDescription) -> SimMatrix<F> {
        SimMatrix::build(
            &a.operations,
            &b.operations,
            &mut |oa: &OperationDef, ob: &OperationDef| self.op_sim(oa, ob),
        )
    }

    /// Service similarity: best-match averaging over the operation scores,
    /// clamped into `[0, 1]`. Two operationless services count as identical,
    /// one as fully dissimilar.
    pub fn service_sim(&self, a: &ServiceDescription, b: &ServiceDescription) -> F {
        if a.operations.is_empty() && b.operations.is_empty() {
            return F::one();
        }
        if a.operations.is_empty() || b.operations.is_empty() {
            return F::zero();
        }
        let score = self
            .op_matrix(a, b)
            .hausdorff_similarity()
            .expect("operations checked non-empty");
        score.min(F::one()).max(F::zero())
    }

    fn senses(&self, word: &str) -> Rc<Vec<SynsetId>> {
        if let Some(cached) = self.caches.borrow().senses.get(word) {
            return Rc::clone(cached);
        }
        let senses = Rc::new(self.lexicon.lookup(word, PosFilter::NounVerb));
        self.caches
            .borrow_mut()
            .senses
            .insert(word.to_string(), Rc::clone(&senses));
        senses
    }

    fn signature(&self, sense: SynsetId) -> Rc<Vec<String>> {
        if let Some(cached) = self.caches.borrow().signatures.get(&sense) {
            return Rc::clone(cached);
        }
        let signature = Rc::new(wsd::sense_signature(self.lexicon, sense, self.stopwords));
        self.caches
            .borrow_mut()
            .signatures
            .insert(sense, Rc::clone(&signature));
        signature
    }

    fn context_id(&self, context: &Context) -> u32 {
        let mut caches = self.caches.borrow_mut();
        if let Some(&id) = caches.context_ids.get(context) {
            return id;
        }
        let id = caches.context_ids.len() as u32;
        caches.context_ids.insert(context.clone(), id);
        id
    }

    fn word_id(&self, word: &str) -> u32 {
        if let Some(&id) = self.caches.borrow().word_ids.get(word) {
            return id;
        }
        let mut caches = self.caches.borrow_mut();
        let id = caches.word_ids.len() as u32;
        caches.word_ids.insert(word.to_string(), id);
        id
    }

    fn choose_sense(&self, word: &str, senses: &[SynsetId], context: &Context) -> Option<SynsetId> {
        let key = (self.context_id(context), self.word_id(word));
        if let Some(&cached) = self.caches.borrow().chosen.get(&key) {
            return cached;
        }
        let chosen = wsd::disambiguate_with(
            senses,
            context,
            self.wsd_threshold,
            &mut |sense| self.signature(sense).as_ref().clone(),
            &mut |a, b| self.metric(a, b),
        );
        self.caches.borrow_mut().chosen.insert(key, chosen);
        chosen
    }

    fn wu_palmer(&self, a: SynsetId, b: SynsetId) -> F {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&cached) = self.caches.borrow().wu_palmer.get(&key) {
            return cached;
        }
        let score = self.lexicon.wu_palmer(key.0, key.1);
        self.caches.borrow_mut().wu_palmer.insert(key, score);
        score
    }

    /// Jaro-Winkler, memoized under an order-independent key (the metric is
    /// symmetric).
    fn metric(&self, a: &str, b: &str) -> F {
        let (ia, ib) = (self.word_id(a), self.word_id(b));
        let key = (ia.min(ib), ia.max(ib));
        if let Some(&cached) = self.caches.borrow().metric.get(&key) {
            return cached;
        }
        let score = jaro_winkler(a, b);
        self.caches.borrow_mut().metric.insert(key, score);
        score
    }
}
