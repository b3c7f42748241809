//! Evaluation: the scripted quiz and the labelled NLU corpus.

use dietchat_core::insight::Assessment;
use dietchat_core::nlu::{InsightKind, IntentKind, Nlu, ResolvedTime};
use dietchat_core::quiz::{compute_answer_key, score_question, score_report, ScoreReport};
use dietchat_core::sample::generate_sample_diary;
use dietchat_core::{InboundEvent, Metric, NaiveDate, Thresholds, Utterance};
use serde::{Deserialize, Serialize};

use crate::service::CreateSession;
use crate::transport::ChatTransport;
use crate::{Error, Result};

/// Asks the quiz for `seed` through `transport` and scores the replies'
/// machine payloads against the independently computed answer key.
/// `thresholds` must be the ones the chat side runs with.
pub fn run_quiz(transport: &mut dyn ChatTransport, seed: u64, thresholds: &Thresholds) -> Result<ScoreReport> {
    let diary = generate_sample_diary(seed);
    let key = compute_answer_key(&diary, thresholds)?;
    transport.open(&CreateSession::seeded(seed))?;
    let mut results = Vec::with_capacity(key.questions.len());
    for q in &key.questions {
        let reply = transport.send(&InboundEvent::text(q.utterance.clone()))?;
        let payloads: Vec<Assessment> = reply.into_iter().flat_map(|m| m.machine_payload).collect();
        results.push(score_question(q, &payloads));
    }
    Ok(score_report(&key, results))
}

/// Labelled utterances. Each case may override the file-level dates.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub reference_date: NaiveDate,
    pub diary_start: NaiveDate,
    pub cases: Vec<CorpusCase>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusCase {
    pub text: String,
    pub intent: IntentKind,
    #[serde(default)]
    pub metrics: Vec<Metric>,
    /// `None` means no temporal expression.
    #[serde(default)]
    pub time: Option<ResolvedTime>,
    /// Checked only when present.
    #[serde(default)]
    pub insight_kinds: Option<Vec<InsightKind>>,
    #[serde(default)]
    pub reference_date: Option<NaiveDate>,
}

const BUNDLED_CORPUS: &str = include_str!("../data/nlu_corpus.json");

impl Corpus {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("corpus: {e}")))
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CORPUS).expect("bundled corpus parses")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusReport {
    pub total: usize,
    pub intent_correct: usize,
    pub metrics_correct: usize,
    pub time_correct: usize,
    pub insight_kinds_checked: usize,
    pub insight_kinds_correct: usize,
    pub failures: Vec<String>,
}

impl CorpusReport {
    pub fn is_perfect(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sorted<T: Ord + Copy>(xs: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = xs.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

pub fn run_nlu_corpus(nlu: &Nlu, corpus: &Corpus) -> CorpusReport {
    let mut report = CorpusReport { total: corpus.cases.len(), ..CorpusReport::default() };
    for case in &corpus.cases {
        let reference = case.reference_date.unwrap_or(corpus.reference_date);
        let u = Utterance::new(case.text.clone(), reference).with_diary_start(corpus.diary_start);
        let q = nlu.parse_query(&u);
        let mut wrong = Vec::new();
        if q.intent.kind == case.intent {
            report.intent_correct += 1;
        } else {
            wrong.push(format!("intent {:?} (want {:?})", q.intent.kind, case.intent));
        }
        let got_metrics: Vec<Metric> = q.metrics.iter().collect();
        if got_metrics == sorted(case.metrics.iter().copied()) {
            report.metrics_correct += 1;
        } else {
            wrong.push(format!("metrics {got_metrics:?} (want {:?})", case.metrics));
        }
        let got_time = q.time.as_ref().map(|t| &t.resolved);
        if got_time == case.time.as_ref() {
            report.time_correct += 1;
        } else {
            wrong.push(format!("time {got_time:?} (want {:?})", case.time));
        }
        if let Some(kinds) = &case.insight_kinds {
            report.insight_kinds_checked += 1;
            let got: Vec<InsightKind> = q.insight_kinds.iter().collect();
            if got == sorted(kinds.iter().copied()) {
                report.insight_kinds_correct += 1;
            } else {
                wrong.push(format!("insight kinds {got:?} (want {kinds:?})"));
            }
        }
        if !wrong.is_empty() {
            report.failures.push(format!("{:?}: {}", case.text, wrong.join("; ")));
        }
    }
    report
}
