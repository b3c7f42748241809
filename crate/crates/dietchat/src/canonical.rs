//! Fixed demonstration sessions whose transcripts and charts are kept as
//! golden files.

use std::sync::Arc;

use dietchat_core::dialogue::{replay, Pipeline, Transcript};
use dietchat_core::sample::{generate_sample_diary, sample_reference_date};
use dietchat_core::{InboundEvent, InsightKind};

pub struct CanonicalSession {
    pub name: &'static str,
    pub seed: u64,
    pub events: Vec<InboundEvent>,
}

pub fn canonical_sessions() -> Vec<CanonicalSession> {
    let t = InboundEvent::text;
    vec![
        CanonicalSession {
            name: "basic_report",
            seed: 1,
            events: vec![
                t("hi"),
                t("How many calories did I have yesterday?"),
                t("and how about protein?"),
                t("How was my fat in week 1?"),
            ],
        },
        CanonicalSession {
            name: "guided_buttons",
            seed: 2,
            events: vec![
                t("How did I do last week?"),
                t("tell me more about this"),
                InboundEvent::ButtonToggle { kind: InsightKind::Food },
                InboundEvent::ButtonToggle { kind: InsightKind::Intake },
                InboundEvent::ButtonSubmit,
            ],
        },
        CanonicalSession {
            name: "comparison",
            seed: 3,
            events: vec![t("Compare my calories in week 1 vs week 2"), t("what about carbs and protein?")],
        },
    ]
}

pub fn find(name: &str) -> Option<CanonicalSession> {
    canonical_sessions().into_iter().find(|s| s.name == name)
}

/// Output of one run: the pretty-printed transcript and every chart in
/// order of first appearance.
pub struct Rendered {
    pub transcript: Transcript,
    pub transcript_json: String,
    pub charts: Vec<(String, String)>,
}

pub fn render(session: &CanonicalSession, pipeline: Arc<Pipeline>) -> Rendered {
    let diary = Arc::new(generate_sample_diary(session.seed));
    let conv = replay(pipeline, diary, sample_reference_date(), &session.events);
    let transcript = conv.transcript();
    let mut charts: Vec<(String, String)> = Vec::new();
    for m in transcript.entries.iter().flat_map(|e| &e.outbound) {
        if let Some(id) = &m.chart_id {
            if !charts.iter().any(|(c, _)| c == id) {
                charts.push((id.clone(), conv.chart_svg(id).expect("sent charts are stored").to_owned()));
            }
        }
    }
    let mut transcript_json = serde_json::to_string_pretty(&transcript).expect("transcripts serialize");
    transcript_json.push('\n');
    Rendered { transcript, transcript_json, charts }
}

impl Rendered {
    /// Writes `{name}.transcript.json` and `{name}.chart{n}.svg` into `dir`.
    pub fn write(&self, name: &str, dir: &std::path::Path) -> std::io::Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = vec![dir.join(format!("{name}.transcript.json"))];
        std::fs::write(&written[0], &self.transcript_json)?;
        for (n, (_, svg)) in self.charts.iter().enumerate() {
            let path = dir.join(format!("{name}.chart{}.svg", n + 1));
            std::fs::write(&path, svg)?;
            written.push(path);
        }
        Ok(written)
    }
}
