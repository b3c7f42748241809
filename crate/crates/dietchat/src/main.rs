use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use dietchat::canonical::{canonical_sessions, find, render};
use dietchat::config::Config;
use dietchat::harness::{run_nlu_corpus, run_quiz, Corpus};
use dietchat::service::{ChatService, CreateSession};
use dietchat::transport::{ChatTransport, InProcess, OverHttp};
use dietchat::{load_diary, server};
use dietchat_core::{InboundEvent, InsightKind, NaiveDate, OutboundMessage};

#[derive(Parser)]
#[command(name = "dietchat", about = "Diet coaching chatbot over a food diary")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Chat on the terminal. `/toggle <intake|trend_consistency|food>` and
    /// `/submit` press the insight buttons.
    Repl {
        #[arg(long, conflicts_with = "diary")]
        seed: Option<u64>,
        #[arg(long)]
        diary: Option<PathBuf>,
        #[arg(long, value_parser = parse_date)]
        reference_date: Option<NaiveDate>,
    },
    /// Write the canonical demo sessions (transcript and charts).
    Transcript {
        /// Session name, or `all`.
        #[arg(long, default_value = "all")]
        session: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the scripted quiz and print the score.
    Quiz {
        #[arg(long)]
        seed: u64,
        /// Base URL of a running server; in-process when absent.
        #[arg(long)]
        endpoint: Option<String>,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score the NLU against a labelled corpus.
    NluCorpus {
        /// Corpus JSON; the bundled corpus when absent.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    s.parse().map_err(|_| format!("`{s}` is not a YYYY-MM-DD date"))
}

fn print_messages(messages: &[OutboundMessage]) {
    for m in messages {
        if let Some(text) = &m.text {
            println!("bot> {text}");
        }
        if let Some(id) = &m.chart_id {
            println!("bot> [chart {id}]");
        }
        if let Some(b) = &m.buttons {
            println!("bot> {}", b.prompt);
            for o in &b.options {
                println!(
                    "     [{}] {} ({})",
                    if o.checked { "x" } else { " " },
                    o.label,
                    serde_json::to_value(o.kind).unwrap_or_default()
                );
            }
        }
    }
}

fn parse_line(line: &str) -> anyhow::Result<InboundEvent> {
    let line = line.trim();
    if line == "/submit" {
        return Ok(InboundEvent::ButtonSubmit);
    }
    if let Some(kind) = line.strip_prefix("/toggle ") {
        let kind: InsightKind = serde_json::from_value(serde_json::Value::String(kind.trim().into()))
            .with_context(|| format!("unknown insight `{}`", kind.trim()))?;
        return Ok(InboundEvent::ButtonToggle { kind });
    }
    Ok(InboundEvent::text(line))
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let pipeline = Arc::new(config.pipeline()?);
    match cli.command {
        Command::Serve { addr } => {
            let service = Arc::new(ChatService::new(pipeline, config.transcript_dir.clone()));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(addr, service, |a| eprintln!("listening on http://{a}")))?;
        }
        Command::Repl { seed, diary, reference_date } => {
            let req = match (seed, diary) {
                (_, Some(path)) => {
                    let doc: serde_json::Value = serde_json::from_str(&load_diary(&path)?.to_json())?;
                    CreateSession { diary: Some(doc), reference_date, ..CreateSession::default() }
                }
                (seed, None) => CreateSession { reference_date, ..CreateSession::seeded(seed.unwrap_or(0)) },
            };
            let mut chat = InProcess::new(Arc::new(ChatService::new(pipeline, config.transcript_dir.clone())));
            print_messages(&chat.open(&req)?);
            let stdin = std::io::stdin();
            loop {
                print!("you> ");
                std::io::stdout().flush()?;
                let mut line = String::new();
                if stdin.lock().read_line(&mut line)? == 0 {
                    break;
                }
                match parse_line(&line) {
                    Ok(event) => print_messages(&chat.send(&event)?),
                    Err(e) => eprintln!("{e:#}"),
                }
            }
        }
        Command::Transcript { session, out } => {
            let sessions = if session == "all" {
                canonical_sessions()
            } else {
                vec![find(&session).with_context(|| format!("unknown session `{session}`"))?]
            };
            for s in sessions {
                for path in render(&s, pipeline.clone()).write(s.name, &out)? {
                    println!("{}", path.display());
                }
            }
        }
        Command::Quiz { seed, endpoint, out } => {
            let report = match endpoint {
                Some(url) => run_quiz(&mut OverHttp::new(url), seed, &config.thresholds)?,
                None => {
                    let service = Arc::new(ChatService::new(pipeline, None));
                    run_quiz(&mut InProcess::new(service), seed, &config.thresholds)?
                }
            };
            for t in &report.tasks {
                println!("{:?}: {}/{}", t.task, t.points, t.max);
            }
            for q in report.questions.iter().filter(|q| !q.correct) {
                println!("  wrong: {}", q.diagnostic.as_deref().unwrap_or(&q.utterance));
            }
            println!("score {}/{} (seed {seed}, quiz day {})", report.total, report.max, report.quiz_day);
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::NluCorpus { file } => {
            let corpus = match file {
                Some(p) => Corpus::from_json(&std::fs::read_to_string(&p).with_context(|| p.display().to_string())?)?,
                None => Corpus::bundled(),
            };
            let r = run_nlu_corpus(&pipeline.nlu, &corpus);
            for f in &r.failures {
                println!("FAIL {f}");
            }
            println!(
                "intent {}/{}, metrics {}/{}, time {}/{}, insight kinds {}/{}",
                r.intent_correct,
                r.total,
                r.metrics_correct,
                r.total,
                r.time_correct,
                r.total,
                r.insight_kinds_correct,
                r.insight_kinds_checked
            );
            if !r.is_perfect() {
                bail!("{} utterances misread", r.failures.len());
            }
        }
    }
    Ok(())
}
