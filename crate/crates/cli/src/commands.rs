use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use ericson_core::agent::{train_model, Agent, AgentConfig};
use ericson_core::analytics::analyze_dir;
use ericson_core::components::{ingest_feed, ComponentId};
use ericson_core::dialogue::SessionId;
use ericson_core::entity::{EntityLinker, Gazetteer, ProfileSet};
use ericson_core::intent::{
    cross_validate, load_labeled_texts, synthetic, ClassifierKind, ClassifierModel, LabeledDataset,
    TrainerSpec,
};
use ericson_core::logger::{load_sessions, TimeRange};
use ericson_core::Error as CoreError;
use ericson_service::{ServiceConfig, ServiceError};
use thiserror::Error;

use crate::args::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Data(#[from] CoreError),

    #[error(transparent)]
    Service(#[from] ServiceError),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("{0}")]
    Divergence(String),
}

type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Chat(a) => chat(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Analyze(a) => analyze(a),
        Command::Replay(a) => replay(a),
        Command::Serve(a) => serve(a),
        Command::Ingest(a) => ingest(a),
    }
}

fn now_ms() -> i64 {
    Utc::now().timestamp_millis()
}

/// Accepts an agent file or a service file with an `[agent]` table.
fn read_agent_config(path: &Path) -> Result<AgentConfig> {
    let agent_err = match AgentConfig::from_file(path) {
        Ok(config) => return Ok(config),
        Err(e) => e,
    };
    let text = std::fs::read_to_string(path)?;
    ServiceConfig::from_toml_str(&text)
        .map(|c| c.agent)
        .map_err(|_| agent_err.into())
}

fn agent_config(args: &AgentArgs) -> Result<AgentConfig> {
    let mut config = match &args.config {
        Some(p) => read_agent_config(p)?,
        None => AgentConfig::default(),
    };
    config.apply_env(|k| std::env::var(k).ok())?;
    if let Some(d) = &args.data_dir {
        config.data_dir = d.clone();
    }
    if let Some(m) = &args.model {
        config.model_path = Some(m.clone());
    }
    Ok(config)
}

const EXIT_WORDS: [&str; 3] = ["exit", "quit", "/exit"];

fn chat(args: ChatArgs) -> Result<()> {
    let mut config = agent_config(&args.agent)?;
    if args.no_log {
        config.log_dir = None;
    } else if let Some(dir) = args.log_dir {
        config.log_dir = Some(dir);
    } else if config.log_dir.is_none() {
        config.log_dir = Some(PathBuf::from("logs"));
    }
    let id = args
        .session_id
        .map(|s| s.parse::<SessionId>())
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let agent = Agent::load(config)?;
    let mut session = agent.create_session(id, now_ms())?;

    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut lines = stdin.lock().lines();
    let mut out = io::stdout().lock();
    if interactive {
        writeln!(out, "Type 'exit' to finish.")?;
    }
    loop {
        if interactive {
            write!(out, "User: ")?;
            out.flush()?;
        }
        let Some(line) = lines.next().transpose()? else {
            break;
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if EXIT_WORDS.contains(&line.to_ascii_lowercase().as_str()) {
            break;
        }
        if !interactive {
            writeln!(out, "User: {line}")?;
        }
        let reply = agent.process_utterance(&mut session, line, now_ms())?;
        writeln!(out, "Ericson: {}", reply.text)?;
        if let Some(e) = reply.log_error {
            eprintln!("warning: turn not logged: {e}");
        }
    }

    let rating = loop {
        write!(
            out,
            "Rate this conversation from 1 to 5, or press Enter to skip: "
        )?;
        out.flush()?;
        let answer = match lines.next().transpose()? {
            Some(l) => l.trim().to_string(),
            None => String::new(),
        };
        if !interactive {
            writeln!(out)?;
        }
        if answer.is_empty() {
            break None;
        }
        match answer.parse::<u8>() {
            Ok(r) if (1..=5).contains(&r) => break Some(r),
            _ => writeln!(out, "Please enter a number from 1 to 5.")?,
        }
    };
    agent.finalize(&mut session, rating, None, now_ms())?;
    writeln!(out, "Goodbye!")?;
    Ok(())
}

fn parse_kind(name: &str) -> Result<ClassifierKind> {
    name.parse()
        .map_err(|e: CoreError| CliError::Usage(e.to_string()))
}

fn train(args: TrainArgs) -> Result<()> {
    let kind = parse_kind(&args.classifier)?;
    let out = args.out.unwrap_or_else(|| args.data_dir.join("model.json"));
    let model = train_model(&args.data_dir, &TrainerSpec::default_for(kind))?;
    model.save(&out)?;
    println!(
        "trained {} on {} features, wrote {}",
        kind.name(),
        model.width(),
        out.display()
    );
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    if args.folds < 2 {
        return Err(CliError::Usage("--folds must be at least 2".into()));
    }
    let kinds: Vec<ClassifierKind> = args
        .classifiers
        .iter()
        .map(|c| parse_kind(c))
        .collect::<Result<_>>()?;
    let dataset = args
        .dataset
        .clone()
        .unwrap_or_else(|| args.data_dir.join("intents.tsv"));
    let texts = load_labeled_texts(&dataset)?;
    let features = ericson_core::agent::build_feature_models(&args.data_dir)?;
    let data = LabeledDataset::featurize(&features, &texts)?;

    let mut report = serde_json::Map::new();
    for kind in kinds {
        let spec = TrainerSpec::default_for(kind);
        let r = cross_validate(&data, args.folds, |d| spec.train(d))?;
        print!(
            "{}",
            r.render_table(&format!("{} ({}-fold)", kind.name(), args.folds))
        );
        println!();
        report.insert(kind.name().to_string(), serde_json::to_value(&r)?);
    }

    if let Some(size) = args.hierarchical {
        let model_path = args
            .model
            .clone()
            .unwrap_or_else(|| args.data_dir.join("model.json"));
        let model = ClassifierModel::load(&model_path)?;
        let linker = EntityLinker::offline(
            std::sync::Arc::new(Gazetteer::load(&args.data_dir.join("gazetteer.tsv"))?),
            ProfileSet::load(&args.data_dir.join("profiles.tsv"))?,
            Default::default(),
        )?;
        let set = synthetic::generate_entity_eval(args.seed, size, 0.35);
        let h = ericson_core::entity::evaluate_hierarchical(&linker, &model, &features, &set)?;
        print!(
            "{}",
            h.render(&format!(
                "{} before and after entity classification",
                model.kind().name()
            ))
        );
        report.insert("hierarchical".into(), serde_json::to_value(&h)?);
    }

    if let Some(path) = args.report {
        write_json(&path, &serde_json::Value::Object(report))?;
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.into())
    }
}

/// `YYYY-MM-DD` (UTC midnight), RFC 3339 or epoch milliseconds.
pub fn parse_time(text: &str) -> Result<i64> {
    let t = text.trim();
    if let Ok(ms) = t.parse::<i64>() {
        return Ok(ms);
    }
    if let Ok(d) = NaiveDate::parse_from_str(t, "%Y-%m-%d") {
        return Ok(d
            .and_hms_opt(0, 0, 0)
            .expect("midnight")
            .and_utc()
            .timestamp_millis());
    }
    DateTime::parse_from_rfc3339(t)
        .map(|d| d.timestamp_millis())
        .map_err(|_| CliError::Usage(format!("cannot read '{text}' as a date or time")))
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let split = parse_time(&args.split)?;
    let range = match (&args.from, &args.to) {
        (None, None) => None,
        (from, to) => Some(TimeRange {
            from_ms: from
                .as_deref()
                .map(parse_time)
                .transpose()?
                .unwrap_or(i64::MIN),
            to_ms: to
                .as_deref()
                .map(parse_time)
                .transpose()?
                .unwrap_or(i64::MAX),
        }),
    };
    let only: Vec<ComponentId> = args
        .components
        .iter()
        .map(|c| {
            c.parse()
                .map_err(|e: CoreError| CliError::Usage(e.to_string()))
        })
        .collect::<Result<_>>()?;
    if !args.log_dir.is_dir() {
        return Err(
            CoreError::NotFound(format!("log directory {}", args.log_dir.display())).into(),
        );
    }
    let report = analyze_dir(
        &args.log_dir,
        split,
        range,
        (!only.is_empty()).then_some(only.as_slice()),
    )?;
    print!("{}", report.render());
    if let Some(path) = args.report {
        write_json(&path, &report)?;
    }
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<()> {
    let mut config = agent_config(&args.agent)?;
    config.log_dir = None;
    let wanted = args
        .session
        .as_deref()
        .map(str::parse::<SessionId>)
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if !args.log_dir.is_dir() {
        return Err(
            CoreError::NotFound(format!("log directory {}", args.log_dir.display())).into(),
        );
    }
    let agent = Agent::load(config)?;
    let logs = load_sessions(&args.log_dir, None)?;
    let sessions: Vec<_> = logs
        .sessions
        .iter()
        .filter(|s| wanted.as_ref().is_none_or(|w| &s.id == w))
        .collect();
    if let (Some(w), true) = (&wanted, sessions.is_empty()) {
        return Err(CoreError::NotFound(format!("session {w}")).into());
    }
    let mut turns = 0;
    for log in &sessions {
        let report = agent.replay(log)?;
        turns += report.turns;
        if let Some(d) = report.divergence {
            return Err(CliError::Divergence(format!(
                "session {} diverges at turn {} (\"{}\")\n  logged:   {}\n  replayed: {}",
                report.session_id, d.turn_index, d.user_text, d.expected, d.actual
            )));
        }
    }
    println!(
        "replayed {} sessions, {turns} turns, no differences",
        sessions.len()
    );
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    let mut config = ServiceConfig::load(args.config.as_deref())?;
    if let Some(bind) = args.bind {
        config.bind = bind;
        config.validate()?;
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(ericson_service::serve(config))?;
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<()> {
    let tag = args.tag.trim().to_ascii_lowercase();
    if tag.is_empty()
        || !tag
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(CliError::Usage(format!("invalid tag '{}'", args.tag)));
    }
    let xml = std::fs::read_to_string(&args.feed)
        .map_err(|e| CoreError::NotFound(format!("{}: {e}", args.feed.display())))?;
    let ingested = ingest_feed(&xml, &tag)?;
    if ingested.items.is_empty() {
        return Err(
            CoreError::Input(format!("{} has no usable items", args.feed.display())).into(),
        );
    }
    let dir = args.data_dir.join("feeds");
    std::fs::create_dir_all(&dir)?;
    let target = dir.join(format!("{tag}.xml"));
    std::fs::write(&target, xml)?;
    println!(
        "ingested {} items ({} dropped) as {tag} into {}",
        ingested.items.len(),
        ingested.dropped,
        target.display()
    );
    Ok(())
}
