//! End-to-end acceptance checks, one PASS/FAIL line each.
//!
//! Set `ERICSON_UPDATE_GOLDEN=1` to rewrite the golden transcripts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use ericson_core::agent::{build_feature_models, Agent, AgentConfig};
use ericson_core::analytics::synthetic::{synthetic_period, write_sessions, PeriodSpec};
use ericson_core::analytics::{
    analyze_dir, component_runs, engagement_depth, percent_change, welch_ttest,
};
use ericson_core::components::ComponentId;
use ericson_core::dialogue::{DialogueStateId, RouteReason, SessionId, TopState};
use ericson_core::entity::{evaluate_hierarchical, EntityClass};
use ericson_core::intent::synthetic::{
    generate_corpus, generate_entity_eval, DEFAULT_CORPUS_SEED, DEFAULT_PER_CLASS,
};
use ericson_core::intent::{
    cross_validate, ClassifierKind, Gbdt, GbdtParams, IntentLabel, LabeledDataset, MaxEnt,
    MaxEntParams, TrainerSpec,
};
use ericson_core::logger::{
    load_sessions, DecisionSummary, DialogueLog, SessionStart, TurnRecord, LOG_SCHEMA_VERSION,
};
use ericson_core::transition::TopicId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

type Check = Result<String, String>;
type Runner<'a> = Box<dyn Fn() -> Check + 'a>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn data_dir() -> PathBuf {
    manifest_dir().join("../../data")
}

fn load_agent(log_dir: Option<&Path>) -> Result<Agent, String> {
    Agent::load(AgentConfig {
        data_dir: data_dir(),
        log_dir: log_dir.map(Path::to_path_buf),
        ..AgentConfig::default()
    })
    .map_err(err)
}

struct Transcript {
    text: String,
    responses: Vec<ericson_core::agent::AgentResponse>,
}

fn transcript(agent: &Agent, id: &str, turns: &[&str]) -> Result<Transcript, String> {
    let id: SessionId = id.parse().map_err(err)?;
    let mut session = agent.create_session(Some(id), 0).map_err(err)?;
    let mut text = String::new();
    let mut responses = Vec::new();
    for (i, user) in turns.iter().enumerate() {
        let r = agent
            .process_utterance(&mut session, user, i as i64 * 1000)
            .map_err(err)?;
        text.push_str(&format!("User: {user}\nEricson: {}\n", r.text));
        responses.push(r);
    }
    Ok(Transcript { text, responses })
}

fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = manifest_dir().join("tests/golden").join(name);
    if std::env::var_os("ERICSON_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).map_err(err)?;
    }
    let expected =
        std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()));
    Err(format!("{name} differs from golden at line {}", line + 1))
}

const MOVIE_TURNS: [&str; 7] = [
    "Hello",
    "Let's talk about Wonder Woman",
    "Sure, tell me about that.",
    "What's its rating?",
    "Who directed it?",
    "Who's the star?",
    "No thanks, tell me about nice recent jazz songs.",
];

fn menu_size(text: &str) -> Option<usize> {
    let start = text.find("about its ")? + "about its ".len();
    let end = start + text[start..].find(". Which")?;
    let list = &text[start..end];
    Some(list.split([',']).count() + usize::from(list.contains(" or ")))
}

fn golden_movies(agent: &Agent) -> Check {
    let started = Instant::now();
    let t = transcript(agent, "golden-movies", &MOVIE_TURNS)?;
    let elapsed = started.elapsed();
    golden("movies.txt", &t.text)?;
    let r = &t.responses;
    ensure(
        r[1].text.contains("Other action films out recently are"),
        "no related-movies list",
    )?;
    ensure(r[3].text.contains("8.4"), "rating missing")?;
    ensure(r[4].text.contains("Patty Jenkins"), "director missing")?;
    let menus: Vec<usize> = r[2..=5].iter().filter_map(|r| menu_size(&r.text)).collect();
    ensure(
        menus.len() == 4 && menus.windows(2).all(|w| w[1] < w[0]),
        format!("field offers do not shrink: {menus:?}"),
    )?;
    ensure(r[6].component == ComponentId::Music, "last turn not Music")?;
    ensure(elapsed.as_secs_f64() < 5.0, format!("took {elapsed:?}"))?;
    Ok(format!(
        "offers {menus:?}, {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

const PROACTIVE_TURNS: [&str; 4] = [
    "Let's talk about Mars",
    "Yes",
    "Tell me about Jim Bridenstine",
    "No thanks",
];

fn golden_proactivity(agent: &Agent) -> Check {
    let t = transcript(agent, "golden-proactive", &PROACTIVE_TURNS)?;
    golden("proactivity.txt", &t.text)?;
    let r = &t.responses;
    ensure(
        r[0].suggestion == Some(TopicId::Space),
        "no Space suggestion after Mars",
    )?;
    ensure(
        r[0].text.contains(
            "I have something interesting about Cosmos, would you like to hear about it?",
        ),
        "Space prompt wording",
    )?;
    ensure(
        r[2].text.starts_with(
            "Here is what I got from Wikipedia. James Frederick Bridenstine is an American politician",
        ),
        "no Wikipedia answer",
    )?;
    ensure(
        r[2].suggestion == Some(TopicId::Celebrity),
        "no Celebrity suggestion",
    )?;
    Ok("Space, Wikipedia, Celebrity".into())
}

fn entity_table(agent: &Agent) -> Check {
    let expected = [
        ("Drake", "Music"),
        ("Wonder Woman", "Movie"),
        ("Apple", "Technology"),
        ("Donald Trump", "News"),
    ];
    for (surface, class) in expected {
        let tokens = ericson_core::text::tokenize(surface);
        let (mentions, error) = agent.linker().resolve(&tokens);
        ensure(error.is_none(), format!("{surface}: {error:?}"))?;
        let mention = mentions.first().ok_or(format!("{surface} not detected"))?;
        let m = agent
            .linker()
            .classify_description(&mention.description)
            .ok_or(format!("{surface} unclassified"))?;
        let want: EntityClass = class.parse().map_err(err)?;
        ensure(
            m.class == want,
            format!("{surface} -> {} not {class}", m.class),
        )?;
    }
    Ok("4/4 pairs".into())
}

fn hierarchical(agent: &Agent) -> Check {
    let set = generate_entity_eval(DEFAULT_CORPUS_SEED, 1000, 0.35);
    let r = evaluate_hierarchical(agent.linker(), agent.model(), agent.features(), &set)
        .map_err(err)?;
    ensure(set.len() == 1000, "set size")?;
    ensure(
        r.entity_examples * 10 >= set.len() * 3,
        format!("only {} entity utterances", r.entity_examples),
    )?;
    ensure(
        r.entity_accuracy_after > r.entity_accuracy_before,
        format!(
            "entity accuracy {:.3} -> {:.3}",
            r.entity_accuracy_before, r.entity_accuracy_after
        ),
    )?;
    ensure(
        r.after.accuracy >= r.before.accuracy,
        format!(
            "overall {:.3} -> {:.3}",
            r.before.accuracy, r.after.accuracy
        ),
    )?;
    Ok(format!(
        "{} entity utterances, entity {:.3} -> {:.3}, overall {:.3} -> {:.3}",
        r.entity_examples,
        r.entity_accuracy_before,
        r.entity_accuracy_after,
        r.before.accuracy,
        r.after.accuracy
    ))
}

fn classifier_ordering() -> Check {
    let texts = generate_corpus(DEFAULT_CORPUS_SEED, DEFAULT_PER_CLASS);
    let features = build_feature_models(&data_dir()).map_err(err)?;
    let data = LabeledDataset::featurize(&features, &texts).map_err(err)?;
    ensure(
        data.class_counts().len() == 14 && data.class_counts().values().all(|&n| n >= 50),
        "corpus shape",
    )?;
    let f1 = |kind| {
        let spec = TrainerSpec::default_for(kind);
        cross_validate(&data, 2, |d| spec.train(d)).map(|r| r.macro_f1)
    };
    let nb = f1(ClassifierKind::NaiveBayes).map_err(err)?;
    let gbdt = f1(ClassifierKind::Gbdt).map_err(err)?;
    ensure(gbdt >= nb, format!("GBDT {gbdt:.3} < NB {nb:.3}"))?;
    ensure(gbdt >= 0.8, format!("GBDT {gbdt:.3} < 0.8"))?;
    Ok(format!("macro-F1 NB {nb:.3}, GBDT {gbdt:.3}"))
}

fn welch_oracle(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let m = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let v = |x: &[f64]| {
        let mu = m(x);
        x.iter().map(|y| (y - mu).powi(2)).sum::<f64>() / (x.len() - 1) as f64
    };
    let (va, vb) = (v(a) / a.len() as f64, v(b) / b.len() as f64);
    let t = (m(a) - m(b)) / (va + vb).sqrt();
    let df =
        (va + vb).powi(2) / (va.powi(2) / (a.len() - 1) as f64 + vb.powi(2) / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid df");
    (t, df, 2.0 * dist.cdf(-t.abs()))
}

fn analytics() -> Check {
    for (before, after, want) in [
        (1.830, 2.745, 50.0),
        (9.66, 10.9, 12.8),
        (2.962, 3.218, 8.6),
    ] {
        let pct = percent_change(before, after).map_err(err)? * 100.0;
        ensure(
            ((pct * 10.0).round() / 10.0 - want).abs() < 1e-9,
            format!("{before} -> {after} gave {pct:.3}%"),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (na, nb) = (rng.gen_range(2..40), rng.gen_range(2..40));
        let shift = rng.gen_range(-2.0..2.0);
        let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0.0..5.0)).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0.0..5.0) + shift).collect();
        let got = welch_ttest(&a, &b).map_err(err)?;
        let (t, df, p) = welch_oracle(&a, &b);
        for (x, y) in [(got.t, t), (got.df, df), (got.p, p)] {
            worst = worst.max((x - y).abs());
        }
    }
    ensure(worst < 1e-6, format!("oracle gap {worst:e}"))?;

    let dir = tempfile::tempdir().map_err(err)?;
    let log = DialogueLog::open(dir.path()).map_err(err)?;
    let split = 1_496_275_200_000;
    let day = 86_400_000;
    let before = PeriodSpec {
        sessions: 200,
        start_ms: split - 60 * day,
        mean_turns: 9.66,
        mean_rating: 2.962,
        mean_news_run: 1.830,
    };
    let after = PeriodSpec {
        start_ms: split + day,
        mean_turns: 10.9,
        mean_rating: 3.218,
        mean_news_run: 2.745,
        ..before.clone()
    };
    write_sessions(&log, &synthetic_period(21, &before, "pre")).map_err(err)?;
    write_sessions(&log, &synthetic_period(22, &after, "post")).map_err(err)?;
    let report = analyze_dir(dir.path(), split, None, None).map_err(err)?;
    let news = report
        .engagement
        .changes
        .iter()
        .find(|c| c.component == ComponentId::News)
        .ok_or("no News engagement")?;
    let p = news.test.as_ref().ok_or("no News test")?.p;
    ensure(p < 0.001, format!("News p = {p}"))?;
    let pct = news.percent_change.ok_or("no News change")? * 100.0;
    ensure(
        ((pct * 10.0).round() - 500.0).abs() < 1e-9,
        format!("News change {pct:.2}%"),
    )?;
    Ok(format!("oracle gap {worst:.1e}, News +{pct:.1}% p={p:.1e}"))
}

fn record(id: &SessionId, index: u32, component: ComponentId) -> TurnRecord {
    let state = DialogueStateId::new(TopState::for_component(component, false));
    TurnRecord {
        schema: LOG_SCHEMA_VERSION,
        session_id: id.clone(),
        turn_index: index,
        timestamp_ms: 1_500_000_000_000 + i64::from(index),
        user_text: "u".into(),
        resolved_text: "u".into(),
        decision: DecisionSummary {
            general_label: IntentLabel::News,
            general_score: 1.0,
            final_label: IntentLabel::News,
            overridden: false,
            entity: None,
            entity_class: None,
        },
        state_before: state.clone(),
        state_after: state,
        component,
        route_reason: RouteReason::Classifier,
        response_text: "r".into(),
        suggestion: None,
        latency_ms: 0.0,
        error: None,
    }
}

fn engagement() -> Check {
    use ComponentId::*;
    let dir = tempfile::tempdir().map_err(err)?;
    let log = DialogueLog::open(dir.path()).map_err(err)?;
    let sessions = [
        ("hand-a", vec![News, News, Movies, News, News, News]),
        ("hand-b", vec![Movies, Movies, Movies, Joke, Movies]),
        ("hand-c", vec![Joke]),
    ];
    for (i, (id, seq)) in sessions.iter().enumerate() {
        let id: SessionId = id.parse().map_err(err)?;
        log.start_session(SessionStart {
            schema: LOG_SCHEMA_VERSION,
            session_id: id.clone(),
            seed: 0,
            started_ms: 1_500_000_000_000 + i as i64,
        })
        .map_err(err)?;
        for (t, &c) in seq.iter().enumerate() {
            log.append_turn(&record(&id, t as u32 + 1, c))
                .map_err(err)?;
        }
    }
    let loaded = load_sessions(dir.path(), None).map_err(err)?;
    let seqs: Vec<Vec<ComponentId>> = loaded.sessions.iter().map(|s| s.components()).collect();
    let report = engagement_depth(seqs.iter().map(Vec::as_slice));
    // News runs 2, 3; Movies 1, 3, 1; Joke 1, 1
    let want = [(News, 2.5), (Movies, 5.0 / 3.0), (Joke, 1.0)];
    for (c, avg) in want {
        ensure(
            report.average(c) == Some(avg),
            format!("{c}: {:?} != {avg}", report.average(c)),
        )?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let len = rng.gen_range(0..60);
        let seq: Vec<ComponentId> = (0..len)
            .map(|_| ComponentId::ALL[rng.gen_range(0..4)])
            .collect();
        let total: u32 = component_runs(&seq).iter().map(|(_, n)| n).sum();
        ensure(
            total as usize == seq.len(),
            "run sum differs from turn count",
        )?;
        let report = engagement_depth([seq.as_slice()]);
        let turns: u32 = report.components.values().map(|c| c.turns).sum();
        ensure(turns as usize == seq.len(), "engagement turns differ")?;
    }
    Ok("hand-built averages exact, 1000 fuzzed sessions".into())
}

const UTTERANCES: [&str; 32] = [
    "hello",
    "how are you",
    "yes",
    "no",
    "sure",
    "no thanks",
    "tell me a joke",
    "another one",
    "Let's talk about Wonder Woman",
    "what's its rating",
    "who directed it",
    "what is the weather in Boston",
    "what's the weather like",
    "Seattle",
    "tell me about Mars",
    "tell me about Jim Bridenstine",
    "what's new in technology",
    "any sports news",
    "play some jazz",
    "what are people listening to",
    "how do I make guacamole",
    "ingredients",
    "what do you think about cats",
    "who is Drake",
    "what's going on with Donald Trump",
    "tell me about Apple",
    "let's talk about something else",
    "what topics do you know",
    "blorp fizzle",
    "what is the capital of France",
    "recommend a movie",
    "space",
];

fn fuzz_sessions(
    agent: &Agent,
    seed: u64,
    sessions: usize,
    turns: std::ops::Range<usize>,
) -> Result<Vec<f64>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut latencies = Vec::new();
    for s in 0..sessions {
        let id: SessionId = format!("fuzz-{seed}-{s}").parse().map_err(err)?;
        let start = 1_500_000_000_000 + s as i64 * 100_000;
        let mut session = agent.create_session(Some(id), start).map_err(err)?;
        for t in 0..rng.gen_range(turns.clone()) {
            let text = UTTERANCES[rng.gen_range(0..UTTERANCES.len())];
            let began = Instant::now();
            let r = agent
                .process_utterance(&mut session, text, start + t as i64 * 1000)
                .map_err(err)?;
            latencies.push(began.elapsed().as_secs_f64() * 1e3);
            ensure(
                r.log_error.is_none(),
                format!("log error {:?}", r.log_error),
            )?;
        }
        if rng.gen_bool(0.5) {
            agent
                .finalize(
                    &mut session,
                    Some(rng.gen_range(1..=5)),
                    None,
                    start + 90_000,
                )
                .map_err(err)?;
        }
    }
    Ok(latencies)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let agent = load_agent(Some(dir.path()))?;
    fuzz_sessions(&agent, 8, 100, 1..20)?;
    let logs = load_sessions(dir.path(), None).map_err(err)?;
    ensure(logs.sessions.len() == 100, "expected 100 logged sessions")?;
    let replayer = load_agent(None)?;
    let mut turns = 0;
    for log in &logs.sessions {
        let report = replayer.replay(log).map_err(err)?;
        if let Some(d) = report.divergence {
            return Err(format!(
                "{} diverges at turn {}",
                report.session_id, d.turn_index
            ));
        }
        turns += report.turns;
    }
    Ok(format!("100 sessions, {turns} turns, no differences"))
}

fn numerics(agent: &Agent) -> Check {
    let texts = generate_corpus(3, 6);
    let data = LabeledDataset::featurize(agent.features(), &texts).map_err(err)?;
    let matrix = data.matrix();
    let params = MaxEntParams {
        l2: 0.01,
        epochs: 5,
        lr: 0.5,
    };
    let model = MaxEnt::fit(&matrix, params).map_err(err)?;
    let (_, grad_w, grad_b) = model.loss_and_gradient(&matrix, params.l2);
    let analytic: Vec<f64> = grad_w.into_iter().flatten().chain(grad_b).collect();
    let theta = model.parameters();
    ensure(theta.len() == analytic.len(), "parameter layout")?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let i = rng.gen_range(0..theta.len());
        let mut probe = model.clone();
        let mut at = |delta: f64| -> Result<f64, String> {
            let mut p = theta.clone();
            p[i] += delta;
            probe.set_parameters(&p).map_err(err)?;
            Ok(probe.loss_and_gradient(&matrix, params.l2).0)
        };
        let numeric = (at(h)? - at(-h)?) / (2.0 * h);
        let scale = analytic[i].abs().max(numeric.abs()).max(1e-3);
        worst = worst.max((analytic[i] - numeric).abs() / scale);
    }
    ensure(worst < 1e-5, format!("gradient relative error {worst:e}"))?;

    let gbdt = Gbdt::fit(
        &matrix,
        GbdtParams {
            rounds: 100,
            ..GbdtParams::default()
        },
    )
    .map_err(err)?;
    let history = gbdt.loss_history();
    ensure(history.len() == 101, "expected 100 rounds")?;
    ensure(
        history.windows(2).all(|w| w[1] <= w[0]),
        "GBDT loss increased",
    )?;

    let mut checked = 0;
    let models: Vec<_> = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::MaxEnt,
        ClassifierKind::Gbdt,
    ]
    .into_iter()
    .map(|k| TrainerSpec::default_for(k).train(&data))
    .collect::<Result<_, _>>()
    .map_err(err)?;
    for model in models.iter().chain([agent.model()]) {
        for e in data.examples() {
            let scores = model.predict_scores(&e.features).map_err(err)?;
            let sum: f64 = scores.iter().sum();
            ensure(
                (sum - 1.0).abs() <= 1e-6 && scores.iter().all(|s| (0.0..=1.0).contains(s)),
                format!("{:?} scores sum to {sum}", model.kind()),
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "gradient error {worst:.1e}, GBDT loss {:.2} -> {:.2}, {checked} score vectors",
        history[0], history[100]
    ))
}

fn latency() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let agent = load_agent(Some(dir.path()))?;
    let mut samples = fuzz_sessions(&agent, 10, 100, 10..11)?;
    ensure(samples.len() == 1000, format!("{} turns", samples.len()))?;
    samples.sort_by(f64::total_cmp);
    let p95 = samples[(0.95 * samples.len() as f64).ceil() as usize - 1];
    ensure(p95 < 50.0, format!("P95 {p95:.2} ms"))?;
    Ok(format!("P95 {p95:.3} ms over 1000 turns"))
}

fn main() -> ExitCode {
    let agent = match load_agent(None) {
        Ok(a) => a,
        Err(e) => {
            println!("FAIL agent start-up: {e}");
            return ExitCode::FAILURE;
        }
    };
    let checks: Vec<(&str, Runner)> = vec![
        (
            "golden movies transcript",
            Box::new(|| golden_movies(&agent)),
        ),
        (
            "golden proactivity transcript",
            Box::new(|| golden_proactivity(&agent)),
        ),
        (
            "entity classification table",
            Box::new(|| entity_table(&agent)),
        ),
        (
            "hierarchical improvement",
            Box::new(|| hierarchical(&agent)),
        ),
        ("classifier ordering", Box::new(classifier_ordering)),
        ("analytics exactness", Box::new(analytics)),
        ("engagement metric", Box::new(engagement)),
        ("replay determinism", Box::new(determinism)),
        ("numerics", Box::new(|| numerics(&agent))),
        ("turn latency", Box::new(latency)),
    ];
    let mut failed = 0;
    let mut timings = BTreeMap::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        timings.insert(i + 1, started.elapsed());
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} passed, {failed} failed in {:.1} s",
        checks.len() - failed,
        timings.values().map(|d| d.as_secs_f64()).sum::<f64>()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
