//! Regenerates `data/intents.tsv` and `data/embeddings.txt`.
//!
//! Usage: cargo run -p ericson-core --example gen_corpus [data-dir]

use std::path::PathBuf;

use ericson_core::intent::synthetic::{
    embeddings_to_text, generate_corpus, generate_embeddings, template_vocabulary, to_tsv,
    DEFAULT_CORPUS_SEED, DEFAULT_EMBEDDING_DIM, DEFAULT_PER_CLASS,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    let corpus = generate_corpus(DEFAULT_CORPUS_SEED, DEFAULT_PER_CLASS);
    std::fs::write(dir.join("intents.tsv"), to_tsv(&corpus))?;
    let vocab = template_vocabulary();
    let table = generate_embeddings(DEFAULT_CORPUS_SEED, DEFAULT_EMBEDDING_DIM, &vocab)?;
    std::fs::write(dir.join("embeddings.txt"), embeddings_to_text(&table))?;
    println!(
        "wrote {} utterances and {} vectors to {}",
        corpus.len(),
        table.len(),
        dir.display()
    );
    Ok(())
}
