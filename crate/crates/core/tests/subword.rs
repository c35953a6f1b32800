#![cfg(feature = "subword")]

use emomodes::features::{build_vocabulary, vectorize, SubwordTokenizer, TokenWeighting, Tokenizer};

fn tokenizer() -> SubwordTokenizer {
    SubwordTokenizer::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/unigram_tokenizer.json")).unwrap()
}

#[test]
fn tokenizes_like_reference_implementation() {
    let tok = tokenizer();
    assert_eq!(tok.tokenize("il regarde la mer."), ["▁il", "▁regarde", "▁la", "▁mer", "."]);
}

#[test]
fn repeated_subwords_are_counted() {
    let tok = tokenizer();
    let text = "il regarde regarde les mers.";
    // hand segmentation: ▁il ▁regarde ▁regarde ▁ l e s ▁mer s .
    let vocab = build_vocabulary([text], &tok).unwrap();
    assert_eq!(vocab.len(), 8);
    let v = vectorize(text, &vocab, &tok, TokenWeighting::Counts);
    let count = |t: &str| v.get(vocab.get(t).unwrap());
    assert_eq!(count("▁regarde"), 2.0);
    assert_eq!(count("s"), 2.0);
    assert_eq!(count("▁il"), 1.0);
    assert_eq!(count("▁"), 1.0);
    assert_eq!(v.l1_norm(), 10.0);
}

#[test]
fn missing_definition_file() {
    assert!(SubwordTokenizer::from_file("/nonexistent/tokenizer.json").is_err());
}
