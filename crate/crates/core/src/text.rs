//! Tokenization shared by the sentiment scorer, the embedding model and the
//! metadata extractor.

/// Lowercases and splits on anything that is not alphanumeric. Non-ASCII
/// symbols that are not alphanumeric (emoji and the like) become
/// single-character tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
            continue;
        }
        if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        if !ch.is_ascii() && !ch.is_whitespace() && !is_joiner(ch) {
            tokens.push(ch.to_string());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

// zero-width joiner and variation selectors glue emoji sequences together
fn is_joiner(ch: char) -> bool {
    matches!(ch, '\u{200d}' | '\u{fe0e}' | '\u{fe0f}')
}

pub fn is_url(word: &str) -> bool {
    let w = word.to_ascii_lowercase();
    w.contains("http://") || w.contains("https://") || w.starts_with("www.")
}

/// Removes whitespace-delimited URL words before tokenizing.
pub fn tokenize_without_urls(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|w| !is_url(w))
        .flat_map(tokenize)
        .collect()
}

pub fn count_urls(text: &str) -> usize {
    text.split_whitespace().filter(|w| is_url(w)).count()
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}
