use alloc::string::String;
use alloc::vec::Vec;

/// A lower-cased word with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Splits on anything that is not alphanumeric. Apostrophes inside words are
/// kept (`what's`), as are hyphens between digits (`2021-06-03`).
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let is_digit_at = |i: usize| chars.get(i).is_some_and(|(_, c)| c.is_ascii_digit());
    let is_alnum_at = |i: usize| chars.get(i).is_some_and(|(_, c)| c.is_alphanumeric());
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        let joins = c.is_alphanumeric()
            || (start.is_some() && c == '-' && i > 0 && is_digit_at(i - 1) && is_digit_at(i + 1))
            || (start.is_some() && (c == '\'' || c == '\u{2019}') && is_alnum_at(i + 1));
        match (joins, start) {
            (true, None) => start = Some(pos),
            (false, Some(s)) => {
                out.push(Token { text: normalize(&text[s..pos]), start: s, end: pos });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: normalize(&text[s..]), start: s, end: text.len() });
    }
    out
}

fn normalize(word: &str) -> String {
    word.to_lowercase().replace('\u{2019}', "'")
}
