use alloc::string::String;
use alloc::vec::Vec;

/// Longest message body, in characters.
pub const MAX_MESSAGE_CHARS: usize = 450;
pub const MIN_DELAY_MS: u32 = 300;
pub const MAX_DELAY_MS: u32 = 2500;
const MS_PER_CHAR: u32 = 15;

/// `clamp(300 + 15 * chars, 300, 2500)`.
pub fn compute_delay(text: &str) -> u32 {
    let chars = u32::try_from(text.chars().count()).unwrap_or(u32::MAX);
    MIN_DELAY_MS.saturating_add(MS_PER_CHAR.saturating_mul(chars)).clamp(MIN_DELAY_MS, MAX_DELAY_MS)
}

fn is_symbol(c: char) -> bool {
    !c.is_ascii() && !c.is_alphanumeric()
}

/// Whitespace runs `(start, end)` (char indices) that separate sentences.
/// A trailing emoji stays with the sentence before it.
fn sentence_gaps(chars: &[char]) -> Vec<(usize, usize)> {
    let terminator = |k: usize| k > 0 && ".!?".contains(chars[k - 1]);
    // `k` is one past the last char before a gap: "end." or "end. <emoji>".
    let ends_sentence = |mut k: usize| -> bool {
        if terminator(k) {
            return true;
        }
        let symbols_end = k;
        while k > 0 && is_symbol(chars[k - 1]) {
            k -= 1;
        }
        let space_end = k;
        while k > 0 && chars[k - 1].is_whitespace() {
            k -= 1;
        }
        k < space_end && space_end < symbols_end && terminator(k)
    };
    let emoji_follows = |mut j: usize| -> bool {
        let start = j;
        while j < chars.len() && is_symbol(chars[j]) {
            j += 1;
        }
        j > start && (j == chars.len() || chars[j].is_whitespace())
    };
    let mut gaps = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            let start = i;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i < chars.len() && ends_sentence(start) && !emoji_follows(i) {
                gaps.push((start, i));
            }
        } else {
            i += 1;
        }
    }
    gaps
}

/// Pieces of at most [`MAX_MESSAGE_CHARS`] characters, each paired with the
/// whitespace consumed after it, so that concatenating every
/// `piece + separator` reproduces `text`.
pub fn split_with_separators(text: &str) -> Vec<(String, String)> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    // Sentences as (start, end, gap_end): text[start..end] then whitespace to gap_end.
    let mut sentences = Vec::new();
    let mut start = 0;
    for (gs, ge) in sentence_gaps(&chars) {
        sentences.push((start, gs, ge));
        start = ge;
    }
    sentences.push((start, chars.len(), chars.len()));

    let collect = |a: usize, b: usize| chars[a..b].iter().collect::<String>();
    let mut out: Vec<(String, String)> = Vec::new();
    let mut piece: Option<(usize, usize, usize)> = None;
    for (s, e, g) in sentences {
        if let Some((ps, pe, pg)) = piece {
            if e - ps <= MAX_MESSAGE_CHARS {
                piece = Some((ps, e, g));
                continue;
            }
            out.push((collect(ps, pe), collect(pe, pg)));
        }
        if e - s <= MAX_MESSAGE_CHARS {
            piece = Some((s, e, g));
            continue;
        }
        // Hard wrap a long sentence at the last whitespace within the limit.
        let mut at = s;
        while e - at > MAX_MESSAGE_CHARS {
            let window_end = at + MAX_MESSAGE_CHARS;
            match (at + 1..=window_end).rev().find(|&k| chars[k].is_whitespace()) {
                Some(ws) => {
                    let mut ws_start = ws;
                    while ws_start > at && chars[ws_start - 1].is_whitespace() {
                        ws_start -= 1;
                    }
                    let mut ws_end = ws;
                    while ws_end < e && chars[ws_end].is_whitespace() {
                        ws_end += 1;
                    }
                    if ws_start == at {
                        // Leading whitespace only; cut at the limit instead.
                        out.push((collect(at, window_end), String::new()));
                        at = window_end;
                    } else {
                        out.push((collect(at, ws_start), collect(ws_start, ws_end)));
                        at = ws_end;
                    }
                }
                None => {
                    out.push((collect(at, window_end), String::new()));
                    at = window_end;
                }
            }
        }
        piece = Some((at, e, g));
    }
    if let Some((ps, pe, pg)) = piece {
        out.push((collect(ps, pe), collect(pe, pg)));
    }
    out
}

/// Greedy split at sentence boundaries into pieces of at most
/// [`MAX_MESSAGE_CHARS`] characters; an over-long sentence is hard-wrapped at
/// its last whitespace before the limit.
pub fn split(text: &str) -> Vec<String> {
    split_with_separators(text).into_iter().map(|(p, _)| p).collect()
}
