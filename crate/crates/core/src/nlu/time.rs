//! Closed-grammar temporal expression parser.
//!
//! Recognized forms, all resolved against the utterance's reference date:
//! `today`, `yesterday`, `N days ago`, `this week` / `last week` (ISO weeks,
//! Monday first), diary-relative `week 1` / `first week`, weekday names
//! (most recent strictly before the reference date), and explicit dates
//! (`June 3`, `3rd of June`, `2021-06-03`). Two expressions joined by a
//! connector (`vs`, `compared to`, `and`, ...) form a pair.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use super::tokens::Token;
use crate::diary::DateRange;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolvedTime {
    Single(DateRange),
    Pair(DateRange, DateRange),
}

impl ResolvedTime {
    pub fn ranges(&self) -> Vec<DateRange> {
        match self {
            ResolvedTime::Single(r) => alloc::vec![*r],
            ResolvedTime::Pair(a, b) => alloc::vec![*a, *b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalExpression {
    /// Source span the expression was read from; empty when defaulted.
    pub raw: String,
    pub resolved: ResolvedTime,
}

/// Outcome of temporal parsing. A malformed explicit date yields a
/// diagnostic and is otherwise ignored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TimeParse {
    pub expression: Option<TemporalExpression>,
    pub diagnostic: Option<String>,
}

pub(crate) struct TimeContext {
    pub reference: NaiveDate,
    pub diary_start: NaiveDate,
}

enum Attempt {
    Range(DateRange, usize),
    Malformed(String, usize),
    Nothing,
}

const MONTHS: [(&str, u32); 24] = [
    ("january", 1),
    ("jan", 1),
    ("february", 2),
    ("feb", 2),
    ("march", 3),
    ("mar", 3),
    ("april", 4),
    ("apr", 4),
    ("may", 5),
    ("june", 6),
    ("jun", 6),
    ("july", 7),
    ("jul", 7),
    ("august", 8),
    ("aug", 8),
    ("september", 9),
    ("sept", 9),
    ("sep", 9),
    ("october", 10),
    ("oct", 10),
    ("november", 11),
    ("nov", 11),
    ("december", 12),
    ("dec", 12),
];

const WEEKDAYS: [(&str, Weekday); 7] = [
    ("monday", Weekday::Mon),
    ("tuesday", Weekday::Tue),
    ("wednesday", Weekday::Wed),
    ("thursday", Weekday::Thu),
    ("friday", Weekday::Fri),
    ("saturday", Weekday::Sat),
    ("sunday", Weekday::Sun),
];

const NUMBER_WORDS: [&str; 14] = [
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve", "thirteen",
    "fourteen",
];

const ORDINAL_WORDS: [&str; 4] = ["first", "second", "third", "fourth"];

fn month(word: &str) -> Option<u32> {
    MONTHS.iter().find(|(w, _)| *w == word).map(|&(_, m)| m)
}

fn weekday(word: &str) -> Option<Weekday> {
    WEEKDAYS.iter().find(|(w, _)| *w == word).map(|&(_, d)| d)
}

fn cardinal(word: &str) -> Option<u32> {
    if !word.is_empty() && word.bytes().all(|b| b.is_ascii_digit()) {
        return word.parse().ok();
    }
    NUMBER_WORDS.iter().position(|w| *w == word).map(|i| i as u32 + 1)
}

/// `3`, `3rd`, `21st`.
fn day_number(word: &str) -> Option<u32> {
    let digits = word.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    let suffix = &word[digits.len()..];
    if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if !matches!(suffix, "" | "st" | "nd" | "rd" | "th") {
        return None;
    }
    digits.parse().ok().filter(|d| (1..=31).contains(d))
}

fn week_ordinal(word: &str) -> Option<u32> {
    ORDINAL_WORDS.iter().position(|w| *w == word).map(|i| i as u32 + 1).or(match word {
        "1st" => Some(1),
        "2nd" => Some(2),
        "3rd" => Some(3),
        "4th" => Some(4),
        _ => None,
    })
}

fn year(word: &str) -> Option<i32> {
    (word.len() == 4 && word.bytes().all(|b| b.is_ascii_digit())).then(|| word.parse().ok()).flatten()
}

fn iso_week(day: NaiveDate) -> DateRange {
    let monday = day - Days::new(u64::from(day.weekday().num_days_from_monday()));
    DateRange::starting(monday, 7)
}

fn title_case(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

impl TimeContext {
    /// Most recent date with the given month/day on or before the reference.
    fn month_day(&self, m: u32, d: u32, explicit_year: Option<i32>) -> Option<NaiveDate> {
        if let Some(y) = explicit_year {
            return NaiveDate::from_ymd_opt(y, m, d);
        }
        let y = self.reference.year();
        match NaiveDate::from_ymd_opt(y, m, d) {
            Some(date) if date <= self.reference => Some(date),
            Some(_) => NaiveDate::from_ymd_opt(y - 1, m, d),
            // Feb 29 outside a leap year: try the previous year before failing.
            None => NaiveDate::from_ymd_opt(y - 1, m, d).filter(|_| m == 2 && d == 29),
        }
    }

    fn explicit(&self, raw: String, m: u32, d: u32, y: Option<i32>, len: usize) -> Attempt {
        match self.month_day(m, d, y) {
            Some(date) => Attempt::Range(DateRange::single(date), len),
            None => Attempt::Malformed(raw, len),
        }
    }

    fn attempt(&self, tokens: &[Token], i: usize) -> Attempt {
        let word = |k: usize| tokens.get(i + k).map(|t| t.text.as_str()).unwrap_or("");
        let w0 = word(0);
        let one_day = |date: NaiveDate, len| Attempt::Range(DateRange::single(date), len);

        match w0 {
            "today" => return one_day(self.reference, 1),
            "yesterday" => return one_day(self.reference - Days::new(1), 1),
            "this" if word(1) == "week" => return Attempt::Range(iso_week(self.reference), 2),
            "last" | "previous" if word(1) == "week" => return Attempt::Range(iso_week(self.reference).preceding(), 2),
            "last" if weekday(word(1)).is_some() => {
                return one_day(self.previous_weekday(weekday(word(1)).unwrap()), 2)
            }
            "week" => {
                if let Some(n) = cardinal(word(1)).filter(|n| (1..=52).contains(n)) {
                    return Attempt::Range(self.diary_week(n), 2);
                }
            }
            _ => {}
        }
        if let Some(n) = week_ordinal(w0) {
            if word(1) == "week" {
                return Attempt::Range(self.diary_week(n), 2);
            }
        }
        if let Some(n) = cardinal(w0).filter(|n| (1..=366).contains(n)) {
            if matches!(word(1), "day" | "days") && word(2) == "ago" {
                return one_day(self.reference - Days::new(u64::from(n)), 3);
            }
        }
        if let Some(wd) = weekday(w0) {
            return one_day(self.previous_weekday(wd), 1);
        }
        if w0.len() >= 8 && w0.bytes().filter(|&b| b == b'-').count() == 2 {
            let parts: Vec<&str> = w0.split('-').collect();
            if parts[0].len() == 4 {
                let parsed = (parts[0].parse::<i32>(), parts[1].parse::<u32>(), parts[2].parse::<u32>());
                if let (Ok(y), Ok(m), Ok(d)) = parsed {
                    return self.explicit(w0.to_string(), m, d, Some(y), 1);
                }
            }
        }
        if let Some(m) = month(w0) {
            if let Some(d) = day_number(word(1)) {
                let y = year(word(2));
                let len = if y.is_some() { 3 } else { 2 };
                return self.explicit(format!("{} {}", title_case(w0), word(1)), m, d, y, len);
            }
        }
        if let Some(d) = day_number(w0) {
            let of = usize::from(word(1) == "of");
            if let Some(m) = month(word(1 + of)) {
                let y = year(word(2 + of));
                let len = 2 + of + usize::from(y.is_some());
                return self.explicit(format!("{} {}", title_case(word(1 + of)), w0), m, d, y, len);
            }
        }
        Attempt::Nothing
    }

    fn previous_weekday(&self, wd: Weekday) -> NaiveDate {
        let back = (7 + self.reference.weekday().num_days_from_monday() - wd.num_days_from_monday()) % 7;
        let back = if back == 0 { 7 } else { back };
        self.reference - Days::new(u64::from(back))
    }

    fn diary_week(&self, n: u32) -> DateRange {
        DateRange::starting(self.diary_start + Days::new(7 * u64::from(n - 1)), 7)
    }

    pub(crate) fn parse(&self, text: &str, tokens: &[Token], connectors: &[String]) -> TimeParse {
        struct Found {
            range: DateRange,
            first: usize,
            last: usize,
        }
        let mut found: Vec<Found> = Vec::new();
        let mut diagnostic = None;
        let mut i = 0;
        while i < tokens.len() {
            match self.attempt(tokens, i) {
                Attempt::Range(range, len) => {
                    found.push(Found { range, first: i, last: i + len - 1 });
                    i += len;
                }
                Attempt::Malformed(raw, len) => {
                    diagnostic.get_or_insert_with(|| format!("`{raw}` is not a valid calendar date"));
                    i += len;
                }
                Attempt::Nothing => i += 1,
            }
        }
        let span = |a: &Found, b: &Found| text[tokens[a.first].start..tokens[b.last].end].to_string();
        let expression = match found.as_slice() {
            [] => None,
            [a, b, ..]
                if a.range != b.range && tokens[a.last + 1..b.first].iter().any(|t| connectors.contains(&t.text)) =>
            {
                Some(TemporalExpression { raw: span(a, b), resolved: ResolvedTime::Pair(a.range, b.range) })
            }
            [a, ..] => Some(TemporalExpression { raw: span(a, a), resolved: ResolvedTime::Single(a.range) }),
        };
        TimeParse { expression, diagnostic }
    }
}
