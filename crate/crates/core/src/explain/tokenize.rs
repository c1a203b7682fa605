use std::collections::BTreeSet;

pub const MAX_NGRAM: usize = 3;

const MONTHS: &[&str] = &[
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep",
    "sept", "oct", "nov", "dec",
];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercased tokens: maximal alphanumeric runs, keeping apostrophes that
/// sit between two alphanumeric characters.
pub fn tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if is_apostrophe(c)
            && !cur.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            cur.push('\'');
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn is_number(t: &str) -> bool {
    t.chars().all(|c| c.is_numeric())
}

/// Marks tokens that are numbers, or month names next to a number.
fn removed(toks: &[String]) -> Vec<bool> {
    let num: Vec<bool> = toks.iter().map(|t| is_number(t)).collect();
    (0..toks.len())
        .map(|i| {
            num[i]
                || (MONTHS.contains(&toks[i].as_str())
                    && ((i > 0 && num[i - 1]) || num.get(i + 1).copied().unwrap_or(false)))
        })
        .collect()
}

/// The set of 1- to 3-grams of a text. Numbers and dates are dropped and
/// no n-gram spans a dropped token.
pub fn extract_features(text: &str) -> BTreeSet<String> {
    let toks = tokens(text);
    let gone = removed(&toks);
    let mut out = BTreeSet::new();
    for start in 0..toks.len() {
        let mut gram = String::new();
        for end in start..(start + MAX_NGRAM).min(toks.len()) {
            if gone[end] {
                break;
            }
            if end > start {
                gram.push(' ');
            }
            gram.push_str(&toks[end]);
            out.insert(gram.clone());
        }
    }
    out
}
