use std::collections::BTreeSet;

/// Sentence segmentation, swappable for an external segmenter.
pub trait SentenceSplitter: Send + Sync {
    fn split(&self, text: &str) -> Vec<String>;
}

/// Tokens (lowercase, without the final period) that never end a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "vs", "etc", "no", "nos", "vol", "pp", "fig", "gen",
    "col", "lt", "sgt", "capt", "cmdr", "adm", "maj", "rep", "sen", "gov", "pres", "hon", "rev", "sec", "inc", "ltd",
    "co", "corp", "bros", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sept", "sep", "oct", "nov", "dec", "approx",
    "est", "ca", "cf", "al",
];

/// Splits after `.`, `!` or `?` (plus closing quotes and brackets) when the
/// next word does not start in lowercase, unless the period closes a guarded
/// abbreviation, a dotted acronym like `U.S.`, or a middle initial.
#[derive(Debug, Clone)]
pub struct RuleSplitter {
    abbreviations: BTreeSet<String>,
}

impl Default for RuleSplitter {
    fn default() -> Self {
        RuleSplitter::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl RuleSplitter {
    pub fn with_abbreviations<'a>(abbreviations: impl IntoIterator<Item = &'a str>) -> Self {
        RuleSplitter { abbreviations: abbreviations.into_iter().map(|a| a.to_lowercase()).collect() }
    }

    fn is_guarded(&self, sentence_so_far: &str) -> bool {
        let mut words = sentence_so_far.split_whitespace().rev();
        let Some(last) = words.next() else {
            return false;
        };
        let token = last.trim_start_matches(['(', '"', '\'', '\u{201c}', '[']);
        let Some(stem) = token.strip_suffix('.') else {
            return false;
        };
        if self.abbreviations.contains(&stem.to_lowercase()) {
            return true;
        }
        // U.S. / e.g.
        if stem.contains('.') && stem.split('.').all(|p| p.chars().count() <= 2) {
            return true;
        }
        // middle initial after a capitalized word: "John F. Kennedy"
        let mut chars = stem.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if c.is_uppercase() {
                return words.next().and_then(|w| w.chars().next()).is_some_and(char::is_uppercase);
            }
        }
        false
    }
}

const CLOSERS: [char; 6] = ['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];

impl SentenceSplitter for RuleSplitter {
    fn split(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut start = 0;
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (_, c) = chars[i];
            if matches!(c, '.' | '!' | '?') {
                let mut j = i + 1;
                while j < chars.len() && (matches!(chars[j].1, '.' | '!' | '?') || CLOSERS.contains(&chars[j].1)) {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
                let at_whitespace = j == chars.len() || chars[j].1.is_whitespace();
                let next_word = chars[j..].iter().find(|(_, ch)| !ch.is_whitespace()).map(|(_, ch)| *ch);
                let lower_next = next_word.is_some_and(char::is_lowercase);
                if at_whitespace && !lower_next && !(c == '.' && self.is_guarded(&text[start..chars[i].0 + 1])) {
                    push_trimmed(&mut out, &text[start..end]);
                    start = end;
                }
                i = j;
            } else {
                i += 1;
            }
        }
        push_trimmed(&mut out, &text[start..]);
        out
    }
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(s: &str) -> Vec<String> {
        RuleSplitter::default().split(s)
    }

    #[test]
    fn terminal_punctuation() {
        assert_eq!(split("A. B? C!"), vec!["A.", "B?", "C!"]);
        assert_eq!(split(""), Vec::<String>::new());
        assert_eq!(split("No terminal"), vec!["No terminal"]);
        assert_eq!(split("Wait... What?! Yes."), vec!["Wait...", "What?!", "Yes."]);
    }

    #[test]
    fn guards() {
        assert_eq!(split("Dr. Smith spoke."), vec!["Dr. Smith spoke."]);
        assert_eq!(split("He met John F. Kennedy. Then left."), vec!["He met John F. Kennedy.", "Then left."]);
        assert_eq!(split("He moved to the U.S. in 1990."), vec!["He moved to the U.S. in 1990."]);
        assert_eq!(split("Values, e.g. three, vary. Next one."), vec!["Values, e.g. three, vary.", "Next one."]);
        assert_eq!(split("The grade was B. Then it rose."), vec!["The grade was B.", "Then it rose."]);
    }

    #[test]
    fn closing_quotes_stay_with_sentence() {
        assert_eq!(split("She said \"go.\" He went."), vec!["She said \"go.\"", "He went."]);
        assert_eq!(split("Version 2.5 shipped. Done."), vec!["Version 2.5 shipped.", "Done."]);
    }
}
