use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered finite set of symbol labels.
///
/// Symbols are referred to by their index everywhere inside the crate; labels
/// only matter at the serialization boundary. When every label is a single
/// character, paths are written by concatenation (`"0110"`), otherwise labels
/// are separated by single spaces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must contain at least one symbol".into()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!(
                    "label {label:?} must be non-empty and contain no whitespace"
                )));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidAlphabet(format!("duplicate label {label:?}")));
            }
        }
        Ok(Alphabet { labels })
    }

    /// Alphabet `{"0", "1", ..., "size-1"}`.
    pub fn numeric(size: usize) -> Result<Self> {
        Alphabet::new((0..size).map(|i| i.to_string()))
    }

    pub fn binary() -> Self {
        Alphabet::new(["0", "1"]).expect("binary alphabet")
    }

    pub fn shared(self) -> Arc<Alphabet> {
        Arc::new(self)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn compact(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    /// Renders a symbol sequence using the label convention above.
    pub fn format(&self, symbols: &[usize]) -> String {
        if self.compact() {
            symbols.iter().map(|&s| self.labels[s].as_str()).collect()
        } else {
            symbols
                .iter()
                .map(|&s| self.labels[s].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        }
    }

    /// Parses a label string back into symbol indices.
    pub fn parse(&self, text: &str) -> Result<Vec<usize>> {
        let lookup = |tok: &str| {
            self.index_of(tok)
                .ok_or_else(|| Error::Parse(format!("unknown symbol {tok:?}")))
        };
        if self.compact() {
            let mut buf = [0u8; 4];
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.labels).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", ""]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
    }

    #[test]
    fn label_round_trip() {
        let bin = Alphabet::binary();
        assert_eq!(bin.parse("0110").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(bin.format(&[1, 0, 0]), "100");

        let words = Alphabet::new(["sun", "rain", "fog"]).unwrap();
        let s = words.parse("rain fog sun").unwrap();
        assert_eq!(s, vec![1, 2, 0]);
        assert_eq!(words.format(&s), "rain fog sun");
        assert!(words.parse("snow").is_err());
    }
}
