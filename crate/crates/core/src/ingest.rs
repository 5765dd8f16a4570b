//! Corpus ingestion: tokens play the role of urns and token frequencies
//! the role of urn counts.
//!
//! The tokenizer is deliberately minimal. A token is a maximal run of
//! Unicode alphabetic characters, lowercased character by character.
//! Everything else separates tokens.

use std::collections::BTreeMap;
use std::io::Read;

use crate::law::Mode;
use crate::occupancy::OccupancyCounts;
use crate::{Error, Result};

/// Identifies the tokenization rule in provenance metadata.
pub const TOKENIZER_VERSION: &str = "letter-runs-lowercase/1";

/// Token frequencies of one corpus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusCounts {
    counts: BTreeMap<String, u64>,
    total: u64,
    /// Where the counts came from (path or description).
    pub source: Option<String>,
    /// Tokenizer version, for tokenized text.
    pub tokenizer: Option<&'static str>,
    /// Non-fatal issues found while loading (e.g. duplicate rows).
    pub warnings: Vec<String>,
}

impl CorpusCounts {
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Total number of tokens `n`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }

    fn add(&mut self, token: &str, count: u64) {
        *self.counts.entry(token.to_owned()).or_insert(0) += count;
        self.total += count;
    }

    /// Tokens by decreasing count, ties by token.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(t, &c)| (t.as_str(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Writes `token,count` rows by decreasing count.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["token", "count"])?;
        for (token, count) in self.ranked() {
            w.write_record([token, &count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lowercased letter runs of `text`, in order.
pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic()).filter(|s| !s.is_empty()).filter_map(|run| {
        let token: String = run.chars().flat_map(char::to_lowercase).filter(|c| c.is_alphabetic()).collect();
        (!token.is_empty()).then_some(token)
    })
}

/// Counts the tokens of a UTF-8 text stream.
pub fn tokenize_text<R: Read>(mut reader: R) -> Result<CorpusCounts> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Input {
        location: format!("byte {}", e.valid_up_to()),
        message: "invalid UTF-8".into(),
    })?;
    let mut corpus = CorpusCounts { tokenizer: Some(TOKENIZER_VERSION), ..Default::default() };
    for token in tokens(text) {
        corpus.add(&token, 1);
    }
    Ok(corpus)
}

/// Loads a `token,count` CSV table. Duplicate tokens are summed with a
/// warning; zero or malformed counts are errors.
pub fn load_counts<R: Read>(reader: R) -> Result<CorpusCounts> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "token" || &headers[1] != "count" {
        return Err(Error::Input { location: "line 1".into(), message: "expected header `token,count`".into() });
    }
    let mut corpus = CorpusCounts::default();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |m: String| Error::Input { location: format!("line {line}"), message: m };
        if rec.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", rec.len())));
        }
        let token = &rec[0];
        if token.is_empty() {
            return Err(bad("empty token".into()));
        }
        let count: u64 = rec[1].parse().map_err(|_| bad(format!("count `{}` is not a positive integer", &rec[1])))?;
        if count == 0 {
            return Err(bad("count must be positive".into()));
        }
        if corpus.counts.contains_key(token) {
            corpus.warnings.push(format!("line {line}: duplicate token `{token}` summed"));
        }
        corpus.add(token, count);
    }
    Ok(corpus)
}

/// Drops token identities: the most frequent token becomes urn 1, the next
/// urn 2, and so on.
pub fn to_occupancy(corpus: &CorpusCounts) -> Result<OccupancyCounts> {
    if corpus.total == 0 {
        return Err(Error::InsufficientData("corpus is empty".into()));
    }
    let counts: BTreeMap<u64, u64> =
        corpus.ranked().into_iter().enumerate().map(|(i, (_, c))| (i as u64 + 1, c)).collect();
    Ok(OccupancyCounts::new_unchecked(counts, corpus.total, None, Mode::Fixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occupancy::summarize;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        let c = tokenize_text("The cat the CAT.".as_bytes()).unwrap();
        assert_eq!(c.counts().get("the"), Some(&2));
        assert_eq!(c.counts().get("cat"), Some(&2));
        assert_eq!(c.total(), 4);
        let c = tokenize_text("".as_bytes()).unwrap();
        assert_eq!((c.total(), c.vocabulary_size()), (0, 0));
        let c = tokenize_text("a1b".as_bytes()).unwrap();
        assert_eq!(c.counts().keys().collect::<Vec<_>>(), vec!["a", "b"]);
        let c = tokenize_text("Über straße ÉTÉ".as_bytes()).unwrap();
        assert!(c.counts().contains_key("über") && c.counts().contains_key("été"));
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let err = tokenize_text(&b"abc \xff def"[..]).unwrap_err();
        match err {
            Error::Input { location, .. } => assert_eq!(location, "byte 4"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn load_examples() {
        let c = load_counts("token,count\na,3\nb,1\n".as_bytes()).unwrap();
        assert_eq!(c.total(), 4);
        let c = load_counts("token,count\na,1\na,2\n".as_bytes()).unwrap();
        assert_eq!(c.counts().get("a"), Some(&3));
        assert_eq!(c.warnings.len(), 1);
        match load_counts("token,count\na,1\nb,0\n".as_bytes()).unwrap_err() {
            Error::Input { location, .. } => assert_eq!(location, "line 3"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_counts("token,count\na,x\n".as_bytes()).is_err());
        assert!(load_counts("token,count\na,1,2\n".as_bytes()).is_err());
        assert!(load_counts("word,n\na,1\n".as_bytes()).is_err());
    }

    #[test]
    fn occupancy_ranks_by_count() {
        let c = load_counts("token,count\nb,1\na,5\nc,2\n".as_bytes()).unwrap();
        let occ = to_occupancy(&c).unwrap();
        assert_eq!(occ.counts().iter().map(|(&k, &v)| (k, v)).collect::<Vec<_>>(), vec![(1, 5), (2, 2), (3, 1)]);
        assert_eq!(occ.balls(), 8);
        assert!(matches!(to_occupancy(&CorpusCounts::default()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn csv_round_trip() {
        let c = tokenize_text("x y y z z z".as_bytes()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "token,count\nz,3\ny,2\nx,1\n");
        let back = load_counts(buf.as_slice()).unwrap();
        assert_eq!(back.counts(), c.counts());
    }

    proptest! {
        #[test]
        fn tokenizer_idempotent(text in "\\PC{0,200}") {
            let once: Vec<String> = tokens(&text).collect();
            let joined = once.join(" ");
            let twice: Vec<String> = tokens(&joined).collect();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn identity_erasure_keeps_profile(words in prop::collection::vec("[a-e]{1,3}", 1..200)) {
            let text = words.join(" ");
            let corpus = tokenize_text(text.as_bytes()).unwrap();
            let occ = to_occupancy(&corpus).unwrap();
            let mut by_token: BTreeMap<u64, u64> = BTreeMap::new();
            for &c in corpus.counts().values() {
                *by_token.entry(c).or_default() += 1;
            }
            let mut by_urn: BTreeMap<u64, u64> = BTreeMap::new();
            for &c in occ.counts().values() {
                *by_urn.entry(c).or_default() += 1;
            }
            prop_assert_eq!(by_token, by_urn);
            let s = summarize(&occ, 8).unwrap();
            prop_assert_eq!(s.n, words.len() as u64);
        }
    }
}
