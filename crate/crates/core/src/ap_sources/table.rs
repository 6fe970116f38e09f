use std::collections::BTreeMap;
use std::path::Path;

use super::SourceError;
use crate::arith::is_prime;

/// Externally computed `p -> a_p` values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApTable {
    values: BTreeMap<u64, i128>,
}

impl ApTable {
    pub fn get(&self, p: u64) -> Option<i128> {
        self.values.get(&p).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i128)> + '_ {
        self.values.iter().map(|(&p, &a)| (p, a))
    }
}

/// Parses lines `p<TAB>a_p`; blank lines and `#` comments are ignored.
/// Any run of whitespace is accepted as the separator.
pub fn parse_ap_table(text: &str) -> Result<ApTable, SourceError> {
    let mut values = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = || -> Option<(u64, i128)> {
            let mut it = line.split_whitespace();
            let p = it.next()?.parse().ok()?;
            let a = it.next()?.parse().ok()?;
            it.next().is_none().then_some((p, a))
        };
        let (p, a) = parse().ok_or_else(|| SourceError::Parse {
            line: line_no,
            content: raw.to_string(),
        })?;
        if !is_prime(p) {
            return Err(SourceError::NotPrime { line: line_no, p });
        }
        if values.insert(p, a).is_some() {
            return Err(SourceError::DuplicatePrime { line: line_no, p });
        }
    }
    Ok(ApTable { values })
}

pub fn load_ap_table(path: impl AsRef<Path>) -> Result<ApTable, SourceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SourceError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_ap_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs() {
        let t = parse_ap_table("11\t1\n13\t4\n").unwrap();
        assert_eq!(t.get(11), Some(1));
        assert_eq!(t.get(13), Some(4));
        assert_eq!(t.get(17), None);
        assert_eq!(t.len(), 2);
        let t = parse_ap_table("# header\n\n5 -2   # comment\n").unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![(5, -2)]);
        assert!(parse_ap_table("").unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(
            parse_ap_table("10\t3\n"),
            Err(SourceError::NotPrime { line: 1, p: 10 })
        );
        assert_eq!(
            parse_ap_table("5\t1\n5\t1\n"),
            Err(SourceError::DuplicatePrime { line: 2, p: 5 })
        );
        assert!(matches!(
            parse_ap_table("5\t1\nfoo\n"),
            Err(SourceError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_ap_table("5\t1\t2\n"),
            Err(SourceError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_ap_table("/nonexistent/table.tsv"),
            Err(SourceError::Io { .. })
        ));
    }
}
