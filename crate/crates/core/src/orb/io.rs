//! Text format for pattern sets.
//!
//! ```text
//! ORBSET v1 n=4 T=3 gamma=linear order=hamming-lex
//! -
//! 1
//! 2
//! ```
//!
//! One pattern per line as 1-based rank indices separated by spaces; `-`
//! is the all-zero pattern.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{AbstractPatternSet, Gamma};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "v1";
/// Tie order used by the built-in generator.
pub const ORDER_NAME: &str = "hamming-lex";

pub fn save_pattern_set(set: &AbstractPatternSet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_set(set, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_set(set: &AbstractPatternSet, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        w,
        "ORBSET {FORMAT_VERSION} n={} T={} gamma={} order={ORDER_NAME}",
        set.n(),
        set.len(),
        set.gamma()
    )?;
    let mut line = String::new();
    for t in 0..set.len() {
        line.clear();
        let p = set.pattern(t);
        if p.is_empty() {
            line.push('-');
        }
        for (i, j) in p.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&(j + 1).to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn load_pattern_set(path: &Path) -> Result<AbstractPatternSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_set(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub(crate) fn read_set(reader: impl BufRead) -> Result<AbstractPatternSet> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::PatternSet("empty file".into()))?
        .map_err(|e| Error::io("<pattern set>", e))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("ORBSET") {
        return Err(Error::PatternSet("missing ORBSET header".into()));
    }
    let version = tokens.next().unwrap_or("");
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION.into(),
            found: version.into(),
        });
    }
    let (mut n, mut t, mut gamma) = (None, None, None);
    for token in tokens {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| Error::PatternSet(format!("bad header field '{token}'")))?;
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::PatternSet(format!("bad header value '{token}'")))
        };
        match key {
            "n" => n = Some(number()?),
            "T" => t = Some(number()?),
            "gamma" => gamma = Some(value.parse::<Gamma>()?),
            // Informational.
            "order" => {}
            _ => return Err(Error::PatternSet(format!("unknown header field '{key}'"))),
        }
    }
    let (Some(n), Some(t), Some(gamma)) = (n, t, gamma) else {
        return Err(Error::PatternSet("header needs n, T and gamma".into()));
    };
    if n > u16::MAX as usize {
        return Err(Error::PatternSet(format!("length {n} is too large")));
    }

    let mut offsets = Vec::with_capacity(t + 1);
    offsets.push(0u32);
    let mut indices = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::io("<pattern set>", e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if offsets.len() > t {
            return Err(Error::PatternSet(format!("more than T={t} patterns")));
        }
        if line != "-" {
            for v in line.split_whitespace() {
                let j: usize = v
                    .parse()
                    .map_err(|_| Error::PatternSet(format!("bad rank index '{v}'")))?;
                if j == 0 || j > n {
                    return Err(Error::PatternSet(format!("rank index {j} outside 1..={n}")));
                }
                indices.push((j - 1) as u16);
            }
        }
        offsets.push(indices.len() as u32);
    }
    if offsets.len() != t + 1 {
        return Err(Error::PatternSet(format!(
            "truncated: expected {t} patterns, found {}",
            offsets.len() - 1
        )));
    }
    AbstractPatternSet::from_parts(n, gamma, offsets, indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orb::generate_pattern_set;

    fn text(set: &AbstractPatternSet) -> String {
        let mut buf = Vec::new();
        write_set(set, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn format_of_small_set() {
        let set = generate_pattern_set(4, 5, Gamma::Linear).unwrap();
        assert_eq!(
            text(&set),
            "ORBSET v1 n=4 T=5 gamma=linear order=hamming-lex\n-\n1\n2\n3\n1 2\n"
        );
    }

    #[test]
    fn round_trip_through_file() {
        let set = generate_pattern_set(4, 6, Gamma::Linear).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("orb.pat");
        save_pattern_set(&set, &path).unwrap();
        let back = load_pattern_set(&path).unwrap();
        assert_eq!(back.len(), set.len());
        for t in 0..set.len() {
            assert_eq!(back.pattern(t), set.pattern(t));
        }
        assert_eq!(back.gamma(), set.gamma());
    }

    #[test]
    fn version_and_truncation_errors() {
        let bad = "ORBSET v2 n=4 T=1 gamma=linear\n-\n";
        assert!(matches!(
            read_set(bad.as_bytes()),
            Err(Error::VersionMismatch { .. })
        ));
        let short = "ORBSET v1 n=4 T=3 gamma=linear\n-\n1\n";
        assert!(matches!(read_set(short.as_bytes()), Err(Error::PatternSet(_))));
        let range = "ORBSET v1 n=4 T=2 gamma=linear\n-\n5\n";
        assert!(read_set(range.as_bytes()).is_err());
    }

    #[test]
    fn out_of_order_file_rejected() {
        let text = "ORBSET v1 n=4 T=3 gamma=linear\n-\n2\n1\n";
        assert!(read_set(text.as_bytes()).is_err());
    }
}
