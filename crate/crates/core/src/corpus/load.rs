use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{CitationGraph, LoadStats, PubTime};
use crate::error::{Error, Result};

/// One metadata line: `paper_id<TAB>year_or_date[<TAB>author;author...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    pub id: String,
    pub time: PubTime,
    pub authors: Option<Vec<String>>,
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(idx, line)| match line {
            Err(e) => Some(Err(Error::from(e))),
            Ok(l) => {
                let trimmed = l.trim_end_matches(['\r', '\n']);
                if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((idx + 1, trimmed.to_string())))
                }
            }
        })
}

fn parse_time(raw: &str, line: usize) -> Result<PubTime> {
    let raw = raw.trim();
    if let Ok(year) = raw.parse::<i32>() {
        return Ok(PubTime::from_year(year));
    }
    chrono::NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .map(PubTime::from_date)
        .map_err(|_| Error::MalformedRecord {
            line,
            reason: format!("unparseable publication time `{raw}`"),
        })
}

pub fn parse_metadata<R: BufRead>(reader: R) -> Result<Vec<PaperRecord>> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        let id = fields.next().unwrap_or("").trim();
        let time = fields.next().ok_or_else(|| Error::MalformedRecord {
            line,
            reason: "expected `paper_id<TAB>time`".into(),
        })?;
        if id.is_empty() {
            return Err(Error::MalformedRecord {
                line,
                reason: "empty paper id".into(),
            });
        }
        let authors = fields.next().map(|a| {
            a.split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect()
        });
        if fields.next().is_some() {
            return Err(Error::MalformedRecord {
                line,
                reason: "too many fields".into(),
            });
        }
        out.push(PaperRecord {
            id: id.to_string(),
            time: parse_time(time, line)?,
            authors,
        });
    }
    Ok(out)
}

pub fn parse_edges<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                out.push((a.trim().to_string(), b.trim().to_string()))
            }
            _ => {
                return Err(Error::MalformedRecord {
                    line,
                    reason: "expected `citing_id<TAB>cited_id`".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Reads an edge stream and a metadata stream into a temporally ordered
/// graph.
pub fn load_graph<E: BufRead, M: BufRead>(edges: E, meta: M) -> Result<(CitationGraph, LoadStats)> {
    let records = parse_metadata(meta)?;
    let raw_edges = parse_edges(edges)?;

    let mut index: HashMap<&str, usize> = HashMap::with_capacity(records.len());
    for (k, r) in records.iter().enumerate() {
        if index.insert(r.id.as_str(), k).is_some() {
            return Err(Error::DuplicatePaper(r.id.clone()));
        }
    }
    let mut pairs = Vec::with_capacity(raw_edges.len());
    for (citing, cited) in &raw_edges {
        let j = *index
            .get(citing.as_str())
            .ok_or_else(|| Error::MissingMetadata(citing.clone()))?;
        let i = *index
            .get(cited.as_str())
            .ok_or_else(|| Error::MissingMetadata(cited.clone()))?;
        pairs.push((j, i));
    }

    let has_authors = records.iter().any(|r| r.authors.is_some());
    let authors = has_authors.then(|| {
        records
            .iter()
            .map(|r| r.authors.clone().unwrap_or_default())
            .collect()
    });
    let ids = records.iter().map(|r| r.id.clone()).collect();
    let times = records.iter().map(|r| r.time).collect();
    CitationGraph::assemble(ids, times, authors, &pairs)
}

/// Writes `g` in the format read by [`load_graph`]: one
/// `citing<TAB>cited` line per edge and one `id<TAB>time[<TAB>authors]`
/// line per paper.
pub fn write_graph<E: Write, M: Write>(g: &CitationGraph, mut edges: E, mut meta: M) -> Result<()> {
    let epoch = chrono::NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
    for p in 0..g.paper_count() {
        let t = g.time(p);
        let time = if t.exact {
            (epoch + chrono::Duration::days(t.day)).format("%Y-%m-%d").to_string()
        } else {
            t.year.to_string()
        };
        write!(meta, "{}\t{time}", g.id(p))?;
        if let Some(auth) = g.authors() {
            let names: Vec<&str> = auth.authors_of(p).iter().map(|&k| auth.author_name(k as usize)).collect();
            write!(meta, "\t{}", names.join(";"))?;
        }
        writeln!(meta)?;
    }
    for (j, i) in g.edges() {
        writeln!(edges, "{}\t{}", g.id(j), g.id(i))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const META: &str = "# id\tyear\n1\t2000\n2\t2001\n3\t2002\n4\t2003\n";
    const EDGES: &str = "2\t1\n3\t1\n3\t2\n4\t3\n";

    #[test]
    fn loads_toy_corpus() {
        let (g, stats) = load_graph(EDGES.as_bytes(), META.as_bytes()).unwrap();
        assert_eq!(g.paper_count(), 4);
        assert_eq!(stats.edges_kept, 4);
        assert!(g.authors().is_none());
        let out: Vec<usize> = (0..4).map(|p| g.out_degree(p)).collect();
        assert_eq!(out, vec![0, 1, 2, 1]);
    }

    #[test]
    fn impossible_edge_counted() {
        let meta = "1\t2000\n2\t2001\n3\t2002\n";
        let (g, stats) = load_graph("1\t3\n".as_bytes(), meta.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(stats.impossible_dropped, 1);
    }

    #[test]
    fn missing_metadata() {
        let err = load_graph("5\t1\n".as_bytes(), META.as_bytes()).unwrap_err();
        assert_eq!(err, Error::MissingMetadata("5".into()));
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err = load_graph("2\t1\nbogus\n".as_bytes(), META.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }));
        let err = parse_metadata("1\tnineteen\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 1, .. }));
    }

    #[test]
    fn dates_and_authors() {
        let meta = "a\t2001-05-02\tx;y\nb\t2001-01-10\n";
        let recs = parse_metadata(meta.as_bytes()).unwrap();
        assert_eq!(recs[0].time.year, 2001);
        assert!(recs[0].time.exact);
        assert_eq!(recs[0].authors.as_deref(), Some(&["x".to_string(), "y".to_string()][..]));
        let (g, _) = load_graph("a\tb\n".as_bytes(), meta.as_bytes()).unwrap();
        assert_eq!(g.ids(), &["b", "a"]);
        let auth = g.authors().unwrap();
        assert!(auth.authors_of(0).is_empty());
        assert_eq!(auth.authors_of(1).len(), 2);
    }

    #[test]
    fn write_then_load() {
        let meta = "a\t2001-05-02\tx;y\nb\t2001-01-10\tz\nc\t2003\t\n";
        let (g, _) = load_graph("a\tb\nc\ta\nc\tb\n".as_bytes(), meta.as_bytes()).unwrap();
        let (mut e, mut m) = (Vec::new(), Vec::new());
        write_graph(&g, &mut e, &mut m).unwrap();
        let (h, _) = load_graph(&e[..], &m[..]).unwrap();
        assert_eq!(g.ids(), h.ids());
        assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
        for p in 0..3 {
            assert_eq!(g.time(p), h.time(p));
            assert_eq!(g.authors().unwrap().authors_of(p).len(), h.authors().unwrap().authors_of(p).len());
        }
    }

    #[test]
    fn duplicate_metadata_rejected() {
        let err = parse_metadata("1\t2000\n1\t2001\n".as_bytes())
            .and_then(|_| load_graph("".as_bytes(), "1\t2000\n1\t2001\n".as_bytes()).map(|_| ()))
            .unwrap_err();
        assert_eq!(err, Error::DuplicatePaper("1".into()));
    }
}
