//! Bench CSV: header `algo,n,reps,mean_ns,stddev_ns,cv`, LF line endings,
//! floats with three decimals, and an optional trailing `#` comment block
//! carrying the group id and the ranking summary.

use std::io::{self, Write};

use thiserror::Error;

use crate::algorithms::AlgorithmId;
use crate::bench::{BenchRecord, GroupId, RankingSummary};

pub const CSV_HEADER: [&str; 6] = ["algo", "n", "reps", "mean_ns", "stddev_ns", "cv"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}")]
    Header { found: Vec<String> },
    #[error("no records in input")]
    Empty,
    #[error("bad group line `{0}`")]
    Group(String),
}

pub fn write_records<W: Write>(
    mut out: W,
    records: &[BenchRecord],
    ranking: Option<&RankingSummary>,
) -> Result<(), CsvError> {
    {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        writer.write_record(CSV_HEADER)?;
        for r in records {
            writer.write_record([
                r.algo.to_string(),
                r.n.to_string(),
                r.reps.to_string(),
                format!("{:.3}", r.mean_ns),
                format!("{:.3}", r.stddev_ns),
                format!("{:.3}", r.cv),
            ])?;
        }
        writer.flush()?;
    }
    if let Some(ranking) = ranking {
        write_ranking_block(&mut out, ranking)?;
    }
    Ok(())
}

fn write_ranking_block<W: Write>(out: &mut W, ranking: &RankingSummary) -> io::Result<()> {
    if let Some(group) = ranking.group {
        writeln!(out, "# group: {group}")?;
    }
    writeln!(out, "# ranking by summed mean_ns, fastest first:")?;
    for (i, (algo, total)) in ranking.order.iter().enumerate() {
        writeln!(out, "# {}. {algo} {total:.3}", i + 1)?;
    }
    writeln!(out, "# ratio_max_min: {:.3}", ranking.ratio_max_min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCsv {
    pub group: Option<GroupId>,
    pub records: Vec<BenchRecord>,
}

impl BenchCsv {
    /// Distinct algorithms in first-seen order.
    pub fn algorithms(&self) -> Vec<AlgorithmId> {
        let mut seen = Vec::new();
        for r in &self.records {
            if !seen.contains(&r.algo) {
                seen.push(r.algo);
            }
        }
        seen
    }
}

/// Parse a bench CSV. An input with a header but no rows is an error.
pub fn read_records(text: &str) -> Result<BenchCsv, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CsvError::Header { found: header });
    }
    let records = reader.deserialize().collect::<Result<Vec<BenchRecord>, _>>()?;
    if records.is_empty() {
        return Err(CsvError::Empty);
    }

    let mut group = None;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# group:") {
            group = Some(rest.trim().parse().map_err(|_| CsvError::Group(line.to_string()))?);
        }
    }
    Ok(BenchCsv { group, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Vec<BenchRecord> {
        vec![
            BenchRecord {
                algo: AlgorithmId::Fib3,
                n: 10,
                reps: 4,
                mean_ns: 10.0,
                stddev_ns: 2.0,
                cv: 0.2,
            },
            BenchRecord {
                algo: AlgorithmId::Fib10,
                n: 10,
                reps: 4,
                mean_ns: 1234.5678,
                stddev_ns: 0.0,
                cv: 0.0,
            },
        ]
    }

    #[test]
    fn exact_format() {
        let mut buf = Vec::new();
        write_records(&mut buf, &sample(), None).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "algo,n,reps,mean_ns,stddev_ns,cv\n\
             fib3,10,4,10.000,2.000,0.200\n\
             fib10,10,4,1234.568,0.000,0.000\n"
        );
    }

    #[test]
    fn ranking_block_round_trips_group() {
        let records = sample();
        let ranking = RankingSummary::from_records(Some(GroupId::G4), &records);
        let mut buf = Vec::new();
        write_records(&mut buf, &records, Some(&ranking)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# 1. fib3 10.000\n"));
        assert!(text.ends_with("# ratio_max_min: 123.457\n"));
        let parsed = read_records(&text).unwrap();
        assert_eq!(parsed.group, Some(GroupId::G4));
        assert_eq!(parsed.records.len(), 2);
        assert_eq!(parsed.algorithms(), [AlgorithmId::Fib3, AlgorithmId::Fib10]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_records(""), Err(CsvError::Header { .. }) | Err(CsvError::Csv(_))));
        assert!(matches!(
            read_records("algo,n,reps,mean_ns,stddev_ns,cv\n"),
            Err(CsvError::Empty)
        ));
        assert!(matches!(read_records("a,b\n1,2\n"), Err(CsvError::Header { .. })));
        assert!(read_records("algo,n,reps,mean_ns,stddev_ns,cv\nfib99,1,1,1,0,0\n").is_err());
        assert!(read_records("algo,n,reps,mean_ns,stddev_ns,cv\nfib3,x,1,1,0,0\n").is_err());
    }

    proptest! {
        #[test]
        fn write_then_read_preserves_records(
            rows in prop::collection::vec((0usize..12, 0u64..20_000, 1usize..10_000, 0.0f64..1e9, 0.0f64..1e9), 1..40)
        ) {
            let records: Vec<BenchRecord> = rows
                .into_iter()
                .map(|(a, n, reps, mean, sd)| BenchRecord {
                    algo: AlgorithmId::ALL[a],
                    n,
                    reps,
                    mean_ns: mean,
                    stddev_ns: sd,
                    cv: if mean > 0.0 { sd / mean } else { 0.0 },
                })
                .collect();
            let mut buf = Vec::new();
            write_records(&mut buf, &records, None).unwrap();
            let parsed = read_records(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(parsed.records.len(), records.len());
            for (got, want) in parsed.records.iter().zip(&records) {
                prop_assert_eq!(got.algo, want.algo);
                prop_assert_eq!(got.n, want.n);
                prop_assert_eq!(got.reps, want.reps);
                prop_assert!((got.mean_ns - want.mean_ns).abs() <= 5e-4 * want.mean_ns.max(1.0));
            }
        }
    }
}
