use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::harness::ExperimentTable;

/// Per-`(variant, n)` statistics over the successful runs' step counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub variant: String,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub success_rate: f64,
    #[serde(skip)]
    pub runs: usize,
    #[serde(skip)]
    pub successes: usize,
}

impl GroupSummary {
    /// At least one run in the group failed.
    pub fn flagged(&self) -> bool {
        self.success_rate < 1.0
    }

    fn from_samples(variant: &str, n: usize, runs: usize, mut samples: Vec<f64>) -> Self {
        let k = samples.len();
        samples.sort_by(f64::total_cmp);
        let (mean, median, std, half) = match k {
            0 => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            1 => (samples[0], samples[0], 0.0, 0.0),
            _ => {
                let mean = samples.iter().sum::<f64>() / k as f64;
                let median = if k % 2 == 1 {
                    samples[k / 2]
                } else {
                    (samples[k / 2 - 1] + samples[k / 2]) / 2.0
                };
                let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
                let std = var.sqrt();
                let t = StudentsT::new(0.0, 1.0, (k - 1) as f64)
                    .expect("positive degrees of freedom")
                    .inverse_cdf(0.975);
                (mean, median, std, t * std / (k as f64).sqrt())
            }
        };
        GroupSummary {
            variant: variant.to_string(),
            n,
            mean,
            median,
            std,
            ci_lo: mean - half,
            ci_hi: mean + half,
            success_rate: if runs == 0 {
                0.0
            } else {
                k as f64 / runs as f64
            },
            runs,
            successes: k,
        }
    }
}

/// Groups rows by `(variant, n)` in first-appearance order.
pub fn summarize(table: &ExperimentTable) -> Result<Vec<GroupSummary>> {
    if table.rows.is_empty() {
        return Err(Error::param("cannot summarize an empty table"));
    }
    let mut groups: Vec<(String, usize, usize, Vec<f64>)> = Vec::new();
    for row in &table.rows {
        let idx = match groups
            .iter()
            .position(|(v, n, _, _)| *v == row.variant && *n == row.n)
        {
            Some(i) => i,
            None => {
                groups.push((row.variant.clone(), row.n, 0, Vec::new()));
                groups.len() - 1
            }
        };
        let g = &mut groups[idx];
        g.2 += 1;
        if let (true, Some(s)) = (row.success, row.steps) {
            g.3.push(s as f64);
        }
    }
    Ok(groups
        .into_iter()
        .map(|(v, n, runs, samples)| GroupSummary::from_samples(&v, n, runs, samples))
        .collect())
}

pub const SUMMARY_CSV_HEADER: &str = "variant,n,mean,median,std,ci_lo,ci_hi,success_rate";

pub fn write_summary_csv<W: Write>(rows: &[GroupSummary], w: W) -> io::Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(true).from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()
}

/// Reads a summary CSV, ignoring `#` comment lines.
pub fn read_summary_csv<R: Read>(r: R) -> Result<Vec<GroupSummary>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if headers != SUMMARY_CSV_HEADER {
        return Err(Error::parse(
            1,
            format!("expected header {SUMMARY_CSV_HEADER:?}, found {headers:?}"),
        ));
    }
    reader
        .deserialize()
        .map(|rec| {
            rec.map_err(|e: csv::Error| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(line, e.to_string())
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ExperimentRow;

    fn table(groups: &[(&str, usize, &[Option<u64>])]) -> ExperimentTable {
        let rows = groups
            .iter()
            .flat_map(|&(v, n, steps)| {
                steps.iter().enumerate().map(move |(i, &s)| ExperimentRow {
                    variant: v.into(),
                    n,
                    rep: i as u32,
                    steps: s,
                    success: s.is_some(),
                    wall_ms: 0.0,
                    error: None,
                })
            })
            .collect();
        ExperimentTable { rows }
    }

    #[test]
    fn identical_values() {
        let s = summarize(&table(&[("a", 4, &[Some(7), Some(7), Some(7)])])).unwrap();
        assert_eq!((s[0].mean, s[0].median, s[0].std), (7.0, 7.0, 0.0));
        assert_eq!((s[0].ci_lo, s[0].ci_hi), (7.0, 7.0));
    }

    #[test]
    fn two_values() {
        let s = summarize(&table(&[("a", 4, &[Some(2), Some(4)])])).unwrap();
        assert_eq!(s[0].mean, 3.0);
        assert_eq!(s[0].median, 3.0);
        assert!((s[0].std - 2f64.sqrt()).abs() < 1e-12);
        // t_{0.975, 1} = 12.7062...
        let half = 12.706_204_736 * 2f64.sqrt() / 2f64.sqrt();
        assert!((s[0].ci_hi - 3.0 - half).abs() < 1e-6, "{}", s[0].ci_hi);
    }

    #[test]
    fn failures_flagged_and_excluded() {
        let s = summarize(&table(&[
            ("a", 4, &[Some(2), None, Some(6)]),
            ("b", 4, &[None]),
        ]))
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].mean, 4.0);
        assert!((s[0].success_rate - 2.0 / 3.0).abs() < 1e-15);
        assert!(s[0].flagged());
        assert!(s[1].mean.is_nan());
        assert_eq!(s[1].success_rate, 0.0);
    }

    #[test]
    fn empty_table_rejected() {
        assert!(summarize(&ExperimentTable { rows: vec![] }).is_err());
    }

    #[test]
    fn csv_roundtrip_with_comments() {
        let s = summarize(&table(&[
            ("a", 4, &[Some(2), Some(5)]),
            ("a", 8, &[Some(30)]),
        ]))
        .unwrap();
        let mut buf = b"# meta\n".to_vec();
        write_summary_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("# meta\n{SUMMARY_CSV_HEADER}\n")));
        let back = read_summary_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].mean, s[0].mean);
        assert_eq!(back[1].ci_hi, s[1].ci_hi);
        assert!(read_summary_csv(&b"a,b\n1,2\n"[..]).is_err());
    }
}
