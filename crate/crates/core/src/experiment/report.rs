use std::fs;
use std::io::Write;
use std::path::Path;

use super::ExperimentError;

pub const RESULTS_HEADER: [&str; 6] = ["curriculum", "stage", "query", "mean_sat", "std_sat", "n_seeds"];
pub const TRACE_HEADER: [&str; 6] = ["seed", "curriculum", "stage", "epoch", "query", "sat"];

/// Arithmetic mean and sample standard deviation (`n − 1` denominator,
/// 0 for a single value).
pub fn aggregate_seeds(values: &[f64]) -> Result<(f64, f64), ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::Config("cannot aggregate zero seeds".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

/// Rounds to the 6 decimals written to CSV, so parse-back is exact.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub curriculum: String,
    /// 1-based.
    pub stage: usize,
    pub query: String,
    pub mean_sat: f64,
    pub std_sat: f64,
    pub n_seeds: usize,
}

/// End-of-stage query statistics over seeds, sorted by
/// (curriculum, stage, query).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// Sorts the rows and rounds statistics to 6 decimals.
    pub fn from_rows(mut rows: Vec<ReportRow>) -> Self {
        for r in &mut rows {
            r.mean_sat = round6(r.mean_sat);
            r.std_sat = round6(r.std_sat);
        }
        rows.sort_by(|a, b| (&a.curriculum, a.stage, &a.query).cmp(&(&b.curriculum, b.stage, &b.query)));
        Self { rows }
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn get(&self, curriculum: &str, stage: usize, query: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.curriculum == curriculum && r.stage == stage && r.query == query)
    }

    /// Rows of the last stage of a curriculum.
    pub fn final_rows(&self, curriculum: &str) -> Vec<&ReportRow> {
        let last = self.rows.iter().filter(|r| r.curriculum == curriculum).map(|r| r.stage).max();
        self.rows.iter().filter(|r| r.curriculum == curriculum && Some(r.stage) == last).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(RESULTS_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.curriculum.clone(),
                r.stage.to_string(),
                r.query.clone(),
                format!("{:.6}", r.mean_sat),
                format!("{:.6}", r.std_sat),
                r.n_seeds.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn from_csv(text: &str) -> Result<Self, ExperimentError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        check_header(r.headers().map_err(csv_err)?, &RESULTS_HEADER)?;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            rows.push(ReportRow {
                curriculum: rec[0].to_string(),
                stage: field(&rec, 1)?,
                query: rec[2].to_string(),
                mean_sat: field(&rec, 3)?,
                std_sat: field(&rec, 4)?,
                n_seeds: field(&rec, 5)?,
            });
        }
        Ok(Self::from_rows(rows))
    }
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceCsvRow {
    pub seed: u64,
    pub curriculum: String,
    pub stage: usize,
    pub epoch: usize,
    pub query: String,
    pub sat: f64,
}

pub fn trace_to_csv(rows: &[TraceCsvRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRACE_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.curriculum.clone(),
            r.stage.to_string(),
            r.epoch.to_string(),
            r.query.clone(),
            format!("{:.6}", r.sat),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn trace_from_csv(text: &str) -> Result<Vec<TraceCsvRow>, ExperimentError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    check_header(r.headers().map_err(csv_err)?, &TRACE_HEADER)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(TraceCsvRow {
            seed: field(&rec, 0)?,
            curriculum: rec[1].to_string(),
            stage: field(&rec, 2)?,
            epoch: field(&rec, 3)?,
            query: rec[4].to_string(),
            sat: field(&rec, 5)?,
        });
    }
    Ok(rows)
}

pub fn write_results_csv(report: &ExperimentReport, path: &Path) -> Result<(), ExperimentError> {
    write_atomic(path, report.to_csv().as_bytes())
}

pub fn write_trace_csv(rows: &[TraceCsvRow], path: &Path) -> Result<(), ExperimentError> {
    write_atomic(path, trace_to_csv(rows).as_bytes())
}

pub fn read_results_csv(path: &Path) -> Result<ExperimentReport, ExperimentError> {
    ExperimentReport::from_csv(&read(path)?)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceCsvRow>, ExperimentError> {
    trace_from_csv(&read(path)?)
}

fn read(path: &Path) -> Result<String, ExperimentError> {
    fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))
}

/// Writes to a temporary sibling, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    let name = path
        .file_name()
        .ok_or_else(|| ExperimentError::io(path, std::io::Error::other("not a file path")))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(ExperimentError::io(path, e));
    }
    Ok(())
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), ExperimentError> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(ExperimentError::Format(format!(
            "unexpected header `{}`, expected `{}`",
            found.iter().collect::<Vec<_>>().join(","),
            expected.join(",")
        )));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, ExperimentError> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ExperimentError::Format(format!("line {line}: bad value in column {}", i + 1)))
}

fn csv_err(e: csv::Error) -> ExperimentError {
    ExperimentError::Format(e.to_string())
}
