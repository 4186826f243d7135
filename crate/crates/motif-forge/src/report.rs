//! CSV writers for every tabular output.

use std::path::Path;

use motif_forge_core::baselines::MotifTable;
use motif_forge_core::encoder::CurvePoint;
use motif_forge_core::miner::ReportRow;
use motif_forge_core::synth::GraphStats;

use crate::error::{Error, Result};
use crate::io::write_file;

pub struct Csv {
    inner: csv::Writer<Vec<u8>>,
    comments: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut inner = csv::Writer::from_writer(Vec::new());
        inner.write_record(header).expect("in-memory write");
        Csv { inner, comments: String::new() }
    }

    /// A `# ...` line placed before the header.
    pub fn with_comment(mut self, line: &str) -> Self {
        self.comments.push_str("# ");
        self.comments.push_str(line);
        self.comments.push('\n');
        self
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).expect("in-memory write");
    }

    pub fn into_string(self) -> String {
        let body = self.inner.into_inner().map_err(|e| e.to_string()).expect("in-memory flush");
        self.comments + &String::from_utf8(body).expect("UTF-8 fields")
    }

    pub fn write(self, path: &Path) -> Result<()> {
        write_file(path, self.into_string())
    }
}

/// Shortest round-trip representation, so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub fn curve_csv(rows: &[CurvePoint]) -> Csv {
    let mut csv = Csv::new(&["batch", "loss", "holdout_acc", "holdout_aupr"]);
    for r in rows {
        csv.row([r.batch.to_string(), num(r.loss), num(r.holdout_acc), num(r.holdout_aupr)]);
    }
    csv
}

pub fn mining_csv(rows: &[ReportRow]) -> Csv {
    let mut csv = Csv::new(&[
        "rank",
        "size",
        "canonical_key",
        "occurrences",
        "total_penalty",
        "exact_anchored_freq",
        "exact_graph_freq",
        "estimated_flag",
    ]);
    for r in rows {
        csv.row([
            r.rank.to_string(),
            r.size.to_string(),
            r.canonical_key.to_string(),
            r.occurrences.to_string(),
            num(r.total_penalty),
            opt(r.exact_anchored_freq.or(r.hard_estimate.map(|h| h as u64))),
            opt(r.exact_graph_freq),
            r.estimated.to_string(),
        ]);
    }
    csv
}

pub fn motif_table_csv(table: &MotifTable) -> Csv {
    let mut csv = Csv::new(&["canonical_key", "size", "count", "weight", "anchored_counts"]);
    for e in table.ranked() {
        let anchored: Vec<serde_json::Value> = e
            .anchored_counts
            .iter()
            .map(|a| serde_json::json!({"anchor": a.anchor, "orbit_size": a.orbit_size, "frequency": a.frequency}))
            .collect();
        csv.row([
            e.key.to_string(),
            table.size.to_string(),
            e.count.to_string(),
            num(e.weight),
            serde_json::to_string(&anchored).expect("serialisable"),
        ]);
    }
    csv
}

pub fn statistics_csv(stats: &[GraphStats]) -> Csv {
    let mut csv = Csv::new(&["graph_id", "density", "diameter", "avg_path", "clustering"]);
    for (i, s) in stats.iter().enumerate() {
        csv.row([i.to_string(), num(s.density), s.diameter.to_string(), num(s.avg_path), num(s.clustering)]);
    }
    csv
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.into(), source })?;
    write_file(path, text + "\n")
}
