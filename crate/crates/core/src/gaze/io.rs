use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AoiMetrics, GazeSample};
use crate::error::{Error, Result};

pub const GAZE_CSV_HEADER: [&str; 5] = ["participant_id", "stimulus_id", "timestamp_ms", "x", "y"];
pub const METRICS_CSV_HEADER: [&str; 8] = [
    "participant_id",
    "stimulus_id",
    "product",
    "kind",
    "ttff_ms",
    "fixation_count",
    "time_spent_ms",
    "revisit_count",
];

/// All samples (or metrics) of one participant on one stimulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeTrace<T> {
    pub participant: u64,
    pub stimulus: u64,
    pub items: Vec<T>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Reads the header row and returns the data records with their 1-based line numbers.
fn records(text: &str, header: &[&str], what: &'static str) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for rec in reader(text).records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if !seen_header {
            let got: Vec<&str> = rec.iter().map(str::trim).collect();
            if got != header {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header `{}`", header.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, line: u64, idx: usize, name: &str) -> Result<T> {
    let raw = rec[idx].trim();
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{name}` must be an integer, found `{raw}`"),
    })
}

/// Parses a gaze CSV into per-(participant, stimulus) traces in sorted key
/// order; samples keep file order within a trace.
pub fn parse_gaze_csv(text: &str) -> Result<Vec<GazeTrace<GazeSample>>> {
    let mut traces: BTreeMap<(u64, u64), Vec<GazeSample>> = BTreeMap::new();
    for (line, rec) in records(text, &GAZE_CSV_HEADER, "gaze csv")? {
        let participant = field(&rec, line, 0, "participant_id")?;
        let stimulus = field(&rec, line, 1, "stimulus_id")?;
        let t = field(&rec, line, 2, "timestamp_ms")?;
        let x: i64 = field(&rec, line, 3, "x")?;
        let y: i64 = field(&rec, line, 4, "y")?;
        traces.entry((participant, stimulus)).or_default().push(GazeSample {
            participant,
            stimulus,
            t,
            x: x as f64,
            y: y as f64,
        });
    }
    Ok(traces
        .into_iter()
        .map(|((participant, stimulus), items)| GazeTrace { participant, stimulus, items })
        .collect())
}

pub fn metrics_to_csv(traces: &[GazeTrace<AoiMetrics>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_CSV_HEADER)?;
    for t in traces {
        for m in &t.items {
            w.write_record([
                t.participant.to_string(),
                t.stimulus.to_string(),
                m.product.to_string(),
                m.kind.name().to_string(),
                m.ttff.map_or_else(String::new, |v| v.to_string()),
                m.fixation_count.to_string(),
                m.time_spent.to_string(),
                m.revisit_count.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Inverse of [`metrics_to_csv`].
pub fn parse_metrics_csv(text: &str) -> Result<Vec<GazeTrace<AoiMetrics>>> {
    let mut traces: Vec<GazeTrace<AoiMetrics>> = Vec::new();
    for (line, rec) in records(text, &METRICS_CSV_HEADER, "metrics csv")? {
        let participant = field(&rec, line, 0, "participant_id")?;
        let stimulus = field(&rec, line, 1, "stimulus_id")?;
        let kind = rec[3].trim().parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
        let ttff = match rec[4].trim() {
            "" => None,
            _ => Some(field(&rec, line, 4, "ttff_ms")?),
        };
        let m = AoiMetrics {
            product: field(&rec, line, 2, "product")?,
            kind,
            ttff,
            fixation_count: field(&rec, line, 5, "fixation_count")?,
            time_spent: field(&rec, line, 6, "time_spent_ms")?,
            revisit_count: field(&rec, line, 7, "revisit_count")?,
        };
        match traces.last_mut() {
            Some(t) if (t.participant, t.stimulus) == (participant, stimulus) => t.items.push(m),
            _ => traces.push(GazeTrace { participant, stimulus, items: vec![m] }),
        }
    }
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimulus::AoiKind;

    #[test]
    fn groups_by_trace() {
        let text = "participant_id,stimulus_id,timestamp_ms,x,y\n2,1,0,5,5\n1,1,0,1,1\n1,1,10,2,2\n";
        let t = parse_gaze_csv(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].participant, t[0].items.len()), (1, 2));
    }

    #[test]
    fn bad_row_names_line() {
        let text = "participant_id,stimulus_id,timestamp_ms,x,y\n1,1,0,5,5\n1,1,abc,5,5\n";
        match parse_gaze_csv(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_gaze_csv(""), Err(Error::EmptyInput(_))));
        assert!(matches!(parse_gaze_csv("participant_id,stimulus_id,timestamp_ms,x,y\n"), Err(Error::EmptyInput(_))));
        assert!(parse_gaze_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn metrics_round_trip() {
        let traces = vec![GazeTrace {
            participant: 4,
            stimulus: 9,
            items: vec![
                AoiMetrics { product: 1, kind: AoiKind::Image, ttff: None, fixation_count: 0, time_spent: 0, revisit_count: 0 },
                AoiMetrics { product: 1, kind: AoiKind::Price, ttff: Some(120), fixation_count: 2, time_spent: 400, revisit_count: 1 },
            ],
        }];
        let text = metrics_to_csv(&traces).unwrap();
        assert!(text.starts_with("participant_id,stimulus_id,product,kind,ttff_ms"));
        assert_eq!(parse_metrics_csv(&text).unwrap(), traces);
    }
}
