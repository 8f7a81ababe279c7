use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stimulus::{Magnitude, PRODUCTS_PER_PAGE};

pub const RESPONSES_CSV_HEADER: [&str; 8] = [
    "participant_id",
    "task",
    "variant",
    "feature",
    "outlier_positions",
    "selected_position",
    "rt_ms",
    "correct",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Price,
    Star,
    Tag,
}

impl Feature {
    pub fn name(self) -> &'static str {
        match self {
            Feature::Price => "price",
            Feature::Star => "star",
            Feature::Tag => "tag",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub position: usize,
    pub rt_ms: u64,
}

/// One participant's answer to one list: the true outliers and every item
/// they selected, with the time of each selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub participant: u64,
    pub task: Task,
    pub variant: Magnitude,
    pub feature: Feature,
    pub outlier_positions: BTreeSet<usize>,
    pub selections: Vec<Selection>,
}

impl SearchResponse {
    pub fn validate(&self) -> Result<()> {
        let in_range = |p: usize| (1..=PRODUCTS_PER_PAGE).contains(&p);
        if self.outlier_positions.is_empty() || !self.outlier_positions.iter().all(|p| in_range(*p)) {
            return Err(Error::validation("outlier_positions", "must be non-empty positions in [1, 15]"));
        }
        for s in &self.selections {
            if !in_range(s.position) {
                return Err(Error::validation("selected_position", format!("{} outside [1, 15]", s.position)));
            }
            if s.rt_ms == 0 {
                return Err(Error::validation("rt_ms", "must be positive"));
            }
        }
        Ok(())
    }

    fn is_correct(&self, s: &Selection) -> bool {
        self.outlier_positions.contains(&s.position)
    }

    /// Response times of correct selections, ascending, first selection of each outlier only.
    pub fn outlier_rts(&self) -> Vec<u64> {
        let mut seen = BTreeSet::new();
        let mut rts: Vec<u64> = Vec::new();
        let mut sel = self.selections.clone();
        sel.sort_by_key(|s| s.rt_ms);
        for s in sel {
            if self.is_correct(&s) && seen.insert(s.position) {
                rts.push(s.rt_ms);
            }
        }
        rts
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Reads the response CSV. Consecutive rows sharing participant, task,
/// variant, feature and outlier set form one response.
pub fn parse_responses_csv(text: &str) -> Result<Vec<SearchResponse>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut out: Vec<SearchResponse> = Vec::new();
    let mut header_seen = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if !header_seen {
            if rec.iter().map(str::trim).ne(RESPONSES_CSV_HEADER) {
                return Err(parse_err(line, format!("expected header `{}`", RESPONSES_CSV_HEADER.join(","))));
            }
            header_seen = true;
            continue;
        }
        if rec.len() != RESPONSES_CSV_HEADER.len() {
            return Err(parse_err(line, format!("expected 8 fields, found {}", rec.len())));
        }
        let int = |idx: usize| -> Result<u64> {
            rec[idx].trim().parse().map_err(|_| {
                parse_err(line, format!("`{}` must be an integer, found `{}`", RESPONSES_CSV_HEADER[idx], &rec[idx]))
            })
        };
        let participant = int(0)?;
        let task = match rec[1].trim() {
            "I" | "1" => Task::I,
            "II" | "2" => Task::II,
            other => return Err(parse_err(line, format!("unknown task `{other}`"))),
        };
        let variant = match rec[2].trim() {
            "typeI" => Magnitude::TypeI,
            "typeII" => Magnitude::TypeII,
            other => return Err(parse_err(line, format!("unknown variant `{other}`"))),
        };
        let feature = match rec[3].trim() {
            "price" => Feature::Price,
            "star" => Feature::Star,
            "tag" => Feature::Tag,
            other => return Err(parse_err(line, format!("unknown feature `{other}`"))),
        };
        let outliers = rec[4]
            .split(';')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<BTreeSet<_>, _>>()
            .map_err(|_| parse_err(line, format!("bad outlier_positions `{}`", &rec[4])))?;
        let selection = Selection { position: int(5)? as usize, rt_ms: int(6)? };
        let correct = match rec[7].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(parse_err(line, format!("bad correct flag `{other}`"))),
        };
        if correct != outliers.contains(&selection.position) {
            return Err(parse_err(line, "`correct` disagrees with outlier_positions"));
        }
        match out.last_mut() {
            Some(r)
                if (r.participant, r.task, r.variant, r.feature) == (participant, task, variant, feature)
                    && r.outlier_positions == outliers =>
            {
                r.selections.push(selection)
            }
            _ => out.push(SearchResponse {
                participant,
                task,
                variant,
                feature,
                outlier_positions: outliers,
                selections: vec![selection],
            }),
        }
        let last = out.last().expect("just pushed");
        last.validate().map_err(|e| parse_err(line, e.to_string()))?;
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("responses csv"));
    }
    Ok(out)
}

/// How a cell's accuracy is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyMode {
    /// Correct selections / all selections.
    #[default]
    Precision,
    /// Responses that found every outlier / all responses.
    AllFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtStats {
    pub mean_ms: Option<f64>,
    pub median_ms: Option<f64>,
    pub n: usize,
}

impl RtStats {
    fn of(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        let n = v.len();
        let median = match n {
            0 => None,
            _ if n % 2 == 1 => Some(v[n / 2] as f64),
            _ => Some((v[n / 2 - 1] + v[n / 2]) as f64 / 2.0),
        };
        Self {
            mean_ms: (n > 0).then(|| v.iter().sum::<u64>() as f64 / n as f64),
            median_ms: median,
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub variant: Magnitude,
    pub feature: Feature,
    pub responses: usize,
    /// RT of the first outlier found.
    pub first: RtStats,
    /// RT of the second outlier found.
    pub second: RtStats,
    pub accuracy: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeIncrease {
    pub feature: Feature,
    pub type_i_mean_ms: f64,
    pub type_ii_mean_ms: f64,
    /// (typeII − typeI) / typeI in percent, from first-outlier mean RTs.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub accuracy_mode: AccuracyMode,
    pub cells: Vec<SummaryCell>,
    pub relative_increase: Vec<RelativeIncrease>,
}

/// Percentage change from `base` to `value`.
pub fn relative_increase(base: f64, value: f64) -> f64 {
    (value - base) / base * 100.0
}

/// RT, accuracy and recall per (variant, feature), plus the typeII-vs-typeI
/// increase of first-outlier mean RT per feature.
pub fn search_summary(responses: &[SearchResponse], mode: AccuracyMode) -> Result<SearchSummary> {
    if responses.is_empty() {
        return Err(Error::EmptyInput("search responses"));
    }
    let mut groups: BTreeMap<(Magnitude, Feature), Vec<&SearchResponse>> = BTreeMap::new();
    for r in responses {
        r.validate()?;
        groups.entry((r.variant, r.feature)).or_default().push(r);
    }
    let cells: Vec<SummaryCell> = groups
        .into_iter()
        .map(|((variant, feature), rs)| {
            let (mut first, mut second) = (Vec::new(), Vec::new());
            let (mut selections, mut correct, mut found, mut outliers, mut complete) = (0, 0, 0, 0, 0);
            for r in &rs {
                let rts = r.outlier_rts();
                first.extend(rts.first());
                second.extend(rts.get(1));
                selections += r.selections.len();
                correct += r.selections.iter().filter(|s| r.is_correct(s)).count();
                found += rts.len();
                outliers += r.outlier_positions.len();
                complete += (rts.len() == r.outlier_positions.len()) as usize;
            }
            let accuracy = match mode {
                AccuracyMode::Precision if selections > 0 => correct as f64 / selections as f64,
                AccuracyMode::Precision => 0.0,
                AccuracyMode::AllFound => complete as f64 / rs.len() as f64,
            };
            SummaryCell {
                variant,
                feature,
                responses: rs.len(),
                first: RtStats::of(first),
                second: RtStats::of(second),
                accuracy,
                recall: found as f64 / outliers as f64,
            }
        })
        .collect();
    let mut relative = Vec::new();
    for feature in [Feature::Price, Feature::Star, Feature::Tag] {
        let mean = |v: Magnitude| {
            cells
                .iter()
                .find(|c| c.variant == v && c.feature == feature)
                .and_then(|c| c.first.mean_ms)
        };
        if let (Some(a), Some(b)) = (mean(Magnitude::TypeI), mean(Magnitude::TypeII)) {
            relative.push(RelativeIncrease {
                feature,
                type_i_mean_ms: a,
                type_ii_mean_ms: b,
                percent: relative_increase(a, b),
            });
        }
    }
    Ok(SearchSummary { accuracy_mode: mode, cells, relative_increase: relative })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn response(selections: &[(usize, u64)]) -> SearchResponse {
        SearchResponse {
            participant: 1,
            task: Task::I,
            variant: Magnitude::TypeI,
            feature: Feature::Tag,
            outlier_positions: [3, 9].into(),
            selections: selections.iter().map(|&(position, rt_ms)| Selection { position, rt_ms }).collect(),
        }
    }

    #[test]
    fn single_response_cell() {
        let s = search_summary(&[response(&[(9, 8000), (3, 4000)])], AccuracyMode::Precision).unwrap();
        let c = &s.cells[0];
        assert_eq!((c.first.mean_ms, c.second.mean_ms), (Some(4000.0), Some(8000.0)));
        assert_eq!((c.accuracy, c.recall), (1.0, 1.0));
    }

    #[test]
    fn wrong_selection_lowers_precision_only() {
        let s = search_summary(&[response(&[(3, 4000), (5, 5000)])], AccuracyMode::Precision).unwrap();
        assert_eq!((s.cells[0].accuracy, s.cells[0].recall), (0.5, 0.5));
        let s = search_summary(&[response(&[(3, 4000), (5, 5000)])], AccuracyMode::AllFound).unwrap();
        assert_eq!(s.cells[0].accuracy, 0.0);
    }

    #[test]
    fn table_one_tag_increase() {
        assert_eq!(format!("{:.2}", relative_increase(4.22, 19.84)), "370.14");
    }

    #[test]
    fn csv_parsing() {
        let text = "participant_id,task,variant,feature,outlier_positions,selected_position,rt_ms,correct\n\
                    1,I,typeI,tag,3;9,3,4000,1\n1,I,typeI,tag,3;9,9,8000,1\n2,I,typeI,tag,3;9,4,100,0\n";
        let r = parse_responses_csv(text).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].selections.len(), 2);
        let bad = text.replace("typeI,tag,3;9,4", "typeIII,tag,3;9,4");
        assert!(matches!(parse_responses_csv(&bad), Err(Error::Parse { line: 4, .. })));
        let wrong_flag = text.replace("4,100,0", "4,100,1");
        assert!(parse_responses_csv(&wrong_flag).is_err());
    }
}
