//! `report`: merges detection, metrics or response files into one JSON
//! envelope plus plain-text tables, optionally running statistical tests.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use serde::Serialize;

use listgaze::gaze::{
    aggregate_metrics, parse_metrics_csv, AggregateCell, AoiMetrics, Grouping, Metric, NeighborGrouping,
    METRICS_CSV_HEADER,
};
use listgaze::scoring::DetectionRow;
use listgaze::stats::{
    kruskal_wallis, one_way_anova, parse_responses_csv, pearson_test, search_summary, Df, Feature, SearchResponse,
    SearchSummary, TestResult, RESPONSES_CSV_HEADER,
};
use listgaze::stimulus::{AoiKind, Magnitude};

use crate::commands::{grouping_name, Ctx};
use crate::manifest::{read_input, OutDir, TOOL, VERSION};
use crate::{usage, ReportArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum InputKind {
    Detection,
    Metrics,
    Responses,
}

enum Parsed {
    Detection(Vec<DetectionRow>),
    Metrics(Vec<Vec<AoiMetrics>>),
    Responses(Vec<SearchResponse>),
}

impl Parsed {
    fn kind(&self) -> InputKind {
        match self {
            Parsed::Detection(_) => InputKind::Detection,
            Parsed::Metrics(_) => InputKind::Metrics,
            Parsed::Responses(_) => InputKind::Responses,
        }
    }
}

fn first_line(text: &str) -> String {
    text.lines().next().unwrap_or("").split(',').map(str::trim).collect::<Vec<_>>().join(",")
}

/// Detects the input schema from content: a JSON array of detection rows, or
/// a CSV whose header names metrics or search responses.
fn parse_input(text: &str) -> Result<Parsed> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let rows: Vec<DetectionRow> = serde_json::from_str(trimmed).map_err(listgaze::Error::from)?;
        return Ok(Parsed::Detection(rows));
    }
    let header = first_line(text);
    if header == METRICS_CSV_HEADER.join(",") {
        let traces = parse_metrics_csv(text)?;
        return Ok(Parsed::Metrics(traces.into_iter().map(|t| t.items).collect()));
    }
    if header == RESPONSES_CSV_HEADER.join(",") {
        return Ok(Parsed::Responses(parse_responses_csv(text)?));
    }
    Err(usage("unrecognized input: expected detection JSON, metrics CSV or responses CSV"))
}

/// One requested test. `result` is absent when the data cannot support it.
#[derive(Debug, Serialize)]
struct TestOutcome {
    test: &'static str,
    subject: String,
    groups: Vec<String>,
    sizes: Vec<usize>,
    result: Option<TestResult>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    kind: InputKind,
    inputs: &'a [String],
    data: T,
    tests: Vec<TestOutcome>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct MetricsData {
    traces: usize,
    aggregates: Vec<MetricsTable>,
}

#[derive(Serialize)]
struct MetricsTable {
    grouping: Grouping,
    cells: Vec<AggregateCell>,
}

pub fn cmd_report(ctx: &Ctx, args: &ReportArgs) -> Result<()> {
    let mut manifest = ctx.manifest("report");
    let mut names = Vec::new();
    let mut parsed = Vec::new();
    for path in &args.inputs {
        let (bytes, name) = read_input(path)?;
        let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
        parsed.push(parse_input(text).with_context(|| format!("reading {}", path.display()))?);
        manifest.input(name.clone(), &bytes);
        names.push(name);
    }
    let kind = parsed[0].kind();
    if let Some((i, p)) = parsed.iter().enumerate().find(|(_, p)| p.kind() != kind) {
        return Err(usage(format!(
            "cannot merge {:?} input {} with {:?} input {}",
            p.kind(),
            names[i],
            kind,
            names[0]
        )));
    }
    manifest.params = serde_json::json!({
        "kw": args.kw,
        "anova": args.anova,
        "pearson": args.pearson,
        "outlier_pos": args.outlier_pos,
        "metric": Metric::from(args.metric),
        "accuracy": listgaze::stats::AccuracyMode::from(args.accuracy),
    });

    let (json, text) = match kind {
        InputKind::Detection => {
            let rows: Vec<DetectionRow> = parsed
                .into_iter()
                .flat_map(|p| match p {
                    Parsed::Detection(r) => r,
                    _ => unreachable!("kinds checked above"),
                })
                .collect();
            let mut notes = Vec::new();
            if args.kw || args.anova || args.pearson {
                notes.push("statistical tests do not apply to detection reports".to_string());
            }
            let text = detection_text(&rows);
            (envelope(kind, &names, rows, Vec::new(), notes)?, text)
        }
        InputKind::Metrics => {
            let per_participant: Vec<Vec<AoiMetrics>> = parsed
                .into_iter()
                .flat_map(|p| match p {
                    Parsed::Metrics(m) => m,
                    _ => unreachable!("kinds checked above"),
                })
                .collect();
            metrics_report(args, &names, &per_participant)?
        }
        InputKind::Responses => {
            let responses: Vec<SearchResponse> = parsed
                .into_iter()
                .flat_map(|p| match p {
                    Parsed::Responses(r) => r,
                    _ => unreachable!("kinds checked above"),
                })
                .collect();
            responses_report(args, &names, &responses)?
        }
    };

    let mut dir = OutDir::create(&ctx.out, manifest)?;
    dir.write("report.json", json.as_bytes())?;
    dir.write("report.txt", text.as_bytes())?;
    dir.finish()?;
    Ok(())
}

fn envelope<T: Serialize>(
    kind: InputKind,
    inputs: &[String],
    data: T,
    tests: Vec<TestOutcome>,
    notes: Vec<String>,
) -> Result<String> {
    let env = Envelope { tool: TOOL, version: VERSION, kind, inputs, data, tests, notes };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

fn run_group_tests(args: &ReportArgs, subject: &str, labels: Vec<String>, groups: Vec<Vec<f64>>) -> Vec<TestOutcome> {
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let mut out = Vec::new();
    let mut push = |test: &'static str, r: listgaze::Result<TestResult>| {
        let (result, error) = match r {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(TestOutcome { test, subject: subject.to_string(), groups: labels.clone(), sizes: sizes.clone(), result, error });
    };
    if args.kw {
        push("kruskal-wallis", kruskal_wallis(&groups));
    }
    if args.anova {
        push("one-way anova", one_way_anova(&groups));
    }
    out
}

fn metric_value(metric: Metric, m: &AoiMetrics) -> Option<f64> {
    match metric {
        Metric::Ttff => m.ttff.map(|v| v as f64),
        Metric::FixationCount => Some(m.fixation_count as f64),
        Metric::TimeSpent => Some(m.time_spent as f64),
        Metric::RevisitCount => Some(m.revisit_count as f64),
    }
}

fn metrics_report(args: &ReportArgs, names: &[String], per_participant: &[Vec<AoiMetrics>]) -> Result<(String, String)> {
    let products = per_participant.first().map_or(0, |p| p.iter().map(|m| m.product).max().unwrap_or(0));
    let neighborhood = match args.outlier_pos {
        Some(outlier) => Some(Grouping::Neighborhood {
            outlier,
            distant: args.distant.into(),
            kind: args.kind.map(Into::into),
        }),
        None => None,
    };
    let mut groupings = vec![Grouping::Kind, Grouping::Position];
    groupings.extend(neighborhood);
    let aggregates: Vec<MetricsTable> = groupings
        .iter()
        .map(|g| Ok(MetricsTable { grouping: *g, cells: aggregate_metrics(per_participant, g)? }))
        .collect::<Result<_>>()?;

    let metric: Metric = args.metric.into();
    let observations = || per_participant.iter().flatten();
    let mut tests = Vec::new();
    if args.kw || args.anova {
        let (labels, groups): (Vec<String>, Vec<Vec<f64>>) = match args.outlier_pos {
            Some(outlier) => {
                let g = NeighborGrouping::new(outlier, args.distant.into(), products)?;
                let kind: Option<AoiKind> = args.kind.map(Into::into);
                let side = |set: &[usize]| -> Vec<f64> {
                    observations()
                        .filter(|m| set.contains(&m.product) && kind.is_none_or(|k| k == m.kind))
                        .filter_map(|m| metric_value(metric, m))
                        .collect()
                };
                (vec!["near".into(), "distant".into()], vec![side(&g.near), side(&g.distant)])
            }
            None => AoiKind::ALL
                .iter()
                .map(|k| {
                    let v = observations().filter(|m| m.kind == *k).filter_map(|m| metric_value(metric, m)).collect();
                    (k.name().to_string(), v)
                })
                .unzip(),
        };
        let by = if args.outlier_pos.is_some() { "neighborhood" } else { "kind" };
        tests.extend(run_group_tests(args, &format!("{} by {by}", metric.name()), labels, groups));
    }
    if args.pearson {
        for (i, a) in Metric::ALL.iter().enumerate() {
            for b in &Metric::ALL[i + 1..] {
                let (x, y): (Vec<f64>, Vec<f64>) = observations()
                    .filter_map(|m| Some((metric_value(*a, m)?, metric_value(*b, m)?)))
                    .unzip();
                let (result, error) = match pearson_test(&x, &y) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                tests.push(TestOutcome {
                    test: "pearson",
                    subject: format!("{} vs {}", a.name(), b.name()),
                    groups: Vec::new(),
                    sizes: vec![x.len()],
                    result,
                    error,
                });
            }
        }
    }

    let text = metrics_text(per_participant.len(), &aggregates, &tests);
    let data = MetricsData { traces: per_participant.len(), aggregates };
    Ok((envelope(InputKind::Metrics, names, data, tests, Vec::new())?, text))
}

fn responses_report(args: &ReportArgs, names: &[String], responses: &[SearchResponse]) -> Result<(String, String)> {
    let summary = search_summary(responses, args.accuracy.into())?;
    let mut tests = Vec::new();
    let mut notes = Vec::new();
    if args.kw || args.anova {
        // first-outlier response times compared across features, per variant
        for variant in [Magnitude::TypeI, Magnitude::TypeII] {
            let mut labels = Vec::new();
            let mut groups = Vec::new();
            for feature in [Feature::Price, Feature::Star, Feature::Tag] {
                let rts: Vec<f64> = responses
                    .iter()
                    .filter(|r| r.variant == variant && r.feature == feature)
                    .filter_map(|r| r.outlier_rts().first().map(|v| *v as f64))
                    .collect();
                if !rts.is_empty() {
                    labels.push(feature.name().to_string());
                    groups.push(rts);
                }
            }
            if !groups.is_empty() {
                tests.extend(run_group_tests(args, &format!("first-outlier rt_ms by feature, {}", variant.name()), labels, groups));
            }
        }
    }
    if args.pearson {
        notes.push("pearson correlation does not apply to search responses".to_string());
    }
    let text = responses_text(&summary, &tests);
    Ok((envelope(InputKind::Responses, names, summary, tests, notes)?, text))
}

fn opt(v: Option<f64>, scale: f64, decimals: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.*}", decimals, v / scale))
}

fn tests_text(out: &mut String, tests: &[TestOutcome]) {
    if tests.is_empty() {
        return;
    }
    out.push_str("\nTests\n");
    for t in tests {
        let groups = if t.groups.is_empty() {
            String::new()
        } else {
            let g: Vec<String> = t.groups.iter().zip(&t.sizes).map(|(g, n)| format!("{g} n={n}")).collect();
            format!(" [{}]", g.join(", "))
        };
        match (&t.result, &t.error) {
            (Some(r), _) => {
                let df = match r.df {
                    Df::One(d) => format!("{d}"),
                    Df::Pair(a, b) => format!("{a}, {b}"),
                };
                let stat = match t.test {
                    "kruskal-wallis" => "H",
                    "one-way anova" => "F",
                    _ => "r",
                };
                let _ = writeln!(
                    out,
                    "{} {}{groups}: {stat} = {:.4}, df = {df}, p = {:.4e}",
                    t.test, t.subject, r.statistic, r.p_value
                );
            }
            (None, e) => {
                let _ = writeln!(out, "{} {}{groups}: not computed ({})", t.test, t.subject, e.as_deref().unwrap_or(""));
            }
        }
    }
}

fn detection_text(rows: &[DetectionRow]) -> String {
    let mut out = String::from("Outlier detection (hit@k)\n");
    let _ = writeln!(out, "{:<6} {:<14} {:>8} {:>3} {:>10} {:>8}", "model", "feature", "position", "k", "hits/total", "hit_rate");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<6} {:<14} {:>8} {:>3} {:>10} {:>8.3}",
            r.model.name(),
            r.feature.name(),
            r.position,
            r.k,
            format!("{}/{}", r.hits, r.total),
            r.hit_rate
        );
    }
    out
}

fn cell<'a>(cells: &'a [AggregateCell], group: &str, metric: Metric) -> Option<&'a AggregateCell> {
    cells.iter().find(|c| c.group == group && c.metric == metric)
}

fn metrics_table(out: &mut String, title: &str, cells: &[AggregateCell]) {
    let mut groups: Vec<&str> = Vec::new();
    for c in cells {
        if !groups.contains(&c.group.as_str()) {
            groups.push(&c.group);
        }
    }
    let _ = writeln!(out, "\n{title}");
    let _ = writeln!(
        out,
        "{:<12} {:>10} {:>10} {:>7} {:>10} {:>14} {:>9}",
        "group", "ttff_s", "ttff_med_s", "ttff_n", "fixations", "time_spent_ms", "revisits"
    );
    for g in groups {
        let mean = |m| cell(cells, g, m).and_then(|c| c.mean);
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>10} {:>7} {:>10} {:>14} {:>9}",
            g,
            opt(mean(Metric::Ttff), 1000.0, 2),
            opt(cell(cells, g, Metric::Ttff).and_then(|c| c.median), 1000.0, 2),
            cell(cells, g, Metric::Ttff).map_or(0, |c| c.n),
            opt(mean(Metric::FixationCount), 1.0, 2),
            opt(mean(Metric::TimeSpent), 1.0, 0),
            opt(mean(Metric::RevisitCount), 1.0, 2),
        );
    }
}

fn metrics_text(traces: usize, tables: &[MetricsTable], tests: &[TestOutcome]) -> String {
    let mut out = format!("Engagement metrics over {traces} traces (means; ttff in seconds)\n");
    for t in tables {
        let title = match t.grouping {
            Grouping::Neighborhood { outlier, kind, .. } => match kind {
                Some(k) => format!("By neighborhood of position {outlier} ({} AOIs)", k.name()),
                None => format!("By neighborhood of position {outlier}"),
            },
            g => format!("By {}", grouping_name(&g)),
        };
        metrics_table(&mut out, &title, &t.cells);
    }
    tests_text(&mut out, tests);
    out
}

fn responses_text(summary: &SearchSummary, tests: &[TestOutcome]) -> String {
    let mode = match summary.accuracy_mode {
        listgaze::stats::AccuracyMode::Precision => "precision",
        listgaze::stats::AccuracyMode::AllFound => "all-found",
    };
    let mut out = format!("Search performance (RT in seconds; accuracy = {mode})\n");
    let _ = writeln!(
        out,
        "{:<7} {:<6} {:>4} {:>9} {:>9} {:>9} {:>9} {:>8} {:>6}",
        "variant", "feature", "n", "out1_mean", "out1_med", "out2_mean", "out2_med", "accuracy", "recall"
    );
    for c in &summary.cells {
        let _ = writeln!(
            out,
            "{:<7} {:<6} {:>4} {:>9} {:>9} {:>9} {:>9} {:>8.2} {:>6.2}",
            c.variant.name(),
            c.feature.name(),
            c.responses,
            opt(c.first.mean_ms, 1000.0, 2),
            opt(c.first.median_ms, 1000.0, 2),
            opt(c.second.mean_ms, 1000.0, 2),
            opt(c.second.median_ms, 1000.0, 2),
            c.accuracy,
            c.recall
        );
    }
    if !summary.relative_increase.is_empty() {
        out.push_str("\nFirst-outlier RT increase, typeII vs typeI\n");
        for r in &summary.relative_increase {
            let _ = writeln!(
                out,
                "{:<6} {:>7.2} s -> {:>7.2} s  {:+.2}%",
                r.feature.name(),
                r.type_i_mean_ms / 1000.0,
                r.type_ii_mean_ms / 1000.0,
                r.percent
            );
        }
    }
    tests_text(&mut out, tests);
    out
}
