//! CSV emission and parsing.
//!
//! All files are locale-independent: `.` decimal separator, `\n` line
//! endings, a header row always present. Floats are written with the
//! shortest representation that round-trips, so parsing an emitted file
//! recovers bit-equal values.

use std::fmt::Write as _;
use std::path::Path;

use psewer_core::{ComparisonTable, MovingSeries, SimResult, SummaryStats};

use crate::commands::CliError;

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const LEARNING_FILE: &str = "learning.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

/// `aggregate.csv`: one row per step with the total pumped volume.
pub fn render_aggregate(result: &SimResult<f64>) -> String {
    let mut out = String::from("t,total_pumped_m3\n");
    for (i, v) in result.aggregate_outflow.iter().enumerate() {
        let t = i as u64 * result.config.dt;
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

/// `events.csv`: one row per drawing.
pub fn render_events(result: &SimResult<f64>) -> String {
    let mut out = String::from("unit,t_start,t_end,volume_m3,source\n");
    for e in &result.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.unit,
            e.t_start,
            e.t_end,
            e.volume,
            e.source.as_str()
        );
    }
    out
}

/// `learning.csv`: the pump-time offset in force from `t` onward, one row
/// per change (plus the t=0 baseline per unit). Empty below the header when
/// the learning module is disabled.
pub fn render_learning(result: &SimResult<f64>) -> String {
    let mut out = String::from("t,unit,t_pump_modif_s\n");
    for s in &result.learning_trace {
        let _ = writeln!(out, "{},{},{}", s.t, s.unit, s.offset);
    }
    out
}

/// `summary.csv`: one row of run-level statistics over the windowed sums.
pub fn render_summary(
    label: &str,
    window_s: u64,
    stats: &SummaryStats<f64>,
    result: &SimResult<f64>,
) -> String {
    let failsafe = result
        .events
        .iter()
        .filter(|e| e.source == psewer_core::CommandSource::FailSafe)
        .count();
    let mut out = String::from(
        "label,window_s,mean_m3,std_m3,min_m3,max_m3,\
         total_inflow_m3,total_pumped_m3,total_overflow_m3,\
         draw_events,failsafe_events,overflow_events\n",
    );
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        label,
        window_s,
        stats.mean,
        stats.std,
        stats.min,
        stats.max,
        result.totals.inflow,
        result.totals.pumped,
        result.totals.overflow,
        result.events.len(),
        failsafe,
        result.overflow_events.len()
    );
    out
}

/// `comparison.csv`: the five-configuration table.
pub fn render_comparison(table: &ComparisonTable<f64>) -> String {
    let mut out = String::from("label,std_m3,mean_m3,min_m3,max_m3,reduction_vs_a_pct\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.modules.label(),
            row.stats.std,
            row.stats.mean,
            row.stats.min,
            row.stats.max,
            row.reduction_vs_baseline_pct
        );
    }
    out
}

/// One parsed row of `comparison.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonCsvRow {
    pub label: String,
    pub std_m3: f64,
    pub mean_m3: f64,
    pub min_m3: f64,
    pub max_m3: f64,
    pub reduction_vs_a_pct: f64,
}

/// Parses a `comparison.csv`; errors name the offending line.
pub fn parse_comparison(path: &Path) -> Result<Vec<ComparisonCsvRow>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == "label,std_m3,mean_m3,min_m3,max_m3,reduction_vs_a_pct" => {}
        Some((_, other)) => {
            return Err(CliError::Validation(format!(
                "{}:1: unexpected header '{other}'",
                path.display()
            )))
        }
        None => {
            return Err(CliError::Validation(format!(
                "{}: file is empty",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::Validation(format!(
                "{}:{lineno}: expected 6 columns, got {}",
                path.display(),
                fields.len()
            )));
        }
        let num = |col: usize, name: &str| -> Result<f64, CliError> {
            fields[col].parse().map_err(|_| {
                CliError::Validation(format!(
                    "{}:{lineno}: column {name} is not a number: '{}'",
                    path.display(),
                    fields[col]
                ))
            })
        };
        rows.push(ComparisonCsvRow {
            label: fields[0].to_string(),
            std_m3: num(1, "std_m3")?,
            mean_m3: num(2, "mean_m3")?,
            min_m3: num(3, "min_m3")?,
            max_m3: num(4, "max_m3")?,
            reduction_vs_a_pct: num(5, "reduction_vs_a_pct")?,
        });
    }
    Ok(rows)
}

/// Parses an `aggregate.csv` back into the per-step series.
pub fn parse_aggregate(path: &Path) -> Result<Vec<(u64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != "t,total_pumped_m3" {
                return Err(CliError::Validation(format!(
                    "{}:1: unexpected header '{line}'",
                    path.display()
                )));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (t, v) = line.split_once(',').ok_or_else(|| {
            CliError::Validation(format!("{}:{lineno}: expected 2 columns", path.display()))
        })?;
        let t = t.parse().map_err(|_| {
            CliError::Validation(format!("{}:{lineno}: bad time '{t}'", path.display()))
        })?;
        let v = v.parse().map_err(|_| {
            CliError::Validation(format!("{}:{lineno}: bad volume '{v}'", path.display()))
        })?;
        rows.push((t, v));
    }
    Ok(rows)
}

/// Windowed sums as `t,sum_m3` for plot post-processing.
pub fn render_moving(series: &MovingSeries<f64>, dt: u64) -> String {
    let mut out = String::from("t,sum_m3\n");
    for (i, v) in series.values.iter().enumerate() {
        let t = series.t0 + i as u64 * dt;
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use psewer_core::{run_simulation, ModuleSet, SimConfig};

    fn sample_result() -> SimResult<f64> {
        let cfg = SimConfig::<f64>::defaults(3, 1, 5)
            .unwrap()
            .with_modules(ModuleSet::ALL);
        run_simulation(cfg).unwrap()
    }

    #[test]
    fn aggregate_round_trips_bit_exact() {
        let result = sample_result();
        let text = render_aggregate(&result);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(AGGREGATE_FILE);
        std::fs::write(&path, &text).unwrap();
        let parsed = parse_aggregate(&path).unwrap();
        assert_eq!(parsed.len(), result.aggregate_outflow.len());
        for (i, (t, v)) in parsed.iter().enumerate() {
            assert_eq!(*t, i as u64 * result.config.dt);
            assert_eq!(*v, result.aggregate_outflow[i], "row {i} drifted");
        }
    }

    #[test]
    fn rendered_files_use_unix_newlines_and_headers() {
        let result = sample_result();
        for text in [
            render_aggregate(&result),
            render_events(&result),
            render_learning(&result),
        ] {
            assert!(!text.contains('\r'));
            assert!(text.ends_with('\n'));
            let header = text.lines().next().unwrap();
            assert!(header.chars().all(|c| c.is_ascii_alphanumeric() || c == ',' || c == '_'));
        }
    }

    #[test]
    fn comparison_parse_rejects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(COMPARISON_FILE);
        std::fs::write(
            &path,
            "label,std_m3,mean_m3,min_m3,max_m3,reduction_vs_a_pct\nA,0.5,1.0,0.0,2.0,0\nAB,oops,1,0,2,10\n",
        )
        .unwrap();
        let err = parse_comparison(&path).unwrap_err().to_string();
        assert!(err.contains(":3"), "should name line 3: {err}");

        std::fs::write(&path, "label,std\nA,0.5\n").unwrap();
        let err = parse_comparison(&path).unwrap_err().to_string();
        assert!(err.contains(":1"), "should name the header line: {err}");
    }

    #[test]
    fn events_csv_has_one_row_per_event() {
        let result = sample_result();
        let text = render_events(&result);
        assert_eq!(text.lines().count(), result.events.len() + 1);
    }
}
