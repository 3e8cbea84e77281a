//! The three operator commands: single runs, the five-configuration
//! experiment, and result comparison.

use std::path::Path;

use psewer_core::{
    block_sum, compare_experiments, moving_sum, run_simulation, summary_stats, ComparisonTable,
    ModuleSet, MovingSeries, SimResult, SummaryStats, EXPERIMENT_SETS,
};
use thiserror::Error;

use crate::csvio;
use crate::plot;
use crate::scenario::{ResolvedScenario, ScenarioFile, SumMode};

/// Command failures, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 1: a configuration or file-content problem.
    #[error("{0}")]
    Validation(String),
    /// Exit 2: an I/O problem.
    #[error("{0}")]
    Io(String),
    /// Exit 3: compared results differ.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

impl From<psewer_core::Error> for CliError {
    fn from(e: psewer_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn windowed(
    result: &SimResult<f64>,
    window_s: u64,
    mode: SumMode,
) -> Result<MovingSeries<f64>, CliError> {
    let sums = match mode {
        SumMode::Moving => moving_sum(&result.aggregate_outflow, window_s, result.config.dt)?,
        SumMode::Block => block_sum(&result.aggregate_outflow, window_s, result.config.dt)?,
    };
    Ok(sums)
}

fn series_points(series: &MovingSeries<f64>, dt: u64, mode: SumMode) -> Vec<(f64, f64)> {
    // Sliding sums advance one step per value, block sums a whole window.
    let stride = match mode {
        SumMode::Moving => dt,
        SumMode::Block => series.window,
    };
    series
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| ((series.t0 + i as u64 * stride) as f64 / 3600.0, v))
        .collect()
}

fn print_warnings(scenario: &ResolvedScenario) {
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
}

/// `simulate`: one run, four CSV files and the figures.
pub fn cmd_simulate(
    scenario_path: &Path,
    overrides: &[String],
    out_dir: &Path,
    seed: Option<u64>,
    quiet: bool,
) -> Result<(), CliError> {
    let scenario = ScenarioFile::load(scenario_path, overrides, seed)?;
    print_warnings(&scenario);
    ensure_dir(out_dir)?;

    let result = run_simulation(scenario.config.clone())?;
    let sums = windowed(&result, scenario.window_s, scenario.sum_mode)?;
    let stats = summary_stats(&sums.values)?;

    write_file(&out_dir.join(csvio::AGGREGATE_FILE), &csvio::render_aggregate(&result))?;
    write_file(&out_dir.join(csvio::EVENTS_FILE), &csvio::render_events(&result))?;
    write_file(&out_dir.join(csvio::LEARNING_FILE), &csvio::render_learning(&result))?;
    write_file(
        &out_dir.join(csvio::SUMMARY_FILE),
        &csvio::render_summary(&scenario.label, scenario.window_s, &stats, &result),
    )?;

    let window_h = scenario.window_s as f64 / 3600.0;
    let points = series_points(&sums, result.config.dt, scenario.sum_mode);
    let title = format!(
        "{} — {:.0} h sums of all drawings ({})",
        scenario.label,
        window_h,
        result.config.control.modules.label()
    );
    write_file(
        &out_dir.join("moving_sums.svg"),
        &plot::line_chart(&title, "time (h)", "volume per window (m3)", &[("sum", &points)]),
    )?;
    if result.config.control.modules.learning {
        let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        let horizon_h = (result.config.horizon_days as f64) * 24.0;
        for unit in 0..result.config.n_units {
            let mut pts = Vec::new();
            let mut last = 0.0;
            for s in result.learning_trace.iter().filter(|s| s.unit == unit) {
                let t_h = s.t as f64 / 3600.0;
                // Step trace: hold the previous value up to the change.
                pts.push((t_h, last));
                pts.push((t_h, s.offset));
                last = s.offset;
            }
            pts.push((horizon_h, last));
            series.push((format!("unit {unit}"), pts));
        }
        let refs: Vec<(&str, &[(f64, f64)])> = series
            .iter()
            .map(|(label, pts)| (label.as_str(), pts.as_slice()))
            .collect();
        write_file(
            &out_dir.join("learning.svg"),
            &plot::line_chart(
                &format!("{} — learned pump-time offsets", scenario.label),
                "time (h)",
                "offset (s)",
                &refs,
            ),
        )?;
    }

    if !quiet {
        println!(
            "{}: {} units x {} days, modules {}",
            scenario.label,
            result.config.n_units,
            result.config.horizon_days,
            result.config.control.modules.label()
        );
        print_stats_line(&stats, scenario.window_s);
        println!(
            "events: {} ({} fail-safe), overflow events: {}",
            result.events.len(),
            result
                .events
                .iter()
                .filter(|e| e.source == psewer_core::CommandSource::FailSafe)
                .count(),
            result.overflow_events.len()
        );
        println!("wrote {}", out_dir.display());
    }
    Ok(())
}

fn print_stats_line(stats: &SummaryStats<f64>, window_s: u64) {
    println!(
        "{} s window sums: mean {:.4} m3, std {:.4} m3, min {:.4}, max {:.4}",
        window_s, stats.mean, stats.std, stats.min, stats.max
    );
}

/// Runs the five standard configurations on one scenario.
pub fn run_experiment(
    scenario: &ResolvedScenario,
) -> Result<(Vec<(ModuleSet, SimResult<f64>)>, ComparisonTable<f64>), CliError> {
    let mut slots: Vec<Option<Result<SimResult<f64>, psewer_core::Error>>> =
        (0..EXPERIMENT_SETS.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (slot, set) in slots.iter_mut().zip(EXPERIMENT_SETS) {
            let cfg = scenario.config.clone().with_modules(set);
            scope.spawn(move || *slot = Some(run_simulation(cfg)));
        }
    });
    let mut results = Vec::with_capacity(EXPERIMENT_SETS.len());
    for (slot, set) in slots.into_iter().zip(EXPERIMENT_SETS) {
        let result = slot.expect("scoped thread completed")?;
        results.push((set, result));
    }
    let refs: Vec<(ModuleSet, &SimResult<f64>)> =
        results.iter().map(|(set, r)| (*set, r)).collect();
    let table = compare_experiments(&refs, scenario.window_s)?;
    Ok((results, table))
}

/// `experiment`: the five-configuration suite with the comparison table.
pub fn cmd_experiment(
    scenario_path: &Path,
    overrides: &[String],
    out_dir: &Path,
    seed: Option<u64>,
    quiet: bool,
) -> Result<(), CliError> {
    let scenario = ScenarioFile::load(scenario_path, overrides, seed)?;
    print_warnings(&scenario);
    ensure_dir(out_dir)?;

    let (results, table) = run_experiment(&scenario)?;
    write_file(&out_dir.join(csvio::COMPARISON_FILE), &csvio::render_comparison(&table))?;

    let window_h = scenario.window_s as f64 / 3600.0;
    for (set, result) in &results {
        let label = set.label();
        write_file(
            &out_dir.join(format!("aggregate_{label}.csv")),
            &csvio::render_aggregate(result),
        )?;
        let sums = windowed(result, scenario.window_s, scenario.sum_mode)?;
        let points = series_points(&sums, result.config.dt, scenario.sum_mode);
        write_file(
            &out_dir.join(format!("moving_sums_{label}.svg")),
            &plot::line_chart(
                &format!("{} — {:.0} h sums, configuration {label}", scenario.label, window_h),
                "time (h)",
                "volume per window (m3)",
                &[(label.as_str(), &points)],
            ),
        )?;
    }
    let bars: Vec<(String, f64)> = table
        .rows
        .iter()
        .map(|r| (r.modules.label(), r.stats.std))
        .collect();
    write_file(
        &out_dir.join("std_bars.svg"),
        &plot::bar_chart(
            &format!("{} — std of {:.0} h sums per configuration", scenario.label, window_h),
            "std (m3)",
            &bars,
        ),
    )?;

    if !quiet {
        println!(
            "{}: {} units x {} days, window {} s",
            scenario.label, scenario.config.n_units, scenario.config.horizon_days, scenario.window_s
        );
        println!("configuration      std (m3)     mean (m3)   reduction vs A");
        for row in &table.rows {
            println!(
                "{:<14} {:>12.6} {:>12.6} {:>14.1}%",
                row.modules.label(),
                row.stats.std,
                row.stats.mean,
                row.reduction_vs_baseline_pct
            );
        }
        println!("wrote {}", out_dir.display());
    }
    Ok(())
}

/// `compare`: diff the comparison tables of two output directories.
pub fn cmd_compare(dir_a: &Path, dir_b: &Path, quiet: bool) -> Result<(), CliError> {
    let rows_a = csvio::parse_comparison(&dir_a.join(csvio::COMPARISON_FILE))?;
    let rows_b = csvio::parse_comparison(&dir_b.join(csvio::COMPARISON_FILE))?;
    if rows_a.len() != rows_b.len() {
        return Err(CliError::Mismatch(format!(
            "row counts differ: {} vs {}",
            rows_a.len(),
            rows_b.len()
        )));
    }
    let mut deltas = Vec::new();
    for (a, b) in rows_a.iter().zip(&rows_b) {
        if a.label != b.label {
            return Err(CliError::Mismatch(format!(
                "row labels differ: {} vs {}",
                a.label, b.label
            )));
        }
        let d_std = (a.std_m3 - b.std_m3).abs();
        let d_red = (a.reduction_vs_a_pct - b.reduction_vs_a_pct).abs();
        if !quiet {
            println!(
                "{:<6} std {:>14} vs {:<14} |d|={:.3e}   reduction {:>8} vs {:<8} |d|={:.3e}",
                a.label, a.std_m3, b.std_m3, d_std, a.reduction_vs_a_pct, b.reduction_vs_a_pct, d_red
            );
        }
        if d_std > 1e-9 || d_red > 1e-9 {
            deltas.push(format!(
                "{}: std differs by {d_std:.3e}, reduction by {d_red:.3e}",
                a.label
            ));
        }
    }
    if deltas.is_empty() {
        if !quiet {
            println!("equal within 1e-9");
        }
        Ok(())
    } else {
        Err(CliError::Mismatch(deltas.join("\n")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn write_scenario(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("scenario.toml");
        std::fs::write(&path, body).unwrap();
        path
    }

    const SMALL: &str = "label = \"small\"\nseed = 11\n[sim]\nn_units = 3\nhorizon_days = 1\ndt_s = 30\n";

    #[test]
    fn simulate_writes_all_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = write_scenario(dir.path(), SMALL);
        let out = dir.path().join("out");
        cmd_simulate(&scenario, &[], &out, None, true).unwrap();
        for file in ["aggregate.csv", "events.csv", "learning.csv", "summary.csv", "moving_sums.svg", "learning.svg"] {
            assert!(out.join(file).exists(), "{file} missing");
        }
    }

    #[test]
    fn experiment_writes_comparison_and_figures() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = write_scenario(dir.path(), SMALL);
        let out = dir.path().join("exp");
        cmd_experiment(&scenario, &[], &out, None, true).unwrap();
        let rows = csvio::parse_comparison(&out.join("comparison.csv")).unwrap();
        assert_eq!(rows.len(), 5);
        let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["A", "AB", "ABD", "ABC", "ABCD"]);
        assert_eq!(rows[0].reduction_vs_a_pct, 0.0);
        for label in labels {
            assert!(out.join(format!("aggregate_{label}.csv")).exists());
            assert!(out.join(format!("moving_sums_{label}.svg")).exists());
        }
        assert!(out.join("std_bars.svg").exists());
    }

    #[test]
    fn compare_accepts_itself_and_rejects_other_seeds() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = write_scenario(dir.path(), SMALL);
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        let out_c = dir.path().join("c");
        cmd_experiment(&scenario, &[], &out_a, None, true).unwrap();
        cmd_experiment(&scenario, &[], &out_b, None, true).unwrap();
        cmd_experiment(&scenario, &[], &out_c, Some(999), true).unwrap();

        cmd_compare(&out_a, &out_b, true).unwrap();
        let err = cmd_compare(&out_a, &out_c, true).unwrap_err();
        assert_eq!(err.exit_code(), 3);

        let missing = dir.path().join("nope");
        let err = cmd_compare(&out_a, &missing, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn seed_override_changes_results() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = write_scenario(dir.path(), SMALL);
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        cmd_simulate(&scenario, &[], &out_a, Some(1), true).unwrap();
        cmd_simulate(&scenario, &[], &out_b, Some(2), true).unwrap();
        let a = std::fs::read_to_string(out_a.join("aggregate.csv")).unwrap();
        let b = std::fs::read_to_string(out_b.join("aggregate.csv")).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn module_override_reaches_the_run() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = write_scenario(dir.path(), SMALL);
        let out = dir.path().join("out");
        cmd_simulate(&scenario, &["control.enabled=A".into()], &out, None, true).unwrap();
        // Pure on-off: no learning figure, and every event is fail-safe.
        assert!(!out.join("learning.svg").exists());
        let events = std::fs::read_to_string(out.join("events.csv")).unwrap();
        for line in events.lines().skip(1) {
            assert!(line.ends_with("FailSafe"), "unexpected event: {line}");
        }
    }

    #[test]
    fn bad_scenario_field_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = write_scenario(
            dir.path(),
            "seed = 1\n[control]\nslot_len_s = 7000\n",
        );
        let err = cmd_simulate(&scenario, &[], &dir.path().join("o"), None, true).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("slot_len"));
    }
}
