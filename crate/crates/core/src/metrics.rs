//! Evaluation arithmetic: moving window sums, summary statistics and the
//! five-configuration comparison table.

use crate::control::{ModuleSet, EXPERIMENT_SETS};
use crate::engine::SimResult;
use crate::error::{Error, Result};
use crate::scalar::{neumaier_sum, sc, Scalar};

/// Windowed sums of a per-step series.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingSeries<S> {
    /// Window length in seconds.
    pub window: u64,
    /// Sim-time at which the first window ends.
    pub t0: u64,
    /// One sum per window position (m³).
    pub values: Vec<S>,
}

/// Sliding-window sums over a per-step volume series.
///
/// `values[i]` sums `series[i .. i + window/dt)`. Only full windows are
/// produced, so the output has `len - window/dt + 1` entries.
///
/// Each window is summed independently from precomputed block sums plus
/// edge elements, all compensated, so every value carries only a few ulps
/// of error — there is no rolling drift to accumulate along the series.
pub fn moving_sum<S: Scalar>(series: &[S], window: u64, dt: u64) -> Result<MovingSeries<S>> {
    let w = window_steps(series.len(), window, dt)?;
    let n = series.len();
    let block = (w as f64).sqrt().ceil().max(1.0) as usize;
    let block_sums: Vec<S> = series
        .chunks(block)
        .map(|c| neumaier_sum(c.iter().copied()))
        .collect();

    let mut values = Vec::with_capacity(n - w + 1);
    for i in 0..=n - w {
        let end = i + w;
        // Whole blocks strictly inside [i, end), plus ragged edges.
        let first_block = i.div_ceil(block);
        let last_block = end / block;
        let sum = if first_block < last_block {
            let head = series[i..first_block * block].iter().copied();
            let tail = series[last_block * block..end].iter().copied();
            let middle = block_sums[first_block..last_block].iter().copied();
            neumaier_sum(head.chain(middle).chain(tail))
        } else {
            neumaier_sum(series[i..end].iter().copied())
        };
        values.push(sum);
    }
    Ok(MovingSeries {
        window,
        t0: window,
        values,
    })
}

/// Non-overlapping window sums, for block-style figure reproduction.
/// Any trailing partial window is dropped.
pub fn block_sum<S: Scalar>(series: &[S], window: u64, dt: u64) -> Result<MovingSeries<S>> {
    let w = window_steps(series.len(), window, dt)?;
    let values = series
        .chunks_exact(w)
        .map(|chunk| neumaier_sum(chunk.iter().copied()))
        .collect();
    Ok(MovingSeries {
        window,
        t0: window,
        values,
    })
}

fn window_steps(len: usize, window: u64, dt: u64) -> Result<usize> {
    if dt == 0 || window == 0 || window % dt != 0 {
        return Err(Error::BadWindow { window, dt });
    }
    let w = (window / dt) as usize;
    if len < w {
        return Err(Error::SeriesTooShort { len, window: w });
    }
    Ok(w)
}

/// Basic summary of a series. The standard deviation is the population
/// convention (divide by n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats<S> {
    pub mean: S,
    pub std: S,
    pub min: S,
    pub max: S,
}

pub fn summary_stats<S: Scalar>(series: &[S]) -> Result<SummaryStats<S>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = sc::<S>(series.len() as f64);
    let mean = neumaier_sum(series.iter().copied()) / n;
    let var = neumaier_sum(series.iter().map(|&x| {
        let d = x - mean;
        d * d
    })) / n;
    let mut min = series[0];
    let mut max = series[0];
    for &x in &series[1..] {
        min = min.min(x);
        max = max.max(x);
    }
    Ok(SummaryStats {
        mean,
        std: var.max(S::zero()).sqrt(),
        min,
        max,
    })
}

/// One row of the five-configuration comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow<S> {
    pub modules: ModuleSet,
    pub stats: SummaryStats<S>,
    /// `(std_A - std_X) / std_A * 100`; zero for the baseline itself.
    pub reduction_vs_baseline_pct: S,
}

/// Standard deviations of windowed drawings across the five standard
/// configurations, with the relative reduction against pure on-off.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable<S> {
    pub window: u64,
    pub rows: Vec<ComparisonRow<S>>,
}

impl<S: Scalar> ComparisonTable<S> {
    pub fn row(&self, modules: ModuleSet) -> Option<&ComparisonRow<S>> {
        self.rows.iter().find(|r| r.modules == modules)
    }
}

/// Builds the comparison table from the five standard runs.
///
/// All runs must come from the identical scenario (same seed, units, tank,
/// profile and schedule); only the enabled modules may differ. The rows are
/// ordered A, AB, ABD, ABC, ABCD.
pub fn compare_experiments<S: Scalar>(
    results: &[(ModuleSet, &SimResult<S>)],
    window: u64,
) -> Result<ComparisonTable<S>> {
    let find = |set: ModuleSet| -> Result<&SimResult<S>> {
        results
            .iter()
            .find(|(m, _)| *m == set)
            .map(|(_, r)| *r)
            .ok_or_else(|| Error::MissingExperiment(set.label()))
    };
    let baseline = find(EXPERIMENT_SETS[0])?;
    for set in EXPERIMENT_SETS.iter().skip(1) {
        let r = find(*set)?;
        if !baseline.scenario_matches(r) {
            return Err(Error::MismatchedScenarios(format!(
                "configuration {} was run on a different scenario than A",
                set.label()
            )));
        }
    }

    let std_of = |r: &SimResult<S>| -> Result<SummaryStats<S>> {
        summary_stats(&moving_sum(&r.aggregate_outflow, window, r.config.dt)?.values)
    };
    let base_stats = std_of(baseline)?;
    let mut rows = Vec::with_capacity(EXPERIMENT_SETS.len());
    for set in EXPERIMENT_SETS {
        let stats = std_of(find(set)?)?;
        let reduction = if base_stats.std > S::zero() {
            (base_stats.std - stats.std) / base_stats.std * sc(100.0)
        } else {
            S::zero()
        };
        rows.push(ComparisonRow {
            modules: set,
            stats,
            reduction_vs_baseline_pct: reduction,
        });
    }
    Ok(ComparisonTable { window, rows })
}
