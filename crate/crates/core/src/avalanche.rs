//! Avalanche combinatorics extracted from recorded strategies.
//!
//! The `k`-th avalanche is the leftmost strategy from the `(k-1)`-grain fixed
//! point plus one grain down to the `k`-grain fixed point. This module
//! derives peaks, density ranges, the global density column, the subsequence
//! of long avalanches and the per-interval type words that feed the word
//! transducer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sandpile::{fixed_point, Configuration, ModelParams};

/// One avalanche with its derived combinatorics.
///
/// `peaks` are the fired columns exceeding every previously fired column.
/// `dense_start` is the minimal column `l` such that every column in
/// `[l, max_fired]` fired (0 for an empty avalanche), and no column beyond
/// `max_fired` fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Avalanche {
    pub k: u64,
    pub firings: Vec<usize>,
    pub peaks: Vec<usize>,
    /// Fired columns in increasing order.
    pub fired: Vec<usize>,
    pub dense_start: usize,
    pub max_fired: Option<usize>,
}

impl Avalanche {
    /// Derives peaks, fired set and density range from a raw strategy.
    /// Rejects strategies firing a column twice; those cannot arise from a
    /// single grain addition and signal a recording bug.
    pub fn analyze(k: u64, firings: Vec<usize>) -> Result<Self> {
        let mut peaks = Vec::new();
        let mut max_seen: Option<usize> = None;
        for &c in &firings {
            if max_seen.is_none_or(|m| c > m) {
                peaks.push(c);
                max_seen = Some(c);
            }
        }
        let mut fired = firings.clone();
        fired.sort_unstable();
        if fired.windows(2).any(|w| w[0] == w[1]) {
            let column = fired
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0])
                .unwrap();
            return Err(Error::RepeatedColumn { k, column });
        }
        let max_fired = fired.last().copied();
        let dense_start = match max_fired {
            None => 0,
            Some(m) => {
                // walk left through the trailing contiguous block
                let mut l = m;
                let mut idx = fired.len() - 1;
                while idx > 0 && fired[idx - 1] + 1 == fired[idx] {
                    idx -= 1;
                    l = fired[idx];
                }
                l
            }
        };
        Ok(Avalanche {
            k,
            firings,
            peaks,
            fired,
            dense_start,
            max_fired,
        })
    }

    pub fn fires(&self, column: usize) -> bool {
        self.fired.binary_search(&column).is_ok()
    }

    pub fn max_peak(&self) -> Option<usize> {
        self.peaks.last().copied()
    }
}

/// JSON-lines record for streamed avalanche logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheRecord {
    pub k: u64,
    pub firings: Vec<usize>,
    pub peaks: Vec<usize>,
    pub dense_start: usize,
}

impl From<&Avalanche> for AvalancheRecord {
    fn from(a: &Avalanche) -> Self {
        AvalancheRecord {
            k: a.k,
            firings: a.firings.clone(),
            peaks: a.peaks.clone(),
            dense_start: a.dense_start,
        }
    }
}

/// Which fixed-point snapshots a log retains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotPolicy {
    /// Only the final fixed point.
    Final,
    /// Every fixed point; fine at desk scale, the snapshots are O(√k) each.
    All,
    /// Snapshots around avalanches reaching the running density column.
    /// Superset of what the long-avalanche checks need, since the global
    /// density column only grows with `n`.
    AroundLong,
}

/// Complete record of the avalanches building the fixed point of `n` grains.
#[derive(Debug, Clone)]
pub struct AvalancheLog {
    params: ModelParams,
    n: u64,
    avalanches: Vec<Avalanche>,
    snapshots: BTreeMap<u64, Configuration>,
    final_config: Configuration,
    density_column: usize,
}

impl AvalancheLog {
    /// Runs the incremental fixed-point computation and records every
    /// avalanche, analyzed.
    pub fn record(params: &ModelParams, n: u64, policy: SnapshotPolicy) -> Result<Self> {
        let mut avalanches = Vec::with_capacity(n.min(1 << 20) as usize);
        let mut snapshots = BTreeMap::new();
        snapshots.insert(0, Configuration::zero());
        let mut running_l = 0usize;
        let mut analysis_error = None;
        let mut prev: Configuration = Configuration::zero();
        let final_config = fixed_point(params, n, |k, strategy, after| {
            if analysis_error.is_some() {
                return;
            }
            match Avalanche::analyze(k, strategy.firings().to_vec()) {
                Ok(av) => {
                    running_l = running_l.max(av.dense_start);
                    let keep = match policy {
                        SnapshotPolicy::Final => false,
                        SnapshotPolicy::All => true,
                        SnapshotPolicy::AroundLong => {
                            av.fires(running_l + params.d_us() - 1)
                        }
                    };
                    if keep {
                        snapshots.entry(k - 1).or_insert_with(|| prev.clone());
                        snapshots.insert(k, after.clone());
                    }
                    avalanches.push(av);
                }
                Err(e) => analysis_error = Some(e),
            }
            if matches!(policy, SnapshotPolicy::All | SnapshotPolicy::AroundLong) {
                prev = after.clone();
            }
        })?;
        if let Some(e) = analysis_error {
            return Err(e);
        }
        snapshots.insert(n, final_config.clone());
        let density_column = running_l;
        Ok(AvalancheLog {
            params: *params,
            n,
            avalanches,
            snapshots,
            final_config,
            density_column,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn avalanches(&self) -> &[Avalanche] {
        &self.avalanches
    }

    pub fn final_config(&self) -> &Configuration {
        &self.final_config
    }

    pub fn snapshot(&self, k: u64) -> Option<&Configuration> {
        self.snapshots.get(&k)
    }

    fn require_snapshot(&self, k: u64) -> Result<&Configuration> {
        self.snapshot(k).ok_or(Error::MissingSnapshot(k))
    }

    /// The global density column `L(D, n)`: the minimal column from which
    /// every avalanche up to `n` is dense. Equals the maximum of the
    /// per-avalanche `dense_start` values.
    pub fn global_density_column(&self) -> usize {
        self.density_column
    }

    /// The long avalanches: those firing column `L + D - 1`, in order.
    pub fn long_avalanches(&self) -> Vec<&Avalanche> {
        let target = self.density_column + self.params.d_us() - 1;
        self.avalanches.iter().filter(|a| a.fires(target)).collect()
    }

    /// Grain indices of the long avalanches.
    pub fn long_indices(&self) -> Vec<u64> {
        self.long_avalanches().iter().map(|a| a.k).collect()
    }

    /// First interval on which avalanche types are defined: all of its
    /// predecessor interval lies at or beyond `L + 2(D-1)`, the zone where
    /// consecutive long avalanches keep their peak structure.
    pub fn base_interval(&self) -> usize {
        let d1 = self.params.interval_len();
        (self.density_column + 2 * d1).div_ceil(d1)
    }

    /// First interval from which the interval transduction provably applies,
    /// `(D-1)·i ≥ L + 3(D-1)`.
    pub fn transduction_interval(&self) -> usize {
        let d1 = self.params.interval_len();
        (self.density_column + 3 * d1).div_ceil(d1)
    }

    /// Type of a long avalanche on `interval`: the offset of its largest
    /// peak below the interval when that peak falls in the predecessor
    /// interval, epsilon otherwise.
    pub fn avalanche_type(&self, avalanche: &Avalanche, interval: usize) -> Result<TypeLetter> {
        let first_valid = self.base_interval();
        if interval < first_valid {
            return Err(Error::BelowTypeThreshold {
                interval,
                first_valid,
            });
        }
        let d1 = self.params.interval_len();
        let bound = d1 * interval;
        let peak = avalanche.peaks.iter().rev().find(|&&p| p < bound);
        Ok(match peak {
            Some(&p) if p + d1 >= bound => TypeLetter::letter((p % d1) as u8),
            _ => TypeLetter::EPSILON,
        })
    }

    /// Maximal runs of equally-typed long avalanches on `interval`, with the
    /// epsilon runs dropped. `boundary_flag` is set when the final run ends
    /// at the last recorded avalanche and may therefore be truncated.
    pub fn influent_type_word(&self, interval: usize) -> Result<InfluentTypeWord> {
        let mut typed = Vec::new();
        for avalanche in self.long_avalanches() {
            typed.push((self.avalanche_type(avalanche, interval)?, avalanche.k));
        }
        let (runs, boundary_flag) = collapse_runs(&typed);
        Ok(InfluentTypeWord {
            interval,
            runs,
            boundary_flag,
        })
    }

    /// Serializes one record per avalanche as JSON lines.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for a in &self.avalanches {
            let record = AvalancheRecord::from(a);
            let _ = writeln!(out, "{}", serde_json::to_string(&record).unwrap());
        }
        out
    }

    pub fn parse_jsonl(input: &str) -> Result<Vec<AvalancheRecord>> {
        input
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
            .collect()
    }
}

/// Groups a typed avalanche sequence into maximal equal-type runs and drops
/// the epsilon runs. Two equal letters separated by an epsilon run stay
/// separate runs. Returns the runs and whether the final run was non-epsilon
/// (and therefore possibly truncated).
fn collapse_runs(typed: &[(TypeLetter, u64)]) -> (Vec<InfluentRun>, bool) {
    let mut grouped: Vec<(TypeLetter, InfluentRun)> = Vec::new();
    for &(ty, k) in typed {
        match grouped.last_mut() {
            Some((last_ty, run)) if *last_ty == ty => {
                run.len += 1;
                run.k_last = k;
            }
            _ => grouped.push((
                ty,
                InfluentRun {
                    letter: ty.value().unwrap_or(0),
                    len: 1,
                    k_first: k,
                    k_last: k,
                },
            )),
        }
    }
    let boundary = grouped.last().is_some_and(|(ty, _)| !ty.is_epsilon());
    let runs = grouped
        .into_iter()
        .filter_map(|(ty, run)| ty.value().map(|_| run))
        .collect();
    (runs, boundary)
}

/// Avalanche type for an interval: epsilon or a letter in `0..D-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypeLetter(Option<u8>);

impl TypeLetter {
    pub const EPSILON: TypeLetter = TypeLetter(None);

    pub fn letter(v: u8) -> Self {
        TypeLetter(Some(v))
    }

    pub fn value(&self) -> Option<u8> {
        self.0
    }

    pub fn is_epsilon(&self) -> bool {
        self.0.is_none()
    }
}

/// One influent run: a maximal block of consecutive long avalanches sharing
/// a non-epsilon type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluentRun {
    pub letter: u8,
    pub len: usize,
    pub k_first: u64,
    pub k_last: u64,
}

/// The word of influent run letters for one interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluentTypeWord {
    pub interval: usize,
    pub runs: Vec<InfluentRun>,
    /// True when the final run abuts the last recorded avalanche, so its
    /// length (and the letters it implies downstream) may be incomplete.
    pub boundary_flag: bool,
}

impl InfluentTypeWord {
    pub fn letters(&self) -> Vec<u8> {
        self.runs.iter().map(|r| r.letter).collect()
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn last_run_len(&self) -> Option<usize> {
        self.runs.last().map(|r| r.len)
    }
}

/// Result of one bulk invariant check.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub checked: u64,
    pub violations: u64,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn fail(&mut self, detail: impl FnOnce() -> String) {
        self.violations += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(detail());
        }
    }
}

fn slope_at(cfg: &Configuration, i: usize) -> u32 {
    cfg.slope(i)
}

/// Peak characterization: on any avalanche with at least `D-1` consecutive
/// fired columns from its density start `l`, a column `p ≥ l + D - 1` is a
/// peak iff its slope before the avalanche was `D-1` and `p` lies within
/// `D-1` columns after some earlier peak; and each such peak is followed by
/// the full descending run down to the previous peak.
///
/// Requires a log recorded with [`SnapshotPolicy::All`].
pub fn check_peak_characterization(log: &AvalancheLog) -> Result<CheckOutcome> {
    let d = log.params().d_us();
    let mut outcome = CheckOutcome::default();
    for a in log.avalanches() {
        let Some(max_fired) = a.max_fired else {
            continue;
        };
        let l = a.dense_start;
        if max_fired < l + d - 2 {
            continue; // fewer than D-1 consecutive fired columns
        }
        let before = log.require_snapshot(a.k - 1)?;
        for p in (l + d - 1)..=(max_fired + d - 1) {
            let is_peak = a.peaks.binary_search(&p).is_ok();
            let after_peak = a.peaks.iter().any(|&q| q < p && p < q + d);
            let expected = slope_at(before, p) == log.params().d() - 1 && after_peak;
            outcome.checked += 1;
            if is_peak != expected {
                outcome.fail(|| {
                    format!(
                        "k={} column {p}: peak={is_peak} but slope/window predicts {expected}",
                        a.k
                    )
                });
            }
        }
        // descending run after each peak at or beyond l + D - 1
        for w in a.peaks.windows(2) {
            let (prev_peak, peak) = (w[0], w[1]);
            if peak < l + d - 1 {
                continue;
            }
            let t = a
                .firings
                .iter()
                .position(|&c| c == peak)
                .expect("peak is fired");
            let run = peak - prev_peak - 1;
            outcome.checked += 1;
            if a.firings.len() < t + 1 + run {
                outcome.fail(|| format!("k={}: run after peak {peak} truncated", a.k));
                continue;
            }
            for j in 1..=run {
                if a.firings[t + j] != a.firings[t + j - 1] - 1 {
                    outcome.fail(|| {
                        format!("k={}: firing {} breaks the descent after peak {peak}", a.k, t + j)
                    });
                    break;
                }
            }
        }
    }
    Ok(outcome)
}

/// Long-avalanche update identity: a long avalanche zeroes the slope at its
/// largest peak (previously `D-1`), adds one to the `D-1` following columns
/// and leaves every other column at or beyond `L + D - 1` unchanged.
pub fn check_long_avalanche_update(log: &AvalancheLog) -> Result<CheckOutcome> {
    let d = log.params().d_us();
    let l = log.global_density_column();
    let mut outcome = CheckOutcome::default();
    for a in log.long_avalanches() {
        let before = log.require_snapshot(a.k - 1)?;
        let after = log.require_snapshot(a.k)?;
        let max_peak = a.max_peak().expect("long avalanche fires something");
        let hi = before.width().max(after.width()).max(max_peak + d) + 1;
        for i in (l + d - 1)..hi {
            let b = slope_at(before, i);
            let v = slope_at(after, i);
            let ok = if i == max_peak {
                v == 0 && b == log.params().d() - 1
            } else if i > max_peak && i < max_peak + d {
                v == b + 1
            } else {
                v == b
            };
            outcome.checked += 1;
            if !ok {
                outcome.fail(|| {
                    format!("k={} column {i}: {b} -> {v} with max peak {max_peak}", a.k)
                });
            }
        }
    }
    Ok(outcome)
}

/// Peak similarity of consecutive long avalanches: restricted to columns at
/// or beyond `L + 2(D-1)`, the peaks of one long avalanche minus its maximum
/// equal the next one's peaks below that maximum.
pub fn check_consecutive_peak_similarity(log: &AvalancheLog) -> Result<CheckOutcome> {
    let d1 = log.params().interval_len();
    let l = log.global_density_column();
    let cut = l + 2 * d1;
    let mut outcome = CheckOutcome::default();
    let longs = log.long_avalanches();
    for pair in longs.windows(2) {
        let cur: Vec<usize> = pair[0].peaks.iter().copied().filter(|&p| p >= cut).collect();
        let next: Vec<usize> = pair[1].peaks.iter().copied().filter(|&p| p >= cut).collect();
        let Some(&max_peak) = cur.last() else {
            continue;
        };
        let lhs: Vec<usize> = cur[..cur.len() - 1].to_vec();
        let rhs: Vec<usize> = next.into_iter().filter(|&p| p < max_peak).collect();
        outcome.checked += 1;
        if lhs != rhs {
            outcome.fail(|| {
                format!(
                    "k={},{}: {:?} vs {:?} below {max_peak}",
                    pair[0].k, pair[1].k, lhs, rhs
                )
            });
        }
    }
    Ok(outcome)
}

/// Every influent run on interval `i+1` is contained in an influent run on
/// interval `i`.
pub fn check_influent_nesting(log: &AvalancheLog) -> Result<CheckOutcome> {
    let d1 = log.params().interval_len();
    let top = log.final_config().width() / d1 + 2;
    let mut outcome = CheckOutcome::default();
    for interval in log.base_interval()..top {
        let outer = log.influent_type_word(interval)?;
        let inner = log.influent_type_word(interval + 1)?;
        for run in &inner.runs {
            outcome.checked += 1;
            let contained = outer
                .runs
                .iter()
                .any(|o| o.k_first <= run.k_first && run.k_last <= o.k_last);
            if !contained {
                outcome.fail(|| {
                    format!(
                        "interval {}: run [{}, {}] not nested",
                        interval + 1,
                        run.k_first,
                        run.k_last
                    )
                });
            }
        }
    }
    Ok(outcome)
}

/// Replays only the long-avalanche updates from the empty pile and compares
/// with the final fixed point on columns at or beyond `L + 2(D-1)`. Columns
/// in `[L + D - 1, L + 2(D-1))` also gain grains from short avalanches and
/// are excluded.
pub fn check_wave_reconstruction(log: &AvalancheLog) -> Result<CheckOutcome> {
    let d = log.params().d_us();
    let l = log.global_density_column();
    let final_cfg = log.final_config();
    let mut rebuilt = vec![0u32; final_cfg.width() + d + 2];
    for a in log.long_avalanches() {
        let max_peak = a.max_peak().expect("long avalanche fires something");
        rebuilt[max_peak] = 0;
        for v in &mut rebuilt[max_peak + 1..max_peak + d] {
            *v += 1;
        }
    }
    let mut outcome = CheckOutcome::default();
    for (i, &rebuilt_slope) in rebuilt.iter().enumerate().skip(l + 2 * (d - 1)) {
        outcome.checked += 1;
        if rebuilt_slope != final_cfg.slope(i) {
            outcome.fail(|| {
                format!(
                    "column {i}: rebuilt {rebuilt_slope} vs actual {}",
                    final_cfg.slope(i)
                )
            });
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: u32) -> ModelParams {
        ModelParams::new(d).unwrap()
    }

    #[test]
    fn analyze_ninth_avalanche() {
        let a = Avalanche::analyze(9, vec![0, 2]).unwrap();
        assert_eq!(a.peaks, vec![0, 2]);
        assert_eq!(a.dense_start, 2);
        assert_eq!(a.max_fired, Some(2));
        assert_eq!(a.fired, vec![0, 2]);
    }

    #[test]
    fn analyze_empty_avalanche() {
        let a = Avalanche::analyze(1, vec![]).unwrap();
        assert!(a.peaks.is_empty());
        assert_eq!(a.max_fired, None);
        assert_eq!(a.dense_start, 0);
    }

    #[test]
    fn analyze_rejects_repeats() {
        let err = Avalanche::analyze(4, vec![0, 1, 2, 1]).unwrap_err();
        assert_eq!(err, Error::RepeatedColumn { k: 4, column: 1 });
    }

    #[test]
    fn density_column_small_cases() {
        let p = params(3);
        let log = AvalancheLog::record(&p, 9, SnapshotPolicy::All).unwrap();
        assert_eq!(log.global_density_column(), 2);
        assert!(log.long_indices().is_empty());

        let log = AvalancheLog::record(&p, 3, SnapshotPolicy::Final).unwrap();
        assert_eq!(log.global_density_column(), 0);

        let log = AvalancheLog::record(&p, 0, SnapshotPolicy::Final).unwrap();
        assert_eq!(log.global_density_column(), 0);
        assert!(log.long_indices().is_empty());
    }

    #[test]
    fn long_avalanches_monotone() {
        let p = params(3);
        let log = AvalancheLog::record(&p, 200, SnapshotPolicy::Final).unwrap();
        let ks = log.long_indices();
        assert!(!ks.is_empty());
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        let target = log.global_density_column() + 2;
        for a in log.long_avalanches() {
            assert!(a.fires(target));
        }
    }

    #[test]
    fn type_letter_arithmetic() {
        // peak at the last offset of the predecessor interval
        let p = params(3);
        let log = AvalancheLog::record(&p, 600, SnapshotPolicy::Final).unwrap();
        let base = log.base_interval();
        let d1 = p.interval_len();
        for a in log.long_avalanches() {
            let ty = log.avalanche_type(a, base).unwrap();
            let bound = d1 * base;
            let expect = a
                .peaks
                .iter()
                .rev()
                .find(|&&q| q < bound)
                .and_then(|&q| (q + d1 >= bound).then_some((q % d1) as u8));
            assert_eq!(ty.value(), expect);
        }
    }

    #[test]
    fn type_letter_synthetic_cases() {
        // D=4 log only supplies L and the interval threshold; the avalanches
        // below are hand-built
        let p = params(4);
        let log = AvalancheLog::record(&p, 500, SnapshotPolicy::Final).unwrap();
        let i = log.base_interval() + 1;
        let d1 = p.interval_len();

        // largest peak below the interval at offset 2 of the predecessor
        let a = Avalanche::analyze(1, (0..=(d1 * (i - 1) + 2)).collect()).unwrap();
        assert_eq!(log.avalanche_type(&a, i).unwrap().value(), Some(2));

        // offset 0 of the predecessor interval
        let a = Avalanche::analyze(2, (0..=(d1 * (i - 1))).collect()).unwrap();
        assert_eq!(log.avalanche_type(&a, i).unwrap().value(), Some(0));

        // largest peak below the interval lies left of the predecessor
        let a = Avalanche::analyze(3, (0..=(d1 * (i - 1) - 1)).collect()).unwrap();
        assert!(log.avalanche_type(&a, i).unwrap().is_epsilon());
    }

    #[test]
    fn type_threshold_enforced() {
        let p = params(3);
        let log = AvalancheLog::record(&p, 600, SnapshotPolicy::Final).unwrap();
        let base = log.base_interval();
        let a = log.long_avalanches()[0].clone();
        let err = log.avalanche_type(&a, base - 1).unwrap_err();
        assert_eq!(
            err,
            Error::BelowTypeThreshold {
                interval: base - 1,
                first_valid: base
            }
        );
    }

    #[test]
    fn run_collapse_drops_epsilon_and_splits_repeats() {
        let e = TypeLetter::EPSILON;
        let l = TypeLetter::letter;
        // types (0,0,e,1,1,1,e,0) -> word 0,1,0
        let typed: Vec<(TypeLetter, u64)> = [l(0), l(0), e, l(1), l(1), l(1), e, l(0)]
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i as u64 + 1))
            .collect();
        let (runs, boundary) = collapse_runs(&typed);
        let letters: Vec<u8> = runs.iter().map(|r| r.letter).collect();
        assert_eq!(letters, vec![0, 1, 0]);
        assert_eq!(runs[0].len, 2);
        assert_eq!(runs[1].len, 3);
        assert!(boundary, "final run is non-epsilon");

        let (runs, boundary) = collapse_runs(&[(e, 1), (e, 2)]);
        assert!(runs.is_empty());
        assert!(!boundary);

        let (runs, _) = collapse_runs(&[]);
        assert!(runs.is_empty());
    }

    #[test]
    fn influent_word_run_collapse() {
        // synthetic check of the run grouping: types (0,0,e,1,1,1,e,0) -> 0,1,0
        let p = params(4);
        let log = AvalancheLog::record(&p, 500, SnapshotPolicy::Final).unwrap();
        let word = log.influent_type_word(log.base_interval()).unwrap();
        // grouped runs never repeat a letter consecutively
        for w in word.runs.windows(2) {
            assert!(
                w[0].letter != w[1].letter || w[0].k_last + 1 < w[1].k_first,
                "adjacent runs with equal letters must be split by an epsilon run"
            );
        }
        // run ranges are increasing and disjoint
        for w in word.runs.windows(2) {
            assert!(w[0].k_last < w[1].k_first);
        }
    }

    #[test]
    fn base_interval_anchor_word() {
        let p = params(4);
        let log = AvalancheLog::record(&p, 500, SnapshotPolicy::Final).unwrap();
        let word = log.influent_type_word(log.base_interval()).unwrap();
        assert_eq!(word.letters(), vec![0, 1, 2, 0, 1, 2, 0, 2, 1, 0]);
    }

    #[test]
    fn jsonl_round_trip() {
        let p = params(3);
        let log = AvalancheLog::record(&p, 20, SnapshotPolicy::Final).unwrap();
        let text = log.to_jsonl();
        let records = AvalancheLog::parse_jsonl(&text).unwrap();
        assert_eq!(records.len(), 20);
        for (rec, a) in records.iter().zip(log.avalanches()) {
            assert_eq!(rec, &AvalancheRecord::from(a));
        }
    }

    #[test]
    fn snapshot_policies() {
        let p = params(3);
        let all = AvalancheLog::record(&p, 50, SnapshotPolicy::All).unwrap();
        assert!(all.snapshot(17).is_some());
        let fin = AvalancheLog::record(&p, 50, SnapshotPolicy::Final).unwrap();
        assert!(fin.snapshot(17).is_none());
        assert!(fin.snapshot(50).is_some());
        let around = AvalancheLog::record(&p, 400, SnapshotPolicy::AroundLong).unwrap();
        for k in around.long_indices() {
            assert!(around.snapshot(k).is_some(), "missing snapshot at {k}");
            assert!(around.snapshot(k - 1).is_some(), "missing snapshot at {}", k - 1);
        }
        assert!(around.snapshot(400).is_some(), "final snapshot always kept");
    }

    #[test]
    fn lemma_checks_pass_at_small_scale() {
        for d in [3u32, 4, 5] {
            let p = params(d);
            let log = AvalancheLog::record(&p, 800, SnapshotPolicy::All).unwrap();
            let peak = check_peak_characterization(&log).unwrap();
            assert!(peak.passed(), "peak characterization: {:?}", peak.first_failure);
            assert!(peak.checked > 0);
            let update = check_long_avalanche_update(&log).unwrap();
            assert!(update.passed(), "long update: {:?}", update.first_failure);
            let sim = check_consecutive_peak_similarity(&log).unwrap();
            assert!(sim.passed(), "peak similarity: {:?}", sim.first_failure);
            let nest = check_influent_nesting(&log).unwrap();
            assert!(nest.passed(), "nesting: {:?}", nest.first_failure);
            let rec = check_wave_reconstruction(&log).unwrap();
            assert!(rec.passed(), "reconstruction: {:?}", rec.first_failure);
        }
    }
}
