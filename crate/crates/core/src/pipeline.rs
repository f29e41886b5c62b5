//! End-to-end agreement report: simulated influent type words against their
//! transducer images, and the fixed-point tail against the type-word tail
//! formula.

use serde::{Deserialize, Serialize};

use crate::avalanche::{AvalancheLog, InfluentTypeWord, SnapshotPolicy};
use crate::error::Result;
use crate::sandpile::ModelParams;
use crate::transducer::{render_word, Machine, OutputMode};
use crate::wave::{predict_tail, wave_match};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    /// Simulated word equals the predicted word.
    Exact,
    /// Simulated word is a proper prefix of the prediction and the final
    /// run abuts the last recorded avalanche.
    TruncatedPrefix,
    Mismatch,
}

impl Agreement {
    pub fn holds(&self) -> bool {
        !matches!(self, Agreement::Mismatch)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeComparison {
    pub predicted: String,
    pub agreement: Agreement,
}

/// Comparison of one interval's simulated word against the image of the
/// previous interval's word under both machine modes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalComparison {
    pub interval: usize,
    /// Whether the comparison sits in the zone where the transduction
    /// provably applies.
    pub in_transduction_zone: bool,
    pub simulated: String,
    pub boundary: bool,
    pub algorithm_exact: ModeComparison,
    pub figure_suppressed: ModeComparison,
}

/// Tail-formula check for one interval whose type word has the cyclic form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailCheck {
    pub interval: usize,
    pub anchor_column: usize,
    pub full_cycles: usize,
    pub last_type: u8,
    pub last_run: usize,
    pub predicted: Vec<u32>,
    pub observed: Vec<u32>,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveSummary {
    pub start_column: usize,
    pub left_blocks: usize,
    pub right_blocks: usize,
    pub has_zero: bool,
}

/// Structured agreement report. Disagreements are report content; the only
/// errors are internal failures of the underlying computations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub d: u32,
    pub n: u64,
    pub density_column: usize,
    /// First interval on which types are defined.
    pub base_interval: usize,
    /// First interval from which the transduction provably applies.
    pub transduction_interval: usize,
    pub base_word: String,
    pub base_word_boundary: bool,
    pub long_avalanche_count: usize,
    pub intervals: Vec<IntervalComparison>,
    pub wave: WaveSummary,
    pub tail_checks: Vec<TailCheck>,
    /// Per-mode agreement over the transduction zone.
    pub algorithm_exact_agrees: bool,
    pub figure_suppressed_agrees: bool,
    pub agreeing_modes: Vec<String>,
}

fn compare(
    machine: &Machine,
    previous: &InfluentTypeWord,
    simulated: &InfluentTypeWord,
) -> Result<ModeComparison> {
    let predicted = machine.image(&previous.letters())?;
    let sim = simulated.letters();
    let truncated = previous.boundary_flag || simulated.boundary_flag;
    let agreement = if sim == predicted {
        Agreement::Exact
    } else if truncated && sim.len() < predicted.len() && predicted.starts_with(&sim) {
        Agreement::TruncatedPrefix
    } else {
        Agreement::Mismatch
    };
    Ok(ModeComparison {
        predicted: render_word(&predicted, machine.d(), false),
        agreement,
    })
}

/// Parses the cyclic form `(0,..,D-2)^x (0,..,p)` where the trailing group
/// is mandatory; returns `(x, p)`.
fn cyclic_form(letters: &[u8], d1: usize) -> Option<(usize, u8)> {
    if letters.is_empty() {
        return None;
    }
    if letters
        .iter()
        .enumerate()
        .any(|(j, &l)| l as usize != j % d1)
    {
        return None;
    }
    let p = *letters.last().unwrap();
    Some(((letters.len() - 1 - p as usize) / d1, p))
}

/// Computes the fixed point and avalanche log for `n` grains, extracts the
/// influent type words of every interval, compares each against the
/// transducer image of its predecessor in both output modes, and checks the
/// tail formula against the brute-force fixed point.
pub fn pipeline_check(params: &ModelParams, n: u64) -> Result<PipelineReport> {
    let log = AvalancheLog::record(params, n, SnapshotPolicy::Final)?;
    let exact = Machine::build(params, OutputMode::AlgorithmExact)?;
    let suppressed = Machine::build(params, OutputMode::FigureSuppressed)?;
    let d1 = params.interval_len();

    let base = log.base_interval();
    let strict = log.transduction_interval();
    let final_config = log.final_config();
    let top = final_config.width() / d1 + 2;

    let mut words = Vec::new();
    for interval in base..=top.max(base) {
        words.push(log.influent_type_word(interval)?);
    }
    let word_at = |interval: usize| -> &InfluentTypeWord { &words[interval - base] };

    let mut intervals = Vec::new();
    let mut exact_ok = true;
    let mut suppressed_ok = true;
    for interval in (base + 1)..=top.max(base) {
        let previous = word_at(interval - 1);
        let simulated = word_at(interval);
        if previous.is_empty() && simulated.is_empty() {
            continue;
        }
        let cmp_exact = compare(&exact, previous, simulated)?;
        let cmp_suppressed = compare(&suppressed, previous, simulated)?;
        let in_zone = interval > strict;
        if in_zone {
            exact_ok &= cmp_exact.agreement.holds();
            suppressed_ok &= cmp_suppressed.agreement.holds();
        }
        intervals.push(IntervalComparison {
            interval,
            in_transduction_zone: in_zone,
            simulated: render_word(&simulated.letters(), params.d(), false),
            boundary: simulated.boundary_flag || previous.boundary_flag,
            algorithm_exact: cmp_exact,
            figure_suppressed: cmp_suppressed,
        });
    }

    let mut tail_checks = Vec::new();
    for interval in strict..=top.max(base) {
        if interval < base {
            continue;
        }
        let word = word_at(interval);
        let Some((full_cycles, last_type)) = cyclic_form(&word.letters(), d1) else {
            continue;
        };
        let last_run = word.last_run_len().unwrap_or(0);
        if last_run == 0 || last_run > full_cycles + 1 {
            tail_checks.push(TailCheck {
                interval,
                anchor_column: d1 * interval,
                full_cycles,
                last_type,
                last_run,
                predicted: Vec::new(),
                observed: Vec::new(),
                agree: false,
            });
            continue;
        }
        let prediction = predict_tail(params, full_cycles, last_type, last_run)?;
        let anchor_column = d1 * interval;
        let canon = final_config.canonical();
        let observed: Vec<u32> = canon[anchor_column.min(canon.len())..].to_vec();
        let mut predicted = prediction.pattern.clone();
        while predicted.last() == Some(&0) {
            predicted.pop();
        }
        let mut observed_trim = observed.clone();
        while observed_trim.last() == Some(&0) {
            observed_trim.pop();
        }
        let agree = predicted == observed_trim;
        tail_checks.push(TailCheck {
            interval,
            anchor_column,
            full_cycles,
            last_type,
            last_run,
            predicted,
            observed: observed_trim,
            agree,
        });
    }

    let wave = wave_match(final_config, params)?;
    let base_word = word_at(base);
    let mut agreeing_modes = Vec::new();
    if exact_ok {
        agreeing_modes.push(OutputMode::AlgorithmExact.as_str().to_string());
    }
    if suppressed_ok {
        agreeing_modes.push(OutputMode::FigureSuppressed.as_str().to_string());
    }

    Ok(PipelineReport {
        d: params.d(),
        n,
        density_column: log.global_density_column(),
        base_interval: base,
        transduction_interval: strict,
        base_word: render_word(&base_word.letters(), params.d(), false),
        base_word_boundary: base_word.boundary_flag,
        long_avalanche_count: log.long_indices().len(),
        intervals,
        wave: WaveSummary {
            start_column: wave.start_column,
            left_blocks: wave.left_blocks,
            right_blocks: wave.right_blocks,
            has_zero: wave.has_zero,
        },
        tail_checks,
        algorithm_exact_agrees: exact_ok,
        figure_suppressed_agrees: suppressed_ok,
        agreeing_modes,
    })
}
