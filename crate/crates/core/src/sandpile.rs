//! Exact KSPM(D) dynamics.
//!
//! Configurations are stored in slope representation: entry `i` is the height
//! difference between columns `i` and `i+1`, and the sequence is ultimately
//! null. Firing column `i` requires slope at least `D` and moves `D-1` grains
//! onto the `D-1` columns to its right, which in slope space reads
//! `σ[i-1] += D-1`, `σ[i] -= D`, `σ[i+D-1] += 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule parameter for KSPM(D).
///
/// `D = 2` is the classical sand pile model; the interval and wave analyses
/// target `D >= 3` but everything here runs for any valid parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    d: u32,
}

impl ModelParams {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(d));
        }
        Ok(ModelParams { d })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Interval length and alphabet size, `D - 1`.
    pub fn interval_len(&self) -> usize {
        self.d as usize - 1
    }

    pub(crate) fn d_us(&self) -> usize {
        self.d as usize
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KSPM({})", self.d)
    }
}

/// A sand pile in slope representation.
///
/// Trailing zeros are implicit: two configurations are equal iff their
/// canonical (trimmed) forms are equal, and serialization always emits the
/// canonical form.
#[derive(Debug, Clone, Default)]
pub struct Configuration {
    slopes: Vec<u32>,
}

impl Configuration {
    /// The empty pile `0^ω`.
    pub fn zero() -> Self {
        Configuration { slopes: Vec::new() }
    }

    pub fn from_slopes(slopes: Vec<u32>) -> Self {
        Configuration { slopes }
    }

    /// `(n, 0^ω)`: all grains stacked on column 0.
    pub fn single_pile(n: u32) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Configuration { slopes: vec![n] }
        }
    }

    /// Slope at `column`; zero beyond the stored prefix.
    pub fn slope(&self, column: usize) -> u32 {
        self.slopes.get(column).copied().unwrap_or(0)
    }

    /// Stored values with trailing zeros trimmed.
    pub fn canonical(&self) -> &[u32] {
        let end = self
            .slopes
            .iter()
            .rposition(|&v| v != 0)
            .map_or(0, |i| i + 1);
        &self.slopes[..end]
    }

    /// Number of columns up to and including the last non-empty one.
    pub fn width(&self) -> usize {
        self.canonical().len()
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    /// Total grain count `Σ (i+1)·σ[i]`.
    pub fn mass(&self) -> u64 {
        self.canonical()
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u64 + 1) * v as u64)
            .sum()
    }

    /// True iff no column can fire.
    pub fn is_stable(&self, params: &ModelParams) -> bool {
        self.canonical().iter().all(|&v| v < params.d())
    }

    /// Single transition at `column`. Rejects the move when the slope there
    /// is below `D`.
    pub fn fire(&self, column: usize, params: &ModelParams) -> Result<Configuration> {
        let slope = self.slope(column);
        if slope < params.d() {
            return Err(Error::NotFireable {
                column,
                slope,
                d: params.d(),
            });
        }
        let mut out = self.clone();
        out.fire_unchecked(column, params);
        Ok(out)
    }

    pub(crate) fn fire_unchecked(&mut self, column: usize, params: &ModelParams) {
        let target = column + params.d_us() - 1;
        if self.slopes.len() <= target {
            self.slopes.resize(target + 1, 0);
        }
        self.slopes[column] -= params.d();
        if column > 0 {
            self.slopes[column - 1] += params.d() - 1;
        }
        self.slopes[target] += 1;
    }

    /// One grain added on column 0.
    pub fn add_grain(&self) -> Configuration {
        let mut out = self.clone();
        if out.slopes.is_empty() {
            out.slopes.push(0);
        }
        out.slopes[0] += 1;
        out
    }

    /// Canonical slope array as JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self).expect("plain array serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Height picture: suffix sums of the slopes.
    pub fn heights(&self) -> HeightProfile {
        let canon = self.canonical();
        let mut heights = vec![0u64; canon.len()];
        let mut acc = 0u64;
        for i in (0..canon.len()).rev() {
            acc += canon[i] as u64;
            heights[i] = acc;
        }
        HeightProfile { heights }
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.canonical().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Configuration::from_slopes(Vec::deserialize(deserializer)?))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.canonical().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Non-increasing column heights, ultimately zero. Serializes as a plain
/// array, like [`Configuration`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HeightProfile {
    heights: Vec<u64>,
}

impl HeightProfile {
    pub fn values(&self) -> &[u64] {
        &self.heights
    }

    /// Total grain count; equals the mass of the source configuration.
    pub fn total(&self) -> u64 {
        self.heights.iter().sum()
    }

    /// Differences of consecutive heights; round-trips with
    /// [`Configuration::heights`].
    pub fn to_slopes(&self) -> Result<Configuration> {
        let mut slopes = Vec::with_capacity(self.heights.len());
        for i in 0..self.heights.len() {
            let next = self.heights.get(i + 1).copied().unwrap_or(0);
            if self.heights[i] < next {
                return Err(Error::Parse(format!(
                    "heights increase at column {i}: {} < {next}",
                    self.heights[i]
                )));
            }
            slopes.push((self.heights[i] - next) as u32);
        }
        Ok(Configuration::from_slopes(slopes))
    }
}

/// An ordered record of fired columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    firings: Vec<usize>,
}

impl Strategy {
    pub fn new(firings: Vec<usize>) -> Self {
        Strategy { firings }
    }

    pub fn firings(&self) -> &[usize] {
        &self.firings
    }

    pub fn len(&self) -> usize {
        self.firings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.firings.is_empty()
    }

    /// Firing counts per column, `|s|_i`.
    pub fn counts(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for &c in &self.firings {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts
    }
}

/// Working state for repeated stabilization runs. Keeps the slope buffer and
/// the fireable-column set alive across avalanches.
pub(crate) struct Engine {
    params: ModelParams,
    config: Configuration,
    fireable: BTreeSet<usize>,
}

impl Engine {
    pub(crate) fn new(start: Configuration, params: ModelParams) -> Self {
        let mut engine = Engine {
            params,
            config: start,
            fireable: BTreeSet::new(),
        };
        for (i, &v) in engine.config.slopes.iter().enumerate() {
            if v >= params.d() {
                engine.fireable.insert(i);
            }
        }
        engine
    }

    pub(crate) fn config(&self) -> &Configuration {
        &self.config
    }

    pub(crate) fn into_config(self) -> Configuration {
        self.config
    }

    pub(crate) fn add_grain(&mut self) {
        if self.config.slopes.is_empty() {
            self.config.slopes.push(0);
        }
        self.config.slopes[0] += 1;
        self.refresh(0);
    }

    fn refresh(&mut self, column: usize) {
        if self.config.slope(column) >= self.params.d() {
            self.fireable.insert(column);
        } else {
            self.fireable.remove(&column);
        }
    }

    /// Fires the minimal fireable column until stable, appending fired
    /// columns to `strategy`. The budget is a coarse termination guard;
    /// legitimate runs stay far below it.
    pub(crate) fn stabilize_into(&mut self, strategy: &mut Vec<usize>) -> Result<()> {
        let mass = self.config.mass();
        let budget = mass.saturating_mul(mass).saturating_add(16);
        let mut fired = 0u64;
        while let Some(&column) = self.fireable.first() {
            if fired >= budget {
                return Err(Error::BudgetExhausted { budget });
            }
            self.config.fire_unchecked(column, &self.params);
            fired += 1;
            strategy.push(column);
            if column > 0 {
                self.refresh(column - 1);
            }
            self.refresh(column);
            self.refresh(column + self.params.d_us() - 1);
        }
        Ok(())
    }
}

/// Fires the leftmost fireable column until no transition is possible.
/// Returns the fixed point together with the full leftmost strategy.
pub fn stabilize_leftmost(
    start: &Configuration,
    params: &ModelParams,
) -> Result<(Configuration, Strategy)> {
    let mut engine = Engine::new(start.clone(), *params);
    let mut firings = Vec::new();
    engine.stabilize_into(&mut firings)?;
    Ok((engine.into_config(), Strategy::new(firings)))
}

/// Computes the fixed point of `n` stacked grains by repeated grain addition
/// and leftmost stabilization, starting from the empty pile.
///
/// The observer is invoked once per grain with `(k, avalanche, fixed point
/// after k grains)`; avalanches fire each column at most once, so the
/// incremental pass costs one avalanche per grain rather than a fresh
/// stabilization of the whole pile.
pub fn fixed_point<F>(params: &ModelParams, n: u64, mut observer: F) -> Result<Configuration>
where
    F: FnMut(u64, &Strategy, &Configuration),
{
    let mut engine = Engine::new(Configuration::zero(), *params);
    for k in 1..=n {
        engine.add_grain();
        let mut firings = Vec::new();
        engine.stabilize_into(&mut firings)?;
        let avalanche = Strategy::new(firings);
        observer(k, &avalanche, engine.config());
    }
    Ok(engine.into_config())
}
