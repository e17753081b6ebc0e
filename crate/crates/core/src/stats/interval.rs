use serde::{Deserialize, Serialize};

/// A closed real interval; either endpoint may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn symmetric(center: f64, half_width: f64) -> Self {
        Self { lower: center - half_width, upper: center + half_width }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    /// `self ⊇ other`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

/// Per-target intervals certified jointly at level `1 − alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    pub entries: Vec<(usize, Interval)>,
    pub alpha: f64,
}

impl IntervalSet {
    pub fn empty(alpha: f64) -> Self {
        Self { entries: Vec::new(), alpha }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> Option<&Interval> {
        self.entries.iter().find(|(i, _)| *i == index).map(|(_, iv)| iv)
    }

    /// True when every interval covers `truth[index]`.
    pub fn covers(&self, truth: &[f64]) -> bool {
        self.entries.iter().all(|(i, iv)| iv.contains(truth[*i]))
    }

    /// Largest interval width in the set, `None` when empty.
    pub fn max_width(&self) -> Option<f64> {
        self.entries.iter().map(|(_, iv)| iv.width()).reduce(f64::max)
    }
}

