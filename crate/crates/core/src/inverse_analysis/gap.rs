use serde::Serialize;

/// Index attached to one measured discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapIndex {
    Lag { lag: i64 },
    Pair { t: i64, tau: i64 },
    Order { order: usize },
    OrderLag { order: usize, lag: usize },
    Frequency { omega: f64 },
}

/// Measured discrepancies paired with an envelope shape at the same
/// indices; `constant_estimate` is the smallest `𝒦` with
/// `measured ≤ 𝒦 · bound` everywhere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub label: String,
    pub indices: Vec<GapIndex>,
    pub measured: Vec<f64>,
    pub bound: Vec<f64>,
    pub constant_estimate: f64,
    /// Second envelope where the theory states two variants.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_bound: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_constant: Option<f64>,
}

/// `max measured/bound`; a positive measurement against a zero bound gives
/// infinity, `0/0` is ignored.
pub fn max_ratio(measured: &[f64], bound: &[f64]) -> f64 {
    measured
        .iter()
        .zip(bound)
        .map(|(&m, &b)| {
            if b > 0.0 {
                m / b
            } else if m > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

impl GapReport {
    pub fn new(label: impl Into<String>, indices: Vec<GapIndex>, measured: Vec<f64>, bound: Vec<f64>) -> Self {
        assert_eq!(indices.len(), measured.len());
        assert_eq!(measured.len(), bound.len());
        let constant_estimate = max_ratio(&measured, &bound);
        GapReport {
            label: label.into(),
            indices,
            measured,
            bound,
            constant_estimate,
            alt_bound: None,
            alt_constant: None,
        }
    }

    pub fn with_alt(mut self, alt: Vec<f64>) -> Self {
        assert_eq!(alt.len(), self.measured.len());
        self.alt_constant = Some(max_ratio(&self.measured, &alt));
        self.alt_bound = Some(alt);
        self
    }

    pub fn len(&self) -> usize {
        self.measured.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measured.is_empty()
    }

    pub fn max_measured(&self) -> f64 {
        self.measured.iter().copied().fold(0.0, f64::max)
    }

    /// Measured value at the first index satisfying `pred`.
    pub fn find(&self, pred: impl Fn(&GapIndex) -> bool) -> Option<f64> {
        self.indices.iter().position(pred).map(|i| self.measured[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_max_ratio() {
        let g = GapReport::new(
            "x",
            vec![GapIndex::Lag { lag: 0 }, GapIndex::Lag { lag: 1 }, GapIndex::Lag { lag: 2 }],
            vec![1.0, 1.0, 0.0],
            vec![2.0, 0.25, 0.0],
        );
        assert_eq!(g.constant_estimate, 4.0);
        assert_eq!(g.find(|i| matches!(i, GapIndex::Lag { lag: 1 })), Some(1.0));
        assert_eq!(max_ratio(&[1.0], &[0.0]), f64::INFINITY);
    }
}
