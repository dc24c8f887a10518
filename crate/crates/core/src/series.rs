use crate::error::{Error, Result};

/// Ordered real observations with optional time labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            labels: None,
        }
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::domain(format!(
                "label count {} does not match value count {}",
                labels.len(),
                values.len()
            )));
        }
        Ok(Self {
            values,
            labels: Some(labels),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of the 1-based observation `i`, falling back to `i` itself.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) if i >= 1 && i <= labels.len() => labels[i - 1].clone(),
            _ => i.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same labels, new values. Lengths must agree.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            labels: self.labels.clone(),
        }
    }
}

impl From<Vec<f64>> for TimeSeries {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
