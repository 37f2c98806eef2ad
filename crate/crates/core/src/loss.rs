//! Prediction losses.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossSpec {
    /// `100 * [y != y']`, i.e. misclassification in percent.
    ZeroOneTimes100,
    /// `|y - y'|` on 1-based ordinal labels.
    Mae,
}

impl LossSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LossSpec::ZeroOneTimes100 => "zero_one",
            LossSpec::Mae => "mae",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero_one" | "01" | "zero-one" => Ok(LossSpec::ZeroOneTimes100),
            "mae" => Ok(LossSpec::Mae),
            other => Err(Error::Config(format!("unknown loss '{other}'"))),
        }
    }

    /// Loss without range checking; labels are 1-based.
    #[inline]
    pub fn eval_unchecked(&self, y_true: usize, y_pred: usize) -> f64 {
        match self {
            LossSpec::ZeroOneTimes100 => {
                if y_true == y_pred {
                    0.0
                } else {
                    100.0
                }
            }
            LossSpec::Mae => y_true.abs_diff(y_pred) as f64,
        }
    }
}

/// Loss of predicting `y_pred` when the truth is `y_true`, both in `1..=num_classes`.
pub fn evaluate_loss(
    spec: LossSpec,
    num_classes: usize,
    y_true: usize,
    y_pred: usize,
) -> Result<f64> {
    for y in [y_true, y_pred] {
        if y == 0 || y > num_classes {
            return Err(Error::Domain(format!(
                "label {y} outside 1..={num_classes}"
            )));
        }
    }
    Ok(spec.eval_unchecked(y_true, y_pred))
}

/// Per-sample losses of `predictions` against the dataset labels.
pub fn loss_vector(spec: LossSpec, dataset: &Dataset, predictions: &[usize]) -> Result<Vec<f64>> {
    if predictions.len() != dataset.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} samples",
            predictions.len(),
            dataset.len()
        )));
    }
    dataset
        .labels()
        .iter()
        .zip(predictions)
        .map(|(&y, &p)| evaluate_loss(spec, dataset.num_classes(), y, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(labels: Vec<usize>, classes: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = labels.iter().map(|_| vec![0.0]).collect();
        Dataset::from_rows(&rows, labels, classes).unwrap()
    }

    #[test]
    fn zero_one_examples() {
        assert_eq!(evaluate_loss(LossSpec::ZeroOneTimes100, 3, 3, 3).unwrap(), 0.0);
        assert_eq!(evaluate_loss(LossSpec::ZeroOneTimes100, 3, 3, 1).unwrap(), 100.0);
    }

    #[test]
    fn mae_example() {
        assert_eq!(evaluate_loss(LossSpec::Mae, 10, 7, 4).unwrap(), 3.0);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(matches!(
            evaluate_loss(LossSpec::Mae, 3, 4, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evaluate_loss(LossSpec::Mae, 3, 1, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn loss_vector_examples() {
        let d = toy(vec![1, 2], 2);
        assert_eq!(
            loss_vector(LossSpec::ZeroOneTimes100, &d, &[1, 1]).unwrap(),
            vec![0.0, 100.0]
        );
        let d = toy(vec![5, 5], 10);
        assert_eq!(loss_vector(LossSpec::Mae, &d, &[5, 5]).unwrap(), vec![0.0, 0.0]);
        let d = toy(vec![1, 10], 10);
        assert_eq!(loss_vector(LossSpec::Mae, &d, &[2, 7]).unwrap(), vec![1.0, 3.0]);
        assert!(matches!(
            loss_vector(LossSpec::Mae, &d, &[1]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn identity_has_zero_loss() {
        for spec in [LossSpec::ZeroOneTimes100, LossSpec::Mae] {
            for y in 1..=6 {
                assert_eq!(evaluate_loss(spec, 6, y, y).unwrap(), 0.0);
            }
        }
    }
}
