//! Task and individual similarity.
//!
//! Tasks are compared through a fixed attribute vector (est, let, duration,
//! profit). Each attribute is weighted by its coefficient of variation,
//! normalised over all attributes; the similarity of two tasks is
//! `1 / (1 + d)` with `d` the weighted Euclidean distance. Two permutations are
//! compared position by position through the task similarity matrix.

use serde::{Deserialize, Serialize};

use crate::error::SimilarityError;
use crate::model::Task;

/// Column order of [`attribute_matrix`].
pub const ATTRIBUTES: [&str; 4] = ["est", "let", "duration", "profit"];

/// One row per task: `[est, let, duration, profit]`.
pub fn attribute_matrix(tasks: &[Task]) -> Vec<[f64; 4]> {
    tasks.iter().map(|t| [t.est as f64, t.latest_end as f64, t.duration as f64, f64::from(t.profit)]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeWeights(pub Vec<f64>);

impl AttributeWeights {
    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Reciprocal-variance weights: per column `y = S / |mean|` with `S` the
/// sample standard deviation, then `w = y / sum(y)`. Constant columns get
/// `y = 0`; if every column is constant the weights are uniform.
pub fn rvw_weights<R: AsRef<[f64]>>(rows: &[R]) -> Result<AttributeWeights, SimilarityError> {
    let n = rows.len();
    if n < 2 {
        return Err(SimilarityError::TooFewRows { needed: 2, got: n });
    }
    let m = rows[0].as_ref().len();
    if rows.iter().any(|r| r.as_ref().len() != m) {
        return Err(SimilarityError::Ragged);
    }
    let mut coeffs = Vec::with_capacity(m);
    for col in 0..m {
        let mean = rows.iter().map(|r| r.as_ref()[col]).sum::<f64>() / n as f64;
        let ss = rows.iter().map(|r| (r.as_ref()[col] - mean).powi(2)).sum::<f64>();
        let dispersion = (ss / (n - 1) as f64).sqrt();
        if dispersion == 0.0 {
            coeffs.push(0.0);
        } else if mean == 0.0 {
            return Err(SimilarityError::DegenerateAttribute(col));
        } else {
            coeffs.push(dispersion / mean.abs());
        }
    }
    let total: f64 = coeffs.iter().sum();
    if total == 0.0 {
        return Ok(AttributeWeights::uniform(m));
    }
    Ok(AttributeWeights(coeffs.into_iter().map(|y| y / total).collect()))
}

pub fn weighted_distance(x: &[f64], y: &[f64], weights: &[f64]) -> f64 {
    x.iter().zip(y).zip(weights).map(|((a, b), w)| w * (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub fn similarity_from_distance(d: f64) -> f64 {
    1.0 / (1.0 + d)
}

/// Dense symmetric matrix of pairwise task similarities, indexed by task
/// position in the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSimilarityMatrix {
    n: usize,
    data: Vec<f64>,
    weights: AttributeWeights,
}

impl TaskSimilarityMatrix {
    /// Weights from [`rvw_weights`] over `tasks`; fewer than two tasks get uniform weights.
    pub fn for_tasks(tasks: &[Task]) -> Result<Self, SimilarityError> {
        let rows = attribute_matrix(tasks);
        let weights = if rows.len() < 2 { AttributeWeights::uniform(ATTRIBUTES.len()) } else { rvw_weights(&rows)? };
        Ok(Self::build(&rows, weights))
    }

    pub fn build<R: AsRef<[f64]>>(rows: &[R], weights: AttributeWeights) -> Self {
        let n = rows.len();
        let mut data = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = similarity_from_distance(weighted_distance(rows[i].as_ref(), rows[j].as_ref(), &weights.0));
                data[i * n + j] = s;
                data[j * n + i] = s;
            }
        }
        Self { n, data, weights }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn weights(&self) -> &AttributeWeights {
        &self.weights
    }
}

/// Mean position-wise task similarity of two permutations (task indices).
pub fn individual_similarity(a: &[usize], b: &[usize], ts: &TaskSimilarityMatrix) -> Result<f64, SimilarityError> {
    if a.len() != b.len() {
        return Err(SimilarityError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| ts.get(x, y)).sum::<f64>() / a.len() as f64)
}

/// Similarity threshold of generation `x` out of `m`:
/// `ave - std * (1 - exp(-ln2 * (x - 1) / (m - 1)))`.
pub fn generation_threshold(x: usize, m: usize, ave: f64, std: f64) -> f64 {
    debug_assert!(m >= 2 && (1..=m).contains(&x));
    let progress = (x as f64 - 1.0) / (m as f64 - 1.0);
    ave - std * (1.0 - (-std::f64::consts::LN_2 * progress).exp())
}

/// Mean and sample standard deviation; a single value has deviation 0.
pub fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Similarities of every unordered pair `(i, j)`, `i < j`, in row-major order.
pub fn pairwise_similarities<P: AsRef<[usize]>>(
    population: &[P],
    ts: &TaskSimilarityMatrix,
) -> Result<Vec<f64>, SimilarityError> {
    let mut out = Vec::with_capacity(population.len() * population.len().saturating_sub(1) / 2);
    for i in 0..population.len() {
        for j in (i + 1)..population.len() {
            out.push(individual_similarity(population[i].as_ref(), population[j].as_ref(), ts)?);
        }
    }
    Ok(out)
}

/// `(ave, std)` of the pairwise individual similarities of a population.
pub fn population_similarity_stats<P: AsRef<[usize]>>(
    population: &[P],
    ts: &TaskSimilarityMatrix,
) -> Result<(f64, f64), SimilarityError> {
    if population.len() < 2 {
        return Err(SimilarityError::PopulationTooSmall(population.len()));
    }
    Ok(mean_and_sample_std(&pairwise_similarities(population, ts)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::task;
    use proptest::prelude::*;

    #[test]
    fn attribute_rows_are_est_let_duration_profit() {
        let m = attribute_matrix(&[task(1, 0, 100, 10, 5)]);
        assert_eq!(m, vec![[0.0, 100.0, 10.0, 5.0]]);
        assert_eq!(ATTRIBUTES[2], "duration");
        let tasks: Vec<_> = (0..7).map(|i| task(i, i as i64, 100, 10, 5)).collect();
        assert_eq!(attribute_matrix(&tasks).len(), 7);
    }

    #[test]
    fn constant_column_gets_zero_weight() {
        let w = rvw_weights(&[[5.0, 1.0], [5.0, 4.0], [5.0, 9.0]]).unwrap();
        assert_eq!(w.0, vec![0.0, 1.0]);
        let w = rvw_weights(&[[1.0, 2.0], [3.0, 2.0]]).unwrap();
        assert!((w.0[0] - 1.0).abs() < 1e-12 && w.0[1].abs() < 1e-12);
    }

    #[test]
    fn identical_columns_share_weight_equally() {
        let rows = [[1.0, 1.0, 1.0, 1.0], [4.0, 4.0, 4.0, 4.0], [2.0, 2.0, 2.0, 2.0]];
        let w = rvw_weights(&rows).unwrap();
        for x in w.0 {
            assert!((x - 0.25).abs() < 1e-12);
        }
        let w = rvw_weights(&[[3.0, 3.0], [3.0, 3.0]]).unwrap();
        assert_eq!(w.0, vec![0.5, 0.5]);
    }

    #[test]
    fn rvw_error_paths() {
        assert!(matches!(rvw_weights(&[[1.0]]), Err(SimilarityError::TooFewRows { .. })));
        assert_eq!(rvw_weights(&[[-1.0, 2.0], [1.0, 3.0]]), Err(SimilarityError::DegenerateAttribute(0)));
        let ragged: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![1.0]];
        assert_eq!(rvw_weights(&ragged), Err(SimilarityError::Ragged));
    }

    #[test]
    fn weighted_distance_example() {
        let w = AttributeWeights(vec![0.5, 0.5, 0.0, 0.0]);
        let ts = TaskSimilarityMatrix::build(&[[1.0, 2.0, 7.0, 7.0], [3.0, 4.0, 0.0, 1.0]], w);
        assert!((ts.get(0, 1) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(ts.get(0, 1), ts.get(1, 0));
        assert_eq!(ts.get(0, 0), 1.0);
    }

    #[test]
    fn individual_similarity_cases() {
        let w = AttributeWeights(vec![1.0]);
        // s(0,1) = 1/(1+1) = 0.5, s(0,2) = 1/(1+3) = 0.25, s(1,2) = 1/3
        let ts = TaskSimilarityMatrix::build(&[[0.0], [1.0], [3.0]], w);
        assert_eq!(individual_similarity(&[0, 1, 2], &[0, 1, 2], &ts).unwrap(), 1.0);
        let v = individual_similarity(&[0, 0], &[1, 2], &ts).unwrap();
        assert!((v - 0.375).abs() < 1e-12);
        let a = [2, 0, 1];
        let b = [0, 1, 2];
        assert_eq!(individual_similarity(&a, &b, &ts).unwrap(), individual_similarity(&b, &a, &ts).unwrap());
        assert!(matches!(individual_similarity(&[0], &[0, 1], &ts), Err(SimilarityError::LengthMismatch(1, 2))));
    }

    #[test]
    fn threshold_endpoints_and_monotonicity() {
        assert_eq!(generation_threshold(1, 50, 0.8, 0.2), 0.8);
        assert!((generation_threshold(50, 50, 0.8, 0.2) - 0.7).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for x in 1..=50 {
            let f = generation_threshold(x, 50, 0.8, 0.2);
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn population_stats() {
        let ts =
            TaskSimilarityMatrix::for_tasks(&[task(0, 0, 50, 10, 1), task(1, 30, 90, 20, 4), task(2, 5, 500, 60, 9)])
                .unwrap();
        let same = vec![vec![0, 1, 2]; 4];
        let (ave, std) = population_similarity_stats(&same, &ts).unwrap();
        assert_eq!((ave, std), (1.0, 0.0));

        let two = vec![vec![0, 1, 2], vec![2, 1, 0]];
        let (ave, std) = population_similarity_stats(&two, &ts).unwrap();
        assert!((ave - individual_similarity(&two[0], &two[1], &ts).unwrap()).abs() < 1e-15);
        assert_eq!(std, 0.0);

        let (ave, std) = mean_and_sample_std(&[0.2, 0.4, 0.6]);
        assert!((ave - 0.4).abs() < 1e-12 && (std - 0.2).abs() < 1e-12);

        assert!(matches!(population_similarity_stats(&same[..1], &ts), Err(SimilarityError::PopulationTooSmall(1))));
    }

    fn rows_strategy() -> impl Strategy<Value = Vec<[f64; 4]>> {
        prop::collection::vec(
            (0u32..5000, 1u32..400, 1u32..200, 1u32..20).prop_map(|(e, s, d, p)| {
                let est = e as f64;
                [est, est + (d + s) as f64, d as f64, p as f64]
            }),
            2..20,
        )
    }

    proptest! {
        #[test]
        fn similarity_is_symmetric_and_bounded(rows in rows_strategy()) {
            let w = rvw_weights(&rows).unwrap();
            let ts = TaskSimilarityMatrix::build(&rows, w);
            for i in 0..rows.len() {
                prop_assert_eq!(ts.get(i, i), 1.0);
                for j in 0..rows.len() {
                    let s = ts.get(i, j);
                    prop_assert!(s > 0.0 && s <= 1.0);
                    prop_assert_eq!(s, ts.get(j, i));
                    if rows[i] == rows[j] { prop_assert_eq!(s, 1.0); }
                }
            }
        }

        #[test]
        fn weights_ignore_column_scale(rows in rows_strategy(), col in 0usize..4, scale in 0.01f64..100.0) {
            let base = rvw_weights(&rows).unwrap();
            let scaled_rows: Vec<[f64; 4]> = rows.iter().map(|r| { let mut r = *r; r[col] *= scale; r }).collect();
            let scaled = rvw_weights(&scaled_rows).unwrap();
            for (a, b) in base.0.iter().zip(&scaled.0) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            let total: f64 = base.0.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
