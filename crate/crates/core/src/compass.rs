//! Log-scaled loss between predicted and reference pose properties, the
//! per-feature and total Compass Scores built on it, and the favorability
//! rule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompassError {
    #[error("prediction has {pred} values but truth has {truth}")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("loss weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("invalid loss parameters: {0}")]
    InvalidParams(String),
}

/// Buffers keep the logarithm finite near zero; `epsilon` guards the
/// normalizing denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LanMseParams {
    pub buffer_low: f64,
    pub buffer_high: f64,
    pub epsilon: f64,
    /// Values with magnitude below this use `buffer_low`.
    pub low_threshold: f64,
}

impl Default for LanMseParams {
    fn default() -> Self {
        Self {
            buffer_low: 1.1,
            buffer_high: 1.0,
            epsilon: 1e-5,
            low_threshold: 1.0,
        }
    }
}

impl LanMseParams {
    pub fn validate(&self) -> Result<(), CompassError> {
        let ok = self.buffer_low > 1.0
            && self.buffer_low.is_finite()
            && self.buffer_high > 0.0
            && self.buffer_high <= 1.0
            && self.epsilon > 0.0
            && self.epsilon.is_finite()
            && self.low_threshold.is_finite()
            && self.low_threshold >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(CompassError::InvalidParams(format!("{self:?}")))
        }
    }

    pub fn buffer_for<T: Real>(&self, x: T) -> T {
        if x.abs() < T::lit(self.low_threshold) {
            T::lit(self.buffer_low)
        } else {
            T::lit(self.buffer_high)
        }
    }

    /// `ln(|x| + buffer(x))`.
    pub fn log_transform<T: Real>(&self, x: T) -> T {
        (x.abs() + self.buffer_for(x)).ln()
    }

    /// One element's normalized log error before squaring.
    pub fn normalized_error<T: Real>(&self, pred: T, truth: T) -> T {
        let lt = self.log_transform(truth);
        (lt - self.log_transform(pred)) / (T::lit(2.0) * lt.abs() + T::lit(self.epsilon))
    }
}

/// Mean squared normalized log error over paired values.
pub fn lan_mse<T: Real>(pred: &[T], truth: &[T], params: &LanMseParams) -> Result<T, CompassError> {
    if pred.len() != truth.len() {
        return Err(CompassError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(CompassError::EmptyInput);
    }
    let sum: T = pred
        .iter()
        .zip(truth)
        .map(|(&p, &t)| params.normalized_error(p, t).powi(2))
        .sum();
    Ok(sum / T::from(pred.len()).expect("length fits the scalar type"))
}

/// Loss of a single predicted value against its reference.
pub fn compass_component<T: Real>(pred: T, truth: T, params: &LanMseParams) -> T {
    params.normalized_error(pred, truth).powi(2)
}

/// Binding affinity (kcal/mol), strain energy (kcal/mol) and clash count of
/// one pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcbTriple {
    pub binding_affinity: f64,
    pub strain_energy: f64,
    pub clash_count: u32,
}

impl PcbTriple {
    pub fn new(binding_affinity: f64, strain_energy: f64, clash_count: u32) -> Self {
        Self {
            binding_affinity,
            strain_energy,
            clash_count,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.binding_affinity.is_finite() && self.strain_energy.is_finite()
    }

    fn values(&self) -> [f64; 3] {
        [self.binding_affinity, self.strain_energy, self.clash_count as f64]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompassScores {
    pub affinity: f64,
    pub strain: f64,
    pub clash: f64,
    /// Unweighted mean of the three feature scores.
    pub total: f64,
}

impl CompassScores {
    fn from_parts(affinity: f64, strain: f64, clash: f64) -> Self {
        Self {
            affinity,
            strain,
            clash,
            total: (affinity + strain + clash) / 3.0,
        }
    }
}

pub fn compass_scores(pred: &PcbTriple, truth: &PcbTriple, params: &LanMseParams) -> CompassScores {
    let [pa, ps, pc] = pred.values();
    let [ta, ts, tc] = truth.values();
    CompassScores::from_parts(
        compass_component(pa, ta, params),
        compass_component(ps, ts, params),
        compass_component(pc, tc, params),
    )
}

pub fn compass_total(pred: &PcbTriple, truth: &PcbTriple, params: &LanMseParams) -> f64 {
    compass_scores(pred, truth, params).total
}

/// Feature scores over a batch: each feature's loss is averaged over pairs,
/// then the three are averaged.
pub fn compass_batch(
    pred: &[PcbTriple],
    truth: &[PcbTriple],
    params: &LanMseParams,
) -> Result<CompassScores, CompassError> {
    let column = |xs: &[PcbTriple], k: usize| xs.iter().map(|t| t.values()[k]).collect::<Vec<f64>>();
    let feature = |k: usize| lan_mse(&column(pred, k), &column(truth, k), params);
    Ok(CompassScores::from_parts(feature(0)?, feature(1)?, feature(2)?))
}

/// `l_pose * w + cs_total * (1 - w)`.
pub fn combined_loss<T: Real>(l_pose: T, cs_total: T, w_pose: T) -> Result<T, CompassError> {
    if !(w_pose >= T::zero() && w_pose <= T::one()) {
        return Err(CompassError::WeightOutOfRange(w_pose.to_f64_lossy()));
    }
    Ok(l_pose * w_pose + cs_total * (T::one() - w_pose))
}

/// Largest relative change of the log-difference numerator when every value
/// is multiplied by `k`. Exact scale invariance does not hold with fixed
/// buffers; this measures how far off it is.
pub fn scale_drift<T: Real>(pred: &[T], truth: &[T], k: T, params: &LanMseParams) -> Result<T, CompassError> {
    if pred.len() != truth.len() {
        return Err(CompassError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(CompassError::EmptyInput);
    }
    let num = |p: T, t: T| params.log_transform(t) - params.log_transform(p);
    Ok(pred
        .iter()
        .zip(truth)
        .map(|(&p, &t)| {
            let base = num(p, t);
            let scaled = num(p * k, t * k);
            if base == T::zero() {
                scaled.abs()
            } else {
                ((scaled - base) / base).abs()
            }
        })
        .fold(T::zero(), T::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FavorabilityThresholds {
    pub max_affinity: f64,
    pub max_strain: f64,
    pub max_clashes: f64,
}

impl Default for FavorabilityThresholds {
    fn default() -> Self {
        Self {
            max_affinity: 0.0,
            max_strain: 5.0,
            max_clashes: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Favorability {
    Favorable,
    Unfavorable,
}

impl Favorability {
    pub fn is_favorable(self) -> bool {
        self == Favorability::Favorable
    }
}

/// Favorable only when all three values are strictly below their limits.
pub fn classify_favorability(triple: &PcbTriple, thresholds: &FavorabilityThresholds) -> Favorability {
    if triple.binding_affinity < thresholds.max_affinity
        && triple.strain_energy < thresholds.max_strain
        && (triple.clash_count as f64) < thresholds.max_clashes
    {
        Favorability::Favorable
    } else {
        Favorability::Unfavorable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> LanMseParams {
        LanMseParams::default()
    }

    #[test]
    fn singleton_matches_hand_value() {
        let v = lan_mse(&[1.0], &[10.0], &p()).unwrap();
        let expect = ((11f64.ln() - 2f64.ln()) / (2.0 * 11f64.ln() + 1e-5)).powi(2);
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 0.1264).abs() < 5e-5);
        let v32 = lan_mse(&[1.0f32], &[10.0f32], &p()).unwrap();
        assert!((v32 as f64 - expect).abs() < 1e-6);
    }

    #[test]
    fn zero_and_tiny_inputs() {
        assert_eq!(lan_mse(&[0.0], &[0.0], &p()).unwrap(), 0.0);
        assert_eq!(lan_mse(&[1e-12], &[1e-12], &p()).unwrap(), 0.0);
        assert!(lan_mse(&[1e-12f64], &[-1e-12], &p()).unwrap().is_finite());
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            lan_mse(&[1.0, 2.0], &[1.0], &p()),
            Err(CompassError::LengthMismatch { pred: 2, truth: 1 })
        );
        assert_eq!(lan_mse::<f64>(&[], &[], &p()), Err(CompassError::EmptyInput));
        assert!(LanMseParams { buffer_low: 1.0, ..p() }.validate().is_err());
        assert!(p().validate().is_ok());
    }

    #[test]
    fn exemplar_components() {
        assert_eq!(compass_component(-6.46f64, -6.46, &p()), 0.0);
        let big = compass_component(3505.32f64, -11.33, &p());
        assert!(big.is_finite() && big < 10.0);
        let clash = compass_component(19.0f64, 3.0, &p());
        assert!(clash > 0.0 && clash < 1.0);
    }

    #[test]
    fn total_is_mean_of_components() {
        let truth = PcbTriple::new(-6.46, 0.16, 3);
        let pred = PcbTriple::new(-3.13, 11.9, 19);
        let s = compass_scores(&pred, &truth, &p());
        assert!((s.total - (s.affinity + s.strain + s.clash) / 3.0).abs() < 1e-15);
        assert_eq!(compass_total(&truth, &truth, &p()), 0.0);
        let b = compass_batch(&[pred, truth], &[truth, truth], &p()).unwrap();
        assert!((b.total - s.total / 2.0).abs() < 1e-12);
    }

    #[test]
    fn combined_loss_weights() {
        assert!((combined_loss(1.0f64, 2.0, 0.99).unwrap() - 1.01).abs() < 1e-12);
        assert_eq!(combined_loss(1.5, 2.0, 1.0).unwrap(), 1.5);
        assert_eq!(combined_loss(1.5, 2.0, 0.0).unwrap(), 2.0);
        assert_eq!(combined_loss(1.0, 2.0, 1.5), Err(CompassError::WeightOutOfRange(1.5)));
        assert!(combined_loss(1.0, 2.0, f64::NAN).is_err());
    }

    #[test]
    fn favorability_rule() {
        let t = FavorabilityThresholds::default();
        let f = |a, s, c| classify_favorability(&PcbTriple::new(a, s, c), &t);
        assert_eq!(f(-6.46, 0.16, 3), Favorability::Favorable);
        assert_eq!(f(-3.13, 11.9, 19), Favorability::Unfavorable);
        assert_eq!(f(-0.0, 4.9, 4), Favorability::Unfavorable);
        assert_eq!(f(3505.32, 20.65, 205), Favorability::Unfavorable);
        assert_eq!(f(-1.0, 4.99, 5), Favorability::Unfavorable);
    }

    #[test]
    fn slope_bounded_by_inverse_buffer() {
        let params = p();
        for e in -12..=3 {
            for m in [1.0, 2.5, 5.0] {
                let x = m * 10f64.powi(e);
                let h = 1e-7 * x.max(1.0);
                let b = params.buffer_for(x);
                if params.buffer_for(x + h) != b || params.buffer_for(x - h) != b {
                    continue;
                }
                let slope = (params.log_transform(x + h) - params.log_transform(x - h)) / (2.0 * h);
                assert!(slope.abs() <= 1.0 / b * (1.0 + 1e-6), "slope {slope} at {x}");
            }
        }
    }

    #[test]
    fn small_values_stay_in_band() {
        let params = p();
        for x in [0.0, 1e-12, 0.3, 0.999_999, -0.5] {
            let v = params.log_transform(x);
            assert!(v >= 1.1f64.ln() - 1e-12 && v <= 2.1f64.ln());
        }
    }

    proptest! {
        #[test]
        fn identical_inputs_score_zero(xs in prop::collection::vec(-1e6f64..1e6, 1..50)) {
            prop_assert_eq!(lan_mse(&xs, &xs, &p()).unwrap(), 0.0);
        }

        #[test]
        fn non_negative_and_finite(pairs in prop::collection::vec((-1e9f64..1e9, -1e9f64..1e9), 1..50)) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let v = lan_mse(&a, &b, &p()).unwrap();
            prop_assert!(v >= 0.0 && v.is_finite());
        }

        #[test]
        fn permutation_invariant(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..20), rot in 0usize..20) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let mut shifted = pairs.clone();
            let n = shifted.len();
            shifted.rotate_left(rot % n);
            let (c, d): (Vec<f64>, Vec<f64>) = shifted.into_iter().unzip();
            let x = lan_mse(&a, &b, &p()).unwrap();
            let y = lan_mse(&c, &d, &p()).unwrap();
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }

        #[test]
        fn larger_truth_damps_fixed_numerator(y in 10f64..1e6) {
            let params = p();
            let weight = |t: f64| 1.0 / (2.0 * params.log_transform(t).abs() + params.epsilon);
            prop_assert!(weight(2.0 * y) < weight(y));
        }

        #[test]
        fn approximate_scale_invariance(
            y in 100f64..1e5,
            ratio in prop::sample::select(vec![0.5, 0.8, 1.25, 2.0, 10.0]),
            k in 0.5f64..2.0,
        ) {
            let yhat = (y * ratio).max(100.0);
            prop_assume!(yhat != y);
            let drift = scale_drift(&[yhat], &[y], k, &p()).unwrap();
            prop_assert!(drift < 0.02, "drift {}", drift);
        }
    }
}
