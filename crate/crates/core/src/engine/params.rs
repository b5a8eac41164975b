use serde::{Deserialize, Serialize};

use crate::learner::HoeffdingConfig;
use crate::{Error, Result};

/// How the next active state is chosen from the posteriors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Hoeffding-bound test over ADWIN-managed posterior windows.
    Continuous,
    /// Maximum a posteriori state every step.
    Map,
}

/// Engine parameters with their standard defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectParams {
    /// Risk for the selection test (`delta_sel`).
    pub hoeffding_risk: f64,
    /// ADWIN risk used to window each state's posterior history.
    pub state_estimator_risk: f64,
    pub min_state_likelihood: f64,
    pub b_prior_multiplier: f64,
    pub min_prior: f64,
    pub multihop_multiplier: f64,
    pub multihop_steps: usize,
    pub prev_state_prior: f64,
    pub merge_correlation: f64,
    /// Observations between merge checks.
    pub merge_period: usize,
    /// Posterior samples both states need before they can be compared.
    pub merge_min_samples: usize,
    /// Length of the posterior history kept for merging.
    pub merge_history: usize,
    /// Minimum std of both posterior histories for a merge to be considered.
    pub merge_min_std: f64,
    /// Active-state fingerprint captures before selection resumes after a new state.
    pub state_grace: usize,
    /// Captures a representation needs before its similarities are recorded.
    pub fingerprint_grace: usize,
    /// Recent similarity values a state's Gaussian is fitted to.
    pub similarity_window: usize,
    /// Captures after which a representation starts forgetting old ones (0: never).
    pub representation_horizon: usize,
    pub window: usize,
    pub buffer_ratio: f64,
    /// Minimum stable window for a capture, as a fraction of `window`.
    pub min_window_ratio: f64,
    /// Stable observations between fingerprint captures.
    pub fingerprint_period: usize,
    /// Steps between fingerprints of the active concept taken through each
    /// inactive state's classifier, which then join the Fisher weighting.
    /// 0 disables them.
    pub nonactive_fingerprint_period: usize,
    /// Drift detector sensitivity.
    pub adwin_delta: f64,
    /// Steps `D^t` stays at 1 after an alert.
    pub drift_period: usize,
    /// Clamp range of the cosine distance behind a similarity score. The same
    /// range bounds the similarity standard deviation in the likelihood.
    pub similarity_min: f64,
    pub similarity_max: f64,
    pub selection: SelectionMode,
    pub uniform_prior: bool,
    pub merging: bool,
    pub tree: HoeffdingConfig,
}

impl Default for SelectParams {
    fn default() -> Self {
        Self {
            hoeffding_risk: 0.75,
            state_estimator_risk: 0.5,
            min_state_likelihood: 0.005,
            b_prior_multiplier: 0.4,
            min_prior: 0.7,
            multihop_multiplier: 0.7,
            multihop_steps: 3,
            prev_state_prior: 50.0,
            merge_correlation: 0.95,
            merge_period: 500,
            merge_min_samples: 30,
            merge_history: 500,
            merge_min_std: 0.02,
            state_grace: 10,
            fingerprint_grace: 10,
            similarity_window: 500,
            representation_horizon: 0,
            window: 100,
            buffer_ratio: 0.2,
            min_window_ratio: 0.65,
            fingerprint_period: 15,
            nonactive_fingerprint_period: 0,
            adwin_delta: 0.05,
            drift_period: 100,
            similarity_min: 0.015,
            similarity_max: 0.175,
            selection: SelectionMode::Continuous,
            uniform_prior: false,
            merging: true,
            tree: HoeffdingConfig::default(),
        }
    }
}

macro_rules! param_table {
    ($($key:literal => $field:ident : $kind:ident),* $(,)?) => {
        /// Keys accepted by [`SelectParams::set`].
        pub const PARAM_KEYS: &[&str] = &[$($key,)* "selection", "ht_grace_period", "ht_split_confidence", "ht_tie_threshold"];

        impl SelectParams {
            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                match key {
                    $($key => self.$field = param_table!(@parse $kind, key, value),)*
                    "selection" => {
                        self.selection = match value.trim() {
                            "continuous" => SelectionMode::Continuous,
                            "map" => SelectionMode::Map,
                            other => return Err(bad_value(key, other)),
                        }
                    }
                    "ht_grace_period" => self.tree.grace_period = param_table!(@parse usize, key, value),
                    "ht_split_confidence" => self.tree.split_confidence = param_table!(@parse f64, key, value),
                    "ht_tie_threshold" => self.tree.tie_threshold = param_table!(@parse f64, key, value),
                    _ => {
                        return Err(Error::UnknownParam {
                            key: key.to_string(),
                            valid: PARAM_KEYS.join(", "),
                        })
                    }
                }
                Ok(())
            }

            /// Every parameter as `(key, value)` in [`PARAM_KEYS`] order.
            pub fn to_kv(&self) -> Vec<(String, String)> {
                let mut kv = vec![$(($key.to_string(), self.$field.to_string()),)*];
                kv.push(("selection".into(), match self.selection {
                    SelectionMode::Continuous => "continuous".into(),
                    SelectionMode::Map => "map".into(),
                }));
                kv.push(("ht_grace_period".into(), self.tree.grace_period.to_string()));
                kv.push(("ht_split_confidence".into(), self.tree.split_confidence.to_string()));
                kv.push(("ht_tie_threshold".into(), self.tree.tie_threshold.to_string()));
                kv
            }
        }
    };
    (@parse $kind:ident, $key:expr, $value:expr) => {
        $value.trim().parse::<$kind>().map_err(|_| bad_value($key, $value))?
    };
}

param_table! {
    "hoeffding_risk" => hoeffding_risk: f64,
    "state_estimator_risk" => state_estimator_risk: f64,
    "min_state_likelihood" => min_state_likelihood: f64,
    "b_prior_multiplier" => b_prior_multiplier: f64,
    "min_prior" => min_prior: f64,
    "multihop_multiplier" => multihop_multiplier: f64,
    "multihop_steps" => multihop_steps: usize,
    "prev_state_prior" => prev_state_prior: f64,
    "merge_correlation" => merge_correlation: f64,
    "merge_period" => merge_period: usize,
    "merge_min_samples" => merge_min_samples: usize,
    "merge_history" => merge_history: usize,
    "merge_min_std" => merge_min_std: f64,
    "state_grace" => state_grace: usize,
    "fingerprint_grace" => fingerprint_grace: usize,
    "similarity_window" => similarity_window: usize,
    "representation_horizon" => representation_horizon: usize,
    "window" => window: usize,
    "buffer_ratio" => buffer_ratio: f64,
    "min_window_ratio" => min_window_ratio: f64,
    "fingerprint_period" => fingerprint_period: usize,
    "nonactive_fingerprint_period" => nonactive_fingerprint_period: usize,
    "adwin_delta" => adwin_delta: f64,
    "drift_period" => drift_period: usize,
    "similarity_min" => similarity_min: f64,
    "similarity_max" => similarity_max: f64,
    "uniform_prior" => uniform_prior: bool,
    "merging" => merging: bool,
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::Input(format!("invalid value `{value}` for parameter `{key}`"))
}

impl SelectParams {
    pub fn min_window(&self) -> usize {
        (self.window as f64 * self.min_window_ratio).round() as usize
    }

    pub fn buffer_len(&self) -> usize {
        (self.window as f64 * self.buffer_ratio).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::Input(format!("`{name}` must lie in (0, 1], got {v}")))
            }
        };
        prob("hoeffding_risk", self.hoeffding_risk)?;
        prob("state_estimator_risk", self.state_estimator_risk)?;
        prob("adwin_delta", self.adwin_delta)?;
        prob("min_state_likelihood", self.min_state_likelihood)?;
        prob("min_window_ratio", self.min_window_ratio)?;
        if self.window < 2 || self.fingerprint_period == 0 || self.multihop_steps == 0 || self.similarity_window == 0 {
            return Err(Error::Input(
                "window must be >= 2; fingerprint_period, multihop_steps and similarity_window >= 1".into(),
            ));
        }
        if !(self.similarity_min > 0.0 && self.similarity_min < self.similarity_max) {
            return Err(Error::Input("similarity_min must be positive and below similarity_max".into()));
        }
        if self.min_prior <= 0.0 {
            return Err(Error::Input("min_prior must be positive".into()));
        }
        Ok(())
    }
}
