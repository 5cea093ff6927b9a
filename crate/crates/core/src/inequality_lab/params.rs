use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::generators::random::{derive_seed, rng_from};

pub const ALPHA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const ALPHA_DRAWS: usize = 3;
pub const R_GRID: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
pub const R_DOWN_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const PQ_GRID: [(f64, f64); 3] = [(2.0, 2.0), (3.0, 1.5), (4.0, 4.0 / 3.0)];

/// Bounded multiplier for the √t·h, √t/h function pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedFactor {
    /// 1 + t/(1+t), values in [1, 2)
    Saturating,
    /// (3 + sin t)/2, values in [1, 2]
    Oscillating,
}

impl BoundedFactor {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            BoundedFactor::Saturating => 1.0 + t / (1.0 + t),
            BoundedFactor::Oscillating => 0.5 * (3.0 + t.sin()),
        }
    }
}

/// Nonnegative continuous f, g on [0, ∞) with f(t)g(t) = t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FgPair {
    /// f = t^α, g = t^{1−α}
    Power { alpha: f64 },
    /// f = √t·h, g = √t/h
    SqrtScaled { h: BoundedFactor },
}

impl FgPair {
    pub fn f(self, t: f64) -> f64 {
        match self {
            FgPair::Power { alpha } => pow0(t, alpha),
            FgPair::SqrtScaled { h } => t.max(0.0).sqrt() * h.eval(t),
        }
    }

    pub fn g(self, t: f64) -> f64 {
        match self {
            FgPair::Power { alpha } => pow0(t, 1.0 - alpha),
            FgPair::SqrtScaled { h } => t.max(0.0).sqrt() / h.eval(t),
        }
    }
}

/// t^s on [0, ∞) with 0^s = 0 for all s ≥ 0.
pub(crate) fn pow0(t: f64, s: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t.powf(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ScalarFn {
    Square,
    ExpMinusOne,
    Power { r: f64 },
    Sqrt,
    Log1p,
}

impl ScalarFn {
    pub fn eval(self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            ScalarFn::Square => t * t,
            ScalarFn::ExpMinusOne => t.exp_m1(),
            ScalarFn::Power { r } => pow0(t, r),
            ScalarFn::Sqrt => t.sqrt(),
            ScalarFn::Log1p => t.ln_1p(),
        }
    }

    pub fn is_convex(self) -> bool {
        match self {
            ScalarFn::Square | ScalarFn::ExpMinusOne => true,
            ScalarFn::Power { r } => r >= 1.0,
            ScalarFn::Sqrt | ScalarFn::Log1p => false,
        }
    }
}

/// Sampled free parameters of one check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fg: Option<FgPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub func: Option<ScalarFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

impl Params {
    pub fn alpha(alpha: f64) -> Self {
        Params { alpha: Some(alpha), ..Default::default() }
    }

    pub fn to_map(&self) -> Map<String, Value> {
        match serde_json::to_value(self).expect("params serialize") {
            Value::Object(m) => m,
            _ => unreachable!("params serialize to an object"),
        }
    }

    pub(crate) fn req_alpha(&self) -> f64 {
        self.alpha.unwrap_or(0.5)
    }

    pub(crate) fn req_r(&self) -> f64 {
        self.r.unwrap_or(1.0)
    }

    pub(crate) fn req_p(&self) -> f64 {
        self.p.unwrap_or(2.0)
    }

    pub(crate) fn req_fg(&self) -> FgPair {
        self.fg.unwrap_or(FgPair::Power { alpha: self.req_alpha() })
    }

    /// Conjugate exponent pair, completing whichever side is missing.
    pub(crate) fn req_pq(&self) -> (f64, f64) {
        match (self.p, self.q) {
            (Some(p), Some(q)) => (p, q),
            (Some(p), None) => (p, p / (p - 1.0)),
            (None, Some(q)) => (q / (q - 1.0), q),
            (None, None) => (2.0, 2.0),
        }
    }
}

/// The α values for one instance: the fixed grid plus three seeded uniform draws.
pub fn alpha_values(seed: u64) -> Vec<f64> {
    let mut rng = rng_from(derive_seed(seed, 0xA1FA));
    let mut v = ALPHA_GRID.to_vec();
    v.extend((0..ALPHA_DRAWS).map(|_| rng.random_range(0.0..1.0)));
    v
}

pub fn fg_values(seed: u64) -> Vec<FgPair> {
    let mut v: Vec<FgPair> = alpha_values(seed).into_iter().map(|alpha| FgPair::Power { alpha }).collect();
    v.push(FgPair::SqrtScaled { h: BoundedFactor::Saturating });
    v.push(FgPair::SqrtScaled { h: BoundedFactor::Oscillating });
    v
}
