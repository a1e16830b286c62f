//! Synthetic train/test pairs with controlled dataset shift.
//!
//! The base process draws `x ~ N(0, I)` and `y ~ Bernoulli(sigmoid(w·x + b))`,
//! with `w` fixed by the seed and `b` solved so the base rate is hit exactly in
//! expectation. Each [`ShiftKind`] perturbs one factor of `P(x, y)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cv::keyed_hash;
use crate::dataset::{Column, ColumnSpec, FeatureSchema, MonthStamp, TabularDataset};
use crate::gbdt::sigmoid;
use crate::{Error, Result};

/// Norm of the ground-truth coefficient vector.
pub const SIGNAL_NORM: f64 = 1.5;
/// Fraction of the test-period drift already reached by the last training month.
pub const TRAIN_DRIFT_SPAN: f64 = 0.2;
/// Cosine between the covariate drift direction and the coefficient vector.
pub const DRIFT_SIGNAL_ALIGNMENT: f64 = 0.7;
/// Rotation of the concept vector, in radians per unit of magnitude.
pub const CONCEPT_RADIANS_PER_UNIT: f64 = std::f64::consts::FRAC_PI_8;
/// Months the test period spans.
pub const TEST_MONTHS: usize = 3;
pub const LABEL_COLUMN: &str = "y";
pub const MONTH_COLUMN: &str = "month";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    None,
    /// `P(x)` moves along a fixed direction; `P(y | x)` is shared.
    Covariate,
    /// `P(y)` moves; `P(x | y)` is shared.
    PriorProbability,
    /// The coefficient vector rotates; `P(x)` is shared.
    Concept,
    /// Training rows pass a selection gate `s ~ Bernoulli(sigmoid(magnitude · x0))`.
    SelectionBias,
}

impl std::str::FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "none" => ShiftKind::None,
            "covariate" => ShiftKind::Covariate,
            "prior_probability" | "prior" => ShiftKind::PriorProbability,
            "concept" => ShiftKind::Concept,
            "selection_bias" | "selection" => ShiftKind::SelectionBias,
            other => return Err(Error::Spec(format!("unknown shift kind `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShiftSpec {
    pub kind: ShiftKind,
    pub magnitude: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub base_rate: f64,
    pub seed: u64,
    /// Months spanned by the training rows.
    pub months: usize,
    pub first_month: MonthStamp,
}

impl Default for ShiftSpec {
    fn default() -> Self {
        Self {
            kind: ShiftKind::None,
            magnitude: 0.0,
            n_train: 20_000,
            n_test: 4_000,
            n_features: 10,
            base_rate: 0.2,
            seed: 7,
            months: 18,
            first_month: MonthStamp::new(2018, 1).expect("valid month"),
        }
    }
}

impl ShiftSpec {
    pub fn new(kind: ShiftKind, magnitude: f64) -> Self {
        Self {
            kind,
            magnitude,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_sizes(mut self, n_train: usize, n_test: usize) -> Self {
        self.n_train = n_train;
        self.n_test = n_test;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude.is_finite() && self.magnitude >= 0.0) {
            return Err(Error::Spec(format!("magnitude must be non-negative, got {}", self.magnitude)));
        }
        if !(self.base_rate > 0.0 && self.base_rate < 1.0) {
            return Err(Error::Spec(format!("base rate must be in (0, 1), got {}", self.base_rate)));
        }
        if self.n_train == 0 || self.n_test == 0 || self.n_features == 0 || self.months == 0 {
            return Err(Error::Spec("sizes, features and months must be positive".into()));
        }
        if self.kind == ShiftKind::SelectionBias && self.n_features < 1 {
            return Err(Error::Spec("selection bias needs at least one feature".into()));
        }
        if self.kind == ShiftKind::Concept && self.n_features < 2 {
            return Err(Error::Spec("concept shift needs at least two features".into()));
        }
        Ok(())
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::new(
            (0..self.n_features).map(|j| ColumnSpec::numeric(format!("x{j}"))).collect(),
            LABEL_COLUMN,
            Some(MONTH_COLUMN.to_owned()),
        )
        .expect("generated names are unique")
    }

    /// Last training month.
    pub fn last_train_month(&self) -> MonthStamp {
        self.first_month.plus_months(self.months as i64 - 1)
    }

    /// First test month.
    pub fn first_test_month(&self) -> MonthStamp {
        self.first_month.plus_months(self.months as i64)
    }
}

/// Ground truth shared by train and test.
struct Truth {
    w: Vec<f64>,
    /// Unit vector orthogonal to `w`, the rotation plane partner for concept shift.
    w_perp: Vec<f64>,
    /// Unit direction of covariate drift.
    drift: Vec<f64>,
    intercept: f64,
}

fn unit(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Intercept `b` with `E[sigmoid(z + b)] = rate` for `z ~ N(0, sd²)`.
pub fn intercept_for_rate(rate: f64, sd: f64) -> f64 {
    let mean_rate = |b: f64| {
        // trapezoid over ±10 sd
        let steps = 4000;
        let lo = -10.0;
        let h = 20.0 / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let t = lo + i as f64 * h;
            let wgt = if i == 0 || i == steps { 0.5 } else { 1.0 };
            let pdf = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
            acc += wgt * pdf * sigmoid(sd * t + b);
        }
        acc * h
    };
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean_rate(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Truth {
    fn new(spec: &ShiftSpec) -> Self {
        let d = spec.n_features;
        let mut rng = ChaCha8Rng::seed_from_u64(keyed_hash(spec.seed, 0x7447, 0));
        let normal = |rng: &mut ChaCha8Rng| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<_>>();
        let mut w = normal(&mut rng);
        unit(&mut w);
        let mut w_perp = normal(&mut rng);
        let proj = dot(&w_perp, &w);
        w_perp.iter_mut().zip(&w).for_each(|(p, wi)| *p -= proj * wi);
        unit(&mut w_perp);
        let drift = normal(&mut rng);
        // tilt the drift direction toward the signal so the shift moves risk too
        let proj = dot(&drift, &w);
        let mut ortho: Vec<f64> = drift.iter().zip(&w).map(|(d, wi)| d - proj * wi).collect();
        unit(&mut ortho);
        let a = DRIFT_SIGNAL_ALIGNMENT;
        let mut drift: Vec<f64> = w.iter().zip(&ortho).map(|(wi, oi)| a * wi + (1.0 - a * a).sqrt() * oi).collect();
        // with one feature there is no orthogonal part
        unit(&mut drift);
        w.iter_mut().for_each(|x| *x *= SIGNAL_NORM);
        Self {
            intercept: intercept_for_rate(spec.base_rate, SIGNAL_NORM),
            w,
            w_perp,
            drift,
        }
    }

    /// Coefficients rotated by `angle` toward `w_perp`.
    fn rotated(&self, angle: f64) -> Vec<f64> {
        self.w
            .iter()
            .zip(&self.w_perp)
            .map(|(wi, pi)| angle.cos() * wi + angle.sin() * SIGNAL_NORM * pi)
            .collect()
    }
}

struct Draw {
    x: Vec<f64>,
    y: u8,
}

fn draw(rng: &mut ChaCha8Rng, mean_shift: f64, truth: &Truth, coef: &[f64]) -> Draw {
    let x: Vec<f64> = truth
        .drift
        .iter()
        .map(|u| rng.sample::<f64, _>(StandardNormal) + mean_shift * u)
        .collect();
    let p = sigmoid(dot(coef, &x) + truth.intercept);
    let y = u8::from(rng.random::<f64>() < p);
    Draw { x, y }
}

fn assemble(
    spec: &ShiftSpec,
    draws: Vec<Draw>,
    months: Vec<MonthStamp>,
    first_id: u64,
) -> Result<TabularDataset> {
    let n = draws.len();
    let columns = (0..spec.n_features)
        .map(|j| Column::numeric(draws.iter().map(|d| Some(d.x[j])).collect()))
        .collect();
    let labels = draws.iter().map(|d| d.y).collect();
    TabularDataset::new(
        spec.schema(),
        columns,
        Some(labels),
        Some(months),
        (first_id..first_id + n as u64).collect(),
    )
}

/// Fraction of the full shift applied to training month `m`.
fn drift_fraction(spec: &ShiftSpec, m: usize) -> f64 {
    if spec.months <= 1 {
        0.0
    } else {
        TRAIN_DRIFT_SPAN * m as f64 / (spec.months - 1) as f64
    }
}

/// Generates `(train, test)`. Training rows are spread evenly over
/// `spec.months` months in row order, test rows over the following
/// [`TEST_MONTHS`]; covariate and concept drift grow progressively over the
/// training months. Row ids are unique across both outputs.
pub fn generate_shifted(spec: &ShiftSpec) -> Result<(TabularDataset, TabularDataset)> {
    spec.validate()?;
    let truth = Truth::new(spec);
    let mut train_rng = ChaCha8Rng::seed_from_u64(keyed_hash(spec.seed, 0x7447, 1));
    let mut test_rng = ChaCha8Rng::seed_from_u64(keyed_hash(spec.seed, 0x7447, 2));
    let mag = spec.magnitude;
    let angle = mag * CONCEPT_RADIANS_PER_UNIT;

    let train_month = |i: usize| i * spec.months / spec.n_train;
    let mut train = Vec::with_capacity(spec.n_train);
    let mut train_months = Vec::with_capacity(spec.n_train);
    let max_attempts = spec.n_train.saturating_mul(1000);
    let mut attempts = 0usize;
    while train.len() < spec.n_train {
        let m = train_month(train.len());
        let frac = drift_fraction(spec, m);
        let d = match spec.kind {
            ShiftKind::Covariate => draw(&mut train_rng, mag * frac, &truth, &truth.w),
            ShiftKind::Concept => draw(&mut train_rng, 0.0, &truth, &truth.rotated(angle * frac)),
            _ => draw(&mut train_rng, 0.0, &truth, &truth.w),
        };
        if spec.kind == ShiftKind::SelectionBias {
            attempts += 1;
            if attempts > max_attempts {
                return Err(Error::Spec("selection gate accepts too few rows".into()));
            }
            if train_rng.random::<f64>() >= sigmoid(mag * d.x[0]) {
                continue;
            }
        }
        train.push(d);
        train_months.push(spec.first_month.plus_months(m as i64));
    }

    let test_month = |i: usize| spec.months + i * TEST_MONTHS / spec.n_test;
    let test: Vec<Draw> = match spec.kind {
        ShiftKind::Covariate => (0..spec.n_test).map(|_| draw(&mut test_rng, mag, &truth, &truth.w)).collect(),
        ShiftKind::Concept => {
            let coef = truth.rotated(angle);
            (0..spec.n_test).map(|_| draw(&mut test_rng, 0.0, &truth, &coef)).collect()
        }
        ShiftKind::PriorProbability => {
            let target = (spec.base_rate + mag).clamp(0.01, 0.99);
            let n_pos = (target * spec.n_test as f64).round() as usize;
            let n_neg = spec.n_test - n_pos;
            let (mut pos, mut neg) = (Vec::with_capacity(n_pos), Vec::with_capacity(n_neg));
            let budget = spec.n_test.saturating_mul(1000);
            let mut tries = 0usize;
            while pos.len() < n_pos || neg.len() < n_neg {
                tries += 1;
                if tries > budget {
                    return Err(Error::Spec(format!("cannot reach test base rate {target} by rejection")));
                }
                let d = draw(&mut test_rng, 0.0, &truth, &truth.w);
                if d.y == 1 && pos.len() < n_pos {
                    pos.push(d);
                } else if d.y == 0 && neg.len() < n_neg {
                    neg.push(d);
                }
            }
            // interleave deterministically so classes are spread over test months
            let mut out = Vec::with_capacity(spec.n_test);
            let (mut pi, mut ni) = (pos.into_iter(), neg.into_iter());
            for i in 0..spec.n_test {
                let want_pos = ((i + 1) * n_pos).div_ceil(spec.n_test) > (i * n_pos).div_ceil(spec.n_test);
                let next = if want_pos { pi.next().or_else(|| ni.next()) } else { ni.next().or_else(|| pi.next()) };
                out.push(next.expect("counts add up"));
            }
            out
        }
        _ => (0..spec.n_test).map(|_| draw(&mut test_rng, 0.0, &truth, &truth.w)).collect(),
    };
    let test_months = (0..spec.n_test)
        .map(|i| spec.first_month.plus_months(test_month(i) as i64))
        .collect();

    Ok((
        assemble(spec, train, train_months, 0)?,
        assemble(spec, test, test_months, spec.n_train as u64)?,
    ))
}
