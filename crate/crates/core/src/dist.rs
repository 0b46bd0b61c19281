//! Payoff uncertainty models: samplers, exact means, and joint scenario
//! sampling for the payoff-sampling chance root.

use std::fmt;

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};

/// A distribution over one uncertain payoff symbol.
///
/// Parameters are validated by the constructors; `sample` and `mean`
/// assume a valid model.
#[derive(Clone, Debug, PartialEq)]
pub enum PayoffModel {
    Constant { value: f64 },
    Binomial { n: u64, p: f64 },
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    ScaledBeta { scale: f64, alpha: f64, beta: f64 },
    Mixture { components: Vec<(f64, PayoffModel)> },
}

/// Weight sums may deviate from 1 by at most this much.
const WEIGHT_TOLERANCE: f64 = 1e-12;

impl PayoffModel {
    pub fn constant(value: f64) -> Result<Self> {
        ensure_finite("value", value)?;
        Ok(PayoffModel::Constant { value })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        ensure_finite("p", p)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(format!(
                "binomial p must be in [0,1], got {p}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidModel("binomial n must be positive".into()));
        }
        Ok(PayoffModel::Binomial { n, p })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        ensure_finite("mean", mean)?;
        ensure_finite("sd", sd)?;
        if sd <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "normal sd must be positive, got {sd}"
            )));
        }
        Ok(PayoffModel::Normal { mean, sd })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        ensure_finite("lo", lo)?;
        ensure_finite("hi", hi)?;
        if lo >= hi {
            return Err(Error::InvalidModel(format!(
                "uniform requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(PayoffModel::Uniform { lo, hi })
    }

    pub fn scaled_beta(scale: f64, alpha: f64, beta: f64) -> Result<Self> {
        ensure_finite("scale", scale)?;
        ensure_finite("alpha", alpha)?;
        ensure_finite("beta", beta)?;
        if scale <= 0.0 || alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "scaled beta requires positive parameters, got scale={scale} alpha={alpha} beta={beta}"
            )));
        }
        Ok(PayoffModel::ScaledBeta { scale, alpha, beta })
    }

    pub fn mixture(components: Vec<(f64, PayoffModel)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("mixture needs components".into()));
        }
        let mut total = 0.0;
        for (w, _) in &components {
            ensure_finite("weight", *w)?;
            if *w < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "mixture weight {w} is negative"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidModel(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(PayoffModel::Mixture { components })
    }

    /// Exact analytic expectation.
    pub fn mean(&self) -> f64 {
        match self {
            PayoffModel::Constant { value } => *value,
            PayoffModel::Binomial { n, p } => *n as f64 * p,
            PayoffModel::Normal { mean, .. } => *mean,
            PayoffModel::Uniform { lo, hi } => 0.5 * (lo + hi),
            PayoffModel::ScaledBeta { scale, alpha, beta } => scale * alpha / (alpha + beta),
            PayoffModel::Mixture { components } => components
                .iter()
                .map(|(w, model)| w * model.mean())
                .sum(),
        }
    }

    /// One draw. Identical rng states reproduce identical draws; binomial
    /// draws are integers in `[0, n]` and scaled-beta draws lie in
    /// `[0, scale]`. Normal draws may be negative and pass through
    /// unmodified.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PayoffModel::Constant { value } => *value,
            PayoffModel::Binomial { n, p } => {
                let dist = rand_distr::Binomial::new(*n, *p).expect("validated parameters");
                dist.sample(rng) as f64
            }
            PayoffModel::Normal { mean, sd } => {
                let dist = rand_distr::Normal::new(*mean, *sd).expect("validated parameters");
                dist.sample(rng)
            }
            PayoffModel::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            PayoffModel::ScaledBeta { scale, alpha, beta } => {
                let dist = rand_distr::Beta::new(*alpha, *beta).expect("validated parameters");
                scale * dist.sample(rng)
            }
            PayoffModel::Mixture { components } => {
                let roll: f64 = rng.random();
                let mut acc = 0.0;
                for (weight, model) in components {
                    acc += weight;
                    if roll < acc {
                        return model.sample(rng);
                    }
                }
                // roll landed in the rounding slack past the last weight
                components.last().expect("non-empty").1.sample(rng)
            }
        }
    }
}

impl fmt::Display for PayoffModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PayoffModel::Constant { value } => write!(f, "const:{value}"),
            PayoffModel::Binomial { n, p } => write!(f, "binomial:{n}:{p}"),
            PayoffModel::Normal { mean, sd } => write!(f, "normal:{mean}:{sd}"),
            PayoffModel::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            PayoffModel::ScaledBeta { scale, alpha, beta } => {
                write!(f, "beta:{scale}:{alpha}:{beta}")
            }
            PayoffModel::Mixture { components } => {
                write!(f, "mixture:")?;
                for (i, (_, model)) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{model}")?;
                }
                Ok(())
            }
        }
    }
}

/// One joint draw of all uncertain payoff symbols, indexed in model
/// declaration order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    values: Vec<f64>,
}

impl Scenario {
    pub fn new(values: Vec<f64>) -> Self {
        Scenario { values }
    }

    /// Scenario for games with no uncertain symbols.
    pub fn empty() -> Self {
        Scenario { values: Vec::new() }
    }

    /// The componentwise analytic means — the expected-payoff game's
    /// symbol values.
    pub fn of_means(models: &[PayoffModel]) -> Self {
        Scenario {
            values: models.iter().map(PayoffModel::mean).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of symbol `k`. Panics on out-of-range indices, which always
    /// indicate a game/model wiring bug.
    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Independent draws, one per model, in declared order.
pub fn sample_scenario<R: Rng + ?Sized>(models: &[PayoffModel], rng: &mut R) -> Scenario {
    Scenario::new(models.iter().map(|m| m.sample(rng)).collect())
}

/// Parse the textual model mini-language:
/// `const:5`, `binomial:10:0.5`, `normal:5:1`, `uniform:0:10`,
/// `beta:10:0.5:0.5`, `mixture:normal:2.5:1|normal:7.5:1`.
///
/// Mixture components get equal weights and may not nest.
pub fn parse_model(spec: &str) -> Result<PayoffModel> {
    let spec = spec.trim();
    let bad = |reason: &str| Error::ModelSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };

    if let Some(rest) = spec.strip_prefix("mixture:") {
        let parts: Vec<&str> = rest.split('|').collect();
        if parts.len() < 2 {
            return Err(bad("mixture needs at least two |-separated components"));
        }
        let weight = 1.0 / parts.len() as f64;
        let mut components = Vec::with_capacity(parts.len());
        for part in parts {
            if part.trim().starts_with("mixture:") {
                return Err(bad("mixtures may not nest"));
            }
            components.push((weight, parse_model(part)?));
        }
        return PayoffModel::mixture(components);
    }

    let fields: Vec<&str> = spec.split(':').collect();
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{s}` is not a number")))
    };
    match fields.as_slice() {
        ["const", v] => PayoffModel::constant(number(v)?),
        ["binomial", n, p] => {
            let n = n
                .trim()
                .parse::<u64>()
                .map_err(|_| bad(&format!("`{n}` is not a trial count")))?;
            PayoffModel::binomial(n, number(p)?)
        }
        ["normal", mean, sd] => PayoffModel::normal(number(mean)?, number(sd)?),
        ["uniform", lo, hi] => PayoffModel::uniform(number(lo)?, number(hi)?),
        ["beta", scale, alpha, beta] => {
            PayoffModel::scaled_beta(number(scale)?, number(alpha)?, number(beta)?)
        }
        _ => Err(bad(
            "expected const:V, binomial:N:P, normal:M:SD, uniform:LO:HI, \
             beta:SCALE:A:B, or mixture:SPEC|SPEC",
        )),
    }
}

fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be finite")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// The five distribution presets used in the experiments; all share
    /// mean 5.
    fn preset_models() -> Vec<PayoffModel> {
        vec![
            PayoffModel::binomial(10, 0.5).unwrap(),
            PayoffModel::normal(5.0, 1.0).unwrap(),
            PayoffModel::uniform(0.0, 10.0).unwrap(),
            PayoffModel::scaled_beta(10.0, 0.5, 0.5).unwrap(),
            PayoffModel::mixture(vec![
                (0.5, PayoffModel::normal(2.5, 1.0).unwrap()),
                (0.5, PayoffModel::normal(7.5, 1.0).unwrap()),
            ])
            .unwrap(),
        ]
    }

    /// Analytic standard deviation, used to scale statistical tolerances.
    fn model_sd(model: &PayoffModel) -> f64 {
        let var = match model {
            PayoffModel::Constant { .. } => 0.0,
            PayoffModel::Binomial { n, p } => *n as f64 * p * (1.0 - p),
            PayoffModel::Normal { sd, .. } => sd * sd,
            PayoffModel::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
            PayoffModel::ScaledBeta { scale, alpha, beta } => {
                scale * scale * alpha * beta
                    / ((alpha + beta).powi(2) * (alpha + beta + 1.0))
            }
            PayoffModel::Mixture { components } => {
                let mean: f64 = components.iter().map(|(w, m)| w * m.mean()).sum();
                let second: f64 = components
                    .iter()
                    .map(|(w, m)| {
                        let sd = model_sd(m);
                        w * (sd * sd + m.mean() * m.mean())
                    })
                    .sum();
                second - mean * mean
            }
        };
        var.sqrt()
    }

    #[test]
    fn constant_always_returns_its_value() {
        let model = PayoffModel::constant(5.0).unwrap();
        let mut r = rng(0);
        for _ in 0..100 {
            assert_eq!(model.sample(&mut r), 5.0);
        }
        assert_eq!(model.mean(), 5.0);
    }

    #[test]
    fn analytic_means() {
        assert_eq!(PayoffModel::scaled_beta(10.0, 0.5, 0.5).unwrap().mean(), 5.0);
        assert_eq!(PayoffModel::normal(5.0, 1.0).unwrap().mean(), 5.0);
        assert_eq!(PayoffModel::uniform(0.0, 10.0).unwrap().mean(), 5.0);
        assert_eq!(PayoffModel::binomial(10, 0.5).unwrap().mean(), 5.0);
        for model in preset_models() {
            assert!((model.mean() - 5.0).abs() < 1e-12, "{model}");
        }
    }

    #[test]
    fn binomial_empirical_mean_near_five() {
        let model = PayoffModel::binomial(10, 0.5).unwrap();
        let mut r = rng(11);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| model.sample(&mut r)).sum::<f64>() / n as f64;
        assert!((mean - 5.0).abs() < 0.05, "empirical mean {mean}");
    }

    #[test]
    fn mixture_empirical_mean_near_five() {
        let model = PayoffModel::mixture(vec![
            (0.5, PayoffModel::normal(2.5, 1.0).unwrap()),
            (0.5, PayoffModel::normal(7.5, 1.0).unwrap()),
        ])
        .unwrap();
        let mut r = rng(12);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| model.sample(&mut r)).sum::<f64>() / n as f64;
        assert!((mean - 5.0).abs() < 0.05, "empirical mean {mean}");
    }

    #[test]
    fn every_preset_mean_within_five_standard_errors() {
        let n = 100_000usize;
        for model in preset_models() {
            let mut r = rng(13);
            let mean: f64 = (0..n).map(|_| model.sample(&mut r)).sum::<f64>() / n as f64;
            let standard_error = model_sd(&model) / (n as f64).sqrt();
            assert!(
                (mean - model.mean()).abs() <= 5.0 * standard_error,
                "{model}: empirical {mean} vs analytic {} (se {standard_error})",
                model.mean()
            );
        }
    }

    #[test]
    fn support_bounds() {
        let binomial = PayoffModel::binomial(10, 0.5).unwrap();
        let beta = PayoffModel::scaled_beta(10.0, 0.5, 0.5).unwrap();
        let mut r = rng(14);
        for _ in 0..10_000 {
            let b = binomial.sample(&mut r);
            assert!(b >= 0.0 && b <= 10.0 && b.fract() == 0.0, "binomial {b}");
            let s = beta.sample(&mut r);
            assert!((0.0..=10.0).contains(&s), "scaled beta {s}");
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        for model in preset_models() {
            let a: Vec<f64> = {
                let mut r = rng(42);
                (0..64).map(|_| model.sample(&mut r)).collect()
            };
            let b: Vec<f64> = {
                let mut r = rng(42);
                (0..64).map(|_| model.sample(&mut r)).collect()
            };
            assert!(
                a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()),
                "{model} draws diverged under one seed"
            );
        }
    }

    #[test]
    fn scenario_of_constants() {
        let models = vec![PayoffModel::constant(5.0).unwrap(); 6];
        let scenario = sample_scenario(&models, &mut rng(0));
        assert_eq!(scenario.values(), &[5.0; 6]);
        assert_eq!(Scenario::of_means(&models).values(), &[5.0; 6]);
    }

    #[test]
    fn scenario_sampling_is_reproducible() {
        let models = vec![PayoffModel::binomial(10, 0.5).unwrap(); 6];
        let a = sample_scenario(&models, &mut rng(7));
        let b = sample_scenario(&models, &mut rng(7));
        assert_eq!(a, b);
        assert!(a.values().iter().all(|v| v.fract() == 0.0));
    }

    #[test]
    fn scenario_componentwise_means() {
        let models = preset_models();
        let runs = 10_000;
        let mut r = rng(21);
        let mut sums = vec![0.0; models.len()];
        for _ in 0..runs {
            let scenario = sample_scenario(&models, &mut r);
            for (sum, v) in sums.iter_mut().zip(scenario.values()) {
                *sum += v;
            }
        }
        for (sum, model) in sums.iter().zip(&models) {
            let mean = sum / runs as f64;
            assert!(
                (mean - model.mean()).abs() < 0.15,
                "{model}: componentwise mean {mean}"
            );
        }
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(PayoffModel::binomial(0, 0.5).is_err());
        assert!(PayoffModel::binomial(10, 1.5).is_err());
        assert!(PayoffModel::normal(0.0, 0.0).is_err());
        assert!(PayoffModel::normal(0.0, -1.0).is_err());
        assert!(PayoffModel::uniform(1.0, 1.0).is_err());
        assert!(PayoffModel::uniform(2.0, 1.0).is_err());
        assert!(PayoffModel::scaled_beta(0.0, 0.5, 0.5).is_err());
        assert!(PayoffModel::scaled_beta(10.0, -0.5, 0.5).is_err());
        assert!(PayoffModel::constant(f64::NAN).is_err());
        assert!(PayoffModel::mixture(vec![]).is_err());
        assert!(PayoffModel::mixture(vec![
            (0.7, PayoffModel::constant(1.0).unwrap()),
            (0.7, PayoffModel::constant(2.0).unwrap()),
        ])
        .is_err());
    }

    #[test]
    fn parse_round_trips_the_mini_language() {
        let specs = [
            "binomial:10:0.5",
            "normal:5:1",
            "uniform:0:10",
            "beta:10:0.5:0.5",
            "mixture:normal:2.5:1|normal:7.5:1",
            "const:5",
        ];
        for spec in specs {
            let model = parse_model(spec).unwrap();
            assert_eq!(model.to_string(), spec);
            let again = parse_model(&model.to_string()).unwrap();
            assert_eq!(model, again);
        }
        let mixture = parse_model("mixture:normal:2.5:1|normal:7.5:1").unwrap();
        assert!((mixture.mean() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn parse_rejects_malformed_specs() {
        for spec in [
            "gamma:1:2",
            "binomial:10",
            "binomial:x:0.5",
            "normal:5:0",
            "uniform:10:0",
            "mixture:normal:1:1",
            "mixture:mixture:const:1|const:2|const:3",
            "",
        ] {
            assert!(parse_model(spec).is_err(), "`{spec}` should not parse");
        }
    }
}
