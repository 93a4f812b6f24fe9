use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use slope_core::io::{CurveSpec, DivisorSpec, SeriesSpec, SpaceSpec};
use slope_core::rational::parse_rational;
use slope_core::{AdelicCurveSpec, FilteredSpace, MonomialSeries, Rational, ToricAdelicDivisor};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: Option<String>,
    pub kind: Option<String>,
    pub curve: Option<CurveSpec>,
    #[serde(default)]
    pub divisors: BTreeMap<String, DivisorSpec>,
    #[serde(default)]
    pub series: BTreeMap<String, SeriesSpec>,
    #[serde(default)]
    pub spaces: Vec<SpaceSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialRef {
    pub degree: Vec<u32>,
    pub point: Vec<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub divisor: Option<String>,
    pub divisors: Option<Vec<String>>,
    pub series: Option<String>,
    pub superadd_constant: Option<String>,
    pub ln_precision: Option<String>,
    pub n_max: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub kodaira_dim: Option<u32>,
    pub tolerance: Option<String>,
    pub t_grid: Option<Vec<String>>,
    pub m_max: Option<u32>,
    pub factor_count_max: Option<usize>,
    pub superadd_n_max: Option<u32>,
    pub grid: Option<Vec<Vec<String>>>,
    pub n_est: Option<u32>,
    pub lambda_bound: Option<String>,
    pub generator_degree: Option<u32>,
    pub n_check: Option<u32>,
    pub offset: Option<String>,
    pub total_max: Option<u32>,
    pub monomials: Option<Vec<MonomialRef>>,
    pub samples: Option<usize>,
    pub dim_max: Option<usize>,
}

pub fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| anyhow!(e))
}

pub fn rationals(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| rational(s)).collect()
}

/// Parsed objects of a configuration.
pub struct World {
    pub config: ExperimentConfig,
    pub divisors: BTreeMap<String, ToricAdelicDivisor>,
    pub spaces: Vec<FilteredSpace>,
}

impl World {
    pub fn load(path: &Path) -> Result<World> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Self::from_config(config)
    }

    pub fn from_config(config: ExperimentConfig) -> Result<World> {
        let curve = match &config.curve {
            Some(c) => c.build().context("curve")?,
            None => AdelicCurveSpec::single(),
        };
        let divisors = config
            .divisors
            .iter()
            .map(|(k, d)| Ok((k.clone(), d.build(&curve).with_context(|| format!("divisor {k:?}"))?)))
            .collect::<Result<_>>()?;
        let spaces = config
            .spaces
            .iter()
            .enumerate()
            .map(|(i, s)| s.build().with_context(|| format!("space {i}")))
            .collect::<Result<_>>()?;
        // Every named series must build, even if unused.
        for (k, s) in &config.series {
            s.build(&divisors).with_context(|| format!("series {k:?}"))?;
        }
        let world = World { config, divisors, spaces };
        world.validate_params()?;
        Ok(world)
    }

    fn validate_params(&self) -> Result<()> {
        let p = &self.config.params;
        for s in [&p.superadd_constant, &p.ln_precision, &p.tolerance, &p.lambda_bound, &p.offset].into_iter().flatten() {
            rational(s)?;
        }
        for s in p.t_grid.iter().chain(p.grid.iter().flatten()) {
            rationals(s)?;
        }
        Ok(())
    }

    pub fn params(&self) -> &Params {
        &self.config.params
    }

    pub fn divisor(&self, name: &str) -> Result<&ToricAdelicDivisor> {
        self.divisors.get(name).ok_or_else(|| anyhow!("unknown divisor {name:?}"))
    }

    /// `params.divisor`, or the only divisor when there is exactly one.
    pub fn main_divisor(&self) -> Result<(&str, &ToricAdelicDivisor)> {
        match &self.params().divisor {
            Some(name) => Ok((name, self.divisor(name)?)),
            None if self.divisors.len() == 1 => {
                let (k, d) = self.divisors.iter().next().unwrap();
                Ok((k, d))
            }
            None => bail!("params.divisor is required"),
        }
    }

    pub fn divisor_list(&self) -> Result<Vec<ToricAdelicDivisor>> {
        match &self.params().divisors {
            Some(names) => names.iter().map(|n| self.divisor(n).cloned()).collect(),
            None => Ok(self.divisors.values().cloned().collect()),
        }
    }

    /// `params.series`, falling back to the series of the main divisor.
    pub fn main_series(&self) -> Result<MonomialSeries> {
        let p = self.params();
        let series = match &p.series {
            Some(name) => self
                .config
                .series
                .get(name)
                .ok_or_else(|| anyhow!("unknown series {name:?}"))?
                .build(&self.divisors)?,
            None => self.main_divisor()?.1.to_series(),
        };
        match &p.superadd_constant {
            None => Ok(series),
            Some(c) => {
                let precision = rational(p.ln_precision.as_deref().unwrap_or("1/1000000"))?;
                Ok(series.with_superadd_constant(rational(c)?, precision)?)
            }
        }
    }

    pub fn tolerance(&self) -> Result<Rational> {
        rational(self.params().tolerance.as_deref().unwrap_or("0"))
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T> {
        value.clone().ok_or_else(|| anyhow!("params.{name} is required"))
    }
}
