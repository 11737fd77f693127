//! Analysis configuration and the default pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::io::{load_series, read_corpus, SeriesSpec};
use crate::obstruction::{Certificate, Procedure};
use crate::parse::{parse_diffpoly, parse_exponent};
use crate::rational::{parse_rational, Q};
use crate::real::DEFAULT_PRECISION;
use crate::series::FormalSeries;

pub const PRECISION_ENV: &str = "DFORGE_PRECISION";

/// Exit status for a run that found obstruction evidence.
pub const EXIT_REFUTATION: i32 = 2;

/// Settings read from a TOML file. Every key is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub precision_bits: u32,
    /// Exponent written as in `parse_exponent`, e.g. `"log 6"` or `"12*lam"`.
    pub horizon: Option<String>,
    pub rank_bound: usize,
    /// Rational literal.
    pub ratio_threshold: String,
    pub max_weight: u32,
    pub factor_limit: u64,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Equation to substitute into every input.
    pub equation: Option<String>,
    pub prop3: bool,
    pub derive_ade: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            precision_bits: DEFAULT_PRECISION,
            horizon: None,
            rank_bound: 10,
            ratio_threshold: "100".into(),
            max_weight: 3,
            factor_limit: 1 << 20,
            output: None,
            seed: 0x5eed,
            equation: None,
            prop3: true,
            derive_ade: false,
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: AnalysisConfig = toml::from_str(text).map_err(|e| Error::BadConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file and applies the environment override.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut c = match path {
            Some(p) => AnalysisConfig::from_toml(&std::fs::read_to_string(p)?)?,
            None => AnalysisConfig::default(),
        };
        c.apply_env(std::env::var(PRECISION_ENV).ok().as_deref())?;
        Ok(c)
    }

    pub fn apply_env(&mut self, precision: Option<&str>) -> Result<()> {
        if let Some(p) = precision {
            self.precision_bits =
                p.trim().parse().map_err(|_| Error::BadConfig(format!("{PRECISION_ENV}={p:?} is not an integer")))?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("precision_bits", self.precision_bits as u64),
            ("rank_bound", self.rank_bound as u64),
            ("max_weight", self.max_weight as u64),
            ("factor_limit", self.factor_limit),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::BadConfig(format!("{name} must be positive")));
            }
        }
        if self.threshold()? <= Q::from_integer(0.into()) {
            return Err(Error::BadConfig("ratio_threshold must be positive".into()));
        }
        Ok(())
    }

    pub fn threshold(&self) -> Result<Q> {
        parse_rational(&self.ratio_threshold).map_err(|_| Error::BadConfig(format!("bad ratio_threshold {:?}", self.ratio_threshold)))
    }

    fn horizon_for(&self, phi: &FormalSeries) -> Result<Option<Exponent>> {
        self.horizon.as_deref().map(|h| parse_exponent(h, phi.basis().symbols())).transpose()
    }
}

/// Certificates produced for one input file.
#[derive(Clone, Debug)]
pub struct InputReport {
    pub input: PathBuf,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug)]
pub struct AnalysisBundle {
    pub reports: Vec<InputReport>,
}

impl AnalysisBundle {
    pub fn refutation_found(&self) -> bool {
        self.reports.iter().flat_map(|r| &r.certificates).any(Certificate::is_refutation)
    }

    /// 0 on completion, 2 when obstruction evidence was found.
    pub fn exit_code(&self) -> i32 {
        if self.refutation_found() {
            EXIT_REFUTATION
        } else {
            0
        }
    }

    /// Writes each certificate as `<stem>.<n>.<kind>.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for r in &self.reports {
            let stem = r.input.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
            for (i, c) in r.certificates.iter().enumerate() {
                let p = dir.join(format!("{stem}.{i}.{:?}.json", c.kind));
                std::fs::write(&p, c.to_json())?;
                out.push(p);
            }
        }
        Ok(out)
    }
}

fn is_spec(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// Prime support and lattice rank, gap ratios, then the optional
/// substitution and equation search.
pub fn analyze_input(config: &AnalysisConfig, path: &Path) -> Result<InputReport> {
    let prec = config.precision_bits;
    let phi = load_series(path, Some(prec))?;
    let mut certs = Vec::new();
    let finite = if is_spec(path) {
        Procedure::FiniteBasis {
            indices: None,
            series: Some(SeriesSpec::from_series(&phi)),
            rank_bound: config.rank_bound,
            factor_limit: config.factor_limit,
            precision: prec,
        }
    } else {
        Procedure::FiniteBasis {
            indices: Some(read_corpus(path)?.into_iter().map(|(n, _)| n).collect()),
            series: None,
            rank_bound: config.rank_bound,
            factor_limit: config.factor_limit,
            precision: prec,
        }
    };
    log::info!("{}: finite basis scan", path.display());
    certs.push(Certificate::build(finite)?);
    log::info!("{}: gap ratios", path.display());
    certs.push(Certificate::build(Procedure::Gap {
        exponents: phi.exponents().cloned().collect(),
        basis: phi.basis().to_spec(),
        threshold: config.threshold()?,
        first_index: 1,
        precision: prec,
    })?);
    let horizon = config.horizon_for(&phi)?;
    if let Some(eq) = &config.equation {
        parse_diffpoly(eq, phi.basis().symbols())?;
        log::info!("{}: substituting {eq}", path.display());
        certs.push(Certificate::build(Procedure::Substitute {
            equation: eq.clone(),
            series: SeriesSpec::from_series(&phi),
            horizon: horizon.clone(),
            prop3: config.prop3,
            precision: prec,
        })?);
    }
    if config.derive_ade {
        log::info!("{}: equation search up to weight {}", path.display(), config.max_weight);
        certs.push(Certificate::build(Procedure::DeriveAde {
            series: SeriesSpec::from_series(&phi),
            max_weight: config.max_weight,
            horizon,
            precision: prec,
        })?);
    }
    Ok(InputReport { input: path.to_path_buf(), certificates: certs })
}

pub fn run_analysis(config: &AnalysisConfig, inputs: &[PathBuf]) -> Result<AnalysisBundle> {
    config.validate()?;
    let reports = inputs.iter().map(|p| analyze_input(config, p)).collect::<Result<Vec<_>>>()?;
    let bundle = AnalysisBundle { reports };
    if let Some(dir) = &config.output {
        bundle.write(dir)?;
    }
    Ok(bundle)
}
