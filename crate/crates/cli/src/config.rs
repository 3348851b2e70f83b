//! Run configuration: one JSON document with the measures and per-command
//! sections. Measures accept exact rationals (`"1/2"`, `"-3"`) or decimals;
//! any decimal marks the config numeric-only, which the curve command
//! rejects.

use brownq_core::rational::parse_rational;
use brownq_core::{AtomicMeasure, ClassifyThresholds, GridSpec};
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config field `{0}`: {1}")]
    Field(String, String),
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawMeasure {
    pub atoms: Vec<Value>,
    pub weights: Vec<Value>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawMeasures {
    pub p: RawMeasure,
    pub q: RawMeasure,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(default)]
pub struct OmegaSection {
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct GridSection {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub tol: f64,
    pub guard: f64,
    pub jump_factor: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let d = GridSpec::default();
        GridSection {
            re_range: d.re_range,
            im_range: d.im_range,
            nx: d.nx,
            ny: d.ny,
            tol: d.tol,
            guard: d.guard,
            jump_factor: d.jump_factor,
        }
    }
}

impl GridSection {
    pub fn to_spec(&self) -> GridSpec {
        GridSpec {
            re_range: self.re_range,
            im_range: self.im_range,
            nx: self.nx,
            ny: self.ny,
            tol: self.tol,
            guard: self.guard,
            jump_factor: self.jump_factor,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct EsdSection {
    pub n: usize,
    pub replicas: usize,
}

impl Default for EsdSection {
    fn default() -> Self {
        EsdSection { n: 500, replicas: 1 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct ThresholdSection {
    pub divergence_factor: f64,
    pub stabilize_tol: f64,
    pub b_floor: f64,
    pub l_floor: f64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        let d = ClassifyThresholds::default();
        ThresholdSection {
            divergence_factor: d.divergence_factor,
            stabilize_tol: d.stabilize_tol,
            b_floor: d.b_floor,
            l_floor: d.l_floor,
        }
    }
}

impl ThresholdSection {
    pub fn to_thresholds(&self) -> ClassifyThresholds {
        ClassifyThresholds {
            divergence_factor: self.divergence_factor,
            stabilize_tol: self.stabilize_tol,
            b_floor: self.b_floor,
            l_floor: self.l_floor,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct GreensSection {
    pub points: Vec<(f64, f64)>,
    pub eps_ladder: Vec<f64>,
    pub n: usize,
    pub replicas: usize,
    pub thresholds: ThresholdSection,
}

impl Default for GreensSection {
    fn default() -> Self {
        GreensSection {
            points: vec![],
            eps_ladder: brownq_core::DEFAULT_LADDER.to_vec(),
            n: 400,
            replicas: 4,
            thresholds: ThresholdSection::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(default)]
pub struct VerifySection {
    pub grid: Option<GridSection>,
    pub esd_n: Option<usize>,
    /// Eigenvalue-to-boundary proximity threshold for the overlay metric.
    pub proximity: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawConfig {
    pub measures: RawMeasures,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub omega: OmegaSection,
    #[serde(default)]
    pub esd: EsdSection,
    #[serde(default)]
    pub greens: GreensSection,
    #[serde(default)]
    pub verify: VerifySection,
}

/// A measure entry: exact rational or decimal-only.
#[derive(Debug, Clone)]
pub enum MeasureEntry {
    Rational(BigRational),
    Decimal(f64),
}

impl MeasureEntry {
    fn parse(v: &Value, field: &str) -> Result<Self, ConfigError> {
        match v {
            Value::String(s) => {
                let t = s.trim();
                if t.contains('.') || t.contains('e') || t.contains('E') {
                    t.parse::<f64>()
                        .map(MeasureEntry::Decimal)
                        .map_err(|e| ConfigError::Field(field.into(), format!("bad decimal: {e}")))
                } else {
                    parse_rational(t)
                        .map(MeasureEntry::Rational)
                        .ok_or_else(|| {
                            ConfigError::Field(field.into(), format!("bad rational `{t}`"))
                        })
                }
            }
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(MeasureEntry::Rational(BigRational::from_integer(i.into())))
                } else {
                    Ok(MeasureEntry::Decimal(n.as_f64().ok_or_else(|| {
                        ConfigError::Field(field.into(), "bad number".into())
                    })?))
                }
            }
            other => Err(ConfigError::Field(
                field.into(),
                format!("expected string or number, got {other}"),
            )),
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            MeasureEntry::Rational(r) => brownq_core::rational::to_f64(r),
            MeasureEntry::Decimal(d) => *d,
        }
    }
}

/// Fully parsed configuration.
pub struct RunConfig {
    pub mu_p: AtomicMeasure,
    pub mu_q: AtomicMeasure,
    /// True when every atom and weight parsed as an exact rational.
    pub exact: bool,
    pub seed: u64,
    pub omega: OmegaSection,
    pub esd: EsdSection,
    pub greens: GreensSection,
    pub verify: VerifySection,
    /// Raw document for provenance echo in every artifact.
    pub echo: Value,
}

fn build_measure(raw: &RawMeasure, field: &str) -> Result<(AtomicMeasure, bool), ConfigError> {
    let atoms: Result<Vec<MeasureEntry>, _> = raw
        .atoms
        .iter()
        .enumerate()
        .map(|(i, v)| MeasureEntry::parse(v, &format!("{field}.atoms[{i}]")))
        .collect();
    let weights: Result<Vec<MeasureEntry>, _> = raw
        .weights
        .iter()
        .enumerate()
        .map(|(i, v)| MeasureEntry::parse(v, &format!("{field}.weights[{i}]")))
        .collect();
    let (atoms, weights) = (atoms?, weights?);
    let exact = atoms
        .iter()
        .chain(weights.iter())
        .all(|e| matches!(e, MeasureEntry::Rational(_)));
    let mu = if exact {
        let a: Vec<BigRational> = atoms
            .iter()
            .map(|e| match e {
                MeasureEntry::Rational(r) => r.clone(),
                _ => unreachable!(),
            })
            .collect();
        let w: Vec<BigRational> = weights
            .iter()
            .map(|e| match e {
                MeasureEntry::Rational(r) => r.clone(),
                _ => unreachable!(),
            })
            .collect();
        AtomicMeasure::from_rationals(a, w)
            .map_err(|e| ConfigError::Field(field.into(), e.to_string()))?
    } else {
        AtomicMeasure::new(
            atoms.iter().map(MeasureEntry::as_f64).collect(),
            weights.iter().map(MeasureEntry::as_f64).collect(),
        )
        .map_err(|e| ConfigError::Field(field.into(), e.to_string()))?
    };
    Ok((mu, exact))
}

pub fn load(path: &str, seed_override: Option<u64>) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.into(),
        source,
    })?;
    let echo: Value = serde_json::from_str(&text)?;
    let raw: RawConfig = serde_json::from_str(&text)?;
    let (mu_p, p_exact) = build_measure(&raw.measures.p, "measures.p")?;
    let (mu_q, q_exact) = build_measure(&raw.measures.q, "measures.q")?;
    Ok(RunConfig {
        mu_p,
        mu_q,
        exact: p_exact && q_exact,
        seed: seed_override.unwrap_or(raw.seed),
        omega: raw.omega,
        esd: raw.esd,
        greens: raw.greens,
        verify: raw.verify,
        echo,
    })
}
