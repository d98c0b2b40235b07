//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use delsarte_core::regions::{RegionSpec, SetSpec};
use delsarte_core::spectra::StructureKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Arith {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavour {
    Turan,
    Delsarte,
    TwoSided,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub flavour: Flavour,
    pub arithmetic: Option<Arith>,
    #[serde(default)]
    pub seed: u64,
    pub structure: StructureConfig,
    pub region: RegionConfig,
    #[serde(default)]
    pub sigma: SigmaConfig,
    /// ε schedule, as `p/q` strings or numbers.
    #[serde(default)]
    pub epsilon: Vec<Number>,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureConfig {
    FiniteAbelian { moduli: Vec<u64> },
    Dihedral { order: u64 },
    Circle { grid: usize, truncation: usize },
    Sphere { dimension: usize, grid: usize, truncation: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Int(i64),
    Tuple(Vec<i64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    /// Canonical text: integers and `p/q` strings stay exact.
    pub fn text(&self) -> String {
        match self {
            Number::Int(i) => i.to_string(),
            Number::Float(f) => f.to_string(),
            Number::Text(s) => s.trim().to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub plus: Option<Vec<Element>>,
    pub minus: Option<Vec<Element>>,
    /// Cap angle: radians (sphere) or revolutions (circle); a string ending
    /// in `deg` is read in degrees.
    pub plus_cap: Option<Number>,
    pub minus_cap: Option<Number>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaConfig {
    pub kind: Option<String>,
    pub c: Option<Number>,
    /// Density of the absolutely continuous part, one value per grid point.
    pub density: Option<Vec<Number>>,
    pub tail_lower_bound: Option<Number>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Turán and Delsarte regions `{-k, …, k}` on a cyclic group.
    TuranK,
    Cap,
    Epsilon,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<Number>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// Configuration text plus its parse.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub text: String,
    pub config: RunConfig,
}

#[derive(Debug)]
pub struct ReadError(pub anyhow::Error);

impl std::fmt::Display for ReadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ReadError {}

/// Read a config; I/O failures come back as [`ReadError`], everything else
/// is a validation error.
pub fn load(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ReadError(anyhow!(e).context(format!("cannot read config {}", path.display()))))?;
    parse(&text).with_context(|| format!("invalid config {}", path.display()))
}

pub fn parse(text: &str) -> Result<LoadedConfig> {
    let config: RunConfig = toml::from_str(text)?;
    if config.schema != SCHEMA_VERSION {
        bail!("unsupported schema version {} (expected {SCHEMA_VERSION})", config.schema);
    }
    let c = LoadedConfig { text: text.to_string(), config };
    c.region_spec()?;
    Ok(c)
}

pub fn parse_angle(n: &Number) -> Result<f64> {
    let text = n.text();
    if let Some(deg) = text.strip_suffix("deg") {
        let v: f64 = deg.trim().parse().with_context(|| format!("bad angle {text:?}"))?;
        return Ok(v.to_radians());
    }
    match n {
        Number::Int(i) => Ok(*i as f64),
        Number::Float(f) => Ok(*f),
        Number::Text(_) => {
            let r = delsarte_core::scalar::parse_rational(&text).ok_or_else(|| anyhow!("bad angle {text:?}"))?;
            Ok(num_to_f64(&r))
        }
    }
}

fn num_to_f64(r: &delsarte_core::scalar::BigRational) -> f64 {
    use delsarte_core::scalar::Scalar;
    f64::from_rational(r)
}

impl LoadedConfig {
    pub fn structure_kind(&self, truncation: Option<usize>) -> StructureKind {
        match &self.config.structure {
            StructureConfig::FiniteAbelian { moduli } => StructureKind::FiniteAbelian { moduli: moduli.clone() },
            StructureConfig::Dihedral { order } => StructureKind::DihedralPair { order: *order },
            StructureConfig::Circle { grid, truncation: n } => {
                StructureKind::Circle { grid: *grid, truncation: truncation.unwrap_or(*n) }
            }
            StructureConfig::Sphere { dimension, grid, truncation: n } => StructureKind::SpherePair {
                dimension: *dimension,
                grid: *grid,
                truncation: truncation.unwrap_or(*n),
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.config.structure, StructureConfig::FiniteAbelian { .. } | StructureConfig::Dihedral { .. })
    }

    pub fn arithmetic(&self, overridden: Option<Arith>) -> Result<Arith> {
        let arith = overridden
            .or(self.config.arithmetic)
            .unwrap_or(if self.is_finite() { Arith::Exact } else { Arith::Float });
        if arith == Arith::Exact && !self.is_finite() {
            bail!("exact arithmetic needs a finite structure");
        }
        Ok(arith)
    }

    fn set(&self, elements: &Option<Vec<Element>>, cap: &Option<Number>, name: &str) -> Result<Option<SetSpec>> {
        match (elements, cap, self.is_finite()) {
            (Some(_), Some(_), _) => bail!("region.{name} and region.{name}_cap are mutually exclusive"),
            (Some(els), None, true) => Ok(Some(SetSpec::Elements(
                els.iter()
                    .map(|e| match e {
                        Element::Int(i) => vec![*i],
                        Element::Tuple(t) => t.clone(),
                    })
                    .collect(),
            ))),
            (None, Some(c), false) => Ok(Some(SetSpec::Cap(parse_angle(c)?))),
            (Some(_), None, false) => bail!("region.{name} lists elements but the structure is continuous; use {name}_cap"),
            (None, Some(_), true) => bail!("region.{name}_cap needs a continuous structure"),
            (None, None, _) => Ok(None),
        }
    }

    pub fn region_spec(&self) -> Result<RegionSpec> {
        let r = &self.config.region;
        let plus = self.set(&r.plus, &r.plus_cap, "plus")?.unwrap_or(SetSpec::Whole);
        let minus = self.set(&r.minus, &r.minus_cap, "minus")?;
        Ok(match (self.config.flavour, minus) {
            (Flavour::Turan, None) => RegionSpec::turan(plus),
            (Flavour::Delsarte, None) => RegionSpec::delsarte(plus),
            (Flavour::TwoSided, Some(minus)) => RegionSpec { plus, minus },
            (Flavour::TwoSided, None) => bail!("flavour two_sided needs region.minus or region.minus_cap"),
            (f, Some(_)) => bail!("flavour {f:?} fixes Ω- itself; remove region.minus"),
        })
    }

    /// Region for a sweep value.
    pub fn swept_region(&self, parameter: SweepParameter, value: &Number) -> Result<RegionSpec> {
        let base = self.region_spec()?;
        let replace = |set: SetSpec| match self.config.flavour {
            Flavour::Turan => Ok(RegionSpec::turan(set)),
            Flavour::Delsarte => Ok(RegionSpec::delsarte(set)),
            Flavour::TwoSided => Ok(RegionSpec { plus: set, minus: base.minus.clone() }),
        };
        match parameter {
            SweepParameter::Epsilon => Ok(base),
            SweepParameter::Cap => {
                if self.is_finite() {
                    bail!("cap sweeps need a continuous structure");
                }
                replace(SetSpec::Cap(parse_angle(value)?))
            }
            SweepParameter::TuranK => {
                let StructureConfig::FiniteAbelian { moduli } = &self.config.structure else {
                    bail!("turan_k sweeps need a cyclic group");
                };
                if moduli.len() != 1 {
                    bail!("turan_k sweeps need a cyclic group");
                }
                let k: i64 = value.text().parse().with_context(|| format!("bad k {:?}", value.text()))?;
                if k < 0 {
                    bail!("k must be nonnegative");
                }
                replace(SetSpec::Elements((-k..=k).map(|x| vec![x]).collect()))
            }
        }
    }

    pub fn out_dir(&self, overridden: Option<&Path>) -> PathBuf {
        overridden
            .map(Path::to_path_buf)
            .or_else(|| self.config.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z6: &str = r#"
schema = 1
flavour = "turan"
[structure]
kind = "finite_abelian"
moduli = [6]
[region]
plus = [-1, 0, 1]
"#;

    #[test]
    fn parses_a_turan_config() {
        let c = parse(Z6).unwrap();
        assert_eq!(c.region_spec().unwrap().plus, c.region_spec().unwrap().minus);
        assert_eq!(c.arithmetic(None).unwrap(), Arith::Exact);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse(&format!("{Z6}colour = 3\n")).unwrap_err();
        assert!(format!("{err:#}").contains("colour"));
    }

    #[test]
    fn flavour_constrains_minus() {
        let text = Z6.replace("plus = [-1, 0, 1]", "plus = [0]\nminus = [0]");
        assert!(parse(&text).is_err());
        let text = Z6.replace("turan", "two_sided");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn angles_in_degrees() {
        let a = parse_angle(&Number::Text("60deg".into())).unwrap();
        assert!((a - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
        assert_eq!(parse_angle(&Number::Text("1/4".into())).unwrap(), 0.25);
    }
}
