//! JSON run configuration.

use serde::{Deserialize, Deserializer, Serialize};

use sadim_core::condition::CertifyOptions;
use sadim_core::{AffineIFS, Error, Matrix, Rational, ReturnRule, SolverOptions, TargetSequence, Vector};

pub const SCHEMA_VERSION: u32 = 1;

/// A real number given either as a JSON number or as a `"p/q"` / decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Num(x)),
            Raw::Text(s) => s.parse::<Rational>().map(|r| Num(r.to_f64())).map_err(serde::de::Error::custom),
        }
    }
}

fn reals(v: &[Num]) -> Vec<f64> {
    v.iter().map(|x| x.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Nested(Vec<Vec<Num>>),
    Flat(Vec<Num>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsConfig {
    pub d: usize,
    pub matrices: Vec<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<Vec<Num>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Shrinking,
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Named(String),
    Positions(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub s: Num,
    pub p: usize,
    pub depth: usize,
    pub mode: ModeName,
    /// `"none"`, `"clipped"`, or explicit shifts.
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub certify: CertifyOptions,
}

fn default_schedule() -> ScheduleSpec {
    ScheduleSpec::Named("none".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    pub t: Vec<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub n_points: usize,
    /// Defaults to the smallest length with `γ_max^len < resolution`.
    pub word_len: Option<usize>,
    pub resolution: f64,
    /// Draw translations uniformly from `[0,1]^d` instead of using the configured ones.
    pub random_translations: bool,
    pub epsilons: Option<Vec<Num>>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { n_points: 10_000, word_len: None, resolution: 1e-9, random_translations: false, epsilons: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub proximal_len: usize,
    pub orbit_len: usize,
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { proximal_len: 6, orbit_len: 4, tol: sadim_core::multilinear::DEFAULT_PROXIMALITY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub ifs: IfsConfig,
    #[serde(default)]
    pub seed: u64,
    /// Parameter grid for `pressure`, `alpha` and `certify-condition`.
    #[serde(default)]
    pub t: Vec<Num>,
    /// Word length for `pressure`; defaults to the largest `n` with `N^n ≤ budget`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<ReturnRule>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifyOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyConfig>,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub check: CheckConfig,
}

pub fn field_error(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), message: message.into() }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| field_error("config", e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(field_error(
                "schema_version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Vec<f64>, Error> {
        if self.t.is_empty() {
            return Err(field_error("t", "parameter grid is empty"));
        }
        let t = reals(&self.t);
        if t.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(field_error("t", "values must be finite and non-negative"));
        }
        Ok(t)
    }

    pub fn build_ifs(&self) -> Result<AffineIFS, Error> {
        let d = self.ifs.d;
        if d == 0 {
            return Err(field_error("ifs.d", "dimension must be at least 1"));
        }
        let n = self.ifs.matrices.len();
        if n < 2 {
            return Err(field_error("ifs.matrices", format!("need at least 2 maps, got {n}")));
        }
        let mut matrices = Vec::with_capacity(n);
        for (i, spec) in self.ifs.matrices.iter().enumerate() {
            let field = format!("ifs.matrices[{i}]");
            let entries: Vec<f64> = match spec {
                MatrixSpec::Nested(rows) => {
                    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                        return Err(field_error(field, format!("expected {d} rows of length {d}")));
                    }
                    rows.iter().flat_map(|r| reals(r)).collect()
                }
                MatrixSpec::Flat(v) => {
                    if v.len() != d * d {
                        return Err(field_error(field, format!("expected {} row-major entries, got {}", d * d, v.len())));
                    }
                    reals(v)
                }
            };
            matrices.push(Matrix::from_row_slice(d, d, &entries));
        }
        let translations = match &self.ifs.translations {
            None => vec![Vector::zeros(d); n],
            Some(ts) => {
                if ts.len() != n {
                    return Err(field_error(
                        "ifs.translations",
                        format!("expected {n} translation vectors (one per matrix), got {}", ts.len()),
                    ));
                }
                let mut out = Vec::with_capacity(n);
                for (i, t) in ts.iter().enumerate() {
                    if t.len() != d {
                        return Err(field_error(format!("ifs.translations[{i}]"), format!("expected length {d}, got {}", t.len())));
                    }
                    out.push(Vector::from_vec(reals(t)));
                }
                out
            }
        };
        AffineIFS::new(matrices, translations).map_err(|e| match e {
            Error::Validation { field, message } => field_error(format!("ifs.{field}"), message),
            other => other,
        })
    }

    pub fn target(&self) -> Result<&TargetSequence, Error> {
        self.target.as_ref().ok_or_else(|| field_error("target", "this command needs a target sequence"))
    }

    pub fn psi(&self) -> Result<&ReturnRule, Error> {
        self.psi.as_ref().ok_or_else(|| field_error("psi", "this command needs a return rule"))
    }

    pub fn measure(&self) -> Result<&MeasureConfig, Error> {
        self.measure.as_ref().ok_or_else(|| field_error("measure", "this command needs a measure block"))
    }

    pub fn energy(&self) -> Result<&EnergyConfig, Error> {
        self.energy.as_ref().ok_or_else(|| field_error("energy", "this command needs an energy block"))
    }

    pub fn epsilons(&self) -> Option<Vec<f64>> {
        self.sample.epsilons.as_deref().map(reals)
    }

    pub fn energy_grid(&self) -> Result<Vec<f64>, Error> {
        let e = self.energy()?;
        if e.t.is_empty() {
            return Err(field_error("energy.t", "parameter grid is empty"));
        }
        Ok(reals(&e.t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(matrices: &str, translations: &str) -> String {
        format!(r#"{{"schema_version": 1, "ifs": {{"d": 2, "matrices": {matrices}, "translations": {translations}}}}}"#)
    }

    #[test]
    fn nested_flat_and_rational_entries() {
        let text = base(r#"[[[0.5, 0], [0, "1/3"]], ["1/4", 0, 0, 0.25]]"#, "[[0, 0], [1, 0]]");
        let cfg = RunConfig::parse(&text).unwrap();
        let ifs = cfg.build_ifs().unwrap();
        assert!((ifs.matrix(1)[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ifs.matrix(2)[(0, 0)], 0.25);
    }

    #[test]
    fn translation_count_mismatch_names_the_field() {
        let m = r#"[[0.5,0,0,0.5],[0.5,0,0,0.5],[0.5,0,0,0.5]]"#;
        let cfg = RunConfig::parse(&base(m, "[[0,0],[1,0]]")).unwrap();
        match cfg.build_ifs().unwrap_err() {
            Error::Validation { field, message } => {
                assert_eq!(field, "ifs.translations");
                assert!(message.contains("expected 3"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_version_and_unknown_fields_are_rejected() {
        assert!(RunConfig::parse(r#"{"schema_version": 2, "ifs": {"d": 1, "matrices": [[0.5],[0.5]]}}"#).is_err());
        assert!(RunConfig::parse(r#"{"schema_version": 1, "ifs": {"d": 1, "matrices": [[0.5],[0.5]]}, "bogus": 1}"#).is_err());
    }
}
