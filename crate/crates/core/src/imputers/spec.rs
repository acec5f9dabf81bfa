use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::estimators::EstimatorSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimpleStrategy {
    Mean,
    Median,
    Mode,
}

/// Relative early-stop tolerance of the chained imputer, as a fraction of
/// each column's standard deviation.
pub const DEFAULT_ITERATIVE_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum ImputerFamily {
    Simple {
        strategy: SimpleStrategy,
    },
    /// Samples with replacement from the observed values.
    AppRandom,
    Knn {
        n_neighbors: usize,
    },
    Iterative {
        init_strategy: SimpleStrategy,
        max_iter: usize,
        estimator: EstimatorSpec,
        tolerance: f64,
    },
}

impl ImputerFamily {
    pub fn is_univariate(&self) -> bool {
        matches!(self, ImputerFamily::Simple { .. } | ImputerFamily::AppRandom)
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            ImputerFamily::Simple { .. } => "simple",
            ImputerFamily::AppRandom => "random",
            ImputerFamily::Knn { .. } => "knn",
            ImputerFamily::Iterative { .. } => "iterative",
        }
    }
}

/// Declarative imputer configuration, e.g.
/// `{"id": "knn5", "type": "knn", "params": {"n_neighbors": 5}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct ImputerSpec {
    pub id: String,
    pub family: ImputerFamily,
    pub seed: u64,
}

impl ImputerSpec {
    pub fn new(id: impl Into<String>, family: ImputerFamily) -> Self {
        ImputerSpec {
            id: id.into(),
            family,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn mean() -> Self {
        Self::simple("mean", SimpleStrategy::Mean)
    }

    pub fn median() -> Self {
        Self::simple("median", SimpleStrategy::Median)
    }

    pub fn mode() -> Self {
        Self::simple("mode", SimpleStrategy::Mode)
    }

    pub fn simple(id: &str, strategy: SimpleStrategy) -> Self {
        Self::new(id, ImputerFamily::Simple { strategy })
    }

    pub fn random() -> Self {
        Self::new("random", ImputerFamily::AppRandom)
    }

    pub fn knn(n_neighbors: usize) -> Self {
        Self::new(format!("knn{n_neighbors}"), ImputerFamily::Knn { n_neighbors })
    }

    pub fn iterative(id: &str, estimator: EstimatorSpec) -> Self {
        Self::new(
            id,
            ImputerFamily::Iterative {
                init_strategy: SimpleStrategy::Mode,
                max_iter: DEFAULT_MAX_ITER,
                estimator,
                tolerance: DEFAULT_ITERATIVE_TOLERANCE,
            },
        )
    }

    /// The ten-imputer evaluation roster: three simple strategies, the
    /// a-priori random imputer, three KNN sizes and three chained imputers.
    pub fn default_roster() -> Vec<ImputerSpec> {
        vec![
            Self::mean(),
            Self::median(),
            Self::mode(),
            Self::random(),
            Self::knn(3),
            Self::knn(5),
            Self::knn(10),
            Self::iterative("iter_br", EstimatorSpec::ridge()),
            Self::iterative("iter_rf", EstimatorSpec::random_forest(100)),
            Self::iterative("iter_xgb", EstimatorSpec::gradient_boosting()),
        ]
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRepr {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimpleParams {
    strategy: SimpleStrategy,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnnParams {
    n_neighbors: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IterativeParams {
    #[serde(default = "default_init")]
    init_strategy: SimpleStrategy,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
    #[serde(default = "EstimatorSpec::ridge")]
    estimator: EstimatorSpec,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn default_init() -> SimpleStrategy {
    SimpleStrategy::Mode
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}
fn default_tolerance() -> f64 {
    DEFAULT_ITERATIVE_TOLERANCE
}

fn parse_params<T: serde::de::DeserializeOwned>(params: Map<String, Value>) -> Result<T, String> {
    serde_path_to_error::deserialize(Value::Object(params)).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            format!("params: {}", e.inner())
        } else {
            format!("params.{path}: {}", e.inner())
        }
    })
}

impl TryFrom<SpecRepr> for ImputerSpec {
    type Error = String;

    fn try_from(r: SpecRepr) -> Result<Self, String> {
        let family = match r.kind.as_str() {
            "simple" => ImputerFamily::Simple {
                strategy: parse_params::<SimpleParams>(r.params)?.strategy,
            },
            "random" | "apprandom" => {
                if let Some(k) = r.params.keys().next() {
                    return Err(format!("params.{k}: random imputer takes no parameters"));
                }
                ImputerFamily::AppRandom
            }
            "knn" => {
                let p: KnnParams = parse_params(r.params)?;
                if p.n_neighbors == 0 {
                    return Err("params.n_neighbors: must be at least 1".into());
                }
                ImputerFamily::Knn {
                    n_neighbors: p.n_neighbors,
                }
            }
            "iterative" => {
                let p: IterativeParams = parse_params(r.params)?;
                p.estimator
                    .validate()
                    .map_err(|e| format!("params.estimator: {e}"))?;
                if !(p.tolerance >= 0.0) {
                    return Err("params.tolerance: must be non-negative".into());
                }
                ImputerFamily::Iterative {
                    init_strategy: p.init_strategy,
                    max_iter: p.max_iter,
                    estimator: p.estimator,
                    tolerance: p.tolerance,
                }
            }
            other => {
                return Err(format!(
                    "type: unknown imputer type {other:?} (expected simple, random, knn or iterative)"
                ))
            }
        };
        if r.id.is_empty() {
            return Err("id: must not be empty".into());
        }
        Ok(ImputerSpec {
            id: r.id,
            family,
            seed: r.seed,
        })
    }
}

impl From<ImputerSpec> for SpecRepr {
    fn from(s: ImputerSpec) -> Self {
        let kind = s.family.type_name().to_string();
        let params = match s.family {
            ImputerFamily::Simple { strategy } => to_map(SimpleParams { strategy }),
            ImputerFamily::AppRandom => Map::new(),
            ImputerFamily::Knn { n_neighbors } => to_map(KnnParams { n_neighbors }),
            ImputerFamily::Iterative {
                init_strategy,
                max_iter,
                estimator,
                tolerance,
            } => to_map(IterativeParams {
                init_strategy,
                max_iter,
                estimator,
                tolerance,
            }),
        };
        SpecRepr {
            id: s.id,
            kind,
            params,
            seed: s.seed,
        }
    }
}

fn to_map<T: Serialize>(v: T) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_round_trips() {
        let roster = ImputerSpec::default_roster();
        let json = serde_json::to_string(&roster).unwrap();
        let back: Vec<ImputerSpec> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, roster);
        let ids: Vec<&str> = roster.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(
            ids,
            ["mean", "median", "mode", "random", "knn3", "knn5", "knn10", "iter_br", "iter_rf", "iter_xgb"]
        );
    }

    #[test]
    fn parses_declarative_specs() {
        let s: ImputerSpec = serde_json::from_str(
            r#"{"id":"it","type":"iterative","params":{"max_iter":5,"estimator":{"type":"gradient_boosting","max_depth":3}}}"#,
        )
        .unwrap();
        match s.family {
            ImputerFamily::Iterative {
                max_iter,
                estimator: EstimatorSpec::GradientBoosting { max_depth, n_estimators, .. },
                init_strategy,
                ..
            } => {
                assert_eq!((max_iter, max_depth, n_estimators), (5, 3, 100));
                assert_eq!(init_strategy, SimpleStrategy::Mode);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_params() {
        let e = serde_json::from_str::<ImputerSpec>(
            r#"{"id":"k","type":"knn","params":{"n_neighbours":3}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("params"), "{e}");
        assert!(serde_json::from_str::<ImputerSpec>(r#"{"id":"x","type":"gain"}"#).is_err());
        assert!(
            serde_json::from_str::<ImputerSpec>(r#"{"id":"x","type":"random","extra":1}"#).is_err()
        );
    }
}
