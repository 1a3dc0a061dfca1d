//! Typed payloads and the single dispatch path shared by subcommands and batch.

use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use psmaps_core::autgroup::{compose, compose_canonical, orbit_equivalent, AutError};
use psmaps_core::existence::{enumerate_patterns, maps_exist, Decision, DEFAULT_PATTERN_LIMIT};
use psmaps_core::ideals::{essential_type, multiplicity};
use psmaps_core::maps::ClassifiedMap;
use psmaps_core::model::{ExponentSignature, ModelError};
use psmaps_core::verify::{check, w_coefficient};
use psmaps_core::wire::{
    AutJson, ClassifiedJson, DecisionJson, ElementJson, InstanceJson, MapJson, ParsedMap, PatternJson, WireError,
};
use psmaps_core::GMatrix;

pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Uncertified(String),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("{0}")]
    Io(String),
}

impl From<AutError> for CliError {
    fn from(e: AutError) -> Self {
        CliError::Wire(e.into())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Wire(e.into())
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "malformed_json",
            CliError::Schema(_) | CliError::Wire(WireError::Invalid(_)) => "schema",
            CliError::Infeasible(_) => "infeasible",
            CliError::Uncertified(_) => "uncertified",
            CliError::Wire(WireError::Model(_)) => "invalid_instance",
            CliError::Wire(WireError::Existence(_)) => "invalid_pattern",
            CliError::Wire(WireError::Map(_)) => "invalid_map",
            CliError::Wire(WireError::Aut(_)) => "automorphism",
            CliError::Wire(WireError::Verify(_)) => "verification",
            CliError::Wire(WireError::Poly(_)) => "polynomial",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "kind": self.kind(), "message": self.to_string() })
    }
}

/// One line of a batch file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub command: String,
    #[serde(default)]
    pub payload: Value,
}

pub const COMMANDS: &[&str] =
    &["decide", "enumerate", "construct", "verify", "mult", "esstype", "aut-compose", "aut-invert", "equivalent"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnumeratePayload {
    p: Vec<i64>,
    q: Vec<i64>,
    #[serde(default)]
    limit: Option<usize>,
}

#[derive(Debug, Serialize)]
struct EnumerateResult {
    patterns: Vec<PatternJson>,
    count: usize,
    truncated: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstructPayload {
    p: Vec<i64>,
    q: Vec<i64>,
    #[serde(default)]
    pattern: Option<PatternJson>,
    #[serde(rename = "W", default)]
    w: Option<GMatrix>,
    #[serde(with = "opt_rational", default)]
    lambda: Option<BigRational>,
    #[serde(with = "opt_rational", default)]
    r: Option<BigRational>,
    #[serde(default)]
    c: Vec<psmaps_core::GRat>,
    #[serde(default)]
    print_radical: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyPayload {
    map: MapJson,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapPayload {
    map: MapJson,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EsstypePayload {
    p: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComposePayload {
    q: Vec<i64>,
    #[serde(default)]
    word: Option<Vec<ElementJson>>,
    #[serde(default)]
    auts: Option<Vec<AutJson>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvertPayload {
    aut: AutJson,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivalentPayload {
    a: MapJson,
    b: MapJson,
}

mod opt_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| psmaps_core::exactpoly::parse_rational(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

fn payload<T: DeserializeOwned>(command: &str, v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Schema(format!("{command} payload: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn classified(map: &MapJson, role: &str) -> Result<ClassifiedMap, CliError> {
    match map.parse()? {
        ParsedMap::Classified(h) => Ok(h),
        ParsedMap::Candidate(_) => Err(CliError::Schema(format!("{role} must be a classified map"))),
    }
}

/// Runs one command on a JSON payload. `seed` is the default sampling seed.
pub fn execute(command: &str, v: Value, seed: u64) -> Result<Value, CliError> {
    match command {
        "decide" => {
            let inst = payload::<InstanceJson>(command, v)?.to_instance()?;
            let d = maps_exist(&inst).map_err(WireError::from)?;
            Ok(to_value(&DecisionJson::from_decision(&inst, &d)))
        }
        "enumerate" => {
            let p: EnumeratePayload = payload(command, v)?;
            let inst = InstanceJson { p: p.p, q: p.q }.to_instance()?;
            let limit = p.limit.unwrap_or(DEFAULT_PATTERN_LIMIT);
            let pats: Vec<PatternJson> = enumerate_patterns(&inst, limit.saturating_add(1))
                .map_err(WireError::from)?
                .map(|pat| PatternJson::from_pattern(&inst, &pat))
                .collect();
            let truncated = pats.len() > limit;
            let patterns: Vec<PatternJson> = pats.into_iter().take(limit).collect();
            Ok(to_value(&EnumerateResult { count: patterns.len(), patterns, truncated }))
        }
        "construct" => construct(payload(command, v)?),
        "verify" => {
            let p: VerifyPayload = payload(command, v)?;
            let c = p.map.parse()?.candidate();
            let report =
                check(&c, p.samples.unwrap_or(DEFAULT_SAMPLES), p.seed.unwrap_or(seed)).map_err(WireError::from)?;
            let mut out = to_value(&report);
            out["w_coefficient"] = to_value(&w_coefficient(&c));
            Ok(out)
        }
        "mult" => {
            let p: MapPayload = payload(command, v)?;
            let h = classified(&p.map, "map")?;
            let m = multiplicity(&h);
            if !m.certified {
                return Err(CliError::Uncertified(format!(
                    "multiplicity not certified: lower bound {} at truncation degree {}",
                    m.value, m.truncation_degree
                )));
            }
            let e = essential_type(h.instance().p());
            Ok(json!({
                "multiplicity": m.value,
                "certified": true,
                "truncation_degree": m.truncation_degree,
                "essential_type": e,
                "bound_holds": m.value <= e,
            }))
        }
        "esstype" => {
            let p: EsstypePayload = payload(command, v)?;
            let sig = ExponentSignature::normalize(&p.p)?;
            let e = essential_type(&sig.user_exps());
            Ok(json!({ "p": p.p, "essential_type": e }))
        }
        "aut-compose" => {
            let p: ComposePayload = payload(command, v)?;
            let sig = ExponentSignature::normalize(&p.q)?;
            let t = match (p.word, p.auts) {
                (Some(word), None) => {
                    let elems = word.iter().map(|e| e.to_element(&sig)).collect::<Result<Vec<_>, _>>()?;
                    compose(&sig, &elems)?
                }
                (None, Some(auts)) => {
                    let ts = auts.iter().map(AutJson::to_aut).collect::<Result<Vec<_>, _>>()?;
                    if ts.iter().any(|t| t.signature() != &sig) {
                        return Err(CliError::Schema("every aut must have the signature q".into()));
                    }
                    compose_canonical(&sig, &ts)?
                }
                _ => return Err(CliError::Schema("aut-compose needs exactly one of `word` or `auts`".into())),
            };
            Ok(to_value(&AutJson::from_aut(&t)))
        }
        "aut-invert" => {
            let p: InvertPayload = payload(command, v)?;
            Ok(to_value(&AutJson::from_aut(&p.aut.to_aut()?.invert())))
        }
        "equivalent" => {
            let p: EquivalentPayload = payload(command, v)?;
            let (a, b) = (classified(&p.a, "a")?, classified(&p.b, "b")?);
            match orbit_equivalent(&a, &b)? {
                Some(t) => Ok(json!({ "equivalent": true, "aut": AutJson::from_aut(&t) })),
                None => Ok(json!({ "equivalent": false })),
            }
        }
        other => Err(CliError::Schema(format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")))),
    }
}

fn construct(p: ConstructPayload) -> Result<Value, CliError> {
    let inst = InstanceJson { p: p.p.clone(), q: p.q.clone() }.to_instance()?;
    let doc = match p.w {
        Some(w) => ClassifiedJson {
            p: p.p,
            q: p.q,
            pattern: p.pattern.unwrap_or_default(),
            w,
            lambda: p.lambda.unwrap_or_else(|| BigRational::from_integer(1.into())),
            r: p.r.unwrap_or_else(|| BigRational::from_integer(0.into())),
            c: p.c,
            numerators: None,
            denominator: None,
            g_numerator: None,
            radical: None,
        },
        None => {
            let pattern = match p.pattern {
                Some(pj) => pj.to_pattern(&inst)?,
                None => match maps_exist(&inst).map_err(WireError::from)? {
                    Decision::Exists(w) => w,
                    Decision::Infeasible(cert) => {
                        return Err(CliError::Infeasible(format!(
                            "no proper map exists: {} source indices divide into {} target slots with s = {}",
                            cert.hall_set.len(),
                            cert.neighborhood.len(),
                            cert.s
                        )))
                    }
                },
            };
            let h = ClassifiedMap::default_witness(&inst, &pattern).map_err(WireError::from)?;
            let MapJson::Classified(mut doc) = MapJson::from_map(&h, false) else { unreachable!() };
            doc.lambda = p.lambda.unwrap_or(doc.lambda);
            doc.r = p.r.unwrap_or(doc.r);
            doc.c = p.c;
            doc.numerators = None;
            doc.denominator = None;
            doc.g_numerator = None;
            doc
        }
    };
    let h = doc.to_map()?;
    Ok(to_value(&MapJson::from_map(&h, p.print_radical)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_reports_both_outcomes() {
        let yes = execute("decide", json!({"p": [2, 4, 6], "q": [1, 1, 1, 2, 2]}), 0).unwrap();
        assert_eq!(yes["exists"], json!(true));
        let no = execute("decide", json!({"p": [2, 3], "q": [1, 5]}), 0).unwrap();
        assert_eq!(no["exists"], json!(false));
        assert!(no["certificate"].is_object());
    }

    #[test]
    fn schema_violations_are_reported_before_work() {
        let e = execute("decide", json!({"p": [2], "q": [1], "extra": 1}), 0).unwrap_err();
        assert_eq!(e.kind(), "schema");
        let e = execute("nope", json!({}), 0).unwrap_err();
        assert_eq!(e.kind(), "schema");
        let e = execute("decide", json!({"p": [0], "q": [1]}), 0).unwrap_err();
        assert_eq!(e.kind(), "invalid_instance");
    }

    #[test]
    fn construct_feeds_verify() {
        let map = execute("construct", json!({"p": [2, 4, 6], "q": [1, 1, 1, 2, 2], "r": "1/2"}), 0).unwrap();
        let report = execute("verify", json!({"map": map, "samples": 50}), 3).unwrap();
        assert_eq!(report["symbolic_zero"], json!(true));
        assert_eq!(report["transversal"], json!(true));
    }

    #[test]
    fn infeasible_construct_is_an_error() {
        let e = execute("construct", json!({"p": [2, 3], "q": [1, 5]}), 0).unwrap_err();
        assert_eq!(e.kind(), "infeasible");
        assert_eq!(e.exit_code(), 1);
    }
}
