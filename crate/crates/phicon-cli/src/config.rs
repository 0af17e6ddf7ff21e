//! Run configuration read from TOML or JSON.

use exact_algebra::Scalar;
use phicon::stability::chamber_classify;
use phicon::{PhiError, PoleConfig, SpectralData, P1};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_BOUND: i64 = 100;
pub const DEFAULT_SWEEP: usize = 20;

/// A scalar written either as a string (`"3/7"`, `"-0.25"`) or a bare integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ScalarText {
    Text(String),
    Int(i64),
}

impl ScalarText {
    fn text(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Int(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    poles: [ScalarText; 3],
    nu: [[ScalarText; 3]; 3],
    weight: Option<ScalarText>,
    seed: Option<u64>,
    sweep_count: Option<usize>,
    bound: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub poles: PoleConfig,
    pub spec: SpectralData,
    pub weight: Option<Scalar>,
    pub seed: u64,
    pub sweep_count: usize,
    pub bound: i64,
}

pub fn parse_scalar(text: &str) -> CliResult<Scalar> {
    Ok(text.parse::<Scalar>()?)
}

pub fn parse_p1(text: &str) -> CliResult<P1> {
    Ok(text.parse::<P1>()?)
}

/// Parses TOML or JSON text; JSON is recognised by a leading `{`.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let raw: RawConfig = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::MalformedConfig(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| CliError::MalformedConfig(e.to_string()))?
    };
    let mut poles = Vec::with_capacity(3);
    for (i, t) in raw.poles.iter().enumerate() {
        let p = parse_p1(&t.text())?;
        if p.is_infinite() && i != 2 {
            return Err(CliError::Phi(PhiError::InvalidParameter(
                "only the third pole may be written as \"inf\"".into(),
            )));
        }
        poles.push(p);
    }
    let poles = PoleConfig::new([poles[0].clone(), poles[1].clone(), poles[2].clone()])?;
    let mut rows = Vec::with_capacity(3);
    for row in &raw.nu {
        let parsed = row.iter().map(|t| parse_scalar(&t.text())).collect::<CliResult<Vec<_>>>()?;
        rows.push(<[Scalar; 3]>::try_from(parsed).expect("three entries"));
    }
    let nu: [[Scalar; 3]; 3] = rows.try_into().expect("three rows");
    let spec = SpectralData::from_rows(nu)?;
    let weight = match raw.weight {
        Some(w) => {
            let w = parse_scalar(&w.text())?;
            chamber_classify(&w)?;
            Some(w)
        }
        None => None,
    };
    let bound = raw.bound.unwrap_or(DEFAULT_BOUND);
    if bound < 1 {
        return Err(CliError::MalformedConfig("bound must be positive".into()));
    }
    Ok(RunConfig {
        poles,
        spec,
        weight,
        seed: raw.seed.unwrap_or(0),
        sweep_count: raw.sweep_count.unwrap_or(DEFAULT_SWEEP),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZOI: &str = r#"
poles = ["0", "1", "inf"]
nu = [["0", "1", "-1"], ["1/2", "-1/2", "0"], ["2", "0", "0"]]
seed = 7
"#;

    #[test]
    fn toml_and_json_agree() {
        let t = parse_config(ZOI).unwrap();
        let j = parse_config(
            r#"{"poles":["0","1","inf"],"nu":[["0","1","-1"],["1/2","-1/2","0"],["2","0","0"]],"seed":7}"#,
        )
        .unwrap();
        assert_eq!(t, j);
        assert_eq!(t.poles, PoleConfig::zoi());
        assert_eq!((t.seed, t.sweep_count, t.bound), (7, DEFAULT_SWEEP, DEFAULT_BOUND));
    }

    #[test]
    fn integers_are_accepted() {
        let c = parse_config("poles = [0, 1, 2]\nnu = [[0, 0, 0], [0, 0, 0], [2, 0, 0]]\n").unwrap();
        assert!(c.poles.all_finite());
    }

    #[test]
    fn duplicate_poles() {
        let e = parse_config("poles = [\"0\", \"0\", \"1\"]\nnu = [[0,0,0],[0,0,0],[2,0,0]]\n").unwrap_err();
        assert_eq!(e.code(), "DuplicatePoles");
    }

    #[test]
    fn fuchs_violation_reports_the_discrepancy() {
        let e = parse_config("poles = [0, 1, \"inf\"]\nnu = [[0,0,0],[0,0,\"1/3\"],[2,0,0]]\n").unwrap_err();
        assert_eq!(e.code(), "FuchsViolation");
        assert_eq!(e.to_json()["error"]["discrepancy"], "1/3");
    }

    #[test]
    fn infinity_only_in_third_position() {
        let e = parse_config("poles = [\"inf\", 0, 1]\nnu = [[0,0,0],[0,0,0],[2,0,0]]\n").unwrap_err();
        assert_eq!(e.code(), "InvalidParameter");
    }

    #[test]
    fn malformed_inputs() {
        let bad = [
            "poles = [0, 1]\nnu = [[0,0,0],[0,0,0],[2,0,0]]\n",
            "poles = [0, 1, 2]\nnu = [[0,0,0],[0,0,0],[2,0,0]]\ncolour = 3\n",
            "{not json",
            "",
        ];
        for text in bad {
            assert_eq!(parse_config(text).unwrap_err().code(), "MalformedConfig", "{text:?}");
        }
        let e = parse_config("poles = [0, 1, 2]\nnu = [[\"x\",0,0],[0,0,0],[2,0,0]]\n").unwrap_err();
        assert_eq!(e.code(), "MalformedScalar");
        let e = parse_config("poles = [0, 1, 2]\nnu = [[0,0,0],[0,0,0],[2,0,0]]\nweight = \"1/2\"\n").unwrap_err();
        assert_eq!(e.code(), "InvalidWeight");
    }
}
