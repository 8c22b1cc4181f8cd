//! JSON file formats. Complex numbers are `[re, im]` pairs; matrices are
//! arrays of rows.

use std::fmt::Write as _;

use envarkit_core::derivation::{EqualityStore, Probability};
use envarkit_core::envariance::EnvarianceVerdict;
use envarkit_core::gleason::AuditReport;
use envarkit_core::schmidt::SchmidtDecomposition;
use envarkit_core::{BipartiteState, CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

/// Columns of `m`, one vector each.
pub fn matrix_columns(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.cols()).map(|j| m.column(j).into_iter().map(pair).collect()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim_s: usize,
    pub dim_e: usize,
    pub amps: Vec<Vec<Pair>>,
}

impl StateFile {
    pub fn from_state(psi: &BipartiteState) -> Self {
        StateFile {
            dim_s: psi.dim_s(),
            dim_e: psi.dim_e(),
            amps: matrix_rows(psi.amplitudes()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("state file: {e}")))
    }

    /// Validates the shape and builds the state; `normalize` opts in to
    /// rescaling.
    pub fn to_state(&self, normalize: bool) -> Result<BipartiteState, CliError> {
        if self.amps.len() != self.dim_s {
            return Err(CliError::Parse(format!(
                "state file: dim_s is {} but amps has {} rows",
                self.dim_s,
                self.amps.len()
            )));
        }
        if let Some((i, row)) = self.amps.iter().enumerate().find(|(_, r)| r.len() != self.dim_e) {
            return Err(CliError::Parse(format!(
                "state file: dim_e is {} but row {} has {} entries",
                self.dim_e,
                i + 1,
                row.len()
            )));
        }
        let rows: Vec<Vec<C64>> = self
            .amps
            .iter()
            .map(|r| r.iter().map(|p| C64::new(p[0], p[1])).collect())
            .collect();
        Ok(BipartiteState::from_amplitudes(CMatrix::from_rows(&rows), normalize)?)
    }

    /// Pretty JSON with every float at 17 significant digits, so a state
    /// read back is bit-identical.
    pub fn write(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{\n  \"dim_s\": {},\n  \"dim_e\": {},\n  \"amps\": [", self.dim_s, self.dim_e);
        for (i, row) in self.amps.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|p| format!("[{}, {}]", float17(p[0]), float17(p[1])))
                .collect();
            let sep = if i + 1 == self.amps.len() { "" } else { "," };
            let _ = writeln!(out, "    [{}]{sep}", cells.join(", "));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

/// `x` with 17 significant digits in JSON-compatible exponent form.
pub fn float17(x: f64) -> String {
    if x == 0.0 {
        // keep the sign bit of -0.0
        return if x.is_sign_negative() { "-0.0000000000000000e0".into() } else { "0.0000000000000000e0".into() };
    }
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DecompositionFile {
    pub lambda: Vec<f64>,
    pub s_vecs: Vec<Vec<Pair>>,
    pub e_vecs: Vec<Vec<Pair>>,
}

impl DecompositionFile {
    pub fn from_decomposition(d: &SchmidtDecomposition) -> Self {
        DecompositionFile {
            lambda: d.coefficients().to_vec(),
            s_vecs: matrix_columns(d.system_vectors()),
            e_vecs: matrix_columns(d.env_vectors()),
        }
    }

    pub fn to_decomposition(&self) -> Result<SchmidtDecomposition, CliError> {
        let cols = |vs: &[Vec<Pair>]| -> Result<CMatrix, CliError> {
            let n = vs.first().map_or(0, Vec::len);
            if vs.iter().any(|v| v.len() != n) {
                return Err(CliError::Parse("decomposition: vectors of unequal length".into()));
            }
            let columns: Vec<Vec<C64>> = vs.iter().map(|v| v.iter().map(|p| C64::new(p[0], p[1])).collect()).collect();
            Ok(CMatrix::from_columns(n, &columns))
        };
        Ok(SchmidtDecomposition::new(
            self.lambda.clone(),
            cols(&self.s_vecs)?,
            cols(&self.e_vecs)?,
        )?)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SchmidtReport {
    #[serde(flatten)]
    pub decomposition: DecompositionFile,
    pub rank: usize,
    pub even: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerdictReport {
    pub envariant: bool,
    pub residual: f64,
    pub counter: Option<Vec<Vec<Pair>>>,
    pub oracle_residual: f64,
}

impl VerdictReport {
    pub fn new(v: &EnvarianceVerdict, oracle_residual: f64) -> Self {
        VerdictReport {
            envariant: v.envariant,
            residual: v.residual,
            counter: v.counter.as_ref().map(|c| matrix_rows(c.matrix())),
            oracle_residual,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MergeRecord {
    pub rule: String,
    pub merged: [String; 2],
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DerivationReport {
    pub rules: Vec<String>,
    pub classes: Vec<Vec<String>>,
    pub trace: Vec<MergeRecord>,
    pub probabilities: Option<Vec<String>>,
    /// Why `probabilities` is null, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DerivationReport {
    pub fn new(store: &EqualityStore, probabilities: Result<Vec<(usize, Probability)>, envarkit_core::Error>) -> Self {
        let rules = store.rules();
        let (probabilities, error) = match probabilities {
            Ok(p) => (Some(p.iter().map(|(_, q)| q.to_string()).collect()), None),
            Err(e) => (None, Some(error_class(&e))),
        };
        DerivationReport {
            rules: envarkit_core::derivation::Rule::ALL
                .iter()
                .filter(|r| rules.enabled(**r))
                .map(|r| r.name().to_string())
                .collect(),
            classes: store
                .classes()
                .iter()
                .map(|c| c.iter().map(|&t| store.render(t)).collect())
                .collect(),
            trace: store
                .trace()
                .iter()
                .map(|m| MergeRecord {
                    rule: m.rule.name().to_string(),
                    merged: [store.render(m.a), store.render(m.b)],
                })
                .collect(),
            probabilities,
            error,
        }
    }
}

/// The variant name of a core error, e.g. `IncompleteDerivation`; every
/// message starts with it.
pub fn error_class(e: &envarkit_core::Error) -> String {
    let text = e.to_string();
    text.split(|c: char| !c.is_ascii_alphanumeric()).next().unwrap_or("Error").to_string()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FractionRecord {
    pub exact: String,
    pub decimal: f64,
}

impl FractionRecord {
    pub fn new(p: Probability) -> Self {
        FractionRecord {
            exact: p.to_string(),
            decimal: *p.numer() as f64 / *p.denom() as f64,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CountingReport {
    pub weights: Vec<String>,
    pub grain: usize,
    pub probabilities: Vec<FractionRecord>,
    /// Diagonal of the fine-grained reduced state, per branch.
    pub schmidt_weights: Vec<f64>,
    pub fine_probabilities: Vec<String>,
    pub derivation_merges: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AuditRecord {
    pub kind: String,
    pub dim: usize,
    pub trials: usize,
    pub max_dev: f64,
    pub mean_dev: f64,
    pub worst_basis_seed: u64,
    pub verdict: String,
}

impl From<&AuditReport> for AuditRecord {
    fn from(r: &AuditReport) -> Self {
        AuditRecord {
            kind: r.kind.clone(),
            dim: r.dim,
            trials: r.trials,
            max_dev: r.max_dev,
            mean_dev: r.mean_dev,
            worst_basis_seed: r.worst_basis_seed,
            verdict: r.verdict.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use envarkit_core::schmidt::schmidt;

    #[test]
    fn state_round_trip_is_bit_exact() {
        let third = (1.0f64 / 3.0).sqrt();
        let psi = BipartiteState::from_real_rows(&[vec![third, 0.0], vec![0.0, (2.0f64 / 3.0).sqrt()]], false).unwrap();
        let text = StateFile::from_state(&psi).write();
        assert!(text.contains("5.7735026918962573e-1"), "{text}");
        let back = StateFile::parse(&text).unwrap().to_state(false).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn float17_forms() {
        assert_eq!(float17(0.5), "5.0000000000000000e-1");
        assert_eq!(float17(-0.0), "-0.0000000000000000e0");
        let x: f64 = float17(0.1).parse().unwrap();
        assert_eq!(x, 0.1);
    }

    #[test]
    fn shape_errors_are_parse_errors() {
        let f = StateFile::parse(r#"{"dim_s":2,"dim_e":2,"amps":[[[1,0],[0,0]]]}"#).unwrap();
        assert!(matches!(f.to_state(false), Err(CliError::Parse(_))));
        assert!(StateFile::parse("{").is_err());
        assert!(StateFile::parse(r#"{"dim_s":1,"dim_e":1,"amps":[[[1,0]]],"x":1}"#).is_err());
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let f = StateFile::parse(r#"{"dim_s":1,"dim_e":2,"amps":[[[1,0],[1,0]]]}"#).unwrap();
        let err = f.to_state(false).unwrap_err();
        assert!(err.to_string().starts_with("NotNormalized"), "{err}");
        assert!(f.to_state(true).is_ok());
    }

    #[test]
    fn decomposition_round_trip() {
        let psi = BipartiteState::bell();
        let d = schmidt(&psi);
        let file = DecompositionFile::from_decomposition(&d);
        let json = serde_json::to_string(&file).unwrap();
        let back: DecompositionFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_decomposition().unwrap(), d);
        assert!(json.contains("0.7071067811865476"));
    }

    #[test]
    fn error_classes() {
        assert_eq!(error_class(&envarkit_core::Error::IncompleteDerivation), "IncompleteDerivation");
        assert_eq!(error_class(&envarkit_core::Error::DimensionTooSmall(2)), "DimensionTooSmall");
    }
}
