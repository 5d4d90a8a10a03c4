//! Artifact files: instances, points, certificates, and run reports.
//!
//! Everything is JSON with every number carried as a *string*: exact
//! rationals render as `"p/q"` (just `"p"` when the denominator is 1) and
//! floats as the shortest decimal that round-trips. Maps are ordered, so
//! serialization is canonical — identical values produce identical bytes,
//! which is what makes generated artifacts reproducible and hashable.

use std::collections::BTreeMap;
use std::fmt;

use qpgames::games::BimatrixGame;
use qpgames::numerics::{Matrix, Rational, Scalar, SymMatrix, Vector};
use qpgames::qp::{BoxQp, KktReport, SimplexQp};
use qpgames::reductions::ReductionCertificate;
use qpgames::solvers::TracePoint;
use qpgames::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Render a slice of scalars as number strings.
fn render_slice<S: Scalar>(values: &[S]) -> Vec<String> {
    values.iter().map(Scalar::render).collect()
}

/// Parse a slice of number strings back into scalars.
fn parse_slice<S: Scalar>(values: &[String]) -> Result<Vec<S>> {
    values.iter().map(|v| S::parse(v)).collect()
}

/// Render a matrix as row-major rows of number strings.
fn render_rows<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| render_slice(m.row(i))).collect()
}

/// Parse rows of number strings into a matrix, checking rectangularity.
fn parse_rows<S: Scalar>(rows: &[Vec<String>]) -> Result<Matrix<S>> {
    let parsed = rows.iter().map(|row| parse_slice(row)).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed)
}

/// What an instance file describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    BoxQp,
    SimplexQp,
    BimatrixGame,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            InstanceKind::BoxQp => "box_qp",
            InstanceKind::SimplexQp => "simplex_qp",
            InstanceKind::BimatrixGame => "bimatrix_game",
        };
        f.write_str(name)
    }
}

/// One problem instance on disk. Quadratic programs store the symmetric
/// matrix `A` and linear term `b` (plus `scale` for simplex programs);
/// games store the two payoff matrices `A` and `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: InstanceKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b_matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl InstanceFile {
    pub fn from_box_qp(qp: &BoxQp<Rational>) -> Self {
        InstanceFile {
            kind: InstanceKind::BoxQp,
            n: qp.n(),
            m: None,
            a: render_rows(qp.a().as_matrix()),
            b: Some(render_slice(qp.b().as_slice())),
            b_matrix: None,
            scale: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_simplex_qp(qp: &SimplexQp<Rational>) -> Self {
        InstanceFile {
            kind: InstanceKind::SimplexQp,
            n: qp.n(),
            m: None,
            a: render_rows(qp.a().as_matrix()),
            b: Some(render_slice(qp.b().as_slice())),
            b_matrix: None,
            scale: Some(qp.scale().render()),
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_game(game: &BimatrixGame<Rational>) -> Self {
        InstanceFile {
            kind: InstanceKind::BimatrixGame,
            n: game.n(),
            m: Some(game.m()),
            a: render_rows(game.a()),
            b: None,
            b_matrix: Some(render_rows(game.b())),
            scale: None,
            metadata: BTreeMap::new(),
        }
    }

    fn expect_kind(&self, kind: InstanceKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Parse(format!(
                "expected a {kind} instance, found {}",
                self.kind
            )));
        }
        Ok(())
    }

    fn quadratic_parts<S: Scalar>(&self) -> Result<(SymMatrix<S>, Vector<S>)> {
        let a = SymMatrix::new(parse_rows(&self.a)?)?;
        let b = match &self.b {
            Some(b) => Vector::new(parse_slice(b)?),
            None => Vector::zeros(self.n),
        };
        if a.as_matrix().rows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.as_matrix().rows(),
            });
        }
        Ok((a, b))
    }

    pub fn to_box_qp<S: Scalar>(&self) -> Result<BoxQp<S>> {
        self.expect_kind(InstanceKind::BoxQp)?;
        let (a, b) = self.quadratic_parts()?;
        BoxQp::new(a, b)
    }

    pub fn to_simplex_qp<S: Scalar>(&self) -> Result<SimplexQp<S>> {
        self.expect_kind(InstanceKind::SimplexQp)?;
        let (a, b) = self.quadratic_parts()?;
        let scale = match &self.scale {
            Some(s) => S::parse(s)?,
            None => S::from_int(1),
        };
        SimplexQp::new(a, b, scale)
    }

    pub fn to_game<S: Scalar>(&self) -> Result<BimatrixGame<S>> {
        self.expect_kind(InstanceKind::BimatrixGame)?;
        let a = parse_rows(&self.a)?;
        let b = match &self.b_matrix {
            Some(rows) => parse_rows(rows)?,
            None => return Err(Error::Parse("game file is missing matrix B".into())),
        };
        let game = BimatrixGame::new(a, b)?;
        if game.n() != self.n || Some(game.m()) != self.m.or(Some(game.m())) {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: game.n(),
            });
        }
        Ok(game)
    }
}

/// A candidate point on disk: the vector itself, an optional second
/// vector `y` (for game profiles), and an optional dual value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub point: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<String>,
}

impl PointFile {
    pub fn from_vector<S: Scalar>(point: &Vector<S>) -> Self {
        PointFile {
            point: render_slice(point.as_slice()),
            y: None,
            dual: None,
        }
    }

    pub fn from_pair<S: Scalar>(x: &Vector<S>, y: &Vector<S>) -> Self {
        PointFile {
            point: render_slice(x.as_slice()),
            y: Some(render_slice(y.as_slice())),
            dual: None,
        }
    }

    pub fn with_dual<S: Scalar>(mut self, dual: &S) -> Self {
        self.dual = Some(dual.render());
        self
    }

    pub fn parse_point<S: Scalar>(&self) -> Result<Vector<S>> {
        Ok(Vector::new(parse_slice(&self.point)?))
    }

    /// Both vectors; `y` falls back to the point itself (a symmetric
    /// profile) when absent.
    pub fn parse_pair<S: Scalar>(&self) -> Result<(Vector<S>, Vector<S>)> {
        let x = self.parse_point()?;
        let y = match &self.y {
            Some(y) => Vector::new(parse_slice(y)?),
            None => x.clone(),
        };
        Ok((x, y))
    }
}

/// Reduction parameters on disk. The index layout (`x` block, `y` block,
/// trailing `z`) is determined by `n`; `z_index` is stored anyway so the
/// file is self-describing, and is cross-checked on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub n: usize,
    #[serde(rename = "M")]
    pub big_m: String,
    pub delta: String,
    pub eps: String,
    pub scale: String,
    pub z_index: usize,
}

impl CertificateFile {
    pub fn from_certificate(cert: &ReductionCertificate<Rational>) -> Self {
        CertificateFile {
            n: cert.n(),
            big_m: cert.big_m().render(),
            delta: cert.delta().render(),
            eps: cert.eps().render(),
            scale: cert.scale().render(),
            z_index: cert.z_index(),
        }
    }

    /// Parse the stored numbers. This checks structure only (the index
    /// layout matches `n`); semantic invariants — `M ≥ 1`, `scale = 2n`,
    /// the δ formula — are the audit's job, via [`ReductionCertificate::validate`].
    pub fn to_certificate(&self) -> Result<ReductionCertificate<Rational>> {
        let cert = ReductionCertificate::from_parts(
            self.n,
            Rational::parse(&self.big_m)?,
            Rational::parse(&self.delta)?,
            Rational::parse(&self.eps)?,
            Rational::parse(&self.scale)?,
        );
        if self.z_index != cert.z_index() {
            return Err(Error::Parse(format!(
                "certificate says z sits at index {}, but dimension {} puts it at {}",
                self.z_index,
                self.n,
                cert.z_index()
            )));
        }
        Ok(cert)
    }
}

/// One recorded solver iteration, numbers as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub objective: String,
    pub worst_residual: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fw_gap: Option<String>,
}

impl TraceRow {
    fn from_point(p: &TracePoint) -> Self {
        TraceRow {
            iteration: p.iteration,
            objective: p.objective.render(),
            worst_residual: p.worst_residual.render(),
            fw_gap: p.fw_gap.map(|g| g.render()),
        }
    }
}

/// What a command did: everything needed to reproduce the run (inputs,
/// digest, parameters, seed) plus its verdicts and measurements. Written
/// to stdout, never into artifact files — `wall_time_ms` is the one field
/// that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_interval: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outputs: BTreeMap<String, String>,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            instance_digest: None,
            parameters: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            residuals: None,
            dual_interval: None,
            dual: None,
            iterations: None,
            stage: None,
            outputs: BTreeMap::new(),
            wall_time_ms: 0,
        trace: None,
        }
    }

    pub fn set_parameter(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// Copy a verification report's numbers into the run report.
    pub fn absorb_kkt<S: Scalar>(&mut self, name: &str, kkt: &KktReport<S>) {
        self.verdicts.insert(name.to_string(), kkt.verdict);
        self.residuals = Some(render_slice(kkt.residuals.as_slice()));
        if let Some((lo, hi)) = &kkt.dual_interval {
            self.dual_interval = Some([lo.render(), hi.render()]);
        }
        if let Some(u) = &kkt.dual_value {
            self.dual = Some(u.render());
        }
    }

    pub fn absorb_trace(&mut self, trace: &[TracePoint]) {
        self.trace = Some(trace.iter().map(TraceRow::from_point).collect());
    }
}

/// Canonical serialization: pretty JSON plus a trailing newline. Identical
/// values always produce identical bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifact types always serialize");
    text.push('\n');
    text
}

/// Parse an artifact file, labelling failures with what was expected.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid {what} file: {e}")))
}

/// SHA-256 of the given bytes, hex-encoded. Used to fingerprint artifact
/// files in reports.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpgames::generators;

    #[test]
    fn instance_files_round_trip_exactly() {
        for seed in 0..10u64 {
            let mut rng = generators::rng(seed);
            let files = [
                InstanceFile::from_box_qp(&generators::box_qp(&mut rng, 3).unwrap()),
                InstanceFile::from_simplex_qp(&generators::simplex_qp(&mut rng, 4).unwrap()),
                InstanceFile::from_game(
                    &generators::game(&mut rng, 2, 3, generators::GameShape::General).unwrap(),
                ),
            ];
            for file in files {
                let text = to_canonical_json(&file);
                let back: InstanceFile = parse_json(&text, "instance").unwrap();
                assert_eq!(back, file);
                assert_eq!(to_canonical_json(&back), text);
            }
        }
    }

    #[test]
    fn instances_survive_conversion_to_core_types_and_back() {
        let mut rng = generators::rng(42);
        let qp = generators::box_qp::<Rational>(&mut rng, 3).unwrap();
        let file = InstanceFile::from_box_qp(&qp);
        let back = file.to_box_qp::<Rational>().unwrap();
        assert_eq!(back.a(), qp.a());
        assert_eq!(back.b(), qp.b());

        let sqp = generators::simplex_qp::<Rational>(&mut rng, 4).unwrap();
        let file = InstanceFile::from_simplex_qp(&sqp);
        let back = file.to_simplex_qp::<Rational>().unwrap();
        assert_eq!(back.a(), sqp.a());
        assert_eq!(back.scale(), sqp.scale());

        let game =
            generators::game::<Rational>(&mut rng, 3, 3, generators::GameShape::Imitation).unwrap();
        let file = InstanceFile::from_game(&game);
        let back = file.to_game::<Rational>().unwrap();
        assert_eq!(back.a(), game.a());
        assert_eq!(back.b(), game.b());
    }

    #[test]
    fn kind_mismatches_are_parse_errors() {
        let mut rng = generators::rng(7);
        let file = InstanceFile::from_box_qp(&generators::box_qp(&mut rng, 2).unwrap());
        assert!(matches!(
            file.to_simplex_qp::<Rational>(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(file.to_game::<Rational>(), Err(Error::Parse(_))));
    }

    #[test]
    fn rational_payloads_stay_exact() {
        let v = Vector::new(vec![
            Rational::from_ratio(1, 3),
            Rational::from_ratio(-7, 100),
        ]);
        let file = PointFile::from_vector(&v);
        assert_eq!(file.point, vec!["1/3", "-7/100"]);
        let back: Vector<Rational> = file.parse_point().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn float_payloads_use_shortest_round_trip_strings() {
        let v = Vector::new(vec![0.1f64, 1.0 / 3.0]);
        let file = PointFile::from_vector(&v);
        let back: Vector<f64> = file.parse_point().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn certificate_files_cross_check_the_index_layout() {
        let cert = ReductionCertificate::from_parts(
            2,
            Rational::from_int(1),
            Rational::from_ratio(1, 12),
            Rational::from_int(1),
            Rational::from_int(4),
        );
        let mut file = CertificateFile::from_certificate(&cert);
        assert_eq!(file.z_index, 4);
        let back = file.to_certificate().unwrap();
        assert_eq!(back.delta(), cert.delta());

        file.z_index = 3;
        assert!(matches!(file.to_certificate(), Err(Error::Parse(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"point": ["1"], "extra": true}"#;
        assert!(parse_json::<PointFile>(text, "point").is_err());
    }

    #[test]
    fn digests_are_stable_hex() {
        assert_eq!(
            digest(b"hello"),
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
    }
}
