//! JSON wire formats. Floats are written with 17 significant digits; column
//! indices are 1-based.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::{Error, Result};
use crate::generators::CoherenceReport;
use crate::selection::{IsometryCertificate, SelectionTrace};
use crate::subset::SubsetIndex;

/// Pretty JSON formatter printing every float as `{:.16e}` and non-finite floats as `null`.
struct SigDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as indented JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("serializing plain data into memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub subset: Vec<usize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub epsilon_achieved: f64,
    pub coherence_t: f64,
    pub scale: f64,
}

impl From<&IsometryCertificate> for CertificateJson {
    fn from(c: &IsometryCertificate) -> Self {
        CertificateJson {
            n: c.n,
            m: c.subset.m(),
            subset: c.subset.to_one_based(),
            lambda_min: c.lambda_min,
            lambda_max: c.lambda_max,
            epsilon_achieved: c.epsilon_achieved,
            coherence_t: c.coherence_t,
            scale: c.scale,
        }
    }
}

impl CertificateJson {
    pub fn subset_index(&self) -> Result<SubsetIndex> {
        SubsetIndex::from_one_based(&self.subset, self.m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub parent_size: usize,
    pub child_size: usize,
    pub deviation_after: f64,
    pub retries_used: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub epsilon_target: f64,
    pub steps: Vec<StepJson>,
    pub final_subset: Vec<usize>,
}

impl From<&SelectionTrace> for TraceJson {
    fn from(t: &SelectionTrace) -> Self {
        TraceJson {
            epsilon_target: t.epsilon_target,
            steps: t
                .steps
                .iter()
                .map(|s| StepJson {
                    parent_size: s.parent_size,
                    child_size: s.child_size,
                    deviation_after: s.deviation_after,
                    retries_used: s.retries_used,
                    seed: s.seed,
                })
                .collect(),
            final_subset: t.final_subset.to_one_based(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub t: f64,
    /// 1-based.
    pub argmax_column: usize,
    pub per_column_norms: Vec<f64>,
}

impl CoherenceJson {
    pub fn new(n: usize, m: usize, r: &CoherenceReport) -> Self {
        CoherenceJson {
            n,
            m,
            t: r.t,
            argmax_column: r.argmax_column + 1,
            per_column_norms: r.per_column_norms.clone(),
        }
    }
}

pub fn parse_certificate(text: &str) -> Result<CertificateJson> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}
