//! JSON and CSV formats shared by the command-line front end.
//!
//! Complex numbers are always `[re, im]` pairs. A matrix is a list of rows; a
//! state vector is a flat list of pairs (a one-column matrix is also accepted).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::optimize::SweepRecord;
use crate::qmath::{ComplexMatrix, C64};
use crate::states::{DensityOperator, Ensemble, Povm, PureState, Signal};

/// Significant digits kept in printed reports.
pub const REPORT_DIGITS: usize = 12;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

/// A state given either as a vector or as a density matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Vector(Vec<ComplexJson>),
    Matrix(MatrixJson),
}

impl StateJson {
    pub fn to_signal(&self) -> Result<Signal> {
        match self {
            StateJson::Vector(v) => {
                let entries: Vec<C64> = v.iter().map(|&[re, im]| C64::new(re, im)).collect();
                if entries.is_empty() {
                    return Err(Error::Parse("empty state vector".into()));
                }
                Ok(Signal::Pure(PureState::new(ComplexMatrix::column(&entries))?))
            }
            StateJson::Matrix(rows) => {
                let m = matrix_from_json(rows)?;
                if m.cols() == 1 && m.rows() > 1 {
                    Ok(Signal::Pure(PureState::new(m)?))
                } else {
                    Ok(Signal::Mixed(DensityOperator::new(m)?))
                }
            }
        }
    }

    pub fn from_signal(s: &Signal) -> Self {
        match s {
            Signal::Pure(p) => StateJson::Vector(p.vector().as_slice().iter().map(|z| [z.re, z.im]).collect()),
            Signal::Mixed(d) => StateJson::Matrix(matrix_to_json(d.matrix())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub probs: Vec<f64>,
    pub states: Vec<StateJson>,
}

impl EnsembleJson {
    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let signals = self
            .states
            .iter()
            .map(StateJson::to_signal)
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.probs.clone(), signals)
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            probs: e.probs().to_vec(),
            states: e.signals().iter().map(StateJson::from_signal).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub effects: Vec<MatrixJson>,
}

impl PovmJson {
    pub fn to_povm(&self) -> Result<Povm> {
        Povm::new(self.effects.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?)
    }

    pub fn from_povm(m: &Povm) -> Self {
        Self {
            effects: m.effects().iter().map(matrix_to_json).collect(),
        }
    }
}

/// Channel document, optionally carrying an input ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(default)]
    pub name: Option<String>,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleJson>,
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            name: ch.name().map(str::to_owned),
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
            ensemble: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel documents always serialize")
    }

    pub fn channel(&self) -> Result<QuantumChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        if let Some((k, op)) = kraus
            .iter()
            .enumerate()
            .find(|(_, op)| op.rows() != self.dim_out || op.cols() != self.dim_in)
        {
            return Err(Error::Dimension(format!(
                "Kraus operator {k} is {}x{}, but the file declares dim_out={} dim_in={}",
                op.rows(),
                op.cols(),
                self.dim_out,
                self.dim_in
            )));
        }
        let ch = QuantumChannel::new(kraus)?;
        Ok(match &self.name {
            Some(name) => ch.with_name(name.clone()),
            None => ch,
        })
    }

    pub fn ensemble(&self) -> Result<Option<Ensemble>> {
        self.ensemble.as_ref().map(EnsembleJson::to_ensemble).transpose()
    }
}

/// Rounds to [`REPORT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every floating-point number inside a JSON value.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Serializes `value` with numbers rounded for printing.
pub fn report_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types always serialize");
    serde_json::to_string_pretty(&round_json(v)).expect("JSON values always serialize")
}

/// CSV with header `param,s_output,s_exchange,coherent_info,input_policy`.
pub fn sweep_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(SweepRecord {
            param: round_sig(r.param),
            s_output: round_sig(r.s_output),
            s_exchange: round_sig(r.s_exchange),
            coherent_info: round_sig(r.coherent_info),
            input_policy: r.input_policy,
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses the CSV produced by [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
