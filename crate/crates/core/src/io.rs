//! JSON file formats for channels, states, dilations and verdicts.
//!
//! Matrices are arrays of rows. Every document carries `"ordering": "qp"`.

use crate::channel::GaussianChannel;
use crate::dilation::UnitaryDilation;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::state::GaussianState;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const ORDERING: &str = "qp";

type Rows = Vec<Vec<f64>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    ordering: String,
    n_in: usize,
    n_out: usize,
    #[serde(rename = "X")]
    transfer: Rows,
    #[serde(rename = "Y")]
    noise: Rows,
    v: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    ordering: String,
    n: usize,
    gamma: Rows,
    mean: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DilationFile {
    ordering: String,
    n: usize,
    ell: usize,
    #[serde(rename = "S")]
    symplectic: Rows,
    #[serde(rename = "gamma_E")]
    env_covariance: Rows,
    #[serde(rename = "sigma_E")]
    env_form: Rows,
    pure: bool,
}

fn rows(m: &Matrix) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(field: &str, rows: &Rows, expected_rows: usize, expected_cols: usize) -> Result<Matrix> {
    let bad = |message: String| Error::Format {
        field: field.to_string(),
        message,
    };
    if rows.len() != expected_rows {
        return Err(bad(format!("expected {expected_rows} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expected_cols {
            return Err(bad(format!(
                "row {i}: expected {expected_cols} entries, found {}",
                row.len()
            )));
        }
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if flat.iter().any(|x| !x.is_finite()) {
        return Err(bad("non-finite entry".into()));
    }
    Ok(Matrix::from_row_slice(expected_rows, expected_cols, &flat))
}

fn vector(field: &str, values: &[f64], expected: usize) -> Result<Vector> {
    if values.len() != expected {
        return Err(Error::Format {
            field: field.to_string(),
            message: format!("expected {expected} entries, found {}", values.len()),
        });
    }
    Ok(Vector::from_column_slice(values))
}

fn check_ordering(ordering: &str) -> Result<()> {
    if ordering != ORDERING {
        return Err(Error::Format {
            field: "ordering".into(),
            message: format!("unsupported ordering {ordering:?}, only \"qp\" is accepted"),
        });
    }
    Ok(())
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        field: field_hint(&e.to_string()),
        message: e.to_string(),
    })
}

/// Pulls a backticked field name out of a serde message, if present.
fn field_hint(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".into())
}

fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("file types serialize");
    text.push('\n');
    text
}

pub fn channel_to_json(ch: &GaussianChannel) -> String {
    render(&ChannelFile {
        ordering: ORDERING.into(),
        n_in: ch.modes_in,
        n_out: ch.modes_out,
        transfer: rows(&ch.transfer),
        noise: rows(&ch.noise),
        v: ch.displacement.iter().copied().collect(),
    })
}

pub fn channel_from_json(text: &str) -> Result<GaussianChannel> {
    let file: ChannelFile = parse(text)?;
    check_ordering(&file.ordering)?;
    let (din, dout) = (2 * file.n_in, 2 * file.n_out);
    GaussianChannel::new(
        matrix("X", &file.transfer, din, dout)?,
        matrix("Y", &file.noise, dout, dout)?,
        vector("v", &file.v, dout)?,
    )
}

pub fn state_to_json(state: &GaussianState) -> String {
    render(&StateFile {
        ordering: ORDERING.into(),
        n: state.modes,
        gamma: rows(&state.covariance),
        mean: state.mean.iter().copied().collect(),
    })
}

pub fn state_from_json(text: &str) -> Result<GaussianState> {
    let file: StateFile = parse(text)?;
    check_ordering(&file.ordering)?;
    let dim = 2 * file.n;
    GaussianState::with_mean(
        matrix("gamma", &file.gamma, dim, dim)?,
        vector("mean", &file.mean, dim)?,
    )
}

pub fn dilation_to_json(d: &UnitaryDilation) -> String {
    render(&DilationFile {
        ordering: ORDERING.into(),
        n: d.system_modes,
        ell: d.env_modes,
        symplectic: rows(&d.symplectic),
        env_covariance: rows(&d.env_covariance),
        env_form: rows(&d.env_form),
        pure: d.pure,
    })
}

pub fn dilation_from_json(text: &str) -> Result<UnitaryDilation> {
    let file: DilationFile = parse(text)?;
    check_ordering(&file.ordering)?;
    let total = 2 * (file.n + file.ell);
    let env = 2 * file.ell;
    UnitaryDilation::new(
        file.n,
        matrix("S", &file.symplectic, total, total)?,
        matrix("gamma_E", &file.env_covariance, env, env)?,
        matrix("sigma_E", &file.env_form, env, env)?,
        file.pure,
    )
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    render(value)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Channel(GaussianChannel),
    State(GaussianState),
    Dilation(UnitaryDilation),
}

/// Parses any of the three file types, recognized by their matrix keys.
pub fn document_from_json(text: &str) -> Result<Document> {
    let value: Value = parse(text)?;
    let object = value.as_object().ok_or_else(|| Error::Format {
        field: "<document>".into(),
        message: "expected a JSON object".into(),
    })?;
    if object.contains_key("S") {
        dilation_from_json(text).map(Document::Dilation)
    } else if object.contains_key("gamma") {
        state_from_json(text).map(Document::State)
    } else if object.contains_key("X") {
        channel_from_json(text).map(Document::Channel)
    } else {
        Err(Error::Format {
            field: "<document>".into(),
            message: "expected a channel (X), state (gamma) or dilation (S)".into(),
        })
    }
}
