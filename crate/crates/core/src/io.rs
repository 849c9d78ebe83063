//! State and settings files, preset strings, and numeric output formatting.
//!
//! State files hold either a density matrix
//! `{"re": [[..4..] x4], "im": [[..4..] x4]}` or a pure state
//! `{"vec_re": [..4..], "vec_im": [..4..]}`. Settings files hold two frames
//! `{"A": [[a1],[a2],[a3]], "B": [[b1],[b2],[b3]]}` with unit-vector rows.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::observables::TestSetting;
use crate::states::{
    bell_state, rng_for, sample_state, werner, BellKind, DensityMatrix, PureState, SampleKind,
};

/// Significant digits used for every number the front end prints.
pub const OUTPUT_DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureFile {
    pub vec_re: Vec<f64>,
    pub vec_im: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum StateFile {
    Density(DensityFile),
    Pure(PureFile),
}

impl DensityFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.mat();
        let grid = |f: fn(&C64) -> f64| {
            (0..4)
                .map(|i| (0..4).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        DensityFile {
            re: grid(|z| z.re),
            im: grid(|z| z.im),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        if self.re.len() != 4 || self.im.len() != 4 {
            return Err(Error::Parse(
                "density matrix needs 4 rows in `re` and `im`".into(),
            ));
        }
        let mut data = Vec::with_capacity(16);
        for (r, i) in self.re.iter().zip(&self.im) {
            if r.len() != 4 || i.len() != 4 {
                return Err(Error::Parse("density matrix rows need 4 entries".into()));
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)));
        }
        DensityMatrix::validate(&CMat::from_vec(4, 4, data)?)
    }
}

impl PureFile {
    pub fn from_state(p: &PureState) -> Self {
        PureFile {
            vec_re: p.vec().iter().map(|z| z.re).collect(),
            vec_im: p.vec().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        if self.vec_re.len() != 4 || self.vec_im.len() != 4 {
            return Err(Error::Parse(
                "pure state needs 4 entries in `vec_re` and `vec_im`".into(),
            ));
        }
        let v: Vec<C64> = self
            .vec_re
            .iter()
            .zip(&self.vec_im)
            .map(|(&a, &b)| C64::new(a, b))
            .collect();
        PureState::from_slice(&v)
    }
}

/// A state resolved from a preset or file, with a printable descriptor.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub descriptor: String,
    pub rho: DensityMatrix,
    pub pure: Option<PureState>,
}

/// Parses `singlet`, `phi+`, `phi-`, `psi+`, `psi-`, `werner:<beta>` or
/// `mixed:<seed>:<rank>`. Returns `Ok(None)` for anything that is not a
/// preset name.
pub fn parse_state_preset(spec: &str) -> Result<Option<LoadedState>> {
    if let Ok(kind) = spec.parse::<BellKind>() {
        let p = bell_state(kind);
        return Ok(Some(LoadedState {
            descriptor: spec.to_string(),
            rho: p.density(),
            pure: Some(p),
        }));
    }
    if let Some(rest) = spec.strip_prefix("werner:") {
        let beta: f64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad Werner weight `{rest}`")))?;
        return Ok(Some(LoadedState {
            descriptor: spec.to_string(),
            rho: werner(beta)?,
            pure: None,
        }));
    }
    if let Some(rest) = spec.strip_prefix("mixed:") {
        let (seed, rank) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected mixed:<seed>:<rank>, got `{spec}`")))?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::Parse(format!("bad seed `{seed}`")))?;
        let rank: usize = rank
            .parse()
            .map_err(|_| Error::Parse(format!("bad rank `{rank}`")))?;
        let rho = sample_state(SampleKind::Mixed { rank }, &mut rng_for(seed, 0))?.density();
        return Ok(Some(LoadedState {
            descriptor: spec.to_string(),
            rho,
            pure: None,
        }));
    }
    Ok(None)
}

pub fn parse_state_json(text: &str) -> Result<(DensityMatrix, Option<PureState>)> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match file {
        StateFile::Density(d) => Ok((d.to_state()?, None)),
        StateFile::Pure(p) => {
            let p = p.to_state()?;
            Ok((p.density(), Some(p)))
        }
    }
}

/// Resolves a preset name or reads a state file.
pub fn load_state(spec: &str) -> Result<LoadedState> {
    if let Some(s) = parse_state_preset(spec)? {
        return Ok(s);
    }
    let text = read_file(spec)?;
    let (rho, pure) = parse_state_json(&text)?;
    Ok(LoadedState {
        descriptor: spec.to_string(),
        rho,
        pure,
    })
}

/// `aligned`, `flipped-b3`, or a settings file.
pub fn load_setting(spec: &str) -> Result<TestSetting> {
    match spec {
        "aligned" => Ok(TestSetting::aligned()),
        "flipped-b3" => Ok(TestSetting::flipped_b3()),
        path => parse_setting_json(&read_file(path)?),
    }
}

pub fn parse_setting_json(text: &str) -> Result<TestSetting> {
    // Go through Value first so triad validation errors keep their variant.
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let frame = |key: &str| -> Result<[[f64; 3]; 3]> {
        serde_json::from_value(v.get(key).cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("settings field `{key}`: {e}")))
    };
    let a = crate::observables::Triad::new_lenient(frame("A")?)?;
    let b = crate::observables::Triad::new_lenient(frame("B")?)?;
    Ok(TestSetting::new(a, b))
}

fn read_file(path: &str) -> Result<String> {
    fs::read_to_string(Path::new(path)).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// `x` rounded to [`OUTPUT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", OUTPUT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Plain-decimal rendering with [`OUTPUT_DIGITS`] significant digits.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

/// Rounds every float inside a JSON tree.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r = round_sig(x);
                let r = if r == 0.0 { 0.0 } else { r };
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn to_output_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
