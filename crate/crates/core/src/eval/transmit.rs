use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airlink::SymbolVector;
use crate::pm_solver::LookupTable;
use crate::precoders::{apply_linear, wf, wfq, LinearPath, PrecoderMatrix};

use super::{EvalError, PreparedChannel};

/// Transmission scheme under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "PM")]
    Pm,
    #[serde(rename = "WF")]
    Wf,
    #[serde(rename = "WFQ")]
    Wfq,
    #[serde(rename = "WF_UNQ")]
    WfUnq,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Pm, Scheme::Wf, Scheme::Wfq, Scheme::WfUnq];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pm => "PM",
            Scheme::Wf => "WF",
            Scheme::Wfq => "WFQ",
            Scheme::WfUnq => "WF_UNQ",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| EvalError::InvalidArgument(format!("unknown scheme `{s}`")))
    }
}

/// `10^(db/10)`; `-inf` maps to zero power.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Maps a symbol vector to the power-scaled antenna signal.
#[derive(Debug, Clone)]
pub enum Transmitter<'a> {
    Lut { lut: &'a LookupTable, gain: f64 },
    Linear { precoder: PrecoderMatrix, path: LinearPath, etx: f64 },
    /// Zero transmit power.
    Silent { antennas: usize },
}

impl<'a> Transmitter<'a> {
    /// 1-bit LUT vectors scaled by `sqrt(etx/N)`.
    pub fn from_lut(lut: &'a LookupTable, etx: f64) -> Self {
        if etx == 0.0 {
            return Transmitter::Silent { antennas: lut.antennas() };
        }
        Transmitter::Lut {
            lut,
            gain: (etx / lut.antennas() as f64).sqrt(),
        }
    }

    pub fn for_scheme(scheme: Scheme, prepared: &'a PreparedChannel, etx: f64) -> Result<Self, EvalError> {
        if !(etx >= 0.0) {
            return Err(EvalError::InvalidArgument(format!("negative transmit power {etx}")));
        }
        let ch = &prepared.channel;
        if etx == 0.0 {
            return Ok(Transmitter::Silent { antennas: ch.antennas() });
        }
        Ok(match scheme {
            Scheme::Pm => Self::from_lut(prepared.lut.as_ref().ok_or(EvalError::MissingLut(scheme))?, etx),
            Scheme::Wf => Transmitter::Linear {
                precoder: wf(ch, etx, 1.0)?,
                path: LinearPath::Quantized,
                etx,
            },
            Scheme::Wfq => Transmitter::Linear {
                precoder: wfq(ch, etx, 1.0)?,
                path: LinearPath::AnalogDiag,
                etx,
            },
            Scheme::WfUnq => Transmitter::Linear {
                precoder: wf(ch, etx, 1.0)?,
                path: LinearPath::Unquantized,
                etx,
            },
        })
    }

    pub fn signal(&self, s: &SymbolVector) -> Vec<Complex64> {
        match self {
            Transmitter::Lut { lut, gain } => lut.lookup(s).iter().map(|&z| z * *gain).collect(),
            Transmitter::Linear { precoder, path, etx } => apply_linear(precoder, s, *etx, *path),
            Transmitter::Silent { antennas } => vec![Complex64::new(0.0, 0.0); *antennas],
        }
    }
}
