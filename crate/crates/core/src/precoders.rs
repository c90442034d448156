//! Linear precoders: zero-forcing (solver start point), Wiener filter (WF)
//! and its quantization-aware variant (WFQ) with a diagonal analog stage.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::airlink::{quantize, ChannelRealization, SymbolVector};
use crate::numerics::{hermitian_solve, ComplexMatrix, NumericsError};

/// Distortion factor of the 1-bit quantizer under Gaussian input, `1 - 2/pi`.
pub const RHO_Q: f64 = 1.0 - 2.0 / PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrecoderError {
    #[error("channel is rank deficient: {0}")]
    RankDeficient(NumericsError),
    #[error("regularized system is singular: {0}")]
    SingularSystem(NumericsError),
    #[error("transmit power must be positive, got {0}")]
    NonPositivePower(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecoderKind {
    Zf,
    Wf,
    Wfq,
}

/// An `N x M` linear precoder.
#[derive(Debug, Clone)]
pub struct PrecoderMatrix {
    pub w: ComplexMatrix,
    pub kind: PrecoderKind,
    /// Per-antenna analog gains, present for WFQ only.
    pub analog_diag: Option<Vec<f64>>,
}

/// `W = H^H (H H^H)^{-1}`.
pub fn zf(ch: &ChannelRealization) -> Result<PrecoderMatrix, PrecoderError> {
    let h = ch.h();
    // (H H^H)^{-1} H is the adjoint of W because H H^H is Hermitian.
    let x = hermitian_solve(&h.gram_rows(), h).map_err(PrecoderError::RankDeficient)?;
    Ok(PrecoderMatrix {
        w: x.adjoint(),
        kind: PrecoderKind::Zf,
        analog_diag: None,
    })
}

/// Solves `R G = H^H` for `R = H^H H - rho * nondiag(H^H H) + (M/etx) I`.
fn regularized_filter(
    ch: &ChannelRealization,
    etx: f64,
    rho: f64,
) -> Result<ComplexMatrix, NumericsError> {
    let h = ch.h();
    let n = ch.antennas();
    let loading = ch.users() as f64 / etx;
    let mut r = h.gram_cols();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                r[(i, i)] += Complex64::new(loading, 0.0);
            } else {
                r[(i, j)] *= 1.0 - rho;
            }
        }
    }
    hermitian_solve(&r, &h.adjoint())
}

/// Wiener filter precoder normalized so that `sigma_s2 * tr(W W^H) = etx`.
pub fn wf(ch: &ChannelRealization, etx: f64, sigma_s2: f64) -> Result<PrecoderMatrix, PrecoderError> {
    if !(etx > 0.0) {
        return Err(PrecoderError::NonPositivePower(etx));
    }
    let g = regularized_filter(ch, etx, 0.0).map_err(PrecoderError::SingularSystem)?;
    // tr(R^-2 H^H H) = ||R^-1 H^H||_F^2 for Hermitian R.
    let f = (sigma_s2 / etx * g.frobenius_norm_sqr()).sqrt();
    Ok(PrecoderMatrix {
        w: g.scale(1.0 / f),
        kind: PrecoderKind::Wf,
        analog_diag: None,
    })
}

/// Quantization-aware Wiener filter plus its analog diagonal
/// `sqrt(2/pi) * diag(W W^H)^{1/2}`.
pub fn wfq(ch: &ChannelRealization, etx: f64, sigma_s2: f64) -> Result<PrecoderMatrix, PrecoderError> {
    if !(etx > 0.0) {
        return Err(PrecoderError::NonPositivePower(etx));
    }
    let g = regularized_filter(ch, etx, RHO_Q).map_err(PrecoderError::SingularSystem)?;
    let f = (sigma_s2 * (1.0 - RHO_Q) / etx * g.frobenius_norm_sqr()).sqrt();
    let w = g.scale(1.0 / f);
    let analog = (0..w.rows())
        .map(|n| FRAC_2_PI.sqrt() * w.row(n).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok(PrecoderMatrix {
        w,
        kind: PrecoderKind::Wfq,
        analog_diag: Some(analog),
    })
}

/// How a linear precoder's output reaches the antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearPath {
    /// `sqrt(etx/N) Q(W s)`: equal power per antenna.
    Quantized,
    /// `c D Q(W s)` with `c` fixing the total power to `etx`.
    AnalogDiag,
    /// `W s`, no transmit quantization.
    Unquantized,
}

/// Transmit signal for symbol vector `s`.
pub fn apply_linear(p: &PrecoderMatrix, s: &SymbolVector, etx: f64, path: LinearPath) -> Vec<Complex64> {
    let ws = p.w.mul_vec(s.symbols()).expect("precoder width equals user count");
    let n = p.w.rows();
    match path {
        LinearPath::Unquantized => ws,
        LinearPath::Quantized => {
            let g = (etx / n as f64).sqrt();
            quantize(&ws).into_iter().map(|z| z * g).collect()
        }
        LinearPath::AnalogDiag => {
            let diag = p
                .analog_diag
                .as_deref()
                .expect("analog path needs a precoder with an analog stage");
            // |Q(.)|^2 = 1, so ||D Q(Ws)||^2 = sum d_n^2 for every s.
            let total: f64 = diag.iter().map(|d| d * d).sum();
            let c = (etx / total).sqrt();
            quantize(&ws)
                .into_iter()
                .zip(diag)
                .map(|(z, &d)| z * (c * d))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zf_residual(ch: &ChannelRealization, w: &ComplexMatrix) -> f64 {
        ch.h()
            .matmul(w)
            .unwrap()
            .sub(&ComplexMatrix::identity(ch.users()))
            .unwrap()
            .frobenius_norm()
    }

    #[test]
    fn zf_small_cases() {
        let ch = ChannelRealization::new(0, ComplexMatrix::identity(3));
        assert!(zf(&ch).unwrap().w.sub(&ComplexMatrix::identity(3)).unwrap().frobenius_norm() < 1e-15);
        let ch = ChannelRealization::new(0, ComplexMatrix::from_real(1, 1, &[2.0]).unwrap());
        assert!((zf(&ch).unwrap().w[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zf_random_residual() {
        for id in 0..20 {
            let ch = ChannelRealization::draw(1, id, 0, 4, 32);
            let p = zf(&ch).unwrap();
            assert!(zf_residual(&ch, &p.w) <= 1e-10);
        }
    }

    #[test]
    fn zf_rank_deficient() {
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let ch = ChannelRealization::new(0, h);
        assert!(matches!(zf(&ch), Err(PrecoderError::RankDeficient(_))));
    }

    #[test]
    fn wf_scalar_closed_form() {
        // H = 1, M = N = 1, etx = 1: R = 2, G = 1/2, f = 1/2, W = 1.
        let ch = ChannelRealization::new(0, ComplexMatrix::identity(1));
        let p = wf(&ch, 1.0, 1.0).unwrap();
        assert!((p.w[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        let s = SymbolVector::from_index(2, 1).unwrap();
        let x = apply_linear(&p, &s, 1.0, LinearPath::Unquantized);
        assert!((x[0] - s.symbols()[0]).norm() < 1e-15);
    }

    #[test]
    fn wf_power_identity() {
        for (id, etx) in [(0, 0.1), (1, 1.0), (2, 10.0), (3, 1e4)] {
            let ch = ChannelRealization::draw(2, id, 0, 4, 32);
            let p = wf(&ch, etx, 1.0).unwrap();
            let ratio = p.w.frobenius_norm_sqr() / etx;
            assert!((ratio - 1.0).abs() <= 1e-8, "ratio {ratio}");
        }
    }

    #[test]
    fn wf_high_power_tends_to_inverse() {
        let ch = ChannelRealization::draw(4, 0, 0, 3, 3);
        let w = wf(&ch, 1e6, 1.0).unwrap().w;
        let zf = zf(&ch).unwrap().w;
        // Compare directions.
        let a = w.scale(1.0 / w.frobenius_norm());
        let b = zf.scale(1.0 / zf.frobenius_norm());
        assert!(a.sub(&b).unwrap().frobenius_norm() <= 1e-3);
    }

    #[test]
    fn rho_q_value() {
        assert_eq!(RHO_Q, 1.0 - 2.0 / std::f64::consts::PI);
        assert!((RHO_Q - 0.36338).abs() < 1e-5);
    }

    #[test]
    fn wfq_scalar_matches_wf_up_to_factor() {
        let ch = ChannelRealization::new(0, ComplexMatrix::from_row_major(1, 1, vec![c(0.7, -0.4)]).unwrap());
        let a = wf(&ch, 2.0, 1.0).unwrap().w[(0, 0)];
        let b = wfq(&ch, 2.0, 1.0).unwrap().w[(0, 0)];
        assert!((b - a / (1.0 - RHO_Q).sqrt()).norm() < 1e-13);
    }

    #[test]
    fn wfq_orthogonal_columns_is_wf_shaped() {
        // H^H H diagonal -> nondiag term vanishes.
        let h = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)]).unwrap();
        let ch = ChannelRealization::new(0, h);
        let a = wf(&ch, 3.0, 1.0).unwrap().w;
        let b = wfq(&ch, 3.0, 1.0).unwrap().w;
        let diff = b.sub(&a.scale(1.0 / (1.0 - RHO_Q).sqrt())).unwrap().frobenius_norm();
        assert!(diff < 1e-13);
    }

    #[test]
    fn wfq_analog_gains_positive() {
        for id in 0..100 {
            let ch = ChannelRealization::draw(5, id, 0, 4, 32);
            let p = wfq(&ch, 4.0, 1.0).unwrap();
            assert!(p.analog_diag.unwrap().iter().all(|&d| d > 0.0));
        }
    }

    #[test]
    fn quantized_path_equal_antenna_power() {
        let ch = ChannelRealization::draw(6, 0, 0, 4, 32);
        let etx = 5.0;
        let p = wf(&ch, etx, 1.0).unwrap();
        let s = SymbolVector::from_index(77, 4).unwrap();
        let x = apply_linear(&p, &s, etx, LinearPath::Quantized);
        for z in &x {
            assert!((z.norm() - (etx / 32.0f64).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn analog_path_unequal_power_fixed_total() {
        let ch = ChannelRealization::draw(7, 0, 0, 4, 32);
        let etx = 5.0;
        let p = wfq(&ch, etx, 1.0).unwrap();
        let s = SymbolVector::from_index(13, 4).unwrap();
        let x = apply_linear(&p, &s, etx, LinearPath::AnalogDiag);
        let powers: Vec<f64> = x.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = powers.iter().sum();
        assert!((total - etx).abs() < 1e-12);
        let mean = total / 32.0;
        let var = powers.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / 32.0;
        assert!(var > 0.0);
    }
}
