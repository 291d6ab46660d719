//! Orthogonal cocktail BPSK (OCB) toolkit.
//!
//! OCB layers two independently coded bit streams onto the four points of a
//! QPSK constellation: the first stream picks the axis (horizontal or
//! vertical), the second picks the sign on that axis. The receiver decodes the
//! axis stream first, re-encodes it, and then detects the sign stream on the
//! resulting one-dimensional BPSK.
//!
//! The crate is organized as:
//!
//! - [`awgn_info`]: mutual information of finite alphabets over AWGN, with a
//!   Gauss-Hermite quadrature backend and a Monte Carlo cross-check.
//! - [`codec`]: binary linear block codes (repetition, Hamming(7,4), regular
//!   LDPC, or any generator matrix) with soft-input decoders.
//! - [`modem`]: the OCB constellation, bit-pair mapper and two-stage soft
//!   demapper.
//! - [`linksim`]: Monte Carlo end-to-end link simulation.
//! - [`rates`]: the claimed composite rate, exact chain-rule stream rates and
//!   SNR sweeps.

pub mod awgn_info;
pub mod codec;
mod error;
pub mod gf2;
pub mod linksim;
pub mod modem;
pub mod quadrature;
pub mod rates;
pub mod special;

pub use awgn_info::{
    gaussian_capacity, mi_awgn_1d, mi_awgn_2d, mi_bpsk, mi_monte_carlo, mi_qpsk, noise_entropy,
    stream_mi_ocb, Alphabet, Dims, MiMethod, MiResult, NoiseModel, PointSet1D, PointSet2D,
    DEFAULT_QUAD_ORDER,
};
pub use codec::LinearCode;
pub use error::{Error, Result};
pub use linksim::{LinkConfig, SimStats, Stage2Input};
pub use modem::{Constellation, RxSample};
pub use rates::{RateRow, Spacing, SweepSpec};
