//! Minimum-BER transmit-vector design for downlink multi-user MISO systems
//! with 1-bit DACs at the base station and 1-bit ADCs at the users.
//!
//! * [`numerics`]: small dense linear algebra and seeded random streams.
//! * [`airlink`]: QPSK alphabet, quantizer, channel and noise.
//! * [`precoders`]: ZF, WF and WFQ linear baselines.
//! * [`pm_solver`]: the product-maximization solver and lookup tables.
//! * [`eval`]: BER, mutual information, oracles and iteration statistics.

pub mod airlink;
pub mod eval;
pub mod numerics;
pub mod pm_solver;
pub mod precoders;

pub use airlink::{ChannelRealization, NoiseMode, SymbolVector};
pub use numerics::{ComplexMatrix, RealMatrix, SeededRng};
pub use pm_solver::{LookupTable, SolverConfig};
pub use precoders::PrecoderMatrix;
