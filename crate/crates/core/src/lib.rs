//! Exchangeable Feller cut-and-paste (EFCP) chains on k-colorings of `[n]`.
//!
//! The crate is organised bottom-up:
//!
//! * [`partitions`] holds colorings, unlabeled partitions and the
//!   partition-matrix monoid with its action on colorings.
//! * [`paintbox`] holds column-stochastic matrices, paintbox laws and the
//!   product multinomial sampler.
//! * [`products`] tracks random products `Q_m = S_m ... S_1` and estimates
//!   their Lyapunov spectrum on the subspace orthogonal to the ones vector.
//! * [`chains`] simulates the EFCP chain, the induced simplex chain, the
//!   Ehrenfest family and the cyclic group chain.
//! * [`tvlab`] computes total-variation distances exactly on sufficient
//!   statistics, brackets them by Monte Carlo and searches for mixing times.
//! * [`projections`] handles the unlabeled (projected) chains.
//! * [`cli`] is the command line front end used by the `efcp` binary.
//!
//! Colors are 0-based inside the library and printed 1-based.

pub mod chains;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod paintbox;
pub mod partitions;
pub mod products;
pub mod projections;
pub mod rng;
pub mod tvlab;

pub use error::{Error, Result};
pub use paintbox::{PaintboxLaw, StochasticMatrix};
pub use partitions::{Coloring, PartitionMatrix, UnlabeledPartition};
pub use rng::RngStream;
pub use tvlab::{TvEstimate, TvKind};
