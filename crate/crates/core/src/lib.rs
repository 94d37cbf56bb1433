//! Set-based symbolic parity game solving.
//!
//! Vertex sets live in a [`Symbolic`] context that counts every set
//! operation and every (controllable) predecessor computation. On top of it
//! sit the symbolic progress measure ([`pm`]), the classical recursive
//! algorithm and its big-step variant ([`recursive`]), and explicit oracles
//! ([`explicit`]) used to check them.

pub mod attractor;
pub mod bigstep;
pub mod explicit;
pub mod game;
pub mod generate;
pub mod pgsolver;
pub mod pm;
pub mod rank;
pub mod recursive;
pub mod report;
pub mod solve;
pub mod strategy;
pub mod symbolic;

pub use bigstep::Policy;
pub use game::{GameError, GameParts, ParityGame, Player, Subgame};
pub use rank::{Bound, Rank, RankDomain};
pub use report::{Algorithm, SolveReport, SolveRun};
pub use solve::{solve, AlgoChoice, SolveOptions};
pub use strategy::Strategy;
pub use symbolic::{Backend, OpCounters, SetError, Symbolic, VertexSet};
