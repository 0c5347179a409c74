//! Reception capacity of radio networks.
//!
//! A node in a radio network receives a message in a round when it stays
//! quiet and exactly one of its neighbours broadcasts. The number of such
//! receptions for a broadcast set `S` is `|D(S)|`, the count of vertices
//! perfectly dominated by `S`, and the reception capacity of the network is
//! the maximum of `|D(S)|` over all `S` (the MaxPDS problem).
//!
//! The crate is split into:
//!
//! * [`graph`]: the graph and vertex-set types, `D(S)` and instance generators.
//! * [`maxpds`]: exhaustive, local-search and sampling solvers, the closed-form
//!   expectation of `|D(S)|` under independent inclusion, and derandomization
//!   by conditional expectations.
//! * [`ucp`]: unique coverage instances and the reduction from unique coverage
//!   to MaxPDS, with solution lifting.
//! * [`game`]: the reception-capacity game, pure and mixed equilibrium checks,
//!   expected-quantity statistics, the equilibrium inequality audit, and
//!   price-of-anarchy reports.
//! * [`format`]: the text formats for graphs, unique coverage instances and
//!   profiles.

pub mod error;
pub mod format;
pub mod game;
pub mod graph;
pub mod maxpds;
pub mod ucp;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
