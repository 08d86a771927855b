//! Fermat quotients `q_p(u) = (u^(p-1) - 1) / p mod p`: direct evaluation, an
//! O(p) whole-table generator, a table-light single-query algorithm, the
//! dynamics of `u -> q_p(u)`, pseudorandomness measures, and a hash built
//! from iterated quotients.

pub mod arith;
pub mod batch;
pub mod context;
pub mod dynamics;
pub mod error;
pub mod hash;
pub mod lookup;
pub mod prng;
pub mod rng;
pub mod sieve;
pub mod stats;
pub mod sweep;

pub use batch::{generate_table, table_stream_fold, QuotientTable};
pub use context::{lp_smallest_nonzero, make_context, qp_eval, FqContext, Residue};
pub use dynamics::{
    aggregate_stats, fixed_point_distribution, graph_stats, orbit, GraphStats, OrbitResult,
    RandomMapBaseline, U0Policy,
};
pub use error::{FqError, Result};
pub use hash::{avalanche, digest, keygen, BitString, Digest, HashParams};
pub use lookup::{build_lookup, qp_lookup, rational_reconstruct, LookupTables, RationalPair};
