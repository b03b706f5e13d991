//! Algorithms that read hidden-variable histories: each one builds a sliced
//! program, makes a single oracle call, and applies a decision rule to the
//! returned history at its checkpoints.

pub mod collision;
pub mod gi;
pub mod hashing;
pub mod juggle;
pub mod sd;
pub mod search;

pub use collision::{
    build_collision_program, distinguish_collision, generate_collision, CollisionInstance,
    CollisionOutcome, CollisionParams, CollisionVerdict,
};
pub use gi::{gi_to_sd, random_graph_pair, GraphPair, DEFAULT_LAMBDA};
pub use hashing::{draw_vv_hash, AffineHash};
pub use juggle::{
    build_juggle_program, build_with_plan, default_attempts, extract_checkpoint_values,
    prepare_pair, values_per_batch, JugglePlan,
};
pub use sd::{
    build_sd_program, generate_boundary_instance, generate_instance, solve_sd_general,
    solve_sd_one_to_one, variation_distance, InstanceFamily, SdInstance, SdLayout, SdOutcome,
    SdParams, Verdict,
};
pub use search::{
    dqp_search, prepare_search_state, SearchInstance, SearchOutcome, SearchParams, SearchPrep,
};
