//! Instance sources that stress the guarantees from the other side:
//! handcrafted fixture families with known audit values, adaptive
//! adversaries that react to the algorithm's decisions, and a seeded
//! random generator for differential sweeps.

mod adaptive;
mod fixtures;
mod random;

pub use adaptive::{
    adversary_names, make_adversary, AllocatedPropTrap, DivisibleCefTrap, PairTrap,
    UswPairTrap, WithinClassTrap,
};
pub use fixtures::{
    all_fixtures, fixture, fixture_names, harmonic_cef, nested_single_class, pair_trap,
    pessimistic_separation, red_blue_usw, two_class_showcase, type_copies, universal_items,
    Fixture,
};
pub use random::{
    acceptance_suite, ocs_probe_set, random_instance, random_instance_with_classes,
    random_suite, ranking_probe_set, GeneratorBounds, ACCEPTANCE_SUITE_SEED, EDGE_DENSITIES,
    OCS_PROBE_SEED, RANKING_PROBE_SEED,
};
