//! Decision-tree learning from game samples via Horn samples.

pub mod horn;
pub mod learn;
pub mod predicate;
pub mod sample;
pub mod tree;

pub use horn::{conflict_sample, horn_propagate, Conflict, PartialLabeling};
pub use learn::{label_leaves, learn_horn_tree, LearnOutcome};
pub use predicate::{generate_predicates, Axis, Predicate, Sign};
pub use sample::{game_to_horn, Consequent, DataPoint, GameSample, HornConstraint, HornSample, Implication};
pub use tree::{consistent_with_game, consistent_with_horn, parse_tree, DecisionTree};
