//! Candidate ranking: lane features, a small pairwise-trained scoring network,
//! its trainer and weight files.

pub mod features;
pub mod io;
pub mod net;
pub mod select;
pub mod train;

pub use features::{extract_features, features_from_parts, variance, FeatureVector, FEATURE_DIM};
pub use io::{load_pairs, load_weights, save_pairs, save_weights, WeightsMeta};
pub use net::{gt_probability, net_forward, pair_probability, sigmoid, RankerWeights, HIDDEN, PARAM_COUNT};
pub use select::{fallback_rank, most_likely_candidate};
pub use train::{loss_and_gradient, pairwise_accuracy, train, train_with_log, PairSample, RankTrainConfig, TrainReport};
