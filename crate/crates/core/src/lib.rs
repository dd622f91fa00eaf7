//! Lane detection on sparse 2D landmark maps.
//!
//! A racing lane is marked by two rows of cones. Given a noisy map of cone
//! positions (with false positives) and the car pose, [`search::clc`] builds a
//! distance graph over the cones, enumerates pairs of vertex paths that satisfy
//! geometric lane constraints with a backtracking depth-first search, and picks
//! the most plausible pair with a small pairwise-trained scoring network.
//!
//! ```
//! use clc::geometry::Point2;
//! use clc::graph::{CarPose, ConeMap, DetectionConfig};
//! use clc::search::clc;
//!
//! let mut pts = Vec::new();
//! for i in 0..6 {
//!     pts.push(Point2::new(i as f64 * 3.0, 1.5));
//!     pts.push(Point2::new(i as f64 * 3.0, -1.5));
//! }
//! let map = ConeMap::new(pts).unwrap();
//! let pose = CarPose::from_yaw(Point2::new(-0.5, 0.0), 0.0);
//! let out = clc(&map, &pose, &DetectionConfig::default(), None, None).unwrap();
//! let lane = out.lane.expect("corridor has a lane");
//! assert_eq!(lane.pair.left.len(), 6);
//! assert_eq!(lane.pair.right.len(), 6);
//! ```

pub mod error;
pub mod eval;
pub mod geometry;
pub mod graph;
pub mod ranker;
pub mod search;

#[doc(hidden)]
pub mod cli;

pub use error::{Error, Result};
