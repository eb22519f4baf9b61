//! Local-expert discovery and place recommendation over reviewer social
//! graphs.
//!
//! A query (category, city, mode, walk length) selects a reviewer graph; a
//! plain or lazy random walk, or a centrality baseline, picks local experts
//! from it; the majority-positive places those experts reviewed are ranked
//! by positive, then negative, review counts. [`metrics`] and [`evaluate`]
//! score runs against the review-count gold standard.

pub mod bench;
pub mod centrality;
pub mod error;
pub mod evaluate;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod output;
pub mod recommend;
pub mod synth;
pub mod walk;

pub use error::{Error, Result};
pub use graph::ReviewerGraph;
pub use model::{Dataset, Mode, Place, Query, Review, Sentiment, User};
pub use recommend::{recommend, Aggregation, Fallback, Method, QueryMap, RecommendConfig, RecommendationRun};
