//! Spanish sentence generation from POS skeletons and word embeddings.
//!
//! A corpus is segmented, tagged and turned into three resources: a
//! POS-bigram transition matrix, a store of canned-text templates and an
//! associative table from tags to words. Word vectors supply semantic
//! proximity to a query. Three models combine these to produce sentences
//! that are new, grammatical in shape and tied to the query's meaning.

pub mod check;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod generate;
pub mod markov;
pub mod model1;
pub mod model2;
pub mod model3;
pub mod morphology;
pub mod pos;
pub mod resources;
pub mod templates;

pub use error::{Error, Result};
pub use generate::{generate, GenerateOptions, GeneratedSentence, Model};
pub use resources::Resources;

/// The generator used everywhere a seed is accepted.
pub type SeededRng = rand_chacha::ChaCha8Rng;
