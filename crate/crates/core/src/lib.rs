//! Low-dimensional dense interpretable (LDIR) text embeddings.
//!
//! A text is represented by its relatedness to a small set of anchor texts:
//! dimension `j` of the embedding is `Rel(anchor_j, text)`, by default the
//! cosine similarity of the two texts' encoder vectors. Anchors are chosen
//! from a corpus by farthest point sampling so that they spread out over the
//! encoder's embedding space.
//!
//! ```
//! use ldir::anchors::{build_anchor_set, AnchorOptions, SamplingMethod};
//! use ldir::encoder::{HashedEncoder, TextRecord};
//! use ldir::ldir::{embed_relative, Relatedness};
//!
//! let corpus: Vec<TextRecord> = ["cats purr", "dogs bark", "rockets launch", "rivers flow"]
//!     .iter()
//!     .enumerate()
//!     .map(|(i, t)| TextRecord::new(format!("c{i}"), *t).unwrap())
//!     .collect();
//! let encoder = HashedEncoder::new(64, 7).unwrap();
//! let anchors = build_anchor_set(&corpus, &encoder, &AnchorOptions::new(SamplingMethod::Fps, 3, 42)).unwrap();
//! let text = TextRecord::new("q", "cats purr loudly").unwrap();
//! let e = embed_relative(&text, &anchors, &encoder, Relatedness::Cosine).unwrap();
//! assert_eq!(e.len(), 3);
//! ```

pub mod anchors;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod format;
pub mod ldir;
pub mod vector;

pub use error::{LdirError, Result};
pub use vector::Vector;
