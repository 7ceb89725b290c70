//! Parsing and persistence for every artifact the toolkit exchanges:
//! triplet TSVs, ontology hierarchy files, similarity matrices, model
//! checkpoints and prediction exports.

mod dag;
mod model;
mod predictions;
mod similarity;
mod triplets;

pub use dag::load_dag;
pub use model::{load_model, save_model, Model, ModelKind};
pub use predictions::write_predictions;
pub use similarity::{load_similarity, save_similarity};
pub use triplets::load_triplets;
