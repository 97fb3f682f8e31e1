//! Dataset loading, preprocessing and the per-class split protocol.

mod dataset;
mod preprocess;
mod split;
mod synthetic;

pub use dataset::{load_csv, load_csv_with, save_csv, DomainDataset, LabelColumn};
pub use preprocess::{pca_fit_transform, standardize, PcaModel, Standardized, CONSTANT_STD};
pub use split::{
    manifest_text, parse_manifest, sample_split, split_indices, write_manifest, Role, Split, SplitIndices, SplitSpec,
};
pub use synthetic::{rotated_gaussians_shift, RotatedGaussians};
