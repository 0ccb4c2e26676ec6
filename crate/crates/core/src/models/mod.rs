//! Builtin model library and the JSON model file format.

mod builtin;
mod format;

pub use builtin::{
    builtin, c_alpha, circle_free, circle_trivial, obstruction_pair, point, rema_adj, s2_rotation, BUILTIN_NAMES,
};
pub use format::{
    bundle_to_string, from_file, load_bundle, load_model, model_to_string, parse_bundle, render_json, save_model,
    select, select_bundle, to_file, ClassEntry, Entry, FixedPointEntry, GeneratorEntry, MapEntry, ModelBundle,
    ModelFile, WeightEntry, SCHEMA_VERSION,
};
