//! On-disk formats shared by the pipeline stages.

pub mod candidates;
pub mod commands;
pub mod confusions;
pub mod dict_tsv;
pub mod manifest;
pub mod mask;
pub mod pgrm;
pub mod scmx;
