//! Std side of monoaug: KITTI-layout IO, the batch augmentation pipeline,
//! evaluation reports, annotated previews and the command-line front end.

pub mod cli;
pub mod config;
pub mod kitti_io;
pub mod pipeline;
pub mod preview;
pub mod report;

pub use monoaug_core as core;
