pub mod analyze;
pub mod consensus;
pub mod estimate;
pub mod formation;
pub mod sweep;
