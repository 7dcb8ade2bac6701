pub mod algebra;
pub mod census;
pub mod cubic_rings;
pub mod densities;
pub mod forms;
pub mod invariants;
pub mod pencils;
pub mod reduction;
pub mod verify;
