pub mod criteria;
pub mod field;
pub mod maps;
pub mod rng;
pub mod sets;
pub mod verify;
