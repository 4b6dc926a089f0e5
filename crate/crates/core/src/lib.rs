pub mod cli;
pub mod constructions;
pub mod dsl;
pub mod enumeration;
pub mod hierarchy;
pub mod invariants;
pub mod sft;
