//! Generators for the hierarchical tile sets and their extensions.

pub mod padic;

pub use padic::{p_adic_tiles, p_adic_xp, PAdicTile, PadicTileset, TileKind};
pub mod extension;
pub mod robinson;
pub mod tm;

pub use extension::{
    layered_extension, poly_growth_x, traffic_light_f, traffic_light_xp, tsirelson_y,
    ExtendedTileset, LabelMap, Light, TsirelsonParams,
};
pub use robinson::{robinson_tiles, robinson_x2, RobinsonTile};
pub use tm::{tm_spacetime_sft, TuringMachine};
