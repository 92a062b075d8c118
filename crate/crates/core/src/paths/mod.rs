//! Paths on `[0, 1]` and the bridge/excursion constructions built on them.

mod bridge;
mod cadlag;
mod infimum;
mod theta;

pub use bridge::{
    build_ei_bridge, build_ei_bridge_refined, cyclic_shift, excursion_from_bridge, insert_cell_minima,
    sample_bessel_excursion, sample_brownian_bridge, sample_excursion, sample_jump_times, vervaat_transform, Excursion,
    DEFAULT_GRID,
};
pub use cadlag::{CadlagPath, Knot};
pub use infimum::{first_passage_below, forward_infimum, running_infimum};
pub use theta::{validate_theta, validate_theta_with, Theta, NORM_TOLERANCE};
