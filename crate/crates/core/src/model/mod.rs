//! Physical model: parameters, Hamiltonians, effective levels and
//! tunneling energetics.

mod amplitudes;
mod hamiltonians;
mod levels;
mod params;

pub use amplitudes::{
    decompose_tunneling, josephson_energies, random_amplitudes, toy_amplitudes, toy_collective_magnitude,
    JosephsonEnergies, TunnelingAmplitudes, TunnelingSplit,
};
pub use hamiltonians::{
    bcs_eigenvalue, build_h_collective, build_h_island, build_h_red, build_t_red, h_island_on, h_red_on,
    island_eigenvalue, j_squared_on, jz_on, t_red_between, RegisterBasis,
};
pub use levels::{effective_levels, EffectiveLevels};
pub use params::ModelParams;
