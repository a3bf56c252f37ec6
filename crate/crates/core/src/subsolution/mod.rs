//! Self-similar Rayleigh–Taylor subsolutions: flux and entropy solution,
//! admissibility, perturbation search, assembly and verification.

pub mod admissibility;
pub mod assemble;
pub mod flux;
pub mod verify;

pub use admissibility::{
    admissibility_i, critical_ratio, energy_conversion, find_admissible_perturbation, first_order_ibar,
    h_functions, EnergyConversion,
};
pub use assemble::{assemble_subsolution, reduced_inequality_sides, Subsolution, SubsolutionPoint, SubsolutionProfile};
pub use flux::{
    entropy_density, flux_g, growth_rates, mixing_energy_e, Bump, FluxValue, PerturbationProfile, RarefactionFan,
};
pub use verify::{verify_subsolution, SubsolutionReport, VerifyOptions, WeakTestFunction};
