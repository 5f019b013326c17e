//! Simulator and parameter engine for a quantum memory for light held in a
//! single vapor cell.
//!
//! Two classes of atoms, pumped into m = −F and m = +F, form two collective
//! bosonic modes that couple to the cosine and sine sidebands of a probe
//! through a QND interaction. The crate evolves those modes as Gaussian
//! states and computes the field intensities, level shifts and noise
//! budgets needed to run the memory:
//!
//! * [`units`] and [`scenario`]: constants, cesium data, configuration.
//! * [`gaussian`]: Gaussian states, symplectic maps, homodyne conditioning.
//! * [`shifts`]: Zeeman, Stark and ac Zeeman ladders; compensation and
//!   π-pulse design.
//! * [`decoherence`]: collisions, scattering, boundary losses, pumping.
//! * [`memory`]: QND maps, class rotations, write and read protocols.

pub mod decoherence;
pub mod error;
pub mod gaussian;
pub mod memory;
pub mod scenario;
pub mod shifts;
pub mod units;

pub use error::{Error, Result};
pub use scenario::{load_scenario, load_scenario_file, ConfigError, ScenarioConfig};
