//! Seasonal ARIMA modelling for monthly count series, implemented from the
//! ground up: identification (correlograms and unit-root testing),
//! conditional-least-squares estimation over arbitrary lag subsets,
//! residual diagnostics, and forecasting with accuracy scoring.
//!
//! The modules line up with the classical Box-Jenkins loop:
//!
//! * [`series`] and [`transform`]: CSV ingestion, seasonal layout, and
//!   (seasonal) differencing with an exact inverse
//! * [`correlogram`] and [`unitroot`]: stationarity and order
//!   identification
//! * [`sarima`] and [`select`]: estimation and criteria-based model choice
//! * [`diagnostics`]: residual adequacy checks
//! * [`forecast`]: point forecasts and accuracy measures
//! * [`simulate`]: deterministic synthetic processes, used as the oracle
//!   for everything above
//!
//! ```
//! use boxjenkins::sarima::{estimate, SarimaSpec};
//! use boxjenkins::simulate::{simulate, SimulationConfig};
//! use boxjenkins::transform::DifferenceSpec;
//!
//! let spec = SarimaSpec::new(&[1], &[], &[], &[], DifferenceSpec::new(0, 0, 12)?, false)?;
//! let cfg = SimulationConfig::new(spec.clone(), vec![0.6], 0.0, 1.0, 500, 42)?;
//! let (series, _shocks) = simulate(&cfg)?;
//! let model = estimate(&spec, &series)?;
//! let phi = model.coefficients()[0].1;
//! assert!((phi - 0.6).abs() < 0.1);
//! # Ok::<(), boxjenkins::Error>(())
//! ```

pub mod correlogram;
pub mod diagnostics;
mod error;
pub mod forecast;
mod ols;
mod optim;
pub mod poly;
pub mod sarima;
pub mod select;
pub mod series;
pub mod simulate;
pub mod transform;
pub mod unitroot;

pub use error::{Error, Result};
