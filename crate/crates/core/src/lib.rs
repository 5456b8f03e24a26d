//! Elastic perfectly plastic constitutive laws computed as orthogonal
//! projections onto the tangent and normal cones of a yield domain.
//!
//! The crate provides symmetric tensor algebra ([`tensor`]), isotropic
//! elasticity ([`elasticity`]), Von Mises and Tresca yield domains
//! ([`yield_surface`]), closed-form cone projections ([`cone`]) checked
//! against a numerical reference ([`oracle`]), a material-point strain driver
//! ([`constitutive`]) and a 1-D velocity-stress wave solver ([`wave`]).
//!
//! ```
//! use conelaw::{project, Branch, SymTensor3, YieldDomain};
//!
//! let domain = YieldDomain::von_mises(1.0).unwrap();
//! let sigma = SymTensor3::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
//! let tau = SymTensor3::new(0.0, 0.0, 0.0, 0.5, 0.0, 0.0);
//! let p = project(&domain, sigma, tau).unwrap();
//! assert_eq!(p.branch, Branch::One);
//! assert!((p.split.normal - tau).norm() < 1e-15);
//! ```

pub mod cone;
pub mod constitutive;
pub mod elasticity;
pub mod error;
pub mod oracle;
pub mod sampling;
pub mod tensor;
pub mod wave;
pub mod yield_surface;

pub use cone::{project, project_allowing, Branch, ConeSplit, KktBranch, Projection};
pub use constitutive::{
    integrate_path, rate_split, script_h, DriftPolicy, DriverConfig, Interpolation, MaterialState,
    RateSplit, StrainPath, Trajectory,
};
pub use elasticity::ElasticModuli;
pub use error::{Error, Result};
pub use tensor::{SymTensor3, Vec3};
pub use wave::{Boundaries, BoundaryCondition, Grid1D, TimeProgram, WaveRecord, WaveScenario};
pub use yield_surface::{SaturationSet, YieldDomain, YieldFunction};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
