//! Operational analysis of closed cyclic queueing networks.
//!
//! A fixed window of `N` requests circulates through servers `S_1..S_K`,
//! the last of which hosts the knowledge base. The crate provides:
//!
//! * [`model`]: service profiles and their structural summary,
//! * [`oplaws`]: operational laws, closed-form responsiveness, critical points,
//! * [`mva`]: exact mean value analysis,
//! * [`decomp`]: flow-equivalent decomposition around the host,
//! * [`sim`]: a seeded discrete-event simulator of the cycle,
//! * [`modelfile`] and [`report`]: JSON model files, text and CSV reports.
//!
//! ```
//! use cyclenet::{ServiceProfile, oplaws};
//!
//! let profile = ServiceProfile::new(vec![0.5, 1.0]).unwrap();
//! let summary = profile.summarize();
//! let r = oplaws::responsiveness_approx(&summary, 3);
//! assert_eq!(r.responsiveness, 1.5 / (1.5 + 3.0));
//! ```

pub mod decomp;
pub mod error;
pub mod model;
pub mod modelfile;
pub mod mva;
pub mod oplaws;
pub mod report;
pub mod sim;

pub use decomp::{FesCurve, FlowBalanceReport, HostBalance};
pub use error::{Error, Result};
pub use model::{ServiceProfile, SystemSummary, WorkloadSpec, TABLE1_TIMES};
pub use modelfile::{load_model, parse_model, Model};
pub use mva::{solve_mva, MvaSolution, MvaStep};
pub use oplaws::{CriticalPoints, ResponsivenessPoint, Source};
pub use sim::{simulate, ServiceDistribution, SimConfig, SimResult};
