//! Distance-to-measure filtrations over Euclidean point clouds.
//!
//! The crate builds weighted Čech and Rips filtrations whose vertex weights
//! come from the distance-to-measure (DTM) of an empirical or weighted
//! discrete measure, computes their persistence diagrams over GF(2), and
//! checks the stability bounds relating those diagrams to Wasserstein and
//! Hausdorff distances between the input measures.
//!
//! Module map:
//!
//! * [`pointcloud`] – point clouds, discrete measures, CSV ingestion,
//!   synthetic data and delay embeddings.
//! * [`dtm`] – DTM evaluation and the stability constants `c(μ,m)`,
//!   `c(μ,m,p)` and the full-simplex filtration value `t_μ(Γ)`.
//! * [`filtration`] – radius functions, edge/simplex values and the weighted
//!   Rips / Čech builders.
//! * [`persistence`] – boundary-matrix reduction and diagrams.
//! * [`metrics`] – bottleneck and W2 distances, bound calculators and
//!   [`metrics::certify`].
//!
//! ```
//! use dtmf::prelude::*;
//!
//! let mu = DiscreteMeasure::new(
//!     PointCloud::from_rows(vec![vec![-1.0], vec![1.0]]).unwrap(),
//!     vec![0.2, 0.8],
//! )
//! .unwrap();
//! let params = DtmParams::new(0.3).unwrap();
//! let complex = dtm_filtration_of(&mu, params, PExponent::ONE, 1, 10.0).unwrap();
//! let diagram = reduce(&complex, &[0]).unwrap();
//! assert_eq!(diagram.nontrivial().count(), 2);
//! ```

pub mod dtm;
mod error;
pub mod filtration;
pub mod fmt;
pub mod matching;
pub mod metrics;
pub mod minimax;
pub mod persistence;
pub mod pointcloud;
pub mod svg;
pub mod transport;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::dtm::{c_const, c_const_p, dtm, dtm_weights, dtm_weights_of, simplex_filtration_value, DtmParams, WeightFunction};
    pub use crate::filtration::{
        build_weighted_cech, build_weighted_rips, dtm_filtration, dtm_filtration_of, edge_value, power_value, radius, FilteredComplex,
        PExponent, Simplex, WeightedGraph,
    };
    pub use crate::metrics::{bottleneck, certify, wasserstein2, CertifyInput, StabilityReport, Theorem};
    pub use crate::persistence::{betti, reduce, DiagramPoint, PersistenceDiagram};
    pub use crate::pointcloud::{delay_embedding, hausdorff, load_points, pairwise_distances, synth, DiscreteMeasure, PointCloud, SynthKind, TimeSeries};
    pub use crate::{Error, Result};
}
