//! Domain JSON files: boundary rings in embedding coordinates plus the
//! provenance needed to regenerate them. Schema shipped in `schema/`.

use serde::{Deserialize, Serialize};

use crate::domains::ConvexPolyDomain;
use crate::error::Result;
use crate::kernel::{Curvature, ModelPoint};

pub const DOMAIN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainMetadata {
    pub seed: u64,
    pub h: f64,
    /// Producing operation: "lune" or "supports".
    pub generator: String,
}

/// Serialized λ-convex domain: closed counterclockwise boundary ring in
/// embedding coordinates (model-exact, not chart coordinates).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainFile {
    pub schema_version: u32,
    pub kappa: f64,
    pub lambda: f64,
    pub boundary: Vec<[f64; 3]>,
    pub metadata: DomainMetadata,
}

impl DomainFile {
    pub fn from_ring(
        kappa: Curvature,
        lambda: f64,
        ring: &[ModelPoint],
        metadata: DomainMetadata,
    ) -> DomainFile {
        DomainFile {
            schema_version: DOMAIN_SCHEMA_VERSION,
            kappa: kappa.kappa(),
            lambda,
            boundary: ring.iter().map(|p| p.coords()).collect(),
            metadata,
        }
    }

    pub fn curvature(&self) -> Result<Curvature> {
        Curvature::new(self.kappa)
    }

    /// Reprojects the stored coordinates onto the model surface and
    /// validates convexity.
    pub fn to_domain(&self) -> Result<ConvexPolyDomain> {
        let kappa = self.curvature()?;
        let ring: Vec<ModelPoint> = self
            .boundary
            .iter()
            .map(|&c| ModelPoint::project(kappa, c))
            .collect();
        ConvexPolyDomain::new(kappa, ring)
    }
}
