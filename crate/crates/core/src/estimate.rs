use serde::{Deserialize, Serialize};

/// Which modulus an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    RhoK,
    RhoStar,
    OmegaK,
    Sigma,
}

impl EstimateKind {
    pub fn label(&self) -> &'static str {
        match self {
            EstimateKind::RhoK => "rho_k",
            EstimateKind::RhoStar => "rho_star",
            EstimateKind::OmegaK => "omega_k",
            EstimateKind::Sigma => "sigma",
        }
    }
}

/// How a sampled value relates to the exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Closed-form, no sampling error.
    Exact,
    LowerBound,
    UpperBound,
    /// A sampled sup of a sampled inf: neither a lower nor an upper bound in general.
    TwoSidedUnresolved,
}

impl Direction {
    pub fn label(&self) -> &'static str {
        match self {
            Direction::Exact => "exact",
            Direction::LowerBound => "lower-bound",
            Direction::UpperBound => "upper-bound",
            Direction::TwoSidedUnresolved => "two-sided-unresolved",
        }
    }
}

/// A sampled value of one of the moduli with its sampling resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub kind: EstimateKind,
    pub k: usize,
    pub radius: f64,
    pub value: f64,
    /// Points per torus dimension for the outer suprema.
    pub res_y: usize,
    /// Points per physical dimension of the coarse lattice on `B_R`.
    pub res_z: usize,
    pub direction: Direction,
    /// For `rho_star`: the order attaining the minimum.
    pub argmin_k: Option<usize>,
}

impl RhoEstimate {
    pub const CSV_HEADER: &'static str = "kind,k,R,value,res_y,res_z,direction";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.12e},{},{},{}",
            self.kind.label(),
            self.k,
            self.radius,
            self.value,
            self.res_y,
            self.res_z,
            self.direction.label()
        )
    }
}
