/// Numerical tolerances used across the crate, stored as `f64` and converted
/// to the working scalar on use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Bracket width for every computed polynomial root.
    pub root: f64,
    /// A target within this distance of a finite region endpoint is a
    /// boundary point.
    pub boundary: f64,
    /// Margin allowed on each Elfving condition.
    pub cert: f64,
    /// Relative residual separating "in the column space" from "not".
    pub admissibility: f64,
    /// Denominators of the closed-form weights below this are rejected.
    pub weight_denominator: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-12,
            boundary: 1e-10,
            cert: 1e-8,
            admissibility: 1e-8,
            weight_denominator: 1e-14,
        }
    }
}
