use crate::error::{invalid, Result};

use super::GeneratorParams;

pub const PROFILES: [&str; 7] = ["low", "medium", "high", "large", "desk-low", "desk-medium", "desk-high"];

/// Named sizes: `low`/`medium`/`high` are 2000×10000 at 20/10/5 % density,
/// `large` is 5000×100000 at 5 %, and the `desk-*` variants shrink the first
/// three by ten in both dimensions.
pub fn profile_params(profile: &str, seed: u64) -> Result<GeneratorParams> {
    let (m, n, density) = match profile {
        "low" => (2000, 10_000, 0.20),
        "medium" => (2000, 10_000, 0.10),
        "high" => (2000, 10_000, 0.05),
        "large" => (5000, 100_000, 0.05),
        "desk-low" => (200, 1000, 0.20),
        "desk-medium" => (200, 1000, 0.10),
        "desk-high" => (200, 1000, 0.05),
        other => {
            return Err(invalid(format!(
                "unknown profile '{other}' (expected one of {})",
                PROFILES.join(", ")
            )))
        }
    };
    Ok(GeneratorParams::new(m, n, density, 1.0, seed))
}
