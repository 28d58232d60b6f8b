use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the similarity math is generic over.
///
/// Every score-producing routine in this crate works for any `Scalar`;
/// the crate root exports [`crate::Score`] (`f64`) as the concrete type
/// used by the pipeline and the CLI.
pub trait Scalar:
    Float + FromPrimitive + core::fmt::Debug + core::fmt::Display + Send + Sync + 'static
{
    /// `num / den` computed as a single division of exactly-converted integers.
    fn from_ratio(num: usize, den: usize) -> Self {
        Self::from_usize(num).expect("ratio numerator")
            / Self::from_usize(den).expect("ratio denominator")
    }

    fn from_config(value: f64) -> Self {
        Self::from_f64(value).expect("finite config value")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
