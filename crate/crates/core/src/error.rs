use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frame mismatch: state is in the omega = {state} frame, segment expects omega = {segment}; convert with change_frame first")]
    FrameMismatch { state: f64, segment: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("infeasible displacement: R = {r} is below D/4 = {min} (distance D = {d})")]
    InfeasibleDisplacement { r: f64, d: f64, min: f64 },

    #[error("infeasible timing window: {flag} does not hold ({detail})")]
    InfeasibleWindow { flag: &'static str, detail: String },

    #[error("degenerate ellipse: semi-axis vectors are parallel or zero")]
    DegenerateAxes,

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error(
        "grid too small: {detail}; try x in [{suggest_min:.3}, {suggest_max:.3}] with at least {suggest_points} points"
    )]
    GridTooSmall {
        detail: String,
        suggest_min: f64,
        suggest_max: f64,
        suggest_points: usize,
    },

    #[error("oracle inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
