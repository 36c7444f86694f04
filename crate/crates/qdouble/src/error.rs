use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group descriptor: {0}")]
    GroupSpec(String),
    #[error("group order {order} exceeds cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("map is not a group homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("kernel of the projection is not normal in K")]
    KernelNotNormal,
    #[error("subgroup is not closed: {0}")]
    NotASubgroup(String),
    #[error("element {element} does not belong to {place}")]
    ElementOutOfRange { element: usize, place: String },
    #[error("slot {slot} out of range or group mismatch: {msg}")]
    SlotMismatch { slot: usize, msg: String },
    #[error("operator is not unitary of finite order (searched up to order {searched})")]
    NotFiniteOrder { searched: usize },
    #[error("forced outcome `{label}` has probability {prob:.3e} (effectively zero)")]
    ZeroProbability { label: String, prob: f64 },
    #[error("state is entangled across the requested factor split")]
    Entangled,
    #[error("amplitude cap exceeded: need {required} amplitudes, cap is {allowed}")]
    CapExceeded { required: u128, allowed: u128 },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
