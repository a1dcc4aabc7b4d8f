use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("face `{face}` is not in the closure of `{facet}`")]
    NotInClosure { face: String, facet: String },
    #[error("no unique image for face `{0}`: complex not regular enough")]
    AmbiguousImage(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("subdivision required: {0}")]
    SubdivisionRequired(String),
    #[error("boundary of boundary is nonzero in degree {0}")]
    BoundarySquared(usize),
    #[error("missing orientation data for generator `{0}`")]
    MissingOrientation(String),
    #[error("generator `{0}` is not orientation-reversing")]
    NotReversing(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("cusp error: {0}")]
    Cusp(String),
    #[error("missing geometry for link cell `{0}`")]
    MissingGeometry(String),
    #[error("invalid slope: {0}")]
    Slope(String),
    #[error("filling error: {0}")]
    Filling(String),
    #[error("layout error: {0}")]
    Layout(String),
    #[error("unsupported format `{0}`")]
    Format(String),
    #[error("malformed label `{0}`")]
    Label(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
