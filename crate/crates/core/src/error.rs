use std::fmt;

/// Where in an input (file or structure) a problem was found.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Location {
    /// The input file, when the value was loaded from one.
    pub file: Option<String>,
    /// Where inside the value, e.g. `composition f;g`.
    pub path: String,
    pub line: Option<usize>,
}

impl Location {
    pub fn at(path: impl Into<String>) -> Self {
        Location { file: None, path: path.into(), line: None }
    }

    pub fn with_line(mut self, line: Option<usize>) -> Self {
        self.line = line;
        self
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(file), Some(l)) => write!(f, "{file}:{l}: {}", self.path),
            (Some(file), None) => write!(f, "{file}: {}", self.path),
            (None, Some(l)) => write!(f, "{} (line {l})", self.path),
            (None, None) => write!(f, "{}", self.path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error("law `{law}` violated at {location}: {witness}")]
    LawViolation { law: String, location: Location, witness: String },

    #[error("type mismatch at {location}: {message}")]
    TypeMismatch { location: Location, message: String },

    #[error("enumeration of {what} exceeds cap {cap}")]
    SizeBlowup { what: String, cap: usize },

    #[error("functor is not etale at object `{object}`: {message}")]
    NotEtale { object: String, message: String },

    #[error("not dualizable: {0}")]
    NotDualizable(String),

    #[error("wrong shape: {0}")]
    WrongShape(String),

    #[error("row count {rows} at `{object}` exceeds skeleton bound {bound}")]
    RowTooLarge { object: String, rows: usize, bound: usize },

    #[error("unknown law suite `{0}`")]
    UnknownSuite(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable machine-readable code for each variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::LawViolation { .. } => "law-violation",
            Error::TypeMismatch { .. } => "type-mismatch",
            Error::SizeBlowup { .. } => "size-blowup",
            Error::NotEtale { .. } => "not-etale",
            Error::NotDualizable(_) => "not-dualizable",
            Error::WrongShape(_) => "wrong-shape",
            Error::RowTooLarge { .. } => "row-too-large",
            Error::UnknownSuite(_) => "unknown-suite",
            Error::Io { .. } => "io",
        }
    }

    pub fn law(law: impl Into<String>, location: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::LawViolation { law: law.into(), location: Location::at(location), witness: witness.into() }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: Location::at(location), message: message.into() }
    }

    pub fn mismatch(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::TypeMismatch { location: Location::at(location), message: message.into() }
    }

    pub fn blowup(what: impl Into<String>, cap: usize) -> Self {
        Error::SizeBlowup { what: what.into(), cap }
    }

    pub fn location(&self) -> Option<&Location> {
        match self {
            Error::Parse { location, .. } | Error::LawViolation { location, .. } | Error::TypeMismatch { location, .. } => Some(location),
            _ => None,
        }
    }

    pub fn location_mut(&mut self) -> Option<&mut Location> {
        match self {
            Error::Parse { location, .. } | Error::LawViolation { location, .. } | Error::TypeMismatch { location, .. } => Some(location),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&str> {
        match self {
            Error::LawViolation { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
