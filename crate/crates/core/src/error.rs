use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("characteristic 2 is not supported; the semifield families need q odd")]
    EvenCharacteristic,
    #[error("extension degree parameter h must be positive")]
    ZeroDegree,
    #[error("field of order {p}^{n} exceeds the configured bound {bound}")]
    FieldTooLarge { p: u32, n: u32, bound: u64 },
    #[error("element {elem} does not lie in F_(q^{degree})")]
    NotInSubfield { elem: u32, degree: u32 },
    #[error("invalid extension degrees: {to} must divide {from}, both in {{1,2,3,6}}")]
    BadDegrees { from: u32, to: u32 },
    #[error("expected a nonzero element")]
    ZeroElement,
    #[error("parameter r must be 1 or 2, got {0}")]
    InvalidR(i64),
    #[error("q-linear map is singular")]
    SingularMap,
    #[error("norm of {param} is 1; the map would be singular")]
    NormIsOne { param: &'static str },
    #[error("norm of {param} is -1; excluded for this construction")]
    NormIsMinusOne { param: &'static str },
    #[error("xi = {0} is a square in F_q")]
    XiIsSquare(u32),
    #[error("family {family} is empty at q = {q}: {reason}")]
    FamilyEmpty { family: &'static str, q: u64, reason: String },
    #[error("zero vector does not define a projective point")]
    ZeroVector,
    #[error("vectors are dependent: {0}")]
    Dependent(&'static str),
    #[error("lines are not pairwise skew")]
    NotSkew,
    #[error("xi must be a nonzero nonsquare of F_q")]
    BadXi,
    #[error("group element parameters violate A^(q^3+1) != B^(q^3+1), C^(q^3+1) != D^(q^3+1)")]
    DegenerateGroupElement,
    #[error("linear set basis has F_q-rank {0}, expected 6")]
    RankDeficient(usize),
    #[error("structure not found: {0}")]
    StructureNotFound(String),
    #[error("semilinear map companion automorphism must be q or q^2 (got exponent {0})")]
    BadAutomorphism(u32),
    #[error("spread set has zero divisors")]
    ZeroDivisors,
    #[error("spread set basis has F_q-rank {0}, expected 6")]
    SpreadSetRank(usize),
    #[error("translation dual is degenerate: {0}")]
    DegenerateDual(String),
    #[error("linear set meets the quadric; not the linear set of a semifield")]
    MeetsQuadric,
    #[error("cubic X^3 - {0} X - 1 is reducible over F_q")]
    ReducibleCubic(u32),
    #[error("no admissible cubic parameter found")]
    NoCubicParameter,
    #[error("norm condition fails at y = {0}")]
    NormConditionFails(u32),
    #[error("automorphism exponent sigma must be 2 or 4 (powers of q), got {0}")]
    BadSigma(u32),
    #[error("congruence condition violated: {0}")]
    Congruence(String),
    #[error("F3 typing undefined: the weight-5 plane is the polar plane of the weight-2 point")]
    PlaneIsPolarOfPoint,
    #[error("linear set is not in family F3: {0}")]
    NotF3(String),
    #[error("theorem check is inadmissible at q = {q}: {reason}")]
    Inadmissible { q: u64, reason: String },
    #[error("cache file invalid: {0}")]
    Cache(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(..) => "not-prime",
            Error::EvenCharacteristic => "even-characteristic",
            Error::ZeroDegree => "zero-degree",
            Error::FieldTooLarge { .. } => "field-too-large",
            Error::NotInSubfield { .. } => "not-in-subfield",
            Error::BadDegrees { .. } => "bad-degrees",
            Error::ZeroElement => "zero-element",
            Error::InvalidR(..) => "invalid-r",
            Error::SingularMap => "singular-map",
            Error::NormIsOne { .. } => "norm-is-one",
            Error::NormIsMinusOne { .. } => "norm-is-minus-one",
            Error::XiIsSquare(..) => "xi-is-square",
            Error::FamilyEmpty { .. } => "family-empty",
            Error::ZeroVector => "zero-vector",
            Error::Dependent(..) => "dependent",
            Error::NotSkew => "not-skew",
            Error::BadXi => "bad-xi",
            Error::DegenerateGroupElement => "degenerate-group-element",
            Error::RankDeficient(..) => "rank-deficient",
            Error::StructureNotFound(..) => "structure-not-found",
            Error::BadAutomorphism(..) => "bad-automorphism",
            Error::ZeroDivisors => "zero-divisors",
            Error::SpreadSetRank(..) => "spread-set-rank",
            Error::DegenerateDual(..) => "degenerate-dual",
            Error::MeetsQuadric => "meets-quadric",
            Error::ReducibleCubic(..) => "reducible-cubic",
            Error::NoCubicParameter => "no-cubic-parameter",
            Error::NormConditionFails(..) => "norm-condition-fails",
            Error::BadSigma(..) => "bad-sigma",
            Error::Congruence(..) => "congruence",
            Error::PlaneIsPolarOfPoint => "plane-is-polar-of-point",
            Error::NotF3(..) => "not-f3",
            Error::Inadmissible { .. } => "inadmissible",
            Error::Cache(..) => "cache",
            Error::Io(..) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
