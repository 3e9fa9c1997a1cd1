use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh is empty")]
    EmptyMesh,
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("triangle {0} is degenerate (area {1:e})")]
    DegenerateTriangle(usize, f64),
    #[error("triangle id {0} out of range (mesh has {1} triangles)")]
    InvalidTriangleId(usize, usize),
    #[error("unsupported quadrature degree {0}; supported range is 1..={1}")]
    UnsupportedQuadratureDegree(usize, usize),
    #[error("local basis index {0} out of range (basis has {1} functions)")]
    BasisIndex(usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("matrix is structurally singular at pivot {0}")]
    StructurallySingular(usize),
    #[error("matrix is numerically singular near dof {0}")]
    NumericallySingular(usize),
    #[error("solve residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("zero diagonal entry at {kind} dof {dof}")]
    ZeroDiagonal { kind: &'static str, dof: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("effectivity index undefined: true error is zero")]
    ZeroTrueError,
    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
