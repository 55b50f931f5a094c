pub mod abrr_star;
pub mod dynr_classify;
pub mod lie_tensor;
pub mod linalg;
pub mod rootsys;
pub mod scalarfield;
pub mod twist_projection;
pub mod uea;
pub mod verma_oracle;
