pub mod invariant;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod roots;
pub mod shear;
pub mod spectrum;
pub mod sphere;
pub mod torus;
pub mod weyl;
pub mod word;
