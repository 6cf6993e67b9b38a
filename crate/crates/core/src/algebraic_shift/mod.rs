//! Algebraic subshifts `X_{h,p} = ker φ_h ⊂ ((Z/pZ)^{d_in})^Γ` of convolution
//! operators: window systems, certified marginals of the Haar measure,
//! surjectivity and preimages.

mod kernel;
mod surjectivity;
mod window;

pub use kernel::{
    centered, support_diameter, support_geometry, ConvolutionKernel, KernelSpec, SupportGeometry,
};
pub use surjectivity::{
    is_surjective, preimage_on_ball, restricted_operator, window_surjective, SurjectivityVerdict,
};
pub use window::{
    extension_certifies, projected_dimension, window_system, window_system_with, KernelSubshift,
    OffsetTable, ProjectedDimension, WindowCertificate, WindowIndex, WindowOptions, WindowSystem,
};
