//! The radial multiplier layer: transfer functions linking normalized
//! semigroup differences to truncated hypersingular integrals, their
//! asymptotics and derivative audits, smooth partitions of unity, and
//! regularized radial Fourier inversion.

pub mod hankel;
pub mod mikhlin;
pub mod partition;
pub mod probe;
pub mod transfer;

pub use mikhlin::{
    finite_difference_deriv, mikhlin_audit, AuditGrid, ConstantSymbol, LocalizedTailSymbol,
    MikhlinAudit, RadialSymbol, SineSymbol,
};
pub use hankel::{hankel_tail_lift, radial_derivative_coeffs, radial_inverse_fourier};
pub use partition::{
    partition_unity, smooth_bump, standard_partition, HighBand, LowBand, MidBand, SmoothBump,
};
pub use probe::{
    high_band_kernel_probe, kernel_mass_check, BandKernelSplit, DecayReport, KernelMassReport,
};
pub use transfer::{bessel_tail_integral, unit_exp_moments, TransferSymbols};
