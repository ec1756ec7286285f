//! Periodized-box discretization: grids, FFT-backed spectral transforms,
//! radial Fourier multipliers, trigonometric shifts, the test-field
//! catalogue, and field I/O.
//!
//! Conventions (everything downstream depends on these staying fixed):
//! - grid points `x_j = -L + j h`, `h = 2L / m`, per axis;
//! - frequencies `xi_k = (pi / L) k~` with `k~` the signed index in
//!   `[-m/2, m/2)`;
//! - forward transform `f^(xi) = h^n sum_j f_j exp(-i x_j . xi)`, the
//!   Riemann sum of `∫ f exp(-i x xi) dx`;
//! - inverse `f_j = (2L)^{-n} sum_k f^(xi_k) exp(i x_j . xi_k)`.
//!
//! With these scalings Parseval reads
//! `h^n sum |f|^2 = (2L)^{-n} sum |f^|^2`, and a multiplier applied to the
//! coefficients is the periodization of the continuum operator on
//! band-limited data.

use std::io::{Read, Write};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};

/// Uniform periodic grid on `[-L, L)^dim`.  Small and `Copy`: every field
/// carries one and compatibility checks compare them directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dim: u32,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: u32, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(LabError::domain(format!(
                "grid dimension must be 1..=3, got {dim}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::domain(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(LabError::domain(format!(
                "points per axis must be a power of two >= 16, got {points_per_axis}"
            )));
        }
        Ok(Grid {
            dim,
            half_width,
            points_per_axis,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `i` along one axis: `-L + i h`.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Signed frequency index for unsigned index `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        let m = self.points_per_axis as i64;
        let k = k as i64;
        if k < m / 2 {
            k
        } else {
            k - m
        }
    }

    /// Frequency component `xi = (pi / L) k~`.
    pub fn frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI / self.half_width * self.signed_index(k) as f64
    }

    /// Decompose a flat row-major index into per-axis indices (last axis
    /// fastest).
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let m = self.points_per_axis;
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dim as usize).rev() {
            idx[axis] = rest % m;
            rest /= m;
        }
        idx
    }

    /// Physical coordinates of a flat index (unused axes read 0).
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim as usize {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// |xi| of a flat spectral index.
    pub fn frequency_norm(&self, flat: usize) -> f64 {
        let idx = self.unflatten(flat);
        let mut sq = 0.0;
        for axis in 0..self.dim as usize {
            let xi = self.frequency(idx[axis]);
            sq += xi * xi;
        }
        sq.sqrt()
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Box volume `(2L)^n`.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }
}

/// Real-valued samples on a grid, row-major, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
}

/// Spectral coefficients of a field under the forward transform above.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Grid,
    pub coeffs: Vec<Complex<f64>>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::structural(format!(
                "field length {} does not match grid length {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let p = grid.point(flat);
                f(&p[..grid.dim as usize])
            })
            .collect();
        Field { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// L^2 norm with the Riemann-sum measure: `sqrt(h^n sum |f|^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(LabError::structural(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Pointwise combination into a new field (grids must match).
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }
}

fn fft_all_axes(data: &mut [Complex<f64>], grid: &Grid, forward: bool) {
    let m = grid.points_per_axis;
    let dim = grid.dim as usize;
    let mut planner = FftPlanner::new();
    let fft = if forward {
        planner.plan_fft_forward(m)
    } else {
        planner.plan_fft_inverse(m)
    };
    // Last axis is contiguous: one batched pass.
    fft.process(data);
    // Other axes: gather strided lines through a scratch buffer.
    let mut scratch = vec![Complex::new(0.0, 0.0); m];
    for axis in 0..dim.saturating_sub(1) {
        let stride = m.pow((dim - 1 - axis) as u32);
        let lines = data.len() / m;
        for line in 0..lines {
            // Starting offset: interleave the non-axis indices around the
            // axis gap.
            let block = line / stride;
            let offset = line % stride;
            let start = block * stride * m + offset;
            for j in 0..m {
                scratch[j] = data[start + j * stride];
            }
            fft.process(&mut scratch);
            for j in 0..m {
                data[start + j * stride] = scratch[j];
            }
        }
    }
}

/// Parity sign `(-1)^{k_1 + ... + k_n}` of a flat index: the phase factor
/// `exp(±i L . xi_k)` that re-centers the box at -L.
fn center_sign(grid: &Grid, flat: usize) -> f64 {
    let idx = grid.unflatten(flat);
    let mut parity = 0usize;
    for axis in 0..grid.dim as usize {
        parity += idx[axis];
    }
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn to_spectral(field: &Field) -> SpectralField {
    let grid = field.grid;
    let mut data: Vec<Complex<f64>> = field
        .values
        .iter()
        .map(|v| Complex::new(*v, 0.0))
        .collect();
    fft_all_axes(&mut data, &grid, true);
    let scale = grid.cell_volume();
    for (flat, c) in data.iter_mut().enumerate() {
        *c *= scale * center_sign(&grid, flat);
    }
    SpectralField { grid, coeffs: data }
}

/// Inverse transform.  The imaginary residue (roundoff plus any Hermitian
/// asymmetry) is discarded; callers that care inspect
/// `from_spectral_checked`.
pub fn from_spectral(spectral: &SpectralField) -> Field {
    from_spectral_checked(spectral).0
}

pub fn from_spectral_checked(spectral: &SpectralField) -> (Field, f64) {
    let grid = spectral.grid;
    let mut data = spectral.coeffs.clone();
    for (flat, c) in data.iter_mut().enumerate() {
        *c *= center_sign(&grid, flat);
    }
    fft_all_axes(&mut data, &grid, false);
    let scale = 1.0 / grid.box_volume();
    let mut imag_max = 0.0f64;
    let values = data
        .iter()
        .map(|c| {
            imag_max = imag_max.max((c.im * scale).abs());
            c.re * scale
        })
        .collect();
    (Field { grid, values }, imag_max)
}

/// What to do with the zero-frequency coefficient when a radial symbol is
/// singular at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DcPolicy {
    /// Evaluate the symbol at 0 like everywhere else (it must be finite).
    Evaluate,
    /// Force the zero mode to zero; the result reports whether the input
    /// actually carried DC mass so callers can warn.
    Zero,
}

#[derive(Debug, Clone)]
pub struct MultiplierOutput {
    pub field: Field,
    /// True when `DcPolicy::Zero` discarded a nonzero mean.
    pub dc_discarded: bool,
}

/// Apply a radial Fourier multiplier `m(|xi|)` to a field.  Symbol values
/// are cached per distinct |xi| (the radial lattice has few of them
/// relatively), which also guarantees bit-identical treatment of symmetric
/// modes.
pub fn apply_radial_multiplier(
    field: &Field,
    symbol: &dyn Fn(f64) -> f64,
    dc: DcPolicy,
) -> Result<MultiplierOutput> {
    let mut spectral = to_spectral(field);
    let grid = spectral.grid;
    let mut cache: std::collections::HashMap<u64, f64> = std::collections::HashMap::new();
    let mut dc_discarded = false;
    for (flat, c) in spectral.coeffs.iter_mut().enumerate() {
        let r = grid.frequency_norm(flat);
        if r == 0.0 {
            match dc {
                DcPolicy::Evaluate => {
                    let v = symbol(0.0);
                    if !v.is_finite() {
                        return Err(LabError::domain(
                            "radial symbol is not finite at frequency zero; \
                             use DcPolicy::Zero for origin-singular symbols",
                        ));
                    }
                    *c *= v;
                }
                DcPolicy::Zero => {
                    if c.norm() > 1e-14 * (1.0 + grid.box_volume()) {
                        dc_discarded = true;
                    }
                    *c = Complex::new(0.0, 0.0);
                }
            }
            continue;
        }
        let key = r.to_bits();
        let v = *cache.entry(key).or_insert_with(|| symbol(r));
        if !v.is_finite() {
            return Err(LabError::numerical(format!(
                "radial symbol produced {v} at |xi| = {r}"
            )));
        }
        *c *= v;
    }
    Ok(MultiplierOutput {
        field: from_spectral(&spectral),
        dc_discarded,
    })
}

/// Translate by `y`: returns the trigonometric interpolant evaluated at
/// `x + y`, which is exact for the band-limited representative.
pub fn shift_evaluate(field: &Field, y: &[f64]) -> Result<Field> {
    let grid = field.grid;
    if y.len() != grid.dim as usize {
        return Err(LabError::structural(format!(
            "shift vector has {} components for a {}-d field",
            y.len(),
            grid.dim
        )));
    }
    let mut spectral = to_spectral(field);
    for (flat, c) in spectral.coeffs.iter_mut().enumerate() {
        let idx = grid.unflatten(flat);
        let mut phase = 0.0;
        for axis in 0..grid.dim as usize {
            phase += grid.frequency(idx[axis]) * y[axis];
        }
        // f(x + y) has coefficients e^{i xi . y} f^(xi).
        *c *= Complex::from_polar(1.0, phase);
    }
    Ok(from_spectral(&spectral))
}

/// Periodic cubic (Catmull-Rom) interpolation shift, 1-d only: the deliberate
/// low-tech cross-check for `shift_evaluate`.
pub fn shift_interpolate_cubic(field: &Field, y: f64) -> Result<Field> {
    let grid = field.grid;
    if grid.dim != 1 {
        return Err(LabError::domain(
            "cubic interpolation shift is wired for 1-d fields",
        ));
    }
    let m = grid.points_per_axis;
    let h = grid.spacing();
    let values = (0..m)
        .map(|j| {
            let pos = j as f64 + y / h; // fractional index of x_j + y
            let base = pos.floor();
            let frac = pos - base;
            let i = base as i64;
            let wrap = |k: i64| -> f64 {
                field.values[k.rem_euclid(m as i64) as usize]
            };
            let (p0, p1, p2, p3) = (wrap(i - 1), wrap(i), wrap(i + 1), wrap(i + 2));
            // Catmull-Rom basis.
            let t = frac;
            let t2 = t * t;
            let t3 = t2 * t;
            0.5 * ((2.0 * p1)
                + (-p0 + p2) * t
                + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2
                + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3)
        })
        .collect();
    Ok(Field { grid, values })
}

/// The reproducible test-field catalogue used by experiments and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum TestField {
    /// exp(-|x|^2 / (2 sigma^2)).
    Gaussian { sigma: f64 },
    /// Compactly supported bump exp(1 - 1/(1 - (r/radius)^2)) inside the
    /// radius, 0 outside; peak value 1.
    Bump { radius: f64 },
    /// Random real trigonometric polynomial with modes |k|_inf <= cutoff,
    /// unit sup norm, reproducible from the seed.  DC-free.
    BandLimited { cutoff: usize, seed: u64 },
    /// Random-phase field with amplitude |xi|^{spectral_power} up to the
    /// cutoff, DC-free; spectral_power < 0 gives genuinely rough data.
    Rough {
        spectral_power: f64,
        cutoff: usize,
        seed: u64,
    },
    /// Free-space Poisson kernel c_n t / (t^2 + |x|^2)^{(n+1)/2} sampled on
    /// the box (not periodized).
    PoissonKernel { t: f64 },
}

pub fn sample(grid: Grid, spec: &TestField) -> Result<Field> {
    match spec {
        TestField::Gaussian { sigma } => {
            if *sigma <= 0.0 {
                return Err(LabError::domain("gaussian sigma must be positive"));
            }
            let s2 = 2.0 * sigma * sigma;
            Ok(Field::from_fn(grid, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                (-r2 / s2).exp()
            }))
        }
        TestField::Bump { radius } => {
            if !(*radius > 0.0 && *radius < grid.half_width) {
                return Err(LabError::domain(format!(
                    "bump radius must lie in (0, L), got {radius}"
                )));
            }
            let r0 = *radius;
            Ok(Field::from_fn(grid, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let u2 = r2 / (r0 * r0);
                if u2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u2)).exp()
                }
            }))
        }
        TestField::BandLimited { cutoff, seed } => {
            random_spectral_field(grid, *cutoff, *seed, None)
        }
        TestField::Rough {
            spectral_power,
            cutoff,
            seed,
        } => random_spectral_field(grid, *cutoff, *seed, Some(*spectral_power)),
        TestField::PoissonKernel { t } => {
            if *t <= 0.0 {
                return Err(LabError::domain("poisson kernel needs t > 0"));
            }
            let n = grid.dim;
            let c = poisson_constant(n);
            let t = *t;
            let power = (n as f64 + 1.0) / 2.0;
            Ok(Field::from_fn(grid, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                c * t / (t * t + r2).powf(power)
            }))
        }
    }
}

/// `c_n = Gamma((n+1)/2) / pi^{(n+1)/2}`, the free-space Poisson kernel
/// normalization (total mass 1).
pub fn poisson_constant(n: u32) -> f64 {
    let p = (n as f64 + 1.0) / 2.0;
    crate::special::gamma(p) / std::f64::consts::PI.powf(p)
}

fn random_spectral_field(
    grid: Grid,
    cutoff: usize,
    seed: u64,
    spectral_power: Option<f64>,
) -> Result<Field> {
    use rand::Rng;
    use rand::SeedableRng;
    if cutoff == 0 || cutoff >= grid.points_per_axis / 2 {
        return Err(LabError::domain(format!(
            "mode cutoff must be in 1..m/2, got {cutoff}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut spectral = SpectralField {
        grid,
        coeffs: vec![Complex::new(0.0, 0.0); grid.len()],
    };
    let m = grid.points_per_axis as i64;
    // Walk flat indices; fill each Hermitian pair once, from its canonical
    // (first nonzero signed component positive) member, so iteration order —
    // and therefore the field drawn from a seed — is stable.
    for flat in 0..grid.len() {
        let idx = grid.unflatten(flat);
        let mut signed = [0i64; 3];
        for axis in 0..grid.dim as usize {
            signed[axis] = grid.signed_index(idx[axis]);
        }
        let active = &signed[..grid.dim as usize];
        if active.iter().any(|k| k.abs() > cutoff as i64) {
            continue;
        }
        if active.iter().all(|k| *k == 0) {
            continue; // DC-free by construction
        }
        // Canonical representative of the ± pair.
        let first_nonzero = active.iter().find(|k| **k != 0).unwrap();
        if *first_nonzero < 0 {
            continue;
        }
        let amplitude = match spectral_power {
            None => 1.0,
            Some(p) => {
                let norm: f64 = active
                    .iter()
                    .map(|k| {
                        let xi = std::f64::consts::PI / grid.half_width * *k as f64;
                        xi * xi
                    })
                    .sum::<f64>()
                    .sqrt();
                norm.powf(p)
            }
        };
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let re = rng.gen::<f64>() - 0.5;
        let z = match spectral_power {
            // Band-limited: gaussian-ish complex weight; rough: pure phase.
            None => Complex::new(re, rng.gen::<f64>() - 0.5),
            Some(_) => Complex::from_polar(1.0, theta),
        } * amplitude;
        // Place z at +k and conj(z) at -k.
        spectral.coeffs[flat] = z;
        let mut mirror = 0usize;
        for axis in 0..grid.dim as usize {
            let neg = (-signed[axis]).rem_euclid(m) as usize;
            mirror = mirror * grid.points_per_axis + neg;
        }
        spectral.coeffs[mirror] = z.conj();
    }
    let (field, _imag) = from_spectral_checked(&spectral);
    let sup = field.sup_norm();
    if sup == 0.0 {
        return Err(LabError::numerical("random field degenerated to zero"));
    }
    Ok(field.scale(1.0 / sup))
}

// ---- field I/O ----------------------------------------------------------

const FIELD_MAGIC: &[u8; 4] = b"RLF1";

/// Binary layout: magic "RLF1", then u32 dim, u32 points_per_axis, f64
/// half_width, then values f64 row-major; all little-endian.
pub fn write_binary(field: &Field, w: &mut dyn Write) -> Result<()> {
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&field.grid.dim.to_le_bytes())?;
    w.write_all(&(field.grid.points_per_axis as u32).to_le_bytes())?;
    w.write_all(&field.grid.half_width.to_le_bytes())?;
    for v in &field.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(r: &mut dyn Read) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(LabError::structural("not a field file (bad magic)"));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4);
    r.read_exact(&mut b4)?;
    let points = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let half_width = f64::from_le_bytes(b8);
    let grid = Grid::new(dim, half_width, points)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Field::new(grid, values)
}

/// 1-d CSV: `x,value` lines with full round-trip precision.
pub fn write_csv_1d(field: &Field, w: &mut dyn Write) -> Result<()> {
    if field.grid.dim != 1 {
        return Err(LabError::domain("CSV output is 1-d only"));
    }
    writeln!(w, "x,value")?;
    for (j, v) in field.values.iter().enumerate() {
        writeln!(w, "{:.17e},{:.17e}", field.grid.coordinate(j), v)?;
    }
    Ok(())
}
