use std::f64::consts::{FRAC_PI_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{qubit, ComplexMatrix, UnitVector};

const UNIT_TOL: f64 = 1e-12;

/// Point on the unit 2-sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector([f64; 3]);

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        BlochVector::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(b: BlochVector) -> Self {
        b.0
    }
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!("Bloch vector has squared norm {n2}")));
        }
        Ok(BlochVector([x, y, z]))
    }

    /// `(sin t cos p, sin t sin p, cos t)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        BlochVector([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    /// Bloch vector of a qubit state.
    pub fn from_state(psi: &UnitVector) -> Result<Self> {
        if psi.dim() != 2 {
            return Err(Error::Dimension(format!("Bloch vector of a {}-dimensional state", psi.dim())));
        }
        let (a, b) = (psi.amps()[0], psi.amps()[1]);
        let c = a.conj() * b;
        Self::new(2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr())
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| a * b).sum()
    }

    pub fn antipode(&self) -> BlochVector {
        BlochVector(self.0.map(|c| -c))
    }

    /// `(I + r . sigma) / 2`, exact for axis-aligned vectors.
    pub fn projector(&self) -> ComplexMatrix {
        let [x, y, z] = self.0;
        ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        )
        .expect("2x2")
    }

    pub fn to_state(&self) -> UnitVector {
        let [x, y, z] = self.0;
        qubit::from_bloch_angles(z.clamp(-1.0, 1.0).acos(), y.atan2(x))
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Density `p(lambda) = H(psi.lambda) psi.lambda / pi` of the measure for `psi`.
pub fn ks_density(psi: &BlochVector, lambda: [f64; 3]) -> f64 {
    let c = dot3(psi.0, lambda);
    heaviside(c) * c / PI
}

/// `Pr(phi | M, lambda) = H(phi.lambda)`.
pub fn ks_response(phi: &BlochVector, lambda: [f64; 3]) -> f64 {
    heaviside(dot3(phi.0, lambda))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Product Gauss-Legendre rule with `nodes` points per panel and axis.
    GaussLegendre { nodes: usize },
    /// Uniform sampling of the sphere.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::GaussLegendre { nodes: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Standard error of a Monte Carlo estimate.
    pub std_error: Option<f64>,
}

/// Orthonormal frame with `e1 = psi` and `phi` in the `e1, e2` plane, and the
/// angle of `phi` from `psi` in that plane.
fn frame(psi: &BlochVector, phi: &BlochVector) -> ([[f64; 3]; 3], f64) {
    let e1 = psi.0;
    let c = dot3(phi.0, e1);
    let mut perp = [phi.0[0] - c * e1[0], phi.0[1] - c * e1[1], phi.0[2] - c * e1[2]];
    let mut s = dot3(perp, perp).sqrt();
    if s < 1e-14 {
        // phi = +-psi: any direction orthogonal to psi will do
        let axis = if e1[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let t = cross(e1, axis);
        let n = dot3(t, t).sqrt();
        perp = t.map(|x| x / n);
        s = 0.0;
    } else {
        perp = perp.map(|x| x / s);
    }
    let e3 = cross(e1, perp);
    ([e1, perp, e3], s.atan2(c))
}

fn wrap(x: f64) -> f64 {
    let mut y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// `int f(lambda) sin(t) dt dp` over the sphere in the frame of `(psi, phi)`,
/// with the azimuth split where the step functions of either state switch.
fn integrate_sphere(
    psi: &BlochVector,
    phi: &BlochVector,
    method: Quadrature,
    f: impl Fn([f64; 3]) -> f64,
) -> Result<QuadratureResult> {
    match method {
        Quadrature::GaussLegendre { nodes } => {
            let n = NonZeroUsize::new(nodes).ok_or_else(|| Error::InvalidArgument("zero quadrature nodes".into()))?;
            let rule = GaussLegendre::new(n);
            let ([e1, e2, e3], alpha) = frame(psi, phi);
            let mut cuts = vec![-PI, PI, -FRAC_PI_2, FRAC_PI_2, wrap(alpha - FRAC_PI_2), wrap(alpha + FRAC_PI_2)];
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
            let point = |t: f64, p: f64| {
                let (st, ct) = t.sin_cos();
                let (sp, cp) = p.sin_cos();
                [0, 1, 2].map(|i| st * cp * e1[i] + st * sp * e2[i] + ct * e3[i])
            };
            let mut total = 0.0;
            for w in cuts.windows(2) {
                total += rule.integrate(w[0], w[1], |p| rule.integrate(0.0, PI, |t| f(point(t, p)) * t.sin()));
            }
            Ok(QuadratureResult { value: total, std_error: None })
        }
        Quadrature::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
            }
            let mut rng = StdRng::seed_from_u64(seed);
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..samples {
                let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
                let n = dot3(v, v).sqrt();
                let y = 4.0 * PI * f(v.map(|x| x / n));
                sum += y;
                sum2 += y * y;
            }
            let m = samples as f64;
            let mean = sum / m;
            let var = (sum2 / m - mean * mean).max(0.0) * m / (m - 1.0);
            Ok(QuadratureResult { value: mean, std_error: Some((var / m).sqrt()) })
        }
    }
}

/// `int H(phi.lambda) p_psi(lambda) dlambda`, the probability the model
/// assigns to outcome `phi` on a `psi` preparation.
pub fn ks_born_quadrature(psi: &BlochVector, phi: &BlochVector, method: Quadrature) -> Result<QuadratureResult> {
    integrate_sphere(psi, phi, method, |l| ks_response(phi, l) * ks_density(psi, l))
}

/// The same integral restricted to `Omega_phi = {lambda : q_phi(lambda) > 0}`,
/// the support of the measure for `phi`.
pub fn ks_restricted_quadrature(psi: &BlochVector, phi: &BlochVector, method: Quadrature) -> Result<QuadratureResult> {
    integrate_sphere(psi, phi, method, |l| {
        let in_support = if ks_density(phi, l) > 0.0 { 1.0 } else { 0.0 };
        in_support * ks_response(phi, l) * ks_density(psi, l)
    })
}

/// Handle for the Kochen-Specker qubit model on all pure states and all
/// projective measurements. The ontic space is the sphere, so the model is
/// evaluated by quadrature; its classification is known in closed form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KsQubitModel {
    pub quadrature: Quadrature,
}

impl KsQubitModel {
    /// Every pair of non-antipodal states has hemispheres that intersect,
    /// and no region is exclusive to a single state.
    pub const PSI_ONTIC: bool = false;
    pub const PAIRWISE_EPISTEMIC: bool = true;
    pub const SOMETIMES_PSI_ONTIC: bool = false;
    pub const OUTCOME_DETERMINISTIC: bool = true;

    pub fn predicted(&self, psi: &BlochVector, phi: &BlochVector) -> Result<QuadratureResult> {
        ks_born_quadrature(psi, phi, self.quadrature)
    }

    /// Total mass of the measure for `psi`.
    pub fn normalization(&self, psi: &BlochVector) -> Result<f64> {
        Ok(integrate_sphere(psi, psi, self.quadrature, |l| ks_density(psi, l))?.value)
    }
}
