//! Virtual-domain reference curves.
//!
//! Each spatial axis is a quintic plus two sine terms,
//!
//! ```text
//! x(τ̄) = Σ_{k=0..5} a_k τ̄^k + b1 sin(π τ̄) + b2 sin(2π τ̄)
//! ```
//!
//! and the heading is a plain quintic. Curves are functions of the normalized
//! argument `τ̄ = τ / τ_f ∈ [0, 1]`: the boundary matrices evaluate the basis
//! at 0 and 1, while the right-hand sides carry the time derivatives scaled by
//! powers of `τ_f`. The conversion back to time happens in [`crate::invdyn`].

use std::f64::consts::PI;
use std::sync::LazyLock;

use nalgebra::{SMatrix, SVector, LU};

use crate::error::{Error, Result};
use crate::model::NedVector;

type Mat8 = SMatrix<f64, 8, 8>;
type Mat6 = SMatrix<f64, 6, 6>;
type Vec8 = SVector<f64, 8>;
type Vec6 = SVector<f64, 6>;

const PI3: f64 = PI * PI * PI;

/// Boundary matrix of a spatial axis. Rows are value, first, second and third
/// derivative at τ̄ = 0, then the same four at τ̄ = 1; columns are the basis
/// `1, τ̄, …, τ̄⁵, sin πτ̄, sin 2πτ̄`.
#[rustfmt::skip]
pub const SPATIAL_MATRIX: [[f64; 8]; 8] = [
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, PI, 2.0 * PI],
    [0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 6.0, 0.0, 0.0, -PI3, -8.0 * PI3],
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, -PI, 2.0 * PI],
    [0.0, 0.0, 2.0, 6.0, 12.0, 20.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 6.0, 24.0, 60.0, PI3, -8.0 * PI3],
];

/// Boundary matrix of the heading quintic: value, first and second derivative
/// at τ̄ = 0 and at τ̄ = 1.
#[rustfmt::skip]
pub const YAW_MATRIX: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 2.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
    [0.0, 0.0, 2.0, 6.0, 12.0, 20.0],
];

/// Determinants below this magnitude are treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-9;

fn spatial_matrix() -> Mat8 {
    Mat8::from_fn(|r, c| SPATIAL_MATRIX[r][c])
}

fn yaw_matrix() -> Mat6 {
    Mat6::from_fn(|r, c| YAW_MATRIX[r][c])
}

// Both matrices are constant, so they are factorized once (LU with partial
// pivoting) and every solve reuses the factors.
static SPATIAL_LU: LazyLock<LU<f64, nalgebra::U8, nalgebra::U8>> = LazyLock::new(|| {
    let lu = spatial_matrix().lu();
    assert!(lu.determinant().abs() > SINGULARITY_THRESHOLD, "spatial boundary matrix is singular");
    lu
});

static YAW_LU: LazyLock<LU<f64, nalgebra::U6, nalgebra::U6>> = LazyLock::new(|| {
    let lu = yaw_matrix().lu();
    assert!(lu.determinant().abs() > SINGULARITY_THRESHOLD, "yaw boundary matrix is singular");
    lu
});

fn check_tau_f(tau_f: f64) -> Result<()> {
    if !(tau_f > 0.0 && tau_f.is_finite()) {
        return Err(Error::domain(format!("tau_f must be finite and > 0, got {tau_f}")));
    }
    Ok(())
}

fn check_argument(tau_bar: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau_bar) {
        return Err(Error::domain(format!("curve argument {tau_bar} is outside [0, 1]")));
    }
    Ok(())
}

/// Time-domain boundary data of one spatial axis: value and first three time
/// derivatives at each end. The jerks are decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisBoundary {
    pub initial: [f64; 4],
    pub terminal: [f64; 4],
}

impl AxisBoundary {
    /// Right-hand side `[x₀, ẋ₀τ_f, ẍ₀τ_f², x⃛₀τ_f³, x_f, ẋ_fτ_f, ẍ_fτ_f², x⃛_fτ_f³]`.
    pub fn virtual_rhs(&self, tau_f: f64) -> [f64; 8] {
        let s = [1.0, tau_f, tau_f * tau_f, tau_f * tau_f * tau_f];
        let mut rhs = [0.0; 8];
        for k in 0..4 {
            rhs[k] = self.initial[k] * s[k];
            rhs[4 + k] = self.terminal[k] * s[k];
        }
        rhs
    }
}

/// Time-domain heading boundary data: angle, rate, acceleration at each end.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct YawBoundary {
    pub initial: [f64; 3],
    pub terminal: [f64; 3],
}

impl YawBoundary {
    pub fn virtual_rhs(&self, tau_f: f64) -> [f64; 6] {
        let s = [1.0, tau_f, tau_f * tau_f];
        let mut rhs = [0.0; 6];
        for k in 0..3 {
            rhs[k] = self.initial[k] * s[k];
            rhs[3 + k] = self.terminal[k] * s[k];
        }
        rhs
    }
}

/// `d^order/dτ̄^order` of `τ̄^k`.
fn monomial_derivative(k: usize, order: usize, t: f64) -> f64 {
    if order > k {
        return 0.0;
    }
    let falling: f64 = ((k - order + 1)..=k).map(|j| j as f64).product();
    falling * t.powi((k - order) as i32)
}

fn quintic(a: &[f64; 6], order: usize, t: f64) -> f64 {
    (order..6).map(|k| a[k] * monomial_derivative(k, order, t)).sum()
}

/// `d^order/dτ̄^order` of `sin(ω τ̄)`.
fn sine_derivative(omega: f64, order: usize, t: f64) -> f64 {
    let (s, c) = (omega * t).sin_cos();
    match order {
        0 => s,
        1 => omega * c,
        2 => -omega * omega * s,
        3 => -omega * omega * omega * c,
        _ => unreachable!("order checked by caller"),
    }
}

/// One spatial axis of the reference curve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialAxisCurve {
    pub a: [f64; 6],
    pub b1: f64,
    pub b2: f64,
}

impl SpatialAxisCurve {
    /// Solves the 8×8 boundary system for an already-scaled right-hand side.
    pub fn from_virtual_rhs(rhs: [f64; 8]) -> Self {
        let x = SPATIAL_LU
            .solve(&Vec8::from(rhs))
            .expect("spatial boundary matrix is nonsingular");
        Self { a: [x[0], x[1], x[2], x[3], x[4], x[5]], b1: x[6], b2: x[7] }
    }

    pub fn coefficients(&self) -> [f64; 8] {
        let a = self.a;
        [a[0], a[1], a[2], a[3], a[4], a[5], self.b1, self.b2]
    }

    /// Value or derivative (order ≤ 3) at `tau_bar ∈ [0, 1]`.
    pub fn eval(&self, tau_bar: f64, order: usize) -> Result<f64> {
        check_argument(tau_bar)?;
        if order > 3 {
            return Err(Error::domain(format!("spatial derivative order {order} exceeds 3")));
        }
        Ok(self.eval_unchecked(tau_bar, order))
    }

    fn eval_unchecked(&self, t: f64, order: usize) -> f64 {
        quintic(&self.a, order, t)
            + self.b1 * sine_derivative(PI, order, t)
            + self.b2 * sine_derivative(2.0 * PI, order, t)
    }
}

/// Solves one spatial axis from its time-domain boundary data.
pub fn solve_spatial_axis(bc: &AxisBoundary, tau_f: f64) -> Result<SpatialAxisCurve> {
    check_tau_f(tau_f)?;
    let rhs = bc.virtual_rhs(tau_f);
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("spatial boundary conditions must be finite"));
    }
    Ok(SpatialAxisCurve::from_virtual_rhs(rhs))
}

/// Heading reference: a quintic in τ̄.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct YawCurve {
    pub a: [f64; 6],
}

impl YawCurve {
    pub fn from_virtual_rhs(rhs: [f64; 6]) -> Self {
        let x = YAW_LU.solve(&Vec6::from(rhs)).expect("yaw boundary matrix is nonsingular");
        Self { a: [x[0], x[1], x[2], x[3], x[4], x[5]] }
    }

    /// Value or derivative (order ≤ 2) at `tau_bar ∈ [0, 1]`.
    pub fn eval(&self, tau_bar: f64, order: usize) -> Result<f64> {
        check_argument(tau_bar)?;
        if order > 2 {
            return Err(Error::domain(format!("yaw derivative order {order} exceeds 2")));
        }
        Ok(quintic(&self.a, order, tau_bar))
    }
}

pub fn solve_yaw(bc: &YawBoundary, tau_f: f64) -> Result<YawCurve> {
    check_tau_f(tau_f)?;
    let rhs = bc.virtual_rhs(tau_f);
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("yaw boundary conditions must be finite"));
    }
    Ok(YawCurve::from_virtual_rhs(rhs))
}

/// The complete reference: three spatial axes (north, east, down), the
/// heading, and the virtual horizon `τ_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCurve {
    pub axes: [SpatialAxisCurve; 3],
    pub yaw: YawCurve,
    pub tau_f: f64,
}

impl ReferenceCurve {
    /// Solves all four curves. `jerk0`/`jerkf` are the boundary jerks of the
    /// spatial axes.
    pub fn solve(
        boundary: &crate::model::BoundaryConditions,
        jerk0: NedVector,
        jerkf: NedVector,
        tau_f: f64,
    ) -> Result<Self> {
        check_tau_f(tau_f)?;
        let (i, f) = (&boundary.initial, &boundary.terminal);
        let comp = |v: &NedVector, k: usize| v.to_array()[k];
        let mut axes = [SpatialAxisCurve::default(); 3];
        for (k, axis) in axes.iter_mut().enumerate() {
            let bc = AxisBoundary {
                initial: [
                    comp(&i.position, k),
                    comp(&i.velocity, k),
                    comp(&i.acceleration, k),
                    comp(&jerk0, k),
                ],
                terminal: [
                    comp(&f.position, k),
                    comp(&f.velocity, k),
                    comp(&f.acceleration, k),
                    comp(&jerkf, k),
                ],
            };
            *axis = solve_spatial_axis(&bc, tau_f)?;
        }
        let yaw = solve_yaw(
            &YawBoundary {
                initial: [i.yaw, i.yaw_rate, i.yaw_acceleration],
                terminal: [f.yaw, f.yaw_rate, f.yaw_acceleration],
            },
            tau_f,
        )?;
        Ok(Self { axes, yaw, tau_f })
    }

    /// Spatial value or derivative with respect to τ̄ (order ≤ 3).
    pub fn eval(&self, tau_bar: f64, order: usize) -> Result<NedVector> {
        Ok(NedVector::new(
            self.axes[0].eval(tau_bar, order)?,
            self.axes[1].eval(tau_bar, order)?,
            self.axes[2].eval(tau_bar, order)?,
        ))
    }

    /// Heading value or derivative with respect to τ̄ (order ≤ 2).
    pub fn eval_yaw(&self, tau_bar: f64, order: usize) -> Result<f64> {
        self.yaw.eval(tau_bar, order)
    }
}

/// Self-check figures of the two constant boundary matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixCheck {
    pub spatial_determinant: f64,
    pub yaw_determinant: f64,
    /// 2-norm condition numbers (ratio of extreme singular values).
    pub spatial_condition: f64,
    pub yaw_condition: f64,
}

impl MatrixCheck {
    pub fn nonsingular(&self) -> bool {
        self.spatial_determinant.abs() > SINGULARITY_THRESHOLD
            && self.yaw_determinant.abs() > SINGULARITY_THRESHOLD
    }
}

fn condition(m: nalgebra::DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    sv.max() / sv.min()
}

/// Determinants and condition numbers of both boundary matrices. Fails if
/// either matrix is numerically singular.
pub fn matrix_sanity() -> Result<MatrixCheck> {
    let check = MatrixCheck {
        spatial_determinant: spatial_matrix().determinant(),
        yaw_determinant: yaw_matrix().determinant(),
        spatial_condition: condition(nalgebra::DMatrix::from_iterator(8, 8, spatial_matrix().iter().copied())),
        yaw_condition: condition(nalgebra::DMatrix::from_iterator(6, 6, yaw_matrix().iter().copied())),
    };
    if !check.nonsingular() {
        return Err(Error::domain(format!(
            "boundary matrix is singular (det spatial {}, det yaw {})",
            check.spatial_determinant, check.yaw_determinant
        )));
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Gauss-Jordan elimination with partial pivoting, written out longhand so
    /// it shares nothing with the LU path.
    fn gauss_jordan<const N: usize>(m: [[f64; N]; N], rhs: [f64; N]) -> [f64; N] {
        let mut a = m;
        let mut b = rhs;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            let p = a[col][col];
            for c in 0..N {
                a[col][c] /= p;
            }
            b[col] /= p;
            for r in 0..N {
                if r != col {
                    let f = a[r][col];
                    for c in 0..N {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        b
    }

    /// Basis derivative evaluated from first principles, to cross-check the
    /// transcribed matrix rows.
    fn basis_derivative(col: usize, order: usize, t: f64) -> f64 {
        match col {
            0..=5 => monomial_derivative(col, order, t),
            6 => sine_derivative(PI, order, t),
            _ => sine_derivative(2.0 * PI, order, t),
        }
    }

    #[test]
    fn spatial_matrix_matches_basis() {
        for row in 0..8 {
            let (t, order) = if row < 4 { (0.0, row) } else { (1.0, row - 4) };
            for col in 0..8 {
                let expected = basis_derivative(col, order, t);
                assert!(
                    (SPATIAL_MATRIX[row][col] - expected).abs() < 1e-12,
                    "row {row} col {col}: {} vs {expected}",
                    SPATIAL_MATRIX[row][col]
                );
            }
        }
        assert_eq!(SPATIAL_MATRIX[3][6], -PI3);
        assert_eq!(SPATIAL_MATRIX[3][7], -8.0 * PI3);
        assert_eq!(SPATIAL_MATRIX[1][6], PI);
        assert_eq!(SPATIAL_MATRIX[1][7], 2.0 * PI);
    }

    #[test]
    fn yaw_matrix_matches_basis() {
        for row in 0..6 {
            let (t, order) = if row < 3 { (0.0, row) } else { (1.0, row - 3) };
            for col in 0..6 {
                assert_eq!(YAW_MATRIX[row][col], monomial_derivative(col, order, t));
            }
        }
    }

    #[test]
    fn determinants_are_nonzero() {
        // Oracle: cofactor-free determinant from Gauss-Jordan pivots.
        fn det<const N: usize>(m: [[f64; N]; N]) -> f64 {
            let mut a = m;
            let mut d = 1.0;
            for col in 0..N {
                let p = (col..N)
                    .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                    .unwrap();
                if p != col {
                    a.swap(col, p);
                    d = -d;
                }
                d *= a[col][col];
                for r in col + 1..N {
                    let f = a[r][col] / a[col][col];
                    for c in col..N {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
            d
        }
        let check = matrix_sanity().unwrap();
        assert_relative_eq!(check.spatial_determinant, det(SPATIAL_MATRIX), max_relative = 1e-10);
        assert_relative_eq!(check.yaw_determinant, det(YAW_MATRIX), max_relative = 1e-10);
        // Block lower-triangular: det diag(1, 1, 2) times det of the 3×3 tail (= 2).
        assert_relative_eq!(check.yaw_determinant, 4.0, max_relative = 1e-12);
        assert!(check.spatial_determinant.abs() > 1.0);
        assert!(check.spatial_condition.is_finite() && check.yaw_condition.is_finite());
    }

    #[test]
    fn homogeneous_systems_give_zero() {
        let c = solve_spatial_axis(&AxisBoundary::default(), 37.0).unwrap();
        assert_eq!(c.coefficients(), [0.0; 8]);
        let y = solve_yaw(&YawBoundary::default(), 37.0).unwrap();
        assert_eq!(y.a, [0.0; 6]);
    }

    #[test]
    fn unit_step_against_gauss_jordan() {
        let bc = AxisBoundary { initial: [0.0; 4], terminal: [1.0, 0.0, 0.0, 0.0] };
        let curve = solve_spatial_axis(&bc, 1.0).unwrap();
        let oracle = gauss_jordan(SPATIAL_MATRIX, bc.virtual_rhs(1.0));
        for (got, want) in curve.coefficients().iter().zip(oracle) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(curve.eval(0.0, 0).unwrap().abs() < 1e-12);
        assert!((curve.eval(1.0, 0).unwrap() - 1.0).abs() < 1e-12);
        for order in 1..=3 {
            assert!(curve.eval(0.0, order).unwrap().abs() < 1e-9);
            assert!(curve.eval(1.0, order).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn constant_heading() {
        let c = 0.7;
        let y = solve_yaw(&YawBoundary { initial: [c, 0.0, 0.0], terminal: [c, 0.0, 0.0] }, 50.0)
            .unwrap();
        assert!((y.a[0] - c).abs() < 1e-15);
        for k in 1..6 {
            assert!(y.a[k].abs() < 1e-14, "a[{k}] = {}", y.a[k]);
        }
    }

    #[test]
    fn heading_turn_reproduces_boundaries() {
        let psi0 = 10f64.to_radians();
        let psif = 15f64.to_radians();
        let bc = YawBoundary { initial: [psi0, 0.0, 0.0], terminal: [psif, 0.0, 0.0] };
        let y = solve_yaw(&bc, 82.57).unwrap();
        assert!((y.eval(0.0, 0).unwrap() - psi0).abs() < 1e-9);
        assert!((y.eval(1.0, 0).unwrap() - psif).abs() < 1e-9);
        for order in 1..=2 {
            assert!(y.eval(0.0, order).unwrap().abs() < 1e-9);
            assert!(y.eval(1.0, order).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let c = SpatialAxisCurve::default();
        assert!(c.eval(-1e-12, 0).is_err());
        assert!(c.eval(1.0 + 1e-12, 0).is_err());
        assert!(c.eval(0.5, 4).is_err());
        assert!(YawCurve::default().eval(0.5, 3).is_err());
        assert!(solve_spatial_axis(&AxisBoundary::default(), 0.0).is_err());
        assert!(solve_yaw(&YawBoundary::default(), -1.0).is_err());
    }

    #[test]
    fn trig_terms_at_origin() {
        let c = SpatialAxisCurve { a: [0.0; 6], b1: 0.3, b2: -1.1 };
        let d1 = c.eval(0.0, 1).unwrap();
        assert!((d1 - (0.3 * PI + -1.1 * 2.0 * PI)).abs() < 1e-14);
        let c = SpatialAxisCurve { a: [4.5, 1.0, 2.0, 3.0, 4.0, 5.0], b1: 0.3, b2: -1.1 };
        assert_eq!(c.eval(0.0, 0).unwrap(), 4.5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn boundary() -> impl Strategy<Value = AxisBoundary> {
            (prop::array::uniform4(-50.0f64..50.0), prop::array::uniform4(-50.0f64..50.0))
                .prop_map(|(initial, terminal)| AxisBoundary { initial, terminal })
        }

        proptest! {
            #[test]
            fn residual_is_tiny(bc in boundary(), tau_f in 1.0f64..500.0) {
                let rhs = bc.virtual_rhs(tau_f);
                let x = solve_spatial_axis(&bc, tau_f).unwrap().coefficients();
                let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for r in 0..8 {
                    let lhs: f64 = (0..8).map(|c| SPATIAL_MATRIX[r][c] * x[c]).sum();
                    prop_assert!((lhs - rhs[r]).abs() < 1e-10 * scale);
                }
            }

            #[test]
            fn coefficients_are_linear(a in boundary(), b in boundary(), tau_f in 1.0f64..500.0) {
                let ra = a.virtual_rhs(tau_f);
                let rb = b.virtual_rhs(tau_f);
                let sum: [f64; 8] = std::array::from_fn(|k| ra[k] + rb[k]);
                let ca = SpatialAxisCurve::from_virtual_rhs(ra).coefficients();
                let cb = SpatialAxisCurve::from_virtual_rhs(rb).coefficients();
                let cs = SpatialAxisCurve::from_virtual_rhs(sum).coefficients();
                let scale = sum.iter().chain(&ra).chain(&rb).fold(1.0f64, |m, v| m.max(v.abs()));
                for k in 0..8 {
                    prop_assert!((cs[k] - ca[k] - cb[k]).abs() < 1e-10 * scale);
                }
            }

            #[test]
            fn derivatives_match_finite_differences(
                coeffs in prop::array::uniform8(-10.0f64..10.0),
                t in 0.01f64..0.99,
            ) {
                let c = SpatialAxisCurve {
                    a: [coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5]],
                    b1: coeffs[6],
                    b2: coeffs[7],
                };
                let h = 1e-6;
                for order in 1..=3 {
                    let fd = (c.eval(t + h, order - 1).unwrap() - c.eval(t - h, order - 1).unwrap())
                        / (2.0 * h);
                    let exact = c.eval(t, order).unwrap();
                    let scale = exact.abs().max(1.0);
                    prop_assert!((fd - exact).abs() / scale < 1e-6, "order {}: {} vs {}", order, fd, exact);
                }
            }
        }
    }
}
