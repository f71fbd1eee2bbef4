use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::extract::{extract_fibers, fibers_of, nabla_hat_commutator, nabla_hat_trivialized};
use super::field::{Commutator, GlobalOperator, OperatorField};
use crate::error::{Error, Result};
use crate::hilbert_field::battery::{battery, ANGULAR};
use crate::hilbert_field::{
    connection_apply, direct_integral_inner, fiber_norm, flow_transport, shift_time, ConnectionFormula, PolarGrid,
    PolarSection,
};
use crate::numeric::{richardson, spectral_norm};
use crate::phase_space::{poisson_connection_apply, PolySymbol, RadialVectorField};
use crate::weyl::{quantize_diffop, PolarDiffOperator};

/// Default tolerance for identities that hold exactly on the grid.
pub const EXACT_TOL: f64 = 1e-8;

/// Defects of the equivalent horizontality statements for a field `A`:
/// (a) `[nabla_X0, A] = 0`, (b) `A` maps horizontal sections to horizontal
/// sections, (c) `A^` constant, (d) `A(lambda) = U* A(lambda_0) U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalityReport {
    pub defect_a: f64,
    pub defect_b: f64,
    pub defect_c: f64,
    pub defect_d: f64,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
}

impl HorizontalityReport {
    fn new(defects: [f64; 4], tol: f64) -> Self {
        let [defect_a, defect_b, defect_c, defect_d] = defects;
        Self {
            defect_a,
            defect_b,
            defect_c,
            defect_d,
            a: defect_a <= tol,
            b: defect_b <= tol,
            c: defect_c <= tol,
            d: defect_d <= tol,
        }
    }

    /// Whether (a), (c) and (d) have the same outcome.
    pub fn statements_agree(&self) -> bool {
        self.a == self.c && self.c == self.d
    }

    pub fn is_horizontal(&self) -> bool {
        self.a && self.b && self.c && self.d
    }

    pub fn max_defect(&self) -> f64 {
        self.defect_a.max(self.defect_b).max(self.defect_c).max(self.defect_d)
    }
}

/// Row used as `lambda_0`: `lambda = 1` when the field covers it.
fn base_row(a: &OperatorField) -> usize {
    a.grid().row_of_lambda(1.0).ok().filter(|i| a.rows().contains(i)).unwrap_or(a.rows().start)
}

/// The constant field `U^{-1}_{lambda,lambda_0} A(lambda_0) U_{lambda,lambda_0}`.
/// Transport is the identity in trivialized coordinates.
pub fn parallel_transport_conjugate(a: &OperatorField, lambda0: f64) -> Result<OperatorField> {
    let i0 = a.grid().row_of_lambda(lambda0)?;
    let a0 = a.fiber(i0).ok_or(Error::OffGrid(lambda0))?;
    let m = a.grid().m();
    let u = DMatrix::<Complex64>::identity(m, m);
    let conj = u.adjoint() * a0 * &u;
    OperatorField::from_fn(a.grid(), a.rows(), |_| conj.clone())
}

fn statements_bcd(a: &OperatorField) -> Result<[f64; 3]> {
    let g = a.grid();
    let i0 = base_row(a);
    let a0 = a.fiber(i0).expect("base row in field");
    let defect_c = a.fibers().iter().map(|f| spectral_norm(&(f - a0))).fold(0.0, f64::max);
    let defect_d = a.max_norm_difference(&parallel_transport_conjugate(a, g.lambda(i0))?)?;
    let mut defect_b = 0.0f64;
    for ang in ANGULAR {
        let v = DVector::from_fn(g.m(), |j, _| ang.eval(g.theta(j)));
        let v = &v / Complex64::new(v.norm(), 0.0);
        let w0 = a0 * &v;
        for f in a.fibers() {
            defect_b = defect_b.max((f * &v - &w0).norm());
        }
    }
    Ok([defect_b, defect_c, defect_d])
}

/// Horizontality statements for a fiber field, (a) by the trivialized route.
pub fn horizontality_report(a: &OperatorField, tol: f64) -> Result<HorizontalityReport> {
    let defect_a = nabla_hat_trivialized(&RadialVectorField::x0(), a)?.max_fiber_norm();
    let [b, c, d] = statements_bcd(a)?;
    Ok(HorizontalityReport::new([defect_a, b, c, d], tol))
}

/// Horizontality statements for a global operator, (a) by the commutator
/// route and the rest on its extracted fibers.
pub fn horizontality_report_operator(op: &(impl GlobalOperator + ?Sized), tol: f64) -> Result<HorizontalityReport> {
    let (a, _) = extract_fibers(op)?;
    let (nabla, _) = nabla_hat_commutator(&RadialVectorField::x0(), op)?;
    let [b, c, d] = statements_bcd(&a)?;
    Ok(HorizontalityReport::new([nabla.max_fiber_norm(), b, c, d], tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportEstimate {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|<(A(lambda_1) - U* A(lambda_0) U) v, w>| <= t sup |<nabla^_X A v, w>|`
/// along the integral curve from `lambda_0` to `lambda_1 = r_t(lambda_0)`,
/// with `v`, `w` normalized.
pub fn transport_estimate_check(
    a: &OperatorField,
    x: &RadialVectorField,
    lambda0: f64,
    t: f64,
    v: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> Result<TransportEstimate> {
    let g = a.grid();
    let lambda1 = x.flow(lambda0, t).ok_or(Error::OffGrid(lambda0))?;
    let i0 = g.row_of_lambda(lambda0)?;
    let i1 = g.row_of_lambda(lambda1)?;
    transport_estimate_with(a, &nabla_hat_trivialized(x, a)?, [i0, i1], t, v, w)
}

fn transport_estimate_with(
    a: &OperatorField,
    nabla: &OperatorField,
    [i0, i1]: [usize; 2],
    t: f64,
    v: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> Result<TransportEstimate> {
    let g = a.grid();
    let (a0, a1) = match (a.fiber(i0), a.fiber(i1)) {
        (Some(a0), Some(a1)) => (a0, a1),
        _ => return Err(Error::OffGrid(g.lambda(i1))),
    };
    let v = v / Complex64::new(v.norm(), 0.0);
    let w = w / Complex64::new(w.norm(), 0.0);
    let pairing = |m: &DMatrix<Complex64>| w.dotc(&(m * &v)).norm();
    let lhs = pairing(&(a1 - a0));
    let mut sup = 0.0f64;
    for i in i0.min(i1)..=i0.max(i1) {
        let f = nabla.fiber(i).ok_or(Error::OffGrid(g.lambda(i)))?;
        sup = sup.max(pairing(f));
    }
    let rhs = t.abs() * sup;
    Ok(TransportEstimate { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-6) })
}

/// Random angular vector with Fourier modes `|m| <= M/4`.
pub fn band_limited_vector(grid: &PolarGrid, rng: &mut impl Rng) -> DVector<Complex64> {
    let top = (grid.m() / 4) as i32;
    let coeffs: Vec<(i32, Complex64)> = (-top..=top)
        .map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    DVector::from_fn(grid.m(), |j, _| {
        coeffs.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, k as f64 * grid.theta(j))).sum()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportDraws {
    pub draws: usize,
    pub held: usize,
    /// Largest `lhs / rhs` seen.
    pub worst_ratio: f64,
}

/// Transport estimate on random band-limited `v`, `w` and random
/// shift-compatible `t` in `(0, max_rows * h / 2]`.
pub fn transport_estimate_draws(
    a: &OperatorField,
    x: &RadialVectorField,
    lambda0: f64,
    draws: usize,
    max_rows: usize,
    rng: &mut impl Rng,
) -> Result<TransportDraws> {
    let g = a.grid();
    let nabla = nabla_hat_trivialized(x, a)?;
    let i0 = g.row_of_lambda(lambda0)?;
    let mut out = TransportDraws { draws, held: 0, worst_ratio: 0.0 };
    for _ in 0..draws {
        let v = band_limited_vector(g, rng);
        let w = band_limited_vector(g, rng);
        let t = shift_time(g, rng.random_range(1..=max_rows as i64) as isize);
        let lambda1 = x.flow(lambda0, t).ok_or(Error::OffGrid(lambda0))?;
        let e = transport_estimate_with(a, &nabla, [i0, g.row_of_lambda(lambda1)?], t, &v, &w)?;
        out.held += e.holds as usize;
        if e.rhs > 0.0 {
            out.worst_ratio = out.worst_ratio.max(e.lhs / e.rhs);
        } else if e.lhs > 0.0 {
            out.worst_ratio = f64::INFINITY;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeFormulaReport {
    /// `max_i ||nabla^_X Op(u) - b Op(X~_0 u)||` with the commutator route.
    pub commutator_discrepancy: f64,
    /// The same with the trivialized route.
    pub trivialized_discrepancy: f64,
    /// `max_i` fiber norm difference between the two routes.
    pub route_agreement: f64,
    pub leakage: f64,
    /// Largest fiber norm of the right-hand side.
    pub scale: f64,
    /// `max_i ||nabla^_X Op(u) - Op(X~ u)||`, the form not covered by the
    /// theorem when `X` is not `X_0`. `None` if `X~ u` cannot be quantized.
    pub direct_discrepancy: Option<f64>,
}

impl DerivativeFormulaReport {
    pub fn discrepancy(&self) -> f64 {
        self.commutator_discrepancy.max(self.trivialized_discrepancy)
    }
}

/// `nabla^_X Op(u) = b(Q^2) Op(X~_0 u)` for `X = b X_0`, on the interior
/// fibers.
pub fn derivative_formula_check(
    u: &PolySymbol,
    x: &RadialVectorField,
    grid: &PolarGrid,
) -> Result<DerivativeFormulaReport> {
    let x0 = RadialVectorField::x0();
    let rhs_symbol = poisson_connection_apply(&x0, u)?;
    let op = quantize_diffop(u, grid)?;
    let route_b = nabla_hat_trivialized(x, &fibers_of(&op)?)?;
    let interior = route_b.rows();
    let (route_a, leakage) = nabla_hat_commutator(x, &op)?;
    let route_a = route_a.restrict(interior.clone());
    let rhs = fibers_of(&quantize_diffop(&rhs_symbol, grid)?)?;
    let rhs = rhs.restrict(interior.clone()).scale_radial(|l| x.euler_factor(l));
    let direct_discrepancy = poisson_connection_apply(x, u)
        .and_then(|s| quantize_diffop(&s, grid))
        .and_then(|o| fibers_of(&o))
        .and_then(|f| route_b.max_norm_difference(&f.restrict(interior.clone())))
        .ok();
    Ok(DerivativeFormulaReport {
        commutator_discrepancy: route_a.max_norm_difference(&rhs)?,
        trivialized_discrepancy: route_b.max_norm_difference(&rhs)?,
        route_agreement: route_a.max_norm_difference(&route_b)?,
        leakage,
        scale: rhs.max_fiber_norm(),
        direct_discrepancy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseReport {
    /// `max |d/dt F(t) - <R_t nabla^ A R_{-t} phi, psi>|` over the battery
    /// pairs and sampled `t`, with `F(t) = <R_t A R_{-t} phi, psi>`.
    pub max_error: f64,
    /// At `t = 0`, the commutator value against the trivialized fibers.
    pub endpoint_error: f64,
    /// `max |d/dt F|`.
    pub scale: f64,
}

/// Weak `t`-derivative of `R_t^0 Op(u) R_{-t}^0` by Richardson-extrapolated
/// central differences over exact grid shifts, at `t in {0, t_max/2, t_max}`.
pub fn pointwise_weak_derivative_check(u: &PolySymbol, grid: &PolarGrid, t_max: f64) -> Result<PointwiseReport> {
    let kmax = grid.shift_rows(t_max).ok_or(Error::OffGrid(t_max))?;
    let samples = [0, kmax / 2, kmax];
    let steps: [isize; 3] = [1, 2, 4];
    let x0 = RadialVectorField::x0();
    let op = quantize_diffop(u, grid)?;
    let comm = Commutator::new(&x0, &op);
    let nabla = nabla_hat_trivialized(&x0, &fibers_of(&op)?)?;
    let sections = battery(grid);
    let conjugated = |o: &dyn GlobalOperator, k: isize, phi: &PolarSection| -> Result<PolarSection> {
        let back = flow_transport(shift_time(grid, -k), phi).section;
        Ok(flow_transport(shift_time(grid, k), &o.apply(&back)?).section)
    };
    let mut report = PointwiseReport { max_error: 0.0, endpoint_error: 0.0, scale: 0.0 };
    for phi in &sections {
        for &k in &samples {
            let exact = conjugated(&comm, k, phi)?;
            let plus_minus: Vec<(PolarSection, PolarSection)> = steps
                .iter()
                .map(|&j| Ok((conjugated(&op, k + j, phi)?, conjugated(&op, k - j, phi)?)))
                .collect::<Result<_>>()?;
            let endpoint = if k == 0 { Some(nabla.apply(phi)?) } else { None };
            for psi in &sections {
                let values: Vec<Complex64> = steps
                    .iter()
                    .zip(&plus_minus)
                    .map(|(&j, (p, m))| {
                        let dt = shift_time(grid, j);
                        Ok((direct_integral_inner(psi, p)? - direct_integral_inner(psi, m)?) / (2.0 * dt))
                    })
                    .collect::<Result<_>>()?;
                let dts: Vec<f64> = steps.iter().map(|&j| shift_time(grid, j)).collect();
                let fd = richardson(&values, &dts, 2);
                let formula = direct_integral_inner(psi, &exact)?;
                report.max_error = report.max_error.max((fd - formula).norm());
                report.scale = report.scale.max(formula.norm());
                if let Some(e) = &endpoint {
                    let diff = direct_integral_inner(psi, e)? - formula;
                    report.endpoint_error = report.endpoint_error.max(diff.norm());
                }
            }
        }
    }
    Ok(report)
}

/// Fibers of `|phi><psi|`: `v -> phi(lambda) <psi(lambda), v>_lambda`.
pub fn rank_one_field(phi: &PolarSection, psi: &PolarSection) -> Result<OperatorField> {
    let g = phi.grid();
    g.check_same(psi.grid())?;
    let w = Complex64::new(g.fiber_weight(), 0.0);
    OperatorField::from_fn(g, 0..g.s_count(), |i| {
        DVector::from_column_slice(phi.row(i)) * DVector::from_column_slice(psi.row(i)).adjoint() * w
    })
}

/// `max_i ||nabla^_X |phi><psi| - |nabla_X phi><psi| - |phi><nabla_X psi|||`.
pub fn rank_one_derivative_defect(x: &RadialVectorField, phi: &PolarSection, psi: &PolarSection) -> Result<f64> {
    let lhs = nabla_hat_trivialized(x, &rank_one_field(phi, psi)?)?;
    let dphi = connection_apply(x, phi, ConnectionFormula::A);
    let dpsi = connection_apply(x, psi, ConnectionFormula::A);
    let rhs = rank_one_field(&dphi, psi)?.add(&rank_one_field(phi, &dpsi)?)?;
    lhs.max_norm_difference(&rhs)
}

/// `max_i | || |phi><psi|(lambda_i) || - ||phi(lambda_i)|| ||psi(lambda_i)|| |`.
pub fn rank_one_norm_defect(phi: &PolarSection, psi: &PolarSection) -> Result<f64> {
    let r = rank_one_field(phi, psi)?;
    Ok(r.rows()
        .zip(r.fiber_norms())
        .map(|(i, n)| (n - fiber_norm(phi, i) * fiber_norm(psi, i)).abs())
        .fold(0.0, f64::max))
}

/// `max_i | ||A(lambda_{i+1})|| - ||A(lambda_i)|| | / (lambda_{i+1} - lambda_i)`.
pub fn norm_continuity_modulus(a: &OperatorField) -> f64 {
    let g = a.grid();
    let norms = a.fiber_norms();
    a.rows()
        .zip(norms.windows(2))
        .map(|(i, w)| (w[1] - w[0]).abs() / (g.lambda(i + 1) - g.lambda(i)))
        .fold(0.0, f64::max)
}

/// `||A||_C = sup_{lambda in C} ||A(lambda)||` over grid points of `C = [c0, c1]`.
pub fn local_sup_norm(a: &OperatorField, c0: f64, c1: f64) -> Result<f64> {
    let rows = a.grid().rows_in_interval(c0, c1)?;
    Ok(rows.filter_map(|i| a.fiber_norm(i)).fold(0.0, f64::max))
}

/// `max_i ||(nabla^_X A)^* - nabla^_X (A^*)||` with the commutator route, `X` real.
pub fn adjoint_compatibility_defect(x: &RadialVectorField, op: &PolarDiffOperator) -> Result<f64> {
    let (d, _) = nabla_hat_commutator(x, op)?;
    let (d_adj, _) = nabla_hat_commutator(x, &op.adjoint())?;
    d.adjoint().max_norm_difference(&d_adj)
}

/// `max_i ||nabla^_X(AB) - nabla^_X(A) B - A nabla^_X(B)||`, trivialized route.
pub fn leibniz_product_defect(x: &RadialVectorField, a: &OperatorField, b: &OperatorField) -> Result<f64> {
    let lhs = nabla_hat_trivialized(x, &a.mul(b)?)?;
    let rhs = nabla_hat_trivialized(x, a)?.mul(b)?.add(&a.mul(&nabla_hat_trivialized(x, b)?)?)?;
    lhs.max_norm_difference(&rhs)
}

/// Closed form `(e^{2t} - 1, 2 t e^{2t})` of the transport estimate for
/// `A(lambda) = lambda L`, `X_0`, `lambda_0 = 1`, `v = w` an eigenvector of
/// `L` with eigenvalue 1.
pub fn transport_closed_form(t: f64) -> (f64, f64) {
    ((2.0 * t).exp() - 1.0, 2.0 * t * (2.0 * t).exp())
}

/// `-i d/dtheta` on one fiber, built from the spectral row derivative.
pub fn angular_momentum_fiber(grid: &PolarGrid) -> DMatrix<Complex64> {
    let m = grid.m();
    let mut out = DMatrix::zeros(m, m);
    let mut row = vec![Complex64::new(0.0, 0.0); m];
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..m {
        row.fill(Complex64::new(0.0, 0.0));
        row[j] = Complex64::new(1.0, 0.0);
        grid.dtheta_row(&row, 1, &mut d);
        for k in 0..m {
            out[(k, j)] = d[k] * Complex64::new(0.0, -1.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert_field::battery::{battery_profiles, horizontal_battery};
    use crate::hilbert_field::direct_integral_norm;
    use crate::op_field::MultiplicationOperator;
    use crate::phase_space::{angular_momentum, constant_of_motion_battery};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lambda_field(g: &PolarGrid) -> OperatorField {
        OperatorField::radial(g, &DMatrix::identity(g.m(), g.m()), |l| l).unwrap()
    }

    #[test]
    fn horizontality_examples() {
        let g = PolarGrid::default();
        let d = OperatorField::constant(&g, angular_momentum_fiber(&g)).unwrap();
        let r = horizontality_report(&d, EXACT_TOL).unwrap();
        assert!(r.is_horizontal() && r.max_defect() <= 1e-8, "{r:?}");
        let r = horizontality_report(&lambda_field(&g), EXACT_TOL).unwrap();
        assert!(!r.a && !r.b && !r.c && !r.d);
        let spread = g.lambda(g.s_count() - 1) - 1.0;
        assert!((r.defect_c - spread).abs() < 1e-12);
        let zero = OperatorField::constant(&g, DMatrix::zeros(g.m(), g.m())).unwrap();
        assert!(horizontality_report(&zero, EXACT_TOL).unwrap().is_horizontal());
    }

    #[test]
    fn horizontality_statements_agree_on_battery() {
        let g = PolarGrid::default();
        for (name, u) in constant_of_motion_battery() {
            let r = horizontality_report_operator(&quantize_diffop(&u, &g).unwrap(), EXACT_TOL).unwrap();
            assert!(r.statements_agree(), "{name}: {r:?}");
            assert_eq!(r.a, r.b, "{name}");
            let angular_only = matches!(name, "l12" | "l12^2");
            assert_eq!(r.is_horizontal(), angular_only, "{name}: {r:?}");
        }
        let l2 = angular_momentum(1, 2, 2).unwrap().pow(2);
        let r = horizontality_report_operator(&quantize_diffop(&l2, &g).unwrap(), EXACT_TOL).unwrap();
        assert!(r.is_horizontal() && r.max_defect() <= 1e-8);
    }

    #[test]
    fn transport_conjugate_is_constant() {
        let g = PolarGrid::default();
        let c = parallel_transport_conjugate(&lambda_field(&g), 1.0).unwrap();
        assert_eq!(c.max_norm_difference(&OperatorField::constant(&g, DMatrix::identity(g.m(), g.m())).unwrap()), Ok(0.0));
        assert!(matches!(parallel_transport_conjugate(&lambda_field(&g), 1.01), Err(Error::OffGrid(_))));
        let d = OperatorField::constant(&g, angular_momentum_fiber(&g)).unwrap();
        assert!(parallel_transport_conjugate(&d, 1.0).unwrap().max_norm_difference(&d).unwrap() <= 1e-8);
    }

    #[test]
    fn transport_estimate_closed_form() {
        let g = PolarGrid::default();
        let x0 = RadialVectorField::x0();
        let a = OperatorField::radial(&g, &angular_momentum_fiber(&g), |l| l).unwrap();
        let v = DVector::from_fn(g.m(), |j, _| Complex64::from_polar(1.0, g.theta(j)));
        let e = transport_estimate_check(&a, &x0, 1.0, 0.25, &v, &v).unwrap();
        let (lhs, rhs) = transport_closed_form(0.25);
        assert!((e.lhs - lhs).abs() <= 1e-10 * lhs, "{e:?}");
        assert!((e.rhs - rhs).abs() <= 1e-8 * rhs, "{e:?}");
        assert!(e.holds);
        assert!(matches!(transport_estimate_check(&a, &x0, 1.0, 0.3, &v, &v), Err(Error::OffGrid(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = transport_estimate_draws(&a, &x0, 1.0, 100, 64, &mut rng).unwrap();
        assert_eq!(draws.held, 100, "{draws:?}");

        let h = OperatorField::constant(&g, angular_momentum_fiber(&g)).unwrap();
        let e = transport_estimate_check(&h, &x0, 1.0, 0.25, &v, &v).unwrap();
        assert!(e.lhs == 0.0 && e.holds);
    }

    #[test]
    fn derivative_formula_on_battery() {
        let g = PolarGrid::default();
        for (name, u) in constant_of_motion_battery() {
            for x in [RadialVectorField::x0(), RadialVectorField::monomial(2)] {
                let r = derivative_formula_check(&u, &x, &g).unwrap();
                assert!(r.discrepancy() <= 1e-6, "{name} {x:?}: {r:?}");
                assert!(r.route_agreement <= 1e-6, "{name} {x:?}: {r:?}");
            }
        }
        let p = PolySymbol::p(2, 0);
        assert_eq!(derivative_formula_check(&p, &RadialVectorField::x0(), &g), Err(Error::NotConstantOfMotion));
    }

    #[test]
    fn derivative_formula_closed_forms() {
        let g = PolarGrid::default();
        let q2 = PolySymbol::norm_q2(2);
        let r = derivative_formula_check(&q2, &RadialVectorField::x0(), &g).unwrap();
        assert!(r.discrepancy() <= 1e-8);
        assert!((r.scale - 2.0 * g.lambda(g.s_count() - 5)).abs() < 1e-9);
        let l = angular_momentum(1, 2, 2).unwrap();
        let r = derivative_formula_check(&l, &RadialVectorField::monomial(2), &g).unwrap();
        assert!(r.discrepancy() <= 1e-8 && r.scale == 0.0);
    }

    #[test]
    fn pointwise_weak_derivative() {
        let g = PolarGrid::default();
        let r = pointwise_weak_derivative_check(&PolySymbol::norm_q2(2), &g, 0.25).unwrap();
        assert!(r.max_error <= 1e-5 && r.endpoint_error <= 1e-5, "{r:?}");
        assert!(r.scale > 1.0);
        let l = angular_momentum(1, 2, 2).unwrap();
        let r = pointwise_weak_derivative_check(&l.pow(2), &g, 0.25).unwrap();
        assert!(r.max_error <= 1e-8 && r.scale <= 1e-8, "{r:?}");
    }

    #[test]
    fn rank_one_identities() {
        let g = PolarGrid::default();
        let x0 = RadialVectorField::x0();
        let b = battery(&g);
        for (phi, psi) in [(&b[0], &b[1]), (&b[5], &b[11]), (&b[7], &b[7])] {
            assert!(rank_one_norm_defect(phi, psi).unwrap() <= 1e-10);
            let d = rank_one_derivative_defect(&x0, phi, psi).unwrap();
            assert!(d <= 1e-6, "{d}");
        }
        let hb = horizontal_battery(&g);
        assert!(rank_one_derivative_defect(&x0, &hb[1], &hb[3]).unwrap() <= 1e-10);
    }

    #[test]
    fn norm_continuity() {
        let g = PolarGrid::default();
        let d = OperatorField::constant(&g, angular_momentum_fiber(&g)).unwrap();
        assert!(norm_continuity_modulus(&d) <= 1e-8);
        assert!((local_sup_norm(&lambda_field(&g), 1.0, std::f64::consts::E).unwrap() - std::f64::consts::E).abs() < 1e-12);

        // ||phi(lambda)|| ||psi(lambda)|| = r_phi(s) r_psi(s) |g_phi| |g_psi|, d/dlambda = e^{-s} d/ds
        let profiles = battery_profiles(&g);
        let (p, q) = (profiles[0], profiles[4]);
        let b = battery(&g);
        let modulus = norm_continuity_modulus(&rank_one_field(&b[0], &b[4]).unwrap());
        let ang = (p.angular.fiber_norm_sqr() * q.angular.fiber_norm_sqr()).sqrt();
        let bound = (0..=4000)
            .map(|k| -2.0 + k as f64 * 1e-3)
            .map(|s: f64| {
                let d = p.radial_ds(s) * q.radial(s) + p.radial(s) * q.radial_ds(s);
                (d * ang * (-s).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(modulus > 0.0 && modulus <= 1.1 * bound, "{modulus} {bound}");
    }

    #[test]
    fn adjoint_and_product_rules() {
        let g = PolarGrid::default();
        let x0 = RadialVectorField::x0();
        let hl = &PolySymbol::norm_q2(2) * &angular_momentum(1, 2, 2).unwrap();
        let op = quantize_diffop(&hl.scale(Complex64::new(0.0, 1.0)), &g).unwrap();
        assert!(adjoint_compatibility_defect(&x0, &op).unwrap() <= 1e-8);
        let (a, _) = extract_fibers(&quantize_diffop(&hl, &g).unwrap()).unwrap();
        let (b, _) = extract_fibers(&MultiplicationOperator::radial(&g, |l| l)).unwrap();
        let defect = leibniz_product_defect(&x0, &a, &b).unwrap();
        assert!(defect <= 1e-8, "{defect}");
        assert!(direct_integral_norm(&b.apply(&battery(&g)[0]).unwrap()) > 0.0);
    }
}
