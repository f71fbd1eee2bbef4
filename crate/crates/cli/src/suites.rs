//! Named verification suites. Every check is an independent closure; a suite
//! runs its checks in parallel and returns records sorted by check name.

use std::time::Instant;

use anyhow::{bail, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use opfield::hilbert_field::battery::{battery, horizontal_battery};
use opfield::hilbert_field::{
    connection_apply, dilation_group, direct_integral_norm, fiber_norm, horizontal_test, hx_symmetry_defect,
    laplacian_defect, leibniz_defect, resample_cartesian, shift_time, trivialize, ConnectionFormula, PolarGrid,
    PolarSection,
};
use opfield::op_field::{
    adjoint_compatibility_defect, angular_momentum_fiber, decomposability_defect, derivative_formula_check,
    extract_fibers, horizontality_report_operator, leibniz_product_defect, local_sup_norm, nabla_hat_trivialized, norm_continuity_modulus,
    parallel_transport_conjugate, pointwise_weak_derivative_check, rank_one_derivative_defect, rank_one_norm_defect,
    transport_closed_form, transport_estimate_check, transport_estimate_draws, FnOperator, MultiplicationOperator,
    OperatorField,
};
use opfield::phase_space::{
    angular_momentum, bracket_identity_defects, constant_of_motion_battery, flow_generator_defect,
    is_constant_of_motion, poisson_bracket, poisson_connection_identity_check, random_symbol, PolySymbol,
    RadialVectorField,
};
use opfield::weyl::{
    adjoint_defect_diffop, adjoint_defect_kernel, backend_agreement_1d, backend_agreement_2d,
    covariance_defect_cartesian, covariance_defect_polar, covariance_refinement, is_monotone_within_factor_two,
    q2_commutation_defect, quantize_diffop, CartesianGrid,
};

use crate::config::RunConfig;
use crate::report::CheckRecord;

pub const SUITES: [&str; 7] = ["poisson", "weyl", "field", "opfield", "theorem-xu", "horizontal", "all"];

/// Bracket identities hold coefficientwise in floating point because the
/// random symbols have small integer coefficients.
const POLY_TOL: f64 = 1e-12;

type Metric = Box<dyn Fn() -> opfield::Result<f64> + Send + Sync>;

enum Gate {
    Tol(f64),
    Info,
}

struct Check {
    name: String,
    anchor: &'static str,
    gate: Gate,
    metric: Metric,
}

fn check(name: impl Into<String>, anchor: &'static str, tol: f64, metric: impl Fn() -> opfield::Result<f64> + Send + Sync + 'static) -> Check {
    Check { name: name.into(), anchor, gate: Gate::Tol(tol), metric: Box::new(metric) }
}

fn info(name: impl Into<String>, anchor: &'static str, metric: impl Fn() -> opfield::Result<f64> + Send + Sync + 'static) -> Check {
    Check { name: name.into(), anchor, gate: Gate::Info, metric: Box::new(metric) }
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> opfield::Result<f64>) -> opfield::Result<f64> {
    items.into_iter().try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn l12() -> PolySymbol {
    angular_momentum(1, 2, 2).expect("planar indices")
}

fn battery_symbols() -> Vec<(&'static str, PolySymbol)> {
    constant_of_motion_battery()
}

fn fields() -> [(&'static str, RadialVectorField); 2] {
    [("X0", RadialVectorField::x0()), ("2 lambda^2 d/dlambda", RadialVectorField::monomial(2))]
}

/// Shift-compatible time closest to `t`, at least `min_rows` rows.
fn grid_time(g: &PolarGrid, t: f64, min_rows: isize) -> f64 {
    let rows = (2.0 * t / g.h()).round() as isize;
    shift_time(g, rows.max(min_rows))
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    if cfg.n != 2 {
        bail!("the suites use the planar battery, n must be 2");
    }
    let names: Vec<&str> = match name {
        "all" => SUITES[..SUITES.len() - 1].to_vec(),
        n if SUITES.contains(&n) => vec![n],
        _ => bail!("unknown suite {name:?}, expected one of {}", SUITES.join(", ")),
    };
    let mut jobs: Vec<(&str, Check)> = Vec::new();
    for suite in names {
        let checks = match suite {
            "poisson" => poisson(cfg),
            "weyl" => weyl(cfg)?,
            "field" => field(cfg)?,
            "opfield" => opfield(cfg)?,
            "theorem-xu" => theorem_xu(cfg)?,
            _ => horizontal(cfg)?,
        };
        jobs.extend(checks.into_iter().map(|c| (suite, c)));
    }
    let mut records: Vec<CheckRecord> = jobs.par_iter().map(|(suite, c)| execute(suite, c, cfg.timing)).collect();
    records.sort_by(|a, b| (&a.suite, &a.check).cmp(&(&b.suite, &b.check)));
    Ok(records)
}

fn execute(suite: &str, c: &Check, timing: bool) -> CheckRecord {
    let start = Instant::now();
    let value = (c.metric)();
    let mut record = match c.gate {
        Gate::Tol(tol) => CheckRecord::thresholded(suite, &c.name, c.anchor, value, tol),
        Gate::Info => CheckRecord::info(suite, &c.name, c.anchor, value.ok()),
    };
    if timing {
        record.ms = start.elapsed().as_millis() as u64;
    }
    record
}

fn poisson(cfg: &RunConfig) -> Vec<Check> {
    let seed = cfg.seed;
    let triples = move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).map(|_| [0; 3].map(|_| random_symbol(2, 4, 5, &mut rng))).collect::<Vec<_>>()
    };
    let identity = move |pick: fn(&opfield::phase_space::BracketIdentityDefects) -> f64| {
        move || max_over(triples(), |[u, v, w]| Ok(pick(&bracket_identity_defects(&u, &v, &w)?)))
    };
    let family = || (1..=3).map(RadialVectorField::monomial).collect::<Vec<_>>();
    let connection = move |pick: fn(&opfield::phase_space::ConnectionIdentityReport) -> f64| {
        move || {
            let symbols: Vec<PolySymbol> = battery_symbols().into_iter().map(|(_, u)| u).collect();
            let mut worst = 0.0f64;
            for x in &family() {
                for y in &family() {
                    for u in &symbols {
                        for v in &symbols {
                            worst = worst.max(pick(&poisson_connection_identity_check(x, y, u, v)?));
                        }
                    }
                }
            }
            Ok(worst)
        }
    };
    vec![
        check("antisymmetry", "Poisson algebra", POLY_TOL, identity(|d| d.antisymmetry)),
        check("leibniz", "Poisson algebra", POLY_TOL, identity(|d| d.leibniz)),
        check("jacobi", "Poisson algebra", POLY_TOL, identity(|d| d.jacobi)),
        check("flow generator", "Hamiltonian flow generated by the bracket", cfg.tol_exact, move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let mut worst = 0.0f64;
            for k in 0..20 {
                let mut coord = || rng.random_range(-1.5..1.5);
                let (q, p) = ([coord(), coord()], [coord(), coord()]);
                let u = match k % 3 {
                    0 => &PolySymbol::norm_q2(2) * &l12(),
                    1 => PolySymbol::dilation_generator(2).pow(2),
                    _ => random_symbol(2, 4, 5, &mut rng),
                };
                worst = worst.max(flow_generator_defect(&u, &q, &p)?);
            }
            Ok(worst)
        }),
        check("connection leibniz", "Poisson connection", POLY_TOL, connection(|r| r.leibniz_defect)),
        check("connection curvature", "Poisson connection", POLY_TOL, connection(|r| r.curvature_defect)),
        check("constants of motion closed under bracket", "constants of motion of |q|^2", 0.0, || {
            let h = PolySymbol::norm_q2(2);
            let symbols = battery_symbols();
            let mut failures = 0usize;
            for (_, u) in &symbols {
                failures += usize::from(!is_constant_of_motion(u, &h)?);
                for (_, v) in &symbols {
                    failures += usize::from(!is_constant_of_motion(&poisson_bracket(u, v)?, &h)?);
                }
            }
            Ok(failures as f64)
        }),
    ]
}

fn weyl(cfg: &RunConfig) -> Result<Vec<Check>> {
    let g = cfg.polar_grid()?;
    let cart = cfg.cartesian_grid()?;
    // fixed one-dimensional grid, independent of the planar configuration
    let line = CartesianGrid::new(1, 64, 8.0)?;
    let (q, p) = (PolySymbol::q(1, 0), PolySymbol::p(1, 0));
    let i = Complex64::new(0.0, 1.0);
    let with_dilation = || {
        let mut s: Vec<PolySymbol> = battery_symbols().into_iter().map(|(_, u)| u).collect();
        s.push(PolySymbol::dilation_generator(2));
        s
    };
    let mut out = Vec::new();
    {
        let (q, p) = (q.clone(), p.clone());
        out.push(check("backend agreement n=1", "Weyl quantization", cfg.tol_cross, move || {
            max_over([q.pow(2), p.pow(2), &q * &p], |u| backend_agreement_1d(&u, line))
        }));
    }
    {
        let g = g.clone();
        out.push(check("backend agreement n=2", "Weyl quantization", cfg.tol_cross, move || {
            let h = PolySymbol::norm_q2(2);
            max_over([h.clone(), l12(), &h * &l12(), l12().pow(2)], |u| backend_agreement_2d(&u, &g, cart))
        }));
    }
    {
        let (q, p) = (q.clone(), p.clone());
        out.push(check("adjoint, kernel", "Weyl adjoint", cfg.tol_exact.min(1e-10), move || {
            let symbols = [&(&q * &p) + &p.pow(2), q.scale(i), &q.pow(2) * &p.scale(i)];
            max_over(symbols, |u| adjoint_defect_kernel(&u, line))
        }));
    }
    {
        let g = g.clone();
        out.push(check("adjoint, diffop", "Weyl adjoint", cfg.tol_exact, move || {
            let mut s = with_dilation();
            s.push(PolySymbol::q(2, 0).scale(i));
            max_over(s, |u| adjoint_defect_diffop(&u, &g))
        }));
    }
    {
        let g = g.clone();
        out.push(check("covariance, diffop", "metaplectic covariance", cfg.tol_exact, move || {
            let times = [shift_time(&g, 1), shift_time(&g, 4)];
            max_over(with_dilation().iter().flat_map(|u| times.map(|t| (u.clone(), t))), |(u, t)| {
                covariance_defect_polar(&u, t, &g)
            })
        }));
    }
    let oscillator = &q.pow(2) + &p.pow(2);
    {
        let u = oscillator.clone();
        out.push(check("covariance, kernel", "metaplectic covariance", cfg.tol_cross, move || {
            covariance_defect_cartesian(&u, 0.2, CartesianGrid::new(1, 64, 10.0)?)
        }));
    }
    out.push(check("covariance refinement monotone", "metaplectic covariance", 0.0, move || {
        Ok(flag(is_monotone_within_factor_two(&covariance_refinement(&oscillator, 0.2, 10.0, &[32, 48, 64])?)))
    }));
    {
        let g = g.clone();
        out.push(check("commutes with |q|^2", "constants of motion quantize to commuting operators", cfg.tol_exact, move || {
            max_over(battery_symbols(), |(_, u)| q2_commutation_defect(&u, &g))
        }));
    }
    out.push(check("laplacian by Fourier conjugation", "Laplacian", cfg.tol_stencil, || {
        Ok(laplacian_defect(CartesianGrid::self_dual(1, 64)?)?.max(laplacian_defect(CartesianGrid::self_dual(2, 32)?)?))
    }));
    Ok(out)
}

fn field(cfg: &RunConfig) -> Result<Vec<Check>> {
    let g = cfg.polar_grid()?;
    let cart = cfg.cartesian_grid()?;
    let mut out = Vec::new();
    {
        let g = g.clone();
        out.push(check("trivialization unitarity", "trivialization", cfg.tol_exact.min(1e-10), move || {
            let mut worst = 0.0f64;
            for phi in &battery(&g) {
                let t = trivialize(phi);
                for i in 0..g.s_count() {
                    worst = worst.max((t.fiber_norm(i) - fiber_norm(phi, i)).abs());
                }
            }
            Ok(worst)
        }));
    }
    {
        let g = g.clone();
        out.push(check("parseval", "direct integral", cfg.tol_cross, move || {
            max_over(battery(&g), |phi| {
                let f = resample_cartesian(&phi, cart)?;
                let a = direct_integral_norm(&phi).powi(2);
                Ok((f.norm().powi(2) - a).abs() / a)
            })
        }));
    }
    let xs = || {
        [RadialVectorField::x0(), RadialVectorField::monomial(2), RadialVectorField::polynomial(vec![1.0, 0.5])]
    };
    {
        let g = g.clone();
        out.push(check("connection formulas agree", "connection", cfg.tol_exact.min(1e-10), move || {
            let sections = battery(&g);
            let mut worst = 0.0f64;
            for x in &xs() {
                for phi in &sections {
                    let a = connection_apply(x, phi, ConnectionFormula::A);
                    let b = connection_apply(x, phi, ConnectionFormula::B);
                    worst = worst.max(a.sub(&b)?.values().iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
            Ok(worst)
        }));
    }
    {
        let g = g.clone();
        out.push(check("connection leibniz", "connection", cfg.tol_stencil, move || {
            let sections = battery(&g);
            let mut worst = 0.0f64;
            for x in &xs() {
                for a in &sections {
                    for b in &sections {
                        worst = worst.max(leibniz_defect(x, a, b)?);
                    }
                }
            }
            Ok(worst)
        }));
    }
    for (label, x) in fields() {
        let g = g.clone();
        out.push(check(format!("H_X symmetric, {label}"), "Hamiltonian of a vector field", cfg.tol_stencil, move || {
            let sections = battery(&g);
            let mut worst = 0.0f64;
            for phi in &sections {
                for psi in &sections {
                    worst = worst.max(hx_symmetry_defect(&x, phi, psi)?);
                }
            }
            Ok(worst)
        }));
    }
    {
        let g = g.clone();
        out.push(check("W_t unitary", "dilation group", cfg.tol_exact.min(1e-10), move || {
            let sections = battery(&g);
            let mut worst = 0.0f64;
            for k in [1, 4, 16] {
                for phi in &sections {
                    let w = dilation_group(shift_time(&g, k), phi).section;
                    worst = worst.max((direct_integral_norm(&w) - direct_integral_norm(phi)).abs());
                }
            }
            Ok(worst)
        }));
    }
    let tol = cfg.tol_stencil;
    out.push(check("angular sections horizontal", "horizontal sections", tol, move || {
        Ok(horizontal_battery(&g).iter().map(|phi| horizontal_test(phi, tol).defect).fold(0.0, f64::max))
    }));
    Ok(out)
}

fn opfield(cfg: &RunConfig) -> Result<Vec<Check>> {
    let g = cfg.polar_grid()?;
    let (exact, stencil) = (cfg.tol_exact, cfg.tol_stencil);
    let seed = cfg.seed;
    let h = PolySymbol::norm_q2(2);
    let non_horizontal = &h * &l12();
    let t = grid_time(&g, 0.25, 2);
    let mut out = Vec::new();
    {
        let g = g.clone();
        out.push(check("decomposable, constants of motion", "reduction criterion", exact, move || {
            max_over(battery_symbols(), |(_, u)| decomposability_defect(&quantize_diffop(&u, &g)?))
        }));
    }
    {
        // -i d/ds moves mass across fibers; the metric is 1/defect
        let g = g.clone();
        out.push(check("not decomposable, -i d/ds (inverse defect)", "reduction criterion", 20.0, move || {
            let radial = FnOperator::new(&g, |phi: &PolarSection| Ok(phi.ds().scale(Complex64::new(0.0, -1.0))));
            Ok(1.0 / decomposability_defect(&radial)?)
        }));
    }
    {
        let (g, u) = (g.clone(), non_horizontal.clone());
        out.push(check("extraction leakage, |q|^2 l12", "reduction criterion", exact, move || {
            Ok(extract_fibers(&quantize_diffop(&u, &g)?)?.1)
        }));
    }
    {
        let (g, u) = (g.clone(), non_horizontal.clone());
        out.push(check("route agreement, |q|^2 l12", "operator connection", stencil, move || {
            Ok(derivative_formula_check(&u, &RadialVectorField::monomial(2), &g)?.route_agreement)
        }));
    }
    {
        let g = g.clone();
        out.push(check("adjoint compatibility", "operator connection", stencil, move || {
            let ops = battery_symbols().into_iter().map(|(_, u)| quantize_diffop(&u, &g)).collect::<opfield::Result<Vec<_>>>()?;
            max_over(fields().iter().flat_map(|(_, x)| ops.iter().map(move |o| (x, o))), |(x, o)| {
                adjoint_compatibility_defect(x, o)
            })
        }));
    }
    {
        let g = g.clone();
        // relative to the size of the derivative: products reach norms ~1e4
        out.push(check("leibniz on products (relative)", "operator connection", stencil, move || {
            let a = extract_fibers(&quantize_diffop(&(&h * &l12()), &g)?)?.0;
            let b = extract_fibers(&quantize_diffop(&h.pow(2), &g)?)?.0;
            let c = OperatorField::radial(&g, &angular_momentum_fiber(&g), |l| l.sin())?;
            let relative = |x: &RadialVectorField, a: &OperatorField, b: &OperatorField| -> opfield::Result<f64> {
                let scale = nabla_hat_trivialized(x, &a.mul(b)?)?.max_fiber_norm().max(1.0);
                Ok(leibniz_product_defect(x, a, b)? / scale)
            };
            max_over(fields(), |(_, x)| Ok(relative(&x, &a, &b)?.max(relative(&x, &c, &a)?)))
        }));
    }
    {
        let g = g.clone();
        out.push(check("pointwise to weak derivative", "derivative of the conjugated operator", stencil, move || {
            max_over(battery_symbols(), |(_, u)| {
                let r = pointwise_weak_derivative_check(&u, &g, t)?;
                Ok(r.max_error.max(r.endpoint_error))
            })
        }));
    }
    {
        let (g, u) = (g.clone(), non_horizontal.clone());
        out.push(check("transport closed form", "transport estimate", exact, move || {
            let (a, _) = extract_fibers(&quantize_diffop(&u, &g)?)?;
            let v = nalgebra::DVector::from_fn(g.m(), |j, _| Complex64::from_polar(1.0, g.theta(j)));
            let e = transport_estimate_check(&a, &RadialVectorField::x0(), 1.0, t, &v, &v)?;
            let (lhs, rhs) = transport_closed_form(t);
            let rel = ((e.lhs - lhs).abs() / lhs).max((e.rhs - rhs).abs() / rhs);
            Ok(if e.holds { rel } else { f64::INFINITY })
        }));
    }
    {
        let (g, u) = (g.clone(), non_horizontal.clone());
        out.push(check("transport estimate draws (failures)", "transport estimate", 0.0, move || {
            let (a, _) = extract_fibers(&quantize_diffop(&u, &g)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
            let max_rows = (g.s_count() / 4).max(1);
            let d = transport_estimate_draws(&a, &RadialVectorField::x0(), 1.0, 100, max_rows, &mut rng)?;
            Ok((d.draws - d.held) as f64)
        }));
    }
    let pairs = [(0, 1), (2, 7), (5, 11), (9, 9)];
    {
        let g = g.clone();
        out.push(check("rank-one derivative identity", "rank-one fields", stencil, move || {
            let b = battery(&g);
            max_over(fields(), |(_, x)| max_over(pairs, |(i, j)| rank_one_derivative_defect(&x, &b[i], &b[j])))
        }));
    }
    {
        let g = g.clone();
        out.push(check("rank-one norm formula", "rank-one fields", exact.min(1e-10), move || {
            let b = battery(&g);
            max_over(pairs, |(i, j)| rank_one_norm_defect(&b[i], &b[j]))
        }));
    }
    {
        let g = g.clone();
        out.push(check("norm continuity, horizontal fields", "continuity of fiber norms", exact, move || {
            let l = norm_continuity_modulus(&OperatorField::constant(&g, angular_momentum_fiber(&g))?);
            let (l2, _) = extract_fibers(&quantize_diffop(&l12().pow(2), &g)?)?;
            Ok(l.max(norm_continuity_modulus(&l2)))
        }));
    }
    {
        let g = g.clone();
        out.push(info("norm continuity, |q|^2 l12", "continuity of fiber norms", move || {
            let (a, _) = extract_fibers(&quantize_diffop(&(&PolySymbol::norm_q2(2) * &l12()), &g)?)?;
            Ok(norm_continuity_modulus(&a))
        }));
    }
    {
        // sup over [1/2, 2] of lambda ||L|| is attained at the last grid point
        let g = g.clone();
        out.push(check("local sup norm", "local seminorms", exact, move || {
            let l = angular_momentum_fiber(&g);
            let a = OperatorField::radial(&g, &l, |lambda| lambda)?;
            let norm_l = OperatorField::constant(&g, l)?.max_fiber_norm();
            let last = g.rows_in_interval(0.5, 2.0)?.end - 1;
            let expected = g.lambda(last) * norm_l;
            Ok((local_sup_norm(&a, 0.5, 2.0)? - expected).abs() / expected)
        }));
    }
    for (name, u) in battery_symbols() {
        let g = g.clone();
        out.push(info(format!("arbitrary field, Op(X~ u) directly, {name}"), "derivative formula", move || {
            derivative_formula_check(&u, &RadialVectorField::monomial(2), &g)?
                .direct_discrepancy
                .ok_or(opfield::Error::NonPolynomialLift)
        }));
    }
    Ok(out)
}

fn theorem_xu(cfg: &RunConfig) -> Result<Vec<Check>> {
    let g = cfg.polar_grid()?;
    let mut out = Vec::new();
    for (name, u) in battery_symbols() {
        for (label, x) in fields() {
            let (g, u) = (g.clone(), u.clone());
            out.push(check(format!("{name}, {label}"), "derivative formula", cfg.tol_stencil, move || {
                let r = derivative_formula_check(&u, &x, &g)?;
                Ok(r.discrepancy().max(r.route_agreement))
            }));
        }
    }
    Ok(out)
}

fn horizontal(cfg: &RunConfig) -> Result<Vec<Check>> {
    let g = cfg.polar_grid()?;
    let exact = cfg.tol_exact;
    let mut out = Vec::new();
    for (name, u) in battery_symbols() {
        let g = g.clone();
        out.push(check(format!("statements agree, {name}"), "horizontality equivalences", 0.0, move || {
            Ok(flag(horizontality_report_operator(&quantize_diffop(&u, &g)?, exact)?.statements_agree()))
        }));
    }
    {
        let g = g.clone();
        out.push(check("statements agree, lambda", "horizontality equivalences", 0.0, move || {
            Ok(flag(horizontality_report_operator(&MultiplicationOperator::radial(&g, |l| l), exact)?.statements_agree()))
        }));
    }
    let l = l12();
    let angular = [
        ("l12", l.clone()),
        ("l12^2", l.pow(2)),
        ("1+l12+3l12^2", &(&PolySymbol::constant(2, 1.0) + &l) + &l.pow(2).scale(3.0)),
    ];
    for (name, u) in angular {
        let g = g.clone();
        out.push(check(format!("Op(a(l12)) horizontal, {name}"), "angular momentum operators are horizontal", exact, move || {
            let r = horizontality_report_operator(&quantize_diffop(&u, &g)?, exact)?;
            Ok(if r.is_horizontal() { r.max_defect() } else { f64::INFINITY })
        }));
    }
    out.push(check("parallel transport fixes Op(l12^2)", "horizontality equivalences", exact, move || {
        let (a, _) = extract_fibers(&quantize_diffop(&l12().pow(2), &g)?)?;
        a.max_norm_difference(&parallel_transport_conjugate(&a, 1.0)?)
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &RunConfig::default()).is_err());
    }

    #[test]
    fn grid_time_is_shift_compatible() {
        let g = PolarGrid::default();
        let t = grid_time(&g, 0.25, 2);
        assert_eq!(t, 0.25);
        assert!(g.shift_rows(t).is_some());
    }

    #[test]
    fn poisson_suite_is_exact() {
        let records = run_suite("poisson", &RunConfig::default()).unwrap();
        assert_eq!(records.len(), 7);
        let jacobi = records.iter().find(|r| r.check == "jacobi").unwrap();
        assert_eq!(jacobi.metric, Some(0.0));
        assert!(records.iter().all(|r| r.status == crate::report::Status::Pass), "{records:?}");
    }
}
